use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::ShapeError;
use crate::modarith::{add_mod, mul_mod, pow_mod};
use crate::scalar::{Coeff, IntCoeff};

/// Exponent vector of a monomial, one entry per variable.
pub type Monomial = Vec<u32>;

/// Sparse multivariate polynomial in normalised form: each monomial appears
/// at most once and no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    nvars: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Coeff> Poly<T> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c).expect("arity matches");
        p
    }

    /// Collects `terms`, combining repeated monomials and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, ShapeError>
    where
        I: IntoIterator<Item = (Monomial, T)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, monomial: Monomial, c: T) -> Result<(), ShapeError> {
        if monomial.len() != self.nvars {
            return Err(ShapeError::ArityMismatch { got: monomial.len(), expected: self.nvars });
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&monomial) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(monomial, sum);
                }
            }
            None => {
                self.terms.insert(monomial, c);
            }
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, monomial: &[u32]) -> Option<&T> {
        self.terms.get(monomial)
    }

    /// Degree in variable `var`; zero for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    pub fn max_degrees(&self) -> Vec<u32> {
        (0..self.nvars).map(|v| self.degree_in(v)).collect()
    }

    pub fn neg(&self) -> Self {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ShapeError> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    /// Collects the terms by their exponent of `var`, returning one
    /// coefficient polynomial per power (index = power) in which `var` no
    /// longer occurs.
    pub fn coefficients_in(&self, var: usize) -> Vec<Self> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let k = std::mem::replace(&mut rest[var], 0) as usize;
            out[k].terms.insert(rest, c.clone());
        }
        out
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)).expect("same arity");
        }
        out
    }
}

impl<T: IntCoeff> Poly<T> {
    /// Sum of absolute coefficient values.
    pub fn l1_norm(&self) -> BigUint {
        self.terms
            .values()
            .map(|c| c.abs().to_bigint().expect("integer").magnitude().clone())
            .fold(BigUint::zero(), |acc, x| acc + x)
    }

    /// Value at `point` modulo `p`, term by term.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> u64 {
        assert_eq!(point.len(), self.nvars);
        self.terms.iter().fold(0, |acc, (m, c)| {
            let mut t = c.residue(p);
            for (x, &e) in point.iter().zip(m) {
                t = mul_mod(t, pow_mod(*x, e as u64, p), p);
            }
            add_mod(acc, t, p)
        })
    }
}
