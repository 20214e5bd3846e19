//! Sylvester matrices: resultants as polynomial determinants.
//!
//! For `f = a_m x^m + ... + a_0` and `g = b_n x^n + ... + b_0` the Sylvester
//! matrix has `n` shifted copies of `f`'s coefficient row followed by `m`
//! shifted copies of `g`'s. Its entries are polynomials in the remaining
//! variables, and the shifted rows repeat the same few polynomials many
//! times, which the matrix dedup map picks up.

use crate::error::ShapeError;
use crate::polytensor::{Poly, PolyMatrix};
use crate::scalar::Coeff;

/// Sylvester matrix of `f` and `g` with respect to `var`. The eliminated
/// variable stays in the variable list (with degree zero everywhere) so the
/// matrix always has at least one variable.
pub fn sylvester<T: Coeff>(vars: &[String], f: &Poly<T>, g: &Poly<T>, var: &str) -> Result<PolyMatrix<T>, ShapeError> {
    let v = vars
        .iter()
        .position(|n| n == var)
        .ok_or_else(|| ShapeError::Mismatch(format!("eliminated variable `{var}` is not declared")))?;
    if f.nvars() != vars.len() || g.nvars() != vars.len() {
        return Err(ShapeError::ArityMismatch { got: f.nvars().min(g.nvars()), expected: vars.len() });
    }
    let fc = f.coefficients_in(v);
    let gc = g.coefficients_in(v);
    let (m, n) = (fc.len() - 1, gc.len() - 1);
    if m == 0 && n == 0 {
        return Err(ShapeError::Mismatch(format!("no eliminand: neither polynomial involves `{var}`")));
    }
    let size = m + n;
    let zero = Poly::zero(vars.len());
    let mut entries = vec![zero; size * size];
    for i in 0..n {
        for (k, c) in fc.iter().rev().enumerate() {
            entries[i * size + i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in gc.iter().rev().enumerate() {
            entries[(n + i) * size + i + k] = c.clone();
        }
    }
    PolyMatrix::new(vars.to_vec(), size, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{format_poly, parse_poly};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn linear_pair() {
        let v = names(&["x", "u", "v"]);
        let f = parse_poly("x + u", &v).unwrap();
        let g = parse_poly("x + v", &v).unwrap();
        let s = sylvester(&v, &f, &g, "x").unwrap();
        assert_eq!(s.order(), 2);
        let shown: Vec<String> = s.entries().iter().map(|e| format_poly(e, &v)).collect();
        assert_eq!(shown, vec!["1", "u", "1", "v"]);
    }

    #[test]
    fn shape_and_dedup() {
        let v = names(&["x", "a"]);
        let f = parse_poly("x^3 + a*x + 1", &v).unwrap();
        let g = parse_poly("x^2 - a", &v).unwrap();
        let s = sylvester(&v, &f, &g, "x").unwrap();
        assert_eq!(s.order(), 5);
        // distinct entries: 0, 1, a, -a
        assert_eq!(s.unique_count(), 4);
        let shown: Vec<String> = (0..5).map(|j| format_poly(s.entry(2, j), &v)).collect();
        assert_eq!(shown, vec!["1", "0", "-a", "0", "0"]);
    }

    #[test]
    fn no_eliminand() {
        let v = names(&["x", "y"]);
        let f = parse_poly("y + 1", &v).unwrap();
        let g = parse_poly("2", &v).unwrap();
        assert!(sylvester(&v, &f, &g, "x").is_err());
        assert!(sylvester(&v, &f, &g, "z").is_err());
    }
}
