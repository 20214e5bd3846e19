use std::collections::HashMap;

use crate::error::ShapeError;
use crate::scalar::Coeff;

use super::poly::Poly;

/// Per-variable maximum degrees together with the variable names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeVector {
    pub degrees: Vec<u32>,
    pub variables: Vec<String>,
}

/// Square matrix of polynomials over one shared variable list.
///
/// Structurally equal entries share a unique-entry id, so downstream stages
/// can transform each distinct polynomial once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix<T> {
    vars: Vec<String>,
    order: usize,
    entries: Vec<Poly<T>>,
    dedup: Vec<usize>,
    uniques: Vec<usize>,
}

impl<T: Coeff> PolyMatrix<T> {
    /// `entries` are row-major, `order * order` of them.
    pub fn new(vars: Vec<String>, order: usize, entries: Vec<Poly<T>>) -> Result<Self, ShapeError> {
        if vars.is_empty() {
            return Err(ShapeError::Mismatch("at least one variable is required".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(ShapeError::Mismatch(format!("variable {v} declared twice")));
            }
        }
        if order == 0 || entries.len() != order * order {
            return Err(ShapeError::Mismatch(format!(
                "{} entries do not form a nonempty square matrix of order {order}",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.nvars() != vars.len()) {
            return Err(ShapeError::ArityMismatch { got: e.nvars(), expected: vars.len() });
        }
        let mut ids: HashMap<&Poly<T>, usize> = HashMap::new();
        let mut uniques = Vec::new();
        let dedup = entries
            .iter()
            .enumerate()
            .map(|(pos, e)| {
                *ids.entry(e).or_insert_with(|| {
                    uniques.push(pos);
                    uniques.len() - 1
                })
            })
            .collect();
        Ok(PolyMatrix { vars, order, entries, dedup, uniques })
    }

    pub fn from_rows(vars: Vec<String>, rows: Vec<Vec<Poly<T>>>) -> Result<Self, ShapeError> {
        let order = rows.len();
        if let Some(row) = rows.iter().find(|row| row.len() != order) {
            return Err(ShapeError::Mismatch(format!("row of length {} in a matrix with {order} rows", row.len())));
        }
        Self::new(vars, order, rows.into_iter().flatten().collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &Poly<T> {
        &self.entries[row * self.order + col]
    }

    pub fn entries(&self) -> &[Poly<T>] {
        &self.entries
    }

    /// Position (row-major) to unique-entry id.
    pub fn dedup_map(&self) -> &[usize] {
        &self.dedup
    }

    pub fn unique_count(&self) -> usize {
        self.uniques.len()
    }

    pub fn unique_entries(&self) -> impl Iterator<Item = &Poly<T>> + '_ {
        self.uniques.iter().map(move |&pos| &self.entries[pos])
    }

    pub fn unique_entry(&self, id: usize) -> &Poly<T> {
        &self.entries[self.uniques[id]]
    }

    /// Replication factor `k / r^2`.
    pub fn mu(&self) -> f64 {
        self.unique_count() as f64 / (self.order * self.order) as f64
    }

    pub fn degree_vector(&self) -> DegreeVector {
        let degrees =
            (0..self.nvars()).map(|v| self.entries.iter().map(|e| e.degree_in(v)).max().unwrap_or(0)).collect();
        DegreeVector { degrees, variables: self.vars.clone() }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U + Copy) -> PolyMatrix<U> {
        PolyMatrix::new(self.vars.clone(), self.order, self.entries.iter().map(|e| e.map(f)).collect())
            .expect("same structure")
    }
}
