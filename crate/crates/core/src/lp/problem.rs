//! Sparse LP container with semantic names for rows and columns.

use std::collections::HashMap;
use std::fmt;

use crate::lp::LpError;

/// Row sense, always read as `activity <sense> rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// Column handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Row handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    /// Evaluates `a·x` for this row.
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// Bidirectional map between semantic names and column/row indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarIndex {
    col_names: Vec<String>,
    row_names: Vec<String>,
    col_lookup: HashMap<String, usize>,
    row_lookup: HashMap<String, usize>,
}

impl VarIndex {
    pub fn col_name(&self, j: usize) -> &str {
        &self.col_names[j]
    }

    pub fn row_name(&self, i: usize) -> &str {
        &self.row_names[i]
    }

    pub fn col(&self, name: &str) -> Option<VarId> {
        self.col_lookup.get(name).copied().map(VarId)
    }

    pub fn row(&self, name: &str) -> Option<RowId> {
        self.row_lookup.get(name).copied().map(RowId)
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    pub fn row_names(&self) -> &[String] {
        &self.row_names
    }
}

/// A minimization LP: `min c·x  s.t.  a_i·x (<=|=|>=) b_i,  l <= x <= u`.
///
/// Built incrementally; once handed to a solver it is treated as immutable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
    names: VarIndex,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a column with bounds `[0, +inf)`.
    pub fn add_var(&mut self, name: impl Into<String>, cost: f64) -> VarId {
        self.add_bounded_var(name, cost, 0.0, f64::INFINITY)
    }

    pub fn add_bounded_var(
        &mut self,
        name: impl Into<String>,
        cost: f64,
        lower: f64,
        upper: f64,
    ) -> VarId {
        let j = self.objective.len();
        let name = name.into();
        self.names.col_lookup.insert(name.clone(), j);
        self.names.col_names.push(name);
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        VarId(j)
    }

    /// Appends a row. Coefficients on the same column are summed and exact
    /// zeros dropped.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> RowId {
        let mut merged: Vec<(usize, f64)> = coeffs.into_iter().map(|(v, a)| (v.0, a)).collect();
        merged.sort_by_key(|&(j, _)| j);
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(merged.len());
        for (j, a) in merged {
            match row.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => row.push((j, a)),
            }
        }
        row.retain(|&(_, a)| a != 0.0);
        let i = self.rows.len();
        let name = name.into();
        self.names.row_lookup.insert(name.clone(), i);
        self.names.row_names.push(name);
        self.rows.push(Row { coeffs: row, sense, rhs });
        RowId(i)
    }

    pub fn set_cost(&mut self, var: VarId, cost: f64) {
        self.objective[var.0] = cost;
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) {
        self.lower[var.0] = lower;
        self.upper[var.0] = upper;
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, id: RowId) -> &Row {
        &self.rows[id.0]
    }

    pub fn names(&self) -> &VarIndex {
        &self.names
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Structural checks run before every solve.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::DimensionMismatch(format!(
                "{} objective entries but {} lower / {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::InvalidProblem(format!(
                    "column {} has bounds [{l}, {u}]",
                    self.names.col_name(j)
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(LpError::InvalidProblem(format!(
                    "column {} has non-finite cost",
                    self.names.col_name(j)
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::InvalidProblem(format!(
                    "row {} has non-finite rhs",
                    self.names.row_name(i)
                )));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(LpError::DimensionMismatch(format!(
                        "row {} references column {j} of {n}",
                        self.names.row_name(i)
                    )));
                }
                if !a.is_finite() {
                    return Err(LpError::InvalidProblem(format!(
                        "row {} has a non-finite coefficient",
                        self.names.row_name(i)
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_coefficients_are_merged() {
        let mut lp = LpProblem::new();
        let x = lp.add_var("x", 1.0);
        let y = lp.add_var("y", 1.0);
        let r = lp.add_row("r", [(x, 1.0), (y, 2.0), (x, 0.5), (y, -2.0)], Sense::Ge, 1.0);
        assert_eq!(lp.row(r).coeffs, vec![(0, 1.5)]);
        assert_eq!(lp.names().col("y"), Some(y));
        assert_eq!(lp.names().row_name(0), "r");
    }

    #[test]
    fn validate_rejects_bad_column_reference() {
        let mut lp = LpProblem::new();
        let x = lp.add_var("x", 1.0);
        lp.add_row("r", [(VarId(x.0 + 3), 1.0)], Sense::Le, 1.0);
        assert!(matches!(lp.validate(), Err(LpError::DimensionMismatch(_))));
    }

    #[test]
    fn validate_rejects_inverted_bounds() {
        let mut lp = LpProblem::new();
        lp.add_bounded_var("x", 1.0, 2.0, 1.0);
        assert!(matches!(lp.validate(), Err(LpError::InvalidProblem(_))));
    }
}
