//! Time-indexed MILP of the AGV job shop, its LP export and the
//! linearization of a [`QcboModel`](crate::qcbo::QcboModel).

mod build;
mod codec;
mod linearize;
mod lp;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use build::{build_milp, build_milp_with, MilpIndex, MilpOptions};
pub use codec::{decode_milp_solution, encode_schedule_milp};
pub use linearize::linearize_qcbo;
pub use lp::export_lp;

/// Family labels of [`build_milp`] rows in default mode.
pub const FAMILIES: [&str; 10] = [
    "assign_x",
    "assign_y",
    "machine_cap",
    "precedence",
    "at_most_one_start",
    "start_window",
    "end_window",
    "start_end_window",
    "single_run",
    "makespan",
];

/// Tolerance used when comparing row activities and rounding binaries.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    /// Continuous with lower bound 0.
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
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

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub family: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    /// Signed slack: nonnegative when satisfied (for `=` rows, minus the
    /// absolute deviation).
    pub fn slack(&self, values: &[f64]) -> f64 {
        let a = self.activity(values);
        match self.sense {
            Sense::Le => self.rhs - a,
            Sense::Ge => a - self.rhs,
            Sense::Eq => -(a - self.rhs).abs(),
        }
    }
}

/// A linear model over binaries and nonnegative continuous variables,
/// minimized.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpModel {
    vars: Vec<Variable>,
    index: BTreeMap<String, usize>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, f64)>,
    objective_offset: f64,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a variable and returns its index.
    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Input(format!("duplicate variable `{name}`")));
        }
        let v = self.vars.len();
        self.index.insert(name.clone(), v);
        self.vars.push(Variable { name, kind });
        Ok(v)
    }

    pub fn add_constraint(
        &mut self,
        family: impl Into<String>,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<()> {
        self.check_terms(&terms)?;
        self.constraints.push(Constraint { family: family.into(), terms, sense, rhs });
        Ok(())
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, f64)>, offset: f64) -> Result<()> {
        self.check_terms(&terms)?;
        self.objective = terms;
        self.objective_offset = offset;
        Ok(())
    }

    fn check_terms(&self, terms: &[(usize, f64)]) -> Result<()> {
        match terms.iter().find(|&&(v, _)| v >= self.vars.len()) {
            Some(&(v, _)) => Err(Error::Input(format!("undeclared variable index {v}"))),
            None => Ok(()),
        }
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> (&[(usize, f64)], f64) {
        (&self.objective, self.objective_offset)
    }

    /// Number of rows per family label.
    pub fn family_counts(&self) -> BTreeMap<&str, usize> {
        let mut out = BTreeMap::new();
        for c in &self.constraints {
            *out.entry(c.family.as_str()).or_insert(0) += 1;
        }
        out
    }

    pub fn objective_value(&self, assignment: &MilpAssignment) -> Result<f64> {
        self.check_len(assignment)?;
        Ok(self.objective.iter().map(|&(v, c)| c * assignment.0[v]).sum::<f64>() + self.objective_offset)
    }

    fn check_len(&self, assignment: &MilpAssignment) -> Result<()> {
        if assignment.0.len() != self.vars.len() {
            return Err(Error::Input(format!(
                "assignment has {} values, model has {} variables",
                assignment.0.len(),
                self.vars.len()
            )));
        }
        Ok(())
    }
}

/// Dense variable values in model order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpAssignment(pub Vec<f64>);

impl MilpAssignment {
    /// Values keyed by variable name.
    pub fn to_named(&self, model: &MilpModel) -> BTreeMap<String, f64> {
        model.vars.iter().zip(&self.0).map(|(v, &x)| (v.name.clone(), x)).collect()
    }

    /// Builds a dense assignment; every declared variable must be present
    /// and no unknown name may appear.
    pub fn from_named(model: &MilpModel, values: &BTreeMap<String, f64>) -> Result<Self> {
        if let Some(name) = values.keys().find(|n| !model.index.contains_key(*n)) {
            return Err(Error::Input(format!("unknown variable `{name}`")));
        }
        model
            .vars
            .iter()
            .map(|v| {
                values
                    .get(&v.name)
                    .copied()
                    .ok_or_else(|| Error::Input(format!("missing variable `{}`", v.name)))
            })
            .collect::<Result<_>>()
            .map(Self)
    }
}

/// A row whose activity violates its sense by more than [`TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct RowViolation {
    pub family: String,
    pub row: usize,
    /// Negative amount by which the row is violated.
    pub slack: f64,
}

impl fmt::Display for RowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} row {}: slack {}", self.family, self.row, self.slack)
    }
}

/// Returns every violated row. Values outside a variable's domain (binaries
/// away from 0/1, negative continuous values) are input errors.
pub fn check_milp_feasibility(model: &MilpModel, assignment: &MilpAssignment) -> Result<Vec<RowViolation>> {
    model.check_len(assignment)?;
    for (v, &x) in model.vars.iter().zip(&assignment.0) {
        let ok = match v.kind {
            VarKind::Binary => x.abs() <= TOLERANCE || (x - 1.0).abs() <= TOLERANCE,
            VarKind::Continuous => x >= -TOLERANCE,
        };
        if !ok || !x.is_finite() {
            return Err(Error::Input(format!("value {x} outside the domain of `{}`", v.name)));
        }
    }
    Ok(model
        .constraints
        .iter()
        .enumerate()
        .filter_map(|(row, c)| {
            let slack = c.slack(&assignment.0);
            (slack < -TOLERANCE).then(|| RowViolation { family: c.family.clone(), row, slack })
        })
        .collect())
}
