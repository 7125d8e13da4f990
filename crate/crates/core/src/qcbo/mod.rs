//! Quadratic-constrained binary optimization model of the AGV job shop.
//!
//! The model is pure binary with a linear objective, linear equality rows and
//! quadratic rows of the form `(a·v)(b·v) = 0` where both factors have
//! nonnegative integer coefficients. Rows are kept factored so every
//! violation can be attributed to its constraint family; they are expanded
//! only when compiling a [`Qubo`].

mod build;
mod codec;
mod qubo;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use build::{build_qcbo, QcboIndex};
pub use codec::{decode_qcbo_solution, encode_schedule_qcbo};
pub use qubo::{default_penalty, qubo_energy, read_qubo, to_qubo, write_qubo, Qubo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    // Linear rows.
    PickupAssign,
    StartAssign,
    EndAssign,
    StartEndLink,
    MakespanAssign,
    // Quadratic rows. `Precedence` also labels the linear rows that pin
    // too-early A2 starts to zero.
    Precedence,
    Machine,
    AgvStartStart,
    AgvEndEnd,
    AgvStartEnd,
    AgvEndStart,
    SuccessorSameAgv,
    SuccessorDiffAgv,
    MakespanCoupling,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::PickupAssign => "pickup_assign",
            Family::StartAssign => "start_assign",
            Family::EndAssign => "end_assign",
            Family::StartEndLink => "start_end_link",
            Family::MakespanAssign => "makespan_assign",
            Family::Precedence => "precedence",
            Family::Machine => "machine",
            Family::AgvStartStart => "agv_start_start",
            Family::AgvEndEnd => "agv_end_end",
            Family::AgvStartEnd => "agv_start_end",
            Family::AgvEndStart => "agv_end_start",
            Family::SuccessorSameAgv => "successor_same_agv",
            Family::SuccessorDiffAgv => "successor_diff_agv",
            Family::MakespanCoupling => "makespan_coupling",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Sparse integer linear form over binary variables, sorted by variable with
/// duplicates merged and zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct LinearForm {
    terms: Vec<(usize, i64)>,
}

impl LinearForm {
    pub fn new(terms: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut terms: Vec<_> = terms.into_iter().collect();
        terms.sort_unstable_by_key(|&(v, _)| v);
        let mut merged: Vec<(usize, i64)> = Vec::with_capacity(terms.len());
        for (v, c) in terms {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0);
        Self { terms: merged }
    }

    /// Sum of the given variables, each with coefficient 1.
    pub fn sum(vars: impl IntoIterator<Item = usize>) -> Self {
        Self::new(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn terms(&self) -> &[(usize, i64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, bits: &[bool]) -> i64 {
        self.terms.iter().filter(|&&(v, _)| bits[v]).map(|&(_, c)| c).sum()
    }

    fn max_var(&self) -> Option<usize> {
        self.terms.last().map(|&(v, _)| v)
    }
}

/// `form = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRow {
    pub family: Family,
    pub form: LinearForm,
    pub rhs: i64,
}

/// `left · right = 0` with nonnegative coefficients on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticRow {
    pub family: Family,
    pub left: LinearForm,
    pub right: LinearForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcboModel {
    names: Vec<String>,
    linear: Vec<LinearRow>,
    quadratic: Vec<QuadraticRow>,
    objective: LinearForm,
    objective_offset: i64,
}

impl QcboModel {
    /// An empty model over the named binaries.
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            linear: Vec::new(),
            quadratic: Vec::new(),
            objective: LinearForm::default(),
            objective_offset: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn linear_rows(&self) -> &[LinearRow] {
        &self.linear
    }

    pub fn quadratic_rows(&self) -> &[QuadraticRow] {
        &self.quadratic
    }

    pub fn objective(&self) -> (&LinearForm, i64) {
        (&self.objective, self.objective_offset)
    }

    fn check_vars(&self, form: &LinearForm) -> Result<()> {
        match form.max_var() {
            Some(v) if v >= self.num_vars() => {
                Err(Error::Input(format!("variable {v} out of range 0..{}", self.num_vars())))
            }
            _ => Ok(()),
        }
    }

    pub fn set_objective(&mut self, form: LinearForm, offset: i64) -> Result<()> {
        self.check_vars(&form)?;
        self.objective = form;
        self.objective_offset = offset;
        Ok(())
    }

    pub fn add_linear(&mut self, family: Family, form: LinearForm, rhs: i64) -> Result<()> {
        self.check_vars(&form)?;
        self.linear.push(LinearRow { family, form, rhs });
        Ok(())
    }

    /// Adds `left · right = 0`. Both factors must have nonnegative
    /// coefficients, which makes the row equivalent to `≤ 0`.
    pub fn add_quadratic(&mut self, family: Family, left: LinearForm, right: LinearForm) -> Result<()> {
        self.check_vars(&left)?;
        self.check_vars(&right)?;
        if left.terms().iter().chain(right.terms()).any(|&(_, c)| c < 0) {
            return Err(Error::Input(format!("{family}: quadratic factors must be nonnegative")));
        }
        self.quadratic.push(QuadraticRow { family, left, right });
        Ok(())
    }

    fn check_len(&self, bits: &[bool]) -> Result<()> {
        if bits.len() != self.num_vars() {
            return Err(Error::Input(format!(
                "bit vector has length {}, model has {} binaries",
                bits.len(),
                self.num_vars()
            )));
        }
        Ok(())
    }

    pub fn objective_value(&self, bits: &[bool]) -> Result<i64> {
        self.check_len(bits)?;
        Ok(self.objective.eval(bits) + self.objective_offset)
    }

    /// Per-family violation totals: `(lhs − rhs)²` for each linear row and the
    /// product value for each quadratic row.
    pub fn violation_count(&self, bits: &[bool]) -> Result<ViolationTotals> {
        self.check_len(bits)?;
        let mut by_family = BTreeMap::new();
        for row in &self.linear {
            let r = row.form.eval(bits) - row.rhs;
            *by_family.entry(row.family).or_insert(0) += r * r;
        }
        for row in &self.quadratic {
            let left = row.left.eval(bits);
            let value = if left == 0 { 0 } else { left * row.right.eval(bits) };
            *by_family.entry(row.family).or_insert(0) += value;
        }
        Ok(ViolationTotals { by_family })
    }
}

/// Violation measure grouped by family. Every family with at least one row
/// is present, so zero entries are explicit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ViolationTotals {
    pub by_family: BTreeMap<Family, i64>,
}

impl ViolationTotals {
    pub fn total(&self) -> i64 {
        self.by_family.values().sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.total() == 0
    }

    pub fn get(&self, family: Family) -> i64 {
        self.by_family.get(&family).copied().unwrap_or(0)
    }

    /// Families with a nonzero total.
    pub fn violated(&self) -> Vec<Family> {
        self.by_family.iter().filter(|(_, &v)| v != 0).map(|(&f, _)| f).collect()
    }
}

/// Free-function form of [`QcboModel::violation_count`].
pub fn violation_count(model: &QcboModel, bits: &[bool]) -> Result<ViolationTotals> {
    model.violation_count(bits)
}
