use std::collections::BTreeMap;

use crate::error::Result;
use crate::qcbo::QcboModel;

use super::{MilpModel, Sense, VarKind};

/// Linear reformulation of a QCBO.
///
/// Every distinct product `b_i·b_j` (`i < j`) occurring in a quadratic row
/// gets a binary `w_i_j` tied to its factors by `w ≤ b_i`, `w ≤ b_j` and
/// `w ≥ b_i + b_j − 1` (family `linking`). Each quadratic row becomes the
/// linear row `Σ c·w = 0` under its own family label; squares `b_i·b_i`
/// reduce to `b_i`. Linear rows and the objective are copied unchanged, and
/// the original binaries keep their indices.
pub fn linearize_qcbo(qcbo: &QcboModel) -> Result<MilpModel> {
    let mut m = MilpModel::new();
    for name in qcbo.names() {
        m.add_var(name.clone(), VarKind::Binary)?;
    }
    let (objective, offset) = qcbo.objective();
    m.set_objective(objective.terms().iter().map(|&(v, c)| (v, c as f64)).collect(), offset as f64)?;
    for row in qcbo.linear_rows() {
        let terms = row.form.terms().iter().map(|&(v, c)| (v, c as f64)).collect();
        m.add_constraint(row.family.label(), terms, Sense::Eq, row.rhs as f64)?;
    }

    let mut aux: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut rows = Vec::with_capacity(qcbo.quadratic_rows().len());
    for row in qcbo.quadratic_rows() {
        let mut terms: BTreeMap<usize, i64> = BTreeMap::new();
        for &(a, ca) in row.left.terms() {
            for &(b, cb) in row.right.terms() {
                let v = if a == b {
                    a
                } else {
                    let key = (a.min(b), a.max(b));
                    match aux.get(&key) {
                        Some(&w) => w,
                        None => {
                            let w = m.add_var(format!("w_{}_{}", key.0, key.1), VarKind::Binary)?;
                            aux.insert(key, w);
                            w
                        }
                    }
                };
                *terms.entry(v).or_default() += ca * cb;
            }
        }
        rows.push((row.family, terms));
    }
    for (family, terms) in rows {
        let terms = terms.into_iter().map(|(v, c)| (v, c as f64)).collect();
        m.add_constraint(family.label(), terms, Sense::Eq, 0.0)?;
    }
    for (&(a, b), &w) in &aux {
        m.add_constraint("linking", vec![(w, 1.0), (a, -1.0)], Sense::Le, 0.0)?;
        m.add_constraint("linking", vec![(w, 1.0), (b, -1.0)], Sense::Le, 0.0)?;
        m.add_constraint("linking", vec![(w, 1.0), (a, -1.0), (b, -1.0)], Sense::Ge, -1.0)?;
    }
    Ok(m)
}
