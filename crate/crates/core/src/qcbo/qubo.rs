use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::Instance;

use super::QcboModel;

/// Upper-triangular QUBO: `offset + Σ linear[i]·b_i + Σ quadratic[i,j]·b_i·b_j`.
///
/// Entries are sorted, indices in `quadratic` satisfy `i < j` and no entry
/// has a zero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    n: usize,
    offset: f64,
    linear: Vec<(usize, f64)>,
    quadratic: Vec<(usize, usize, f64)>,
}

impl Qubo {
    /// Normalizes the given terms: self-pairs fold into the linear part,
    /// pairs are reordered to `i < j`, duplicates are summed and zeros dropped.
    pub fn new(
        n: usize,
        offset: f64,
        linear: impl IntoIterator<Item = (usize, f64)>,
        quadratic: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut lin: HashMap<usize, f64> = HashMap::new();
        let mut quad: HashMap<(usize, usize), f64> = HashMap::new();
        let check = |i: usize| {
            if i >= n {
                Err(Error::Input(format!("variable {i} out of range 0..{n}")))
            } else {
                Ok(())
            }
        };
        for (i, c) in linear {
            check(i)?;
            *lin.entry(i).or_default() += c;
        }
        for (i, j, c) in quadratic {
            check(i)?;
            check(j)?;
            if i == j {
                *lin.entry(i).or_default() += c;
            } else {
                *quad.entry((i.min(j), i.max(j))).or_default() += c;
            }
        }
        let mut linear: Vec<_> = lin.into_iter().filter(|&(_, c)| c != 0.0).collect();
        linear.sort_unstable_by_key(|&(i, _)| i);
        let mut quadratic: Vec<_> =
            quad.into_iter().filter(|&(_, c)| c != 0.0).map(|((i, j), c)| (i, j, c)).collect();
        quadratic.sort_unstable_by_key(|&(i, j, _)| (i, j));
        Ok(Self { n, offset, linear, quadratic })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &[(usize, f64)] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[(usize, usize, f64)] {
        &self.quadratic
    }

    pub fn energy(&self, bits: &[bool]) -> Result<f64> {
        qubo_energy(self, bits)
    }
}

/// `|T| + δ + 1`, one more than the largest objective value.
pub fn default_penalty(instance: &Instance) -> f64 {
    f64::from(instance.horizon()) + f64::from(instance.delta()) + 1.0
}

/// Compiles `objective + penalty · violation measure` into a QUBO.
///
/// Linear rows contribute `(lhs − rhs)²`; quadratic rows contribute their
/// expanded product. Coefficients stay integral whenever `penalty` is.
pub fn to_qubo(model: &QcboModel, penalty: f64) -> Result<Qubo> {
    if !(penalty.is_finite() && penalty > 0.0) {
        return Err(Error::Config(format!("penalty must be positive, got {penalty}")));
    }
    // Violation polynomial in exact integers, scaled once at the end.
    let mut lin: HashMap<usize, i64> = HashMap::new();
    let mut quad: HashMap<(usize, usize), i64> = HashMap::new();
    let mut constant: i64 = 0;
    let add_pair = |quad: &mut HashMap<(usize, usize), i64>, lin: &mut HashMap<usize, i64>, a: usize, b: usize, c: i64| {
        if a == b {
            *lin.entry(a).or_default() += c;
        } else {
            *quad.entry((a.min(b), a.max(b))).or_default() += c;
        }
    };
    for row in model.linear_rows() {
        // (Σ c_i b_i − r)² = Σ c_i² b_i + 2 Σ_{i<j} c_i c_j b_i b_j − 2r Σ c_i b_i + r².
        let terms = row.form.terms();
        for (n, &(i, ci)) in terms.iter().enumerate() {
            *lin.entry(i).or_default() += ci * ci - 2 * row.rhs * ci;
            for &(j, cj) in &terms[n + 1..] {
                add_pair(&mut quad, &mut lin, i, j, 2 * ci * cj);
            }
        }
        constant += row.rhs * row.rhs;
    }
    for row in model.quadratic_rows() {
        for &(i, ci) in row.left.terms() {
            for &(j, cj) in row.right.terms() {
                add_pair(&mut quad, &mut lin, i, j, ci * cj);
            }
        }
    }
    let (objective, objective_offset) = model.objective();
    let mut linear: HashMap<usize, f64> =
        lin.into_iter().map(|(i, c)| (i, penalty * c as f64)).collect();
    for &(i, c) in objective.terms() {
        *linear.entry(i).or_default() += c as f64;
    }
    Qubo::new(
        model.num_vars(),
        objective_offset as f64 + penalty * constant as f64,
        linear,
        quad.into_iter().map(|((i, j), c)| (i, j, penalty * c as f64)),
    )
}

pub fn qubo_energy(qubo: &Qubo, bits: &[bool]) -> Result<f64> {
    if bits.len() != qubo.n {
        return Err(Error::Input(format!(
            "bit vector has length {}, QUBO has {} variables",
            bits.len(),
            qubo.n
        )));
    }
    let lin: f64 = qubo.linear.iter().filter(|&&(i, _)| bits[i]).map(|&(_, c)| c).sum();
    let quad: f64 =
        qubo.quadratic.iter().filter(|&&(i, j, _)| bits[i] && bits[j]).map(|&(_, _, c)| c).sum();
    Ok(qubo.offset + lin + quad)
}

/// `{"linear": [[i, c]], "n", "offset", "quadratic": [[i, j, c]]}` with
/// sorted keys and entries.
pub fn write_qubo(qubo: &Qubo) -> String {
    let doc = json!({
        "linear": qubo.linear.iter().map(|&(i, c)| json!([i, c])).collect::<Vec<_>>(),
        "n": qubo.n,
        "offset": qubo.offset,
        "quadratic": qubo.quadratic.iter().map(|&(i, j, c)| json!([i, j, c])).collect::<Vec<_>>(),
    });
    doc.to_string()
}

pub fn read_qubo(text: &str) -> Result<Qubo> {
    let parse_err = |field: &str, message: &str| Error::Parse { field: field.into(), message: message.into() };
    let value: Value = serde_json::from_str(text).map_err(|e| parse_err("document", &e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| parse_err("document", "expected an object"))?;
    for key in obj.keys() {
        if !["n", "offset", "linear", "quadratic"].contains(&key.as_str()) {
            return Err(parse_err(key, "unknown field"));
        }
    }
    let get = |k: &str| obj.get(k).ok_or_else(|| parse_err(k, "missing field"));
    let n = get("n")?.as_u64().ok_or_else(|| parse_err("n", "expected a nonnegative integer"))? as usize;
    let offset = get("offset")?.as_f64().ok_or_else(|| parse_err("offset", "expected a number"))?;
    let rows = |k: &str, arity: usize| -> Result<Vec<Vec<f64>>> {
        let list = get(k)?.as_array().ok_or_else(|| parse_err(k, "expected an array"))?;
        list.iter()
            .enumerate()
            .map(|(r, row)| {
                let field = format!("{k}[{r}]");
                let cells = row.as_array().filter(|c| c.len() == arity).ok_or_else(|| {
                    parse_err(&field, &format!("expected an array of {arity} numbers"))
                })?;
                cells
                    .iter()
                    .enumerate()
                    .map(|(c, cell)| {
                        let is_index = c + 1 < arity;
                        match (is_index, cell.as_u64(), cell.as_f64()) {
                            (true, Some(i), _) => Ok(i as f64),
                            (false, _, Some(x)) => Ok(x),
                            _ => Err(parse_err(&format!("{field}[{c}]"), "bad entry")),
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let linear = rows("linear", 2)?;
    let quadratic = rows("quadratic", 3)?;
    for (r, q) in quadratic.iter().enumerate() {
        if q[0] >= q[1] {
            return Err(parse_err(&format!("quadratic[{r}]"), "indices must satisfy i < j"));
        }
    }
    let qubo = Qubo::new(
        n,
        offset,
        linear.iter().map(|l| (l[0] as usize, l[1])),
        quadratic.iter().map(|q| (q[0] as usize, q[1] as usize, q[2])),
    )
    .map_err(|e| parse_err("document", &e.to_string()))?;
    if qubo.linear.len() != linear.len() || qubo.quadratic.len() != quadratic.len() {
        return Err(parse_err("document", "duplicate or zero entries"));
    }
    Ok(qubo)
}
