use std::fmt::Write as _;

use super::{MilpModel, Sense, VarKind};

/// Terms per output line; keeps lines well below the 255 characters some
/// readers accept.
const TERMS_PER_LINE: usize = 8;

/// Renders the model in LP text format (`Minimize`, `Subject To`, `Bounds`,
/// `Binaries`, `End`). Rows are named `<family>_<n>` with `n` counting
/// within the family. A nonzero objective constant is written as a comment,
/// since LP readers disagree on constants in the objective.
pub fn export_lp(model: &MilpModel) -> String {
    let names: Vec<&str> = model.vars().iter().map(|v| v.name.as_str()).collect();
    let mut out = String::new();
    let (objective, offset) = model.objective();
    if offset != 0.0 {
        let _ = writeln!(out, "\\ objective constant {}", number(offset));
    }
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, objective, &names);
    out.push_str("\nSubject To\n");

    let mut counters = std::collections::HashMap::new();
    for c in model.constraints() {
        let n = counters.entry(c.family.as_str()).or_insert(0usize);
        let _ = write!(out, " {}_{}:", c.family, n);
        *n += 1;
        write_terms(&mut out, &c.terms, &names);
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {sense} {}", number(c.rhs));
    }

    out.push_str("Bounds\n");
    for v in model.vars().iter().filter(|v| v.kind == VarKind::Continuous) {
        let _ = writeln!(out, " {} >= 0", v.name);
    }
    let binaries: Vec<&str> =
        model.vars().iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], names: &[&str]) {
    if terms.is_empty() {
        // An empty form still needs a term to be well formed.
        out.push_str(" 0 ");
        out.push_str(names.first().copied().unwrap_or("zero"));
        return;
    }
    for (n, &(v, c)) in terms.iter().enumerate() {
        if n > 0 && n % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = c.abs();
        if n == 0 && sign == "+" {
            out.push(' ');
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag != 1.0 {
            let _ = write!(out, "{} ", number(mag));
        }
        out.push_str(names[v]);
    }
}

/// Integers without a fractional part, everything else via `Display`.
fn number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}
