use crate::error::{Error, Result};

/// `100 · (objective − best_known) / best_known`, in percent.
pub fn primal_gap(objective: f64, best_known: f64) -> Result<f64> {
    if !(best_known >= 1.0) {
        return Err(Error::Input(format!("best known value must be at least 1, got {best_known}")));
    }
    if objective < best_known {
        return Err(Error::Input(format!("objective {objective} is below the best known value {best_known}")));
    }
    Ok(100.0 * (objective - best_known) / best_known)
}

/// Rank-by-rank comparison of two ascending lists: `(wins_a, wins_b, ties)`,
/// where a smaller value wins.
pub fn wins<T: PartialOrd>(a: &[T], b: &[T]) -> Result<(usize, usize, usize)> {
    if a.len() != b.len() {
        return Err(Error::Input(format!("lists have lengths {} and {}", a.len(), b.len())));
    }
    let mut out = (0, 0, 0);
    for (x, y) in a.iter().zip(b) {
        if x < y {
            out.0 += 1;
        } else if y < x {
            out.1 += 1;
        } else {
            out.2 += 1;
        }
    }
    Ok(out)
}

/// `Δ(t_a, t_b) = t_a / t_b`; above 1 means `a` was slower.
pub fn tts_ratio(t_a: f64, t_b: f64) -> Result<f64> {
    if !(t_b > 0.0) {
        return Err(Error::Input(format!("reference time must be positive, got {t_b}")));
    }
    Ok(t_a / t_b)
}

/// Geometric mean and geometric standard deviation (population convention
/// on the logarithms).
pub fn geo_stats(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::Input("geometric statistics of an empty list".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Input(format!("geometric statistics need positive values, got {v}")));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (mean, std) = mean_std(&logs);
    Ok((mean.exp(), std.exp()))
}

/// Arithmetic mean and population standard deviation; `(0, 0)` when empty.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps() {
        assert_eq!(primal_gap(60.0, 60.0).unwrap(), 0.0);
        assert_eq!(primal_gap(66.0, 60.0).unwrap(), 10.0);
        assert_eq!(primal_gap(90.0, 60.0).unwrap(), 50.0);
        assert!(primal_gap(59.0, 60.0).is_err());
        assert!(primal_gap(1.0, 0.0).is_err());
    }

    #[test]
    fn win_tallies() {
        assert_eq!(wins(&[5], &[7]).unwrap(), (1, 0, 0));
        assert_eq!(wins(&[5], &[5]).unwrap(), (0, 0, 1));
        let mut a = vec![1, 2, 3];
        let mut b = vec![1, 3, 2];
        a.sort();
        b.sort();
        assert_eq!(wins(&a, &b).unwrap(), (0, 0, 3));
        assert!(wins(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn ratios_and_geometric_stats() {
        assert_eq!(tts_ratio(10.0, 2.0).unwrap(), 5.0);
        assert_eq!(tts_ratio(2.0, 10.0).unwrap(), 0.2);
        assert_eq!(tts_ratio(3.0, 3.0).unwrap(), 1.0);
        assert!(tts_ratio(1.0, 0.0).is_err());

        let (m, _) = geo_stats(&[4.0, 0.25]).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        let (m, s) = geo_stats(&[3.5]).unwrap();
        assert!((m - 3.5).abs() < 1e-12 && (s - 1.0).abs() < 1e-12);
        assert!((geo_stats(&[2.0, 8.0]).unwrap().0 - 4.0).abs() < 1e-12);
        assert!(geo_stats(&[1.0, 0.0]).is_err());
        assert!(geo_stats(&[]).is_err());
    }
}
