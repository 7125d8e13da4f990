use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::stats::{geo_stats, mean_std, primal_gap, tts_ratio, wins};
use super::suite::{Arm, ModelKind, RunRecord};
use super::svg::{scatter, Series};
use crate::solve::Method;

/// Rank names in comparison order.
pub const RANKS: [&str; 5] = ["best", "second", "median", "second_worst", "worst"];

/// Shortest time-to-target used in ratios, in seconds.
pub const MIN_TTS: f64 = 1e-6;

pub const GAP_HEADER: &str = "model,method,multiplier,rank,instances,avg_gap,std_gap";
pub const WINS_HEADER: &str = "arm_a,arm_b,multiplier,wins_a,wins_b,ties,pairs";
pub const TTS_HEADER: &str = "arm,reference,multiplier,rank,count,geo_mean,geo_std";

/// Position of a named rank among `n` sorted runs.
pub fn rank_index(rank: usize, n: usize) -> usize {
    let i = match rank {
        0 => 0,
        1 => 1,
        2 => n / 2,
        3 => n.saturating_sub(2),
        _ => n.saturating_sub(1),
    };
    i.min(n.saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub arm: Arm,
    pub multiplier: u32,
    pub rank: usize,
    pub instances: usize,
    pub avg_gap: f64,
    pub std_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinsRow {
    pub arm_a: Arm,
    pub arm_b: Arm,
    pub multiplier: u32,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TtsRow {
    pub arm: Arm,
    pub reference: Arm,
    pub multiplier: u32,
    pub rank: usize,
    pub ratios: Vec<f64>,
    /// Geometric mean and standard deviation of `ratios`, if any.
    pub geo: Option<(f64, f64)>,
}

/// Aggregated benchmark statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Minimum objective per instance over all records.
    pub best_known: BTreeMap<String, u64>,
    /// Instances ordered by QCBO size, then id.
    pub instances: Vec<String>,
    pub gaps: Vec<GapRow>,
    pub wins: Vec<WinsRow>,
    pub tts: Vec<TtsRow>,
    pub reference: Arm,
    records: Vec<RunRecord>,
}

type Key<'a> = (&'a str, Arm, u32);

/// First trace time at which the incumbent reaches `target`.
pub fn time_to_target(trace: &[(f64, u64)], target: u64) -> Option<f64> {
    trace.iter().find(|p| p.1 <= target).map(|p| p.0)
}

impl Report {
    /// Computes all statistics. The time-to-solution target of an instance
    /// at a multiplier is the best objective the reference arm reached
    /// there; without `reference`, `qcbo+anneal` is used if present, else the
    /// first arm.
    pub fn build(records: &[RunRecord], reference: Option<Arm>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Report("no records".into()));
        }
        let mut best_known: BTreeMap<String, u64> = BTreeMap::new();
        let mut size: BTreeMap<&str, usize> = BTreeMap::new();
        let mut groups: BTreeMap<Key, Vec<&RunRecord>> = BTreeMap::new();
        for r in records {
            let b = best_known.entry(r.instance.clone()).or_insert(r.objective);
            *b = (*b).min(r.objective);
            size.insert(&r.instance, r.qcbo_vars);
            groups.entry((&r.instance, r.arm(), r.multiplier)).or_default().push(r);
        }
        for g in groups.values_mut() {
            g.sort_by(|a, b| a.objective.cmp(&b.objective).then(a.run.cmp(&b.run)));
        }
        let mut instances: Vec<String> = best_known.keys().cloned().collect();
        instances.sort_by_key(|id| (size[id.as_str()], id.clone()));
        let arms: BTreeSet<Arm> = records.iter().map(RunRecord::arm).collect();
        let multipliers: BTreeSet<u32> = records.iter().map(|r| r.multiplier).collect();
        let qcbo_anneal = Arm { model: ModelKind::Qcbo, method: Method::Anneal };
        let reference = match reference {
            Some(r) if arms.contains(&r) => r,
            Some(r) => return Err(Error::Report(format!("reference arm {r} has no records"))),
            None if arms.contains(&qcbo_anneal) => qcbo_anneal,
            None => *arms.iter().next().expect("records are nonempty"),
        };

        let gap_of = |r: &RunRecord| primal_gap(r.objective as f64, best_known[&r.instance].max(1) as f64);

        let mut gaps = Vec::new();
        for &arm in &arms {
            for &m in &multipliers {
                for rank in 0..RANKS.len() {
                    let mut values = Vec::new();
                    for id in &instances {
                        if let Some(runs) = groups.get(&(id.as_str(), arm, m)) {
                            values.push(gap_of(runs[rank_index(rank, runs.len())])?);
                        }
                    }
                    if values.is_empty() {
                        continue;
                    }
                    let (avg_gap, std_gap) = mean_std(&values);
                    gaps.push(GapRow { arm, multiplier: m, rank, instances: values.len(), avg_gap, std_gap });
                }
            }
        }

        let mut win_rows = Vec::new();
        let arm_list: Vec<Arm> = arms.iter().copied().collect();
        for (n, &a) in arm_list.iter().enumerate() {
            for &b in &arm_list[n + 1..] {
                for &m in &multipliers {
                    let mut row = WinsRow { arm_a: a, arm_b: b, multiplier: m, wins_a: 0, wins_b: 0, ties: 0 };
                    let mut any = false;
                    for id in &instances {
                        let (Some(ra), Some(rb)) = (groups.get(&(id.as_str(), a, m)), groups.get(&(id.as_str(), b, m)))
                        else {
                            continue;
                        };
                        let oa: Vec<u64> = ra.iter().map(|r| r.objective).collect();
                        let ob: Vec<u64> = rb.iter().map(|r| r.objective).collect();
                        let (wa, wb, t) = wins(&oa, &ob).map_err(|e| Error::Report(format!("{id}: {e}")))?;
                        row.wins_a += wa;
                        row.wins_b += wb;
                        row.ties += t;
                        any = true;
                    }
                    if any {
                        win_rows.push(row);
                    }
                }
            }
        }

        let mut tts = Vec::new();
        for &arm in arms.iter().filter(|&&a| a != reference) {
            for &m in &multipliers {
                for rank in 0..RANKS.len() {
                    let mut ratios = Vec::new();
                    let mut present = false;
                    for id in &instances {
                        let (Some(refs), Some(runs)) =
                            (groups.get(&(id.as_str(), reference, m)), groups.get(&(id.as_str(), arm, m)))
                        else {
                            continue;
                        };
                        present = true;
                        let target = refs[0].objective;
                        let times = |rs: &[&RunRecord]| {
                            let mut t: Vec<Option<f64>> =
                                rs.iter().map(|r| time_to_target(&r.trace, target).map(|x| x.max(MIN_TTS))).collect();
                            // Reached targets first, fastest first.
                            t.sort_by(|a, b| match (a, b) {
                                (Some(x), Some(y)) => x.total_cmp(y),
                                (Some(_), None) => std::cmp::Ordering::Less,
                                (None, Some(_)) => std::cmp::Ordering::Greater,
                                (None, None) => std::cmp::Ordering::Equal,
                            });
                            t
                        };
                        let (ta, tr) = (times(runs), times(refs));
                        if let (Some(a), Some(r)) = (ta[rank_index(rank, ta.len())], tr[rank_index(rank, tr.len())]) {
                            ratios.push(tts_ratio(a, r)?);
                        }
                    }
                    if present {
                        let geo = if ratios.is_empty() { None } else { Some(geo_stats(&ratios)?) };
                        tts.push(TtsRow { arm, reference, multiplier: m, rank, ratios, geo });
                    }
                }
            }
        }

        Ok(Self { best_known, instances, gaps, wins: win_rows, tts, reference, records: records.to_vec() })
    }

    pub fn gap_csv(&self) -> String {
        let mut out = format!("{GAP_HEADER}\n");
        for g in &self.gaps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.2},{:.2}",
                g.arm.model.label(),
                g.arm.method,
                g.multiplier,
                RANKS[g.rank],
                g.instances,
                g.avg_gap,
                g.std_gap
            );
        }
        out
    }

    pub fn wins_csv(&self) -> String {
        let mut out = format!("{WINS_HEADER}\n");
        for w in &self.wins {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                w.arm_a,
                w.arm_b,
                w.multiplier,
                w.wins_a,
                w.wins_b,
                w.ties,
                w.wins_a + w.wins_b + w.ties
            );
        }
        out
    }

    pub fn tts_csv(&self) -> String {
        let mut out = format!("{TTS_HEADER}\n");
        for t in &self.tts {
            let (mean, std) = match t.geo {
                Some((m, s)) => (format!("{m:.4}"), format!("{s:.4}")),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                t.arm,
                t.reference,
                t.multiplier,
                RANKS[t.rank],
                t.ratios.len(),
                mean,
                std
            );
        }
        out
    }

    /// Gap scatter plot for one multiplier: instance position (by size) on
    /// the x axis, one series per arm, best runs filled.
    pub fn gap_svg(&self, multiplier: u32) -> Result<String> {
        let position: BTreeMap<&str, usize> =
            self.instances.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let arms: BTreeSet<Arm> = self.records.iter().map(RunRecord::arm).collect();
        let mut series = Vec::new();
        for arm in arms {
            let mut points = Vec::new();
            let mut best: BTreeMap<usize, f64> = BTreeMap::new();
            for r in self.records.iter().filter(|r| r.arm() == arm && r.multiplier == multiplier) {
                let x = position[r.instance.as_str()];
                let gap = primal_gap(r.objective as f64, self.best_known[&r.instance].max(1) as f64)?;
                points.push((x, gap));
                let b = best.entry(x).or_insert(gap);
                *b = b.min(gap);
            }
            if points.is_empty() {
                continue;
            }
            points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            series.push(Series { label: arm.to_string(), points, best: best.into_iter().collect() });
        }
        Ok(scatter(&format!("Primal gap at {multiplier}x budget"), self.instances.len(), &series))
    }

    /// All output files keyed by path relative to the report directory.
    pub fn files(&self) -> Result<BTreeMap<String, String>> {
        let mut files = BTreeMap::new();
        files.insert("tables/gap_stats.csv".to_string(), self.gap_csv());
        files.insert("tables/wins.csv".to_string(), self.wins_csv());
        files.insert("tables/tts_stats.csv".to_string(), self.tts_csv());
        let multipliers: BTreeSet<u32> = self.records.iter().map(|r| r.multiplier).collect();
        for m in multipliers {
            files.insert(format!("figures/gap_{m}x.svg"), self.gap_svg(m)?);
        }
        Ok(files)
    }
}

/// Writes `tables/*.csv` and `figures/*.svg` under `out` and returns the
/// written paths.
pub fn render_report(records: &[RunRecord], reference: Option<Arm>, out: &Path) -> Result<Vec<PathBuf>> {
    let files = Report::build(records, reference)?.files()?;
    let mut written = Vec::new();
    for (rel, content) in files {
        let path = out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, content)?;
        written.push(path);
    }
    Ok(written)
}
