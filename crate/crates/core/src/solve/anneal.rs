use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qcbo::Qubo;

/// Simulated annealing parameters. Inverse temperatures follow a geometric
/// schedule from `beta_start` to `beta_end` over `sweeps` sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealParams {
    pub sweeps: usize,
    pub restarts: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub seed: u64,
}

impl AnnealParams {
    /// Picks the beta range from the QUBO: at the start, a flip costing the
    /// largest single coefficient is accepted with probability 1/2; at the
    /// end, the smallest nonzero coefficient is accepted with probability
    /// 1/100.
    pub fn auto(qubo: &Qubo, sweeps: usize, restarts: usize, seed: u64) -> Self {
        let coefs = qubo.linear().iter().map(|t| t.1.abs()).chain(qubo.quadratic().iter().map(|t| t.2.abs()));
        let (min_coef, max_coef) = coefs.fold((f64::INFINITY, 0.0f64), |(lo, hi), c| (lo.min(c), hi.max(c)));
        let (beta_start, beta_end) = if max_coef > 0.0 {
            ((2f64).ln() / max_coef, (100f64).ln() / min_coef)
        } else {
            (0.1, 1.0)
        };
        Self { sweeps, restarts, beta_start, beta_end: beta_end.max(beta_start), seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(Error::Config("sweeps and restarts must be at least 1".into()));
        }
        if !(self.beta_start > 0.0 && self.beta_end >= self.beta_start && self.beta_end.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < beta_start <= beta_end, got {} and {}",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    fn beta(&self, sweep: usize) -> f64 {
        if self.sweeps == 1 {
            return self.beta_end;
        }
        let frac = sweep as f64 / (self.sweeps - 1) as f64;
        self.beta_start * (self.beta_end / self.beta_start).powf(frac)
    }
}

/// Best energy after a sweep, counted over all restarts so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub sweep: usize,
    pub seconds: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    pub bits: Vec<bool>,
    pub energy: f64,
    /// One point per completed sweep; energies never increase.
    pub trace: Vec<TracePoint>,
}

/// Single-flip Metropolis annealer that can be driven restart by restart.
pub struct Annealer {
    params: AnnealParams,
    linear: Vec<f64>,
    offset: f64,
    // Symmetric adjacency in compressed rows.
    row_start: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    rng: ChaCha8Rng,
    clock: Instant,
    restarts: usize,
    sweeps: usize,
    best: Option<(Vec<bool>, f64)>,
    trace: Vec<TracePoint>,
}

impl Annealer {
    pub fn new(qubo: &Qubo, params: &AnnealParams) -> Result<Self> {
        params.validate()?;
        let n = qubo.n();
        let mut linear = vec![0.0; n];
        for &(i, c) in qubo.linear() {
            linear[i] = c;
        }
        let mut degree = vec![0usize; n + 1];
        for &(i, j, _) in qubo.quadratic() {
            degree[i + 1] += 1;
            degree[j + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let row_start = degree.clone();
        let mut fill = degree;
        let mut cols = vec![0; row_start[n]];
        let mut weights = vec![0.0; row_start[n]];
        for &(i, j, c) in qubo.quadratic() {
            for (a, b) in [(i, j), (j, i)] {
                cols[fill[a]] = b;
                weights[fill[a]] = c;
                fill[a] += 1;
            }
        }
        Ok(Self {
            params: *params,
            linear,
            offset: qubo.offset(),
            row_start,
            cols,
            weights,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            clock: Instant::now(),
            restarts: 0,
            sweeps: 0,
            best: None,
            trace: Vec::new(),
        })
    }

    pub fn restarts_done(&self) -> usize {
        self.restarts
    }

    /// Runs one chain from uniformly random bits. With a deadline the chain
    /// stops after the first sweep that ends past it.
    pub fn restart(&mut self, deadline: Option<Instant>) {
        let n = self.linear.len();
        let mut bits: Vec<bool> = (0..n).map(|_| self.rng.gen()).collect();
        // Local fields: energy change of setting bit i given the others.
        let mut field = self.linear.clone();
        let mut energy = self.offset;
        for i in 0..n {
            if bits[i] {
                energy += self.linear[i];
                for e in self.row_start[i]..self.row_start[i + 1] {
                    field[self.cols[e]] += self.weights[e];
                    if bits[self.cols[e]] && self.cols[e] > i {
                        energy += self.weights[e];
                    }
                }
            }
        }
        self.offer(&bits, energy);

        for sweep in 0..self.params.sweeps {
            let beta = self.params.beta(sweep);
            for i in 0..n {
                let delta = if bits[i] { -field[i] } else { field[i] };
                if delta <= 0.0 || self.rng.gen::<f64>() < (-beta * delta).exp() {
                    let sign = if bits[i] { -1.0 } else { 1.0 };
                    bits[i] = !bits[i];
                    energy += delta;
                    for e in self.row_start[i]..self.row_start[i + 1] {
                        field[self.cols[e]] += sign * self.weights[e];
                    }
                    if delta < 0.0 {
                        self.offer(&bits, energy);
                    }
                }
            }
            self.sweeps += 1;
            let best = self.best.as_ref().map_or(energy, |b| b.1);
            self.trace.push(TracePoint {
                sweep: self.sweeps,
                seconds: self.clock.elapsed().as_secs_f64(),
                energy: best,
            });
            if deadline.is_some_and(|d| Instant::now() >= d) {
                break;
            }
        }
        self.restarts += 1;
    }

    fn offer(&mut self, bits: &[bool], energy: f64) {
        if self.best.as_ref().is_none_or(|b| energy < b.1) {
            match &mut self.best {
                Some((b, e)) => {
                    b.copy_from_slice(bits);
                    *e = energy;
                }
                None => self.best = Some((bits.to_vec(), energy)),
            }
        }
    }

    pub fn finish(self) -> AnnealOutcome {
        let (bits, energy) = self.best.unwrap_or_else(|| (vec![false; self.linear.len()], self.offset));
        AnnealOutcome { bits, energy, trace: self.trace }
    }
}

/// Runs `params.restarts` chains of `params.sweeps` sweeps and returns the
/// lowest-energy bit vector seen.
pub fn anneal_qubo(qubo: &Qubo, params: &AnnealParams) -> Result<AnnealOutcome> {
    let mut annealer = Annealer::new(qubo, params)?;
    for _ in 0..params.restarts {
        annealer.restart(None);
    }
    Ok(annealer.finish())
}
