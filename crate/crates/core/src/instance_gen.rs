//! Seeded instance generation and the instance file format.
//!
//! Generation draws every parameter uniformly from an inclusive integer range
//! using ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`), so a
//! configuration always yields the same instance on every platform.
//!
//! Instances are stored as one JSON object with sorted keys:
//!
//! ```json
//! {"a_jobs":[[3,2]],"b_jobs":[[2,3,2]],"delta":1,"horizon":60,"num_agvs":2}
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::{trivial_makespan, Instance, Time};

/// Largest fixed horizon accepted by [`generate`].
pub const MAX_FIXED_HORIZON: Time = 541;

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub min: u32,
    pub max: u32,
}

impl Span {
    pub const fn new(min: u32, max: u32) -> Self {
        Self { min, max }
    }

    fn check(&self, name: &str, lowest: u32) -> Result<()> {
        if self.min > self.max {
            return Err(Error::Config(format!("{name}: empty range {}..={}", self.min, self.max)));
        }
        if self.min < lowest {
            return Err(Error::Config(format!("{name}: minimum must be at least {lowest}")));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        rng.gen_range(self.min..=self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonPolicy {
    /// Use this horizon; must be at most 541 and at least the trivial makespan.
    Fixed(Time),
    /// Horizon equals the trivial makespan of the sampled instance.
    TrivialBound,
}

/// Ranges for every sampled parameter. `Default` gives the benchmark ranges:
/// 3 to 11 jobs of each kind (22 at most in total), up to 5 AGVs and the
/// per-stage processing-time ranges A1 3..=9, A2 2..=8, B1 2..=9, B2 3..=8,
/// B3 2..=7.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub a_jobs: Span,
    pub b_jobs: Span,
    pub max_jobs: u32,
    pub num_agvs: Span,
    pub delta: Span,
    pub a1: Span,
    pub a2: Span,
    pub b1: Span,
    pub b2: Span,
    pub b3: Span,
    pub horizon: HorizonPolicy,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            a_jobs: Span::new(3, 11),
            b_jobs: Span::new(3, 11),
            max_jobs: 22,
            num_agvs: Span::new(1, 5),
            delta: Span::new(1, 1),
            a1: Span::new(3, 9),
            a2: Span::new(2, 8),
            b1: Span::new(2, 9),
            b2: Span::new(3, 8),
            b3: Span::new(2, 7),
            horizon: HorizonPolicy::TrivialBound,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.a_jobs.check("a_jobs", 0)?;
        self.b_jobs.check("b_jobs", 0)?;
        self.num_agvs.check("num_agvs", 1)?;
        self.delta.check("delta", 1)?;
        for (name, span) in [("a1", self.a1), ("a2", self.a2), ("b1", self.b1), ("b2", self.b2), ("b3", self.b3)] {
            span.check(name, 1)?;
        }
        if self.a_jobs.max + self.b_jobs.max == 0 {
            return Err(Error::Config("job count ranges allow no jobs".into()));
        }
        if self.a_jobs.min + self.b_jobs.min > self.max_jobs {
            return Err(Error::Config(format!(
                "minimum job counts {} + {} exceed max_jobs {}",
                self.a_jobs.min, self.b_jobs.min, self.max_jobs
            )));
        }
        if let HorizonPolicy::Fixed(h) = self.horizon {
            if h == 0 || h > MAX_FIXED_HORIZON {
                return Err(Error::Config(format!("fixed horizon {h} outside 1..={MAX_FIXED_HORIZON}")));
            }
        }
        Ok(())
    }
}

/// Samples one instance. Job counts are redrawn until there is at least one
/// job and at most `max_jobs`; a fixed horizon below the trivial makespan is an error.
pub fn generate(config: &GenConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (n_a, n_b) = loop {
        let n_a = config.a_jobs.sample(&mut rng);
        let n_b = config.b_jobs.sample(&mut rng);
        if (1..=config.max_jobs).contains(&(n_a + n_b)) {
            break (n_a, n_b);
        }
    };
    let num_agvs = config.num_agvs.sample(&mut rng) as usize;
    let delta = config.delta.sample(&mut rng);
    let a_jobs: Vec<[Time; 2]> =
        (0..n_a).map(|_| [config.a1.sample(&mut rng), config.a2.sample(&mut rng)]).collect();
    let b_jobs: Vec<[Time; 3]> = (0..n_b)
        .map(|_| [config.b1.sample(&mut rng), config.b2.sample(&mut rng), config.b3.sample(&mut rng)])
        .collect();

    // Placeholder horizon; replaced below once the trivial bound is known.
    let draft = Instance::new(delta, num_agvs, 1, a_jobs, b_jobs)?;
    let trivial = trivial_makespan(&draft).max(1);
    let horizon = match config.horizon {
        HorizonPolicy::TrivialBound => Time::try_from(trivial)
            .map_err(|_| Error::Config(format!("trivial makespan {trivial} overflows the time type")))?,
        HorizonPolicy::Fixed(h) => {
            if u64::from(h) < trivial {
                return Err(Error::Config(format!(
                    "fixed horizon {h} is below the trivial makespan {trivial}"
                )));
            }
            h
        }
    };
    draft.with_horizon(horizon)
}

/// Canonical JSON text of an instance (sorted keys, single line).
pub fn write_instance(instance: &Instance) -> String {
    let mut map = Map::new();
    map.insert("a_jobs".into(), serde_json::to_value(instance.a_jobs()).expect("ints"));
    map.insert("b_jobs".into(), serde_json::to_value(instance.b_jobs()).expect("ints"));
    map.insert("delta".into(), instance.delta().into());
    map.insert("horizon".into(), instance.horizon().into());
    map.insert("num_agvs".into(), instance.num_agvs().into());
    // Inserted in sorted order; holds with or without `preserve_order`.
    Value::Object(map).to_string()
}

const FIELDS: [&str; 5] = ["a_jobs", "b_jobs", "delta", "horizon", "num_agvs"];

/// Parses an instance document. Unknown or missing keys, non-integers and
/// non-positive values are rejected with an error naming the field.
pub fn read_instance(text: &str) -> Result<Instance> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse { field: "document".into(), message: e.to_string() })?;
    let Value::Object(map) = value else {
        return Err(Error::Parse { field: "document".into(), message: "expected a JSON object".into() });
    };
    if let Some(key) = map.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(Error::Parse { field: key.clone(), message: "unknown field".into() });
    }
    let get = |name: &str| {
        map.get(name)
            .ok_or_else(|| Error::Parse { field: name.into(), message: "missing field".into() })
    };
    let delta = positive(get("delta")?, "delta")?;
    let num_agvs = positive(get("num_agvs")?, "num_agvs")? as usize;
    let horizon = positive(get("horizon")?, "horizon")?;
    let a_jobs = jobs::<2>(get("a_jobs")?, "a_jobs")?;
    let b_jobs = jobs::<3>(get("b_jobs")?, "b_jobs")?;
    Instance::new(delta, num_agvs, horizon, a_jobs, b_jobs)
}

fn positive(value: &Value, field: &str) -> Result<Time> {
    let err = |message: &str| Error::Parse { field: field.into(), message: message.into() };
    let n = value.as_i64().ok_or_else(|| err("expected an integer"))?;
    if n <= 0 {
        return Err(err("must be a positive integer"));
    }
    Time::try_from(n).map_err(|_| err("too large"))
}

fn jobs<const N: usize>(value: &Value, field: &str) -> Result<Vec<[Time; N]>> {
    let list = value
        .as_array()
        .ok_or_else(|| Error::Parse { field: field.into(), message: "expected an array".into() })?;
    list.iter()
        .enumerate()
        .map(|(i, job)| {
            let name = format!("{field}[{i}]");
            let items = job.as_array().filter(|a| a.len() == N).ok_or_else(|| Error::Parse {
                field: name.clone(),
                message: format!("expected an array of {N} processing times"),
            })?;
            let mut out = [0; N];
            for (s, item) in items.iter().enumerate() {
                out[s] = positive(item, &format!("{name}[{s}]"))?;
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn same_seed_same_instance() {
        let c = GenConfig::with_seed(42);
        assert_eq!(generate(&c).unwrap(), generate(&c).unwrap());
        assert_ne!(generate(&c).unwrap(), generate(&GenConfig::with_seed(43)).unwrap());
    }

    #[test]
    fn default_ranges_hold() {
        for seed in 0..200 {
            let inst = generate(&GenConfig::with_seed(seed)).unwrap();
            let (na, nb) = (inst.a_jobs().len(), inst.b_jobs().len());
            assert!((3..=11).contains(&na) && (3..=11).contains(&nb) && na + nb <= 22);
            assert!((1..=5).contains(&inst.num_agvs()));
            for job in inst.a_jobs() {
                assert!((3..=9).contains(&job[0]) && (2..=8).contains(&job[1]));
            }
            for job in inst.b_jobs() {
                assert!((2..=9).contains(&job[0]));
                assert!((3..=8).contains(&job[1]));
                assert!((2..=7).contains(&job[2]));
            }
            assert!(u64::from(inst.horizon()) >= trivial_makespan(&inst));
        }
    }

    #[test]
    fn fixed_horizon_below_trivial_bound_is_rejected() {
        let config = GenConfig {
            a_jobs: Span::new(2, 2),
            b_jobs: Span::new(2, 2),
            horizon: HorizonPolicy::Fixed(10),
            ..GenConfig::default()
        };
        assert!(matches!(generate(&config), Err(Error::Config(_))));
        let too_long = GenConfig { horizon: HorizonPolicy::Fixed(542), ..GenConfig::default() };
        assert!(matches!(generate(&too_long), Err(Error::Config(_))));
    }

    #[test]
    fn empty_range_is_a_configuration_error() {
        let config = GenConfig { b2: Span::new(5, 4), ..GenConfig::default() };
        assert!(matches!(generate(&config), Err(Error::Config(m)) if m.contains("b2")));
    }

    #[test]
    fn strict_reader() {
        let ok = r#"{"a_jobs":[[3,2]],"b_jobs":[],"delta":1,"horizon":20,"num_agvs":1}"#;
        assert!(read_instance(ok).is_ok());

        let zero = r#"{"a_jobs":[],"b_jobs":[],"delta":0,"horizon":20,"num_agvs":1}"#;
        assert!(matches!(read_instance(zero), Err(Error::Parse { field, .. }) if field == "delta"));

        let extra = r#"{"a_jobs":[],"b_jobs":[],"delta":1,"horizon":20,"num_agvs":1,"note":"x"}"#;
        assert!(matches!(read_instance(extra), Err(Error::Parse { field, .. }) if field == "note"));

        let missing = r#"{"a_jobs":[],"b_jobs":[],"delta":1,"num_agvs":1}"#;
        assert!(matches!(read_instance(missing), Err(Error::Parse { field, .. }) if field == "horizon"));

        let negative = r#"{"a_jobs":[[3,-2]],"b_jobs":[],"delta":1,"horizon":20,"num_agvs":1}"#;
        assert!(matches!(read_instance(negative), Err(Error::Parse { field, .. }) if field == "a_jobs[0][1]"));

        let arity = r#"{"a_jobs":[],"b_jobs":[[1,2]],"delta":1,"horizon":20,"num_agvs":1}"#;
        assert!(matches!(read_instance(arity), Err(Error::Parse { field, .. }) if field == "b_jobs[0]"));
    }

    #[test]
    fn canonical_text_has_sorted_keys() {
        let inst = Instance::new(2, 3, 50, vec![[3, 2]], vec![[2, 3, 4]]).unwrap();
        assert_eq!(
            write_instance(&inst),
            r#"{"a_jobs":[[3,2]],"b_jobs":[[2,3,4]],"delta":2,"horizon":50,"num_agvs":3}"#
        );
    }

    proptest! {
        #[test]
        fn write_read_is_identity(seed in any::<u64>()) {
            let inst = generate(&GenConfig::with_seed(seed)).unwrap();
            let text = write_instance(&inst);
            prop_assert_eq!(read_instance(&text).unwrap(), inst);
            prop_assert_eq!(write_instance(&read_instance(&text).unwrap()), text);
        }
    }
}
