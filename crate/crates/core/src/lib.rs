//! Job-shop scheduling with AGV transport.
//!
//! Jobs of kind A (two tasks) and B (three tasks) run on machines 0, 1 and 2;
//! a fleet of AGVs carries every job between depot and machines, each leg
//! taking `δ` time steps. The crate builds two optimization models of the
//! problem, a time-indexed MILP ([`milp`]) and a quadratic-constrained binary
//! model ([`qcbo`]) with its penalty QUBO, checks schedules directly
//! ([`validate`]), solves small instances natively ([`solve`]) and runs
//! benchmark suites ([`bench`]).
//!
//! ```
//! use agvsched::{model::Instance, solve::brute_force, validate::validate_schedule};
//!
//! let inst = Instance::new(1, 1, 10, vec![[1, 1]], vec![]).unwrap();
//! let res = brute_force(&inst, 5.0);
//! assert!(res.proven_optimal);
//! assert_eq!(res.objective, 5);
//! assert!(validate_schedule(&inst, res.schedule.as_ref().unwrap()).unwrap().is_empty());
//! ```

pub mod bench;
pub mod error;
pub mod instance_gen;
pub mod milp;
pub mod model;
pub mod qcbo;
pub mod solve;
pub mod validate;

pub use error::{Error, Result};
pub use model::{Instance, Schedule};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/instances.md")]
    struct Instances;
    #[doc = include_str!("../../../book/src/validation.md")]
    struct Validation;
    #[doc = include_str!("../../../book/src/milp.md")]
    struct Milp;
    #[doc = include_str!("../../../book/src/qcbo.md")]
    struct Qcbo;
    #[doc = include_str!("../../../book/src/solvers.md")]
    struct Solvers;
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    struct Benchmarks;
}
