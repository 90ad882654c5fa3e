//! Fault-tolerance redundancy for discrete predictor-target systems.
//!
//! The redundancy of a family of sources is the information about the
//! target that survives any pattern of crash failures leaving at least one
//! source of the family intact. Plugged into the redundancy lattice and
//! Möbius-inverted, it yields a full partial information decomposition.
//!
//! ```
//! use ftpid_core::{fixtures, solve_ift, SolverOptions, SourceAntichain};
//!
//! let system = fixtures::entrance_cameras();
//! let both = SourceAntichain::parse("{1}{2}", 2).unwrap();
//! let cert = solve_ift(&system, &both, &SolverOptions::default()).unwrap();
//! assert!(cert.value.abs() < 1e-6);
//! ```

#![forbid(unsafe_code)]

pub mod baselines;
pub mod dist;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod sfs;
pub mod solver;

pub use baselines::{bivariate_pid_from_redundancy, i_min, interaction_information, BivariatePid};
pub use dist::{JointSystem, Marginal, Outcome, SourceIndexSet, Symbol, FAILURE_SYMBOL};
pub use engine::{
    decompose, ft_profile, verify_axioms, AtomRecord, AxiomCheck, AxiomKind, AxiomReport,
    EngineOptions, FtProfile, Measure, PidResult, ProfileEntry,
};
pub use error::{Error, Result};
pub use lattice::{
    alpha_ell, down_set, enumerate_antichains, moebius_invert, Lattice, LatticeValueMap,
    SourceAntichain, DEFAULT_LATTICE_CAP,
};
pub use sfs::{
    allowed_patterns, embed, garble, reduce_to_subsystem, redundantly_satisfies, FailurePattern,
    FailureStrategy, GarbledSystem, StrategyRow,
};
pub use solver::{
    frank_wolfe_minimize, objective, objective_gradient, oracle_grid_search, solve_ift,
    GradientTable, SolverCertificate, SolverOptions, StepRule,
};
