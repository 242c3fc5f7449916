//! Automated mechanism design on discretized valuation grids.
//!
//! [`design::build_lp`] turns a grid and a mechanism class into a linear
//! program whose optimum is the smallest worst-case absolute inefficiency any
//! strategyproof, budget-balanced mechanism of that class can reach on the
//! grid. [`simplex`] solves it exactly, [`certificate`] checks dual
//! certificates against it, [`deterministic`] handles the deterministic
//! class by exhaustive search and [`sweep`] tabulates optima over `k`.

pub mod certificate;
pub mod design;
pub mod deterministic;
pub mod error;
pub mod hybrid;
pub mod indexing;
pub mod lp;
pub mod simplex;
pub mod sweep;

pub use certificate::{verify_dual_certificate, CertificateReport, DualCertificate};
pub use design::{build_lp, DesignLp, FullRow, GridMechanism, MechanismClass};
pub use deterministic::{deterministic_exhaustive, DeterministicOptimum};
pub use error::{Error, Result};
pub use hybrid::HybridRational;
pub use indexing::{enumerate_profiles, OrbitTable, ProfileIndexing, Symmetry};
pub use lp::{Bound, LinearProgram, Row, RowKind, Sense};
pub use simplex::{solve_lp, solve_lp_float, solve_lp_with, Solution, SolverOptions};
pub use sweep::{sweep_levels, SweepOptions, SweepTable, SweepValue};
