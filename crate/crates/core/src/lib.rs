//! Discrete Fisher information (DFI) for probability mass functions on ℕ₀.
//!
//! The DFI of a pmf `p` is `I_d(p) = 4 Σ_i (√p(i+1) − √p(i))²`, a squared
//! Hellinger distance between `p` and its unit shift. This crate computes it
//! together with the entropy power `N_d = exp(2H)`, mean, variance and
//! maximum probability, and checks the four bounds that tie them together:
//!
//! | check                    | statement                                                  |
//! |--------------------------|------------------------------------------------------------|
//! | `cramer_rao`             | `(σ² + ½ − (μ+1)² p(0)/2) I_d ≥ (1 − (μ+1) p(0))²`          |
//! | `cramer_rao_simplified`  | `(σ² + ½) I_d ≥ 1` when `p(0) = 0`                          |
//! | `max_pmf_bound`          | `I_d > ‖p‖∞² + (‖p‖∞ − p(0))²`                              |
//! | `stam`                   | `N_d I_d > 1`                                               |
//! | `stam_type`              | `½ N_d (I_d + 2p(0) − p(0)²) > 1`                           |
//!
//! The [`tightness`] module probes how sharp the constants in these bounds
//! are, both along the geometric family and by direct search over the simplex.
//!
//! Pmfs are stored as a dense prefix `p(0..M)` plus a certified bound on the
//! mass beyond `M`; every pmf on ℕ₀ is summable, so the vanishing-tail
//! condition holds for all of them and no further restriction is imposed.

pub mod cli;
pub mod error;
pub mod families;
pub mod inequalities;
pub mod pmf;
pub mod quantities;
pub mod summation;
pub mod tightness;

pub use error::{Error, Result};
pub use families::OracleValues;
pub use inequalities::{CheckName, InequalityCheck};
pub use pmf::{DistributionFamily, Pmf, SubPmf, ValidationConfig, ValidationReport};
pub use quantities::QuantityReport;
