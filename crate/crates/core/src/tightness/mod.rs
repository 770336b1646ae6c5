//! How sharp are the constants?
//!
//! Along the geometric family the ratios `(‖p‖∞² + (‖p‖∞ − p(0))²)/I_d` and
//! `1/(N_d I_d)` approach 1 and `e⁻²` as `q → 0`, which pins the optimal
//! constant of the max-pmf bound at 1 and brackets the Stam constant in
//! `[e⁻², 1]`. The optimizer searches the simplex for small `N_d I_d`; what it
//! finds is empirical evidence about that bracket, not a bound.

mod optimize;
mod random;
mod sweep;

pub use optimize::{
    brute_force_grid, minimize_stam_product, stam_product, OptimizeConfig, OptimizeResult,
    RestartRecord, StartKind,
};
pub use random::{corpus_pmf, derive_seed, random_pmf, CorpusItem, CORPUS_CONCENTRATIONS};
pub use sweep::{dfi_smallq_residual, geometric_sweep, SweepPoint, SweepResult, DEFAULT_Q_GRID};
