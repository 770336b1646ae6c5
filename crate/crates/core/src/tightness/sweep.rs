use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{geometric_dfi, geometric_ln_entropy_power};

pub const DEFAULT_Q_GRID: [f64; 5] = [0.5, 0.1, 0.01, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub q: f64,
    pub dfi: f64,
    pub max_pmf: f64,
    pub entropy_power: f64,
    /// `(‖p‖∞² + (‖p‖∞ − p(0))²) / I_d`, tends to 1.
    pub ratio_theorem2: f64,
    /// `1 / (N_d I_d)`, tends to `e⁻²`.
    pub ratio_stam: f64,
    pub residual_theorem2: f64,
    pub residual_stam: f64,
    /// `(I_d − q²)/q³`; only defined for `q ≤ 0.5`.
    pub dfi_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

/// Evaluate the tightness ratios of Geometric(q) from closed forms.
/// `q_grid` must be strictly decreasing inside `(0, 1]`.
pub fn geometric_sweep(q_grid: &[f64]) -> Result<SweepResult> {
    if q_grid.is_empty() {
        return Err(Error::InvalidParameter("empty q grid".into()));
    }
    if let Some(q) = q_grid.iter().find(|q| !(**q > 0.0 && **q <= 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in (0, 1], got {q}"
        )));
    }
    if q_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "q grid must be strictly decreasing".into(),
        ));
    }
    let e_minus_2 = (-2.0f64).exp();
    let points = q_grid
        .iter()
        .map(|&q| {
            let dfi = geometric_dfi(q);
            let ln_np = geometric_ln_entropy_power(q);
            // ‖p‖∞ = p(0) = q, so the second square vanishes
            let ratio_theorem2 = q * q / dfi;
            let ratio_stam = (-ln_np - dfi.ln()).exp();
            SweepPoint {
                q,
                dfi,
                max_pmf: q,
                entropy_power: ln_np.exp(),
                ratio_theorem2,
                ratio_stam,
                residual_theorem2: (ratio_theorem2 - 1.0).abs(),
                residual_stam: (ratio_stam - e_minus_2).abs(),
                dfi_residual: dfi_smallq_residual(q).ok(),
            }
        })
        .collect();
    Ok(SweepResult { points })
}

/// `(4(1 − √(1−q))² − q²) / q³` for `q ∈ (0, 0.5]`; tends to ½.
///
/// With `s = √(1−q)` this is `(3 + s)/(1 + s)³`, which has no cancellation.
pub fn dfi_smallq_residual(q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in (0, 0.5], got {q}"
        )));
    }
    let s = (1.0 - q).sqrt();
    Ok((3.0 + s) / (1.0 + s).powi(3))
}
