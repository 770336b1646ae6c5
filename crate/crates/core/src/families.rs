//! Closed-form values for the uniform, geometric and Poisson families, used
//! as ground truth for the numeric routes in [`crate::quantities`].
//!
//! Bernoulli and binomial have no closed forms here; [`oracle_for`] returns
//! `None` for them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::{DistributionFamily, MAX_SUPPORT_LEN};
use crate::summation::NeumaierSum;

/// Closed-form quantities; `None` marks a field with no closed form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct OracleValues {
    pub dfi: Option<f64>,
    pub entropy: Option<f64>,
    pub entropy_power: Option<f64>,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub max_pmf: Option<f64>,
}

/// Uniform on `{0, …, N−1}`.
pub fn uniform_oracle(n: usize) -> Result<OracleValues> {
    if n == 0 {
        return Err(Error::InvalidParameter("uniform requires N ≥ 1".into()));
    }
    let nf = n as f64;
    Ok(OracleValues {
        dfi: Some(4.0 / nf),
        entropy: Some(nf.ln()),
        entropy_power: Some(nf * nf),
        mean: Some((nf - 1.0) / 2.0),
        variance: Some((nf * nf - 1.0) / 12.0),
        max_pmf: Some(1.0 / nf),
    })
}

/// `4(1 − √(1−q))²`, evaluated as `4q²/(1 + √(1−q))²` so small `q` keeps
/// full relative precision.
pub fn geometric_dfi(q: f64) -> f64 {
    let s = (1.0 - q).sqrt();
    4.0 * (q / (1.0 + s)).powi(2)
}

/// `ln N_d = −2 ln q − 2(1−q)/q · ln(1−q)`; the second term vanishes at q = 1.
pub fn geometric_ln_entropy_power(q: f64) -> f64 {
    let tail = if q == 1.0 {
        0.0
    } else {
        -2.0 * (1.0 - q) / q * (-q).ln_1p()
    };
    -2.0 * q.ln() + tail
}

/// Geometric `p(i) = q(1−q)^i`, `0 < q ≤ 1`.
pub fn geometric_oracle(q: f64) -> Result<OracleValues> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "geometric requires q in (0, 1], got {q}"
        )));
    }
    let ln_np = geometric_ln_entropy_power(q);
    Ok(OracleValues {
        dfi: Some(geometric_dfi(q)),
        entropy: Some(0.5 * ln_np),
        entropy_power: Some(ln_np.exp()),
        mean: Some((1.0 - q) / q),
        variance: Some((1.0 - q) / (q * q)),
        max_pmf: Some(q),
    })
}

/// Poisson(λ). DFI from `4 Σ (√(λ/(i+1)) − 1)² p(i)` and entropy from
/// `λ(1 − ln λ) + Σ p(i) ln i!`, both summed until the Poisson tail bound
/// drops below `eps`. `ln i!` is accumulated as `Σ ln k`.
pub fn poisson_oracle(lambda: f64, eps: f64) -> Result<OracleValues> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "poisson requires λ > 0, got {lambda}"
        )));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let ln_lambda = lambda.ln();
    let mut dfi = NeumaierSum::new();
    let mut log_fact_moment = NeumaierSum::new();
    let mut ln_fact = 0.0f64;
    let mut max_pmf = 0.0f64;
    let mode = lambda.floor() as usize;
    for i in 0..MAX_SUPPORT_LEN {
        if i > 0 {
            ln_fact += (i as f64).ln();
        }
        let ip = i as f64;
        let p = (-lambda + ip * ln_lambda - ln_fact).exp();
        if i == mode {
            max_pmf = p;
        }
        if i >= 1 && ip >= 2.0 * lambda && poisson_tails_below(lambda, i, p, eps) {
            return Ok(OracleValues {
                dfi: Some(4.0 * dfi.value()),
                entropy: Some(lambda * (1.0 - ln_lambda) + log_fact_moment.value()),
                entropy_power: Some(
                    (2.0 * (lambda * (1.0 - ln_lambda) + log_fact_moment.value())).exp(),
                ),
                mean: Some(lambda),
                variance: Some(lambda),
                max_pmf: Some(max_pmf),
            });
        }
        dfi.add(((lambda / (ip + 1.0)).sqrt() - 1.0).powi(2) * p);
        log_fact_moment.add(p * ln_fact);
    }
    Err(Error::NonConvergence(MAX_SUPPORT_LEN))
}

/// Truncating before index `m` leaves both the mass tail and the `ln i!`
/// weighted tail of the entropy series below `eps`. Uses `ln i! ≤ i²` and the
/// ratio-test majorants of `Σ_{i≥m} p(i)` and `Σ_{i≥m} i² p(i)`.
fn poisson_tails_below(lambda: f64, m: usize, pm: f64, eps: f64) -> bool {
    let mf = m as f64;
    let mass = pm / (1.0 - lambda / (mf + 1.0));
    let moment_ratio = (mf + 1.0) * lambda / (mf * mf);
    mass <= eps && moment_ratio < 1.0 && mf * mf * pm / (1.0 - moment_ratio) <= eps
}

/// Closed forms for `family`, if it has any.
pub fn oracle_for(family: &DistributionFamily, eps: f64) -> Result<Option<OracleValues>> {
    match *family {
        DistributionFamily::Uniform { n } => uniform_oracle(n).map(Some),
        DistributionFamily::Geometric { q } => geometric_oracle(q).map(Some),
        DistributionFamily::Poisson { lambda } => poisson_oracle(lambda, eps).map(Some),
        _ => Ok(None),
    }
}
