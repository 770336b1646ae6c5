//! Truncated probability mass functions on ℕ₀ with a certified tail bound.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation;

/// Default tolerance on `|Σ p(i) − 1|`.
pub const DEFAULT_NORMALIZATION_TOL: f64 = 1e-12;
/// Default ceiling on the tail mass a truncation may leave unrepresented.
pub const DEFAULT_EPS_TAIL: f64 = 1e-12;
/// Longest support `from_family` will materialize.
pub const MAX_SUPPORT_LEN: usize = 10_000_000;
/// Ceiling on the `i²`-weighted tail `Σ_{i≥M} i² p(i)` of family truncations.
/// Tail mass alone does not control the variance error.
pub const SECOND_MOMENT_TAIL_TARGET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub normalization_tol: f64,
    pub max_tail: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            normalization_tol: DEFAULT_NORMALIZATION_TOL,
            max_tail: DEFAULT_EPS_TAIL,
        }
    }
}

impl ValidationConfig {
    /// Default normalization tolerance, custom tail ceiling.
    pub fn with_max_tail(max_tail: f64) -> Self {
        Self {
            max_tail,
            ..Self::default()
        }
    }
}

/// Outcome of checking raw values against the pmf invariants. Slacks are
/// nonnegative exactly when the corresponding invariant holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub len: usize,
    /// Index of the first entry that is negative or not finite.
    pub first_bad_entry: Option<usize>,
    pub tail_finite_nonnegative: bool,
    /// Compensated `Σ values`.
    pub mass: f64,
    /// `mass − (1 − tail − tol)`
    pub lower_slack: f64,
    /// `(1 + tol) − mass`
    pub upper_slack: f64,
    /// `max_tail − tail`
    pub tail_slack: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.first_bad_entry.is_none()
            && self.tail_finite_nonnegative
            && self.lower_slack >= 0.0
            && self.upper_slack >= 0.0
            && self.tail_slack >= 0.0
    }

    /// Amount by which the mass exceeds 1, or 0.
    pub fn normalization_excess(&self) -> f64 {
        (self.mass - 1.0).max(0.0)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(i) = self.first_bad_entry {
            out.push(format!("entry {i} is negative or not finite"));
        }
        if !self.tail_finite_nonnegative {
            out.push("tail mass bound is negative or not finite".to_string());
        }
        if self.upper_slack < 0.0 {
            out.push(format!(
                "total mass {} exceeds 1 by {:e}",
                self.mass,
                self.normalization_excess()
            ));
        }
        if self.lower_slack < 0.0 {
            out.push(format!(
                "total mass {} short of 1 by more than the tail bound allows (slack {:e})",
                self.mass, self.lower_slack
            ));
        }
        if self.tail_slack < 0.0 {
            out.push(format!(
                "tail mass bound exceeds the configured ceiling by {:e}",
                -self.tail_slack
            ));
        }
        out
    }
}

/// Check `values` with tail bound `tail` against the pmf invariants.
pub fn validate(values: &[f64], tail: f64, config: &ValidationConfig) -> ValidationReport {
    let first_bad_entry = values.iter().position(|v| !v.is_finite() || *v < 0.0);
    let tail_ok = tail.is_finite() && tail >= 0.0;
    let mass = summation::sum(values.iter().copied());
    let tol = config.normalization_tol;
    ValidationReport {
        len: values.len(),
        first_bad_entry,
        tail_finite_nonnegative: tail_ok,
        mass,
        lower_slack: mass - (1.0 - tail - tol),
        upper_slack: (1.0 + tol) - mass,
        tail_slack: config.max_tail - tail,
    }
}

/// A pmf on ℕ₀ stored as `p(0), …, p(M−1)` plus a proven upper bound on
/// `Σ_{i≥M} p(i)`. Always valid: constructors reject anything that is not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    values: Vec<f64>,
    tail_mass_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    origin: Option<DistributionFamily>,
}

impl Pmf {
    /// Validate with the default tolerances.
    pub fn new(values: Vec<f64>, tail_mass_bound: f64) -> Result<Self> {
        Self::with_config(values, tail_mass_bound, &ValidationConfig::default())
    }

    pub fn with_config(
        values: Vec<f64>,
        tail_mass_bound: f64,
        config: &ValidationConfig,
    ) -> Result<Self> {
        let report = validate(&values, tail_mass_bound, config);
        if !report.is_valid() {
            return Err(Error::InvalidPmf(report.failures().join("; ")));
        }
        Ok(Self {
            values,
            tail_mass_bound,
            origin: None,
        })
    }

    /// Point mass at 0, `δ_{i0}`.
    pub fn delta() -> Self {
        Self {
            values: vec![1.0],
            tail_mass_bound: 0.0,
            origin: None,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    pub fn origin(&self) -> Option<&DistributionFamily> {
        self.origin.as_ref()
    }

    pub fn with_origin(mut self, origin: DistributionFamily) -> Self {
        self.origin = Some(origin);
        self
    }

    /// `p(i)`, zero beyond the stored prefix.
    pub fn p(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }

    pub fn p0(&self) -> f64 {
        self.p(0)
    }

    pub fn validate(&self, config: &ValidationConfig) -> ValidationReport {
        validate(&self.values, self.tail_mass_bound, config)
    }

    /// Same pmf with `extra` trailing exact zeros. Only meaningful for a
    /// zero tail, where the zeros are exact.
    pub fn padded(&self, extra: usize) -> Self {
        let mut values = self.values.clone();
        values.resize(values.len() + extra, 0.0);
        Self {
            values,
            tail_mass_bound: self.tail_mass_bound,
            origin: self.origin.clone(),
        }
    }

    /// The sub-probability sequence `q(i) = p(i+1)`, not renormalized.
    pub fn shifted(&self) -> SubPmf {
        let values: Vec<f64> = self.values.iter().skip(1).copied().collect();
        let mass = summation::sum(values.iter().copied());
        SubPmf { values, mass }
    }

    pub fn mass(&self) -> f64 {
        summation::sum(self.values.iter().copied())
    }

    pub fn from_family(family: &DistributionFamily, eps_tail: f64) -> Result<Self> {
        from_family(family, eps_tail)
    }
}

/// A nonnegative sequence with total mass at most 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubPmf {
    pub values: Vec<f64>,
    pub mass: f64,
}

/// Parametric families with the supports used throughout the crate. Uniform
/// lives on `{0, …, N−1}`; geometric is `q(1−q)^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionFamily {
    Uniform { n: usize },
    Geometric { q: f64 },
    Poisson { lambda: f64 },
    Bernoulli { theta: f64 },
    Binomial { n: usize, theta: f64 },
    Custom { values: Vec<f64> },
}

impl DistributionFamily {
    pub fn check_parameters(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Self::Uniform { n: 0 } => bad("uniform requires N ≥ 1".into()),
            Self::Geometric { q } if !(q > 0.0 && q <= 1.0) => {
                bad(format!("geometric requires q in (0, 1], got {q}"))
            }
            Self::Poisson { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                bad(format!("poisson requires λ > 0, got {lambda}"))
            }
            Self::Bernoulli { theta } if !(0.0..=1.0).contains(&theta) => {
                bad(format!("bernoulli requires θ in [0, 1], got {theta}"))
            }
            Self::Binomial { n: 0, .. } => bad("binomial requires n ≥ 1".into()),
            Self::Binomial { theta, .. } if !(0.0..=1.0).contains(&theta) => {
                bad(format!("binomial requires θ in [0, 1], got {theta}"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DistributionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { n } => write!(f, "uniform:{n}"),
            Self::Geometric { q } => write!(f, "geometric:{q}"),
            Self::Poisson { lambda } => write!(f, "poisson:{lambda}"),
            Self::Bernoulli { theta } => write!(f, "bernoulli:{theta}"),
            Self::Binomial { n, theta } => write!(f, "binomial:{n},{theta}"),
            Self::Custom { values } => write!(f, "custom[{}]", values.len()),
        }
    }
}

impl FromStr for DistributionFamily {
    type Err = Error;

    /// Parses `name:param[,param]`, e.g. `geometric:0.25`, `binomial:10,0.3`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected name:param[,param], got {s:?}")))?;
        let params: Vec<&str> = params.split(',').map(str::trim).collect();
        let real = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {x:?}")))
        };
        let int = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| Error::Parse(format!("not a nonnegative integer: {x:?}")))
        };
        let arity = |k: usize| {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let family = match name.trim().to_ascii_lowercase().as_str() {
            "uniform" => {
                arity(1)?;
                Self::Uniform { n: int(params[0])? }
            }
            "geometric" => {
                arity(1)?;
                Self::Geometric {
                    q: real(params[0])?,
                }
            }
            "poisson" => {
                arity(1)?;
                Self::Poisson {
                    lambda: real(params[0])?,
                }
            }
            "bernoulli" => {
                arity(1)?;
                Self::Bernoulli {
                    theta: real(params[0])?,
                }
            }
            "binomial" => {
                arity(2)?;
                Self::Binomial {
                    n: int(params[0])?,
                    theta: real(params[1])?,
                }
            }
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        family.check_parameters()?;
        Ok(family)
    }
}

/// Materialize `family` with tail mass at most `eps_tail`.
pub fn from_family(family: &DistributionFamily, eps_tail: f64) -> Result<Pmf> {
    from_family_with_limit(family, eps_tail, MAX_SUPPORT_LEN)
}

pub fn from_family_with_limit(
    family: &DistributionFamily,
    eps_tail: f64,
    max_len: usize,
) -> Result<Pmf> {
    if !(eps_tail > 0.0 && eps_tail.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps_tail must be positive, got {eps_tail}"
        )));
    }
    family.check_parameters()?;
    let (values, tail) = match *family {
        DistributionFamily::Uniform { n } => {
            if n > max_len {
                return Err(Error::TailUnreachable {
                    bound: 1.0,
                    target: eps_tail,
                    max_len,
                });
            }
            (vec![1.0 / n as f64; n], 0.0)
        }
        DistributionFamily::Geometric { q } => geometric_truncation(q, eps_tail, max_len)?,
        DistributionFamily::Poisson { lambda } => poisson_truncation(lambda, eps_tail, max_len)?,
        DistributionFamily::Bernoulli { theta } => (vec![1.0 - theta, theta], 0.0),
        DistributionFamily::Binomial { n, theta } => (binomial_values(n, theta), 0.0),
        DistributionFamily::Custom { ref values } => (values.clone(), 0.0),
    };
    let config = ValidationConfig::with_max_tail(eps_tail);
    Ok(Pmf::with_config(values, tail, &config)?.with_origin(family.clone()))
}

/// `Σ_{i≥M} i² q r^i = r^M (M² + 2M r/q + r(1+r)/q²)` with `r = 1 − q`.
fn geometric_second_moment_tail(q: f64, len: usize) -> f64 {
    let r = 1.0 - q;
    let m = len as f64;
    let rm = (m * (-q).ln_1p()).exp();
    rm * (m * m + 2.0 * m * r / q + r * (1.0 + r) / (q * q))
}

fn geometric_truncation(q: f64, eps: f64, max_len: usize) -> Result<(Vec<f64>, f64)> {
    if q == 1.0 {
        return Ok((vec![1.0], 0.0));
    }
    let ln_r = (-q).ln_1p();
    let tail_at = |m: usize| (m as f64 * ln_r).exp();
    let moment_target = eps.min(SECOND_MOMENT_TAIL_TARGET);

    let mut len = ((eps.ln() / ln_r).ceil().max(1.0)) as usize;
    while tail_at(len) > eps {
        len += 1;
    }
    // The i²-weighted tail shrinks by about r per step once len ≫ 1/q.
    let mut step = 1usize;
    while geometric_second_moment_tail(q, len) > moment_target {
        len += step;
        step = (step * 2).min(1 + len / 64);
    }
    if len > max_len {
        return Err(Error::TailUnreachable {
            bound: tail_at(max_len),
            target: eps,
            max_len,
        });
    }
    let values = (0..len).map(|i| q * (i as f64 * ln_r).exp()).collect();
    Ok((values, tail_at(len)))
}

/// `ln p(m)` for the Poisson law, used once to anchor the recurrence.
fn poisson_ln_pmf(lambda: f64, m: usize) -> f64 {
    if m < 30 {
        let mut prod = 1.0f64;
        for k in 1..=m {
            prod *= lambda / k as f64;
        }
        return -lambda + prod.ln();
    }
    // Stirling series for ln m!, arranged so the large terms cancel exactly:
    // −λ + m ln λ − ln m! = m ln(1 + d) − m d − ½ ln(2πm) − S(m), d = (λ−m)/m.
    let mf = m as f64;
    let d = (lambda - mf) / mf;
    let inv = 1.0 / mf;
    let inv2 = inv * inv;
    let series =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    mf * d.ln_1p() - (lambda - mf) - 0.5 * (2.0 * std::f64::consts::PI * mf).ln() - series
}

fn poisson_truncation(lambda: f64, eps: f64, max_len: usize) -> Result<(Vec<f64>, f64)> {
    let mode = lambda.floor() as usize;
    if mode >= max_len {
        return Err(Error::TailUnreachable {
            bound: 1.0,
            target: eps,
            max_len,
        });
    }
    let moment_target = eps.min(SECOND_MOMENT_TAIL_TARGET);

    let mut values = vec![0.0; mode + 1];
    values[mode] = poisson_ln_pmf(lambda, mode).exp();
    for i in (1..=mode).rev() {
        values[i - 1] = values[i] * i as f64 / lambda;
    }

    // values holds p(0..=k); try truncating at M = k, leaving p(k) in the tail.
    loop {
        let k = values.len() - 1;
        let pk = values[k];
        let m = k as f64;
        if k >= 1 && m >= 2.0 * lambda {
            let mass_ratio = lambda / (m + 1.0);
            let mass_tail = pk / (1.0 - mass_ratio);
            let moment_ratio = (m + 1.0) * lambda / (m * m);
            if mass_tail <= eps && moment_ratio < 1.0 {
                let moment_tail = m * m * pk / (1.0 - moment_ratio);
                if moment_tail <= moment_target {
                    values.pop();
                    return Ok((values, mass_tail));
                }
            }
        }
        if k >= max_len {
            return Err(Error::TailUnreachable {
                bound: pk,
                target: eps,
                max_len,
            });
        }
        values.push(pk * lambda / (m + 1.0));
    }
}

/// Binomial(n, θ) by the ratio recurrence from the mode, normalized by the
/// compensated total. Exact support, so no tail.
fn binomial_values(n: usize, theta: f64) -> Vec<f64> {
    let mut values = vec![0.0; n + 1];
    if theta == 0.0 {
        values[0] = 1.0;
        return values;
    }
    if theta == 1.0 {
        values[n] = 1.0;
        return values;
    }
    let mode = (((n + 1) as f64) * theta).floor().min(n as f64) as usize;
    let odds = theta / (1.0 - theta);
    values[mode] = 1.0;
    for k in mode..n {
        values[k + 1] = values[k] * (n - k) as f64 / (k + 1) as f64 * odds;
    }
    for k in (1..=mode).rev() {
        values[k - 1] = values[k] * k as f64 / ((n - k + 1) as f64 * odds);
    }
    let total = summation::sum(values.iter().copied());
    values.iter_mut().for_each(|v| *v /= total);
    values
}

#[derive(Deserialize)]
struct PmfDocument {
    values: Vec<f64>,
    #[serde(default)]
    tail_mass_bound: f64,
}

/// Parse a pmf document: either a JSON object
/// `{"values": [...], "tail_mass_bound": x}` or plain text with one
/// probability per line (blank lines ignored, tail bound 0).
pub fn parse_pmf_document(text: &str, config: &ValidationConfig) -> Result<Pmf> {
    let trimmed = text.trim_start();
    let (values, tail) = if trimmed.starts_with('{') {
        let doc: PmfDocument =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        (doc.values, doc.tail_mass_bound)
    } else {
        let values = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(n, l)| {
                l.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("line {}: not a number: {:?}", n + 1, l.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        (values, 0.0)
    };
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidPmf(format!("entry {i} is not finite")));
    }
    if let Some(i) = values.iter().position(|v| *v < 0.0) {
        return Err(Error::InvalidPmf(format!("entry {i} is negative")));
    }
    Pmf::with_config(values, tail, config)
}

pub fn read_pmf_file(path: &std::path::Path, config: &ValidationConfig) -> Result<Pmf> {
    let text = std::fs::read_to_string(path)?;
    parse_pmf_document(&text, config)
}
