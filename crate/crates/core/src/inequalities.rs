//! Both sides of the DFI bounds, with signed gaps.
//!
//! `cramer_rao` is non-strict and has the single equality case `δ_{i0}`; the
//! other three bounds are strict, so their gap must be positive with no slack.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::quantities::{self, QuantityReport};

/// Rounding slack allowed on the non-strict bound.
pub const CRAMER_RAO_SLACK: f64 = 1e-9;
/// `|gap|` and both sides must be at most this to flag the equality case.
pub const EQUALITY_TOL: f64 = 1e-10;
/// Variance-bearing checks refuse pmfs whose tail bound exceeds this.
pub const MAX_TAIL_FOR_VARIANCE: f64 = 1e-9;
/// `p(0)` at or below this counts as zero for the simplified bound.
pub const P0_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    CramerRao,
    CramerRaoSimplified,
    MaxPmfBound,
    Stam,
    StamType,
}

impl CheckName {
    pub const ALL: [CheckName; 5] = [
        CheckName::CramerRao,
        CheckName::CramerRaoSimplified,
        CheckName::MaxPmfBound,
        CheckName::Stam,
        CheckName::StamType,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::CramerRao => "cramer_rao",
            CheckName::CramerRaoSimplified => "cramer_rao_simplified",
            CheckName::MaxPmfBound => "max_pmf_bound",
            CheckName::Stam => "stam",
            CheckName::StamType => "stam_type",
        }
    }

    pub fn is_strict(self) -> bool {
        !matches!(self, CheckName::CramerRao | CheckName::CramerRaoSimplified)
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated bound `lhs (>|≥) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: CheckName,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    #[serde(skip)]
    pub strict: bool,
    pub satisfied: bool,
    pub equality_case: bool,
}

impl InequalityCheck {
    fn new(name: CheckName, lhs: f64, rhs: f64) -> Self {
        let gap = lhs - rhs;
        let strict = name.is_strict();
        let satisfied = if strict {
            gap > 0.0
        } else {
            gap >= -CRAMER_RAO_SLACK
        };
        let equality_case = !strict
            && gap.abs() <= EQUALITY_TOL
            && lhs.abs() <= EQUALITY_TOL
            && rhs.abs() <= EQUALITY_TOL;
        Self {
            name,
            lhs,
            rhs,
            gap,
            strict,
            satisfied,
            equality_case,
        }
    }
}

fn require_small_tail(p: &Pmf) -> Result<()> {
    if p.tail_mass_bound() > MAX_TAIL_FOR_VARIANCE {
        return Err(Error::Precondition(format!(
            "variance-bearing bound needs tail bound ≤ {MAX_TAIL_FOR_VARIANCE:e}, got {:e}",
            p.tail_mass_bound()
        )));
    }
    Ok(())
}

fn cramer_rao_from(q: &QuantityReport) -> InequalityCheck {
    let mu1 = q.mean + 1.0;
    let lhs = (q.variance + 0.5 - 0.5 * mu1 * mu1 * q.p0) * q.dfi;
    let rhs = (1.0 - mu1 * q.p0).powi(2);
    InequalityCheck::new(CheckName::CramerRao, lhs, rhs)
}

fn cramer_rao_simplified_from(q: &QuantityReport) -> InequalityCheck {
    InequalityCheck::new(
        CheckName::CramerRaoSimplified,
        (q.variance + 0.5) * q.dfi,
        1.0,
    )
}

fn max_pmf_from(q: &QuantityReport) -> InequalityCheck {
    let rhs = q.max_pmf * q.max_pmf + (q.max_pmf - q.p0).powi(2);
    InequalityCheck::new(CheckName::MaxPmfBound, q.dfi, rhs)
}

fn stam_from(q: &QuantityReport) -> InequalityCheck {
    InequalityCheck::new(CheckName::Stam, q.entropy_power * q.dfi, 1.0)
}

fn stam_type_from(q: &QuantityReport) -> InequalityCheck {
    let lhs = 0.5 * q.entropy_power * (q.dfi + 2.0 * q.p0 - q.p0 * q.p0);
    InequalityCheck::new(CheckName::StamType, lhs, 1.0)
}

/// `(σ² + ½ − (μ+1)² p(0)/2) I_d ≥ (1 − (μ+1) p(0))²`.
pub fn check_cramer_rao(p: &Pmf) -> Result<InequalityCheck> {
    require_small_tail(p)?;
    Ok(cramer_rao_from(&quantities::quantity_report(p)))
}

/// `(σ² + ½) I_d ≥ 1`, for pmfs with `p(0) = 0`.
pub fn check_cramer_rao_simplified(p: &Pmf) -> Result<InequalityCheck> {
    require_small_tail(p)?;
    if p.p0() > P0_ZERO_TOL {
        return Err(Error::Precondition(format!(
            "simplified bound needs p(0) = 0, got {}",
            p.p0()
        )));
    }
    Ok(cramer_rao_simplified_from(&quantities::quantity_report(p)))
}

/// `I_d > ‖p‖∞² + (‖p‖∞ − p(0))²`.
pub fn check_max_pmf(p: &Pmf) -> InequalityCheck {
    max_pmf_from(&quantities::quantity_report(p))
}

/// `N_d I_d > 1`.
pub fn check_stam(p: &Pmf) -> InequalityCheck {
    stam_from(&quantities::quantity_report(p))
}

/// `½ N_d (I_d + 2p(0) − p(0)²) > 1`.
pub fn check_stam_type(p: &Pmf) -> InequalityCheck {
    stam_type_from(&quantities::quantity_report(p))
}

/// Every applicable check. The Cramér-Rao bounds are skipped when the tail
/// bound is too large to control the variance; the simplified form runs only
/// when `p(0)` is zero.
pub fn check_all(p: &Pmf) -> Vec<InequalityCheck> {
    check_all_from(p, &quantities::quantity_report(p))
}

/// [`check_all`] with the quantities already computed.
pub fn check_all_from(p: &Pmf, q: &QuantityReport) -> Vec<InequalityCheck> {
    let mut out = Vec::with_capacity(5);
    if p.tail_mass_bound() <= MAX_TAIL_FOR_VARIANCE {
        out.push(cramer_rao_from(q));
        if q.p0 <= P0_ZERO_TOL {
            out.push(cramer_rao_simplified_from(q));
        }
    }
    out.push(max_pmf_from(q));
    out.push(stam_from(q));
    out.push(stam_type_from(q));
    out
}
