//! Scalar quantities of a pmf: the DFI in three equivalent forms, the lag-t
//! autocorrelation of `φ = √p`, squared Hellinger distance, moments, maximum,
//! Shannon entropy (nats) and entropy power.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::summation::{self, NeumaierSum};

/// Every scalar the inequalities consume, for one pmf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityReport {
    pub dfi: f64,
    pub entropy: f64,
    pub entropy_power: f64,
    pub mean: f64,
    pub variance: f64,
    pub max_pmf: f64,
    pub argmax: usize,
    pub p0: f64,
    pub autocorr_lag1: f64,
    pub error_bound_dfi: f64,
    pub error_bound_entropy: f64,
}

/// DFI value with a certified bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DfiEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// `φ(i) = √p(i)`.
pub fn sqrt_transform(p: &Pmf) -> Vec<f64> {
    p.values().iter().map(|v| v.sqrt()).collect()
}

/// `I_d(p) = 4 Σ (φ(i+1) − φ(i))²`.
///
/// With a zero tail the pmf genuinely ends at `M−1`, so the final difference
/// `(0 − φ(M−1))²` is included. With a nonzero tail it is left out and the
/// missing terms are covered by `error_bound = 8·tail + 4(φ(M−1) + √tail)²`.
pub fn dfi_direct(p: &Pmf) -> DfiEstimate {
    let phi = sqrt_transform(p);
    let mut acc: NeumaierSum = phi.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    let last = *phi.last().expect("valid pmf is nonempty");
    let tail = p.tail_mass_bound();
    let error_bound = if tail == 0.0 {
        acc.add(last * last);
        0.0
    } else {
        8.0 * tail + 4.0 * (last + tail.sqrt()).powi(2)
    };
    DfiEstimate {
        value: 4.0 * acc.value(),
        error_bound,
    }
}

/// `R_φφ(t) = Σ φ(i) φ(i+t)` over the stored prefix.
pub fn autocorrelation(p: &Pmf, t: usize) -> f64 {
    let phi = sqrt_transform(p);
    if t >= phi.len() {
        return 0.0;
    }
    summation::sum(phi.iter().zip(&phi[t..]).map(|(a, b)| a * b))
}

/// `I_d(p) = 4(2 − p(0) − 2R_φφ(1))`.
///
/// The identity uses `Σ p(i) = 1` twice, so it is exact only when the whole
/// mass is stored; a nonzero tail bound is refused.
pub fn dfi_autocorr(p: &Pmf) -> Result<f64> {
    if p.tail_mass_bound() != 0.0 {
        return Err(Error::Precondition(format!(
            "autocorrelation form needs a zero tail bound, got {:e}",
            p.tail_mass_bound()
        )));
    }
    Ok(4.0 * (2.0 - p.p0() - 2.0 * autocorrelation(p, 1)))
}

/// `H²(p, q) = ½ Σ (√p(i) − √q(i))²`, shorter argument padded with zeros.
pub fn hellinger_sq(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let at = |s: &[f64], i: usize| s.get(i).copied().unwrap_or(0.0).sqrt();
    0.5 * summation::sum((0..n).map(|i| (at(p, i) - at(q, i)).powi(2)))
}

/// `I_d(p) = 8 H²(p, q)` with `q(i) = p(i+1)`.
pub fn dfi_hellinger(p: &Pmf) -> f64 {
    8.0 * hellinger_sq(p.values(), &p.shifted().values)
}

/// `μ = Σ i p(i)`.
pub fn mean(p: &Pmf) -> f64 {
    summation::sum(p.values().iter().enumerate().map(|(i, v)| i as f64 * v))
}

/// `σ² = E[Z²] − μ²`, accumulated in centered form and clamped at 0.
pub fn variance(p: &Pmf) -> f64 {
    let mu = mean(p);
    summation::sum(
        p.values()
            .iter()
            .enumerate()
            .map(|(i, v)| (i as f64 - mu).powi(2) * v),
    )
    .max(0.0)
}

/// Largest entry and its lowest attaining index.
pub fn max_pmf(p: &Pmf) -> (f64, usize) {
    let mut best = (p.p0(), 0);
    for (i, &v) in p.values().iter().enumerate().skip(1) {
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}

/// Shannon entropy in nats with `0 log 0 = 0`.
pub fn entropy(p: &Pmf) -> f64 {
    summation::sum(
        p.values()
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| -v * v.ln()),
    )
    .max(0.0)
}

/// Worst-case entropy contribution of the unstored tail,
/// `ε|ln ε| + ε ln(M+1)`. Reported, never subtracted.
pub fn entropy_error_bound(p: &Pmf) -> f64 {
    let eps = p.tail_mass_bound();
    if eps == 0.0 {
        return 0.0;
    }
    eps * eps.ln().abs() + eps * ((p.len() + 1) as f64).ln()
}

/// `N_d(p) = exp(2H(p))`.
pub fn entropy_power(p: &Pmf) -> f64 {
    (2.0 * entropy(p)).exp()
}

pub fn quantity_report(p: &Pmf) -> QuantityReport {
    let dfi = dfi_direct(p);
    let h = entropy(p);
    let (max_pmf, argmax) = max_pmf(p);
    QuantityReport {
        dfi: dfi.value,
        entropy: h,
        entropy_power: (2.0 * h).exp(),
        mean: mean(p),
        variance: variance(p),
        max_pmf,
        argmax,
        p0: p.p0(),
        autocorr_lag1: autocorrelation(p, 1),
        error_bound_dfi: dfi.error_bound,
        error_bound_entropy: entropy_error_bound(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{from_family, DistributionFamily};

    fn pmf(v: &[f64]) -> Pmf {
        Pmf::new(v.to_vec(), 0.0).unwrap()
    }

    fn family(f: DistributionFamily) -> Pmf {
        from_family(&f, 1e-12).unwrap()
    }

    #[test]
    fn sqrt_transform_examples() {
        assert_eq!(sqrt_transform(&Pmf::delta()), vec![1.0]);
        assert_eq!(
            sqrt_transform(&pmf(&[0.25, 0.75])),
            vec![0.5, 0.8660254037844386]
        );
        assert_eq!(sqrt_transform(&pmf(&[0.0, 1.0])), vec![0.0, 1.0]);
    }

    #[test]
    fn dfi_direct_examples() {
        assert_eq!(dfi_direct(&Pmf::delta()).value, 4.0);
        assert_eq!(dfi_direct(&Pmf::delta()).error_bound, 0.0);
        assert!((dfi_direct(&pmf(&[0.25; 4])).value - 1.0).abs() < 1e-15);
        let g = family(DistributionFamily::Geometric { q: 0.75 });
        let est = dfi_direct(&g);
        assert!((est.value - 1.0).abs() <= est.error_bound + 1e-12);
        assert!(est.error_bound > 0.0 && est.error_bound < 1e-10);
    }

    #[test]
    fn autocorrelation_examples() {
        let u = pmf(&[0.25; 4]);
        assert!((autocorrelation(&u, 0) - 1.0).abs() < 1e-15);
        assert_eq!(autocorrelation(&Pmf::delta(), 1), 0.0);
        // three products 0.5·0.5
        assert_eq!(autocorrelation(&u, 1), 0.75);
        assert_eq!(autocorrelation(&u, 10), 0.0);
    }

    #[test]
    fn dfi_autocorr_examples() {
        assert_eq!(dfi_autocorr(&Pmf::delta()).unwrap(), 4.0);
        assert!((dfi_autocorr(&pmf(&[0.25; 4])).unwrap() - 1.0).abs() < 1e-15);
        let b = pmf(&[0.5, 0.5]);
        assert!((dfi_autocorr(&b).unwrap() - 2.0).abs() < 1e-15);
        assert!((dfi_direct(&b).value - 2.0).abs() < 1e-15);
        let g = family(DistributionFamily::Geometric { q: 0.5 });
        assert!(matches!(dfi_autocorr(&g), Err(Error::Precondition(_))));
    }

    #[test]
    fn hellinger_examples() {
        let u = [0.25; 4];
        assert_eq!(hellinger_sq(&u, &u), 0.0);
        assert_eq!(hellinger_sq(&[1.0], &[0.0, 1.0]), 1.0);
        assert_eq!(hellinger_sq(&[0.0, 1.0], &[1.0]), 1.0);
        let p = pmf(&u);
        assert!((hellinger_sq(&u, &p.shifted().values) - 0.125).abs() < 1e-16);
        assert!((dfi_hellinger(&p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn moment_examples() {
        let u = pmf(&[0.25; 4]);
        assert_eq!(mean(&u), 1.5);
        assert!((variance(&u) - 1.25).abs() < 1e-15);
        assert_eq!(mean(&Pmf::delta()), 0.0);
        assert_eq!(variance(&Pmf::delta()), 0.0);
        let g = family(DistributionFamily::Geometric { q: 0.5 });
        assert!((mean(&g) - 1.0).abs() < 1e-10);
        assert!((variance(&g) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&Pmf::delta()), 0.0);
        assert_eq!(entropy_power(&Pmf::delta()), 1.0);
        for n in [2usize, 4, 7, 100] {
            let u = family(DistributionFamily::Uniform { n });
            assert!((entropy(&u) - (n as f64).ln()).abs() < 1e-13);
            assert!((entropy_power(&u) / (n * n) as f64 - 1.0).abs() < 1e-12);
        }
        let g = family(DistributionFamily::Geometric { q: 0.5 });
        assert!((entropy_power(&g) - 16.0).abs() < 1e-9);
        // zero entries contribute nothing
        assert_eq!(entropy(&pmf(&[0.0, 1.0, 0.0])), 0.0);
    }

    #[test]
    fn max_pmf_examples() {
        assert_eq!(max_pmf(&pmf(&[0.25; 4])), (0.25, 0));
        let g = family(DistributionFamily::Geometric { q: 0.3 });
        assert_eq!(max_pmf(&g), (g.p(0), 0));
        assert!((g.p(0) - 0.3).abs() < 1e-16);
        let pois = family(DistributionFamily::Poisson { lambda: 2.5 });
        assert_eq!(max_pmf(&pois), (pois.p(2), 2));
        assert_eq!(max_pmf(&pmf(&[0.2, 0.4, 0.4])), (0.4, 1));
    }

    #[test]
    fn report_examples() {
        let r = quantity_report(&pmf(&[0.25; 4]));
        assert!((r.dfi - 1.0).abs() < 1e-15);
        assert!((r.entropy - 4f64.ln()).abs() < 1e-15);
        assert!((r.entropy_power - 16.0).abs() < 1e-12);
        assert_eq!((r.mean, r.max_pmf, r.p0), (1.5, 0.25, 0.25));
        assert!((r.variance - 1.25).abs() < 1e-15);

        let d = quantity_report(&Pmf::delta());
        assert_eq!(
            (
                d.dfi,
                d.entropy,
                d.entropy_power,
                d.mean,
                d.variance,
                d.max_pmf,
                d.p0
            ),
            (4.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0)
        );

        let g = quantity_report(&family(DistributionFamily::Geometric { q: 0.75 }));
        assert!((g.dfi - 1.0).abs() < 1e-10);
        assert_eq!(g.max_pmf, 0.75);
        assert!((g.mean - 1.0 / 3.0).abs() < 1e-12);
        assert!((g.variance - 4.0 / 9.0).abs() < 1e-11);
    }

    #[test]
    fn boundary_terms_for_shifted_delta() {
        // [0, 1]: (1−0)² + (0−1)²
        assert_eq!(dfi_direct(&pmf(&[0.0, 1.0])).value, 8.0);
    }
}
