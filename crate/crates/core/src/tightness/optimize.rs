//! Multi-start derivative-free search for small `N_d I_d` on the simplex.
//!
//! Each move transfers mass `t = min(h, p(j))` from coordinate `j` to `i`,
//! which keeps the iterate on the simplex without an explicit projection
//! step. A move is kept only if it lowers the objective. The step `h` halves
//! whenever a full pass improves by less than `step_tol`.

use rand_distr::{Dirichlet, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::quantities;
use crate::summation;

use super::random::derive_seed;

const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-12;
const RECOMPUTE_TOL: f64 = 1e-10;

/// `N_d(p) I_d(p)` for a finite pmf with zero tail.
pub fn stam_product(values: &[f64]) -> f64 {
    let h = summation::sum(values.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln())).max(0.0);
    let phi = |i: usize| values.get(i).map_or(0.0, |v| v.sqrt());
    let dfi = 4.0 * summation::sum((0..values.len()).map(|i| (phi(i + 1) - phi(i)).powi(2)));
    (2.0 * h).exp() * dfi
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeConfig {
    pub support: usize,
    pub restarts: usize,
    pub step_tol: f64,
    pub seed: u64,
    pub max_passes: usize,
}

impl OptimizeConfig {
    pub fn new(support: usize, restarts: usize, step_tol: f64, seed: u64) -> Self {
        Self {
            support,
            restarts,
            step_tol,
            seed,
            max_passes: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    PointMass,
    Dirichlet,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartRecord {
    pub index: usize,
    pub start: StartKind,
    pub objective: f64,
    pub passes: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub witness: Pmf,
    pub objective: f64,
    pub support_size: usize,
    pub restarts_used: usize,
    pub converged: bool,
    pub restarts: Vec<RestartRecord>,
}

struct Descent {
    values: Vec<f64>,
    objective: f64,
    passes: usize,
    converged: bool,
}

fn descend(mut p: Vec<f64>, step_tol: f64, max_passes: usize) -> Descent {
    let n = p.len();
    let mut f = stam_product(&p);
    let mut h = INITIAL_STEP;
    let mut passes = 0;
    let mut converged = n == 1;
    while !converged && passes < max_passes {
        let start = f;
        for i in 0..n {
            for j in 0..n {
                if i == j || p[j] == 0.0 {
                    continue;
                }
                let (old_i, old_j) = (p[i], p[j]);
                let t = h.min(old_j);
                p[i] = old_i + t;
                p[j] = if t == old_j { 0.0 } else { old_j - t };
                let g = stam_product(&p);
                if g < f {
                    f = g;
                } else {
                    p[i] = old_i;
                    p[j] = old_j;
                }
            }
        }
        passes += 1;
        if start - f < step_tol {
            if h <= MIN_STEP {
                converged = true;
            } else {
                h *= 0.5;
            }
        }
    }
    // transfers drift the total by a few ulps per accepted move
    let total = summation::sum(p.iter().copied());
    p.iter_mut().for_each(|v| *v /= total);
    Descent {
        objective: stam_product(&p),
        values: p,
        passes,
        converged,
    }
}

fn starting_point(config: &OptimizeConfig, index: usize) -> Result<(StartKind, Vec<f64>)> {
    let n = config.support;
    if index == 0 || n == 1 {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        return Ok((StartKind::PointMass, v));
    }
    let dirichlet =
        Dirichlet::new_with_size(1.0, n).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, index as u64));
    Ok((StartKind::Dirichlet, dirichlet.sample(&mut rng)))
}

/// Check a reported optimum against an independent recomputation and
/// against `N_d I_d > 1`.
fn audit(witness: &Pmf, objective: f64) -> Result<()> {
    let q = quantities::quantity_report(witness);
    let recomputed = q.entropy_power * q.dfi;
    if (recomputed - objective).abs() > RECOMPUTE_TOL {
        return Err(Error::Inconsistency(format!(
            "objective {objective} does not match recomputation {recomputed}"
        )));
    }
    if objective <= 1.0 {
        return Err(Error::Inconsistency(format!(
            "N_d·I_d = {objective} ≤ 1 contradicts the discrete Stam inequality"
        )));
    }
    Ok(())
}

/// Minimize `N_d I_d` over pmfs on `{0, …, support−1}`.
///
/// Restart 0 starts from `δ_{i0}`, the rest from seeded Dirichlet(1) draws.
/// Restarts run in parallel; the best objective wins with ties going to the
/// lowest restart index, so the result does not depend on scheduling.
pub fn minimize_stam_product(config: &OptimizeConfig) -> Result<OptimizeResult> {
    if config.support == 0 {
        return Err(Error::InvalidParameter("support must be at least 1".into()));
    }
    if config.restarts == 0 {
        return Err(Error::InvalidParameter(
            "restarts must be at least 1".into(),
        ));
    }
    if config.step_tol.is_nan() || config.step_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step_tol must be positive, got {}",
            config.step_tol
        )));
    }
    let runs: Vec<(StartKind, Descent)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let (kind, start) = starting_point(config, r)?;
            Ok((kind, descend(start, config.step_tol, config.max_passes)))
        })
        .collect::<Result<_>>()?;

    let best = runs.iter().enumerate().fold(0, |best, (i, (_, d))| {
        if d.objective < runs[best].1.objective {
            i
        } else {
            best
        }
    });
    let restarts = runs
        .iter()
        .enumerate()
        .map(|(index, (start, d))| RestartRecord {
            index,
            start: *start,
            objective: d.objective,
            passes: d.passes,
            converged: d.converged,
        })
        .collect();
    let (_, winner) = &runs[best];
    let witness = Pmf::new(winner.values.clone(), 0.0)?;
    audit(&witness, winner.objective)?;
    Ok(OptimizeResult {
        witness,
        objective: winner.objective,
        support_size: config.support,
        restarts_used: config.restarts,
        converged: winner.converged,
        restarts,
    })
}

/// Exhaustive scan of the 1- or 2-simplex on a grid with spacing `step`.
pub fn brute_force_grid(support: usize, step: f64) -> Result<OptimizeResult> {
    if !(support == 2 || support == 3) {
        return Err(Error::InvalidParameter(format!(
            "grid scan supports 2 or 3 points, got {support}"
        )));
    }
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::InvalidParameter(format!(
            "step must lie in (0, 0.1], got {step}"
        )));
    }
    let n = (1.0 / step).round() as usize;
    let at = |k: usize| k as f64 / n as f64;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |v: Vec<f64>| {
        let f = stam_product(&v);
        if best.as_ref().is_none_or(|(b, _)| f < *b) {
            best = Some((f, v));
        }
    };
    let mut points = 0usize;
    for a in 0..=n {
        if support == 2 {
            consider(vec![at(a), at(n - a)]);
            points += 1;
        } else {
            for b in 0..=(n - a) {
                consider(vec![at(a), at(b), at(n - a - b)]);
                points += 1;
            }
        }
    }
    let (objective, values) = best.expect("grid is nonempty");
    let witness = Pmf::new(values, 0.0)?;
    audit(&witness, objective)?;
    Ok(OptimizeResult {
        witness,
        objective,
        support_size: support,
        restarts_used: points,
        converged: true,
        restarts: vec![RestartRecord {
            index: 0,
            start: StartKind::Grid,
            objective,
            passes: points,
            converged: true,
        }],
    })
}
