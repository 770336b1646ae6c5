//! Exit criteria. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line under `cargo test`.

use std::f64::consts::E;
use std::process::ExitCode;

use dfi_core::inequalities::{self, CheckName, InequalityCheck};
use dfi_core::pmf::{from_family, DistributionFamily, Pmf};
use dfi_core::quantities::{self, dfi_autocorr, dfi_direct, hellinger_sq};
use dfi_core::tightness::{
    brute_force_grid, corpus_pmf, dfi_smallq_residual, geometric_sweep, minimize_stam_product,
    OptimizeConfig, DEFAULT_Q_GRID,
};

const CORPUS_SEED: u64 = 7;
const CORPUS_SIZE: u64 = 10_000;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus(n: u64) -> Vec<Pmf> {
    (0..n)
        .map(|k| corpus_pmf(CORPUS_SEED, k, None, None).unwrap().pmf)
        .collect()
}

fn find(checks: &[InequalityCheck], name: CheckName) -> &InequalityCheck {
    checks.iter().find(|c| c.name == name).unwrap()
}

fn ac1_closed_forms() -> Outcome {
    let mut worst = 0.0f64;
    for n in [1usize, 2, 4, 10, 100] {
        let p = from_family(&DistributionFamily::Uniform { n }, 1e-12).unwrap();
        let err = (dfi_direct(&p).value - 4.0 / n as f64).abs();
        ensure(err <= 1e-12, || format!("uniform({n}) dfi error {err:e}"))?;
        let np = quantities::entropy_power(&p);
        let target = (n * n) as f64;
        let rel = (np - target).abs() / target;
        ensure(rel <= 1e-10, || {
            format!("uniform({n}) N_d relative error {rel:e}")
        })?;
        worst = worst.max(err);
    }
    for q in [0.05, 0.25, 0.5, 0.75, 1.0f64] {
        let p = from_family(&DistributionFamily::Geometric { q }, 1e-14).unwrap();
        let closed = 4.0 * (1.0 - (1.0 - q).sqrt()).powi(2);
        let err = (dfi_direct(&p).value - closed).abs();
        ensure(err <= 1e-9, || format!("geometric({q}) dfi error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("max dfi error {worst:.3e}"))
}

fn ac2_equivalent_forms() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for p in corpus(1_000) {
        let direct = dfi_direct(&p).value;
        let auto = dfi_autocorr(&p).map_err(|e| e.to_string())?;
        // pad the shift so the final boundary term (0 − φ(M−1))² is represented
        let mut shifted = p.shifted().values;
        shifted.push(0.0);
        let mut padded = p.values().to_vec();
        padded.push(0.0);
        let hell = 8.0 * hellinger_sq(&padded, &shifted);
        worst.0 = worst.0.max((direct - auto).abs());
        worst.1 = worst.1.max((direct - hell).abs());
    }
    ensure(worst.0 <= 1e-12 && worst.1 <= 1e-12, || {
        format!("autocorr diff {:e}, hellinger diff {:e}", worst.0, worst.1)
    })?;
    Ok(format!(
        "max |direct−autocorr| {:.3e}, max |direct−8H²| {:.3e}",
        worst.0, worst.1
    ))
}

struct CorpusRun {
    pmfs: Vec<Pmf>,
    checks: Vec<Vec<InequalityCheck>>,
}

fn tv_to_delta(p: &Pmf) -> f64 {
    1.0 - p.p0()
}

fn ac3_cramer_rao(run: &CorpusRun) -> Outcome {
    let mut min_gap = f64::INFINITY;
    let mut flagged = 0;
    let mut exact_deltas = 0;
    for (p, checks) in run.pmfs.iter().zip(&run.checks) {
        let cr = find(checks, CheckName::CramerRao);
        min_gap = min_gap.min(cr.gap);
        ensure(cr.gap >= -1e-9, || format!("gap {:e} below −1e−9", cr.gap))?;
        let is_delta = p.values().iter().skip(1).all(|&v| v == 0.0) && p.p0() == 1.0;
        if is_delta {
            exact_deltas += 1;
            ensure(cr.lhs == 0.0 && cr.rhs == 0.0, || {
                format!("δ_i0 sides not exactly 0: {} {}", cr.lhs, cr.rhs)
            })?;
            ensure(cr.equality_case, || "δ_i0 not flagged as equality".into())?;
        }
        if cr.equality_case {
            flagged += 1;
            let tv = tv_to_delta(p);
            ensure(tv <= 1e-8, || {
                format!("equality flagged at TV {tv:e} from δ_i0")
            })?;
        }
    }
    let delta = inequalities::check_cramer_rao(&Pmf::delta()).unwrap();
    ensure(
        delta.lhs == 0.0 && delta.rhs == 0.0 && delta.equality_case,
        || "δ_i0 itself".into(),
    )?;
    Ok(format!(
        "min gap {min_gap:.3e}; equality flagged {flagged}× ({exact_deltas} exact δ_i0, rest within TV 1e−8)"
    ))
}

fn ac4_max_pmf(run: &CorpusRun) -> Outcome {
    let min_gap = run
        .checks
        .iter()
        .map(|c| find(c, CheckName::MaxPmfBound).gap)
        .fold(f64::INFINITY, f64::min);
    ensure(min_gap > 0.0, || format!("min gap {min_gap:e}"))?;
    let sweep = geometric_sweep(&DEFAULT_Q_GRID).unwrap();
    let ratios: Vec<f64> = sweep.points.iter().map(|p| p.ratio_theorem2).collect();
    ensure(ratios.windows(2).all(|w| w[1] > w[0]), || {
        format!("not increasing: {ratios:?}")
    })?;
    ensure(ratios.iter().all(|&r| r < 1.0), || {
        format!("ratio reached 1: {ratios:?}")
    })?;
    let at_1e3 = sweep
        .points
        .iter()
        .find(|p| p.q == 1e-3)
        .unwrap()
        .ratio_theorem2;
    ensure((0.999..1.0).contains(&at_1e3), || {
        format!("ratio at 1e−3 = {at_1e3}")
    })?;
    Ok(format!(
        "min gap {min_gap:.3e}; ratio at q=1e−3 {at_1e3:.9}"
    ))
}

fn ac5_stam(run: &CorpusRun) -> Outcome {
    let min_lhs = run
        .checks
        .iter()
        .map(|c| find(c, CheckName::Stam).lhs)
        .fold(f64::INFINITY, f64::min);
    ensure(min_lhs > 1.0, || format!("min N_d·I_d {min_lhs}"))?;
    let sweep = geometric_sweep(&[1e-3, 1e-4]).unwrap();
    let e2 = E.powi(-2);
    let r3 = (sweep.points[0].ratio_stam - e2).abs();
    let r4 = (sweep.points[1].ratio_stam - e2).abs();
    ensure(r3 < 0.01 && r4 < 0.001, || {
        format!("residuals {r3:e}, {r4:e}")
    })?;
    Ok(format!(
        "min N_d·I_d {min_lhs:.6}; |1/(N_d I_d) − e⁻²| = {r3:.3e} @1e−3, {r4:.3e} @1e−4"
    ))
}

fn ac6_stam_type(run: &CorpusRun) -> Outcome {
    let min_lhs = run
        .checks
        .iter()
        .map(|c| find(c, CheckName::StamType).lhs)
        .fold(f64::INFINITY, f64::min);
    ensure(min_lhs > 1.0, || format!("min Stam-type lhs {min_lhs}"))?;
    // Dirichlet draws essentially never have p(0) = 0, so the corpus is
    // extended with zero-prefixed copies of its first 1000 members.
    let mut zero_p0: Vec<Pmf> = run.pmfs.iter().filter(|p| p.p0() == 0.0).cloned().collect();
    zero_p0.extend(run.pmfs.iter().take(1_000).map(|p| {
        let mut v = vec![0.0];
        v.extend_from_slice(p.values());
        Pmf::new(v, 0.0).unwrap()
    }));
    let mut worst = 0.0f64;
    for p in &zero_p0 {
        let stam = inequalities::check_stam(p);
        let stam_type = inequalities::check_stam_type(p);
        ensure(stam_type.gap > 0.0, || {
            format!("Stam-type gap {:e}", stam_type.gap)
        })?;
        worst = worst.max((stam_type.lhs - stam.lhs / 2.0).abs());
    }
    ensure(worst <= 1e-12, || format!("|lhs10 − lhs9/2| = {worst:e}"))?;
    Ok(format!(
        "min lhs {min_lhs:.6}; {} pmfs with p(0)=0, max |lhs10 − lhs9/2| {worst:.3e}",
        zero_p0.len()
    ))
}

fn ac7_expansion() -> Outcome {
    // 50-digit reference values of (4(1−√(1−q))² − q²)/q³
    let frozen = [
        (0.1, 0.533_615_595_889_603_2),
        (0.01, 0.503_147_040_362_124_2),
        (0.001, 0.500_312_718_914_191_5),
    ];
    let mut parts = Vec::new();
    for (q, reference) in frozen {
        let r = dfi_smallq_residual(q).unwrap();
        ensure((0.3..=0.7).contains(&r), || {
            format!("residual {r} at q={q}")
        })?;
        ensure((r - reference).abs() < 1e-12, || {
            format!("residual {r} vs reference {reference} at q={q}")
        })?;
        parts.push(format!("{r:.6}@{q}"));
    }
    Ok(format!("residuals {}", parts.join(", ")))
}

fn ac8_optimizer() -> Outcome {
    let grid = brute_force_grid(2, 1e-4).unwrap();
    let mut best = Vec::new();
    for support in [1usize, 2, 3, 4, 8, 16] {
        let r = minimize_stam_product(&OptimizeConfig::new(support, 32, 1e-12, 1))
            .map_err(|e| e.to_string())?;
        ensure(r.restarts.iter().all(|x| x.objective > 1.0), || {
            format!("objective ≤ 1 at support {support}")
        })?;
        let q = quantities::quantity_report(&r.witness);
        let recomputed = q.entropy_power * q.dfi;
        ensure((recomputed - r.objective).abs() <= 1e-10, || {
            format!(
                "support {support}: recomputed {recomputed} vs {}",
                r.objective
            )
        })?;
        best.push((support, r.objective));
    }
    let opt2 = best[1].1;
    ensure((opt2 - grid.objective).abs() <= 1e-3, || {
        format!("support-2 optimum {opt2} vs grid {}", grid.objective)
    })?;
    ensure(best.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-6), || {
        format!("not non-increasing: {best:?}")
    })?;
    Ok(format!(
        "grid {:.9} vs optimizer {opt2:.9}; best by support {}",
        grid.objective,
        best.iter()
            .map(|(s, o)| format!("{s}:{o:.9}"))
            .collect::<Vec<_>>()
            .join(" ")
    ))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dfi_core::cli::run(args.iter().copied(), &mut out, &mut err);
    (code, out)
}

fn ac9_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let witness = dir.path().join("w.json");
    let witness = witness.to_str().unwrap();
    let commands: [Vec<&str>; 4] = [
        vec![
            "dfi",
            "--format",
            "json",
            "random-check",
            "--n",
            "2000",
            "--seed",
            "7",
            "--witness",
            witness,
        ],
        vec![
            "dfi",
            "--format",
            "csv",
            "random-check",
            "--n",
            "2000",
            "--seed",
            "7",
            "--witness",
            witness,
        ],
        vec![
            "dfi",
            "--format",
            "json",
            "optimize",
            "--support",
            "16",
            "--restarts",
            "32",
            "--seed",
            "1",
        ],
        vec![
            "dfi",
            "--format",
            "csv",
            "optimize",
            "--support",
            "16",
            "--restarts",
            "32",
            "--seed",
            "1",
        ],
    ];
    for cmd in &commands {
        let first = run_cli(cmd);
        let second = run_cli(cmd);
        ensure(first.0 == 0, || format!("{cmd:?} exited {}", first.0))?;
        ensure(first == second, || {
            format!("{cmd:?} output differs between runs")
        })?;
    }
    Ok(format!(
        "{} commands byte-identical across two runs",
        commands.len()
    ))
}

fn main() -> ExitCode {
    let pmfs = corpus(CORPUS_SIZE);
    let checks = pmfs.iter().map(inequalities::check_all).collect();
    let run = CorpusRun { pmfs, checks };

    let criteria: Vec<Criterion> = vec![
        ("AC1 closed-form reproduction", Box::new(ac1_closed_forms)),
        ("AC2 equivalent DFI forms", Box::new(ac2_equivalent_forms)),
        (
            "AC3 Cramér-Rao-type bound",
            Box::new(|| ac3_cramer_rao(&run)),
        ),
        (
            "AC4 max-pmf bound and α tightness",
            Box::new(|| ac4_max_pmf(&run)),
        ),
        (
            "AC5 Stam bound and e⁻² bracket",
            Box::new(|| ac5_stam(&run)),
        ),
        ("AC6 Stam-type bound", Box::new(|| ac6_stam_type(&run))),
        ("AC7 small-q expansion", Box::new(ac7_expansion)),
        ("AC8 optimizer soundness", Box::new(ac8_optimizer)),
        ("AC9 determinism", Box::new(ac9_determinism)),
    ];
    let mut failed = 0;
    for (name, criterion) in &criteria {
        match criterion() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
