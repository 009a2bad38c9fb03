//! Acceptance suite. Runs every criterion, prints one line per criterion
//! and exits non-zero when any of them fails.

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hystwave::diagnostics::{ene2_series, ene3_series};
use hystwave::galerkin::{continuation_solve, relative_error, Discretization, GalerkinProblem, Manufactured, SolverSettings};
use hystwave::hysteresis::{
    growth_and_coincidence_check, play_energy_residuals, play_trajectory, preisach_energy_residuals, preisach_eval,
    preisach_trajectory, resolve_contact_events, DensityFamily, MemoryState, PreisachDensity, PreisachEvaluator,
};
use hystwave::{Error, Exec};
use hystwave_cli::{sweep, ScenarioConfig, SweepParam};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

const THRESHOLDS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
const SAMPLES_PER_PERIOD: usize = 64;

/// Periodic piecewise-linear input sampled on a uniform grid; the knots
/// sit on grid points so the samples carry every extremum.
fn random_pl_input(rng: &mut ChaCha8Rng, periods: usize) -> Vec<f64> {
    let n = SAMPLES_PER_PERIOD;
    let knots = rng.gen_range(3..=12);
    let mut idx: Vec<usize> = (1..n).collect();
    for i in (1..idx.len()).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    let mut pos: Vec<usize> = idx[..knots - 1].to_vec();
    pos.push(0);
    pos.sort_unstable();
    let scale = rng.gen_range(0.2..4.0);
    let vals: Vec<f64> = pos.iter().map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
    let one: Vec<f64> = (0..n)
        .map(|i| {
            let k = pos.iter().rposition(|&p| p <= i).unwrap();
            let (p0, v0) = (pos[k], vals[k]);
            let (p1, v1) = if k + 1 < pos.len() { (pos[k + 1], vals[k + 1]) } else { (n, vals[0]) };
            v0 + (v1 - v0) * (i - p0) as f64 / (p1 - p0) as f64
        })
        .collect();
    let mut out: Vec<f64> = (0..periods).flat_map(|_| one.iter().copied()).collect();
    out.push(one[0]);
    out
}

/// Play output by clamping along a 100-fold linear refinement.
fn refined_play(r: f64, samples: &[f64]) -> Vec<f64> {
    let clamp = |xi: f64, p: f64| xi.max(p - r).min(p + r);
    let mut xi = clamp(0.0, samples[0]);
    let mut out = vec![xi];
    for w in samples.windows(2) {
        for s in 1..=100 {
            xi = clamp(xi, w[0] + (w[1] - w[0]) * s as f64 / 100.0);
        }
        out.push(xi);
    }
    out
}

fn corpus() -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    (0..200).map(|_| random_pl_input(&mut rng, 2)).collect()
}

fn criterion_1() -> Verdict {
    let mut worst = 0.0_f64;
    for input in corpus() {
        for r in THRESHOLDS {
            let fast = play_trajectory(r, &input).unwrap();
            let oracle = refined_play(r, &input);
            for (a, b) in fast.iter().zip(&oracle) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    verdict(worst <= 1e-10, format!("sup error {worst:.2e} over 200 inputs x 4 thresholds"))
}

fn criterion_2() -> Verdict {
    let mut worst = 0.0_f64;
    let mut raw_worst = 0.0_f64;
    for input in corpus() {
        for r in THRESHOLDS {
            let resolved = resolve_contact_events(r, &input).unwrap();
            let res = play_energy_residuals(r, &resolved.input, &resolved.output).unwrap();
            worst = res.mono.iter().fold(worst, |a, v| a.max(v.abs()));
            let xi = play_trajectory(r, &input).unwrap();
            let raw = play_energy_residuals(r, &input, &xi).unwrap();
            raw_worst = raw.mono.iter().fold(raw_worst, |a, v| a.max(v.abs()));
        }
    }
    verdict(
        worst <= 1e-12,
        format!("max |dxi (dp - dxi)| = {worst:.2e} with contact instants resolved ({raw_worst:.2e} on raw samples)"),
    )
}

fn criterion_3() -> Verdict {
    let input = |n: usize| -> Vec<f64> {
        (0..=n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                2.0 * t.sin() + 0.5 * (3.0 * t).sin()
            })
            .collect()
    };
    let density = PreisachDensity::uniform(1.0, 1.0).unwrap();
    let ev = PreisachEvaluator::default();
    let play_total = |n: usize| -> f64 {
        let p = input(n);
        [0.25, 0.5, 1.0]
            .iter()
            .map(|&r| {
                let xi = play_trajectory(r, &p).unwrap();
                play_energy_residuals(r, &p, &xi).unwrap().energy.iter().map(|v| v.abs()).sum::<f64>()
            })
            .sum()
    };
    let preisach_total = |n: usize| -> f64 {
        let p = input(n);
        let traj = preisach_trajectory(&density, &p, &ev).unwrap();
        preisach_energy_residuals(&p, &traj).unwrap().iter().map(|v| v.abs()).sum()
    };
    let rp = play_total(512) / play_total(1024);
    let rq = preisach_total(512) / preisach_total(1024);
    let ok = |x: f64| (1.7..=2.3).contains(&x);
    verdict(ok(rp) && ok(rq), format!("halving ratios: play {rp:.4}, Preisach {rq:.4}"))
}

fn criterion_4() -> Verdict {
    let density = PreisachDensity::uniform(1.0, 1.0).unwrap();
    let mut memory = MemoryState::virgin();
    for k in 0..=1000 {
        memory.update(k as f64 / 1000.0);
    }
    let out = preisach_eval(&density, &memory, false, &PreisachEvaluator::new(64).unwrap()).unwrap();
    let err = (out.g - 0.5).abs().max((out.v_pot - 1.0 / 6.0).abs()).max((out.d_diss - 1.0 / 6.0).abs());
    verdict(
        err <= 1e-6,
        format!("G = {:.12}, V = {:.12}, D = {:.12}, max error {err:.1e}", out.g, out.v_pot, out.d_diss),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let densities = [
        PreisachDensity::uniform(1.0, 1.0).unwrap(),
        PreisachDensity::gaussian(1.0, 1.0, 0.3).unwrap(),
    ];
    let ev = PreisachEvaluator::default();
    let n = 96;
    let mut worst = 0.0_f64;
    for case in 0..50 {
        // random trigonometric polynomial of degree <= 4
        let coeffs: Vec<(f64, f64)> = (1..=4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let offset = rng.gen_range(-0.5..0.5);
        let one: Vec<f64> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                offset
                    + coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, (a, b))| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
                        .sum::<f64>()
            })
            .collect();
        let three: Vec<f64> = (0..3).flat_map(|_| one.iter().copied()).collect();
        for r in THRESHOLDS {
            let xi = play_trajectory(r, &three).unwrap();
            for i in 0..n {
                worst = worst.max((xi[n + i] - xi[2 * n + i]).abs());
            }
        }
        let traj = preisach_trajectory(&densities[case % 2], &three, &ev).unwrap();
        for i in 0..n {
            worst = worst.max((traj.g_r[n + i] - traj.g_r[2 * n + i]).abs());
        }
    }
    verdict(worst <= 1e-12, format!("max period-2 vs period-3 difference {worst:.2e} over 50 inputs"))
}

fn criterion_6() -> Verdict {
    let radius = 0.4;
    let density = PreisachDensity::gaussian(1.0, 1.0, radius).unwrap();
    let h = density.constants().unwrap().h_rho;
    let ev = PreisachEvaluator::default();
    let input = |amp: f64| -> Vec<f64> {
        (0..=600)
            .map(|i| {
                let t = TAU * i as f64 / 200.0;
                amp * (0.8 * t.sin() + 0.2 * (3.0 * t).cos()) / 0.8837
            })
            .collect()
    };
    let sup = |p: &[f64]| p.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    // growth bounds checked here from the raw trajectories
    let bounds = |p: &[f64], g: &[f64]| -> bool {
        let mut s = 0.0_f64;
        let mut ok = true;
        for n in 0..p.len() {
            s = s.max(p[n].abs());
            ok &= g[n].abs() <= h * s * s * (1.0 + 1e-10);
            if n > 0 {
                ok &= (g[n] - g[n - 1]).abs() <= h * s * (p[n] - p[n - 1]).abs() * (1.0 + 1e-10) + 1e-15;
            }
        }
        ok
    };
    let small = input(0.9 * radius);
    let small = {
        let s = sup(&small);
        small.iter().map(|v| v * 0.9 * radius / s).collect::<Vec<_>>()
    };
    let large: Vec<f64> = small.iter().map(|v| v * 3.0 / 0.9).collect();
    let rs = growth_and_coincidence_check(&density, &small, &ev).unwrap();
    let rl = growth_and_coincidence_check(&density, &large, &ev).unwrap();
    let coincide = rs.max_gap <= 1e-12;
    let differ = rl.max_gap > 1e-6;
    let grow = bounds(&large, &rl.trajectory.g) && bounds(&large, &rl.trajectory.g_r) && rl.bounds_hold();
    verdict(
        coincide && differ && grow,
        format!(
            "0.9R: max|G - G_R| = {:.1e}; 3R: max|G - G_R| = {:.3e}, growth bounds {}",
            rs.max_gap,
            rl.max_gap,
            if grow { "hold" } else { "violated" }
        ),
    )
}

fn criterion_7() -> Verdict {
    let ev = PreisachEvaluator::default();
    let densities = [
        ("uniform", PreisachDensity::uniform(1.0, 1.0).unwrap()),
        ("gaussian-in-v", PreisachDensity::gaussian(1.0, 1.0, 0.3).unwrap()),
    ];
    let n = 256;
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for (name, d) in &densities {
        let radius = d.radius;
        for frac in [0.1, 0.2, 0.4, 0.7, 1.0] {
            let eps = frac * radius;
            let shapes: [(&str, Box<dyn Fn(f64) -> f64>); 2] = [
                ("one", Box::new(|t: f64| t.sin())),
                ("two", Box::new(|t: f64| (t.sin() + 0.3 * (3.0 * t + 0.4).cos()) / 1.3)),
            ];
            for (shape, f) in &shapes {
                let p: Vec<f64> = (0..n).map(|i| eps * f(TAU * i as f64 / n as f64)).collect();
                for (label, s) in [("ene2", ene2_series(d, &p, &ev).unwrap()), ("ene3", ene3_series(d, &p, &ev).unwrap())] {
                    checked += 1;
                    let scale = s.lhs.abs() + s.rhs.abs();
                    if scale > 0.0 {
                        worst_margin = worst_margin.min((s.slack + s.epsilon) / scale);
                    }
                    if !s.holds() {
                        failures.push(format!("{label} {name} {shape} eps={eps}: slack {:.3e} eps_grid {:.3e}", s.slack, s.epsilon));
                    }
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{checked} audits hold; smallest relative margin {worst_margin:.2e}")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_8() -> Verdict {
    let c = *PreisachDensity::uniform(1.0, 1.0).unwrap().constants().unwrap();
    let exact = (c.a_r, c.c_r, c.k_r) == (1.0, 0.0, 0.5);
    let n = 400;
    let v_grid: Vec<f64> = (0..=n).map(|j| -1.0 + 2.0 * j as f64 / n as f64).collect();
    let row: Vec<f64> = v_grid.iter().map(|v| 2.0 - v * v).collect();
    let family = DensityFamily::TabulatedGrid {
        r_grid: vec![0.0, 4.0],
        v_grid,
        values: vec![row.clone(), row],
    };
    // bisection on (2 - R^2)/2 - 2R
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if 0.5 * (2.0 - mid * mid) - 2.0 * mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    match PreisachDensity::new(family, 1.0, n) {
        Err(Error::ConvexityRadiusTooLarge { suggested, .. }) => {
            let rel = (suggested - root).abs() / root;
            verdict(
                exact && rel <= 0.05,
                format!(
                    "uniform: (A_R, C_R, K_R) = ({}, {}, {}); 2 - v^2 rejected, suggested R = {suggested:.4} vs {root:.4} ({:.2}%)",
                    c.a_r,
                    c.c_r,
                    c.k_r,
                    100.0 * rel
                ),
            )
        }
        other => verdict(false, format!("2 - v^2 with R = 1 not rejected as expected: {other:?}")),
    }
}

fn criterion_9() -> Verdict {
    let density = PreisachDensity::uniform(1.0, 1.0).unwrap();
    let ev = PreisachEvaluator::default();
    let ms = Manufactured::new(0.05, 0.05);
    // the solver tolerance must sit below the discretisation error
    let settings = SolverSettings {
        tol_res: 1e-12,
        ..SolverSettings::default()
    };
    let mut errors = Vec::new();
    for (m, n_t) in [(4, 128), (8, 256), (16, 512)] {
        let disc = Discretization::new(1.0, 1.0, m, n_t, 4 * m + 16).unwrap();
        let data = ms.data(&disc, &density, &ev, [1.0, 1.0], Exec::Parallel).unwrap();
        let exact = ms.projected(&disc).unwrap();
        let problem = GalerkinProblem::new(disc, data, density.clone()).unwrap();
        let out = continuation_solve(&problem, &settings).unwrap();
        if !out.converged() {
            return verdict(false, format!("m = {m}: {:?}", out.failure));
        }
        errors.push(relative_error(&out.solution, &exact));
    }
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let last = *errors.last().unwrap();
    verdict(
        monotone && last <= 1e-3,
        format!("relative errors {:.2e}, {:.2e}, {:.2e}", errors[0], errors[1], errors[2]),
    )
}

const SWEEP_CONFIG: &str = r#"
[density]
family = "uniform"
value = 1.0
radius = 1.0

[basis]
m = 8
n_t = 256
n_quad = 64

[data]
amplitude = 1.0
gamma = [1.0, 1.0]
f = [{ j = 1, k = 1, amp = 1.0 }]
"#;

const SWEEP_VALUES: [f64; 9] = [1e-3, 2e-3, 1e-2, 1e-1, 1.0, 10.0, 40.0, 80.0, 1000.0];

fn criteria_10_11() -> (Verdict, Verdict) {
    let base = ScenarioConfig::parse(SWEEP_CONFIG).unwrap();
    let result = sweep(&base, SweepParam::Delta, &SWEEP_VALUES, Exec::Parallel).unwrap();
    let admissible: Vec<_> = result.rows.iter().filter(|r| r.admissible()).collect();
    let Some(smallest) = admissible.iter().map(|r| r.delta).reduce(f64::min) else {
        let v = verdict(false, "no delta with convergence and confinement");
        return (v, verdict(false, "no converged runs"));
    };
    // pairs (δ, δ/2) with both in the smallest decade of the admissible range
    let ratios: Vec<f64> = admissible
        .iter()
        .filter(|r| r.delta <= 10.0 * smallest)
        .filter_map(|r| r.report.as_ref()?.linear_response_ratio)
        .collect();
    let linear = !ratios.is_empty() && ratios.iter().all(|x| (1.8..=2.2).contains(x));
    let flags: Vec<String> = result
        .rows
        .iter()
        .map(|r| format!("{}:{}{}", r.value, if r.converged { "c" } else { "-" }, if r.confined { "C" } else { "-" }))
        .collect();
    let c10 = verdict(
        linear,
        format!(
            "delta* = {:.3e}, response ratios {ratios:.4?}, rows [{}]",
            result.delta_star.unwrap_or(f64::NAN),
            flags.join(" ")
        ),
    );
    let tol = base.solver.tol_res;
    let mut worst = f64::INFINITY;
    let mut runs = 0;
    for r in result.rows.iter().filter(|r| r.converged) {
        let slack = r.report.as_ref().unwrap().energy.es1_balance.slack;
        worst = worst.min(slack);
        runs += 1;
    }
    let c11 = verdict(runs > 0 && worst >= -tol, format!("{runs} converged runs, smallest energy slack {worst:.3e}"));
    (c10, c11)
}

fn criterion_12() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scenario.toml");
    let text = SWEEP_CONFIG.replace("amplitude = 1.0", "amplitude = 0.01") + "\n[output]\nname = \"det\"\nprobes = [0.5]\n";
    std::fs::write(&config, text).unwrap();
    let run = |out: &Path| {
        Command::new(env!("CARGO_BIN_EXE_hystwave"))
            .arg("run")
            .arg(&config)
            .arg("--out-dir")
            .arg(out)
            .output()
            .unwrap()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let (ra, rb) = (run(&a), run(&b));
    if ra.status.code() != Some(0) || rb.status.code() != Some(0) {
        return verdict(false, format!("exit codes {:?} {:?}", ra.status.code(), rb.status.code()));
    }
    let ja = std::fs::read(a.join("det.json")).unwrap();
    let jb = std::fs::read(b.join("det.json")).unwrap();
    verdict(ja == jb, format!("{} byte report, identical = {}", ja.len(), ja == jb))
}

fn guarded<F: FnOnce() -> Verdict>(f: F) -> Verdict {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(v) => v,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        }
    }
}

fn main() {
    let simple: [(u32, &str, fn() -> Verdict); 9] = [
        (1, "play oracle equivalence", criterion_1),
        (2, "monotonicity identity", criterion_2),
        (3, "energy identities first order", criterion_3),
        (4, "Preisach closed forms", criterion_4),
        (5, "periodicity", criterion_5),
        (6, "convexified coincidence", criterion_6),
        (7, "second order and positivity audits", criterion_7),
        (8, "density validation", criterion_8),
        (9, "manufactured convergence", criterion_9),
    ];
    let mut results = Vec::new();
    let report = |id: u32, name: &str, v: &Verdict, secs: f64| {
        println!(
            "criterion {id:>2} {:<4} {name:<36} ({secs:6.2}s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    };
    for (id, name, f) in simple {
        let t0 = Instant::now();
        let v = guarded(f);
        report(id, name, &v, t0.elapsed().as_secs_f64());
        results.push(v.pass);
    }
    let t0 = Instant::now();
    let (v10, v11) = match catch_unwind(criteria_10_11) {
        Ok(pair) => pair,
        Err(_) => (verdict(false, "panicked"), verdict(false, "panicked")),
    };
    let secs = t0.elapsed().as_secs_f64();
    report(10, "small data sweep", &v10, secs);
    report(11, "discrete energy estimate", &v11, 0.0);
    results.extend([v10.pass, v11.pass]);
    let t0 = Instant::now();
    let v12 = guarded(criterion_12);
    report(12, "determinism", &v12, t0.elapsed().as_secs_f64());
    results.push(v12.pass);
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
