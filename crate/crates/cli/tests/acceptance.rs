//! Acceptance criteria, one line each. Exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use hifbe::analysis::{
    check_envelope_regularity, check_envelope_relations, check_majorant, check_tau_containment, estimate_calm_constant,
    fixed_point_gamma, linspace, CheckReport,
};
use hifbe::linalg::{norm, sub};
use hifbe::rng::seeded;
use hifbe::{
    candidate_gradient, fd_gradient, hifba_run, hifbe as envelope, hifbs, problem_catalog_get, scaled_gradient_check,
    soft_threshold, EnvelopeConfig, HifbaTrace, ScaledCheck, StopReason, CATALOG_IDS,
};
use rand::Rng;

const CLOSED_FORM_TOL: f64 = 1e-8;
const PROX_IDENTITY_TOL: f64 = 1e-6;
const INFIMUM_TOL_MAX: f64 = 1e-3;
const FIXED_POINT_RES_TOL: f64 = 1e-8;
const FD_TOL: f64 = 1e-4;
const DESCENT_SLACK: f64 = 1e-10;
const TERMINAL_RES_TOL: f64 = 1e-6;
const SCALED_GRADIENT_TOL: f64 = 1e-6;
const MAX_ITERS: usize = 500;
const HOLDER_PAIRS: usize = 10_000;
const TAU_EVALS: usize = 1_000;
const GRADIENT_POINTS: usize = 200;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ok_report(r: &CheckReport) -> Result<(), String> {
    ensure(r.passed, format!("{} failed: worst {} at {:?} ({:?})", r.check_id, r.worst_violation, r.witness, r.note))
}

fn closed_form_envelope() -> Outcome {
    let q = problem_catalog_get("quad-free").unwrap();
    let cfg = EnvelopeConfig::new(2.0, 0.5);
    let mut rng = seeded(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = vec![rng.gen_range(-3.0..=3.0), rng.gen_range(-3.0..=3.0)];
        let g = q.f.grad(&x).unwrap();
        let value = q.f.eval(&x).unwrap() - 0.5 * cfg.gamma * norm(&g).powi(2);
        let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - cfg.gamma * b).collect();
        let ev = envelope(&q, &x, &cfg).unwrap();
        worst = worst.max((ev.value - value).abs()).max(norm(&sub(&ev.hifbs.representative, &y)));
    }
    ensure(worst <= CLOSED_FORM_TOL, format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:e} over 100 points"))
}

fn prox_identity() -> Outcome {
    let q = problem_catalog_get("quad-l1").unwrap();
    let cfg = EnvelopeConfig { use_analytic: false, ..EnvelopeConfig::new(2.0, 0.5) };
    let mut rng = seeded(102);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = rng.gen_range(-3.0..=3.0);
        let y = hifbs(&q, &[x], &cfg).unwrap().representative[0];
        let fb = soft_threshold(x - cfg.gamma * q.f.grad(&[x]).unwrap()[0], cfg.gamma);
        worst = worst.max((y - fb).abs());
    }
    ensure(worst <= PROX_IDENTITY_TOL, format!("max error {worst:e}"))?;
    Ok(format!("grid vs soft-threshold max error {worst:e} over 100 anchors"))
}

fn envelope_relations() -> Outcome {
    let o = problem_catalog_get("oscillatory").unwrap();
    let l = o.f.l_nu;
    let gammas = [0.2, 1.0, 2.0, (0.9 / l).min(1.0)];
    let reports = check_envelope_relations(&o, &EnvelopeConfig::new(1.5, 1.0), &gammas, &linspace(-2.5, 2.5, 1001)).unwrap();
    for r in &reports {
        ensure(r.status.is_ok() && r.status != hifbe::analysis::CheckStatus::Skipped || r.check_id.contains("descent"), format!("{} is {:?}", r.check_id, r.status))?;
        ok_report(r)?;
    }
    let inf = reports.iter().find(|r| r.check_id.contains("infimum")).unwrap();
    let tol = inf.constants_used["tolerance"];
    ensure(tol <= INFIMUM_TOL_MAX + 1e-9, format!("infimum tolerance {tol}"))?;
    Ok(format!("upper bound at gamma in {{0.2, 1, 2}}; monotonicity and infimum for gamma in {{0.2, {:.4}}}, infimum tol {tol:e}", gammas[3]))
}

fn majorant_figure() -> Outcome {
    let m = problem_catalog_get("majorant-demo").unwrap();
    let reports = check_majorant(&m, &[0.5, 1.0, 0.2], 0.5, &linspace(-2.0, 3.0, 1001), 7).unwrap();
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for r in &reports {
        let mu = r.constants_used["mu"];
        let majorizes = r.constants_used["majorizes"] == 1.0;
        lines.push(format!("mu={mu}: majorizes={majorizes}, L={:.4}", r.constants_used["L_mu"]));
        let want = mu == 0.5;
        if majorizes != want || (!majorizes && r.witness.is_none()) {
            failed.push(format!("mu={mu}"));
        }
    }
    ensure(failed.is_empty(), format!("{}; mismatched: {}", lines.join(", "), failed.join(", ")))?;
    Ok(lines.join(", "))
}

fn read_column(path: &Path, col: &str) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == col).unwrap();
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect();
            (f[1], f[i])
        })
        .collect()
}

fn gap_ordering() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut means = Vec::new();
    for fig in ["2b", "2c", "2a"] {
        let st = Command::new(env!("CARGO_BIN_EXE_hifbe"))
            .args(["repro", "--figure", fig, "--outdir"])
            .arg(dir.path())
            .status()
            .unwrap();
        ensure(st.success(), format!("repro {fig} exited with {st}"))?;
        let rows = read_column(&dir.path().join(format!("fig{fig}.csv")), "envelope");
        ensure(rows.iter().all(|r| r.1.is_finite()), format!("undefined envelope in {fig}"))?;
        means.push(rows.iter().map(|(phi, e)| phi - e).sum::<f64>() / rows.len() as f64);
    }
    ensure(means[0] < means[1] && means[1] < means[2], format!("mean gaps {means:?}"))?;
    Ok(format!("mean gap gamma=0.2: {:.5}, gamma=1: {:.5}, gamma=2: {:.5}", means[0], means[1], means[2]))
}

fn fixed_point() -> Outcome {
    let pq = problem_catalog_get("power-q").unwrap();
    let m = estimate_calm_constant(&pq, 0.0, 1.5, &linspace(-3.0, 3.0, 1201)).unwrap();
    let gamma = fixed_point_gamma(pq.f.l_nu, 1.5, m);
    let cfg = EnvelopeConfig::new(1.5, gamma);
    let ev = envelope(&pq, &[0.0], &cfg).unwrap();
    ensure(ev.hifbs.minimizers == vec![vec![0.0]], format!("T(0) = {:?}", ev.hifbs.minimizers))?;
    let res = norm(&ev.residual);
    ensure(res <= FIXED_POINT_RES_TOL, format!("residual {res:e}"))?;
    let t = hifba_run(&pq, &[0.0], &cfg, MAX_ITERS, FIXED_POINT_RES_TOL).unwrap();
    ensure(t.records.len() == 1 && t.stop_reason == StopReason::ResidualTol, format!("{} iterations", t.records.len()))?;
    Ok(format!("M = {m:e}, gamma = {gamma:.4}, T(0) = {{0}}, one iteration"))
}

fn gradient_formula() -> Outcome {
    let mut rng = seeded(107);
    let problems: Vec<_> = CATALOG_IDS.iter().map(|id| problem_catalog_get(id).unwrap()).collect();
    let mut accepted = 0;
    let mut worst: f64 = 0.0;
    let mut attempts = 0;
    while accepted < GRADIENT_POINTS && attempts < 20 * GRADIENT_POINTS {
        let prob = &problems[attempts % problems.len()];
        attempts += 1;
        let cfg = EnvelopeConfig::new(1.0 + prob.f.nu, 0.2);
        let x: Vec<f64> = (0..prob.dim()).map(|_| rng.gen_range(-2.5..=2.5)).collect();
        let h = 1e-5 * (1.0 + norm(&x));
        if x.iter().any(|c| c.abs() <= 10.0 * h) {
            continue;
        }
        let g = candidate_gradient(prob, &x, &cfg).unwrap();
        if !g.single_valued || !g.certified {
            continue;
        }
        let continuous = (0..x.len()).all(|i| {
            [-h, h].iter().all(|s| {
                let mut xs = x.clone();
                xs[i] += s;
                let ev = envelope(prob, &xs, &cfg).unwrap();
                norm(&sub(&ev.hifbs.representative, &g.y)) <= 1e-3
            })
        });
        if !continuous {
            continue;
        }
        let fd = fd_gradient(prob, &x, &cfg, Some(h)).unwrap();
        let err = norm(&sub(&fd, &g.v));
        let bound = (FD_TOL * (1.0 + norm(&g.v))).max(FD_TOL);
        ensure(err <= bound, format!("{} at {x:?}: |candidate - fd| = {err:e} > {bound:e}", prob.id))?;
        worst = worst.max(err);
        accepted += 1;
    }
    ensure(accepted == GRADIENT_POINTS, format!("only {accepted} admissible points"))?;
    Ok(format!("{accepted} points, max error {worst:e}"))
}

fn holder_modulus() -> Outcome {
    let mut parts = Vec::new();
    for id in ["oscillatory", "power-q"] {
        let prob = problem_catalog_get(id).unwrap();
        let reports = check_envelope_regularity(&prob, &EnvelopeConfig::new(1.5, 0.2), 2.0, HOLDER_PAIRS, 7).unwrap();
        let main = &reports[0];
        ensure(main.status == hifbe::analysis::CheckStatus::Pass, format!("{} is {:?}: {:?}", main.check_id, main.status, main.note))?;
        ensure(main.n_samples >= HOLDER_PAIRS && main.worst_violation == 0.0, format!("{}: {} violations", main.check_id, main.worst_violation))?;
        for r in &reports[1..] {
            ok_report(r)?;
        }
        parts.push(format!(
            "{id}: tau = {:.4}, modulus = {:.4}",
            main.constants_used["tau"], main.constants_used["holder_modulus"]
        ));
    }
    Ok(format!("{} ({HOLDER_PAIRS} pairs each, fitted exponent checks pass)", parts.join("; ")))
}

fn tau_containment() -> Outcome {
    let mut parts = Vec::new();
    for id in ["oscillatory", "power-q"] {
        let prob = problem_catalog_get(id).unwrap();
        let gamma = 0.2;
        let gamma_hat = 2.0 * 4f64.powf(0.5) * gamma;
        let r = check_tau_containment(&prob, &EnvelopeConfig::new(1.5, gamma), 2.0, gamma_hat, TAU_EVALS, 7).unwrap();
        ensure(r.status == hifbe::analysis::CheckStatus::Pass && r.n_samples >= TAU_EVALS, format!("{}: {:?} {:?}", r.check_id, r.status, r.note))?;
        ok_report(&r)?;
        parts.push(format!("{id}: tau = {:.4}", r.constants_used["tau"]));
    }
    Ok(format!("{}, no escapes in {TAU_EVALS} evaluations each", parts.join("; ")))
}

fn descent_runs() -> Vec<HifbaTrace> {
    let o = problem_catalog_get("oscillatory").unwrap();
    let cfg = EnvelopeConfig::new(1.5, 0.2);
    let mut rng = seeded(110);
    (0..10)
        .map(|_| hifba_run(&o, &[rng.gen_range(-3.0..=3.0)], &cfg, MAX_ITERS, TERMINAL_RES_TOL).unwrap())
        .collect()
}

fn descent(traces: &[HifbaTrace]) -> Outcome {
    let mut iters = 0;
    for t in traces {
        for w in t.records.windows(2) {
            ensure(w[1].phi <= w[0].phi + DESCENT_SLACK, format!("phi rises at x = {:?}", w[1].x))?;
        }
        ensure(t.final_residual() <= TERMINAL_RES_TOL, format!("terminal residual {:e}", t.final_residual()))?;
        iters = iters.max(t.records.len());
    }
    Ok(format!("10 runs, at most {iters} iterations"))
}

fn scaled_gradient(traces: &[HifbaTrace]) -> Outcome {
    let o = problem_catalog_get("oscillatory").unwrap();
    let cfg = EnvelopeConfig::new(1.5, 0.2);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for t in traces {
        for rec in &t.records {
            if let ScaledCheck::Checked(v) = scaled_gradient_check(&o, rec, &cfg).unwrap() {
                checked += 1;
                worst = worst.max(v);
            }
        }
    }
    ensure(checked > 0, "no differentiable trace points")?;
    ensure(worst <= SCALED_GRADIENT_TOL, format!("max residual {worst:e}"))?;
    Ok(format!("{checked} trace points, max residual {worst:e}"))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hifbe"))
            .args(["check", "--suite", "all", "--seed", "7"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    ensure(!a.stdout.is_empty(), "empty output")?;
    serde_json::from_slice::<serde_json::Value>(&a.stdout).map_err(|e| format!("invalid JSON: {e}"))?;
    ensure(a.stdout == b.stdout, "outputs differ")?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn run(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = std::time::Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match &out {
        Ok(d) => println!("criterion {n:>2} PASS {name}: {d} [{secs:.1}s]"),
        Err(d) => println!("criterion {n:>2} FAIL {name}: {d} [{secs:.1}s]"),
    }
    out.is_ok()
}

fn main() {
    std::panic::set_hook(Box::new(|_| {}));
    let traces = descent_runs();
    let results = [
        run(1, "closed-form envelope", closed_form_envelope),
        run(2, "p = 2 prox identity", prox_identity),
        run(3, "envelope bound, monotonicity, infimum", envelope_relations),
        run(4, "majorant figure", majorant_figure),
        run(5, "envelope gap ordering", gap_ordering),
        run(6, "calm fixed point", fixed_point),
        run(7, "gradient formula", gradient_formula),
        run(8, "envelope Hölder modulus", holder_modulus),
        run(9, "bounded splitting map", tau_containment),
        run(10, "descent", || descent(&traces)),
        run(11, "scaled-gradient identity", || scaled_gradient(&traces)),
        run(12, "determinism", determinism),
    ];
    let failed = results.iter().filter(|r| !**r).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
