//! Uniform shrinkage of HiFBS near a calm point: for `x` close to `x̄ = 0`
//! and `y ∈ T(x)`, `‖y‖`, `g(y) - g(0)` and `‖x - y‖^{p-1}/γ + ‖∇f(x) - ∇f(0)‖`
//! all drop below `ε`.

use rand::Rng;

use super::calm::{check_p_calm, estimate_calm_constant};
use super::linspace;
use super::report::{CheckReport, CheckStatus};
use crate::envelope::hifbs;
use crate::error::{Error, Result};
use crate::inner::EnvelopeConfig;
use crate::linalg::norm;
use crate::oracle::CompositeProblem;
use crate::rng::{derive_seed, seeded};

const BISECTION_STEPS: usize = 20;

/// The three quantities at `x`, maximized over `T(x)`.
fn quantities(problem: &CompositeProblem, x: f64, cfg: &EnvelopeConfig, g0: f64, grad0: f64) -> Result<[f64; 3]> {
    let sol = hifbs(problem, &[x], cfg)?;
    let gx = problem.f.grad(&[x])?[0];
    let mut q = [0.0f64; 3];
    for y in &sol.minimizers {
        let gy = problem.g.eval(y)?.to_f64();
        q[0] = q[0].max(norm(y));
        q[1] = q[1].max(gy - g0);
        q[2] = q[2].max((x - y[0]).abs().powf(cfg.p - 1.0) / cfg.gamma + (gx - grad0).abs());
    }
    Ok(q)
}

/// Whether every sampled `x` with `|x| < θ` (plus `x = 0`) satisfies all three
/// bounds; returns the worst quantity and its anchor otherwise.
fn qualifies(problem: &CompositeProblem, cfg: &EnvelopeConfig, theta: f64, eps: f64, n: usize, seed: u64, g0: f64, grad0: f64) -> Result<(bool, f64, f64)> {
    let mut rng = seeded(seed);
    let mut worst = (0.0f64, 0.0f64);
    let xs = std::iter::once(0.0).chain((0..n).map(|_| rng.gen_range(-theta..theta)));
    for x in xs {
        let q = quantities(problem, x, cfg, g0, grad0)?;
        let m = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m > worst.0 {
            worst = (m, x);
        }
    }
    Ok((worst.0 < eps, worst.0, worst.1))
}

/// Shifts the problem so that `x̄ = 0` and `φ(x̄) = 0`, checks calmness,
/// then scans `radii` in increasing order for the largest radius below
/// which all three bounds hold, refining by bisection against the next
/// candidate. No qualifying radius gives an inconclusive report.
#[allow(clippy::too_many_arguments)]
pub fn check_uniform_shrinkage(
    problem: &CompositeProblem,
    cfg: &EnvelopeConfig,
    xbar: f64,
    eps: f64,
    radii: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    if problem.dim() != 1 {
        return Err(Error::Capability("shrinkage check runs in one dimension".into()));
    }
    if !(eps > 0.0) || radii.is_empty() {
        return Err(Error::InvalidConfig("need eps > 0 and at least one radius".into()));
    }
    let shifted = problem.shifted(&[xbar])?;
    let id = format!("uniform-shrinkage/{}", problem.id);
    let s = derive_seed(seed, &id);
    let grid = linspace(-3.0, 3.0, 1201);
    let m = estimate_calm_constant(&shifted, 0.0, cfg.p, &grid)?;
    let calm = check_p_calm(&shifted, 0.0, m, cfg.p, &grid, cfg)?;
    let hint = shifted.g.prox_bound_hint.unwrap_or(f64::INFINITY);
    let gamma_bar = (2f64.powf(-cfg.p) / (m * cfg.p)).min(1.0 / (2.0 * shifted.f.l_nu)).min(hint);
    let report = CheckReport::new(&id, s)
        .constant("eps", eps)
        .constant("x_bar", xbar)
        .constant("M", m)
        .constant("gamma", cfg.gamma)
        .constant("gamma_bar", gamma_bar);
    if !calm.passed {
        return Ok(report.skipped(format!("x_bar = {xbar} is not verified p-calm")));
    }
    if cfg.gamma >= gamma_bar {
        return Ok(report.skipped(format!("gamma = {} is not below gamma_bar = {gamma_bar}", cfg.gamma)));
    }
    let g0 = shifted.g.eval(&[0.0])?.to_f64();
    let grad0 = shifted.f.grad(&[0.0])?[0];

    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut n_total = 0;
    let mut good: Option<f64> = None;
    let mut bad: Option<(f64, f64, f64)> = None;
    for (k, &theta) in sorted.iter().enumerate() {
        let (ok, w, at) = qualifies(&shifted, cfg, theta, eps, n_samples, s.wrapping_add(k as u64), g0, grad0)?;
        n_total += n_samples + 1;
        if ok {
            good = Some(theta);
        } else {
            bad = Some((theta, w, at));
            break;
        }
    }
    let mut report = report;
    let Some(mut lo) = good else {
        let (theta, w, at) = bad.expect("a radius was tried");
        report.status = CheckStatus::Inconclusive;
        report.passed = false;
        report.n_samples = n_total;
        report.worst_violation = w - eps;
        report.witness = Some(vec![at + xbar]);
        report.set_constant("smallest_radius_tried", theta);
        report.note = Some("no candidate radius qualifies".into());
        return Ok(report);
    };
    if let Some((mut hi, _, _)) = bad {
        for k in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let (ok, _, _) = qualifies(&shifted, cfg, mid, eps, n_samples, s.wrapping_add(1000 + k as u64), g0, grad0)?;
            n_total += n_samples + 1;
            if ok {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    report.set_constant("theta", lo);
    report.n_samples = n_total;
    Ok(report.conclude(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::problem_catalog_get;

    fn radii() -> Vec<f64> {
        (0..12).map(|k| 2f64.powi(-k)).rev().collect()
    }

    #[test]
    fn power_q_radius_matches_closed_form() {
        // T(x) = (1 - γ²)x, so the binding quantity is 2|x|^{1/2} and θ = (ε/2)²
        let pq = problem_catalog_get("power-q").unwrap();
        let cfg = EnvelopeConfig::new(1.5, 0.3);
        let r = check_uniform_shrinkage(&pq, &cfg, 0.0, 0.1, &radii(), 64, 1).unwrap();
        assert!(r.passed, "{r:?}");
        let theta = r.constants_used["theta"];
        assert!(theta <= 0.0025 * 1.05 && theta >= 0.0025 * 0.9, "{theta}");
    }

    #[test]
    fn smaller_eps_gives_smaller_radius() {
        let pq = problem_catalog_get("power-q").unwrap();
        let cfg = EnvelopeConfig::new(1.5, 0.3);
        let a = check_uniform_shrinkage(&pq, &cfg, 0.0, 0.1, &radii(), 32, 2).unwrap();
        let b = check_uniform_shrinkage(&pq, &cfg, 0.0, 0.01, &(0..24).map(|k| 2f64.powi(-k)).collect::<Vec<_>>(), 32, 2).unwrap();
        assert!(b.constants_used["theta"] < a.constants_used["theta"]);
    }

    #[test]
    fn anchor_itself_has_zero_quantities() {
        let o = problem_catalog_get("oscillatory").unwrap();
        let q = quantities(&o, 0.0, &EnvelopeConfig::new(1.5, 0.2), 0.0, 0.0).unwrap();
        assert_eq!(q, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn no_candidate_is_inconclusive() {
        let pq = problem_catalog_get("power-q").unwrap();
        let r = check_uniform_shrinkage(&pq, &EnvelopeConfig::new(1.5, 0.3), 0.0, 1e-3, &[0.5, 1.0], 16, 1).unwrap();
        assert_eq!(r.status, CheckStatus::Inconclusive);
    }
}
