//! Lower bound of the shifted model and the radius `τ` containing HiFBS.

use rand::Rng;
use rayon::prelude::*;

use super::linspace;
use super::report::{CheckReport, Worst};
use crate::envelope::hifbs;
use crate::error::{Error, Result};
use crate::golden::golden_section;
use crate::inner::EnvelopeConfig;
use crate::oracle::CompositeProblem;
use crate::rng::{derive_seed, seeded};

const INNER_GRID: usize = 2001;
const MAX_DOUBLINGS: usize = 30;

/// `c₀ = 2^{p-1} / (p γ̂)`.
pub fn c0(p: f64, gamma_hat: f64) -> f64 {
    2f64.powf(p - 1.0) / (p * gamma_hat)
}

/// Lower bound `c₁` of `ℓ(x, y) + c₀|y|^p` over `|x| <= r` and all `y`, with
/// a 1% safety margin. One-dimensional problems only.
pub fn lower_bound_constant(problem: &CompositeProblem, p: f64, r: f64, gamma_hat: f64, grid_points: usize) -> Result<f64> {
    if problem.dim() != 1 {
        return Err(Error::Capability("lower_bound_constant is certified for dim = 1 only".into()));
    }
    if !(p > 1.0) || !(r > 0.0) || !(gamma_hat > 0.0) || grid_points < 2 {
        return Err(Error::InvalidConfig(format!(
            "need p > 1, r > 0, gamma_hat > 0, grid_points >= 2; got p = {p}, r = {r}, gamma_hat = {gamma_hat}, grid_points = {grid_points}"
        )));
    }
    if let Some(hint) = problem.g.prox_bound_hint {
        if gamma_hat >= hint {
            return Err(Error::InvalidConfig(format!("gamma_hat = {gamma_hat} is not below the prox-bound threshold {hint}")));
        }
    }
    let c0 = c0(p, gamma_hat);
    let xs = linspace(-r, r, grid_points);
    let mins: Vec<Result<f64>> = xs.par_iter().map(|&x| inner_min(problem, x, p, c0, r)).collect();
    let mut m = f64::INFINITY;
    for v in mins {
        m = m.min(v?);
    }
    Ok(m - 0.01 * m.abs())
}

fn inner_min(problem: &CompositeProblem, x: f64, p: f64, c0: f64, r: f64) -> Result<f64> {
    let fx = problem.f.eval(&[x])?;
    let ax = problem.f.grad(&[x])?[0];
    let h = |y: f64| -> f64 {
        match problem.g.eval(&[y]) {
            Ok(gy) => gy.add_f64(fx + ax * (y - x) + c0 * y.abs().powf(p)).to_f64(),
            Err(_) => f64::INFINITY,
        }
    };
    let mut half = 4.0 * r.max(1.0);
    let floor = -1e10;
    for _ in 0..=MAX_DOUBLINGS {
        let ys = linspace(-half, half, INNER_GRID);
        let vals: Vec<f64> = ys.iter().map(|&y| h(y)).collect();
        let (i, &v) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty grid");
        if v < floor {
            return Err(Error::ProxBoundViolation(format!(
                "l(x, y) + c0|y|^p reaches {v} at x = {x}, y = {}",
                ys[i]
            )));
        }
        if i != 0 && i != INNER_GRID - 1 {
            let (_, gv, _) = golden_section(h, ys[i - 1], ys[i + 1], 1e-12, 200);
            return Ok(v.min(gv));
        }
        half *= 2.0;
    }
    Err(Error::ProxBoundViolation(format!(
        "minimum of l(x, y) + c0|y|^p keeps moving outwards at x = {x}"
    )))
}

/// `τ = ( ((3γL + 2) r^p + pγ(φ(0) - c₁)) / (2^{1-p} - c₀ p γ) )^{1/p}`.
pub fn tau_bound(r: f64, gamma: f64, gamma_hat: f64, l_nu: f64, p: f64, phi_bar: f64, c1: f64) -> Result<f64> {
    let denom = 2f64.powf(1.0 - p) - c0(p, gamma_hat) * p * gamma;
    if !(denom > 0.0) {
        return Err(Error::GammaTooLarge {
            gamma,
            limit: 4f64.powf(1.0 - p) * gamma_hat,
        });
    }
    let num = (3.0 * gamma * l_nu + 2.0) * r.powf(p) + p * gamma * (phi_bar - c1);
    Ok((num / denom).powf(1.0 / p))
}

/// `(τ(γ), τ̂)` where `τ̂ = τ(γ_max)` bounds `τ(γ)` for all `γ <= γ_max`.
#[allow(clippy::too_many_arguments)]
pub fn tau_bounds(
    r: f64,
    gamma: f64,
    gamma_max: f64,
    gamma_hat: f64,
    l_nu: f64,
    p: f64,
    phi_bar: f64,
    c1: f64,
) -> Result<(f64, f64)> {
    if gamma > gamma_max {
        return Err(Error::InvalidConfig(format!("gamma = {gamma} exceeds gamma_max = {gamma_max}")));
    }
    Ok((
        tau_bound(r, gamma, gamma_hat, l_nu, p, phi_bar, c1)?,
        tau_bound(r, gamma_max, gamma_hat, l_nu, p, phi_bar, c1)?,
    ))
}

/// `min{γ_max, κ_p (r + τ̂)^{p-2} / L}` with `L` a bound on `‖∇²f‖` over the ball.
pub fn differentiability_threshold(kappa: f64, r: f64, tau_hat: f64, hess_bound: f64, p: f64, gamma_max: f64) -> f64 {
    if hess_bound <= 0.0 {
        return gamma_max;
    }
    gamma_max.min(kappa * (r + tau_hat).powf(p - 2.0) / hess_bound)
}

/// Samples anchors in `[-r, r]` and checks that every HiFBS point lies in
/// `[-τ, τ]`, with `τ` from [`tau_bound`] at `γ̂` and `c₁` from
/// [`lower_bound_constant`].
pub fn check_tau_containment(
    problem: &CompositeProblem,
    cfg: &EnvelopeConfig,
    r: f64,
    gamma_hat: f64,
    n_samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let id = format!("tau-containment/{}", problem.id);
    let s = derive_seed(seed, &id);
    let report = CheckReport::new(&id, s)
        .constant("r", r)
        .constant("gamma", cfg.gamma)
        .constant("gamma_hat", gamma_hat)
        .constant("p", cfg.p)
        .constant("L_nu", problem.f.l_nu);
    let limit = 4f64.powf(1.0 - cfg.p) * gamma_hat;
    if cfg.gamma >= limit {
        return Ok(report
            .constant("gamma_limit", limit)
            .skipped(format!("gamma = {} violates gamma < 4^(1-p) gamma_hat = {limit}", cfg.gamma)));
    }
    let c1 = lower_bound_constant(problem, cfg.p, r, gamma_hat, 201)?;
    let phi0 = problem
        .value(&[0.0])?
        .finite()
        .ok_or_else(|| Error::Dependency("phi(0) is infinite; tau needs phi(0)".into()))?;
    let tau = tau_bound(r, cfg.gamma, gamma_hat, problem.f.l_nu, cfg.p, phi0, c1)?;
    let mut rng = seeded(s);
    let xs: Vec<f64> = (0..n_samples).map(|_| rng.gen_range(-r..=r)).collect();
    let results: Vec<Result<Worst>> = xs
        .par_iter()
        .map(|&x| {
            let sol = hifbs(problem, &[x], cfg)?;
            let mut w = Worst::default();
            for y in &sol.minimizers {
                w.observe((y[0].abs() - tau).max(0.0), || vec![x, y[0]]);
            }
            Ok(w)
        })
        .collect();
    let mut worst = Worst::default();
    for w in results {
        worst.merge(w?);
    }
    Ok(worst
        .apply(report.constant("c1", c1).constant("tau", tau).constant("phi_bar", phi0))
        .conclude(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::problem_catalog_get;
    use crate::ext::ExtReal;
    use crate::oracle::{NonsmoothKind, NonsmoothOracle};
    use std::sync::Arc;

    #[test]
    fn tau_reference_value() {
        let t = tau_bound(1.0, 0.1, 1.0, 1.0, 2.0, 0.0, 0.0).unwrap();
        assert!((t - (2.3f64 / 0.3).sqrt()).abs() < 1e-12);
        assert!((t - 2.769).abs() < 1e-3);
    }

    #[test]
    fn tau_blows_up_at_the_limit() {
        let (p, gh) = (1.5, 1.0);
        let limit = 4f64.powf(1.0 - p) * gh;
        let mut prev = 0.0;
        for k in 1..8 {
            let g = limit * (1.0 - 10f64.powi(-k));
            let t = tau_bound(1.0, g, gh, 1.0, p, 0.0, 0.0).unwrap();
            assert!(t > prev);
            prev = t;
        }
        assert!(prev > 100.0);
        assert!(matches!(tau_bound(1.0, limit, gh, 1.0, p, 0.0, 0.0), Err(Error::GammaTooLarge { .. })));
    }

    #[test]
    fn tau_hat_dominates() {
        let (t, th) = tau_bounds(1.0, 0.1, 0.2, 1.0, 1.0, 2.0, 0.5, -1.0).unwrap();
        assert!(th >= t);
    }

    #[test]
    fn lower_bound_on_zero_problem() {
        let z = problem_catalog_get("zero").unwrap();
        assert_eq!(lower_bound_constant(&z, 1.5, 1.0, 1.0, 51).unwrap(), 0.0);
    }

    #[test]
    fn lower_bound_on_power_q_matches_direct_minimum() {
        // min_y a(y - x) + c0|y|^p is attained in closed form; x ranges over [-1, 1]
        let pq = problem_catalog_get("power-q").unwrap();
        let (p, gh) = (1.5, 1.0);
        let c1 = lower_bound_constant(&pq, p, 1.0, gh, 201).unwrap();
        let c0v = c0(p, gh);
        let mut oracle = f64::INFINITY;
        for x in linspace(-1.0, 1.0, 2001) {
            let a = x.signum() * x.abs().sqrt();
            let f = 2.0 / 3.0 * x.abs().powf(1.5);
            // minimizer of a y + c0|y|^p: y = -sgn(a) (|a|/(p c0))^{1/(p-1)}
            let y = -a.signum() * (a.abs() / (p * c0v)).powf(1.0 / (p - 1.0));
            oracle = oracle.min(f + a * (y - x) + c0v * y.abs().powf(p));
        }
        assert!(c1 <= oracle + 1e-9);
        assert!(c1 >= oracle - 0.011 * oracle.abs() - 1e-6, "{c1} vs {oracle}");
    }

    #[test]
    fn concave_g_is_rejected() {
        let mut z = problem_catalog_get("zero").unwrap();
        z.g = NonsmoothOracle {
            value: Arc::new(|y| ExtReal::Finite(-y[0] * y[0])),
            kind: NonsmoothKind::General,
            analytic_prox: None,
            subdiff_1d: None,
            prox_bound_hint: None,
            ..NonsmoothOracle::zero(1)
        };
        let err = lower_bound_constant(&z, 1.5, 1.0, 1.0, 11).unwrap_err();
        assert!(matches!(err, Error::ProxBoundViolation(_)), "{err:?}");
    }

    #[test]
    fn containment_on_oscillatory() {
        let o = problem_catalog_get("oscillatory").unwrap();
        let cfg = EnvelopeConfig::new(1.5, 0.2);
        let r = check_tau_containment(&o, &cfg, 2.0, 0.9, 50, 1).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
