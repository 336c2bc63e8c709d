//! Hölder regularity of the envelope, of HiFBS and of the envelope gradient.

use rand::Rng;
use rayon::prelude::*;

use super::bounds::{lower_bound_constant, tau_bound};
use super::calm::{check_p_calm, estimate_calm_constant};
use super::linspace;
use super::report::{CheckReport, Worst};
use crate::envelope::{candidate_gradient, hifbe};
use crate::error::{Error, Result};
use crate::inner::EnvelopeConfig;
use crate::oracle::CompositeProblem;
use crate::rng::{derive_seed, seeded};

/// Multiplier applied to fitted constants before fine-scale validation.
pub const FIT_SAFETY: f64 = 2.0;
/// Half-width of the neighbourhood of the calm point used by the fits.
pub const FIT_RADIUS: f64 = 0.25;

/// `η = (ν/2) min{μ, ν}`.
pub fn weak_smoothness_exponent(nu: f64, mu_hess: f64) -> f64 {
    0.5 * nu * mu_hess.min(nu)
}

/// `L_ν(3r + τ) + (2r)^{p-ν}/(pγ) + (3r + τ)^{p-1}(2r)^{1-ν}/γ`.
pub fn envelope_holder_modulus(l_nu: f64, r: f64, tau: f64, p: f64, gamma: f64, nu: f64) -> f64 {
    let s = 3.0 * r + tau;
    l_nu * s + (2.0 * r).powf(p - nu) / (p * gamma) + s.powf(p - 1.0) * (2.0 * r).powf(1.0 - nu) / gamma
}

/// Runs the three regularity checks on a one-dimensional problem:
///
/// 1. `|φ_γ(z) - φ_γ(x)| <= 𝓛_ν |z - x|^ν` on `n_pairs` pairs in `[-r, r]`;
/// 2. `|T(x₁) - T(x₂)| <= C |x₁ - x₂|^{ν/2}` near the calm point, `C` fitted;
/// 3. `|∇φ_γ(x₁) - ∇φ_γ(x₂)| <= C' |x₁ - x₂|^η` near the calm point, `C'` fitted.
///
/// The fitted constants are `2 ×` the largest quotient over coarse pairs and
/// are then checked on pairs a thousand times closer.
pub fn check_envelope_regularity(
    problem: &CompositeProblem,
    cfg: &EnvelopeConfig,
    r: f64,
    n_pairs: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    if problem.dim() != 1 {
        return Err(Error::Capability("regularity checks run in one dimension".into()));
    }
    let nu = problem.f.nu;
    Ok(vec![
        envelope_holder(problem, cfg, r, n_pairs, seed)?,
        fitted(problem, cfg, n_pairs, seed, Fit::Hifbs { exponent: nu / 2.0 })?,
        fitted(
            problem,
            cfg,
            n_pairs,
            seed,
            Fit::Gradient {
                exponent: weak_smoothness_exponent(nu, problem.f.mu.unwrap_or(1.0)),
            },
        )?,
    ])
}

fn envelope_holder(problem: &CompositeProblem, cfg: &EnvelopeConfig, r: f64, n_pairs: usize, seed: u64) -> Result<CheckReport> {
    let id = format!("regularity/envelope-holder/{}", problem.id);
    let s = derive_seed(seed, &id);
    let (p, gamma, nu, l) = (cfg.p, cfg.gamma, problem.f.nu, problem.f.l_nu);
    let report = CheckReport::new(&id, s)
        .constant("p", p)
        .constant("gamma", gamma)
        .constant("nu", nu)
        .constant("L_nu", l)
        .constant("r", r);
    if (p - (1.0 + nu)).abs() > 1e-12 {
        return Ok(report.skipped(format!("p = {p} differs from 1 + nu = {}", 1.0 + nu)));
    }
    if gamma * l >= 1.0 {
        return Ok(report.skipped(format!("gamma = {gamma} is not below 1/L_nu = {}", 1.0 / l)));
    }
    let mut gamma_hat = 2.0 * 4f64.powf(p - 1.0) * gamma;
    if let Some(hint) = problem.g.prox_bound_hint {
        if gamma_hat >= hint {
            gamma_hat = 0.5 * (hint + 4f64.powf(p - 1.0) * gamma);
        }
    }
    let c1 = lower_bound_constant(problem, p, r, gamma_hat, 201)?;
    let phi0 = problem
        .value(&[0.0])?
        .finite()
        .ok_or_else(|| Error::Dependency("phi(0) is infinite; tau needs phi(0)".into()))?;
    let tau = tau_bound(r, gamma, gamma_hat, l, p, phi0, c1)?;
    let modulus = envelope_holder_modulus(l, r, tau, p, gamma, nu);

    let mut rng = seeded(s);
    let pairs: Vec<(f64, f64)> = (0..n_pairs).map(|_| (rng.gen_range(-r..=r), rng.gen_range(-r..=r))).collect();
    let results: Vec<Result<Worst>> = pairs
        .par_iter()
        .map(|&(x, z)| {
            let mut w = Worst::default();
            if x == z {
                return Ok(w);
            }
            let ex = hifbe(problem, &[x], cfg)?.value;
            let ez = hifbe(problem, &[z], cfg)?.value;
            let v = (ez - ex).abs() - modulus * (z - x).abs().powf(nu);
            w.observe(v.max(0.0), || vec![x, z]);
            Ok(w)
        })
        .collect();
    let mut worst = Worst::default();
    for w in results {
        worst.merge(w?);
    }
    let report = report
        .constant("gamma_hat", gamma_hat)
        .constant("c1", c1)
        .constant("tau", tau)
        .constant("phi_bar", phi0)
        .constant("holder_modulus", modulus);
    Ok(worst.apply(report).conclude(0.0))
}

enum Fit {
    Hifbs { exponent: f64 },
    Gradient { exponent: f64 },
}

fn fitted(problem: &CompositeProblem, cfg: &EnvelopeConfig, n_pairs: usize, seed: u64, fit: Fit) -> Result<CheckReport> {
    let (name, exponent) = match fit {
        Fit::Hifbs { exponent } => ("hifbs-holder", exponent),
        Fit::Gradient { exponent } => ("gradient-holder", exponent),
    };
    let id = format!("regularity/{name}/{}", problem.id);
    let s = derive_seed(seed, &id);
    let report = CheckReport::new(&id, s)
        .constant("exponent", exponent)
        .constant("p", cfg.p)
        .constant("gamma", cfg.gamma)
        .constant("neighbourhood_radius", FIT_RADIUS);
    if matches!(fit, Fit::Gradient { .. }) && problem.f.hessian.is_none() {
        return Ok(report.skipped("f has no Hessian"));
    }
    let xbar = match &problem.known_minimizer {
        Some((x, _)) => x[0],
        None => return Err(Error::Dependency("regularity fits need a known calm point".into())),
    };
    let grid = linspace(xbar - 3.0, xbar + 3.0, 1201);
    let m = estimate_calm_constant(problem, xbar, cfg.p, &grid)?;
    let calm = check_p_calm(problem, xbar, m, cfg.p, &grid, cfg)?;
    let report = report.constant("x_bar", xbar).constant("M", m);
    if !calm.passed {
        return Ok(report.skipped(format!("x_bar = {xbar} is not verified p-calm")));
    }

    let eval = |x: f64| -> Result<f64> {
        match fit {
            Fit::Hifbs { .. } => Ok(hifbe(problem, &[x], cfg)?.hifbs.representative[0]),
            Fit::Gradient { .. } => Ok(candidate_gradient(problem, &[x], cfg)?.v[0]),
        }
    };
    let quotient = |a: f64, b: f64| -> Result<Option<f64>> {
        if a == b {
            return Ok(None);
        }
        Ok(Some((eval(a)? - eval(b)?).abs() / (a - b).abs().powf(exponent)))
    };

    let (lo, hi) = (xbar - FIT_RADIUS, xbar + FIT_RADIUS);
    let mut rng = seeded(s);
    let half = (n_pairs / 2).max(1);
    let coarse: Vec<(f64, f64)> = (0..half).map(|_| (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi))).collect();
    let delta = 1e-3 * FIT_RADIUS;
    let fine: Vec<(f64, f64)> = (0..half)
        .map(|_| {
            let a = rng.gen_range(lo..=hi);
            (a, (a + delta * rng.gen_range(-1.0..=1.0)).clamp(lo, hi))
        })
        .collect();

    let coarse_q: Vec<Result<Option<f64>>> = coarse.par_iter().map(|&(a, b)| quotient(a, b)).collect();
    let mut fit_max: f64 = 0.0;
    for q in coarse_q {
        if let Some(q) = q? {
            fit_max = fit_max.max(q);
        }
    }
    let constant = FIT_SAFETY * fit_max;
    let fine_q: Vec<Result<Worst>> = fine
        .par_iter()
        .map(|&(a, b)| {
            let mut w = Worst::default();
            if let Some(q) = quotient(a, b)? {
                w.observe((q - constant).max(0.0), || vec![a, b]);
            }
            Ok(w)
        })
        .collect();
    let mut worst = Worst::default();
    for w in fine_q {
        worst.merge(w?);
    }
    let mut report = worst.apply(report.constant("fitted_constant", constant));
    report.n_samples += half;
    Ok(report.conclude(0.0))
}
