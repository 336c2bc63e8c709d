//! Optimality inclusion of the HiFBS subproblem in one dimension:
//! `(1/γ)|x - ȳ|^{p-2}(x - ȳ) - f'(x) ∈ ∂g(ȳ)`.

use super::report::{CheckReport, Worst};
use crate::envelope::hifbs;
use crate::error::{Error, Result};
use crate::inner::EnvelopeConfig;
use crate::oracle::CompositeProblem;

pub const INCLUSION_TOL: f64 = 1e-6;

/// Hull of `∂g` over `{ȳ - δ, ȳ, ȳ + δ}`; a solver-accuracy enlargement of
/// the subdifferential at kinks.
fn enlarged_subdiff(problem: &CompositeProblem, y: f64, delta: f64) -> Result<(f64, f64)> {
    let sd = problem
        .g
        .subdiff_1d
        .as_ref()
        .ok_or_else(|| Error::Capability("g has no one-dimensional subdifferential".into()))?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in [y - delta, y, y + delta] {
        let (a, b) = sd(t);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    Ok((lo, hi))
}

fn distance_to(v: f64, (lo, hi): (f64, f64)) -> f64 {
    (lo - INCLUSION_TOL - v).max(v - hi - INCLUSION_TOL).max(0.0)
}

/// Checks the inclusion for every `ȳ ∈ T(x)`; at a fixed point `T(x) = {x}`
/// this is `-f'(x) ∈ ∂g(x)`.
pub fn check_stationarity_inclusion(problem: &CompositeProblem, x: f64, cfg: &EnvelopeConfig) -> Result<CheckReport> {
    if problem.dim() != 1 {
        return Err(Error::Capability("stationarity inclusion is checked in one dimension".into()));
    }
    if problem.g.subdiff_1d.is_none() {
        return Err(Error::Capability("g has no one-dimensional subdifferential".into()));
    }
    let sol = hifbs(problem, &[x], cfg)?;
    let a = problem.f.grad(&[x])?[0];
    let delta = 10.0 * cfg.tol_y;
    let mut worst = Worst::default();
    for y in &sol.minimizers {
        let d = x - y[0];
        let s = if d == 0.0 { 0.0 } else { d.abs().powf(cfg.p - 2.0) * d / cfg.gamma } - a;
        let iv = enlarged_subdiff(problem, y[0], delta)?;
        worst.observe(distance_to(s, iv), || vec![x, y[0], s]);
    }
    let fixed = sol.minimizers.len() == 1 && (sol.representative[0] - x).abs() <= 10.0 * cfg.tol_y;
    if fixed {
        let iv = enlarged_subdiff(problem, x, delta)?;
        worst.observe(distance_to(-a, iv), || vec![x, x, -a]);
    }
    let report = CheckReport::new(format!("stationarity/{}", problem.id), 0)
        .constant("x", x)
        .constant("p", cfg.p)
        .constant("gamma", cfg.gamma)
        .constant("fixed_point", if fixed { 1.0 } else { 0.0 });
    Ok(worst.apply(report).conclude(0.0))
}
