//! `p`-calm points: `φ(x) + M‖x - x̄‖^p > φ(x̄)` for all `x ≠ x̄`.

use super::report::{CheckReport, Worst};
use crate::envelope::hifbs;
use crate::error::{Error, Result};
use crate::inner::EnvelopeConfig;
use crate::oracle::CompositeProblem;

/// Margin below which the strict inequality counts as violated.
pub const STRICT_FLOOR: f64 = 1e-12;
pub const CALM_SAFETY: f64 = 1.05;
pub const CALM_FLOOR: f64 = 1e-6;

/// `min{1/(2L_ν), 1/(2pM)}`, below which a calm point is a fixed point of HiFBS.
pub fn fixed_point_gamma(l_nu: f64, p: f64, m: f64) -> f64 {
    (1.0 / (2.0 * l_nu)).min(1.0 / (2.0 * p * m))
}

fn phi_at(problem: &CompositeProblem, x: f64) -> Result<f64> {
    Ok(problem.value(&[x])?.to_f64())
}

fn require_1d(problem: &CompositeProblem) -> Result<()> {
    if problem.dim() != 1 {
        return Err(Error::Capability("calmness checks run on one-dimensional grids".into()));
    }
    Ok(())
}

/// `1.05 max_x (φ(x̄) - φ(x)) / |x - x̄|^p` over the grid, floored at `1e-6`.
pub fn estimate_calm_constant(problem: &CompositeProblem, xbar: f64, p: f64, grid: &[f64]) -> Result<f64> {
    require_1d(problem)?;
    let phibar = problem.value(&[xbar])?.finite().ok_or_else(|| Error::Domain(vec![xbar]))?;
    let mut worst: f64 = 0.0;
    for &x in grid {
        let d = (x - xbar).abs();
        if d == 0.0 {
            continue;
        }
        let q = (phibar - phi_at(problem, x)?) / d.powf(p);
        worst = worst.max(q);
    }
    Ok((CALM_SAFETY * worst).max(CALM_FLOOR))
}

/// Verifies the calm inequality with constant `m` on `grid` (excluding
/// `x̄`), then that `T(x̄) = {x̄}` at `γ = min{1/(2L_ν), 1/(2pM)}`.
pub fn check_p_calm(
    problem: &CompositeProblem,
    xbar: f64,
    m: f64,
    p: f64,
    grid: &[f64],
    base: &EnvelopeConfig,
) -> Result<CheckReport> {
    require_1d(problem)?;
    let phibar = problem.value(&[xbar])?.finite().ok_or_else(|| Error::Domain(vec![xbar]))?;
    let gamma = fixed_point_gamma(problem.f.l_nu, p, m);
    let report = CheckReport::new(format!("p-calm/{}", problem.id), 0)
        .constant("M", m)
        .constant("p", p)
        .constant("x_bar", xbar)
        .constant("L_nu", problem.f.l_nu)
        .constant("gamma_fixed_point", gamma)
        .constant("strict_floor", STRICT_FLOOR);
    let mut worst = Worst::default();
    for &x in grid {
        let d = (x - xbar).abs();
        if d == 0.0 {
            continue;
        }
        let margin = phi_at(problem, x)? + m * d.powf(p) - phibar;
        worst.observe((STRICT_FLOOR - margin).max(0.0), || vec![x]);
    }
    let cfg = EnvelopeConfig { p, gamma, ..base.clone() };
    let sol = hifbs(problem, &[xbar], &cfg)?;
    let off = sol
        .minimizers
        .iter()
        .map(|y| (y[0] - xbar).abs())
        .fold(0.0, f64::max);
    let fixed_violation = if sol.minimizers.len() == 1 { (off - 10.0 * cfg.tol_y).max(0.0) } else { off.max(cfg.tol_tie) };
    worst.observe(fixed_violation, || vec![xbar]);
    let mut r = worst.apply(report.constant("fixed_point_offset", off));
    r.set_constant("hifbs_size", sol.minimizers.len() as f64);
    Ok(r.conclude(0.0))
}
