//! Closed-form subproblem solvers.

use crate::error::{Error, Result};
use crate::linalg::{norm, scale, sub};
use crate::oracle::{CompositeProblem, NonsmoothKind, ProxFn};

/// `sgn(u) * max(|u| - t, 0)`.
pub fn soft_threshold(u: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    u.signum() * (u.abs() - t).max(0.0)
}

/// Minimizer of `<a, y - x> + ‖x - y‖^p / (pγ)`, i.e.
/// `y = x - γ^{1/(p-1)} ‖a‖^{(2-p)/(p-1)} a` (and `y = x` when `a = 0`).
pub fn linear_power_step(x: &[f64], a: &[f64], gamma: f64, p: f64) -> Vec<f64> {
    let na = norm(a);
    if na == 0.0 {
        return x.to_vec();
    }
    let s = gamma.powf(1.0 / (p - 1.0)) * na.powf((2.0 - p) / (p - 1.0));
    sub(x, &scale(a, s))
}

/// A solver that maps an anchor to the exact HiFBS set.
#[derive(Clone)]
pub enum AnalyticSolver {
    /// `g ≡ 0`, any order.
    ClosedForm,
    /// `g` the indicator of `[lo, hi]` in one dimension, any order.
    IntervalClamp { lo: f64, hi: f64 },
    /// `p = 2`: `prox_g(x - γ∇f(x))`.
    ForwardBackward(ProxFn),
}

impl std::fmt::Debug for AnalyticSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalyticSolver::ClosedForm => write!(f, "ClosedForm"),
            AnalyticSolver::IntervalClamp { lo, hi } => write!(f, "IntervalClamp[{lo}, {hi}]"),
            AnalyticSolver::ForwardBackward(_) => write!(f, "ForwardBackward"),
        }
    }
}

impl AnalyticSolver {
    pub fn name(&self) -> &'static str {
        match self {
            AnalyticSolver::ClosedForm => "closed-form",
            AnalyticSolver::IntervalClamp { .. } => "interval-clamp",
            AnalyticSolver::ForwardBackward(_) => "forward-backward",
        }
    }

    /// Candidate minimizers at `x` given `a = ∇f(x)`.
    pub fn solve(&self, x: &[f64], a: &[f64], gamma: f64, p: f64) -> Result<Vec<Vec<f64>>> {
        let out = match self {
            AnalyticSolver::ClosedForm => vec![linear_power_step(x, a, gamma, p)],
            AnalyticSolver::IntervalClamp { lo, hi } => {
                let y = linear_power_step(x, a, gamma, p);
                vec![vec![y[0].clamp(*lo, *hi)]]
            }
            AnalyticSolver::ForwardBackward(prox) => {
                let u: Vec<f64> = x.iter().zip(a).map(|(xi, ai)| xi - gamma * ai).collect();
                prox(&u, gamma, 2.0)
            }
        };
        if out.is_empty() || out.iter().any(|y| y.len() != x.len() || y.iter().any(|v| !v.is_finite())) {
            return Err(Error::OracleFault(format!("analytic solver {} returned {out:?}", self.name())));
        }
        Ok(out)
    }
}

/// Picks a closed-form solver for `problem` at order `p`, if one applies.
///
/// General `g` with `p ≠ 2` gets none: the prox composition does not carry
/// over to other orders.
pub fn prox_registry_lookup(problem: &CompositeProblem, p: f64) -> Option<AnalyticSolver> {
    match problem.g.kind {
        NonsmoothKind::Zero => Some(AnalyticSolver::ClosedForm),
        NonsmoothKind::Interval { lo, hi } if problem.dim() == 1 => Some(AnalyticSolver::IntervalClamp { lo, hi }),
        _ => match (&problem.g.analytic_prox, p == 2.0) {
            (Some(prox), true) => Some(AnalyticSolver::ForwardBackward(prox.clone())),
            _ => None,
        },
    }
}
