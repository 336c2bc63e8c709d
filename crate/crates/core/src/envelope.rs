//! HiFBE values, HiFBS sets, residuals and envelope gradients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::{solve_subproblem, EnvelopeConfig, SubproblemSolution};
use crate::linalg::{axpy, dist, matvec, norm, power_grad, scale, sub};
use crate::oracle::{check_dim, CompositeProblem, NonsmoothOracle, SmoothOracle};
use crate::prox::linear_power_step;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeEval {
    pub value: f64,
    pub hifbs: SubproblemSolution,
    /// `x - representative`.
    pub residual: Vec<f64>,
    pub single_valued: bool,
    pub certified: bool,
}

/// Envelope value and splitting set at `x`.
pub fn hifbe(problem: &CompositeProblem, x: &[f64], cfg: &EnvelopeConfig) -> Result<EnvelopeEval> {
    let sol = hifbs(problem, x, cfg)?;
    Ok(EnvelopeEval {
        value: sol.value,
        residual: sub(x, &sol.representative),
        single_valued: sol.minimizers.len() == 1,
        certified: sol.certified,
        hifbs: sol,
    })
}

/// The HiFBS set at `x`; unboundedness of the subproblem is reported as an
/// undefined envelope.
pub fn hifbs(problem: &CompositeProblem, x: &[f64], cfg: &EnvelopeConfig) -> Result<SubproblemSolution> {
    solve_subproblem(problem, x, cfg).map_err(|e| match e {
        Error::ProxUnbounded { ray, .. } => Error::EnvelopeUndefined { x: x.to_vec(), ray },
        e => e,
    })
}

/// `x - T(x)` for the representative of `T(x)`.
pub fn residual(problem: &CompositeProblem, x: &[f64], cfg: &EnvelopeConfig) -> Result<Vec<f64>> {
    Ok(hifbe(problem, x, cfg)?.residual)
}

/// The gradient formula `∇²f(x)(ȳ - x) + ‖x - ȳ‖^{p-2}(x - ȳ)/γ` with validity
/// flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub v: Vec<f64>,
    /// HiFBS was single-valued; otherwise `v` is only a candidate.
    pub single_valued: bool,
    /// `ȳ` is within `tol_y` of `x`, where `‖x - ȳ‖^{p-2}` is singular for `p < 2`.
    pub at_kink: bool,
    pub certified: bool,
    /// The representative `ȳ` used.
    pub y: Vec<f64>,
}

/// Candidate envelope gradient at `x` from the representative `ȳ ∈ T(x)`.
pub fn candidate_gradient(problem: &CompositeProblem, x: &[f64], cfg: &EnvelopeConfig) -> Result<GradientReport> {
    if problem.f.hessian.is_none() {
        return Err(Error::Capability("candidate gradient needs a Hessian of f".into()));
    }
    let ev = hifbe(problem, x, cfg)?;
    let y = ev.hifbs.representative.clone();
    let v = gradient_at(problem, x, &y, cfg)?;
    Ok(GradientReport {
        v,
        single_valued: ev.single_valued,
        at_kink: dist(x, &y) <= cfg.tol_y,
        certified: ev.certified,
        y,
    })
}

/// The gradient formula for a given `ȳ`; `0/0 = 0` at `ȳ = x`.
pub(crate) fn gradient_at(problem: &CompositeProblem, x: &[f64], y: &[f64], cfg: &EnvelopeConfig) -> Result<Vec<f64>> {
    let d = sub(x, y);
    if norm(&d) == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let h = problem.f.hess(x)?;
    let curv = matvec(&h, &scale(&d, -1.0));
    Ok(axpy(&curv, 1.0 / cfg.gamma, &power_grad(&d, cfg.p)))
}

/// Central differences of the envelope value; `h` defaults to `1e-5 (1 + ‖x‖)`.
pub fn fd_gradient(problem: &CompositeProblem, x: &[f64], cfg: &EnvelopeConfig, h: Option<f64>) -> Result<Vec<f64>> {
    check_dim(problem.dim(), x)?;
    let h = h.unwrap_or(1e-5 * (1.0 + norm(x)));
    if !(h > 0.0) {
        return Err(Error::InvalidConfig(format!("finite-difference step must be > 0, got {h}")));
    }
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let vp = hifbe(problem, &xp, cfg)?.value;
        let vm = hifbe(problem, &xm, cfg)?.value;
        out.push((vp - vm) / (2.0 * h));
    }
    Ok(out)
}

/// High-order Moreau envelope and proximal set of `g` (the `f ≡ 0` case).
pub fn home(g: &NonsmoothOracle, x: &[f64], gamma: f64, p: f64, cfg: &EnvelopeConfig) -> Result<EnvelopeEval> {
    let problem = CompositeProblem::new("home", SmoothOracle::zero(g.dim), g.clone())?;
    let cfg = EnvelopeConfig { p, gamma, ..cfg.clone() };
    hifbe(&problem, x, &cfg)
}

/// Envelope value and minimizer for `g ≡ 0`:
/// `(f(x) - (1 - 1/p) γ^{1/(p-1)} ‖a‖^{p/(p-1)}, x - γ^{1/(p-1)} ‖a‖^{(2-p)/(p-1)} a)`
/// with `a = ∇f(x)`.
pub fn forward_value_closed_form(f: &SmoothOracle, x: &[f64], gamma: f64, p: f64) -> Result<(f64, Vec<f64>)> {
    if !(p > 1.0) || !(gamma > 0.0) {
        return Err(Error::InvalidConfig(format!("need p > 1 and gamma > 0, got p = {p}, gamma = {gamma}")));
    }
    let fx = f.eval(x)?;
    let a = f.grad(x)?;
    let na = norm(&a);
    if na == 0.0 {
        return Ok((fx, x.to_vec()));
    }
    let value = fx - (1.0 - 1.0 / p) * gamma.powf(1.0 / (p - 1.0)) * na.powf(p / (p - 1.0));
    Ok((value, linear_power_step(x, &a, gamma, p)))
}
