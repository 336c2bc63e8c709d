//! Built-in problem instances.
//!
//! Hölder constants are sampled once with [`estimate_holder_constant`] on
//! `[-3, 3]^n` using [`HOLDER_SEED`] and [`HOLDER_SAMPLES`] and frozen here;
//! `frozen_constants_match_estimator` recomputes them.
//!
//! [`estimate_holder_constant`]: crate::holder::estimate_holder_constant

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::oracle::{CompositeProblem, NonsmoothKind, NonsmoothOracle, SmoothOracle};
use crate::prox::soft_threshold;

pub const CATALOG_IDS: [&str; 7] = [
    "zero",
    "power-q",
    "oscillatory",
    "majorant-demo",
    "quad-l1",
    "quad-free",
    "quad-free1d",
];

pub const HOLDER_SEED: u64 = 20_240_611;
pub const HOLDER_SAMPLES: usize = 20_000;
pub const HOLDER_HALF_WIDTH: f64 = 3.0;

pub const L_POWER_Q: f64 = 1.5556349186103509;
pub const L_OSCILLATORY: f64 = 1.1667261889577634;
pub const L_MAJORANT_DEMO: f64 = 1.5556349186103509;
pub const L_QUAD_L1: f64 = 1.1000000628562558;
pub const L_QUAD_FREE: f64 = 2.427817458434861;
pub const L_QUAD_FREE1D: f64 = 1.1;

/// Matrix and vector of the `quad-free` instance `½xᵀAx - bᵀx`.
pub const QUAD_FREE_A: [f64; 4] = [2.0, 0.5, 0.5, 1.0];
pub const QUAD_FREE_B: [f64; 2] = [1.0, 1.0];

/// Returns the problem registered under `id`.
pub fn problem_catalog_get(id: &str) -> Result<CompositeProblem> {
    let mut problem = match id {
        "zero" => CompositeProblem::new(id, SmoothOracle::zero(1), NonsmoothOracle::zero(1))?,
        "power-q" => CompositeProblem::new(id, abs_power(2.0 / 3.0, 1.5, L_POWER_Q), NonsmoothOracle::zero(1))?,
        "oscillatory" => CompositeProblem::new(id, abs_power(0.5, 1.5, L_OSCILLATORY), oscillatory_g())?,
        "majorant-demo" => CompositeProblem::new(id, abs_power(2.0 / 3.0, 1.5, L_MAJORANT_DEMO), majorant_g())?,
        "quad-l1" => CompositeProblem::new(id, shifted_square(1.0, L_QUAD_L1), abs_g())?,
        "quad-free" => CompositeProblem::new(id, quad_free(), NonsmoothOracle::zero(2))?,
        "quad-free1d" => CompositeProblem::new(id, shifted_square(0.0, L_QUAD_FREE1D), NonsmoothOracle::zero(1))?,
        _ => {
            return Err(Error::CatalogMiss {
                id: id.to_string(),
                valid: CATALOG_IDS.join(", "),
            })
        }
    };
    problem.known_minimizer = Some(match id {
        "majorant-demo" => (vec![0.0], -0.5),
        "quad-l1" => (vec![0.0], 0.5),
        "quad-free" => {
            let x = quad_free_minimizer();
            let v = -0.5 * (QUAD_FREE_B[0] * x[0] + QUAD_FREE_B[1] * x[1]);
            (x.to_vec(), v)
        }
        _ => (vec![0.0], 0.0),
    });
    Ok(problem)
}

/// `c|x|^q` in one dimension.
fn abs_power(c: f64, q: f64, l_nu: f64) -> SmoothOracle {
    SmoothOracle {
        dim: 1,
        value: Arc::new(move |x| c * x[0].abs().powf(q)),
        gradient: Arc::new(move |x| vec![c * q * x[0].signum() * x[0].abs().powf(q - 1.0)]),
        hessian: Some(Arc::new(move |x| vec![c * q * (q - 1.0) * x[0].abs().powf(q - 2.0)])),
        nu: q - 1.0,
        l_nu,
        mu: None,
        l_mu: None,
    }
}

/// `½(x - s)²`.
fn shifted_square(s: f64, l_nu: f64) -> SmoothOracle {
    SmoothOracle {
        dim: 1,
        value: Arc::new(move |x| 0.5 * (x[0] - s).powi(2)),
        gradient: Arc::new(move |x| vec![x[0] - s]),
        hessian: Some(Arc::new(|_| vec![1.0])),
        nu: 1.0,
        l_nu,
        mu: None,
        l_mu: None,
    }
}

fn quad_free() -> SmoothOracle {
    let [a11, a12, a21, a22] = QUAD_FREE_A;
    let [b1, b2] = QUAD_FREE_B;
    SmoothOracle {
        dim: 2,
        value: Arc::new(move |x| {
            0.5 * (a11 * x[0] * x[0] + (a12 + a21) * x[0] * x[1] + a22 * x[1] * x[1]) - b1 * x[0] - b2 * x[1]
        }),
        gradient: Arc::new(move |x| vec![a11 * x[0] + a12 * x[1] - b1, a21 * x[0] + a22 * x[1] - b2]),
        hessian: Some(Arc::new(move |_| QUAD_FREE_A.to_vec())),
        nu: 1.0,
        l_nu: L_QUAD_FREE,
        mu: None,
        l_mu: None,
    }
}

fn quad_free_minimizer() -> [f64; 2] {
    let [a11, a12, a21, a22] = QUAD_FREE_A;
    let det = a11 * a22 - a12 * a21;
    let [b1, b2] = QUAD_FREE_B;
    [(a22 * b1 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det]
}

/// `|x|`, with the order-`p` prox `sgn(u) max(|u| - γ^{1/(p-1)}, 0)`.
fn abs_g() -> NonsmoothOracle {
    NonsmoothOracle {
        dim: 1,
        value: Arc::new(|x| ExtReal::Finite(x[0].abs())),
        kind: NonsmoothKind::General,
        analytic_prox: Some(Arc::new(|u, gamma, p| vec![vec![soft_threshold(u[0], gamma.powf(1.0 / (p - 1.0)))]])),
        subdiff_1d: Some(Arc::new(|x| {
            if x == 0.0 {
                (-1.0, 1.0)
            } else {
                (x.signum(), x.signum())
            }
        })),
        prox_bound_hint: Some(f64::INFINITY),
    }
}

const KINK_TOL: f64 = 1e-12;

/// `|0.3 sin 5x| + 0.2x² e^{-x²}`.
fn oscillatory_g() -> NonsmoothOracle {
    NonsmoothOracle {
        dim: 1,
        value: Arc::new(|x| {
            let t = x[0];
            ExtReal::Finite((0.3 * (5.0 * t).sin()).abs() + 0.2 * t * t * (-t * t).exp())
        }),
        kind: NonsmoothKind::General,
        analytic_prox: None,
        subdiff_1d: Some(Arc::new(|t| {
            let smooth = 0.4 * t * (-t * t).exp() * (1.0 - t * t);
            let s = (5.0 * t).sin();
            let c = 1.5 * (5.0 * t).cos();
            if s.abs() <= KINK_TOL {
                (smooth - c.abs(), smooth + c.abs())
            } else {
                let v = smooth + c * s.signum();
                (v, v)
            }
        })),
        prox_bound_hint: Some(f64::INFINITY),
    }
}

/// `-0.5 cos 3x + 0.2|x|`.
fn majorant_g() -> NonsmoothOracle {
    NonsmoothOracle {
        dim: 1,
        value: Arc::new(|x| ExtReal::Finite(-0.5 * (3.0 * x[0]).cos() + 0.2 * x[0].abs())),
        kind: NonsmoothKind::General,
        analytic_prox: None,
        subdiff_1d: Some(Arc::new(|t| {
            let smooth = 1.5 * (3.0 * t).sin();
            if t.abs() <= KINK_TOL {
                (smooth - 0.2, smooth + 0.2)
            } else {
                let v = smooth + 0.2 * t.signum();
                (v, v)
            }
        })),
        prox_bound_hint: Some(f64::INFINITY),
    }
}
