//! Oracles for the smooth part `f`, the nonsmooth part `g` and the composite
//! objective `φ = f + g`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::ExtReal;

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type ExtFn = Arc<dyn Fn(&[f64]) -> ExtReal + Send + Sync>;
/// `(anchor u, γ, p)` to the minimizer set of `y ↦ g(y) + ‖u - y‖^p / (pγ)`.
pub type ProxFn = Arc<dyn Fn(&[f64], f64, f64) -> Vec<Vec<f64>> + Send + Sync>;
/// Closed interval `[lo, hi]`, endpoints possibly infinite.
pub type SubdiffFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Differentiable part with Hölder metadata.
///
/// `hessian` returns a row-major `dim x dim` matrix.
#[derive(Clone)]
pub struct SmoothOracle {
    pub dim: usize,
    pub value: ScalarFn,
    pub gradient: VectorFn,
    pub hessian: Option<VectorFn>,
    /// Hölder exponent of the gradient, in `(0, 1]`.
    pub nu: f64,
    /// Hölder constant of the gradient for `nu`.
    pub l_nu: f64,
    /// Hölder exponent of the Hessian, when known.
    pub mu: Option<f64>,
    pub l_mu: Option<f64>,
}

impl SmoothOracle {
    pub fn zero(dim: usize) -> Self {
        SmoothOracle {
            dim,
            value: Arc::new(|_| 0.0),
            gradient: Arc::new(move |_| vec![0.0; dim]),
            hessian: Some(Arc::new(move |_| vec![0.0; dim * dim])),
            nu: 1.0,
            l_nu: 0.0,
            mu: None,
            l_mu: None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x)?;
        let v = (self.value)(x);
        if !v.is_finite() {
            return Err(Error::OracleFault(format!("f({x:?}) = {v}")));
        }
        Ok(v)
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x)?;
        let g = (self.gradient)(x);
        if g.len() != self.dim || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::OracleFault(format!("grad f({x:?}) = {g:?}")));
        }
        Ok(g)
    }

    pub fn hess(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x)?;
        let h = self
            .hessian
            .as_ref()
            .ok_or_else(|| Error::Capability("smooth oracle has no Hessian".into()))?;
        let m = h(x);
        if m.len() != self.dim * self.dim || m.iter().any(|v| !v.is_finite()) {
            return Err(Error::OracleFault(format!("hess f({x:?}) is not finite")));
        }
        Ok(m)
    }
}

impl fmt::Debug for SmoothOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothOracle")
            .field("dim", &self.dim)
            .field("nu", &self.nu)
            .field("l_nu", &self.l_nu)
            .field("mu", &self.mu)
            .field("l_mu", &self.l_mu)
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

/// Structural tags that let the prox registry pick a closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum NonsmoothKind {
    Zero,
    /// Indicator of `[lo, hi]` in one dimension.
    Interval { lo: f64, hi: f64 },
    General,
}

/// Proper lsc part, possibly taking the value `+∞`.
#[derive(Clone)]
pub struct NonsmoothOracle {
    pub dim: usize,
    pub value: ExtFn,
    pub kind: NonsmoothKind,
    pub analytic_prox: Option<ProxFn>,
    pub subdiff_1d: Option<SubdiffFn>,
    /// Known lower bound on the prox-boundedness threshold `γ^{g,p}`.
    pub prox_bound_hint: Option<f64>,
}

impl NonsmoothOracle {
    pub fn zero(dim: usize) -> Self {
        NonsmoothOracle {
            dim,
            value: Arc::new(|_| ExtReal::ZERO),
            kind: NonsmoothKind::Zero,
            analytic_prox: Some(Arc::new(|u, _, _| vec![u.to_vec()])),
            subdiff_1d: if dim == 1 {
                Some(Arc::new(|_| (0.0, 0.0)))
            } else {
                None
            },
            prox_bound_hint: Some(f64::INFINITY),
        }
    }

    /// Indicator of the interval `[lo, hi]`.
    pub fn interval_indicator(lo: f64, hi: f64) -> Self {
        NonsmoothOracle {
            dim: 1,
            value: Arc::new(move |x| {
                if x[0] >= lo && x[0] <= hi {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                }
            }),
            kind: NonsmoothKind::Interval { lo, hi },
            analytic_prox: Some(Arc::new(move |u, _, _| vec![vec![u[0].clamp(lo, hi)]])),
            subdiff_1d: Some(Arc::new(move |x| {
                // normal cone of [lo, hi]
                let at_lo = x <= lo;
                let at_hi = x >= hi;
                match (at_lo, at_hi) {
                    (true, true) => (f64::NEG_INFINITY, f64::INFINITY),
                    (true, false) => (f64::NEG_INFINITY, 0.0),
                    (false, true) => (0.0, f64::INFINITY),
                    (false, false) => (0.0, 0.0),
                }
            })),
            prox_bound_hint: Some(f64::INFINITY),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        check_dim(self.dim, x)?;
        match (self.value)(x) {
            ExtReal::Finite(v) if !v.is_finite() => {
                Err(Error::OracleFault(format!("g({x:?}) overflowed to {v}")))
            }
            v => Ok(v),
        }
    }
}

impl fmt::Debug for NonsmoothOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonsmoothOracle")
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("analytic_prox", &self.analytic_prox.is_some())
            .field("subdiff_1d", &self.subdiff_1d.is_some())
            .field("prox_bound_hint", &self.prox_bound_hint)
            .finish()
    }
}

/// `φ = f + g` together with optional reference data.
#[derive(Clone, Debug)]
pub struct CompositeProblem {
    pub id: String,
    pub f: SmoothOracle,
    pub g: NonsmoothOracle,
    /// A global minimizer and its value.
    pub known_minimizer: Option<(Vec<f64>, f64)>,
    pub calm_constant: Option<f64>,
}

impl CompositeProblem {
    pub fn new(id: impl Into<String>, f: SmoothOracle, g: NonsmoothOracle) -> Result<Self> {
        if f.dim != g.dim {
            return Err(Error::DimensionMismatch {
                expected: f.dim,
                got: g.dim,
            });
        }
        Ok(CompositeProblem {
            id: id.into(),
            f,
            g,
            known_minimizer: None,
            calm_constant: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.f.dim
    }

    /// `φ(x) = f(x) + g(x)`.
    pub fn value(&self, x: &[f64]) -> Result<ExtReal> {
        let fv = self.f.eval(x)?;
        Ok(self.g.eval(x)?.add_f64(fv))
    }

    /// The same problem in coordinates centred at `center`, with `φ(center)`
    /// subtracted from `f` so that the shifted objective vanishes at the origin.
    pub fn shifted(&self, center: &[f64]) -> Result<CompositeProblem> {
        check_dim(self.dim(), center)?;
        let offset = self
            .value(center)?
            .finite()
            .ok_or_else(|| Error::Domain(center.to_vec()))?;
        let c = center.to_vec();
        let translate = move |z: &[f64]| -> Vec<f64> { z.iter().zip(&c).map(|(a, b)| a + b).collect() };
        let f = self.f.clone();
        let g = self.g.clone();
        let (t1, t2, t3, t4) = (
            translate.clone(),
            translate.clone(),
            translate.clone(),
            translate,
        );
        let (fv, fg, fh) = (f.value.clone(), f.gradient.clone(), f.hessian.clone());
        let gv = g.value.clone();
        let shifted_f = SmoothOracle {
            dim: f.dim,
            value: Arc::new(move |z| fv(&t1(z)) - offset),
            gradient: Arc::new(move |z| fg(&t2(z))),
            hessian: fh.map(|h| -> VectorFn { Arc::new(move |z| h(&t3(z))) }),
            ..f
        };
        let cx = center.to_vec();
        let shifted_prox: Option<ProxFn> = g.analytic_prox.clone().map(|prox| -> ProxFn {
            let cx = cx.clone();
            Arc::new(move |u: &[f64], gamma, p| {
                let uu: Vec<f64> = u.iter().zip(&cx).map(|(a, b)| a + b).collect();
                prox(&uu, gamma, p)
                    .into_iter()
                    .map(|y| y.iter().zip(&cx).map(|(a, b)| a - b).collect())
                    .collect()
            })
        });
        let c0 = center.first().copied().unwrap_or(0.0);
        let shifted_sub = g.subdiff_1d.clone().map(|s| -> SubdiffFn { Arc::new(move |x| s(x + c0)) });
        let kind = match g.kind {
            NonsmoothKind::Interval { lo, hi } => NonsmoothKind::Interval {
                lo: lo - c0,
                hi: hi - c0,
            },
            ref k => k.clone(),
        };
        let shifted_g = NonsmoothOracle {
            dim: g.dim,
            value: Arc::new(move |z| gv(&t4(z))),
            kind,
            analytic_prox: shifted_prox,
            subdiff_1d: shifted_sub,
            prox_bound_hint: g.prox_bound_hint,
        };
        let mut out = CompositeProblem::new(format!("{}@shifted", self.id), shifted_f, shifted_g)?;
        out.known_minimizer = self.known_minimizer.as_ref().map(|(m, v)| {
            (
                m.iter().zip(center).map(|(a, b)| a - b).collect(),
                v - offset,
            )
        });
        out.calm_constant = self.calm_constant;
        Ok(out)
    }
}

/// `f(x) + g(x)` for the given problem; non-finite `f` is an oracle fault.
pub fn composite_value(problem: &CompositeProblem, x: &[f64]) -> Result<ExtReal> {
    problem.value(x)
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::OracleFault(format!("non-finite input {x:?}")));
    }
    Ok(())
}
