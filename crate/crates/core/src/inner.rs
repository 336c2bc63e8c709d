//! The HiFBS subproblem
//! `min_y f(x) + <∇f(x), y - x> + g(y) + ‖x - y‖^p / (pγ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::golden::golden_section;
use crate::linalg::{dist, dot, lex_cmp, norm, sub};
use crate::oracle::{check_dim, CompositeProblem};
use crate::prox::{linear_power_step, prox_registry_lookup};
use crate::rng::{fnv1a, seeded};

/// Order, parameter and inner-solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    pub p: f64,
    pub gamma: f64,
    /// Half-width of the 1D search bracket around the anchor; `None` uses
    /// `10 (1 + ‖x‖)`.
    pub bracket_radius: Option<f64>,
    pub grid_points: usize,
    pub tol_y: f64,
    pub tol_val: f64,
    pub tol_tie: f64,
    pub multistarts: usize,
    pub max_inner_iters: usize,
    /// Use closed-form solvers from the prox registry when one applies.
    pub use_analytic: bool,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            p: 2.0,
            gamma: 1.0,
            bracket_radius: None,
            grid_points: 4001,
            tol_y: 1e-8,
            tol_val: 1e-10,
            tol_tie: 1e-8,
            multistarts: 16,
            max_inner_iters: 200,
            use_analytic: true,
        }
    }
}

impl EnvelopeConfig {
    pub fn new(p: f64, gamma: f64) -> Self {
        EnvelopeConfig {
            p,
            gamma,
            ..Default::default()
        }
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        EnvelopeConfig { gamma, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.p > 1.0 && self.p.is_finite()) {
            return bad(format!("p must be a finite number > 1, got {}", self.p));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be a finite number > 0, got {}", self.gamma));
        }
        for (name, v) in [("tol_y", self.tol_y), ("tol_val", self.tol_val), ("tol_tie", self.tol_tie)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        if self.grid_points < 101 || self.grid_points % 2 == 0 {
            return bad(format!("grid_points must be odd and >= 101, got {}", self.grid_points));
        }
        if let Some(b) = self.bracket_radius {
            if !(b > 0.0 && b.is_finite()) {
                return bad(format!("bracket_radius must be > 0, got {b}"));
            }
        }
        if self.multistarts == 0 || self.max_inner_iters == 0 {
            return bad("multistarts and max_inner_iters must be >= 1".into());
        }
        Ok(())
    }
}

/// Minimizer set of the subproblem at one anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubproblemSolution {
    /// All minimizers within `tol_tie` of the best value.
    pub minimizers: Vec<Vec<f64>>,
    /// Smallest-norm minimizer, ties broken lexicographically.
    pub representative: Vec<f64>,
    pub value: f64,
    pub certified: bool,
    pub n_evals: usize,
}

/// Model and regularizer at a fixed anchor, with `f(x)` and `∇f(x)` cached.
pub(crate) struct Model<'a> {
    problem: &'a CompositeProblem,
    x: Vec<f64>,
    fx: f64,
    gx: Vec<f64>,
    p: f64,
    gamma: f64,
}

impl<'a> Model<'a> {
    pub(crate) fn new(problem: &'a CompositeProblem, x: &[f64], p: f64, gamma: f64) -> Result<Self> {
        check_dim(problem.dim(), x)?;
        Ok(Model {
            problem,
            x: x.to_vec(),
            fx: problem.f.eval(x)?,
            gx: problem.f.grad(x)?,
            p,
            gamma,
        })
    }

    pub(crate) fn gradient(&self) -> &[f64] {
        &self.gx
    }

    /// `ℓ(x, y) + ‖x - y‖^p / (pγ)`.
    pub(crate) fn eval(&self, y: &[f64]) -> Result<ExtReal> {
        let gy = self.problem.g.eval(y)?;
        let d = sub(y, &self.x);
        let lin = self.fx + dot(&self.gx, &d);
        let reg = norm(&d).powf(self.p) / (self.p * self.gamma);
        Ok(gy.add_f64(lin + reg))
    }

    /// Like [`Model::eval`] but maps `+∞` and faults to `f64::INFINITY`.
    fn eval_f64(&self, y: &[f64]) -> f64 {
        match self.eval(y) {
            Ok(v) => v.to_f64(),
            Err(_) => f64::INFINITY,
        }
    }
}

/// `ℓ(x, y) + ‖x - y‖^p / (pγ)`; `+∞` exactly when `g(y) = +∞`.
pub fn model_value(problem: &CompositeProblem, x: &[f64], y: &[f64], cfg: &EnvelopeConfig) -> Result<ExtReal> {
    cfg.validate()?;
    check_dim(problem.dim(), y)?;
    Model::new(problem, x, cfg.p, cfg.gamma)?.eval(y)
}

/// Solves the subproblem at `x`.
///
/// Order of preference: a registry closed form (certified), the bracketed
/// grid search in one dimension (certified), multistart pattern search in
/// higher dimensions (not certified).
pub fn solve_subproblem(problem: &CompositeProblem, x: &[f64], cfg: &EnvelopeConfig) -> Result<SubproblemSolution> {
    cfg.validate()?;
    let model = Model::new(problem, x, cfg.p, cfg.gamma)?;
    if cfg.use_analytic {
        if let Some(solver) = prox_registry_lookup(problem, cfg.p) {
            let ys = solver.solve(x, model.gradient(), cfg.gamma, cfg.p)?;
            let mut scored = Vec::with_capacity(ys.len());
            for y in ys {
                let v = model.eval(&y)?;
                scored.push((y, v.to_f64()));
            }
            return finish(scored, cfg, true, 0);
        }
    }
    if problem.dim() == 1 {
        solve_grid_1d(&model, cfg)
    } else {
        solve_multistart(&model, cfg)
    }
}

/// Keeps the points within `tol_tie` of the best value, merges points closer
/// than `10 tol_y` and picks the representative.
fn finish(mut scored: Vec<(Vec<f64>, f64)>, cfg: &EnvelopeConfig, certified: bool, n_evals: usize) -> Result<SubproblemSolution> {
    scored.retain(|(_, v)| v.is_finite());
    let best = scored
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::Domain(scored.first().map(|s| s.0.clone()).unwrap_or_default()));
    }
    scored.retain(|(_, v)| *v <= best + cfg.tol_tie);
    scored.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut minimizers: Vec<Vec<f64>> = Vec::new();
    for (y, _) in scored {
        if minimizers.iter().all(|m| dist(m, &y) > 10.0 * cfg.tol_y) {
            minimizers.push(y);
        }
    }
    minimizers.sort_by(|a, b| norm(a).total_cmp(&norm(b)).then_with(|| lex_cmp(a, b)));
    let representative = minimizers[0].clone();
    Ok(SubproblemSolution {
        minimizers,
        representative,
        value: best,
        certified,
        n_evals,
    })
}

const MAX_DOUBLINGS: usize = 6;
const MAX_REFINED_BASINS: usize = 32;

fn solve_grid_1d(model: &Model<'_>, cfg: &EnvelopeConfig) -> Result<SubproblemSolution> {
    let x = model.x[0];
    let floor = -1.0 / cfg.tol_val;
    let mut radius = cfg.bracket_radius.unwrap_or(10.0 * (1.0 + x.abs()));
    let n = cfg.grid_points;
    let mut n_evals = 0usize;
    let f = |t: f64| model.eval_f64(&[t]);

    for attempt in 0..=MAX_DOUBLINGS {
        let h = 2.0 * radius / (n - 1) as f64;
        let mid = (n - 1) / 2;
        let node = |i: usize| -> f64 {
            if i == mid {
                x
            } else {
                x + (i as f64 - mid as f64) * h
            }
        };
        let vals: Vec<f64> = (0..n).map(|i| f(node(i))).collect();
        n_evals += n;
        if let Some(i) = (0..n).find(|&i| vals[i] < floor) {
            return Err(unbounded(x, node(i), vals[i]));
        }
        if vals.iter().all(|v| !v.is_finite()) {
            return Err(Error::Domain(vec![x]));
        }

        let mut basins: Vec<usize> = (0..n)
            .filter(|&i| {
                let v = vals[i];
                v.is_finite() && (i == 0 || v <= vals[i - 1]) && (i == n - 1 || v <= vals[i + 1])
            })
            .collect();
        basins.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        basins.truncate(MAX_REFINED_BASINS);

        let mut scored = Vec::with_capacity(basins.len());
        for &i in &basins {
            let lo = node(i.saturating_sub(1));
            let hi = node((i + 1).min(n - 1));
            let (t, v, e) = golden_section(f, lo, hi, 1e-3 * cfg.tol_y, cfg.max_inner_iters);
            n_evals += e;
            if v < vals[i] {
                scored.push((vec![t], v));
            } else {
                scored.push((vec![node(i)], vals[i]));
            }
        }
        let sol = finish(scored, cfg, true, n_evals)?;
        if sol.value < floor {
            return Err(unbounded(x, sol.representative[0], sol.value));
        }
        let on_boundary = sol.minimizers.iter().any(|m| (m[0] - x).abs() >= radius - h);
        if !on_boundary {
            return Ok(sol);
        }
        let dir = sol
            .minimizers
            .iter()
            .find(|m| (m[0] - x).abs() >= radius - h)
            .map(|m| (m[0] - x).signum())
            .unwrap_or(1.0);
        probe_ray(&f, x, dir, radius, floor)?;
        if attempt == MAX_DOUBLINGS {
            return Err(Error::BracketTooSmall {
                minimizer: sol.representative,
                radius,
            });
        }
        radius *= 2.0;
    }
    unreachable!("loop returns on the last attempt")
}

/// Walks geometrically outwards along `dir`; a value below `floor` means the
/// model is unbounded below.
fn probe_ray<F: Fn(f64) -> f64>(f: &F, x: f64, dir: f64, radius: f64, floor: f64) -> Result<()> {
    let mut t = radius;
    for _ in 0..64 {
        t *= 2.0;
        let y = x + dir * t;
        if !y.is_finite() {
            break;
        }
        let v = f(y);
        if v < floor {
            return Err(unbounded(x, y, v));
        }
    }
    Ok(())
}

fn unbounded(x: f64, y: f64, value: f64) -> Error {
    Error::ProxUnbounded {
        ray: vec![(y - x).signum()],
        value,
    }
}

fn solve_multistart(model: &Model<'_>, cfg: &EnvelopeConfig) -> Result<SubproblemSolution> {
    let dim = model.x.len();
    let floor = -1.0 / cfg.tol_val;
    let radius = cfg.bracket_radius.unwrap_or(10.0 * (1.0 + norm(&model.x)));
    let seed = model
        .x
        .iter()
        .fold(fnv1a("multistart"), |h, v| h.rotate_left(7) ^ v.to_bits());
    let mut rng = seeded(seed);

    let mut starts = vec![model.x.clone(), linear_power_step(&model.x, &model.gx, cfg.gamma, cfg.p)];
    while starts.len() < cfg.multistarts.max(2) {
        use rand::Rng;
        let s: Vec<f64> = model
            .x
            .iter()
            .map(|c| c + radius * 0.5 * rng.gen_range(-1.0..=1.0))
            .collect();
        starts.push(s);
    }

    let mut n_evals = 0;
    let mut scored = Vec::new();
    for start in starts {
        let (y, v, e) = compass_search(|y| model.eval_f64(y), start, radius * 0.25, cfg.tol_y, cfg.max_inner_iters * dim * 4);
        n_evals += e;
        if v < floor {
            let ray = sub(&y, &model.x);
            let nr = norm(&ray).max(f64::MIN_POSITIVE);
            return Err(Error::ProxUnbounded {
                ray: ray.iter().map(|c| c / nr).collect(),
                value: v,
            });
        }
        scored.push((y, v));
    }
    finish(scored, cfg, false, n_evals)
}

/// Coordinate pattern search with step halving.
fn compass_search<F: Fn(&[f64]) -> f64>(f: F, mut y: Vec<f64>, mut step: f64, tol: f64, max_iters: usize) -> (Vec<f64>, f64, usize) {
    let mut fy = f(&y);
    let mut evals = 1;
    let mut iters = 0;
    while step > tol && iters < max_iters {
        iters += 1;
        let mut improved = false;
        for i in 0..y.len() {
            for s in [step, -step] {
                let mut z = y.clone();
                z[i] += s;
                let fz = f(&z);
                evals += 1;
                if fz < fy {
                    y = z;
                    fy = fz;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (y, fy, evals)
}
