//! Sampled Hölder constants of gradients.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dist, sub};
use crate::oracle::SmoothOracle;
use crate::rng::seeded;

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        DomainBox { lower, upper }
    }

    /// The cube `[-half, half]^dim`.
    pub fn cube(dim: usize, half: f64) -> Self {
        DomainBox::new(vec![-half; dim], vec![half; dim])
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        DomainBox::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn diameter(&self) -> f64 {
        dist(&self.lower, &self.upper)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| if u > l { rng.gen_range(*l..=*u) } else { *l })
            .collect()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, l), u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*l, *u);
        }
    }
}

/// Multiplicative safety factor applied to the sampled maximum.
pub const HOLDER_SAFETY: f64 = 1.1;

const REFINE_LEVELS: usize = 10;
/// Growth of the focused quotient between the middle and the last level that
/// counts as divergence.
const DIVERGENCE_FACTOR: f64 = 4.0;

/// Largest sampled quotient `‖∇f(x) - ∇f(y)‖ / ‖x - y‖^nu` over the box,
/// without the safety factor, together with the per-level maxima of the
/// focused refinement.
#[derive(Debug, Clone)]
pub struct HolderSample {
    pub max_ratio: f64,
    pub argmax: (Vec<f64>, Vec<f64>),
    pub level_max: Vec<f64>,
}

/// Samples Hölder quotients of `gradient` on `domain`.
///
/// Global pass: `n_samples` uniform pairs. Focused pass: the search shrinks
/// by a factor four per level around the worst pair found so far.
pub fn sample_holder_quotients<G>(
    gradient: G,
    nu: f64,
    domain: &DomainBox,
    n_samples: usize,
    seed: u64,
) -> HolderSample
where
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut rng = seeded(seed);
    let ratio = |x: &[f64], y: &[f64]| -> f64 {
        let d = dist(x, y);
        if d == 0.0 {
            return 0.0;
        }
        let gx = gradient(x);
        let gy = gradient(y);
        crate::linalg::norm(&sub(&gx, &gy)) / d.powf(nu)
    };

    let mut best = 0.0;
    let mut arg = (domain.lower.clone(), domain.upper.clone());
    for _ in 0..n_samples {
        let x = domain.sample(&mut rng);
        let y = domain.sample(&mut rng);
        let r = ratio(&x, &y);
        if r > best {
            best = r;
            arg = (x, y);
        }
    }

    let per_level = (n_samples / 10).max(64);
    let mut center: Vec<f64> = arg.0.iter().zip(&arg.1).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut scale = domain.diameter().max(f64::MIN_POSITIVE);
    let mut level_max = Vec::with_capacity(REFINE_LEVELS);
    for _ in 0..REFINE_LEVELS {
        scale *= 0.25;
        let mut lvl_best = 0.0;
        let mut lvl_arg: Option<(Vec<f64>, Vec<f64>)> = None;
        for _ in 0..per_level {
            let mut x: Vec<f64> = center.iter().map(|c| c + scale * rng.gen_range(-1.0..=1.0)).collect();
            let mut y: Vec<f64> = x.iter().map(|c| c + scale * rng.gen_range(-1.0..=1.0)).collect();
            domain.clamp(&mut x);
            domain.clamp(&mut y);
            let r = ratio(&x, &y);
            if r > lvl_best {
                lvl_best = r;
                lvl_arg = Some((x, y));
            }
        }
        level_max.push(lvl_best);
        if let Some((x, y)) = lvl_arg {
            center = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
            if lvl_best > best {
                best = lvl_best;
                arg = (x, y);
            }
        }
    }

    HolderSample {
        max_ratio: best,
        argmax: arg,
        level_max,
    }
}

/// Sampled Hölder constant of `∇f` for exponent `nu`, inflated by
/// [`HOLDER_SAFETY`]. Deterministic for a given seed.
///
/// Fails with [`Error::ExponentMismatch`] when the focused quotient keeps
/// growing as the pairs shrink, i.e. when `nu` is larger than the true
/// exponent near the worst pair.
pub fn estimate_holder_constant(
    f: &SmoothOracle,
    nu: f64,
    domain: &DomainBox,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidConfig(format!("nu must lie in (0, 1], got {nu}")));
    }
    if n_samples < 100 {
        return Err(Error::InvalidConfig(format!("n_samples must be >= 100, got {n_samples}")));
    }
    if domain.dim() != f.dim {
        return Err(Error::DimensionMismatch {
            expected: f.dim,
            got: domain.dim(),
        });
    }
    let s = sample_holder_quotients(|x| (f.gradient)(x), nu, domain, n_samples, seed);
    if diverges(&s.level_max) {
        let loc: Vec<f64> = s.argmax.0.iter().zip(&s.argmax.1).map(|(a, b)| 0.5 * (a + b)).collect();
        return Err(Error::ExponentMismatch { nu, location: loc });
    }
    Ok(HOLDER_SAFETY * s.max_ratio)
}

/// Monotone growth over the second half of the levels by more than
/// [`DIVERGENCE_FACTOR`].
fn diverges(levels: &[f64]) -> bool {
    let mid = levels.len() / 2;
    let tail = &levels[mid..];
    let (first, last) = match (tail.first(), tail.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return false,
    };
    let nondecreasing = tail.windows(2).all(|w| w[1] >= 0.9 * w[0]);
    first > 0.0 && nondecreasing && last > DIVERGENCE_FACTOR * first
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn power(q: f64) -> SmoothOracle {
        SmoothOracle {
            dim: 1,
            value: Arc::new(move |x| x[0].abs().powf(q) / q),
            gradient: Arc::new(move |x| vec![x[0].signum() * x[0].abs().powf(q - 1.0)]),
            hessian: None,
            nu: q - 1.0,
            l_nu: 0.0,
            mu: None,
            l_mu: None,
        }
    }

    #[test]
    fn constant_function_has_zero_constant() {
        let f = SmoothOracle::zero(2);
        let l = estimate_holder_constant(&f, 0.3, &DomainBox::cube(2, 1.0), 500, 1).unwrap();
        assert_eq!(l, 0.0);
    }

    #[test]
    fn quadratic_gives_inflated_unit_constant() {
        let f = power(2.0);
        let l = estimate_holder_constant(&f, 1.0, &DomainBox::interval(-1.0, 1.0), 1000, 3).unwrap();
        assert!((l - 1.1).abs() < 1e-9, "{l}");
    }

    #[test]
    fn three_halves_power_stays_below_sqrt_two_bound() {
        // sup of |sgn(a)|a|^½ - sgn(b)|b|^½| / |a-b|^½ is √2, attained at a = -b
        let f = power(1.5);
        let l = estimate_holder_constant(&f, 0.5, &DomainBox::interval(-2.0, 2.0), 10_000, 11).unwrap();
        let exact = 1.1 * 2f64.sqrt();
        assert!(l <= exact + 1e-12 && l >= 0.95 * exact, "{l}");
    }

    #[test]
    fn too_large_exponent_is_rejected() {
        let f = power(1.5);
        let err = estimate_holder_constant(&f, 1.0, &DomainBox::interval(-2.0, 2.0), 2000, 5).unwrap_err();
        assert!(matches!(err, Error::ExponentMismatch { .. }), "{err:?}");
    }

    #[test]
    fn bad_arguments() {
        let f = power(2.0);
        assert!(estimate_holder_constant(&f, 0.0, &DomainBox::interval(-1.0, 1.0), 1000, 0).is_err());
        assert!(estimate_holder_constant(&f, 1.0, &DomainBox::interval(-1.0, 1.0), 10, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let f = power(1.5);
        let d = DomainBox::interval(-3.0, 3.0);
        let a = estimate_holder_constant(&f, 0.5, &d, 2000, 42).unwrap();
        let b = estimate_holder_constant(&f, 0.5, &d, 2000, 42).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
