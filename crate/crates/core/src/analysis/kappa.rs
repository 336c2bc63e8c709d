//! Sampled constant for `<‖a‖^{p-2}a - ‖b‖^{p-2}b, a - b> >= κ r^{p-2} ‖a - b‖²`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, power_grad, sub};
use crate::rng::seeded;

pub const KAPPA_SAFETY: f64 = 0.99;
const REFINE_LEVELS: usize = 12;
const REFINE_PER_LEVEL: usize = 256;
const MIN_SEPARATION: f64 = 1e-8;

/// The lemma quotient for one pair; `None` when `a = b`.
pub fn kappa_ratio(a: &[f64], b: &[f64], p: f64, r: f64) -> Option<f64> {
    let d = sub(a, b);
    let dd = dot(&d, &d);
    if dd == 0.0 {
        return None;
    }
    let num = dot(&sub(&power_grad(a, p), &power_grad(b, p)), &d);
    Some(num / (r.powf(p - 2.0) * dd))
}

/// Uniform point in the closed ball of radius `r`.
pub fn sample_ball(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if norm(&v) <= 1.0 {
            return v.into_iter().map(|c| c * r).collect();
        }
    }
}

fn project_ball(v: &mut [f64], r: f64) {
    let n = norm(v);
    if n > r {
        v.iter_mut().for_each(|c| *c *= r / n);
    }
}

/// `0.99` times the smallest sampled quotient over pairs in the ball of
/// radius `r`, followed by a local search around the smallest pair. Pairs
/// closer than `1e-8 r` are skipped since their quotient is lost to rounding.
///
/// Pairs are drawn in the unit ball and scaled by `r`, so the same seed gives
/// the same estimate for every radius up to rounding.
pub fn estimate_kappa_p(p: f64, r: f64, dim: usize, n_samples: usize, seed: u64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidConfig(format!("p must lie in (1, 2], got {p}")));
    }
    if !(r > 0.0 && r.is_finite()) || dim == 0 {
        return Err(Error::InvalidConfig(format!("need r > 0 and dim >= 1, got r = {r}, dim = {dim}")));
    }
    if n_samples < 10_000 {
        return Err(Error::InvalidConfig(format!("n_samples must be >= 10^4, got {n_samples}")));
    }
    let mut rng = seeded(seed);
    let check = |a: &[f64], b: &[f64]| -> Result<Option<f64>> {
        if norm(&sub(a, b)) <= MIN_SEPARATION * r {
            return Ok(None);
        }
        match kappa_ratio(a, b, p, r) {
            Some(q) if !(q > 0.0) => Err(Error::LemmaViolation {
                ratio: q,
                a: a.to_vec(),
                b: b.to_vec(),
            }),
            q => Ok(q),
        }
    };

    let mut best = f64::INFINITY;
    let mut pair = (vec![0.0; dim], vec![0.0; dim]);
    for _ in 0..n_samples {
        let a = sample_ball(&mut rng, dim, r);
        let b = sample_ball(&mut rng, dim, r);
        if let Some(q) = check(&a, &b)? {
            if q < best {
                best = q;
                pair = (a, b);
            }
        }
    }

    let mut step = 0.25 * r;
    for _ in 0..REFINE_LEVELS {
        for _ in 0..REFINE_PER_LEVEL {
            let mut a: Vec<f64> = pair.0.iter().map(|c| c + step * rng.gen_range(-1.0..=1.0)).collect();
            let mut b: Vec<f64> = pair.1.iter().map(|c| c + step * rng.gen_range(-1.0..=1.0)).collect();
            project_ball(&mut a, r);
            project_ball(&mut b, r);
            if let Some(q) = check(&a, &b)? {
                if q < best {
                    best = q;
                    pair = (a, b);
                }
            }
        }
        step *= 0.5;
    }
    Ok(KAPPA_SAFETY * best)
}
