//! Hölderian majorants `M_μ(x̄, y) = φ(x̄) + φ'(x̄)(y - x̄) + L_μ/(1+μ) |y - x̄|^{1+μ}`
//! of a one-dimensional objective.

use super::report::{CheckReport, Worst};
use crate::error::{Error, Result};
use rand::Rng;

use crate::holder::HOLDER_SAFETY;
use crate::oracle::CompositeProblem;
use crate::rng::{derive_seed, seeded};

pub const MAJORANT_SAMPLES: usize = 20_000;
/// Slack allowed before a grid point counts as lying above the majorant.
pub const MAJORANT_TOL: f64 = 1e-12;

/// `f'(x) + mid ∂g(x)`, the derivative of `φ` wherever it exists.
pub fn phi_derivative(problem: &CompositeProblem, x: f64) -> Result<f64> {
    let sd = problem
        .g
        .subdiff_1d
        .as_ref()
        .ok_or_else(|| Error::Capability("g has no one-dimensional subdifferential".into()))?;
    let (lo, hi) = sd(x);
    let mid = if lo.is_finite() && hi.is_finite() { 0.5 * (lo + hi) } else { 0.0 };
    Ok(problem.f.grad(&[x])?[0] + mid)
}

/// Sampled Hölder constant of `φ'` at the anchor,
/// `1.1 sup_y |φ'(y) - φ'(x̄)| / |y - x̄|^μ` over `MAJORANT_SAMPLES` uniform
/// points of `[lo, hi]`.
///
/// Integrating the anchored bound along `[x̄, y]` gives `φ <= M_μ(x̄, ·)`, and
/// the quotient stays finite across kinks of `φ` away from the anchor.
pub fn estimate_phi_holder_constant(problem: &CompositeProblem, mu: f64, anchor: f64, lo: f64, hi: f64, seed: u64) -> Result<f64> {
    if problem.dim() != 1 {
        return Err(Error::Capability("majorants are one-dimensional".into()));
    }
    if !(mu > 0.0 && mu <= 1.0) || !(lo < hi) {
        return Err(Error::InvalidConfig(format!("need mu in (0, 1] and lo < hi, got mu = {mu}, [{lo}, {hi}]")));
    }
    let d0 = phi_derivative(problem, anchor)?;
    let mut rng = seeded(seed);
    let mut best: f64 = 0.0;
    for _ in 0..MAJORANT_SAMPLES {
        let y: f64 = rng.gen_range(lo..=hi);
        let h = (y - anchor).abs();
        if h == 0.0 {
            continue;
        }
        let q = (phi_derivative(problem, y)? - d0).abs() / h.powf(mu);
        if !q.is_finite() {
            return Err(Error::OracleFault(format!("derivative of phi is not finite at {y}")));
        }
        best = best.max(q);
    }
    Ok(HOLDER_SAFETY * best)
}

pub fn majorant_value(phi_anchor: f64, slope: f64, anchor: f64, l: f64, mu: f64, y: f64) -> f64 {
    phi_anchor + slope * (y - anchor) + l / (1.0 + mu) * (y - anchor).abs().powf(1.0 + mu)
}

/// One report per exponent. The expected outcome is that only `μ = ν` gives
/// a valid majorant; a report passes when the observed outcome matches.
pub fn check_majorant(
    problem: &CompositeProblem,
    exponents: &[f64],
    anchor: f64,
    grid: &[f64],
    seed: u64,
) -> Result<Vec<CheckReport>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty grid".into()));
    }
    let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let phi_anchor = problem.value(&[anchor])?.finite().ok_or_else(|| Error::Domain(vec![anchor]))?;
    let slope = phi_derivative(problem, anchor)?;
    let mut out = Vec::with_capacity(exponents.len());
    for &mu in exponents {
        let id = format!("majorant/{}/mu={mu}", problem.id);
        let s = derive_seed(seed, &id);
        let l = estimate_phi_holder_constant(problem, mu, anchor, lo, hi, s)?;
        let mut excess = Worst::default();
        let mut closest = (f64::INFINITY, anchor);
        for &y in grid {
            let phi = problem.value(&[y])?.to_f64();
            let gap = majorant_value(phi_anchor, slope, anchor, l, mu, y) - phi;
            if gap < closest.0 && y != anchor {
                closest = (gap, y);
            }
            excess.observe((-gap - MAJORANT_TOL).max(0.0), || vec![y]);
        }
        let majorizes = excess.value == 0.0;
        let expected = (mu - problem.f.nu).abs() < 1e-12;
        let mut r = CheckReport::new(&id, s)
            .constant("mu", mu)
            .constant("L_mu", l)
            .constant("x_anchor", anchor)
            .constant("majorizes", if majorizes { 1.0 } else { 0.0 })
            .constant("expected_majorizes", if expected { 1.0 } else { 0.0 })
            .constant("min_gap", closest.0)
            .constant("min_gap_at", closest.1);
        r.n_samples = grid.len();
        r.passed = majorizes == expected;
        r.status = if r.passed { super::CheckStatus::Pass } else { super::CheckStatus::Fail };
        (r.worst_violation, r.witness) = match (majorizes, expected) {
            (true, false) => (closest.0.max(0.0), Some(vec![closest.1])),
            (false, true) => (excess.value, excess.witness.clone()),
            _ => (0.0, None),
        };
        r.note = Some(match (majorizes, expected) {
            (true, true) => "majorizes on the grid, as expected".into(),
            (false, false) => "fail-expected: dips below phi".into(),
            (true, false) => "expected a violation, but the majorant stays above phi on the grid".into(),
            (false, true) => "expected a majorant, but it dips below phi".into(),
        });
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::linspace;
    use crate::catalog::problem_catalog_get;

    #[test]
    fn derivative_of_demo_function() {
        let m = problem_catalog_get("majorant-demo").unwrap();
        let x: f64 = 0.5;
        let exact = x.sqrt() + 1.5 * (3.0 * x).sin() + 0.2;
        assert!((phi_derivative(&m, x).unwrap() - exact).abs() < 1e-15);
        assert_eq!(phi_derivative(&m, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn true_exponent_majorizes() {
        let m = problem_catalog_get("majorant-demo").unwrap();
        let r = check_majorant(&m, &[0.5], 0.5, &linspace(-2.0, 3.0, 1001), 1).unwrap();
        assert!(r[0].passed, "{:?}", r[0]);
        assert_eq!(r[0].constants_used["majorizes"], 1.0);
    }

    #[test]
    fn anchored_constants_are_moderate() {
        let m = problem_catalog_get("majorant-demo").unwrap();
        for mu in [0.2, 0.5, 1.0] {
            let l = estimate_phi_holder_constant(&m, mu, 0.5, -2.0, 3.0, 3).unwrap();
            assert!(l > 1.0 && l < 20.0, "{mu}: {l}");
        }
    }

    #[test]
    fn too_small_constant_is_caught() {
        let m = problem_catalog_get("majorant-demo").unwrap();
        let phi0 = m.value(&[0.5]).unwrap().to_f64();
        let s = phi_derivative(&m, 0.5).unwrap();
        let below = linspace(-2.0, 3.0, 501)
            .into_iter()
            .any(|y| majorant_value(phi0, s, 0.5, 0.1, 1.0, y) < m.value(&[y]).unwrap().to_f64());
        assert!(below);
    }
}
