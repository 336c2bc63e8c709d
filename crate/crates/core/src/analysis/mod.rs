//! Property checks and the constants they depend on.

pub mod bounds;
pub mod calm;
pub mod kappa;
pub mod majorant;
pub mod regularity;
pub mod relations;
pub mod report;
pub mod shrinkage;
pub mod stationarity;
pub mod suite;

pub use bounds::{check_tau_containment, differentiability_threshold, lower_bound_constant, tau_bound, tau_bounds};
pub use calm::{check_p_calm, estimate_calm_constant, fixed_point_gamma};
pub use kappa::estimate_kappa_p;
pub use majorant::{check_majorant, estimate_phi_holder_constant, majorant_value};
pub use regularity::{check_envelope_regularity, envelope_holder_modulus, weak_smoothness_exponent};
pub use relations::check_envelope_relations;
pub use report::{CheckReport, CheckStatus};
pub use shrinkage::check_uniform_shrinkage;
pub use stationarity::check_stationarity_inclusion;
pub use suite::{run_suite, suite_ok, Suite, SUITE_NAMES};

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::linspace;

    #[test]
    fn linspace_hits_endpoints_and_centre() {
        let g = linspace(-2.5, 2.5, 1001);
        assert_eq!(g[0], -2.5);
        assert_eq!(g[1000], 2.5);
        assert_eq!(g[500], 0.0);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }
}
