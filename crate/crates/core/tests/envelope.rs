use hifbe::rng::seeded;
use hifbe::{candidate_gradient, fd_gradient, hifba_run, hifbe as envelope, problem_catalog_get, EnvelopeConfig};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn envelope_decreases_in_gamma(x in -3.0f64..3.0, g1 in 0.05f64..0.6, dg in 0.01f64..0.3) {
        let o = problem_catalog_get("oscillatory").unwrap();
        let cfg = EnvelopeConfig::new(1.5, g1);
        let a = envelope(&o, &[x], &cfg).unwrap().value;
        let b = envelope(&o, &[x], &cfg.with_gamma(g1 + dg)).unwrap().value;
        prop_assert!(b <= a + cfg.tol_val);
    }

    #[test]
    fn envelope_is_continuous_in_x(x in -2.5f64..2.5) {
        let pq = problem_catalog_get("power-q").unwrap();
        let cfg = EnvelopeConfig::new(1.5, 0.2);
        let a = envelope(&pq, &[x], &cfg).unwrap().value;
        let b = envelope(&pq, &[x + 1e-6], &cfg).unwrap().value;
        prop_assert!((a - b).abs() < 1e-4);
    }
}

#[test]
fn gradient_formula_matches_differences_away_from_kinks() {
    let o = problem_catalog_get("oscillatory").unwrap();
    let cfg = EnvelopeConfig::new(1.5, 0.2);
    let mut rng = seeded(31);
    let mut checked = 0;
    for _ in 0..200 {
        let x = rng.gen_range(-2.5..=2.5);
        let g = candidate_gradient(&o, &[x], &cfg).unwrap();
        if !g.single_valued || g.at_kink || !g.certified {
            continue;
        }
        let h = 1e-5 * (1.0 + x.abs());
        let l = envelope(&o, &[x - h], &cfg).unwrap();
        let r = envelope(&o, &[x + h], &cfg).unwrap();
        if (l.hifbs.representative[0] - g.y[0]).abs() > 1e-3 || (r.hifbs.representative[0] - g.y[0]).abs() > 1e-3 {
            continue;
        }
        let fd = fd_gradient(&o, &[x], &cfg, Some(h)).unwrap();
        assert!((fd[0] - g.v[0]).abs() <= 1e-4 * (1.0 + g.v[0].abs()), "x = {x}: {} vs {}", fd[0], g.v[0]);
        checked += 1;
    }
    assert!(checked > 100, "{checked}");
}

#[test]
fn iteration_descends_and_terminates() {
    let o = problem_catalog_get("oscillatory").unwrap();
    let cfg = EnvelopeConfig::new(1.5, 0.2);
    let mut rng = seeded(32);
    for _ in 0..5 {
        let x0 = rng.gen_range(-2.5..=2.5);
        let t = hifba_run(&o, &[x0], &cfg, 500, 1e-6).unwrap();
        assert!(t.diagnostics.is_empty(), "{:?}", t.diagnostics);
        for w in t.records.windows(2) {
            assert!(w[1].phi <= w[0].env + cfg.tol_val);
            assert!(w[0].env <= w[0].phi + cfg.tol_val);
        }
        assert!(t.final_residual() <= 1e-6);
    }
}
