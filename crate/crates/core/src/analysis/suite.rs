//! Named bundles of checks run across the catalog.

use std::str::FromStr;

use super::report::CheckReport;
use super::{
    check_envelope_regularity, check_envelope_relations, check_majorant, check_p_calm, check_stationarity_inclusion,
    check_tau_containment, check_uniform_shrinkage, estimate_calm_constant, estimate_kappa_p, linspace,
};
use crate::algo::{hifba_run, scaled_gradient_check, ScaledCheck};
use crate::catalog::{problem_catalog_get, CATALOG_IDS};
use crate::error::{Error, Result};
use crate::inner::EnvelopeConfig;
use crate::oracle::CompositeProblem;
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Envelope,
    Calm,
    Regularity,
    Majorant,
    Kappa,
    Algo,
}

pub const SUITE_NAMES: [&str; 7] = ["all", "envelope", "calm", "regularity", "majorant", "kappa", "algo"];

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "envelope" => Suite::Envelope,
            "calm" => Suite::Calm,
            "regularity" => Suite::Regularity,
            "majorant" => Suite::Majorant,
            "kappa" => Suite::Kappa,
            "algo" => Suite::Algo,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown suite `{s}` (valid: {})",
                    SUITE_NAMES.join(", ")
                )))
            }
        })
    }
}

/// True when no report failed.
pub fn suite_ok(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.status.is_ok())
}

fn one_dimensional(filter: Option<&str>) -> Result<Vec<CompositeProblem>> {
    let ids: Vec<&str> = match filter {
        Some(id) => vec![id],
        None => CATALOG_IDS.to_vec(),
    };
    let mut out = Vec::new();
    for id in ids {
        let p = problem_catalog_get(id)?;
        if p.dim() == 1 {
            out.push(p);
        }
    }
    Ok(out)
}

fn order(p: &CompositeProblem) -> f64 {
    1.0 + p.f.nu
}

fn wanted(filter: Option<&str>, id: &str) -> bool {
    filter.is_none_or(|f| f == id)
}

/// Runs `suite`, optionally restricted to one problem id. Deterministic in
/// `seed`.
pub fn run_suite(suite: Suite, filter: Option<&str>, seed: u64) -> Result<Vec<CheckReport>> {
    if let Some(id) = filter {
        problem_catalog_get(id)?;
    }
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Envelope {
        out.extend(envelope_suite(filter, seed)?);
    }
    if all || suite == Suite::Calm {
        out.extend(calm_suite(filter, seed)?);
    }
    if all || suite == Suite::Regularity {
        out.extend(regularity_suite(filter, seed)?);
    }
    if all || suite == Suite::Majorant {
        if wanted(filter, "majorant-demo") {
            let m = problem_catalog_get("majorant-demo")?;
            out.extend(check_majorant(&m, &[0.5, 1.0, 0.2], 0.5, &linspace(-2.0, 3.0, 1001), seed)?);
        }
    }
    if all || suite == Suite::Kappa {
        out.extend(kappa_suite(seed)?);
    }
    if all || suite == Suite::Algo {
        out.extend(algo_suite(filter, seed)?);
    }
    Ok(out)
}

fn envelope_suite(filter: Option<&str>, seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let grid = linspace(-2.5, 2.5, 201);
    for p in one_dimensional(filter)? {
        let cfg = EnvelopeConfig::new(order(&p), 1.0);
        let mut gammas = vec![0.2, 1.0, 2.0];
        if p.f.l_nu > 0.0 {
            gammas.push(0.9 / p.f.l_nu);
        }
        out.extend(check_envelope_relations(&p, &cfg, &gammas, &grid)?);
        if p.g.subdiff_1d.is_some() {
            let mut worst: Option<CheckReport> = None;
            for x in linspace(-2.0, 2.0, 9) {
                let r = check_stationarity_inclusion(&p, x, &cfg.with_gamma(0.2))?;
                if worst.as_ref().is_none_or(|w| r.worst_violation > w.worst_violation || (w.passed && !r.passed)) {
                    worst = Some(r);
                }
            }
            out.extend(worst);
        }
        let r = 2.0;
        let gamma = 0.2;
        let gamma_hat = 2.0 * 4f64.powf(order(&p) - 1.0) * gamma;
        out.push(check_tau_containment(&p, &cfg.with_gamma(gamma), r, gamma_hat, 100, seed)?);
    }
    Ok(out)
}

fn calm_suite(filter: Option<&str>, seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let grid = linspace(-3.0, 3.0, 1201);
    for p in one_dimensional(filter)? {
        let Some((xbar, _)) = p.known_minimizer.clone() else { continue };
        let pp = order(&p);
        let m = estimate_calm_constant(&p, xbar[0], pp, &grid)?;
        out.push(check_p_calm(&p, xbar[0], m, pp, &grid, &EnvelopeConfig::default())?);
    }
    if wanted(filter, "power-q") {
        let pq = problem_catalog_get("power-q")?;
        let radii: Vec<f64> = (0..16).map(|k| 2f64.powi(-k)).collect();
        out.push(check_uniform_shrinkage(&pq, &EnvelopeConfig::new(1.5, 0.3), 0.0, 0.1, &radii, 32, seed)?);
    }
    Ok(out)
}

fn regularity_suite(filter: Option<&str>, seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for id in ["zero", "power-q", "oscillatory"] {
        if !wanted(filter, id) {
            continue;
        }
        let p = problem_catalog_get(id)?;
        let cfg = EnvelopeConfig::new(order(&p), 0.2);
        out.extend(check_envelope_regularity(&p, &cfg, 2.0, 500, seed)?);
    }
    Ok(out)
}

fn kappa_suite(seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for p in [2.0, 1.75, 1.5, 1.25] {
        let id = format!("kappa/p={p}");
        let s = derive_seed(seed, &id);
        let k1 = estimate_kappa_p(p, 1.0, 1, 10_000, s)?;
        let k2 = estimate_kappa_p(p, 2.0, 1, 10_000, s)?;
        let mut r = CheckReport::new(&id, s)
            .constant("p", p)
            .constant("kappa_hat_r1", k1)
            .constant("kappa_hat_r2", k2);
        r.n_samples = 20_000;
        r.worst_violation = ((k1 - k2).abs() / k1 - 0.02).max(0.0);
        if p == 2.0 {
            r.worst_violation = r.worst_violation.max((k1 - 0.99).abs());
        }
        out.push(r.conclude(0.0));
    }
    Ok(out)
}

fn algo_suite(filter: Option<&str>, seed: u64) -> Result<Vec<CheckReport>> {
    use rand::Rng;
    let mut out = Vec::new();
    if wanted(filter, "oscillatory") {
        let o = problem_catalog_get("oscillatory")?;
        let cfg = EnvelopeConfig::new(1.5, 0.2);
        let id = "algo/descent/oscillatory";
        let s = derive_seed(seed, id);
        let mut rng = seeded(s);
        let mut descent = CheckReport::new(id, s);
        let mut scaled = CheckReport::new("algo/scaled-gradient/oscillatory", s);
        let mut worst_res: f64 = 0.0;
        for _ in 0..3 {
            let x0 = rng.gen_range(-2.5..=2.5);
            let t = hifba_run(&o, &[x0], &cfg, 500, 1e-6)?;
            for w in t.records.windows(2) {
                let v = (w[1].phi - w[0].phi - 1e-10).max(0.0);
                if v > descent.worst_violation {
                    descent.worst_violation = v;
                    descent.witness = Some(w[1].x.clone());
                }
            }
            worst_res = worst_res.max(t.final_residual());
            descent.n_samples += t.records.len();
            for rec in &t.records {
                if let ScaledCheck::Checked(v) = scaled_gradient_check(&o, rec, &cfg)? {
                    scaled.n_samples += 1;
                    if v > scaled.worst_violation {
                        scaled.worst_violation = v;
                        scaled.witness = Some(rec.x.clone());
                    }
                }
            }
        }
        let res_excess = (worst_res - 1e-6).max(0.0);
        descent.worst_violation = descent.worst_violation.max(res_excess);
        out.push(descent.constant("terminal_residual", worst_res).conclude(0.0));
        out.push(scaled.conclude(100.0 * cfg.tol_y));
    }
    if wanted(filter, "power-q") {
        let pq = problem_catalog_get("power-q")?;
        let m = estimate_calm_constant(&pq, 0.0, 1.5, &linspace(-3.0, 3.0, 1201))?;
        let gamma = super::fixed_point_gamma(pq.f.l_nu, 1.5, m);
        let t = hifba_run(&pq, &[0.0], &EnvelopeConfig::new(1.5, gamma), 10, 1e-8)?;
        let mut r = CheckReport::new("algo/fixed-point/power-q", 0)
            .constant("gamma", gamma)
            .constant("M", m)
            .constant("iterations", t.records.len() as f64);
        r.n_samples = 1;
        r.worst_violation = if t.records.len() == 1 { t.final_residual() } else { f64::INFINITY };
        out.push(r.conclude(1e-8));
    }
    Ok(out)
}
