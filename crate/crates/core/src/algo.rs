//! The iteration `x_{k+1} ∈ T(x_k)` with trace capture.

use serde::{Deserialize, Serialize};

use crate::envelope::{gradient_at, hifbe};
use crate::error::{Error, Result};
use crate::fmt::num;
use crate::inner::EnvelopeConfig;
use crate::linalg::{add, axpy, matvec, norm};
use crate::oracle::CompositeProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub phi: f64,
    pub env: f64,
    pub res_norm: f64,
    /// `x_{k+1} - x_k` (the representative minus the iterate).
    pub d: Vec<f64>,
    /// Other HiFBS minimizers at `x_k` that were not selected.
    pub alternates: Vec<Vec<f64>>,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    ResidualTol,
    MaxIters,
    EnvelopeUndefined,
    Stalled,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::ResidualTol => "residual-tol",
            StopReason::MaxIters => "max-iters",
            StopReason::EnvelopeUndefined => "envelope-undefined",
            StopReason::Stalled => "stalled",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HifbaTrace {
    pub records: Vec<TraceRecord>,
    pub stop_reason: StopReason,
    /// Numerical faults observed along the run, e.g. broken descent.
    pub diagnostics: Vec<String>,
}

impl HifbaTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn final_residual(&self) -> f64 {
        self.last().map(|r| r.res_norm).unwrap_or(f64::NAN)
    }

    /// CSV body with header `k,x,phi,env,res_norm,d` (coordinates expanded
    /// as `x1..xn`, `d1..dn` when `n > 1`).
    pub fn to_csv(&self) -> String {
        let n = self.records.first().map(|r| r.x.len()).unwrap_or(1);
        let cols = |name: &str| -> Vec<String> {
            if n == 1 {
                vec![name.to_string()]
            } else {
                (1..=n).map(|i| format!("{name}{i}")).collect()
            }
        };
        let mut header = vec!["k".to_string()];
        header.extend(cols("x"));
        header.extend(["phi", "env", "res_norm"].map(String::from));
        header.extend(cols("d"));
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.records {
            let mut row = vec![r.k.to_string()];
            row.extend(r.x.iter().map(|v| num(*v)));
            row.extend([num(r.phi), num(r.env), num(r.res_norm)]);
            row.extend(r.d.iter().map(|v| num(*v)));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// The next iterate: the representative of `T(x)`.
pub fn hifba_step(problem: &CompositeProblem, x: &[f64], cfg: &EnvelopeConfig) -> Result<Vec<f64>> {
    Ok(hifbe(problem, x, cfg)?.hifbs.representative)
}

const STALL_LIMIT: usize = 10;

/// Runs the iteration from `x0` until `‖R(x_k)‖ <= res_tol` or `max_iters`
/// records have been written.
///
/// When `p = 1 + ν` and `γ L_ν < 1` the chain `φ(x_{k+1}) <= φ_γ(x_k) <= φ(x_k)`
/// is checked at every step; breaks beyond `tol_val` land in `diagnostics`.
pub fn hifba_run(
    problem: &CompositeProblem,
    x0: &[f64],
    cfg: &EnvelopeConfig,
    max_iters: usize,
    res_tol: f64,
) -> Result<HifbaTrace> {
    cfg.validate()?;
    if max_iters == 0 {
        return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
    }
    if !(res_tol > 0.0) {
        return Err(Error::InvalidConfig(format!("res_tol must be > 0, got {res_tol}")));
    }
    let descent_applies = (cfg.p - (1.0 + problem.f.nu)).abs() < 1e-12 && cfg.gamma * problem.f.l_nu < 1.0;
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut diagnostics = Vec::new();
    let mut x = x0.to_vec();
    let mut stall = 0usize;
    let mut prev_env: Option<f64> = None;
    for k in 0..max_iters {
        let phi = problem.value(&x)?.to_f64();
        let ev = match hifbe(problem, &x, cfg) {
            Ok(ev) => ev,
            Err(Error::EnvelopeUndefined { ray, .. }) => {
                diagnostics.push(format!("envelope undefined at iterate {k}, ray {ray:?}"));
                return Ok(HifbaTrace {
                    records,
                    stop_reason: StopReason::EnvelopeUndefined,
                    diagnostics,
                });
            }
            Err(e) => return Err(e),
        };
        if descent_applies {
            if ev.value > phi + cfg.tol_val {
                diagnostics.push(format!("numerical-fault: env {} > phi {} at iterate {k}", ev.value, phi));
            }
            if let Some(pe) = prev_env {
                if phi > pe + cfg.tol_val {
                    diagnostics.push(format!("numerical-fault: phi {phi} > previous env {pe} at iterate {k}"));
                }
            }
        }
        let y = ev.hifbs.representative.clone();
        let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
        let res_norm = norm(&ev.residual);
        let alternates = ev.hifbs.minimizers.iter().filter(|m| **m != y).cloned().collect();
        records.push(TraceRecord {
            k,
            x: x.clone(),
            phi,
            env: ev.value,
            res_norm,
            d,
            alternates,
            certified: ev.certified,
        });
        if res_norm <= res_tol {
            return Ok(HifbaTrace {
                records,
                stop_reason: StopReason::ResidualTol,
                diagnostics,
            });
        }
        stall = if res_norm < cfg.tol_y { stall + 1 } else { 0 };
        if stall >= STALL_LIMIT {
            return Ok(HifbaTrace {
                records,
                stop_reason: StopReason::Stalled,
                diagnostics,
            });
        }
        prev_env = Some(ev.value);
        x = y;
    }
    Ok(HifbaTrace {
        records,
        stop_reason: StopReason::MaxIters,
        diagnostics,
    })
}

/// Outcome of the scaled-gradient identity check at one trace point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScaledCheck {
    /// `‖((1/γ)‖d‖^{p-2} I - ∇²f(x)) d + ∇φ_γ(x)‖`.
    Checked(f64),
    Skipped(String),
}

/// Evaluates `((1/γ)‖d‖^{p-2} I - ∇²f(x)) d + v` with `v` the envelope
/// gradient at the record's iterate; skipped at fixed points.
pub fn scaled_gradient_check(problem: &CompositeProblem, record: &TraceRecord, cfg: &EnvelopeConfig) -> Result<ScaledCheck> {
    let nd = norm(&record.d);
    if nd <= cfg.tol_y {
        return Ok(ScaledCheck::Skipped("at-kink: step within tol_y of zero".into()));
    }
    if !record.alternates.is_empty() {
        return Ok(ScaledCheck::Skipped("HiFBS is not single-valued".into()));
    }
    let h = problem.f.hess(&record.x)?;
    let y = add(&record.x, &record.d);
    let v = gradient_at(problem, &record.x, &y, cfg)?;
    let hd = matvec(&h, &record.d);
    let scaled = axpy(&hd, -1.0, &record.d.iter().map(|c| c * nd.powf(cfg.p - 2.0) / cfg.gamma).collect::<Vec<_>>());
    let lhs: Vec<f64> = scaled.iter().zip(&v).map(|(a, b)| -a + b).collect();
    Ok(ScaledCheck::Checked(norm(&lhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::problem_catalog_get;

    #[test]
    fn zero_problem_stops_immediately() {
        let z = problem_catalog_get("zero").unwrap();
        let t = hifba_run(&z, &[3.0], &EnvelopeConfig::new(2.0, 1.0), 100, 1e-6).unwrap();
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.stop_reason, StopReason::ResidualTol);
        assert_eq!(t.final_residual(), 0.0);
        assert_eq!(hifba_step(&z, &[1.0], &EnvelopeConfig::new(2.0, 1.0)).unwrap(), vec![1.0]);
    }

    #[test]
    fn quadratic_contracts_geometrically() {
        let q = problem_catalog_get("quad-free1d").unwrap();
        let cfg = EnvelopeConfig::new(2.0, 0.5);
        assert_eq!(hifba_step(&q, &[2.0], &cfg).unwrap(), vec![1.0]);
        let t = hifba_run(&q, &[2.0], &cfg, 100, 1e-6).unwrap();
        assert_eq!(t.records.len(), 21);
        for r in &t.records {
            assert_eq!(r.x[0], 2.0 * 0.5f64.powi(r.k as i32));
            assert_eq!(r.res_norm, -r.d[0]);
        }
        for w in t.records.windows(2) {
            assert_eq!(w[0].x[0] + w[0].d[0], w[1].x[0]);
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let q = problem_catalog_get("quad-free1d").unwrap();
        let t = hifba_run(&q, &[2.0], &EnvelopeConfig::new(2.0, 0.5), 2, 1e-6).unwrap();
        assert_eq!(t.stop_reason, StopReason::MaxIters);
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,x,phi,env,res_norm,d");
        assert_eq!(lines[1], "0,2,2,1,1,-1");
        let q2 = problem_catalog_get("quad-free").unwrap();
        let t2 = hifba_run(&q2, &[0.0, 0.0], &EnvelopeConfig::new(2.0, 0.2), 1, 1e-6).unwrap();
        assert!(t2.to_csv().starts_with("k,x1,x2,phi,env,res_norm,d1,d2\n"));
    }

    #[test]
    fn scaled_gradient_identity_on_quadratic() {
        let q = problem_catalog_get("quad-free1d").unwrap();
        let cfg = EnvelopeConfig::new(2.0, 0.5);
        let t = hifba_run(&q, &[2.0], &cfg, 1, 1e-6).unwrap();
        match scaled_gradient_check(&q, &t.records[0], &cfg).unwrap() {
            ScaledCheck::Checked(r) => assert!(r < 1e-15),
            s => panic!("{s:?}"),
        }
        let z = problem_catalog_get("zero").unwrap();
        let tz = hifba_run(&z, &[1.0], &cfg, 1, 1e-6).unwrap();
        assert!(matches!(scaled_gradient_check(&z, &tz.records[0], &cfg).unwrap(), ScaledCheck::Skipped(_)));
    }

    #[test]
    fn invalid_arguments() {
        let z = problem_catalog_get("zero").unwrap();
        let cfg = EnvelopeConfig::new(2.0, 1.0);
        assert!(hifba_run(&z, &[0.0], &cfg, 0, 1e-6).is_err());
        assert!(hifba_run(&z, &[0.0], &cfg, 10, 0.0).is_err());
    }
}
