//! Command implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hifbe::analysis::majorant::{estimate_phi_holder_constant, majorant_value, phi_derivative};
use hifbe::analysis::{linspace, run_suite, suite_ok, Suite};
use hifbe::fmt::{flag, num};
use hifbe::rng::derive_seed;
use hifbe::{hifba_run, hifbe as envelope_eval, problem_catalog_get, CompositeProblem, EnvelopeConfig, Error, StopReason};
use rayon::prelude::*;

use crate::config::Settings;
use crate::svg::{line_plot, Series};
use crate::{usage, Failure, Shared};

pub const ENVELOPE_HEADER: &str = "x,phi,envelope,tx,residual,single_valued,certified";
pub const FIGURES: [&str; 5] = ["1a", "1b", "2a", "2b", "2c"];

fn usage_err(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn path_str(p: PathBuf) -> String {
    p.display().to_string()
}

fn base(shared: Shared) -> Result<Settings, Failure> {
    let mut s = Settings::load(shared.config.as_deref()).map_err(usage_err)?;
    s.set("problem", shared.problem);
    s.set("p", shared.p.map(num));
    s.set("gamma", shared.gamma.map(num));
    s.set("seed", shared.seed.map(|v| v.to_string()));
    s.set("plot", shared.plot.map(path_str));
    s.set_default("seed", "0");
    Ok(s)
}

fn problem_of(s: &Settings) -> Result<CompositeProblem, Failure> {
    let id: String = s.require("problem").map_err(usage_err)?;
    Ok(problem_catalog_get(&id)?)
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Solver(format!("cannot create {}: {e}", dir.display())))?;
            }
            std::fs::write(p, content).map_err(|e| Failure::Solver(format!("cannot write {}: {e}", p.display())))
        }
    }
}

fn with_header(header: &[String], body: &str) -> String {
    let mut out = header.join("\n");
    out.push('\n');
    out.push_str(body);
    out
}

pub struct Row {
    pub x: f64,
    pub phi: f64,
    pub envelope: f64,
    pub tx: f64,
    pub residual: f64,
    pub single_valued: bool,
    pub certified: bool,
}

/// Envelope rows at `n` uniform points, in sample order. Undefined envelopes
/// give `nan` rows; the second value counts them.
pub fn sample_rows(problem: &CompositeProblem, cfg: &EnvelopeConfig, xmin: f64, xmax: f64, n: usize) -> Result<(Vec<Row>, usize), Failure> {
    let rows: Vec<Row> = linspace(xmin, xmax, n)
        .into_par_iter()
        .map(|x| -> Result<Row, Failure> {
            let phi = problem.value(&[x])?.to_f64();
            match envelope_eval(problem, &[x], cfg) {
                Ok(ev) => Ok(Row {
                    x,
                    phi,
                    envelope: ev.value,
                    tx: ev.hifbs.representative[0],
                    residual: ev.residual[0],
                    single_valued: ev.single_valued,
                    certified: ev.certified,
                }),
                Err(Error::EnvelopeUndefined { .. }) => Ok(Row {
                    x,
                    phi,
                    envelope: f64::NAN,
                    tx: f64::NAN,
                    residual: f64::NAN,
                    single_valued: false,
                    certified: false,
                }),
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<_, _>>()?;
    let undefined = rows.iter().filter(|r| r.envelope.is_nan()).count();
    Ok((rows, undefined))
}

pub fn rows_csv(rows: &[Row]) -> String {
    let mut out = String::from(ENVELOPE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(r.x),
            num(r.phi),
            num(r.envelope),
            num(r.tx),
            num(r.residual),
            flag(r.single_valued),
            flag(r.certified)
        );
    }
    out
}

fn envelope_plot(title: &str, header: &[String], rows: &[Row], gamma: f64) -> String {
    let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let phi: Vec<f64> = rows.iter().map(|r| r.phi).collect();
    let env: Vec<f64> = rows.iter().map(|r| r.envelope).collect();
    let label = format!("envelope, gamma = {}", num(gamma));
    line_plot(
        title,
        header,
        &[
            Series { name: "phi", xs: &xs, ys: &phi },
            Series { name: &label, xs: &xs, ys: &env },
        ],
        None,
    )
}

struct Grid {
    xmin: f64,
    xmax: f64,
    n: usize,
}

fn grid_of(s: &Settings) -> Result<Grid, Failure> {
    let xmin: f64 = s.require("xmin").map_err(usage_err)?;
    let xmax: f64 = s.require("xmax").map_err(usage_err)?;
    let n: usize = s.require("n").map_err(usage_err)?;
    if !(xmin < xmax) {
        return Err(usage_err(format!("need xmin < xmax, got {xmin} and {xmax}")));
    }
    if n < 2 {
        return Err(usage_err(format!("need n >= 2, got {n}")));
    }
    Ok(Grid { xmin, xmax, n })
}

fn one_dimensional(p: &CompositeProblem) -> Result<(), Failure> {
    if p.dim() != 1 {
        return Err(usage_err(format!("problem `{}` is {}-dimensional; envelope sampling needs dimension 1", p.id, p.dim())));
    }
    Ok(())
}

/// Writes CSV and optional SVG for an envelope sweep; fails with exit code 2
/// after writing when any sample is undefined.
fn envelope_outputs(s: &Settings, command: &str, csv_path: Option<&Path>, svg_path: Option<&Path>) -> Result<(), Failure> {
    let problem = problem_of(s)?;
    one_dimensional(&problem)?;
    let cfg = s.envelope_config().map_err(usage_err)?;
    let g = grid_of(s)?;
    let (rows, undefined) = sample_rows(&problem, &cfg, g.xmin, g.xmax, g.n)?;
    let header = s.header(command, "#");
    emit(csv_path, &with_header(&header, &rows_csv(&rows)))?;
    if let Some(svg) = svg_path {
        let title = format!("{}: p = {}, gamma = {}", problem.id, num(cfg.p), num(cfg.gamma));
        emit(Some(svg), &envelope_plot(&title, &header, &rows, cfg.gamma))?;
    }
    if undefined > 0 {
        return Err(Failure::Undefined(format!("{undefined} of {} samples", rows.len())));
    }
    Ok(())
}

fn order_default(s: &mut Settings) -> Result<CompositeProblem, Failure> {
    let problem = problem_of(s)?;
    s.set_default("p", num(1.0 + problem.f.nu));
    Ok(problem)
}

pub fn envelope(shared: Shared, xmin: Option<f64>, xmax: Option<f64>, n: Option<usize>, out: Option<PathBuf>) -> Result<(), Failure> {
    let mut s = base(shared)?;
    s.set("xmin", xmin.map(num));
    s.set("xmax", xmax.map(num));
    s.set("n", n.map(|v| v.to_string()));
    s.set("out", out.map(path_str));
    order_default(&mut s)?;
    s.set_default("gamma", "1");
    s.set_default("xmin", "-2.5");
    s.set_default("xmax", "2.5");
    s.set_default("n", "1001");
    let out = s.raw("out").map(PathBuf::from);
    let plot = s.raw("plot").map(PathBuf::from);
    envelope_outputs(&s, "envelope", out.as_deref(), plot.as_deref())
}

fn parse_point(v: &str) -> Result<Vec<f64>, Failure> {
    v.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| usage_err(format!("invalid coordinate `{c}` in x0"))))
        .collect()
}

pub fn solve(shared: Shared, x0: Option<String>, tol: Option<f64>, max_iters: Option<usize>, out: Option<PathBuf>) -> Result<(), Failure> {
    let mut s = base(shared)?;
    s.set("x0", x0);
    s.set("tol", tol.map(num));
    s.set("max_iters", max_iters.map(|v| v.to_string()));
    s.set("out", out.map(path_str));
    let problem = order_default(&mut s)?;
    let gamma = if problem.f.l_nu > 0.0 { 0.5 / problem.f.l_nu } else { 1.0 };
    s.set_default("gamma", num(gamma));
    s.set_default("tol", "1e-06");
    s.set_default("max_iters", "500");
    let cfg = s.envelope_config().map_err(usage_err)?;
    let x0 = parse_point(&s.require::<String>("x0").map_err(usage_err)?)?;
    let tol: f64 = s.require("tol").map_err(usage_err)?;
    let max_iters: usize = s.require("max_iters").map_err(usage_err)?;
    let trace = hifba_run(&problem, &x0, &cfg, max_iters, tol)?;
    for d in &trace.diagnostics {
        eprintln!("warning: {d}");
    }
    let out = s.raw("out").map(PathBuf::from);
    let header = s.header("solve", "#");
    emit(out.as_deref(), &with_header(&header, &trace.to_csv()))?;
    if let Some(plot) = s.raw("plot") {
        let ks: Vec<f64> = trace.records.iter().map(|r| r.k as f64).collect();
        let phi: Vec<f64> = trace.records.iter().map(|r| r.phi).collect();
        let env: Vec<f64> = trace.records.iter().map(|r| r.env).collect();
        let svg = line_plot(
            &format!("{}: descent trace", problem.id),
            &header,
            &[Series { name: "phi(x_k)", xs: &ks, ys: &phi }, Series { name: "envelope(x_k)", xs: &ks, ys: &env }],
            None,
        );
        emit(Some(Path::new(plot)), &svg)?;
    }
    let prefix = if out.is_none() { "# " } else { "" };
    println!("{prefix}stop_reason = {}", trace.stop_reason);
    println!("{prefix}final_residual = {}", num(trace.final_residual()));
    if trace.stop_reason == StopReason::EnvelopeUndefined {
        return Err(Failure::Solver(trace.diagnostics.join("; ")));
    }
    Ok(())
}

pub fn check(shared: Shared, suite: Option<String>, out: Option<PathBuf>) -> Result<(), Failure> {
    let mut s = base(shared)?;
    s.set("suite", suite);
    s.set("out", out.map(path_str));
    s.set_default("suite", "all");
    let name: String = s.require("suite").map_err(usage_err)?;
    let suite: Suite = name.parse().map_err(|e: Error| usage_err(format!("{e}\n{}", usage("check"))))?;
    let seed: u64 = s.require("seed").map_err(usage_err)?;
    let filter = s.raw("problem").map(str::to_string);
    let reports = run_suite(suite, filter.as_deref(), seed)?;
    let mut json = serde_json::to_string_pretty(&reports).map_err(|e| Failure::Solver(e.to_string()))?;
    json.push('\n');
    emit(s.raw("out").map(Path::new), &json)?;
    let failed = reports.iter().filter(|r| !r.status.is_ok()).count();
    eprintln!("{} reports, {failed} failed", reports.len());
    if !suite_ok(&reports) {
        return Err(Failure::Check);
    }
    Ok(())
}

pub fn repro(shared: Shared, figure: Option<String>, outdir: Option<PathBuf>) -> Result<(), Failure> {
    let mut s = base(shared)?;
    s.set("figure", figure);
    s.set("outdir", outdir.map(path_str));
    s.set_default("outdir", "repro");
    let fig: String = s.require("figure").map_err(|m| usage_err(format!("{m}\n{}", usage("repro"))))?;
    if !FIGURES.contains(&fig.as_str()) {
        return Err(usage_err(format!("unknown figure `{fig}` (valid: {})\n{}", FIGURES.join(", "), usage("repro"))));
    }
    let dir = PathBuf::from(s.raw("outdir").unwrap_or("repro"));
    let csv = dir.join(format!("fig{fig}.csv"));
    let svg = s.raw("plot").map(PathBuf::from).unwrap_or_else(|| dir.join(format!("fig{fig}.svg")));
    match fig.as_str() {
        "1a" | "1b" => majorant_figure(&mut s, &fig, &csv, &svg),
        _ => {
            let gamma = match fig.as_str() {
                "2a" => "2",
                "2b" => "0.2",
                _ => "1",
            };
            s.set_default("problem", "oscillatory");
            s.set_default("p", "1.5");
            s.set_default("gamma", gamma);
            s.set_default("xmin", "-2.5");
            s.set_default("xmax", "2.5");
            s.set_default("n", "1001");
            envelope_outputs(&s, "repro", Some(&csv), Some(&svg))
        }
    }
}

pub const MAJORANT_ANCHOR: f64 = 0.5;

fn majorant_figure(s: &mut Settings, fig: &str, csv: &Path, svg: &Path) -> Result<(), Failure> {
    s.set_default("problem", "majorant-demo");
    s.set_default("xmin", "-2");
    s.set_default("xmax", "3");
    s.set_default("n", "1001");
    let problem = problem_of(s)?;
    one_dimensional(&problem)?;
    let g = grid_of(s)?;
    let seed: u64 = s.require("seed").map_err(usage_err)?;
    let exponents = if fig == "1a" { [0.5, 1.0] } else { [0.5, 0.2] };
    let xs = linspace(g.xmin, g.xmax, g.n);
    let phi: Vec<f64> = xs.iter().map(|&x| problem.value(&[x]).map(|v| v.to_f64())).collect::<Result<_, _>>()?;
    let phi_anchor = problem.value(&[MAJORANT_ANCHOR])?.to_f64();
    let slope = phi_derivative(&problem, MAJORANT_ANCHOR)?;
    let mut header = s.header("repro", "#");
    header.push(format!("# anchor = {}", num(MAJORANT_ANCHOR)));
    let mut curves = Vec::new();
    for mu in exponents {
        let id = format!("majorant/{}/mu={mu}", problem.id);
        let l = estimate_phi_holder_constant(&problem, mu, MAJORANT_ANCHOR, g.xmin, g.xmax, derive_seed(seed, &id))?;
        header.push(format!("# L_{mu} = {}", num(l)));
        let m: Vec<f64> = xs.iter().map(|&y| majorant_value(phi_anchor, slope, MAJORANT_ANCHOR, l, mu, y)).collect();
        curves.push((format!("M_{mu}"), m));
    }
    let mut body = format!("x,phi,{},{}\n", curves[0].0, curves[1].0);
    for i in 0..xs.len() {
        let _ = writeln!(body, "{},{},{},{}", num(xs[i]), num(phi[i]), num(curves[0].1[i]), num(curves[1].1[i]));
    }
    emit(Some(csv), &with_header(&header, &body))?;
    let lo = phi.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let series = [
        Series { name: "phi", xs: &xs, ys: &phi },
        Series { name: &curves[0].0, xs: &xs, ys: &curves[0].1 },
        Series { name: &curves[1].0, xs: &xs, ys: &curves[1].1 },
    ];
    let title = format!("{}: majorants anchored at {}", problem.id, num(MAJORANT_ANCHOR));
    emit(Some(svg), &line_plot(&title, &header, &series, Some((lo - 0.5 * span, hi + span))))
}
