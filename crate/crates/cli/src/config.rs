//! Flat `key = value` settings merged from a file and command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use hifbe::EnvelopeConfig;

pub const KEYS: &[&str] = &[
    "problem",
    "p",
    "gamma",
    "seed",
    "xmin",
    "xmax",
    "n",
    "out",
    "outdir",
    "plot",
    "x0",
    "tol",
    "max_iters",
    "suite",
    "figure",
    "inner.bracket_radius",
    "inner.grid_points",
    "inner.tol_y",
    "inner.tol_val",
    "inner.tol_tie",
    "inner.multistarts",
    "inner.max_inner_iters",
    "inner.use_analytic",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected `key = value`, got `{}`", i + 1, raw.trim()))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(format!("config line {}: unknown key `{k}`", i + 1));
            }
            s.map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(s)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                Settings::parse(&text)
            }
        }
    }

    /// Flag values replace file values.
    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.map.insert(key.to_string(), v);
        }
    }

    pub fn set_default(&mut self, key: &str, value: impl Into<String>) {
        self.map.entry(key.to_string()).or_insert_with(|| value.into());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| format!("invalid value `{v}` for `{key}`")),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, String> {
        self.get(key)?.ok_or_else(|| format!("missing required setting `{key}`"))
    }

    pub fn envelope_config(&self) -> Result<EnvelopeConfig, String> {
        let mut cfg = EnvelopeConfig::new(self.require("p")?, self.require("gamma")?);
        cfg.bracket_radius = self.get("inner.bracket_radius")?;
        if let Some(v) = self.get("inner.grid_points")? {
            cfg.grid_points = v;
        }
        if let Some(v) = self.get("inner.tol_y")? {
            cfg.tol_y = v;
        }
        if let Some(v) = self.get("inner.tol_val")? {
            cfg.tol_val = v;
        }
        if let Some(v) = self.get("inner.tol_tie")? {
            cfg.tol_tie = v;
        }
        if let Some(v) = self.get("inner.multistarts")? {
            cfg.multistarts = v;
        }
        if let Some(v) = self.get("inner.max_inner_iters")? {
            cfg.max_inner_iters = v;
        }
        if let Some(v) = self.get("inner.use_analytic")? {
            cfg.use_analytic = v;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    /// Comment lines with the tool version, command and every resolved key.
    pub fn header(&self, command: &str, prefix: &str) -> Vec<String> {
        let mut out = vec![
            format!("{prefix} hifbe {}", env!("CARGO_PKG_VERSION")),
            format!("{prefix} command = {command}"),
        ];
        out.extend(self.map.iter().map(|(k, v)| format!("{prefix} {k} = {v}")));
        out
    }
}
