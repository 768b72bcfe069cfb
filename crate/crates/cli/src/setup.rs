//! Parameter resolution: preset, then config file, then environment, then
//! `--set`, each layer overriding the previous one.

use std::path::Path;

use hybrid_cooling::detunings;
use hybrid_cooling::params::PARAM_NAMES;
use hybrid_cooling::presets::{self, Figure};
use hybrid_cooling::{Error, ModelParams};

use crate::table::{fmt_f64, Table};
use crate::CliError;

pub const ENV_PREFIX: &str = "HYBRIDCOOL_";

const DETUNINGS: [&str; 3] = ["delta_c", "delta_g", "delta_gr"];

#[derive(Debug, Clone)]
pub struct Override {
    pub key: String,
    pub value: f64,
    pub source: &'static str,
}

#[derive(Debug, Clone)]
pub struct Setup {
    pub base: ModelParams,
    pub preset: Option<Figure>,
    pub overrides: Vec<Override>,
}

fn config_keys(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.split('#').next())
        .filter_map(|l| l.split_once('='))
        .map(|(k, _)| k.trim().to_string())
        .collect()
}

fn parse_assignment(s: &str) -> Result<(String, f64), CliError> {
    let bad = || CliError::Usage(format!("expected key=value, got `{s}`"));
    let (k, v) = s.split_once('=').ok_or_else(bad)?;
    let k = k.trim();
    if !PARAM_NAMES.contains(&k) {
        return Err(CliError::Usage(format!("unknown parameter `{k}`")));
    }
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    Ok((k.to_string(), v))
}

impl Setup {
    /// `start` defaults to the preset's parameters, or the flagship set.
    pub fn resolve(
        start: Option<ModelParams>,
        preset: Option<Figure>,
        config: Option<&Path>,
        set: &[String],
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<Self, CliError> {
        let mut base = start.unwrap_or_else(|| preset.map_or_else(ModelParams::default, presets::params));
        let mut overrides = Vec::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            base.apply_config(&text)?;
            for key in config_keys(&text) {
                let value = base.get(&key).unwrap_or(f64::NAN);
                overrides.push(Override { key, value, source: "config" });
            }
        }
        for name in PARAM_NAMES {
            let var = format!("{ENV_PREFIX}{}", name.to_uppercase());
            if let Some(raw) = env(&var) {
                let value: f64 =
                    raw.trim().parse().map_err(|_| CliError::Usage(format!("{var}: `{raw}` is not a number")))?;
                base.set(name, value);
                overrides.push(Override { key: name.to_string(), value, source: "env" });
            }
        }
        for s in set {
            let (key, value) = parse_assignment(s)?;
            base.set(&key, value);
            overrides.push(Override { key, value, source: "set" });
        }
        base.validate().into_result()?;
        Ok(Self { base, preset, overrides })
    }

    pub fn overridden(&self, key: &str) -> bool {
        self.overrides.iter().any(|o| o.key == key)
    }

    /// Whether the working point gets its detunings from the solver.
    pub fn solves_detunings(&self) -> bool {
        self.preset.is_some_and(presets::solve_detunings) && !DETUNINGS.iter().any(|k| self.overridden(k))
    }

    /// Parameters of the working point.
    pub fn point(&self) -> Result<ModelParams, CliError> {
        if self.solves_detunings() {
            return Ok(solved(&self.base)?);
        }
        Ok(self.base)
    }

    pub fn annotate(&self, t: &mut Table) {
        if let Some(f) = self.preset {
            t.comment(format!("preset = {f}"));
        }
        for o in &self.overrides {
            t.comment(format!("override {} = {} ({})", o.key, fmt_f64(o.value), o.source));
        }
    }
}

/// `p` with its detunings replaced by the default root for its η.
pub fn solved(p: &ModelParams) -> Result<ModelParams, Error> {
    let eta = p.eta.ok_or_else(|| Error::Validation(vec!["eta is required".into()]))?;
    Ok(detunings::solve_default(p, eta)?.apply(p))
}
