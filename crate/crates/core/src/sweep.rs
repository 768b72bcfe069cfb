//! Parameter grids and their evaluation into steady-state phonon numbers.

use crate::detunings;
use crate::error::{Error, Result};
use crate::params::{ModelParams, PARAM_NAMES};
use crate::{cooling, moments, par};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, count: usize, scale: Scale) -> Self {
        Self { name: name.to_string(), min, max, count, scale }
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if !PARAM_NAMES.contains(&self.name.as_str()) || self.name == "eta" {
            v.push(format!("unknown sweep parameter `{}`", self.name));
        }
        if self.count < 2 {
            v.push(format!("axis `{}` needs at least 2 points", self.name));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            v.push(format!("axis `{}` bounds must be finite", self.name));
        }
        if self.scale == Scale::Log && !(self.min > 0.0 && self.max > 0.0) {
            v.push(format!("log axis `{}` needs positive bounds", self.name));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let f = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + f * (self.max - self.min),
                    Scale::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

/// How the detunings of a grid cell are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellRule {
    /// Use the base detunings with the axis values overlaid.
    Fixed,
    /// Re-solve all three detunings for the cell (default root).
    Solve,
    /// Keep δ_c and Δ_gr from the axes and choose Δ_g so that the cooling
    /// coefficient sits at the fraction η of its supremum.
    CoolingFraction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub rule: CellRule,
    /// Also solve the moment equations for each cell.
    pub numeric: bool,
}

impl SweepSpec {
    pub fn validate(&self, base: &ModelParams) -> Result<()> {
        self.axis1.validate()?;
        if let Some(a) = &self.axis2 {
            a.validate()?;
        }
        if self.rule != CellRule::Fixed && base.eta.is_none() {
            return Err(Error::Validation(vec!["this sweep needs eta".into()]));
        }
        Ok(())
    }

    /// Cell coordinates in row-major order (axis2 fastest).
    pub fn cells(&self) -> Vec<(f64, Option<f64>)> {
        let xs = self.axis1.values();
        match &self.axis2 {
            None => xs.into_iter().map(|x| (x, None)).collect(),
            Some(a) => {
                let ys = a.values();
                xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, Some(y)))).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub y: Option<f64>,
    /// Analytic n_ss; NaN where the cell heats or has no solution.
    pub n_theory: f64,
    pub n_numeric: Option<f64>,
}

/// Δ_g that puts Im χ₁(ω_m) at √η' for the current Δ_gr.
pub fn delta_g_for_fraction(p: &ModelParams, eta: f64) -> Result<f64> {
    let s = detunings::eta_prime(p, eta)?.sqrt();
    Ok(s - 1.0 + p.omega_r * p.omega_r / (1.0 + p.delta_gr))
}

/// Curves of the [`CellRule::CoolingFraction`] plane on which one optimal
/// condition holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loci {
    /// δ_c maximizing the cooling coefficient (independent of Δ_gr).
    pub delta_c: f64,
    /// The two Δ_gr values cancelling Im χ₁(−ω_m).
    pub delta_gr: [f64; 2],
}

pub fn fraction_loci(p: &ModelParams, eta: f64) -> Result<Loci> {
    let ep = detunings::eta_prime(p, eta)?;
    let s = ep.sqrt();
    let delta_c = p.g_n * p.g_n * s / (ep + p.gamma * p.gamma) - 1.0;
    let u = (1.0 + 2.0 * p.omega_r * p.omega_r / (s - 2.0)).sqrt();
    Ok(Loci { delta_c, delta_gr: [-u, u] })
}

/// Parameters of one cell.
pub fn cell_params(base: &ModelParams, spec: &SweepSpec, x: f64, y: Option<f64>) -> Result<ModelParams> {
    let mut p = *base;
    p.set(&spec.axis1.name, x);
    if let (Some(a), Some(y)) = (&spec.axis2, y) {
        p.set(&a.name, y);
    }
    match spec.rule {
        CellRule::Fixed => {}
        CellRule::Solve => {
            p = detunings::solve_default(&p, p.eta.unwrap_or(f64::NAN))?.apply(&p);
        }
        CellRule::CoolingFraction => {
            p.delta_g = delta_g_for_fraction(&p, p.eta.unwrap_or(f64::NAN))?;
        }
    }
    Ok(p)
}

fn evaluate(base: &ModelParams, spec: &SweepSpec, x: f64, y: Option<f64>) -> SweepRow {
    let p = cell_params(base, spec, x, y);
    let n_theory = p.as_ref().ok().and_then(|p| cooling::report(p).ok()).map_or(f64::NAN, |r| r.n_ss);
    let n_numeric = spec.numeric.then(|| {
        p.as_ref()
            .ok()
            .and_then(|p| moments::steady_state(&moments::build_generator(p)).ok())
            .map_or(f64::NAN, |s| s.phonon())
    });
    SweepRow { x, y, n_theory, n_numeric }
}

/// Evaluate every cell on the worker pool; rows keep grid order.
pub fn run(base: &ModelParams, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate(base)?;
    Ok(par::map(&spec.cells(), |&(x, y)| evaluate(base, spec, x, y)))
}

/// Same as [`run`] on the calling thread only.
pub fn run_seq(base: &ModelParams, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate(base)?;
    Ok(par::map_seq(&spec.cells(), |&(x, y)| evaluate(base, spec, x, y)))
}
