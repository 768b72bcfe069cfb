//! Parameter record of the linearized model.
//!
//! Every rate and detuning is expressed in units of the mechanical frequency
//! ω_m, which is therefore fixed to [`OMEGA_M`] = 1. Decay fields hold the
//! amplitude (half) rates; the corresponding energy decay rates are twice
//! these values.

use std::fmt;

use crate::error::{Error, Result};

/// Mechanical frequency in internal units.
pub const OMEGA_M: f64 = 1.0;

/// Reduced Planck constant [J s], at the printed precision used for n_th.
pub const HBAR: f64 = 1.055e-34;
/// Boltzmann constant [J/K], at the same precision.
pub const K_B: f64 = 1.381e-23;

/// Rates of the linearized hybrid system, in units of ω_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Optical amplitude decay κ.
    pub kappa: f64,
    /// Collective atomic amplitude decay γ.
    pub gamma: f64,
    /// Mechanical amplitude damping γ_m.
    pub gamma_m: f64,
    /// Cavity-enhanced optomechanical coupling λ.
    pub lambda: f64,
    /// Collective atom-cavity coupling g_N.
    pub g_n: f64,
    /// Atomic drive strength Ω_r.
    pub omega_r: f64,
    /// Effective cavity detuning δ_c.
    pub delta_c: f64,
    /// Atomic detuning Δ_g.
    pub delta_g: f64,
    /// Two-photon detuning Δ_gr.
    pub delta_gr: f64,
    /// Thermal phonon number of the mechanical bath.
    pub n_th: f64,
    /// Target cooling fraction η, needed only by the detuning solver.
    pub eta: Option<f64>,
}

impl Default for ModelParams {
    /// Hybrid cavity with κ = 5, γ = 15, λ = 0.02, g_N = 5000, Ω_r = 60 and
    /// all detunings zero.
    fn default() -> Self {
        Self {
            kappa: 5.0,
            gamma: 15.0,
            gamma_m: 0.0,
            lambda: 0.02,
            g_n: 5000.0,
            omega_r: 60.0,
            delta_c: 0.0,
            delta_g: 0.0,
            delta_gr: 0.0,
            n_th: 0.0,
            eta: None,
        }
    }
}

/// Names accepted by [`ModelParams::set`] and by config files.
pub const PARAM_NAMES: [&str; 11] =
    ["kappa", "gamma", "gamma_m", "lambda", "g_n", "omega_r", "delta_c", "delta_g", "delta_gr", "n_th", "eta"];

/// Violated invariants of a parameter set. Empty means admissible.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Validation(self.violations))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            write!(f, "{}", self.violations.join("; "))
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        for name in PARAM_NAMES {
            if let Some(x) = self.get(name) {
                if !x.is_finite() {
                    v.push(format!("{name} must be finite"));
                }
            }
        }
        if !(self.kappa > 0.0) {
            v.push("kappa must be positive".to_string());
        }
        if !(self.gamma > 0.0) {
            v.push("gamma must be positive".to_string());
        }
        let non_negative = [
            ("gamma_m", self.gamma_m),
            ("lambda", self.lambda),
            ("g_n", self.g_n),
            ("omega_r", self.omega_r),
            ("n_th", self.n_th),
        ];
        for (name, x) in non_negative {
            if x < 0.0 {
                v.push(format!("{name} must be non-negative"));
            }
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta < 1.0) {
                v.push("eta in open interval (0,1)".to_string());
            }
        }
        ValidationReport { violations: v }
    }

    /// Cooperativity C = g_N² / (κγ).
    pub fn cooperativity(&self) -> f64 {
        self.g_n * self.g_n / (self.kappa * self.gamma)
    }

    /// Copy with the three detunings replaced.
    pub fn with_detunings(mut self, delta_g: f64, delta_gr: f64, delta_c: f64) -> Self {
        self.delta_g = delta_g;
        self.delta_gr = delta_gr;
        self.delta_c = delta_c;
        self
    }

    /// Value of a named field; `eta` yields `None` when unset.
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "kappa" => self.kappa,
            "gamma" => self.gamma,
            "gamma_m" => self.gamma_m,
            "lambda" => self.lambda,
            "g_n" => self.g_n,
            "omega_r" => self.omega_r,
            "delta_c" => self.delta_c,
            "delta_g" => self.delta_g,
            "delta_gr" => self.delta_gr,
            "n_th" => self.n_th,
            "eta" => return self.eta,
            _ => return None,
        })
    }

    /// Set a named field. Returns false for an unknown name.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "kappa" => self.kappa = value,
            "gamma" => self.gamma = value,
            "gamma_m" => self.gamma_m = value,
            "lambda" => self.lambda = value,
            "g_n" => self.g_n = value,
            "omega_r" => self.omega_r = value,
            "delta_c" => self.delta_c = value,
            "delta_g" => self.delta_g = value,
            "delta_gr" => self.delta_gr = value,
            "n_th" => self.n_th = value,
            "eta" => self.eta = Some(value),
            _ => return false,
        }
        true
    }

    /// Overlay `key = value` lines onto `self`. `#` starts a comment and
    /// unknown keys are rejected.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config { line: i + 1, message };
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| err(format!("`{}` is not a number", value.trim())))?;
            if !self.set(key, value) {
                return Err(err(format!("unknown key `{key}`")));
            }
        }
        Ok(())
    }

    pub fn from_config(text: &str) -> Result<Self> {
        let mut p = Self::default();
        p.apply_config(text)?;
        Ok(p)
    }

    /// Render as a config file that [`ModelParams::apply_config`] reads back.
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        for name in PARAM_NAMES {
            if let Some(x) = self.get(name) {
                s.push_str(&format!("{name} = {x:e}\n"));
            }
        }
        s
    }
}

/// Bath temperature and mechanical frequency in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalInput {
    /// Mechanical angular frequency [rad/s].
    pub omega_m_si: f64,
    /// Bath temperature [K].
    pub temperature: f64,
}

/// Bose occupation n_th = 1 / (exp(ħω_m / k_B T) − 1).
///
/// Returns 0 once the exponent exceeds 700 (and for T → 0).
pub fn thermal_occupation(t: ThermalInput) -> f64 {
    let x = HBAR * t.omega_m_si / (K_B * t.temperature);
    if !(x <= 700.0) {
        return 0.0;
    }
    1.0 / x.exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn flagship_parameters_are_admissible() {
        let p = ModelParams::default();
        assert!(p.validate().is_ok(), "{}", p.validate());
    }

    #[test]
    fn zero_kappa_rejected() {
        let p = ModelParams { kappa: 0.0, ..Default::default() };
        assert_eq!(p.validate().violations, vec!["kappa must be positive"]);
    }

    #[test]
    fn eta_boundary_rejected() {
        let p = ModelParams { eta: Some(1.0), ..Default::default() };
        assert_eq!(p.validate().violations, vec!["eta in open interval (0,1)"]);
        let p = ModelParams { eta: Some(0.98), ..Default::default() };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn nan_is_reported() {
        let p = ModelParams { delta_c: f64::NAN, ..Default::default() };
        assert_eq!(p.validate().violations, vec!["delta_c must be finite"]);
    }

    #[test]
    fn thermal_occupation_at_one_megahertz_twenty_millikelvin() {
        let n = thermal_occupation(ThermalInput { omega_m_si: 2.0 * PI * 1e6, temperature: 0.02 });
        assert!((n - 416.0).abs() < 1.0, "n_th = {n}");
    }

    #[test]
    fn thermal_occupation_limits() {
        let omega = 2.0 * PI * 1e6;
        assert_eq!(thermal_occupation(ThermalInput { omega_m_si: omega, temperature: 1e-9 }), 0.0);
        let t = HBAR * omega / (K_B * LN_2);
        let n = thermal_occupation(ThermalInput { omega_m_si: omega, temperature: t });
        assert!((n - 1.0).abs() < 1e-12, "{n}");
    }

    #[test]
    fn cooperativity_values() {
        let p = ModelParams::default();
        assert!((p.cooperativity() - 5000.0 * 5000.0 / 75.0).abs() < 1e-6);
        let p = ModelParams { g_n: 0.0, ..Default::default() };
        assert_eq!(p.cooperativity(), 0.0);
        let p = ModelParams { g_n: 5e4, ..Default::default() };
        assert!((p.cooperativity() / 3.3333333e7 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn config_overlay_and_errors() {
        let p = ModelParams::from_config("# comment\nkappa = 7\n  eta=0.5 # inline\n").unwrap();
        assert_eq!(p.kappa, 7.0);
        assert_eq!(p.eta, Some(0.5));
        let e = ModelParams::from_config("kappa = 1\nfoo = 2\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        assert!(ModelParams::from_config("kappa 1").is_err());
        assert!(ModelParams::from_config("kappa = x").is_err());
    }

    #[test]
    fn config_round_trip() {
        let p = ModelParams { delta_c: 411.393_036_796_884_25, eta: Some(0.98), ..Default::default() };
        assert_eq!(ModelParams::from_config(&p.to_config()).unwrap(), p);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn occupation_monotone(w in 1e5f64..1e9, t in 1e-4f64..10.0, f in 1.01f64..3.0) {
                let n = |w, t| thermal_occupation(ThermalInput { omega_m_si: w, temperature: t });
                let base = n(w, t);
                prop_assume!(base > 1e-200);
                prop_assert!(n(w, t * f) > base);
                prop_assert!(n(w * f, t) < base);
            }

            #[test]
            fn cooperativity_quadratic(g in 0.0f64..1e5, k in 0.1f64..100.0, gm in 0.1f64..100.0) {
                let p = ModelParams { g_n: g, kappa: k, gamma: gm, ..Default::default() };
                let q = ModelParams { g_n: 2.0 * g, ..p };
                let c = p.cooperativity();
                prop_assert!((q.cooperativity() - 4.0 * c).abs() <= 4.0 * c * f64::EPSILON);
            }

            #[test]
            fn validate_is_pure(k in -1.0f64..10.0, e in -0.5f64..1.5) {
                let p = ModelParams { kappa: k, eta: Some(e), ..Default::default() };
                prop_assert_eq!(p.validate(), p.validate());
            }
        }
    }
}
