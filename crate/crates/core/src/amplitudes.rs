//! Classical steady state of the driven system and the atom-number
//! feasibility checks that follow from it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{ModelParams, OMEGA_M};

const DAMPING: f64 = 0.5;
const TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1000;

/// Drive and microscopic couplings, all rates in units of ω_m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// Cavity drive strength Ω_p.
    pub omega_p: f64,
    /// Single-photon optomechanical coupling λ₀.
    pub lambda0: f64,
    /// Single-atom coupling g₀.
    pub g0: f64,
    /// Number of atoms N.
    pub n_atoms: f64,
    /// Bare cavity detuning δ'_c.
    pub delta_c_prime: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub delta_g: f64,
    pub delta_gr: f64,
    pub omega_r: f64,
}

impl DriveParams {
    /// Collective coupling g_N = g₀√N.
    pub fn g_n(&self) -> f64 {
        self.g0 * self.n_atoms.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        let fields = [
            ("omega_p", self.omega_p),
            ("lambda0", self.lambda0),
            ("g0", self.g0),
            ("n_atoms", self.n_atoms),
            ("delta_c_prime", self.delta_c_prime),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("delta_g", self.delta_g),
            ("delta_gr", self.delta_gr),
            ("omega_r", self.omega_r),
        ];
        for (name, x) in fields {
            if !x.is_finite() {
                v.push(format!("{name} must be finite"));
            }
        }
        if self.omega_p < 0.0 {
            v.push("omega_p must be non-negative".into());
        }
        if self.lambda0 < 0.0 {
            v.push("lambda0 must be non-negative".into());
        }
        if !(self.g0 > 0.0) {
            v.push("g0 must be positive".into());
        }
        if !(self.n_atoms >= 1.0) {
            v.push("n_atoms must be at least 1".into());
        }
        if !(self.kappa > 0.0) {
            v.push("kappa must be positive".into());
        }
        if !(self.gamma > 0.0) {
            v.push("gamma must be positive".into());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Linearized parameters with λ = |λ₀ā| and δ_c taken from `amps`.
    pub fn model_params(&self, amps: &SteadyAmplitudes, gamma_m: f64, n_th: f64) -> ModelParams {
        ModelParams {
            kappa: self.kappa,
            gamma: self.gamma,
            gamma_m,
            lambda: amps.lambda_eff.norm(),
            g_n: self.g_n(),
            omega_r: self.omega_r,
            delta_c: amps.delta_c_eff,
            delta_g: self.delta_g,
            delta_gr: self.delta_gr,
            n_th,
            eta: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyAmplitudes {
    pub a_bar: Complex64,
    pub b_bar: Complex64,
    pub e_bar: Complex64,
    pub r_bar: Complex64,
    /// Enhanced coupling λ₀ā.
    pub lambda_eff: Complex64,
    /// δ_c = δ'_c − λ₀(b̄ + b̄*).
    pub delta_c_eff: f64,
    pub d_denominator: Complex64,
    pub iterations: usize,
}

fn denominator(d: &DriveParams, delta_c: f64) -> Complex64 {
    let dk = Complex64::new(delta_c, d.kappa);
    let dg = Complex64::new(d.delta_g, d.gamma);
    let gn2 = d.g_n() * d.g_n();
    d.omega_r * d.omega_r * dk + d.delta_gr * (gn2 - dk * dg)
}

/// Amplitudes at a given effective detuning.
fn amplitudes_at(d: &DriveParams, delta_c: f64) -> Result<SteadyAmplitudes> {
    let den = denominator(d, delta_c);
    if den.norm() < 1e-12 {
        return Err(Error::SingularDenominator(den.norm()));
    }
    let dg = Complex64::new(d.delta_g, d.gamma);
    let a = d.omega_p * (d.omega_r * d.omega_r - d.delta_gr * dg) / den;
    let e = -d.g_n() * d.omega_p * d.delta_gr / den;
    let r = -d.g_n() * d.omega_p * d.omega_r / den;
    let b = Complex64::new(-d.lambda0 * a.norm_sqr() / OMEGA_M, 0.0);
    Ok(SteadyAmplitudes {
        a_bar: a,
        b_bar: b,
        e_bar: e,
        r_bar: r,
        lambda_eff: d.lambda0 * a,
        delta_c_eff: delta_c,
        d_denominator: den,
        iterations: 0,
    })
}

/// Self-consistent steady amplitudes, found by damped fixed-point iteration
/// on the effective detuning.
pub fn steady_amplitudes(d: &DriveParams) -> Result<SteadyAmplitudes> {
    d.validate()?;
    let shifted = |s: &SteadyAmplitudes| d.delta_c_prime - d.lambda0 * 2.0 * s.b_bar.re;
    let mut dc = d.delta_c_prime;
    let mut s = amplitudes_at(d, dc)?;
    if d.lambda0 == 0.0 || d.omega_p == 0.0 {
        return Ok(s);
    }
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let target = shifted(&s);
        residual = (target - dc).abs();
        if residual < TOLERANCE * (1.0 + dc.abs()) {
            s.iterations = it;
            return Ok(s);
        }
        dc += DAMPING * (target - dc);
        s = amplitudes_at(d, dc)?;
    }
    Err(Error::Convergence { iterations: MAX_ITERATIONS, residual })
}

/// Verdict thresholds; the defaults read "≪" as a factor 0.1 and "≫" as 10.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub excitation: f64,
    pub margin: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { excitation: 0.1, margin: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// (|Ē|² + |R̄|²)/N.
    pub excitation_ratio: f64,
    /// |ā|/|Ē| and its estimate Ω_r²/(2g_Nω_m).
    pub ratio_a_e: f64,
    pub ratio_a_e_estimate: f64,
    /// |ā|/|R̄| and its estimate Ω_r/(2g_N).
    pub ratio_a_r: f64,
    pub ratio_a_r_estimate: f64,
    /// |ā|²·(4g_N²/Ω_r²)(1 + ω_m²/Ω_r²).
    pub n_bound_photons: f64,
    /// (κγ/g₀)².
    pub n_bound_cooperativity: f64,
    pub weak_excitation: bool,
    pub atoms_vs_photons: bool,
    pub atoms_vs_cooperativity: bool,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.weak_excitation && self.atoms_vs_photons && self.atoms_vs_cooperativity
    }
}

pub fn feasibility(d: &DriveParams) -> Result<FeasibilityReport> {
    feasibility_with(d, Thresholds::default())
}

pub fn feasibility_with(d: &DriveParams, t: Thresholds) -> Result<FeasibilityReport> {
    let s = steady_amplitudes(d)?;
    let gn = d.g_n();
    let a2 = s.a_bar.norm_sqr();
    let excitation_ratio = (s.e_bar.norm_sqr() + s.r_bar.norm_sqr()) / d.n_atoms;
    let ratio = |x: Complex64| {
        if s.a_bar.norm() == 0.0 {
            0.0
        } else {
            s.a_bar.norm() / x.norm()
        }
    };
    let or2 = d.omega_r * d.omega_r;
    let n_bound_photons = a2 * 4.0 * gn * gn / or2 * (1.0 + OMEGA_M * OMEGA_M / or2);
    let n_bound_cooperativity = (d.kappa * d.gamma / d.g0).powi(2);
    Ok(FeasibilityReport {
        excitation_ratio,
        ratio_a_e: ratio(s.e_bar),
        ratio_a_e_estimate: or2 / (2.0 * gn * OMEGA_M),
        ratio_a_r: ratio(s.r_bar),
        ratio_a_r_estimate: d.omega_r / (2.0 * gn),
        n_bound_photons,
        n_bound_cooperativity,
        weak_excitation: excitation_ratio < t.excitation,
        atoms_vs_photons: d.n_atoms > t.margin * n_bound_photons,
        atoms_vs_cooperativity: d.n_atoms > t.margin * n_bound_cooperativity,
    })
}
