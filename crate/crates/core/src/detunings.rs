//! Detunings that satisfy the three optimal cooling conditions.
//!
//! 1. Im χ₁(−ω_m) = 0 minimizes the heating bound. This ties Δ_gr to Δ_g
//!    through Δ_gr = Ω_r²/(Δ_g − ω_m) + ω_m.
//! 2. The saturation residual at +ω_m vanishes, so the cooling coefficient
//!    sits on its upper bound. This fixes δ_c once Im χ₁(ω_m) is known.
//! 3. (1 + 1/M(ω_m))⁻¹ = η, the critical (equality) case of the cooling
//!    fraction constraint. Under condition 1 this is a quadratic in Δ_g for
//!    each sign of Im χ₁(ω_m) = ±√η'.

use crate::error::{Error, Result};
use crate::params::{ModelParams, OMEGA_M};
use crate::spectrum::{self, POLE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ImSign {
    Plus,
    Minus,
}

impl ImSign {
    fn factor(self) -> f64 {
        match self {
            ImSign::Plus => 1.0,
            ImSign::Minus => -1.0,
        }
    }
}

/// Which closed-form root produced a solution: the sign of Im χ₁(ω_m) and
/// the index of the quadratic root (0 = larger Δ_g).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub sign: ImSign,
    pub root: u8,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self.sign {
            ImSign::Plus => '+',
            ImSign::Minus => '-',
        };
        write!(f, "{s}{}", self.root)
    }
}

/// Residuals of the three conditions evaluated from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// Δ_g − ω_m − Ω_r²/(Δ_gr − ω_m), equal to Im χ₁(−ω_m).
    pub r24: f64,
    /// Saturation residual at +ω_m.
    pub r28: f64,
    /// Relative mismatch M(ω_m)(1−η)/η − 1.
    pub r_m: f64,
}

impl Residuals {
    /// Whether all residuals meet the solver's certification thresholds.
    pub fn certified(&self, delta_c: f64) -> bool {
        self.r24.abs() < 1e-9 && self.r28.abs() < 1e-9 * (1.0 + delta_c.abs()) && self.r_m.abs() < 1e-8
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningSolution {
    pub delta_g: f64,
    pub delta_gr: f64,
    pub delta_c: f64,
    pub eta: f64,
    pub eta_prime: f64,
    pub branch: Branch,
    pub residuals: Residuals,
}

impl DetuningSolution {
    /// `p` with this solution's detunings and η.
    pub fn apply(&self, p: &ModelParams) -> ModelParams {
        ModelParams { eta: Some(self.eta), ..p.with_detunings(self.delta_g, self.delta_gr, self.delta_c) }
    }
}

/// η' = (γ g_N²/κ) η/(1−η) − γ², the value Im²χ₁(ω_m) must take.
pub fn eta_prime(p: &ModelParams, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Regime(format!("eta = {eta} outside (0, 1)")));
    }
    let ep = p.gamma * p.g_n * p.g_n / p.kappa * eta / (1.0 - eta) - p.gamma * p.gamma;
    if !(ep > 0.0) {
        return Err(Error::Regime(format!("eta' = {ep:e} is not positive")));
    }
    Ok(ep)
}

/// Real roots of a x² + b x + c = 0, larger root first, computed without
/// subtractive cancellation.
pub(crate) fn stable_quadratic(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 || a == 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return Some((0.0, 0.0));
    }
    let (r1, r2) = (q / a, c / q);
    Some(if r1 >= r2 { (r1, r2) } else { (r2, r1) })
}

/// Coefficients (a, b, c) of the quadratic for Δ_g on branch `s` = Im χ₁(ω_m).
///
/// For s = +√η' this is (√η' − 2ω_m)·(σ₁, σ₂, σ₃); for s = −√η' it is
/// (√η' + 2ω_m)·(σ'₁, σ'₂, σ'₃). Keeping the common factor avoids the
/// singular case √η' = 2ω_m.
fn delta_g_quadratic(s: f64, omega_r: f64) -> (f64, f64, f64) {
    let w = OMEGA_M;
    (2.0 * w, -2.0 * w * s, 2.0 * w * w * (s - w) - (s - 2.0 * w) * omega_r * omega_r)
}

/// Residuals of the three conditions for the detunings stored in `p`.
pub fn verify(p: &ModelParams, eta: f64) -> Result<Residuals> {
    let shifted = p.delta_gr - OMEGA_M;
    if shifted.abs() < POLE_TOL {
        return Err(Error::Pole { what: "chi1", omega: -OMEGA_M });
    }
    let r24 = p.delta_g - OMEGA_M - p.omega_r * p.omega_r / shifted;
    let r28 = spectrum::saturation_residual(OMEGA_M, p)?;
    let m = spectrum::noise_spectrum(OMEGA_M, p)?.m_factor;
    let r_m = m * (1.0 - eta) / eta - 1.0;
    Ok(Residuals { r24, r28, r_m })
}

/// Whether the detunings in `p` reach (1 + 1/M(ω_m))⁻¹ ≥ η.
pub fn satisfies_cooling_fraction(p: &ModelParams, eta: f64) -> Result<bool> {
    let m = spectrum::noise_spectrum(OMEGA_M, p)?.m_factor;
    Ok(m.is_infinite() || m / (1.0 + m) >= eta)
}

/// Every real critical solution, sorted by |Δ_g − ω_m| in descending order.
///
/// λ, γ_m, n_th and the detunings already stored in `p` are ignored.
pub fn solve(p: &ModelParams, eta: f64) -> Result<Vec<DetuningSolution>> {
    let ep = eta_prime(p, eta)?;
    let root_ep = ep.sqrt();
    let w = OMEGA_M;
    let or2 = p.omega_r * p.omega_r;
    let mut out = Vec::with_capacity(4);
    for sign in [ImSign::Plus, ImSign::Minus] {
        let s = sign.factor() * root_ep;
        let (a, b, c) = delta_g_quadratic(s, p.omega_r);
        let Some((hi, lo)) = stable_quadratic(a, b, c) else {
            continue;
        };
        let delta_c = p.g_n * p.g_n * s / (ep + p.gamma * p.gamma) - w;
        for (root, dg) in [(0u8, hi), (1u8, lo)] {
            if root == 1 && lo == hi {
                continue;
            }
            if (dg - w).abs() < POLE_TOL {
                return Err(Error::Pole { what: "delta_gr", omega: dg });
            }
            let delta_gr = or2 / (dg - w) + w;
            // Re-derive Δ_g from the rounded Δ_gr so that condition 1 holds
            // to working precision even when Ω_r²/(Δ_g − ω_m) ≪ 1.
            let delta_g = if (delta_gr - w).abs() < POLE_TOL { dg } else { w + or2 / (delta_gr - w) };
            let q = p.with_detunings(delta_g, delta_gr, delta_c);
            let residuals = verify(&q, eta)?;
            out.push(DetuningSolution {
                delta_g,
                delta_gr,
                delta_c,
                eta,
                eta_prime: ep,
                branch: Branch { sign, root },
                residuals,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::Regime("no real root for delta_g".to_string()));
    }
    out.sort_by(|x, y| (y.delta_g - w).abs().total_cmp(&(x.delta_g - w).abs()));
    Ok(out)
}

/// Deterministic default: the solution farthest from Δ_g = ω_m, i.e. the
/// Im χ₁(ω_m) > 0 branch with Δ_gr just above ω_m.
pub fn solve_default(p: &ModelParams, eta: f64) -> Result<DetuningSolution> {
    Ok(solve(p, eta)?[0])
}
