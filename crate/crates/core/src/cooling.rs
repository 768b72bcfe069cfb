//! Heating/cooling coefficients and the phonon-number predictions built on
//! them.

use std::fmt;

use crate::error::{Error, Result};
use crate::params::{ModelParams, OMEGA_M};
use crate::spectrum;

/// A bound that may be absent (unbounded), serialized as `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Value(f64),
    Unbounded,
}

impl Limit {
    pub fn value(self) -> Option<f64> {
        match self {
            Limit::Value(x) => Some(x),
            Limit::Unbounded => None,
        }
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Value(x) => write!(f, "{x:.16e}"),
            Limit::Unbounded => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingReport {
    /// Heating coefficient A₊ = S(−ω_m).
    pub a_plus: f64,
    /// Cooling coefficient A₋ = S(+ω_m).
    pub a_minus: f64,
    /// Net cooling rate W = 2γ_m + A₋ − A₊.
    pub w: f64,
    /// Steady-state phonon number; NaN in the heating region.
    pub n_ss: f64,
    /// 1/(η(1+C)) when η is set.
    pub limit: Option<f64>,
    pub stable: bool,
}

/// (A₊, A₋).
pub fn coefficients(p: &ModelParams) -> Result<(f64, f64)> {
    let a_plus = spectrum::noise_spectrum(-OMEGA_M, p)?.s;
    let a_minus = spectrum::noise_spectrum(OMEGA_M, p)?.s;
    Ok((a_plus, a_minus))
}

/// Steady-state phonon number for given coefficients, NaN when W ≤ 0.
pub fn steady_phonon(a_plus: f64, a_minus: f64, gamma_m: f64, n_th: f64) -> f64 {
    let w = 2.0 * gamma_m + a_minus - a_plus;
    if w > 0.0 {
        (a_plus + 2.0 * gamma_m * n_th) / w
    } else {
        f64::NAN
    }
}

pub fn report(p: &ModelParams) -> Result<CoolingReport> {
    let (a_plus, a_minus) = coefficients(p)?;
    let w = 2.0 * p.gamma_m + a_minus - a_plus;
    let stable = w > 0.0;
    Ok(CoolingReport {
        a_plus,
        a_minus,
        w,
        n_ss: steady_phonon(a_plus, a_minus, p.gamma_m, p.n_th),
        limit: p.eta.map(|eta| 1.0 / (eta * (1.0 + p.cooperativity()))),
        stable,
    })
}

/// ⟨n⟩(t) = (n_th − n_ss) e^{−Wt} + n_ss on `t_grid`.
pub fn evolution(p: &ModelParams, t_grid: &[f64]) -> Result<Vec<f64>> {
    let r = report(p)?;
    if !r.stable {
        return Err(Error::Instability(format!("W = {:e} <= 0", r.w)));
    }
    Ok(t_grid.iter().map(|&t| (p.n_th - r.n_ss) * (-r.w * t).exp() + r.n_ss).collect())
}

/// Largest n_th and γ_m compatible with n_ss < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateBounds {
    pub n_th_max: Limit,
    pub gamma_m_max: Limit,
}

pub fn ground_state_requirements(p: &ModelParams) -> Result<GroundStateBounds> {
    let (a_plus, a_minus) = coefficients(p)?;
    let margin = a_minus - 2.0 * a_plus;
    if !(margin > 0.0) {
        return Err(Error::Regime(format!("A- - 2A+ = {margin:e}: ground state unreachable")));
    }
    let n_th_max = if p.gamma_m > 0.0 { Limit::Value(margin / (2.0 * p.gamma_m) + 1.0) } else { Limit::Unbounded };
    let gamma_m_max = if p.n_th > 1.0 { Limit::Value(margin / (2.0 * (p.n_th - 1.0))) } else { Limit::Unbounded };
    Ok(GroundStateBounds { n_th_max, gamma_m_max })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescaled {
    pub w: f64,
    pub n_ss: f64,
    /// The estimate assumes C ≫ 1; set when C < 100.
    pub low_cooperativity: bool,
}

/// Approximate W and n_ss after κ → κ' with C held fixed, using
/// A'± ≈ A± κ/κ' and γ'_m = γ_m κ'/κ.
pub fn rescale_kappa(p: &ModelParams, kappa_new: f64) -> Result<Rescaled> {
    let r = report(p)?;
    let ratio = kappa_new / p.kappa;
    let gamma_m = p.gamma_m * ratio;
    Ok(Rescaled {
        w: r.w / ratio,
        n_ss: (r.a_plus + 2.0 * gamma_m * p.n_th) / (r.a_minus - r.a_plus + 2.0 * gamma_m),
        low_cooperativity: p.cooperativity() < 100.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detunings;

    fn fig5a(gamma_m: f64) -> ModelParams {
        let base = ModelParams { gamma_m, n_th: 300.0, ..Default::default() };
        detunings::solve_default(&base, 0.98).unwrap().apply(&base)
    }

    #[test]
    fn no_coupling_no_coefficients() {
        let p = ModelParams { lambda: 0.0, gamma_m: 1e-3, n_th: 12.0, ..fig5a(0.0) };
        assert_eq!(coefficients(&p).unwrap(), (0.0, 0.0));
        let r = report(&p).unwrap();
        assert_eq!(r.w, 2e-3);
        assert!((r.n_ss - 12.0).abs() < 1e-12);
    }

    #[test]
    fn flagship_coefficients() {
        let p = fig5a(0.0);
        let (ap, am) = coefficients(&p).unwrap();
        assert!((am / (0.98 * 1.6e-4) - 1.0).abs() < 1e-6, "{am}");
        assert!((ap / 4.8e-10 - 1.0).abs() < 0.2, "{ap}");
        let r = report(&p).unwrap();
        assert_eq!(r.w, am - ap);
        assert!((r.n_ss - ap / (am - ap)).abs() < 1e-20);
        assert!((r.n_ss / 3.1e-6 - 1.0).abs() < 0.3, "{}", r.n_ss);
        let q = 0.98 * (1.0 + p.cooperativity());
        assert!((r.n_ss * (q - 1.0) - 1.0).abs() < 1e-6, "{}", r.n_ss * (q - 1.0));
        assert!(ap / am <= r.limit.unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn flagship_with_damping() {
        let r = report(&fig5a(2e-7)).unwrap();
        assert!((r.n_ss / 0.76 - 1.0).abs() < 0.2, "{}", r.n_ss);
    }

    #[test]
    fn heating_region_is_nan_and_refused() {
        let mut p = fig5a(0.0);
        p.delta_c = -p.delta_c;
        p.delta_g = 3.0;
        p.delta_gr = 0.3;
        let r = report(&p).unwrap();
        if !r.stable {
            assert!(r.n_ss.is_nan());
            assert!(matches!(evolution(&p, &[0.0]), Err(Error::Instability(_))));
        }
        let p = ModelParams { g_n: 0.0, delta_c: 1.0, delta_gr: 4.0, ..Default::default() };
        let r = report(&p).unwrap();
        assert!(!r.stable && r.w < 0.0 && r.n_ss.is_nan());
        assert!(evolution(&p, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn evolution_endpoints() {
        let p = fig5a(2e-7);
        let r = report(&p).unwrap();
        let half = std::f64::consts::LN_2 / r.w;
        let n = evolution(&p, &[0.0, half, 200.0 / r.w]).unwrap();
        assert_eq!(n[0], p.n_th);
        assert!(((n[1] - r.n_ss) - (p.n_th - r.n_ss) / 2.0).abs() < 1e-9);
        assert!((n[2] - r.n_ss).abs() <= (-200.0f64).exp() * p.n_th + 1e-12);
    }

    #[test]
    fn ground_state_sentinels() {
        let g = ground_state_requirements(&fig5a(0.0)).unwrap();
        assert_eq!(g.n_th_max, Limit::Unbounded);
        let p = ModelParams { n_th: 1.0, ..fig5a(2e-7) };
        let g = ground_state_requirements(&p).unwrap();
        assert_eq!(g.gamma_m_max, Limit::Unbounded);
        assert!(!g.n_th_max.to_string().contains("inf"));
        let p = ModelParams { lambda: 0.0, ..fig5a(0.0) };
        assert!(matches!(ground_state_requirements(&p), Err(Error::Regime(_))));
    }

    #[test]
    fn ground_state_boundary_is_unit_occupation() {
        let p = fig5a(2e-7);
        let g = ground_state_requirements(&p).unwrap();
        let n_max = g.n_th_max.value().unwrap();
        let at = report(&ModelParams { n_th: n_max, ..p }).unwrap().n_ss;
        assert!((at - 1.0).abs() < 1e-9);
        let gm = g.gamma_m_max.value().unwrap();
        let at = report(&ModelParams { gamma_m: gm, ..p }).unwrap().n_ss;
        assert!((at - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rescale_identity() {
        let p = fig5a(2e-7);
        let r = report(&p).unwrap();
        let s = rescale_kappa(&p, p.kappa).unwrap();
        assert_eq!(s.w, r.w);
        assert!((s.n_ss - r.n_ss).abs() < 1e-15);
        assert!(!s.low_cooperativity);
    }

    #[test]
    fn limit_display() {
        assert_eq!(Limit::Unbounded.to_string(), "inf");
    }
}
