//! Optical-force noise spectrum of the hybrid cavity.
//!
//! All spectra are returned multiplied by x_ZPF², so they carry units of a
//! rate and evaluate directly to the heating/cooling coefficients at ∓ω_m.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Distance from a pole below which a denominator counts as singular.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibilities {
    pub omega: f64,
    /// Atomic response χ₁ = i[(ω+Δ_g) − Ω_r²/(ω+Δ_gr)] − γ.
    pub chi1: Complex64,
    /// Bare cavity response χ₂ = i(ω+δ_c) − κ.
    pub chi2: Complex64,
    /// Dressed response χ₁χ₂ + g_N².
    pub chi: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSample {
    pub omega: f64,
    /// S_FF(ω) x_ZPF².
    pub s: f64,
    /// Upper bound 2λ²/(κ(1 + 1/M)).
    pub s_upper: f64,
    /// M(ω) = κ|χ₁|²/(γ g_N²); +∞ when g_N = 0.
    pub m_factor: f64,
}

/// Im χ₁(ω) = (ω+Δ_g) − Ω_r²/(ω+Δ_gr).
pub fn im_chi1(omega: f64, p: &ModelParams) -> Result<f64> {
    let shifted = omega + p.delta_gr;
    if shifted.abs() < POLE_TOL {
        return Err(Error::Pole { what: "chi1", omega });
    }
    Ok(omega + p.delta_g - p.omega_r * p.omega_r / shifted)
}

pub fn susceptibilities(omega: f64, p: &ModelParams) -> Result<Susceptibilities> {
    let chi1 = Complex64::new(-p.gamma, im_chi1(omega, p)?);
    let chi2 = Complex64::new(-p.kappa, omega + p.delta_c);
    let chi = chi1 * chi2 + p.g_n * p.g_n;
    Ok(Susceptibilities { omega, chi1, chi2, chi })
}

/// M-factor from the value of Im χ₁.
fn m_factor_of_im(im: f64, p: &ModelParams) -> f64 {
    let gn2 = p.g_n * p.g_n;
    if gn2 == 0.0 {
        return f64::INFINITY;
    }
    p.kappa * (im * im + p.gamma * p.gamma) / (p.gamma * gn2)
}

/// 2λ²/κ · (1 + 1/M)⁻¹, equal to 2λ²/κ in the M → ∞ limit.
fn bound_of_m(m: f64, p: &ModelParams) -> f64 {
    let sup = 2.0 * p.lambda * p.lambda / p.kappa;
    if m.is_infinite() {
        sup
    } else {
        sup * m / (m + 1.0)
    }
}

pub fn noise_spectrum(omega: f64, p: &ModelParams) -> Result<SpectrumSample> {
    let chi = susceptibilities(omega, p)?;
    let c1 = chi.chi1.norm_sqr();
    let gn2 = p.g_n * p.g_n;
    let s = p.lambda * p.lambda * (2.0 * p.kappa * c1 + 2.0 * p.gamma * gn2) / chi.chi.norm_sqr();
    let m_factor = m_factor_of_im(chi.chi1.im, p);
    Ok(SpectrumSample { omega, s, s_upper: bound_of_m(m_factor, p), m_factor })
}

/// ω + δ_c − g_N² Im χ₁ / |χ₁|², which vanishes exactly where the
/// spectrum touches its upper bound.
pub fn saturation_residual(omega: f64, p: &ModelParams) -> Result<f64> {
    let chi1 = susceptibilities(omega, p)?.chi1;
    Ok(omega + p.delta_c - p.g_n * p.g_n * chi1.im / chi1.norm_sqr())
}

/// Continued-fraction lineshape obtained by dropping γ (valid for M ≫ 1).
pub fn spectrum_gamma0(omega: f64, p: &ModelParams) -> Result<f64> {
    let inner = im_chi1(omega, p)?;
    let gn2 = p.g_n * p.g_n;
    let shift = if gn2 == 0.0 {
        0.0
    } else {
        if inner.abs() < POLE_TOL {
            return Err(Error::Pole { what: "nested denominator", omega });
        }
        gn2 / inner
    };
    let detuning = omega + p.delta_c - shift;
    Ok(2.0 * p.lambda * p.lambda * p.kappa / (detuning * detuning + p.kappa * p.kappa))
}

/// Residuals of the approximate peak and dip conditions of
/// [`spectrum_gamma0`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumResiduals {
    /// ω + δ_c − g_N²/[(ω+Δ_g) − Ω_r²/(ω+Δ_gr)]; infinite when the nested
    /// denominator vanishes with g_N ≠ 0.
    pub max_residual: f64,
    /// (ω+Δ_g) − Ω_r²/(ω+Δ_gr).
    pub min_residual: f64,
}

pub fn extremum_residuals(omega: f64, p: &ModelParams) -> Result<ExtremumResiduals> {
    let min_residual = im_chi1(omega, p)?;
    let gn2 = p.g_n * p.g_n;
    let max_residual = if gn2 == 0.0 {
        omega + p.delta_c
    } else if min_residual == 0.0 {
        f64::INFINITY
    } else {
        omega + p.delta_c - gn2 / min_residual
    };
    Ok(ExtremumResiduals { max_residual, min_residual })
}

/// Upper bound of the heating coefficient as a function of Im χ₁(−ω_m).
///
/// Uses the (1 + 1/M)⁻¹ form, which is what reduces to 2λ²/(κ(1+C)) at
/// Im χ₁ = 0.
pub fn a_plus_upper_of_im(im_chi1: f64, p: &ModelParams) -> f64 {
    bound_of_m(m_factor_of_im(im_chi1, p), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lorentzian(omega: f64, p: &ModelParams) -> f64 {
        let d = omega + p.delta_c;
        2.0 * p.lambda * p.lambda * p.kappa / (d * d + p.kappa * p.kappa)
    }

    #[test]
    fn chi1_without_drive() {
        let p = ModelParams { omega_r: 0.0, delta_g: 3.0, delta_gr: 0.7, ..Default::default() };
        let s = susceptibilities(0.0, &p).unwrap();
        assert_eq!(s.chi1, Complex64::new(-p.gamma, 3.0));
    }

    #[test]
    fn uncoupled_chi_is_product() {
        let p = ModelParams { g_n: 0.0, delta_g: 2.0, delta_gr: 0.5, delta_c: -1.0, ..Default::default() };
        let s = susceptibilities(0.3, &p).unwrap();
        assert_eq!(s.chi, s.chi1 * s.chi2);
        assert_eq!(s.chi1.re, -p.gamma);
        assert_eq!(s.chi2.re, -p.kappa);
    }

    #[test]
    fn pole_is_reported() {
        let p = ModelParams { delta_gr: 1.0, ..Default::default() };
        assert!(matches!(susceptibilities(-1.0, &p), Err(Error::Pole { .. })));
        assert!(noise_spectrum(-1.0, &p).is_err());
        assert!(saturation_residual(-1.0, &p).is_err());
    }

    #[test]
    fn lorentzian_limit() {
        let p = ModelParams { g_n: 0.0, delta_c: -1.0, delta_gr: 3.0, ..Default::default() };
        let s = noise_spectrum(1.0, &p).unwrap();
        assert!((s.s - 2.0 * p.lambda * p.lambda / p.kappa).abs() < 1e-18);
        assert!(s.m_factor.is_infinite());
        assert_eq!(s.s_upper, 2.0 * p.lambda * p.lambda / p.kappa);
        assert!((spectrum_gamma0(1.0, &p).unwrap() - s.s).abs() < 1e-18);
    }

    #[test]
    fn zero_coupling_gives_zero_spectrum() {
        let p = ModelParams { lambda: 0.0, delta_gr: 3.0, ..Default::default() };
        for w in [-2.0, -0.5, 0.0, 1.0, 4.0] {
            assert_eq!(noise_spectrum(w, &p).unwrap().s, 0.0);
        }
    }

    #[test]
    fn saturation_residual_trivial_cases() {
        let p = ModelParams { g_n: 0.0, delta_c: 2.5, delta_gr: 3.0, ..Default::default() };
        assert_eq!(saturation_residual(0.5, &p).unwrap(), 3.0);
        let p = ModelParams { g_n: 0.0, delta_c: -1.0, delta_gr: 3.0, ..Default::default() };
        assert_eq!(saturation_residual(1.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn extremum_trivial_cases() {
        let p = ModelParams { g_n: 0.0, delta_c: 2.0, delta_gr: 3.0, ..Default::default() };
        assert_eq!(extremum_residuals(0.5, &p).unwrap().max_residual, 2.5);
        let p = ModelParams { omega_r: 0.0, delta_g: 4.0, delta_gr: 3.0, ..Default::default() };
        assert_eq!(extremum_residuals(0.5, &p).unwrap().min_residual, 4.5);
    }

    #[test]
    fn heating_bound_at_zero_imaginary_part() {
        let p = ModelParams::default();
        let expected = 2.0 * p.lambda * p.lambda / p.kappa / (1.0 + p.cooperativity());
        let got = a_plus_upper_of_im(0.0, &p);
        assert!((got / expected - 1.0).abs() < 1e-12);
        assert!((got / 4.8e-10 - 1.0).abs() < 1e-3, "{got}");
        let p0 = ModelParams { g_n: 0.0, ..p };
        assert_eq!(a_plus_upper_of_im(0.0, &p0), 2.0 * p.lambda * p.lambda / p.kappa);
    }

    #[test]
    fn heating_bound_even_with_unique_minimum() {
        for g_n in [50.0, 500.0, 5000.0] {
            let p = ModelParams { g_n, ..Default::default() };
            let at0 = a_plus_upper_of_im(0.0, &p);
            for k in 1..200 {
                let x = k as f64 * 50.0;
                let (a, b) = (a_plus_upper_of_im(x, &p), a_plus_upper_of_im(-x, &p));
                assert_eq!(a, b);
                assert!(a > at0);
            }
        }
    }

    fn params_strategy() -> impl Strategy<Value = ModelParams> {
        (0.1f64..500.0, 0.1f64..50.0, 0.0f64..0.5, 0.0f64..1e4, 0.0f64..1e3, (-1e3f64..1e3, -1e4f64..1e4, -5.0f64..5.0))
            .prop_map(|(kappa, gamma, lambda, g_n, omega_r, (delta_c, delta_g, delta_gr))| ModelParams {
                kappa,
                gamma,
                lambda,
                g_n,
                omega_r,
                delta_c,
                delta_g,
                delta_gr,
                ..Default::default()
            })
    }

    proptest! {
        #[test]
        fn spectrum_below_bound(p in params_strategy(), w in -5.0f64..5.0) {
            prop_assume!((w + p.delta_gr).abs() > 1e-6);
            let s = noise_spectrum(w, &p).unwrap();
            prop_assert!(s.s >= 0.0);
            prop_assert!(s.s <= s.s_upper * (1.0 + 1e-12));
            if p.g_n > 0.0 {
                prop_assert!(s.m_factor >= p.kappa * p.gamma / (p.g_n * p.g_n) * (1.0 - 1e-12));
            }
        }

        #[test]
        fn uncoupled_matches_lorentzian(
            w in -10.0f64..10.0, dc in -50.0f64..50.0, k in 0.1f64..100.0, l in 0.0f64..1.0
        ) {
            let p = ModelParams { kappa: k, lambda: l, delta_c: dc, g_n: 0.0, delta_gr: 100.0, ..Default::default() };
            let exact = lorentzian(w, &p);
            let s = noise_spectrum(w, &p).unwrap().s;
            let s0 = spectrum_gamma0(w, &p).unwrap();
            prop_assert!((s - exact).abs() <= 1e-12 * exact.max(f64::MIN_POSITIVE));
            prop_assert!((s0 - exact).abs() <= 1e-12 * exact.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn heating_bound_symmetric(x in -1e6f64..1e6) {
            let p = ModelParams::default();
            prop_assert_eq!(a_plus_upper_of_im(x, &p), a_plus_upper_of_im(-x, &p));
        }
    }
}
