//! Steady amplitudes against the mean-field equations they must solve.

use num_complex::Complex64;
use proptest::prelude::*;

use hybrid_cooling::amplitudes::{self, DriveParams};

fn drive() -> impl Strategy<Value = DriveParams> {
    (
        (0.0f64..100.0, 0.0f64..1e-4, 1e-3f64..1.0, 1.0f64..1e8, -50.0f64..50.0),
        (0.1f64..20.0, 0.1f64..20.0, -50.0f64..50.0, 0.5f64..10.0, 0.1f64..100.0),
    )
        .prop_map(|((omega_p, lambda0, g0, n_atoms, dcp), (kappa, gamma, delta_g, delta_gr, omega_r))| {
            DriveParams { omega_p, lambda0, g0, n_atoms, delta_c_prime: dcp, kappa, gamma, delta_g, delta_gr, omega_r }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn amplitudes_solve_mean_field_equations(d in drive()) {
        let s = match amplitudes::steady_amplitudes(&d) {
            Ok(s) => s,
            Err(e) => return Err(TestCaseError::reject(e.to_string())),
        };
        let i = Complex64::i();
        let (a, e, r, b) = (s.a_bar, s.e_bar, s.r_bar, s.b_bar);
        let dc = d.delta_c_prime - d.lambda0 * 2.0 * b.re;
        let scale = d.omega_p.max(1e-300) * (1.0 + d.kappa + d.gamma + d.omega_r + d.g_n() + dc.abs() + d.delta_g.abs());
        // d/dt of a, E and R with the drive frame of the linearized model.
        let da = i * dc * a - d.kappa * a - i * d.g_n() * e - i * d.omega_p;
        let de = i * d.delta_g * e - d.gamma * e - i * d.g_n() * a - i * d.omega_r * r;
        let dr = i * d.delta_gr * r - i * d.omega_r * e;
        for (name, v) in [("a", da), ("E", de), ("R", dr)] {
            prop_assert!(v.norm() < 1e-9 * scale, "{}: {:e}", name, v.norm());
        }
        prop_assert!((b.re + d.lambda0 * a.norm_sqr()).abs() <= 1e-12 * (1.0 + b.re.abs()) && b.im == 0.0);
        prop_assert!((s.delta_c_eff - dc).abs() < 1e-11 * (1.0 + dc.abs()));
        prop_assert_eq!(s.lambda_eff, d.lambda0 * a);
    }
}
