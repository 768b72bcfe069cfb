//! Closed linear dynamics of the twenty second-order fluctuation moments.
//!
//! The equations mix moments with their complex conjugates, so they are
//! linear over the reals only. States are therefore embedded in R⁴⁰ as the
//! real parts of the twenty moments followed by their imaginary parts.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{ModelParams, OMEGA_M};

pub const N_MOMENTS: usize = 20;
pub const DIM: usize = 2 * N_MOMENTS;

/// The twenty moments, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Moment {
    AA,
    AdA,
    BA,
    BAd,
    BB,
    BdB,
    EA,
    EAd,
    EB,
    EBd,
    EE,
    EdE,
    RA,
    RAd,
    RB,
    RBd,
    RE,
    REd,
    RR,
    RdR,
}

impl Moment {
    pub const ALL: [Moment; N_MOMENTS] = [
        Moment::AA,
        Moment::AdA,
        Moment::BA,
        Moment::BAd,
        Moment::BB,
        Moment::BdB,
        Moment::EA,
        Moment::EAd,
        Moment::EB,
        Moment::EBd,
        Moment::EE,
        Moment::EdE,
        Moment::RA,
        Moment::RAd,
        Moment::RB,
        Moment::RBd,
        Moment::RE,
        Moment::REd,
        Moment::RR,
        Moment::RdR,
    ];

    /// Populations ⟨a†a⟩, ⟨b†b⟩, ⟨E†E⟩, ⟨R†R⟩.
    pub const POPULATIONS: [Moment; 4] = [Moment::AdA, Moment::BdB, Moment::EdE, Moment::RdR];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short ASCII name, `d` marking a dagger: `ba` is ⟨ba⟩, `bad` is ⟨ba†⟩.
    pub fn name(self) -> &'static str {
        const NAMES: [&str; N_MOMENTS] = [
            "aa", "ada", "ba", "bad", "bb", "bdb", "ea", "ead", "eb", "ebd", "ee", "ede", "ra", "rad", "rb", "rbd",
            "re", "red", "rr", "rdr",
        ];
        NAMES[self.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub time: f64,
    pub values: [Complex64; N_MOMENTS],
}

impl MomentState {
    pub fn zero(time: f64) -> Self {
        Self { time, values: [Complex64::new(0.0, 0.0); N_MOMENTS] }
    }

    pub fn get(&self, m: Moment) -> Complex64 {
        self.values[m.index()]
    }

    pub fn set(&mut self, m: Moment, v: Complex64) {
        self.values[m.index()] = v;
    }

    /// Mean phonon number ⟨b†b⟩.
    pub fn phonon(&self) -> f64 {
        self.get(Moment::BdB).re
    }

    pub fn to_real(&self) -> DVector<f64> {
        let mut x = DVector::zeros(DIM);
        for (i, v) in self.values.iter().enumerate() {
            x[i] = v.re;
            x[N_MOMENTS + i] = v.im;
        }
        x
    }

    pub fn from_real(time: f64, x: &DVector<f64>) -> Self {
        let mut s = Self::zero(time);
        for i in 0..N_MOMENTS {
            s.values[i] = Complex64::new(x[i], x[N_MOMENTS + i]);
        }
        s
    }

    /// Populations are real and non-negative within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        Moment::POPULATIONS.iter().all(|&m| {
            let v = self.get(m);
            v.im.abs() < tol * (1.0 + v.norm()) && v.re > -tol
        })
    }
}

/// One entry of the right-hand side: `coef · m[col]`, or `coef · m[col]*`
/// when `conj` is set, contributing to d m[row]/dt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub row: Moment,
    pub col: Moment,
    pub coef: Complex64,
    pub conj: bool,
}

/// Coefficient table of the moment equations with their inhomogeneities.
pub fn coefficient_table(p: &ModelParams) -> (Vec<Term>, [Complex64; N_MOMENTS]) {
    use Moment::*;
    let i = Complex64::i();
    let re = |x: f64| Complex64::new(x, 0.0);
    let (k, g, gm, lam, gn, or) = (p.kappa, p.gamma, p.gamma_m, p.lambda, p.g_n, p.omega_r);
    let (dc, dg, dgr, wm) = (p.delta_c, p.delta_g, p.delta_gr, OMEGA_M);

    let mut t = Vec::with_capacity(100);
    let mut add = |row, col, coef: Complex64, conj| t.push(Term { row, col, coef, conj });

    add(AA, AA, 2.0 * (i * dc - k), false);
    add(AA, EA, -2.0 * i * gn, false);
    add(AA, BAd, -2.0 * i * lam, true);
    add(AA, BA, -2.0 * i * lam, false);

    add(AdA, AdA, re(-2.0 * k), false);
    add(AdA, EAd, -i * gn, false);
    add(AdA, EAd, i * gn, true);
    add(AdA, BA, -i * lam, true);
    add(AdA, BA, i * lam, false);
    add(AdA, BAd, -i * lam, false);
    add(AdA, BAd, i * lam, true);

    add(BA, BA, i * (dc - wm) - k - gm, false);
    add(BA, EB, -i * gn, false);
    for m in [AA, AdA, BB, BdB] {
        add(BA, m, -i * lam, false);
    }

    add(BAd, BAd, -(i * (dc + wm) + k + gm), false);
    add(BAd, EBd, i * gn, true);
    add(BAd, AA, -i * lam, true);
    add(BAd, AdA, -i * lam, false);
    add(BAd, BB, i * lam, false);
    add(BAd, BdB, i * lam, false);

    add(BB, BB, -2.0 * (i * wm + gm), false);
    add(BB, BA, -2.0 * i * lam, false);
    add(BB, BAd, -2.0 * i * lam, false);

    add(BdB, BdB, re(-2.0 * gm), false);
    add(BdB, BA, -i * lam, true);
    add(BdB, BA, i * lam, false);
    add(BdB, BAd, -i * lam, true);
    add(BdB, BAd, i * lam, false);

    add(EA, EA, i * (dg + dc) - k - g, false);
    add(EA, AA, -i * gn, false);
    add(EA, EE, -i * gn, false);
    add(EA, RA, -i * or, false);
    add(EA, EBd, -i * lam, false);
    add(EA, EB, -i * lam, false);

    add(EAd, EAd, i * (dg - dc) - k - g, false);
    add(EAd, AdA, -i * gn, false);
    add(EAd, EdE, i * gn, false);
    add(EAd, RAd, -i * or, false);
    add(EAd, EBd, i * lam, false);
    add(EAd, EB, i * lam, false);

    add(EB, EB, i * (dg - wm) - g - gm, false);
    add(EB, BA, -i * gn, false);
    add(EB, RB, -i * or, false);
    add(EB, EAd, -i * lam, false);
    add(EB, EA, -i * lam, false);

    add(EBd, EBd, i * (dg + wm) - g - gm, false);
    add(EBd, BAd, -i * gn, true);
    add(EBd, RBd, -i * or, false);
    add(EBd, EAd, i * lam, false);
    add(EBd, EA, i * lam, false);

    add(EE, EE, 2.0 * (i * dg - g), false);
    add(EE, EA, -2.0 * i * gn, false);
    add(EE, RE, -2.0 * i * or, false);

    add(EdE, EdE, re(-2.0 * g), false);
    add(EdE, EAd, -i * gn, true);
    add(EdE, EAd, i * gn, false);
    add(EdE, REd, -i * or, false);
    add(EdE, REd, i * or, true);

    add(RA, RA, i * (dgr + dc) - k, false);
    add(RA, RE, -i * gn, false);
    add(RA, EA, -i * or, false);
    add(RA, RBd, -i * lam, false);
    add(RA, RB, -i * lam, false);

    add(RAd, RAd, i * (dgr - dc) - k, false);
    add(RAd, REd, i * gn, false);
    add(RAd, EAd, -i * or, false);
    add(RAd, RBd, i * lam, false);
    add(RAd, RB, i * lam, false);

    add(RB, RB, i * (dgr - wm) - gm, false);
    add(RB, EB, -i * or, false);
    add(RB, RAd, -i * lam, false);
    add(RB, RA, -i * lam, false);

    add(RBd, RBd, i * (dgr + wm) - gm, false);
    add(RBd, EBd, -i * or, false);
    add(RBd, RAd, i * lam, false);
    add(RBd, RA, i * lam, false);

    add(RE, RE, i * (dgr + dg) - g, false);
    add(RE, RA, -i * gn, false);
    add(RE, RR, -i * or, false);
    add(RE, EE, -i * or, false);

    add(REd, REd, i * (dgr - dg) - g, false);
    add(REd, RAd, i * gn, false);
    add(REd, RdR, i * or, false);
    add(REd, EdE, -i * or, false);

    add(RR, RR, 2.0 * i * dgr, false);
    add(RR, RE, -2.0 * i * or, false);

    add(RdR, REd, i * or, false);
    add(RdR, REd, -i * or, true);

    let mut c = [Complex64::new(0.0, 0.0); N_MOMENTS];
    c[BA.index()] = -i * lam;
    c[BdB.index()] = re(2.0 * gm * p.n_th);
    (t, c)
}

/// Real-linear generator dx/dt = matrix·x + constant on R⁴⁰.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentGenerator {
    pub matrix: DMatrix<f64>,
    pub constant: DVector<f64>,
}

pub fn build_generator(p: &ModelParams) -> MomentGenerator {
    let (terms, c) = coefficient_table(p);
    let n = N_MOMENTS;
    let mut a = DMatrix::zeros(DIM, DIM);
    for t in terms {
        let (r, j) = (t.row.index(), t.col.index());
        let (cr, ci) = (t.coef.re, t.coef.im);
        let s = if t.conj { -1.0 } else { 1.0 };
        a[(r, j)] += cr;
        a[(r, n + j)] -= s * ci;
        a[(n + r, j)] += ci;
        a[(n + r, n + j)] += s * cr;
    }
    let constant = MomentState { time: 0.0, values: c }.to_real();
    MomentGenerator { matrix: a, constant }
}

impl MomentGenerator {
    /// Time derivative of `s`.
    pub fn apply(&self, s: &MomentState) -> MomentState {
        let dx = &self.matrix * s.to_real() + &self.constant;
        MomentState::from_real(s.time, &dx)
    }

    /// Augmented propagator exp([[A, c], [0, 0]]·dt), acting on (x, 1).
    pub fn propagator(&self, dt: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(DIM + 1, DIM + 1);
        m.view_mut((0, 0), (DIM, DIM)).copy_from(&(&self.matrix * dt));
        m.view_mut((0, DIM), (DIM, 1)).copy_from(&(&self.constant * dt));
        m.exp()
    }

    /// Largest eigenvalue modulus, or the max-row-sum bound on it when the
    /// eigenvalue iteration does not converge.
    pub fn spectral_radius(&self) -> f64 {
        match eigenvalues(&self.matrix) {
            Some(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
            None => self.matrix.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max),
        }
    }
}

fn eigenvalues(m: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 200 * m.nrows())?;
    Some(schur.complex_eigenvalues().iter().copied().collect())
}

/// Mechanical mode at n_th, everything else in vacuum.
pub fn thermal_initial(p: &ModelParams) -> MomentState {
    let mut s = MomentState::zero(0.0);
    s.set(Moment::BdB, Complex64::new(p.n_th, 0.0));
    s
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub states: Vec<MomentState>,
    pub phonon: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    fn push(&mut self, s: MomentState) {
        self.phonon.push(s.phonon());
        self.states.push(s);
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }
}

/// Exact propagation onto `t_grid`, which must start at `s0.time` or later
/// and increase strictly.
pub fn evolve_exact(gen: &MomentGenerator, s0: &MomentState, t_grid: &[f64]) -> Result<Trajectory> {
    let mut traj = Trajectory::default();
    let mut x = DVector::from_iterator(DIM + 1, s0.to_real().iter().copied().chain([1.0]));
    let mut t = s0.time;
    let mut cached: Option<(f64, DMatrix<f64>)> = None;
    for (k, &tk) in t_grid.iter().enumerate() {
        let dt = tk - t;
        if dt < 0.0 || (k > 0 && dt == 0.0) || !dt.is_finite() {
            return Err(Error::Validation(vec![format!("time grid not increasing at index {k}")]));
        }
        if dt > 0.0 {
            let reuse = matches!(&cached, Some((h, _)) if (h - dt).abs() <= 1e-12 * dt);
            if !reuse {
                cached = Some((dt, gen.propagator(dt)));
            }
            x = &cached.as_ref().unwrap().1 * x;
        }
        t = tk;
        traj.push(MomentState::from_real(tk, &x.rows(0, DIM).into_owned()));
    }
    Ok(traj)
}

/// Fixed-step classical RK4, sampled every `stride` steps (and at t = s0.time).
pub fn evolve_rk4(gen: &MomentGenerator, s0: &MomentState, dt: f64, t_end: f64, stride: usize) -> Result<Trajectory> {
    if !(dt > 0.0) || stride == 0 || !(t_end >= s0.time) {
        return Err(Error::Validation(vec!["rk4 needs dt > 0, stride >= 1, t_end >= t0".into()]));
    }
    let mut traj = Trajectory::default();
    let rho = gen.spectral_radius();
    if dt * rho >= 2.8 {
        traj.warnings.push(format!("dt = {dt:e} exceeds the RK4 stability estimate 2.8/rho = {:e}", 2.8 / rho));
    }
    let f = |x: &DVector<f64>| &gen.matrix * x + &gen.constant;
    let steps = ((t_end - s0.time) / dt).round() as usize;
    let mut x = s0.to_real();
    traj.push(*s0);
    for n in 1..=steps {
        let k1 = f(&x);
        let k2 = f(&(&x + &k1 * (dt / 2.0)));
        let k3 = f(&(&x + &k2 * (dt / 2.0)));
        let k4 = f(&(&x + &k3 * dt));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let time = s0.time + n as f64 * dt;
        if x.iter().any(|v| !(v.abs() <= 1e12)) {
            return Err(Error::Stability { time });
        }
        if n % stride == 0 {
            traj.push(MomentState::from_real(time, &x));
        }
    }
    Ok(traj)
}

/// Components of the physical block: everything except the imaginary parts
/// of the populations, which decouple and are identically zero for any
/// physical state.
fn physical_indices() -> Vec<usize> {
    let pinned: Vec<usize> = Moment::POPULATIONS.iter().map(|m| N_MOMENTS + m.index()).collect();
    (0..DIM).filter(|j| !pinned.contains(j)).collect()
}

/// Stationary state of a Hurwitz-stable generator.
pub fn steady_state(gen: &MomentGenerator) -> Result<MomentState> {
    let keep = physical_indices();
    let a = gen.matrix.select_rows(&keep).select_columns(&keep);
    let c = gen.constant.select_rows(&keep);
    let ev = eigenvalues(&a)
        .ok_or_else(|| Error::Instability("eigenvalue iteration did not converge; stability unknown".into()))?;
    let max_re = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re >= -1e-12 {
        return Err(Error::Instability(format!("generator eigenvalue with real part {max_re:e}")));
    }
    let lu = a.clone().lu();
    let mut y = lu.solve(&(-&c)).ok_or_else(|| Error::SingularGenerator("LU failed".into()))?;
    for _ in 0..3 {
        let r = &a * &y + &c;
        match lu.solve(&r) {
            Some(d) => y -= d,
            None => break,
        }
    }
    let mut x = DVector::zeros(DIM);
    for (k, &j) in keep.iter().enumerate() {
        x[j] = y[k];
    }
    Ok(MomentState::from_real(f64::INFINITY, &x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{cooling, detunings};

    fn mild() -> ModelParams {
        ModelParams {
            kappa: 0.3,
            gamma: 0.3,
            gamma_m: 0.05,
            lambda: 0.1,
            g_n: 0.5,
            omega_r: 0.4,
            n_th: 0.3,
            ..Default::default()
        }
        .with_detunings(-0.5, 0.3, -1.0)
    }

    fn flagship(gamma_m: f64) -> ModelParams {
        let base = ModelParams { gamma_m, n_th: 300.0, ..Default::default() };
        detunings::solve_default(&base, 0.98).unwrap().apply(&base)
    }

    #[test]
    fn names_are_unique_and_ordered() {
        for (k, m) in Moment::ALL.iter().enumerate() {
            assert_eq!(m.index(), k);
        }
        let mut names: Vec<_> = Moment::ALL.iter().map(|m| m.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), N_MOMENTS);
    }

    #[test]
    fn zero_state_gives_constant() {
        let g = build_generator(&mild());
        let d = g.apply(&MomentState::zero(0.0));
        assert_eq!(d.to_real(), g.constant);
        let nonzero: Vec<usize> = (0..DIM).filter(|&j| g.constant[j] != 0.0).collect();
        assert_eq!(nonzero, vec![Moment::BdB.index(), N_MOMENTS + Moment::BA.index()]);
        assert_eq!(g.constant[Moment::BdB.index()], 2.0 * 0.05 * 0.3);
        assert_eq!(g.constant[N_MOMENTS + Moment::BA.index()], -0.1);
    }

    #[test]
    fn uncoupled_generator_only_rotates() {
        let p = ModelParams { kappa: 0.0, gamma: 0.0, lambda: 0.0, g_n: 0.0, omega_r: 0.0, ..Default::default() }
            .with_detunings(0.7, -0.2, 1.3);
        let g = build_generator(&p);
        assert!(g.constant.iter().all(|&c| c == 0.0));
        for r in 0..DIM {
            for c in 0..DIM {
                if g.matrix[(r, c)] != 0.0 {
                    assert_eq!(r % N_MOMENTS, c % N_MOMENTS, "({r},{c})");
                    assert_ne!(r / N_MOMENTS, c / N_MOMENTS);
                }
            }
        }
    }

    #[test]
    fn decoupled_phonon_row() {
        let p = ModelParams { lambda: 0.0, gamma_m: 0.01, n_th: 7.0, ..mild() };
        let g = build_generator(&p);
        let r = Moment::BdB.index();
        for c in 0..DIM {
            let expect = if c == r { -0.02 } else { 0.0 };
            assert_eq!(g.matrix[(r, c)], expect);
        }
        assert_eq!(g.constant[r], 0.14);
    }

    #[test]
    fn thermal_initial_state() {
        let s = thermal_initial(&ModelParams { n_th: 300.0, ..Default::default() });
        assert_eq!(s.phonon(), 300.0);
        assert_eq!(s.values.iter().filter(|v| v.norm() != 0.0).count(), 1);
        assert!(s.is_physical(1e-9));
        assert_eq!(thermal_initial(&ModelParams::default()), MomentState::zero(0.0));
    }

    #[test]
    fn exact_single_point_is_identity() {
        let p = mild();
        let s0 = thermal_initial(&p);
        let t = evolve_exact(&build_generator(&p), &s0, &[0.0]).unwrap();
        assert_eq!(t.states, vec![s0]);
        assert!(evolve_exact(&build_generator(&p), &s0, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn thermal_equilibrium_without_coupling() {
        let p = ModelParams { lambda: 0.0, gamma_m: 0.1, n_th: 4.0, ..mild() };
        let g = build_generator(&p);
        let grid: Vec<f64> = (0..=20).map(|k| k as f64).collect();
        let t = evolve_exact(&g, &thermal_initial(&p), &grid).unwrap();
        for n in t.phonon {
            assert!((n - 4.0).abs() < 1e-10, "{n}");
        }
    }

    #[test]
    fn rk4_matches_exact() {
        let p = mild();
        let g = build_generator(&p);
        let s0 = thermal_initial(&p);
        let rk = evolve_rk4(&g, &s0, 1e-3, 10.0, 1000).unwrap();
        assert!(rk.warnings.is_empty());
        let ex = evolve_exact(&g, &s0, &rk.times()).unwrap();
        for (a, b) in rk.phonon.iter().zip(&ex.phonon) {
            assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} {b}");
        }
    }

    #[test]
    fn rk4_zero_generator_is_constant() {
        let g = MomentGenerator { matrix: DMatrix::zeros(DIM, DIM), constant: DVector::zeros(DIM) };
        let s0 = thermal_initial(&ModelParams { n_th: 2.5, ..Default::default() });
        let t = evolve_rk4(&g, &s0, 0.1, 1.0, 1).unwrap();
        assert_eq!(t.states.len(), 11);
        assert!(t.phonon.iter().all(|&n| n == 2.5));
    }

    #[test]
    fn rk4_divergence_detected() {
        let p = flagship(0.0);
        let g = build_generator(&p);
        let r = evolve_rk4(&g, &thermal_initial(&p), 1.0, 1e3, 1);
        assert!(matches!(r, Err(Error::Stability { .. })));
    }

    #[test]
    fn steady_state_thermal_without_coupling() {
        let p = ModelParams { lambda: 0.0, gamma_m: 0.05, n_th: 3.0, ..flagship(0.0) };
        let s = steady_state(&build_generator(&p)).unwrap();
        assert!((s.phonon() - 3.0).abs() < 1e-9);
        for m in Moment::ALL.iter().filter(|&&m| m != Moment::BdB) {
            assert!(s.get(*m).norm() < 1e-9, "{}", m.name());
        }
    }

    #[test]
    fn steady_state_refuses_undamped() {
        let p = ModelParams { lambda: 0.0, gamma_m: 0.0, ..flagship(0.0) };
        assert!(matches!(steady_state(&build_generator(&p)), Err(Error::Instability(_))));
        let resonant = ModelParams { lambda: 0.0, ..Default::default() };
        assert!(matches!(steady_state(&build_generator(&resonant)), Err(Error::Instability(_))));
    }

    #[test]
    fn steady_state_is_fixed_point() {
        for p in [mild(), flagship(2e-7)] {
            let g = build_generator(&p);
            let s = steady_state(&g).unwrap();
            let r = g.apply(&s).to_real().norm();
            assert!(r < 1e-10 * g.constant.norm(), "{r:e}");
            assert!(s.is_physical(1e-9));
        }
    }

    #[test]
    fn steady_state_agrees_with_theory() {
        let p = flagship(2e-7);
        let theory = cooling::report(&p).unwrap().n_ss;
        let n = steady_state(&build_generator(&p)).unwrap().phonon();
        assert!((n / theory - 1.0).abs() < 0.3, "{n} vs {theory}");
    }

    #[test]
    fn exact_reaches_steady_state() {
        let p = mild();
        let g = build_generator(&p);
        let ss = steady_state(&g).unwrap().phonon();
        let t = evolve_exact(&g, &thermal_initial(&p), &[100.0, 400.0]).unwrap();
        assert!((t.phonon[1] / ss - 1.0).abs() < 1e-6, "{} {ss}", t.phonon[1]);
    }
}
