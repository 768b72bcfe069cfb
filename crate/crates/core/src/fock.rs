//! Brute-force reference: the linearized master equation on a truncated
//! Fock space of the four modes (a, b, E, R).
//!
//! Basis states are ordered with `a` slowest and `R` fastest, so the index of
//! |n_a, n_b, n_E, n_R⟩ is ((n_a·d_b + n_b)·d_E + n_E)·d_R + n_R. Density
//! matrices are stored dense and row-major.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::{Moment, N_MOMENTS};
use crate::par;
use crate::params::{ModelParams, OMEGA_M};

const A: usize = 0;
const B: usize = 1;
const E: usize = 2;
const R: usize = 3;
const MODE_LABELS: [char; 4] = ['a', 'b', 'E', 'R'];

/// Largest tolerated population of a mode's highest retained level.
pub const TRUNCATION_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    /// Levels kept per mode, in the order (a, b, E, R).
    pub dims: [usize; 4],
    pub dt: f64,
    pub t_end: f64,
    /// Moments are extracted every `stride` steps.
    pub stride: usize,
}

impl FockConfig {
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.dims.iter().any(|&d| !(2..=8).contains(&d)) {
            v.push("each Fock dimension must lie in 2..=8".to_string());
        }
        if self.total_dim() > 4096 {
            v.push("total Hilbert dimension must not exceed 4096".to_string());
        }
        if !(self.dt > 0.0) || !self.t_end.is_finite() || self.t_end < 0.0 {
            v.push("dt must be positive and t_end finite and non-negative".to_string());
        }
        if self.stride == 0 {
            v.push("stride must be at least 1".to_string());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    fn decode(&self, mut idx: usize) -> [usize; 4] {
        let mut n = [0; 4];
        for k in (0..4).rev() {
            n[k] = idx % self.dims[k];
            idx /= self.dims[k];
        }
        n
    }

    fn encode(&self, n: &[usize; 4]) -> usize {
        n.iter().zip(&self.dims).fold(0, |acc, (&nk, &d)| acc * d + nk)
    }
}

/// Compressed sparse row operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

/// A product of ladder operators, leftmost factor applied last. `true`
/// marks a creation operator.
type Monomial<'a> = &'a [(usize, bool)];

impl Csr {
    fn from_monomials(cfg: &FockConfig, terms: &[(Complex64, Monomial<'_>)]) -> Self {
        let dim = cfg.total_dim();
        let mut rows: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for col in 0..dim {
            for &(coef, factors) in terms {
                let mut n = cfg.decode(col);
                let mut amp = coef;
                let mut alive = true;
                for &(mode, dagger) in factors.iter().rev() {
                    if dagger {
                        if n[mode] + 1 >= cfg.dims[mode] {
                            alive = false;
                            break;
                        }
                        n[mode] += 1;
                        amp *= (n[mode] as f64).sqrt();
                    } else {
                        if n[mode] == 0 {
                            alive = false;
                            break;
                        }
                        amp *= (n[mode] as f64).sqrt();
                        n[mode] -= 1;
                    }
                }
                if alive {
                    *rows[cfg.encode(&n)].entry(col).or_default() += amp;
                }
            }
        }
        let mut m = Csr { dim, indptr: vec![0], indices: Vec::new(), values: Vec::new() };
        for row in rows {
            for (c, v) in row {
                if v != Complex64::new(0.0, 0.0) {
                    m.indices.push(c);
                    m.values.push(v);
                }
            }
            m.indptr.push(m.indices.len());
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// self · x for a dense row-major dim×dim matrix `x`.
    pub fn mul_dense(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        par::rows_mut(&mut out, n, |i, row| {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let (j, v) = (self.indices[k], self.values[k]);
                for (o, xj) in row.iter_mut().zip(&x[j * n..(j + 1) * n]) {
                    *o += v * xj;
                }
            }
        });
        out
    }

    /// tr(self · x).
    pub fn trace_with(&self, x: &[Complex64]) -> Complex64 {
        let n = self.dim;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k] * n + i];
            }
        }
        s
    }
}

fn adjoint(x: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    par::rows_mut(&mut out, n, |i, row| {
        for (j, o) in row.iter_mut().enumerate() {
            *o = x[j * n + i].conj();
        }
    });
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    pub dim: usize,
    pub rho: Vec<Complex64>,
    pub time: f64,
}

impl DensityState {
    /// Truncated thermal state of `b` at occupation `n_th` (renormalized),
    /// all other modes in vacuum.
    pub fn thermal(cfg: &FockConfig, n_th: f64) -> Self {
        let dim = cfg.total_dim();
        let q = n_th / (1.0 + n_th);
        let weights: Vec<f64> = (0..cfg.dims[B]).map(|n| q.powi(n as i32)).collect();
        let z: f64 = weights.iter().sum();
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (n, w) in weights.iter().enumerate() {
            let i = cfg.encode(&[0, n, 0, 0]);
            rho[i * dim + i] = Complex64::new(w / z, 0.0);
        }
        Self { dim, rho, time: 0.0 }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.rho[i * self.dim + i]).sum()
    }

    /// max |ρ − ρ†|.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut e: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                e = e.max((self.rho[i * n + j] - self.rho[j * n + i].conj()).norm());
            }
        }
        e
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |i, j| (self.rho[i * n + j] + self.rho[j * n + i].conj()) * 0.5);
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Marginal level populations of `mode`.
    pub fn populations(&self, cfg: &FockConfig, mode: usize) -> Vec<f64> {
        let mut p = vec![0.0; cfg.dims[mode]];
        for i in 0..self.dim {
            p[cfg.decode(i)[mode]] += self.rho[i * self.dim + i].re;
        }
        p
    }

    /// (largest top-level population over modes, the mode holding it).
    pub fn truncation_indicator(&self, cfg: &FockConfig) -> (f64, char) {
        (0..4)
            .map(|k| (*self.populations(cfg, k).last().unwrap(), MODE_LABELS[k]))
            .fold((f64::NEG_INFINITY, 'a'), |acc, x| if x.0 > acc.0 { x } else { acc })
    }
}

/// Generator of the truncated master equation, with the anti-Hermitian
/// effective Hamiltonian K = H − (i/2) Σ c†c and jump operators c.
pub struct Liouvillian {
    pub cfg: FockConfig,
    k_eff: Csr,
    jumps: Vec<Csr>,
    moment_ops: Vec<Csr>,
}

impl Liouvillian {
    pub fn new(p: &ModelParams, cfg: &FockConfig) -> Result<Self> {
        cfg.validate()?;
        let c = |x: f64| Complex64::new(x, 0.0);
        let (ad, an) = ((A, true), (A, false));
        let (bd, bn) = ((B, true), (B, false));
        let (ed, en) = ((E, true), (E, false));
        let (rd, rn) = ((R, true), (R, false));

        let rates = [
            (2.0 * p.gamma_m * (p.n_th + 1.0), bn, bd),
            (2.0 * p.gamma_m * p.n_th, bd, bn),
            (2.0 * p.kappa, an, ad),
            (2.0 * p.gamma, en, ed),
        ];
        let half_i = Complex64::new(0.0, -0.5);
        let mut h: Vec<(Complex64, Vec<(usize, bool)>)> = vec![
            (c(-p.delta_c), vec![ad, an]),
            (c(OMEGA_M), vec![bd, bn]),
            (c(-p.delta_g), vec![ed, en]),
            (c(-p.delta_gr), vec![rd, rn]),
            (c(p.lambda), vec![ad, bd]),
            (c(p.lambda), vec![ad, bn]),
            (c(p.lambda), vec![an, bd]),
            (c(p.lambda), vec![an, bn]),
            (c(p.g_n), vec![an, ed]),
            (c(p.g_n), vec![ad, en]),
            (c(p.omega_r), vec![ed, rn]),
            (c(p.omega_r), vec![en, rd]),
        ];
        let mut jumps = Vec::new();
        for (rate, op, dag) in rates {
            if rate > 0.0 {
                h.push((half_i * rate, vec![dag, op]));
                jumps.push(Csr::from_monomials(cfg, &[(c(rate.sqrt()), &[op])]));
            }
        }
        let terms: Vec<_> = h.iter().map(|(k, m)| (*k, m.as_slice())).collect();
        let k_eff = Csr::from_monomials(cfg, &terms);

        let moment_ops =
            Moment::ALL.iter().map(|&m| Csr::from_monomials(cfg, &[(c(1.0), &moment_monomial(m))])).collect();
        Ok(Self { cfg: *cfg, k_eff, jumps, moment_ops })
    }

    /// dρ/dt for a Hermitian ρ: −i(Kρ − (Kρ)†) + Σ cρc†.
    pub fn apply(&self, rho: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.cfg.total_dim();
        if rho.len() != n * n {
            return Err(Error::Dimension { expected: n * n, got: rho.len() });
        }
        let kr = self.k_eff.mul_dense(rho);
        let kr_adj = adjoint(&kr, n);
        let i = Complex64::i();
        let mut out: Vec<Complex64> = kr.iter().zip(&kr_adj).map(|(x, y)| -i * (x - y)).collect();
        for c in &self.jumps {
            let cr = c.mul_dense(rho);
            let crc = c.mul_dense(&adjoint(&cr, n));
            for (o, v) in out.iter_mut().zip(&crc) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// ⟨O⟩ = tr(Oρ) for all twenty moments.
    pub fn moments(&self, rho: &[Complex64]) -> [Complex64; N_MOMENTS] {
        let mut m = [Complex64::new(0.0, 0.0); N_MOMENTS];
        for (k, op) in self.moment_ops.iter().enumerate() {
            m[k] = op.trace_with(rho);
        }
        m
    }
}

fn moment_monomial(m: Moment) -> [(usize, bool); 2] {
    use Moment::*;
    let l = |k| (k, false);
    let d = |k| (k, true);
    match m {
        AA => [l(A), l(A)],
        AdA => [d(A), l(A)],
        BA => [l(B), l(A)],
        BAd => [l(B), d(A)],
        BB => [l(B), l(B)],
        BdB => [d(B), l(B)],
        EA => [l(E), l(A)],
        EAd => [l(E), d(A)],
        EB => [l(E), l(B)],
        EBd => [l(E), d(B)],
        EE => [l(E), l(E)],
        EdE => [d(E), l(E)],
        RA => [l(R), l(A)],
        RAd => [l(R), d(A)],
        RB => [l(R), l(B)],
        RBd => [l(R), d(B)],
        RE => [l(R), l(E)],
        REd => [l(R), d(E)],
        RR => [l(R), l(R)],
        RdR => [d(R), l(R)],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockRun {
    /// (time, moments) at t = 0 and every `stride` steps.
    pub samples: Vec<(f64, [Complex64; N_MOMENTS])>,
    /// Largest truncation indicator seen at any sample.
    pub indicator: f64,
    pub last: DensityState,
}

/// RK4 integration of the truncated master equation.
pub fn evolve(p: &ModelParams, cfg: &FockConfig, rho0: &DensityState) -> Result<FockRun> {
    let l = Liouvillian::new(p, cfg)?;
    let n = cfg.total_dim();
    if rho0.dim != n {
        return Err(Error::Dimension { expected: n, got: rho0.dim });
    }
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let dt = cfg.dt;
    let axpy = |x: &[Complex64], k: &[Complex64], h: f64| -> Vec<Complex64> {
        x.iter().zip(k).map(|(a, b)| a + b * h).collect()
    };
    let mut rho = rho0.rho.clone();
    let mut indicator = 0.0f64;
    let mut samples = Vec::new();
    let mut sample = |rho: &[Complex64], t: f64, indicator: &mut f64| -> Result<()> {
        let state = DensityState { dim: n, rho: rho.to_vec(), time: t };
        let (ind, mode) = state.truncation_indicator(cfg);
        *indicator = indicator.max(ind);
        if ind > TRUNCATION_LIMIT {
            return Err(Error::Truncation { mode, indicator: ind });
        }
        samples.push((t, l.moments(rho)));
        Ok(())
    };
    sample(&rho, rho0.time, &mut indicator)?;
    for s in 1..=steps {
        let k1 = l.apply(&rho)?;
        let k2 = l.apply(&axpy(&rho, &k1, dt / 2.0))?;
        let k3 = l.apply(&axpy(&rho, &k2, dt / 2.0))?;
        let k4 = l.apply(&axpy(&rho, &k3, dt))?;
        for i in 0..rho.len() {
            rho[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        if s % cfg.stride == 0 {
            sample(&rho, rho0.time + s as f64 * dt, &mut indicator)?;
        }
    }
    let last = DensityState { dim: n, rho, time: rho0.time + steps as f64 * dt };
    Ok(FockRun { samples, indicator, last })
}

/// Deviation of the moment engine from a master-equation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Per moment: max |fock − moment| over the samples divided by the peak
    /// |moment|; NaN where the peak is below `floor`.
    pub relative_error: [f64; N_MOMENTS],
    pub max_relative_error: f64,
    pub indicator: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

/// Evolve from a thermal state with both engines and compare the moments on
/// the Fock sample grid.
pub fn compare_with_moments(p: &ModelParams, cfg: &FockConfig, floor: f64) -> Result<Comparison> {
    let run = evolve(p, cfg, &DensityState::thermal(cfg, p.n_th))?;
    let gen = crate::moments::build_generator(p);
    let s0 = crate::moments::MomentState { time: 0.0, values: run.samples[0].1 };
    let grid: Vec<f64> = run.samples.iter().map(|s| s.0).collect();
    let exact = crate::moments::evolve_exact(&gen, &s0, &grid)?;
    let mut peak = [0.0f64; N_MOMENTS];
    let mut err = [0.0f64; N_MOMENTS];
    for ((_, fm), st) in run.samples.iter().zip(&exact.states) {
        for k in 0..N_MOMENTS {
            peak[k] = peak[k].max(st.values[k].norm());
            err[k] = err[k].max((fm[k] - st.values[k]).norm());
        }
    }
    let relative_error: [f64; N_MOMENTS] =
        std::array::from_fn(|k| if peak[k] > floor { err[k] / peak[k] } else { f64::NAN });
    let max_relative_error = relative_error.iter().copied().filter(|e| !e.is_nan()).fold(0.0, f64::max);
    let last = &run.last;
    Ok(Comparison {
        relative_error,
        max_relative_error,
        indicator: run.indicator,
        trace_error: (last.trace() - 1.0).norm(),
        hermiticity_error: last.hermiticity_error(),
        min_eigenvalue: last.min_eigenvalue(),
    })
}
