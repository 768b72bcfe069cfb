//! Parameter sets of the published figures.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::FockConfig;
use crate::params::ModelParams;
use crate::sweep::{Axis, CellRule, Scale, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig5c,
    Fig6a,
    Fig6b,
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5a,
        Figure::Fig5b,
        Figure::Fig5c,
        Figure::Fig6a,
        Figure::Fig6b,
        Figure::Fig7,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::Fig5c => "fig5c",
            Figure::Fig6a => "fig6a",
            Figure::Fig6b => "fig6b",
            Figure::Fig7 => "fig7",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| Error::Validation(vec![format!("unknown preset `{s}`")]))
    }
}

/// Shared cavity–ensemble parameters: κ = 5, γ = 15, λ = 0.02, g_N = 5000,
/// Ω_r = 60, η = 98%.
fn common() -> ModelParams {
    ModelParams { eta: Some(0.98), ..ModelParams::default() }
}

/// Base parameters of a figure. Detunings are left at zero; presets with
/// `solve_detunings` expect them to be solved from η.
pub fn params(fig: Figure) -> ModelParams {
    let c = common();
    match fig {
        Figure::Fig2a => ModelParams { eta: None, ..c },
        Figure::Fig2b | Figure::Fig3 | Figure::Fig4 => c,
        Figure::Fig5a | Figure::Fig7 => ModelParams { n_th: 300.0, ..c },
        Figure::Fig5b => ModelParams { kappa: 500.0, g_n: 5e4, n_th: 300.0, ..c },
        Figure::Fig5c => ModelParams { kappa: 500.0, g_n: 5e4, lambda: 0.2, n_th: 300.0, ..c },
        Figure::Fig6a => ModelParams { omega_r: 15.0, ..c },
        Figure::Fig6b => ModelParams { omega_r: 150.0, ..c },
    }
}

/// Whether the figure's detunings follow from the optimal conditions.
pub fn solve_detunings(fig: Figure) -> bool {
    !matches!(fig, Figure::Fig2a | Figure::Fig3)
}

/// Curves drawn for several γ_m.
pub fn gamma_m_values(fig: Figure) -> &'static [f64] {
    match fig {
        Figure::Fig5a | Figure::Fig5b | Figure::Fig5c | Figure::Fig7 => &[0.0, 2e-7],
        _ => &[0.0],
    }
}

/// g_N of the three panel-(a) curves.
pub const FIG2A_G_N: [f64; 3] = [50.0, 500.0, 5000.0];
/// η of the three panel-(b) curves.
pub const FIG2B_ETA: [f64; 3] = [0.98, 0.5, 0.25];

/// Grid of the swept figures.
pub fn sweep(fig: Figure) -> Option<SweepSpec> {
    match fig {
        Figure::Fig3 => Some(SweepSpec {
            axis1: Axis::new("delta_c", 0.0, 800.0, 50, Scale::Linear),
            axis2: Some(Axis::new("delta_gr", -3.0, 3.0, 50, Scale::Linear)),
            rule: CellRule::CoolingFraction,
            numeric: false,
        }),
        Figure::Fig4 => Some(SweepSpec {
            axis1: Axis::new("gamma_m", 1e-9, 1e-5, 50, Scale::Log),
            axis2: Some(Axis::new("n_th", 10.0, 1000.0, 50, Scale::Log)),
            rule: CellRule::Fixed,
            numeric: true,
        }),
        Figure::Fig7 => Some(SweepSpec {
            axis1: Axis::new("omega_r", 10.0, 1e4, 20, Scale::Log),
            axis2: None,
            rule: CellRule::Solve,
            numeric: true,
        }),
        _ => None,
    }
}

/// Weak-coupling parameters small enough for the truncated master equation.
pub fn oracle_params() -> ModelParams {
    ModelParams {
        kappa: 0.3,
        gamma: 0.3,
        gamma_m: 0.05,
        lambda: 0.1,
        g_n: 0.5,
        omega_r: 0.4,
        n_th: 0.1,
        eta: None,
        ..ModelParams::default()
    }
    .with_detunings(-0.5, 0.3, -1.0)
}

/// Truncation and time grid paired with [`oracle_params`].
pub const ORACLE_CONFIG: FockConfig = FockConfig { dims: [4, 6, 4, 3], dt: 0.02, t_end: 10.0, stride: 5 };
