use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("config error on line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("pole of {what} at omega = {omega}")]
    Pole { what: &'static str, omega: f64 },

    #[error("no admissible solution: {0}")]
    Regime(String),

    #[error("system is not cooling: {0}")]
    Instability(String),

    #[error("integration diverged at t = {time}")]
    Stability { time: f64 },

    #[error("generator is singular: {0}")]
    SingularGenerator(String),

    #[error("Fock truncation too small: highest-level population {indicator:.3e} in mode {mode}")]
    Truncation { mode: char, indicator: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("self-consistent amplitudes did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("steady-state denominator D vanishes (|D| = {0:.3e})")]
    SingularDenominator(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
