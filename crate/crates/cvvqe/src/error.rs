//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by state construction, algebra, and solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("operands live on different mode counts: {left} vs {right}")]
    ModeCountMismatch { left: usize, right: usize },

    #[error("matrix is not symmetric (max asymmetry {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("covariance matrix is unphysical: {reason}")]
    Unphysical { reason: String },

    #[error("covariance matrix is not pure (det V = {det})")]
    NotPure { det: f64 },

    #[error("purity must lie in (0, 1], got {value}")]
    InvalidPurity { value: f64 },

    #[error("preparation annihilates the Gaussian state (|K| = {k_abs:e})")]
    AnnihilatedPreparation { k_abs: f64 },

    #[error("normalization K is not real positive (K = {re:e} + {im:e}i)")]
    NonRealNormalization { re: f64, im: f64 },

    #[error("energy has a non-negligible imaginary part ({im:e} vs real {re:e})")]
    NonRealEnergy { re: f64, im: f64 },

    #[error("gradient probe produced a non-finite component at coordinate {index}")]
    NonFiniteGradient { index: usize },

    #[error("all {restarts} optimizer restarts failed to produce a finite energy")]
    AllRestartsFailed { restarts: usize },

    #[error("layer list is empty")]
    EmptyLayers,

    #[error("Fock dimension {dim} exceeds the limit {limit}")]
    FockDimensionTooLarge { dim: usize, limit: usize },

    #[error("truncation leakage {leakage:e} exceeds tolerance {tolerance:e}; raise the cutoff")]
    LeakageExceeded { leakage: f64, tolerance: f64 },

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("Lanczos did not converge after {iterations} iterations")]
    LanczosNoConvergence { iterations: usize },

    #[error("invalid model: {reason}")]
    InvalidModel { reason: String },

    #[error("subtraction stage {stage} sees an empty mode (<n> = {mean_occupation:e})")]
    EmptyModeSubtraction { stage: usize, mean_occupation: f64 },

    #[error("preparation is not a product of annihilation operators")]
    NotASubtractionProduct,

    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
