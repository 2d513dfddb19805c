//! Classical simulator for continuous-variable variational quantum
//! eigensolvers on photon-subtracted (and photon-added) Gaussian states.
//!
//! The crate evaluates expectation values of ladder-operator polynomials on
//! Gaussian states through pair contractions and perfect-matching sums,
//! minimizes the Bose–Hubbard energy over the parameters of an `N²+N`
//! Gaussian unitary, and cross-validates everything against a truncated
//! Fock-space simulation and exact diagonalization.
//!
//! All numerical code is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); concrete `f64` aliases live at the crate root.

pub mod conventions;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod ladder;
pub mod lbfgs;
pub mod models;
pub mod scalar;
pub mod validation;
pub mod vqe;
pub mod wick;

pub use error::{Error, Result};
pub use gaussian::{
    bogoliubov_of, gaussian_covariance, gaussian_symplectic, passive_from_params, passive_unitary,
    vacuum_covariance, BogoliubovMap, CovarianceMatrix, GaussianParams, SymplecticMatrix,
};
pub use ladder::{ipag_reduce, LadderMonomial, LadderOp, LadderPolynomial, OpKind, ReducedCircuit};
pub use models::{bose_hubbard_polynomial, Boundary, BoseHubbardParams};
pub use scalar::Real;
pub use vqe::{
    energy, gradient, optimize, resource_report, squeezing_cost_db, subtraction_prep,
    subtraction_probability, AnsatzConfig, OptimizerConfig, ResourceReport, VqeResult,
};
pub use wick::{
    gaussian_expectation, gaussian_expectation_detailed, nongaussian_expectation,
    pair_expectation, polynomial_expectation, ContractionTable, MatchingSum,
};
pub use fock::{
    apply_polynomial, bh_ground_energy, expectation_fock, gaussian_state_fock, FockSpace,
    FockVector,
};

/// `f64` aliases for the main state types.
pub type CovarianceMatrix64 = CovarianceMatrix<f64>;
pub type SymplecticMatrix64 = SymplecticMatrix<f64>;
pub type GaussianParams64 = GaussianParams<f64>;
pub type BogoliubovMap64 = BogoliubovMap<f64>;
pub type LadderMonomial64 = LadderMonomial<f64>;
pub type LadderPolynomial64 = LadderPolynomial<f64>;
pub type ReducedCircuit64 = ReducedCircuit<f64>;
pub type BoseHubbardParams64 = BoseHubbardParams<f64>;
pub type AnsatzConfig64 = AnsatzConfig<f64>;
pub type OptimizerConfig64 = OptimizerConfig<f64>;
pub type VqeResult64 = VqeResult<f64>;
pub type ResourceReport64 = ResourceReport<f64>;
pub type FockVector64 = FockVector<f64>;
