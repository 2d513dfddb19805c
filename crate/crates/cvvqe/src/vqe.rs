//! Variational loop: parametrized ansatz state (Gaussian unitary layers plus
//! a ladder-operator preparation and a purity target), energy objective via
//! the pair-contraction engine, central-difference gradients, quasi-Newton
//! minimization with seeded restarts, and experimental-resource reporting.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, GaussianParams};
use crate::ladder::{ipag_reduce, LadderOp, LadderPolynomial, OpKind, ReducedCircuit};
use crate::lbfgs::{self, LbfgsConfig};
use crate::scalar::{lit, Real};
use crate::wick::nongaussian_expectation;

/// Relative bound on the imaginary part of a raw energy value.
pub const ENERGY_IMAG_REL: f64 = 1e-9;
/// Mean occupations below this make a subtraction stage impossible.
const EMPTY_MODE_EPS: f64 = 1e-12;
/// Redraw attempts per restart when the initial point is unevaluable.
const INIT_REDRAWS: usize = 100;

/// Ansatz description: `layers` interleavings of a Gaussian unitary
/// (`N²+N` parameters each) and the fixed preparation polynomial `prep`,
/// with state-level noise bringing the global purity to `purity_target`.
#[derive(Debug, Clone)]
pub struct AnsatzConfig<T: Real> {
    pub n_modes: usize,
    /// Preparation polynomial applied after each layer's Gaussian; the
    /// identity polynomial gives a plain Gaussian ansatz.
    pub prep: LadderPolynomial<T>,
    pub layers: usize,
    pub purity_target: T,
    /// Beamsplitter tap reflectivity of the heralded-subtraction model.
    pub tap_reflectivity: T,
}

impl<T: Real> AnsatzConfig<T> {
    /// Plain Gaussian ansatz: identity preparation, one layer, unit purity.
    pub fn gaussian(n_modes: usize) -> Self {
        Self {
            n_modes,
            prep: LadderPolynomial::identity(n_modes),
            layers: 1,
            purity_target: T::one(),
            tap_reflectivity: lit(0.05),
        }
    }

    /// `count` photon subtractions on one mode (1-based), one layer.
    pub fn with_subtractions(n_modes: usize, mode: usize, count: usize) -> Result<Self> {
        let prep = subtraction_prep(n_modes, mode, count)?;
        Ok(Self {
            prep,
            ..Self::gaussian(n_modes)
        })
    }

    /// Flat parameter count over all layers.
    pub fn param_count(&self) -> usize {
        self.layers * (self.n_modes * self.n_modes + self.n_modes)
    }

    pub fn validate(&self) -> Result<()> {
        if self.prep.is_zero() {
            return Err(Error::AnnihilatedPreparation { k_abs: 0.0 });
        }
        if self.prep.n_modes() != self.n_modes {
            return Err(Error::ModeCountMismatch {
                left: self.prep.n_modes(),
                right: self.n_modes,
            });
        }
        if self.layers == 0 {
            return Err(Error::EmptyLayers);
        }
        if self.purity_target <= T::zero() || self.purity_target > T::one() {
            return Err(Error::InvalidPurity {
                value: self.purity_target.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// Product of `count` annihilation operators on `mode`.
pub fn subtraction_prep<T: Real>(
    n_modes: usize,
    mode: usize,
    count: usize,
) -> Result<LadderPolynomial<T>> {
    LadderPolynomial::monomial_real(n_modes, T::one(), vec![LadderOp::annihilate(mode); count])
}

/// Optimizer settings; fully deterministic given `rng_seed`.
#[derive(Debug, Clone)]
pub struct OptimizerConfig<T: Real> {
    pub max_iterations: usize,
    /// Central-difference step.
    pub gradient_step: T,
    /// Convergence threshold on the gradient norm.
    pub convergence_tol: T,
    pub restarts: usize,
    pub rng_seed: u64,
    /// Standard deviation of the zero-mean normal initial parameter draw.
    pub init_scale: T,
}

impl<T: Real> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_step: lit(1e-5),
            convergence_tol: lit(1e-7),
            restarts: 8,
            rng_seed: 42,
            init_scale: lit(0.1),
        }
    }
}

impl<T: Real> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iterations > 0
            && self.gradient_step > T::zero()
            && self.convergence_tol > T::zero()
            && self.restarts > 0
            && self.init_scale > T::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel {
                reason: "optimizer settings must all be positive".into(),
            })
        }
    }
}

/// Experimental-resource summary of an optimized ansatz state.
#[derive(Debug, Clone)]
pub struct ResourceReport<T: Real> {
    /// Total squeezing across the spectrum of the pure global covariance,
    /// in decibels.
    pub squeezing_cost_db: T,
    /// Heralding probability of the configured subtraction sequence under
    /// the weak-tap model; 1 when nothing is subtracted.
    pub subtraction_probability: T,
    /// Purity of the reported state (matches the configured target).
    pub purity: T,
    /// Ladder operators applied across all layers, counted before any
    /// Gaussian conjugation expansion.
    pub ladder_op_count: usize,
}

/// Outcome of [`optimize`].
#[derive(Debug, Clone)]
pub struct VqeResult<T: Real> {
    pub best_energy: T,
    pub best_params: Vec<T>,
    /// Objective value after each accepted iteration of the best restart.
    pub energy_trace: Vec<T>,
    pub resources: ResourceReport<T>,
    pub converged: bool,
    pub iterations: usize,
    /// Restarts that never found an evaluable starting point.
    pub failed_restarts: usize,
}

/// Split a flat parameter vector into per-layer Gaussian parameters and
/// collapse the layered circuit.
pub fn reduce_ansatz<T: Real>(params: &[T], ansatz: &AnsatzConfig<T>) -> Result<ReducedCircuit<T>> {
    ansatz.validate()?;
    let per_layer = ansatz.n_modes * ansatz.n_modes + ansatz.n_modes;
    if params.len() != ansatz.param_count() {
        return Err(Error::ParameterCount {
            expected: ansatz.param_count(),
            got: params.len(),
        });
    }
    let layers: Vec<(GaussianParams<T>, LadderPolynomial<T>)> = params
        .chunks(per_layer)
        .map(|chunk| {
            GaussianParams::from_flat(ansatz.n_modes, chunk).map(|g| (g, ansatz.prep.clone()))
        })
        .collect::<Result<_>>()?;
    ipag_reduce(&layers)
}

/// Global covariance of the ansatz state, after the purity target is
/// applied as uniform state-level noise.
pub fn ansatz_covariance<T: Real>(
    params: &[T],
    ansatz: &AnsatzConfig<T>,
) -> Result<(ReducedCircuit<T>, CovarianceMatrix<T>)> {
    let reduced = reduce_ansatz(params, ansatz)?;
    let pure = reduced.covariance();
    let cov = if ansatz.purity_target < T::one() {
        pure.with_purity(ansatz.purity_target)?
    } else {
        pure
    };
    Ok((reduced, cov))
}

/// Energy objective `⟨H⟩` on the ansatz state. The raw value must be real
/// to within [`ENERGY_IMAG_REL`]; its real part is returned.
pub fn energy<T: Real>(
    params: &[T],
    ansatz: &AnsatzConfig<T>,
    hamiltonian: &LadderPolynomial<T>,
) -> Result<T> {
    let (reduced, cov) = ansatz_covariance(params, ansatz)?;
    let raw = nongaussian_expectation(hamiltonian, &reduced.prep, &cov)?;
    if raw.im.abs() > lit::<T>(ENERGY_IMAG_REL) * (T::one() + raw.re.abs()) {
        return Err(Error::NonRealEnergy {
            re: raw.re.to_f64().unwrap_or(f64::NAN),
            im: raw.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(raw.re)
}

/// Central-difference gradient of an arbitrary objective.
pub fn finite_difference_gradient<T, F>(mut f: F, x: &[T], step: T) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T>,
{
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + step;
        let plus = f(&probe);
        probe[i] = x[i] - step;
        let minus = f(&probe);
        probe[i] = x[i];
        match (plus, minus) {
            (Ok(fp), Ok(fm)) if fp.is_finite() && fm.is_finite() => {
                grad.push((fp - fm) / (step + step));
            }
            _ => return Err(Error::NonFiniteGradient { index: i }),
        }
    }
    Ok(grad)
}

/// Central-difference gradient of the energy objective.
pub fn gradient<T: Real>(
    params: &[T],
    ansatz: &AnsatzConfig<T>,
    hamiltonian: &LadderPolynomial<T>,
    step: T,
) -> Result<Vec<T>> {
    finite_difference_gradient(|x| energy(x, ansatz, hamiltonian), params, step)
}

/// Total squeezing of a pure covariance in decibels:
/// `Σ_j |10 log₁₀ r_j|` over the squeezing spectrum.
pub fn squeezing_cost_db<T: Real>(cov: &CovarianceMatrix<T>) -> Result<T> {
    let ten_over_ln10 = lit::<T>(10.0) / lit::<T>(10.0).ln();
    Ok(cov
        .squeezing_spectrum()?
        .into_iter()
        .map(|r| (ten_over_ln10 * r.ln()).abs())
        .fold(T::zero(), |a, b| a + b))
}

/// Heralding probability of the configured subtraction sequence on the
/// state with covariance `cov`, under the weak-tap model: each stage
/// succeeds with probability `min(R·⟨n̂⟩, 1)`, where `⟨n̂⟩` is evaluated on
/// the state conditioned on all previous subtractions.
///
/// The preparation must be a single product of annihilation operators;
/// an empty product yields probability 1.
pub fn subtraction_probability<T: Real>(
    ansatz: &AnsatzConfig<T>,
    cov: &CovarianceMatrix<T>,
) -> Result<T> {
    let ops = subtraction_ops(&ansatz.prep)?;
    let n = ansatz.n_modes;
    let mut probability = T::one();
    let mut prefix: Vec<LadderOp> = Vec::new();
    let mut stage = 0usize;
    for _ in 0..ansatz.layers {
        // Rightmost operator of the monomial acts first.
        for op in ops.iter().rev() {
            stage += 1;
            let number = LadderPolynomial::monomial_real(
                n,
                T::one(),
                vec![LadderOp::create(op.mode), LadderOp::annihilate(op.mode)],
            )?;
            let conditioned = LadderPolynomial::monomial_real(n, T::one(), prefix.clone())?;
            let mean = nongaussian_expectation(&number, &conditioned, cov)?.re;
            if mean <= lit(EMPTY_MODE_EPS) {
                return Err(Error::EmptyModeSubtraction {
                    stage,
                    mean_occupation: mean.to_f64().unwrap_or(f64::NAN),
                });
            }
            probability *= (ansatz.tap_reflectivity * mean).min(T::one());
            prefix.insert(0, *op);
        }
    }
    Ok(probability)
}

fn subtraction_ops<T: Real>(prep: &LadderPolynomial<T>) -> Result<Vec<LadderOp>> {
    if prep.is_identity_like() {
        return Ok(Vec::new());
    }
    if prep.n_terms() != 1 {
        return Err(Error::NotASubtractionProduct);
    }
    let term = &prep.terms()[0];
    if term.ops.iter().any(|op| op.kind != OpKind::Annihilate) {
        return Err(Error::NotASubtractionProduct);
    }
    Ok(term.ops.clone())
}

/// Resource summary at a parameter point.
pub fn resource_report<T: Real>(
    params: &[T],
    ansatz: &AnsatzConfig<T>,
) -> Result<ResourceReport<T>> {
    let (reduced, cov) = ansatz_covariance(params, ansatz)?;
    let pure = reduced.covariance();
    let subtraction_probability = match subtraction_probability(ansatz, &cov) {
        Ok(p) => p,
        Err(Error::NotASubtractionProduct) => {
            // The heralding model only covers subtraction products.
            log::debug!("preparation is not a subtraction product; reporting probability 1");
            T::one()
        }
        Err(e) => return Err(e),
    };
    Ok(ResourceReport {
        squeezing_cost_db: squeezing_cost_db(&pure)?,
        subtraction_probability,
        purity: cov.purity()?,
        ladder_op_count: ansatz.layers * ansatz.prep.max_monomial_len(),
    })
}

struct Restart<T: Real> {
    outcome: lbfgs::LbfgsOutcome<T>,
}

/// Minimize the energy over the flat ansatz parameters with seeded
/// quasi-Newton restarts. Deterministic for a fixed configuration: restart
/// seeds derive from `rng_seed` and the restart index, and the best restart
/// is selected by energy with index tie-breaking.
pub fn optimize<T: Real>(
    ansatz: &AnsatzConfig<T>,
    hamiltonian: &LadderPolynomial<T>,
    opt: &OptimizerConfig<T>,
) -> Result<VqeResult<T>> {
    ansatz.validate()?;
    opt.validate()?;
    let dim = ansatz.param_count();
    let lbfgs_cfg = LbfgsConfig::<T> {
        memory: 10,
        max_iterations: opt.max_iterations,
        grad_tol: opt.convergence_tol,
        ..LbfgsConfig::default()
    };

    let runs: Vec<Option<Restart<T>>> = (0..opt.restarts)
        .into_par_iter()
        .map(|r| {
            let seed = opt
                .rng_seed
                .wrapping_add((r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut start: Option<Vec<T>> = None;
            for _ in 0..INIT_REDRAWS {
                let draw: Vec<T> = (0..dim)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        opt.init_scale * lit::<T>(z)
                    })
                    .collect();
                if energy(&draw, ansatz, hamiltonian).is_ok() {
                    start = Some(draw);
                    break;
                }
            }
            let x0 = start?;
            let eval = |x: &[T]| -> Option<(T, Vec<T>)> {
                let f = energy(x, ansatz, hamiltonian).ok()?;
                let g = gradient(x, ansatz, hamiltonian, opt.gradient_step).ok()?;
                Some((f, g))
            };
            lbfgs::minimize(eval, x0, &lbfgs_cfg).map(|outcome| Restart { outcome })
        })
        .collect();

    let failed_restarts = runs.iter().filter(|r| r.is_none()).count();
    let best = runs
        .into_iter()
        .flatten()
        .min_by(|a, b| {
            a.outcome
                .f
                .partial_cmp(&b.outcome.f)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or(Error::AllRestartsFailed {
            restarts: opt.restarts,
        })?;

    let resources = resource_report(&best.outcome.x, ansatz)?;
    Ok(VqeResult {
        best_energy: best.outcome.f,
        best_params: best.outcome.x,
        energy_trace: best.outcome.trace,
        resources,
        converged: best.outcome.converged,
        iterations: best.outcome.iterations,
        failed_restarts,
    })
}
