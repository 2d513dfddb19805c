//! Expectation values of ladder-operator polynomials on Gaussian states.
//!
//! The engine rests on two facts about zero-mean Gaussian states: second
//! moments of ladder operators are fixed linear combinations of covariance
//! entries (see [`crate::conventions`]), and higher moments reduce to sums
//! over perfect matchings of those pair values, with each pair evaluated in
//! the operators' original left-to-right order. Odd-length products vanish
//! identically.
//!
//! Non-Gaussian expectations on states prepared by a ladder polynomial `P`
//! applied to a Gaussian state are ratios of two such sums:
//! `⟨M⟩ = ⟨P† M P⟩_G / K` with `K = ⟨P† P⟩_G` the normalization forced by
//! the non-unitarity of ladder operators.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::ladder::{LadderMonomial, LadderOp, LadderPolynomial, OpKind};
use crate::scalar::{cabs, cone, czero, lit, Real, C};

/// `|K|` below this counts as an annihilated preparation.
pub const K_EPSILON: f64 = 1e-12;
/// Relative bound on `|Im K|` before K is accepted as real.
pub const K_IMAG_REL: f64 = 1e-9;
/// Term count above which polynomial sums go through rayon.
const PARALLEL_TERM_THRESHOLD: usize = 64;

/// Precomputed table of all `(2N)²` ordered pair contractions for one
/// covariance matrix: four operator-kind combinations per mode pair.
#[derive(Debug, Clone)]
pub struct ContractionTable<T: Real> {
    n_modes: usize,
    vals: DMatrix<C<T>>,
}

impl<T: Real> ContractionTable<T> {
    pub fn new(v: &CovarianceMatrix<T>) -> Self {
        Self::build(v, false)
    }

    /// Mutation hook for validator self-tests: flips the sign of the
    /// exchange (Kronecker) term in the normal-ordered contraction, which
    /// breaks the squeezed-vacuum closed forms.
    #[doc(hidden)]
    pub fn new_with_corrupted_exchange(v: &CovarianceMatrix<T>) -> Self {
        Self::build(v, true)
    }

    fn build(v: &CovarianceMatrix<T>, corrupt_exchange: bool) -> Self {
        let n = v.n_modes();
        let quarter = lit::<T>(0.25);
        let exchange = if corrupt_exchange { -T::one() } else { T::one() };
        let two = lit::<T>(2.0);
        let delta = |j: usize, k: usize| if j == k { T::one() } else { T::zero() };
        // ⟨a_j† a_k†⟩
        let i1 = |j: usize, k: usize| {
            Complex::new(
                (v.entry(j, k) - v.entry(j + n, k + n)) * quarter,
                -(v.entry(j, k + n) + v.entry(j + n, k)) * quarter,
            )
        };
        // ⟨a_j† a_k⟩, with the exchange term optionally corrupted
        let i3 = |j: usize, k: usize| {
            Complex::new(
                (v.entry(j, k) + v.entry(j + n, k + n) - exchange * two * delta(j, k)) * quarter,
                (v.entry(j, k + n) - v.entry(j + n, k)) * quarter,
            )
        };
        let mut vals = DMatrix::from_element(2 * n, 2 * n, czero());
        for j in 0..n {
            for k in 0..n {
                vals[(j, k)] = i1(j, k);
                vals[(j + n, k + n)] = i1(j, k).conj();
                vals[(j, k + n)] = i3(j, k);
                // ⟨a_j a_k†⟩ = δ_jk + ⟨a_k† a_j⟩
                vals[(j + n, k)] = Complex::new(delta(j, k), T::zero()) + i3(k, j);
            }
        }
        Self { n_modes: n, vals }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    #[inline]
    fn index(&self, op: LadderOp) -> usize {
        match op.kind {
            OpKind::Create => op.mode - 1,
            OpKind::Annihilate => self.n_modes + op.mode - 1,
        }
    }

    /// Contraction value of `first` followed by `second` (product order).
    #[inline]
    pub fn pair(&self, first: LadderOp, second: LadderOp) -> C<T> {
        self.vals[(self.index(first), self.index(second))]
    }
}

/// Second moment `⟨op1 op2⟩` on the Gaussian state with covariance `v`;
/// `op1` precedes `op2` in product order.
pub fn pair_expectation<T: Real>(
    op1: LadderOp,
    op2: LadderOp,
    v: &CovarianceMatrix<T>,
) -> C<T> {
    ContractionTable::new(v).pair(op1, op2)
}

/// Outcome of a perfect-matching sum for one monomial.
#[derive(Debug, Clone, Copy)]
pub struct MatchingSum<T: Real> {
    pub monomial_length: usize,
    /// Exactly `(2m−1)!!` for even length `2m`; zero for odd lengths.
    pub matchings_evaluated: u64,
    pub value: C<T>,
}

fn matching_rec<T: Real>(
    ops: &[LadderOp],
    table: &ContractionTable<T>,
    used: &mut [bool],
    prefix: C<T>,
    sum: &mut C<T>,
    count: &mut u64,
) {
    let first = match (0..ops.len()).find(|&i| !used[i]) {
        Some(i) => i,
        None => {
            *sum += prefix;
            *count += 1;
            return;
        }
    };
    used[first] = true;
    for second in first + 1..ops.len() {
        if used[second] {
            continue;
        }
        used[second] = true;
        let factor = prefix * table.pair(ops[first], ops[second]);
        matching_rec(ops, table, used, factor, sum, count);
        used[second] = false;
    }
    used[first] = false;
}

/// Gaussian expectation of one monomial via the perfect-matching sum.
/// Odd lengths short-circuit to exactly zero.
pub fn gaussian_expectation_detailed<T: Real>(
    m: &LadderMonomial<T>,
    table: &ContractionTable<T>,
) -> MatchingSum<T> {
    let len = m.ops.len();
    if len % 2 == 1 {
        return MatchingSum {
            monomial_length: len,
            matchings_evaluated: 0,
            value: czero(),
        };
    }
    let mut used = vec![false; len];
    let mut sum = czero::<T>();
    let mut count = 0u64;
    matching_rec(&m.ops, table, &mut used, cone(), &mut sum, &mut count);
    MatchingSum {
        monomial_length: len,
        matchings_evaluated: count,
        value: sum * m.coeff,
    }
}

/// Gaussian expectation of one monomial on the state with covariance `v`.
pub fn gaussian_expectation<T: Real>(m: &LadderMonomial<T>, v: &CovarianceMatrix<T>) -> C<T> {
    gaussian_expectation_detailed(m, &ContractionTable::new(v)).value
}

/// Gaussian expectation of a polynomial with a prebuilt contraction table.
/// Terms are evaluated independently (in parallel for large polynomials)
/// and summed in canonical term order, so the result is reproducible.
pub fn polynomial_expectation_with_table<T: Real>(
    p: &LadderPolynomial<T>,
    table: &ContractionTable<T>,
) -> C<T> {
    let terms = p.terms();
    let values: Vec<C<T>> = if terms.len() >= PARALLEL_TERM_THRESHOLD {
        terms
            .par_iter()
            .map(|t| gaussian_expectation_detailed(t, table).value)
            .collect()
    } else {
        terms
            .iter()
            .map(|t| gaussian_expectation_detailed(t, table).value)
            .collect()
    };
    values.into_iter().fold(czero(), |a, b| a + b)
}

/// Gaussian expectation of a polynomial on the state with covariance `v`.
pub fn polynomial_expectation<T: Real>(
    p: &LadderPolynomial<T>,
    v: &CovarianceMatrix<T>,
) -> Result<C<T>> {
    if p.n_modes() != v.n_modes() {
        return Err(Error::ModeCountMismatch {
            left: p.n_modes(),
            right: v.n_modes(),
        });
    }
    Ok(polynomial_expectation_with_table(p, &ContractionTable::new(v)))
}

/// Expectation of `observable` on the state `P ρ_G P† / K` prepared by the
/// ladder polynomial `prep` from the Gaussian state with covariance `v`.
///
/// `K = ⟨P† P⟩_G` is checked to be real and positive; `|K| < 1e-12` is
/// reported as an annihilated preparation, never divided through.
pub fn nongaussian_expectation<T: Real>(
    observable: &LadderPolynomial<T>,
    prep: &LadderPolynomial<T>,
    v: &CovarianceMatrix<T>,
) -> Result<C<T>> {
    if observable.n_modes() != v.n_modes() || prep.n_modes() != v.n_modes() {
        return Err(Error::ModeCountMismatch {
            left: observable.n_modes().max(prep.n_modes()),
            right: v.n_modes(),
        });
    }
    if prep.is_zero() {
        return Err(Error::AnnihilatedPreparation { k_abs: 0.0 });
    }
    if prep.is_identity_like() {
        // Scalar preparations cancel exactly in the ratio.
        return Ok(polynomial_expectation_with_table(
            observable,
            &ContractionTable::new(v),
        ));
    }
    let table = ContractionTable::new(v);
    let prep_dag = prep.dagger();
    let k = polynomial_expectation_with_table(&prep_dag.multiply(prep)?, &table);
    let k_abs = cabs(k);
    if k_abs < lit(K_EPSILON) {
        return Err(Error::AnnihilatedPreparation {
            k_abs: k_abs.to_f64().unwrap_or(f64::NAN),
        });
    }
    if k.im.abs() > lit::<T>(K_IMAG_REL) * k_abs || k.re <= T::zero() {
        return Err(Error::NonRealNormalization {
            re: k.re.to_f64().unwrap_or(f64::NAN),
            im: k.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let sandwich = prep_dag.multiply(observable)?.multiply(prep)?;
    let numerator = polynomial_expectation_with_table(&sandwich, &table);
    Ok(numerator / k)
}

/// One pair inside a traced matching.
#[derive(Debug, Clone, Copy)]
pub struct PairTrace<T: Real> {
    pub first_index: usize,
    pub second_index: usize,
    pub first: LadderOp,
    pub second: LadderOp,
    pub value: C<T>,
}

/// One matching with its pair values and total product.
#[derive(Debug, Clone)]
pub struct MatchingTrace<T: Real> {
    pub pairs: Vec<PairTrace<T>>,
    pub product: C<T>,
}

/// Enumerate all matchings of a short monomial (length ≤ 6) with their pair
/// values; returns `None` for longer monomials, an empty list for odd ones.
pub fn trace_matchings<T: Real>(
    m: &LadderMonomial<T>,
    v: &CovarianceMatrix<T>,
) -> Option<Vec<MatchingTrace<T>>> {
    let len = m.ops.len();
    if len > 6 {
        return None;
    }
    if len % 2 == 1 {
        return Some(Vec::new());
    }
    let table = ContractionTable::new(v);
    let mut out = Vec::new();
    let mut used = vec![false; len];
    let mut stack: Vec<PairTrace<T>> = Vec::new();
    fn rec<T: Real>(
        ops: &[LadderOp],
        table: &ContractionTable<T>,
        used: &mut [bool],
        stack: &mut Vec<PairTrace<T>>,
        out: &mut Vec<MatchingTrace<T>>,
    ) {
        let first = match (0..ops.len()).find(|&i| !used[i]) {
            Some(i) => i,
            None => {
                let product = stack
                    .iter()
                    .fold(cone::<T>(), |acc, p| acc * p.value);
                out.push(MatchingTrace {
                    pairs: stack.clone(),
                    product,
                });
                return;
            }
        };
        used[first] = true;
        for second in first + 1..ops.len() {
            if used[second] {
                continue;
            }
            used[second] = true;
            stack.push(PairTrace {
                first_index: first,
                second_index: second,
                first: ops[first],
                second: ops[second],
                value: table.pair(ops[first], ops[second]),
            });
            rec(ops, table, used, stack, out);
            stack.pop();
            used[second] = false;
        }
        used[first] = false;
    }
    rec(&m.ops, &table, &mut used, &mut stack, &mut out);
    Some(out)
}
