//! Truncated Fock-space oracle: brute-force state-vector simulation of
//! Gaussian unitaries and ladder operations, plus exact diagonalization of
//! the Bose–Hubbard chain with a per-site occupation cutoff.
//!
//! Everything here is deliberately independent of the pair-contraction
//! engine; the two paths are compared against each other in the test suite.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gaussian::{passive_elements, GaussianParams, PassiveElement};
use crate::ladder::{LadderMonomial, LadderOp, LadderPolynomial, OpKind};
use crate::models::BoseHubbardParams;
use crate::scalar::{czero, lit, Real, C};

/// Hard cap on truncated-space dimensions.
pub const FOCK_DIM_LIMIT: usize = 2_000_000;
/// Relative leakage above which Gaussian state preparation refuses to hand
/// out a truncated state.
pub const LEAKAGE_TOL: f64 = 1e-8;
/// Internal cutoff padding used when preparing Gaussian states, so that the
/// truncated-generator exponentials are exact to well below `LEAKAGE_TOL`
/// inside the requested space.
pub const FOCK_PAD: usize = 12;
/// Dimensions below this use a dense eigensolver; larger ones use Lanczos.
pub const DENSE_ED_LIMIT: usize = 2000;

/// Truncated multi-mode occupation basis. Flat indices are row-major with
/// mode 1 slowest: `index = Σ_j n_j · (n_max+1)^(N−1−j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    n_modes: usize,
    n_max: usize,
    dim: usize,
    strides: Vec<usize>,
}

impl FockSpace {
    pub fn new(n_modes: usize, n_max: usize) -> Result<Self> {
        assert!(n_modes >= 1, "need at least one mode");
        let per = n_max + 1;
        let mut dim: usize = 1;
        for _ in 0..n_modes {
            dim = dim
                .checked_mul(per)
                .filter(|&d| d <= FOCK_DIM_LIMIT)
                .ok_or(Error::FockDimensionTooLarge {
                    dim: usize::MAX,
                    limit: FOCK_DIM_LIMIT,
                })?;
        }
        let mut strides = vec![1usize; n_modes];
        for j in (0..n_modes.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * per;
        }
        Ok(Self {
            n_modes,
            n_max,
            dim,
            strides,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Occupation of `mode` (0-based) in basis state `index`.
    #[inline]
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.n_max + 1)
    }

    /// Flat index of an occupation tuple.
    pub fn index_of(&self, occ: &[usize]) -> usize {
        debug_assert_eq!(occ.len(), self.n_modes);
        occ.iter()
            .zip(&self.strides)
            .map(|(&n, &s)| n * s)
            .sum()
    }

    /// Occupation tuple of a flat index.
    pub fn occupations_of(&self, index: usize) -> Vec<usize> {
        (0..self.n_modes).map(|m| self.occupation(index, m)).collect()
    }

    #[inline]
    pub(crate) fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }
}

/// Dense complex amplitude vector over a [`FockSpace`], with an explicit
/// record of the squared-norm weight lost to truncation so far.
#[derive(Debug, Clone)]
pub struct FockVector<T: Real> {
    space: FockSpace,
    amps: DVector<C<T>>,
    leakage: T,
}

impl<T: Real> FockVector<T> {
    pub fn vacuum(space: &FockSpace) -> Self {
        let mut amps = DVector::from_element(space.dim, czero());
        amps[0] = Complex::new(T::one(), T::zero());
        Self {
            space: space.clone(),
            amps,
            leakage: T::zero(),
        }
    }

    /// Basis state with the given occupations.
    pub fn basis(space: &FockSpace, occ: &[usize]) -> Result<Self> {
        if occ.len() != space.n_modes || occ.iter().any(|&n| n > space.n_max) {
            return Err(Error::ModeOutOfRange {
                mode: occ.len(),
                n_modes: space.n_modes,
            });
        }
        let mut amps = DVector::from_element(space.dim, czero());
        amps[space.index_of(occ)] = Complex::new(T::one(), T::zero());
        Ok(Self {
            space: space.clone(),
            amps,
            leakage: T::zero(),
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C<T>> {
        &self.amps
    }

    pub fn amplitude(&self, occ: &[usize]) -> C<T> {
        self.amps[self.space.index_of(occ)]
    }

    /// Squared-norm weight lost to truncation by the operations that
    /// produced this vector.
    pub fn leakage(&self) -> T {
        self.leakage
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        debug_assert_eq!(self.space, other.space);
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(czero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn scaled(&self, c: C<T>) -> Self {
        Self {
            space: self.space.clone(),
            amps: self.amps.map(|z| z * c),
            leakage: self.leakage,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.space, other.space);
        Self {
            space: self.space.clone(),
            amps: &self.amps + &other.amps,
            leakage: self.leakage + other.leakage,
        }
    }

    /// Fraction of the squared norm carried by components in which any mode
    /// exceeds `cutoff`.
    pub fn weight_above(&self, cutoff: usize) -> T {
        let total = self.norm_sqr();
        if total == T::zero() {
            return T::zero();
        }
        let mut above = T::zero();
        for idx in 0..self.space.dim {
            if (0..self.space.n_modes).any(|m| self.space.occupation(idx, m) > cutoff) {
                above += self.amps[idx].norm_sqr();
            }
        }
        above / total
    }

    /// Project onto a smaller cutoff, recording the lost weight as leakage.
    pub fn project_to(&self, space: &FockSpace) -> Self {
        assert_eq!(space.n_modes, self.space.n_modes);
        assert!(space.n_max <= self.space.n_max);
        let mut amps = DVector::from_element(space.dim, czero());
        let mut kept = T::zero();
        for idx in 0..self.space.dim {
            let occ = self.space.occupations_of(idx);
            if occ.iter().all(|&n| n <= space.n_max) {
                amps[space.index_of(&occ)] = self.amps[idx];
                kept += self.amps[idx].norm_sqr();
            }
        }
        let total = self.norm_sqr();
        let lost = if total > T::zero() {
            (total - kept) / total
        } else {
            T::zero()
        };
        Self {
            space: space.clone(),
            amps,
            leakage: self.leakage + lost,
        }
    }
}

/// Truncated action of a single ladder operator. A creation operator acting
/// on an `n_max` component drops the overflow and counts it as leakage.
pub fn apply_op<T: Real>(op: LadderOp, v: &FockVector<T>) -> FockVector<T> {
    let space = v.space.clone();
    let mode = op.mode - 1;
    let stride = space.stride(mode);
    let mut amps = DVector::from_element(space.dim, czero());
    let mut dropped = T::zero();
    match op.kind {
        OpKind::Annihilate => {
            for idx in 0..space.dim {
                let n = space.occupation(idx, mode);
                if n >= 1 {
                    let w = lit::<T>(n as f64).sqrt();
                    amps[idx - stride] += v.amps[idx].scale(w);
                }
            }
        }
        OpKind::Create => {
            for idx in 0..space.dim {
                let n = space.occupation(idx, mode);
                if n < space.n_max {
                    let w = lit::<T>((n + 1) as f64).sqrt();
                    amps[idx + stride] += v.amps[idx].scale(w);
                } else {
                    dropped += v.amps[idx].norm_sqr() * lit::<T>((n + 1) as f64);
                }
            }
        }
    }
    FockVector {
        space,
        amps,
        leakage: v.leakage + dropped,
    }
}

/// Apply one weighted monomial (rightmost operator acts first).
pub fn apply_monomial<T: Real>(m: &LadderMonomial<T>, v: &FockVector<T>) -> FockVector<T> {
    let mut out = v.clone();
    for op in m.ops.iter().rev() {
        out = apply_op(*op, &out);
    }
    out.scaled(m.coeff)
}

/// Apply a ladder polynomial term by term.
pub fn apply_polynomial<T: Real>(p: &LadderPolynomial<T>, v: &FockVector<T>) -> FockVector<T> {
    let mut out = FockVector {
        space: v.space.clone(),
        amps: DVector::from_element(v.space.dim, czero()),
        leakage: T::zero(),
    };
    for term in p.terms() {
        out = out.add(&apply_monomial(term, v));
    }
    out
}

/// `⟨v|P|v⟩ / ⟨v|v⟩`; errors on a zero-norm vector.
pub fn expectation_fock<T: Real>(p: &LadderPolynomial<T>, v: &FockVector<T>) -> Result<C<T>> {
    let ns = v.norm_sqr();
    if ns <= lit(1e-300) {
        return Err(Error::ZeroNorm);
    }
    let pv = apply_polynomial(p, v);
    Ok(v.inner(&pv) / Complex::new(ns, T::zero()))
}

/// Mean occupation of `mode` (1-based).
pub fn mean_occupation<T: Real>(mode: usize, v: &FockVector<T>) -> Result<T> {
    let ns = v.norm_sqr();
    if ns <= lit(1e-300) {
        return Err(Error::ZeroNorm);
    }
    let mut acc = T::zero();
    for idx in 0..v.space.dim {
        let n = v.space.occupation(idx, mode - 1);
        acc += v.amps[idx].norm_sqr() * lit::<T>(n as f64);
    }
    Ok(acc / ns)
}

/// Exponential of a real antisymmetric tridiagonal matrix with
/// `K[j+1, j] = offdiag[j] = −K[j, j+1]`.
///
/// Via the phase similarity `D = diag(i^j)`, `i·K` maps to a real symmetric
/// tridiagonal matrix, so one real eigendecomposition yields the exact
/// orthogonal exponential.
fn expm_antisym_tridiag<T: Real>(offdiag: &[T]) -> DMatrix<T> {
    let n = offdiag.len() + 1;
    if n == 1 {
        return DMatrix::identity(1, 1);
    }
    let mut b = DMatrix::zeros(n, n);
    for (j, &d) in offdiag.iter().enumerate() {
        b[(j, j + 1)] = -d;
        b[(j + 1, j)] = -d;
    }
    let eig = b.symmetric_eigen();
    let q = eig.eigenvectors;
    let lam = eig.eigenvalues;
    let mut qc = q.clone();
    let mut qs = q.clone();
    for j in 0..n {
        let (c, s) = (lam[j].cos(), lam[j].sin());
        for i in 0..n {
            qc[(i, j)] *= c;
            qs[(i, j)] *= s;
        }
    }
    let cmat = &qc * q.transpose();
    let smat = &qs * q.transpose();
    DMatrix::from_fn(n, n, |row, col| match (col + 4 * n - row) % 4 {
        0 => cmat[(row, col)],
        1 => smat[(row, col)],
        2 => -cmat[(row, col)],
        _ => -smat[(row, col)],
    })
}

/// Phase shifter `exp(iφ n̂)` on a 0-based mode.
fn apply_phase<T: Real>(v: &FockVector<T>, mode: usize, phi: T) -> FockVector<T> {
    if phi == T::zero() {
        return v.clone();
    }
    let space = v.space.clone();
    let per = space.n_max + 1;
    let phases: Vec<C<T>> = (0..per)
        .map(|n| {
            let ang = phi * lit::<T>(n as f64);
            Complex::new(ang.cos(), ang.sin())
        })
        .collect();
    let mut amps = v.amps.clone();
    for idx in 0..space.dim {
        let n = space.occupation(idx, mode);
        amps[idx] *= phases[n];
    }
    FockVector {
        space,
        amps,
        leakage: v.leakage,
    }
}

/// Squeezer `exp[(s/2)(a² − a†²)]` on a 0-based mode, exponentiated inside
/// the truncated space (parity-split tridiagonal chains).
fn apply_squeezer<T: Real>(v: &FockVector<T>, mode: usize, s: T) -> FockVector<T> {
    if s == T::zero() {
        return v.clone();
    }
    let space = v.space.clone();
    let per = space.n_max + 1;
    let half_s = s * lit::<T>(0.5);
    // Chain for parity q ∈ {0, 1}: positions c ↔ occupations n = 2c + q.
    let chain = |q: usize| -> DMatrix<T> {
        let len = (per - q).div_ceil(2);
        let mut d = Vec::with_capacity(len.saturating_sub(1));
        for c in 0..len.saturating_sub(1) {
            let n = 2 * c + q;
            // K[n+2, n] = −(s/2)·√((n+1)(n+2))
            d.push(-half_s * lit::<T>(((n + 1) * (n + 2)) as f64).sqrt());
        }
        expm_antisym_tridiag(&d)
    };
    let u_even = chain(0);
    let u_odd = chain(1);
    let stride = space.stride(mode);
    let mut amps = DVector::from_element(space.dim, czero());
    for idx in 0..space.dim {
        let n = space.occupation(idx, mode);
        let base = idx - n * stride;
        let q = n % 2;
        let u = if q == 0 { &u_even } else { &u_odd };
        let row = n / 2;
        let mut acc = czero::<T>();
        for col in 0..u.ncols() {
            let m = 2 * col + q;
            acc += v.amps[base + m * stride].scale(u[(row, col)]);
        }
        amps[idx] = acc;
    }
    FockVector {
        space,
        amps,
        leakage: v.leakage,
    }
}

/// Two-mode rotation `exp[θ(a_b† a_a − a_a† a_b)]` on 0-based modes, exactly
/// exponentiated sector by sector (total photon number is conserved).
fn apply_rotation<T: Real>(v: &FockVector<T>, mode_a: usize, mode_b: usize, theta: T) -> FockVector<T> {
    if theta == T::zero() {
        return v.clone();
    }
    let space = v.space.clone();
    let per = space.n_max + 1;
    // Sector unitaries indexed by total photon number M; basis ordered by
    // n_b ascending within per-mode bounds.
    let sectors: Vec<DMatrix<T>> = (0..=2 * (per - 1))
        .map(|m_tot| {
            let lo = m_tot.saturating_sub(per - 1);
            let hi = m_tot.min(per - 1);
            let mut d = Vec::with_capacity(hi - lo);
            for nb in lo..hi {
                let na = m_tot - nb;
                // K[nb+1, nb] = θ·√(n_a (n_b + 1))
                d.push(theta * lit::<T>((na * (nb + 1)) as f64).sqrt());
            }
            expm_antisym_tridiag(&d)
        })
        .collect();
    let sa = space.stride(mode_a);
    let sb = space.stride(mode_b);
    let mut amps = DVector::from_element(space.dim, czero());
    for idx in 0..space.dim {
        let na = space.occupation(idx, mode_a);
        let nb = space.occupation(idx, mode_b);
        let m_tot = na + nb;
        let lo = m_tot.saturating_sub(per - 1);
        let u = &sectors[m_tot];
        let row = nb - lo;
        let mut acc = czero::<T>();
        for col in 0..u.ncols() {
            let nb_new = lo + col;
            let delta_b = nb_new as isize - nb as isize;
            let src_idx = (idx as isize + delta_b * sb as isize - delta_b * sa as isize) as usize;
            acc += v.amps[src_idx].scale(u[(row, col)]);
        }
        amps[idx] = acc;
    }
    FockVector {
        space,
        amps,
        leakage: v.leakage,
    }
}

/// Apply the full `N²+N`-parameter Gaussian unitary (squeezers first, then
/// the passive mesh) inside the vector's own truncated space.
pub fn apply_gaussian<T: Real>(params: &GaussianParams<T>, v: &FockVector<T>) -> Result<FockVector<T>> {
    let n = params.n_modes();
    if v.space.n_modes != n {
        return Err(Error::ModeCountMismatch {
            left: v.space.n_modes,
            right: n,
        });
    }
    let mut out = v.clone();
    for (j, &s) in params.squeezings().iter().enumerate() {
        out = apply_squeezer(&out, j, s);
    }
    for el in passive_elements(n, params.passive())? {
        match el {
            PassiveElement::Cell {
                mode_a,
                mode_b,
                theta,
                phi,
            } => {
                out = apply_phase(&out, mode_a, phi);
                out = apply_rotation(&out, mode_a, mode_b, theta);
            }
            PassiveElement::Phase { mode, phi } => {
                out = apply_phase(&out, mode, phi);
            }
        }
    }
    Ok(out)
}

/// Prepare the Gaussian state in a truncated space. The state is built at a
/// padded internal cutoff and projected down; the projection weight is
/// recorded as leakage and must stay below [`LEAKAGE_TOL`].
pub fn gaussian_state_fock<T: Real>(
    params: &GaussianParams<T>,
    space: &FockSpace,
) -> Result<FockVector<T>> {
    let work = FockSpace::new(space.n_modes, space.n_max + FOCK_PAD)?;
    let v = apply_gaussian(params, &FockVector::vacuum(&work))?;
    let projected = v.project_to(space);
    let leakage = projected.leakage().to_f64().unwrap_or(f64::NAN);
    if leakage.is_nan() || leakage > LEAKAGE_TOL {
        return Err(Error::LeakageExceeded {
            leakage,
            tolerance: LEAKAGE_TOL,
        });
    }
    Ok(projected)
}

/// Dense Bose–Hubbard matrix in the truncated occupation basis. Hopping
/// amplitudes are `√((n_i+1) n_j)`; moves that exceed the cutoff are
/// dropped, matching the truncated action of the ladder polynomial.
pub fn bh_dense_matrix<T: Real>(p: &BoseHubbardParams<T>, space: &FockSpace) -> DMatrix<T> {
    let dim = space.dim();
    let mut h = DMatrix::zeros(dim, dim);
    let half = lit::<T>(0.5);
    let chem = p.chemical_potential + p.interaction * half;
    for idx in 0..dim {
        let mut e = T::zero();
        for site in 0..space.n_modes() {
            let n = lit::<T>(space.occupation(idx, site) as f64);
            e += p.interaction * half * n * n - chem * n;
        }
        h[(idx, idx)] = e;
    }
    for (i, j) in p.bonds() {
        let (si, sj) = (space.stride(i - 1), space.stride(j - 1));
        for idx in 0..dim {
            let ni = space.occupation(idx, i - 1);
            let nj = space.occupation(idx, j - 1);
            // −t b†_i b_j
            if nj >= 1 && ni < space.n_max() {
                let amp = lit::<T>((nj * (ni + 1)) as f64).sqrt();
                h[(idx + si - sj, idx)] += -p.hopping * amp;
            }
            // −t b_i b†_j
            if ni >= 1 && nj < space.n_max() {
                let amp = lit::<T>((ni * (nj + 1)) as f64).sqrt();
                h[(idx - si + sj, idx)] += -p.hopping * amp;
            }
        }
    }
    h
}

/// Matrix-free application of the Bose–Hubbard Hamiltonian.
pub fn bh_matvec<T: Real>(p: &BoseHubbardParams<T>, space: &FockSpace, v: &DVector<T>) -> DVector<T> {
    let dim = space.dim();
    let mut out = DVector::zeros(dim);
    let half = lit::<T>(0.5);
    let chem = p.chemical_potential + p.interaction * half;
    for idx in 0..dim {
        let mut e = T::zero();
        for site in 0..space.n_modes() {
            let n = lit::<T>(space.occupation(idx, site) as f64);
            e += p.interaction * half * n * n - chem * n;
        }
        out[idx] += e * v[idx];
    }
    for (i, j) in p.bonds() {
        let (si, sj) = (space.stride(i - 1), space.stride(j - 1));
        for idx in 0..dim {
            let ni = space.occupation(idx, i - 1);
            let nj = space.occupation(idx, j - 1);
            if nj >= 1 && ni < space.n_max() {
                let amp = lit::<T>((nj * (ni + 1)) as f64).sqrt();
                out[idx + si - sj] += -p.hopping * amp * v[idx];
            }
            if ni >= 1 && nj < space.n_max() {
                let amp = lit::<T>((ni * (nj + 1)) as f64).sqrt();
                out[idx - si + sj] += -p.hopping * amp * v[idx];
            }
        }
    }
    out
}

/// Eigensolver route selection for [`bh_ground_energy_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdMethod {
    /// Dense below [`DENSE_ED_LIMIT`], Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

/// Ground-state energy of the truncated Bose–Hubbard chain.
pub fn bh_ground_energy<T: Real>(p: &BoseHubbardParams<T>, n_max: usize) -> Result<T> {
    bh_ground_energy_with(p, n_max, EdMethod::Auto)
}

/// Ground-state energy with an explicit solver choice.
pub fn bh_ground_energy_with<T: Real>(
    p: &BoseHubbardParams<T>,
    n_max: usize,
    method: EdMethod,
) -> Result<T> {
    p.validate()?;
    let space = FockSpace::new(p.n_sites, n_max)?;
    let dense = match method {
        EdMethod::Auto => space.dim() < DENSE_ED_LIMIT,
        EdMethod::Dense => true,
        EdMethod::Lanczos => false,
    };
    if dense {
        let h = bh_dense_matrix(p, &space);
        let eig = h.symmetric_eigen();
        Ok(eig
            .eigenvalues
            .iter()
            .copied()
            .fold(T::max_value().unwrap_or_else(T::one), T::min))
    } else {
        lanczos_ground(|v| bh_matvec(p, &space, v), space.dim(), 600, lit(1e-12))
    }
}

/// Smallest eigenvalue of a real symmetric operator by Lanczos iteration
/// with full reorthogonalization and a deterministic start vector.
pub fn lanczos_ground<T, F>(matvec: F, dim: usize, max_iter: usize, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(&DVector<T>) -> DVector<T>,
{
    let m = max_iter.min(dim);
    let mut qs: Vec<DVector<T>> = Vec::with_capacity(m + 1);
    let mut alphas: Vec<T> = Vec::with_capacity(m);
    let mut betas: Vec<T> = Vec::with_capacity(m);

    let mut q0 = DVector::from_fn(dim, |i, _| {
        lit::<T>((((i + 1) as f64) * 0.618_033_988_749_894_9).fract() - 0.5)
    });
    let n0 = q0.norm();
    q0 /= n0;
    qs.push(q0);

    let mut prev = T::max_value().unwrap_or_else(T::one);
    for j in 0..m {
        let mut w = matvec(&qs[j]);
        let a = qs[j].dot(&w);
        alphas.push(a);
        w -= &qs[j] * a;
        if j > 0 {
            w -= &qs[j - 1] * betas[j - 1];
        }
        for q in &qs {
            let overlap = q.dot(&w);
            w -= q * overlap;
        }
        let b = w.norm();
        let breakdown = b < lit(1e-14);
        if (j + 1) % 5 == 0 || j + 1 == m || breakdown {
            let e0 = tridiag_min(&alphas, &betas);
            if (e0 - prev).abs() <= tol * (T::one() + e0.abs()) {
                return Ok(e0);
            }
            prev = e0;
        }
        if breakdown {
            return Ok(tridiag_min(&alphas, &betas));
        }
        betas.push(b);
        qs.push(w / b);
    }
    if dim <= m {
        // Krylov space exhausted: the tridiagonal spectrum is exact.
        return Ok(tridiag_min(&alphas, &betas));
    }
    Err(Error::LanczosNoConvergence { iterations: m })
}

fn tridiag_min<T: Real>(alphas: &[T], betas: &[T]) -> T {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i > 0 {
            t[(i, i - 1)] = betas[i - 1];
            t[(i - 1, i)] = betas[i - 1];
        }
    }
    t.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(T::max_value().unwrap_or_else(T::one), T::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Boundary;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    /// Naive scaling-and-squaring Taylor exponential, used only to check the
    /// structured exponential.
    fn expm_taylor(k: &DMatrix<f64>) -> DMatrix<f64> {
        let n = k.nrows();
        let norm = k.iter().fold(0.0f64, |a, &v| a.max(v.abs())) * n as f64;
        let squarings = norm.log2().ceil().max(0.0) as usize + 2;
        let scaled = k / 2f64.powi(squarings as i32);
        let mut term = DMatrix::<f64>::identity(n, n);
        let mut acc = DMatrix::<f64>::identity(n, n);
        for order in 1..=24 {
            term = (&term * &scaled) / order as f64;
            acc += &term;
        }
        for _ in 0..squarings {
            acc = &acc * &acc;
        }
        acc
    }

    #[test]
    fn expm_matches_two_by_two_rotation() {
        let theta = 0.7f64;
        let u = expm_antisym_tridiag(&[theta]);
        assert_relative_eq!(u[(0, 0)], theta.cos(), epsilon = 1e-14);
        assert_relative_eq!(u[(0, 1)], -theta.sin(), epsilon = 1e-14);
        assert_relative_eq!(u[(1, 0)], theta.sin(), epsilon = 1e-14);
        assert_relative_eq!(u[(1, 1)], theta.cos(), epsilon = 1e-14);
    }

    #[test]
    fn expm_matches_taylor() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for n in 2..=9usize {
            let d: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut k = DMatrix::<f64>::zeros(n, n);
            for (j, &v) in d.iter().enumerate() {
                k[(j + 1, j)] = v;
                k[(j, j + 1)] = -v;
            }
            let structured = expm_antisym_tridiag(&d);
            let taylor = expm_taylor(&k);
            let diff = (&structured - &taylor).abs().max();
            assert!(diff < 1e-12, "n={n} diff={diff}");
            // Orthogonality.
            let orth = (&structured * structured.transpose() - DMatrix::<f64>::identity(n, n))
                .abs()
                .max();
            assert!(orth < 1e-13);
        }
    }

    #[test]
    fn ladder_action_basics() {
        let space = FockSpace::new(2, 3).unwrap();
        let vac = FockVector::<f64>::vacuum(&space);
        let annihilated = apply_op(LadderOp::annihilate(1), &vac);
        assert_relative_eq!(annihilated.norm_sqr(), 0.0);
        let one = apply_op(LadderOp::create(1), &vac);
        assert_relative_eq!(one.amplitude(&[1, 0]).re, 1.0);
        let state = FockVector::<f64>::basis(&space, &[2, 1]).unwrap();
        let number = LadderPolynomial::monomial_real(
            2,
            1.0,
            vec![LadderOp::create(1), LadderOp::annihilate(1)],
        )
        .unwrap();
        let nv = apply_polynomial(&number, &state);
        assert_relative_eq!(nv.amplitude(&[2, 1]).re, 2.0);
        assert_relative_eq!(expectation_fock(&number, &state).unwrap().re, 2.0);
    }

    #[test]
    fn creation_overflow_counts_leakage() {
        let space = FockSpace::new(1, 2).unwrap();
        let top = FockVector::<f64>::basis(&space, &[2]).unwrap();
        let pushed = apply_op(LadderOp::create(1), &top);
        assert_relative_eq!(pushed.norm_sqr(), 0.0);
        assert_relative_eq!(pushed.leakage(), 3.0); // ‖a†|2⟩‖² = 3
    }

    #[test]
    fn expectation_rejects_zero_norm() {
        let space = FockSpace::new(1, 2).unwrap();
        let zero = FockVector::<f64> {
            space: space.clone(),
            amps: DVector::from_element(space.dim(), czero()),
            leakage: 0.0,
        };
        let n = LadderPolynomial::monomial_real(
            1,
            1.0,
            vec![LadderOp::create(1), LadderOp::annihilate(1)],
        )
        .unwrap();
        assert!(expectation_fock(&n, &zero).is_err());
    }

    #[test]
    fn expectation_matches_dense_operator_matrix() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let space = FockSpace::new(2, 4).unwrap();
        let dim = space.dim();
        let amps = DVector::from_fn(dim, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let v = FockVector::<f64> {
            space: space.clone(),
            amps,
            leakage: 0.0,
        };
        let p = LadderPolynomial::from_terms(
            2,
            vec![
                LadderMonomial::real(0.8, vec![LadderOp::create(1), LadderOp::annihilate(2)]),
                LadderMonomial::new(
                    Complex::new(0.0, -0.3),
                    vec![LadderOp::annihilate(1), LadderOp::annihilate(1)],
                ),
            ],
        )
        .unwrap();
        // Dense matrix of P, column by column.
        let mut pm = DMatrix::from_element(dim, dim, czero::<f64>());
        for col in 0..dim {
            let occ = space.occupations_of(col);
            let basis = FockVector::<f64>::basis(&space, &occ).unwrap();
            let image = apply_polynomial(&p, &basis);
            for row in 0..dim {
                pm[(row, col)] = image.amplitudes()[row];
            }
        }
        let direct = expectation_fock(&p, &v).unwrap();
        let via_matrix = {
            let pv = &pm * v.amplitudes();
            let mut num = czero::<f64>();
            for i in 0..dim {
                num += v.amplitudes()[i].conj() * pv[i];
            }
            num / Complex::new(v.norm_sqr(), 0.0)
        };
        assert!((direct - via_matrix).norm() < 1e-12);
    }

    #[test]
    fn rotation_acts_as_single_photon_beamsplitter() {
        let space = FockSpace::new(2, 3).unwrap();
        let one = FockVector::<f64>::basis(&space, &[1, 0]).unwrap();
        let theta = 0.4f64;
        let rotated = apply_rotation(&one, 0, 1, theta);
        assert_relative_eq!(rotated.amplitude(&[1, 0]).re, theta.cos(), epsilon = 1e-13);
        assert_relative_eq!(rotated.amplitude(&[0, 1]).re, theta.sin(), epsilon = 1e-13);
        assert_relative_eq!(rotated.norm_sqr(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn rotation_conserves_total_photon_number() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let space = FockSpace::new(2, 5).unwrap();
        let dim = space.dim();
        let amps = DVector::from_fn(dim, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let v = FockVector::<f64> {
            space: space.clone(),
            amps,
            leakage: 0.0,
        };
        let rotated = apply_rotation(&v, 0, 1, 1.1);
        for m_tot in 0..=10usize {
            let weight = |w: &FockVector<f64>| {
                (0..dim)
                    .filter(|&i| space.occupation(i, 0) + space.occupation(i, 1) == m_tot)
                    .map(|i| w.amplitudes()[i].norm_sqr())
                    .sum::<f64>()
            };
            assert_relative_eq!(weight(&v), weight(&rotated), epsilon = 1e-12);
        }
    }

    #[test]
    fn squeezed_vacuum_matches_closed_form_series() {
        let s = 0.5f64;
        let space = FockSpace::new(1, 30).unwrap();
        let params = GaussianParams::new(vec![s], vec![0.0]).unwrap();
        let v = gaussian_state_fock(&params, &space).unwrap();
        assert!(v.leakage() < 1e-10, "leakage {}", v.leakage());
        // c_{2n+1} = 0; c_{2n} = (−tanh s)^n √((2n)!) / (2^n n! √cosh s).
        let mut expected = 1.0 / s.cosh().sqrt();
        for n in 0..=14usize {
            let c = v.amplitude(&[2 * n]);
            assert!(
                (c.re - expected).abs() < 1e-10 && c.im.abs() < 1e-12,
                "c_{} = {c}, expected {expected}",
                2 * n
            );
            let odd = v.amplitude(&[(2 * n + 1).min(30)]);
            if 2 * n < 30 {
                assert!(odd.norm() < 1e-14);
            }
            expected *= -s.tanh() * (((2 * n + 1) * (2 * n + 2)) as f64).sqrt()
                / (2.0 * (n + 1) as f64);
        }
        let n_mean = mean_occupation(1, &v).unwrap();
        assert_relative_eq!(n_mean, s.sinh().powi(2), epsilon = 1e-9);
    }

    #[test]
    fn zero_params_prepare_vacuum() {
        let space = FockSpace::new(2, 6).unwrap();
        let v = gaussian_state_fock(&GaussianParams::<f64>::zeros(2), &space).unwrap();
        assert_relative_eq!(v.amplitude(&[0, 0]).re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(v.norm_sqr(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn gaussian_application_is_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(30);
        let space = FockSpace::new(2, 18).unwrap();
        let squeezings: Vec<f64> = (0..2).map(|_| rng.random_range(-0.4..0.4)).collect();
        let passive: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
        let params = GaussianParams::new(squeezings, passive).unwrap();
        let v = apply_gaussian(&params, &FockVector::<f64>::vacuum(&space)).unwrap();
        assert_relative_eq!(v.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn oversqueezing_reports_leakage() {
        let space = FockSpace::new(1, 4).unwrap();
        let params = GaussianParams::new(vec![1.8f64], vec![0.0]).unwrap();
        match gaussian_state_fock(&params, &space) {
            Err(Error::LeakageExceeded { .. }) => {}
            other => panic!("expected leakage error, got {other:?}"),
        }
    }

    #[test]
    fn fock_dimension_bound() {
        assert!(FockSpace::new(4, 40).is_err());
        assert!(FockSpace::new(2, 30).is_ok());
    }

    fn bh(t: f64, u: f64, mu: f64) -> BoseHubbardParams<f64> {
        BoseHubbardParams::new(2, t, u, mu, Boundary::Open).unwrap()
    }

    #[test]
    fn ed_diagonal_closed_form() {
        let e = bh_ground_energy(&bh(0.0, 1.0, 1.0), 6).unwrap();
        assert!((e + 2.0).abs() < 1e-12, "got {e}");
        let zero = bh_ground_energy(&bh(0.0, 0.0, 0.0), 4).unwrap();
        assert!(zero.abs() < 1e-12);
    }

    #[test]
    fn ed_dense_matrix_is_symmetric_and_matches_polynomial_action() {
        let p = bh(1.3, 0.7, 0.9);
        let space = FockSpace::new(2, 3).unwrap();
        let h = bh_dense_matrix(&p, &space);
        assert!((&h - h.transpose()).abs().max() < 1e-12);

        let poly = crate::models::bose_hubbard_polynomial(&p).unwrap();
        let dim = space.dim();
        for col in 0..dim {
            let occ = space.occupations_of(col);
            let basis = FockVector::<f64>::basis(&space, &occ).unwrap();
            let image = apply_polynomial(&poly, &basis);
            for row in 0..dim {
                let got = image.amplitudes()[row].re;
                assert!(
                    (got - h[(row, col)]).abs() < 1e-12,
                    "H[{row},{col}] mismatch: {} vs {}",
                    got,
                    h[(row, col)]
                );
                assert!(image.amplitudes()[row].im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ed_matvec_matches_dense() {
        let p = bh(0.8, 1.1, 0.6);
        let space = FockSpace::new(2, 4).unwrap();
        let h = bh_dense_matrix(&p, &space);
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..3 {
            let v = DVector::from_fn(space.dim(), |_, _| rng.random_range(-1.0..1.0));
            let dense = &h * &v;
            let fast = bh_matvec(&p, &space, &v);
            assert!((dense - fast).abs().max() < 1e-12);
        }
    }

    #[test]
    fn ed_cutoff_monotonicity() {
        let p = bh(1.0, 1.0, 1.0);
        let e4 = bh_ground_energy(&p, 4).unwrap();
        let e8 = bh_ground_energy(&p, 8).unwrap();
        let e12 = bh_ground_energy(&p, 12).unwrap();
        assert!(e4 >= e8 - 1e-12, "{e4} vs {e8}");
        assert!(e8 >= e12 - 1e-12, "{e8} vs {e12}");
    }

    #[test]
    fn ed_dense_and_lanczos_agree() {
        let p = bh(1.0, 1.0, 1.0);
        let dense = bh_ground_energy_with(&p, 30, EdMethod::Dense).unwrap();
        let lanczos = bh_ground_energy_with(&p, 30, EdMethod::Lanczos).unwrap();
        assert!(
            (dense - lanczos).abs() < 1e-8,
            "dense {dense} vs lanczos {lanczos}"
        );
    }

    #[test]
    fn projection_tracks_lost_weight() {
        let space = FockSpace::new(1, 20).unwrap();
        let params = GaussianParams::new(vec![0.6f64], vec![0.0]).unwrap();
        let v = apply_gaussian(&params, &FockVector::<f64>::vacuum(&space)).unwrap();
        let small = FockSpace::new(1, 6).unwrap();
        let projected = v.project_to(&small);
        let direct = v.weight_above(6);
        assert_relative_eq!(projected.leakage(), direct, epsilon = 1e-13);
    }
}
