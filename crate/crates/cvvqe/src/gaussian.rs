//! Covariance-matrix representation of zero-mean Gaussian states and the
//! N²+N-parameter Gaussian unitary (per-mode squeezers followed by a passive
//! interferometer mesh).
//!
//! See [`crate::conventions`] for the quadrature scaling and all sign
//! conventions. In short: xxpp ordering, vacuum covariance = identity,
//! `V = O Z Oᵀ` with `Z = diag(e^{−2s}, e^{+2s})`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, lit, Real, C};

/// Max admissible asymmetry of a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Symplectic eigenvalues must be `≥ 1 −` this.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// `|det V − 1|` bound for purity-requiring operations.
pub const PURE_DET_TOL: f64 = 1e-6;
/// Residual bound for `S Ω Sᵀ = Ω` and `S Sᵀ = I` checks.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Symplectic form `Ω = [[0, I], [−I, 0]]` on `N` modes.
pub fn omega<T: Real>(n_modes: usize) -> DMatrix<T> {
    let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for j in 0..n_modes {
        m[(j, j + n_modes)] = T::one();
        m[(j + n_modes, j)] = -T::one();
    }
    m
}

fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
}

/// Covariance matrix of a zero-mean `N`-mode Gaussian state.
///
/// Stored as the full `2N×2N` real symmetric matrix in xxpp ordering,
/// vacuum-normalized (vacuum = identity).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T: Real> {
    n_modes: usize,
    mat: DMatrix<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    /// Covariance of the `n_modes`-mode vacuum: the `2N×2N` identity.
    pub fn vacuum(n_modes: usize) -> Self {
        assert!(n_modes >= 1, "need at least one mode");
        Self {
            n_modes,
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Wrap a matrix after checking symmetry and physicality.
    pub fn from_matrix(n_modes: usize, mat: DMatrix<T>) -> Result<Self> {
        if mat.nrows() != 2 * n_modes || mat.ncols() != 2 * n_modes {
            return Err(Error::Unphysical {
                reason: format!(
                    "expected {0}x{0} matrix for {1} modes, got {2}x{3}",
                    2 * n_modes,
                    n_modes,
                    mat.nrows(),
                    mat.ncols()
                ),
            });
        }
        let asym = max_abs(&(&mat - mat.transpose()));
        if asym > lit(SYMMETRY_TOL) {
            return Err(Error::NotSymmetric {
                residual: asym.to_f64().unwrap_or(f64::NAN),
            });
        }
        let cov = Self { n_modes, mat };
        let nu_min = cov
            .symplectic_eigenvalues()
            .first()
            .copied()
            .unwrap_or_else(T::zero);
        if nu_min < T::one() - lit(PHYSICAL_TOL) {
            return Err(Error::Unphysical {
                reason: format!(
                    "smallest symplectic eigenvalue {} < 1",
                    nu_min.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
        Ok(cov)
    }

    /// Internal constructor for matrices that are symmetric and physical by
    /// construction; symmetrizes to remove roundoff.
    pub(crate) fn from_trusted(n_modes: usize, mat: DMatrix<T>) -> Self {
        let half = lit::<T>(0.5);
        let sym = (&mat + mat.transpose()).map(|v| v * half);
        Self { n_modes, mat: sym }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.mat
    }

    /// Entry in 0-based quadrature indexing (`0..N` = x, `N..2N` = p).
    pub fn entry(&self, row: usize, col: usize) -> T {
        self.mat[(row, col)]
    }

    pub fn det(&self) -> T {
        self.mat.clone().determinant()
    }

    /// `Tr ρ² = 1/√(det V)` in this scaling.
    pub fn purity(&self) -> Result<T> {
        let d = self.det();
        if d <= T::zero() {
            return Err(Error::Unphysical {
                reason: format!("non-positive determinant {}", d.to_f64().unwrap_or(f64::NAN)),
            });
        }
        Ok(T::one() / d.sqrt())
    }

    /// Whether `|det V − 1| ≤ tol`.
    pub fn is_pure(&self, tol: T) -> bool {
        (self.det() - T::one()).abs() <= tol
    }

    /// Uniformly rescale a pure state so its purity becomes `p`
    /// (global thermalization: `V → p^{−1/N} V`).
    pub fn with_purity(&self, p: T) -> Result<Self> {
        if p <= T::zero() || p > T::one() {
            return Err(Error::InvalidPurity {
                value: p.to_f64().unwrap_or(f64::NAN),
            });
        }
        let det = self.det();
        if (det - T::one()).abs() > lit(PURE_DET_TOL) {
            return Err(Error::NotPure {
                det: det.to_f64().unwrap_or(f64::NAN),
            });
        }
        let c = p.powf(-T::one() / lit(self.n_modes as f64));
        Ok(Self {
            n_modes: self.n_modes,
            mat: self.mat.map(|v| v * c),
        })
    }

    /// Symplectic eigenvalues (moduli of the eigenvalues of `ΩV`, one per
    /// mode), sorted ascending. Physical states have all values `≥ 1`.
    pub fn symplectic_eigenvalues(&self) -> Vec<T> {
        let om = omega::<T>(self.n_modes);
        let prod = &om * &self.mat;
        let eigs = prod.complex_eigenvalues();
        let mut moduli: Vec<T> = eigs.iter().map(|z| cabs(*z)).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        // Eigenvalues of ΩV come in ±iν pairs; keep one per pair.
        moduli.into_iter().step_by(2).collect()
    }

    /// Squeezing spectrum of a pure state: the `N` eigenvalues of `V` that
    /// are `≤ 1`, sorted ascending (pure-state eigenvalues pair as `λ, 1/λ`).
    pub fn squeezing_spectrum(&self) -> Result<Vec<T>> {
        let det = self.det();
        if (det - T::one()).abs() > lit(PURE_DET_TOL) {
            return Err(Error::NotPure {
                det: det.to_f64().unwrap_or(f64::NAN),
            });
        }
        let eig = self.mat.clone().symmetric_eigen();
        let mut vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        vals.truncate(self.n_modes);
        Ok(vals)
    }

    /// Plain-text dump: an `n_modes` header followed by the matrix rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("n_modes {}\n", self.n_modes);
        for i in 0..2 * self.n_modes {
            let row: Vec<String> = (0..2 * self.n_modes)
                .map(|j| format!("{:.16e}", self.mat[(i, j)]))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the [`Self::to_text`] format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let n_modes: usize = header
            .trim()
            .strip_prefix("n_modes")
            .ok_or_else(|| Error::Parse("missing n_modes header".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad n_modes: {e}")))?;
        let mut mat = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for i in 0..2 * n_modes {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {i}")))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != 2 * n_modes {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {}",
                    entries.len(),
                    2 * n_modes
                )));
            }
            for (j, tok) in entries.iter().enumerate() {
                let v: f64 = tok
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad entry ({i},{j}): {e}")))?;
                mat[(i, j)] = lit(v);
            }
        }
        Self::from_matrix(n_modes, mat)
    }
}

/// Real symplectic matrix (`S Ω Sᵀ = Ω`) in xxpp ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix<T: Real> {
    mat: DMatrix<T>,
}

impl<T: Real> SymplecticMatrix<T> {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            mat: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Wrap a matrix after verifying the symplectic condition.
    pub fn from_matrix(mat: DMatrix<T>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || !mat.nrows().is_multiple_of(2) {
            return Err(Error::Unphysical {
                reason: format!("not an even square matrix: {}x{}", mat.nrows(), mat.ncols()),
            });
        }
        let s = Self { mat };
        let res = s.symplectic_residual();
        if res > lit(SYMPLECTIC_TOL) {
            return Err(Error::Unphysical {
                reason: format!(
                    "symplectic residual {:e}",
                    res.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
        Ok(s)
    }

    pub(crate) fn from_trusted(mat: DMatrix<T>) -> Self {
        Self { mat }
    }

    pub fn n_modes(&self) -> usize {
        self.mat.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.mat
    }

    /// `‖S Ω Sᵀ − Ω‖_max`.
    pub fn symplectic_residual(&self) -> T {
        let om = omega::<T>(self.n_modes());
        max_abs(&(&self.mat * &om * self.mat.transpose() - om))
    }

    /// `‖S Sᵀ − I‖_max`; zero for passive (orthogonal) elements.
    pub fn orthogonal_residual(&self) -> T {
        let n = self.mat.nrows();
        max_abs(&(&self.mat * self.mat.transpose() - DMatrix::<T>::identity(n, n)))
    }

    /// Composition: apply `self` first, then `later` (matrix product
    /// `later · self`).
    pub fn then(&self, later: &Self) -> Self {
        Self {
            mat: &later.mat * &self.mat,
        }
    }

    /// Exact symplectic inverse `S⁻¹ = [[Dᵀ, −Bᵀ], [−Cᵀ, Aᵀ]]`.
    pub fn inverse(&self) -> Self {
        let n = self.n_modes();
        let mut inv = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = self.mat[(j + n, i + n)]; // Dᵀ
                inv[(i, j + n)] = -self.mat[(j, i + n)]; // −Bᵀ
                inv[(i + n, j)] = -self.mat[(j + n, i)]; // −Cᵀ
                inv[(i + n, j + n)] = self.mat[(j, i)]; // Aᵀ
            }
        }
        Self { mat: inv }
    }

    /// Quadrature blocks `(A, B, C, D)` of `[[A, B], [C, D]]`.
    pub fn blocks(&self) -> (DMatrix<T>, DMatrix<T>, DMatrix<T>, DMatrix<T>) {
        let n = self.n_modes();
        let sub = |r0: usize, c0: usize| DMatrix::from_fn(n, n, |i, j| self.mat[(r0 + i, c0 + j)]);
        (sub(0, 0), sub(0, n), sub(n, 0), sub(n, n))
    }

    /// Covariance of this unitary applied to vacuum: `V = S Sᵀ`.
    pub fn covariance(&self) -> CovarianceMatrix<T> {
        CovarianceMatrix::from_trusted(self.n_modes(), &self.mat * self.mat.transpose())
    }
}

/// Parameters of the `N²+N`-parameter Gaussian unitary: `N` unconstrained
/// squeezings (variance factor of `x_j` is `e^{−2 s_j}`) plus `N²` passive
/// mesh parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams<T: Real> {
    squeezings: Vec<T>,
    passive: Vec<T>,
}

impl<T: Real> GaussianParams<T> {
    pub fn new(squeezings: Vec<T>, passive: Vec<T>) -> Result<Self> {
        let n = squeezings.len();
        if passive.len() != n * n {
            return Err(Error::ParameterCount {
                expected: n * n,
                got: passive.len(),
            });
        }
        Ok(Self { squeezings, passive })
    }

    /// All-zero parameters: the identity unitary.
    pub fn zeros(n_modes: usize) -> Self {
        Self {
            squeezings: vec![T::zero(); n_modes],
            passive: vec![T::zero(); n_modes * n_modes],
        }
    }

    /// Split a flat `N²+N` vector as `[s_1..s_N, θ_1..θ_{N²}]`.
    pub fn from_flat(n_modes: usize, flat: &[T]) -> Result<Self> {
        let expected = n_modes * n_modes + n_modes;
        if flat.len() != expected {
            return Err(Error::ParameterCount {
                expected,
                got: flat.len(),
            });
        }
        Ok(Self {
            squeezings: flat[..n_modes].to_vec(),
            passive: flat[n_modes..].to_vec(),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.squeezings.len()
    }

    /// Total parameter count `N² + N`.
    pub fn param_count(&self) -> usize {
        self.squeezings.len() + self.passive.len()
    }

    pub fn squeezings(&self) -> &[T] {
        &self.squeezings
    }

    pub fn passive(&self) -> &[T] {
        &self.passive
    }
}

/// One element of the passive mesh, in application order.
#[derive(Debug, Clone, Copy)]
pub(crate) enum PassiveElement<T> {
    /// Phase `φ` on `mode_a` followed by a two-mode rotation `θ` mixing
    /// `(mode_a, mode_b)`; modes are 0-based here.
    Cell {
        mode_a: usize,
        mode_b: usize,
        theta: T,
        phi: T,
    },
    /// Final phase on one mode.
    Phase { mode: usize, phi: T },
}

/// Decompose the `N²` passive parameters into mesh elements, in application
/// order. Layer `ℓ` couples pairs starting at `ℓ mod 2`; each cell consumes
/// two parameters `(θ, φ)`, the trailing `N` parameters are output phases.
pub(crate) fn passive_elements<T: Real>(n_modes: usize, params: &[T]) -> Result<Vec<PassiveElement<T>>> {
    if params.len() != n_modes * n_modes {
        return Err(Error::ParameterCount {
            expected: n_modes * n_modes,
            got: params.len(),
        });
    }
    let mut elements = Vec::with_capacity(n_modes * (n_modes - 1) / 2 + n_modes);
    let mut next = 0usize;
    for layer in 0..n_modes {
        let mut i = layer % 2;
        while i + 1 < n_modes {
            elements.push(PassiveElement::Cell {
                mode_a: i,
                mode_b: i + 1,
                theta: params[next],
                phi: params[next + 1],
            });
            next += 2;
            i += 2;
        }
    }
    for mode in 0..n_modes {
        elements.push(PassiveElement::Phase {
            mode,
            phi: params[next],
        });
        next += 1;
    }
    debug_assert_eq!(next, n_modes * n_modes);
    Ok(elements)
}

/// Complex mode map `u` of the passive mesh (`G† a_j G = Σ_k u_{jk} a_k`).
pub fn passive_unitary<T: Real>(n_modes: usize, params: &[T]) -> Result<DMatrix<C<T>>> {
    let elements = passive_elements(n_modes, params)?;
    let mut u = DMatrix::<C<T>>::identity(n_modes, n_modes);
    for el in &elements {
        match *el {
            PassiveElement::Cell {
                mode_a,
                mode_b,
                theta,
                phi,
            } => {
                let (c, s) = (theta.cos(), theta.sin());
                let ph = Complex::new(phi.cos(), phi.sin());
                // Left-multiply by [[e^{iφ}c, −s], [e^{iφ}s, c]] on rows (a, b).
                for col in 0..n_modes {
                    let ra = u[(mode_a, col)];
                    let rb = u[(mode_b, col)];
                    u[(mode_a, col)] = ph * ra.scale(c) - rb.scale(s);
                    u[(mode_b, col)] = ph * ra.scale(s) + rb.scale(c);
                }
            }
            PassiveElement::Phase { mode, phi } => {
                let ph = Complex::new(phi.cos(), phi.sin());
                for col in 0..n_modes {
                    u[(mode, col)] *= ph;
                }
            }
        }
    }
    Ok(u)
}

/// Orthogonal symplectic matrix of the passive mesh parametrized by the
/// `N²` real parameters.
pub fn passive_from_params<T: Real>(n_modes: usize, params: &[T]) -> Result<SymplecticMatrix<T>> {
    let u = passive_unitary(n_modes, params)?;
    let mut o = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        for j in 0..n_modes {
            let z = u[(i, j)];
            o[(i, j)] = z.re;
            o[(i, j + n_modes)] = -z.im;
            o[(i + n_modes, j)] = z.im;
            o[(i + n_modes, j + n_modes)] = z.re;
        }
    }
    Ok(SymplecticMatrix::from_trusted(o))
}

/// Symplectic matrix of the full Gaussian unitary: squeezers first, then the
/// passive mesh, i.e. `S = O · diag(e^{−s}, e^{+s})`.
pub fn gaussian_symplectic<T: Real>(params: &GaussianParams<T>) -> Result<SymplecticMatrix<T>> {
    let n = params.n_modes();
    let o = passive_from_params(n, params.passive())?;
    let mut s = o.matrix().clone();
    for j in 0..n {
        let down = (-params.squeezings()[j]).exp();
        let up = params.squeezings()[j].exp();
        for i in 0..2 * n {
            s[(i, j)] *= down;
            s[(i, j + n)] *= up;
        }
    }
    Ok(SymplecticMatrix::from_trusted(s))
}

/// Covariance matrix prepared by the Gaussian unitary acting on vacuum:
/// `V = O Z Oᵀ` with `Z = diag(e^{−2s}, e^{+2s})`.
pub fn gaussian_covariance<T: Real>(params: &GaussianParams<T>) -> Result<CovarianceMatrix<T>> {
    Ok(gaussian_symplectic(params)?.covariance())
}

/// Vacuum covariance (identity); convenience alias for
/// [`CovarianceMatrix::vacuum`].
pub fn vacuum_covariance<T: Real>(n_modes: usize) -> CovarianceMatrix<T> {
    CovarianceMatrix::vacuum(n_modes)
}

/// Complex `(E, F)` form of a Gaussian unitary acting on creation operators
/// by forward conjugation: `G a_k† G† = Σ_j E_{kj} a_j† + F_{kj} a_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMap<T: Real> {
    e: DMatrix<C<T>>,
    f: DMatrix<C<T>>,
}

impl<T: Real> BogoliubovMap<T> {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            e: DMatrix::identity(n_modes, n_modes),
            f: DMatrix::zeros(n_modes, n_modes),
        }
    }

    /// Build from the symplectic matrix `S` of the unitary
    /// (`G† ξ G = S ξ`); uses the blocks of `M = S⁻¹`.
    pub fn from_symplectic(s: &SymplecticMatrix<T>) -> Self {
        let m = s.inverse();
        let (a, b, c, d) = m.blocks();
        let n = s.n_modes();
        let half = lit::<T>(0.5);
        let e = DMatrix::from_fn(n, n, |i, j| {
            Complex::new(
                (a[(i, j)] + d[(i, j)]) * half,
                (b[(i, j)] - c[(i, j)]) * half,
            )
        });
        let f = DMatrix::from_fn(n, n, |i, j| {
            Complex::new(
                (a[(i, j)] - d[(i, j)]) * half,
                -(b[(i, j)] + c[(i, j)]) * half,
            )
        });
        Self { e, f }
    }

    pub fn n_modes(&self) -> usize {
        self.e.nrows()
    }

    pub fn e(&self) -> &DMatrix<C<T>> {
        &self.e
    }

    pub fn f(&self) -> &DMatrix<C<T>> {
        &self.f
    }

    /// Composition: apply `self` first, then `later`.
    pub fn then(&self, later: &Self) -> Self {
        let e = &self.e * &later.e + &self.f * later.f.map(|z| z.conj());
        let f = &self.e * &later.f + &self.f * later.e.map(|z| z.conj());
        Self { e, f }
    }

    /// Inverse map `(E†, −Fᵀ)`.
    pub fn inverse(&self) -> Self {
        Self {
            e: self.e.adjoint(),
            f: -self.f.transpose(),
        }
    }

    /// Max-norm violation of the canonical-commutation conditions
    /// `E E† − F F† = I` and `E Fᵀ = F Eᵀ`.
    pub fn ccr_residual(&self) -> T {
        let n = self.n_modes();
        let one = &self.e * self.e.adjoint() - &self.f * self.f.adjoint()
            - DMatrix::<C<T>>::identity(n, n);
        let sym = &self.e * self.f.transpose() - &self.f * self.e.transpose();
        let m1 = one.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)));
        let m2 = sym.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)));
        m1.max(m2)
    }
}

/// Bogoliubov map of the Gaussian unitary described by `params`.
pub fn bogoliubov_of<T: Real>(params: &GaussianParams<T>) -> Result<BogoliubovMap<T>> {
    Ok(BogoliubovMap::from_symplectic(&gaussian_symplectic(params)?))
}
