//! Symbolic algebra of ordered ladder-operator monomials and polynomials.
//!
//! The algebra is a free monoid with complex weights: products concatenate,
//! no commutation or normal ordering is ever applied. Equal op sequences
//! merge by summing coefficients; the expectation engine handles arbitrary
//! operator orders directly.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gaussian::{gaussian_symplectic, BogoliubovMap, CovarianceMatrix, GaussianParams, SymplecticMatrix};
use crate::scalar::{cabs, cone, czero, lit, Real, C};

/// Relative coefficient threshold below which terms are dropped.
pub const COEFF_PRUNE_REL: f64 = 1e-15;

/// Default term-count threshold above which conjugation logs a warning.
pub const TERM_WARN_CAP: usize = 1 << 20;

/// Creation or annihilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Create,
    Annihilate,
}

impl OpKind {
    pub fn flipped(self) -> Self {
        match self {
            OpKind::Create => OpKind::Annihilate,
            OpKind::Annihilate => OpKind::Create,
        }
    }
}

/// A single ladder operator on a 1-based mode index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderOp {
    pub mode: usize,
    pub kind: OpKind,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        Self {
            mode,
            kind: OpKind::Create,
        }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            kind: OpKind::Annihilate,
        }
    }

    pub fn dagger(self) -> Self {
        Self {
            mode: self.mode,
            kind: self.kind.flipped(),
        }
    }
}

impl fmt::Display for LadderOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            OpKind::Create => write!(f, "a'({})", self.mode),
            OpKind::Annihilate => write!(f, "a({})", self.mode),
        }
    }
}

/// Weighted ordered product of ladder operators; the leftmost operator
/// applies last.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderMonomial<T: Real> {
    pub coeff: C<T>,
    pub ops: Vec<LadderOp>,
}

impl<T: Real> LadderMonomial<T> {
    pub fn new(coeff: C<T>, ops: Vec<LadderOp>) -> Self {
        Self { coeff, ops }
    }

    /// Monomial with a real coefficient.
    pub fn real(coeff: T, ops: Vec<LadderOp>) -> Self {
        Self {
            coeff: Complex::new(coeff, T::zero()),
            ops,
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Hermitian conjugate: reverse, flip kinds, conjugate the coefficient.
    pub fn dagger(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            ops: self.ops.iter().rev().map(|op| op.dagger()).collect(),
        }
    }
}

/// Finite complex-weighted sum of ladder monomials over a fixed mode count.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderPolynomial<T: Real> {
    n_modes: usize,
    terms: Vec<LadderMonomial<T>>,
}

impl<T: Real> LadderPolynomial<T> {
    /// The zero polynomial (no terms).
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: Vec::new(),
        }
    }

    /// The identity operator: one empty product with unit weight.
    pub fn identity(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: vec![LadderMonomial::new(cone::<T>(), Vec::new())],
        }
    }

    /// A single monomial; checks that all modes are in `1..=n_modes`.
    pub fn monomial(n_modes: usize, coeff: C<T>, ops: Vec<LadderOp>) -> Result<Self> {
        Self::from_terms(n_modes, vec![LadderMonomial::new(coeff, ops)])
    }

    /// A single monomial with a real coefficient.
    pub fn monomial_real(n_modes: usize, coeff: T, ops: Vec<LadderOp>) -> Result<Self> {
        Self::from_terms(n_modes, vec![LadderMonomial::real(coeff, ops)])
    }

    pub fn from_terms(n_modes: usize, terms: Vec<LadderMonomial<T>>) -> Result<Self> {
        for term in &terms {
            for op in &term.ops {
                if op.mode == 0 || op.mode > n_modes {
                    return Err(Error::ModeOutOfRange {
                        mode: op.mode,
                        n_modes,
                    });
                }
            }
        }
        let mut poly = Self { n_modes, terms };
        poly.canonicalize();
        Ok(poly)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[LadderMonomial<T>] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term is an empty product (a scalar multiple of the
    /// identity operator).
    pub fn is_identity_like(&self) -> bool {
        !self.terms.is_empty() && self.terms.iter().all(|t| t.is_empty())
    }

    /// Longest monomial length.
    pub fn max_monomial_len(&self) -> usize {
        self.terms.iter().map(|t| t.len()).max().unwrap_or(0)
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> Self {
        let mut out = Self {
            n_modes: self.n_modes,
            terms: self.terms.iter().map(|t| t.dagger()).collect(),
        };
        out.canonicalize();
        out
    }

    /// Ordered product: distributes over terms, concatenating op sequences.
    /// `self`'s operators end up leftmost (applied last).
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut ops = Vec::with_capacity(a.ops.len() + b.ops.len());
                ops.extend_from_slice(&a.ops);
                ops.extend_from_slice(&b.ops);
                terms.push(LadderMonomial::new(a.coeff * b.coeff, ops));
            }
        }
        let mut out = Self {
            n_modes: self.n_modes,
            terms,
        };
        out.canonicalize();
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let mut out = Self {
            n_modes: self.n_modes,
            terms,
        };
        out.canonicalize();
        Ok(out)
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = Self {
            n_modes: self.n_modes,
            terms: self
                .terms
                .iter()
                .map(|t| LadderMonomial::new(t.coeff * c, t.ops.clone()))
                .collect(),
        };
        out.canonicalize();
        out
    }

    /// Conjugate every ladder operator by a Gaussian unitary:
    /// `a_k† → Σ_j E_kj a_j† + F_kj a_j` and the daggered rule for `a_k`.
    /// Monomial lengths are preserved; term counts can grow up to
    /// `(2N)^len` per monomial before merging.
    pub fn conjugate_by_gaussian(&self, map: &BogoliubovMap<T>) -> Result<Self> {
        self.conjugate_by_gaussian_capped(map, TERM_WARN_CAP)
    }

    /// Same as [`Self::conjugate_by_gaussian`] with an explicit term-count
    /// threshold above which a warning is logged.
    pub fn conjugate_by_gaussian_capped(
        &self,
        map: &BogoliubovMap<T>,
        warn_cap: usize,
    ) -> Result<Self> {
        if map.n_modes() != self.n_modes {
            return Err(Error::ModeCountMismatch {
                left: self.n_modes,
                right: map.n_modes(),
            });
        }
        let n = self.n_modes;
        let mut acc: BTreeMap<Vec<LadderOp>, C<T>> = BTreeMap::new();
        let mut warned = false;
        for term in &self.terms {
            // Expand this monomial op by op, merging as we go.
            let mut partial: BTreeMap<Vec<LadderOp>, C<T>> = BTreeMap::new();
            partial.insert(Vec::with_capacity(term.ops.len()), term.coeff);
            for op in &term.ops {
                let mut next: BTreeMap<Vec<LadderOp>, C<T>> = BTreeMap::new();
                for (prefix, weight) in &partial {
                    for j in 0..n {
                        let (w_create, w_annihilate) = match op.kind {
                            OpKind::Create => {
                                (map.e()[(op.mode - 1, j)], map.f()[(op.mode - 1, j)])
                            }
                            OpKind::Annihilate => (
                                map.f()[(op.mode - 1, j)].conj(),
                                map.e()[(op.mode - 1, j)].conj(),
                            ),
                        };
                        for (img, w) in [
                            (LadderOp::create(j + 1), w_create),
                            (LadderOp::annihilate(j + 1), w_annihilate),
                        ] {
                            if w == czero() {
                                continue;
                            }
                            let mut seq = prefix.clone();
                            seq.push(img);
                            let entry = next.entry(seq).or_insert_with(czero);
                            *entry += *weight * w;
                        }
                    }
                }
                partial = next;
                if !warned && partial.len() > warn_cap {
                    log::warn!(
                        "gaussian conjugation produced {} terms (threshold {})",
                        partial.len(),
                        warn_cap
                    );
                    warned = true;
                }
            }
            for (seq, w) in partial {
                let entry = acc.entry(seq).or_insert_with(czero);
                *entry += w;
            }
        }
        let terms = acc
            .into_iter()
            .map(|(ops, coeff)| LadderMonomial::new(coeff, ops))
            .collect();
        let mut out = Self {
            n_modes: self.n_modes,
            terms,
        };
        out.canonicalize();
        Ok(out)
    }

    /// Merge terms with identical op sequences, drop dust coefficients,
    /// and sort terms into a canonical order.
    fn canonicalize(&mut self) {
        let mut merged: BTreeMap<Vec<LadderOp>, C<T>> = BTreeMap::new();
        for term in self.terms.drain(..) {
            let entry = merged.entry(term.ops).or_insert_with(czero);
            *entry += term.coeff;
        }
        let max_abs = merged
            .values()
            .fold(T::zero(), |acc, c| acc.max(cabs(*c)));
        let tol = lit::<T>(COEFF_PRUNE_REL).max(T::default_epsilon()) * max_abs;
        self.terms = merged
            .into_iter()
            .filter(|(_, c)| cabs(*c) > tol)
            .map(|(ops, coeff)| LadderMonomial::new(coeff, ops))
            .collect();
    }

    /// Parse the text format produced by `Display`: one monomial per line,
    /// `coeff * a'(k) a(j) ...` with `a'` = creation. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(n_modes: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (coeff_str, ops_str) = match line.split_once('*') {
                Some((c, o)) => (c.trim(), o.trim()),
                None => (line, ""),
            };
            let coeff = parse_complex::<T>(coeff_str)
                .ok_or_else(|| Error::Parse(format!("line {}: bad coefficient '{coeff_str}'", lineno + 1)))?;
            let mut ops = Vec::new();
            for tok in ops_str.split_whitespace() {
                ops.push(parse_op(tok).ok_or_else(|| {
                    Error::Parse(format!("line {}: bad operator '{tok}'", lineno + 1))
                })?);
            }
            terms.push(LadderMonomial::new(coeff, ops));
        }
        Self::from_terms(n_modes, terms)
    }
}

fn parse_op(tok: &str) -> Option<LadderOp> {
    let (kind, rest) = if let Some(rest) = tok.strip_prefix("a'") {
        (OpKind::Create, rest)
    } else {
        (OpKind::Annihilate, tok.strip_prefix('a')?)
    };
    let mode: usize = rest.strip_prefix('(')?.strip_suffix(')')?.parse().ok()?;
    Some(LadderOp { mode, kind })
}

fn parse_complex<T: Real>(s: &str) -> Option<C<T>> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
    if let Some(body) = s.strip_suffix('i') {
        // re±im i, with the split at the last sign that is not an exponent sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let re: f64 = re_str.trim().parse().ok()?;
        let im_str = im_str.trim();
        let im: f64 = match im_str {
            "+" | "" => 1.0,
            "-" => -1.0,
            _ => im_str.parse().ok()?,
        };
        Some(Complex::new(lit(re), lit(im)))
    } else {
        let re: f64 = s.parse().ok()?;
        Some(Complex::new(lit(re), T::zero()))
    }
}

impl<T: Real> fmt::Display for LadderPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for term in &self.terms {
            let c = term.coeff;
            if c.im == T::zero() {
                write!(f, "{}", c.re)?;
            } else if c.im >= T::zero() {
                write!(f, "({}+{}i)", c.re, c.im)?;
            } else {
                write!(f, "({}{}i)", c.re, c.im)?;
            }
            if !term.ops.is_empty() {
                write!(f, " *")?;
                for op in &term.ops {
                    write!(f, " {op}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of collapsing an interleaved circuit of Gaussian unitaries and
/// ladder polynomials into one global Gaussian followed by one polynomial.
#[derive(Debug, Clone)]
pub struct ReducedCircuit<T: Real> {
    /// Symplectic matrix of the composed Gaussian unitary.
    pub symplectic: SymplecticMatrix<T>,
    /// Ladder polynomial acting on the global Gaussian state.
    pub prep: LadderPolynomial<T>,
}

impl<T: Real> ReducedCircuit<T> {
    /// Covariance of the global Gaussian applied to vacuum.
    pub fn covariance(&self) -> CovarianceMatrix<T> {
        self.symplectic.covariance()
    }
}

/// Collapse interleaved layers into a single Gaussian plus one polynomial.
///
/// Each layer `(G_i, P_i)` applies its Gaussian first, then its ladder
/// polynomial, so the prepared state is `P_l G_l ⋯ P_1 G_1 |vac⟩`. Ladder
/// operators commute leftward through later Gaussians via their Bogoliubov
/// maps; the Gaussians compose into `G = G_l ⋯ G_1`.
pub fn ipag_reduce<T: Real>(
    layers: &[(GaussianParams<T>, LadderPolynomial<T>)],
) -> Result<ReducedCircuit<T>> {
    let (first, rest) = layers.split_first().ok_or(Error::EmptyLayers)?;
    let n = first.0.n_modes();
    for (g, p) in layers {
        if g.n_modes() != n || p.n_modes() != n {
            return Err(Error::ModeCountMismatch {
                left: n,
                right: g.n_modes().max(p.n_modes()),
            });
        }
    }
    let _ = rest;
    let mut cum_bog = BogoliubovMap::<T>::identity(n);
    let mut cum_sym = SymplecticMatrix::<T>::identity(n);
    let mut prep: Option<LadderPolynomial<T>> = None;
    for (g, p) in layers.iter().rev() {
        let conjugated = p.conjugate_by_gaussian(&cum_bog)?;
        prep = Some(match prep {
            None => conjugated,
            Some(acc) => acc.multiply(&conjugated)?,
        });
        let s = gaussian_symplectic(g)?;
        cum_bog = BogoliubovMap::from_symplectic(&s).then(&cum_bog);
        cum_sym = s.then(&cum_sym);
    }
    Ok(ReducedCircuit {
        symplectic: cum_sym,
        prep: prep.expect("at least one layer"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::bogoliubov_of;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dagger_flips_and_reverses() {
        let p = LadderPolynomial::monomial(
            2,
            c64(0.0, 2.0),
            vec![LadderOp::create(1), LadderOp::annihilate(2)],
        )
        .unwrap();
        let d = p.dagger();
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.terms()[0].coeff, c64(0.0, -2.0));
        assert_eq!(
            d.terms()[0].ops,
            vec![LadderOp::create(2), LadderOp::annihilate(1)]
        );
        assert_eq!(d.dagger(), p);
    }

    #[test]
    fn multiply_concatenates_without_normal_ordering() {
        let a = LadderPolynomial::monomial_real(1, 1.0, vec![LadderOp::annihilate(1)]).unwrap();
        let ad = LadderPolynomial::monomial_real(1, 1.0, vec![LadderOp::create(1)]).unwrap();
        let prod = a.multiply(&ad).unwrap();
        assert_eq!(prod.n_terms(), 1);
        assert_eq!(
            prod.terms()[0].ops,
            vec![LadderOp::annihilate(1), LadderOp::create(1)]
        );
    }

    #[test]
    fn multiply_distributes() {
        let p = LadderPolynomial::from_terms(
            2,
            vec![
                LadderMonomial::new(c64(2.0, 0.0), vec![LadderOp::annihilate(1)]),
                LadderMonomial::new(c64(1.0, 0.0), vec![LadderOp::annihilate(2)]),
            ],
        )
        .unwrap();
        let q = LadderPolynomial::monomial_real(2, 1.0, vec![LadderOp::create(1)]).unwrap();
        let prod = p.multiply(&q).unwrap();
        assert_eq!(prod.n_terms(), 2);
    }

    #[test]
    fn mode_range_is_checked() {
        assert!(LadderPolynomial::<f64>::monomial_real(2, 1.0, vec![LadderOp::create(3)]).is_err());
        assert!(LadderPolynomial::<f64>::monomial_real(2, 1.0, vec![LadderOp::create(0)]).is_err());
        let p = LadderPolynomial::<f64>::identity(2);
        let q = LadderPolynomial::<f64>::identity(3);
        assert!(p.multiply(&q).is_err());
    }

    #[test]
    fn canonicalization_merges_and_prunes() {
        let p = LadderPolynomial::from_terms(
            1,
            vec![
                LadderMonomial::new(c64(1.0, 0.0), vec![LadderOp::create(1)]),
                LadderMonomial::new(c64(-1.0, 0.0), vec![LadderOp::create(1)]),
                LadderMonomial::new(c64(0.5, 0.0), vec![LadderOp::annihilate(1)]),
            ],
        )
        .unwrap();
        assert_eq!(p.n_terms(), 1);
        assert_eq!(p.terms()[0].ops, vec![LadderOp::annihilate(1)]);
    }

    #[test]
    fn conjugation_by_identity_is_identity() {
        let p = LadderPolynomial::from_terms(
            2,
            vec![
                LadderMonomial::new(c64(1.5, -0.5), vec![LadderOp::create(1), LadderOp::annihilate(2)]),
                LadderMonomial::new(c64(0.25, 0.0), vec![LadderOp::annihilate(1)]),
            ],
        )
        .unwrap();
        let conj = p
            .conjugate_by_gaussian(&BogoliubovMap::identity(2))
            .unwrap();
        assert_eq!(conj, p);
    }

    #[test]
    fn single_squeezer_conjugation() {
        let params = GaussianParams::new(vec![0.5f64], vec![0.0]).unwrap();
        let b = bogoliubov_of(&params).unwrap();
        let p = LadderPolynomial::monomial_real(1, 1.0, vec![LadderOp::create(1)]).unwrap();
        let conj = p.conjugate_by_gaussian(&b).unwrap();
        assert_eq!(conj.n_terms(), 2);
        for term in conj.terms() {
            match term.ops[0].kind {
                OpKind::Create => {
                    assert_relative_eq!(term.coeff.re, 0.5f64.cosh(), epsilon = 1e-12)
                }
                OpKind::Annihilate => {
                    assert_relative_eq!(term.coeff.re, 0.5f64.sinh(), epsilon = 1e-12)
                }
            }
        }
    }

    #[test]
    fn conjugation_preserves_monomial_length() {
        let mut rng = {
            use rand::SeedableRng;
            rand_chacha::ChaCha12Rng::seed_from_u64(5)
        };
        use rand::Rng;
        let n = 2usize;
        let squeezings: Vec<f64> = (0..n).map(|_| rng.random_range(-0.8..0.8)).collect();
        let passive: Vec<f64> = (0..n * n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let b = bogoliubov_of(&GaussianParams::new(squeezings, passive).unwrap()).unwrap();
        let p = LadderPolynomial::monomial(
            2,
            c64(1.0, 0.25),
            vec![LadderOp::create(1), LadderOp::annihilate(2), LadderOp::create(2)],
        )
        .unwrap();
        let conj = p.conjugate_by_gaussian(&b).unwrap();
        assert!(!conj.is_zero());
        for term in conj.terms() {
            assert_eq!(term.len(), 3);
        }
        // Dagger commutes with conjugation.
        let lhs = p.dagger().conjugate_by_gaussian(&b).unwrap();
        let rhs = conj.dagger();
        assert_eq!(lhs.n_terms(), rhs.n_terms());
        for (a, bterm) in lhs.terms().iter().zip(rhs.terms()) {
            assert_eq!(a.ops, bterm.ops);
            assert!((a.coeff - bterm.coeff).norm_sqr() < 1e-20);
        }
    }

    #[test]
    fn ipag_single_layer_passthrough() {
        let g = GaussianParams::new(vec![0.3f64], vec![0.1]).unwrap();
        let p = LadderPolynomial::monomial_real(1, 1.0, vec![LadderOp::annihilate(1)]).unwrap();
        let reduced = ipag_reduce(&[(g.clone(), p.clone())]).unwrap();
        assert_eq!(reduced.prep, p);
        let expected = gaussian_symplectic(&g).unwrap();
        assert!((reduced.symplectic.matrix() - expected.matrix()).abs().max() < 1e-14);
    }

    #[test]
    fn ipag_identity_gaussians_concatenate_preps() {
        let id = GaussianParams::<f64>::zeros(2);
        let p1 = LadderPolynomial::monomial_real(2, 1.0, vec![LadderOp::annihilate(1)]).unwrap();
        let p2 = LadderPolynomial::monomial_real(2, 1.0, vec![LadderOp::create(2)]).unwrap();
        let reduced = ipag_reduce(&[(id.clone(), p1.clone()), (id.clone(), p2.clone())]).unwrap();
        // Applied order is P2 · P1, so P2's op sits leftmost.
        assert_eq!(reduced.prep, p2.multiply(&p1).unwrap());
        assert!(reduced.symplectic.orthogonal_residual() < 1e-14);
    }

    #[test]
    fn ipag_second_identity_layer_uses_first_gaussian() {
        let g = GaussianParams::new(vec![0.4f64, -0.2], vec![0.3, 0.7, 0.2, -0.5]).unwrap();
        let id = GaussianParams::<f64>::zeros(2);
        let p1 = LadderPolynomial::monomial_real(2, 1.0, vec![LadderOp::annihilate(1)]).unwrap();
        let p2 = LadderPolynomial::monomial_real(2, 1.0, vec![LadderOp::annihilate(2)]).unwrap();
        let reduced = ipag_reduce(&[(g.clone(), p1.clone()), (id, p2.clone())]).unwrap();
        assert_eq!(reduced.prep, p2.multiply(&p1).unwrap());
        let expected = gaussian_symplectic(&g).unwrap();
        assert!((reduced.symplectic.matrix() - expected.matrix()).abs().max() < 1e-12);
    }

    #[test]
    fn ipag_term_count_bound() {
        let g = GaussianParams::new(vec![0.4f64, -0.2], vec![0.3, 0.7, 0.2, -0.5]).unwrap();
        let p = LadderPolynomial::monomial_real(2, 1.0, vec![LadderOp::annihilate(1)]).unwrap();
        let layers: Vec<_> = (0..3).map(|_| (g.clone(), p.clone())).collect();
        let reduced = ipag_reduce(&layers).unwrap();
        // k = 1 op per layer, l = 3 layers, N = 2: bound (2N)^(k(l−1)) = 16.
        assert!(reduced.prep.n_terms() <= 16);
        for term in reduced.prep.terms() {
            assert_eq!(term.len(), 3);
        }
    }

    #[test]
    fn ipag_rejects_empty() {
        assert!(ipag_reduce::<f64>(&[]).is_err());
    }

    #[test]
    fn text_format_roundtrip() {
        let p = LadderPolynomial::from_terms(
            2,
            vec![
                LadderMonomial::new(c64(-1.0, 0.0), vec![LadderOp::annihilate(1), LadderOp::create(2)]),
                LadderMonomial::new(c64(0.5, -0.25), vec![LadderOp::create(1), LadderOp::annihilate(1)]),
                LadderMonomial::new(c64(2.0, 0.0), Vec::new()),
            ],
        )
        .unwrap();
        let text = p.to_string();
        let back = LadderPolynomial::<f64>::parse(2, &text).unwrap();
        assert_eq!(back.n_terms(), p.n_terms());
        for (a, b) in back.terms().iter().zip(p.terms()) {
            assert_eq!(a.ops, b.ops);
            assert!((a.coeff - b.coeff).norm_sqr() < 1e-20);
        }
    }

    proptest! {
        #[test]
        fn prop_dagger_is_involution(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let n = rng.random_range(1..4usize);
            let terms: Vec<LadderMonomial<f64>> = (0..rng.random_range(1..5usize)).map(|_| {
                let len = rng.random_range(0..5usize);
                let ops: Vec<LadderOp> = (0..len).map(|_| {
                    let mode = rng.random_range(1..=n);
                    if rng.random_bool(0.5) { LadderOp::create(mode) } else { LadderOp::annihilate(mode) }
                }).collect();
                LadderMonomial::new(c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)), ops)
            }).collect();
            let p = LadderPolynomial::from_terms(n, terms).unwrap();
            prop_assert_eq!(p.dagger().dagger(), p);
        }

        #[test]
        fn prop_multiply_associative(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let n = 2usize;
            let rand_poly = |rng: &mut rand_chacha::ChaCha12Rng| {
                let terms: Vec<LadderMonomial<f64>> = (0..rng.random_range(1..3usize)).map(|_| {
                    let len = rng.random_range(0..3usize);
                    let ops: Vec<LadderOp> = (0..len).map(|_| {
                        let mode = rng.random_range(1..=n);
                        if rng.random_bool(0.5) { LadderOp::create(mode) } else { LadderOp::annihilate(mode) }
                    }).collect();
                    LadderMonomial::new(c64(rng.random_range(-1.0..1.0), 0.0), ops)
                }).collect();
                LadderPolynomial::from_terms(n, terms).unwrap()
            };
            let (p, q, r) = (rand_poly(&mut rng), rand_poly(&mut rng), rand_poly(&mut rng));
            let lhs = p.multiply(&q).unwrap().multiply(&r).unwrap();
            let rhs = p.multiply(&q.multiply(&r).unwrap()).unwrap();
            prop_assert_eq!(lhs.n_terms(), rhs.n_terms());
            for (a, b) in lhs.terms().iter().zip(rhs.terms()) {
                prop_assert_eq!(&a.ops, &b.ops);
                prop_assert!((a.coeff - b.coeff).norm_sqr() < 1e-20);
            }
        }
    }
}
