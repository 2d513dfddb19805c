//! Lattice Hamiltonians expressed as ladder polynomials.

use crate::error::{Error, Result};
use crate::ladder::{LadderMonomial, LadderOp, LadderPolynomial};
use crate::scalar::{lit, Real};

/// Chain boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Bose–Hubbard chain in one dimension:
///
/// ```text
/// H = −t Σ_i (b_i b†_{i+1} + b†_i b_{i+1})
///     + (U/2) Σ_i n_i n_i − (μ + U/2) Σ_i n_i,      n_i = b†_i b_i.
/// ```
///
/// Sites `1..=L` map to modes `1..=L`. The hopping strength is written `t`
/// throughout (some conventions call it `J`).
#[derive(Debug, Clone, PartialEq)]
pub struct BoseHubbardParams<T: Real> {
    pub n_sites: usize,
    pub hopping: T,
    pub interaction: T,
    pub chemical_potential: T,
    pub boundary: Boundary,
}

impl<T: Real> BoseHubbardParams<T> {
    pub fn new(
        n_sites: usize,
        hopping: T,
        interaction: T,
        chemical_potential: T,
        boundary: Boundary,
    ) -> Result<Self> {
        let p = Self {
            n_sites,
            hopping,
            interaction,
            chemical_potential,
            boundary,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidModel {
                reason: format!("need at least 2 sites, got {}", self.n_sites),
            });
        }
        if self.boundary == Boundary::Periodic && self.n_sites < 3 {
            return Err(Error::InvalidModel {
                reason: "periodic boundary needs at least 3 sites".into(),
            });
        }
        Ok(())
    }

    /// Bonds `(i, j)` in 1-based site indices.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let l = self.n_sites;
        let mut bonds: Vec<(usize, usize)> = (1..l).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            bonds.push((l, 1));
        }
        bonds
    }
}

/// Build the Bose–Hubbard Hamiltonian as a ladder polynomial.
///
/// Operator orders are kept exactly as written in the Hamiltonian: the
/// interaction is `b† b b† b` per site (not normal-ordered), so every
/// downstream evaluation sees the same polynomial.
pub fn bose_hubbard_polynomial<T: Real>(p: &BoseHubbardParams<T>) -> Result<LadderPolynomial<T>> {
    p.validate()?;
    let l = p.n_sites;
    let mut terms = Vec::new();
    let minus_t = -p.hopping;
    for (i, j) in p.bonds() {
        terms.push(LadderMonomial::real(
            minus_t,
            vec![LadderOp::annihilate(i), LadderOp::create(j)],
        ));
        terms.push(LadderMonomial::real(
            minus_t,
            vec![LadderOp::create(i), LadderOp::annihilate(j)],
        ));
    }
    let half_u = p.interaction * lit::<T>(0.5);
    let chem = -(p.chemical_potential + half_u);
    for i in 1..=l {
        terms.push(LadderMonomial::real(
            half_u,
            vec![
                LadderOp::create(i),
                LadderOp::annihilate(i),
                LadderOp::create(i),
                LadderOp::annihilate(i),
            ],
        ));
        terms.push(LadderMonomial::real(
            chem,
            vec![LadderOp::create(i), LadderOp::annihilate(i)],
        ));
    }
    LadderPolynomial::from_terms(l, terms)
}

/// Diagonal (t = 0) single-site energy `U n²/2 − (μ + U/2) n`; used by
/// closed-form checks.
pub fn diagonal_site_energy<T: Real>(p: &BoseHubbardParams<T>, occupation: usize) -> T {
    let n = lit::<T>(occupation as f64);
    let half = lit::<T>(0.5);
    p.interaction * half * n * n - (p.chemical_potential + p.interaction * half) * n
}
