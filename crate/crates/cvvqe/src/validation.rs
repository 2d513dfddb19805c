//! Self-validation: closed-form checks, matching combinatorics, and a
//! randomized equivalence suite between the pair-contraction engine and the
//! truncated-Fock oracle. Runs at `f64`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::fock::{
    apply_polynomial, bh_ground_energy, expectation_fock, gaussian_state_fock, FockSpace,
};
use crate::gaussian::{
    bogoliubov_of, gaussian_covariance, passive_from_params, vacuum_covariance, GaussianParams,
};
use crate::ladder::{LadderOp, LadderPolynomial};
use crate::models::{BoseHubbardParams, Boundary};
use crate::wick::{
    gaussian_expectation_detailed, nongaussian_expectation, polynomial_expectation_with_table,
    ContractionTable,
};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Options for [`run_validation`].
#[derive(Debug, Clone)]
pub struct ValidationOptions {
    /// Smaller randomized suite with a lower cutoff; finishes within a few
    /// seconds.
    pub quick: bool,
    /// Corrupt the exchange term of the contraction table; the closed-form
    /// checks must then fail (self-test of the validator).
    pub corrupt_exchange: bool,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            quick: false,
            corrupt_exchange: false,
            seed: 2024,
        }
    }
}

fn table_for(v: &crate::gaussian::CovarianceMatrix<f64>, corrupt: bool) -> ContractionTable<f64> {
    if corrupt {
        ContractionTable::new_with_corrupted_exchange(v)
    } else {
        ContractionTable::new(v)
    }
}

fn number_op(n_modes: usize, mode: usize) -> LadderPolynomial<f64> {
    LadderPolynomial::monomial_real(
        n_modes,
        1.0,
        vec![LadderOp::create(mode), LadderOp::annihilate(mode)],
    )
    .expect("valid mode")
}

/// `⟨n̂⟩` on squeezed vacuum equals `sinh²s` for s ∈ {0.1, 0.5, 1.0}.
pub fn check_squeezed_occupation(corrupt: bool) -> CheckReport {
    let mut worst = 0.0f64;
    for s in [0.1, 0.5, 1.0] {
        let v = gaussian_covariance(&GaussianParams::new(vec![s], vec![0.0]).unwrap()).unwrap();
        let table = table_for(&v, corrupt);
        let got = polynomial_expectation_with_table(&number_op(1, 1), &table);
        let expected = s.sinh().powi(2);
        worst = worst.max((got.re - expected).abs()).max(got.im.abs());
    }
    CheckReport::new(
        "squeezed-vacuum occupation sinh^2(s)",
        worst <= 1e-9,
        format!("max deviation {worst:.3e} (tol 1e-9)"),
    )
}

/// `⟨n̂⟩` on photon-subtracted squeezed vacuum equals `1 + 3 sinh²s`.
pub fn check_subtracted_occupation(corrupt: bool) -> CheckReport {
    let mut worst = 0.0f64;
    for s in [0.1, 0.5, 1.0] {
        let v = gaussian_covariance(&GaussianParams::new(vec![s], vec![0.0]).unwrap()).unwrap();
        let prep =
            LadderPolynomial::monomial_real(1, 1.0, vec![LadderOp::annihilate(1)]).unwrap();
        // Route the (possibly corrupted) table through the ratio by hand.
        let table = table_for(&v, corrupt);
        let prep_dag = prep.dagger();
        let k = polynomial_expectation_with_table(&prep_dag.multiply(&prep).unwrap(), &table);
        let num = polynomial_expectation_with_table(
            &prep_dag
                .multiply(&number_op(1, 1))
                .unwrap()
                .multiply(&prep)
                .unwrap(),
            &table,
        );
        let got = num / k;
        let expected = 1.0 + 3.0 * s.sinh().powi(2);
        worst = worst.max((got.re - expected).abs()).max(got.im.abs());
    }
    CheckReport::new(
        "photon-subtracted occupation 1 + 3 sinh^2(s)",
        worst <= 1e-9,
        format!("max deviation {worst:.3e} (tol 1e-9)"),
    )
}

/// Perfect-matching counts are (2m−1)!! and odd monomials vanish exactly.
pub fn check_matching_combinatorics() -> CheckReport {
    let v = vacuum_covariance::<f64>(1);
    let table = ContractionTable::new(&v);
    let mut ok = true;
    let mut detail = String::new();
    for (len, expected) in [(2usize, 1u64), (4, 3), (6, 15), (8, 105)] {
        let ops: Vec<LadderOp> = (0..len)
            .map(|i| {
                if i % 2 == 0 {
                    LadderOp::annihilate(1)
                } else {
                    LadderOp::create(1)
                }
            })
            .collect();
        let m = crate::ladder::LadderMonomial::real(1.0, ops);
        let out = gaussian_expectation_detailed(&m, &table);
        if out.matchings_evaluated != expected {
            ok = false;
            detail = format!(
                "length {len}: {} matchings, expected {expected}",
                out.matchings_evaluated
            );
        }
    }
    for len in [1usize, 3, 5, 7] {
        let m = crate::ladder::LadderMonomial::<f64>::real(1.0, vec![LadderOp::create(1); len]);
        let out = gaussian_expectation_detailed(&m, &table);
        if out.value != Complex64::new(0.0, 0.0) || out.matchings_evaluated != 0 {
            ok = false;
            detail = format!("odd length {len} did not vanish exactly");
        }
    }
    if ok {
        detail = "counts 1/3/15/105, odd lengths exactly zero".into();
    }
    CheckReport::new("perfect-matching combinatorics", ok, detail)
}

/// Truncated-chain ground energies: diagonal closed form and cutoff
/// monotonicity.
pub fn check_ed_sanity() -> CheckReport {
    let diag = BoseHubbardParams::new(2, 0.0, 1.0, 1.0, Boundary::Open).unwrap();
    let e: f64 = bh_ground_energy(&diag, 6).unwrap();
    let closed_ok = (e + 2.0).abs() <= 1e-12;
    let hopping = BoseHubbardParams::new(2, 1.0, 1.0, 1.0, Boundary::Open).unwrap();
    let e4 = bh_ground_energy(&hopping, 4).unwrap();
    let e8 = bh_ground_energy(&hopping, 8).unwrap();
    let e12 = bh_ground_energy(&hopping, 12).unwrap();
    let mono_ok = e4 >= e8 - 1e-12 && e8 >= e12 - 1e-12;
    CheckReport::new(
        "exact diagonalization sanity",
        closed_ok && mono_ok,
        format!("E(t=0) = {e:.15}; cutoffs 4/8/12: {e4:.9} >= {e8:.9} >= {e12:.9}"),
    )
}

/// Passive mesh output is simultaneously symplectic and orthogonal.
pub fn check_passive_structure(seed: u64) -> CheckReport {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for n in 1..=4usize {
        for _ in 0..3 {
            let theta: Vec<f64> = (0..n * n)
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let o = passive_from_params(n, &theta).unwrap();
            worst = worst
                .max(o.symplectic_residual())
                .max(o.orthogonal_residual());
        }
    }
    CheckReport::new(
        "passive mesh orthosymplectic",
        worst <= 1e-10,
        format!("max residual {worst:.3e} (tol 1e-10)"),
    )
}

/// Bogoliubov maps preserve the canonical commutation conditions.
pub fn check_bogoliubov_ccr(seed: u64) -> CheckReport {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        for _ in 0..3 {
            let squeezings: Vec<f64> = (0..n).map(|_| rng.random_range(-0.9..0.9)).collect();
            let passive: Vec<f64> = (0..n * n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let b = bogoliubov_of(&GaussianParams::new(squeezings, passive).unwrap()).unwrap();
            worst = worst.max(b.ccr_residual());
        }
    }
    CheckReport::new(
        "Bogoliubov commutation conditions",
        worst <= 1e-10,
        format!("max residual {worst:.3e} (tol 1e-10)"),
    )
}

/// Purity target round trip through uniform covariance scaling.
pub fn check_purity_roundtrip() -> CheckReport {
    let params = GaussianParams::new(vec![0.4, -0.3], vec![0.5, 1.0, -0.7, 0.2]).unwrap();
    let v = gaussian_covariance(&params).unwrap();
    let noisy = v.with_purity(0.95).unwrap();
    let p: f64 = noisy.purity().unwrap();
    CheckReport::new(
        "purity round trip",
        (p - 0.95).abs() <= 1e-9,
        format!("purity after scaling {p:.12}"),
    )
}

/// Summary of the randomized equivalence suite.
#[derive(Debug, Clone)]
pub struct WickFockSummary {
    pub cases_run: usize,
    pub attempts: usize,
    pub max_rel_err: f64,
    pub failures: usize,
    pub n_max: usize,
}

/// Compare non-Gaussian expectations between the contraction engine and the
/// Fock oracle on randomized cases: up to 3 modes, |s| ≤ 0.6, even
/// observable monomials of length ≤ 6, preparations of up to 2 photon
/// subtractions. A case is admissible only when truncation is negligible
/// for the comparison itself: the prepared state must carry ≤ 1e-10 of its
/// weight in the band the sandwiched polynomial can lift past the cutoff
/// (top `obs_len + 2·preps` levels). Inadmissible draws are redrawn rather
/// than compared against a truncated artifact. Each admitted case must
/// agree to 1e-6 relative error.
pub fn wick_fock_suite(n_cases: usize, n_max: usize, seed: u64) -> WickFockSummary {
    let mut attempts = 0usize;
    let mut cases_run = 0usize;
    let mut failures = 0usize;
    let mut max_rel_err = 0.0f64;
    let mut case_index = 0u64;
    while cases_run < n_cases && attempts < 50 * n_cases {
        attempts += 1;
        case_index += 1;
        let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(case_index));
        let n = rng.random_range(1..=3usize);
        let squeezings: Vec<f64> = (0..n)
            .map(|_| {
                let mag = rng.random_range(0.05..0.6);
                if rng.random_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let passive: Vec<f64> = (0..n * n)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let params = GaussianParams::new(squeezings, passive).unwrap();

        let obs_len = 2 * rng.random_range(1..=3usize);
        let obs_ops: Vec<LadderOp> = (0..obs_len)
            .map(|_| {
                let mode = rng.random_range(1..=n);
                if rng.random_bool(0.5) {
                    LadderOp::create(mode)
                } else {
                    LadderOp::annihilate(mode)
                }
            })
            .collect();
        let observable = LadderPolynomial::monomial_real(n, 1.0, obs_ops).unwrap();

        let k_subs = rng.random_range(0..=2usize);
        let prep_ops: Vec<LadderOp> = (0..k_subs)
            .map(|_| LadderOp::annihilate(rng.random_range(1..=n)))
            .collect();
        let prep = LadderPolynomial::monomial_real(n, 1.0, prep_ops).unwrap();

        let v = gaussian_covariance(&params).unwrap();
        let wick = match nongaussian_expectation(&observable, &prep, &v) {
            Ok(val) => val,
            Err(_) => continue, // annihilated preparation; redraw
        };

        let space = match FockSpace::new(n, n_max) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let sandwich_len = obs_len + 2 * k_subs;
        let state = match gaussian_state_fock(&params, &space) {
            Ok(s) if s.weight_above(n_max.saturating_sub(sandwich_len)) <= 1e-10 => s,
            _ => continue, // truncation would contaminate the comparison; redraw
        };
        let prepared = apply_polynomial(&prep, &state);
        let fock = match expectation_fock(&observable, &prepared) {
            Ok(val) => val,
            Err(_) => continue,
        };

        let rel = (wick - fock).norm() / fock.norm().max(1e-9);
        max_rel_err = max_rel_err.max(rel);
        if rel > 1e-6 {
            failures += 1;
        }
        cases_run += 1;
    }
    WickFockSummary {
        cases_run,
        attempts,
        max_rel_err,
        failures,
        n_max,
    }
}

/// Run the full validation battery and return one report per check.
pub fn run_validation(opts: &ValidationOptions) -> Vec<CheckReport> {
    let mut reports = vec![
        check_squeezed_occupation(opts.corrupt_exchange),
        check_subtracted_occupation(opts.corrupt_exchange),
        check_matching_combinatorics(),
        check_ed_sanity(),
        check_passive_structure(opts.seed),
        check_bogoliubov_ccr(opts.seed.wrapping_add(1)),
        check_purity_roundtrip(),
    ];
    let (cases, n_max) = if opts.quick { (30, 30) } else { (200, 30) };
    let suite = wick_fock_suite(cases, n_max, opts.seed);
    reports.push(CheckReport::new(
        "contraction engine vs Fock oracle",
        suite.failures == 0 && suite.cases_run == cases,
        format!(
            "{} cases at n_max {}, max relative error {:.3e} (tol 1e-6), {} redraw attempts",
            suite.cases_run, suite.n_max, suite.max_rel_err, suite.attempts
        ),
    ));
    reports
}

/// Render reports as an aligned pass/fail table.
pub fn render_reports(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "[{status}] {:<width$}  {}\n",
            r.name,
            r.detail,
            width = width
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes_quickly() {
        let reports = run_validation(&ValidationOptions {
            quick: true,
            ..ValidationOptions::default()
        });
        for r in &reports {
            assert!(r.passed, "{} failed: {}", r.name, r.detail);
        }
    }

    #[test]
    fn corrupted_contraction_is_caught() {
        let reports = run_validation(&ValidationOptions {
            quick: true,
            corrupt_exchange: true,
            ..ValidationOptions::default()
        });
        let occupied = reports
            .iter()
            .find(|r| r.name.contains("sinh"))
            .expect("closed-form check present");
        assert!(!occupied.passed, "corruption went unnoticed");
    }

    #[test]
    fn suite_is_deterministic() {
        let a = wick_fock_suite(10, 30, 99);
        let b = wick_fock_suite(10, 30, 99);
        assert_eq!(a.max_rel_err.to_bits(), b.max_rel_err.to_bits());
        assert_eq!(a.attempts, b.attempts);
    }
}
