//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line with its measured detail. Run with
//! `cargo test --release --test acceptance -- --nocapture` to see timings.

use std::time::Instant;

use cvvqe::fock::{
    apply_gaussian, apply_polynomial, bh_ground_energy, expectation_fock, FockSpace, FockVector,
};
use cvvqe::gaussian::{gaussian_covariance, GaussianParams};
use cvvqe::ladder::{ipag_reduce, LadderOp, LadderPolynomial};
use cvvqe::models::{bose_hubbard_polynomial, Boundary, BoseHubbardParams};
use cvvqe::validation;
use cvvqe::vqe::{
    ansatz_covariance, energy, gradient, optimize, squeezing_cost_db, subtraction_probability,
    AnsatzConfig, OptimizerConfig,
};
use cvvqe::wick::{gaussian_expectation_detailed, nongaussian_expectation, ContractionTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn report(criterion: u32, passed: bool, detail: &str, started: Instant) {
    let status = if passed { "PASS" } else { "FAIL" };
    println!(
        "[{status}] criterion {criterion}: {detail} ({:.2}s)",
        started.elapsed().as_secs_f64()
    );
    assert!(passed, "criterion {criterion} failed: {detail}");
}

fn bh2(t: f64, u: f64, mu: f64) -> BoseHubbardParams<f64> {
    BoseHubbardParams::new(2, t, u, mu, Boundary::Open).unwrap()
}

fn number_op(n_modes: usize, mode: usize) -> LadderPolynomial<f64> {
    LadderPolynomial::monomial_real(
        n_modes,
        1.0,
        vec![LadderOp::create(mode), LadderOp::annihilate(mode)],
    )
    .unwrap()
}

/// Closed forms: squeezed-vacuum occupation and its photon-subtracted
/// counterpart, to 1e-9.
#[test]
fn criterion_1_closed_forms() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for s in [0.1f64, 0.5, 1.0] {
        let v = gaussian_covariance(&GaussianParams::new(vec![s], vec![0.0]).unwrap()).unwrap();
        let plain = cvvqe::wick::polynomial_expectation(&number_op(1, 1), &v)
            .unwrap()
            .re;
        worst = worst.max((plain - s.sinh().powi(2)).abs());
        let prep = LadderPolynomial::monomial_real(1, 1.0, vec![LadderOp::annihilate(1)]).unwrap();
        let sub = nongaussian_expectation(&number_op(1, 1), &prep, &v)
            .unwrap()
            .re;
        worst = worst.max((sub - (1.0 + 3.0 * s.sinh().powi(2))).abs());
    }
    report(
        1,
        worst <= 1e-9,
        &format!("closed forms sinh²s and 1+3sinh²s, max deviation {worst:.2e} (tol 1e-9)"),
        t0,
    );
}

/// Randomized equivalence against the truncated-Fock oracle: 200 admissible
/// cases at n_max = 30, every case within 1e-6 relative error.
#[test]
fn criterion_2_wick_fock_equivalence() {
    let t0 = Instant::now();
    let suite = validation::wick_fock_suite(200, 30, 2024);
    let passed = suite.failures == 0 && suite.cases_run == 200;
    report(
        2,
        passed,
        &format!(
            "{} oracle cases at n_max 30, max relative error {:.2e} (tol 1e-6)",
            suite.cases_run, suite.max_rel_err
        ),
        t0,
    );
}

/// Matching combinatorics: (2m−1)!! matchings for even lengths, exact zero
/// for odd lengths.
#[test]
fn criterion_3_matching_combinatorics() {
    let t0 = Instant::now();
    let v = cvvqe::gaussian::vacuum_covariance::<f64>(2);
    let table = ContractionTable::new(&v);
    let mut passed = true;
    for (len, expected) in [(2usize, 1u64), (4, 3), (6, 15), (8, 105)] {
        let ops: Vec<LadderOp> = (0..len)
            .map(|i| {
                if i % 2 == 0 {
                    LadderOp::annihilate(1 + i % 2)
                } else {
                    LadderOp::create(1)
                }
            })
            .collect();
        let m = cvvqe::ladder::LadderMonomial::real(1.0, ops);
        let out = gaussian_expectation_detailed(&m, &table);
        passed &= out.matchings_evaluated == expected;
    }
    for len in [1usize, 3, 5, 7] {
        let m = cvvqe::ladder::LadderMonomial::<f64>::real(1.0, vec![LadderOp::create(1); len]);
        let out = gaussian_expectation_detailed(&m, &table);
        passed &= out.value == num_complex::Complex64::new(0.0, 0.0);
        passed &= out.matchings_evaluated == 0;
    }
    report(
        3,
        passed,
        "matching counts 1/3/15/105 for lengths 2/4/6/8; odd lengths exactly zero",
        t0,
    );
}

/// Exact-diagonalization sanity: diagonal closed form and cutoff
/// monotonicity.
#[test]
fn criterion_4_ed_sanity() {
    let t0 = Instant::now();
    let e_diag = bh_ground_energy(&bh2(0.0, 1.0, 1.0), 6).unwrap();
    let closed = (e_diag + 2.0).abs() <= 1e-12;
    let hopping = bh2(1.0, 1.0, 1.0);
    let e4 = bh_ground_energy(&hopping, 4).unwrap();
    let e8 = bh_ground_energy(&hopping, 8).unwrap();
    let e12 = bh_ground_energy(&hopping, 12).unwrap();
    let monotone = e4 >= e8 - 1e-12 && e8 >= e12 - 1e-12;
    report(
        4,
        closed && monotone,
        &format!(
            "E(t=0) = {e_diag:.15} (expect −2); cutoffs: {e4:.9} ≥ {e8:.9} ≥ {e12:.9}"
        ),
        t0,
    );
}

/// Variational bound against dense/Lanczos ED at n_max = 60 for
/// U ∈ {0.5, 1, 2}.
#[test]
fn criterion_5_variational_bound() {
    let t0 = Instant::now();
    let mut detail = String::new();
    let mut passed = true;
    for u in [0.5f64, 1.0, 2.0] {
        let model = bh2(1.0, u, 1.0);
        let h = bose_hubbard_polynomial(&model).unwrap();
        let ansatz = AnsatzConfig::<f64>::with_subtractions(2, 1, 1).unwrap();
        let opt = OptimizerConfig::<f64> {
            max_iterations: 300,
            restarts: 8,
            rng_seed: 42,
            ..OptimizerConfig::default()
        };
        let result = optimize(&ansatz, &h, &opt).unwrap();
        let ed = bh_ground_energy(&model, 60).unwrap();
        let ok = result.best_energy >= ed - 1e-6;
        passed &= ok;
        detail.push_str(&format!(
            "U={u}: VQE {:.6} ≥ ED(60) {:.6} − 1e-6: {ok}; ",
            result.best_energy, ed
        ));
    }
    report(5, passed, detail.trim_end_matches("; "), t0);
}

/// Truncation crossing at small U: the variational energy drops strictly
/// below the n_max = 4 truncated ED while staying above ED at n_max = 60.
#[test]
fn criterion_6_truncation_crossing() {
    let t0 = Instant::now();
    let model = bh2(1.0, 0.1, 1.0);
    let h = bose_hubbard_polynomial(&model).unwrap();
    let ansatz = AnsatzConfig::<f64>::with_subtractions(2, 1, 1).unwrap();
    let opt = OptimizerConfig::<f64> {
        max_iterations: 600,
        restarts: 8,
        rng_seed: 42,
        ..OptimizerConfig::default()
    };
    let result = optimize(&ansatz, &h, &opt).unwrap();
    let e4 = bh_ground_energy(&model, 4).unwrap();
    let e60 = bh_ground_energy(&model, 60).unwrap();
    let below = result.best_energy < e4;
    let bounded = result.best_energy >= e60 - 1e-6;
    report(
        6,
        below && bounded,
        &format!(
            "VQE {:.6} < ED(4) {e4:.6}: {below}; ≥ ED(60) {e60:.6} − 1e-6: {bounded}",
            result.best_energy
        ),
        t0,
    );
}

/// Purity contract: with a 0.95 target, every evaluated state reports
/// purity 0.95 ± 1e-9.
#[test]
fn criterion_7_purity_contract() {
    let t0 = Instant::now();
    let mut ansatz = AnsatzConfig::<f64>::with_subtractions(2, 1, 1).unwrap();
    ansatz.purity_target = 0.95;
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let params: Vec<f64> = (0..ansatz.param_count())
            .map(|_| rng.random_range(-0.5..0.5))
            .collect();
        let (_, cov) = ansatz_covariance(&params, &ansatz).unwrap();
        worst = worst.max((cov.purity().unwrap() - 0.95).abs());
    }
    let h = bose_hubbard_polynomial(&bh2(1.0, 1.0, 1.0)).unwrap();
    let opt = OptimizerConfig::<f64> {
        max_iterations: 60,
        restarts: 3,
        ..OptimizerConfig::default()
    };
    let result = optimize(&ansatz, &h, &opt).unwrap();
    worst = worst.max((result.resources.purity - 0.95).abs());
    report(
        7,
        worst <= 1e-9,
        &format!("purity 0.95 target, max deviation {worst:.2e} over 25 random points and the optimum"),
        t0,
    );
}

/// Resource monotonicity: heralding probability non-increasing in the
/// subtraction count at fixed optimized parameters; squeezing cost
/// invariant under passive-parameter changes.
#[test]
fn criterion_8_resource_monotonicity() {
    let t0 = Instant::now();
    let h = bose_hubbard_polynomial(&bh2(1.0, 1.0, 1.0)).unwrap();
    let base = AnsatzConfig::<f64>::with_subtractions(2, 1, 1).unwrap();
    let opt = OptimizerConfig::<f64> {
        max_iterations: 200,
        restarts: 4,
        ..OptimizerConfig::default()
    };
    let result = optimize(&base, &h, &opt).unwrap();
    let (_, cov) = ansatz_covariance(&result.best_params, &base).unwrap();
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut probs = Vec::new();
    for k in 0..=3usize {
        let a = AnsatzConfig::<f64>::with_subtractions(2, 1, k).unwrap();
        let p = subtraction_probability(&a, &cov).unwrap();
        monotone &= p <= prev + 1e-12;
        probs.push(p);
        prev = p;
    }

    let squeezings = vec![0.45f64, -0.25];
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let reference = squeezing_cost_db(
        &gaussian_covariance(&GaussianParams::new(squeezings.clone(), vec![0.0; 4]).unwrap())
            .unwrap(),
    )
    .unwrap();
    let mut invariant = true;
    for _ in 0..10 {
        let passive: Vec<f64> = (0..4).map(|_| rng.random_range(-3.1..3.1)).collect();
        let cost = squeezing_cost_db(
            &gaussian_covariance(&GaussianParams::new(squeezings.clone(), passive).unwrap())
                .unwrap(),
        )
        .unwrap();
        invariant &= (cost - reference).abs() <= 1e-9;
    }
    report(
        8,
        monotone && invariant,
        &format!(
            "heralding probabilities {probs:?} non-increasing: {monotone}; squeezing cost passive-invariant: {invariant}"
        ),
        t0,
    );
}

/// Gradient consistency: central differences at h and h/10 agree within
/// 1e-4 per component at 20 random points.
#[test]
fn criterion_9_gradient_consistency() {
    let t0 = Instant::now();
    let h = bose_hubbard_polynomial(&bh2(1.0, 1.0, 1.0)).unwrap();
    let ansatz = AnsatzConfig::<f64>::with_subtractions(2, 1, 1).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(17);
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    while checked < 20 {
        let params: Vec<f64> = (0..ansatz.param_count())
            .map(|_| rng.random_range(-0.4..0.4))
            .collect();
        if energy(&params, &ansatz, &h).is_err() {
            continue;
        }
        let g1 = gradient(&params, &ansatz, &h, 1e-5).unwrap();
        let g2 = gradient(&params, &ansatz, &h, 1e-6).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            worst = worst.max((a - b).abs());
        }
        checked += 1;
    }
    report(
        9,
        worst <= 1e-4,
        &format!("20 points, max per-component step-halving deviation {worst:.2e} (tol 1e-4)"),
        t0,
    );
}

/// Two-layer interleaved circuits collapse correctly: expectations from the
/// reduced form match direct layered Fock simulation on 20 random
/// instances within 1e-6.
#[test]
fn criterion_10_ipag_reduction() {
    let t0 = Instant::now();
    let n = 2usize;
    let mut rng = ChaCha12Rng::seed_from_u64(777);
    let mut done = 0usize;
    let mut attempts = 0usize;
    let mut worst = 0.0f64;
    while done < 20 && attempts < 400 {
        attempts += 1;
        let draw = |rng: &mut ChaCha12Rng| {
            let s: Vec<f64> = (0..n)
                .map(|_| {
                    let m = rng.random_range(0.1..0.4);
                    if rng.random_bool(0.5) {
                        m
                    } else {
                        -m
                    }
                })
                .collect();
            let p: Vec<f64> = (0..n * n).map(|_| rng.random_range(-3.1..3.1)).collect();
            GaussianParams::new(s, p).unwrap()
        };
        let g1 = draw(&mut rng);
        let g2 = draw(&mut rng);
        let prep = LadderPolynomial::monomial_real(n, 1.0, vec![LadderOp::annihilate(1)]).unwrap();
        let reduced = ipag_reduce(&[(g1.clone(), prep.clone()), (g2.clone(), prep.clone())]).unwrap();
        let v = reduced.covariance();

        let space = FockSpace::new(n, 34).unwrap();
        let mut state = FockVector::<f64>::vacuum(&space);
        state = apply_gaussian(&g1, &state).unwrap();
        state = apply_polynomial(&prep, &state);
        state = apply_gaussian(&g2, &state).unwrap();
        state = apply_polynomial(&prep, &state);
        if state.norm_sqr() < 1e-10 || state.weight_above(26) > 1e-12 {
            continue;
        }
        for ops in [
            vec![LadderOp::create(1), LadderOp::annihilate(1)],
            vec![LadderOp::create(2), LadderOp::annihilate(2)],
            vec![LadderOp::create(1), LadderOp::annihilate(2)],
        ] {
            let obs = LadderPolynomial::monomial_real(n, 1.0, ops).unwrap();
            let wick = nongaussian_expectation(&obs, &reduced.prep, &v).unwrap();
            let fock = expectation_fock(&obs, &state).unwrap();
            worst = worst.max((wick - fock).norm() / fock.norm().max(1e-9));
        }
        done += 1;
    }
    report(
        10,
        done == 20 && worst <= 1e-6,
        &format!("{done} two-layer circuits, max relative deviation {worst:.2e} (tol 1e-6)"),
        t0,
    );
}
