//! Limited-memory BFGS minimizer with a strong-Wolfe line search.
//!
//! Deterministic: no randomness, fixed evaluation order, so identical
//! inputs yield bit-identical outputs. The objective returns `None` for
//! points where it cannot be evaluated; the line search treats those as
//! infinitely bad and backs off.

use std::collections::VecDeque;

use nalgebra::DVector;

use crate::scalar::{lit, Real};

/// Line-search and convergence settings.
#[derive(Debug, Clone)]
pub struct LbfgsConfig<T: Real> {
    /// Number of curvature pairs kept.
    pub memory: usize,
    pub max_iterations: usize,
    /// Convergence threshold on the Euclidean gradient norm.
    pub grad_tol: T,
    /// Sufficient-decrease constant.
    pub c1: T,
    /// Curvature constant.
    pub c2: T,
    pub max_line_search: usize,
}

impl<T: Real> Default for LbfgsConfig<T> {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iterations: 200,
            grad_tol: lit(1e-7),
            c1: lit(1e-4),
            c2: lit(0.9),
            max_line_search: 30,
        }
    }
}

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct LbfgsOutcome<T: Real> {
    pub x: Vec<T>,
    pub f: T,
    pub gradient_norm: T,
    pub iterations: usize,
    /// Objective value after each accepted step, starting from the initial
    /// point; non-increasing by the sufficient-decrease condition.
    pub trace: Vec<T>,
    pub converged: bool,
    pub evaluations: usize,
}

struct Probe<T: Real> {
    alpha: T,
    f: T,
    dphi: T,
    x: DVector<T>,
    g: DVector<T>,
}

/// Minimize `eval` starting from `x0`. `eval` returns the objective value
/// and gradient, or `None` where the objective is undefined. Returns `None`
/// only if the initial point cannot be evaluated.
pub fn minimize<T, F>(mut eval: F, x0: Vec<T>, cfg: &LbfgsConfig<T>) -> Option<LbfgsOutcome<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Option<(T, Vec<T>)>,
{
    let mut evaluations = 0usize;
    let mut probe = |x: &DVector<T>, evals: &mut usize| -> Option<(T, DVector<T>)> {
        *evals += 1;
        let (f, g) = eval(x.as_slice())?;
        if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((f, DVector::from_vec(g)))
    };

    let mut x = DVector::from_vec(x0);
    let (mut f, mut g) = probe(&x, &mut evaluations)?;
    let mut trace = vec![f];
    let mut history: VecDeque<(DVector<T>, DVector<T>, T)> = VecDeque::new();
    let mut converged = false;
    let mut iterations = 0usize;

    for _ in 0..cfg.max_iterations {
        let gnorm = g.norm();
        if gnorm <= cfg.grad_tol {
            converged = true;
            break;
        }
        let mut d = two_loop_direction(&g, &history);
        let mut dphi0 = d.dot(&g);
        if dphi0 >= T::zero() {
            // Curvature information went bad; restart from steepest descent.
            history.clear();
            d = -g.clone();
            dphi0 = d.dot(&g);
        }
        let ls = strong_wolfe(
            &mut probe,
            &mut evaluations,
            &x,
            f,
            dphi0,
            &d,
            cfg,
        );
        let accepted = match ls {
            Some(p) => p,
            None => {
                if history.is_empty() {
                    break;
                }
                // Retry once along the raw gradient before giving up.
                history.clear();
                let d = -g.clone();
                let dphi0 = d.dot(&g);
                match strong_wolfe(&mut probe, &mut evaluations, &x, f, dphi0, &d, cfg) {
                    Some(p) => p,
                    None => break,
                }
            }
        };
        iterations += 1;
        let s = &accepted.x - &x;
        let y = &accepted.g - &g;
        let sy = s.dot(&y);
        if sy > lit::<T>(1e-10) * s.norm() * y.norm() {
            history.push_back((s, y, T::one() / sy));
            if history.len() > cfg.memory {
                history.pop_front();
            }
        }
        x = accepted.x;
        f = accepted.f;
        g = accepted.g;
        trace.push(f);
    }

    let gradient_norm = g.norm();
    if gradient_norm <= cfg.grad_tol {
        converged = true;
    }
    Some(LbfgsOutcome {
        x: x.as_slice().to_vec(),
        f,
        gradient_norm,
        iterations,
        trace,
        converged,
        evaluations,
    })
}

/// Two-loop recursion for the quasi-Newton direction `−H g`, scaling the
/// seed Hessian by `sᵀy / yᵀy`.
fn two_loop_direction<T: Real>(
    g: &DVector<T>,
    history: &VecDeque<(DVector<T>, DVector<T>, T)>,
) -> DVector<T> {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = *rho * s.dot(&q);
        q -= y * a;
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = s.dot(y) / y.dot(y);
        q *= gamma;
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = *rho * y.dot(&q);
        q += s * (a - b);
    }
    -q
}

/// Strong-Wolfe line search (bracket then zoom, bisection fallback when a
/// trial point cannot be evaluated).
fn strong_wolfe<T, P>(
    probe: &mut P,
    evaluations: &mut usize,
    x0: &DVector<T>,
    f0: T,
    dphi0: T,
    d: &DVector<T>,
    cfg: &LbfgsConfig<T>,
) -> Option<Probe<T>>
where
    T: Real,
    P: FnMut(&DVector<T>, &mut usize) -> Option<(T, DVector<T>)>,
{
    let alpha_max = lit::<T>(100.0);
    let eval_at = |alpha: T, probe: &mut P, evals: &mut usize| -> Option<Probe<T>> {
        let x = x0 + d * alpha;
        let (f, g) = probe(&x, evals)?;
        let dphi = g.dot(d);
        Some(Probe { alpha, f, dphi, x, g })
    };
    let armijo = |alpha: T, f: T| f <= f0 + cfg.c1 * alpha * dphi0;
    let curvature = |dphi: T| dphi.abs() <= -cfg.c2 * dphi0;

    let mut alpha_prev = T::zero();
    let mut f_prev = f0;
    let mut alpha = T::one();
    for i in 0..cfg.max_line_search {
        match eval_at(alpha, probe, evaluations) {
            None => {
                // Unevaluable: bracket between the last good point and here.
                return zoom(
                    probe,
                    evaluations,
                    x0,
                    f0,
                    dphi0,
                    d,
                    cfg,
                    alpha_prev,
                    f_prev,
                    alpha,
                );
            }
            Some(p) => {
                if !armijo(p.alpha, p.f) || (i > 0 && p.f >= f_prev) {
                    return zoom(
                        probe,
                        evaluations,
                        x0,
                        f0,
                        dphi0,
                        d,
                        cfg,
                        alpha_prev,
                        f_prev,
                        alpha,
                    );
                }
                if curvature(p.dphi) {
                    return Some(p);
                }
                if p.dphi >= T::zero() {
                    return zoom(
                        probe,
                        evaluations,
                        x0,
                        f0,
                        dphi0,
                        d,
                        cfg,
                        p.alpha,
                        p.f,
                        alpha_prev,
                    );
                }
                alpha_prev = p.alpha;
                f_prev = p.f;
            }
        }
        let next = (alpha * lit::<T>(2.0)).min(alpha_max);
        if next == alpha {
            return None;
        }
        alpha = next;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn zoom<T, P>(
    probe: &mut P,
    evaluations: &mut usize,
    x0: &DVector<T>,
    f0: T,
    dphi0: T,
    d: &DVector<T>,
    cfg: &LbfgsConfig<T>,
    mut alpha_lo: T,
    mut f_lo: T,
    mut alpha_hi: T,
) -> Option<Probe<T>>
where
    T: Real,
    P: FnMut(&DVector<T>, &mut usize) -> Option<(T, DVector<T>)>,
{
    let armijo = |alpha: T, f: T| f <= f0 + cfg.c1 * alpha * dphi0;
    let curvature = |dphi: T| dphi.abs() <= -cfg.c2 * dphi0;
    let half = lit::<T>(0.5);
    for _ in 0..cfg.max_line_search {
        let alpha = (alpha_lo + alpha_hi) * half;
        if (alpha_hi - alpha_lo).abs() < lit::<T>(1e-14) * (T::one() + alpha_lo.abs()) {
            return None;
        }
        let x = x0 + d * alpha;
        let trial = probe(&x, evaluations).map(|(f, g)| {
            let dphi = g.dot(d);
            Probe { alpha, f, dphi, x, g }
        });
        match trial {
            None => {
                alpha_hi = alpha;
            }
            Some(p) => {
                if !armijo(p.alpha, p.f) || p.f >= f_lo {
                    alpha_hi = alpha;
                } else {
                    if curvature(p.dphi) {
                        return Some(p);
                    }
                    if p.dphi * (alpha_hi - alpha_lo) >= T::zero() {
                        alpha_hi = alpha_lo;
                    }
                    alpha_lo = p.alpha;
                    f_lo = p.f;
                }
            }
        }
    }
    None
}
