//! Derivative-free local minimization with box bounds and seeded restarts.
//!
//! The search is a Nelder-Mead simplex with dimension-adaptive coefficients
//! (reflection 1, expansion 1 + 2/d, contraction 3/4 - 1/(2d), shrink 1 - 1/d).
//! Trial points are projected onto the bounds before evaluation. A run stops
//! when the simplex diameter around the best vertex drops below `tolerance`
//! or the evaluation budget is spent.

use std::convert::Infallible;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptOptions<T> {
    /// Evaluation budget of a single restart.
    pub max_evaluations: usize,
    /// Edge length of the initial simplex and spread of restart perturbations.
    pub initial_step: T,
    pub tolerance: T,
    pub bounds: Option<Vec<(T, T)>>,
    pub seed: u64,
    pub restarts: usize,
}

impl<T: Scalar> OptOptions<T> {
    /// Default budget of `500 * dim` evaluations, tolerance `1e-6`, unit step, 3 restarts.
    pub fn for_dimension(dim: usize) -> Self {
        Self {
            max_evaluations: 500 * dim.max(1),
            initial_step: T::one(),
            tolerance: T::lit(1e-6),
            bounds: None,
            seed: 0,
            restarts: 3,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), String> {
        if dim == 0 {
            return Err("dimension must be at least 1".into());
        }
        if self.max_evaluations < dim + 2 {
            return Err(format!("max_evaluations must be at least dim + 2 = {}", dim + 2));
        }
        if !(self.tolerance > T::zero() && self.tolerance.is_finite()) {
            return Err("tolerance must be positive".into());
        }
        if !(self.initial_step > T::zero() && self.initial_step.is_finite()) {
            return Err("initial_step must be positive".into());
        }
        if self.restarts < 1 {
            return Err("restarts must be at least 1".into());
        }
        if let Some(b) = &self.bounds {
            if b.len() != dim {
                return Err(format!("bounds have {} entries for dimension {}", b.len(), dim));
            }
            if b.iter().any(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
                return Err("every bound must satisfy lo <= hi and be finite".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult<T> {
    pub x_opt: Vec<T>,
    pub f_opt: T,
    /// Evaluations summed over all restarts.
    pub evaluations: usize,
    /// Whether the winning restart met the simplex-size tolerance.
    pub converged: bool,
    pub restart_index: usize,
    /// Best objective value seen after each evaluation, across restarts.
    #[serde(skip)]
    pub best_trace: Vec<T>,
}

#[derive(Debug, Error)]
pub enum OptError<E: fmt::Debug + fmt::Display> {
    #[error("start point has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid optimizer options: {0}")]
    InvalidOptions(String),
    #[error("start point lies outside the bounds in coordinate {0}")]
    StartOutOfBounds(usize),
    #[error("objective returned {value} at evaluation {evaluation} (x = {x:?})")]
    NonFinite { value: f64, evaluation: usize, x: Vec<f64> },
    #[error("objective failed: {0}")]
    Objective(E),
}

impl OptError<Infallible> {
    fn widen<E: fmt::Debug + fmt::Display>(self) -> OptError<E> {
        match self {
            OptError::DimensionMismatch { expected, found } => OptError::DimensionMismatch { expected, found },
            OptError::InvalidOptions(s) => OptError::InvalidOptions(s),
            OptError::StartOutOfBounds(i) => OptError::StartOutOfBounds(i),
            OptError::NonFinite { value, evaluation, x } => OptError::NonFinite { value, evaluation, x },
            OptError::Objective(never) => match never {},
        }
    }
}

/// Minimizes an infallible objective.
pub fn minimize<T, F>(mut f: F, x0: &[T], opts: &OptOptions<T>) -> Result<OptResult<T>, OptError<Infallible>>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    try_minimize(|x: &[T]| Ok::<T, Infallible>(f(x)), x0, opts)
}

/// Minimizes an objective that may fail; the first failure aborts the search.
pub fn try_minimize<T, E, F>(mut f: F, x0: &[T], opts: &OptOptions<T>) -> Result<OptResult<T>, OptError<E>>
where
    T: Scalar,
    E: fmt::Debug + fmt::Display,
    F: FnMut(&[T]) -> Result<T, E>,
{
    let dim = x0.len();
    opts.validate(dim).map_err(|e| {
        if dim == 0 {
            OptError::<Infallible>::DimensionMismatch { expected: 1, found: 0 }.widen()
        } else {
            OptError::InvalidOptions(e)
        }
    })?;
    if let Some(bounds) = &opts.bounds {
        if let Some(i) = x0.iter().zip(bounds).position(|(x, (lo, hi))| !(x >= lo && x <= hi)) {
            return Err(OptError::StartOutOfBounds(i));
        }
    }

    let mut eval = Evaluator { f: &mut f, count: 0, best: T::infinity(), trace: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<RunOutcome<T>> = None;
    let mut best_restart = 0;

    for restart in 0..opts.restarts {
        let start: Vec<T> = if restart == 0 {
            x0.to_vec()
        } else {
            let mut s: Vec<T> = x0
                .iter()
                .map(|&x| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x + opts.initial_step * T::lit(z)
                })
                .collect();
            project(&mut s, opts.bounds.as_deref());
            s
        };
        let outcome = nelder_mead(&mut eval, start, opts)?;
        if best.as_ref().is_none_or(|b| outcome.f < b.f) {
            best = Some(outcome);
            best_restart = restart;
        }
    }

    let best = best.expect("at least one restart");
    Ok(OptResult {
        x_opt: best.x,
        f_opt: best.f,
        evaluations: eval.count,
        converged: best.converged,
        restart_index: best_restart,
        best_trace: eval.trace,
    })
}

struct Evaluator<'a, T, F> {
    f: &'a mut F,
    count: usize,
    best: T,
    trace: Vec<T>,
}

impl<T: Scalar, F> Evaluator<'_, T, F> {
    fn call<E>(&mut self, x: &[T]) -> Result<T, OptError<E>>
    where
        E: fmt::Debug + fmt::Display,
        F: FnMut(&[T]) -> Result<T, E>,
    {
        let value = (self.f)(x).map_err(OptError::Objective)?;
        self.count += 1;
        if !value.is_finite() {
            return Err(OptError::NonFinite {
                value: value.as_f64(),
                evaluation: self.count,
                x: x.iter().map(|v| v.as_f64()).collect(),
            });
        }
        if value < self.best {
            self.best = value;
        }
        self.trace.push(self.best);
        Ok(value)
    }
}

struct RunOutcome<T> {
    x: Vec<T>,
    f: T,
    converged: bool,
}

fn project<T: Scalar>(x: &mut [T], bounds: Option<&[(T, T)]>) {
    if let Some(bounds) = bounds {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.max(lo).min(hi);
        }
    }
}

fn nelder_mead<T, E, F>(
    eval: &mut Evaluator<'_, T, F>,
    start: Vec<T>,
    opts: &OptOptions<T>,
) -> Result<RunOutcome<T>, OptError<E>>
where
    T: Scalar,
    E: fmt::Debug + fmt::Display,
    F: FnMut(&[T]) -> Result<T, E>,
{
    let n = start.len();
    let nf = T::from_count(n);
    let one = T::one();
    let alpha = one;
    let gamma = one + T::lit(2.0) / nf;
    let rho = T::lit(0.75) - one / (T::lit(2.0) * nf);
    let sigma = one - one / nf;
    let bounds = opts.bounds.as_deref();
    let budget_end = eval.count + opts.max_evaluations;

    // initial simplex: start plus one step along each axis, stepping inward at an upper bound
    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    simplex.push(start.clone());
    for i in 0..n {
        let mut v = start.clone();
        let step = match bounds {
            Some(b) if v[i] + opts.initial_step > b[i].1 => -opts.initial_step,
            _ => opts.initial_step,
        };
        v[i] = v[i] + step;
        project(&mut v, bounds);
        simplex.push(v);
    }
    let mut values = Vec::with_capacity(n + 1);
    for v in &simplex {
        values.push(eval.call(v)?);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut converged = false;
    let mut centroid = vec![T::zero(); n];
    let mut trial = vec![T::zero(); n];

    loop {
        // stable sort keeps ties in vertex order, so runs are reproducible
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
        let (best, worst, second_worst) = (order[0], order[n], order[n - 1]);

        let size = simplex
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (*a - *b).abs()))
            .fold(T::zero(), T::max);
        if size < opts.tolerance {
            converged = true;
            break;
        }
        if eval.count >= budget_end {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = T::zero());
        for &k in &order[..n] {
            for (c, &x) in centroid.iter_mut().zip(&simplex[k]) {
                *c = *c + x;
            }
        }
        centroid.iter_mut().for_each(|c| *c = *c / nf);

        let point_along = |coef: T, from: &[T], out: &mut Vec<T>| {
            // out = centroid + coef * (from - centroid)
            for ((o, &c), &x) in out.iter_mut().zip(&centroid).zip(from) {
                *o = c + coef * (x - c);
            }
            project(out, bounds);
        };

        point_along(-alpha, &simplex[worst], &mut trial);
        let reflected = trial.clone();
        let f_reflected = eval.call(&reflected)?;

        if f_reflected < values[best] {
            if eval.count >= budget_end {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
                continue;
            }
            point_along(gamma, &reflected, &mut trial);
            let f_expanded = eval.call(&trial)?;
            if f_expanded < f_reflected {
                simplex[worst].clone_from(&trial);
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        if eval.count >= budget_end {
            continue;
        }

        let (contracted, f_contracted, accept) = if f_reflected < values[worst] {
            point_along(rho, &reflected, &mut trial);
            let fc = eval.call(&trial)?;
            (trial.clone(), fc, fc <= f_reflected)
        } else {
            point_along(rho, &simplex[worst], &mut trial);
            let fc = eval.call(&trial)?;
            (trial.clone(), fc, fc < values[worst])
        };
        if accept {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }

        let anchor = simplex[best].clone();
        for &k in &order[1..] {
            if eval.count >= budget_end {
                break;
            }
            for (x, &a) in simplex[k].iter_mut().zip(&anchor) {
                *x = a + sigma * (*x - a);
            }
            project(&mut simplex[k], bounds);
            values[k] = eval.call(&simplex[k])?;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values").then(a.cmp(&b)))
        .expect("non-empty simplex");
    Ok(RunOutcome { x: simplex[best].clone(), f: values[best], converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(dim: usize) -> OptOptions<f64> {
        OptOptions { restarts: 1, ..OptOptions::for_dimension(dim) }
    }

    #[test]
    fn quadratic_1d() {
        let r = minimize(|x: &[f64]| (x[0] - 3.0).powi(2), &[0.0], &opts(1)).unwrap();
        assert!((r.x_opt[0] - 3.0).abs() < 1e-4, "{r:?}");
        assert!(r.converged);
    }

    #[test]
    fn respects_bounds() {
        let o = OptOptions { bounds: Some(vec![(-1.0, 1.0), (0.5, 2.0)]), ..opts(2) };
        let r = minimize(|x: &[f64]| (x[0] - 3.0).powi(2) + x[1].powi(2), &[0.0, 1.0], &o).unwrap();
        assert!((r.x_opt[0] - 1.0).abs() < 1e-6 && (r.x_opt[1] - 0.5).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn non_finite_objective_aborts() {
        let err = minimize(|x: &[f64]| if x[0] > 0.5 { f64::NAN } else { -x[0] }, &[0.0], &opts(1)).unwrap_err();
        assert!(matches!(err, OptError::NonFinite { .. }), "{err}");
    }

    #[test]
    fn objective_error_propagates() {
        let err = try_minimize(|_: &[f64]| Err::<f64, _>("boom"), &[0.0], &opts(1)).unwrap_err();
        assert!(matches!(err, OptError::Objective("boom")));
    }

    #[test]
    fn rejects_bad_options() {
        let f = |x: &[f64]| x[0] * x[0];
        let small = OptOptions { max_evaluations: 2, ..opts(1) };
        assert!(matches!(minimize(f, &[0.0], &small), Err(OptError::InvalidOptions(_))));
        let zero_tol = OptOptions { tolerance: 0.0, ..opts(1) };
        assert!(matches!(minimize(f, &[0.0], &zero_tol), Err(OptError::InvalidOptions(_))));
        let outside = OptOptions { bounds: Some(vec![(1.0, 2.0)]), ..opts(1) };
        assert!(matches!(minimize(f, &[0.0], &outside), Err(OptError::StartOutOfBounds(0))));
        assert!(matches!(minimize(f, &[], &opts(1)), Err(OptError::DimensionMismatch { .. })));
    }

    #[test]
    fn restarts_never_lose_the_first_run() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2);
        let one = minimize(f, &[4.0, 4.0], &opts(2)).unwrap();
        let three = minimize(f, &[4.0, 4.0], &OptOptions { restarts: 3, ..opts(2) }).unwrap();
        assert!(three.f_opt <= one.f_opt);
        assert!(three.evaluations <= 3 * three_budget(2));
        fn three_budget(d: usize) -> usize {
            500 * d
        }
    }

    #[test]
    fn works_in_f32() {
        let o = OptOptions::<f32> { tolerance: 1e-4, restarts: 1, ..OptOptions::for_dimension(2) };
        let r = minimize(|x: &[f32]| (x[0] - 0.5).powi(2) + (x[1] + 0.25).powi(2), &[0.0, 0.0], &o).unwrap();
        assert!((r.x_opt[0] - 0.5).abs() < 1e-3 && (r.x_opt[1] + 0.25).abs() < 1e-3);
    }
}
