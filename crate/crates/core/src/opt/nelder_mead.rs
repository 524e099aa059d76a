use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Bounds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Maximum number of cost evaluations, including the start point.
    pub budget: usize,
    pub seed: u64,
    /// Initial simplex edge as a fraction of each box width.
    pub initial_step: f64,
    /// Restart once the simplex values spread less than this.
    pub tolerance: f64,
    /// Threads for batched evaluations; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { budget: 300, seed: 0, initial_step: 0.1, tolerance: 1e-12, workers: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub best: Vec<f64>,
    pub best_cost: f64,
    pub initial_cost: f64,
    /// Best cost seen after each evaluation; non-increasing.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub restarts: usize,
}

struct Search<'a, F> {
    cost: &'a F,
    budget: usize,
    pool: Option<rayon::ThreadPool>,
    history: Vec<f64>,
    best: Vec<f64>,
    best_cost: f64,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Search<'_, F> {
    fn remaining(&self) -> usize {
        self.budget - self.history.len()
    }

    fn record(&mut self, x: &[f64], f: f64) {
        if f < self.best_cost {
            self.best_cost = f;
            self.best = x.to_vec();
        }
        self.history.push(self.best_cost);
    }

    /// Evaluates up to the remaining budget, in order; results are recorded in
    /// input order so the history does not depend on thread scheduling.
    fn eval_batch(&mut self, xs: Vec<Vec<f64>>) -> Vec<(Vec<f64>, f64)> {
        let xs: Vec<_> = xs.into_iter().take(self.remaining()).collect();
        let cost = self.cost;
        let run = || xs.par_iter().map(|x| sanitize(cost(x))).collect::<Vec<_>>();
        let fs = match &self.pool {
            Some(pool) => pool.install(run),
            None => run(),
        };
        let out: Vec<_> = xs.into_iter().zip(fs).collect();
        for (x, f) in &out {
            self.record(x, *f);
        }
        out
    }

    fn eval(&mut self, x: Vec<f64>) -> Option<f64> {
        if self.remaining() == 0 {
            return None;
        }
        let f = sanitize((self.cost)(&x));
        self.record(&x, f);
        Some(f)
    }
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

fn combine(a: &[f64], b: &[f64], t: f64, bounds: &Bounds) -> Vec<f64> {
    // a + t (b − a), projected onto the box.
    let mut x: Vec<f64> = a.iter().zip(b).map(|(ai, bi)| ai + t * (bi - ai)).collect();
    bounds.clamp(&mut x);
    x
}

/// Minimizes `cost` over `bounds` from `x0` with Nelder–Mead (dimension-
/// adapted coefficients), projecting every trial point into the box.
///
/// When the simplex collapses the search restarts around the incumbent with a
/// randomly signed simplex drawn from the seeded generator, until the budget is
/// spent. Initial and shrink vertices are evaluated in parallel.
pub fn optimize<F>(cost: F, bounds: &Bounds, x0: &[f64], settings: &OptimizerSettings) -> Result<OptimResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    bounds.validate()?;
    if settings.budget == 0 {
        return Err(Error::InvalidConfig("budget must be at least 1".into()));
    }
    if x0.len() != bounds.dim() {
        return Err(Error::InvalidConfig(format!(
            "start point has {} entries, bounds have {}",
            x0.len(),
            bounds.dim()
        )));
    }
    let pool = match settings.workers {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::OptimizerFailure(e.to_string()))?,
        ),
        None => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let n = bounds.dim();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut start = x0.to_vec();
    bounds.clamp(&mut start);
    let mut s = Search {
        cost: &cost,
        budget: settings.budget,
        pool,
        history: Vec::with_capacity(settings.budget),
        best: start.clone(),
        best_cost: f64::INFINITY,
    };
    let initial_cost = s.eval(start.clone()).expect("budget is at least 1");
    let mut restarts = 0usize;
    let mut centre = start;
    let mut centre_cost = initial_cost;
    let mut step = settings.initial_step;

    'outer: while s.remaining() > 0 {
        let vertices: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = centre.clone();
                let sign = if restarts == 0 || rng.random::<bool>() { 1.0 } else { -1.0 };
                let mut d = sign * step * bounds.width(i);
                if v[i] + d > bounds.hi()[i] || v[i] + d < bounds.lo()[i] {
                    d = -d;
                }
                v[i] += d;
                bounds.clamp(&mut v);
                v
            })
            .collect();
        let mut simplex = vec![(centre.clone(), centre_cost)];
        simplex.extend(s.eval_batch(vertices));
        if simplex.len() < n + 1 {
            break;
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (f_best, f_worst) = (simplex[0].1, simplex[n].1);
            if (f_worst - f_best).abs() <= settings.tolerance * (1.0 + f_best.abs())
                || !f_best.is_finite() && !f_worst.is_finite()
            {
                break;
            }
            let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf).collect();
            let worst = simplex[n].0.clone();
            let xr = combine(&centroid, &worst, -alpha, bounds);
            let Some(fr) = s.eval(xr.clone()) else { break 'outer };
            if fr < simplex[0].1 {
                let xe = combine(&centroid, &worst, -alpha * gamma, bounds);
                let Some(fe) = s.eval(xe.clone()) else { break 'outer };
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let outside = fr < simplex[n].1;
                let xc = if outside {
                    combine(&centroid, &xr, rho, bounds)
                } else {
                    combine(&centroid, &worst, rho, bounds)
                };
                let Some(fc) = s.eval(xc.clone()) else { break 'outer };
                if (outside && fc <= fr) || (!outside && fc < simplex[n].1) {
                    simplex[n] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    let shrunk: Vec<_> = simplex[1..].iter().map(|(x, _)| combine(&best, x, sigma, bounds)).collect();
                    let evaluated = s.eval_batch(shrunk);
                    if evaluated.len() < n {
                        break 'outer;
                    }
                    for (slot, v) in simplex[1..].iter_mut().zip(evaluated) {
                        *slot = v;
                    }
                }
            }
        }

        restarts += 1;
        centre = s.best.clone();
        centre_cost = s.best_cost;
        let spread = simplex
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&centre)
                    .enumerate()
                    .map(|(i, (a, b))| (a - b).abs() / bounds.width(i).max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        step = (spread * 10.0).clamp(1e-9, settings.initial_step);
    }

    if !s.best_cost.is_finite() {
        return Err(Error::OptimizerFailure(format!("no finite cost in {} evaluations", s.history.len())));
    }
    Ok(OptimResult {
        best: s.best,
        best_cost: s.best_cost,
        initial_cost,
        evaluations: s.history.len(),
        history: s.history,
        restarts,
    })
}
