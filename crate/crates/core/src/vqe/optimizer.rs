use std::f64::consts::{PI, TAU};

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::par::{self, ExecMode};
use crate::sim::{rng_stream, Purpose};

/// Local phase run after each surrogate proposal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalSearch {
    /// Poll `incumbent +- h e_i`; `h` shrinks by the refinement factor when
    /// no poll point improves.
    Pattern,
    /// Per-coordinate fit of `a0 + a1 cos + b1 sin + a2 cos2 + b2 sin2` from
    /// five samples, then a move to the fitted minimum if it improves. Exact
    /// for costs where each angle enters one rotation.
    Coordinate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_params: usize,
    /// Points per dimension of the initial lattice (used for `d <= 4`);
    /// `None` picks the largest count whose lattice fits a fifth of the budget.
    pub mesh_points: Option<usize>,
    /// Latin-hypercube size for `d > 4`; `None` uses `min(budget/5, 20 d)`.
    pub lhs_points: Option<usize>,
    pub refine_factor: f64,
    pub length_scale: f64,
    /// Expected-improvement offset.
    pub xi: f64,
    pub surrogate_points: usize,
    pub gp_max_points: usize,
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
    pub window: usize,
    /// Pattern step below which rounds without improvement count as stagnant.
    pub stagnation_step: f64,
    pub min_step: f64,
    pub local: LocalSearch,
    /// Extra starting points evaluated with the initial mesh.
    pub initial_points: Vec<Vec<f64>>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_params: 20,
            mesh_points: None,
            lhs_points: None,
            refine_factor: 0.5,
            length_scale: 1.0,
            xi: 0.01,
            surrogate_points: 1,
            gp_max_points: 128,
            budget: 500,
            seed: 0,
            tol: 1e-8,
            window: 5,
            stagnation_step: 1e-4,
            min_step: 1e-9,
            local: LocalSearch::Pattern,
            initial_points: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Mesh,
    Surrogate,
    Local,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub theta: Vec<f64>,
    /// `None` when the cost was out of its domain.
    pub value: Option<f64>,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub best_theta: Vec<f64>,
    pub best_value: f64,
    pub trace: Vec<TraceEntry>,
}

impl VqeResult {
    pub fn evaluations(&self) -> usize {
        self.trace.len()
    }

    /// Running minimum over the trace.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.trace
            .iter()
            .map(|t| {
                if let Some(v) = t.value {
                    best = best.min(v);
                }
                best
            })
            .collect()
    }
}

struct State<'a, F> {
    cost: &'a F,
    trace: Vec<TraceEntry>,
    best: Option<(Vec<f64>, f64)>,
    budget: usize,
    mode: ExecMode,
}

impl<F> State<'_, F>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    fn remaining(&self) -> usize {
        self.budget - self.trace.len()
    }

    /// Evaluates a batch (truncated to the budget) and updates the incumbent;
    /// returns the values in order.
    fn eval(&mut self, points: Vec<Vec<f64>>, source: Source) -> Result<Vec<Option<f64>>> {
        let n = points.len().min(self.remaining());
        let points: Vec<Vec<f64>> = points.into_iter().take(n).collect();
        let cost = self.cost;
        let vals = par::map(self.mode, &points, |p| match cost(p) {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            Ok(_) | Err(Error::OutOfDomain(_)) => Ok(None),
            Err(e) => Err(e),
        });
        let mut out = Vec::with_capacity(n);
        for (p, v) in points.into_iter().zip(vals) {
            let v = v?;
            if let Some(val) = v {
                if self.best.as_ref().is_none_or(|b| val < b.1) {
                    self.best = Some((p.clone(), val));
                }
            }
            self.trace.push(TraceEntry { theta: p, value: v, source });
            out.push(v);
        }
        Ok(out)
    }

    fn best_value(&self) -> f64 {
        self.best.as_ref().map(|b| b.1).unwrap_or(f64::INFINITY)
    }
}

fn lattice(d: usize, k: usize) -> Vec<Vec<f64>> {
    let total = k.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            (0..d)
                .map(|_| {
                    let j = idx % k;
                    idx /= k;
                    TAU * j as f64 / k as f64
                })
                .collect()
        })
        .collect()
}

fn latin_hypercube(d: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        cols.push(perm.into_iter().map(|s| TAU * (s as f64 + rng.random::<f64>()) / n as f64).collect());
    }
    (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

fn periodic_kernel(a: &[f64], b: &[f64], ell: f64) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (0.5 * (x - y)).sin().powi(2)).sum();
    (-2.0 * s / (ell * ell)).exp()
}

/// Gaussian-process posterior on normalized targets.
struct Surrogate {
    xs: Vec<Vec<f64>>,
    alpha: DVector<f64>,
    chol: Cholesky<f64, nalgebra::Dyn>,
    mean: f64,
    scale: f64,
    ell: f64,
}

impl Surrogate {
    fn fit(points: &[(Vec<f64>, f64)], ell: f64) -> Option<Surrogate> {
        let n = points.len();
        if n < 2 {
            return None;
        }
        let mean = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let var = points.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / n as f64;
        let scale = var.sqrt().max(1e-12);
        let y = DVector::from_iterator(n, points.iter().map(|p| (p.1 - mean) / scale));
        let mut jitter = 1e-8;
        loop {
            let k = DMatrix::from_fn(n, n, |i, j| {
                periodic_kernel(&points[i].0, &points[j].0, ell) + if i == j { jitter } else { 0.0 }
            });
            if let Some(chol) = Cholesky::new(k) {
                let alpha = chol.solve(&y);
                return Some(Surrogate {
                    xs: points.iter().map(|p| p.0.clone()).collect(),
                    alpha,
                    chol,
                    mean,
                    scale,
                    ell,
                });
            }
            jitter *= 100.0;
            if jitter > 1e-1 {
                return None;
            }
        }
    }

    /// Posterior mean and standard deviation in original units.
    fn predict(&self, x: &[f64]) -> (f64, f64) {
        let ks = DVector::from_iterator(self.xs.len(), self.xs.iter().map(|p| periodic_kernel(p, x, self.ell)));
        let mu = ks.dot(&self.alpha);
        let v = self.chol.l().solve_lower_triangular(&ks).unwrap_or_else(|| DVector::zeros(ks.len()));
        let var = (1.0 - v.dot(&v)).max(0.0);
        (self.mean + self.scale * mu, self.scale * var.sqrt())
    }
}

fn expected_improvement(mu: f64, sigma: f64, best: f64, xi: f64, normal: &Normal) -> f64 {
    let imp = best - mu - xi;
    if sigma <= 1e-15 {
        return imp.max(0.0);
    }
    let z = imp / sigma;
    imp * normal.cdf(z) + sigma * normal.pdf(z)
}

fn training_set(trace: &[TraceEntry], max: usize) -> Vec<(Vec<f64>, f64)> {
    let valid: Vec<(usize, f64)> = trace
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.value.map(|v| (i, v)))
        .collect();
    let mut by_value = valid.clone();
    by_value.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let n_best = max * 3 / 4;
    let mut chosen: Vec<usize> = by_value.iter().take(n_best).map(|p| p.0).collect();
    for &(i, _) in valid.iter().rev() {
        if chosen.len() >= max {
            break;
        }
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    chosen.into_iter().map(|i| (trace[i].theta.clone(), trace[i].value.unwrap())).collect()
}

fn wrap(v: f64) -> f64 {
    v.rem_euclid(TAU)
}

/// Five-point trigonometric fit of degree two; returns the argmin offset.
fn trig_argmin(values: &[f64; 5]) -> f64 {
    let mut c = [0.0; 5];
    for (j, &v) in values.iter().enumerate() {
        let t = TAU * j as f64 / 5.0;
        c[0] += v / 5.0;
        c[1] += 2.0 * v * t.cos() / 5.0;
        c[2] += 2.0 * v * t.sin() / 5.0;
        c[3] += 2.0 * v * (2.0 * t).cos() / 5.0;
        c[4] += 2.0 * v * (2.0 * t).sin() / 5.0;
    }
    let f = |t: f64| c[1] * t.cos() + c[2] * t.sin() + c[3] * (2.0 * t).cos() + c[4] * (2.0 * t).sin();
    let df = |t: f64| -c[1] * t.sin() + c[2] * t.cos() - 2.0 * c[3] * (2.0 * t).sin() + 2.0 * c[4] * (2.0 * t).cos();
    let d2f = |t: f64| -c[1] * t.cos() - c[2] * t.sin() - 4.0 * c[3] * (2.0 * t).cos() - 4.0 * c[4] * (2.0 * t).sin();
    let grid = 720;
    let mut best = (0.0, f(0.0));
    for i in 1..grid {
        let t = TAU * i as f64 / grid as f64;
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let mut t = best.0;
    for _ in 0..20 {
        let h = d2f(t);
        if h <= 0.0 {
            break;
        }
        let step = df(t) / h;
        t -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    if f(t) <= best.1 {
        t
    } else {
        best.0
    }
}

/// Coordinate pass: for each angle, sample four offsets, fit, move if better.
fn coordinate_pass<F>(st: &mut State<'_, F>, d: usize) -> Result<()>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    for i in 0..d {
        if st.remaining() < 5 {
            return Ok(());
        }
        let Some((x0, v0)) = st.best.clone() else {
            return Ok(());
        };
        let pts: Vec<Vec<f64>> = (1..5)
            .map(|j| {
                let mut p = x0.clone();
                p[i] = wrap(p[i] + TAU * j as f64 / 5.0);
                p
            })
            .collect();
        let vals = st.eval(pts, Source::Local)?;
        if vals.iter().any(|v| v.is_none()) {
            continue;
        }
        let samples = [v0, vals[0].unwrap(), vals[1].unwrap(), vals[2].unwrap(), vals[3].unwrap()];
        let t = trig_argmin(&samples);
        let mut p = x0.clone();
        p[i] = wrap(p[i] + t);
        st.eval(vec![p], Source::Local)?;
    }
    Ok(())
}

/// Grid + Gaussian-process minimization of `cost` over `[0, 2pi)^d`.
///
/// The initial lattice (or Latin hypercube) is evaluated first. Each round
/// then proposes `surrogate_points` maximizers of expected improvement under a
/// periodic-kernel GP fitted to the best and most recent evaluations, and runs
/// the local phase around the incumbent. Stops on budget, on `window` rounds
/// without improvement above `tol` (pattern rounds count only once the step
/// is below `stagnation_step`), or when the pattern step falls below
/// `min_step`. Points where the cost is out of domain are recorded with no
/// value.
pub fn optimize<F>(d: usize, cost: F, config: &OptimizerConfig, mode: ExecMode) -> Result<VqeResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if d > config.max_params {
        return Err(Error::Parameter(format!("{d} parameters exceed the limit of {}", config.max_params)));
    }
    if config.budget == 0 {
        return Err(Error::Parameter("budget must be positive".into()));
    }
    for p in &config.initial_points {
        if p.len() != d {
            return Err(Error::Dimension { expected: d, actual: p.len() });
        }
    }
    let mut st = State { cost: &cost, trace: Vec::new(), best: None, budget: config.budget, mode };
    if d == 0 {
        st.eval(vec![vec![]], Source::Mesh)?;
        return finish(st);
    }
    let mut rng = rng_stream(config.seed, Purpose::Optimizer, 0, 0, 0);
    let (mut init, mut step) = if d <= 4 {
        let k = config.mesh_points.unwrap_or_else(|| {
            let cap = (config.budget / 5).max(2usize.pow(d as u32));
            (2..=16).rev().find(|k: &usize| k.pow(d as u32) <= cap).unwrap_or(2)
        });
        (lattice(d, k.max(1)), PI / k.max(1) as f64)
    } else {
        let n = config.lhs_points.unwrap_or((config.budget / 5).min(20 * d)).max(1);
        (latin_hypercube(d, n, &mut rng), PI / 4.0)
    };
    let mut initial: Vec<Vec<f64>> = config.initial_points.iter().map(|p| p.iter().map(|&v| wrap(v)).collect()).collect();
    initial.append(&mut init);
    st.eval(initial, Source::Mesh)?;

    let normal = Normal::standard();
    let mut stall = 0usize;
    let mut round = 0u64;
    while st.remaining() > 0 {
        round += 1;
        let before = st.best_value();
        // surrogate proposals
        let train = training_set(&st.trace, config.gp_max_points);
        if let (Some(gp), Some((inc, _))) = (Surrogate::fit(&train, config.length_scale), st.best.clone()) {
            let mut cand_rng = rng_stream(config.seed, Purpose::Optimizer, round, 1, 0);
            let mut cands: Vec<Vec<f64>> = Vec::with_capacity(1024);
            for _ in 0..512 {
                cands.push((0..d).map(|_| cand_rng.random::<f64>() * TAU).collect());
            }
            for _ in 0..512 {
                cands.push(
                    inc.iter()
                        .map(|&v| {
                            // Box-Muller with the current pattern step as width
                            let u1: f64 = cand_rng.random::<f64>().max(1e-300);
                            let u2: f64 = cand_rng.random();
                            wrap(v + step * (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos())
                        })
                        .collect(),
                );
            }
            let best = st.best_value();
            let scores = par::map(mode, &cands, |c| {
                let (mu, sd) = gp.predict(c);
                expected_improvement(mu, sd, best, config.xi * gp.scale, &normal)
            });
            let mut order: Vec<usize> = (0..cands.len()).collect();
            order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
            let picks: Vec<Vec<f64>> = order.into_iter().take(config.surrogate_points).map(|i| cands[i].clone()).collect();
            st.eval(picks, Source::Surrogate)?;
        }
        if st.remaining() == 0 {
            break;
        }
        // local phase around the incumbent
        match config.local {
            LocalSearch::Pattern => {
                let Some((inc, inc_v)) = st.best.clone() else { break };
                let mut polls = Vec::with_capacity(2 * d);
                for i in 0..d {
                    for s in [1.0, -1.0] {
                        let mut p = inc.clone();
                        p[i] = wrap(p[i] + s * step);
                        polls.push(p);
                    }
                }
                st.eval(polls, Source::Local)?;
                if st.best_value() >= inc_v {
                    step *= config.refine_factor;
                }
            }
            LocalSearch::Coordinate => coordinate_pass(&mut st, d)?,
        }
        let improved = before - st.best_value() > config.tol;
        let counts = match config.local {
            LocalSearch::Pattern => step <= config.stagnation_step,
            LocalSearch::Coordinate => true,
        };
        if improved {
            stall = 0;
        } else if counts {
            stall += 1;
        }
        if stall >= config.window || step < config.min_step {
            break;
        }
    }
    finish(st)
}

fn finish<F>(st: State<'_, F>) -> Result<VqeResult> {
    let (best_theta, best_value) = st
        .best
        .ok_or_else(|| Error::OutOfDomain("no evaluation inside the cost domain".into()))?;
    Ok(VqeResult { best_theta, best_value, trace: st.trace })
}

/// Sequential per-angle sinusoid minimization for many parameters: `sweeps`
/// passes over all angles starting from `init`, or until a pass improves by
/// less than `tol`.
pub fn sinusoid_sweep<F>(cost: F, init: &[f64], sweeps: usize, tol: f64, mode: ExecMode) -> Result<VqeResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let d = init.len();
    let mut st = State { cost: &cost, trace: Vec::new(), best: None, budget: usize::MAX, mode };
    st.eval(vec![init.to_vec()], Source::Mesh)?;
    for _ in 0..sweeps {
        let before = st.best_value();
        coordinate_pass(&mut st, d)?;
        if before - st.best_value() < tol {
            break;
        }
    }
    finish(st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_minimum_at_pi() {
        let r = optimize(1, |t: &[f64]| Ok(t[0].cos()), &OptimizerConfig::default(), ExecMode::Sequential).unwrap();
        assert!((r.best_theta[0] - PI).abs() < 1e-3, "{:?}", r.best_theta);
        assert!(r.trace.len() <= 500);
    }

    #[test]
    fn budget_respected_and_monotone() {
        let cfg = OptimizerConfig { budget: 37, ..Default::default() };
        let f = |t: &[f64]| Ok((t[0] - 1.0).sin() + (2.0 * t[1]).cos() + t[2].sin());
        let r = optimize(3, f, &cfg, ExecMode::Parallel).unwrap();
        assert!(r.trace.len() <= 37);
        let b = r.best_so_far();
        assert!(b.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*b.last().unwrap(), r.best_value);
    }

    #[test]
    fn too_many_parameters_rejected() {
        let r = optimize(21, |_: &[f64]| Ok(0.0), &OptimizerConfig::default(), ExecMode::Sequential);
        assert!(matches!(r, Err(Error::Parameter(_))));
    }

    #[test]
    fn trig_fit_is_exact() {
        let f = |t: f64| 0.3 + 0.7 * (t - 0.4).cos() - 0.2 * (2.0 * t + 1.0).sin();
        let samples = [f(0.0), f(TAU / 5.0), f(2.0 * TAU / 5.0), f(3.0 * TAU / 5.0), f(4.0 * TAU / 5.0)];
        let t = trig_argmin(&samples);
        for k in 0..1000 {
            assert!(f(t) <= f(TAU * k as f64 / 1000.0) + 1e-12);
        }
    }

    #[test]
    fn coordinate_mode_reaches_minimum() {
        let cfg = OptimizerConfig { local: LocalSearch::Coordinate, budget: 2000, ..Default::default() };
        let f = |t: &[f64]| Ok(t.iter().enumerate().map(|(i, v)| (v - i as f64 * 0.3).cos()).sum::<f64>());
        let r = optimize(6, f, &cfg, ExecMode::Sequential).unwrap();
        assert!((r.best_value + 6.0).abs() < 1e-10, "{}", r.best_value);
    }
}
