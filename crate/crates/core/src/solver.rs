//! Multistart search for a subspace `V` with `f(V) = 0`, where `f` compares
//! a quantity on `V` with the same quantity on `V⊥`.
//!
//! Each start draws a random frame and works in the chart
//! `X ↦ orth(F + G·X)` around it (`G` spans the complement of `F`). A compass
//! search on `‖f‖` gets close; a Levenberg–Marquardt phase on finite-difference
//! Jacobians then drives the residual to roundoff level. The functionals are
//! only piecewise smooth, so the compass phase is what makes kinks survivable.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    functional_vector, inertia_vector, ConvexBody, Functional, GrassmannFrame, PointCloud,
    SectionBody,
};

pub const DEFAULT_SEED: u64 = 20_240_617;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub starts: usize,
    pub tol: f64,
    /// Compass iterations per start.
    pub max_iters: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub shrink: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 64,
            tol: 1e-8,
            max_iters: 5000,
            seed: DEFAULT_SEED,
            initial_step: 0.5,
            shrink: 0.5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidInput("starts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if !(self.initial_step > 0.0) || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidInput("step schedule needs step > 0 and 0 < shrink < 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub frame: GrassmannFrame,
    /// `‖f‖` recomputed at `frame`.
    pub residual: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub starts_used: usize,
    /// Index of the start that produced `frame`.
    pub best_start: usize,
    /// Cases where the existence guarantee does not cover the request.
    pub warnings: Vec<String>,
}

/// Orthonormalized standard-normal `dim × n` matrix.
pub fn random_frame<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> GrassmannFrame {
    loop {
        let m = DMatrix::from_fn(dim, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Ok(f) = GrassmannFrame::orthonormalize(&m) {
            return f;
        }
    }
}

/// Independent stream for start `index` under `seed`.
pub fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct Chart<'a, F> {
    base: GrassmannFrame,
    normal: DMatrix<f64>,
    objective: &'a F,
    evaluations: usize,
}

#[derive(Clone)]
struct Point {
    x: DVector<f64>,
    values: Vec<f64>,
    residual: f64,
}

impl<'a, F> Chart<'a, F>
where
    F: Fn(&GrassmannFrame) -> Result<Vec<f64>>,
{
    fn new(base: GrassmannFrame, objective: &'a F) -> Self {
        let normal = base.complement().columns().clone();
        Chart { base, normal, objective, evaluations: 0 }
    }

    fn params(&self) -> usize {
        self.normal.ncols() * self.base.n()
    }

    fn frame(&self, x: &DVector<f64>) -> Option<GrassmannFrame> {
        let k = self.normal.ncols();
        let xm = DMatrix::from_column_slice(k, self.base.n(), x.as_slice());
        GrassmannFrame::orthonormalize(&(self.base.columns() + &self.normal * xm)).ok()
    }

    fn eval(&mut self, x: DVector<f64>) -> Point {
        self.evaluations += 1;
        let values = self
            .frame(&x)
            .and_then(|f| (self.objective)(&f).ok())
            .filter(|v| v.iter().all(|y| y.is_finite()));
        match values {
            Some(values) => {
                let residual = values.iter().map(|y| y * y).sum::<f64>().sqrt();
                Point { x, values, residual }
            }
            None => Point { x, values: Vec::new(), residual: f64::INFINITY },
        }
    }

    /// Moves the chart centre to `p`, returning the same point at `x = 0`.
    fn recentre(&mut self, p: Point) -> Point {
        if p.x.iter().all(|&v| v == 0.0) {
            return p;
        }
        if let Some(f) = self.frame(&p.x) {
            self.normal = f.complement().columns().clone();
            self.base = f;
        }
        let zero = DVector::zeros(self.params());
        self.eval(zero)
    }
}

/// Compass search from `cur` until the step falls below `min_step`.
fn compass<F>(chart: &mut Chart<'_, F>, mut cur: Point, step: f64, min_step: f64, cfg: &SolverConfig, budget: &mut usize) -> Point
where
    F: Fn(&GrassmannFrame) -> Result<Vec<f64>>,
{
    let p = chart.params();
    let mut h = step;
    while h >= min_step && *budget > 0 && cur.residual >= cfg.tol * 1e-2 {
        *budget -= 1;
        let mut improved = false;
        'dirs: for j in 0..p {
            for s in [1.0, -1.0] {
                let mut x = cur.x.clone();
                x[j] += s * h;
                let cand = chart.eval(x);
                if cand.residual < cur.residual {
                    cur = cand;
                    improved = true;
                    break 'dirs;
                }
            }
        }
        if !improved {
            h *= cfg.shrink;
        } else if cur.x.amax() > 0.5 {
            cur = chart.recentre(cur);
        }
    }
    cur
}

/// Levenberg–Marquardt with central-difference Jacobians, taking the
/// minimum-norm step `−Jᵀ(JJᵀ + μI)⁻¹f` so under-determined systems work.
fn refine<F>(chart: &mut Chart<'_, F>, mut cur: Point) -> Point
where
    F: Fn(&GrassmannFrame) -> Result<Vec<f64>>,
{
    const DELTA: f64 = 1e-6;
    let mut mu = 1e-6;
    for _ in 0..100 {
        if !cur.residual.is_finite() || cur.residual < 1e-15 {
            break;
        }
        cur = chart.recentre(cur);
        let (m, p) = (cur.values.len(), chart.params());
        let mut jac = DMatrix::zeros(m, p);
        let mut ok = true;
        for j in 0..p {
            let mut xp = DVector::zeros(p);
            xp[j] = DELTA;
            let fp = chart.eval(xp.clone());
            let fm = chart.eval(-xp);
            if fp.values.len() != m || fm.values.len() != m {
                ok = false;
                break;
            }
            for i in 0..m {
                jac[(i, j)] = (fp.values[i] - fm.values[i]) / (2.0 * DELTA);
            }
        }
        if !ok {
            break;
        }
        let f = DVector::from_column_slice(&cur.values);
        let jjt = &jac * jac.transpose();
        let mut accepted = false;
        while mu < 1e8 {
            let sys = &jjt + DMatrix::identity(m, m) * (mu * (1.0 + jjt.diagonal().amax()));
            let Some(y) = sys.cholesky().map(|c| c.solve(&f)) else {
                mu *= 10.0;
                continue;
            };
            let step = -(jac.transpose() * y);
            let cand = chart.eval(step);
            if cand.residual < cur.residual {
                cur = cand;
                mu = (mu / 10.0).max(1e-12);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    cur
}

fn run_start<F>(dim: usize, n: usize, objective: &F, cfg: &SolverConfig, index: usize) -> (GrassmannFrame, f64, usize)
where
    F: Fn(&GrassmannFrame) -> Result<Vec<f64>>,
{
    let mut rng = start_rng(cfg.seed, index);
    let mut chart = Chart::new(random_frame(dim, n, &mut rng), objective);
    let zero = DVector::zeros(chart.params());
    let mut cur = chart.eval(zero);
    let mut budget = cfg.max_iters;
    let mut step = cfg.initial_step;
    // alternate: coarse compass, then Newton-type polish; retry the compass
    // at a finer scale if the polish stalls on a kink
    for _ in 0..4 {
        cur = compass(&mut chart, cur, step, 1e-2 * step, cfg, &mut budget);
        cur = refine(&mut chart, cur);
        if cur.residual < cfg.tol * 1e-3 || budget == 0 {
            break;
        }
        step *= 1e-2;
    }
    let frame = chart.frame(&cur.x).unwrap_or_else(|| chart.base.clone());
    (frame, cur.residual, chart.evaluations)
}

/// Starts run in parallel batches of this size; the search stops after the
/// first batch containing a converged start. A fixed size keeps the result
/// independent of the thread count.
pub const START_BATCH: usize = 8;

/// Minimizes `‖objective‖` over `n`-planes in `R^dim` from up to
/// `cfg.starts` random starts. The best start wins (lowest index on ties),
/// and its residual is recomputed from the returned frame.
pub fn minimize<F>(dim: usize, n: usize, objective: F, cfg: &SolverConfig) -> Result<SolverResult>
where
    F: Fn(&GrassmannFrame) -> Result<Vec<f64>> + Sync,
{
    cfg.validate()?;
    if n == 0 || n >= dim {
        return Err(Error::InvalidInput(format!("need 0 < n < dim, got n={n}, dim={dim}")));
    }
    let mut runs: Vec<(GrassmannFrame, f64, usize)> = Vec::with_capacity(cfg.starts);
    while runs.len() < cfg.starts {
        let end = (runs.len() + START_BATCH).min(cfg.starts);
        let batch: Vec<_> = (runs.len()..end)
            .into_par_iter()
            .map(|i| run_start(dim, n, &objective, cfg, i))
            .collect();
        runs.extend(batch);
        if runs.iter().any(|r| r.1 < cfg.tol) {
            break;
        }
    }
    let evaluations = runs.iter().map(|r| r.2).sum();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.1 < runs[best].1 {
            best = i;
        }
    }
    let frame = runs[best].0.clone();
    let residual = objective(&frame)?.iter().map(|y| y * y).sum::<f64>().sqrt();
    Ok(SolverResult {
        frame,
        residual,
        evaluations,
        converged: residual < cfg.tol,
        starts_used: runs.len(),
        best_start: best,
        warnings: Vec::new(),
    })
}

fn planar_preconditions(c: &ConvexBody, selection: &[Functional]) -> Result<Vec<String>> {
    if c.dimension() != 4 {
        return Err(Error::InvalidInput(format!(
            "shadow and section solvers work in R^4, got R^{}",
            c.dimension()
        )));
    }
    if selection.is_empty() {
        return Err(Error::InvalidInput("empty functional selection".into()));
    }
    let mut warnings = Vec::new();
    // n = 2 = 2^1 (2·0 + 1): the guarantee covers 2^2 − 1 = 3 functionals
    if selection.len() > 3 {
        warnings.push(format!(
            "{} functionals exceed the 3 for which a solution is guaranteed in R^4",
            selection.len()
        ));
    }
    Ok(warnings)
}

/// A 2-plane `V ⊂ R^4` whose shadow and the shadow on `V⊥` agree in every
/// selected functional.
pub fn solve_equal_shadows(c: &ConvexBody, selection: &[Functional], cfg: &SolverConfig) -> Result<SolverResult> {
    let warnings = planar_preconditions(c, selection)?;
    let mut r = minimize(4, 2, |f: &GrassmannFrame| functional_vector(c, f, selection), cfg)?;
    r.warnings = warnings;
    Ok(r)
}

/// As [`solve_equal_shadows`] with central sections `C ∩ V`, `C ∩ V⊥`.
pub fn solve_sections(c: &ConvexBody, selection: &[Functional], cfg: &SolverConfig) -> Result<SolverResult> {
    let warnings = planar_preconditions(c, selection)?;
    let body = SectionBody::new(c)?;
    let mut r = minimize(4, 2, |f: &GrassmannFrame| body.functional_vector(f, selection), cfg)?;
    r.warnings = warnings;
    Ok(r)
}

/// A half-dimensional `V` for which the projected inertia tensors on `V` and
/// `V⊥` have the same characteristic polynomial.
pub fn solve_inertia_split(points: &PointCloud, cfg: &SolverConfig) -> Result<SolverResult> {
    let dim = points.dimension();
    if dim < 2 || dim % 2 == 1 {
        return Err(Error::InvalidInput(format!("inertia split needs even dimension, got {dim}")));
    }
    let n = dim / 2;
    let mut warnings = Vec::new();
    if !n.is_power_of_two() {
        warnings.push(format!("n = {n} is not a power of two; no solution is guaranteed"));
    }
    let mut r = minimize(dim, n, |f: &GrassmannFrame| inertia_vector(points, f), cfg)?;
    r.warnings = warnings;
    Ok(r)
}
