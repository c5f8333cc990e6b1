//! Fixed-step integration of initial value problems with any [`Tableau`].
//!
//! Each step evaluates
//! `y_n = -sum_{j>=1} alpha_j y_{n-j} + h sum_{j>=1} beta_j f_{n-j} + h beta_0 f(t_n, y_n)`;
//! when `beta_0 != 0` the last term makes the step implicit and `y_n` is found
//! by Newton's method. The first `k - 1` values after `y_0` come from a
//! starter: the exact solution when the problem has one, or classical RK4.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::analysis::order_report;
use crate::error::{Error, Result};
use crate::tableau::Tableau;

pub type RhsFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(f64, &[f64]) -> DMatrix<f64> + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// States whose magnitude exceeds this end the run as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e12;
pub const MAX_STEPS: usize = 10_000_000;
pub const MAX_STARTER_COUNT: usize = 11;

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stiffness {
    Nonstiff,
    Stiff,
}

impl fmt::Display for Stiffness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stiffness::Nonstiff => "nonstiff",
            Stiffness::Stiff => "stiff",
        })
    }
}

/// `y' = f(t, y)`, `y(t0) = y0`.
#[derive(Clone)]
pub struct IVProblem {
    pub name: String,
    pub t0: f64,
    pub y0: Vec<f64>,
    pub f: RhsFn,
    pub jacobian: Option<JacobianFn>,
    pub exact: Option<ExactFn>,
    pub stiffness: Stiffness,
}

impl fmt::Debug for IVProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IVProblem")
            .field("name", &self.name)
            .field("t0", &self.t0)
            .field("y0", &self.y0)
            .field("has_jacobian", &self.jacobian.is_some())
            .field("has_exact", &self.exact.is_some())
            .field("stiffness", &self.stiffness)
            .finish()
    }
}

impl IVProblem {
    pub fn new(
        name: impl Into<String>,
        t0: f64,
        y0: Vec<f64>,
        f: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            t0,
            y0,
            f: Arc::new(f),
            jacobian: None,
            exact: None,
            stiffness: Stiffness::Nonstiff,
        }
    }

    pub fn with_jacobian(
        mut self,
        jac: impl Fn(f64, &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    pub fn with_exact(mut self, exact: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn with_stiffness(mut self, stiffness: Stiffness) -> Self {
        self.stiffness = stiffness;
        self
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }

    pub fn rhs(&self, t: f64, y: &[f64]) -> Vec<f64> {
        (self.f)(t, y)
    }

    pub fn exact_at(&self, t: f64) -> Option<Vec<f64>> {
        self.exact.as_ref().map(|e| e(t))
    }

    /// Analytic Jacobian if provided, else forward differences with increment
    /// `1e-8 (1 + |y_i|)`. `fy` must be `f(t, y)`.
    fn jacobian_at(&self, t: f64, y: &[f64], fy: &[f64]) -> DMatrix<f64> {
        if let Some(jac) = &self.jacobian {
            return jac(t, y);
        }
        let d = y.len();
        let mut jac = DMatrix::zeros(d, d);
        let mut shifted = y.to_vec();
        for col in 0..d {
            let delta = 1e-8 * (1.0 + y[col].abs());
            shifted[col] = y[col] + delta;
            let f_shift = self.rhs(t, &shifted);
            for row in 0..d {
                jac[(row, col)] = (f_shift[row] - fy[row]) / delta;
            }
            shifted[col] = y[col];
        }
        jac
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Starter {
    /// Starting values from the problem's exact solution.
    Exact,
    /// Classical RK4, substepped at `h/4` for methods of order above 4.
    Rk4,
}

impl fmt::Display for Starter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Starter::Exact => "exact",
            Starter::Rk4 => "rk4",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    pub h: f64,
    pub t_end: f64,
    pub starter: Starter,
    /// Newton stops once `|residual|_inf <= newton_tol * max(1, |y|_inf)`.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl SolveConfig {
    pub fn new(h: f64, t_end: f64) -> Self {
        Self {
            h,
            t_end,
            starter: Starter::Rk4,
            newton_tol: 1e-12,
            newton_max_iter: 25,
        }
    }

    pub fn with_starter(mut self, starter: Starter) -> Self {
        self.starter = starter;
        self
    }

    /// Number of steps from `t0` to `t_end`.
    fn step_count(&self, t0: f64) -> Result<usize> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!(
                "step size must be positive, got {}",
                self.h
            )));
        }
        if self.t_end.is_nan() || self.t_end <= t0 {
            return Err(Error::Config(format!(
                "t_end = {} must exceed t0 = {t0}",
                self.t_end
            )));
        }
        if self.newton_tol.is_nan() || self.newton_tol <= 0.0 || self.newton_max_iter == 0 {
            return Err(Error::Config(
                "Newton tolerance and iteration cap must be positive".into(),
            ));
        }
        let ratio = (self.t_end - t0) / self.h;
        let nearest = ratio.round();
        let n = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            nearest
        } else {
            ratio.ceil()
        };
        if n > MAX_STEPS as f64 {
            return Err(Error::Config(format!(
                "{n} steps exceeds the cap of {MAX_STEPS}"
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunMeta {
    pub method: String,
    pub h: f64,
    pub starter: Starter,
    /// Newton iterations per trajectory point (0 for starting values and explicit steps).
    pub newton_iterations: Vec<usize>,
    pub diverged: bool,
}

/// Uniformly spaced solution values `(t_n, y_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub meta: RunMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds y0")
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds y0")
    }

    /// Max-norm error against the exact solution at the final time.
    pub fn final_error(&self, p: &IVProblem) -> Option<f64> {
        let exact = p.exact_at(self.final_time())?;
        Some(max_abs_diff(self.final_state(), &exact))
    }

    /// CSV with header `t,y0,y1,...`.
    pub fn to_csv(&self) -> String {
        let dim = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 0..dim {
            out.push_str(&format!(",y{i}"));
        }
        out.push('\n');
        for (t, y) in self.times.iter().zip(&self.states) {
            out.push_str(&format_float(*t));
            for v in y {
                out.push(',');
                out.push_str(&format_float(*v));
            }
            out.push('\n');
        }
        out
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn rk4_step(p: &IVProblem, t: f64, y: &[f64], h: f64) -> Vec<f64> {
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> {
        y.iter().zip(k).map(|(yi, ki)| yi + a * ki).collect()
    };
    let k1 = p.rhs(t, y);
    let k2 = p.rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = p.rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = p.rhs(t + h, &axpy(y, h, &k3));
    (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// RK4 values `y_1..y_count` at `t0 + i h`.
pub fn rk4_starter(p: &IVProblem, h: f64, count: usize) -> Result<Vec<Vec<f64>>> {
    rk4_starter_substepped(p, h, count, 1)
}

/// As [`rk4_starter`], taking `substeps` RK4 steps of size `h / substeps` per value.
pub fn rk4_starter_substepped(
    p: &IVProblem,
    h: f64,
    count: usize,
    substeps: usize,
) -> Result<Vec<Vec<f64>>> {
    if count > MAX_STARTER_COUNT {
        return Err(Error::Domain(format!(
            "at most {MAX_STARTER_COUNT} starting values, requested {count}"
        )));
    }
    if substeps == 0 {
        return Err(Error::Domain("substeps must be positive".into()));
    }
    let sub_h = h / substeps as f64;
    let mut y = p.y0.clone();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let t_start = p.t0 + i as f64 * h;
        for s in 0..substeps {
            y = rk4_step(p, t_start + s as f64 * sub_h, &y, sub_h);
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub state: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `y - h beta_0 f(t_n, y) = rhs` by Newton's method from `guess`.
#[allow(clippy::too_many_arguments)]
fn newton_core(
    p: &IVProblem,
    t_n: f64,
    h_beta0: f64,
    rhs: &[f64],
    guess: Vec<f64>,
    cfg: &SolveConfig,
    step: usize,
) -> Result<NewtonOutcome> {
    let d = rhs.len();
    let mut y = guess;
    let mut residual = f64::INFINITY;
    for iterations in 0..=cfg.newton_max_iter {
        let fy = p.rhs(t_n, &y);
        let r: Vec<f64> = (0..d).map(|i| y[i] - h_beta0 * fy[i] - rhs[i]).collect();
        residual = max_abs(&r);
        if !residual.is_finite() {
            break;
        }
        if residual <= cfg.newton_tol * max_abs(&y).max(1.0) {
            return Ok(NewtonOutcome {
                state: y,
                iterations,
                residual,
            });
        }
        if iterations == cfg.newton_max_iter {
            break;
        }
        let jac = DMatrix::identity(d, d) - p.jacobian_at(t_n, &y, &fy) * h_beta0;
        let neg_r = DVector::from_iterator(d, r.iter().map(|v| -v));
        let delta = jac.lu().solve(&neg_r).ok_or_else(|| Error::Step {
            step,
            residual,
            reason: "singular Newton matrix".into(),
        })?;
        for (yi, di) in y.iter_mut().zip(delta.iter()) {
            *yi += di;
        }
    }
    Err(Error::Step {
        step,
        residual,
        reason: format!(
            "Newton iteration did not converge within {} iterations",
            cfg.newton_max_iter
        ),
    })
}

/// Known part of a step, `-sum_{j>=1} alpha_j y_{n-j} + h sum_{j>=1} beta_j f_{n-j}`,
/// and the explicit predictor, which rescales the `beta_j, j >= 1` so they sum
/// to `sum beta` (this keeps the predictor consistent).
struct StepParts {
    known: Vec<f64>,
    predictor: Vec<f64>,
}

fn step_parts(
    alphas: &[f64],
    betas: &[f64],
    h: f64,
    past_y: &[&[f64]],
    past_f: &[&[f64]],
) -> StepParts {
    let d = past_y[0].len();
    let explicit_beta_sum: f64 = betas[1..].iter().sum();
    let total_beta_sum: f64 = betas.iter().sum();
    let predictor_scale = if explicit_beta_sum.abs() > 1e-14 {
        total_beta_sum / explicit_beta_sum
    } else {
        1.0
    };
    let mut y_part = vec![0.0; d];
    let mut f_part = vec![0.0; d];
    for j in 1..alphas.len() {
        for i in 0..d {
            y_part[i] -= alphas[j] * past_y[j - 1][i];
            f_part[i] += h * betas[j] * past_f[j - 1][i];
        }
    }
    StepParts {
        known: (0..d).map(|i| y_part[i] + f_part[i]).collect(),
        predictor: (0..d)
            .map(|i| y_part[i] + predictor_scale * f_part[i])
            .collect(),
    }
}

/// One implicit step from `history = [y_{n-1}, ..., y_{n-k}]` at times
/// `t_n - h, ..., t_n - k h`.
pub fn newton_solve_step(
    t: &Tableau,
    p: &IVProblem,
    history: &[Vec<f64>],
    t_n: f64,
    cfg: &SolveConfig,
) -> Result<NewtonOutcome> {
    if t.is_explicit() {
        return Err(Error::Usage(format!(
            "{} is explicit; no Newton solve is needed",
            t.name()
        )));
    }
    if history.len() != t.k() {
        return Err(Error::Domain(format!(
            "{} needs {} past states, got {}",
            t.name(),
            t.k(),
            history.len()
        )));
    }
    let h = cfg.h;
    let fs: Vec<Vec<f64>> = history
        .iter()
        .enumerate()
        .map(|(j, y)| p.rhs(t_n - (j + 1) as f64 * h, y))
        .collect();
    let ys: Vec<&[f64]> = history.iter().map(Vec::as_slice).collect();
    let fr: Vec<&[f64]> = fs.iter().map(Vec::as_slice).collect();
    let betas = t.betas_f64();
    let parts = step_parts(&t.alphas_f64(), &betas, h, &ys, &fr);
    newton_core(p, t_n, h * betas[0], &parts.known, parts.predictor, cfg, 0)
}

/// Integrates `p` from `t0` to `cfg.t_end` with fixed step `cfg.h`.
///
/// A state exceeding [`DIVERGENCE_LIMIT`] (or turning non-finite) ends the run
/// early with `meta.diverged` set; the partial trajectory, including that
/// state, is returned.
pub fn solve_fixed_step(t: &Tableau, p: &IVProblem, cfg: &SolveConfig) -> Result<Trajectory> {
    let n_steps = cfg.step_count(p.t0)?;
    let k = t.k();
    let h = cfg.h;
    let dim = p.dimension();
    if dim == 0 {
        return Err(Error::Config("problem has an empty state".into()));
    }

    let n_start = k.min(n_steps + 1);
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(n_steps + 1);
    states.push(p.y0.clone());
    match cfg.starter {
        Starter::Exact => {
            let exact = p.exact.as_ref().ok_or_else(|| {
                Error::Config(format!(
                    "problem {:?} has no exact solution for the exact starter",
                    p.name
                ))
            })?;
            states.extend((1..n_start).map(|i| exact(p.t0 + i as f64 * h)));
        }
        Starter::Rk4 => {
            let substeps = match order_report(t) {
                Ok(r) if r.order > 4 => 4,
                _ => 1,
            };
            states.extend(rk4_starter_substepped(p, h, n_start - 1, substeps)?);
        }
    }
    let time = |n: usize| p.t0 + n as f64 * h;
    let mut times: Vec<f64> = (0..states.len()).map(time).collect();
    let mut fs: Vec<Vec<f64>> = states
        .iter()
        .enumerate()
        .map(|(n, y)| p.rhs(time(n), y))
        .collect();
    if fs[0].len() != dim {
        return Err(Error::Config(format!(
            "f returns {} components for a {dim}-dimensional state",
            fs[0].len()
        )));
    }
    let mut newton_iterations = vec![0; states.len()];
    let mut diverged = states.iter().any(|y| y.iter().any(|v| !v.is_finite()));

    let alphas = t.alphas_f64();
    let betas = t.betas_f64();
    let mut n = states.len();
    while !diverged && n <= n_steps {
        let past_y: Vec<&[f64]> = (1..=k).map(|j| states[n - j].as_slice()).collect();
        let past_f: Vec<&[f64]> = (1..=k).map(|j| fs[n - j].as_slice()).collect();
        let parts = step_parts(&alphas, &betas, h, &past_y, &past_f);
        let t_n = time(n);
        let (y, iterations) = if betas[0] == 0.0 {
            (parts.known, 0)
        } else {
            let out = newton_core(p, t_n, h * betas[0], &parts.known, parts.predictor, cfg, n)?;
            (out.state, out.iterations)
        };
        diverged = y
            .iter()
            .any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT);
        fs.push(if diverged {
            vec![f64::NAN; dim]
        } else {
            p.rhs(t_n, &y)
        });
        states.push(y);
        times.push(t_n);
        newton_iterations.push(iterations);
        n += 1;
    }

    Ok(Trajectory {
        times,
        states,
        meta: RunMeta {
            method: t.name().to_string(),
            h,
            starter: cfg.starter,
            newton_iterations,
            diverged,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    /// Max-norm global error at the final time.
    pub error: f64,
    /// `log2(previous error / error)`; absent on the first row.
    pub log2_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub slope: f64,
}

impl ConvergenceReport {
    /// CSV with header `h,error,log2_ratio`; the first ratio is empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,error,log2_ratio\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                format_float(row.h),
                format_float(row.error),
                row.log2_ratio.map(format_float).unwrap_or_default()
            ));
        }
        out
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Measures the global convergence order over successively halved step sizes.
/// Every solve uses `base` with its `h` replaced; solves run in parallel.
pub fn observed_order(
    t: &Tableau,
    p: &IVProblem,
    base: &SolveConfig,
    h_list: &[f64],
) -> Result<ConvergenceReport> {
    if p.exact.is_none() {
        return Err(Error::Config(format!(
            "problem {:?} has no exact solution to measure errors against",
            p.name
        )));
    }
    if h_list.len() < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 step sizes, got {}",
            h_list.len()
        )));
    }
    if let Some(w) = h_list
        .windows(2)
        .find(|w| ((w[1] / w[0]) - 0.5).abs() > 1e-9)
    {
        return Err(Error::Domain(format!(
            "each step size must halve the previous one ({} -> {})",
            w[0], w[1]
        )));
    }
    let errors = h_list
        .par_iter()
        .map(|&h| {
            let cfg = SolveConfig { h, ..*base };
            let traj = solve_fixed_step(t, p, &cfg)?;
            if traj.meta.diverged {
                return Err(Error::Harness {
                    h,
                    reason: "trajectory diverged".into(),
                });
            }
            let err = traj.final_error(p).expect("exact solution checked above");
            if !(err > 0.0 && err.is_finite()) {
                return Err(Error::Harness {
                    h,
                    reason: format!("global error {err} has no usable logarithm"),
                });
            }
            Ok(err)
        })
        .collect::<Result<Vec<f64>>>()?;

    let rows: Vec<ConvergenceRow> = h_list
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (&h, &error))| ConvergenceRow {
            h,
            error,
            log2_ratio: (i > 0).then(|| (errors[i - 1] / error).log2()),
        })
        .collect();
    let log_h: Vec<f64> = h_list.iter().map(|h| h.ln()).collect();
    let log_e: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    Ok(ConvergenceReport {
        slope: least_squares_slope(&log_h, &log_e),
        rows,
    })
}
