//! Floating-point time stepping on monotone test problems.
//!
//! This is the only part of the crate that works in `f64`. The violation
//! tolerance [`VIOLATION_TOL`] absorbs roundoff.

use std::fmt;
use std::io;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::order::{threshold_factor, MethodCoefficients, OrderError, ThresholdFactor};
use crate::rational::to_f64;

/// Runs with `h ≤ C·h_FE` must keep every violation at or below this.
pub const VIOLATION_TOL: f64 = 1e-12;

/// Starting values fall back to forward Euler with this many substeps per step.
pub const STARTUP_SUBSTEPS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("step size must be positive and finite (got {0})")]
    InvalidStep(f64),
    #[error("at least one step is required")]
    NoSteps,
    #[error(transparent)]
    Method(#[from] OrderError),
    #[error("unknown problem {0:?} (expected decay or advection[:N])")]
    UnknownProblem(String),
}

/// Convex functional whose growth is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    MaxNorm,
    /// `Σ |u_{i+1} − u_i|` with wraparound.
    TotalVariation,
    L1,
}

impl NormKind {
    pub fn eval(self, u: &[f64]) -> f64 {
        match self {
            NormKind::MaxNorm => u.iter().fold(0.0, |m, x| m.max(x.abs())),
            NormKind::L1 => u.iter().map(|x| x.abs()).sum(),
            NormKind::TotalVariation => {
                let n = u.len();
                (0..n).map(|i| (u[(i + 1) % n] - u[i]).abs()).sum()
            }
        }
    }
}

type Rhs = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type Exact = Arc<dyn Fn(f64) -> Option<Vec<f64>> + Send + Sync>;

/// An autonomous ODE `u' = f(u)` with a forward-Euler monotonicity bound.
#[derive(Clone)]
pub struct TestProblem {
    pub id: String,
    pub initial_state: Vec<f64>,
    pub h_fe: f64,
    pub norm: NormKind,
    rhs: Rhs,
    /// `f(u) = L u` when present; required by implicit methods.
    linear: Option<DMatrix<f64>>,
    exact: Option<Exact>,
}

impl fmt::Debug for TestProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestProblem")
            .field("id", &self.id)
            .field("dim", &self.initial_state.len())
            .field("h_fe", &self.h_fe)
            .field("norm", &self.norm)
            .field("linear", &self.linear.is_some())
            .finish()
    }
}

impl TestProblem {
    /// A problem given only by its right-hand side, treated as nonlinear.
    pub fn custom(
        id: impl Into<String>,
        rhs: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        initial_state: Vec<f64>,
        h_fe: f64,
        norm: NormKind,
    ) -> Self {
        Self {
            id: id.into(),
            initial_state,
            h_fe,
            norm,
            rhs: Arc::new(rhs),
            linear: None,
            exact: None,
        }
    }

    /// `u' = L u`.
    pub fn linear(id: impl Into<String>, l: DMatrix<f64>, initial_state: Vec<f64>, h_fe: f64, norm: NormKind) -> Self {
        let op = l.clone();
        Self {
            id: id.into(),
            initial_state,
            h_fe,
            norm,
            rhs: Arc::new(move |u| (&op * DVector::from_column_slice(u)).as_slice().to_vec()),
            linear: Some(l),
            exact: None,
        }
    }

    /// `u' = −u`, `u(0) = 1`, `h_FE = 2`, max norm.
    pub fn decay() -> Self {
        let mut p = Self::linear("decay", DMatrix::from_element(1, 1, -1.0), vec![1.0], 2.0, NormKind::MaxNorm);
        p.exact = Some(Arc::new(|t| Some(vec![(-t).exp()])));
        p
    }

    /// Upwind `u_t + u_x = 0` on `cells` periodic cells of `[0, 1)`, with a
    /// step profile (1 on the middle half, 0 elsewhere). `h_FE = Δx`, total variation.
    pub fn advection(cells: usize) -> Self {
        let n = cells.max(2);
        let dx = 1.0 / n as f64;
        let mut l = DMatrix::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = -1.0 / dx;
            l[(i, (i + n - 1) % n)] = 1.0 / dx;
        }
        let u0: Vec<f64> = (0..n)
            .map(|i| if (n / 4..3 * n / 4).contains(&i) { 1.0 } else { 0.0 })
            .collect();
        let mut p = Self::linear(format!("advection:{n}"), l, u0.clone(), dx, NormKind::TotalVariation);
        // The transported profile, available when t is a whole number of cells.
        p.exact = Some(Arc::new(move |t: f64| {
            let shift = t / dx;
            let s = shift.round();
            if (shift - s).abs() > 1e-9 {
                return None;
            }
            let s = (s as i64).rem_euclid(n as i64) as usize;
            Some((0..n).map(|i| u0[(i + n - s) % n]).collect())
        }));
        p
    }

    /// `decay`, `advection` (100 cells) or `advection:N`.
    pub fn builtin(name: &str) -> Result<Self, IntegratorError> {
        match name.split_once(':') {
            None if name == "decay" => Ok(Self::decay()),
            None if name == "advection" => Ok(Self::advection(100)),
            Some(("advection", n)) => n
                .parse()
                .ok()
                .filter(|&n: &usize| n >= 2)
                .map(Self::advection)
                .ok_or_else(|| IntegratorError::UnknownProblem(name.into())),
            _ => Err(IntegratorError::UnknownProblem(name.into())),
        }
    }

    pub fn rhs(&self, u: &[f64]) -> Vec<f64> {
        (self.rhs)(u)
    }

    pub fn is_linear(&self) -> bool {
        self.linear.is_some()
    }

    pub fn exact_solution(&self, t: f64) -> Option<Vec<f64>> {
        self.exact.as_ref().and_then(|e| e(t))
    }

    pub fn forward_euler_step(&self, u: &[f64], h: f64) -> Vec<f64> {
        let f = self.rhs(u);
        u.iter().zip(&f).map(|(a, b)| a + h * b).collect()
    }

    fn starting_values(&self, k: usize, h: f64) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(k);
        for n in 0..k {
            let t = n as f64 * h;
            let u = match self.exact_solution(t) {
                Some(u) => u,
                None if n == 0 => self.initial_state.clone(),
                None => {
                    let mut u = out[n - 1].clone();
                    for _ in 0..STARTUP_SUBSTEPS {
                        u = self.forward_euler_step(&u, h / STARTUP_SUBSTEPS as f64);
                    }
                    u
                }
            };
            out.push(u);
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub method: MethodCoefficients,
    pub problem: String,
    pub h: f64,
    pub steps: usize,
    /// `‖u_0‖ .. ‖u_{k+steps−1}‖`, starting values included.
    pub norm_history: Vec<f64>,
    /// `max_n ‖u_n‖ − max(‖u_{n−1}‖, …, ‖u_{n−k}‖)` over the computed steps.
    pub max_violation: f64,
    #[serde(skip)]
    pub final_state: Vec<f64>,
    pub final_time: f64,
}

impl RunRecord {
    /// CSV with columns `step_index,time,norm_value`.
    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["step_index", "time", "norm_value"])?;
        for (n, v) in self.norm_history.iter().enumerate() {
            out.serialize((n, n as f64 * self.h, v))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs `steps` steps of the method after `k` starting values.
pub fn lmm_integrate(
    method: &MethodCoefficients,
    problem: &TestProblem,
    h: f64,
    steps: usize,
) -> Result<RunRecord, IntegratorError> {
    method.validate()?;
    if !(h.is_finite() && h > 0.0) {
        return Err(IntegratorError::InvalidStep(h));
    }
    if steps == 0 {
        return Err(IntegratorError::NoSteps);
    }
    let k = method.k;
    let alpha: Vec<f64> = method.alpha.iter().map(to_f64).collect();
    let beta: Vec<f64> = method.beta.iter().map(to_f64).collect();
    let dim = problem.initial_state.len();

    let solver = if beta[0] != 0.0 {
        let l = problem.linear.as_ref().ok_or_else(|| {
            IntegratorError::Unsupported(format!("implicit method on nonlinear problem {}", problem.id))
        })?;
        let m = DMatrix::identity(dim, dim) - l * (h * beta[0]);
        Some(m.lu())
    } else {
        None
    };

    let mut states = problem.starting_values(k, h);
    let mut f_hist: Vec<Vec<f64>> = states.iter().map(|u| problem.rhs(u)).collect();
    let mut norms: Vec<f64> = states.iter().map(|u| problem.norm.eval(u)).collect();
    let mut max_violation = f64::NEG_INFINITY;

    for n in k..k + steps {
        let mut rhs = vec![0.0; dim];
        for j in 1..=k {
            let (u, f) = (&states[n - j], &f_hist[n - j]);
            for i in 0..dim {
                rhs[i] += alpha[j - 1] * u[i] + h * beta[j] * f[i];
            }
        }
        let u = match &solver {
            Some(lu) => lu
                .solve(&DVector::from_vec(rhs))
                .ok_or_else(|| IntegratorError::Unsupported("singular implicit system".into()))?
                .as_slice()
                .to_vec(),
            None => rhs,
        };
        let norm = problem.norm.eval(&u);
        let prev = norms[n - k..n].iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        max_violation = max_violation.max(norm - prev);
        f_hist.push(problem.rhs(&u));
        norms.push(norm);
        states.push(u);
    }

    let last = k + steps - 1;
    Ok(RunRecord {
        method: method.clone(),
        problem: problem.id.clone(),
        h,
        steps,
        norm_history: norms,
        max_violation,
        final_state: states.pop().unwrap_or_default(),
        final_time: last as f64 * h,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub h: f64,
    /// `h ≤ C·h_FE`, where the monotonicity guarantee applies.
    pub within_threshold: bool,
    pub max_violation: f64,
    /// Only meaningful within the threshold; `None` above it.
    pub passed: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub problem: String,
    pub h_fe: f64,
    /// `C`, or `None` when unbounded.
    pub threshold_factor: Option<f64>,
    pub steps: usize,
    pub entries: Vec<SweepEntry>,
    pub all_passed: bool,
    #[serde(skip)]
    pub runs: Vec<RunRecord>,
}

/// Runs every `h` independently and checks the guarantee where it applies.
pub fn monotonicity_sweep(
    method: &MethodCoefficients,
    problem: &TestProblem,
    h_values: &[f64],
    steps: usize,
) -> Result<SweepReport, IntegratorError> {
    let c = match threshold_factor(method) {
        ThresholdFactor::Finite(c) => Some(to_f64(&c)),
        ThresholdFactor::Unbounded => None,
    };
    let limit = c.map_or(f64::INFINITY, |c| c * problem.h_fe);
    let runs = h_values
        .par_iter()
        .map(|&h| lmm_integrate(method, problem, h, steps))
        .collect::<Result<Vec<_>, _>>()?;
    let entries: Vec<SweepEntry> = runs
        .iter()
        .map(|run| {
            let within = run.h <= limit * (1.0 + 1e-14);
            SweepEntry {
                h: run.h,
                within_threshold: within,
                max_violation: run.max_violation,
                passed: within.then_some(run.max_violation <= VIOLATION_TOL),
            }
        })
        .collect();
    let all_passed = entries.iter().all(|e| e.passed != Some(false));
    Ok(SweepReport {
        problem: problem.id.clone(),
        h_fe: problem.h_fe,
        threshold_factor: c,
        steps,
        entries,
        all_passed,
        runs,
    })
}

impl FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" | "max-norm" => Ok(NormKind::MaxNorm),
            "tv" | "total-variation" => Ok(NormKind::TotalVariation),
            "l1" => Ok(NormKind::L1),
            _ => Err(format!("unknown norm {s:?}")),
        }
    }
}
