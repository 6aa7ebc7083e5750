//! Over-relaxed scaled-form ADMM for penalized least squares.
//!
//! The problem `min ½‖Ax − b‖² + g(z)  s.t. x = z` is solved with
//!
//! ```text
//! x ← (AᵀA + ρI)⁻¹(Aᵀb + ρ(z − u))
//! x̂ ← αx + (1 − α)z
//! z ← prox_{g/ρ}(x̂ + u)
//! u ← u + α(x − z) + (1 − α)(z_old − z)
//! ```
//!
//! starting from `x = z = u = 0`. Iteration stops once the primal residual
//! `‖x − z‖` and dual residual `‖ρ(z_old − z)‖` fall below
//! `√p·ε_abs + ε_rel·max(‖x‖, ‖z‖)` and `√n·ε_abs + ε_rel·‖ρu‖`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    build_ridge_factor, check_len, norm2, DenseMatrix, DenseVector, RidgeSystemFactor,
};
use crate::penalty::{
    ordered_l1_penalty, ordered_l2_penalty, shrink_ordered_elastic_net, shrink_ordered_l2,
    soft_threshold, RegularizationSequence,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub rho: f64,
    /// Over-relaxation parameter in `[1.0, 1.8]`.
    pub alpha: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    /// Keep every k-th trace record (plus the last one); 0 keeps none.
    pub trace_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            alpha: 1.0,
            eps_abs: 1e-4,
            eps_rel: 1e-2,
            max_iter: 10_000,
            trace_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return bad(format!("rho must be positive, got {}", self.rho));
        }
        if !(1.0..=1.8).contains(&self.alpha) {
            return bad(format!("alpha must lie in [1.0, 1.8], got {}", self.alpha));
        }
        if !(self.eps_abs > 0.0) || !(self.eps_rel > 0.0) {
            return bad(format!(
                "tolerances must be positive, got eps_abs = {}, eps_rel = {}",
                self.eps_abs, self.eps_rel
            ));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        Ok(())
    }
}

/// The regularizer `g(z)` and its z-update.
#[derive(Debug, Clone, PartialEq)]
pub enum Penalty {
    /// `½ Σ λᵢ z²₍ᵢ₎`.
    OrderedL2 { lambda: RegularizationSequence },
    /// `Σ λ₁ᵢ |z|₍ᵢ₎ + ½ Σ λ₂ᵢ z²₍ᵢ₎` with `λ₁ = mix·λ`, `λ₂ = (1 − mix)·λ`.
    OrderedElasticNet {
        l1: RegularizationSequence,
        l2: RegularizationSequence,
        mix: f64,
    },
    /// `λ‖z‖₁`.
    Lasso { lambda: f64 },
}

impl Penalty {
    pub fn ordered_l2(lambda: RegularizationSequence) -> Self {
        Penalty::OrderedL2 { lambda }
    }

    pub fn ordered_elastic_net(lambda: &RegularizationSequence, mix: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mix) {
            return Err(Error::InvalidParameter(format!(
                "elastic net mix must lie in [0, 1], got {mix}"
            )));
        }
        Ok(Penalty::OrderedElasticNet {
            l1: lambda.scaled(mix)?,
            l2: lambda.scaled(1.0 - mix)?,
            mix,
        })
    }

    pub fn lasso(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lasso lambda must be positive, got {lambda}"
            )));
        }
        Ok(Penalty::Lasso { lambda })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Penalty::OrderedL2 { .. } => "ol2",
            Penalty::OrderedElasticNet { .. } => "oenet",
            Penalty::Lasso { .. } => "lasso",
        }
    }

    fn expected_len(&self) -> Option<usize> {
        match self {
            Penalty::OrderedL2 { lambda } => Some(lambda.len()),
            Penalty::OrderedElasticNet { l1, .. } => Some(l1.len()),
            Penalty::Lasso { .. } => None,
        }
    }

    /// `g(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        match self {
            Penalty::OrderedL2 { lambda } => Ok(0.5 * ordered_l2_penalty(x, lambda)?),
            Penalty::OrderedElasticNet { l1, l2, .. } => {
                Ok(ordered_l1_penalty(x, l1)? + 0.5 * ordered_l2_penalty(x, l2)?)
            }
            Penalty::Lasso { lambda } => Ok(lambda * x.iter().map(|v| v.abs()).sum::<f64>()),
        }
    }

    /// `argmin_z g(z) + (ρ/2)‖v − z‖²` (rank-matched for ordered penalties).
    pub fn z_update(&self, v: &[f64], rho: f64) -> Result<DenseVector> {
        match self {
            Penalty::OrderedL2 { lambda } => shrink_ordered_l2(v, lambda, rho),
            Penalty::OrderedElasticNet { l1, l2, .. } => shrink_ordered_elastic_net(v, l1, l2, rho),
            Penalty::Lasso { lambda } => Ok(soft_threshold(v, lambda / rho)),
        }
    }
}

/// Iterate triple with `u = y/ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub x: DenseVector,
    pub z: DenseVector,
    pub u: DenseVector,
    pub iter: usize,
}

impl AdmmState {
    pub fn zeros(p: usize) -> Self {
        Self {
            x: DenseVector::zeros(p),
            z: DenseVector::zeros(p),
            u: DenseVector::zeros(p),
            iter: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub r_norm: f64,
    pub s_norm: f64,
    pub eps_pri: f64,
    pub eps_dual: f64,
    pub objective: f64,
}

impl TraceRecord {
    pub fn converged(&self) -> bool {
        self.r_norm <= self.eps_pri && self.s_norm <= self.eps_dual
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Final `z`.
    pub coefficients: DenseVector,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
    pub nonzero_count: usize,
    pub wall_time: Duration,
}

impl FitResult {
    pub fn final_record(&self) -> Option<&TraceRecord> {
        self.trace.last()
    }
}

/// `|zᵢ| > 1e-6·max(1, ‖z‖_∞)`.
pub fn nonzero_count(z: &[f64]) -> usize {
    let scale = z.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-6 * scale;
    z.iter().filter(|v| v.abs() > tol).count()
}

fn least_squares_loss(a: &DenseMatrix, b: &[f64], x: &[f64]) -> Result<f64> {
    check_len(a.rows(), b.len())?;
    let ax = a.matvec(x)?;
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    Ok(0.5 * r)
}

/// `½‖Ax − b‖² + ½ J_λ(x)`.
pub fn objective_ordered_ridge(
    a: &DenseMatrix,
    b: &[f64],
    x: &[f64],
    lam: &RegularizationSequence,
) -> Result<f64> {
    Ok(least_squares_loss(a, b, x)? + 0.5 * ordered_l2_penalty(x, lam)?)
}

/// `½‖Ax − b‖² + g(x)`.
pub fn objective(a: &DenseMatrix, b: &[f64], x: &[f64], penalty: &Penalty) -> Result<f64> {
    Ok(least_squares_loss(a, b, x)? + penalty.value(x)?)
}

/// `‖Aᵀb‖_∞`.
pub fn compute_lambda_max(a: &DenseMatrix, b: &[f64]) -> Result<f64> {
    Ok(a.t_matvec(b)?.norm_inf())
}

/// `x = (AᵀA + ρI)⁻¹(Aᵀb + ρ(z − u))`.
pub fn x_update(f: &RidgeSystemFactor<'_>, z: &[f64], u: &[f64]) -> Result<DenseVector> {
    let p = f.atb().len();
    check_len(p, z.len())?;
    check_len(p, u.len())?;
    let rho = f.rho();
    let rhs: Vec<f64> = f
        .atb()
        .iter()
        .zip(z.iter().zip(u))
        .map(|(q, (zi, ui))| q + rho * (zi - ui))
        .collect();
    f.solve(&rhs)
}

/// `α·x_new + (1 − α)·z_old`.
pub fn relax(x_new: &[f64], z_old: &[f64], alpha: f64) -> Result<DenseVector> {
    check_len(x_new.len(), z_old.len())?;
    let v = x_new
        .iter()
        .zip(z_old)
        .map(|(x, z)| alpha * x + (1.0 - alpha) * z)
        .collect();
    Ok(DenseVector::from_vec_unchecked(v))
}

/// Steppable ADMM engine. The factorization of `AᵀA + ρI` is built once.
pub struct AdmmSolver<'a> {
    factor: RidgeSystemFactor<'a>,
    b: &'a [f64],
    penalty: &'a Penalty,
    cfg: SolverConfig,
    state: AdmmState,
}

impl<'a> AdmmSolver<'a> {
    pub fn new(
        a: &'a DenseMatrix,
        b: &'a [f64],
        penalty: &'a Penalty,
        cfg: &SolverConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        check_len(a.rows(), b.len())?;
        if let Some(len) = penalty.expected_len() {
            check_len(a.cols(), len)?;
        }
        let factor = build_ridge_factor(a, b, cfg.rho)?;
        Ok(Self {
            factor,
            b,
            penalty,
            cfg: cfg.clone(),
            state: AdmmState::zeros(a.cols()),
        })
    }

    pub fn state(&self) -> &AdmmState {
        &self.state
    }

    pub fn factor(&self) -> &RidgeSystemFactor<'a> {
        &self.factor
    }

    /// One full iteration; returns its residuals and thresholds.
    pub fn step(&mut self) -> Result<TraceRecord> {
        let SolverConfig {
            rho,
            alpha,
            eps_abs,
            eps_rel,
            ..
        } = self.cfg;
        let a = self.factor.design();
        let (n, p) = a.shape();

        let x = x_update(&self.factor, &self.state.z, &self.state.u)?;
        let x_hat = relax(&x, &self.state.z, alpha)?;
        let v: Vec<f64> = x_hat
            .iter()
            .zip(self.state.u.iter())
            .map(|(a, b)| a + b)
            .collect();
        let z = self.penalty.z_update(&v, rho)?;
        let z_old = &self.state.z;
        let u: Vec<f64> = (0..p)
            .map(|i| self.state.u[i] + alpha * (x[i] - z[i]) + (1.0 - alpha) * (z_old[i] - z[i]))
            .collect();

        if !x.is_finite() || !z.is_finite() || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ADMM iterate"));
        }

        let r: Vec<f64> = x.iter().zip(z.iter()).map(|(a, b)| a - b).collect();
        let s: Vec<f64> = z_old
            .iter()
            .zip(z.iter())
            .map(|(a, b)| rho * (a - b))
            .collect();
        let rho_u: Vec<f64> = u.iter().map(|v| rho * v).collect();
        let record = TraceRecord {
            iter: self.state.iter + 1,
            r_norm: norm2(&r),
            s_norm: norm2(&s),
            eps_pri: (p as f64).sqrt() * eps_abs + eps_rel * x.norm2().max(z.norm2()),
            eps_dual: (n as f64).sqrt() * eps_abs + eps_rel * norm2(&rho_u),
            objective: objective(a, self.b, &z, self.penalty)?,
        };

        self.state = AdmmState {
            x,
            z,
            u: DenseVector::from_vec_unchecked(u),
            iter: record.iter,
        };
        Ok(record)
    }

    /// Iterate until both residuals are within tolerance or `max_iter` is hit.
    /// Hitting the limit is not an error: the result has `converged = false`.
    pub fn run(mut self) -> Result<FitResult> {
        let clock = Clock::start();
        let every = self.cfg.trace_every;
        let mut trace = Vec::new();
        let mut converged = false;
        while self.state.iter < self.cfg.max_iter {
            let record = self.step()?;
            converged = record.converged();
            let last = converged || record.iter == self.cfg.max_iter;
            if every > 0 && (record.iter % every == 0 || last) {
                trace.push(record);
            }
            if converged {
                break;
            }
        }
        let coefficients = self.state.z;
        Ok(FitResult {
            nonzero_count: nonzero_count(&coefficients),
            coefficients,
            converged,
            iterations: self.state.iter,
            trace,
            wall_time: clock.elapsed(),
        })
    }
}

pub fn fit(a: &DenseMatrix, b: &[f64], penalty: &Penalty, cfg: &SolverConfig) -> Result<FitResult> {
    AdmmSolver::new(a, b, penalty, cfg)?.run()
}

/// Ordered ridge regression: `min ½‖Ax − b‖² + ½ J_λ(x)`.
pub fn fit_ordered_ridge(
    a: &DenseMatrix,
    b: &[f64],
    lam: &RegularizationSequence,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    fit(a, b, &Penalty::ordered_l2(lam.clone()), cfg)
}

/// Ordered elastic net with `λ₁ = mix·λ_BH`, `λ₂ = (1 − mix)·λ_BH`.
pub fn fit_ordered_elastic_net(
    a: &DenseMatrix,
    b: &[f64],
    lam_bh: &RegularizationSequence,
    mix: f64,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    fit(a, b, &Penalty::ordered_elastic_net(lam_bh, mix)?, cfg)
}

/// Lasso baseline: `min ½‖Ax − b‖² + λ‖x‖₁`.
pub fn fit_lasso(a: &DenseMatrix, b: &[f64], lambda: f64, cfg: &SolverConfig) -> Result<FitResult> {
    fit(a, b, &Penalty::lasso(lambda)?, cfg)
}

// `Instant::now` is unavailable on wasm32-unknown-unknown.
#[cfg(not(target_arch = "wasm32"))]
struct Clock(std::time::Instant);

#[cfg(not(target_arch = "wasm32"))]
impl Clock {
    fn start() -> Self {
        Clock(std::time::Instant::now())
    }

    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

#[cfg(target_arch = "wasm32")]
struct Clock;

#[cfg(target_arch = "wasm32")]
impl Clock {
    fn start() -> Self {
        Clock
    }

    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}
