//! Solvers for the penalized least-squares estimator
//! `argmin_g (1/n) sum_i (Y_i - g(X_i))^2 + lambda J(g)` over shallow networks.

mod alternating;
mod ridge;
mod schedule;
mod sigmoid;

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::net::{Activation, PenaltyKind, ShallowNet};
use crate::rng;

pub use alternating::{fit_alternating_ridge, fit_alternating_ridge_from};
pub use ridge::{normal_equation_residual, ridge_solve, ridge_solve_with_jitter, DEFAULT_JITTER};
pub use schedule::{lambda_schedule, regime_of, regime_threshold, scheduled_lambda, Regime};
pub use sigmoid::{fit_sigmoid_l1, fit_sigmoid_l1_from};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub max_outer_iters: usize,
    /// Stop once `|J_prev - J| / J_prev` drops below this.
    pub tol: f64,
    /// Scale of the Gaussian initialization.
    pub init_scale: f64,
    pub init_seed: u64,
    pub ridge_jitter: f64,
    /// Gradient steps per outer iteration (Sigmoid path).
    pub inner_grad_steps: usize,
    /// Gradient step size (Sigmoid path).
    pub step_size: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 100,
            tol: 1e-6,
            init_scale: 1.0,
            init_seed: 0,
            ridge_jitter: DEFAULT_JITTER,
            inner_grad_steps: 10,
            step_size: 0.1,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_outer_iters == 0 {
            return Err(Error::invalid("max_outer_iters must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::invalid("init_scale must be positive"));
        }
        if !(self.ridge_jitter > 0.0) {
            return Err(Error::invalid("ridge_jitter must be positive"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::invalid("step_size must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub net: ShallowNet,
    /// Exact penalized objective after each outer iteration.
    pub objective_trace: Vec<f64>,
    /// Exact penalized objective right after each outer-weight update.
    pub a_step_trace: Vec<f64>,
    pub converged: bool,
    pub iters: usize,
    pub lambda: f64,
    pub penalty_kind: PenaltyKind,
    /// `J(m_hat)` under `penalty_kind`.
    pub penalty_value: f64,
    /// Path norm of the fitted network, reported for every solver.
    pub path_norm: f64,
    pub train_mse: f64,
    /// True when the zero network beat the last iterate and was returned instead.
    pub zero_fallback: bool,
}

impl FitResult {
    pub(crate) fn finish(
        net: ShallowNet,
        data: &Dataset,
        lambda: f64,
        kind: PenaltyKind,
        objective_trace: Vec<f64>,
        a_step_trace: Vec<f64>,
        converged: bool,
    ) -> Result<Self> {
        let train_mse = mse(&net, data.x.view(), data.y.view())?;
        let objective = train_mse + lambda * net.penalty(kind);
        let zero_objective = data.y.dot(&data.y) / data.n() as f64;
        let (net, train_mse, zero_fallback) = if zero_objective < objective {
            (ShallowNet::zeros(net.k(), net.d(), net.activation()), zero_objective, true)
        } else {
            (net, train_mse, false)
        };
        Ok(Self {
            iters: objective_trace.len(),
            penalty_value: net.penalty(kind),
            path_norm: net.penalty(PenaltyKind::PathNorm),
            net,
            objective_trace,
            a_step_trace,
            converged,
            lambda,
            penalty_kind: kind,
            train_mse,
            zero_fallback,
        })
    }

    pub fn objective(&self) -> f64 {
        self.train_mse + self.lambda * self.penalty_value
    }
}

pub(crate) fn mse(net: &ShallowNet, x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<f64> {
    let pred = net.eval(x)?;
    Ok(pred.iter().zip(y.iter()).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / y.len() as f64)
}

pub(crate) fn objective(net: &ShallowNet, data: &Dataset, lambda: f64, kind: PenaltyKind) -> Result<f64> {
    Ok(mse(net, data.x.view(), data.y.view())? + lambda * net.penalty(kind))
}

pub(crate) fn relative_change(prev: f64, cur: f64) -> f64 {
    let scale = prev.abs().max(f64::MIN_POSITIVE);
    (prev - cur).abs() / scale
}

pub(crate) fn check_fit_args(data: &Dataset, k: usize, lambda: f64, cfg: &FitConfig) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if data.n() == 0 {
        return Err(Error::invalid("empty dataset"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    cfg.validate()
}

/// Gaussian start: `theta ~ N(0, s^2/d)`, `b ~ N(0, s^2)`, `a = 0`.
pub fn random_init(k: usize, d: usize, activation: Activation, cfg: &FitConfig) -> Result<ShallowNet> {
    let mut rng = rng::stream(cfg.init_seed, &[rng::tag("init"), k as u64, d as u64]);
    let s = cfg.init_scale;
    let theta_dist = Normal::new(0.0, s / (d as f64).sqrt()).map_err(|e| Error::invalid(e.to_string()))?;
    let bias_dist = Normal::new(0.0, s).map_err(|e| Error::invalid(e.to_string()))?;
    let theta = ndarray::Array2::from_shape_simple_fn((k, d), || theta_dist.sample(&mut rng));
    let b = Array1::from_shape_simple_fn(k, || bias_dist.sample(&mut rng));
    ShallowNet::new(Array1::zeros(k), theta, b, activation)
}
