//! Error measures and replication summaries.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ModelId};
use crate::error::{Error, Result};
use crate::net::{truncate, ShallowNet};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `|m_hat - m|_n^2` on the training covariates.
    pub empirical: f64,
    /// Monte-Carlo estimate of `E_X (m_hat(X) - m(X))^2`.
    pub prediction: f64,
    pub pred_se: f64,
    pub n_test: usize,
    pub train_mse: f64,
}

/// Mean squared difference between two equal-length vectors.
pub fn empirical_error(pred: ArrayView1<f64>, m_true: ArrayView1<f64>) -> Result<f64> {
    if pred.len() != m_true.len() {
        return Err(Error::DimensionMismatch { expected: m_true.len(), got: pred.len() });
    }
    if pred.is_empty() {
        return Err(Error::invalid("empirical error of empty vectors"));
    }
    let sum: f64 = pred.iter().zip(m_true.iter()).map(|(p, m)| (p - m) * (p - m)).sum();
    Ok(sum / pred.len() as f64)
}

/// Prediction error against the noiseless regression function on a fresh
/// test sample of size `n_test`. Returns `(mean, standard error)`.
pub fn prediction_error_mc(net: &ShallowNet, model: ModelId, n_test: usize, seed: u64) -> Result<(f64, f64)> {
    prediction_error_mc_truncated(net, model, n_test, seed, None)
}

/// As [`prediction_error_mc`], optionally clamping predictions to `[-t, t]`.
pub fn prediction_error_mc_truncated(
    net: &ShallowNet,
    model: ModelId,
    n_test: usize,
    seed: u64,
    truncation: Option<f64>,
) -> Result<(f64, f64)> {
    if n_test < 2 {
        return Err(Error::invalid("n_test must be at least 2"));
    }
    let mut rng = rng::stream(seed, &[rng::tag("test"), rng::tag(model.name()), net.d() as u64]);
    let x = model.sample_covariates(n_test, net.d(), &mut rng)?;
    let truth = model.true_values(&x);
    let mut pred = net.eval(x.view())?;
    if let Some(t) = truncation {
        pred = truncate(pred.view(), t)?;
    }
    let sq: Vec<f64> = pred.iter().zip(truth.iter()).map(|(p, m)| (p - m) * (p - m)).collect();
    let n = n_test as f64;
    let mean = sq.iter().sum::<f64>() / n;
    let var = sq.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Builds the full [`ErrorReport`] for a fitted network.
pub fn error_report(
    net: &ShallowNet,
    data: &Dataset,
    train_mse: f64,
    n_test: usize,
    seed: u64,
    truncation: Option<f64>,
) -> Result<ErrorReport> {
    let mut fitted = net.eval(data.x.view())?;
    if let Some(t) = truncation {
        fitted = truncate(fitted.view(), t)?;
    }
    let empirical = empirical_error(fitted.view(), data.m_true.view())?;
    let (prediction, pred_se) = prediction_error_mc_truncated(net, data.model_id, n_test, seed, truncation)?;
    Ok(ErrorReport { empirical, prediction, pred_se, n_test, train_mse })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: f64,
    /// Normal-approximation 95% interval for the mean.
    pub ci95: (f64, f64),
}

impl Aggregate {
    pub fn std_err(&self, count: usize) -> f64 {
        self.sd / (count as f64).sqrt()
    }
}

pub fn aggregate(values: &[f64]) -> Result<Aggregate> {
    if values.len() < 2 {
        return Err(Error::invalid("aggregate needs at least two values"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    let half = 1.959_963_984_540_054 * sd / n.sqrt();
    Ok(Aggregate { mean, sd, ci95: (mean - half, mean + half) })
}
