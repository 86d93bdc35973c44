//! Alternating ridge regression for ReLU networks under the L2 penalty
//! `lambda sum_j (|theta_j|^2 + b_j^2 + a_j^2)`.
//!
//! Each outer iteration
//! 1. solves the outer weights `a` exactly (ridge on the hidden features),
//! 2. solves all inner parameters `(theta_j, b_j)` jointly as a ridge problem
//!    in which the ReLU activity pattern `1(theta_j^T X_i + b_j > 0)` is frozen
//!    at the current iterate.
//!
//! Step 2 minimizes a piecewise-linear surrogate that is exact at the current
//! point. The candidate is accepted only if it does not raise the exact
//! objective; otherwise the move is halved up to [`MAX_BACKTRACKS`] times and
//! dropped if no fraction helps.

use ndarray::{concatenate, Array2, ArrayView1, ArrayView2, Axis};

use super::ridge::{ridge_solve_with_jitter, solve_shifted_gram};
use super::{check_fit_args, objective, random_init, relative_change, FitConfig, FitResult};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::net::{Activation, PenaltyKind, ShallowNet};

const MAX_BACKTRACKS: usize = 10;

pub fn fit_alternating_ridge(data: &Dataset, k: usize, lambda: f64, cfg: &FitConfig) -> Result<FitResult> {
    check_fit_args(data, k, lambda, cfg)?;
    let init = random_init(k, data.d(), Activation::Relu, cfg)?;
    fit_alternating_ridge_from(data, init, lambda, cfg)
}

/// Runs the alternating scheme from a caller-supplied starting network.
pub fn fit_alternating_ridge_from(
    data: &Dataset,
    init: ShallowNet,
    lambda: f64,
    cfg: &FitConfig,
) -> Result<FitResult> {
    check_fit_args(data, init.k(), lambda, cfg)?;
    if init.activation() != Activation::Relu {
        return Err(Error::invalid("alternating ridge regression requires ReLU activation"));
    }
    if init.d() != data.d() {
        return Err(Error::DimensionMismatch { expected: data.d(), got: init.d() });
    }

    let kind = PenaltyKind::L2Sum;
    let xt = augment(data.x.view());
    let mut net = init;
    let mut prev = objective(&net, data, lambda, kind)?;
    let mut trace = Vec::with_capacity(cfg.max_outer_iters);
    let mut a_trace = Vec::with_capacity(cfg.max_outer_iters);
    let mut converged = false;

    for _ in 0..cfg.max_outer_iters {
        net = outer_weight_step(&net, data, lambda, cfg.ridge_jitter)?;
        let after_a = objective(&net, data, lambda, kind)?;
        a_trace.push(after_a);

        let candidate = inner_ridge_step(&net, xt.view(), data.y.view(), lambda, cfg.ridge_jitter)?;
        let (next, obj) = accept_inner(&net, candidate, data, lambda, after_a)?;
        net = next;
        trace.push(obj);

        if relative_change(prev, obj) < cfg.tol {
            converged = true;
            break;
        }
        prev = obj;
    }
    FitResult::finish(net, data, lambda, kind, trace, a_trace, converged)
}

/// Exact ridge update of the outer weights at fixed inner parameters.
pub fn outer_weight_step(net: &ShallowNet, data: &Dataset, lambda: f64, jitter: f64) -> Result<ShallowNet> {
    let feats = net.features(data.x.view())?;
    let a = ridge_solve_with_jitter(feats.view(), data.y.view(), lambda, data.n(), jitter)?;
    net.with_outer(a)
}

/// `[X | 1]`
fn augment(x: ArrayView2<f64>) -> Array2<f64> {
    let ones = Array2::ones((x.nrows(), 1));
    concatenate![Axis(1), x, ones]
}

/// Inner parameters as rows `(theta_j, b_j)`.
fn inner_params(net: &ShallowNet) -> Array2<f64> {
    concatenate![Axis(1), net.theta().view(), net.b().view().insert_axis(Axis(1))]
}

fn with_inner(net: &ShallowNet, w: &Array2<f64>) -> Result<ShallowNet> {
    let d = net.d();
    ShallowNet::new(
        net.a().clone(),
        w.slice(ndarray::s![.., ..d]).to_owned(),
        w.column(d).to_owned(),
        net.activation(),
    )
}

/// `A_ij = a_j 1(theta_j^T x_i + b_j > 0)` at the current iterate.
fn gated_outer(net: &ShallowNet, xt: ArrayView2<f64>) -> Array2<f64> {
    let z = xt.dot(&inner_params(net).t());
    let a = net.a();
    let mut gate = z;
    for mut row in gate.rows_mut() {
        for (g, aj) in row.iter_mut().zip(a.iter()) {
            *g = if *g > 0.0 { *aj } else { 0.0 };
        }
    }
    gate
}

/// Minimizer of the frozen-pattern surrogate over all `(theta_j, b_j)`.
///
/// With `p = k (d + 1)` unknowns the primal system is used when `p <= n`;
/// otherwise the `n x n` dual Gram `(X~ X~^T) .* (A A^T)` is formed directly
/// without materializing the `n x p` design.
pub(crate) fn inner_ridge_step(
    net: &ShallowNet,
    xt: ArrayView2<f64>,
    y: ArrayView1<f64>,
    lambda: f64,
    jitter: f64,
) -> Result<Array2<f64>> {
    let (n, q) = xt.dim();
    let k = net.k();
    let gate = gated_outer(net, xt);
    if k * q <= n {
        let mut design = Array2::zeros((n, k * q));
        for i in 0..n {
            let xi = xt.row(i);
            let mut row = design.row_mut(i);
            for j in 0..k {
                let g = gate[[i, j]];
                if g != 0.0 {
                    for l in 0..q {
                        row[j * q + l] = g * xi[l];
                    }
                }
            }
        }
        let w = ridge_solve_with_jitter(design.view(), y, lambda, n, jitter)?;
        Ok(w.into_shape_with_order((k, q)).map_err(|e| Error::invalid(e.to_string()))?)
    } else {
        let mut gram = xt.dot(&xt.t());
        gram *= &gate.dot(&gate.t());
        let alpha = solve_shifted_gram(&gram, y, n as f64 * lambda, jitter)?;
        let weighted = &gate * &alpha.view().insert_axis(Axis(1));
        Ok(weighted.t().dot(&xt))
    }
}

/// Frozen-pattern objective of inner parameters `w` around `net`.
#[cfg(test)]
pub(crate) fn surrogate_objective(
    net: &ShallowNet,
    w: &Array2<f64>,
    xt: ArrayView2<f64>,
    y: ArrayView1<f64>,
    lambda: f64,
) -> f64 {
    let gate = gated_outer(net, xt);
    let lin = xt.dot(&w.t());
    let pred = (&gate * &lin).sum_axis(Axis(1));
    let n = y.len() as f64;
    let fit = pred.iter().zip(y.iter()).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / n;
    fit + lambda * (w.iter().map(|v| v * v).sum::<f64>() + net.a().dot(net.a()))
}

fn accept_inner(
    net: &ShallowNet,
    candidate: Array2<f64>,
    data: &Dataset,
    lambda: f64,
    current: f64,
) -> Result<(ShallowNet, f64)> {
    let start = inner_params(net);
    let step = &candidate - &start;
    let mut eta = 1.0;
    for _ in 0..=MAX_BACKTRACKS {
        let w = &start + &(&step * eta);
        if w.iter().all(|v| v.is_finite()) {
            let trial = with_inner(net, &w)?;
            let obj = objective(&trial, data, lambda, PenaltyKind::L2Sum)?;
            if obj <= current {
                return Ok((trial, obj));
            }
        }
        eta *= 0.5;
    }
    Ok((net.clone(), current))
}
