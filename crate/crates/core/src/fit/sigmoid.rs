//! Block scheme for Sigmoid networks with the outer-weight lasso penalty
//! `lambda sum_j |a_j|`: coordinate-descent lasso on the outer weights, then
//! a fixed number of plain gradient steps on the inner parameters.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::{check_fit_args, objective, random_init, relative_change, FitConfig, FitResult};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::net::{Activation, PenaltyKind, ShallowNet};

const LASSO_MAX_SWEEPS: usize = 1000;
const LASSO_TOL: f64 = 1e-12;

pub fn fit_sigmoid_l1(data: &Dataset, k: usize, lambda: f64, cfg: &FitConfig) -> Result<FitResult> {
    check_fit_args(data, k, lambda, cfg)?;
    let init = random_init(k, data.d(), Activation::Sigmoid, cfg)?;
    fit_sigmoid_l1_from(data, init, lambda, cfg)
}

pub fn fit_sigmoid_l1_from(data: &Dataset, init: ShallowNet, lambda: f64, cfg: &FitConfig) -> Result<FitResult> {
    check_fit_args(data, init.k(), lambda, cfg)?;
    if init.activation() != Activation::Sigmoid {
        return Err(Error::invalid("the lasso block scheme requires Sigmoid activation"));
    }
    if init.d() != data.d() {
        return Err(Error::DimensionMismatch { expected: data.d(), got: init.d() });
    }

    let kind = PenaltyKind::L1Outer;
    let mut net = init;
    let mut prev = objective(&net, data, lambda, kind)?;
    let mut step = cfg.step_size;
    let mut trace = Vec::with_capacity(cfg.max_outer_iters);
    let mut a_trace = Vec::with_capacity(cfg.max_outer_iters);
    let mut converged = false;

    for _ in 0..cfg.max_outer_iters {
        let feats = net.features(data.x.view())?;
        let a = lasso_cd(feats.view(), data.y.view(), lambda, net.a().view());
        net = net.with_outer(a)?;
        let after_a = objective(&net, data, lambda, kind)?;
        a_trace.push(after_a);

        let mut trial = net.clone();
        for _ in 0..cfg.inner_grad_steps {
            trial = gradient_step(&trial, data, step)?;
        }
        let obj_trial = objective(&trial, data, lambda, kind)?;
        // A block that raises the objective is discarded and the step halved.
        let obj = if obj_trial <= after_a {
            net = trial;
            obj_trial
        } else {
            step *= 0.5;
            after_a
        };
        trace.push(obj);

        if relative_change(prev, obj) < cfg.tol {
            converged = true;
            break;
        }
        prev = obj;
    }
    FitResult::finish(net, data, lambda, kind, trace, a_trace, converged)
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Cyclic coordinate descent for `(1/n) |y - F a|^2 + lambda |a|_1`, warm
/// started at `start`.
pub(crate) fn lasso_cd(f: ArrayView2<f64>, y: ArrayView1<f64>, lambda: f64, start: ArrayView1<f64>) -> Array1<f64> {
    let n = y.len() as f64;
    let k = f.ncols();
    let mut a = start.to_owned();
    let col_sq: Vec<f64> = f.columns().into_iter().map(|c| c.dot(&c) / n).collect();
    let mut resid = &y - &f.dot(&a);
    for _ in 0..LASSO_MAX_SWEEPS {
        let mut max_delta = 0.0f64;
        for j in 0..k {
            let col = f.column(j);
            let new = if col_sq[j] > 0.0 {
                let rho = col.dot(&resid) / n + col_sq[j] * a[j];
                soft_threshold(rho, 0.5 * lambda) / col_sq[j]
            } else {
                0.0
            };
            let delta = new - a[j];
            if delta != 0.0 {
                resid.scaled_add(-delta, &col);
                a[j] = new;
                max_delta = max_delta.max(delta.abs() * col_sq[j].sqrt());
            }
        }
        if max_delta <= LASSO_TOL {
            break;
        }
    }
    a
}

/// One gradient step on `(1/n) |y - f(X)|^2` with respect to `(theta, b)`.
fn gradient_step(net: &ShallowNet, data: &Dataset, step: f64) -> Result<ShallowNet> {
    let act = net.activation();
    let z = net.pre_activations(data.x.view())?;
    let pred = z.mapv(|t| act.apply(t)).dot(net.a());
    let n = data.n() as f64;
    let resid = (&pred - &data.y) * (2.0 / n);
    // dL/dz_ij = r_i a_j sigma'(z_ij)
    let mut dz: Array2<f64> = z.mapv(|t| act.derivative(t));
    dz *= &net.a().view().insert_axis(Axis(0));
    dz *= &resid.view().insert_axis(Axis(1));
    let grad_theta = dz.t().dot(&data.x);
    let grad_b = dz.sum_axis(Axis(0));
    let theta = net.theta() - &(grad_theta * step);
    let b = net.b() - &(grad_b * step);
    ShallowNet::new(net.a().clone(), theta, b, act)
}
