//! Ridge regression through Cholesky factorization of the normal equations.
//!
//! Systems with more unknowns than rows are solved in dual form,
//! `w = G^T (G G^T + s I)^{-1} y`, which coincides with the primal solution
//! for `s > 0` and gives the minimum-norm least-squares solution as `s -> 0`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Relative jitter `1e-10 * trace / dim` used when a system is singular.
pub const DEFAULT_JITTER: f64 = 1e-10;

/// Number of x10 jitter escalations after the first jittered attempt.
const JITTER_ESCALATIONS: i32 = 3;

/// A pivot below this fraction of the largest diagonal entry counts as singular.
const PIVOT_TOL: f64 = 1e-12;

fn dot(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| a * b).sum()
}

/// In-place lower Cholesky factor of a symmetric matrix (upper triangle ignored).
///
/// Returns `None` if any pivot falls below `PIVOT_TOL * max_diag`.
fn cholesky(mut a: Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let max_diag = (0..n).map(|i| a[[i, i]]).fold(0.0f64, f64::max);
    if !(max_diag > 0.0) {
        return (n == 0).then_some(a);
    }
    let floor = PIVOT_TOL * max_diag;
    let data = a.as_slice_mut()?;
    for j in 0..n {
        let (done, rest) = data.split_at_mut((j + 1) * n);
        let row_j = &mut done[j * n..];
        let pivot = row_j[j] - dot(&row_j[..j], &row_j[..j]);
        if !(pivot > floor) {
            return None;
        }
        let pivot = pivot.sqrt();
        row_j[j] = pivot;
        for row_i in rest.chunks_exact_mut(n) {
            row_i[j] = (row_i[j] - dot(&row_i[..j], &row_j[..j])) / pivot;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            data[i * n + j] = 0.0;
        }
    }
    Some(a)
}

fn cholesky_solve(l: &Array2<f64>, rhs: ArrayView1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut z = rhs.to_owned();
    for i in 0..n {
        let row = l.row(i);
        let s: f64 = (0..i).map(|j| row[j] * z[j]).sum();
        z[i] = (z[i] - s) / row[i];
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| l[[j, i]] * z[j]).sum();
        z[i] = (z[i] - s) / l[[i, i]];
    }
    z
}

/// Solves `(gram + shift I) x = rhs` for symmetric PSD `gram`.
///
/// If the factorization fails, a jitter of `jitter * trace(gram) / dim` is
/// added and escalated tenfold up to three times.
pub(crate) fn solve_shifted_gram(
    gram: &Array2<f64>,
    rhs: ArrayView1<f64>,
    shift: f64,
    jitter: f64,
) -> Result<Array1<f64>> {
    let dim = gram.nrows();
    let attempt = |extra: f64| {
        let mut m = gram.clone();
        for i in 0..dim {
            m[[i, i]] += shift + extra;
        }
        cholesky(m)
    };
    if let Some(l) = attempt(0.0) {
        return Ok(cholesky_solve(&l, rhs));
    }
    let trace: f64 = (0..dim).map(|i| gram[[i, i]]).sum();
    let base = if trace > 0.0 { jitter * trace / dim as f64 } else { jitter };
    let mut extra = base;
    for _ in 0..=JITTER_ESCALATIONS {
        if let Some(l) = attempt(extra) {
            return Ok(cholesky_solve(&l, rhs));
        }
        extra *= 10.0;
    }
    Err(Error::SolveFailed(format!(
        "{dim}x{dim} system indefinite after jitter {:.3e}",
        extra / 10.0
    )))
}

/// Ridge solution `argmin_w (1/n_scale) |y - G w|^2 + lambda |w|^2` with the
/// default jitter.
pub fn ridge_solve(g: ArrayView2<f64>, y: ArrayView1<f64>, lambda: f64, n_scale: usize) -> Result<Array1<f64>> {
    ridge_solve_with_jitter(g, y, lambda, n_scale, DEFAULT_JITTER)
}

pub fn ridge_solve_with_jitter(
    g: ArrayView2<f64>,
    y: ArrayView1<f64>,
    lambda: f64,
    n_scale: usize,
    jitter: f64,
) -> Result<Array1<f64>> {
    let (n, p) = g.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("ridge penalty must be >= 0, got {lambda}")));
    }
    if n_scale == 0 {
        return Err(Error::invalid("n_scale must be positive"));
    }
    if !g.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("design matrix"));
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("response"));
    }
    if p == 0 {
        return Ok(Array1::zeros(0));
    }
    let shift = n_scale as f64 * lambda;
    if p <= n {
        let gram = g.t().dot(&g);
        let rhs = g.t().dot(&y);
        solve_shifted_gram(&gram, rhs.view(), shift, jitter)
    } else {
        let gram = g.dot(&g.t());
        let alpha = solve_shifted_gram(&gram, y, shift, jitter)?;
        Ok(g.t().dot(&alpha))
    }
}

/// `|(G^T G / n_scale + lambda I) w - G^T y / n_scale|_inf`.
pub fn normal_equation_residual(
    g: ArrayView2<f64>,
    y: ArrayView1<f64>,
    w: ArrayView1<f64>,
    lambda: f64,
    n_scale: usize,
) -> f64 {
    let ns = n_scale as f64;
    let fitted = g.dot(&w);
    let lhs = g.t().dot(&fitted) / ns + &(&w * lambda);
    let rhs = g.t().dot(&y) / ns;
    (&lhs - &rhs).iter().fold(0.0, |m, v| m.max(v.abs()))
}
