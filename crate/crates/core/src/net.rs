//! Two-layer networks `f(x) = sum_j a_j sigma(theta_j^T x + b_j)` and the
//! penalty functionals used to regularize them.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    /// The logistic function `1 / (1 + e^-t)`.
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Activation::Relu => t.max(0.0),
            Activation::Sigmoid => {
                if t >= 0.0 {
                    1.0 / (1.0 + (-t).exp())
                } else {
                    let e = t.exp();
                    e / (1.0 + e)
                }
            }
        }
    }

    /// Derivative; for ReLU the value at 0 is taken as 0.
    #[inline]
    pub fn derivative(self, t: f64) -> f64 {
        match self {
            Activation::Relu => {
                if t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = self.apply(t);
                s * (1.0 - s)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            other => Err(Error::invalid(format!("unknown activation `{other}`"))),
        }
    }
}

/// Which penalty functional `J(g)` to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    /// `sum_j (|theta_j|^2 + b_j^2 + a_j^2)`
    L2Sum,
    /// `sum_j |a_j| |(theta_j, b_j)|_2`
    PathNorm,
    /// `sum_j |a_j|`
    L1Outer,
}

impl PenaltyKind {
    pub fn name(self) -> &'static str {
        match self {
            PenaltyKind::L2Sum => "l2_sum",
            PenaltyKind::PathNorm => "path_norm",
            PenaltyKind::L1Outer => "l1_outer",
        }
    }
}

impl fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PenaltyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2_sum" | "l2" => Ok(PenaltyKind::L2Sum),
            "path_norm" => Ok(PenaltyKind::PathNorm),
            "l1_outer" | "l1" => Ok(PenaltyKind::L1Outer),
            other => Err(Error::invalid(format!("unknown penalty `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    pub lambda: f64,
}

impl PenaltySpec {
    pub fn new(kind: PenaltyKind, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("penalty strength must be >= 0, got {lambda}")));
        }
        Ok(Self { kind, lambda })
    }
}

/// A shallow network with `k` hidden neurons on `d` inputs.
///
/// Parameters are immutable once constructed; solvers build new networks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetRepr", into = "NetRepr")]
pub struct ShallowNet {
    a: Array1<f64>,
    theta: Array2<f64>,
    b: Array1<f64>,
    activation: Activation,
}

#[derive(Serialize, Deserialize)]
struct NetRepr {
    activation: Activation,
    a: Vec<f64>,
    theta: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl From<ShallowNet> for NetRepr {
    fn from(net: ShallowNet) -> Self {
        NetRepr {
            activation: net.activation,
            a: net.a.to_vec(),
            theta: net.theta.rows().into_iter().map(|r| r.to_vec()).collect(),
            b: net.b.to_vec(),
        }
    }
}

impl TryFrom<NetRepr> for ShallowNet {
    type Error = Error;

    fn try_from(r: NetRepr) -> Result<Self> {
        let k = r.theta.len();
        let d = r.theta.first().map_or(0, Vec::len);
        if r.theta.iter().any(|row| row.len() != d) {
            return Err(Error::invalid("ragged theta rows"));
        }
        let flat: Vec<f64> = r.theta.into_iter().flatten().collect();
        let theta = Array2::from_shape_vec((k, d), flat).map_err(|e| Error::invalid(e.to_string()))?;
        ShallowNet::new(Array1::from(r.a), theta, Array1::from(r.b), r.activation)
    }
}

impl ShallowNet {
    pub fn new(a: Array1<f64>, theta: Array2<f64>, b: Array1<f64>, activation: Activation) -> Result<Self> {
        let k = theta.nrows();
        if a.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: a.len() });
        }
        if b.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: b.len() });
        }
        if theta.ncols() == 0 {
            return Err(Error::invalid("networks need at least one input dimension"));
        }
        if !a.iter().chain(theta.iter()).chain(b.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("network parameters"));
        }
        Ok(Self { a, theta, b, activation })
    }

    /// The all-zero network, `f = 0` with `J(f) = 0` for every penalty.
    pub fn zeros(k: usize, d: usize, activation: Activation) -> Self {
        Self {
            a: Array1::zeros(k),
            theta: Array2::zeros((k, d)),
            b: Array1::zeros(k),
            activation,
        }
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn d(&self) -> usize {
        self.theta.ncols()
    }

    pub fn a(&self) -> &Array1<f64> {
        &self.a
    }

    pub fn theta(&self) -> &Array2<f64> {
        &self.theta
    }

    pub fn b(&self) -> &Array1<f64> {
        &self.b
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Same inner layer, new outer weights.
    pub fn with_outer(&self, a: Array1<f64>) -> Result<Self> {
        Self::new(a, self.theta.clone(), self.b.clone(), self.activation)
    }

    /// `theta_j^T x_i + b_j` for every row of `x`, shape `m x k`.
    pub fn pre_activations(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: x.ncols() });
        }
        let mut z = x.dot(&self.theta.t());
        z += &self.b.view().insert_axis(Axis(0));
        Ok(z)
    }

    /// Hidden-layer outputs `sigma(theta_j^T x_i + b_j)`, shape `m x k`.
    pub fn features(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        let act = self.activation;
        Ok(self.pre_activations(x)?.mapv_into(|t| act.apply(t)))
    }

    pub fn eval(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        Ok(self.features(x)?.dot(&self.a))
    }

    pub fn eval_point(&self, x: ArrayView1<f64>) -> Result<f64> {
        self.eval(x.insert_axis(Axis(0)))
            .map(|v| v[0])
    }

    pub fn penalty(&self, kind: PenaltyKind) -> f64 {
        match kind {
            PenaltyKind::L2Sum => {
                self.a.dot(&self.a) + self.theta.iter().map(|v| v * v).sum::<f64>() + self.b.dot(&self.b)
            }
            PenaltyKind::PathNorm => self
                .theta
                .rows()
                .into_iter()
                .zip(self.a.iter().zip(self.b.iter()))
                .map(|(row, (a, b))| a.abs() * (row.dot(&row) + b * b).sqrt())
                .sum(),
            PenaltyKind::L1Outer => self.a.iter().map(|v| v.abs()).sum(),
        }
    }
}

/// Convenience wrapper around [`ShallowNet::eval`].
pub fn eval_network(net: &ShallowNet, x: ArrayView2<f64>) -> Result<Array1<f64>> {
    net.eval(x)
}

/// Clamps every value to `[-t, t]`.
pub fn truncate(values: ArrayView1<f64>, t: f64) -> Result<Array1<f64>> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("truncation level must be positive, got {t}")));
    }
    Ok(values.mapv(|v| v.clamp(-t, t)))
}

/// Exact ReLU interpolant of 1-D data.
///
/// Returns the continuous piecewise-linear function with knots at the sorted
/// data points, held constant outside `[min xs, max xs]`. The network has
/// `n + 1` neurons: one constant unit `relu(0 x + 1)` carrying the leftmost
/// value, and one unit `relu(x - x_j)` per knot whose weight is the change in
/// slope at that knot.
pub fn build_relu_interpolant_1d(xs: ArrayView1<f64>, ys: ArrayView1<f64>) -> Result<ShallowNet> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::invalid("interpolant needs at least one point"));
    }
    if ys.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ys.len() });
    }
    if !xs.iter().chain(ys.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("interpolation data"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let px: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let py: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
    if let Some(w) = px.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("duplicate abscissa {}", w[0])));
    }

    let slopes: Vec<f64> = (0..n.saturating_sub(1))
        .map(|j| (py[j + 1] - py[j]) / (px[j + 1] - px[j]))
        .collect();

    let k = n + 1;
    let mut a = Array1::zeros(k);
    let mut theta = Array2::zeros((k, 1));
    let mut b = Array1::zeros(k);

    a[0] = py[0];
    b[0] = 1.0;
    for j in 0..n {
        let left = if j == 0 { 0.0 } else { slopes[j - 1] };
        let right = slopes.get(j).copied().unwrap_or(0.0);
        a[j + 1] = right - left;
        theta[[j + 1, 0]] = 1.0;
        b[j + 1] = -px[j];
    }
    ShallowNet::new(a, theta, b, Activation::Relu)
}
