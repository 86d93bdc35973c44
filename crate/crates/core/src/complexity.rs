//! Monte-Carlo Rademacher and Gaussian complexities of penalty-constrained
//! network classes,
//! `E_s sup_{g in G} |(1/n) sum_i s_i g(x_i)|`.
//!
//! # Search
//!
//! For the ball classes `{g : J(g) <= M}` with `J` positively homogeneous in
//! the outer weights, the supremum over outer weights at fixed inner
//! parameters is attained on the boundary `J = M` by putting all mass on a
//! single neuron: with per-neuron correlation `u_j = (1/n) sum_i s_i sigma(theta_j^T x_i + b_j)`
//! and per-neuron penalty weight `w_j` (`|(theta_j, b_j)|` for the path norm,
//! `1` for the outer L1 norm) the value is `M max_j |u_j| / w_j`. Projecting
//! outer weights this way, the search reduces to normalized gradient ascent
//! on each neuron's inner parameters, restarted `restarts` times from random
//! networks of width `k`. Every visited point is a member of the class, so
//! the result is a lower estimate of the true supremum.
//!
//! The search is run once on the `M = 1` class and scaled by `M`, which makes
//! estimates exactly homogeneous in `M` under shared seeds.

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Activation, ShallowNet};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplier {
    Rademacher,
    Gaussian,
}

impl Multiplier {
    fn sample(self, rng: &mut Rng) -> f64 {
        match self {
            Multiplier::Rademacher => {
                if rand::Rng::random::<bool>(rng) {
                    1.0
                } else {
                    -1.0
                }
            }
            Multiplier::Gaussian => StandardNormal.sample(rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ComplexityClass {
    /// `{g in N_k : sum_j |a_j| |(theta_j, b_j)| <= M}`
    PathNormBall { m: f64, k: usize, activation: Activation },
    /// `{g in N_k : sum_j |a_j| <= M}`
    L1OuterBall { m: f64, k: usize, activation: Activation },
    /// Constant functions `{g = c : |c| <= M}`.
    ConstantBall { m: f64 },
    Singleton { net: ShallowNet },
}

impl ComplexityClass {
    pub fn name(&self) -> &'static str {
        match self {
            ComplexityClass::PathNormBall { .. } => "path_norm_ball",
            ComplexityClass::L1OuterBall { .. } => "l1_outer_ball",
            ComplexityClass::ConstantBall { .. } => "constant_ball",
            ComplexityClass::Singleton { .. } => "singleton",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            ComplexityClass::PathNormBall { m, .. }
            | ComplexityClass::L1OuterBall { m, .. }
            | ComplexityClass::ConstantBall { m } => Some(*m),
            ComplexityClass::Singleton { .. } => None,
        }
    }

    pub fn width(&self) -> Option<usize> {
        match self {
            ComplexityClass::PathNormBall { k, .. } | ComplexityClass::L1OuterBall { k, .. } => Some(*k),
            ComplexityClass::Singleton { net } => Some(net.k()),
            ComplexityClass::ConstantBall { .. } => None,
        }
    }

    /// Copy of a ball class with a different radius.
    pub fn with_radius(&self, radius: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            ComplexityClass::PathNormBall { m, .. }
            | ComplexityClass::L1OuterBall { m, .. }
            | ComplexityClass::ConstantBall { m } => *m = radius,
            ComplexityClass::Singleton { .. } => {}
        }
        out
    }

    fn validate(&self, d: usize) -> Result<()> {
        if let Some(m) = self.radius() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::invalid(format!("ball radius must be positive, got {m}")));
            }
        }
        match self {
            ComplexityClass::PathNormBall { k, activation, .. } => {
                if *k == 0 {
                    return Err(Error::invalid("k must be at least 1"));
                }
                // sigma(0) != 0 makes the ball unbounded as |(theta, b)| -> 0.
                if *activation != Activation::Relu {
                    return Err(Error::UnsupportedClass("path-norm ball needs ReLU activation".into()));
                }
            }
            ComplexityClass::L1OuterBall { k, activation, .. } => {
                if *k == 0 {
                    return Err(Error::invalid("k must be at least 1"));
                }
                // Unbounded inner weights make the ReLU version unbounded.
                if *activation != Activation::Sigmoid {
                    return Err(Error::UnsupportedClass("outer-L1 ball needs Sigmoid activation".into()));
                }
            }
            ComplexityClass::Singleton { net } => {
                if net.d() != d {
                    return Err(Error::DimensionMismatch { expected: net.d(), got: d });
                }
            }
            ComplexityClass::ConstantBall { .. } => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub restarts: usize,
    pub steps: usize,
    pub step_size: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 32, steps: 200, step_size: 0.05 }
    }
}

/// One estimate, serialized as a JSON record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub class: String,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub k: Option<usize>,
    pub n: usize,
    pub d: usize,
    pub multiplier: Multiplier,
    pub draws: usize,
    pub value: f64,
    pub std_err: f64,
    pub seed: u64,
    /// Search-based estimates only bound the supremum from below.
    pub lower_estimate: bool,
}

pub fn complexity_estimate(
    class: &ComplexityClass,
    x: ArrayView2<f64>,
    draws: usize,
    multiplier: Multiplier,
    search: &SearchConfig,
    seed: u64,
) -> Result<ComplexityEstimate> {
    let (n, d) = x.dim();
    if draws == 0 {
        return Err(Error::invalid("draws must be at least 1"));
    }
    if n == 0 {
        return Err(Error::invalid("need at least one point"));
    }
    class.validate(d)?;
    if matches!(class, ComplexityClass::PathNormBall { .. } | ComplexityClass::L1OuterBall { .. })
        && (search.restarts == 0 || !(search.step_size > 0.0))
    {
        return Err(Error::invalid("search needs restarts >= 1 and a positive step size"));
    }

    let xt = ndarray::concatenate![Axis(1), x, Array2::ones((n, 1))];
    let singleton_values = match class {
        ComplexityClass::Singleton { net } => Some(net.eval(x)?),
        _ => None,
    };

    let mut per_draw = Vec::with_capacity(draws);
    for draw in 0..draws {
        let mut mult_rng = rng::stream(seed, &[rng::tag("multiplier"), draw as u64]);
        let s = Array1::from_shape_simple_fn(n, || multiplier.sample(&mut mult_rng));
        let value = match class {
            ComplexityClass::Singleton { .. } => {
                let g = singleton_values.as_ref().expect("evaluated above");
                s.dot(g).abs() / n as f64
            }
            ComplexityClass::ConstantBall { m } => m * s.sum().abs() / n as f64,
            ComplexityClass::PathNormBall { m, k, .. } => {
                let mut search_rng = rng::stream(seed, &[rng::tag("search"), draw as u64]);
                m * unit_sup_relu_path(xt.view(), &s, *k, search, &mut search_rng)
            }
            ComplexityClass::L1OuterBall { m, k, .. } => {
                let mut search_rng = rng::stream(seed, &[rng::tag("search"), draw as u64]);
                m * unit_sup_sigmoid_l1(xt.view(), &s, *k, search, &mut search_rng)
            }
        };
        per_draw.push(value);
    }

    let nd = draws as f64;
    let mean = per_draw.iter().sum::<f64>() / nd;
    let std_err = if draws > 1 {
        let var = per_draw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nd - 1.0);
        (var / nd).sqrt()
    } else {
        0.0
    };
    Ok(ComplexityEstimate {
        class: class.name().to_string(),
        m: class.radius(),
        k: class.width(),
        n,
        d,
        multiplier,
        draws,
        value: mean,
        std_err,
        seed,
        lower_estimate: matches!(
            class,
            ComplexityClass::PathNormBall { .. } | ComplexityClass::L1OuterBall { .. }
        ),
    })
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng))
}

fn normalize_columns(w: &mut Array2<f64>) {
    for mut col in w.columns_mut() {
        let norm = col.dot(&col).sqrt();
        if norm > 0.0 {
            col /= norm;
        }
    }
}

/// `max_j |u_j| / |w_j|` over ReLU neurons `w_j` on the unit sphere of `R^{d+1}`.
fn unit_sup_relu_path(xt: ArrayView2<f64>, s: &Array1<f64>, k: usize, cfg: &SearchConfig, rng: &mut Rng) -> f64 {
    let (n, q) = xt.dim();
    let inv_n = 1.0 / n as f64;
    let mut best = 0.0f64;
    for _ in 0..cfg.restarts {
        // Columns are neurons.
        let mut w = gaussian_matrix(q, k, rng);
        normalize_columns(&mut w);
        for step in 0..=cfg.steps {
            let z = xt.dot(&w);
            let mut act = z.mapv(|t| t.max(0.0));
            let u = act.t().dot(s) * inv_n;
            best = u.iter().fold(best, |b, v| b.max(v.abs()));
            if step == cfg.steps {
                break;
            }
            // Gradient of sign(u_j) u_j(w_j): (1/n) sum_i s_i 1(z_ij > 0) x~_i
            Zip::from(&mut act).and(&z).for_each(|g, &t| *g = if t > 0.0 { 1.0 } else { 0.0 });
            act *= &s.view().insert_axis(Axis(1));
            let grad = xt.t().dot(&act) * inv_n;
            for (j, mut col) in w.columns_mut().into_iter().enumerate() {
                let sign = u[j].signum();
                // Tangential part; u_j = g_j . w_j by homogeneity.
                let mut t = &grad.column(j) * sign - &(&col * u[j].abs());
                let norm = t.dot(&t).sqrt();
                if norm > 0.0 && u[j] != 0.0 {
                    t *= cfg.step_size / norm;
                    col += &t;
                    let cn = col.dot(&col).sqrt();
                    col /= cn;
                }
            }
        }
    }
    best
}

/// `max_j |u_j|` over unconstrained Sigmoid neurons.
fn unit_sup_sigmoid_l1(xt: ArrayView2<f64>, s: &Array1<f64>, k: usize, cfg: &SearchConfig, rng: &mut Rng) -> f64 {
    let n = xt.nrows();
    let q = xt.ncols();
    let inv_n = 1.0 / n as f64;
    let sig = Activation::Sigmoid;
    let mut best = 0.0f64;
    for _ in 0..cfg.restarts {
        let mut w = gaussian_matrix(q, k, rng);
        for step in 0..=cfg.steps {
            let z = xt.dot(&w);
            let act = z.mapv(|t| sig.apply(t));
            let u = act.t().dot(s) * inv_n;
            best = u.iter().fold(best, |b, v| b.max(v.abs()));
            if step == cfg.steps {
                break;
            }
            let mut dz = &act * &act.mapv(|a| 1.0 - a);
            dz *= &s.view().insert_axis(Axis(1));
            let grad = xt.t().dot(&dz) * inv_n;
            for (j, mut col) in w.columns_mut().into_iter().enumerate() {
                let g = &grad.column(j) * u[j].signum();
                let norm = g.dot(&g).sqrt();
                if norm > 0.0 {
                    col.scaled_add(cfg.step_size / norm, &g);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::sample_ball;

    fn quick() -> SearchConfig {
        SearchConfig { restarts: 2, steps: 20, step_size: 0.05 }
    }

    #[test]
    fn zero_singleton_is_zero() {
        let x = sample_ball(20, 3, 1).unwrap();
        let class = ComplexityClass::Singleton { net: ShallowNet::zeros(4, 3, Activation::Relu) };
        let est = complexity_estimate(&class, x.view(), 50, Multiplier::Rademacher, &quick(), 2).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.std_err, 0.0);
        assert!(!est.lower_estimate);
    }

    #[test]
    fn constants_on_one_point_give_radius() {
        let x = sample_ball(1, 2, 1).unwrap();
        let class = ComplexityClass::ConstantBall { m: 2.5 };
        let est = complexity_estimate(&class, x.view(), 30, Multiplier::Rademacher, &quick(), 4).unwrap();
        assert_eq!(est.value, 2.5);
    }

    #[test]
    fn ball_estimates_scale_with_radius() {
        let x = sample_ball(32, 2, 5).unwrap();
        for (m, k, act) in [(0.7, 4, Activation::Relu), (1.3, 3, Activation::Sigmoid)] {
            let class = if act == Activation::Relu {
                ComplexityClass::PathNormBall { m, k, activation: act }
            } else {
                ComplexityClass::L1OuterBall { m, k, activation: act }
            };
            for mult in [Multiplier::Rademacher, Multiplier::Gaussian] {
                let one = complexity_estimate(&class, x.view(), 10, mult, &quick(), 8).unwrap();
                let two = complexity_estimate(&class.with_radius(2.0 * m), x.view(), 10, mult, &quick(), 8).unwrap();
                assert!((two.value / one.value - 2.0).abs() <= 1e-9);
                assert!(one.value > 0.0);
            }
        }
    }

    #[test]
    fn relu_search_improves_on_initial_neurons() {
        let x = sample_ball(64, 2, 9).unwrap();
        let class = ComplexityClass::PathNormBall { m: 1.0, k: 2, activation: Activation::Relu };
        let none = SearchConfig { restarts: 1, steps: 0, step_size: 0.05 };
        let some = SearchConfig { restarts: 1, steps: 100, step_size: 0.05 };
        let a = complexity_estimate(&class, x.view(), 20, Multiplier::Rademacher, &none, 1).unwrap();
        let b = complexity_estimate(&class, x.view(), 20, Multiplier::Rademacher, &some, 1).unwrap();
        assert!(b.value >= a.value);
    }

    #[test]
    fn unsupported_pairings_and_bad_arguments() {
        let x = sample_ball(10, 2, 1).unwrap();
        let s = quick();
        let bad = ComplexityClass::PathNormBall { m: 1.0, k: 3, activation: Activation::Sigmoid };
        assert!(matches!(
            complexity_estimate(&bad, x.view(), 5, Multiplier::Rademacher, &s, 0),
            Err(Error::UnsupportedClass(_))
        ));
        let bad = ComplexityClass::L1OuterBall { m: 1.0, k: 3, activation: Activation::Relu };
        assert!(complexity_estimate(&bad, x.view(), 5, Multiplier::Rademacher, &s, 0).is_err());
        let ok = ComplexityClass::ConstantBall { m: 1.0 };
        assert!(complexity_estimate(&ok, x.view(), 0, Multiplier::Rademacher, &s, 0).is_err());
        let neg = ComplexityClass::ConstantBall { m: -1.0 };
        assert!(complexity_estimate(&neg, x.view(), 3, Multiplier::Rademacher, &s, 0).is_err());
    }

    #[test]
    fn record_fields() {
        let x = sample_ball(8, 2, 1).unwrap();
        let class = ComplexityClass::PathNormBall { m: 1.0, k: 4, activation: Activation::Relu };
        let est = complexity_estimate(&class, x.view(), 3, Multiplier::Gaussian, &quick(), 11).unwrap();
        let json = serde_json::to_value(&est).unwrap();
        for key in ["class", "M", "k", "n", "d", "multiplier", "draws", "value", "std_err", "seed"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["multiplier"], "gaussian");
    }
}
