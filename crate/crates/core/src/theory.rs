//! Closed-form MISE bound curves as a function of the neuron count `k`.
//!
//! With approximation exponent `alpha`, penalty-growth exponent `beta` and
//! sample size `n`, the bound is
//!
//! ```text
//! MISE_beta(k) = c k^-alpha + c (ln n / n) min(k, T),
//! T = sqrt(n)               if beta = 0
//! T = n^(beta/2 + 3/4)      if 0 < beta < 1/2
//! ```
//!
//! and for `beta > 0` it only holds for `k <= c n^(1/2 + 1/(4 beta))`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{regime_of, regime_threshold, Regime};

/// Slack for deciding ties in [`classify_shape`].
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Monotone,
    DoubleDescent,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Monotone => "Monotone",
            Shape::DoubleDescent => "DoubleDescent",
        }
    }
}

fn check_common(alpha: f64, beta: f64, n: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(0.0..0.5).contains(&beta) {
        return Err(Error::invalid(format!("beta must lie in [0, 0.5), got {beta}")));
    }
    if !(n >= 2.0 && n.is_finite()) {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

/// Largest admissible `k` for `beta > 0`; `None` (unbounded) for `beta = 0`.
pub fn domain_cap(beta: f64, n: f64, c: f64) -> Option<f64> {
    (beta > 0.0).then(|| c * n.powf(0.5 + 0.25 / beta))
}

/// Bound value and regime at a (real) neuron count `k >= 1`.
pub fn mise_bound(alpha: f64, beta: f64, n: f64, k: f64, c: f64) -> Result<(f64, Regime)> {
    check_common(alpha, beta, n)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("c must be positive, got {c}")));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::invalid(format!("k must be at least 1, got {k}")));
    }
    if let Some(cap) = domain_cap(beta, n, c) {
        if k > cap {
            return Err(Error::invalid(format!("k = {k} exceeds the admissible range {cap}")));
        }
    }
    let threshold = regime_threshold(n, beta)?;
    let value = c * k.powf(-alpha) + c * (n.ln() / n) * k.min(threshold);
    Ok((value, regime_of(n, k, beta)?))
}

/// `Monotone` iff `alpha <= 1` (beta = 0) or `alpha <= (1 - 2 beta)/(3 + 2 beta)`.
/// Equality counts as monotone.
pub fn classify_shape(alpha: f64, beta: f64) -> Result<Shape> {
    check_common(alpha, beta, 2.0)?;
    let threshold = if beta == 0.0 { 1.0 } else { (1.0 - 2.0 * beta) / (3.0 + 2.0 * beta) };
    Ok(if alpha <= threshold + TIE_TOL { Shape::Monotone } else { Shape::DoubleDescent })
}

/// `(k_first, k_second) = (n^(1/(alpha+1)), T)` with unit constants.
pub fn breakpoints(alpha: f64, beta: f64, n: f64) -> Result<(f64, f64)> {
    check_common(alpha, beta, n)?;
    Ok((n.powf(1.0 / (alpha + 1.0)), regime_threshold(n, beta)?))
}

/// `1 / sqrt(n ln n)`, the minimax lower-bound rate without its constant.
pub fn minimax_reference(n: f64) -> Result<f64> {
    if !(n > 1.0 && n.is_finite()) {
        return Err(Error::invalid(format!("minimax reference needs n > 1, got {n}")));
    }
    Ok(1.0 / (n * n.ln()).sqrt())
}

/// A bound curve evaluated on `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
    pub c: f64,
    pub k_grid: Vec<u64>,
    pub values: Vec<f64>,
    pub regimes: Vec<Regime>,
    pub shape: Shape,
    pub k_first: f64,
    pub k_second: f64,
}

/// Header written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurveHeader {
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
    pub c: f64,
    pub shape: Shape,
    pub k_first: f64,
    pub k_second: f64,
    pub k_max: u64,
    pub minimax_reference: Option<f64>,
}

impl BoundCurve {
    pub fn evaluate(alpha: f64, beta: f64, n: f64, c: f64, k_max: u64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        let k_grid: Vec<u64> = (1..=k_max).collect();
        let mut values = Vec::with_capacity(k_grid.len());
        let mut regimes = Vec::with_capacity(k_grid.len());
        for &k in &k_grid {
            let (v, r) = mise_bound(alpha, beta, n, k as f64, c)?;
            values.push(v);
            regimes.push(r);
        }
        let (k_first, k_second) = breakpoints(alpha, beta, n)?;
        Ok(Self {
            alpha,
            beta,
            n,
            c,
            k_grid,
            values,
            regimes,
            shape: classify_shape(alpha, beta)?,
            k_first,
            k_second,
        })
    }

    pub fn header(&self) -> BoundCurveHeader {
        BoundCurveHeader {
            alpha: self.alpha,
            beta: self.beta,
            n: self.n,
            c: self.c,
            shape: self.shape,
            k_first: self.k_first,
            k_second: self.k_second,
            k_max: self.k_grid.last().copied().unwrap_or(0),
            minimax_reference: minimax_reference(self.n).ok(),
        }
    }

    /// Writes `k,value,regime` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "value", "regime"])?;
        for ((k, v), r) in self.k_grid.iter().zip(&self.values).zip(&self.regimes) {
            w.write_record([k.to_string(), v.to_string(), r.name().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_at_sqrt_n() {
        let (v, r) = mise_bound(1.0, 0.0, 100.0, 10.0, 1.0).unwrap();
        assert!((v - 0.56052).abs() < 1e-5);
        assert_eq!(r, Regime::SmallK);
        let (_, r) = mise_bound(1.0, 0.0, 100.0, 11.0, 1.0).unwrap();
        assert_eq!(r, Regime::LargeK);
    }

    #[test]
    fn large_k_limit_is_plateau() {
        let n: f64 = 400.0;
        let (v, _) = mise_bound(1.0, 0.0, n, 1e12, 1.0).unwrap();
        assert!((v - n.ln() / n.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn domain_cap_for_positive_beta() {
        assert!((domain_cap(0.25, 256.0, 1.0).unwrap() - 4096.0).abs() < 1e-9);
        assert!(domain_cap(0.0, 256.0, 1.0).is_none());
        assert!(mise_bound(1.0, 0.25, 256.0, 4096.0, 1.0).is_ok());
        assert!(mise_bound(1.0, 0.25, 256.0, 4097.0, 1.0).is_err());
    }

    #[test]
    fn linear_in_constant() {
        let (one, _) = mise_bound(1.5, 0.1, 500.0, 37.0, 1.0).unwrap();
        let (three, _) = mise_bound(1.5, 0.1, 500.0, 37.0, 3.0).unwrap();
        assert!((three - 3.0 * one).abs() <= 1e-15 * three);
    }

    #[test]
    fn shape_cases() {
        assert_eq!(classify_shape(0.5, 0.0).unwrap(), Shape::Monotone);
        assert_eq!(classify_shape(2.0, 0.0).unwrap(), Shape::DoubleDescent);
        assert_eq!(classify_shape(1.0, 0.0).unwrap(), Shape::Monotone);
        assert_eq!(classify_shape(0.2, 0.25).unwrap(), Shape::DoubleDescent);
        assert_eq!(classify_shape(0.14, 0.25).unwrap(), Shape::Monotone);
        // (1 - 0.2) / (3 + 0.2) = 0.25: a tie.
        assert_eq!(classify_shape(0.25, 0.1).unwrap(), Shape::Monotone);
        assert!(classify_shape(1.0, 0.5).is_err());
    }

    #[test]
    fn breakpoint_cases() {
        let (a, b) = breakpoints(1.0, 0.0, 1e4).unwrap();
        assert!((a - 100.0).abs() < 1e-9 && (b - 100.0).abs() < 1e-9);
        let (a, b) = breakpoints(3.0, 0.0, 1e4).unwrap();
        assert!((a - 10.0).abs() < 1e-9 && (b - 100.0).abs() < 1e-9);
        // 256^(1/8 + 3/4) = 2^(8 * 7/8) = 128
        let (_, b) = breakpoints(1.0, 0.25, 256.0).unwrap();
        assert!((b - 128.0).abs() < 1e-9);
    }

    #[test]
    fn minimax_cases() {
        let e = std::f64::consts::E;
        assert!((minimax_reference(e).unwrap() - 1.0 / e.sqrt()).abs() < 1e-15);
        // 1 / sqrt(100 * 4.605170186) = 1 / 21.45966
        assert!((minimax_reference(100.0).unwrap() - 0.0465991).abs() < 1e-7);
        let vals: Vec<f64> = (3..200).map(|n| minimax_reference(n as f64).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn curve_csv_rows() {
        let curve = BoundCurve::evaluate(2.0, 0.0, 1e4, 1.0, 50).unwrap();
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 51);
        assert!(text.starts_with("k,value,regime\n1,"));
        assert_eq!(curve.header().shape, Shape::DoubleDescent);
    }
}
