use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the neuron-count threshold a network sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    SmallK,
    LargeK,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::SmallK => "SmallK",
            Regime::LargeK => "LargeK",
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..0.5).contains(&beta) {
        return Err(Error::invalid(format!("beta must lie in [0, 0.5), got {beta}")));
    }
    Ok(())
}

/// `sqrt(n)` for `beta = 0`, otherwise `n^(beta/2 + 3/4)`.
pub fn regime_threshold(n: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(if beta == 0.0 { n.sqrt() } else { n.powf(0.5 * beta + 0.75) })
}

/// `SmallK` iff `k <= threshold`. Both branches agree at the threshold.
pub fn regime_of(n: f64, k: f64, beta: f64) -> Result<Regime> {
    Ok(if k <= regime_threshold(n, beta)? { Regime::SmallK } else { Regime::LargeK })
}

/// Penalty strength for a given regime:
/// `SmallK: c max{1/k, k ln n / n}`, `LargeK: c ln n / sqrt(n)`.
pub fn lambda_schedule(regime: Regime, n: usize, k: usize, beta: f64, c: f64) -> Result<f64> {
    check_beta(beta)?;
    if n < 2 {
        return Err(Error::invalid("schedule needs n >= 2"));
    }
    if k == 0 {
        return Err(Error::invalid("schedule needs k >= 1"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("schedule constant must be positive, got {c}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let ln_n = nf.ln();
    Ok(match regime {
        Regime::SmallK => c * (1.0 / kf).max(kf * ln_n / nf),
        Regime::LargeK => c * ln_n / nf.sqrt(),
    })
}

/// [`lambda_schedule`] with the regime picked from `(n, k, beta)`.
pub fn scheduled_lambda(n: usize, k: usize, beta: f64, c: f64) -> Result<f64> {
    let regime = regime_of(n as f64, k as f64, beta)?;
    lambda_schedule(regime, n, k, beta, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_k_at_one_neuron() {
        let l = lambda_schedule(Regime::SmallK, 100, 1, 0.0, 1.0).unwrap();
        assert_eq!(l, 1.0);
    }

    #[test]
    fn large_k_value() {
        let l = lambda_schedule(Regime::LargeK, 100, 500, 0.0, 1.0).unwrap();
        assert!((l - 0.46052).abs() < 1e-5);
    }

    #[test]
    fn linear_in_constant() {
        for regime in [Regime::SmallK, Regime::LargeK] {
            let one = lambda_schedule(regime, 300, 7, 0.2, 1.5).unwrap();
            let two = lambda_schedule(regime, 300, 7, 0.2, 3.0).unwrap();
            assert_eq!(two, 2.0 * one);
        }
    }

    #[test]
    fn regimes_follow_threshold() {
        assert_eq!(regime_of(100.0, 10.0, 0.0).unwrap(), Regime::SmallK);
        assert_eq!(regime_of(100.0, 11.0, 0.0).unwrap(), Regime::LargeK);
        // 256^(0.125 + 0.75) = 2^7
        assert_eq!(regime_of(256.0, 128.0, 0.25).unwrap(), Regime::SmallK);
        assert_eq!(regime_of(256.0, 129.0, 0.25).unwrap(), Regime::LargeK);
    }

    #[test]
    fn branches_agree_at_sqrt_n() {
        let small = lambda_schedule(Regime::SmallK, 10_000, 100, 0.0, 1.0).unwrap();
        let large = lambda_schedule(Regime::LargeK, 10_000, 100, 0.0, 1.0).unwrap();
        assert!((small - large).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_arguments() {
        assert!(lambda_schedule(Regime::SmallK, 100, 1, 0.5, 1.0).is_err());
        assert!(lambda_schedule(Regime::SmallK, 1, 1, 0.0, 1.0).is_err());
        assert!(lambda_schedule(Regime::SmallK, 100, 0, 0.0, 1.0).is_err());
        assert!(lambda_schedule(Regime::SmallK, 100, 1, 0.0, 0.0).is_err());
    }
}
