//! Sweep manifests: one JSON document, optionally overridden by flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use shallownet::fit::{scheduled_lambda, FitConfig};
use shallownet::{Activation, ModelId, PenaltyKind};

use crate::error::{CliError, Result};

/// Default penalty grid; the figure being reproduced does not list its values.
pub const DEFAULT_LAMBDAS: [f64; 5] = [0.0, 1e-4, 1e-3, 1e-2, 1e-1];

/// Either explicit penalty strengths or the per-`k` schedule with constant `c`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaGrid {
    Values(Vec<f64>),
    Schedule { c: f64 },
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid::Values(DEFAULT_LAMBDAS.to_vec())
    }
}

impl LambdaGrid {
    pub fn len(&self) -> usize {
        match self {
            LambdaGrid::Values(v) => v.len(),
            LambdaGrid::Schedule { .. } => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column labels, one per grid entry.
    pub fn labels(&self) -> Vec<String> {
        match self {
            LambdaGrid::Values(v) => v.iter().map(|l| format!("{l}")).collect(),
            LambdaGrid::Schedule { .. } => vec![self.to_string()],
        }
    }

    /// Penalty strengths in effect at width `k`.
    pub fn resolve(&self, n: usize, k: usize, beta: f64) -> Result<Vec<f64>> {
        match self {
            LambdaGrid::Values(v) => Ok(v.clone()),
            LambdaGrid::Schedule { c } => Ok(vec![scheduled_lambda(n, k, beta, *c)?]),
        }
    }
}

impl fmt::Display for LambdaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaGrid::Values(v) => {
                let parts: Vec<String> = v.iter().map(|l| l.to_string()).collect();
                f.write_str(&parts.join(","))
            }
            LambdaGrid::Schedule { c } => write!(f, "schedule:c={c}"),
        }
    }
}

impl FromStr for LambdaGrid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("schedule:") {
            let c = rest
                .strip_prefix("c=")
                .ok_or_else(|| CliError::config(format!("expected schedule:c=<value>, got `{s}`")))?;
            let c: f64 = c.parse().map_err(|_| CliError::config(format!("bad schedule constant `{c}`")))?;
            return Ok(LambdaGrid::Schedule { c });
        }
        parse_list(s).map(LambdaGrid::Values)
    }
}

impl Serialize for LambdaGrid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LambdaGrid::Values(v) => v.serialize(s),
            LambdaGrid::Schedule { .. } => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(LambdaGrid::Values(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| CliError::config(format!("cannot parse list entry `{p}`"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub model_id: ModelId,
    pub n: usize,
    pub d: usize,
    pub sigma: f64,
    pub k_grid: Vec<usize>,
    pub lambda_grid: LambdaGrid,
    pub reps: usize,
    pub seed: u64,
    pub activation: Activation,
    pub penalty_kind: PenaltyKind,
    pub n_test: usize,
    pub output_dir: PathBuf,
    /// Growth exponent used by the schedule's regime rule.
    pub beta: f64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    pub fit: FitConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            model_id: ModelId::Fig2,
            n: 256,
            d: 8,
            sigma: 0.2,
            k_grid: vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512],
            lambda_grid: LambdaGrid::default(),
            reps: 10,
            seed: 0,
            activation: Activation::Relu,
            penalty_kind: PenaltyKind::L2Sum,
            n_test: 10_000,
            output_dir: PathBuf::from("out"),
            beta: 0.0,
            threads: 0,
            fit: FitConfig::default(),
        }
    }
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_grid.is_empty() {
            return Err(CliError::config("k_grid is empty"));
        }
        if self.k_grid.contains(&0) {
            return Err(CliError::config("k_grid entries must be at least 1"));
        }
        if self.lambda_grid.is_empty() {
            return Err(CliError::config("lambda_grid is empty"));
        }
        match &self.lambda_grid {
            LambdaGrid::Values(v) => {
                if let Some(l) = v.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
                    return Err(CliError::config(format!("penalty strengths must be >= 0, got {l}")));
                }
            }
            LambdaGrid::Schedule { c } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(CliError::config(format!("schedule constant must be positive, got {c}")));
                }
            }
        }
        if self.reps == 0 {
            return Err(CliError::config("reps must be at least 1"));
        }
        if self.n < 2 {
            return Err(CliError::config("n must be at least 2"));
        }
        if self.d < self.model_id.min_dim() {
            return Err(CliError::config(format!(
                "model {} needs d >= {}, got {}",
                self.model_id,
                self.model_id.min_dim(),
                self.d
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(CliError::config("sigma must be >= 0"));
        }
        if self.n_test < 2 {
            return Err(CliError::config("n_test must be at least 2"));
        }
        if !(0.0..0.5).contains(&self.beta) {
            return Err(CliError::config("beta must lie in [0, 0.5)"));
        }
        solver_for(self.activation, self.penalty_kind)?;
        self.fit.validate()?;
        Ok(())
    }
}

/// Which fitting routine handles an (activation, penalty) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    AlternatingRidge,
    SigmoidLasso,
}

pub fn solver_for(activation: Activation, penalty: PenaltyKind) -> Result<Solver> {
    match (activation, penalty) {
        (Activation::Relu, PenaltyKind::L2Sum) => Ok(Solver::AlternatingRidge),
        (Activation::Sigmoid, PenaltyKind::L1Outer) => Ok(Solver::SigmoidLasso),
        (a, p) => Err(CliError::config(format!(
            "no solver for activation {a} with penalty {p}; use relu+l2_sum or sigmoid+l1_outer"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_grid_forms() {
        assert_eq!("0, 1e-3".parse::<LambdaGrid>().unwrap(), LambdaGrid::Values(vec![0.0, 1e-3]));
        assert_eq!("schedule:c=0.5".parse::<LambdaGrid>().unwrap(), LambdaGrid::Schedule { c: 0.5 });
        assert!("schedule:0.5".parse::<LambdaGrid>().is_err());
        assert!("a,b".parse::<LambdaGrid>().is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let cfg = SweepConfig { lambda_grid: LambdaGrid::Schedule { c: 2.0 }, ..SweepConfig::default() };
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"schedule:c=2\""));
        let back: SweepConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let partial: SweepConfig = serde_json::from_str(r#"{"n": 32, "lambda_grid": [0.1]}"#).unwrap();
        assert_eq!(partial.n, 32);
        assert_eq!(partial.lambda_grid, LambdaGrid::Values(vec![0.1]));
        assert!(serde_json::from_str::<SweepConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(SweepConfig::default().validate().is_ok());
        for bad in [
            SweepConfig { k_grid: vec![], ..SweepConfig::default() },
            SweepConfig { reps: 0, ..SweepConfig::default() },
            SweepConfig { lambda_grid: LambdaGrid::Values(vec![]), ..SweepConfig::default() },
            SweepConfig { d: 2, ..SweepConfig::default() },
            SweepConfig { penalty_kind: PenaltyKind::PathNorm, ..SweepConfig::default() },
        ] {
            assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
        }
    }

    #[test]
    fn full_figure_grid_is_accepted() {
        let cfg = SweepConfig {
            n: 1024,
            d: 32,
            k_grid: vec![1, 2, 3, 5, 7, 11, 17, 25, 38, 57, 86, 129, 194, 291, 437, 656, 985, 1477, 2216, 3325],
            ..SweepConfig::default()
        };
        assert!(cfg.validate().is_ok());
    }
}
