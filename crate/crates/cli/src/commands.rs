//! Subcommand bodies. Each writes its artifacts into an output directory.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shallownet::fit::FitConfig;
use shallownet::metrics::{aggregate, error_report, Aggregate, ErrorReport};
use shallownet::{
    build_relu_interpolant_1d, complexity_estimate, empirical_error, gen_zero_model, rng, sample_ball, Activation,
    BoundCurve, ComplexityClass, ComplexityEstimate, ModelId, Multiplier, PenaltyKind, SearchConfig, ShallowNet,
};

use crate::config::solver_for;
use crate::error::{CliError, Result};
use crate::sweep::{fit_one, write_json};

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub n: usize,
    pub sigma: f64,
    pub reps: usize,
    pub seed: u64,
    pub train_mse: Vec<f64>,
    pub empirical_error: Vec<f64>,
    pub max_train_mse: f64,
    pub empirical_error_summary: Option<Aggregate>,
}

/// Exact ReLU interpolation of pure-noise data, replicated.
pub fn interpolate_demo(n: usize, sigma: f64, reps: usize, seed: u64) -> Result<InterpolationReport> {
    if n < 2 {
        return Err(CliError::config("interpolate-demo needs n >= 2"));
    }
    if reps == 0 {
        return Err(CliError::config("reps must be at least 1"));
    }
    let mut train = Vec::with_capacity(reps);
    let mut emp = Vec::with_capacity(reps);
    for rep in 0..reps as u64 {
        let data = gen_zero_model(n, 1, sigma, rng::derive_seed(seed, &[rng::tag("interpolate"), rep]))?;
        let net = build_relu_interpolant_1d(data.x.column(0), data.y.view())?;
        let fitted = net.eval(data.x.view())?;
        train.push(empirical_error(fitted.view(), data.y.view())?);
        emp.push(empirical_error(fitted.view(), data.m_true.view())?);
    }
    Ok(InterpolationReport {
        n,
        sigma,
        reps,
        seed,
        max_train_mse: train.iter().copied().fold(0.0, f64::max),
        empirical_error_summary: aggregate(&emp).ok(),
        train_mse: train,
        empirical_error: emp,
    })
}

pub fn write_interpolate_demo(report: &InterpolationReport, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    write_json(report, &dir.join("interpolate_demo.json"))
}

/// Writes `theory.csv` (`k,value,regime`) and `theory.json` (header).
pub fn theory(alpha: f64, beta: f64, n: f64, c: f64, k_max: u64, dir: &Path) -> Result<BoundCurve> {
    let curve = BoundCurve::evaluate(alpha, beta, n, c, k_max)?;
    ensure_dir(dir)?;
    let path = dir.join("theory.csv");
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    curve.write_csv(BufWriter::new(file))?;
    write_json(&curve.header(), &dir.join("theory.json"))?;
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    /// ReLU networks with bounded path norm.
    PathNorm,
    /// Sigmoid networks with bounded outer l1 norm.
    L1Outer,
    Constant,
    /// The zero network alone.
    Zero,
}

impl std::str::FromStr for ClassKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path_norm" | "path-norm" => Ok(ClassKind::PathNorm),
            "l1_outer" | "l1-outer" => Ok(ClassKind::L1Outer),
            "constant" => Ok(ClassKind::Constant),
            "zero" => Ok(ClassKind::Zero),
            other => Err(CliError::config(format!("unknown complexity class `{other}`"))),
        }
    }
}

impl ClassKind {
    fn build(self, m: f64, k: usize, d: usize) -> ComplexityClass {
        match self {
            ClassKind::PathNorm => ComplexityClass::PathNormBall { m, k, activation: Activation::Relu },
            ClassKind::L1Outer => ComplexityClass::L1OuterBall { m, k, activation: Activation::Sigmoid },
            ClassKind::Constant => ComplexityClass::ConstantBall { m },
            ClassKind::Zero => ComplexityClass::Singleton { net: ShallowNet::zeros(k, d, Activation::Relu) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRequest {
    pub class: ClassKind,
    pub m_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub k_list: Vec<usize>,
    pub d: usize,
    pub draws: usize,
    pub seed: u64,
    pub multiplier: Multiplier,
    pub search: SearchConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    #[serde(rename = "M")]
    pub m: f64,
    pub k: usize,
    /// Least-squares slope of `ln value` on `ln n`; absent when undefined.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexitySummary {
    pub request: ComplexityRequest,
    pub slopes: Vec<SlopeFit>,
}

/// Points depend on `n` only and multipliers on `n` only, so estimates are
/// paired across radii and widths.
pub fn points_seed(seed: u64, n: usize) -> u64 {
    rng::derive_seed(seed, &[rng::tag("points"), n as u64])
}

pub fn estimate_seed(seed: u64, n: usize) -> u64 {
    rng::derive_seed(seed, &[rng::tag("estimate"), n as u64])
}

pub fn log_log_slope(ns: &[f64], values: &[f64]) -> Option<f64> {
    if ns.len() < 2 || values.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One estimate per `(M, n, k)` cell, in that nesting order.
pub fn complexity(req: &ComplexityRequest) -> Result<(Vec<ComplexityEstimate>, ComplexitySummary)> {
    if req.m_list.is_empty() || req.n_list.is_empty() || req.k_list.is_empty() {
        return Err(CliError::config("M, n and k lists must be nonempty"));
    }
    if req.d == 0 {
        return Err(CliError::config("d must be at least 1"));
    }
    let mut cells = Vec::new();
    for &m in &req.m_list {
        for &n in &req.n_list {
            for &k in &req.k_list {
                cells.push((m, n, k));
            }
        }
    }
    let records = cells
        .par_iter()
        .map(|&(m, n, k)| {
            let x = sample_ball(n, req.d, points_seed(req.seed, n))?;
            let class = req.class.build(m, k, req.d);
            let est =
                complexity_estimate(&class, x.view(), req.draws, req.multiplier, &req.search, estimate_seed(req.seed, n))?;
            Ok(est)
        })
        .collect::<Result<Vec<_>>>()?;

    let ns: Vec<f64> = req.n_list.iter().map(|&n| n as f64).collect();
    let mut slopes = Vec::new();
    for (mi, &m) in req.m_list.iter().enumerate() {
        for (ki, &k) in req.k_list.iter().enumerate() {
            let values: Vec<f64> = (0..req.n_list.len())
                .map(|ni| records[(mi * req.n_list.len() + ni) * req.k_list.len() + ki].value)
                .collect();
            slopes.push(SlopeFit { m, k, slope: log_log_slope(&ns, &values) });
        }
    }
    Ok((records, ComplexitySummary { request: req.clone(), slopes }))
}

/// Writes `complexity.jsonl` (one record per line) and `complexity_summary.json`.
pub fn write_complexity(records: &[ComplexityEstimate], summary: &ComplexitySummary, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let mut lines = String::new();
    for r in records {
        lines.push_str(&serde_json::to_string(r)?);
        lines.push('\n');
    }
    let path = dir.join("complexity.jsonl");
    fs::write(&path, lines).map_err(|e| CliError::io(&path, e))?;
    write_json(summary, &dir.join("complexity_summary.json"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRequest {
    pub model_id: ModelId,
    pub n: usize,
    pub d: usize,
    pub sigma: f64,
    pub k: usize,
    pub lambda: f64,
    pub seed: u64,
    pub activation: Activation,
    pub penalty_kind: PenaltyKind,
    pub n_test: usize,
    pub fit: FitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    pub request: FitRequest,
    pub result: shallownet::fit::FitResult,
    pub errors: ErrorReport,
}

pub fn fit(req: &FitRequest) -> Result<FitOutput> {
    let solver = solver_for(req.activation, req.penalty_kind)?;
    let data = shallownet::data::generate(req.model_id, req.n, req.d, req.sigma, req.seed)?;
    let result = fit_one(solver, &data, req.k, req.lambda, &req.fit)?;
    let errors = error_report(&result.net, &data, result.train_mse, req.n_test, req.seed, None)?;
    Ok(FitOutput { request: req.clone(), result, errors })
}
