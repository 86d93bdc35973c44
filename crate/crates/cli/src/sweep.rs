//! The `(k, lambda, rep)` replication sweep.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shallownet::fit::{fit_alternating_ridge, fit_sigmoid_l1, FitConfig, FitResult};
use shallownet::metrics::{aggregate, error_report, Aggregate};
use shallownet::data::generate;
use shallownet::rng;

use crate::config::{solver_for, Solver, SweepConfig};
use crate::error::{CliError, Result};
use crate::svg;

/// One CSV row; field order is the file's column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub lambda: f64,
    pub rep: u64,
    pub seed: u64,
    pub train_mse: f64,
    pub empirical_error: f64,
    pub prediction_error: f64,
    pub pred_se: f64,
    pub penalty_value: f64,
    pub iters: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub k: usize,
    /// Index into the configured penalty grid.
    pub lambda_index: usize,
    pub lambda_label: String,
    pub lambda: f64,
    pub reps: usize,
    pub prediction: Option<Aggregate>,
    pub empirical: Option<Aggregate>,
    pub train_mse_mean: f64,
    pub prediction_mean: f64,
    /// Standard error of `prediction_mean` across replications.
    pub prediction_se: f64,
}

/// Best-penalty cell at each width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub k: usize,
    pub lambda_index: usize,
    pub lambda: f64,
    pub mean: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub config: SweepConfig,
    pub cells: Vec<CellSummary>,
    pub envelope: Vec<EnvelopePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

struct Cell {
    k: usize,
    lambda_index: usize,
    lambda: f64,
    rep: u64,
}

/// Data depend on the replication only, so every `(k, lambda)` sees the same samples.
pub fn data_seed(base: u64, rep: u64) -> u64 {
    rng::derive_seed(base, &[rng::tag("data"), rep])
}

fn init_seed(base: u64, k: usize, lambda: f64, rep: u64) -> u64 {
    rng::derive_seed(base, &[rng::tag("init"), k as u64, lambda.to_bits(), rep])
}

fn test_seed(base: u64, rep: u64) -> u64 {
    rng::derive_seed(base, &[rng::tag("test"), rep])
}

pub fn fit_one(solver: Solver, data: &shallownet::Dataset, k: usize, lambda: f64, cfg: &FitConfig) -> Result<FitResult> {
    Ok(match solver {
        Solver::AlternatingRidge => fit_alternating_ridge(data, k, lambda, cfg)?,
        Solver::SigmoidLasso => fit_sigmoid_l1(data, k, lambda, cfg)?,
    })
}

fn run_cell(cfg: &SweepConfig, solver: Solver, cell: &Cell) -> Result<SweepRow> {
    let seed = data_seed(cfg.seed, cell.rep);
    let data = generate(cfg.model_id, cfg.n, cfg.d, cfg.sigma, seed)?;
    let fit_cfg = FitConfig { init_seed: init_seed(cfg.seed, cell.k, cell.lambda, cell.rep), ..cfg.fit.clone() };
    let fit = fit_one(solver, &data, cell.k, cell.lambda, &fit_cfg)?;
    let report = error_report(&fit.net, &data, fit.train_mse, cfg.n_test, test_seed(cfg.seed, cell.rep), None)?;
    Ok(SweepRow {
        k: cell.k,
        lambda: cell.lambda,
        rep: cell.rep,
        seed,
        train_mse: fit.train_mse,
        empirical_error: report.empirical,
        prediction_error: report.prediction,
        pred_se: report.pred_se,
        penalty_value: fit.penalty_value,
        iters: fit.iters,
        converged: fit.converged,
    })
}

/// Runs every cell on a bounded pool; rows come back in `(k, lambda, rep)` order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let solver = solver_for(cfg.activation, cfg.penalty_kind)?;
    let mut cells = Vec::new();
    for &k in &cfg.k_grid {
        for (lambda_index, lambda) in cfg.lambda_grid.resolve(cfg.n, k, cfg.beta)?.into_iter().enumerate() {
            for rep in 0..cfg.reps as u64 {
                cells.push(Cell { k, lambda_index, lambda, rep });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    let rows = pool.install(|| cells.par_iter().map(|c| run_cell(cfg, solver, c)).collect::<Result<Vec<_>>>())?;
    let summary = summarize(cfg, &cells, &rows)?;
    Ok(SweepOutput { rows, summary })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn summarize(cfg: &SweepConfig, cells: &[Cell], rows: &[SweepRow]) -> Result<SweepSummary> {
    let labels = cfg.lambda_grid.labels();
    let mut out = Vec::new();
    for (chunk_cells, chunk_rows) in cells.chunks(cfg.reps).zip(rows.chunks(cfg.reps)) {
        let first = &chunk_cells[0];
        let pred: Vec<f64> = chunk_rows.iter().map(|r| r.prediction_error).collect();
        let emp: Vec<f64> = chunk_rows.iter().map(|r| r.empirical_error).collect();
        let train: Vec<f64> = chunk_rows.iter().map(|r| r.train_mse).collect();
        let prediction = aggregate(&pred).ok();
        out.push(CellSummary {
            k: first.k,
            lambda_index: first.lambda_index,
            lambda_label: labels[first.lambda_index].clone(),
            lambda: first.lambda,
            reps: chunk_rows.len(),
            prediction,
            empirical: aggregate(&emp).ok(),
            train_mse_mean: mean(&train),
            prediction_mean: mean(&pred),
            prediction_se: prediction.map_or(0.0, |a| a.std_err(pred.len())),
        });
    }
    let envelope = lower_envelope(&out);
    Ok(SweepSummary { config: cfg.clone(), cells: out, envelope })
}

/// `min_lambda` of the mean prediction error at each `k`; ties keep the smaller index.
pub fn lower_envelope(cells: &[CellSummary]) -> Vec<EnvelopePoint> {
    let mut env: Vec<EnvelopePoint> = Vec::new();
    for c in cells {
        let point = EnvelopePoint {
            k: c.k,
            lambda_index: c.lambda_index,
            lambda: c.lambda,
            mean: c.prediction_mean,
            se: c.prediction_se,
        };
        match env.last_mut() {
            Some(last) if last.k == c.k => {
                if point.mean < last.mean {
                    *last = point;
                }
            }
            _ => env.push(point),
        }
    }
    env
}

pub fn write_rows(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes `sweep.csv`, `summary.json` and `sweep.svg` into the output directory.
pub fn write_outputs(out: &SweepOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_rows(&out.rows, &dir.join("sweep.csv"))?;
    write_json(&out.summary, &dir.join("summary.json"))?;
    let plot = svg::sweep_plot(&out.summary);
    let path = dir.join("sweep.svg");
    fs::write(&path, plot).map_err(|e| CliError::io(&path, e))
}
