//! Argument parsing and dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use shallownet::fit::FitConfig;
use shallownet::{Activation, ModelId, Multiplier, PenaltyKind, SearchConfig};

use crate::commands::{self, ClassKind, ComplexityRequest, FitRequest};
use crate::config::{parse_list, LambdaGrid, SweepConfig};
use crate::error::{CliError, Result};
use crate::sweep;

#[derive(Debug, Parser)]
#[command(name = "shallownet", version, about = "Penalized shallow-network regression experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interpolate pure-noise data exactly and report the resulting errors.
    InterpolateDemo(InterpolateArgs),
    /// Replicated fits over a grid of widths and penalties.
    Sweep(SweepArgs),
    /// Evaluate the closed-form risk bound over k = 1..k_max.
    Theory(TheoryArgs),
    /// Monte-Carlo complexity estimates of penalty balls.
    Complexity(ComplexityArgs),
    /// A single fit; prints the result as JSON.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
pub struct InterpolateArgs {
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON manifest; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<ModelId>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Comma-separated widths.
    #[arg(long)]
    pub k_grid: Option<String>,
    /// Comma-separated penalties, or `schedule:c=<value>`.
    #[arg(long)]
    pub lambda_grid: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub activation: Option<Activation>,
    #[arg(long)]
    pub penalty: Option<PenaltyKind>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl SweepArgs {
    pub fn resolve(&self) -> Result<SweepConfig> {
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::load(path)?,
            None => SweepConfig::default(),
        };
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.model {
            cfg.model_id = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.d {
            cfg.d = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = &self.k_grid {
            cfg.k_grid = parse_list(v)?;
        }
        if let Some(v) = &self.lambda_grid {
            cfg.lambda_grid = v.parse::<LambdaGrid>()?;
        }
        if let Some(v) = self.reps {
            cfg.reps = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.activation {
            cfg.activation = v;
        }
        if let Some(v) = self.penalty {
            cfg.penalty_kind = v;
        }
        if let Some(v) = self.n_test {
            cfg.n_test = v;
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        if let Some(v) = self.max_iters {
            cfg.fit.max_outer_iters = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long)]
    pub n: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long)]
    pub k_max: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn parse_multiplier(s: &str) -> std::result::Result<Multiplier, String> {
    match s {
        "rademacher" => Ok(Multiplier::Rademacher),
        "gaussian" => Ok(Multiplier::Gaussian),
        other => Err(format!("unknown multiplier `{other}`")),
    }
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    /// path_norm, l1_outer, constant or zero.
    #[arg(long, default_value = "path_norm")]
    pub class: ClassKind,
    #[arg(long, default_value = "1")]
    pub m_list: String,
    #[arg(long, default_value = "64,256,1024")]
    pub n_list: String,
    #[arg(long, default_value = "64")]
    pub k_list: String,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, default_value_t = 200)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "rademacher", value_parser = parse_multiplier)]
    pub multiplier: Multiplier,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub step_size: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl ComplexityArgs {
    pub fn resolve(&self) -> Result<ComplexityRequest> {
        let base = SearchConfig::default();
        Ok(ComplexityRequest {
            class: self.class,
            m_list: parse_list(&self.m_list)?,
            n_list: parse_list(&self.n_list)?,
            k_list: parse_list(&self.k_list)?,
            d: self.d,
            draws: self.draws,
            seed: self.seed,
            multiplier: self.multiplier,
            search: SearchConfig {
                restarts: self.restarts.unwrap_or(base.restarts),
                steps: self.steps.unwrap_or(base.steps),
                step_size: self.step_size.unwrap_or(base.step_size),
            },
        })
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, default_value = "fig2")]
    pub model: ModelId,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, default_value_t = 0.2)]
    pub sigma: f64,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "relu")]
    pub activation: Activation,
    #[arg(long, default_value = "l2_sum")]
    pub penalty: PenaltyKind,
    #[arg(long, default_value_t = 10_000)]
    pub n_test: usize,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Also write `fit.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::InterpolateDemo(a) => {
            let report = commands::interpolate_demo(a.n, a.sigma, a.reps, a.seed)?;
            commands::write_interpolate_demo(&report, &a.out)?;
            if let Some(s) = report.empirical_error_summary {
                println!(
                    "empirical error mean {:.4} (95% CI {:.4}..{:.4}), max train mse {:.3e}",
                    s.mean, s.ci95.0, s.ci95.1, report.max_train_mse
                );
            }
        }
        Command::Sweep(a) => {
            let cfg = a.resolve()?;
            let out = sweep::run_sweep(&cfg)?;
            sweep::write_outputs(&out, &cfg.output_dir)?;
            for p in &out.summary.envelope {
                println!("k = {:>5}  best lambda = {:<8}  prediction error {:.4} +- {:.4}", p.k, p.lambda, p.mean, p.se);
            }
        }
        Command::Theory(a) => {
            let curve = commands::theory(a.alpha, a.beta, a.n, a.c, a.k_max, &a.out)?;
            println!(
                "shape {}, k_first {:.3}, k_second {:.3}",
                curve.shape.name(),
                curve.k_first,
                curve.k_second
            );
        }
        Command::Complexity(a) => {
            let req = a.resolve()?;
            let (records, summary) = commands::complexity(&req)?;
            commands::write_complexity(&records, &summary, &a.out)?;
            for s in &summary.slopes {
                match s.slope {
                    Some(v) => println!("M = {}, k = {}: log-log slope {v:.4}", s.m, s.k),
                    None => println!("M = {}, k = {}: slope undefined", s.m, s.k),
                }
            }
        }
        Command::Fit(a) => {
            let mut fit = FitConfig::default();
            if let Some(v) = a.max_iters {
                fit.max_outer_iters = v;
            }
            let req = FitRequest {
                model_id: a.model,
                n: a.n,
                d: a.d,
                sigma: a.sigma,
                k: a.k,
                lambda: a.lambda,
                seed: a.seed,
                activation: a.activation,
                penalty_kind: a.penalty,
                n_test: a.n_test,
                fit,
            };
            let out = commands::fit(&req)?;
            let text = serde_json::to_string_pretty(&out)?;
            if let Some(dir) = &a.out {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                let path = dir.join("fit.json");
                std::fs::write(&path, format!("{text}\n")).map_err(|e| CliError::io(&path, e))?;
            }
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    Ok(())
}
