//! Batch experiment runner. Each subcommand reads an optional TOML config,
//! applies flag overrides, writes `<output-dir>/<subcommand>.csv` and prints
//! one PASS/FAIL line per assertion.

mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{ExperimentConfig, OUTPUT_DIR_ENV};
pub use output::{Assertion, Outcome};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "holderforms", version, about = "Hölder-form inequality experiments")]
pub struct Cli {
    /// TOML experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the env var, which overrides the config.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub slack: Option<f64>,
    /// Also emit an SVG plot where the subcommand has one.
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Regularization bounds for the mollifier on Weierstrass and random fields.
    MollifyCheck {
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Stokes identity on the unit disk, and for a mollified form when one is configured.
    StokesCheck {
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Boundary-integral inequality over a disk family.
    Inequality {
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Planar isoperimetric inequality on the unit disk and random convex polygons.
    Isoperimetric {
        #[arg(long)]
        polygons: Option<usize>,
    },
    /// Cross-section and non-accessibility criteria for a toral automorphism.
    Criteria {
        /// Row-major integer entries.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        matrix: Option<Vec<i64>>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        extra_center_dims: Option<usize>,
    },
    /// The cubic Pisot example.
    Pisot,
    /// Strip-decomposition decay bound under a hyperbolic linear map.
    Decay {
        /// Row-major 2×2 entries.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        matrix: Option<Vec<f64>>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        k_min: Option<u32>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        c1: Option<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::MollifyCheck { .. } => "mollify-check",
            Command::StokesCheck { .. } => "stokes-check",
            Command::Inequality { .. } => "inequality",
            Command::Isoperimetric { .. } => "isoperimetric",
            Command::Criteria { .. } => "criteria",
            Command::Pisot => "pisot",
            Command::Decay { .. } => "decay",
        }
    }
}

/// Loads the config and folds the global flags into it.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.sigma.is_some() {
        cfg.sigma = cli.sigma;
    }
    if cli.slack.is_some() {
        cfg.slack = cli.slack;
    }
    if cli.output_dir.is_some() {
        cfg.output_dir = cli.output_dir.clone();
    }
    if cli.svg {
        cfg.svg = Some(true);
    }
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = resolve_config(cli)?;
    cfg.slack()?;
    cfg.sigma()?;
    let out = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    commands::dispatch(&cli.command, &cfg, &out)
}

/// 0 when every assertion passed, 2 for a rejected config, 1 otherwise.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed() => 0,
        Ok(_) => 1,
        Err(Error::Config { .. }) => 2,
        Err(_) => 1,
    }
}

/// Lines to print for a finished run.
pub fn report_lines(result: &Result<Outcome>) -> Vec<String> {
    match result {
        Ok(o) => {
            let mut lines = o.text.clone();
            lines.extend(o.assertions.iter().map(Assertion::line));
            for f in &o.files {
                lines.push(format!("wrote {}", f.display()));
            }
            let failed = o.assertions.iter().filter(|a| !a.passed).count();
            lines.push(if failed == 0 {
                format!("PASS ({} assertions)", o.assertions.len())
            } else {
                format!("FAIL ({failed} of {} assertions)", o.assertions.len())
            });
            lines
        }
        Err(e) => vec![format!("error: {e}")],
    }
}
