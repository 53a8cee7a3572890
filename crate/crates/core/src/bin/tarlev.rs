use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tarlev::io::{run_experiment, ExperimentConfig, Inputs, Pipeline};
use tarlev::Error;

/// Threshold autoregressive models, leverage-effect analysis and an A-BEKK
/// comparison baseline.
#[derive(Parser, Debug)]
#[command(name = "tarlev", version)]
struct Cli {
    /// Experiment configuration (JSON); command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ModelArg {
    /// Preset name (m1, m2, m3, bovespa-tar) or path to a model JSON file.
    #[arg(long)]
    model: Option<String>,
}

#[derive(Args, Debug, Default)]
struct DataArgs {
    /// `date,price` CSV of the target series X.
    #[arg(long, requires = "threshold")]
    target: Option<PathBuf>,
    /// `date,price` CSV of the threshold series Z.
    #[arg(long, requires = "target")]
    threshold: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo skewness and kurtosis against the closed forms.
    Simulate {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
    },
    /// Conditional and unconditional moments of a model.
    Moments {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        max_lag: Option<usize>,
    },
    /// Nonlinearity test, structure identification and Gibbs estimation.
    FitTar {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        max_l: Option<usize>,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
    },
    /// Maximum-likelihood VAR-A-BEKK fit with diagnostics and news impact surface.
    FitBekk {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        p: Option<usize>,
    },
    /// News impact curve and analytic volatility minimum.
    Nic {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Pseudo-residual diagnostics of a model on data.
    Validate {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        max_lag: Option<usize>,
        #[arg(long)]
        level: Option<f64>,
    },
    /// TAR against A-BEKK moments and leverage representation.
    Compare {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        data: DataArgs,
        /// `bovespa-bekk` or path to a BEKK parameter JSON file.
        #[arg(long)]
        bekk_model: Option<String>,
    },
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn apply_data(cfg: &mut ExperimentConfig, d: DataArgs) {
    if let (Some(target), Some(threshold)) = (d.target, d.threshold) {
        cfg.inputs = Some(Inputs { target, threshold });
    }
}

fn apply_model(cfg: &mut ExperimentConfig, m: ModelArg) {
    if m.model.is_some() {
        cfg.model = m.model;
    }
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::default(),
    };
    set(&mut cfg.seed, cli.seed);
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    let pipeline = match cli.command {
        Command::Simulate { model, reps, len, burn_in } => {
            apply_model(&mut cfg, model);
            set(&mut cfg.simulate.reps, reps);
            set(&mut cfg.simulate.len, len);
            set(&mut cfg.simulate.burn_in, burn_in);
            Pipeline::Simulate
        }
        Command::Moments { model, max_lag } => {
            apply_model(&mut cfg, model);
            set(&mut cfg.moments.max_lag, max_lag);
            Pipeline::Moments
        }
        Command::FitTar { data, max_l, max_k, iters, burn_in } => {
            apply_data(&mut cfg, data);
            set(&mut cfg.fit_tar.max_l, max_l);
            set(&mut cfg.fit_tar.max_k, max_k);
            set(&mut cfg.fit_tar.iters, iters);
            set(&mut cfg.fit_tar.burn_in, burn_in);
            Pipeline::FitTar
        }
        Command::FitBekk { data, p } => {
            apply_data(&mut cfg, data);
            set(&mut cfg.fit_bekk.p, p);
            Pipeline::FitBekk
        }
        Command::Nic { model, data, points } => {
            apply_model(&mut cfg, model);
            apply_data(&mut cfg, data);
            set(&mut cfg.nic.points, points);
            Pipeline::Nic
        }
        Command::Validate { model, data, max_lag, level } => {
            apply_model(&mut cfg, model);
            apply_data(&mut cfg, data);
            set(&mut cfg.validate.max_lag, max_lag);
            set(&mut cfg.validate.level, level);
            Pipeline::Validate
        }
        Command::Compare { model, data, bekk_model } => {
            apply_model(&mut cfg, model);
            apply_data(&mut cfg, data);
            if bekk_model.is_some() {
                cfg.bekk_model = bekk_model;
            }
            Pipeline::Compare
        }
    };
    if let Some(p) = cfg.pipeline {
        if p != pipeline {
            return Err(Error::Config(format!("configuration selects `{p}` but the command is `{pipeline}`")));
        }
    }
    cfg.pipeline = Some(pipeline);
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build_config(cli).and_then(|cfg| run_experiment(&cfg));
    match result {
        Ok(manifest) => {
            for f in &manifest.files {
                println!("{}  {}", f.sha256, f.path);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
