//! `dqd-cluster` command-line front end.

mod commands;
mod config;

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{parse_range, ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Model(#[from] dqd_cluster::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser, Debug)]
#[command(name = "dqd-cluster", version, about = "Cluster-state generation with double-dot qubits in a resonator")]
struct Cli {
    /// flat `key = value` config file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// write JSON/CSV here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, global = true, value_name = "U32")]
    mc_samples: Option<u32>,
    /// per-bond phase std, rad
    #[arg(long, global = true, value_name = "RAD")]
    sigma: Option<f64>,
    /// inclusive register range for the fidelity curve
    #[arg(long, global = true, value_name = "A..B")]
    n_range: Option<String>,
    #[arg(long, global = true, value_name = "bond_phase|widetext")]
    model: Option<String>,
    #[arg(long, global = true, value_name = "chain|complete")]
    graph: Option<String>,
    /// lift the register and cutoff guard rails
    #[arg(long, global = true)]
    unsafe_dims: bool,
    /// exit 0 even when the decoherence budget fails
    #[arg(long, global = true)]
    no_budget_exit: bool,
    /// any config key, repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// coupling, gate schedule, noise estimates and decoherence budget
    Params,
    /// full Jaynes-Cummings propagator against the effective gate
    Evolve,
    /// generated state, stabilizers and closed-form readings
    Cluster,
    /// CSV of fidelity against register size
    FidelityCurve,
    /// sampled fidelity for both noise models
    Montecarlo,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Evolve => "evolve",
            Command::Cluster => "cluster",
            Command::FidelityCurve => "fidelity-curve",
            Command::Montecarlo => "montecarlo",
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    for s in &cli.set {
        cfg.apply_override(s)?;
    }
    let set = |cfg: &mut RunConfig, key: &str, value: String| cfg.set(key, &value).map_err(CliError::Usage);
    if let Some(v) = &cli.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.mc_samples {
        cfg.mc_samples = v as usize;
    }
    if let Some(v) = cli.sigma {
        set(&mut cfg, "sigma_rad", v.to_string())?;
    }
    if let Some(r) = &cli.n_range {
        let (a, b) = parse_range(r).map_err(CliError::Usage)?;
        cfg.n_min = a;
        cfg.n_max = b;
    }
    if let Some(m) = &cli.model {
        set(&mut cfg, "model", m.clone())?;
    }
    if let Some(g) = &cli.graph {
        set(&mut cfg, "graph", g.clone())?;
    }
    if cli.unsafe_dims {
        cfg.unsafe_dims = true;
    }
    if cli.no_budget_exit {
        cfg.budget_exit = false;
    }
    if cfg.n_min > cfg.n_max {
        return Err(CliError::Usage(format!("empty register range {}..{}", cfg.n_min, cfg.n_max)));
    }
    Ok(cfg)
}

/// Stderr summary writer; colour only on a terminal without `NO_COLOR`.
pub struct Summary {
    color: bool,
}

impl Summary {
    fn new() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Self { color: !no_color && std::io::stderr().is_terminal() }
    }

    pub fn line(&self, label: &str, text: &str) {
        let mut err = std::io::stderr().lock();
        let _ = if self.color {
            writeln!(err, "\x1b[1m{label}\x1b[0m {text}")
        } else {
            writeln!(err, "{label} {text}")
        };
    }

    pub fn status(&self, ok: bool, text: &str) {
        let (tag, code) = if ok { ("ok", "32") } else { ("FAIL", "31") };
        let mut err = std::io::stderr().lock();
        let _ = if self.color {
            writeln!(err, "\x1b[{code}m{tag}\x1b[0m {text}")
        } else {
            writeln!(err, "{tag} {text}")
        };
    }
}

fn emit(cfg: &RunConfig, body: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli, summary: &Summary) -> Result<ExitCode, CliError> {
    let cfg = resolve(cli)?;
    let outcome = match cli.command {
        Command::Params => commands::params(&cfg, summary)?,
        Command::Evolve => commands::evolve(&cfg, summary)?,
        Command::Cluster => commands::cluster(&cfg, summary)?,
        Command::FidelityCurve => commands::fidelity_curve(&cfg, summary)?,
        Command::Montecarlo => commands::montecarlo(&cfg, summary)?,
    };
    emit(&cfg, &outcome.body)?;
    if let Some(path) = &cfg.out {
        summary.line(cli.command.name(), &format!("wrote {path}"));
    }
    Ok(if outcome.budget_failed && cfg.budget_exit { ExitCode::from(2) } else { ExitCode::SUCCESS })
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
    let summary = Summary::new();
    match run(&cli, &summary) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
