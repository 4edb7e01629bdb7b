//! Flat `key = value` run configuration.

use std::fmt;
use std::path::Path;

use dqd_cluster::cluster::InteractionGraph;
use dqd_cluster::noisemodel::{BoxSpectrum, NoiseModel, NoiseSpec, QUOTED_SIGMA, QUOTED_SIGMA_1, QUOTED_SIGMA_2};
use dqd_cluster::units::RESISTANCE_QUANTUM_OHM;
use serde::Serialize;

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphChoice {
    Chain,
    Complete,
}

impl fmt::Display for GraphChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphChoice::Chain => "chain",
            GraphChoice::Complete => "complete",
        })
    }
}

impl GraphChoice {
    pub fn build(&self, n: usize) -> dqd_cluster::Result<InteractionGraph> {
        match self {
            GraphChoice::Chain => InteractionGraph::chain(n),
            GraphChoice::Complete => InteractionGraph::complete(n),
        }
    }
}

/// Every tunable of a run. Field order is the JSON echo order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_qubits: usize,
    pub k: u32,
    pub n: u32,
    /// overrides the circuit-derived coupling when set
    pub g0_over_2pi_hz: Option<f64>,
    pub frequency_hz: f64,
    pub coupling_capacitance_f: f64,
    pub dot_capacitance_f: f64,
    pub impedance_ohm: f64,
    pub resistance_quantum_ohm: f64,
    pub quality_factor: f64,
    pub tunneling_uev: f64,
    pub detuning_uev: f64,
    pub t2_star_s: f64,
    pub t1_s: f64,
    pub t2_bare_s: f64,
    pub gap_uev: f64,
    pub budget_threshold: f64,
    pub budget_exit: bool,
    pub fock_cutoff: usize,
    pub evolve_steps: usize,
    pub sigma_1_rad: f64,
    pub sigma_2_rad: f64,
    pub sigma_rad: f64,
    pub drive_relative_std: f64,
    pub spectrum_cutoff_rad_s: f64,
    pub seed: u64,
    pub mc_samples: usize,
    pub model: NoiseModel,
    pub graph: GraphChoice,
    pub n_min: usize,
    pub n_max: usize,
    pub unsafe_dims: bool,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_qubits: 2,
            k: 1,
            n: 0,
            g0_over_2pi_hz: None,
            frequency_hz: 2.0e9,
            coupling_capacitance_f: 400e-18,
            dot_capacitance_f: 200e-18,
            impedance_ohm: 50.0,
            resistance_quantum_ohm: RESISTANCE_QUANTUM_OHM,
            quality_factor: 1.0e5,
            tunneling_uev: 5.0,
            detuning_uev: 0.0,
            t2_star_s: 1e-6,
            t1_s: 1e-6,
            t2_bare_s: 1e-8,
            gap_uev: 10.0,
            budget_threshold: 10.0,
            budget_exit: true,
            fock_cutoff: 5,
            evolve_steps: 0,
            sigma_1_rad: QUOTED_SIGMA_1,
            sigma_2_rad: QUOTED_SIGMA_2,
            sigma_rad: QUOTED_SIGMA,
            drive_relative_std: 0.02,
            spectrum_cutoff_rad_s: BoxSpectrum::DEFAULT_CUTOFF,
            seed: 42,
            mc_samples: 0,
            model: NoiseModel::BondPhase,
            graph: GraphChoice::Chain,
            n_min: 2,
            n_max: 30,
            unsafe_dims: false,
            out: None,
        }
    }
}

/// Recognized keys, in echo order.
pub const KEYS: &[&str] = &[
    "n_qubits",
    "k",
    "n",
    "g0_over_2pi_hz",
    "frequency_hz",
    "coupling_capacitance_f",
    "dot_capacitance_f",
    "impedance_ohm",
    "resistance_quantum_ohm",
    "quality_factor",
    "tunneling_uev",
    "detuning_uev",
    "t2_star_s",
    "t1_s",
    "t2_bare_s",
    "gap_uev",
    "budget_threshold",
    "budget_exit",
    "fock_cutoff",
    "evolve_steps",
    "sigma_1_rad",
    "sigma_2_rad",
    "sigma_rad",
    "drive_relative_std",
    "spectrum_cutoff_rad_s",
    "seed",
    "mc_samples",
    "model",
    "graph",
    "n_min",
    "n_max",
    "unsafe_dims",
    "out",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    let v: f64 = parse(key, value)?;
    if !v.is_finite() {
        return Err(format!("`{key}` must be finite"));
    }
    Ok(v)
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("invalid boolean `{value}` for `{key}`")),
    }
}

/// `A..B` or `A..=B`, both inclusive.
pub fn parse_range(value: &str) -> Result<(usize, usize), String> {
    let (a, b) = value
        .split_once("..=")
        .or_else(|| value.split_once(".."))
        .ok_or_else(|| format!("expected A..B, got `{value}`"))?;
    let a: usize = parse("n-range", a.trim())?;
    let b: usize = parse("n-range", b.trim())?;
    if a > b {
        return Err(format!("empty range `{value}`"));
    }
    Ok((a, b))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "n_qubits" => self.n_qubits = parse(key, v)?,
            "k" => self.k = parse(key, v)?,
            "n" => self.n = parse(key, v)?,
            "g0_over_2pi_hz" => {
                self.g0_over_2pi_hz = if v.is_empty() || v == "auto" { None } else { Some(parse_f64(key, v)?) }
            }
            "frequency_hz" => self.frequency_hz = parse_f64(key, v)?,
            "coupling_capacitance_f" => self.coupling_capacitance_f = parse_f64(key, v)?,
            "dot_capacitance_f" => self.dot_capacitance_f = parse_f64(key, v)?,
            "impedance_ohm" => self.impedance_ohm = parse_f64(key, v)?,
            "resistance_quantum_ohm" => self.resistance_quantum_ohm = parse_f64(key, v)?,
            "quality_factor" => self.quality_factor = parse_f64(key, v)?,
            "tunneling_uev" => self.tunneling_uev = parse_f64(key, v)?,
            "detuning_uev" => self.detuning_uev = parse_f64(key, v)?,
            "t2_star_s" => self.t2_star_s = parse_f64(key, v)?,
            "t1_s" => self.t1_s = parse_f64(key, v)?,
            "t2_bare_s" => self.t2_bare_s = parse_f64(key, v)?,
            "gap_uev" => self.gap_uev = parse_f64(key, v)?,
            "budget_threshold" => self.budget_threshold = parse_f64(key, v)?,
            "budget_exit" => self.budget_exit = parse_bool(key, v)?,
            "fock_cutoff" => self.fock_cutoff = parse(key, v)?,
            "evolve_steps" => self.evolve_steps = parse(key, v)?,
            "sigma_1_rad" => self.sigma_1_rad = parse_f64(key, v)?,
            "sigma_2_rad" => self.sigma_2_rad = parse_f64(key, v)?,
            "sigma_rad" => self.sigma_rad = parse_f64(key, v)?,
            "drive_relative_std" => self.drive_relative_std = parse_f64(key, v)?,
            "spectrum_cutoff_rad_s" => self.spectrum_cutoff_rad_s = parse_f64(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "mc_samples" => self.mc_samples = parse(key, v)?,
            "model" => self.model = v.parse().map_err(|_| format!("unknown model `{v}`"))?,
            "graph" => {
                self.graph = match v {
                    "chain" => GraphChoice::Chain,
                    "complete" => GraphChoice::Complete,
                    _ => return Err(format!("unknown graph `{v}`")),
                }
            }
            "n_min" => self.n_min = parse(key, v)?,
            "n_max" => self.n_max = parse(key, v)?,
            "unsafe_dims" => self.unsafe_dims = parse_bool(key, v)?,
            "out" => self.out = if v.is_empty() { None } else { Some(v.to_string()) },
            _ => return Err(format!("unknown key `{key}`; known keys: {}", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError { line: Some(idx + 1), message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            self.set(key.trim(), value).map_err(err)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// `KEY=VALUE` from the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("--set expects KEY=VALUE, got `{assignment}`")))?;
        self.set(key.trim(), value).map_err(ConfigError::new)
    }

    pub fn noise(&self) -> dqd_cluster::Result<NoiseSpec> {
        let spec = NoiseSpec {
            sigma_1: self.sigma_1_rad,
            sigma_2: self.sigma_2_rad,
            sigma: self.sigma_rad,
            t2_bare: self.t2_bare_s,
            drive_relative_std: self.drive_relative_std,
            spectrum: BoxSpectrum::from_t2_bare(self.t2_bare_s, self.spectrum_cutoff_rad_s)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}
