use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use dqd_cluster::cluster::{
    cluster_formula_state, generated_cluster_state, graph_state, reduced_purity, stabilizer_expectations,
    state_fidelity, FormulaReading, InteractionGraph,
};
use dqd_cluster::dotmodel::{
    coupling_g0, decoherence_budget_with_threshold, effective_coupling, eigenstructure, solve_schedule, BudgetReport,
    CircuitParams, DecoherenceInputs, DotParams, GateSchedule,
};
use dqd_cluster::dynamics::{dispersive_gate_error_with, h_static_frame, propagate_time_ordered, GateTiming, JcTerms};
use dqd_cluster::noisemodel::{
    fidelity_brute_force, fidelity_transfer_matrix, monte_carlo_report, variance_theta1, variance_theta2, McReport,
    NoiseModel, BRUTE_FORCE_MAX_QUBITS, MC_MAX_QUBITS, QUOTED_SIGMA_1, QUOTED_SIGMA_2,
};
use dqd_cluster::units::{uev_to_hz, uev_to_rad_per_s};
use dqd_cluster::HilbertLayout;
use serde::Serialize;

use crate::config::{GraphChoice, RunConfig};
use crate::{CliError, Summary};

pub const EVOLVE_MAX_QUBITS: usize = 6;
pub const EVOLVE_MAX_CUTOFF: usize = 8;
pub const CLUSTER_MAX_QUBITS: usize = 10;
/// Sample count used by `montecarlo` when `mc_samples = 0`.
pub const DEFAULT_MC_SAMPLES: usize = 20_000;

pub struct Outcome {
    pub body: String,
    pub budget_failed: bool,
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    result: R,
}

fn json<R: Serialize>(command: &str, cfg: &RunConfig, result: R) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Envelope { command, config: cfg, result })?;
    s.push('\n');
    Ok(s)
}

fn guard(cfg: &RunConfig, what: &str, value: usize, limit: usize) -> Result<(), CliError> {
    if value > limit && !cfg.unsafe_dims {
        return Err(CliError::Usage(format!("{what} = {value} exceeds the guard rail {limit}; pass --unsafe-dims to override")));
    }
    Ok(())
}

fn circuit(cfg: &RunConfig) -> Result<CircuitParams, CliError> {
    Ok(CircuitParams::new(
        2.0 * PI * cfg.frequency_hz,
        cfg.coupling_capacitance_f,
        cfg.dot_capacitance_f,
        cfg.impedance_ohm,
        cfg.resistance_quantum_ohm,
        cfg.quality_factor,
    )?)
}

/// rad/s; the override wins over the circuit value.
fn g0(cfg: &RunConfig, c: &CircuitParams) -> f64 {
    cfg.g0_over_2pi_hz.map_or_else(|| coupling_g0(c), |f| 2.0 * PI * f)
}

fn schedule(cfg: &RunConfig) -> Result<GateSchedule, CliError> {
    let c = circuit(cfg)?;
    Ok(solve_schedule(g0(cfg, &c), cfg.k, cfg.n, cfg.n_qubits)?)
}

fn decoherence(cfg: &RunConfig) -> Result<DecoherenceInputs, CliError> {
    let d = DecoherenceInputs { t2_star: cfg.t2_star_s, t1: cfg.t1_s, t2_bare: cfg.t2_bare_s, gap_uev: cfg.gap_uev };
    d.validate()?;
    Ok(d)
}

#[derive(Serialize)]
struct CouplingReport {
    g0_rad_s: f64,
    g0_over_2pi_hz: f64,
    g0_source: &'static str,
    circuit_g0_over_2pi_hz: f64,
    impedance_factor: f64,
    capacitance_ratio: f64,
    qubit_gap_uev: f64,
    mixing_angle_rad: f64,
    effective_coupling_rad_s: f64,
}

#[derive(Serialize)]
struct ScheduleReport {
    n_qubits: usize,
    k: u32,
    n: u32,
    delta_rad_s: f64,
    delta_over_2pi_hz: f64,
    tau_s: f64,
    lambda_rad_s: f64,
    eta_rad_s: f64,
    detuning_residual: f64,
    phase_residual: f64,
}

#[derive(Serialize)]
struct NoiseReport {
    /// gap taken as an angular frequency
    sigma_1_formula_rad: f64,
    /// gap taken as an ordinary frequency
    sigma_1_formula_ordinary_rad: f64,
    sigma_1_quoted_rad: f64,
    sigma_2_formula_rad: f64,
    sigma_2_quoted_rad: f64,
    sigma_used_rad: f64,
    gamma_tau: f64,
    low_frequency_violated: bool,
}

#[derive(Serialize)]
struct ParamsReport {
    coupling: CouplingReport,
    schedule: ScheduleReport,
    noise: NoiseReport,
    budget: BudgetReport,
}

pub fn params(cfg: &RunConfig, out: &Summary) -> Result<Outcome, CliError> {
    let c = circuit(cfg)?;
    let dot = DotParams::new(cfg.tunneling_uev, cfg.detuning_uev)?;
    let eig = eigenstructure(&dot);
    let s = schedule(cfg)?;
    let d = decoherence(cfg)?;
    let noise = cfg.noise()?;
    if !(cfg.budget_threshold.is_finite() && cfg.budget_threshold > 0.0) {
        return Err(CliError::Usage("budget_threshold must be positive".into()));
    }
    let budget = decoherence_budget_with_threshold(&c, &d, &s, cfg.budget_threshold);

    let omega_gap = uev_to_rad_per_s(cfg.gap_uev);
    let report = ParamsReport {
        coupling: CouplingReport {
            g0_rad_s: s.g0,
            g0_over_2pi_hz: s.g0 / (2.0 * PI),
            g0_source: if cfg.g0_over_2pi_hz.is_some() { "override" } else { "circuit" },
            circuit_g0_over_2pi_hz: coupling_g0(&c) / (2.0 * PI),
            impedance_factor: c.impedance_factor(),
            capacitance_ratio: c.coupling_capacitance() / (2.0 * c.dot_capacitance()),
            qubit_gap_uev: eig.gap_uev,
            mixing_angle_rad: eig.theta,
            effective_coupling_rad_s: effective_coupling(&c, &dot),
        },
        schedule: ScheduleReport {
            n_qubits: s.n_qubits,
            k: s.k,
            n: s.n,
            delta_rad_s: s.delta,
            delta_over_2pi_hz: s.delta / (2.0 * PI),
            tau_s: s.tau,
            lambda_rad_s: s.lambda,
            eta_rad_s: s.eta,
            detuning_residual: s.detuning_residual(),
            phase_residual: s.phase_residual(),
        },
        noise: NoiseReport {
            sigma_1_formula_rad: variance_theta1(s.g0, s.delta, omega_gap, s.tau, cfg.t2_bare_s).sqrt(),
            sigma_1_formula_ordinary_rad: variance_theta1(s.g0, s.delta, uev_to_hz(cfg.gap_uev), s.tau, cfg.t2_bare_s)
                .sqrt(),
            sigma_1_quoted_rad: QUOTED_SIGMA_1,
            sigma_2_formula_rad: variance_theta2(cfg.drive_relative_std, s.lambda, s.tau, s.n_qubits).sqrt(),
            sigma_2_quoted_rad: QUOTED_SIGMA_2,
            sigma_used_rad: noise.sigma,
            gamma_tau: noise.low_frequency_parameter(s.tau),
            low_frequency_violated: noise.low_frequency_violated(s.tau),
        },
        budget,
    };

    out.line("g0/2pi", &format!("{:.4} MHz ({})", report.coupling.g0_over_2pi_hz / 1e6, report.coupling.g0_source));
    out.line("tau", &format!("{:.4} ns, delta/2pi = {:.4} MHz", s.tau * 1e9, s.delta / (2.0 * PI) / 1e6));
    if report.noise.low_frequency_violated {
        out.status(false, &format!("gamma tau = {:.3} is outside the low-frequency regime", report.noise.gamma_tau));
    }
    out.status(
        budget.pass,
        &format!(
            "decoherence budget: shortest timescale / tau = {:.3e} (need >= {})",
            budget.ratios.photon_decay.min(budget.ratios.t2_star).min(budget.ratios.t1).min(budget.ratios.t2_alpha),
            budget.threshold
        ),
    );
    Ok(Outcome { body: json("params", cfg, &report)?, budget_failed: !budget.pass })
}

#[derive(Serialize)]
struct EvolveReport {
    n_qubits: usize,
    k: u32,
    n: u32,
    fock_cutoff: usize,
    timing: GateTiming<f64>,
    fidelity_up_to_phase: f64,
    leakage: f64,
    fidelity_raised_cutoff: f64,
    cutoff_convergence_flag: bool,
    /// 0 means exact exponentiation of the static-frame Hamiltonian
    steps_used: usize,
    /// max entry difference of the time-ordered propagator from the static one
    time_ordered_max_diff: Option<f64>,
}

pub fn evolve(cfg: &RunConfig, out: &Summary) -> Result<Outcome, CliError> {
    guard(cfg, "n_qubits", cfg.n_qubits, EVOLVE_MAX_QUBITS)?;
    guard(cfg, "fock_cutoff", cfg.fock_cutoff, EVOLVE_MAX_CUTOFF)?;
    let c = circuit(cfg)?;
    let g = g0(cfg, &c);
    let timing = if g == 0.0 {
        // uncoupled: the effective gate is the identity
        if cfg.k == 0 {
            return Err(CliError::Usage("k must be at least 1".into()));
        }
        GateTiming { g0: 0.0, delta: 1.0, tau: 2.0 * PI * cfg.k as f64, lambda: 0.0, eta: 0.0 }
    } else {
        GateTiming::from(&solve_schedule(g, cfg.k, cfg.n, cfg.n_qubits)?)
    };
    let r = dispersive_gate_error_with(cfg.n_qubits, &timing, cfg.fock_cutoff)?;

    let time_ordered_max_diff = if cfg.evolve_steps > 0 {
        let layout = HilbertLayout::new(cfg.n_qubits, cfg.fock_cutoff)?;
        let terms = JcTerms::new(layout, timing.g0, timing.delta, timing.eta)?;
        let ordered = propagate_time_ordered(|t| terms.at(t), timing.tau, cfg.evolve_steps)?;
        let exact = h_static_frame(layout, timing.g0, timing.delta, timing.eta)?.propagator(timing.tau)?;
        Some((ordered.matrix() - exact.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
    } else {
        None
    };

    let report = EvolveReport {
        n_qubits: cfg.n_qubits,
        k: cfg.k,
        n: cfg.n,
        fock_cutoff: cfg.fock_cutoff,
        timing,
        fidelity_up_to_phase: r.fidelity_up_to_phase,
        leakage: r.leakage,
        fidelity_raised_cutoff: r.fidelity_raised_cutoff,
        cutoff_convergence_flag: !r.cutoff_converged,
        steps_used: cfg.evolve_steps,
        time_ordered_max_diff,
    };
    out.line(
        "evolve",
        &format!("N = {}, k = {}: F = {:.6}, leakage = {:.3e}", cfg.n_qubits, cfg.k, r.fidelity_up_to_phase, r.leakage),
    );
    if report.cutoff_convergence_flag {
        out.status(false, &format!("Fock cutoff {} not converged (cutoff + 2 gives F = {:.6})", cfg.fock_cutoff, r.fidelity_raised_cutoff));
    }
    Ok(Outcome { body: json("evolve", cfg, &report)?, budget_failed: false })
}

#[derive(Serialize)]
struct ReadingRow {
    reading: &'static str,
    rule: &'static str,
    overlap_with_generated: f64,
    overlap_with_chain: f64,
}

#[derive(Serialize)]
struct ClusterReport {
    n_qubits: usize,
    edges: Vec<(usize, usize)>,
    stabilizers: Vec<f64>,
    min_stabilizer: f64,
    reduced_purity: Vec<f64>,
    readings: Vec<ReadingRow>,
    chain_vs_complete_fidelity: f64,
}

pub fn cluster(cfg: &RunConfig, out: &Summary) -> Result<Outcome, CliError> {
    guard(cfg, "n_qubits", cfg.n_qubits, CLUSTER_MAX_QUBITS)?;
    let n = cfg.n_qubits;
    let s = schedule(cfg)?;
    let generated = generated_cluster_state(n, &s)?;
    let complete = InteractionGraph::complete(n)?;
    let chain_state = graph_state(&InteractionGraph::chain(n)?, PI)?;
    let stabilizers = stabilizer_expectations(&generated, &complete)?;
    let min_stabilizer = stabilizers.iter().copied().fold(f64::INFINITY, f64::min);
    let readings = FormulaReading::ALL
        .iter()
        .map(|&r| {
            let psi = cluster_formula_state::<f64>(n, r)?;
            Ok(ReadingRow {
                reading: r.tag(),
                rule: r.rule(),
                overlap_with_generated: state_fidelity(&psi, &generated)?,
                overlap_with_chain: state_fidelity(&psi, &chain_state)?,
            })
        })
        .collect::<Result<Vec<_>, dqd_cluster::Error>>()?;
    let reduced_purity = (1..=n).map(|site| reduced_purity(&generated, site)).collect::<Result<Vec<_>, _>>()?;
    let report = ClusterReport {
        n_qubits: n,
        edges: complete.edges(),
        chain_vs_complete_fidelity: state_fidelity(&chain_state, &graph_state(&complete, PI)?)?,
        stabilizers,
        min_stabilizer: if n == 0 { 1.0 } else { min_stabilizer },
        reduced_purity,
        readings,
    };
    out.line("cluster", &format!("N = {n}: min stabilizer = {:.12}", report.min_stabilizer));
    for r in &report.readings {
        out.line("  reading", &format!("{:<10} overlap with generated {:.6}", r.reading, r.overlap_with_generated));
    }
    Ok(Outcome { body: json("cluster", cfg, &report)?, budget_failed: false })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const CSV_HEADER: &str = "N,sigma_rad,F_transfer,F_bruteforce,F_mc,mc_stderr";

pub fn fidelity_curve(cfg: &RunConfig, out: &Summary) -> Result<Outcome, CliError> {
    let noise = cfg.noise()?;
    let sigma = noise.sigma;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut skipped_mc = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        let chain = InteractionGraph::chain(n)?;
        let tm = fidelity_transfer_matrix(n, sigma)?.value;
        let bf = if n <= BRUTE_FORCE_MAX_QUBITS { Some(fidelity_brute_force(&chain, sigma)?.value) } else { None };
        let (mc, se) = if cfg.mc_samples > 0 && n <= MC_MAX_QUBITS {
            let r = monte_carlo_report(&noise, cfg.model, &chain, cfg.mc_samples, cfg.seed)?;
            (Some(r.result.value), r.result.mc_stderr)
        } else {
            if cfg.mc_samples > 0 {
                skipped_mc.push(n);
            }
            (None, None)
        };
        writeln!(csv, "{n},{sigma},{tm},{},{},{}", opt(bf), opt(mc), opt(se)).expect("string write");
    }
    if !skipped_mc.is_empty() {
        out.line("fidelity-curve", &format!("Monte Carlo skipped above N = {MC_MAX_QUBITS}: {skipped_mc:?}"));
    }
    // CSV has no room for the config echo; it goes beside the file or to stderr
    let echo = serde_json::to_string_pretty(&Envelope { command: "fidelity-curve", config: cfg, result: () })?;
    match &cfg.out {
        Some(path) => std::fs::write(format!("{path}.config.json"), echo + "\n")?,
        None => out.line("config", &serde_json::to_string(cfg)?),
    }
    out.line(
        "fidelity-curve",
        &format!("N = {}..{}, sigma = {sigma:.6} rad ({:.4} pi)", cfg.n_min, cfg.n_max, sigma / PI),
    );
    Ok(Outcome { body: csv, budget_failed: false })
}

#[derive(Serialize)]
struct Reference {
    method: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct ModelRow {
    #[serde(flatten)]
    report: McReport,
    /// (value − reference)/stderr, bond-phase model only
    z_vs_reference: Option<f64>,
}

#[derive(Serialize)]
struct MonteCarloReport {
    n_qubits: usize,
    graph: GraphChoice,
    samples: usize,
    seed: u64,
    selected_model: NoiseModel,
    reference: Option<Reference>,
    models: Vec<ModelRow>,
    wall_clock_s: f64,
}

pub fn montecarlo(cfg: &RunConfig, out: &Summary) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let noise = cfg.noise()?;
    let n = cfg.n_qubits;
    let graph = cfg.graph.build(n)?;
    let samples = if cfg.mc_samples == 0 { DEFAULT_MC_SAMPLES } else { cfg.mc_samples };
    let reference = match cfg.graph {
        GraphChoice::Chain if n >= 2 => {
            Some(Reference { method: "transfer_matrix", value: fidelity_transfer_matrix(n, noise.sigma)?.value })
        }
        _ if n <= BRUTE_FORCE_MAX_QUBITS => {
            Some(Reference { method: "brute_force", value: fidelity_brute_force(&graph, noise.sigma)?.value })
        }
        _ => None,
    };
    let mut models = Vec::new();
    for model in [NoiseModel::BondPhase, NoiseModel::Widetext] {
        let report = monte_carlo_report(&noise, model, &graph, samples, cfg.seed)?;
        let z = match model {
            NoiseModel::BondPhase => reference
                .as_ref()
                .zip(report.result.mc_stderr)
                .and_then(|(r, se)| (se > 0.0).then(|| (report.result.value - r.value) / se)),
            NoiseModel::Widetext => None,
        };
        out.line(
            model.tag(),
            &format!("F = {:.6} +/- {:.2e}, mean fidelity {:.6}", report.result.value, report.result.mc_stderr.unwrap_or(0.0), report.mean_fidelity),
        );
        models.push(ModelRow { report, z_vs_reference: z });
    }
    if let Some(r) = &reference {
        out.line("reference", &format!("{} F = {:.6}", r.method, r.value));
    }
    let report = MonteCarloReport {
        n_qubits: n,
        graph: cfg.graph,
        samples,
        seed: cfg.seed,
        selected_model: cfg.model,
        reference,
        models,
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    Ok(Outcome { body: json("montecarlo", cfg, &report)?, budget_failed: false })
}
