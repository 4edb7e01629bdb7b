use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::{FidelityMethod, FidelityResult, NoiseSpec};
use crate::cluster::{from_x_amplitudes, uniform_amplitude, InteractionGraph};
use crate::encoding::{apply_basis_change, occupation, occupied_pairs};
use crate::error::{Error, Result};
use crate::qsys::StateVector;
use crate::scalar::phase;

pub const MC_MIN_SAMPLES: usize = 100;
pub const MC_BATCHES: usize = 20;
/// Largest register the sampler enumerates (`2^N` amplitudes per sample).
pub const MC_MAX_QUBITS: usize = 20;

const PI: f64 = std::f64::consts::PI;

/// How the gate error is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Independent `θ_e ~ G(0, σ²)` on every edge, phase `e^{−iθ_e b_i b_j}`.
    BondPhase,
    /// One `α ~ G(0, (σ₁/4)²)` on `Σ_E σᵢˣσⱼˣ` and per-qubit
    /// `βᵢ ~ G(0, ((N−1)σ₂/4)²)` on `σᵢˣ`, i.e. fluctuations of `λτ` and `ητ`.
    Widetext,
}

impl NoiseModel {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::BondPhase => "bond_phase",
            Self::Widetext => "widetext",
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bond_phase" | "bond-phase" => Ok(Self::BondPhase),
            "widetext" => Ok(Self::Widetext),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

/// Generator for sample `index`: ChaCha8 keyed by `seed`, stream `index`.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal(std: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, std).map_err(|e| Error::InvalidParameter(format!("noise std {std}: {e}")))
}

/// One realization of the gate error as a σˣ-diagonal phase `b ↦ angle`.
enum Draw {
    Bonds(Vec<f64>),
    Global { alpha: f64, beta: Vec<f64> },
}

impl Draw {
    fn sample(rng: &mut ChaCha8Rng, noise: &NoiseSpec, model: NoiseModel, graph: &InteractionGraph) -> Result<Self> {
        let n = graph.n_vertices();
        Ok(match model {
            NoiseModel::BondPhase => {
                let d = normal(noise.sigma)?;
                Draw::Bonds((0..graph.n_edges()).map(|_| d.sample(rng)).collect())
            }
            NoiseModel::Widetext => {
                let alpha = normal(noise.sigma_1 / 4.0)?.sample(rng);
                let d = normal(n.saturating_sub(1) as f64 * noise.sigma_2 / 4.0)?;
                Draw::Global { alpha, beta: (0..n).map(|_| d.sample(rng)).collect() }
            }
        })
    }

    fn angle(&self, b: usize, n: usize, edges: &[(usize, usize)]) -> f64 {
        let s = |i: usize| 2.0 * occupation(b, i, n) as f64 - 1.0;
        match self {
            Draw::Bonds(theta) => edges
                .iter()
                .zip(theta)
                .filter(|((i, j), _)| occupation(b, *i, n) & occupation(b, *j, n) == 1)
                .map(|(_, t)| t)
                .sum(),
            Draw::Global { alpha, beta } => {
                let pairs: f64 = edges.iter().map(|&(i, j)| s(i) * s(j)).sum();
                alpha * pairs + beta.iter().enumerate().map(|(k, x)| x * s(k + 1)).sum::<f64>()
            }
        }
    }

    /// `⟨ψ_ideal|ψ_noisy⟩`; the ideal phases cancel.
    fn overlap(&self, n: usize, edges: &[(usize, usize)]) -> Complex64 {
        let sum: Complex64 = (0..1usize << n).map(|b| phase(self.angle(b, n, edges))).sum();
        sum / (1usize << n) as f64
    }
}

fn check_inputs(noise: &NoiseSpec, graph: &InteractionGraph) -> Result<()> {
    noise.validate()?;
    if graph.n_vertices() > MC_MAX_QUBITS {
        return Err(Error::TooManyQubits(graph.n_vertices(), MC_MAX_QUBITS));
    }
    Ok(())
}

/// Ideal graph state at phase π followed by one noise realization.
///
/// Uses the generator of sample index 0 for `rng_seed`, so it reproduces the
/// first sample of [`fidelity_monte_carlo`].
pub fn sample_noisy_state(
    noise: &NoiseSpec,
    model: NoiseModel,
    graph: &InteractionGraph,
    rng_seed: u64,
) -> Result<StateVector<f64>> {
    check_inputs(noise, graph)?;
    let n = graph.n_vertices();
    let edges = graph.edges();
    let draw = Draw::sample(&mut sample_rng(rng_seed, 0), noise, model, graph)?;
    let a = uniform_amplitude::<f64>(n);
    from_x_amplitudes(n, |b| {
        let ideal = PI * occupied_pairs(b, n, &edges) as f64;
        phase(ideal + draw.angle(b, n, &edges)) * a
    })
}

/// Multiplies σˣ amplitudes by `e^{−iθ_e b_i b_j}` per edge, in the order of
/// [`InteractionGraph::edges`].
pub fn apply_bond_phases(state: &StateVector<f64>, graph: &InteractionGraph, thetas: &[f64]) -> Result<StateVector<f64>> {
    let layout = state.layout();
    if layout.fock_cutoff() != 0 || layout.n_qubits() != graph.n_vertices() {
        return Err(Error::LayoutMismatch);
    }
    let edges = graph.edges();
    if thetas.len() != edges.len() {
        return Err(Error::DimensionMismatch { expected: edges.len(), got: thetas.len() });
    }
    let n = layout.n_qubits();
    let mut v = state.amplitudes().clone();
    apply_basis_change(&mut v, n);
    for (b, z) in v.iter_mut().enumerate() {
        let angle: f64 = edges
            .iter()
            .zip(thetas)
            .filter(|((i, j), _)| occupation(b, *i, n) & occupation(b, *j, n) == 1)
            .map(|(_, t)| t)
            .sum();
        *z *= phase(angle);
    }
    apply_basis_change(&mut v, n);
    StateVector::new(layout, v)
}

/// Monte Carlo estimate with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub model: NoiseModel,
    /// `|E⟨ψ_ideal|ψ_noisy⟩|²`, the target quantity
    pub result: FidelityResult,
    /// `E⟨ψ_ideal|ψ_noisy⟩` as `(re, im)`
    pub mean_amplitude: (f64, f64),
    /// `E|⟨ψ_ideal|ψ_noisy⟩|²`
    pub mean_fidelity: f64,
    pub mean_fidelity_stderr: f64,
    /// `|m_k|²` of each batch mean
    pub batch_fidelities: Vec<f64>,
}

fn std_error(xs: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt()
}

/// Samples `⟨ψ_ideal|ψ_noisy⟩` and reports the mean-amplitude fidelity.
///
/// Sample `k` draws from its own stream of `rng_seed`; the reduction runs in
/// index order, so the result does not depend on the worker count. The
/// standard error uses [`MC_BATCHES`] batch means and the delta method
/// `SE(|m|²) ≈ 2|m| SE(Re(m_k m̄/|m|))`.
pub fn monte_carlo_report(
    noise: &NoiseSpec,
    model: NoiseModel,
    graph: &InteractionGraph,
    samples: usize,
    rng_seed: u64,
) -> Result<McReport> {
    check_inputs(noise, graph)?;
    if samples < MC_MIN_SAMPLES {
        return Err(Error::TooFewSamples { min: MC_MIN_SAMPLES, got: samples });
    }
    if samples / MC_BATCHES < 2 {
        return Err(Error::DegenerateBatching(format!("{samples} samples over {MC_BATCHES} batches")));
    }
    let n = graph.n_vertices();
    let edges = graph.edges();
    let overlaps: Vec<Complex64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let draw = Draw::sample(&mut sample_rng(rng_seed, k as u64), noise, model, graph)?;
            Ok(draw.overlap(n, &edges))
        })
        .collect::<Result<_>>()?;

    let total = samples as f64;
    let mean: Complex64 = overlaps.iter().sum::<Complex64>() / total;
    let fids: Vec<f64> = overlaps.iter().map(|z| z.norm_sqr()).collect();
    let mean_fidelity = fids.iter().sum::<f64>() / total;

    let bounds: Vec<usize> = (0..=MC_BATCHES).map(|k| k * samples / MC_BATCHES).collect();
    let batch_means: Vec<Complex64> = bounds
        .windows(2)
        .map(|w| overlaps[w[0]..w[1]].iter().sum::<Complex64>() / (w[1] - w[0]) as f64)
        .collect();
    let batch_fid_means: Vec<f64> =
        bounds.windows(2).map(|w| fids[w[0]..w[1]].iter().sum::<f64>() / (w[1] - w[0]) as f64).collect();
    let batch_fidelities: Vec<f64> = batch_means.iter().map(|m| m.norm_sqr()).collect();

    let modulus = mean.norm();
    let stderr = if modulus > 0.0 {
        let dir = mean.conj() / modulus;
        let proj: Vec<f64> = batch_means.iter().map(|m| (m * dir).re).collect();
        2.0 * modulus * std_error(&proj)
    } else {
        std_error(&batch_fidelities)
    };

    Ok(McReport {
        model,
        result: FidelityResult {
            n_qubits: n,
            sigma: noise.sigma,
            value: mean.norm_sqr().clamp(0.0, 1.0),
            method: FidelityMethod::MonteCarlo,
            mc_samples: Some(samples),
            mc_stderr: Some(stderr),
            graph: graph.kind(),
        },
        mean_amplitude: (mean.re, mean.im),
        mean_fidelity,
        mean_fidelity_stderr: std_error(&batch_fid_means),
        batch_fidelities,
    })
}

/// [`monte_carlo_report`] reduced to its [`FidelityResult`].
pub fn fidelity_monte_carlo(
    noise: &NoiseSpec,
    model: NoiseModel,
    graph: &InteractionGraph,
    samples: usize,
    rng_seed: u64,
) -> Result<FidelityResult> {
    Ok(monte_carlo_report(noise, model, graph, samples, rng_seed)?.result)
}
