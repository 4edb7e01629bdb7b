//! Gaussian phase noise on the cluster gate and the resulting fidelity.
//!
//! Each bond accumulates a random phase `θ ~ G(0, σ²)`. With the
//! characteristic value `c = E[e^{iθ}] = e^{−σ²/2}` the mean-amplitude
//! fidelity of an `N`-qubit chain is
//!
//! ```text
//! F = (2^{−N} Σ_{z∈{0,1}^N} Π_{j=1}^{N−1} c^{z_j z_{j+1}})²
//! ```
//!
//! evaluated exactly by [`fidelity_transfer_matrix`] and, for any graph, by
//! [`fidelity_brute_force`]. [`fidelity_monte_carlo`] samples the noisy
//! state itself.

mod fidelity;
mod montecarlo;
mod spectral;
mod variance;

use serde::Serialize;

use crate::cluster::GraphKind;
use crate::error::{Error, Result};

pub use fidelity::{
    characteristic, chain_floor, fidelity_brute_force, fidelity_brute_force_edges, fidelity_transfer_matrix,
    transfer_matrix_value, BRUTE_FORCE_MAX_QUBITS,
};
pub use montecarlo::{
    apply_bond_phases, fidelity_monte_carlo, monte_carlo_report, sample_noisy_state, McReport, NoiseModel, MC_BATCHES,
    MC_MAX_QUBITS, MC_MIN_SAMPLES,
};
pub use spectral::{validate_variance_by_sampling, validate_variance_by_sampling_with, SamplingOptions, VarianceValidation};
pub use variance::{
    combined_sigma, low_frequency_moment, variance_integral, variance_theta1, variance_theta1_from_moment,
    variance_theta2, BoxSpectrum, Spectrum, ZeroSpectrum,
};

const PI: f64 = std::f64::consts::PI;

/// Quoted standard deviation of the detuning-noise phase, rad.
pub const QUOTED_SIGMA_1: f64 = 0.022 * PI;
/// Quoted standard deviation of the drive-noise phase, rad.
pub const QUOTED_SIGMA_2: f64 = 0.006 * PI;
/// Quoted combined standard deviation, rad.
pub const QUOTED_SIGMA: f64 = 0.023 * PI;

/// Noise parameters.
///
/// The three `sigma*` defaults are quoted input constants, not outputs of
/// [`variance_theta1`] or [`variance_theta2`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseSpec {
    /// rad
    pub sigma_1: f64,
    /// rad
    pub sigma_2: f64,
    /// rad, per-bond phase std used by the fidelity formula
    pub sigma: f64,
    /// s
    pub t2_bare: f64,
    /// `σ_δη/η`
    pub drive_relative_std: f64,
    pub spectrum: BoxSpectrum,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        let t2_bare = 1e-8;
        Self {
            sigma_1: QUOTED_SIGMA_1,
            sigma_2: QUOTED_SIGMA_2,
            sigma: QUOTED_SIGMA,
            t2_bare,
            drive_relative_std: 0.02,
            spectrum: BoxSpectrum::from_t2_bare(t2_bare, BoxSpectrum::DEFAULT_CUTOFF).expect("valid defaults"),
        }
    }
}

impl NoiseSpec {
    /// All phase noise switched off.
    pub fn noiseless() -> Self {
        Self { sigma_1: 0.0, sigma_2: 0.0, sigma: 0.0, ..Self::default() }
    }

    /// Default noise parameters with bond std `sigma` and the parts scaled to match.
    pub fn with_sigma(sigma: f64) -> Result<Self> {
        let d = Self::default();
        let s = d.sigma_1.hypot(d.sigma_2);
        let spec = Self { sigma_1: d.sigma_1 * sigma / s, sigma_2: d.sigma_2 * sigma / s, sigma, ..d };
        spec.validate()?;
        Ok(spec)
    }

    /// Noise parameters whose combined std is built from its parts.
    pub fn from_parts(sigma_1: f64, sigma_2: f64) -> Result<Self> {
        let spec = Self { sigma_1, sigma_2, sigma: combined_sigma(sigma_1, sigma_2), ..Self::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_1", self.sigma_1),
            ("sigma_2", self.sigma_2),
            ("sigma", self.sigma),
            ("drive_relative_std", self.drive_relative_std),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0")));
            }
        }
        if !(self.t2_bare.is_finite() && self.t2_bare > 0.0) {
            return Err(Error::InvalidParameter("t2_bare must be positive".into()));
        }
        Ok(())
    }

    /// `γτ`; the low-frequency forms assume it is well below 1.
    pub fn low_frequency_parameter(&self, tau: f64) -> f64 {
        self.spectrum.cutoff() * tau
    }

    /// `true` when `γτ ≥ 0.1`, outside the low-frequency limit.
    pub fn low_frequency_violated(&self, tau: f64) -> bool {
        self.low_frequency_parameter(tau) >= 0.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMethod {
    TransferMatrix,
    BruteForce,
    MonteCarlo,
}

/// One fidelity evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityResult {
    pub n_qubits: usize,
    /// rad
    pub sigma: f64,
    pub value: f64,
    pub method: FidelityMethod,
    pub mc_samples: Option<usize>,
    pub mc_stderr: Option<f64>,
    pub graph: GraphKind,
}

impl FidelityResult {
    pub(crate) fn analytic(n_qubits: usize, sigma: f64, value: f64, method: FidelityMethod, graph: GraphKind) -> Self {
        Self { n_qubits, sigma, value: value.clamp(0.0, 1.0), method, mc_samples: None, mc_stderr: None, graph }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let d = NoiseSpec::default();
        d.validate().unwrap();
        assert!((d.sigma / PI - 0.023).abs() < 1e-15);
        assert!((d.spectrum.integral() * d.t2_bare * d.t2_bare - 1.0).abs() < 1e-12);
        assert!(!d.low_frequency_violated(4e-9));
        assert!(d.low_frequency_violated(1e-6));
    }

    #[test]
    fn parts_combine_in_quadrature() {
        let s = NoiseSpec::from_parts(3e-3, 4e-3).unwrap();
        assert!((s.sigma - 5e-3).abs() < 1e-15);
        let s = NoiseSpec::with_sigma(0.1).unwrap();
        assert!((s.sigma_1.hypot(s.sigma_2) - 0.1).abs() < 1e-15);
        assert!(NoiseSpec::from_parts(-1.0, 0.0).is_err());
        assert!(NoiseSpec::with_sigma(f64::NAN).is_err());
    }
}
