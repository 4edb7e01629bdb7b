//! Sampling check of `⟨(∫₀^τ ε² dt)²⟩` for a stationary Gaussian `ε(t)`.
//!
//! `ε(t) = Σₖ aₖ cos(ωₖt + φₖ)` on midpoint frequencies `ωₖ = (k + ½)Δω`
//! of `[0, W]`, with one-sided amplitude `aₖ = √(2 S₁(ωₖ) Δω)`,
//! `S₁ = 2S` the one-sided density and `φₖ` uniform. The time integral
//! uses composite Simpson on a grid refined until halving the step moves
//! it by less than the configured tolerance.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::variance::{variance_integral, Spectrum};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplingOptions {
    /// cosine components
    pub components: usize,
    /// first Simpson grid tried (intervals, even)
    pub min_grid: usize,
    pub max_grid: usize,
    /// relative change allowed when the step is halved
    pub grid_tol: f64,
    /// realizations used for the grid check
    pub pilots: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self { components: 256, min_grid: 16, max_grid: 1 << 16, grid_tol: 1e-3, pilots: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceValidation {
    /// [`variance_integral`]
    pub analytic: f64,
    /// sample mean of `(∫ε² dt)²`
    pub empirical: f64,
    /// `|empirical − analytic| / analytic`, 0 when both vanish
    pub rel_err: f64,
    /// standard error of `empirical`
    pub stderr: f64,
    pub samples: usize,
    /// Simpson intervals used
    pub grid: usize,
}

struct Synth {
    amps: Vec<f64>,
    omegas: Vec<f64>,
}

impl Synth {
    fn new(spectrum: &impl Spectrum, components: usize) -> Self {
        let w = spectrum.support();
        let dw = w / components as f64;
        let omegas: Vec<f64> = (0..components).map(|k| (k as f64 + 0.5) * dw).collect();
        let amps = omegas.iter().map(|&om| (2.0 * 2.0 * spectrum.density(om) * dw).sqrt()).collect();
        Self { amps, omegas }
    }

    fn phases(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        self.amps.iter().map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect()
    }

    /// `∫₀^τ ε² dt` by Simpson with `grid` intervals.
    fn integral(&self, phases: &[f64], tau: f64, grid: usize) -> f64 {
        let h = tau / grid as f64;
        let mut z: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        let step: Vec<Complex64> = self.omegas.iter().map(|&w| Complex64::from_polar(1.0, w * h)).collect();
        let mut acc = 0.0;
        for g in 0..=grid {
            let eps: f64 = self.amps.iter().zip(&z).map(|(a, zk)| a * zk.re).sum();
            let weight = if g == 0 || g == grid {
                1.0
            } else if g % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += weight * eps * eps;
            for (zk, s) in z.iter_mut().zip(&step) {
                *zk *= s;
            }
        }
        acc * h / 3.0
    }
}

/// Compares sampled `⟨(∫ε²)²⟩` with [`variance_integral`] using default options.
pub fn validate_variance_by_sampling(
    spectrum: &impl Spectrum,
    tau: f64,
    samples: usize,
    rng_seed: u64,
) -> Result<VarianceValidation> {
    validate_variance_by_sampling_with(spectrum, tau, samples, rng_seed, &SamplingOptions::default())
}

pub fn validate_variance_by_sampling_with(
    spectrum: &impl Spectrum,
    tau: f64,
    samples: usize,
    rng_seed: u64,
    opts: &SamplingOptions,
) -> Result<VarianceValidation> {
    if samples < 2 {
        return Err(Error::TooFewSamples { min: 2, got: samples });
    }
    if opts.components == 0 || opts.min_grid < 2 || !opts.min_grid.is_multiple_of(2) || opts.pilots == 0 {
        return Err(Error::InvalidParameter("sampling options out of range".into()));
    }
    let analytic = variance_integral(spectrum, tau)?;
    let synth = Synth::new(spectrum, opts.components);

    // pilots use streams past the sample range
    let pilots: Vec<Vec<f64>> =
        (0..opts.pilots).map(|k| synth.phases(rng_seed, (samples + k) as u64)).collect();
    let mut grid = opts.min_grid;
    loop {
        let worst = pilots
            .iter()
            .map(|p| {
                let coarse = synth.integral(p, tau, grid / 2);
                let fine = synth.integral(p, tau, grid);
                if fine == 0.0 {
                    0.0
                } else {
                    ((fine - coarse) / fine).abs()
                }
            })
            .fold(0.0, f64::max);
        if worst < opts.grid_tol {
            break;
        }
        grid *= 2;
        if grid > opts.max_grid {
            return Err(Error::NotConverged(format!("time grid beyond {} intervals", opts.max_grid)));
        }
    }

    let squares: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| synth.integral(&synth.phases(rng_seed, k as u64), tau, grid).powi(2))
        .collect();
    let n = samples as f64;
    let empirical = squares.iter().sum::<f64>() / n;
    let var = squares.iter().map(|x| (x - empirical).powi(2)).sum::<f64>() / (n - 1.0);
    let rel_err = if analytic == 0.0 {
        if empirical == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (empirical - analytic).abs() / analytic
    };
    Ok(VarianceValidation { analytic, empirical, rel_err, stderr: (var / n).sqrt(), samples, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noisemodel::{BoxSpectrum, ZeroSpectrum};

    #[test]
    fn zero_spectrum_gives_zero() {
        let v = validate_variance_by_sampling(&ZeroSpectrum, 1.0, 100, 3).unwrap();
        assert_eq!((v.analytic, v.empirical, v.rel_err), (0.0, 0.0, 0.0));
    }

    #[test]
    fn synthesized_variance_matches_spectrum() {
        let s = BoxSpectrum::new(2.0, 5.0).unwrap();
        let synth = Synth::new(&s, 64);
        let var: f64 = synth.amps.iter().map(|a| a * a / 2.0).sum();
        assert!((var - s.integral()).abs() < 1e-12);
    }

    #[test]
    fn simpson_integral_of_single_cosine() {
        let synth = Synth { amps: vec![1.0], omegas: vec![2.0] };
        let tau = 1.3;
        let got = synth.integral(&[0.4], tau, 512);
        // ∫cos²(2t + 0.4) dt
        let want = tau / 2.0 + ((4.0 * tau + 0.8f64).sin() - 0.8f64.sin()) / 8.0;
        assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn deterministic_and_rejects_bad_input() {
        let s = BoxSpectrum::new(1.0, 1.0).unwrap();
        let a = validate_variance_by_sampling(&s, 0.01, 200, 9).unwrap();
        let b = validate_variance_by_sampling(&s, 0.01, 200, 9).unwrap();
        assert_eq!(a, b);
        assert!(validate_variance_by_sampling(&s, 0.01, 1, 9).is_err());
        let opts = SamplingOptions { max_grid: 4, min_grid: 4, ..Default::default() };
        assert!(matches!(
            validate_variance_by_sampling_with(&s, 1000.0, 100, 9, &opts),
            Err(Error::NotConverged(_))
        ));
    }
}
