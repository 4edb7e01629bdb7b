use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two-sided power spectral density `S(ω)` of the detuning noise, rad²/s.
pub trait Spectrum: Sync {
    fn density(&self, omega: f64) -> f64;

    /// `S(ω) = 0` for `|ω|` above this, rad/s.
    fn support(&self) -> f64;

    /// `∫_{−∞}^{∞} S dω`.
    fn integral(&self) -> Result<f64> {
        Ok(2.0 * integrate(|w| self.density(w), 0.0, self.support())?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ZeroSpectrum;

impl Spectrum for ZeroSpectrum {
    fn density(&self, _omega: f64) -> f64 {
        0.0
    }

    fn support(&self) -> f64 {
        0.0
    }
}

/// Flat spectrum `S(ω) = A` for `|ω| ≤ γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxSpectrum {
    amplitude: f64,
    cutoff: f64,
}

impl BoxSpectrum {
    /// rad/s
    pub const DEFAULT_CUTOFF: f64 = 1.25e6;

    pub fn new(amplitude: f64, cutoff: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0 && cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidParameter("box spectrum needs A >= 0 and gamma > 0".into()));
        }
        Ok(Self { amplitude, cutoff })
    }

    /// Amplitude fixed by `∫S dω = 1/T₂²`.
    pub fn from_t2_bare(t2_bare: f64, cutoff: f64) -> Result<Self> {
        if !(t2_bare.is_finite() && t2_bare > 0.0) {
            return Err(Error::InvalidParameter("t2_bare must be positive".into()));
        }
        Self::new(1.0 / (t2_bare * t2_bare * 2.0 * cutoff), cutoff)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Closed form of `∫S dω`.
    pub fn integral(&self) -> f64 {
        2.0 * self.amplitude * self.cutoff
    }
}

impl Spectrum for BoxSpectrum {
    fn density(&self, omega: f64) -> f64 {
        if omega.abs() <= self.cutoff {
            self.amplitude
        } else {
            0.0
        }
    }

    fn support(&self) -> f64 {
        self.cutoff
    }

    fn integral(&self) -> Result<f64> {
        Ok(BoxSpectrum::integral(self))
    }
}

const INITIAL_PANELS: usize = 64;
const MAX_DEPTH: u32 = 40;
const MAX_EVALUATIONS: usize = 2_000_000;
const REL_TOL: f64 = 1e-11;

/// Adaptive Simpson quadrature over 64 initial panels.
pub(crate) fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let panel = (b - a) / INITIAL_PANELS as f64;
    let samples: Vec<[f64; 3]> = (0..INITIAL_PANELS)
        .map(|k| {
            let lo = a + panel * k as f64;
            [f(lo), f(lo + 0.5 * panel), f(lo + panel)]
        })
        .collect();
    let coarse: f64 = samples.iter().map(|s| panel / 6.0 * (s[0] + 4.0 * s[1] + s[2])).sum();
    let scale = coarse.abs().max(samples.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs())) * (b - a));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let tol = REL_TOL * scale / INITIAL_PANELS as f64;
    let mut evals = 3 * INITIAL_PANELS;
    let mut total = 0.0;
    for (k, s) in samples.iter().enumerate() {
        let lo = a + panel * k as f64;
        let whole = panel / 6.0 * (s[0] + 4.0 * s[1] + s[2]);
        total += simpson(&f, lo, lo + panel, s[0], s[1], s[2], whole, tol, MAX_DEPTH, &mut evals)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || *evals > MAX_EVALUATIONS || !delta.is_finite() {
        return Err(Error::NotConverged(format!("adaptive quadrature on [{a:e}, {b:e}]")));
    }
    Ok(simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals)?
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals)?)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Two-term moment `(∫S dω)²τ² + 2(∫S sinc(ωτ) dω)²τ²`.
///
/// Both integrals run over `[−W, W]` with `W = spectrum.support()`, using
/// the evenness of `S`.
pub fn variance_integral(spectrum: &impl Spectrum, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter("tau must be finite and >= 0".into()));
    }
    let w = spectrum.support();
    let total = 2.0 * integrate(|x| spectrum.density(x), 0.0, w)?;
    let filtered = 2.0 * integrate(|x| spectrum.density(x) * sinc(x * tau), 0.0, w)?;
    Ok((total * total + 2.0 * filtered * filtered) * tau * tau)
}

/// Low-frequency limit `3(∫S dω)²τ²` of [`variance_integral`].
pub fn low_frequency_moment<T: Real>(spectrum_integral: T, tau: T) -> T {
    T::lit(3.0) * (spectrum_integral * tau).powi(2)
}

/// `σ₁² = (2g₀²/(Ωδ²))² · moment` with `moment = ⟨(∫₀^τ ε² dt)²⟩`.
pub fn variance_theta1_from_moment<T: Real>(g0: T, delta: T, omega: T, moment: T) -> T {
    let k = T::lit(2.0) * g0 * g0 / (omega * delta * delta);
    k * k * moment
}

/// `σ₁² = 12 (g₀/δ)⁴ (τ/(Ω T₂²))²`, all frequencies in rad/s.
pub fn variance_theta1<T: Real>(g0: T, delta: T, omega: T, tau: T, t2_bare: T) -> T {
    let r = g0 / delta;
    let x = tau / (omega * t2_bare * t2_bare);
    let v = T::lit(12.0) * r.powi(4) * x * x;
    debug_assert!({
        let via = variance_theta1_from_moment(g0, delta, omega, low_frequency_moment(T::one() / (t2_bare * t2_bare), tau));
        (via - v).abs() <= T::lit(1e-4) * v.abs()
    });
    v
}

/// Quasi-static drive noise: `(4 σ_rel η τ/(N−1))² = (4 σ_rel λτ)²` with `η = (N−1)λ`.
pub fn variance_theta2<T: Real>(drive_relative_std: T, lambda: T, tau: T, n_qubits: usize) -> T {
    let v = if n_qubits >= 2 {
        let m = T::lit((n_qubits - 1) as f64);
        let eta = m * lambda;
        T::lit(4.0) * tau * drive_relative_std * eta / m
    } else {
        T::lit(4.0) * drive_relative_std * lambda * tau
    };
    v * v
}

/// `√(σ₁² + σ₂²)`.
pub fn combined_sigma<T: Real>(sigma_1: T, sigma_2: T) -> T {
    (sigma_1 * sigma_1 + sigma_2 * sigma_2).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn quadrature_known_integrals() {
        assert!((integrate(|x| x.sin(), 0.0, PI).unwrap() - 2.0).abs() < 1e-10);
        assert!((integrate(|x| (-x * x).exp(), 0.0, 6.0).unwrap() - PI.sqrt() / 2.0).abs() < 1e-10);
        assert_eq!(integrate(|_| 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert!(integrate(|x| 1.0 / x.sqrt() * (1.0 / x).sin(), 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_spectrum() {
        assert_eq!(variance_integral(&ZeroSpectrum, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn box_spectrum_limits() {
        let gamma = 1e6;
        let s = BoxSpectrum::new(3.0, gamma).unwrap();
        let tau = 0.001 / gamma;
        let ratio = variance_integral(&s, tau).unwrap() / low_frequency_moment(s.integral(), tau);
        assert!((0.999..=1.001).contains(&ratio), "{ratio}");

        let tau = 0.01 / gamma;
        let ratio = variance_integral(&s, tau).unwrap() / low_frequency_moment(s.integral(), tau);
        assert!((ratio - 1.0).abs() <= 0.01);

        let tau = 100.0 / gamma;
        let v = variance_integral(&s, tau).unwrap();
        let first = (s.integral() * tau).powi(2);
        assert!((v / first - 1.0).abs() <= 0.05, "{}", v / first);
    }

    #[test]
    fn box_sinc_integral_closed_form() {
        // ∫_{−γ}^{γ} A sinc(ωτ) dω = 2A Si(γτ)/τ; Si(1) = 0.946083070367183
        let s = BoxSpectrum::new(2.0, 1.0).unwrap();
        let v = variance_integral(&s, 1.0).unwrap();
        let want = 16.0 + 2.0 * (4.0 * 0.946_083_070_367_183f64).powi(2);
        assert!((v - want).abs() < 1e-9 * want);
    }

    #[test]
    fn from_t2_bare_normalization() {
        let s = BoxSpectrum::from_t2_bare(1e-8, 1e6).unwrap();
        assert!((Spectrum::integral(&s).unwrap() * 1e-16 - 1.0).abs() < 1e-12);
        assert!(BoxSpectrum::new(1.0, 0.0).is_err());
        assert!(BoxSpectrum::from_t2_bare(0.0, 1.0).is_err());
    }

    #[test]
    fn theta1_examples() {
        let (g0, delta, om) = (1.0, 2.0, 1e10);
        assert_eq!(variance_theta1(g0, delta, om, 4e-9, f64::INFINITY), 0.0);
        let a = variance_theta1(g0, delta, om, 4e-9, 1e-8);
        let b = variance_theta1(g0, delta, om, 8e-9, 1e-8);
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn theta2_examples() {
        let lambda = 1.0;
        let tau = PI / 4.0;
        assert_eq!(variance_theta2(0.0, lambda, tau, 5), 0.0);
        let s = variance_theta2(0.02, lambda, tau, 3).sqrt();
        assert!((s - 0.02 * PI).abs() < 1e-15);
        for n in 1..=9 {
            assert!((variance_theta2(0.02, lambda, tau, n).sqrt() - s).abs() < 1e-15);
        }
    }

    #[test]
    fn combined_examples() {
        assert!((combined_sigma(0.022 * PI, 0.006 * PI) / PI - 0.0228).abs() < 5e-5);
        assert_eq!(combined_sigma(0.7, 0.0), 0.7);
        assert!((combined_sigma(3e-3f64, 4e-3) - 5e-3).abs() < 1e-15);
        assert!((combined_sigma(3e-3f32, 4e-3) - 5e-3).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn theta1_forms_agree(g0 in 0.1f64..10.0, d in 0.1f64..10.0, om in 1e8f64..1e11, tau in 1e-10f64..1e-7, t2 in 1e-9f64..1e-6) {
            let closed = variance_theta1(g0, d, om, tau, t2);
            let via = variance_theta1_from_moment(g0, d, om, low_frequency_moment(1.0 / (t2 * t2), tau));
            prop_assert!((closed - via).abs() <= 1e-12 * closed);
        }
    }
}
