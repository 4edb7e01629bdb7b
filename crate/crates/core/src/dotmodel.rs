//! Double-dot physics and device design.
//!
//! Energies of the double dot are carried in µeV and converted to rad/s
//! with ħ only at this boundary. Circuit quantities are SI. Rates used by
//! the dynamics are angular (rad/s); the two budget outputs whose reference
//! numbers assume ordinary frequency (photon decay time `Q/f` and the
//! additional dephasing time `(Ω/h)·T₂,bare²`) say so in their field names.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{uev_to_hz, HBAR_UEV_S, RESISTANCE_QUANTUM_OHM};

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Tunneling `T_c` and detuning `Δ` of one double dot, both in µeV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DotParams {
    tunneling_uev: f64,
    detuning_uev: f64,
}

impl DotParams {
    pub fn new(tunneling_uev: f64, detuning_uev: f64) -> Result<Self> {
        positive("tunneling T_c", tunneling_uev)?;
        if !detuning_uev.is_finite() {
            return Err(Error::InvalidParameter("detuning must be finite".into()));
        }
        Ok(Self { tunneling_uev, detuning_uev })
    }

    pub fn tunneling_uev(&self) -> f64 {
        self.tunneling_uev
    }

    pub fn detuning_uev(&self) -> f64 {
        self.detuning_uev
    }

    /// Qubit gap `Ω = √(4T_c² + Δ²)` in µeV.
    pub fn gap_uev(&self) -> f64 {
        (4.0 * self.tunneling_uev * self.tunneling_uev + self.detuning_uev * self.detuning_uev).sqrt()
    }

    pub fn with_detuning(&self, detuning_uev: f64) -> Result<Self> {
        Self::new(self.tunneling_uev, detuning_uev)
    }
}

/// Hybridized double-dot levels in the `{|(1,1)S⟩, |(0,2)S⟩}` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eigenstructure {
    pub gap_uev: f64,
    /// Mixing angle θ with `tan θ = −2T_c/(Ω+Δ)`.
    pub theta: f64,
    /// `|+⟩ = −sin θ |11S⟩ + cos θ |02S⟩`.
    pub plus: [f64; 2],
    /// `|−⟩ = cos θ |11S⟩ + sin θ |02S⟩`.
    pub minus: [f64; 2],
}

pub fn eigenstructure(p: &DotParams) -> Eigenstructure {
    let gap = p.gap_uev();
    let theta = (-2.0 * p.tunneling_uev).atan2(gap + p.detuning_uev);
    let (s, c) = theta.sin_cos();
    Eigenstructure { gap_uev: gap, theta, plus: [-s, c], minus: [c, s] }
}

/// Resonator and coupling-capacitor parameters (SI).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircuitParams {
    omega: f64,
    coupling_capacitance: f64,
    dot_capacitance: f64,
    impedance: f64,
    resistance_quantum: f64,
    quality_factor: f64,
}

impl CircuitParams {
    /// Largest accepted `C_c / (2 C_tot)`.
    pub const MAX_CAPACITANCE_RATIO: f64 = 2.0;

    /// `omega` is the angular resonator frequency in rad/s.
    pub fn new(
        omega: f64,
        coupling_capacitance: f64,
        dot_capacitance: f64,
        impedance: f64,
        resistance_quantum: f64,
        quality_factor: f64,
    ) -> Result<Self> {
        positive("resonator frequency", omega)?;
        positive("coupling capacitance C_c", coupling_capacitance)?;
        positive("dot capacitance C_tot", dot_capacitance)?;
        positive("impedance z0", impedance)?;
        positive("resistance quantum", resistance_quantum)?;
        positive("quality factor", quality_factor)?;
        let ratio = coupling_capacitance / (2.0 * dot_capacitance);
        if ratio > Self::MAX_CAPACITANCE_RATIO {
            return Err(Error::InvalidParameter(format!("C_c/(2 C_tot) = {ratio} exceeds {}", Self::MAX_CAPACITANCE_RATIO)));
        }
        Ok(Self { omega, coupling_capacitance, dot_capacitance, impedance, resistance_quantum, quality_factor })
    }

    /// Builder taking the ordinary frequency `f` in Hz and `R_Q = h/e²`.
    pub fn from_frequency_hz(
        f_hz: f64,
        coupling_capacitance: f64,
        dot_capacitance: f64,
        impedance: f64,
        quality_factor: f64,
    ) -> Result<Self> {
        Self::new(2.0 * PI * f_hz, coupling_capacitance, dot_capacitance, impedance, RESISTANCE_QUANTUM_OHM, quality_factor)
    }

    /// 2 GHz resonator, 400 aF / 200 aF capacitances, 50 Ω line, Q = 1e5.
    pub fn reference_device() -> Self {
        Self::from_frequency_hz(2.0e9, 400e-18, 200e-18, 50.0, 1.0e5).expect("valid reference device")
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn frequency_hz(&self) -> f64 {
        self.omega / (2.0 * PI)
    }

    pub fn coupling_capacitance(&self) -> f64 {
        self.coupling_capacitance
    }

    pub fn dot_capacitance(&self) -> f64 {
        self.dot_capacitance
    }

    pub fn impedance(&self) -> f64 {
        self.impedance
    }

    pub fn resistance_quantum(&self) -> f64 {
        self.resistance_quantum
    }

    pub fn quality_factor(&self) -> f64 {
        self.quality_factor
    }

    /// `√(2 z₀ / R_Q)`.
    pub fn impedance_factor(&self) -> f64 {
        (2.0 * self.impedance / self.resistance_quantum).sqrt()
    }

    /// Angular photon decay rate `κ = ω/Q`.
    pub fn kappa(&self) -> f64 {
        self.omega / self.quality_factor
    }

    pub fn with_quality_factor(&self, q: f64) -> Result<Self> {
        Self::new(self.omega, self.coupling_capacitance, self.dot_capacitance, self.impedance, self.resistance_quantum, q)
    }
}

/// `g₀ = ω · C_c/(2 C_tot) · √(2 z₀/R_Q)`, in rad/s.
pub fn coupling_g0(c: &CircuitParams) -> f64 {
    c.omega * (c.coupling_capacitance / (2.0 * c.dot_capacitance)) * c.impedance_factor()
}

/// Detuning-dependent coupling `g₀ · 2T_c/Ω`, in rad/s.
pub fn effective_coupling(c: &CircuitParams, p: &DotParams) -> f64 {
    coupling_g0(c) * 2.0 * p.tunneling_uev / p.gap_uev()
}

/// Gate timing derived from `g₀` and the integers `(k, n)`:
/// `δτ = 2kπ` and `4λτ = (2n+1)π`, with `λ = g₀²/(2δ)` and `η = (N−1)λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GateSchedule {
    pub k: u32,
    pub n: u32,
    pub n_qubits: usize,
    /// rad/s
    pub g0: f64,
    /// qubit-cavity detuning, rad/s
    pub delta: f64,
    /// seconds
    pub tau: f64,
    /// rad/s
    pub lambda: f64,
    /// drive amplitude for `n_qubits`, rad/s
    pub eta: f64,
}

impl GateSchedule {
    /// Drive amplitude `(N−1)λ` for an arbitrary register size.
    pub fn drive_amplitude(&self, n_qubits: usize) -> f64 {
        n_qubits.saturating_sub(1) as f64 * self.lambda
    }

    /// Relative residual of `δτ = 2kπ`.
    pub fn detuning_residual(&self) -> f64 {
        let target = 2.0 * PI * self.k as f64;
        (self.delta * self.tau - target).abs() / target
    }

    /// Relative residual of `4λτ = (2n+1)π`.
    pub fn phase_residual(&self) -> f64 {
        let target = (2 * self.n + 1) as f64 * PI;
        (4.0 * self.lambda * self.tau - target).abs() / target
    }
}

/// Solves both timing conditions: `δ = g₀√(4k/(2n+1))`, `τ = 2kπ/δ`.
pub fn solve_schedule(g0: f64, k: u32, n: u32, n_qubits: usize) -> Result<GateSchedule> {
    positive("g0", g0)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if n_qubits == 0 {
        return Err(Error::InvalidParameter("at least one qubit is required".into()));
    }
    let delta = g0 * (4.0 * k as f64 / (2 * n + 1) as f64).sqrt();
    let tau = 2.0 * PI * k as f64 / delta;
    let lambda = g0 * g0 / (2.0 * delta);
    let s = GateSchedule { k, n, n_qubits, g0, delta, tau, lambda, eta: (n_qubits - 1) as f64 * lambda };
    debug_assert!(s.detuning_residual() <= 1e-12 && s.phase_residual() <= 1e-12);
    Ok(s)
}

/// Decoherence inputs; defaults are the reference device values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecoherenceInputs {
    /// spin dephasing T₂*, s
    pub t2_star: f64,
    /// charge relaxation T₁, s
    pub t1: f64,
    /// bare charge dephasing T₂,bare, s
    pub t2_bare: f64,
    /// qubit gap Ω, µeV
    pub gap_uev: f64,
}

impl Default for DecoherenceInputs {
    fn default() -> Self {
        Self { t2_star: 1e-6, t1: 1e-6, t2_bare: 1e-8, gap_uev: 10.0 }
    }
}

impl DecoherenceInputs {
    pub fn validate(&self) -> Result<()> {
        positive("T2*", self.t2_star)?;
        positive("T1", self.t1)?;
        positive("T2,bare", self.t2_bare)?;
        positive("gap", self.gap_uev)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BudgetRatios {
    pub photon_decay: f64,
    pub t2_star: f64,
    pub t1: f64,
    pub t2_alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BudgetReport {
    pub gate_time_s: f64,
    /// `Q/f` (ordinary frequency).
    pub photon_decay_time_s: f64,
    /// `Q/ω` (angular), for reference.
    pub photon_decay_time_angular_s: f64,
    pub t2_star_s: f64,
    pub t1_s: f64,
    /// `(Ω/h)·T₂,bare²`; an order-of-magnitude estimate.
    pub t2_alpha_s: f64,
    /// Each timescale divided by the gate time.
    pub ratios: BudgetRatios,
    pub threshold: f64,
    pub pass: bool,
}

/// Default required margin between the shortest timescale and `τ`.
pub const DEFAULT_BUDGET_THRESHOLD: f64 = 10.0;

pub fn decoherence_budget(c: &CircuitParams, d: &DecoherenceInputs, s: &GateSchedule) -> BudgetReport {
    decoherence_budget_with_threshold(c, d, s, DEFAULT_BUDGET_THRESHOLD)
}

/// Passes iff `τ ≤ min(timescales) / threshold`.
pub fn decoherence_budget_with_threshold(
    c: &CircuitParams,
    d: &DecoherenceInputs,
    s: &GateSchedule,
    threshold: f64,
) -> BudgetReport {
    let tau = s.tau;
    let photon = c.quality_factor / c.frequency_hz();
    let t2_alpha = uev_to_hz(d.gap_uev) * d.t2_bare * d.t2_bare;
    let ratios = BudgetRatios { photon_decay: photon / tau, t2_star: d.t2_star / tau, t1: d.t1 / tau, t2_alpha: t2_alpha / tau };
    let shortest = photon.min(d.t2_star).min(d.t1).min(t2_alpha);
    BudgetReport {
        gate_time_s: tau,
        photon_decay_time_s: photon,
        photon_decay_time_angular_s: 1.0 / c.kappa(),
        t2_star_s: d.t2_star,
        t1_s: d.t1,
        t2_alpha_s: t2_alpha,
        ratios,
        threshold,
        pass: tau <= shortest / threshold,
    }
}

/// Which adiabatic branch the sweep follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    /// Amplitudes `(re, im)` on `|11S⟩` and `|02S⟩`.
    pub final_state: [(f64, f64); 2],
    /// Population of the tracked instantaneous eigenstate at the end.
    pub adiabaticity: f64,
    /// Branch whose start eigenvector overlaps `|02S⟩` most.
    pub tracked_branch: Branch,
    /// Largest `| ‖ψ‖ − 1 |` seen during the sweep.
    pub max_norm_drift: f64,
    pub steps: usize,
}

/// Minimum number of sweep steps.
pub const MIN_SWEEP_STEPS: usize = 100;
const SWEEP_CONVERGENCE_TOL: f64 = 1e-4;

type C2 = [(f64, f64); 2];

fn sweep_once(start: &DotParams, end: &DotParams, duration: f64, steps: usize) -> (C2, f64) {
    // ψ = (|11S⟩, |02S⟩) ; start in |02S⟩
    let mut psi: C2 = [(0.0, 0.0), (1.0, 0.0)];
    let tc = start.tunneling_uev;
    let dt = duration / steps as f64;
    let mut drift: f64 = 0.0;
    for step in 0..steps {
        let frac = (step as f64 + 0.5) / steps as f64;
        let delta = start.detuning_uev + (end.detuning_uev - start.detuning_uev) * frac;
        // H = hz σz + hx σx in (11S, 02S) with hz = −Δ/2, hx = T_c
        let hz = -0.5 * delta;
        let hx = tc;
        let hn = (hz * hz + hx * hx).sqrt();
        let phi = hn * dt / HBAR_UEV_S;
        let (s, co) = phi.sin_cos();
        let (nz, nx) = (hz / hn, hx / hn);
        // U = cos φ − i sin φ (nz σz + nx σx)
        let [(a_re, a_im), (b_re, b_im)] = psi;
        let na = (co * a_re + s * (nz * a_im + nx * b_im), co * a_im - s * (nz * a_re + nx * b_re));
        let nb = (co * b_re + s * (nx * a_im - nz * b_im), co * b_im - s * (nx * a_re - nz * b_re));
        psi = [na, nb];
        let norm = (na.0 * na.0 + na.1 * na.1 + nb.0 * nb.0 + nb.1 * nb.1).sqrt();
        drift = drift.max((norm - 1.0).abs());
    }
    (psi, drift)
}

fn branch_vector(p: &DotParams, b: Branch) -> [f64; 2] {
    let e = eigenstructure(p);
    match b {
        Branch::Upper => e.plus,
        Branch::Lower => e.minus,
    }
}

fn projection(psi: &C2, v: [f64; 2]) -> f64 {
    let re = v[0] * psi[0].0 + v[1] * psi[1].0;
    let im = v[0] * psi[0].1 + v[1] * psi[1].1;
    re * re + im * im
}

/// Linear detuning ramp from `start.Δ` to `end.Δ` at fixed `T_c`, starting
/// in `|02S⟩`. Halving the step size must change the adiabaticity by less
/// than 1e-4.
pub fn adiabatic_sweep(start: &DotParams, end: &DotParams, ramp_duration: f64, steps: usize) -> Result<SweepResult> {
    positive("ramp duration", ramp_duration)?;
    if steps < MIN_SWEEP_STEPS {
        return Err(Error::InvalidParameter(format!("at least {MIN_SWEEP_STEPS} sweep steps are required")));
    }
    if start.tunneling_uev != end.tunneling_uev {
        return Err(Error::InvalidParameter("the sweep keeps T_c fixed".into()));
    }
    let e0 = eigenstructure(start);
    let tracked = if e0.plus[1].abs() >= e0.minus[1].abs() { Branch::Upper } else { Branch::Lower };
    let target = branch_vector(end, tracked);
    let (psi, drift) = sweep_once(start, end, ramp_duration, steps);
    let (fine, drift_fine) = sweep_once(start, end, ramp_duration, 2 * steps);
    let adiabaticity = projection(&psi, target);
    let refined = projection(&fine, target);
    if (adiabaticity - refined).abs() > SWEEP_CONVERGENCE_TOL {
        return Err(Error::NotConverged(format!(
            "sweep adiabaticity changed by {:e} when halving the step",
            (adiabaticity - refined).abs()
        )));
    }
    Ok(SweepResult { final_state: psi, adiabaticity, tracked_branch: tracked, max_norm_drift: drift.max(drift_fine), steps })
}
