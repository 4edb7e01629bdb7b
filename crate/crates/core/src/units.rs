//! Physical constants (CODATA exact SI values where defined).

/// Reduced Planck constant in µeV·s.
pub const HBAR_UEV_S: f64 = 6.582_119_569e-10;
/// Planck constant in µeV·s.
pub const H_UEV_S: f64 = 4.135_667_696e-9;
/// Planck constant in J·s.
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;
/// Elementary charge in C.
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;
/// Resistance quantum h/e² in Ω (≈ 25 812.807 Ω).
pub const RESISTANCE_QUANTUM_OHM: f64 =
    PLANCK_J_S / (ELEMENTARY_CHARGE_C * ELEMENTARY_CHARGE_C);

/// Converts an energy in µeV to an angular frequency in rad/s (ħ = 1).
pub fn uev_to_rad_per_s(energy_uev: f64) -> f64 {
    energy_uev / HBAR_UEV_S
}

/// Converts an energy in µeV to an ordinary frequency in Hz (E/h).
pub fn uev_to_hz(energy_uev: f64) -> f64 {
    energy_uev / H_UEV_S
}
