//! Simulation and analysis toolkit for one-step cluster-state generation in
//! double-quantum-dot charge qubits coupled to a transmission-line
//! resonator.
//!
//! * [`qsys`]: composite Hilbert space, dense operators, matrix exponential.
//! * [`dotmodel`]: double-dot eigenstructure, coupling, gate schedule,
//!   decoherence budget and the adiabatic preparation sweep.
//! * [`dynamics`]: Jaynes-Cummings Hamiltonians, propagators and the
//!   effective Ising-type gate operators.
//! * [`cluster`]: product, graph and cluster states with stabilizer checks.
//! * [`noisemodel`]: Gaussian phase-noise variances and cluster fidelity
//!   (transfer matrix, brute force, Monte Carlo).
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod cluster;
pub mod dotmodel;
pub mod dynamics;
pub mod encoding;
pub mod error;
pub mod noisemodel;
pub mod qsys;
pub mod scalar;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Real;

pub use qsys::HilbertLayout;

pub type StateVector = qsys::StateVector<f64>;
pub type LinOperator = qsys::LinOperator<f64>;
pub type CMatrix = qsys::CMatrix<f64>;
pub type Complex = num_complex::Complex<f64>;

pub type StateVector32 = qsys::StateVector<f32>;
pub type LinOperator32 = qsys::LinOperator<f32>;
