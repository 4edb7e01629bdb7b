//! Hilbert-space core: the composite qubits ⊗ Fock layout, dense states and
//! operators, tensor embedding, matrix exponentials and comparison metrics.
//!
//! All types are immutable after construction and every function is pure.

mod expm;
mod layout;
mod operator;
mod state;

pub use expm::{is_unitary, mat_exp};
pub use layout::HilbertLayout;
pub use operator::{
    annihilation, embed_cavity_op, embed_qubit_op, pauli, unitary_fidelity_up_to_phase, CMatrix, LinOperator,
};
pub use state::{overlap, CVector, StateVector};

pub(crate) use operator::tol;
