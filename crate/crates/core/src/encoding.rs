//! The σˣ-eigenbasis used by the gate and noise models.
//!
//! Each qubit's diagonal basis is labelled by the occupation `b ∈ {0, 1}`
//! of `nˣ = (1 + σˣ)/2`: `b = 1` is the `σˣ = +1` state
//! `(|−⟩ + |+⟩)/√2` and `b = 0` the `σˣ = −1` state `(|−⟩ − |+⟩)/√2`.
//! Register indices use the same bit order as [`HilbertLayout`]
//! (qubit 1 most significant).
//!
//! In the computational basis `(|+⟩, |−⟩)` the single-qubit change of basis
//! is `W = [[−1, 1], [1, 1]]/√2`, which is real, symmetric and its own
//! inverse, so the same butterfly maps both ways.
//!
//! [`HilbertLayout`]: crate::qsys::HilbertLayout

use crate::qsys::CVector;
use crate::scalar::Real;

/// Applies `W^{⊗N}` in place to a qubit-register vector of length `2^N`.
pub fn apply_basis_change<T: Real>(v: &mut CVector<T>, n_qubits: usize) {
    debug_assert_eq!(v.len(), 1 << n_qubits);
    let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    for p in 0..n_qubits {
        let mask = 1usize << p;
        for i in 0..v.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (lo, hi) = (v[i], v[j]);
                v[i] = (hi - lo) * r;
                v[j] = (lo + hi) * r;
            }
        }
    }
}

/// `nˣ` occupation of qubit `site` (1-based) in register index `bits`.
#[inline]
pub fn occupation(bits: usize, site: usize, n_qubits: usize) -> usize {
    (bits >> (n_qubits - site)) & 1
}

/// Number of listed vertex pairs whose occupations are both 1.
#[inline]
pub fn occupied_pairs(bits: usize, n_qubits: usize, edges: &[(usize, usize)]) -> usize {
    edges
        .iter()
        .filter(|&&(i, j)| occupation(bits, i, n_qubits) & occupation(bits, j, n_qubits) == 1)
        .count()
}
