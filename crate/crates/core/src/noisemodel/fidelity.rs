use super::{FidelityMethod, FidelityResult};
use crate::cluster::{GraphKind, InteractionGraph};
use crate::encoding::occupation;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest register enumerated by [`fidelity_brute_force`].
pub const BRUTE_FORCE_MAX_QUBITS: usize = 14;

/// `E[e^{iθ}] = e^{−σ²/2}` for `θ ~ G(0, σ²)`.
pub fn characteristic<T: Real>(sigma: T) -> T {
    (-(sigma * sigma) / T::lit(2.0)).exp()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParameter("sigma must be finite and >= 0".into()));
    }
    Ok(())
}

/// `(2^{−N} 1ᵀ T^{N−1} 1)²` with `T = [[1, 1], [1, c]]`, `c` the bond factor.
///
/// Each step is scaled by 1/2 so long chains stay in range.
pub fn transfer_matrix_value<T: Real>(n_qubits: usize, c: T) -> T {
    let half = T::lit(0.5);
    let (mut v0, mut v1) = (half, half);
    for _ in 1..n_qubits {
        let (a, b) = (v0 + v1, v0 + c * v1);
        v0 = a * half;
        v1 = b * half;
    }
    let amp = v0 + v1;
    amp * amp
}

/// Chain fidelity in `O(N)`.
pub fn fidelity_transfer_matrix(n_qubits: usize, sigma: f64) -> Result<FidelityResult> {
    if n_qubits < 2 {
        return Err(Error::InvalidParameter("the chain formula needs N >= 2".into()));
    }
    check_sigma(sigma)?;
    let value = transfer_matrix_value(n_qubits, characteristic(sigma));
    Ok(FidelityResult::analytic(n_qubits, sigma, value, FidelityMethod::TransferMatrix, GraphKind::Chain))
}

/// `σ → ∞` limit of the chain fidelity (bond factor `c = 0`).
pub fn chain_floor<T: Real>(n_qubits: usize) -> T {
    transfer_matrix_value(n_qubits, T::zero())
}

/// `(2^{−N} Σ_z Π_{(i,j)∈E} c_e^{z_i z_j})²` with one std per edge, in the
/// order of [`InteractionGraph::edges`].
pub fn fidelity_brute_force_edges<T: Real>(graph: &InteractionGraph, sigmas: &[T]) -> Result<T> {
    let n = graph.n_vertices();
    if n > BRUTE_FORCE_MAX_QUBITS {
        return Err(Error::TooManyQubits(n, BRUTE_FORCE_MAX_QUBITS));
    }
    let edges = graph.edges();
    if sigmas.len() != edges.len() {
        return Err(Error::DimensionMismatch { expected: edges.len(), got: sigmas.len() });
    }
    if sigmas.iter().any(|s| !(s.is_finite() && *s >= T::zero())) {
        return Err(Error::InvalidParameter("sigma must be finite and >= 0".into()));
    }
    let factors: Vec<T> = sigmas.iter().map(|s| characteristic(*s)).collect();
    let mut sum = T::zero();
    for z in 0..1usize << n {
        let mut term = T::one();
        for (&(i, j), &c) in edges.iter().zip(&factors) {
            if occupation(z, i, n) & occupation(z, j, n) == 1 {
                term *= c;
            }
        }
        sum += term;
    }
    let amp = sum / T::lit((1usize << n) as f64);
    Ok(amp * amp)
}

/// Enumerated fidelity on an arbitrary graph, same `σ` on every edge.
pub fn fidelity_brute_force(graph: &InteractionGraph, sigma: f64) -> Result<FidelityResult> {
    check_sigma(sigma)?;
    let value = fidelity_brute_force_edges(graph, &vec![sigma; graph.n_edges()])?;
    Ok(FidelityResult::analytic(graph.n_vertices(), sigma, value, FidelityMethod::BruteForce, graph.kind()))
}
