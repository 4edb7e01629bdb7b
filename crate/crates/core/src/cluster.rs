//! Product, graph and cluster states of the qubit register.
//!
//! The entangling gate is diagonal in the σˣ basis, so every state built
//! here is assembled as σˣ-basis amplitudes and then mapped to the
//! computational basis with [`apply_basis_change`]. The graph state of a
//! graph `G` at phase `φ` is
//!
//! ```text
//! |G, φ⟩ = exp(−iφ Σ_{(i,j)∈E} nᵢˣnⱼˣ) ⊗ᵢ|−⟩ᵢ
//! ```
//!
//! # Stabilizers
//!
//! Because the roles of x and z are exchanged relative to the usual graph
//! state convention, the Pauli operators that act as "X" and "Z" on the
//! occupation label `b` are `X_b = −σᶻ` and `Z_b = −σˣ` (with `b = 1` the
//! `σˣ = +1` eigenstate). The stabilizer of vertex `i` at `φ = π` is then
//!
//! ```text
//! Kᵢ = (−σᵢᶻ) Π_{j∈N(i)} (−σⱼˣ) = (−1)^{1+deg i} σᵢᶻ Π_{j∈N(i)} σⱼˣ
//! ```
//!
//! Worked example, two qubits joined by one edge. In the σˣ basis the state
//! is `(|00⟩ + |01⟩ + |10⟩ − |11⟩)/2` (labels `b₁b₂`). Applying `−σ₂ˣ` gives
//! `(|00⟩ − |01⟩ + |10⟩ + |11⟩)/2`; `−σ₁ᶻ` then maps `|b₁⟩ → |1 − b₁⟩` and
//! returns the original state, so `⟨K₁⟩ = +1`. The bare `σ₁ᶻσ₂ˣ` gives `−1`.
//!
//! # Closed-form readings
//!
//! [`cluster_formula_state`] expands a closed-form tensor-product
//! expression for the register state under several readings of its operator
//! product; it is checked against [`generated_cluster_state`], never used as
//! ground truth.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dotmodel::GateSchedule;
use crate::encoding::{apply_basis_change, occupation, occupied_pairs};
use crate::error::{Error, Result};
use crate::qsys::{overlap, CVector, HilbertLayout, StateVector};
use crate::scalar::{cr, phase, Cplx, Real};

/// Timing residual above which a schedule is rejected.
pub const SCHEDULE_TOL: f64 = 1e-9;

/// Undirected simple graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InteractionGraph {
    n_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// Shape of an [`InteractionGraph`], used as a report tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Empty,
    Chain,
    Complete,
    Custom,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Empty => "empty",
            GraphKind::Chain => "chain",
            GraphKind::Complete => "complete",
            GraphKind::Custom => "custom",
        })
    }
}

impl InteractionGraph {
    /// Edges are unordered; duplicates collapse.
    pub fn new(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::InvalidParameter("a graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {a}")));
            }
            for v in [a, b] {
                if v == 0 || v > n_vertices {
                    return Err(Error::SiteOutOfRange { site: v, n_qubits: n_vertices });
                }
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self { n_vertices, edges: set })
    }

    pub fn empty(n_vertices: usize) -> Result<Self> {
        Self::new(n_vertices, [])
    }

    pub fn complete(n_vertices: usize) -> Result<Self> {
        Self::new(n_vertices, (1..=n_vertices).flat_map(|i| ((i + 1)..=n_vertices).map(move |j| (i, j))))
    }

    pub fn chain(n_vertices: usize) -> Result<Self> {
        Self::new(n_vertices, (1..n_vertices).map(|i| (i, i + 1)))
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Sorted `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().collect()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match v {
                _ if a == v => Some(b),
                _ if b == v => Some(a),
                _ => None,
            })
            .collect()
    }

    pub fn kind(&self) -> GraphKind {
        let n = self.n_vertices;
        if self.edges.is_empty() && n > 1 {
            GraphKind::Empty
        } else if self.edges.len() == n - 1 && (1..n).all(|i| self.has_edge(i, i + 1)) {
            GraphKind::Chain
        } else if self.edges.len() == n * (n - 1) / 2 {
            GraphKind::Complete
        } else {
            GraphKind::Custom
        }
    }
}

/// Register state from σˣ-basis amplitudes `f(b)`, unnormalized.
pub(crate) fn from_x_amplitudes<T: Real>(n_qubits: usize, f: impl Fn(usize) -> Cplx<T>) -> Result<StateVector<T>> {
    let layout = HilbertLayout::qubits_only(n_qubits)?;
    let mut v = CVector::<T>::from_iterator(layout.dim(), (0..layout.dim()).map(f));
    apply_basis_change(&mut v, n_qubits);
    Ok(StateVector::from_parts(layout, v))
}

pub(crate) fn uniform_amplitude<T: Real>(n_qubits: usize) -> T {
    T::lit(0.5f64.powf(n_qubits as f64 / 2.0))
}

/// `⊗ᵢ|−⟩ᵢ`, computational index `2^N − 1`.
pub fn initial_product_state<T: Real>(n_qubits: usize) -> Result<StateVector<T>> {
    let layout = HilbertLayout::qubits_only(n_qubits)?;
    StateVector::basis(layout, layout.dim() - 1)
}

/// `exp(−iφ Σ_{(i,j)∈E} nᵢˣnⱼˣ)` applied to `⊗|−⟩`.
pub fn graph_state<T: Real>(graph: &InteractionGraph, phi: T) -> Result<StateVector<T>> {
    if !phi.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = graph.n_vertices();
    let edges = graph.edges();
    let a = uniform_amplitude::<T>(n);
    from_x_amplitudes(n, |b| phase(phi * T::lit(occupied_pairs(b, n, &edges) as f64)) * a)
}

/// Output of the complete-graph gate at the schedule's `(λ, τ)`.
///
/// Equal to `u_cluster_gate(N, λ, τ)` applied to [`initial_product_state`];
/// the diagonal gate is applied directly to σˣ amplitudes so large registers
/// never form the `2^N × 2^N` matrix.
pub fn generated_cluster_state(n_qubits: usize, schedule: &GateSchedule) -> Result<StateVector<f64>> {
    generated_cluster_state_with(n_qubits, schedule.lambda, schedule.tau)
}

/// [`generated_cluster_state`] for explicit `(λ, τ)` in any precision.
pub fn generated_cluster_state_with<T: Real>(n_qubits: usize, lambda: T, tau: T) -> Result<StateVector<T>> {
    let phi = T::lit(4.0) * lambda * tau;
    let turns = phi.to_f64_lossy() / std::f64::consts::PI;
    let odd = 2.0 * ((turns - 1.0) / 2.0).round() + 1.0;
    let residual = (turns - odd).abs() / odd.abs();
    if !residual.is_finite() || residual > SCHEDULE_TOL.max(64.0 * T::epsilon().to_f64_lossy()) {
        return Err(Error::ScheduleViolation(residual));
    }
    graph_state(&InteractionGraph::complete(n_qubits)?, phi)
}

/// Readings of the closed-form expression
/// `2^{−N/2} ⊗ᵢ(|0⟩ᵢ (−1)^{N−i} Π_{j=i+1}^{N} σᵢˣ + |1⟩ᵢ)`
/// whose operator carries the factor index `i` but runs over `j`.
/// Here `|0⟩` is the `σˣ = +1` state and `|1⟩` the `σˣ = −1` state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaReading {
    /// Operator index taken literally: `σᵢˣ` acts `N−i` times on its own factor.
    AsPrinted,
    /// Operator index read as `j`: `Π_{j>i} σⱼˣ` acts on all later factors.
    Rightward,
    /// Nearest-neighbour chain form: `|0⟩ᵢ(−σ_{i+1}ˣ)` for `i < N`.
    Chain,
}

impl FormulaReading {
    pub const ALL: [FormulaReading; 3] = [Self::AsPrinted, Self::Rightward, Self::Chain];

    pub fn tag(&self) -> &'static str {
        match self {
            Self::AsPrinted => "as-printed",
            Self::Rightward => "rightward",
            Self::Chain => "chain",
        }
    }

    /// Construction rule, reproduced in reports.
    pub fn rule(&self) -> &'static str {
        match self {
            Self::AsPrinted => {
                "factor i is |0>_i (-1)^(N-i) (sigma^x_i)^(N-i) + |1>_i with sigma^x_i acting on its own |0>_i"
            }
            Self::Rightward => {
                "factor i is |0>_i (-1)^(N-i) prod_{j>i} sigma^x_j + |1>_i with sigma^x_j acting on factor j"
            }
            Self::Chain => "factor i < N is |0>_i (-sigma^x_{i+1}) + |1>_i; factor N is |0>_N + |1>_N",
        }
    }
}

impl fmt::Display for FormulaReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FormulaReading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|r| r.tag() == s).ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// Expands the closed-form expression term by term under `reading`.
pub fn cluster_formula_state<T: Real>(n_qubits: usize, reading: FormulaReading) -> Result<StateVector<T>> {
    let n = n_qubits;
    // label s_i = 0 picks the |0⟩ᵢ term, i.e. occupation b_i = 1
    let sign = |b: usize| -> i32 {
        let s = |i: usize| 1 - occupation(b, i, n);
        // σˣ eigenvalue on the label of factor j
        let ev = |j: usize| if s(j) == 0 { 1 } else { -1 };
        let mut total = 1;
        for i in 1..=n {
            if s(i) != 0 {
                continue;
            }
            let m = (n - i) as i32;
            let parity = if m % 2 == 0 { 1 } else { -1 };
            total *= match reading {
                FormulaReading::AsPrinted => parity * if m % 2 == 0 { 1 } else { ev(i) },
                FormulaReading::Rightward => parity * ((i + 1)..=n).map(ev).product::<i32>(),
                FormulaReading::Chain => {
                    if i < n {
                        -ev(i + 1)
                    } else {
                        1
                    }
                }
            };
        }
        total
    };
    let a = uniform_amplitude::<T>(n);
    let psi = from_x_amplitudes(n, |b| cr(a * T::lit(sign(b) as f64)))?;
    psi.normalize()
}

/// `⟨Kᵢ⟩` for every vertex, with `Kᵢ = (−σᵢᶻ) Π_{j∈N(i)} (−σⱼˣ)`.
pub fn stabilizer_expectations<T: Real>(state: &StateVector<T>, graph: &InteractionGraph) -> Result<Vec<T>> {
    let layout = state.layout();
    if layout.fock_cutoff() != 0 || layout.n_qubits() != graph.n_vertices() {
        return Err(Error::LayoutMismatch);
    }
    let n = layout.n_qubits();
    let psi = state.amplitudes();
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let nb = graph.neighbors(i);
        let mask = nb.iter().fold(0usize, |m, &j| m | (1 << layout.bit_position(j)));
        let sign = if (1 + nb.len()).is_multiple_of(2) { T::one() } else { -T::one() };
        let zbit = layout.bit_position(i);
        let mut acc = Cplx::new(T::zero(), T::zero());
        for m in 0..psi.len() {
            // (Πσˣ ψ)[m] = ψ[m ⊕ mask]; σᶻ is +1 on level 0 (|+⟩)
            let z = if (m >> zbit) & 1 == 0 { T::one() } else { -T::one() };
            acc += psi[m].conj() * psi[m ^ mask] * z;
        }
        out.push(acc.re * sign / state.norm().powi(2));
    }
    Ok(out)
}

/// `|⟨a|b⟩|²`.
pub fn state_fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    let v = overlap(a, b)?.norm_sqr();
    Ok(if v > T::one() { T::one() } else { v })
}

/// `Tr ρ²` of the single-qubit reduced state of `site`.
pub fn reduced_purity<T: Real>(state: &StateVector<T>, site: usize) -> Result<T> {
    let layout = state.layout();
    layout.check_site(site)?;
    let shift = layout.bit_position(site);
    let psi = state.amplitudes();
    let mut rho = [[Cplx::new(T::zero(), T::zero()); 2]; 2];
    for idx in 0..psi.len() {
        let (bits, photons) = layout.split(idx);
        if (bits >> shift) & 1 != 0 {
            continue;
        }
        let partner = layout.index(bits | (1 << shift), photons);
        let pair = [psi[idx], psi[partner]];
        for a in 0..2 {
            for b in 0..2 {
                rho[a][b] += pair[a] * pair[b].conj();
            }
        }
    }
    let norm2 = state.norm().powi(2);
    let mut p = T::zero();
    for row in &rho {
        for z in row {
            p += z.norm_sqr();
        }
    }
    Ok(p / (norm2 * norm2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dotmodel::solve_schedule;
    use crate::dynamics::u_cluster_gate;
    use crate::qsys::{embed_qubit_op, pauli, LinOperator};
    use crate::scalar::c;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn schedule(n: usize) -> GateSchedule {
        solve_schedule(1.0, 3, 1, n).unwrap()
    }

    fn x_amplitudes(s: &StateVector<f64>) -> CVector<f64> {
        let mut v = s.amplitudes().clone();
        apply_basis_change(&mut v, s.layout().n_qubits());
        v
    }

    #[test]
    fn graph_constructors() {
        let g = InteractionGraph::complete(4).unwrap();
        assert_eq!(g.n_edges(), 6);
        assert_eq!(g.kind(), GraphKind::Complete);
        assert_eq!(InteractionGraph::chain(5).unwrap().kind(), GraphKind::Chain);
        assert_eq!(InteractionGraph::empty(3).unwrap().kind(), GraphKind::Empty);
        assert!(InteractionGraph::new(3, [(2, 2)]).is_err());
        assert!(InteractionGraph::new(3, [(1, 4)]).is_err());
        assert!(InteractionGraph::new(3, [(0, 1)]).is_err());
        let g = InteractionGraph::new(4, [(3, 1), (1, 3), (2, 4)]).unwrap();
        assert_eq!(g.edges(), vec![(1, 3), (2, 4)]);
        assert_eq!(g.neighbors(1), vec![3]);
        assert_eq!(g.kind(), GraphKind::Custom);
    }

    #[test]
    fn initial_state_examples() {
        let s = initial_product_state::<f64>(1).unwrap();
        assert_eq!(s.amplitudes()[0], c(0., 0.));
        assert_eq!(s.amplitudes()[1], c(1., 0.));

        let s = initial_product_state::<f64>(2).unwrap();
        for site in 1..=2 {
            let x = embed_qubit_op(s.layout(), site, &pauli::x()).unwrap();
            assert!(overlap(&s, &s.apply(&x).unwrap()).unwrap().norm() < 1e-15);
        }

        // repeated tensor products of |−⟩
        let minus = CVector::<f64>::from_vec(vec![c(0., 0.), c(1., 0.)]);
        let mut v = minus.clone();
        for _ in 1..3 {
            v = v.kronecker(&minus);
        }
        let oracle = StateVector::new(HilbertLayout::qubits_only(3).unwrap(), v).unwrap();
        let f = state_fidelity(&oracle, &initial_product_state(3).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_state_is_uniform_in_x_basis() {
        let s = initial_product_state::<f64>(4).unwrap();
        for z in x_amplitudes(&s).iter() {
            assert!((z - c(0.25, 0.)).norm() < 1e-15);
        }
    }

    #[test]
    fn two_qubit_generated_state() {
        let s = generated_cluster_state(2, &schedule(2)).unwrap();
        // σˣ labels b₁b₂ = 00, 01, 10, 11; the doubly occupied term flips
        let want = [0.5, 0.5, 0.5, -0.5];
        let x = x_amplitudes(&s);
        let ph = x[0] / x[0].norm();
        for (z, w) in x.iter().zip(want) {
            assert!((z - ph * w).norm() < 1e-12);
        }
        assert!((reduced_purity(&s, 1).unwrap() - 0.5).abs() < 1e-12);
        assert!((reduced_purity(&s, 2).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn generated_matches_gate_operator() {
        for n in 2..=5 {
            let sch = schedule(n);
            let from_gate = initial_product_state::<f64>(n)
                .unwrap()
                .apply(&u_cluster_gate(n, sch.lambda, sch.tau).unwrap())
                .unwrap();
            let direct = generated_cluster_state(n, &sch).unwrap();
            let d = (from_gate.amplitudes() - direct.amplitudes()).norm();
            assert!(d < 1e-12, "N = {n}: {d}");
        }
    }

    #[test]
    fn schedule_is_checked() {
        let mut s = schedule(3);
        s.tau *= 1.0 + 1e-6;
        assert!(matches!(generated_cluster_state(3, &s), Err(Error::ScheduleViolation(_))));
        // 4λτ = 2π is not an odd multiple of π
        assert!(generated_cluster_state_with(3, PI / 2.0, 1.0).is_err());
    }

    #[test]
    fn even_multiple_is_identity() {
        for n in 2..=4 {
            let s = graph_state(&InteractionGraph::complete(n).unwrap(), 2.0 * PI).unwrap();
            let f = state_fidelity(&s, &initial_product_state(n).unwrap()).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn graph_state_examples() {
        let s = graph_state(&InteractionGraph::empty(3).unwrap(), PI).unwrap();
        assert!((state_fidelity(&s, &initial_product_state(3).unwrap()).unwrap() - 1.0).abs() < 1e-14);

        let a = graph_state(&InteractionGraph::complete(2).unwrap(), PI).unwrap();
        let b = generated_cluster_state(2, &schedule(2)).unwrap();
        assert!((state_fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);

        // the extra (1, 3) bond flips the sign at b = 101 and b = 111: overlap 4/8
        let ch = graph_state(&InteractionGraph::chain(3).unwrap(), PI).unwrap();
        let co = graph_state(&InteractionGraph::complete(3).unwrap(), PI).unwrap();
        let f = state_fidelity(&ch, &co).unwrap();
        assert!((f - 0.25).abs() < 1e-12, "{f}");
        assert!(graph_state(&InteractionGraph::chain(3).unwrap(), f64::NAN).is_err());
    }

    #[test]
    fn single_qubit_formula_readings() {
        let minus = initial_product_state::<f64>(1).unwrap();
        for r in FormulaReading::ALL {
            let s = cluster_formula_state::<f64>(1, r).unwrap();
            assert!((state_fidelity(&s, &minus).unwrap() - 1.0).abs() < 1e-14, "{r}");
        }
    }

    #[test]
    fn formula_readings_against_graphs() {
        for n in 2..=6 {
            let truth = generated_cluster_state(n, &schedule(n)).unwrap();
            let rightward = cluster_formula_state::<f64>(n, FormulaReading::Rightward).unwrap();
            assert!((state_fidelity(&rightward, &truth).unwrap() - 1.0).abs() < 1e-12);

            let chain = cluster_formula_state::<f64>(n, FormulaReading::Chain).unwrap();
            let g = graph_state(&InteractionGraph::chain(n).unwrap(), PI).unwrap();
            assert!((state_fidelity(&chain, &g).unwrap() - 1.0).abs() < 1e-12);

            // literal reading has no entangling term
            let printed = cluster_formula_state::<f64>(n, FormulaReading::AsPrinted).unwrap();
            for site in 1..=n {
                assert!((reduced_purity(&printed, site).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reading_tags_round_trip() {
        for r in FormulaReading::ALL {
            assert_eq!(r.tag().parse::<FormulaReading>().unwrap(), r);
            assert!(!r.rule().is_empty());
        }
        assert!(matches!("bogus".parse::<FormulaReading>(), Err(Error::UnknownTag(_))));
    }

    #[test]
    fn stabilizer_examples() {
        let s = initial_product_state::<f64>(3).unwrap();
        for v in stabilizer_expectations(&s, &InteractionGraph::empty(3).unwrap()).unwrap() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        for n in 2..=8 {
            let s = generated_cluster_state(n, &schedule(n)).unwrap();
            for v in stabilizer_expectations(&s, &InteractionGraph::complete(n).unwrap()).unwrap() {
                assert!((v - 1.0).abs() < 1e-10, "N = {n}: {v}");
            }
        }
        // −σ₂ˣ is the "Z" on vertex 2 and anticommutes only with K₂
        let g = InteractionGraph::chain(3).unwrap();
        let s = graph_state(&g, PI).unwrap();
        let flip = embed_qubit_op(s.layout(), 2, &pauli::x()).unwrap();
        let e = stabilizer_expectations(&s.apply(&flip).unwrap(), &g).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] + 1.0).abs() < 1e-12 && (e[2] - 1.0).abs() < 1e-12);

        assert!(stabilizer_expectations(&s, &InteractionGraph::chain(4).unwrap()).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let l = HilbertLayout::qubits_only(1).unwrap();
        let plus = StateVector::<f64>::basis(l, 0).unwrap();
        let minus = StateVector::<f64>::basis(l, 1).unwrap();
        assert_eq!(state_fidelity(&plus, &plus).unwrap(), 1.0);
        assert_eq!(state_fidelity(&plus, &minus).unwrap(), 0.0);
        let h = FRAC_1_SQRT_2;
        let sup = StateVector::new(l, CVector::from_vec(vec![c(h, 0.), c(h, 0.)])).unwrap();
        assert!((state_fidelity(&sup, &plus).unwrap() - 0.5).abs() < 1e-15);
        let other = initial_product_state::<f64>(2).unwrap();
        assert!(state_fidelity(&plus, &other).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let s = graph_state::<f32>(&InteractionGraph::complete(4).unwrap(), std::f32::consts::PI).unwrap();
        for v in stabilizer_expectations(&s, &InteractionGraph::complete(4).unwrap()).unwrap() {
            assert!((v - 1.0).abs() < 1e-5);
        }
    }

    /// Dense `Kᵢ` built from embedded Pauli matrices.
    fn dense_stabilizer(g: &InteractionGraph, i: usize) -> LinOperator<f64> {
        let l = HilbertLayout::qubits_only(g.n_vertices()).unwrap();
        let mut k = embed_qubit_op(l, i, &pauli::z()).unwrap().scale_real(-1.0);
        for j in g.neighbors(i) {
            k = &k * &embed_qubit_op(l, j, &pauli::x()).unwrap().scale_real(-1.0);
        }
        k
    }

    fn permute_qubits(s: &StateVector<f64>, perm: &[usize]) -> StateVector<f64> {
        let l = s.layout();
        let n = l.n_qubits();
        let mut v = CVector::<f64>::zeros(l.dim());
        for (idx, z) in s.amplitudes().iter().enumerate() {
            let mut out = 0;
            for site in 1..=n {
                if l.qubit_level(idx, site) == 1 {
                    out |= 1 << l.bit_position(perm[site - 1]);
                }
            }
            v[out] = *z;
        }
        StateVector::new(l, v).unwrap()
    }

    fn random_graph() -> impl Strategy<Value = InteractionGraph> {
        (1usize..=6).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> =
                (1..=n).flat_map(|i| ((i + 1)..=n).map(move |j| (i, j))).collect();
            let m = pairs.len();
            proptest::collection::vec(any::<bool>(), m).prop_map(move |keep| {
                let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p);
                InteractionGraph::new(n, edges.collect::<Vec<_>>()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn graph_states_are_stabilized(g in random_graph()) {
            let s = graph_state(&g, PI).unwrap();
            let fast = stabilizer_expectations(&s, &g).unwrap();
            for i in 1..=g.n_vertices() {
                let ks = s.apply(&dense_stabilizer(&g, i)).unwrap();
                let dense = overlap(&s, &ks).unwrap();
                prop_assert!((dense - c(1., 0.)).norm() < 1e-10);
                prop_assert!((fast[i - 1] - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn permutation_symmetry(perm in (2usize..=6).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())) {
            let n = perm.len();
            let s = generated_cluster_state(n, &schedule(n)).unwrap();
            let p = permute_qubits(&s, &perm);
            prop_assert!((state_fidelity(&s, &p).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn fidelity_is_symmetric(phi in -6.0f64..6.0, g in random_graph()) {
            let a = graph_state(&g, phi).unwrap();
            let b = graph_state(&g, PI).unwrap();
            let ab = state_fidelity(&a, &b).unwrap();
            let ba = state_fidelity(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-14 && (0.0..=1.0).contains(&ab));
        }
    }
}
