use std::ops::{Add, Mul, Sub};

use nalgebra::{ComplexField, DMatrix};

use super::HilbertLayout;
use crate::error::{Error, Result};
use crate::scalar::{cr, Cplx, Real};

pub type CMatrix<T> = DMatrix<Cplx<T>>;

/// Type-aware tolerance: `base`, but never tighter than a few hundred ulps.
pub(crate) fn tol<T: Real>(base: f64) -> T {
    let floor = <T as Real>::epsilon() * T::lit(512.0);
    let base = T::lit(base);
    if base > floor {
        base
    } else {
        floor
    }
}

/// Dense square operator on a [`HilbertLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinOperator<T: Real> {
    layout: HilbertLayout,
    matrix: CMatrix<T>,
    hermitian_hint: bool,
}

impl<T: Real> LinOperator<T> {
    /// Wraps a matrix. When `hermitian_hint` is set the matrix must satisfy
    /// `max|M − M†| ≤ 1e-12 · max|M|`.
    pub fn new(layout: HilbertLayout, matrix: CMatrix<T>, hermitian_hint: bool) -> Result<Self> {
        let dim = layout.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows().max(matrix.ncols()) });
        }
        let op = Self { layout, matrix, hermitian_hint };
        if hermitian_hint {
            let asym = op.hermitian_asymmetry();
            if asym > tol::<T>(1e-12) * op.max_abs() {
                return Err(Error::NotHermitian(asym.to_f64_lossy()));
            }
        }
        Ok(op)
    }

    pub(crate) fn from_parts(layout: HilbertLayout, matrix: CMatrix<T>, hermitian_hint: bool) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.dim());
        Self { layout, matrix, hermitian_hint }
    }

    pub fn identity(layout: HilbertLayout) -> Self {
        let d = layout.dim();
        Self::from_parts(layout, CMatrix::identity(d, d), true)
    }

    pub fn zeros(layout: HilbertLayout) -> Self {
        let d = layout.dim();
        Self::from_parts(layout, CMatrix::zeros(d, d), true)
    }

    /// Diagonal 0/1 projector selecting basis states `(qubit_bits, photons)`
    /// for which `keep` returns true.
    pub fn diagonal_projector(layout: HilbertLayout, keep: impl Fn(usize, usize) -> bool) -> Self {
        let mut p = Self::zeros(layout);
        for i in 0..layout.dim() {
            let (b, n) = layout.split(i);
            if keep(b, n) {
                p.matrix[(i, i)] = cr(T::one());
            }
        }
        p
    }

    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.layout, self.matrix.adjoint(), self.hermitian_hint)
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self::from_parts(self.layout, self.matrix.map(|z| z * s), self.hermitian_hint)
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        let herm = self.hermitian_hint && s.im == T::zero();
        Self::from_parts(self.layout, self.matrix.map(|z| z * s), herm)
    }

    pub fn trace(&self) -> Cplx<T> {
        self.matrix.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.matrix.iter().fold(T::zero(), |m, z| {
            let a = z.modulus();
            if a > m {
                a
            } else {
                m
            }
        })
    }

    /// `max|M − M†|`.
    pub fn hermitian_asymmetry(&self) -> T {
        let d = self.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                let diff = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).modulus();
                if diff > worst {
                    worst = diff;
                }
            }
        }
        worst
    }

    /// `max|U†U − I|`.
    pub fn unitarity_error(&self) -> T {
        let d = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let eye = CMatrix::<T>::identity(d, d);
        (prod - eye).iter().fold(T::zero(), |m, z| {
            let a = z.modulus();
            if a > m {
                a
            } else {
                m
            }
        })
    }

    /// Largest elementwise deviation between two operators.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok((&self.matrix - &other.matrix).iter().fold(T::zero(), |m, z| {
            let a = z.modulus();
            if a > m {
                a
            } else {
                m
            }
        }))
    }

    /// Kronecker product with the cavity identity: lifts a qubits-only
    /// operator onto `target`.
    pub fn extend_with_cavity(&self, target: HilbertLayout) -> Result<Self> {
        if self.layout.fock_cutoff() != 0 || target.n_qubits() != self.layout.n_qubits() {
            return Err(Error::LayoutMismatch);
        }
        let eye = CMatrix::<T>::identity(target.fock_levels(), target.fock_levels());
        Ok(Self::from_parts(target, self.matrix.kronecker(&eye), self.hermitian_hint))
    }
}

impl<T: Real> Add for &LinOperator<T> {
    type Output = LinOperator<T>;
    fn add(self, rhs: Self) -> LinOperator<T> {
        assert_eq!(self.layout, rhs.layout, "operator layouts differ");
        LinOperator::from_parts(self.layout, &self.matrix + &rhs.matrix, self.hermitian_hint && rhs.hermitian_hint)
    }
}

impl<T: Real> Add for LinOperator<T> {
    type Output = LinOperator<T>;
    fn add(self, rhs: Self) -> LinOperator<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for &LinOperator<T> {
    type Output = LinOperator<T>;
    fn sub(self, rhs: Self) -> LinOperator<T> {
        assert_eq!(self.layout, rhs.layout, "operator layouts differ");
        LinOperator::from_parts(self.layout, &self.matrix - &rhs.matrix, self.hermitian_hint && rhs.hermitian_hint)
    }
}

impl<T: Real> Mul for &LinOperator<T> {
    type Output = LinOperator<T>;
    fn mul(self, rhs: Self) -> LinOperator<T> {
        assert_eq!(self.layout, rhs.layout, "operator layouts differ");
        LinOperator::from_parts(self.layout, &self.matrix * &rhs.matrix, false)
    }
}

impl<T: Real> Mul for LinOperator<T> {
    type Output = LinOperator<T>;
    fn mul(self, rhs: Self) -> LinOperator<T> {
        &self * &rhs
    }
}

fn local_is_hermitian<T: Real>(m: &CMatrix<T>) -> bool {
    let scale = m.iter().fold(T::zero(), |a, z| if z.modulus() > a { z.modulus() } else { a });
    let asym = (m - m.adjoint()).iter().fold(T::zero(), |a, z| if z.modulus() > a { z.modulus() } else { a });
    asym <= tol::<T>(1e-12) * scale
}

/// Places a 2×2 `local` on qubit `site` (1-based), identity elsewhere.
pub fn embed_qubit_op<T: Real>(layout: HilbertLayout, site: usize, local: &CMatrix<T>) -> Result<LinOperator<T>> {
    layout.check_site(site)?;
    if local.nrows() != 2 || local.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: local.nrows().max(local.ncols()) });
    }
    let d = layout.dim();
    let shift = layout.bit_position(site);
    let mut m = CMatrix::<T>::zeros(d, d);
    for col in 0..d {
        let (bits, photons) = layout.split(col);
        let level = (bits >> shift) & 1;
        let base = bits & !(1 << shift);
        for row_level in 0..2 {
            let entry = local[(row_level, level)];
            if entry != Cplx::new(T::zero(), T::zero()) {
                let row = layout.index(base | (row_level << shift), photons);
                m[(row, col)] = entry;
            }
        }
    }
    Ok(LinOperator::from_parts(layout, m, local_is_hermitian(local)))
}

/// Identity on the qubits tensored with `local` on the cavity factor.
pub fn embed_cavity_op<T: Real>(layout: HilbertLayout, local: &CMatrix<T>) -> Result<LinOperator<T>> {
    let levels = layout.fock_levels();
    if local.nrows() != levels || local.ncols() != levels {
        return Err(Error::DimensionMismatch { expected: levels, got: local.nrows().max(local.ncols()) });
    }
    let d = layout.dim();
    let mut m = CMatrix::<T>::zeros(d, d);
    for bits in 0..layout.qubit_dim() {
        let off = bits * levels;
        m.view_mut((off, off), (levels, levels)).copy_from(local);
    }
    Ok(LinOperator::from_parts(layout, m, local_is_hermitian(local)))
}

/// Truncated annihilation operator on levels `0..=n_max`: `⟨n−1|a|n⟩ = √n`.
pub fn annihilation<T: Real>(n_max: usize) -> CMatrix<T> {
    let mut a = CMatrix::<T>::zeros(n_max + 1, n_max + 1);
    for n in 1..=n_max {
        a[(n - 1, n)] = cr(T::lit(n as f64).sqrt());
    }
    a
}

/// Single-qubit matrices in the `{|+⟩, |−⟩}` basis.
pub mod pauli {
    use super::CMatrix;
    use crate::scalar::{c, Real};

    pub fn identity<T: Real>() -> CMatrix<T> {
        CMatrix::identity(2, 2)
    }

    pub fn x<T: Real>() -> CMatrix<T> {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn y<T: Real>() -> CMatrix<T> {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn z<T: Real>() -> CMatrix<T> {
        CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    /// `σ⁺ = |+⟩⟨−|`.
    pub fn raising<T: Real>() -> CMatrix<T> {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)])
    }

    /// `σ⁻ = |−⟩⟨+|`.
    pub fn lowering<T: Real>() -> CMatrix<T> {
        CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)])
    }
}

/// `|Tr(P u† v P)| / rank(P)` for an orthogonal projector `P`.
///
/// Insensitive to global phases of `u` and `v`. Rounding can push the raw
/// value a few ulps above one; the result is clamped to `[0, 1]`.
pub fn unitary_fidelity_up_to_phase<T: Real>(
    u: &LinOperator<T>,
    v: &LinOperator<T>,
    projector: &LinOperator<T>,
) -> Result<T> {
    if u.layout != v.layout || u.layout != projector.layout {
        return Err(Error::LayoutMismatch);
    }
    let p = &projector.matrix;
    let tol10 = tol::<T>(1e-10);
    let idem = (p * p - p).iter().fold(T::zero(), |a, z| if z.modulus() > a { z.modulus() } else { a });
    if idem > tol10 {
        return Err(Error::InvalidProjector(format!("|P² − P| = {:e}", idem.to_f64_lossy())));
    }
    if projector.hermitian_asymmetry() > tol10 {
        return Err(Error::InvalidProjector("P is not self-adjoint".into()));
    }
    let rank = p.trace().re.round();
    if rank < T::lit(0.5) {
        return Err(Error::InvalidProjector("rank 0".into()));
    }
    let tr = (u.matrix.adjoint() * &v.matrix * p).trace();
    let f = tr.modulus() / rank;
    Ok(if f > T::one() { T::one() } else { f })
}
