use nalgebra::DVector;

use super::{HilbertLayout, LinOperator};
use crate::error::{Error, Result};
use crate::scalar::{cr, Cplx, Real};

pub type CVector<T> = DVector<Cplx<T>>;

/// Complex amplitude vector over a [`HilbertLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    layout: HilbertLayout,
    amplitudes: CVector<T>,
}

impl<T: Real> StateVector<T> {
    /// Wraps raw amplitudes without normalizing them.
    pub fn new(layout: HilbertLayout, amplitudes: CVector<T>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), got: amplitudes.len() });
        }
        if amplitudes.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { layout, amplitudes })
    }

    pub(crate) fn from_parts(layout: HilbertLayout, amplitudes: CVector<T>) -> Self {
        debug_assert_eq!(amplitudes.len(), layout.dim());
        Self { layout, amplitudes }
    }

    /// Computational basis state `index`.
    pub fn basis(layout: HilbertLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), got: index });
        }
        let mut v = CVector::zeros(layout.dim());
        v[index] = cr(T::one());
        Ok(Self { layout, amplitudes: v })
    }

    pub fn layout(&self) -> HilbertLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector<T> {
        self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
    }

    /// Rescales to unit L2 norm.
    pub fn normalize(mut self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() {
            return Err(Error::InvalidParameter("cannot normalize the zero vector".into()));
        }
        self.amplitudes.unscale_mut(n);
        Ok(self)
    }

    /// `op |self⟩`.
    pub fn apply(&self, op: &LinOperator<T>) -> Result<Self> {
        if op.layout() != self.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self::from_parts(self.layout, op.matrix() * &self.amplitudes))
    }

    /// `|self⟩ ⊗ |photons⟩` on a layout with a cavity.
    pub fn with_cavity_level(&self, target: HilbertLayout, photons: usize) -> Result<Self> {
        if self.layout.fock_cutoff() != 0 || target.n_qubits() != self.layout.n_qubits() {
            return Err(Error::LayoutMismatch);
        }
        if photons > target.fock_cutoff() {
            return Err(Error::DimensionMismatch { expected: target.fock_levels(), got: photons });
        }
        let mut v = CVector::zeros(target.dim());
        for (bits, a) in self.amplitudes.iter().enumerate() {
            v[target.index(bits, photons)] = *a;
        }
        Ok(Self::from_parts(target, v))
    }

    /// Total probability of the cavity being in `photons`.
    pub fn cavity_population(&self, photons: usize) -> T {
        let levels = self.layout.fock_levels();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i % levels == photons)
            .fold(T::zero(), |s, (_, z)| s + z.norm_sqr())
    }
}

/// `⟨a|b⟩`, conjugating the left argument.
pub fn overlap<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Cplx<T>> {
    if a.layout != b.layout {
        return Err(Error::LayoutMismatch);
    }
    Ok(a.amplitudes.dotc(&b.amplitudes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn overlap_examples() {
        let l = HilbertLayout::qubits_only(1).unwrap();
        let s = 0.5f64.sqrt();
        let plus_x = StateVector::<f64>::new(l, CVector::from_vec(vec![c(s, 0.), c(s, 0.)])).unwrap();
        let minus_x = StateVector::new(l, CVector::from_vec(vec![c(s, 0.), c(-s, 0.)])).unwrap();
        assert!((overlap(&plus_x, &plus_x).unwrap() - c::<f64>(1., 0.)).norm() < 1e-15);
        assert!(overlap(&plus_x, &minus_x).unwrap().norm() < 1e-15);
        let e0 = StateVector::<f64>::basis(l, 0).unwrap();
        let e1 = StateVector::<f64>::basis(l, 1).unwrap();
        assert_eq!(overlap(&e0, &e1).unwrap(), c(0., 0.));
    }

    #[test]
    fn overlap_conjugates_left() {
        let l = HilbertLayout::qubits_only(1).unwrap();
        let a = StateVector::new(l, CVector::from_vec(vec![c(0., 1.), c(0., 0.)])).unwrap();
        let b = StateVector::<f64>::basis(l, 0).unwrap();
        assert_eq!(overlap(&a, &b).unwrap(), c(0., -1.));
    }

    #[test]
    fn normalize_and_errors() {
        let l = HilbertLayout::qubits_only(2).unwrap();
        let v = CVector::from_vec(vec![c(1., 2.), c(-3., 0.5), c(0., 0.), c(4., -1.)]);
        let s = StateVector::<f64>::new(l, v).unwrap().normalize().unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!(StateVector::<f64>::new(l, CVector::zeros(3)).is_err());
        assert!(StateVector::<f64>::new(l, CVector::zeros(4)).unwrap().normalize().is_err());
        let other = StateVector::<f64>::basis(HilbertLayout::qubits_only(1).unwrap(), 0).unwrap();
        assert_eq!(overlap(&s, &other), Err(Error::LayoutMismatch));
    }

    #[test]
    fn cavity_extension() {
        let q = HilbertLayout::qubits_only(2).unwrap();
        let full = HilbertLayout::new(2, 2).unwrap();
        let s = StateVector::<f64>::basis(q, 2).unwrap().with_cavity_level(full, 1).unwrap();
        assert_eq!(s.amplitudes()[full.index(2, 1)], c(1., 0.));
        assert!((s.cavity_population(1) - 1.0).abs() < 1e-15);
        assert_eq!(s.cavity_population(0), 0.0);
    }
}
