use serde::Serialize;

use crate::error::{Error, Result};

/// Shape of the composite space: `n_qubits` two-level systems followed by
/// one truncated Fock mode with levels `0..=fock_cutoff`.
///
/// Basis ordering is fixed: qubit 1 is the slowest index and the cavity
/// photon number the fastest, so
/// `index = bits * (fock_cutoff + 1) + photons`, where bit `N - site` of
/// `bits` holds qubit `site` (1-based). A qubit bit of 0 is the upper
/// level `|+⟩`, 1 is the lower level `|−⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HilbertLayout {
    n_qubits: usize,
    fock_cutoff: usize,
}

impl HilbertLayout {
    /// Largest admissible total dimension.
    pub const MAX_DIM: usize = 1 << 26;

    pub fn new(n_qubits: usize, fock_cutoff: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidLayout("at least one qubit is required".into()));
        }
        let levels = fock_cutoff
            .checked_add(1)
            .ok_or_else(|| Error::InvalidLayout("fock cutoff overflows".into()))?;
        let too_big = Error::DimensionTooLarge { n_qubits, fock_levels: levels };
        if n_qubits > 26 {
            return Err(too_big);
        }
        match (1usize << n_qubits).checked_mul(levels) {
            Some(dim) if dim <= Self::MAX_DIM => Ok(Self { n_qubits, fock_cutoff }),
            _ => Err(too_big),
        }
    }

    /// Layout without a cavity factor (a single Fock level).
    pub fn qubits_only(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn fock_levels(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn qubit_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.qubit_dim() * self.fock_levels()
    }

    /// The same qubit register without the cavity.
    pub fn qubit_part(&self) -> Self {
        Self { n_qubits: self.n_qubits, fock_cutoff: 0 }
    }

    #[inline]
    pub fn index(&self, qubit_bits: usize, photons: usize) -> usize {
        debug_assert!(qubit_bits < self.qubit_dim() && photons <= self.fock_cutoff);
        qubit_bits * self.fock_levels() + photons
    }

    /// Inverse of [`index`](Self::index): `(qubit_bits, photons)`.
    #[inline]
    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.fock_levels(), index % self.fock_levels())
    }

    /// Bit position of a 1-based qubit site inside `qubit_bits`.
    #[inline]
    pub fn bit_position(&self, site: usize) -> usize {
        self.n_qubits - site
    }

    /// Level (0 = `|+⟩`, 1 = `|−⟩`) of qubit `site` in a basis index.
    #[inline]
    pub fn qubit_level(&self, index: usize, site: usize) -> usize {
        let (bits, _) = self.split(index);
        (bits >> self.bit_position(site)) & 1
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_qubits {
            Err(Error::SiteOutOfRange { site, n_qubits: self.n_qubits })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let l = HilbertLayout::new(3, 2).unwrap();
        assert_eq!(l.dim(), 24);
        assert_eq!(l.qubit_dim(), 8);
        assert_eq!(l.qubit_part().dim(), 8);
    }

    #[test]
    fn rejects_oversized_and_empty() {
        assert!(HilbertLayout::new(0, 3).is_err());
        assert!(HilbertLayout::new(26, 0).is_ok());
        assert!(matches!(HilbertLayout::new(26, 1), Err(Error::DimensionTooLarge { .. })));
        assert!(HilbertLayout::new(40, 0).is_err());
        assert!(HilbertLayout::new(1, usize::MAX).is_err());
    }

    #[test]
    fn index_roundtrip_and_ordering() {
        let l = HilbertLayout::new(2, 3).unwrap();
        for i in 0..l.dim() {
            let (b, n) = l.split(i);
            assert_eq!(l.index(b, n), i);
        }
        // qubit 1 is the most significant bit
        let i = l.index(0b10, 1);
        assert_eq!(l.qubit_level(i, 1), 1);
        assert_eq!(l.qubit_level(i, 2), 0);
        assert_eq!(i, 9);
    }
}
