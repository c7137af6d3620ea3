use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Truncated mode set `{ xi in Z^n : |xi|_inf <= K }`.
///
/// Storage is the full symmetric box (no half-spectrum compression), in
/// lexicographic order with the first component most significant and each
/// component running `-K ..= K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    dimension: usize,
    cutoff: usize,
}

impl Lattice {
    pub fn new(dimension: usize, cutoff: usize) -> Result<Self, SpectralError> {
        if dimension < 2 {
            return Err(SpectralError::BadDimension(dimension));
        }
        if cutoff < 1 {
            return Err(SpectralError::BadCutoff(cutoff));
        }
        Ok(Self { dimension, cutoff })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Number of modes, `(2K+1)^n`.
    pub fn mode_count(&self) -> usize {
        (2 * self.cutoff + 1).pow(self.dimension as u32)
    }

    /// Side length of the coefficient box, `2K+1`.
    pub fn side(&self) -> usize {
        2 * self.cutoff + 1
    }

    /// Flat index of a mode (lexicographic, first component major).
    pub fn index(&self, xi: &[i64]) -> usize {
        debug_assert_eq!(xi.len(), self.dimension);
        let k = self.cutoff as i64;
        let side = self.side();
        let mut idx = 0usize;
        for &x in xi {
            debug_assert!(x.abs() <= k);
            idx = idx * side + (x + k) as usize;
        }
        idx
    }

    /// Mode at a flat index.
    pub fn mode(&self, mut idx: usize) -> Vec<i64> {
        let k = self.cutoff as i64;
        let side = self.side();
        let mut xi = vec![0i64; self.dimension];
        for d in (0..self.dimension).rev() {
            xi[d] = (idx % side) as i64 - k;
            idx /= side;
        }
        xi
    }

    /// Iterate all modes in storage order.
    pub fn modes(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.mode_count()).map(move |i| self.mode(i))
    }

    /// Flat index of the reflected mode `-xi`.
    pub fn mirror_index(&self, idx: usize) -> usize {
        self.mode_count() - 1 - idx
    }

    /// Whether `xi` fits in this lattice.
    pub fn contains(&self, xi: &[i64]) -> bool {
        xi.len() == self.dimension && xi.iter().all(|&x| x.unsigned_abs() as usize <= self.cutoff)
    }

    /// Flat index of the zero mode.
    pub fn origin_index(&self) -> usize {
        self.index(&vec![0; self.dimension])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_symmetry() {
        let lat = Lattice::new(2, 3).unwrap();
        assert_eq!(lat.mode_count(), 49);
        // Contains the origin and is symmetric under reflection.
        assert!(lat.contains(&[0, 0]));
        for (idx, xi) in lat.modes().enumerate() {
            let neg: Vec<i64> = xi.iter().map(|x| -x).collect();
            assert!(lat.contains(&neg));
            assert_eq!(lat.index(&neg), lat.mirror_index(idx));
            assert_eq!(lat.mode(lat.index(&xi)), xi);
        }
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(Lattice::new(1, 3).is_err());
        assert!(Lattice::new(2, 0).is_err());
    }
}
