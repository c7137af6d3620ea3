use num_complex::Complex64;

use super::{Lattice, SpectralError};

/// Membership flags carried by a field.
///
/// `dotted` asserts a vanishing mean mode (the field lies in `dot-H^s`);
/// `solenoidal` asserts `xi . coeff(xi) = 0` for every mode; `potential`
/// asserts the field is a gradient (`P_g` range). Flags are maintained by
/// the operations that guarantee them and validated in debug builds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FieldFlags {
    pub dotted: bool,
    pub solenoidal: bool,
    pub potential: bool,
}

/// Real field on the torus stored through complex Fourier coefficients on
/// the full symmetric box lattice.
///
/// Coefficients are component-major: `coeffs[comp * modes + index]`.
#[derive(Debug, Clone)]
pub struct FourierField {
    lattice: Lattice,
    components: usize,
    coeffs: Vec<Complex64>,
    flags: FieldFlags,
}

impl FourierField {
    /// Zero field with `components` components (1 = scalar, n = vector).
    pub fn zeros(lattice: Lattice, components: usize) -> Self {
        let len = components * lattice.mode_count();
        Self {
            lattice,
            components,
            coeffs: vec![Complex64::default(); len],
            flags: FieldFlags {
                dotted: true,
                solenoidal: true,
                potential: true,
            },
        }
    }

    pub fn zeros_scalar(lattice: Lattice) -> Self {
        Self::zeros(lattice, 1)
    }

    pub fn zeros_vector(lattice: Lattice) -> Self {
        let c = lattice.dimension();
        Self::zeros(lattice, c)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_scalar(&self) -> bool {
        self.components == 1
    }

    pub fn is_vector(&self) -> bool {
        self.components == self.lattice.dimension()
    }

    pub fn flags(&self) -> FieldFlags {
        self.flags
    }

    pub fn flags_mut(&mut self) -> &mut FieldFlags {
        &mut self.flags
    }

    #[inline]
    pub fn coeff(&self, comp: usize, idx: usize) -> Complex64 {
        self.coeffs[comp * self.lattice.mode_count() + idx]
    }

    #[inline]
    pub fn coeff_mut(&mut self, comp: usize, idx: usize) -> &mut Complex64 {
        let modes = self.lattice.mode_count();
        &mut self.coeffs[comp * modes + idx]
    }

    /// Coefficient at a mode given by its integer vector.
    pub fn coeff_at(&self, comp: usize, xi: &[i64]) -> Complex64 {
        self.coeff(comp, self.lattice.index(xi))
    }

    /// Set a coefficient and its Hermitian mirror, keeping the field real.
    pub fn set_pair(&mut self, comp: usize, xi: &[i64], value: Complex64) {
        let idx = self.lattice.index(xi);
        let mirror = self.lattice.mirror_index(idx);
        *self.coeff_mut(comp, idx) = value;
        *self.coeff_mut(comp, mirror) = value.conj();
        self.flags = FieldFlags::default();
    }

    /// Raw coefficient plane of one component.
    pub fn plane(&self, comp: usize) -> &[Complex64] {
        let modes = self.lattice.mode_count();
        &self.coeffs[comp * modes..(comp + 1) * modes]
    }

    pub fn plane_mut(&mut self, comp: usize) -> &mut [Complex64] {
        let modes = self.lattice.mode_count();
        &mut self.coeffs[comp * modes..(comp + 1) * modes]
    }

    /// Enforce Hermitian symmetry by averaging each coefficient with the
    /// conjugate of its mirror.
    pub fn symmetrize(&mut self) {
        let modes = self.lattice.mode_count();
        for comp in 0..self.components {
            for idx in 0..modes {
                let mirror = self.lattice.mirror_index(idx);
                if mirror < idx {
                    continue;
                }
                let a = self.coeff(comp, idx);
                let b = self.coeff(comp, mirror);
                let avg = 0.5 * (a + b.conj());
                *self.coeff_mut(comp, idx) = avg;
                *self.coeff_mut(comp, mirror) = avg.conj();
            }
        }
    }

    /// Maximum deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let modes = self.lattice.mode_count();
        let mut worst = 0.0f64;
        for comp in 0..self.components {
            for idx in 0..modes {
                let mirror = self.lattice.mirror_index(idx);
                let d = (self.coeff(comp, idx) - self.coeff(comp, mirror).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Zero the mean mode bit-exactly and set the dotted flag. Explicit by
    /// design: callers that need a dotted field must ask for the projection.
    pub fn into_dotted(mut self) -> Self {
        let origin = self.lattice.origin_index();
        for comp in 0..self.components {
            *self.coeff_mut(comp, origin) = Complex64::default();
        }
        self.flags.dotted = true;
        self
    }

    /// Largest coefficient magnitude (scale for tolerances).
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Worst relative divergence `|xi . u_hat(xi)| / (|xi| |u_hat(xi)|)`.
    pub fn solenoidal_defect(&self) -> f64 {
        assert!(self.is_vector());
        let n = self.lattice.dimension();
        let scale = self.max_coeff().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for (idx, xi) in self.lattice.modes().enumerate() {
            let norm_sq: i64 = xi.iter().map(|&x| x * x).sum();
            if norm_sq == 0 {
                continue;
            }
            let mut dot = Complex64::default();
            for (j, &x) in xi.iter().enumerate().take(n) {
                dot += self.coeff(j, idx) * x as f64;
            }
            worst = worst.max(dot.norm() / ((norm_sq as f64).sqrt() * scale));
        }
        worst
    }

    pub(crate) fn same_lattice(&self, other: &Self) -> Result<(), SpectralError> {
        if self.lattice != other.lattice {
            return Err(SpectralError::LatticeMismatch(
                format!("{:?}", self.lattice),
                format!("{:?}", other.lattice),
            ));
        }
        Ok(())
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<(), SpectralError> {
        self.same_lattice(other)?;
        if self.components != other.components {
            return Err(SpectralError::ComponentMismatch(
                self.components,
                other.components,
            ));
        }
        Ok(())
    }

    /// Linear combination `self + scale * other`.
    pub fn add_scaled(&mut self, other: &Self, scale: f64) {
        debug_assert!(self.same_shape(other).is_ok());
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += scale * b;
        }
        self.flags = FieldFlags {
            dotted: self.flags.dotted && other.flags.dotted,
            solenoidal: self.flags.solenoidal && other.flags.solenoidal,
            potential: self.flags.potential && other.flags.potential,
        };
    }

    pub fn scale(&mut self, factor: f64) {
        for c in self.coeffs.iter_mut() {
            *c *= factor;
        }
    }

    /// Copy coefficients into a (possibly larger) lattice.
    pub fn embed(&self, target: &Lattice) -> Result<Self, SpectralError> {
        if target.dimension() != self.lattice.dimension() || target.cutoff() < self.lattice.cutoff()
        {
            return Err(SpectralError::LatticeMismatch(
                format!("{:?}", self.lattice),
                format!("{:?}", target),
            ));
        }
        let mut out = FourierField::zeros(target.clone(), self.components);
        for (idx, xi) in self.lattice.modes().enumerate() {
            let tgt = target.index(&xi);
            for comp in 0..self.components {
                *out.coeff_mut(comp, tgt) = self.coeff(comp, idx);
            }
        }
        out.flags = self.flags;
        Ok(out)
    }

    /// Truncate coefficients to a smaller lattice.
    pub fn truncate(&self, target: &Lattice) -> Result<Self, SpectralError> {
        if target.dimension() != self.lattice.dimension() || target.cutoff() > self.lattice.cutoff()
        {
            return Err(SpectralError::LatticeMismatch(
                format!("{:?}", self.lattice),
                format!("{:?}", target),
            ));
        }
        let mut out = FourierField::zeros(target.clone(), self.components);
        for (idx, xi) in target.modes().enumerate() {
            let src = self.lattice.index(&xi);
            for comp in 0..self.components {
                *out.coeff_mut(comp, idx) = self.coeff(comp, src);
            }
        }
        out.flags = FieldFlags {
            dotted: self.flags.dotted,
            solenoidal: self.flags.solenoidal,
            potential: self.flags.potential,
        };
        Ok(out)
    }
}

/// Real samples on the uniform grid `x_j = j / N` per axis.
///
/// Values are component-major: `values[comp * N^n + node]`, nodes in
/// lexicographic order matching [`Lattice`].
#[derive(Debug, Clone)]
pub struct GridField {
    dimension: usize,
    nodes_per_axis: usize,
    components: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn zeros(dimension: usize, nodes_per_axis: usize, components: usize) -> Self {
        let len = components * nodes_per_axis.pow(dimension as u32);
        Self {
            dimension,
            nodes_per_axis,
            components,
            values: vec![0.0; len],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_axis.pow(self.dimension as u32)
    }

    #[inline]
    pub fn value(&self, comp: usize, node: usize) -> f64 {
        self.values[comp * self.node_count() + node]
    }

    #[inline]
    pub fn value_mut(&mut self, comp: usize, node: usize) -> &mut f64 {
        let nodes = self.node_count();
        &mut self.values[comp * nodes + node]
    }

    pub fn plane(&self, comp: usize) -> &[f64] {
        let nodes = self.node_count();
        &self.values[comp * nodes..(comp + 1) * nodes]
    }

    pub fn plane_mut(&mut self, comp: usize) -> &mut [f64] {
        let nodes = self.node_count();
        &mut self.values[comp * nodes..(comp + 1) * nodes]
    }

    /// Coordinates of a node by flat index.
    pub fn node_coords(&self, mut node: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dimension];
        for d in (0..self.dimension).rev() {
            x[d] = (node % self.nodes_per_axis) as f64 / self.nodes_per_axis as f64;
            node /= self.nodes_per_axis;
        }
        x
    }

    /// Mean over the grid = trapezoidal quadrature of the 1-periodic field.
    pub fn mean(&self, comp: usize) -> f64 {
        crate::sum::neumaier_sum(self.plane(comp).iter().copied()) / self.node_count() as f64
    }
}
