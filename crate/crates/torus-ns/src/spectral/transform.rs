//! Physical-space transforms with the `e^{2 pi i x . xi}` convention.
//!
//! A cutoff-K field is recovered losslessly from `N >= 2K+1` nodes per axis;
//! products of p cutoff-K factors are quadrature-exact (and their retained
//! Fourier modes alias-free) once `N >= pK + 1`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{FourierField, GridField, Lattice, SpectralError};

type PlanCache = (FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>);

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((len, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(len)
                } else {
                    planner.plan_fft_forward(len)
                }
            })
            .clone()
    })
}

/// In-place FFT along every axis of an `N^n` complex array.
fn fft_all_axes(buf: &mut [Complex64], dimension: usize, n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    let total = buf.len();
    let mut scratch = vec![Complex64::default(); n];
    // Axis d has stride n^(dimension-1-d) in lexicographic layout.
    for d in 0..dimension {
        let stride = n.pow((dimension - 1 - d) as u32);
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                for (k, s) in scratch.iter_mut().enumerate() {
                    *s = buf[base + off + k * stride];
                }
                fft.process(&mut scratch);
                for (k, s) in scratch.iter().enumerate() {
                    buf[base + off + k * stride] = *s;
                }
            }
        }
    }
}

fn wrapped_node(xi: &[i64], n: usize) -> usize {
    let mut idx = 0usize;
    for &x in xi {
        let w = x.rem_euclid(n as i64) as usize;
        idx = idx * n + w;
    }
    idx
}

/// Sample a Fourier field on the uniform `N^n` grid.
///
/// Requires `N >= 2K+1`; the imaginary residue of the inverse transform is
/// discarded (it is at round-off level for Hermitian coefficients).
pub fn to_physical(g: &FourierField, nodes_per_axis: usize) -> Result<GridField, SpectralError> {
    let lat = g.lattice();
    let k = lat.cutoff();
    if nodes_per_axis < 2 * k + 1 {
        return Err(SpectralError::Undersampled {
            n_grid: nodes_per_axis,
            cutoff: k,
            needed: 2 * k + 1,
        });
    }
    let dim = lat.dimension();
    let total = nodes_per_axis.pow(dim as u32);
    let mut out = GridField::zeros(dim, nodes_per_axis, g.components());
    let mut buf = vec![Complex64::default(); total];
    for comp in 0..g.components() {
        buf.iter_mut().for_each(|c| *c = Complex64::default());
        for (idx, xi) in lat.modes().enumerate() {
            buf[wrapped_node(&xi, nodes_per_axis)] = g.coeff(comp, idx);
        }
        fft_all_axes(&mut buf, dim, nodes_per_axis, true);
        let plane = out.plane_mut(comp);
        for (v, c) in plane.iter_mut().zip(buf.iter()) {
            *v = c.re;
        }
        #[cfg(debug_assertions)]
        {
            let scale = g.max_coeff().max(1.0) * total as f64;
            let worst = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
            debug_assert!(
                worst <= 1e-12 * scale,
                "non-real inverse transform: {worst:e} vs scale {scale:e}"
            );
        }
    }
    Ok(out)
}

/// Recover the cutoff-K coefficients from grid samples.
///
/// Exact for trigonometric polynomials of degree `<= K` once
/// `N >= 2K+1`; smaller grids are rejected as aliased.
pub fn from_physical(grid: &GridField, cutoff: usize) -> Result<FourierField, SpectralError> {
    let n = grid.nodes_per_axis();
    if n < 2 * cutoff + 1 {
        return Err(SpectralError::Undersampled {
            n_grid: n,
            cutoff,
            needed: 2 * cutoff + 1,
        });
    }
    let dim = grid.dimension();
    let lat = Lattice::new(dim, cutoff)?;
    let mut out = FourierField::zeros(lat.clone(), grid.components());
    let total = grid.node_count();
    let scale = 1.0 / total as f64;
    let mut buf = vec![Complex64::default(); total];
    for comp in 0..grid.components() {
        for (c, v) in buf.iter_mut().zip(grid.plane(comp).iter()) {
            *c = Complex64::new(*v, 0.0);
        }
        fft_all_axes(&mut buf, dim, n, false);
        for (idx, xi) in lat.modes().enumerate() {
            *out.coeff_mut(comp, idx) = buf[wrapped_node(&xi, n)] * scale;
        }
    }
    out.symmetrize();
    *out.flags_mut() = Default::default();
    Ok(out)
}
