//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! The ellipticity certificate diagonalizes the viscosity quadratic form on
//! the symmetric-traceless subspace, whose dimension is 2 for n = 2 and 5
//! for n = 3; robustness matters more than speed at these sizes.

use crate::tol;

/// Eigenvalues (ascending) and column eigenvectors of a symmetric matrix.
pub fn symmetric_eigen(matrix: &[f64], dim: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(matrix.len(), dim * dim);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    let scale = a
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p * dim + q] * a[p * dim + q];
            }
        }
        if off.sqrt() <= tol::JACOBI_OFFDIAG * scale {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| a[i * dim + i].partial_cmp(&a[j * dim + j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i * dim + i]).collect();
    let mut vectors = vec![0.0; dim * dim];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..dim {
            vectors[row * dim + col] = v[row * dim + src];
        }
    }
    (values, vectors)
}

/// Smallest eigenvalue and its eigenvector.
pub fn min_eigenpair(matrix: &[f64], dim: usize) -> (f64, Vec<f64>) {
    let (values, vectors) = symmetric_eigen(matrix, dim);
    let vec = (0..dim).map(|row| vectors[row * dim]).collect();
    (values[0], vec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizes_known_matrix() {
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let (vals, vecs) = symmetric_eigen(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
        // Eigenvector of 1 is (1,-1)/sqrt(2) up to sign.
        let r = vecs[0] / vecs[2];
        assert!((r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_is_small_on_random_symmetric() {
        let mut rng = crate::rng::CounterRng::new(7);
        for dim in [2usize, 5, 9] {
            let mut m = vec![0.0; dim * dim];
            for i in 0..dim {
                for j in 0..=i {
                    let x = rng.next_symmetric();
                    m[i * dim + j] = x;
                    m[j * dim + i] = x;
                }
            }
            let (vals, vecs) = symmetric_eigen(&m, dim);
            for col in 0..dim {
                for row in 0..dim {
                    let mut mv = 0.0;
                    for k in 0..dim {
                        mv += m[row * dim + k] * vecs[k * dim + col];
                    }
                    let diff = mv - vals[col] * vecs[row * dim + col];
                    assert!(diff.abs() < 1e-11, "residual {diff:e}");
                }
            }
            for w in vals.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }
}
