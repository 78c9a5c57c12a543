//! Cyclic Jacobi eigensolver for the small dense symmetric matrices produced
//! by the curvature operators (at most 35×35 in supported dimensions).

use nalgebra::DMatrix;

use crate::error::{CoskError, Result};

pub const DEFAULT_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;
const MAX_SIZE: usize = 64;

/// Eigenvalues in ascending order; column `k` of `vectors` pairs with `values[k]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values));
        &self.vectors * lambda * self.vectors.transpose()
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized first. Sweeps continue until every off-diagonal
/// magnitude is at most `tol · ‖M‖_F`. Equal eigenvalues keep the order of
/// the diagonal slots they converged in, so output is reproducible for
/// identical input bits.
pub fn sym_eigen(m: &DMatrix<f64>, tol: f64) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(CoskError::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    if n > MAX_SIZE {
        return Err(CoskError::InvalidArgument(format!(
            "matrix of size {n} exceeds the supported {MAX_SIZE}"
        )));
    }
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let threshold = tol * a.norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        let off = max_off_diagonal(&a);
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                // below-threshold entries are left alone so the sweep terminates
                if apq.abs() <= 0.01 * threshold {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(CoskError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]).then(x.cmp(&y)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

fn max_off_diagonal(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            worst = worst.max(a[(p, q)].abs());
        }
    }
    worst
}

/// `A ← PᵀAP`, `V ← VP` with `P` the plane rotation in `(p, q)`.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
