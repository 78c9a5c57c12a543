use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{cosk_spectrum, r_ring_s20_matrix};
use crate::error::{CoskError, Result};
use crate::spectral::{sym_eigen, DEFAULT_TOL};
use crate::tensor::AlgebraicCurvatureTensor;

/// Absolute verdict tolerance after normalizing `R̊` to unit operator norm.
pub const DEFAULT_VERDICT_TOL: f64 = 1e-9;

/// `Σ_{i<⌊α⌋} eigs[i] + (α − ⌊α⌋)·eigs[⌊α⌋]` for ascending `eigs`.
///
/// The fractional term is dropped at integer α, which keeps the sum
/// continuous and avoids reading past the end at α = N.
pub fn alpha_sum(eigs: &[f64], alpha: f64) -> Result<f64> {
    let n = eigs.len();
    if !(alpha >= 1.0 && alpha <= n as f64) {
        return Err(CoskError::AlphaOutOfRange { alpha, max: n });
    }
    let whole = alpha.floor();
    let k = whole as usize;
    let frac = alpha - whole;
    let mut s: f64 = eigs[..k].iter().sum();
    if frac > 0.0 {
        s += frac * eigs[k];
    }
    Ok(s)
}

/// Critical α for ascending `eigs`.
///
/// `alpha_sum` is convex and piecewise linear in α, so when `eigs[0] < 0 <=
/// Σ eigs` it crosses zero exactly once; the crossing is returned and the
/// tensor is α-nonnegative precisely for α at or above it. Returns `N` when
/// `eigs[0] >= 0` and `None` when the full sum is negative.
pub fn max_alpha_from_eigs(eigs: &[f64]) -> Option<f64> {
    let n = eigs.len();
    if n == 0 {
        return None;
    }
    if eigs[0] >= 0.0 {
        return Some(n as f64);
    }
    let mut partial = 0.0;
    for (k, &e) in eigs.iter().enumerate() {
        // on [k, k+1] the sum is partial + (α − k)·e
        let next = partial + e;
        if next >= 0.0 {
            let root = k as f64 + (-partial) / e;
            return Some(root.max(1.0));
        }
        partial = next;
    }
    None
}

pub fn is_alpha_nonneg(r: &AlgebraicCurvatureTensor, alpha: f64, tol: f64) -> Result<bool> {
    cosk_spectrum(r)?.is_alpha_nonneg(alpha, tol)
}

pub fn is_alpha_positive(r: &AlgebraicCurvatureTensor, alpha: f64, tol: f64) -> Result<bool> {
    cosk_spectrum(r)?.is_alpha_positive(alpha, tol)
}

pub fn max_alpha(r: &AlgebraicCurvatureTensor) -> Result<Option<f64>> {
    Ok(cosk_spectrum(r)?.alpha_max)
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// signs of `diag(R)` folded into `Q`).
pub fn random_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut *rng));
    let qr = g.qr();
    let mut q = qr.q();
    let rmat = qr.r();
    for c in 0..dim {
        if rmat[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

fn weighted_diagonal(m: &DMatrix<f64>, q: &DMatrix<f64>, alpha: f64) -> f64 {
    let whole = alpha.floor() as usize;
    let frac = alpha - alpha.floor();
    let diag = |a: usize| {
        let col = q.column(a);
        (col.transpose() * m * col)[(0, 0)]
    };
    let mut s: f64 = (0..whole).map(diag).sum();
    if frac > 0.0 {
        s += frac * diag(whole);
    }
    s
}

/// Minimum of `Σ_{i≤⌊α⌋} R̊(φᵢ,φᵢ) + (α−⌊α⌋) R̊(φ_{⌊α⌋+1},φ_{⌊α⌋+1})` over
/// `trials` orthonormal bases of S²₀. Trial 0 is the eigenbasis; trial `t > 0`
/// is a Haar-random rotation of the reference basis drawn from seed
/// `seed + t`, so the result does not depend on thread scheduling.
pub fn min_basis_sum_montecarlo(
    r: &AlgebraicCurvatureTensor,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(CoskError::InvalidArgument("trials must be >= 1".into()));
    }
    let m = r_ring_s20_matrix(r);
    let dim = m.nrows();
    if !(alpha >= 1.0 && alpha <= dim as f64) {
        return Err(CoskError::AlphaOutOfRange { alpha, max: dim });
    }
    let eig = sym_eigen(&m, DEFAULT_TOL)?;
    let first = weighted_diagonal(&m, &eig.vectors, alpha);
    let rest = (1..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let q = random_orthogonal(dim, &mut rng);
            weighted_diagonal(&m, &q, alpha)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(first.min(rest))
}
