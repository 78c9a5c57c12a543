use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{CoskError, Result};
use crate::tensor::{sym_product, AlgebraicCurvatureTensor, SymTwoTensor};

pub const DEFAULT_FRAME_SAMPLES: usize = 256;
pub const DEFAULT_REFINE_STEPS: usize = 200;

const ORTHONORMAL_TOL: f64 = 1e-10;
const INITIAL_STEP: f64 = 1e-2;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 0.5;

/// The mixed planes `(1,3), (1,4), (2,3), (2,4)` of a four-frame.
const MIXED: [(usize, usize); 4] = [(0, 2), (0, 3), (1, 2), (1, 3)];

/// Four orthonormal vectors in `Rⁿ`, `n >= 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame4 {
    e: [DVector<f64>; 4],
}

impl Frame4 {
    pub fn new(e: [DVector<f64>; 4]) -> Result<Self> {
        let n = e[0].len();
        if n < 4 {
            return Err(CoskError::UnsupportedDimension { n, min: 4, max: crate::tensor::MAX_DIM });
        }
        if let Some(v) = e.iter().find(|v| v.len() != n) {
            return Err(CoskError::DimensionMismatch { expected: n, found: v.len() });
        }
        let defect = orthonormality_defect(&e);
        if defect > ORTHONORMAL_TOL {
            return Err(CoskError::NonOrthonormalFrame { defect });
        }
        Ok(Self { e })
    }

    /// `(e₁, e₂, e₃, e₄)` of the standard basis.
    pub fn standard(n: usize) -> Result<Self> {
        let unit = |i: usize| {
            let mut v = DVector::zeros(n);
            if i < n {
                v[i] = 1.0;
            }
            v
        };
        Self::new([unit(0), unit(1), unit(2), unit(3)])
    }

    /// Orthonormalized Gaussian quadruple.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut m = DMatrix::from_fn(n, 4, |_, _| StandardNormal.sample(&mut *rng));
        orthonormalize_columns(&mut m);
        Self::from_columns(&m)
    }

    fn from_columns(m: &DMatrix<f64>) -> Self {
        Self {
            e: [0, 1, 2, 3].map(|c| m.column(c).into_owned()),
        }
    }

    fn to_columns(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.e)
    }

    pub fn vectors(&self) -> &[DVector<f64>; 4] {
        &self.e
    }

    pub fn dim(&self) -> usize {
        self.e[0].len()
    }
}

fn orthonormality_defect(e: &[DVector<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..e.len() {
        for b in a..e.len() {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((e[a].dot(&e[b]) - target).abs());
        }
    }
    worst
}

/// Modified Gram–Schmidt, applied twice.
fn orthonormalize_columns(m: &mut DMatrix<f64>) {
    for _ in 0..2 {
        for c in 0..m.ncols() {
            for p in 0..c {
                let proj = m.column(p).dot(&m.column(c));
                let prev = m.column(p).into_owned();
                m.column_mut(c).axpy(-proj, &prev, 1.0);
            }
            let norm = m.column(c).norm();
            m.column_mut(c).scale_mut(1.0 / norm);
        }
    }
}

/// The nine traceless symmetric tensors built from a four-frame:
///
/// ```text
/// φ₁ = ¼(e₁⊙e₁ + e₂⊙e₂ − e₃⊙e₃ − e₄⊙e₄)
/// φ₂..φ₅ = (1/√2) e₁⊙e₃, e₁⊙e₄, e₂⊙e₃, e₂⊙e₄
/// φ₆, φ₇ = (1/√2) e₁⊙e₂, e₃⊙e₄
/// φ₈ = (1/(2√2))(e₁⊙e₁ − e₂⊙e₂),  φ₉ = (1/(2√2))(e₃⊙e₃ − e₄⊙e₄)
/// ```
pub fn phi_frame_basis(frame: &Frame4) -> [SymTwoTensor; 9] {
    let e = &frame.e;
    let sp = |a: usize, b: usize| sym_product(&e[a], &e[b]).expect("frame vectors share a dimension");
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let r8 = 0.5 * r2;
    let phi1 = (&(&sp(0, 0) + &sp(1, 1)) - &(&sp(2, 2) + &sp(3, 3))).scale(0.25);
    [
        phi1,
        sp(0, 2).scale(r2),
        sp(0, 3).scale(r2),
        sp(1, 2).scale(r2),
        sp(1, 3).scale(r2),
        sp(0, 1).scale(r2),
        sp(2, 3).scale(r2),
        (&sp(0, 0) - &sp(1, 1)).scale(r8),
        (&sp(2, 2) - &sp(3, 3)).scale(r8),
    ]
}

fn check_frame(r: &AlgebraicCurvatureTensor, frame: &Frame4) -> Result<()> {
    if r.dim() < 4 {
        return Err(CoskError::UnsupportedDimension { n: r.dim(), min: 4, max: crate::tensor::MAX_DIM });
    }
    if frame.dim() != r.dim() {
        return Err(CoskError::DimensionMismatch { expected: r.dim(), found: frame.dim() });
    }
    Ok(())
}

fn quad_sum_unchecked(r: &AlgebraicCurvatureTensor, e: &[DVector<f64>; 4]) -> f64 {
    MIXED
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (e[a].as_slice(), e[b].as_slice());
            r.eval(x, y, x, y)
        })
        .sum()
}

/// `R₁₃₁₃ + R₁₄₁₄ + R₂₃₂₃ + R₂₄₂₄` evaluated on the frame.
pub fn frame_quad_sum(r: &AlgebraicCurvatureTensor, frame: &Frame4) -> Result<f64> {
    check_frame(r, frame)?;
    Ok(quad_sum_unchecked(r, &frame.e))
}

/// Euclidean gradient of the mixed-plane sum: `∂/∂e_a R(e_a,e_b,e_a,e_b) =
/// 2 R(·,e_b,e_a,e_b)` by pair symmetry, and symmetrically for `e_b`.
fn quad_sum_gradient(r: &AlgebraicCurvatureTensor, e: &[DVector<f64>; 4]) -> DMatrix<f64> {
    let n = r.dim();
    let mut g = DMatrix::zeros(n, 4);
    for &(a, b) in &MIXED {
        let (x, y) = (e[a].as_slice(), e[b].as_slice());
        let ga = r.eval_first_slot(y, x, y) * 2.0;
        let gb = r.eval_first_slot(x, y, x) * 2.0;
        let mut ca = g.column_mut(a);
        ca += &ga;
        let mut cb = g.column_mut(b);
        cb += &gb;
    }
    g
}

#[derive(Clone, Debug)]
pub struct FrameSearch {
    pub value: f64,
    pub frame: Frame4,
    pub samples: usize,
    pub accepted_steps: usize,
}

/// Upper bound for the minimum of [`frame_quad_sum`] over all orthonormal
/// four-frames.
///
/// Draws `samples` random frames (sample `s` from seed `seed + s`), keeps the
/// best, then takes up to `refine_steps` projected-gradient steps on the
/// frame manifold with re-orthonormalization as the retraction. The step
/// starts at `1e-2` (in units of `‖R‖∞`), halves whenever a step fails to
/// decrease the objective and doubles after each accepted step.
pub fn min_frame_quad_sum(
    r: &AlgebraicCurvatureTensor,
    samples: usize,
    refine_steps: usize,
    seed: u64,
) -> Result<FrameSearch> {
    let n = r.dim();
    if n < 4 {
        return Err(CoskError::UnsupportedDimension { n, min: 4, max: crate::tensor::MAX_DIM });
    }
    if samples == 0 {
        return Err(CoskError::InvalidArgument("samples must be >= 1".into()));
    }
    let (best_idx, best_val) = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
            let f = Frame4::random(n, &mut rng);
            (s, quad_sum_unchecked(r, &f.e))
        })
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(best_idx as u64));
    let mut frame = Frame4::random(n, &mut rng);
    let mut value = best_val;

    let scale = r.sup_norm();
    let mut accepted = 0;
    if scale > 0.0 {
        let mut step = INITIAL_STEP;
        for _ in 0..refine_steps {
            let e = frame.to_columns();
            let g = quad_sum_gradient(r, &frame.e);
            let sym = {
                let s = e.transpose() * &g;
                (&s + s.transpose()) * 0.5
            };
            let riem = (&g - &e * sym) / scale;
            if riem.norm() == 0.0 {
                break;
            }
            let mut trial = &e - riem * step;
            orthonormalize_columns(&mut trial);
            let candidate = Frame4::from_columns(&trial);
            let cand_val = quad_sum_unchecked(r, &candidate.e);
            if cand_val < value {
                frame = candidate;
                value = cand_val;
                accepted += 1;
                step = (step * 2.0).min(MAX_STEP);
            } else {
                step *= 0.5;
                if step < MIN_STEP {
                    break;
                }
            }
        }
    }
    Ok(FrameSearch {
        value,
        frame,
        samples,
        accepted_steps: accepted,
    })
}
