//! Model curvature tensors and the complex structures of the Kähler ones.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoskError, Result};
use crate::tensor::{check_dim, AlgebraicCurvatureTensor, TwoForm, MAX_DIM};

const J_TOL: f64 = 1e-12;

/// Orthogonal `J` with `J² = −I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure {
    j: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn new(j: DMatrix<f64>) -> Result<Self> {
        let n = j.nrows();
        if n != j.ncols() {
            return Err(CoskError::NotSquare { rows: n, cols: j.ncols() });
        }
        if !n.is_multiple_of(2) {
            return Err(CoskError::InvalidComplexStructure { reason: "odd dimension", defect: 1.0 });
        }
        let id = DMatrix::<f64>::identity(n, n);
        let sq = (&j * &j + &id).amax();
        if sq > J_TOL {
            return Err(CoskError::InvalidComplexStructure { reason: "J^2 != -I", defect: sq });
        }
        let orth = (j.transpose() * &j - &id).amax();
        if orth > J_TOL {
            return Err(CoskError::InvalidComplexStructure { reason: "J not orthogonal", defect: orth });
        }
        Ok(Self { j })
    }

    /// `J e_{2k−1} = e_{2k}` (1-based).
    pub fn standard(n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) || n < 2 {
            return Err(CoskError::InvalidComplexStructure { reason: "odd dimension", defect: 1.0 });
        }
        let mut j = DMatrix::zeros(n, n);
        for k in (0..n).step_by(2) {
            j[(k + 1, k)] = 1.0;
            j[(k, k + 1)] = -1.0;
        }
        Ok(Self { j })
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.j * x
    }

    /// `ω(X,Y) = ⟨JX,Y⟩`, i.e. `ω_ij = J_ji`.
    pub fn kahler_form(&self) -> TwoForm {
        TwoForm::new(self.j.transpose()).expect("J is square")
    }
}

/// Constant curvature `κ`.
pub fn space_form(n: usize, kappa: f64) -> Result<AlgebraicCurvatureTensor> {
    check_dim(n)?;
    Ok(AlgebraicCurvatureTensor::from_fn_unchecked(n, |i, j, k, l| {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k))
    }))
}

pub fn flat(n: usize) -> Result<AlgebraicCurvatureTensor> {
    space_form(n, 0.0)
}

/// Riemannian product of two surfaces: `R₁₂₁₂ = κ₁`, `R₃₄₃₄ = κ₂`.
pub fn product_surfaces(k1: f64, k2: f64) -> AlgebraicCurvatureTensor {
    AlgebraicCurvatureTensor::from_fn_unchecked(4, |i, j, k, l| match (i, j, k, l) {
        (0, 1, 0, 1) => k1,
        (2, 3, 2, 3) => k2,
        _ => 0.0,
    })
}

/// Unit round `S² × S²` with the product complex structure.
pub fn s2xs2() -> (AlgebraicCurvatureTensor, ComplexStructure) {
    (product_surfaces(1.0, 1.0), ComplexStructure::standard(4).expect("n = 4"))
}

/// Constant holomorphic sectional curvature `c` on `C^m`:
///
/// ```text
/// R(X,Y,Z,W) = (c/4)[⟨X,Z⟩⟨Y,W⟩ − ⟨X,W⟩⟨Y,Z⟩ + ⟨JX,Z⟩⟨JY,W⟩ − ⟨JX,W⟩⟨JY,Z⟩ + 2⟨JX,Y⟩⟨JZ,W⟩]
/// ```
pub fn fubini_study(m: usize, c: f64) -> Result<(AlgebraicCurvatureTensor, ComplexStructure)> {
    if m < 1 || 2 * m > MAX_DIM {
        return Err(CoskError::UnsupportedDimension { n: 2 * m, min: 2, max: MAX_DIM });
    }
    let n = 2 * m;
    let cs = ComplexStructure::standard(n)?;
    let j = cs.matrix();
    let q = c / 4.0;
    let r = AlgebraicCurvatureTensor::from_fn_unchecked(n, |a, b, k, l| {
        let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
        // ⟨J e_a, e_k⟩ = J_ka
        q * (d(a, k) * d(b, l) - d(a, l) * d(b, k) + j[(k, a)] * j[(l, b)] - j[(l, a)] * j[(k, b)]
            + 2.0 * j[(b, a)] * j[(l, k)])
    });
    Ok((r, cs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
        let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut *rng));
        v.normalize()
    }

    #[test]
    fn complex_structure_validation() {
        let cs = ComplexStructure::standard(4).unwrap();
        assert_eq!(cs.matrix()[(1, 0)], 1.0);
        assert!(ComplexStructure::new(cs.matrix().clone()).is_ok());
        assert!(ComplexStructure::standard(3).is_err());
        assert!(ComplexStructure::new(DMatrix::identity(4, 4)).is_err());
        let scaled = cs.matrix() * 2.0;
        assert!(ComplexStructure::new(scaled).is_err());
        let w = cs.kahler_form();
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(2, 3), 1.0);
        assert_eq!(w.get(0, 2), 0.0);
    }

    #[test]
    fn space_form_values() {
        let r = space_form(4, 1.0).unwrap();
        assert_eq!(r.get(0, 1, 0, 1), 1.0);
        assert_eq!(r.get(0, 1, 1, 0), -1.0);
        assert_eq!(r.scalar_curv(), 12.0);
        assert_eq!(flat(5).unwrap().sup_norm(), 0.0);
        assert!(space_form(1, 1.0).is_err());
    }

    #[test]
    fn constructors_satisfy_bianchi() {
        let (fs2, _) = fubini_study(2, 4.0).unwrap();
        let (fs3, _) = fubini_study(3, -1.5).unwrap();
        for r in [space_form(6, 0.3).unwrap(), product_surfaces(1.0, -2.0), fs2, fs3] {
            assert!(r.bianchi_defect() <= 1e-13 * r.sup_norm());
        }
    }

    #[test]
    fn product_is_direct_sum() {
        for k in [-1.0, 0.0, 0.5, 2.0] {
            let s = space_form(2, k).unwrap();
            assert_eq!(s.direct_sum(&s).unwrap(), product_surfaces(k, k));
        }
    }

    #[test]
    fn fubini_study_scalar_and_einstein() {
        let (r, _) = fubini_study(2, 4.0).unwrap();
        assert!((r.scalar_curv() - 24.0).abs() < 1e-12);
        assert!(r.traceless_ricci().norm() < 1e-13);
        let (r1, _) = fubini_study(1, 4.0).unwrap();
        assert!((r1.get(0, 1, 0, 1) - 4.0).abs() < 1e-15);
        assert!(fubini_study(0, 1.0).is_err());
    }

    #[test]
    fn fubini_study_is_linear_in_c() {
        let (one, _) = fubini_study(3, 1.0).unwrap();
        let (c, _) = fubini_study(3, 2.5).unwrap();
        assert!(c.max_abs_diff(&one.scale(2.5)) < 1e-15);
    }

    #[test]
    fn holomorphic_sectional_is_constant() {
        let (r, cs) = fubini_study(2, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let x = random_unit(4, &mut rng);
            let jx = cs.apply(&x);
            assert!((r.sectional(&x, &jx).unwrap() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sectional_curvatures_of_cp2_lie_in_one_to_four() {
        let (r, _) = fubini_study(2, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = random_unit(4, &mut rng);
            let y = random_unit(4, &mut rng);
            let k = r.sectional(&x, &y).unwrap();
            assert!((1.0 - 1e-12..=4.0 + 1e-12).contains(&k));
        }
    }
}
