//! The curvature operators `R̂` (on two-forms) and `R̊` (on traceless
//! symmetric two-tensors), α-positivity, and four-frame machinery.

mod alpha;
mod frames;

pub use alpha::{
    alpha_sum, is_alpha_nonneg, is_alpha_positive, max_alpha, max_alpha_from_eigs,
    min_basis_sum_montecarlo, random_orthogonal, DEFAULT_VERDICT_TOL,
};
pub use frames::{
    frame_quad_sum, min_frame_quad_sum, phi_frame_basis, Frame4, FrameSearch,
    DEFAULT_FRAME_SAMPLES, DEFAULT_REFINE_STEPS,
};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{CoskError, Result};
use crate::models::space_form;
use crate::spectral::{sym_eigen, DEFAULT_TOL};
use crate::tensor::{basis_lambda2, basis_s20, AlgebraicCurvatureTensor, SymTwoTensor};

/// Matrix of `R̂` in the lexicographic basis `{eᵢ∧eⱼ}` of Λ², assembled from
/// the action `R̂(eᵢ∧eⱼ) = ½ Σ R_{ijkl} e_k∧e_l`.
pub fn r_hat_matrix(r: &AlgebraicCurvatureTensor) -> DMatrix<f64> {
    let n = r.dim();
    let basis = basis_lambda2(n).expect("tensor dimension is valid");
    let images: Vec<DMatrix<f64>> = basis
        .iter()
        .map(|b| {
            // b = eᵢ∧eⱼ has entries b_ij = 1, b_ji = -1; sum both orderings
            let mut img = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let bij = b.get(i, j);
                    if bij == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        for l in 0..n {
                            // ½ R_{ijkl} (e_k∧e_l) contributes ±½ R_{ijkl} at (k,l) and (l,k)
                            let v = 0.25 * bij * r.get(i, j, k, l);
                            img[(k, l)] += v;
                            img[(l, k)] -= v;
                        }
                    }
                }
            }
            img
        })
        .collect();
    let m = basis.len();
    DMatrix::from_fn(m, m, |c, a| 0.5 * images[a].dot(basis[c].matrix()))
}

/// `R̊(φ, ψ) = Σ R_{ijkl} φ_{il} ψ_{jk}`.
pub fn r_ring_pair(r: &AlgebraicCurvatureTensor, phi: &SymTwoTensor, psi: &SymTwoTensor) -> Result<f64> {
    let n = r.dim();
    for t in [phi, psi] {
        if t.dim() != n {
            return Err(CoskError::DimensionMismatch {
                expected: n,
                found: t.dim(),
            });
        }
    }
    let mut total = 0.0;
    for i in 0..n {
        for l in 0..n {
            let p = phi.get(i, l);
            if p == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    total += r.get(i, j, k, l) * p * psi.get(j, k);
                }
            }
        }
    }
    Ok(total)
}

/// The full operator `R̊: S²(V) → S²(V)`, `R̊(φ)_{jk} = Σ R_{ijkl} φ_{il}`.
pub fn r_ring_apply(r: &AlgebraicCurvatureTensor, phi: &SymTwoTensor) -> SymTwoTensor {
    let n = r.dim();
    let m = DMatrix::from_fn(n, n, |j, k| {
        let mut s = 0.0;
        for i in 0..n {
            for l in 0..n {
                s += r.get(i, j, k, l) * phi.get(i, l);
            }
        }
        s
    });
    SymTwoTensor::new(m).expect("square")
}

/// Gram matrix `R̊(bₐ, b_c)` of the bilinear form over an arbitrary list.
pub fn r_ring_matrix(r: &AlgebraicCurvatureTensor, basis: &[SymTwoTensor]) -> Result<DMatrix<f64>> {
    let images: Vec<SymTwoTensor> = basis.iter().map(|b| r_ring_apply(r, b)).collect();
    for b in basis {
        if b.dim() != r.dim() {
            return Err(CoskError::DimensionMismatch {
                expected: r.dim(),
                found: b.dim(),
            });
        }
    }
    let m = basis.len();
    let raw = DMatrix::from_fn(m, m, |a, c| images[a].inner(&basis[c]));
    Ok((&raw + raw.transpose()) * 0.5)
}

/// Matrix of `π∘R̊` on S²₀(V) in [`basis_s20`].
pub fn r_ring_s20_matrix(r: &AlgebraicCurvatureTensor) -> DMatrix<f64> {
    let basis = basis_s20(r.dim()).expect("tensor dimension is valid");
    let images: Vec<SymTwoTensor> = basis
        .iter()
        .map(|b| r_ring_apply(r, b).traceless_part())
        .collect();
    let m = basis.len();
    let raw = DMatrix::from_fn(m, m, |a, c| images[a].inner(&basis[c]));
    (&raw + raw.transpose()) * 0.5
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    /// `N = (n−1)(n+2)/2`.
    pub dim_s20: usize,
    /// Ascending eigenvalues of `R̊` on S²₀.
    pub eigs: Vec<f64>,
    pub scalar: f64,
    pub alpha_max: Option<f64>,
}

impl SpectrumReport {
    pub fn alpha_sum(&self, alpha: f64) -> Result<f64> {
        alpha_sum(&self.eigs, alpha)
    }

    /// Operator norm of `R̊` on S²₀, used to normalize verdicts.
    pub fn scale(&self) -> f64 {
        self.eigs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_alpha_nonneg(&self, alpha: f64, tol: f64) -> Result<bool> {
        Ok(self.alpha_sum(alpha)? >= -tol * self.scale())
    }

    pub fn is_alpha_positive(&self, alpha: f64, tol: f64) -> Result<bool> {
        Ok(self.alpha_sum(alpha)? > tol * self.scale())
    }
}

pub fn cosk_spectrum(r: &AlgebraicCurvatureTensor) -> Result<SpectrumReport> {
    let m = r_ring_s20_matrix(r);
    let eig = sym_eigen(&m, DEFAULT_TOL)?;
    let alpha_max = max_alpha_from_eigs(&eig.values);
    Ok(SpectrumReport {
        n: r.dim(),
        dim_s20: eig.values.len(),
        eigs: eig.values,
        scalar: r.scalar_curv(),
        alpha_max,
    })
}

/// Ascending eigenvalues of `R̂`.
pub fn r_hat_eigenvalues(r: &AlgebraicCurvatureTensor) -> Result<Vec<f64>> {
    Ok(sym_eigen(&r_hat_matrix(r), DEFAULT_TOL)?.values)
}

/// `R + κ·(space form)`; every eigenvalue of `R̊` on S²₀ moves by exactly κ.
pub fn shift_constant_curvature(r: &AlgebraicCurvatureTensor, kappa: f64) -> AlgebraicCurvatureTensor {
    let sf = space_form(r.dim(), kappa).expect("tensor dimension is valid");
    r + &sf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fubini_study, product_surfaces};
    use crate::tensor::{basis_s2, sym_product};
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn unit(n: usize, i: usize) -> DVector<f64> {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        e
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn r_hat_of_space_form_is_scalar() {
        let r = space_form(4, 2.5).unwrap();
        let m = r_hat_matrix(&r);
        assert!((m - DMatrix::identity(6, 6) * 2.5).amax() < 1e-15);
    }

    #[test]
    fn r_hat_of_surface_product_is_diagonal() {
        let m = r_hat_matrix(&product_surfaces(1.0, 1.0));
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        assert!((m - expected).amax() < 1e-15);
    }

    #[test]
    fn r_hat_matrix_entries_are_components() {
        let r = AlgebraicCurvatureTensor::random(5, 4).unwrap();
        let m = r_hat_matrix(&r);
        let pairs = crate::tensor::index_pairs(5);
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for (c, &(k, l)) in pairs.iter().enumerate() {
                assert!((m[(c, a)] - r.get(i, j, k, l)).abs() < 1e-14);
            }
        }
        assert!((&m - m.transpose()).amax() <= 1e-13 * r.sup_norm());
    }

    #[test]
    fn r_hat_quadratic_form_is_sectional_numerator() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = AlgebraicCurvatureTensor::random(5, 17).unwrap();
        let m = r_hat_matrix(&r);
        for _ in 0..100 {
            let x = DVector::from_fn(5, |_, _| StandardNormal.sample(&mut rng));
            let y = DVector::from_fn(5, |_, _| StandardNormal.sample(&mut rng));
            let w = crate::tensor::wedge_product(&x, &y).unwrap().coords();
            let q = (w.transpose() * &m * &w)[(0, 0)];
            let direct = r.eval(x.as_slice(), y.as_slice(), x.as_slice(), y.as_slice());
            assert!((q - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn r_ring_pair_known_values() {
        let r = AlgebraicCurvatureTensor::random(4, 5).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p12 = sym_product(&unit(4, 0), &unit(4, 1)).unwrap().scale(s);
        let p13 = sym_product(&unit(4, 0), &unit(4, 2)).unwrap().scale(s);
        assert!((r_ring_pair(&r, &p12, &p12).unwrap() - r.get(0, 1, 0, 1)).abs() < 1e-14);
        assert!((r_ring_pair(&r, &p13, &p13).unwrap() - r.get(0, 2, 0, 2)).abs() < 1e-14);
        let g = SymTwoTensor::identity(4);
        assert!((r_ring_pair(&r, &g, &g).unwrap() + r.scalar_curv()).abs() < 1e-13);
        assert!(r_ring_pair(&r, &SymTwoTensor::identity(3), &g).is_err());
    }

    #[test]
    fn r_ring_pair_is_symmetric_and_bilinear() {
        let basis = basis_s20(5).unwrap();
        let r = AlgebraicCurvatureTensor::random(5, 6).unwrap();
        for a in &basis[..6] {
            for b in &basis[8..] {
                let ab = r_ring_pair(&r, a, b).unwrap();
                let ba = r_ring_pair(&r, b, a).unwrap();
                assert!((ab - ba).abs() < 1e-14);
                let lin = r_ring_pair(&r, &(&a.scale(2.0) + b), b).unwrap();
                assert!((lin - 2.0 * ab - r_ring_pair(&r, b, b).unwrap()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn operator_and_bilinear_routes_agree() {
        for n in 2..=6 {
            let r = AlgebraicCurvatureTensor::random(n, n as u64).unwrap();
            let basis = basis_s20(n).unwrap();
            let via_pairs = DMatrix::from_fn(basis.len(), basis.len(), |a, c| {
                r_ring_pair(&r, &basis[a], &basis[c]).unwrap()
            });
            let via_operator = r_ring_s20_matrix(&r);
            assert!((via_pairs - &via_operator).amax() <= 1e-13 * r.sup_norm());
            assert!((r_ring_matrix(&r, &basis).unwrap() - via_operator).amax() <= 1e-13 * r.sup_norm());
        }
    }

    #[test]
    fn space_form_spectrum_is_kappa() {
        let rep = cosk_spectrum(&space_form(4, 1.0).unwrap()).unwrap();
        assert!(close(&rep.eigs, &[1.0; 9], 1e-12));
        assert_eq!(rep.alpha_max, Some(9.0));
        let rep = cosk_spectrum(&space_form(5, -0.5).unwrap()).unwrap();
        assert!(close(&rep.eigs, &[-0.5; 14], 1e-12));
    }

    #[test]
    fn surface_product_spectrum() {
        let rep = cosk_spectrum(&product_surfaces(1.0, 1.0)).unwrap();
        assert!(close(&rep.eigs, &[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0], 1e-12));
        assert!((rep.alpha_max.unwrap() - 6.0).abs() < 1e-12);
        assert!(rep.is_alpha_nonneg(6.0, 1e-12).unwrap());
        assert!(!rep.is_alpha_positive(6.0, 1e-12).unwrap());
        assert!(rep.is_alpha_positive(6.5, 1e-12).unwrap());
    }

    #[test]
    fn fubini_study_spectrum() {
        let (r, _) = fubini_study(2, 4.0).unwrap();
        let rep = cosk_spectrum(&r).unwrap();
        assert!(close(&rep.eigs, &[-2.0, -2.0, -2.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0], 1e-10));
        assert!((rep.alpha_max.unwrap() - 4.5).abs() < 1e-12);
        assert!((rep.scalar - 24.0).abs() < 1e-10);
    }

    #[test]
    fn trace_identities() {
        for n in 3..=6 {
            for seed in 0..10 {
                let r = AlgebraicCurvatureTensor::random(n, seed).unwrap();
                let s = r.scalar_curv();
                let scale = r.frobenius_norm();
                let full = r_ring_matrix(&r, &basis_s2(n).unwrap()).unwrap();
                assert!((full.trace() - s / 2.0).abs() <= 1e-11 * scale);
                let g = SymTwoTensor::identity(n);
                assert!((r_ring_pair(&r, &g, &g).unwrap() + s).abs() <= 1e-11 * scale);
                let rep = cosk_spectrum(&r).unwrap();
                let sum: f64 = rep.eigs.iter().sum();
                assert!((sum - (s / 2.0 + s / n as f64)).abs() <= 1e-11 * scale);
            }
        }
    }

    #[test]
    fn spectrum_is_basis_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for n in [3, 4, 5] {
            let r = AlgebraicCurvatureTensor::random(n, 40 + n as u64).unwrap();
            let basis = basis_s20(n).unwrap();
            let q = random_orthogonal(basis.len(), &mut rng);
            let rotated: Vec<SymTwoTensor> = (0..basis.len())
                .map(|a| {
                    basis
                        .iter()
                        .enumerate()
                        .fold(SymTwoTensor::zeros(n), |acc, (b, t)| &acc + &t.scale(q[(b, a)]))
                })
                .collect();
            let m = r_ring_matrix(&r, &rotated).unwrap();
            let e1 = sym_eigen(&m, DEFAULT_TOL).unwrap().values;
            let e0 = cosk_spectrum(&r).unwrap().eigs;
            assert!(close(&e0, &e1, 1e-11 * r.frobenius_norm()));
        }
    }

    #[test]
    fn shift_moves_every_eigenvalue() {
        for seed in 0..100 {
            let r = AlgebraicCurvatureTensor::random(4, seed).unwrap();
            let base = cosk_spectrum(&r).unwrap().eigs;
            let kappa = 0.37 * (seed as f64 - 50.0);
            let shifted = cosk_spectrum(&shift_constant_curvature(&r, kappa)).unwrap().eigs;
            let expected: Vec<f64> = base.iter().map(|e| e + kappa).collect();
            assert!(close(&shifted, &expected, 1e-11 * (r.sup_norm() + kappa.abs())));
        }
        let flat = space_form(4, 0.0).unwrap();
        assert_eq!(shift_constant_curvature(&flat, 1.0), space_form(4, 1.0).unwrap());
        let r = AlgebraicCurvatureTensor::random(5, 3).unwrap();
        let e0 = cosk_spectrum(&r).unwrap().eigs[0];
        let s = cosk_spectrum(&shift_constant_curvature(&r, -e0)).unwrap();
        assert!(s.eigs[0].abs() < 1e-12);
    }
}
