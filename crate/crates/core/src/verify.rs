//! The reproduction suite behind `cosk verify-paper`: model spectra, the
//! frame formulas, the fuzzed implications and the four-dimensional normal
//! form, each reported with its measured value and tolerance.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::four_dim::{
    cgt_blocks, einstein_defect, kahler_orientation, lambda_pm_bases, r_hat_blocks, rigidity_certificate, w_pm_eigen,
    Orientation, Verdict, DEFAULT_CERTIFICATE_TOL,
};
use crate::kahler::{
    bisectional, four_sectional_identity_defect, j_invariance_defect, min_orth_bisectional, project_kahler,
    random_kahler_act, KahlerStructure, DEFAULT_PROJECTION_ITERS, DEFAULT_PROJECTION_TOL,
};
use crate::models::{flat, fubini_study, product_surfaces, s2xs2, space_form, ComplexStructure};
use crate::operators::{
    cosk_spectrum, frame_quad_sum, min_basis_sum_montecarlo, min_frame_quad_sum, phi_frame_basis, r_hat_matrix,
    r_ring_matrix, r_ring_pair, shift_constant_curvature, Frame4, DEFAULT_VERDICT_TOL,
};
use crate::tensor::{basis_s2, AlgebraicCurvatureTensor, SymTwoTensor};

pub const DEFAULT_TRIALS: usize = 100;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Fuzz budget; every randomized check scales with it.
    pub trials: usize,
    /// The `S² × S²` tensor used by the product-of-surfaces checks.
    pub s2xs2: AlgebraicCurvatureTensor,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            trials: DEFAULT_TRIALS,
            s2xs2: s2xs2().0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when `measured <= tolerance`.
    AtMost,
    /// Passes when `measured >= tolerance`.
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    /// What is being reproduced, in words.
    pub anchor: &'static str,
    pub measured: f64,
    pub comparison: Comparison,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Suite {
    results: Vec<CheckResult>,
}

impl Suite {
    fn check(
        &mut self,
        id: &'static str,
        anchor: &'static str,
        comparison: Comparison,
        tolerance: f64,
        f: impl FnOnce() -> Result<(f64, usize)>,
    ) {
        let result = match f() {
            Ok((measured, samples)) => {
                let passed = match comparison {
                    Comparison::AtMost => measured <= tolerance,
                    Comparison::AtLeast => measured >= tolerance,
                };
                CheckResult { id, anchor, measured, comparison, tolerance, samples, passed, error: None }
            }
            Err(e) => CheckResult {
                id,
                anchor,
                measured: f64::NAN,
                comparison,
                tolerance,
                samples: 0,
                passed: false,
                error: Some(e.to_string()),
            },
        };
        self.results.push(result);
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Largest value of `f` over samples `0..count`; errors propagate.
fn par_max(count: usize, f: impl Fn(u64) -> Result<f64> + Sync) -> Result<f64> {
    let vals: Vec<f64> = (0..count as u64).into_par_iter().map(&f).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

fn par_min(count: usize, f: impl Fn(u64) -> Result<f64> + Sync) -> Result<f64> {
    Ok(-par_max(count, |i| f(i).map(|v| -v))?)
}

/// Smallest space-form shift giving `alpha_sum(·, 6) = target`; the shift
/// moves every eigenvalue by exactly the same amount.
fn shift_to_six_sum(r: &AlgebraicCurvatureTensor, target: f64) -> Result<AlgebraicCurvatureTensor> {
    let base = cosk_spectrum(r)?.alpha_sum(6.0)?;
    Ok(shift_constant_curvature(r, (target - base) / 6.0))
}

pub fn run(cfg: &VerifyConfig) -> Vec<CheckResult> {
    use Comparison::*;
    let mut s = Suite { results: Vec::new() };
    let seed = cfg.seed;
    let t = cfg.trials.max(1);

    // model spectra
    s.check("sphere_spectrum", "constant curvature: every R̊ eigenvalue equals κ", AtMost, 1e-12, || {
        let spec = cosk_spectrum(&space_form(4, 1.0)?)?;
        Ok((max_dev(&spec.eigs, &[1.0; 9]), 1))
    });
    s.check("sphere_max_alpha", "constant positive curvature is N-positive", AtMost, 0.0, || {
        let spec = cosk_spectrum(&space_form(4, 1.0)?)?;
        Ok(((spec.alpha_max.unwrap_or(f64::NAN) - 9.0).abs(), 1))
    });
    let fixture = cfg.s2xs2.clone();
    s.check("s2xs2_spectrum", "S²×S²: R̊ spectrum {−1, 0⁴, 1⁴}", AtMost, 1e-12, || {
        let spec = cosk_spectrum(&fixture)?;
        Ok((max_dev(&spec.eigs, &[-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]), 1))
    });
    s.check("s2xs2_six_nonneg", "product of surfaces with equal nonnegative curvature is six-nonnegative", AtLeast, -1e-12, || {
        Ok((cosk_spectrum(&fixture)?.alpha_sum(6.0)?, 1))
    });
    s.check("s2xs2_boundary", "S²×S² is (6+ε)-positive with α-sum exactly ε", AtMost, 1e-12, || {
        let spec = cosk_spectrum(&fixture)?;
        let mut worst: f64 = 0.0;
        for eps in [0.1, 0.5, 1.0] {
            worst = worst.max((spec.alpha_sum(6.0 + eps)? - eps).abs());
        }
        Ok((worst, 3))
    });
    s.check("s2xs2_phi_diagonal", "product of surfaces: R̊(φ₁,φ₁) = −½(R₁₂₁₂+R₃₄₃₄), mixed φ vanish", AtMost, 1e-12, || {
        let frame = Frame4::standard(4)?;
        let phi = phi_frame_basis(&frame);
        let (a, b) = (fixture.get(0, 1, 0, 1), fixture.get(2, 3, 2, 3));
        let want = [-0.5 * (a + b), 0.0, 0.0, 0.0, 0.0, a, b, a, b];
        let got: Vec<f64> = phi.iter().map(|p| r_ring_pair(&fixture, p, p)).collect::<Result<_>>()?;
        Ok((max_dev(&got, &want), 9))
    });
    s.check("product_grid", "six-nonnegative product of surfaces forces equal nonnegative curvatures", AtMost, 0.0, || {
        let ks = [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
        let mut mismatches = 0;
        for &k1 in &ks {
            for &k2 in &ks {
                let verdict = cosk_spectrum(&product_surfaces(k1, k2))?.is_alpha_nonneg(6.0, DEFAULT_VERDICT_TOL)?;
                if verdict != (k1 == k2 && k1 >= 0.0) {
                    mismatches += 1;
                }
            }
        }
        Ok((mismatches as f64, 36))
    });
    let (cp2, cp2_j) = fubini_study(2, 4.0).expect("m = 2");
    s.check("cp2_scalar", "Fubini–Study, holomorphic curvature 4: S = 24", AtMost, 1e-10, || {
        Ok(((cp2.scalar_curv() - 24.0).abs(), 1))
    });
    s.check("cp2_spectrum", "Fubini–Study: R̊ spectrum {−2³, 4⁶}", AtMost, 1e-10, || {
        let spec = cosk_spectrum(&cp2)?;
        Ok((max_dev(&spec.eigs, &[-2.0, -2.0, -2.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0]), 1))
    });
    s.check("cp2_max_alpha", "Fubini–Study is exactly 4½-nonnegative", AtMost, 1e-12, || {
        Ok(((cosk_spectrum(&cp2)?.alpha_max.unwrap_or(f64::NAN) - 4.5).abs(), 1))
    });
    s.check("cp2_frame_minimum", "Fubini–Study: minimal mixed four-frame sectional sum is 4", AtMost, 1e-6, || {
        let found = min_frame_quad_sum(&cp2, 256, 200, seed)?;
        Ok(((found.value - 4.0).abs(), 256))
    });

    // frame formulas
    s.check("phi_formulas", "R̊(φᵢ,φᵢ) equal the displayed sectional combinations", AtMost, 1e-12, || {
        let v = par_max(t, |i| {
            let r = AlgebraicCurvatureTensor::random(4, seed.wrapping_add(i))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i) ^ 0x9e37);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let frame = Frame4::random(4, &mut rng);
                let e = frame.vectors();
                let k = |a: usize, b: usize| r.eval(e[a].as_slice(), e[b].as_slice(), e[a].as_slice(), e[b].as_slice());
                let want = [
                    0.5 * (-k(0, 1) - k(2, 3) + k(0, 2) + k(1, 3) + k(0, 3) + k(1, 2)),
                    k(0, 2),
                    k(0, 3),
                    k(1, 2),
                    k(1, 3),
                    k(0, 1),
                    k(2, 3),
                    k(0, 1),
                    k(2, 3),
                ];
                let phi = phi_frame_basis(&frame);
                for (p, w) in phi.iter().zip(want) {
                    worst = worst.max((r_ring_pair(&r, p, p)? - w).abs());
                }
            }
            Ok(worst / r.frobenius_norm())
        })?;
        Ok((v, 20 * t))
    });
    s.check("frame_key_identity", "Σ₁⁵R̊(φᵢ,φᵢ) + ¼Σ₆⁹R̊(φᵢ,φᵢ) = (3/2)·mixed sectional sum", AtMost, 1e-12, || {
        let v = par_max(t, |i| {
            let r = AlgebraicCurvatureTensor::random(4, seed.wrapping_add(i))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i) ^ 0x51ed);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let frame = Frame4::random(4, &mut rng);
                let phi = phi_frame_basis(&frame);
                let mut key = 0.0;
                for (idx, p) in phi.iter().enumerate() {
                    let w = if idx < 5 { 1.0 } else { 0.25 };
                    key += w * r_ring_pair(&r, p, p)?;
                }
                worst = worst.max((key - 1.5 * frame_quad_sum(&r, &frame)?).abs());
            }
            Ok(worst / r.frobenius_norm())
        })?;
        Ok((v, 20 * t))
    });
    s.check("six_nonneg_frames", "six-nonnegative R̊ has nonnegative mixed four-frame sums", AtLeast, -1e-8, || {
        let v = par_min(t, |i| {
            let n = 4 + (i % 2) as usize;
            let r = shift_to_six_sum(&AlgebraicCurvatureTensor::random(n, seed.wrapping_add(i))?, 0.0)?;
            let found = min_frame_quad_sum(&r, 64, 100, seed.wrapping_add(i))?;
            Ok(found.value / r.sup_norm())
        })?;
        Ok((v, t))
    });
    s.check("six_positive_frames", "six-positive R̊: mixed sums stay above (2/3) of the six-sum", AtLeast, -1e-8, || {
        let v = par_min(t, |i| {
            let n = 4 + (i % 2) as usize;
            let raw = AlgebraicCurvatureTensor::random(n, seed.wrapping_add(i))?;
            let scale = cosk_spectrum(&raw)?.scale();
            let r = shift_to_six_sum(&raw, 1e-3 * scale)?;
            let delta = 2.0 / 3.0 * cosk_spectrum(&r)?.alpha_sum(6.0)?;
            let found = min_frame_quad_sum(&r, 64, 100, seed.wrapping_add(i))?;
            Ok((found.value - delta) / r.sup_norm())
        })?;
        Ok((v, t))
    });

    // Kähler
    s.check("kahler_projection", "projected tensors satisfy Bianchi and J-invariance", AtMost, 1e-10, || {
        let v = par_max(t.min(20), |i| {
            let n = if i % 2 == 0 { 4 } else { 6 };
            let j = ComplexStructure::standard(n)?;
            let r = project_kahler(&AlgebraicCurvatureTensor::random(n, seed.wrapping_add(i))?, &j, DEFAULT_PROJECTION_TOL, DEFAULT_PROJECTION_ITERS)?;
            Ok(j_invariance_defect(&r, &j)?.max(r.bianchi_defect()) / r.sup_norm())
        })?;
        Ok((v, t.min(20)))
    });
    s.check("cp2_bisectional", "Fubini–Study: R(e₁,Je₁,e₃,Je₃) = 2", AtMost, 1e-12, || {
        let k = KahlerStructure::new(cp2.clone(), cp2_j.clone())?;
        let e = |i: usize| DVector::from_fn(4, |r, _| if r == i { 1.0 } else { 0.0 });
        Ok(((bisectional(&k, &e(0), &e(2))? - 2.0).abs(), 1))
    });
    s.check("four_sectional_identity", "2R(X,JX,Y,JY) equals the four-sectional sum for Kähler tensors", AtMost, 1e-12, || {
        let v = par_max(t, |i| {
            let k = random_kahler_act(2 + (i % 2) as usize, seed.wrapping_add(i), false)?;
            let found = min_orth_bisectional(&k, 16, 20, seed.wrapping_add(i))?;
            let mut worst = found.max_identity_defect;
            worst = worst.max(four_sectional_identity_defect(&k, &found.x, &found.y)?);
            Ok(worst / k.tensor().sup_norm())
        })?;
        Ok((v, t))
    });
    s.check("six_nonneg_bisectional", "six-nonnegative Kähler surfaces have nonnegative orthogonal bisectional curvature", AtLeast, -1e-8, || {
        let v = par_min(t, |i| {
            let k = random_kahler_act(2, seed.wrapping_add(i), true)?;
            Ok(min_orth_bisectional(&k, 64, 100, seed.wrapping_add(i))?.min / k.tensor().sup_norm())
        })?;
        Ok((v, t))
    });
    s.check("bisectional_six_sum_bound", "orthogonal bisectional curvature is at least a third of the six-sum (Kähler, m = 2, 3)", AtLeast, -1e-8, || {
        let v = par_min(t, |i| {
            let k = random_kahler_act(2 + (i % 2) as usize, seed.wrapping_add(i), false)?;
            let six = cosk_spectrum(k.tensor())?.alpha_sum(6.0)?;
            let found = min_orth_bisectional(&k, 64, 100, seed.wrapping_add(i))?;
            Ok((found.min - six / 3.0) / k.tensor().sup_norm())
        })?;
        Ok((v, t))
    });
    s.check("s2xs2_bisectional", "S²×S²: orthogonal bisectional minimum is 0", AtMost, 1e-9, || {
        let (r, j) = s2xs2();
        let k = KahlerStructure::new(r, j)?;
        Ok((min_orth_bisectional(&k, 256, 200, seed)?.min.abs(), 256))
    });

    // operator identities
    s.check("trace_identity", "trace of R̊ over S² is S/2", AtMost, 1e-11, || {
        let v = par_max(2 * t, |i| {
            let n = 3 + (i % 4) as usize;
            let r = AlgebraicCurvatureTensor::random(n, seed.wrapping_add(i))?;
            let tr = r_ring_matrix(&r, &basis_s2(n)?)?.trace();
            Ok((tr - r.scalar_curv() / 2.0).abs() / r.frobenius_norm())
        })?;
        Ok((v, 2 * t))
    });
    s.check("metric_identity", "R̊(g,g) = −S", AtMost, 1e-11, || {
        let v = par_max(2 * t, |i| {
            let n = 3 + (i % 4) as usize;
            let r = AlgebraicCurvatureTensor::random(n, seed.wrapping_add(i))?;
            let g = SymTwoTensor::identity(n);
            Ok((r_ring_pair(&r, &g, &g)? + r.scalar_curv()).abs() / r.frobenius_norm())
        })?;
        Ok((v, 2 * t))
    });
    s.check("basis_minimum", "no orthonormal basis beats the eigenvalue partial sum", AtLeast, -1e-12, || {
        let count = (t / 2).max(1);
        let v = par_min(count, |i| {
            let r = AlgebraicCurvatureTensor::random(4, seed.wrapping_add(i))?;
            let spec = cosk_spectrum(&r)?;
            let mut worst = f64::INFINITY;
            for alpha in [2.0, 4.5, 6.0] {
                let mc = min_basis_sum_montecarlo(&r, alpha, 200, seed.wrapping_add(i))?;
                worst = worst.min((mc - spec.alpha_sum(alpha)?) / spec.scale());
            }
            Ok(worst)
        })?;
        Ok((v, 3 * count))
    });
    s.check("eigenbasis_attains", "the eigenbasis attains the partial sum", AtMost, 1e-12, || {
        let count = (t / 2).max(1);
        let v = par_max(count, |i| {
            let r = AlgebraicCurvatureTensor::random(4, seed.wrapping_add(i))?;
            let spec = cosk_spectrum(&r)?;
            let mut worst: f64 = 0.0;
            for alpha in [2.0, 4.5, 6.0] {
                let eig = min_basis_sum_montecarlo(&r, alpha, 1, seed)?;
                worst = worst.max((eig - spec.alpha_sum(alpha)?).abs() / spec.scale());
            }
            Ok(worst)
        })?;
        Ok((v, 3 * count))
    });

    // four dimensions
    s.check("kahler_form_self_dual", "the Kähler form lies in Λ⁺", AtMost, 1e-15, || {
        let (plus, _) = lambda_pm_bases(Orientation::Standard);
        let omega = cp2_j.kahler_form();
        Ok(((omega.coords() - plus[0].coords() * 2f64.sqrt()).amax(), 1))
    });
    s.check("cp2_weyl", "Fubini–Study: λ = (S/6, −S/12, −S/12), μ = 0, A⁻ = S/12", AtMost, 1e-12, || {
        let w = w_pm_eigen(&cp2, Orientation::Standard)?;
        let b = r_hat_blocks(&cp2, Orientation::Standard)?;
        let dev = max_dev(&w.lambda, &[4.0, -2.0, -2.0]).max(max_dev(&w.mu, &[0.0; 3])).max(b.b.amax());
        Ok((dev, 1))
    });
    s.check("rhat_blocks", "R̂ reassembles from its Λ± blocks", AtMost, 1e-12, || {
        let v = par_max(t, |i| {
            let r = AlgebraicCurvatureTensor::random(4, seed.wrapping_add(i))?;
            let b = r_hat_blocks(&r, Orientation::Standard)?;
            Ok((b.reassemble(Orientation::Standard) - r_hat_matrix(&r)).amax() / r.frobenius_norm())
        })?;
        Ok((v, t))
    });
    s.check("cgt_diagonal", "diagonal blocks are diag(−(λₐ+μ_b) + S/12)", AtMost, 1e-9, || {
        let v = par_max(2 * t, |i| {
            let r = AlgebraicCurvatureTensor::random(4, seed.wrapping_add(i))?;
            Ok(cgt_blocks(&r, Orientation::Standard)?.d_defect / r.sup_norm())
        })?;
        Ok((v, 2 * t))
    });
    s.check("cgt_skew", "off-diagonal blocks are skew-symmetric", AtMost, 1e-12, || {
        let v = par_max(2 * t, |i| {
            let r = AlgebraicCurvatureTensor::random(4, seed.wrapping_add(i))?;
            Ok(cgt_blocks(&r, Orientation::Standard)?.o_skew_defect / r.frobenius_norm())
        })?;
        Ok((v, 2 * t))
    });
    s.check("cgt_einstein", "off-diagonal blocks vanish exactly for Einstein tensors", AtMost, 0.0, || {
        let mut mismatches = 0;
        let mut used = 0;
        for i in 0..2 * t as u64 {
            let raw = AlgebraicCurvatureTensor::random(4, seed.wrapping_add(i))?;
            let r = if i % 2 == 0 { raw.einstein_part()? } else { raw };
            let rel = einstein_defect(&r) / r.frobenius_norm();
            if rel > 1e-10 && rel < 1e-6 {
                continue;
            }
            used += 1;
            let o_small = cgt_blocks(&r, Orientation::Standard)?.o_norm <= 1e-10 * r.frobenius_norm();
            if o_small != (rel <= 1e-10) {
                mismatches += 1;
            }
        }
        Ok((mismatches as f64, used))
    });
    s.check("certificates", "Fubini–Study certifies cp2-type, flat certifies flat", AtMost, 0.0, || {
        let k = KahlerStructure::new(cp2.clone(), cp2_j.clone())?;
        let f = KahlerStructure::new(flat(4)?, ComplexStructure::standard(4)?)?;
        let ok = rigidity_certificate(&k, DEFAULT_CERTIFICATE_TOL)?.verdict == Verdict::Cp2Type
            && rigidity_certificate(&f, DEFAULT_CERTIFICATE_TOL)?.verdict == Verdict::Flat;
        Ok((if ok { 0.0 } else { 1.0 }, 2))
    });
    s.check("rigidity_contrapositive", "Kähler surfaces away from Kähler–Einstein with W⁻ = 0 are not 4½-nonnegative", AtMost, 0.0, || {
        let mut violations = 0;
        for i in 0..t as u64 {
            let k = random_kahler_act(2, seed.wrapping_add(i), i % 2 == 0)?;
            let c = rigidity_certificate(&k, DEFAULT_CERTIFICATE_TOL)?;
            let far = c.w_minus_norm + c.einstein_defect >= 1e-3 * k.tensor().sup_norm();
            if far && cosk_spectrum(k.tensor())?.alpha_sum(4.5)? >= 0.0 {
                violations += 1;
            }
        }
        Ok((violations as f64, t))
    });
    s.check("sign_flipped_dual", "4½-nonpositive Kähler surfaces have constant nonpositive holomorphic curvature", AtMost, 0.0, || {
        let (r, j) = fubini_study(2, -4.0)?;
        let k = KahlerStructure::new(r, j)?;
        let nonpos = cosk_spectrum(&k.tensor().scale(-1.0))?.is_alpha_nonneg(4.5, DEFAULT_VERDICT_TOL)?;
        let c = rigidity_certificate(&k, DEFAULT_CERTIFICATE_TOL)?;
        Ok((if nonpos && c.constant_holomorphic && c.scalar <= 0.0 { 0.0 } else { 1.0 }, 1))
    });
    s.check("isotropic_bound", "six-nonnegative Kähler surfaces: μ₂ + μ₃ ≥ −S/6", AtLeast, -1e-9, || {
        let v = par_min(t, |i| {
            let k = random_kahler_act(2, seed.wrapping_add(i), true)?;
            let w = w_pm_eigen(k.tensor(), kahler_orientation(&k))?;
            Ok((w.mu[1] + w.mu[2] + w.scalar / 6.0) / k.tensor().frobenius_norm())
        })?;
        Ok((v, t))
    });
    s.check("weyl_gap_bound", "six-nonnegative Kähler surfaces: μ₁ − μ₃ ≤ S/4 and μ₃ ≥ −S/6", AtLeast, -1e-9, || {
        let v = par_min(t, |i| {
            let k = random_kahler_act(2, seed.wrapping_add(i), true)?;
            let w = w_pm_eigen(k.tensor(), kahler_orientation(&k))?;
            let gap = w.scalar / 4.0 - (w.mu[0] - w.mu[2]);
            let low = w.mu[2] + w.scalar / 6.0;
            Ok(gap.min(low) / k.tensor().frobenius_norm())
        })?;
        Ok((v, t))
    });

    s.results
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}
