//! Kähler curvature tensors: the J-invariance identity, orthogonal
//! bisectional curvature and a sampler for random Kähler tensors.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{CoskError, Result};
use crate::models::{fubini_study, ComplexStructure};
use crate::operators::cosk_spectrum;
use crate::tensor::AlgebraicCurvatureTensor;

/// Relative J-invariance tolerance for [`KahlerStructure::new`].
pub const DEFAULT_J_TOL: f64 = 1e-9;
pub const DEFAULT_PROJECTION_TOL: f64 = 1e-12;
pub const DEFAULT_PROJECTION_ITERS: usize = 500;
pub const DEFAULT_BISECTIONAL_SAMPLES: usize = 256;

const UNIT_TOL: f64 = 1e-10;
const PAIR_TOL: f64 = 1e-10;
const INITIAL_STEP: f64 = 1e-2;
const MAX_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;
const SHIFT_BISECTIONS: usize = 60;
/// The sampler projects more tightly than the public default so that the
/// four-sectional identity holds to near roundoff on its output.
const SAMPLER_PROJECTION_TOL: f64 = 1e-14;
const REFINE_STARTS: usize = 8;

#[derive(Clone, Debug)]
pub struct KahlerStructure {
    r: AlgebraicCurvatureTensor,
    j: ComplexStructure,
    j_defect: f64,
}

impl KahlerStructure {
    pub fn new(r: AlgebraicCurvatureTensor, j: ComplexStructure) -> Result<Self> {
        Self::with_tolerance(r, j, DEFAULT_J_TOL)
    }

    /// Accepts `r` when its J-invariance defect is at most `j_tol · ‖R‖∞`.
    pub fn with_tolerance(r: AlgebraicCurvatureTensor, j: ComplexStructure, j_tol: f64) -> Result<Self> {
        let j_defect = j_invariance_defect(&r, &j)?;
        let allowed = j_tol * r.sup_norm();
        if j_defect > allowed {
            return Err(CoskError::NotKahler { defect: j_defect, allowed });
        }
        Ok(Self { r, j, j_defect })
    }

    pub fn tensor(&self) -> &AlgebraicCurvatureTensor {
        &self.r
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn j_defect(&self) -> f64 {
        self.j_defect
    }

    pub fn dim(&self) -> usize {
        self.r.dim()
    }

    pub fn into_parts(self) -> (AlgebraicCurvatureTensor, ComplexStructure) {
        (self.r, self.j)
    }
}

fn check_j(r: &AlgebraicCurvatureTensor, j: &ComplexStructure) -> Result<()> {
    if r.dim() != j.dim() {
        return Err(CoskError::DimensionMismatch { expected: r.dim(), found: j.dim() });
    }
    Ok(())
}

/// Dense `c'[i,j,k,l] = Σ c[i,j,a,b] J_ak J_bl`, i.e. `R(eᵢ,eⱼ,Je_k,Je_l)`.
fn act_last_pair(c: &[f64], n: usize, j: &DMatrix<f64>) -> Vec<f64> {
    let mut tmp = vec![0.0; c.len()];
    for ijk in 0..n * n * n {
        let row = &c[ijk * n..ijk * n + n];
        for l in 0..n {
            tmp[ijk * n + l] = (0..n).map(|b| row[b] * j[(b, l)]).sum();
        }
    }
    let mut out = vec![0.0; c.len()];
    for ij in 0..n * n {
        for k in 0..n {
            for l in 0..n {
                out[(ij * n + k) * n + l] = (0..n).map(|a| tmp[(ij * n + a) * n + l] * j[(a, k)]).sum();
            }
        }
    }
    out
}

fn swap_pairs(c: &[f64], n: usize) -> Vec<f64> {
    let nn = n * n;
    let mut out = vec![0.0; c.len()];
    for p in 0..nn {
        for q in 0..nn {
            out[p * nn + q] = c[q * nn + p];
        }
    }
    out
}

/// `max |R_{ijkl} − R(eᵢ,eⱼ,Je_k,Je_l)|`.
pub fn j_invariance_defect(r: &AlgebraicCurvatureTensor, j: &ComplexStructure) -> Result<f64> {
    check_j(r, j)?;
    let t = act_last_pair(r.as_slice(), r.dim(), j.matrix());
    Ok(r.as_slice().iter().zip(&t).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Orthogonal projection onto J-invariant tensors: the average of `R` over
/// the substitutions `J` in the last pair, the first pair, and both.
fn j_average(r: &AlgebraicCurvatureTensor, j: &DMatrix<f64>) -> AlgebraicCurvatureTensor {
    let n = r.dim();
    let c = r.as_slice();
    let last = act_last_pair(c, n, j);
    let first = swap_pairs(&last, n);
    let both = act_last_pair(&first, n, j);
    let at = |i: usize, jj: usize, k: usize, l: usize| ((i * n + jj) * n + k) * n + l;
    AlgebraicCurvatureTensor::from_fn_unchecked(n, |i, jj, k, l| {
        let p = at(i, jj, k, l);
        0.25 * (c[p] + last[p] + first[p] + both[p])
    })
}

/// Iterates of the alternating projection, starting with the input and ending
/// with the converged tensor.
pub fn project_kahler_iterates(
    r: &AlgebraicCurvatureTensor,
    j: &ComplexStructure,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<AlgebraicCurvatureTensor>> {
    check_j(r, j)?;
    let scale = r.sup_norm();
    let mut iterates = vec![r.clone()];
    let mut last_step = f64::INFINITY;
    for _ in 0..max_iter {
        let cur = iterates.last().expect("nonempty");
        let next = j_average(cur, j.matrix()).bianchi_project();
        last_step = next.max_abs_diff(cur);
        iterates.push(next);
        if last_step <= tol * scale {
            return Ok(iterates);
        }
    }
    Err(CoskError::ProjectionNotConverged { iterations: max_iter, last_step })
}

/// Nearest tensor satisfying both the Bianchi identity and
/// `R(X,Y,JZ,JW) = R(X,Y,Z,W)`, by alternating projections. Stops once
/// successive iterates differ by at most `tol · ‖R‖∞`.
pub fn project_kahler(
    r: &AlgebraicCurvatureTensor,
    j: &ComplexStructure,
    tol: f64,
    max_iter: usize,
) -> Result<AlgebraicCurvatureTensor> {
    let mut it = project_kahler_iterates(r, j, tol, max_iter)?;
    Ok(it.pop().expect("nonempty"))
}

fn check_unit(x: &DVector<f64>) -> Result<()> {
    let norm = x.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(CoskError::NotUnit { norm });
    }
    Ok(())
}

fn check_vec(k: &KahlerStructure, x: &DVector<f64>) -> Result<()> {
    if x.len() != k.dim() {
        return Err(CoskError::DimensionMismatch { expected: k.dim(), found: x.len() });
    }
    check_unit(x)
}

fn bisectional_unchecked(k: &KahlerStructure, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let (jx, jy) = (k.j.apply(x), k.j.apply(y));
    k.r.eval(x.as_slice(), jx.as_slice(), y.as_slice(), jy.as_slice())
}

/// `R(X, JX, Y, JY)` for unit `X`, `Y`.
pub fn bisectional(k: &KahlerStructure, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    check_vec(k, x)?;
    check_vec(k, y)?;
    Ok(bisectional_unchecked(k, x, y))
}

fn pair_defect(j: &ComplexStructure, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x.dot(y).abs().max(x.dot(&j.apply(y)).abs())
}

/// `⟨X,Y⟩ = ⟨X,JY⟩ = 0` within `tol`.
pub fn is_orthogonal_pair(j: &ComplexStructure, x: &DVector<f64>, y: &DVector<f64>, tol: f64) -> bool {
    x.len() == j.dim() && y.len() == j.dim() && pair_defect(j, x, y) <= tol
}

fn identity_defect_unchecked(k: &KahlerStructure, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let (jx, jy) = (k.j.apply(x), k.j.apply(y));
    let sec = |a: &DVector<f64>, b: &DVector<f64>| k.r.eval(a.as_slice(), b.as_slice(), a.as_slice(), b.as_slice());
    let four = sec(x, y) + sec(&jx, y) + sec(x, &jy) + sec(&jx, &jy);
    (2.0 * bisectional_unchecked(k, x, y) - four).abs()
}

/// `|2R(X,JX,Y,JY) − [R(X,Y,X,Y) + R(JX,Y,JX,Y) + R(X,JY,X,JY) + R(JX,JY,JX,JY)]|`
/// for an orthogonal unit pair. Vanishes for Kähler tensors.
pub fn four_sectional_identity_defect(k: &KahlerStructure, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    check_vec(k, x)?;
    check_vec(k, y)?;
    let defect = pair_defect(&k.j, x, y);
    if defect > PAIR_TOL {
        return Err(CoskError::NotOrthogonalPair { defect });
    }
    Ok(identity_defect_unchecked(k, x, y))
}

/// Projects `y` off `span{X, JX}` and normalizes (twice, for roundoff).
fn complete_pair(j: &ComplexStructure, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let jx = j.apply(x);
    let mut y = y.clone();
    for _ in 0..2 {
        y -= x * x.dot(&y);
        y -= &jx * jx.dot(&y);
        y /= y.norm();
    }
    y
}

fn random_pair<R: Rng + ?Sized>(j: &ComplexStructure, rng: &mut R) -> (DVector<f64>, DVector<f64>) {
    let n = j.dim();
    let x = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut *rng)).normalize();
    let y = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut *rng));
    let y = complete_pair(j, &x, &y);
    (x, y)
}

/// Euclidean gradient of `(X, Y) ↦ R(X, JX, Y, JY)`.
fn bisectional_gradient(k: &KahlerStructure, x: &DVector<f64>, y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let (jx, jy) = (k.j.apply(x), k.j.apply(y));
    let jt = k.j.matrix().transpose();
    let (xs, ys, jxs, jys) = (x.as_slice(), y.as_slice(), jx.as_slice(), jy.as_slice());
    // R(X, e_j, Y, JY) = R(e_j, X, JY, Y) and R(X, JX, Y, e_j) = R(e_j, Y, JX, X)
    let gx = k.r.eval_first_slot(jxs, ys, jys) + &jt * k.r.eval_first_slot(xs, jys, ys);
    let gy = k.r.eval_first_slot(jys, xs, jxs) + &jt * k.r.eval_first_slot(ys, jxs, xs);
    (gx, gy)
}

/// Gradient projected onto the tangent space of the constraint set
/// `|X| = |Y| = 1, ⟨X,Y⟩ = ⟨X,JY⟩ = 0` in `R²ⁿ`.
fn tangent_gradient(k: &KahlerStructure, x: &DVector<f64>, y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let n = x.len();
    let (gx, gy) = bisectional_gradient(k, x, y);
    let jy = k.j.apply(y);
    let jtx = k.j.matrix().transpose() * x;
    let zero = DVector::zeros(n);
    // differentials of the four constraints, as rows over (ξ, η)
    let rows = [(x, &zero), (&zero, y), (y, x), (&jy, &jtx)];
    let c = DMatrix::from_fn(4, 2 * n, |r, col| {
        let (a, b) = rows[r];
        if col < n { a[col] } else { b[col - n] }
    });
    let g = DVector::from_iterator(2 * n, gx.iter().chain(gy.iter()).copied());
    let gram = &c * c.transpose();
    let coef = gram.lu().solve(&(&c * &g)).expect("constraint differentials are independent on the constraint set");
    let t = g - c.transpose() * coef;
    (t.rows(0, n).into_owned(), t.rows(n, n).into_owned())
}

fn sample_pair(k: &KahlerStructure, seed: u64, s: usize) -> (DVector<f64>, DVector<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s as u64));
    random_pair(&k.j, &mut rng)
}

struct Refined {
    value: f64,
    x: DVector<f64>,
    y: DVector<f64>,
    max_defect: f64,
    evaluated: usize,
}

/// Gradient descent on the constraint set, with the step doubling on success
/// and halving on failure.
fn refine_pair(k: &KahlerStructure, mut x: DVector<f64>, mut y: DVector<f64>, mut value: f64, steps: usize) -> Refined {
    let scale = k.r.sup_norm();
    let mut max_defect: f64 = 0.0;
    let mut evaluated = 0;
    if scale > 0.0 {
        let mut step = INITIAL_STEP;
        for _ in 0..steps {
            let (gx, gy) = tangent_gradient(k, &x, &y);
            if gx.norm_squared() + gy.norm_squared() == 0.0 {
                break;
            }
            let nx = (&x - gx * (step / scale)).normalize();
            let ny = complete_pair(&k.j, &nx, &(&y - gy * (step / scale)));
            let cand = bisectional_unchecked(k, &nx, &ny);
            max_defect = max_defect.max(identity_defect_unchecked(k, &nx, &ny));
            evaluated += 1;
            if cand < value {
                x = nx;
                y = ny;
                value = cand;
                step = (step * 2.0).min(MAX_STEP);
            } else {
                step *= 0.5;
                if step < MIN_STEP {
                    break;
                }
            }
        }
    }
    Refined { value, x, y, max_defect, evaluated }
}

#[derive(Clone, Debug)]
pub struct BisectionalSearch {
    pub min: f64,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    /// Largest four-sectional identity defect over every evaluated pair.
    pub max_identity_defect: f64,
    pub pairs_evaluated: usize,
}

/// Upper bound for the minimum of `R(X,JX,Y,JY)` over unit pairs with
/// `⟨X,Y⟩ = ⟨X,JY⟩ = 0`.
///
/// Sample `s` draws `X` and then `Y` in the complement of `span{X,JX}` from
/// seed `seed + s`; the best few samples are refined by gradient steps
/// followed by re-normalization of `X` and re-projection of `Y`.
pub fn min_orth_bisectional(
    k: &KahlerStructure,
    samples: usize,
    refine_steps: usize,
    seed: u64,
) -> Result<BisectionalSearch> {
    let n = k.dim();
    if n < 4 {
        return Err(CoskError::UnsupportedDimension { n, min: 4, max: crate::tensor::MAX_DIM });
    }
    if samples == 0 {
        return Err(CoskError::InvalidArgument("samples must be >= 1".into()));
    }
    let mut scored: Vec<(usize, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let (x, y) = sample_pair(k, seed, s);
            (s, bisectional_unchecked(k, &x, &y), identity_defect_unchecked(k, &x, &y))
        })
        .collect();
    let sampled_defect = scored.iter().fold(0.0f64, |m, t| m.max(t.2));
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let refined: Vec<Refined> = scored
        .par_iter()
        .take(REFINE_STARTS)
        .map(|&(s, v, _)| {
            let (x, y) = sample_pair(k, seed, s);
            refine_pair(k, x, y, v, refine_steps)
        })
        .collect();
    let best = refined
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("samples >= 1");
    let max_defect = refined.iter().fold(sampled_defect, |m, r| m.max(r.max_defect));
    let evaluated = samples + refined.iter().map(|r| r.evaluated).sum::<usize>();
    let (value, x, y) = (best.value, best.x.clone(), best.y.clone());
    Ok(BisectionalSearch {
        min: value,
        x,
        y,
        max_identity_defect: max_defect,
        pairs_evaluated: evaluated,
    })
}

/// Random Kähler tensor on `C^m` with the standard complex structure: a
/// random tensor projected onto the Kähler subspace.
///
/// With `ensure_six_nonneg`, adds the smallest `t·fubini_study(m, 1)` (to
/// bisection accuracy) making the 6-sum of `R̊` nonnegative. Superadditivity
/// of the 6-sum bounds the required `t` up front. The shift only exists when
/// the Fubini–Study direction itself has a positive 6-sum, which is the case
/// for `m = 2` only; otherwise [`CoskError::ShiftUnavailable`] is returned.
pub fn random_kahler_act(m: usize, seed: u64, ensure_six_nonneg: bool) -> Result<KahlerStructure> {
    if m < 2 || 2 * m > crate::tensor::MAX_DIM {
        return Err(CoskError::UnsupportedDimension { n: 2 * m, min: 4, max: crate::tensor::MAX_DIM });
    }
    let n = 2 * m;
    let j = ComplexStructure::standard(n)?;
    let raw = AlgebraicCurvatureTensor::random(n, seed)?;
    let mut r = project_kahler(&raw, &j, SAMPLER_PROJECTION_TOL, DEFAULT_PROJECTION_ITERS)?;
    if ensure_six_nonneg {
        r = shift_to_six_nonneg(&r, m)?;
    }
    KahlerStructure::new(r, j)
}

fn six_sum(r: &AlgebraicCurvatureTensor) -> Result<f64> {
    cosk_spectrum(r)?.alpha_sum(6.0)
}

fn shift_to_six_nonneg(r: &AlgebraicCurvatureTensor, m: usize) -> Result<AlgebraicCurvatureTensor> {
    let (fs, _) = fubini_study(m, 1.0)?;
    let fs_sum = six_sum(&fs)?;
    if fs_sum <= 0.0 {
        return Err(CoskError::ShiftUnavailable { m });
    }
    let base = six_sum(r)?;
    if base >= 0.0 {
        return Ok(r.clone());
    }
    let at = |t: f64| r + &fs.scale(t);
    // six_sum(R + tF) >= six_sum(R) + t·six_sum(F)
    let mut hi = -base / fs_sum;
    while six_sum(&at(hi))? < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..SHIFT_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if six_sum(&at(mid))? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(at(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{s2xs2, space_form};
    use crate::operators::{frame_quad_sum, Frame4, DEFAULT_VERDICT_TOL};
    use proptest::prelude::*;

    fn unit(n: usize, i: usize) -> DVector<f64> {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        e
    }

    fn fs_structure(m: usize, c: f64) -> KahlerStructure {
        let (r, j) = fubini_study(m, c).unwrap();
        KahlerStructure::new(r, j).unwrap()
    }

    #[test]
    fn invariance_defects_on_models() {
        let k = fs_structure(2, 4.0);
        assert!(k.j_defect() <= 1e-13);
        let (r, j) = s2xs2();
        assert!(j_invariance_defect(&r, &j).unwrap() <= 1e-13);
        let s4 = space_form(4, 1.0).unwrap();
        let j4 = ComplexStructure::standard(4).unwrap();
        assert!(j_invariance_defect(&s4, &j4).unwrap() > 0.1);
        assert!(matches!(KahlerStructure::new(s4, j4), Err(CoskError::NotKahler { .. })));
        let j6 = ComplexStructure::standard(6).unwrap();
        assert!(j_invariance_defect(&r, &j6).is_err());
    }

    /// Oracle: evaluates `R(eᵢ,eⱼ,Je_k,Je_l)` through the multilinear form.
    #[test]
    fn dense_j_action_matches_multilinear_evaluation() {
        let r = AlgebraicCurvatureTensor::random(4, 3).unwrap();
        let j = ComplexStructure::standard(4).unwrap();
        let t = act_last_pair(r.as_slice(), 4, j.matrix());
        for idx in 0..256 {
            let (i, jj, k, l) = (idx / 64, (idx / 16) % 4, (idx / 4) % 4, idx % 4);
            let jk = j.apply(&unit(4, k));
            let jl = j.apply(&unit(4, l));
            let want = r.eval(unit(4, i).as_slice(), unit(4, jj).as_slice(), jk.as_slice(), jl.as_slice());
            assert!((t[idx] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn projection_lands_in_both_subspaces() {
        for (n, seed) in [(4, 0), (4, 1), (6, 2)] {
            let r = AlgebraicCurvatureTensor::random(n, seed).unwrap();
            let j = ComplexStructure::standard(n).unwrap();
            let p = project_kahler(&r, &j, DEFAULT_PROJECTION_TOL, DEFAULT_PROJECTION_ITERS).unwrap();
            let s = p.sup_norm();
            assert!(s > 0.0);
            assert!(j_invariance_defect(&p, &j).unwrap() <= 1e-10 * s);
            assert!(p.bianchi_defect() <= 1e-10 * s);
        }
    }

    #[test]
    fn projection_fixed_points() {
        let (r, j) = fubini_study(2, 4.0).unwrap();
        let it = project_kahler_iterates(&r, &j, DEFAULT_PROJECTION_TOL, DEFAULT_PROJECTION_ITERS).unwrap();
        assert_eq!(it.len(), 2);
        assert!(it[1].max_abs_diff(&r) < 1e-14);
        let z = AlgebraicCurvatureTensor::zero(4).unwrap();
        assert_eq!(project_kahler(&z, &j, 1e-12, 10).unwrap(), z);
        let r = AlgebraicCurvatureTensor::random(4, 5).unwrap();
        assert!(matches!(
            project_kahler(&r, &j, 1e-12, 1),
            Err(CoskError::ProjectionNotConverged { .. })
        ));
    }

    #[test]
    fn projection_is_fejer_monotone_and_nearest() {
        let j = ComplexStructure::standard(4).unwrap();
        let r = AlgebraicCurvatureTensor::random(4, 8).unwrap();
        let it = project_kahler_iterates(&r, &j, DEFAULT_PROJECTION_TOL, DEFAULT_PROJECTION_ITERS).unwrap();
        let limit = it.last().unwrap().clone();
        // points of the intersection: the limit itself and Kähler models
        let anchors = [limit.clone(), fubini_study(2, 3.0).unwrap().0, s2xs2().0.scale(-2.0), &limit + &fubini_study(2, 1.0).unwrap().0];
        for z in &anchors {
            let d: Vec<f64> = it.iter().map(|x| (x - z).frobenius_norm()).collect();
            assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            // best approximation: the residual is orthogonal to the intersection
            let resid = &r - &limit;
            assert!(resid.inner(&(z - &limit)).abs() <= 1e-9 * r.frobenius_norm() * (z - &limit).frobenius_norm().max(1.0));
        }
        let again = project_kahler(&limit, &j, DEFAULT_PROJECTION_TOL, DEFAULT_PROJECTION_ITERS).unwrap();
        assert!(again.max_abs_diff(&limit) <= 1e-11 * limit.sup_norm());
    }

    #[test]
    fn bisectional_examples() {
        let k = fs_structure(2, 4.0);
        assert!((bisectional(&k, &unit(4, 0), &unit(4, 2)).unwrap() - 2.0).abs() < 1e-14);
        let (r, j) = s2xs2();
        let s = KahlerStructure::new(r, j).unwrap();
        assert_eq!(bisectional(&s, &unit(4, 0), &unit(4, 2)).unwrap(), 0.0);
        assert!(bisectional(&s, &(unit(4, 0) * 2.0), &unit(4, 2)).is_err());
        let x = DVector::from_column_slice(&[0.6, 0.0, 0.8, 0.0]);
        let jx = s.complex_structure().apply(&x);
        assert!(!is_orthogonal_pair(s.complex_structure(), &x, &jx, 1e-10));
        assert!(is_orthogonal_pair(s.complex_structure(), &unit(4, 0), &unit(4, 2), 1e-10));
        assert!(four_sectional_identity_defect(&s, &x, &jx).is_err());
    }

    #[test]
    fn four_sectional_identity_holds_for_kahler_tensors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (r, j) = s2xs2();
        let models = [fs_structure(2, 4.0), KahlerStructure::new(r, j).unwrap(), random_kahler_act(2, 4, false).unwrap(), random_kahler_act(3, 4, false).unwrap()];
        for k in &models {
            for _ in 0..100 {
                let (x, y) = random_pair(k.complex_structure(), &mut rng);
                let d = four_sectional_identity_defect(k, &x, &y).unwrap();
                assert!(d <= 1e-12 * k.tensor().sup_norm().max(1.0), "{d} {}", k.tensor().frobenius_norm());
            }
        }
    }

    #[test]
    fn identity_defect_is_nonzero_off_the_kahler_subspace() {
        let r = space_form(4, 1.0).unwrap();
        let j = ComplexStructure::standard(4).unwrap();
        let k = KahlerStructure::with_tolerance(r, j, f64::INFINITY).unwrap();
        let d = four_sectional_identity_defect(&k, &unit(4, 0), &unit(4, 2)).unwrap();
        // 2·0 against four unit sectionals
        assert_eq!(d, 4.0);
    }

    #[test]
    fn pair_frames_are_orthonormal_and_match_frame_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..10 {
            let k = random_kahler_act(2 + (seed % 2) as usize, seed, false).unwrap();
            let (x, y) = random_pair(k.complex_structure(), &mut rng);
            let (jx, jy) = (k.complex_structure().apply(&x), k.complex_structure().apply(&y));
            let frame = Frame4::new([x.clone(), jx, y.clone(), jy]).unwrap();
            let e = frame.vectors();
            for a in 0..4 {
                for b in 0..4 {
                    let t = if a == b { 1.0 } else { 0.0 };
                    assert!((e[a].dot(&e[b]) - t).abs() < 1e-12);
                }
            }
            let quad = frame_quad_sum(k.tensor(), &frame).unwrap();
            let b = bisectional(&k, &x, &y).unwrap();
            assert!((quad - 2.0 * b).abs() <= 1e-12 * k.tensor().sup_norm(), "{} {}", (quad - 2.0 * b).abs(), k.tensor().frobenius_norm());
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let k = random_kahler_act(2, 3, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (x, y) = random_pair(k.complex_structure(), &mut rng);
        let (gx, gy) = bisectional_gradient(&k, &x, &y);
        let h = 1e-6;
        for i in 0..4 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (bisectional_unchecked(&k, &xp, &y) - bisectional_unchecked(&k, &xm, &y)) / (2.0 * h);
            assert!((fd - gx[i]).abs() < 1e-6);
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[i] += h;
            ym[i] -= h;
            let fd = (bisectional_unchecked(&k, &x, &yp) - bisectional_unchecked(&k, &x, &ym)) / (2.0 * h);
            assert!((fd - gy[i]).abs() < 1e-6);
        }
    }

    /// Dense sampling over admissible pairs.
    fn sampled_min(k: &KahlerStructure, count: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let (x, y) = random_pair(k.complex_structure(), &mut rng);
                bisectional_unchecked(k, &x, &y)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn min_bisectional_on_models() {
        let k = fs_structure(2, 4.0);
        let found = min_orth_bisectional(&k, 64, 50, 0).unwrap();
        assert!((found.min - 2.0).abs() < 1e-6);
        assert!(found.max_identity_defect <= 1e-12 * 4.0);
        let k3 = fs_structure(2, 12.0);
        assert!((min_orth_bisectional(&k3, 64, 50, 0).unwrap().min - 6.0).abs() < 1e-6);
        let (r, j) = s2xs2();
        let s = KahlerStructure::new(r, j).unwrap();
        let found = min_orth_bisectional(&s, DEFAULT_BISECTIONAL_SAMPLES, 200, 0).unwrap();
        assert!(found.min.abs() < 1e-9, "{}", found.min);
        assert!(is_orthogonal_pair(s.complex_structure(), &found.x, &found.y, 1e-12));
        assert!(min_orth_bisectional(&s, 0, 10, 0).is_err());
    }

    #[test]
    fn min_bisectional_beats_sampling() {
        for seed in 0..4 {
            let k = random_kahler_act(2, seed, false).unwrap();
            let found = min_orth_bisectional(&k, 64, 200, seed).unwrap();
            let sm = sampled_min(&k, 20_000, seed + 50);
            assert!(found.min <= sm + 1e-12, "{} vs {}", found.min, sm);
            let again = min_orth_bisectional(&k, 64, 200, seed).unwrap();
            assert_eq!(found.min.to_bits(), again.min.to_bits());
        }
    }

    #[test]
    fn random_kahler_samples() {
        let a = random_kahler_act(2, 17, true).unwrap();
        let b = random_kahler_act(2, 17, true).unwrap();
        assert_eq!(a.tensor(), b.tensor());
        let s = a.tensor().sup_norm();
        assert!(a.j_defect() <= 1e-10 * s);
        assert!(a.tensor().bianchi_defect() <= 1e-10 * s);
        let spec = cosk_spectrum(a.tensor()).unwrap();
        assert!(spec.is_alpha_nonneg(6.0, 1e-12).unwrap());
        assert!(spec.alpha_sum(6.0).unwrap() < 1e-6 * spec.scale(), "shift should be near minimal");
        assert!(matches!(random_kahler_act(3, 0, true), Err(CoskError::ShiftUnavailable { m: 3 })));
        assert!(random_kahler_act(1, 0, false).is_err());
    }

    #[test]
    fn six_nonneg_kahler_has_nonneg_orthogonal_bisectional() {
        for seed in 0..20 {
            let k = random_kahler_act(2, seed, true).unwrap();
            let found = min_orth_bisectional(&k, 128, 200, seed).unwrap();
            assert!(found.min >= -1e-8 * k.tensor().sup_norm());
            assert!(cosk_spectrum(k.tensor()).unwrap().is_alpha_nonneg(6.0, DEFAULT_VERDICT_TOL).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn scaling_is_homogeneous(t in 0.1f64..10.0, seed in 0u64..1000) {
            let k = fs_structure(2, 4.0);
            let kt = fs_structure(2, 4.0 * t);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, y) = random_pair(k.complex_structure(), &mut rng);
            let b = bisectional(&k, &x, &y).unwrap();
            let bt = bisectional(&kt, &x, &y).unwrap();
            prop_assert!((bt - t * b).abs() <= 1e-12 * t.max(1.0) * 4.0);
        }
    }
}
