//! Algebraic curvature tensors and the two-tensor spaces they act on.
//!
//! Conventions used throughout the crate:
//!
//! * `R_{ijij}` is the sectional curvature of the `(eᵢ, eⱼ)`-plane, so the
//!   space form of curvature κ has `R_{ijkl} = κ(δ_{ik}δ_{jl} − δ_{il}δ_{jk})`.
//! * `Ric_{jl} = Σ_k R_{kjkl}` and `S = tr Ric`.
//! * Indices are 0-based in the API and 1-based in the CTJ file format.
//!
//! Storage is dense (`n⁴` reals). Every write goes through a canonicalizer
//! that fills all eight images of a slot under the antisymmetries and pair
//! symmetry, so those symmetries hold exactly. The first Bianchi identity is
//! validated, not forced; [`AlgebraicCurvatureTensor::bianchi_project`]
//! forces it.

mod two_tensors;

pub use two_tensors::{
    basis_lambda2, basis_s2, basis_s20, index_pairs, s20_dim, sym_product, wedge_product,
    SymTwoTensor, TwoForm,
};

use std::collections::HashSet;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CoskError, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

/// Relative Bianchi tolerance applied when ingesting tensors from files.
pub const DEFAULT_BIANCHI_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicCurvatureTensor {
    n: usize,
    comp: Vec<f64>,
}

/// `R = W + (1/(n−2)) ric0 ∧○ g + S/(2n(n−1)) g ∧○ g`.
#[derive(Clone, Debug)]
pub struct WeylDecomposition {
    pub scalar: f64,
    pub traceless_ricci: SymTwoTensor,
    pub weyl: AlgebraicCurvatureTensor,
}

impl WeylDecomposition {
    pub fn reassemble(&self) -> AlgebraicCurvatureTensor {
        let n = self.weyl.dim();
        let g = SymTwoTensor::identity(n);
        let ric_part = kulkarni_nomizu_unchecked(&self.traceless_ricci, &g) * (1.0 / (n as f64 - 2.0));
        let scal_part =
            kulkarni_nomizu_unchecked(&g, &g) * (self.scalar / (2.0 * (n * (n - 1)) as f64));
        &(&self.weyl + &ric_part) + &scal_part
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(CoskError::UnsupportedDimension {
            n,
            min: MIN_DIM,
            max: MAX_DIM,
        });
    }
    Ok(())
}

/// Canonical slots `(i,j,k,l)`: `i<j`, `k<l`, `(i,j) <= (k,l)` lexicographically.
pub fn canonical_slots(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    let pairs = index_pairs(n);
    let len = pairs.len();
    (0..len).flat_map(move |a| {
        let pairs = pairs.clone();
        (a..len).map(move |b| (pairs[a].0, pairs[a].1, pairs[b].0, pairs[b].1))
    })
}

impl AlgebraicCurvatureTensor {
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::zero_unchecked(n))
    }

    fn zero_unchecked(n: usize) -> Self {
        Self {
            n,
            comp: vec![0.0; n * n * n * n],
        }
    }

    /// Builds a tensor by evaluating `f` on canonical slots only and writing
    /// each value through the symmetry canonicalizer.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::from_fn_unchecked(n, f))
    }

    pub(crate) fn from_fn_unchecked(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut r = Self::zero_unchecked(n);
        for (i, j, k, l) in canonical_slots(n) {
            r.write_through(i, j, k, l, f(i, j, k, l));
        }
        r
    }

    /// Ingests 1-based canonical entries; omitted slots are zero.
    pub fn from_components(n: usize, entries: &[(usize, usize, usize, usize, f64)]) -> Result<Self> {
        check_dim(n)?;
        let mut seen = HashSet::new();
        let mut r = Self::zero_unchecked(n);
        for &(i, j, k, l, v) in entries {
            if [i, j, k, l].iter().any(|&x| x == 0 || x > n) {
                return Err(CoskError::IndexOutOfRange { i, j, k, l, n });
            }
            if !(i < j && k < l && (i, j) <= (k, l)) {
                return Err(CoskError::NonCanonicalSlot { i, j, k, l });
            }
            if !seen.insert((i, j, k, l)) {
                return Err(CoskError::DuplicateSlot { i, j, k, l });
            }
            r.write_through(i - 1, j - 1, k - 1, l - 1, v);
        }
        Ok(r)
    }

    /// Nonzero canonical entries, 1-based, in canonical order.
    pub fn components(&self) -> Vec<(usize, usize, usize, usize, f64)> {
        canonical_slots(self.n)
            .filter_map(|(i, j, k, l)| {
                let v = self.get(i, j, k, l);
                (v != 0.0).then_some((i + 1, j + 1, k + 1, l + 1, v))
            })
            .collect()
    }

    /// Lifts a symmetric matrix on Λ² (indexed by [`index_pairs`]) to a
    /// four-tensor with `R_{ijkl} = A[(ij),(kl)]`. No Bianchi projection.
    pub fn from_lambda2_matrix(n: usize, a: &DMatrix<f64>) -> Result<Self> {
        check_dim(n)?;
        let pairs = index_pairs(n);
        if a.nrows() != pairs.len() || a.ncols() != pairs.len() {
            return Err(CoskError::DimensionMismatch {
                expected: pairs.len(),
                found: a.nrows(),
            });
        }
        let mut r = Self::zero_unchecked(n);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(k, l)) in pairs.iter().enumerate().skip(p) {
                r.write_through(i, j, k, l, 0.5 * (a[(p, q)] + a[(q, p)]));
            }
        }
        Ok(r)
    }

    /// Deterministic random tensor: a symmetric Gaussian matrix on Λ² lifted
    /// to four indices, then Bianchi-projected.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        check_dim(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::random_with(n, &mut rng))
    }

    pub(crate) fn random_with<R: rand::Rng>(n: usize, rng: &mut R) -> Self {
        let m = n * (n - 1) / 2;
        let g = DMatrix::from_fn(m, m, |_, _| StandardNormal.sample(rng));
        let a = (&g + g.transpose()) * 0.5;
        Self::from_lambda2_matrix(n, &a)
            .expect("dimension already checked")
            .bianchi_project()
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    fn write_through(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        if i == j || k == l {
            return;
        }
        for &(a, b, c, d, s) in &[
            (i, j, k, l, 1.0),
            (j, i, k, l, -1.0),
            (i, j, l, k, -1.0),
            (j, i, l, k, 1.0),
            (k, l, i, j, 1.0),
            (l, k, i, j, -1.0),
            (k, l, j, i, -1.0),
            (l, k, j, i, 1.0),
        ] {
            let p = self.idx(a, b, c, d);
            self.comp[p] = s * v;
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// 0-based component `R_{ijkl}`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comp[self.idx(i, j, k, l)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comp
    }

    pub fn sup_norm(&self) -> f64 {
        self.comp.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.comp.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.comp
            .iter()
            .zip(&other.comp)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest `|R_{ijkl} + R_{jkil} + R_{kijl}|`.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let c = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
                        worst = worst.max(c.abs());
                    }
                }
            }
        }
        worst
    }

    /// Fails when the Bianchi defect exceeds `rel_tol · ‖R‖∞`.
    pub fn check_bianchi(&self, rel_tol: f64) -> Result<()> {
        let defect = self.bianchi_defect();
        let allowed = rel_tol * self.sup_norm();
        if defect > allowed {
            return Err(CoskError::BianchiViolation { defect, allowed });
        }
        Ok(())
    }

    /// Orthogonal projection onto the Bianchi subspace: subtracts the totally
    /// antisymmetric part, which for pair-symmetric tensors is a third of the
    /// cyclic sum.
    pub fn bianchi_project(&self) -> Self {
        Self::from_fn_unchecked(self.n, |i, j, k, l| {
            let cyc = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
            self.get(i, j, k, l) - cyc / 3.0
        })
    }

    /// `R(x, y, z, w) = Σ R_{ijkl} xᵢ yⱼ z_k w_l`.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for (i, &xi) in x.iter().enumerate().take(n) {
            if xi == 0.0 {
                continue;
            }
            let mut si = 0.0;
            for (j, &yj) in y.iter().enumerate().take(n) {
                if yj == 0.0 {
                    continue;
                }
                let mut sj = 0.0;
                for (k, &zk) in z.iter().enumerate().take(n) {
                    let base = self.idx(i, j, k, 0);
                    let row = &self.comp[base..base + n];
                    let sk: f64 = row.iter().zip(w).map(|(r, wl)| r * wl).sum();
                    sj += zk * sk;
                }
                si += yj * sj;
            }
            total += xi * si;
        }
        total
    }

    /// The covector `v_i = R(eᵢ, y, z, w)`.
    pub fn eval_first_slot(&self, y: &[f64], z: &[f64], w: &[f64]) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |i, _| {
            let mut s = 0.0;
            for (j, &yj) in y.iter().enumerate().take(n) {
                if yj == 0.0 {
                    continue;
                }
                for (k, &zk) in z.iter().enumerate().take(n) {
                    let base = self.idx(i, j, k, 0);
                    let row = &self.comp[base..base + n];
                    s += yj * zk * row.iter().zip(w).map(|(r, wl)| r * wl).sum::<f64>();
                }
            }
            s
        })
    }

    /// Sectional curvature of `span{x, y}`.
    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        let xx = x.dot(x);
        let yy = y.dot(y);
        let xy = x.dot(y);
        let area = xx * yy - xy * xy;
        if !(area > 1e-14 * xx * yy) {
            return Err(CoskError::DegeneratePlane);
        }
        Ok(self.eval(x.as_slice(), y.as_slice(), x.as_slice(), y.as_slice()) / area)
    }

    fn check_vec(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.n {
            return Err(CoskError::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn ricci(&self) -> SymTwoTensor {
        let n = self.n;
        let m = DMatrix::from_fn(n, n, |j, l| (0..n).map(|k| self.get(k, j, k, l)).sum());
        SymTwoTensor::new(m).expect("square")
    }

    pub fn scalar_curv(&self) -> f64 {
        self.ricci().trace()
    }

    pub fn traceless_ricci(&self) -> SymTwoTensor {
        self.ricci().traceless_part()
    }

    pub fn weyl_decompose(&self) -> Result<WeylDecomposition> {
        let n = self.n;
        if n < 3 {
            return Err(CoskError::UnsupportedDimension {
                n,
                min: 3,
                max: MAX_DIM,
            });
        }
        let ric = self.ricci();
        let scalar = ric.trace();
        let ric0 = ric.traceless_part();
        let g = SymTwoTensor::identity(n);
        let ric_part = kulkarni_nomizu_unchecked(&ric0, &g) * (1.0 / (n as f64 - 2.0));
        let scal_part = kulkarni_nomizu_unchecked(&g, &g) * (scalar / (2.0 * (n * (n - 1)) as f64));
        let weyl = &(self - &ric_part) - &scal_part;
        Ok(WeylDecomposition {
            scalar,
            traceless_ricci: ric0,
            weyl,
        })
    }

    /// `R` with its traceless Ricci part removed; the result is Einstein.
    pub fn einstein_part(&self) -> Result<Self> {
        let mut d = self.weyl_decompose()?;
        d.traceless_ricci = SymTwoTensor::zeros(self.n);
        Ok(d.reassemble())
    }

    /// Block tensor on `n₁ + n₂` dimensions with vanishing mixed components.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (n1, n2) = (self.n, other.n);
        let n = n1 + n2;
        check_dim(n)?;
        Ok(Self::from_fn_unchecked(n, |i, j, k, l| {
            if i < n1 && j < n1 && k < n1 && l < n1 {
                self.get(i, j, k, l)
            } else if i >= n1 && j >= n1 && k >= n1 && l >= n1 {
                other.get(i - n1, j - n1, k - n1, l - n1)
            } else {
                0.0
            }
        }))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self {
            n: self.n,
            comp: self.comp.iter().zip(&other.comp).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            comp: self.comp.iter().map(|v| v * s).collect(),
        }
    }

    /// Frobenius inner product of the full component arrays.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.comp.iter().zip(&other.comp).map(|(a, b)| a * b).sum()
    }
}

impl Add for &AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn add(self, rhs: Self) -> AlgebraicCurvatureTensor {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn sub(self, rhs: Self) -> AlgebraicCurvatureTensor {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn neg(self) -> AlgebraicCurvatureTensor {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn mul(self, rhs: f64) -> AlgebraicCurvatureTensor {
        self.scale(rhs)
    }
}

impl Mul<f64> for AlgebraicCurvatureTensor {
    type Output = AlgebraicCurvatureTensor;
    fn mul(self, rhs: f64) -> AlgebraicCurvatureTensor {
        self.scale(rhs)
    }
}

/// `(A ∧○ B)_{ijkl} = A_{ik}B_{jl} + A_{jl}B_{ik} − A_{il}B_{jk} − A_{jk}B_{il}`.
pub fn kulkarni_nomizu(a: &SymTwoTensor, b: &SymTwoTensor) -> Result<AlgebraicCurvatureTensor> {
    if a.dim() != b.dim() {
        return Err(CoskError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    check_dim(a.dim())?;
    Ok(kulkarni_nomizu_unchecked(a, b))
}

fn kulkarni_nomizu_unchecked(a: &SymTwoTensor, b: &SymTwoTensor) -> AlgebraicCurvatureTensor {
    AlgebraicCurvatureTensor::from_fn_unchecked(a.dim(), |i, j, k, l| {
        a.get(i, k) * b.get(j, l) + a.get(j, l) * b.get(i, k)
            - a.get(i, l) * b.get(j, k)
            - a.get(j, k) * b.get(i, l)
    })
}
