//! Four-dimensional structure: the Hodge star, the splitting
//! `Λ² = Λ⁺ ⊕ Λ⁻`, the self-dual and anti-self-dual Weyl spectra, and the
//! block normal form of `R̊` in the basis of products `η⁺·η⁻`.

use nalgebra::{DMatrix, Matrix3};

use crate::error::{CoskError, Result};
use crate::kahler::KahlerStructure;
use crate::operators::{r_hat_matrix, r_ring_matrix};
use crate::spectral::{sym_eigen, DEFAULT_TOL};
use crate::tensor::{AlgebraicCurvatureTensor, SymTwoTensor, TwoForm};

pub const DEFAULT_CERTIFICATE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Orientation {
    /// `e₁∧e₂∧e₃∧e₄` is positive.
    #[default]
    Standard,
    Reversed,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Standard => 1.0,
            Orientation::Reversed => -1.0,
        }
    }
}

fn require_four(r: &AlgebraicCurvatureTensor) -> Result<()> {
    if r.dim() != 4 {
        return Err(CoskError::DimensionMismatch { expected: 4, found: r.dim() });
    }
    Ok(())
}

/// Hodge star on Λ² in the lexicographic basis `e₁₂, e₁₃, e₁₄, e₂₃, e₂₄, e₃₄`.
pub fn hodge_star_matrix(orientation: Orientation) -> DMatrix<f64> {
    let s = orientation.sign();
    let mut m = DMatrix::zeros(6, 6);
    // *e12 = e34, *e13 = −e24, *e14 = e23 and the inverse relations
    for &(from, to, v) in &[(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)] {
        m[(to, from)] = s * v;
        m[(from, to)] = s * v;
    }
    m
}

/// `(ω₁⁺, ω₂⁺, ω₃⁺)` and `(ω₁⁻, ω₂⁻, ω₃⁻)` with
/// `ω₁± = (e₁₂ ± e₃₄)/√2`, `ω₂± = (e₁₃ ∓ e₂₄)/√2`, `ω₃± = (e₁₄ ± e₂₃)/√2`
/// for the standard orientation; reversing it swaps the two triples.
pub fn lambda_pm_bases(orientation: Orientation) -> ([TwoForm; 3], [TwoForm; 3]) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let form = |sign: f64| {
        [
            [h, 0.0, 0.0, 0.0, 0.0, sign * h],
            [0.0, h, 0.0, 0.0, -sign * h, 0.0],
            [0.0, 0.0, h, sign * h, 0.0, 0.0],
        ]
        .map(|c| TwoForm::from_coords(4, &c).expect("six coordinates"))
    };
    match orientation {
        Orientation::Standard => (form(1.0), form(-1.0)),
        Orientation::Reversed => (form(-1.0), form(1.0)),
    }
}

/// `R̂` in the basis `(ω⁺, ω⁻)`:
///
/// ```text
/// ( A⁺  B  )      A± = S/12 + W±,  B the traceless Ricci block
/// ( Bᵀ  A⁻ )
/// ```
///
/// `B` has rows indexed by `ω⁺` and columns by `ω⁻`.
#[derive(Clone, Debug, PartialEq)]
pub struct RHatBlocks {
    pub a_plus: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub a_minus: Matrix3<f64>,
}

impl RHatBlocks {
    /// The 6×6 matrix in the lexicographic basis of Λ².
    pub fn reassemble(&self, orientation: Orientation) -> DMatrix<f64> {
        let p = pm_change_of_basis(orientation);
        let mut blocks = DMatrix::zeros(6, 6);
        blocks.view_mut((0, 0), (3, 3)).copy_from(&self.a_plus);
        blocks.view_mut((0, 3), (3, 3)).copy_from(&self.b);
        blocks.view_mut((3, 0), (3, 3)).copy_from(&self.b.transpose());
        blocks.view_mut((3, 3), (3, 3)).copy_from(&self.a_minus);
        &p * blocks * p.transpose()
    }
}

/// Columns are the lexicographic coordinates of `ω₁⁺..ω₃⁺, ω₁⁻..ω₃⁻`.
fn pm_change_of_basis(orientation: Orientation) -> DMatrix<f64> {
    let (plus, minus) = lambda_pm_bases(orientation);
    let cols: Vec<_> = plus.iter().chain(minus.iter()).map(|w| w.coords()).collect();
    DMatrix::from_columns(&cols)
}

pub fn r_hat_blocks(r: &AlgebraicCurvatureTensor, orientation: Orientation) -> Result<RHatBlocks> {
    require_four(r)?;
    let p = pm_change_of_basis(orientation);
    let m = p.transpose() * r_hat_matrix(r) * &p;
    let block = |r0: usize, c0: usize| Matrix3::from_fn(|i, j| m[(r0 + i, c0 + j)]);
    Ok(RHatBlocks {
        a_plus: block(0, 0),
        b: block(0, 3),
        a_minus: block(3, 3),
    })
}

/// Eigen-data of `W±`, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct WeylSpectra {
    pub lambda: [f64; 3],
    pub mu: [f64; 3],
    pub plus_forms: [TwoForm; 3],
    pub minus_forms: [TwoForm; 3],
    pub scalar: f64,
}

fn descending_eigenforms(w: &Matrix3<f64>, basis: &[TwoForm; 3]) -> Result<([f64; 3], [TwoForm; 3])> {
    let dm = DMatrix::from_fn(3, 3, |i, j| w[(i, j)]);
    let eig = sym_eigen(&dm, DEFAULT_TOL)?;
    let order = [2, 1, 0];
    let values = order.map(|k| eig.values[k]);
    let forms = order.map(|k| {
        let v = eig.vectors.column(k);
        let mut f = basis[0].scale(v[0]);
        for c in 1..3 {
            f = &f + &basis[c].scale(v[c]);
        }
        f
    });
    Ok((values, forms))
}

pub fn w_pm_eigen(r: &AlgebraicCurvatureTensor, orientation: Orientation) -> Result<WeylSpectra> {
    let blocks = r_hat_blocks(r, orientation)?;
    let scalar = r.scalar_curv();
    let shift = Matrix3::identity() * (scalar / 12.0);
    let (plus, minus) = lambda_pm_bases(orientation);
    let (lambda, plus_forms) = descending_eigenforms(&(blocks.a_plus - shift), &plus)?;
    let (mu, minus_forms) = descending_eigenforms(&(blocks.a_minus - shift), &minus)?;
    Ok(WeylSpectra {
        lambda,
        mu,
        plus_forms,
        minus_forms,
        scalar,
    })
}

/// `R̊` in the basis `φ_(a,b) = η_a⁺·η_b⁻`, split into 3×3 blocks
///
/// ```text
/// ( D₁   O₁  O₂ )
/// ( −O₁  D₂  O₃ )
/// ( −O₂ −O₃  D₃ )
/// ```
#[derive(Clone, Debug)]
pub struct CgtBlocks {
    /// Ordered with `a` outer, `b` inner.
    pub basis: Vec<SymTwoTensor>,
    pub matrix: DMatrix<f64>,
    pub d: [Matrix3<f64>; 3],
    pub o: [Matrix3<f64>; 3],
    pub lambda: [f64; 3],
    pub mu: [f64; 3],
    pub scalar: f64,
    /// Largest deviation of a `D` block from `diag(−(λ_a+μ_b) + S/12)`,
    /// off-diagonal entries included.
    pub d_defect: f64,
    /// Largest entry of `O + Oᵀ` over the three blocks.
    pub o_skew_defect: f64,
    /// Frobenius norm of `(O₁, O₂, O₃)`.
    pub o_norm: f64,
    /// Largest deviation of the basis from being symmetric, traceless and
    /// orthonormal.
    pub basis_defect: f64,
    pub symmetry_defect: f64,
}

pub fn cgt_basis(r: &AlgebraicCurvatureTensor, orientation: Orientation) -> Result<Vec<SymTwoTensor>> {
    let w = w_pm_eigen(r, orientation)?;
    Ok(product_basis(&w.plus_forms, &w.minus_forms).0)
}

fn product_basis(plus: &[TwoForm; 3], minus: &[TwoForm; 3]) -> (Vec<SymTwoTensor>, f64) {
    let mut basis = Vec::with_capacity(9);
    let mut defect: f64 = 0.0;
    for p in plus {
        for m in minus {
            let prod = p.matrix() * m.matrix();
            defect = defect.max((&prod - prod.transpose()).amax());
            basis.push(SymTwoTensor::new(prod).expect("4x4 product"));
        }
    }
    for (a, x) in basis.iter().enumerate() {
        defect = defect.max(x.trace().abs());
        for (b, y) in basis.iter().enumerate() {
            let t = if a == b { 1.0 } else { 0.0 };
            defect = defect.max((x.inner(y) - t).abs());
        }
    }
    (basis, defect)
}

pub fn cgt_blocks(r: &AlgebraicCurvatureTensor, orientation: Orientation) -> Result<CgtBlocks> {
    let w = w_pm_eigen(r, orientation)?;
    cgt_blocks_from(r, &w)
}

/// Builds the normal form from explicitly supplied eigenforms, so rotations
/// within degenerate eigenspaces can be exercised.
pub(crate) fn cgt_blocks_from(r: &AlgebraicCurvatureTensor, w: &WeylSpectra) -> Result<CgtBlocks> {
    let (basis, basis_defect) = product_basis(&w.plus_forms, &w.minus_forms);
    let matrix = r_ring_matrix(r, &basis)?;
    let symmetry_defect = (&matrix - matrix.transpose()).amax();
    let block = |a: usize, b: usize| Matrix3::from_fn(|i, j| matrix[(3 * a + i, 3 * b + j)]);
    let d = [block(0, 0), block(1, 1), block(2, 2)];
    let o = [block(0, 1), block(0, 2), block(1, 2)];
    let mut d_defect: f64 = 0.0;
    for (a, da) in d.iter().enumerate() {
        let predicted = Matrix3::from_diagonal(&nalgebra::Vector3::from_fn(|b, _| {
            -(w.lambda[a] + w.mu[b]) + w.scalar / 12.0
        }));
        d_defect = d_defect.max((da - predicted).amax());
    }
    let o_skew_defect = o.iter().fold(0.0f64, |m, x| m.max((x + x.transpose()).amax()));
    let o_norm = o.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt();
    Ok(CgtBlocks {
        basis,
        matrix,
        d,
        o,
        lambda: w.lambda,
        mu: w.mu,
        scalar: w.scalar,
        d_defect,
        o_skew_defect,
        o_norm,
        basis_defect,
        symmetry_defect,
    })
}

/// Frobenius norm of the traceless Ricci tensor.
pub fn einstein_defect(r: &AlgebraicCurvatureTensor) -> f64 {
    r.traceless_ricci().norm()
}

/// `‖Ric₀‖ ≤ tol · ‖R‖` with `‖R‖` the Frobenius norm of the components.
pub fn is_einstein(r: &AlgebraicCurvatureTensor, tol: f64) -> bool {
    einstein_defect(r) <= tol * r.frobenius_norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Cp2Type,
    Flat,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Cp2Type => "cp2-type",
            Verdict::Flat => "flat",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// The algebraic conclusions available for a Kähler surface tensor: Einstein,
/// `W⁻ = 0`, and the sign of `S`.
#[derive(Clone, Debug)]
pub struct RigidityCertificate {
    pub einstein_defect: f64,
    /// Frobenius norm of `W⁻` on Λ⁻.
    pub w_minus_norm: f64,
    pub scalar: f64,
    pub tol: f64,
    /// Einstein and `W⁻ = 0` within tolerance, i.e. constant holomorphic
    /// sectional curvature (of either sign).
    pub constant_holomorphic: bool,
    pub verdict: Verdict,
}

/// Orientation follows the Kähler form, so that `ω ∈ Λ⁺`. Defects are
/// compared against `tol · ‖R‖∞`; `‖R‖∞ ≤ tol` counts as flat.
pub fn rigidity_certificate(k: &KahlerStructure, tol: f64) -> Result<RigidityCertificate> {
    let r = k.tensor();
    require_four(r)?;
    let orientation = kahler_orientation(k);
    let blocks = r_hat_blocks(r, orientation)?;
    let scalar = r.scalar_curv();
    let w_minus = blocks.a_minus - Matrix3::identity() * (scalar / 12.0);
    let w_minus_norm = w_minus.norm();
    let ein = einstein_defect(r);
    let scale = r.sup_norm();
    let constant_holomorphic = ein <= tol * scale && w_minus_norm <= tol * scale;
    let verdict = if scale <= tol {
        Verdict::Flat
    } else if constant_holomorphic && scalar > tol * scale {
        Verdict::Cp2Type
    } else {
        Verdict::Inconclusive
    };
    Ok(RigidityCertificate {
        einstein_defect: ein,
        w_minus_norm,
        scalar,
        tol,
        constant_holomorphic,
        verdict,
    })
}

/// The orientation in which the Kähler form is self-dual.
pub fn kahler_orientation(k: &KahlerStructure) -> Orientation {
    let omega = k.complex_structure().kahler_form().coords();
    let star = hodge_star_matrix(Orientation::Standard);
    if omega.dot(&(star * &omega)) >= 0.0 {
        Orientation::Standard
    } else {
        Orientation::Reversed
    }
}
