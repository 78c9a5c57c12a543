use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{CoskError, Result};

/// Element of S²(V): a symmetric n×n matrix with `<A,B> = tr(AᵀB)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTwoTensor {
    m: DMatrix<f64>,
}

/// Element of Λ²(V): a skew n×n matrix with `<A,B> = ½ tr(AᵀB)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    m: DMatrix<f64>,
}

fn ensure_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(CoskError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn ensure_same_len(u: &DVector<f64>, v: &DVector<f64>) -> Result<()> {
    if u.len() != v.len() {
        return Err(CoskError::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(())
}

impl SymTwoTensor {
    /// Takes the symmetric part of `m`. A matrix that is already symmetric is
    /// stored unchanged bit for bit.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        ensure_square(&m)?;
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self { m: sym })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    /// The metric g.
    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.m.dot(&other.m)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Projection π onto S²₀(V).
    pub fn traceless_part(&self) -> Self {
        let n = self.dim();
        let shift = self.trace() / n as f64;
        let mut m = self.m.clone();
        for i in 0..n {
            m[(i, i)] -= shift;
        }
        Self { m }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: &self.m * s }
    }

    /// Conjugation `QᵀAQ`; preserves inner products when `Q` is orthogonal.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Self {
        let m = q.transpose() * &self.m * q;
        Self {
            m: (&m + m.transpose()) * 0.5,
        }
    }
}

impl Add for &SymTwoTensor {
    type Output = SymTwoTensor;
    fn add(self, rhs: Self) -> SymTwoTensor {
        SymTwoTensor { m: &self.m + &rhs.m }
    }
}

impl Sub for &SymTwoTensor {
    type Output = SymTwoTensor;
    fn sub(self, rhs: Self) -> SymTwoTensor {
        SymTwoTensor { m: &self.m - &rhs.m }
    }
}

impl Mul<f64> for &SymTwoTensor {
    type Output = SymTwoTensor;
    fn mul(self, rhs: f64) -> SymTwoTensor {
        self.scale(rhs)
    }
}

impl TwoForm {
    /// Takes the skew part of `m`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        ensure_square(&m)?;
        let skew = (&m - m.transpose()) * 0.5;
        Ok(Self { m: skew })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn inner(&self, other: &Self) -> f64 {
        0.5 * self.m.dot(&other.m)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: &self.m * s }
    }

    /// Coordinates in [`basis_lambda2`] (the entries `ω_ij`, `i < j`, lexicographic).
    pub fn coords(&self) -> DVector<f64> {
        let n = self.dim();
        let pairs = index_pairs(n);
        DVector::from_iterator(pairs.len(), pairs.iter().map(|&(i, j)| self.m[(i, j)]))
    }

    pub fn from_coords(n: usize, coords: &[f64]) -> Result<Self> {
        let pairs = index_pairs(n);
        if coords.len() != pairs.len() {
            return Err(CoskError::DimensionMismatch {
                expected: pairs.len(),
                found: coords.len(),
            });
        }
        let mut m = DMatrix::zeros(n, n);
        for (&(i, j), &c) in pairs.iter().zip(coords) {
            m[(i, j)] = c;
            m[(j, i)] = -c;
        }
        Ok(Self { m })
    }
}

impl Add for &TwoForm {
    type Output = TwoForm;
    fn add(self, rhs: Self) -> TwoForm {
        TwoForm { m: &self.m + &rhs.m }
    }
}

/// `u ⊙ v = u⊗v + v⊗u`.
pub fn sym_product(u: &DVector<f64>, v: &DVector<f64>) -> Result<SymTwoTensor> {
    ensure_same_len(u, v)?;
    let outer = u * v.transpose();
    Ok(SymTwoTensor {
        m: &outer + outer.transpose(),
    })
}

/// `u ∧ v = u⊗v − v⊗u`.
pub fn wedge_product(u: &DVector<f64>, v: &DVector<f64>) -> Result<TwoForm> {
    ensure_same_len(u, v)?;
    let outer = u * v.transpose();
    Ok(TwoForm {
        m: &outer - outer.transpose(),
    })
}

/// Pairs `(i, j)` with `i < j` in lexicographic order; indexes Λ² coordinates.
pub fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

pub fn s20_dim(n: usize) -> usize {
    (n - 1) * (n + 2) / 2
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// Orthonormal basis of S²₀(V): the off-diagonal tensors `(1/√2) eᵢ⊙eⱼ`
/// (`i < j`, lexicographic), then `n − 1` diagonal tensors obtained by
/// Gram–Schmidt on `eᵢ⊙eᵢ − eᵢ₊₁⊙eᵢ₊₁`.
pub fn basis_s20(n: usize) -> Result<Vec<SymTwoTensor>> {
    if n < 2 {
        return Err(CoskError::UnsupportedDimension {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    let mut basis = Vec::with_capacity(s20_dim(n));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j) in index_pairs(n) {
        basis.push(sym_product(&unit(n, i), &unit(n, j))?.scale(r));
    }
    let mut diagonal: Vec<SymTwoTensor> = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let mut t = &sym_product(&unit(n, i), &unit(n, i))?
            - &sym_product(&unit(n, i + 1), &unit(n, i + 1))?;
        for q in &diagonal {
            t = &t - &(q * t.inner(q));
        }
        let norm = t.norm();
        diagonal.push(t.scale(1.0 / norm));
    }
    basis.extend(diagonal);
    Ok(basis)
}

/// Orthonormal basis of all of S²(V): `(1/√2) eᵢ⊙eⱼ` for `i < j` and `½ eᵢ⊙eᵢ`.
pub fn basis_s2(n: usize) -> Result<Vec<SymTwoTensor>> {
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j) in index_pairs(n) {
        basis.push(sym_product(&unit(n, i), &unit(n, j))?.scale(r));
    }
    for i in 0..n {
        basis.push(sym_product(&unit(n, i), &unit(n, i))?.scale(0.5));
    }
    Ok(basis)
}

/// Orthonormal basis `{eᵢ ∧ eⱼ}_{i<j}` of Λ²(V), lexicographic.
pub fn basis_lambda2(n: usize) -> Result<Vec<TwoForm>> {
    if n < 2 {
        return Err(CoskError::UnsupportedDimension {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    index_pairs(n)
        .into_iter()
        .map(|(i, j)| wedge_product(&unit(n, i), &unit(n, j)))
        .collect()
}
