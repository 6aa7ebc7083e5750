//! Dense vectors and matrices, Cholesky factorization, and the cached
//! factor behind the ADMM x-update.
//!
//! Matrices are stored row-major. Every reduction runs in a fixed sequential
//! order so repeated computations are bitwise reproducible.

use std::ops::{Deref, Index};

use crate::error::{Error, Result};

/// A real vector whose entries are all finite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vector entries"));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    /// Caller guarantees finiteness; used on results of arithmetic over
    /// already-validated inputs.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.0)
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for DenseVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Dense row-major `rows × cols` matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        check_len(rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len(cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix must be at least 1x1");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// `A·x`.
    pub fn matvec(&self, x: &[f64]) -> Result<DenseVector> {
        check_len(self.cols, x.len())?;
        let out = (0..self.rows).map(|i| dot(self.row(i), x)).collect();
        Ok(DenseVector::from_vec_unchecked(out))
    }

    /// `Aᵀ·y`.
    pub fn t_matvec(&self, y: &[f64]) -> Result<DenseVector> {
        check_len(self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += yi * a;
            }
        }
        Ok(DenseVector::from_vec_unchecked(out))
    }

    /// `A·B`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len(self.cols, other.rows)?;
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `AᵀA + shift·I` (`cols × cols`).
    pub fn gram_cols(&self, shift: f64) -> DenseMatrix {
        let p = self.cols;
        let mut g = DenseMatrix::zeros(p, p);
        for r in 0..self.rows {
            let row = self.row(r);
            for (i, &ri) in row.iter().enumerate() {
                if ri == 0.0 {
                    continue;
                }
                let dst = &mut g.data[i * p + i..(i + 1) * p];
                for (d, &rj) in dst.iter_mut().zip(&row[i..]) {
                    *d += ri * rj;
                }
            }
        }
        for i in 0..p {
            g.data[i * p + i] += shift;
            for j in 0..i {
                g.data[i * p + j] = g.data[j * p + i];
            }
        }
        g
    }

    /// `AAᵀ + shift·I` (`rows × rows`).
    pub fn gram_rows(&self, shift: f64) -> DenseMatrix {
        let n = self.rows;
        let mut g = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                g.data[i * n + j] = v;
                g.data[j * n + i] = v;
            }
            g.data[i * n + i] += shift;
        }
        g
    }

    /// Euclidean norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, a) in sq.iter_mut().zip(self.row(i)) {
                *s += a * a;
            }
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Divide column `j` by `scale[j]`.
    pub fn scale_columns(&mut self, scale: &[f64]) -> Result<()> {
        check_len(self.cols, scale.len())?;
        for i in 0..self.rows {
            for (a, s) in self.row_mut(i).iter_mut().zip(scale) {
                *a /= s;
            }
        }
        Ok(())
    }

    pub fn select_rows(&self, indices: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    lower: DenseMatrix,
}

impl CholeskyFactor {
    pub fn lower(&self) -> &DenseMatrix {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.rows
    }

    /// Solve `L·Lᵀ·x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<DenseVector> {
        let n = self.dim();
        check_len(n, rhs.len())?;
        let l = &self.lower;
        let mut x = rhs.to_vec();
        // L·y = rhs
        for i in 0..n {
            let row = l.row(i);
            let s = dot(&row[..i], &x[..i]);
            x[i] = (x[i] - s) / row[i];
        }
        // Lᵀ·x = y, eliminating one column of Lᵀ (a row of L) at a time.
        for i in (0..n).rev() {
            let row = l.row(i);
            x[i] /= row[i];
            let xi = x[i];
            for (xk, lik) in x[..i].iter_mut().zip(&row[..i]) {
                *xk -= lik * xi;
            }
        }
        Ok(DenseVector::from_vec_unchecked(x))
    }
}

const SYMMETRY_TOL: f64 = 1e-10;

/// Cholesky–Banachiewicz factorization of a symmetric positive-definite matrix.
pub fn cholesky(m: &DenseMatrix) -> Result<CholeskyFactor> {
    let n = m.rows;
    check_len(n, m.cols)?;
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric {
            asymmetry: asym / scale,
        });
    }

    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let s = dot(&l.row(i)[..j], &l.row(j)[..j]);
            if i == j {
                let pivot = m[(i, i)] - s;
                if !(pivot > 0.0) || !pivot.is_finite() {
                    return Err(Error::NotPositiveDefinite { row: i, pivot });
                }
                l.data[i * n + i] = pivot.sqrt();
            } else {
                l.data[i * n + j] = (m[(i, j)] - s) / l.data[j * n + j];
            }
        }
    }
    Ok(CholeskyFactor { lower: l })
}

/// Which system the cached factor represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorMode {
    /// Factor of the `p × p` matrix `AᵀA + ρI`.
    Direct,
    /// Factor of the `n × n` matrix `AAᵀ + ρI`, applied through the matrix
    /// inversion lemma.
    InversionLemma,
}

/// Cached factorization of `AᵀA + ρI` for a fixed design matrix and `ρ`,
/// together with `Aᵀb`.
#[derive(Debug, Clone)]
pub struct RidgeSystemFactor<'a> {
    a: &'a DenseMatrix,
    rho: f64,
    mode: FactorMode,
    chol: CholeskyFactor,
    atb: DenseVector,
}

/// Build the factor, choosing [`FactorMode::Direct`] when `p ≤ n` and
/// [`FactorMode::InversionLemma`] otherwise.
pub fn build_ridge_factor<'a>(
    a: &'a DenseMatrix,
    b: &[f64],
    rho: f64,
) -> Result<RidgeSystemFactor<'a>> {
    let mode = if a.cols <= a.rows {
        FactorMode::Direct
    } else {
        FactorMode::InversionLemma
    };
    build_ridge_factor_with_mode(a, b, rho, mode)
}

pub fn build_ridge_factor_with_mode<'a>(
    a: &'a DenseMatrix,
    b: &[f64],
    rho: f64,
    mode: FactorMode,
) -> Result<RidgeSystemFactor<'a>> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    check_len(a.rows, b.len())?;
    if let Some(j) = a.column_norms().iter().position(|&c| c == 0.0) {
        return Err(Error::ZeroColumn(j));
    }
    let gram = match mode {
        FactorMode::Direct => a.gram_cols(rho),
        FactorMode::InversionLemma => a.gram_rows(rho),
    };
    let chol = cholesky(&gram)?;
    let atb = a.t_matvec(b)?;
    Ok(RidgeSystemFactor {
        a,
        rho,
        mode,
        chol,
        atb,
    })
}

impl RidgeSystemFactor<'_> {
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mode(&self) -> FactorMode {
        self.mode
    }

    pub fn cholesky(&self) -> &CholeskyFactor {
        &self.chol
    }

    pub fn atb(&self) -> &DenseVector {
        &self.atb
    }

    pub fn design(&self) -> &DenseMatrix {
        self.a
    }

    /// Solve `(AᵀA + ρI)·w = rhs`.
    ///
    /// In inversion-lemma mode, `w = (rhs − Aᵀ(AAᵀ + ρI)⁻¹A·rhs) / ρ`.
    pub fn solve(&self, rhs: &[f64]) -> Result<DenseVector> {
        check_len(self.a.cols, rhs.len())?;
        match self.mode {
            FactorMode::Direct => self.chol.solve(rhs),
            FactorMode::InversionLemma => {
                let a_rhs = self.a.matvec(rhs)?;
                let t = self.chol.solve(&a_rhs)?;
                let at_t = self.a.t_matvec(&t)?;
                let w = rhs
                    .iter()
                    .zip(at_t.iter())
                    .map(|(r, c)| (r - c) / self.rho)
                    .collect();
                Ok(DenseVector::from_vec_unchecked(w))
            }
        }
    }
}

/// Free-function form of [`RidgeSystemFactor::solve`].
pub fn ridge_solve(f: &RidgeSystemFactor<'_>, rhs: &[f64]) -> Result<DenseVector> {
    f.solve(rhs)
}
