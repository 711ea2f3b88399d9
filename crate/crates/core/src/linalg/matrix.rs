use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use super::c64;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<c64>,
}

/// Dense complex column vector. Bras are represented by the same type and
/// paired bilinearly through [`CVector::dot`].
#[derive(Clone, PartialEq)]
pub struct CVector {
    data: Vec<c64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![c64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> c64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<c64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length");
        Self { rows, cols, data }
    }

    pub fn diag(entries: &[c64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    /// 2x2 matrix from its entries in reading order.
    pub fn from_2x2(a: c64, b: c64, c: c64, d: c64) -> Self {
        Self::from_row_major(2, 2, vec![a, b, c, d])
    }

    pub fn scalar(n: usize, value: c64) -> Self {
        let mut m = Self::identity(n);
        m.scale_mut(value);
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[c64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: c64) -> Self {
        let mut out = self.clone();
        out.scale_mut(s);
        out
    }

    pub fn scale_mut(&mut self, s: c64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: c64, other: &CMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "axpy shape");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> c64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimension");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![c64::new(0.0, 0.0); n * p];
        for i in 0..n {
            let row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[k * p..(k + 1) * p];
                for (o, &b) in row.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        CMatrix {
            rows: n,
            cols: p,
            data: out,
        }
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension");
        let data = (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v.as_slice())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        CVector { data }
    }

    /// Row vector times matrix, `vᵀ M`, returned as a vector.
    pub fn vec_mul(&self, v: &CVector) -> CVector {
        assert_eq!(self.rows, v.dim(), "vector-matrix dimension");
        let mut data = vec![c64::new(0.0, 0.0); self.cols];
        for (i, &vi) in v.as_slice().iter().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, &m) in data.iter_mut().zip(row) {
                *o += vi * m;
            }
        }
        CVector { data }
    }

    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Copies the `nr x nc` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> CMatrix {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        CMatrix::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Splits an operator on `C^{d_aux} ⊗ V` into its `d_aux x d_aux` grid of
    /// operators on `V`, indexed `[row][col]`.
    pub fn aux_blocks(&self, d_aux: usize) -> Vec<Vec<CMatrix>> {
        assert!(self.is_square() && self.rows.is_multiple_of(d_aux), "aux block split");
        let d = self.rows / d_aux;
        (0..d_aux)
            .map(|a| (0..d_aux).map(|b| self.block(a * d, b * d, d, d)).collect())
            .collect()
    }

    /// Trace over the leading tensor factor of dimension `d_first`.
    pub fn partial_trace_first(&self, d_first: usize) -> CMatrix {
        assert!(self.is_square() && self.rows.is_multiple_of(d_first), "partial trace split");
        let d = self.rows / d_first;
        let mut out = CMatrix::zeros(d, d);
        for a in 0..d_first {
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += self[(a * d + i, a * d + j)];
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn row(&self, i: usize) -> CVector {
        CVector::from_vec(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn from_columns(cols: &[CVector]) -> CMatrix {
        let rows = cols.first().map_or(0, CVector::dim);
        CMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn from_rows(rows: &[CVector]) -> CMatrix {
        let cols = rows.first().map_or(0, CVector::dim);
        CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<c64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, c64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = c64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &c64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut c64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Mul<&CVector> for &CMatrix {
    type Output = CVector;
    fn mul(self, rhs: &CVector) -> CVector {
        self.mul_vec(rhs)
    }
}

impl Mul<c64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: c64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out.axpy(c64::new(1.0, 0.0), rhs);
        out
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        self.axpy(c64::new(1.0, 0.0), rhs);
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out.axpy(c64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(c64::new(-1.0, 0.0))
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![c64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_vec(data: Vec<c64>) -> Self {
        Self { data }
    }

    /// Unit vector `e_i` of dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[i] = c64::new(1.0, 0.0);
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[c64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<c64> {
        self.data
    }

    /// Bilinear pairing `Σ aᵢ bᵢ` (no conjugation).
    pub fn dot(&self, other: &CVector) -> c64 {
        assert_eq!(self.dim(), other.dim(), "dot dimension");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Hermitian inner product `Σ conj(aᵢ) bᵢ`.
    pub fn inner(&self, other: &CVector) -> c64 {
        assert_eq!(self.dim(), other.dim(), "inner dimension");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: c64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn normalized(&self) -> Self {
        self.scale(c64::new(1.0 / self.norm(), 0.0))
    }

    pub fn axpy(&mut self, s: c64, other: &CVector) {
        assert_eq!(self.dim(), other.dim(), "axpy dimension");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &CVector) -> CVector {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        CVector { data }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for CVector {
    type Output = c64;
    #[inline]
    fn index(&self, i: usize) -> &c64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut c64 {
        &mut self.data[i]
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        let mut out = self.clone();
        out.axpy(c64::new(-1.0, 0.0), rhs);
        out
    }
}

impl fmt::Debug for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}
