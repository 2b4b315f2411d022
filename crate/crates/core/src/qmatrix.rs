//! Dense quaternion matrices and the complex adjoint embedding.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{dim, Error, Result};
use crate::qcore::{Eta, Quaternion};

/// Row-major dense quaternion matrix. Zero-sized shapes are ordinary values.
///
/// Serializes as `{rows, cols, entries}` with `entries` a nested row list of `[w, x, y, z]`.
#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc", into = "MatrixDoc")]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Quaternion>>,
}

impl From<QMatrix> for MatrixDoc {
    fn from(m: QMatrix) -> Self {
        let entries = (0..m.rows).map(|r| m.row(r).to_vec()).collect();
        MatrixDoc { rows: m.rows, cols: m.cols, entries }
    }
}

impl TryFrom<MatrixDoc> for QMatrix {
    type Error = String;

    fn try_from(d: MatrixDoc) -> std::result::Result<Self, String> {
        if d.entries.len() != d.rows {
            return Err(format!("declared {} rows but found {}", d.rows, d.entries.len()));
        }
        if let Some((i, r)) = d.entries.iter().enumerate().find(|(_, r)| r.len() != d.cols) {
            return Err(format!("row {i} has {} entries, expected {}", r.len(), d.cols));
        }
        Ok(QMatrix { rows: d.rows, cols: d.cols, data: d.entries.into_iter().flatten().collect() })
    }
}

/// Row-major dense complex matrix, the host of the adjoint embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Quaternion::ONE } else { Quaternion::ZERO })
    }

    /// `q · I_n`.
    pub fn scalar_identity(n: usize, q: Quaternion) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { q } else { Quaternion::ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMatrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[Quaternion]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(QMatrix { rows: rows.len(), cols, data })
    }

    /// Builds a matrix from four real component arrays of equal shape.
    pub fn from_components(w: &[&[f64]], x: &[&[f64]], y: &[&[f64]], z: &[&[f64]]) -> Result<Self> {
        let rows = w.len();
        let cols = w.first().map_or(0, |r| r.len());
        let comps = [w, x, y, z];
        if comps.iter().any(|m| m.len() != rows || m.iter().any(|r| r.len() != cols)) {
            return Err(Error::Shape("component arrays differ in shape".into()));
        }
        Ok(Self::from_fn(rows, cols, |r, c| Quaternion::new(w[r][c], x[r][c], y[r][c], z[r][c])))
    }

    /// Entries with independent standard-normal components.
    pub fn random<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        Self::from_fn(rows, cols, |_, _| {
            let mut c = || -> f64 { StandardNormal.sample(rng) };
            Quaternion::new(c(), c(), c(), c())
        })
    }

    /// A 1×1 matrix.
    pub fn scalar(q: Quaternion) -> Self {
        QMatrix { rows: 1, cols: 1, data: vec![q] }
    }

    /// A column vector.
    pub fn column(entries: &[Quaternion]) -> Self {
        QMatrix { rows: entries.len(), cols: 1, data: entries.to_vec() }
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

    /// True when either dimension is zero.
    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        self.data[r * self.cols + c] = q;
    }

    pub fn row(&self, r: usize) -> &[Quaternion] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&q| f(q)).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// `A*`: transpose with entrywise conjugation.
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    /// `A^{η*} = −η A* η`: transpose with entrywise η-conjugation.
    pub fn eta_conj_transpose(&self, eta: Eta) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).eta_conj(eta))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q * s)
    }

    /// `q · A`.
    pub fn left_scalar(&self, q: Quaternion) -> Self {
        self.map(|a| q * a)
    }

    /// `A · q`.
    pub fn right_scalar(&self, q: Quaternion) -> Self {
        self.map(|a| a * q)
    }

    pub fn try_mul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.cols != rhs.rows {
            return Err(dim("mat_mul", self.shape(), rhs.shape()));
        }
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut data = vec![Quaternion::ZERO; m * n];
        for r in 0..m {
            let out = &mut data[r * n..(r + 1) * n];
            for t in 0..k {
                let a = self.data[r * k + t];
                if a == Quaternion::ZERO {
                    continue;
                }
                let brow = &rhs.data[t * n..(t + 1) * n];
                for (o, &b) in out.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(QMatrix { rows: m, cols: n, data })
    }

    pub fn try_add(&self, rhs: &QMatrix) -> Result<QMatrix> {
        self.zip_with(rhs, "mat_add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &QMatrix) -> Result<QMatrix> {
        self.zip_with(rhs, "mat_sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &QMatrix,
        op: &'static str,
        f: impl Fn(Quaternion, Quaternion) -> Quaternion,
    ) -> Result<QMatrix> {
        if self.shape() != rhs.shape() {
            return Err(dim(op, self.shape(), rhs.shape()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(QMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Copies out the `rows × cols` block starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<QMatrix> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::Shape(format!(
                "block {rows}x{cols} at ({r0},{c0}) exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(Self::from_fn(rows, cols, |r, c| self.get(r0 + r, c0 + c)))
    }

    /// Horizontal concatenation; all parts must share the row count.
    pub fn hstack(parts: &[&QMatrix]) -> Result<QMatrix> {
        let rows = parts.first().map_or(0, |p| p.rows);
        if let Some(bad) = parts.iter().find(|p| p.rows != rows) {
            return Err(dim("hstack", (rows, 0), bad.shape()));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for p in parts {
                data.extend_from_slice(p.row(r));
            }
        }
        Ok(QMatrix { rows, cols, data })
    }

    /// Vertical concatenation; all parts must share the column count.
    pub fn vstack(parts: &[&QMatrix]) -> Result<QMatrix> {
        let cols = parts.first().map_or(0, |p| p.cols);
        if let Some(bad) = parts.iter().find(|p| p.cols != cols) {
            return Err(dim("vstack", (0, cols), bad.shape()));
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for p in parts {
            data.extend_from_slice(&p.data);
        }
        Ok(QMatrix { rows, cols, data })
    }

    /// Assembles a block grid. `None` cells are zero blocks sized by their row and column
    /// neighbours; every block row and block column needs at least one `Some` cell.
    pub fn block(grid: &[Vec<Option<&QMatrix>>]) -> Result<QMatrix> {
        let nr = grid.len();
        let nc = grid.first().map_or(0, |r| r.len());
        if grid.iter().any(|r| r.len() != nc) {
            return Err(Error::Shape("ragged block grid".into()));
        }
        let mut heights = vec![None; nr];
        let mut widths = vec![None; nc];
        for (a, row) in grid.iter().enumerate() {
            for (b, cell) in row.iter().enumerate() {
                if let Some(m) = cell {
                    for (slot, val, what) in [(&mut heights[a], m.rows, "height"), (&mut widths[b], m.cols, "width")] {
                        match slot {
                            Some(v) if *v != val => {
                                return Err(Error::Shape(format!(
                                    "block ({a},{b}) has {what} {val}, neighbours have {v}"
                                )))
                            }
                            _ => *slot = Some(val),
                        }
                    }
                }
            }
        }
        let heights: Vec<usize> = heights
            .into_iter()
            .enumerate()
            .map(|(a, h)| h.ok_or_else(|| Error::Shape(format!("block row {a} has no sized cell"))))
            .collect::<Result<_>>()?;
        let widths: Vec<usize> = widths
            .into_iter()
            .enumerate()
            .map(|(b, w)| w.ok_or_else(|| Error::Shape(format!("block column {b} has no sized cell"))))
            .collect::<Result<_>>()?;
        let rows: usize = heights.iter().sum();
        let cols: usize = widths.iter().sum();
        let mut out = QMatrix::zeros(rows, cols);
        let mut r0 = 0;
        for (a, row) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (b, cell) in row.iter().enumerate() {
                if let Some(m) = cell {
                    out.paste(r0, c0, m);
                }
                c0 += widths[b];
            }
            r0 += heights[a];
        }
        Ok(out)
    }

    fn paste(&mut self, r0: usize, c0: usize, m: &QMatrix) {
        for r in 0..m.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + m.cols].copy_from_slice(m.row(r));
        }
    }

    /// The `m × total` selector `(0, I_m, 0)` whose identity block starts at column `offset`.
    /// `(I_m, 0)` is `row_selector(m, 0, 2m)` and `(0, I_m)` is `row_selector(m, m, 2m)`.
    pub fn row_selector(m: usize, offset: usize, total: usize) -> Result<QMatrix> {
        if offset + m > total {
            return Err(Error::Shape(format!("selector I_{m} at {offset} exceeds width {total}")));
        }
        Ok(Self::from_fn(m, total, |r, c| if c == offset + r { Quaternion::ONE } else { Quaternion::ZERO }))
    }

    /// Transpose of [`QMatrix::row_selector`]: `(0; I_n; 0)` of height `total`.
    pub fn col_selector(n: usize, offset: usize, total: usize) -> Result<QMatrix> {
        Ok(Self::row_selector(n, offset, total)?.transpose())
    }

    /// The complex adjoint `[[A1, A2], [−conj(A2), conj(A1)]]` where `A = A1 + A2·j`.
    pub fn embed(&self) -> ComplexMatrix {
        let (m, n) = self.shape();
        let mut out = ComplexMatrix::zeros(2 * m, 2 * n);
        for r in 0..m {
            for c in 0..n {
                let (a, b) = self.get(r, c).parts();
                out.set(r, c, a);
                out.set(r, n + c, b);
                out.set(m + r, c, -b.conj());
                out.set(m + r, n + c, a.conj());
            }
        }
        out
    }

    /// Left inverse of [`QMatrix::embed`]. The input is first projected onto the adjoint
    /// structure; the projection defect must not exceed `tol · max(1, ‖M‖_F)`.
    pub fn unembed(mat: &ComplexMatrix, tol: f64) -> Result<QMatrix> {
        let (q, defect) = Self::unembed_projected(mat)?;
        let scale = mat.frobenius_norm().max(1.0);
        if defect > tol * scale {
            return Err(Error::NotAdjointImage { defect });
        }
        Ok(q)
    }

    /// Projects onto the adjoint structure and returns the quaternion matrix together with
    /// the Frobenius norm of the discarded part.
    pub fn unembed_projected(mat: &ComplexMatrix) -> Result<(QMatrix, f64)> {
        if !mat.rows.is_multiple_of(2) || !mat.cols.is_multiple_of(2) {
            return Err(Error::Shape(format!("{}x{} is not an adjoint shape", mat.rows, mat.cols)));
        }
        let (m, n) = (mat.rows / 2, mat.cols / 2);
        let mut defect = 0.0;
        let q = Self::from_fn(m, n, |r, c| {
            let p11 = mat.get(r, c);
            let p12 = mat.get(r, n + c);
            let p21 = mat.get(m + r, c);
            let p22 = mat.get(m + r, n + c);
            let a = (p11 + p22.conj()) * 0.5;
            let b = (p12 - p21.conj()) * 0.5;
            defect += 2.0 * ((p11 - a).norm_sqr() + (p12 - b).norm_sqr());
            Quaternion::from_parts(a, b)
        });
        Ok((q, defect.sqrt()))
    }

    /// Maximum componentwise distance; shapes must agree.
    pub fn max_diff(&self, other: &QMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).to_array().iter().fold(0.0f64, |m, c| m.max(c.abs())))
            .fold(0.0, f64::max)
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_dmatrix(m: &DMatrix<Complex64>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(m[(r, c)]);
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(dim("complex mul", (self.rows, self.cols), (rhs.rows, rhs.cols)));
        }
        Ok(Self::from_dmatrix(&(self.to_dmatrix() * rhs.to_dmatrix())))
    }
}

/// Builds a block matrix from a grid written with `0` for zero blocks:
/// `qblock![[a, 0], [c, d]]`. Cells are identifiers, `0`, or parenthesized expressions.
#[macro_export]
macro_rules! qblock {
    (@cell 0) => { None };
    (@cell $x:ident) => { Some(&$x) };
    (@cell ($e:expr)) => { Some(&$e) };
    ($([$($cell:tt),* $(,)?]),* $(,)?) => {
        $crate::qmatrix::QMatrix::block(&[$(vec![$($crate::qblock!(@cell $cell)),*]),*])
    };
}

macro_rules! binop {
    ($tr:ident, $f:ident, $checked:ident) => {
        impl $tr<&QMatrix> for &QMatrix {
            type Output = QMatrix;
            fn $f(self, rhs: &QMatrix) -> QMatrix {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QMatrix> for QMatrix {
            type Output = QMatrix;
            fn $f(self, rhs: QMatrix) -> QMatrix {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&QMatrix> for QMatrix {
            type Output = QMatrix;
            fn $f(self, rhs: &QMatrix) -> QMatrix {
                (&self).$f(rhs)
            }
        }
        impl $tr<QMatrix> for &QMatrix {
            type Output = QMatrix;
            fn $f(self, rhs: QMatrix) -> QMatrix {
                self.$f(&rhs)
            }
        }
    };
}

binop!(Mul, mul, try_mul);
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);

impl Mul<f64> for &QMatrix {
    type Output = QMatrix;
    fn mul(self, s: f64) -> QMatrix {
        self.scale(s)
    }
}

impl Mul<f64> for QMatrix {
    type Output = QMatrix;
    fn mul(self, s: f64) -> QMatrix {
        self.scale(s)
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.map(|q| -q)
    }
}

impl Neg for QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        -&self
    }
}

impl AddAssign<&QMatrix> for QMatrix {
    fn add_assign(&mut self, rhs: &QMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "mat_add shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&QMatrix> for QMatrix {
    fn sub_assign(&mut self, rhs: &QMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "mat_sub shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.data.chunks(self.cols.max(1)).take(self.rows)).finish()
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "[] ({}x{})", self.rows, self.cols);
        }
        let prec = f.precision().unwrap_or(4);
        let cells: Vec<String> = self.data.iter().map(|q| format!("{q:.prec$}")).collect();
        let width = cells.iter().map(|s| s.len()).max().unwrap_or(0);
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                let sep = if c + 1 < self.cols { ", " } else { "" };
                write!(f, "{:>width$}{sep}", cells[r * self.cols + c])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Free-function aliases matching the operation names used across the crate.
pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    a.try_mul(b)
}

pub fn conj_transpose(a: &QMatrix) -> QMatrix {
    a.conj_transpose()
}

pub fn eta_conj_transpose(a: &QMatrix, eta: Eta) -> QMatrix {
    a.eta_conj_transpose(eta)
}

pub fn embed(a: &QMatrix) -> ComplexMatrix {
    a.embed()
}

/// Round-trip tolerance used by [`unembed`]: `1e-10 · max(1, ‖M‖_F)`.
pub const UNEMBED_TOL: f64 = 1e-10;

pub fn unembed(m: &ComplexMatrix) -> Result<QMatrix> {
    QMatrix::unembed(m, UNEMBED_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn empty_products() {
        let a = QMatrix::zeros(3, 0);
        let b = QMatrix::zeros(0, 4);
        assert_eq!(&a * &b, QMatrix::zeros(3, 4));
        assert_eq!((&b * &QMatrix::zeros(4, 2)).shape(), (0, 2));
    }

    #[test]
    fn ij_is_k() {
        let i = QMatrix::scalar(Quaternion::I);
        let j = QMatrix::scalar(Quaternion::J);
        assert_eq!(&i * &j, QMatrix::scalar(Quaternion::K));
    }

    #[test]
    fn conj_transpose_row() {
        let a = QMatrix::from_rows(&[[Quaternion::I, Quaternion::J]]).unwrap();
        let expect = QMatrix::column(&[-Quaternion::I, -Quaternion::J]);
        assert_eq!(a.conj_transpose(), expect);
    }

    #[test]
    fn embed_examples() {
        let one = QMatrix::scalar(Quaternion::ONE).embed();
        assert_eq!(one.data, vec![1.0.into(), 0.0.into(), 0.0.into(), 1.0.into()]);
        let j = QMatrix::scalar(Quaternion::J).embed();
        assert_eq!(j.data, vec![0.0.into(), 1.0.into(), (-1.0).into(), 0.0.into()]);
    }

    #[test]
    fn unembed_rejects_broken_structure() {
        let m = ComplexMatrix { rows: 2, cols: 2, data: vec![0.0.into(), 0.0.into(), 1.0.into(), 0.0.into()] };
        assert!(matches!(unembed(&m), Err(Error::NotAdjointImage { .. })));
        let id = ComplexMatrix { rows: 2, cols: 2, data: vec![1.0.into(), 0.0.into(), 0.0.into(), 1.0.into()] };
        assert_eq!(unembed(&id).unwrap(), QMatrix::scalar(Quaternion::ONE));
    }

    #[test]
    fn block_infers_zero_sizes() {
        let a = QMatrix::from_rows(&[[q(1., 0., 0., 0.), q(0., 1., 0., 0.)]]).unwrap();
        let d = QMatrix::scalar(q(0., 0., 1., 0.));
        let m = qblock![[a, 0], [0, d]].unwrap();
        assert_eq!(m.shape(), (2, 3));
        assert_eq!(m.get(1, 2), Quaternion::J);
        assert_eq!(m.get(1, 0), Quaternion::ZERO);
        assert_eq!(m.submatrix(0, 0, 1, 2).unwrap(), a);
    }

    #[test]
    fn block_rejects_unsized_row() {
        let a = QMatrix::identity(2);
        assert!(qblock![[a], [0]].is_err());
    }

    #[test]
    fn selectors() {
        let s = QMatrix::row_selector(2, 2, 4).unwrap();
        assert_eq!(s.get(0, 2), Quaternion::ONE);
        assert_eq!(s.get(1, 3), Quaternion::ONE);
        assert_eq!(s.get(0, 0), Quaternion::ZERO);
        assert_eq!(QMatrix::col_selector(2, 0, 4).unwrap().shape(), (4, 2));
    }
}
