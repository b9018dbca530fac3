//! Dense complex linear algebra.
//!
//! Everything in the simulator is carried by [`ComplexMatrix`]: kets are
//! single-column matrices, operators and density matrices are square. The
//! matrices that occur here are at most a few hundred rows, so the routines
//! favour accuracy and determinism over asymptotic speed.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest number of entries a matrix produced by [`kron`] may hold.
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 20;

/// Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-9;

const JACOBI_THRESHOLD: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |m - m^H| = {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("result would have {entries} entries, above the cap of {cap}")]
    DimensionOverflow { entries: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadSubsystemIndex { index: usize, count: usize },
    #[error("matrix has non-finite entries or empty shape")]
    InvalidEntries,
}

/// Dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::InvalidEntries);
        }
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::InvalidEntries);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Matrix from nested rows of real numbers. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |i, j| {
            assert_eq!(rows[i].len(), cols, "ragged rows");
            C64::new(rows[i][j], 0.0)
        })
    }

    /// Column vector (ket).
    pub fn column(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), 1, |i, _| entries[i])
    }

    /// Projector `|v><v|` for a column vector `v`.
    pub fn projector(ket: &Self) -> Self {
        assert_eq!(ket.cols, 1, "projector needs a column vector");
        Self::from_fn(ket.rows, ket.rows, |i, j| ket.data[i] * ket.data[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|self - self^H|`; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Maximum entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `<a|b>` for two column vectors.
    pub fn inner(&self, other: &Self) -> C64 {
        assert!(self.cols == 1 && other.cols == 1 && self.rows == other.rows);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `<v|A|v>` for a column vector `v`.
    pub fn expectation(&self, ket: &Self) -> C64 {
        ket.inner(&(self * ket))
    }

    /// Copy of the square sub-matrix on the given index set.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), indices.len(), |i, j| {
            self[(indices[i], indices[j])]
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs)
            .expect("matrix product dimension mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in non-decreasing order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, j: usize) -> ComplexMatrix {
        ComplexMatrix::column(&self.vectors.col(j))
    }

    /// `V diag(f(values)) V^H`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&v| f(v)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| C64::new(x, 0.0))
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.
///
/// Eigenvalues come back non-decreasing. Each eigenvector is rescaled so its
/// largest-modulus component (first one on ties) is real and positive, which
/// makes the output reproducible bit for bit.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asymmetry = m.hermitian_defect();
    if asymmetry >= HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { asymmetry });
    }
    let n = m.rows();
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_THRESHOLD * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.col(src);
        let phase = gauge_phase(&col);
        for i in 0..n {
            vectors[(i, dst)] = col[i] * phase;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Unit phase that makes the dominant component of `col` real-positive.
fn gauge_phase(col: &[C64]) -> C64 {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = col
        .iter()
        .find(|z| z.norm() >= max - 1e-12)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    if pivot.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        pivot.conj() / pivot.norm()
    }
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that are below rounding of both diagonal entries.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let zeta = (aqq - app) / (2.0 * mag);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Rotation G restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Kronecker product with the default entry cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    kron_capped(a, b, DEFAULT_MAX_ENTRIES)
}

pub fn kron_capped(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cap: usize,
) -> Result<ComplexMatrix, LinalgError> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let entries = rows.zip(cols).and_then(|(r, c)| r.checked_mul(c));
    let (rows, cols) = match entries {
        Some(e) if e <= cap => (rows.unwrap(), cols.unwrap()),
        _ => {
            return Err(LinalgError::DimensionOverflow {
                entries: entries.unwrap_or(usize::MAX),
                cap,
            })
        }
    };
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / b.rows(), j / b.cols())] * b[(i % b.rows(), j % b.cols())]
    }))
}

/// Kronecker product of a non-empty list of factors.
pub fn kron_all(factors: &[ComplexMatrix]) -> Result<ComplexMatrix, LinalgError> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| LinalgError::DimensionMismatch("empty Kronecker product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| kron(&acc, f))
}

/// Reduced state of subsystem `keep` for a state on `dims[0] ⊗ dims[1] ⊗ …`.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: &[usize],
    keep: usize,
) -> Result<ComplexMatrix, LinalgError> {
    if keep >= dims.len() {
        return Err(LinalgError::BadSubsystemIndex {
            index: keep,
            count: dims.len(),
        });
    }
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.rows() != total {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} matrix for subsystem dimensions {dims:?}",
            rho.rows(),
            rho.cols()
        )));
    }
    let d = dims[keep];
    let outer: usize = dims[..keep].iter().product();
    let inner: usize = dims[keep + 1..].iter().product();
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut s = C64::new(0.0, 0.0);
            for o in 0..outer {
                for r in 0..inner {
                    let row = (o * d + i) * inner + r;
                    let col = (o * d + j) * inner + r;
                    s += rho[(row, col)];
                }
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Reduced state over a group of leading subsystems `dims[..split]`, tracing
/// out everything after them.
pub fn partial_trace_tail(
    rho: &ComplexMatrix,
    dims: &[usize],
    split: usize,
) -> Result<ComplexMatrix, LinalgError> {
    if split == 0 || split > dims.len() {
        return Err(LinalgError::BadSubsystemIndex {
            index: split,
            count: dims.len(),
        });
    }
    let head: usize = dims[..split].iter().product();
    let tail: usize = dims[split..].iter().product();
    partial_trace(rho, &[head, tail], 0)
}

/// `exp(-i t h)` for Hermitian `h`, by spectral decomposition.
pub fn exp_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, LinalgError> {
    let eig = eig_hermitian(h)?;
    Ok(eig.map_spectrum(|e| C64::from_polar(1.0, -e * t)))
}
