// Copyright 2026 The lugo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense complex linear algebra used by the circuit builders.
//!
//! Everything here works on small dense matrices (dimension at most a few
//! hundred), so plain row-major storage and textbook Jacobi methods are
//! used throughout. All routines are deterministic.

use std::fmt;
use std::ops::{Index, IndexMut, Mul, Range};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used when validating Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance used when validating unitary inputs.
pub const UNITARY_TOL: f64 = 1e-8;

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension(format!("{rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let cols = columns.len();
        let rows = columns[0].len();
        Self::from_fn(rows, cols, |r, c| columns[c][r])
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Copies the `rows x cols` sub-block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)];
            }
        }
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-entry distance to `other` after removing the best global phase.
    pub fn phase_insensitive_distance(&self, other: &Self) -> f64 {
        let overlap: Complex64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.scale(phase).max_abs_diff(other)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() <= tol
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        self.require_square()?;
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL * self.norm_max().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    pub(crate) fn require_unitary(&self, tol: f64) -> Result<()> {
        self.require_square()?;
        let deviation = self.unitary_deviation();
        if deviation > tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn real_vector(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    /// `V·diag(e^{iλt})·V†`.
    pub fn exponential(&self, t: f64) -> ComplexMatrix {
        let dim = self.values.len();
        let phases: Vec<Complex64> = self
            .values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, l * t))
            .collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = ZERO;
                for (j, p) in phases.iter().enumerate() {
                    acc += v[(r, j)] * p * v[(c, j)].conj();
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    pub fn min_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

fn require_power_of_two(n: usize) -> Result<()> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidDimension(format!(
            "{n} is not a power of two >= 2"
        )))
    }
}

/// Symmetric tridiagonal Toeplitz matrix with `diag` on the main diagonal
/// and `off` on the first sub- and super-diagonals.
pub fn toeplitz_tridiagonal(n: usize, diag: f64, off: f64) -> Result<ComplexMatrix> {
    require_power_of_two(n)?;
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(diag, 0.0)
        } else if r.abs_diff(c) == 1 {
            Complex64::new(off, 0.0)
        } else {
            ZERO
        }
    }))
}

/// Closed-form spectrum of [`toeplitz_tridiagonal`], ascending.
pub fn toeplitz_eigenvalues(n: usize, diag: f64, off: f64) -> Vec<f64> {
    let mut values: Vec<f64> = (1..=n)
        .map(|j| diag + 2.0 * off * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// A Hermitian system equivalent to `A x = b`.
#[derive(Debug, Clone)]
pub struct Dilation {
    pub matrix: ComplexMatrix,
    pub rhs: Vec<Complex64>,
    /// Entries of the Hermitian system's solution that hold `x`.
    pub solution: Range<usize>,
}

/// Returns `A` unchanged when it is Hermitian; otherwise the anti-block
/// dilation `[[0, A], [A†, 0]]` with right-hand side `[b; 0]`, whose
/// solution carries `x` in its lower half.
pub fn hermitian_dilation(a: &ComplexMatrix, b: &[Complex64]) -> Result<Dilation> {
    a.require_square()?;
    let n = a.rows();
    if b.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    if a.hermitian_deviation() <= HERMITIAN_TOL * a.norm_max().max(1.0) {
        return Ok(Dilation {
            matrix: a.clone(),
            rhs: b.to_vec(),
            solution: 0..n,
        });
    }
    let mut h = ComplexMatrix::zeros(2 * n, 2 * n);
    h.set_block(0, n, a);
    h.set_block(n, 0, &a.adjoint());
    let mut c = b.to_vec();
    c.resize(2 * n, ZERO);
    Ok(Dilation {
        matrix: h,
        rhs: c,
        solution: n..2 * n,
    })
}

/// Embeds a Hermitian system into the next power-of-two dimension. The new
/// diagonal entries are 1 so the padded matrix stays invertible.
pub fn pad_to_power_of_two(
    a: &ComplexMatrix,
    b: &[Complex64],
) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    a.require_hermitian()?;
    let n = a.rows();
    if b.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let target = n.next_power_of_two().max(2);
    if target == n {
        return Ok((a.clone(), b.to_vec()));
    }
    let mut padded = ComplexMatrix::identity(target);
    padded.set_block(0, 0, a);
    let mut rhs = b.to_vec();
    rhs.resize(target, ZERO);
    Ok((padded, rhs))
}

/// Applies the two-sided rotation `J = diag(1, ē)·[[c, s], [-s, c]]` to the
/// columns `p`, `q` of a column-major set of vectors.
fn rotate_columns(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64, e: Complex64) {
    let ec = e.conj();
    let (lo, hi) = cols.split_at_mut(q);
    let (wp, wq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in wp.iter_mut().zip(wq.iter_mut()) {
        let yq = ec * *y;
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

fn jacobi_angle(alpha: f64, beta: f64, g: f64) -> (f64, f64) {
    let tau = (beta - alpha) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

/// Makes the first non-negligible entry of `v` real and positive.
fn normalize_phase(v: &mut [Complex64]) {
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigendecomposition(h: &ComplexMatrix) -> Result<EigenSystem> {
    h.require_hermitian()?;
    let n = h.rows();
    // Column-major copy of the symmetrized input.
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|c| {
            (0..n)
                .map(|r| (h[(r, c)] + h[(c, r)].conj()) * 0.5)
                .collect()
        })
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { ONE } else { ZERO }).collect())
        .collect();
    let fro = h.norm_frobenius();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|c| (0..n).filter(move |&r| r != c).map(move |r| (r, c)))
            .map(|(r, c)| a[c][r].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * fro || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[q][p];
                let g = apq.norm();
                if g <= 1e-300 {
                    continue;
                }
                let e = apq / g;
                let (c, s) = jacobi_angle(a[p][p].re, a[q][q].re, g);
                // A <- A J
                rotate_columns(&mut a, p, q, c, s, e);
                // A <- J† A: rows p, q.
                for col in a.iter_mut() {
                    let (xp, xq) = (col[p], col[q]);
                    col[p] = xp * c - e * xq * s;
                    col[q] = xp * s + e * xq * c;
                }
                a[q][p] = ZERO;
                a[p][q] = ZERO;
                a[p][p] = Complex64::new(a[p][p].re, 0.0);
                a[q][q] = Complex64::new(a[q][q].re, 0.0);
                rotate_columns(&mut v, p, q, c, s, e);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].re.total_cmp(&a[j][j].re));
    let values = order.iter().map(|&i| a[i][i].re).collect();
    let columns: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&i| {
            let mut col = v[i].clone();
            normalize_phase(&mut col);
            col
        })
        .collect();
    Ok(EigenSystem {
        values,
        vectors: ComplexMatrix::from_columns(&columns),
    })
}

/// `e^{iHt}` through the Hermitian eigendecomposition.
pub fn unitary_exponential(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eigendecomposition(h)?.exponential(t))
}

/// `U^e` by repeated squaring.
pub fn unitary_power(u: &ComplexMatrix, exponent: u64) -> Result<ComplexMatrix> {
    u.require_unitary(UNITARY_TOL)?;
    let mut result = ComplexMatrix::identity(u.rows());
    let mut base = u.clone();
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = result.matmul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base);
        }
    }
    Ok(result)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn classical_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    a.require_square()?;
    let n = a.rows();
    if b.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let threshold = 1e-12 * a.norm_max().max(1.0);
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= threshold {
            return Err(Error::Singular { column: col, pivot });
        }
        if pivot_row != col {
            for c in 0..n {
                let tmp = m[(col, c)];
                m[(col, c)] = m[(pivot_row, c)];
                m[(pivot_row, c)] = tmp;
            }
            x.swap(col, pivot_row);
        }
        let d = m[(col, col)];
        for r in (col + 1)..n {
            let factor = m[(r, col)] / d;
            if factor == ZERO {
                continue;
            }
            for c in col..n {
                let v = m[(col, c)];
                m[(r, c)] -= factor * v;
            }
            let xc = x[col];
            x[r] -= factor * xc;
        }
    }
    for r in (0..n).rev() {
        let mut acc = x[r];
        for c in (r + 1)..n {
            acc -= m[(r, c)] * x[c];
        }
        x[r] = acc / m[(r, r)];
    }
    Ok(x)
}

/// Orthonormalizes `vectors` in the given priority order with two passes of
/// modified Gram-Schmidt. Vectors that vanish after projection are replaced
/// by the standard basis vector with the largest remaining component.
pub(crate) fn gram_schmidt(vectors: &[Vec<Complex64>], order: &[usize]) -> Vec<Vec<Complex64>> {
    let dim = vectors.first().map_or(0, Vec::len);
    let mut out: Vec<Option<Vec<Complex64>>> = vec![None; vectors.len()];
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for &i in order {
        let mut w = vectors[i].clone();
        let mut norm = vector_norm(&w);
        if norm > 1e-13 {
            project_out(&mut w, &basis);
            norm = vector_norm(&w);
        }
        if norm <= 1e-13 {
            w = completion_vector(dim, &basis);
            norm = vector_norm(&w);
        }
        for z in w.iter_mut() {
            *z /= norm;
        }
        basis.push(w.clone());
        out[i] = Some(w);
    }
    out.into_iter().map(|v| v.expect("every index ordered")).collect()
}

fn project_out(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let proj = inner_product(b, w);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
    }
}

fn completion_vector(dim: usize, basis: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for j in 0..dim {
        let mut e = vec![ZERO; dim];
        e[j] = ONE;
        project_out(&mut e, basis);
        let n = vector_norm(&e);
        if best.as_ref().is_none_or(|(bn, _)| n > *bn + 1e-12) {
            best = Some((n, e));
        }
    }
    best.expect("dimension is positive").1
}

/// Singular value decomposition `A = U·diag(σ)·V†` of a square matrix.
pub(crate) struct Svd {
    /// Unnormalized left vectors `A·v_j` (norm σ_j), as columns.
    pub left: Vec<Vec<Complex64>>,
    /// Right singular vectors as columns.
    pub right: Vec<Vec<Complex64>>,
}

/// One-sided (Hestenes) Jacobi SVD.
pub(crate) fn jacobi_svd(a: &ComplexMatrix) -> Svd {
    let n = a.cols();
    let mut w: Vec<Vec<Complex64>> = (0..n).map(|c| a.column(c)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { ONE } else { ZERO }).collect())
        .collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner_product(&w[p], &w[q]);
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g <= 1e-300 {
                    continue;
                }
                rotated = true;
                let e = gamma / g;
                let (c, s) = jacobi_angle(alpha, beta, g);
                rotate_columns(&mut w, p, q, c, s, e);
                rotate_columns(&mut v, p, q, c, s, e);
            }
        }
        if !rotated {
            break;
        }
    }
    Svd { left: w, right: v }
}

/// Eigendecomposition `X = V·diag(λ)·V†` of a unitary (normal) matrix.
///
/// The eigenvectors come from a fixed Hermitian combination of the real
/// and imaginary parts of `X`; near-degenerate clusters of that combination
/// are re-diagonalized with a different combination.
pub(crate) fn unitary_eigendecomposition(x: &ComplexMatrix) -> (ComplexMatrix, Vec<Complex64>) {
    let v = normal_eigenvectors(x, 0);
    let d = v.adjoint().matmul(x).matmul(&v);
    let values = (0..x.rows())
        .map(|i| {
            let z = d[(i, i)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                ONE
            }
        })
        .collect();
    (v, values)
}

fn normal_eigenvectors(x: &ComplexMatrix, depth: usize) -> ComplexMatrix {
    let n = x.rows();
    if n == 1 {
        return ComplexMatrix::identity(1);
    }
    let angle = 0.618_033_988_749_895 + 1.1 * depth as f64;
    let (ca, sa) = (angle.cos(), angle.sin());
    let xa = x.adjoint();
    let mix = ComplexMatrix::from_fn(n, n, |r, c| {
        let re = (x[(r, c)] + xa[(r, c)]) * 0.5;
        let im = (x[(r, c)] - xa[(r, c)]) * Complex64::new(0.0, -0.5);
        re * ca + im * sa
    });
    let eig = hermitian_eigendecomposition(&mix).expect("mix is Hermitian by construction");
    let mut v = eig.vectors;
    if depth >= 3 {
        return v;
    }
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] < 1e-6 {
            end += 1;
        }
        if end - start > 1 {
            let cluster: Vec<Vec<Complex64>> = (start..end).map(|c| v.column(c)).collect();
            let basis = ComplexMatrix::from_columns(&cluster);
            let restricted = basis.adjoint().matmul(x).matmul(&basis);
            let mean = (0..restricted.rows()).map(|i| restricted[(i, i)]).sum::<Complex64>()
                / restricted.rows() as f64;
            let spread = restricted
                .sub(&ComplexMatrix::identity(restricted.rows()).scale(mean))
                .norm_max();
            if spread > 1e-13 {
                let inner = normal_eigenvectors(&restricted, depth + 1);
                let rotated = basis.matmul(&inner);
                v.set_block(0, start, &rotated);
            }
        }
        start = end;
    }
    v
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian
/// matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    let order: Vec<usize> = (0..dim).collect();
    ComplexMatrix::from_columns(&gram_schmidt(&cols, &order))
}

/// Random Hermitian matrix `(G + G†)/2` with Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn toeplitz_definition_and_spectrum() {
        let m = toeplitz_tridiagonal(2, 2.0, -1.0).unwrap();
        assert_eq!(m, ComplexMatrix::from_real(2, 2, &[2.0, -1.0, -1.0, 2.0]).unwrap());
        let eig = hermitian_eigendecomposition(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 3.0).abs() < 1e-12);

        for n in [4, 8, 16, 32] {
            let m = toeplitz_tridiagonal(n, 2.0, -1.0).unwrap();
            let eig = hermitian_eigendecomposition(&m).unwrap();
            let closed = toeplitz_eigenvalues(n, 2.0, -1.0);
            for (a, b) in eig.values.iter().zip(&closed) {
                assert!((a - b).abs() < 1e-9, "n={n}: {a} vs {b}");
            }
            assert!(eig.values.iter().all(|&v| v > 0.0));
        }
        assert!(matches!(
            toeplitz_tridiagonal(3, 2.0, -1.0),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn dilation_examples() {
        let a = ComplexMatrix::from_real(2, 2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
        let d = hermitian_dilation(&a, &real_vector(&[1.0, 0.0])).unwrap();
        assert_eq!(d.matrix, a);
        assert_eq!(d.solution, 0..2);

        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let d = hermitian_dilation(&a, &real_vector(&[1.0, 0.0])).unwrap();
        let mut expected = vec![0.0; 16];
        expected[3] = 1.0;
        expected[12] = 1.0;
        assert_eq!(d.matrix, ComplexMatrix::from_real(4, 4, &expected).unwrap());
        assert_eq!(d.rhs, real_vector(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(d.solution, 2..4);
        assert!(d.matrix.is_hermitian(1e-12));

        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_dilation(&rect, &[ZERO, ZERO]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            hermitian_dilation(&a, &[ZERO]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn padding_examples() {
        let a = toeplitz_tridiagonal(4, 2.0, -1.0).unwrap();
        let b = real_vector(&[1.0, 2.0, 3.0, 4.0]);
        let (pa, pb) = pad_to_power_of_two(&a, &b).unwrap();
        assert_eq!(pa, a);
        assert_eq!(pb, b);

        let a3 = ComplexMatrix::from_real(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0])
            .unwrap();
        let (pa, pb) = pad_to_power_of_two(&a3, &real_vector(&[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(pa.rows(), 4);
        assert_eq!(pa[(3, 3)], ONE);
        assert_eq!(pa[(0, 3)], ZERO);
        assert_eq!(pa.block(0, 0, 3, 3), a3);
        assert_eq!(pb[3], ZERO);

        let big = ComplexMatrix::identity(36);
        let (pa, pb) = pad_to_power_of_two(&big, &vec![ONE; 36]).unwrap();
        assert_eq!((pa.rows(), pb.len()), (64, 64));

        let nh = ComplexMatrix::from_real(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
            .unwrap();
        assert!(matches!(
            pad_to_power_of_two(&nh, &[ZERO; 3]),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigendecomposition_examples() {
        let d = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 3.0]).unwrap();
        let eig = hermitian_eigendecomposition(&d).unwrap();
        assert_eq!(eig.values, vec![1.0, 3.0]);
        assert!(eig.vectors.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(8, &mut rng);
        let eig = hermitian_eigendecomposition(&h).unwrap();
        let scale = h.norm_inf();
        for (j, &l) in eig.values.iter().enumerate() {
            let v = eig.vectors.column(j);
            let hv = h.mul_vec(&v);
            let res = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * l).norm())
                .fold(0.0, f64::max);
            assert!(res <= 1e-9 * scale, "residual {res}");
        }
        assert!(eig.vectors.is_unitary(1e-9));
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));

        assert!(matches!(
            hermitian_eigendecomposition(&pauli_x().matmul(&ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap())),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn exponential_examples() {
        let h = toeplitz_tridiagonal(4, 2.0, -1.0).unwrap();
        assert!(unitary_exponential(&h, 0.0)
            .unwrap()
            .max_abs_diff(&ComplexMatrix::identity(4))
            < 1e-14);

        let d = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 3.0]).unwrap();
        let u = unitary_exponential(&d, PI / 4.0).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[
            Complex64::from_polar(1.0, PI / 4.0),
            Complex64::from_polar(1.0, 3.0 * PI / 4.0),
        ]);
        assert!(u.max_abs_diff(&expected) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(6, &mut rng);
        let t = 0.37;
        let u = unitary_exponential(&h, t).unwrap();
        assert!(u.is_unitary(1e-9));
        let u2 = unitary_exponential(&h, 2.0 * t).unwrap();
        assert!(unitary_power(&u, 2).unwrap().max_abs_diff(&u2) < 1e-9);
    }

    #[test]
    fn power_examples() {
        let x = pauli_x();
        assert!(unitary_power(&x, 2).unwrap().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(4, &mut rng);
        assert_eq!(unitary_power(&u, 0).unwrap(), ComplexMatrix::identity(4));
        let mut naive = ComplexMatrix::identity(4);
        for _ in 0..8 {
            naive = naive.matmul(&u);
        }
        let squared = u.matmul(&u);
        let squared = squared.matmul(&squared);
        let squared = squared.matmul(&squared);
        let fast = unitary_power(&u, 8).unwrap();
        assert!(fast.max_abs_diff(&naive) < 1e-10);
        assert!(fast.max_abs_diff(&squared) < 1e-12);
        assert!(unitary_power(&u, 1 << 12).unwrap().is_unitary(1e-8));
        let not_unitary = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            unitary_power(&not_unitary, 3),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn solve_examples() {
        let b = real_vector(&[0.3, -1.2, 4.0]);
        let x = classical_solve(&ComplexMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);

        let a = ComplexMatrix::from_real(2, 2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
        let x = classical_solve(&a, &real_vector(&[1.0, 0.0])).unwrap();
        assert!((x[0] - c(2.0 / 3.0)).norm() < 1e-15);
        assert!((x[1] - c(1.0 / 3.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_unitary(16, &mut rng).add(&ComplexMatrix::identity(16).scale(c(3.0)));
        let b: Vec<Complex64> = (0..16).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let x = classical_solve(&a, &b).unwrap();
        let r = a.mul_vec(&x);
        let bnorm = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let res = r.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(res <= 1e-9 * bnorm);

        let singular = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            classical_solve(&singular, &real_vector(&[1.0, 1.0])),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn svd_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_unitary(6, &mut rng).block(0, 0, 3, 3);
        let svd = jacobi_svd(&a);
        let left = ComplexMatrix::from_columns(&svd.left);
        let right = ComplexMatrix::from_columns(&svd.right);
        assert!(left.matmul(&right.adjoint()).max_abs_diff(&a) < 1e-13);
        for p in 0..3 {
            for q in (p + 1)..3 {
                assert!(inner_product(&svd.left[p], &svd.left[q]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn unitary_eigen_handles_degeneracy() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let q = random_unitary(6, &mut rng);
        // Conjugate pairs collide in the real part; repeated values collide fully.
        let phases = [0.4, -0.4, 0.4, 2.0, -2.0, PI];
        let d = ComplexMatrix::from_diagonal(
            &phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect::<Vec<_>>(),
        );
        let x = q.matmul(&d).matmul(&q.adjoint());
        let (v, values) = unitary_eigendecomposition(&x);
        assert!(v.is_unitary(1e-12));
        let rebuilt = v.matmul(&ComplexMatrix::from_diagonal(&values)).matmul(&v.adjoint());
        assert!(rebuilt.max_abs_diff(&x) < 1e-11);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn exponential_group_property(seed in any::<u64>(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(4, &mut rng);
            let a = unitary_exponential(&h, t1).unwrap();
            let b = unitary_exponential(&h, t2).unwrap();
            let ab = unitary_exponential(&h, t1 + t2).unwrap();
            prop_assert!(a.matmul(&b).max_abs_diff(&ab) < 1e-8);
        }

        #[test]
        fn dilation_preserves_solution(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_unitary(3, &mut rng).add(&ComplexMatrix::identity(3).scale(c(2.5)));
            let b: Vec<Complex64> = random_unitary(3, &mut rng).column(0);
            let d = hermitian_dilation(&a, &b).unwrap();
            prop_assert!(d.matrix.is_hermitian(1e-12));
            let full = classical_solve(&d.matrix, &d.rhs).unwrap();
            let x = classical_solve(&a, &b).unwrap();
            for (p, q) in full[d.solution.clone()].iter().zip(&x) {
                prop_assert!((p - q).norm() < 1e-9);
            }
        }
    }
}
