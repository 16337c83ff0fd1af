//! Minimal dense linear algebra for the solvers: row-major matrices,
//! Cholesky, LU with partial pivoting, cyclic Jacobi eigendecomposition and
//! Householder QR with column pivoting.

use std::ops::{Index, IndexMut};

use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn scaled_identity(n: usize, s: T) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == T::zero() {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum()).collect()
    }

    pub fn add_scaled(&mut self, s: T, other: &Self) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: T) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    /// Frobenius inner product `sum_ij A_ij B_ij`.
    pub fn dot(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Replaces the matrix by `(A + A^T)/2`.
    pub fn symmetrize(&mut self) {
        let half = T::c(0.5);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = (self[(i, j)] + self[(j, i)]) * half;
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix, or `None`.
pub fn cholesky<T: Real>(a: &Mat<T>) -> Option<Mat<T>> {
    let n = a.rows();
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` in place.
pub fn cholesky_solve<T: Real>(l: &Mat<T>, b: &mut [T]) {
    forward_subst(l, b);
    backward_subst_transposed(l, b);
}

/// Solves `L x = b` in place for lower-triangular `L`.
pub fn forward_subst<T: Real>(l: &Mat<T>, b: &mut [T]) {
    let n = l.rows();
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solves `L^T x = b` in place for lower-triangular `L`.
pub fn backward_subst_transposed<T: Real>(l: &Mat<T>, b: &mut [T]) {
    let n = l.rows();
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Inverse of `L L^T` given the Cholesky factor.
pub fn cholesky_inverse<T: Real>(l: &Mat<T>) -> Mat<T> {
    let n = l.rows();
    let mut inv = Mat::zeros(n, n);
    let mut col = vec![T::zero(); n];
    for j in 0..n {
        col.iter_mut().for_each(|c| *c = T::zero());
        col[j] = T::one();
        cholesky_solve(l, &mut col);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    inv.symmetrize();
    inv
}

/// `L^{-1} A L^{-T}` for lower-triangular `L` and symmetric `A`.
pub fn congruence_inverse<T: Real>(l: &Mat<T>, a: &Mat<T>) -> Mat<T> {
    let n = l.rows();
    // B = L^{-1} A (column by column of A).
    let mut b = Mat::zeros(n, n);
    let mut col = vec![T::zero(); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = a[(i, j)];
        }
        forward_subst(l, &mut col);
        for i in 0..n {
            b[(i, j)] = col[i];
        }
    }
    // C = B L^{-T} = (L^{-1} B^T)^T.
    let mut c = Mat::zeros(n, n);
    for i in 0..n {
        col.copy_from_slice(b.row(i));
        forward_subst(l, &mut col);
        for j in 0..n {
            c[(i, j)] = col[j];
        }
    }
    c.symmetrize();
    c
}

/// Eigenvalues (ascending) and column eigenvectors of a symmetric matrix by
/// cyclic Jacobi rotations.
pub fn sym_eigen<T: Real>(a: &Mat<T>) -> (Vec<T>, Mat<T>) {
    let n = a.rows();
    let mut m = a.clone();
    m.symmetrize();
    let mut v = Mat::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag += m[(i, i)] * m[(i, i)];
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (T::c(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = T::zero();
                m[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[(k, new)] = v[(k, old)];
        }
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a symmetric matrix. Tries a Cholesky shift test
/// first so that clearly positive definite matrices skip the eigensolver.
pub fn min_eigenvalue<T: Real>(a: &Mat<T>) -> T {
    if a.rows() == 0 {
        return T::infinity();
    }
    sym_eigen(a).0[0]
}

/// LU factorization with partial pivoting, `P A = L U` packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(mut a: Mat<T>) -> Option<Self> {
        let n = a.rows();
        assert_eq!(n, a.cols());
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in (k + 1)..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > T::zero()) {
                return None;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
            }
            let pivot = a[(k, k)];
            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let krow = &head[k * n..(k + 1) * n];
            for i in (k + 1)..n {
                let row = &mut tail[(i - k - 1) * n..(i - k) * n];
                let f = row[k] / pivot;
                row[k] = f;
                if f == T::zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    row[j] -= f * krow[j];
                }
            }
        }
        Some(Self { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for k in 0..i {
                s -= row[k] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= row[k] * x[k];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transposed(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        // A^T = U^T L^T P, so solve U^T z = b, L^T w = z, x = P^T w.
        let mut z = b.to_vec();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.lu[(k, i)] * z[k];
            }
            z[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= self.lu[(k, i)] * z[k];
            }
            z[i] = s;
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }
}

/// Householder QR with column pivoting: `A P = Q R`.
#[derive(Debug, Clone)]
pub struct PivotedQr<T> {
    /// Full orthogonal factor (rows x rows).
    pub q: Mat<T>,
    /// Upper trapezoidal factor (rows x cols).
    pub r: Mat<T>,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
    pub rank: usize,
}

pub fn pivoted_qr<T: Real>(a: &Mat<T>, rel_tol: T) -> PivotedQr<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut q = Mat::<T>::identity(m);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<T> = (0..n).map(|j| (0..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<T>()).collect();
    let steps = m.min(n);
    let mut rank = 0;
    let mut first = T::zero();
    for k in 0..steps {
        // Pivot on the remaining column of largest norm.
        let mut p = k;
        for j in (k + 1)..n {
            if norms[j] > norms[p] {
                p = j;
            }
        }
        if p != k {
            perm.swap(p, k);
            norms.swap(p, k);
            for i in 0..m {
                let t = r[(i, k)];
                r[(i, k)] = r[(i, p)];
                r[(i, p)] = t;
            }
        }
        let mut alpha = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<T>().sqrt();
        if k == 0 {
            first = alpha;
        }
        if alpha <= rel_tol * first || alpha == T::zero() {
            break;
        }
        rank += 1;
        if r[(k, k)] > T::zero() {
            alpha = -alpha;
        }
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 > T::zero() {
            let two = T::c(2.0);
            for j in k..n {
                let s: T = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
                let f = two * s / vnorm2;
                for i in k..m {
                    r[(i, j)] -= f * v[i - k];
                }
            }
            // Q <- Q H.
            for i in 0..m {
                let s: T = (k..m).map(|l| q[(i, l)] * v[l - k]).sum();
                let f = two * s / vnorm2;
                for l in k..m {
                    q[(i, l)] -= f * v[l - k];
                }
            }
        }
        for i in (k + 1)..m {
            r[(i, k)] = T::zero();
        }
        for j in (k + 1)..n {
            norms[j] = ((k + 1)..m).map(|i| r[(i, j)] * r[(i, j)]).sum();
        }
    }
    PivotedQr { q, r, perm, rank }
}
