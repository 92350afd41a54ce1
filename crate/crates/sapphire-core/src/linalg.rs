//! Dense and sparse linear-algebra kernels.
//!
//! Everything here is sized for the blocks the solvers actually factor:
//! CSR data matrices of arbitrary size for matrix-vector products, but dense
//! factorizations (Cholesky, thin SVD) only for small `b_H x b_H` or `r x r`
//! blocks. Summation order is fixed (sequential within a row, rows ascending)
//! so results are bit-reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },
    #[error("matrix is not symmetric (max asymmetry {max_asym:.3e})")]
    NotSymmetric { max_asym: f64 },
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("invalid CSR structure: {0}")]
    InvalidSparse(String),
}

// ---------------------------------------------------------------------------
// vector kernels
// ---------------------------------------------------------------------------

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += x[i] * y[i];
    }
    acc
}

pub fn nrm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// y += alpha * x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for i in 0..x.len() {
        y[i] += alpha * x[i];
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for v in x.iter_mut() {
        *v *= alpha;
    }
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

// ---------------------------------------------------------------------------
// sparse rows (CSR)
// ---------------------------------------------------------------------------

/// Compressed sparse row matrix.
///
/// Canonical form: column indices strictly increasing within each row, no
/// explicit zeros. Constructors enforce this; treat the fields as read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRowMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseRowMatrix {
    /// Build from (row, col, value) triplets. Duplicate coordinates are
    /// summed; entries that sum to exactly zero are dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, LinalgError> {
        for &(i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(LinalgError::InvalidSparse(format!(
                    "entry ({i}, {j}) outside {n_rows} x {n_cols}"
                )));
            }
            if !v.is_finite() {
                return Err(LinalgError::InvalidSparse(format!(
                    "non-finite value at ({i}, {j})"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut idx = 0;
        for row in 0..n_rows {
            while idx < sorted.len() && sorted[idx].0 == row {
                let col = sorted[idx].1;
                let mut val = sorted[idx].2;
                idx += 1;
                while idx < sorted.len() && sorted[idx].0 == row && sorted[idx].1 == col {
                    val += sorted[idx].2;
                    idx += 1;
                }
                if val != 0.0 {
                    col_indices.push(col);
                    values.push(val);
                }
            }
            row_offsets[row + 1] = col_indices.len();
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Build from already-canonical per-row data. Validates invariants.
    pub fn from_rows(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        let m = Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        };
        m.validate()?;
        Ok(m)
    }

    /// Dense row-major input; zeros are not stored.
    pub fn from_dense_rows(n_rows: usize, n_cols: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), n_rows * n_cols);
        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..n_rows {
            for j in 0..n_cols {
                let v = dense[i * n_cols + j];
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets[i + 1] = col_indices.len();
        }
        Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn validate(&self) -> Result<(), LinalgError> {
        if self.row_offsets.len() != self.n_rows + 1 {
            return Err(LinalgError::InvalidSparse(format!(
                "row_offsets length {} != n_rows + 1 = {}",
                self.row_offsets.len(),
                self.n_rows + 1
            )));
        }
        if self.row_offsets[0] != 0 || *self.row_offsets.last().unwrap() != self.values.len() {
            return Err(LinalgError::InvalidSparse(
                "row_offsets must start at 0 and end at nnz".into(),
            ));
        }
        if self.col_indices.len() != self.values.len() {
            return Err(LinalgError::InvalidSparse(
                "col_indices and values length mismatch".into(),
            ));
        }
        for i in 0..self.n_rows {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            if lo > hi {
                return Err(LinalgError::InvalidSparse(format!(
                    "row_offsets decreasing at row {i}"
                )));
            }
            let mut prev: Option<usize> = None;
            for k in lo..hi {
                let c = self.col_indices[k];
                if c >= self.n_cols {
                    return Err(LinalgError::InvalidSparse(format!(
                        "column {c} out of range in row {i}"
                    )));
                }
                if let Some(p) = prev {
                    if c <= p {
                        return Err(LinalgError::InvalidSparse(format!(
                            "column indices not strictly increasing in row {i}"
                        )));
                    }
                }
                if self.values[k] == 0.0 {
                    return Err(LinalgError::InvalidSparse(format!(
                        "explicit zero stored in row {i}"
                    )));
                }
                if !self.values[k].is_finite() {
                    return Err(LinalgError::InvalidSparse(format!(
                        "non-finite value in row {i}"
                    )));
                }
                prev = Some(c);
            }
        }
        Ok(())
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        let mut acc = 0.0;
        for (c, v) in cols.iter().zip(vals) {
            acc += v * x[*c];
        }
        acc
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        let (_, vals) = self.row(i);
        dot(vals, vals).sqrt()
    }

    /// y += alpha * (row i)
    pub fn row_axpy(&self, i: usize, alpha: f64, y: &mut [f64]) {
        let (cols, vals) = self.row(i);
        for (c, v) in cols.iter().zip(vals) {
            y[*c] += alpha * v;
        }
    }

    /// A * x, summed left-to-right within each row.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.n_cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n_cols,
                got: x.len(),
                context: "spmv input",
            });
        }
        let mut y = vec![0.0; self.n_rows];
        for i in 0..self.n_rows {
            y[i] = self.row_dot(i, x);
        }
        Ok(y)
    }

    /// A' * x, rows scattered in ascending order.
    pub fn spmv_t(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.n_rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n_rows,
                got: x.len(),
                context: "spmv_t input",
            });
        }
        let mut y = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            self.row_axpy(i, x[i], &mut y);
        }
        Ok(y)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }
}

// ---------------------------------------------------------------------------
// dense, column-major
// ---------------------------------------------------------------------------

/// Column-major dense matrix of f64.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            values: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Row-major input, stored column-major.
    pub fn from_row_major(n_rows: usize, n_cols: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), n_rows * n_cols);
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m.set(i, j, rows[i * n_cols + j]);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i + j * self.n_rows]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i + j * self.n_rows] = v;
    }

    /// Column `j` as a contiguous slice.
    pub fn col(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.values[j * self.n_rows..(j + 1) * self.n_rows]
    }

    /// A * x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        let mut y = vec![0.0; self.n_rows];
        for j in 0..self.n_cols {
            axpy(x[j], self.col(j), &mut y);
        }
        y
    }

    /// A' * x
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows);
        let mut y = vec![0.0; self.n_cols];
        for j in 0..self.n_cols {
            y[j] = dot(self.col(j), x);
        }
        y
    }

    /// A * B
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_cols);
        for j in 0..other.n_cols {
            let y = self.matvec(other.col(j));
            out.col_mut(j).copy_from_slice(&y);
        }
        out
    }

    /// A' * B
    pub fn matmul_tn(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_rows, other.n_rows);
        let mut out = DenseMatrix::zeros(self.n_cols, other.n_cols);
        for j in 0..other.n_cols {
            for i in 0..self.n_cols {
                out.set(i, j, dot(self.col(i), other.col(j)));
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.values, &self.values).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

// ---------------------------------------------------------------------------
// Cholesky and triangular solves
// ---------------------------------------------------------------------------

const SYMMETRY_TOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(s: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if s.n_rows != s.n_cols {
        return Err(LinalgError::DimensionMismatch {
            expected: s.n_rows,
            got: s.n_cols,
            context: "cholesky requires square input",
        });
    }
    let n = s.n_rows;
    let scale_ref = s.max_abs().max(1.0);
    let mut max_asym = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            max_asym = max_asym.max((s.get(i, j) - s.get(j, i)).abs());
        }
    }
    if max_asym > SYMMETRY_TOL * scale_ref {
        return Err(LinalgError::NotSymmetric { max_asym });
    }

    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = s.get(j, j);
        for k in 0..j {
            let ljk = l.get(j, k);
            d -= ljk * ljk;
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { pivot: j });
        }
        let djj = d.sqrt();
        l.set(j, j, djj);
        for i in (j + 1)..n {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / djj);
        }
    }
    Ok(l)
}

/// Solve L z = b with L lower triangular.
pub fn solve_lower(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.n_rows;
    assert_eq!(b.len(), n);
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            z[i] -= l.get(i, k) * z[k];
        }
        z[i] /= l.get(i, i);
    }
    z
}

/// Solve L' z = b with L lower triangular.
pub fn solve_lower_transpose(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.n_rows;
    assert_eq!(b.len(), n);
    let mut z = b.to_vec();
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            z[i] -= l.get(k, i) * z[k];
        }
        z[i] /= l.get(i, i);
    }
    z
}

/// Solve (L L') z = b.
pub fn cholesky_solve(l: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    solve_lower_transpose(l, &solve_lower(l, b))
}

// ---------------------------------------------------------------------------
// thin SVD
// ---------------------------------------------------------------------------

/// Thin SVD of a tall matrix: M = U diag(s) V' with U p x r orthonormal and
/// s nonincreasing. Only (U, s) are returned.
///
/// Householder QR reduces to an r x r triangular factor, then a one-sided
/// Jacobi sweep orthogonalizes its columns.
pub fn thin_svd(m: &DenseMatrix) -> Result<(DenseMatrix, Vec<f64>), LinalgError> {
    let (p, r) = (m.n_rows, m.n_cols);
    if p < r {
        return Err(LinalgError::DimensionMismatch {
            expected: r,
            got: p,
            context: "thin_svd requires n_rows >= n_cols",
        });
    }
    let (q, mut rfac) = householder_qr(m);

    // One-sided Jacobi on the r x r factor: rotate column pairs until all
    // columns are mutually orthogonal. Accumulating the rotations is not
    // needed since V is discarded.
    one_sided_jacobi(&mut rfac);

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..r).collect();
    let norms: Vec<f64> = (0..r).map(|j| nrm2(rfac.col(j))).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut s = vec![0.0; r];
    let mut u_r = DenseMatrix::zeros(r, r);
    let smax = norms[order[0]];
    let rank_tol = smax * 1e-14;
    let mut n_good = 0;
    for (dst, &src) in order.iter().enumerate() {
        s[dst] = norms[src];
        if norms[src] > rank_tol && norms[src] > 0.0 {
            let inv = 1.0 / norms[src];
            let col = rfac.col(src).to_vec();
            for (i, v) in col.iter().enumerate() {
                u_r.set(i, dst, v * inv);
            }
            n_good = dst + 1;
        }
    }
    // Complete the basis for (near-)zero singular values.
    complete_orthonormal_basis(&mut u_r, n_good);

    Ok((q.matmul(&u_r), s))
}

/// Thin Householder QR: returns (Q with orthonormal columns p x r, R upper
/// triangular r x r).
pub fn householder_qr(m: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (p, r) = (m.n_rows, m.n_cols);
    let mut a = m.clone();
    let mut taus = Vec::with_capacity(r);
    let mut hh: Vec<Vec<f64>> = Vec::with_capacity(r);

    for k in 0..r {
        // Householder vector for column k below the diagonal.
        let mut v = vec![0.0; p - k];
        for i in k..p {
            v[i - k] = a.get(i, k);
        }
        let alpha = nrm2(&v);
        let mut tau = 0.0;
        if alpha > 0.0 {
            let beta = if v[0] >= 0.0 { -alpha } else { alpha };
            let denom = v[0] - beta;
            if denom != 0.0 {
                for item in v.iter_mut().skip(1) {
                    *item /= denom;
                }
                tau = (beta - v[0]) / beta;
                v[0] = 1.0;
                // Apply H = I - tau v v' to the trailing columns.
                for j in k..r {
                    let mut proj = 0.0;
                    for i in k..p {
                        proj += v[i - k] * a.get(i, j);
                    }
                    proj *= tau;
                    for i in k..p {
                        let val = a.get(i, j) - proj * v[i - k];
                        a.set(i, j, val);
                    }
                }
                a.set(k, k, beta);
                for i in (k + 1)..p {
                    a.set(i, k, 0.0);
                }
            } else {
                v[0] = 1.0;
            }
        } else {
            v[0] = 1.0;
        }
        taus.push(tau);
        hh.push(v);
    }

    let mut rfac = DenseMatrix::zeros(r, r);
    for j in 0..r {
        for i in 0..=j {
            rfac.set(i, j, a.get(i, j));
        }
    }

    // Form thin Q by applying the reflectors to the first r identity columns.
    let mut q = DenseMatrix::zeros(p, r);
    for j in 0..r {
        q.set(j, j, 1.0);
    }
    for k in (0..r).rev() {
        let v = &hh[k];
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        for j in 0..r {
            let mut proj = 0.0;
            for i in k..p {
                proj += v[i - k] * q.get(i, j);
            }
            proj *= tau;
            for i in k..p {
                let val = q.get(i, j) - proj * v[i - k];
                q.set(i, j, val);
            }
        }
    }
    (q, rfac)
}

fn one_sided_jacobi(b: &mut DenseMatrix) {
    let r = b.n_cols;
    let n = b.n_rows;
    const MAX_SWEEPS: usize = 60;
    const TOL: f64 = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..r {
            for j in (i + 1)..r {
                let mut aii = 0.0;
                let mut ajj = 0.0;
                let mut aij = 0.0;
                for k in 0..n {
                    let bi = b.get(k, i);
                    let bj = b.get(k, j);
                    aii += bi * bi;
                    ajj += bj * bj;
                    aij += bi * bj;
                }
                if aii == 0.0 || ajj == 0.0 {
                    continue;
                }
                let rel = aij.abs() / (aii * ajj).sqrt();
                off = off.max(rel);
                if rel <= TOL {
                    continue;
                }
                let zeta = (ajj - aii) / (2.0 * aij);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let bi = b.get(k, i);
                    let bj = b.get(k, j);
                    b.set(k, i, c * bi - s * bj);
                    b.set(k, j, s * bi + c * bj);
                }
            }
        }
        if off <= TOL {
            break;
        }
    }
}

/// Fill columns `from..` of a square matrix with vectors orthonormal to the
/// existing ones, using Gram-Schmidt against standard basis candidates.
fn complete_orthonormal_basis(u: &mut DenseMatrix, from: usize) {
    let n = u.n_rows;
    let mut next = from;
    let mut cand = 0;
    while next < u.n_cols && cand < 2 * n {
        let mut v = vec![0.0; n];
        v[cand % n] = 1.0;
        // Two rounds of modified Gram-Schmidt for stability.
        for _ in 0..2 {
            for j in 0..next {
                let proj = dot(u.col(j), &v);
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi -= proj * u.get(i, j);
                }
            }
        }
        let norm = nrm2(&v);
        if norm > 1e-8 {
            for (i, vi) in v.iter().enumerate() {
                u.set(i, next, vi / norm);
            }
            next += 1;
        }
        cand += 1;
    }
    assert!(next == u.n_cols, "failed to complete orthonormal basis");
}

// ---------------------------------------------------------------------------
// power iteration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct PowerIterEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Largest eigenvalue of a symmetric PSD operator given as `apply(x, out)`.
///
/// Deterministic for a fixed seed. If `max_iter` is exhausted the current
/// Rayleigh-quotient estimate is returned with `converged = false`.
pub fn power_iteration<F>(
    apply: F,
    dim: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> PowerIterEstimate
where
    F: Fn(&[f64], &mut [f64]),
{
    assert!(dim > 0);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = nrm2(&v);
    if nv == 0.0 {
        v[0] = 1.0;
    } else {
        scale(1.0 / nv, &mut v);
    }

    let mut w = vec![0.0; dim];
    let mut lambda_prev = f64::NAN;
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        apply(&v, &mut w);
        lambda = dot(&v, &w);
        // Eigenpair residual ||Av - lambda v||.
        let mut resid_sq = 0.0;
        for i in 0..dim {
            let r = w[i] - lambda * v[i];
            resid_sq += r * r;
        }
        let resid = resid_sq.sqrt();
        let scale_ref = lambda.abs().max(f64::MIN_POSITIVE);
        let drift_ok = lambda_prev.is_finite() && (lambda - lambda_prev).abs() <= tol * scale_ref;
        if resid <= tol * scale_ref || drift_ok {
            return PowerIterEstimate {
                value: lambda,
                converged: true,
                iterations: it,
            };
        }
        let nw = nrm2(&w);
        if nw == 0.0 {
            // Operator annihilates the sampled direction; spectrum seen is 0.
            return PowerIterEstimate {
                value: 0.0,
                converged: true,
                iterations: it,
            };
        }
        for i in 0..dim {
            v[i] = w[i] / nw;
        }
        lambda_prev = lambda;
    }
    PowerIterEstimate {
        value: lambda,
        converged: false,
        iterations: max_iter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn random_csr(rng: &mut ChaCha20Rng, n: usize, p: usize, density: f64) -> SparseRowMatrix {
        let mut trips = Vec::new();
        for i in 0..n {
            for j in 0..p {
                if rng.gen::<f64>() < density {
                    trips.push((i, j, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        SparseRowMatrix::from_triplets(n, p, &trips).unwrap()
    }

    #[test]
    fn spmv_identity() {
        let a = SparseRowMatrix::identity(2);
        let y = a.spmv(&[3.0, -1.0]).unwrap();
        assert_eq!(y, vec![3.0, -1.0]);
    }

    #[test]
    fn spmv_hand_case() {
        let a = SparseRowMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0)]).unwrap();
        let y = a.spmv(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(y, vec![3.0, 0.0]);
        let yt = a.spmv_t(&[1.0, 1.0]).unwrap();
        assert_eq!(yt, vec![1.0, 0.0, 2.0]);
    }

    #[test]
    fn spmv_matches_dense_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let a = random_csr(&mut rng, 50, 30, 0.1);
        let x: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = a.spmv(&x).unwrap();
        let dense = oracle::densify(&a);
        let y_ref = oracle::dense_matvec(&dense, &x);
        let scale_ref = nrm2(&y_ref).max(1.0);
        for i in 0..50 {
            assert!((y[i] - y_ref[i]).abs() <= 1e-14 * scale_ref);
        }
    }

    #[test]
    fn spmv_t_matches_dense_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let a = random_csr(&mut rng, 40, 25, 0.15);
        let x: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = a.spmv_t(&x).unwrap();
        let dense = oracle::densify(&a);
        let y_ref = oracle::dense_matvec_t(&dense, &x);
        let scale_ref = nrm2(&y_ref).max(1.0);
        for j in 0..25 {
            assert!((y[j] - y_ref[j]).abs() <= 1e-14 * scale_ref);
        }
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let a = SparseRowMatrix::identity(3);
        assert!(a.spmv(&[1.0, 2.0]).is_err());
        assert!(a.spmv_t(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = SparseRowMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 0, 2.0), (1, 1, 0.5), (1, 1, -0.5)],
        )
        .unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.row(0), (&[0usize][..], &[3.0][..]));
        a.validate().unwrap();
    }

    #[test]
    fn adjointness_property() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_csr(&mut rng, 15, 12, 0.3);
            let x: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lhs = dot(&a.spmv(&x).unwrap(), &y);
            let rhs = dot(&x, &a.spmv_t(&y).unwrap());
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0));
        }
    }

    #[test]
    fn cholesky_diagonal() {
        let s = DenseMatrix::from_row_major(2, 2, &[4.0, 0.0, 0.0, 9.0]);
        let l = cholesky(&s).unwrap();
        assert_eq!(l.get(0, 0), 2.0);
        assert_eq!(l.get(1, 1), 3.0);
        assert_eq!(l.get(1, 0), 0.0);
    }

    #[test]
    fn cholesky_hand_case() {
        let s = DenseMatrix::from_row_major(2, 2, &[4.0, 2.0, 2.0, 5.0]);
        let l = cholesky(&s).unwrap();
        assert!((l.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((l.get(1, 0) - 1.0).abs() < 1e-15);
        assert!((l.get(1, 1) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cholesky_random_spd_reconstruction() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let n = 20;
        let mut b = DenseMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                b.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        // S = B'B + I is SPD.
        let mut s = b.matmul_tn(&b);
        for i in 0..n {
            s.set(i, i, s.get(i, i) + 1.0);
        }
        let l = cholesky(&s).unwrap();
        let mut max_err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut recon = 0.0;
                for k in 0..=i.min(j) {
                    recon += l.get(i, k) * l.get(j, k);
                }
                max_err = max_err.max((recon - s.get(i, j)).abs());
            }
        }
        assert!(max_err <= 1e-10 * s.max_abs());
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let s = DenseMatrix::from_row_major(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match cholesky(&s) {
            Err(LinalgError::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_solve_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let n = 15;
        let mut b = DenseMatrix::zeros(n, n);
        for v in b.values.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let mut s = b.matmul_tn(&b);
        for i in 0..n {
            s.set(i, i, s.get(i, i) + 1.0);
        }
        let z_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rhs = oracle::dense_matvec(&oracle::dense_to_rows(&s), &z_true);
        let l = cholesky(&s).unwrap();
        let z = cholesky_solve(&l, &rhs);
        for i in 0..n {
            assert!((z[i] - z_true[i]).abs() <= 1e-9);
        }
    }

    #[test]
    fn thin_svd_rectangular_diagonal() {
        let m = DenseMatrix::from_row_major(3, 2, &[3.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let (u, s) = thin_svd(&m).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-12);
        assert!((s[1] - 2.0).abs() < 1e-12);
        assert!((u.get(0, 0).abs() - 1.0).abs() < 1e-12);
        assert!((u.get(1, 1).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thin_svd_orthonormal_input() {
        // Columns of a permutation-like orthonormal block.
        let m = DenseMatrix::from_row_major(3, 2, &[0.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let (_, s) = thin_svd(&m).unwrap();
        for v in s {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn thin_svd_matches_gram_eigenvalues() {
        let mut rng = ChaCha20Rng::seed_from_u64(19);
        let (p, r) = (100, 10);
        let mut m = DenseMatrix::zeros(p, r);
        for v in m.values.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let (u, s) = thin_svd(&m).unwrap();

        // Orthonormality.
        let gram = u.matmul_tn(&u);
        for i in 0..r {
            for j in 0..r {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram.get(i, j) - expect).abs() <= 1e-10);
            }
        }

        // Singular values vs Jacobi eigenvalues of M'M.
        let mtm = m.matmul_tn(&m);
        let (eigs, _) = oracle::sym_eig(&oracle::dense_to_rows(&mtm));
        for j in 0..r {
            let expect = eigs[j].max(0.0).sqrt();
            assert!(
                (s[j] - expect).abs() <= 1e-9 * expect.max(1.0),
                "s[{j}] = {} vs {}",
                s[j],
                expect
            );
        }

        // Column-space reconstruction: (I - UU')M = 0.
        let ut_m = u.matmul_tn(&m);
        let proj = u.matmul(&ut_m);
        let mut err = 0.0f64;
        for k in 0..m.values.len() {
            err = err.max((m.values[k] - proj.values[k]).abs());
        }
        assert!(err <= 1e-9 * m.max_abs());
    }

    #[test]
    fn thin_svd_rank_deficient() {
        // Rank 1 matrix with 3 columns: two zero singular values, basis still
        // orthonormal.
        let mut m = DenseMatrix::zeros(6, 3);
        for i in 0..6 {
            m.set(i, 0, 1.0);
            m.set(i, 1, 2.0);
            m.set(i, 2, -1.0);
        }
        let (u, s) = thin_svd(&m).unwrap();
        assert!(s[1] <= 1e-12 * s[0]);
        assert!(s[2] <= 1e-12 * s[0]);
        let gram = u.matmul_tn(&u);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram.get(i, j) - expect).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn power_iteration_diag() {
        let d = [1.0, 2.0, 3.0];
        let est = power_iteration(
            |x, out| {
                for i in 0..3 {
                    out[i] = d[i] * x[i];
                }
            },
            3,
            1e-8,
            500,
            42,
        );
        assert!(est.converged);
        assert!((est.value - 3.0).abs() <= 1e-6);
    }

    #[test]
    fn power_iteration_identity_one_step() {
        let est = power_iteration(|x, out| out.copy_from_slice(x), 4, 1e-10, 10, 1);
        assert!(est.converged);
        assert_eq!(est.iterations, 1);
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn power_iteration_matches_dense_eig() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        let n = 50;
        let mut b = DenseMatrix::zeros(n, n);
        for v in b.values.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let s = b.matmul_tn(&b);
        let (eigs, _) = oracle::sym_eig(&oracle::dense_to_rows(&s));
        let est = power_iteration(
            |x, out| {
                let y = s.matvec(x);
                out.copy_from_slice(&y);
            },
            n,
            1e-10,
            5000,
            9,
        );
        assert!(est.converged);
        assert!((est.value - eigs[0]).abs() <= 1e-6 * eigs[0]);
    }

    #[test]
    fn power_iteration_reports_non_convergence() {
        let d = [1.0, 0.999999];
        let est = power_iteration(
            |x, out| {
                for i in 0..2 {
                    out[i] = d[i] * x[i];
                }
            },
            2,
            1e-16,
            3,
            4,
        );
        assert!(!est.converged);
        assert!(est.value <= 1.0 + 1e-12);
    }
}
