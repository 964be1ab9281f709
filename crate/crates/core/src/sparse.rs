//! Compressed sparse row storage and a Lanczos solver for extremal eigenpairs.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{eigh_real, random_state, zeros, Mat, Vect, C64, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed and exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *values.last_mut().expect("nonempty") += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            values.push(v);
        }
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_cols = Vec::with_capacity(rows.len());
        let mut keep_vals = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != ZERO {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { nrows, ncols, row_ptr, col_idx: keep_cols, values: keep_vals }
    }

    pub fn from_dense(m: &Mat) -> Self {
        let mut trips = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != ZERO {
                    trips.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), trips)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries in (row, col) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn to_dense(&self) -> Mat {
        let mut m = zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn matvec(&self, x: &Vect) -> Vect {
        let mut y = Vect::zeros(self.nrows);
        for r in 0..self.nrows {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
        y
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        let mut y = zeros(self.nrows, x.ncols());
        for c in 0..x.ncols() {
            for r in 0..self.nrows {
                let mut acc = ZERO;
                for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.values[k] * x[(self.col_idx[k], c)];
                }
                y[(r, c)] = acc;
            }
        }
        y
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let trips = self.iter().chain(other.iter()).collect();
        Self::from_triplets(self.nrows, self.ncols, trips)
    }

    pub fn adjoint(&self) -> Self {
        let trips = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, trips)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for (r, c, v) in self.iter() {
            dev = dev.max((v - self.get(c, r).conj()).norm());
        }
        dev
    }
}

/// Result of an iterative extremal eigensolve.
#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
    pub residuals: Vec<f64>,
}

/// Lowest `k` eigenpairs of a Hermitian operator given as a matvec closure.
///
/// Lanczos with full reorthogonalization and explicit restarts. A single
/// Krylov vector resolves one direction per degenerate eigenspace, so
/// multiplicities are not reliable from this path.
pub fn lanczos_lowest<F>(apply: F, dim: usize, k: usize, tol: f64, seed: u64) -> Result<LanczosResult>
where
    F: Fn(&Vect) -> Vect,
{
    if dim == 0 || k == 0 {
        return Ok(LanczosResult { eigenvalues: vec![], eigenvectors: zeros(dim, 0), residuals: vec![] });
    }
    let k = k.min(dim);
    let krylov = dim.min((4 * k + 60).max(120));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = random_state(dim, &mut rng);
    let mut best_residual = f64::INFINITY;

    for _restart in 0..40 {
        let mut basis: Vec<Vect> = Vec::with_capacity(krylov);
        let mut alpha: Vec<f64> = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        let mut q = start.clone();
        let mut last_beta = 0.0;
        for j in 0..krylov {
            basis.push(q.clone());
            let mut w = apply(&q);
            let a = q.dotc(&w).re;
            alpha.push(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for b in &basis {
                    let proj = b.dotc(&w);
                    w -= b * proj;
                }
            }
            let bnorm = w.norm();
            last_beta = bnorm;
            if j + 1 == krylov || bnorm < 1e-12 * (1.0 + a.abs()) {
                break;
            }
            beta.push(bnorm);
            q = w.unscale(bnorm);
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let (theta, s) = eigh_real(&t);
        let want = k.min(m);
        let mut vecs = zeros(dim, want);
        let mut residuals = Vec::with_capacity(want);
        for i in 0..want {
            let mut v = Vect::zeros(dim);
            for (jj, b) in basis.iter().enumerate() {
                v += b * C64::new(s[(jj, i)], 0.0);
            }
            let r = (apply(&v) - &v * C64::new(theta[i], 0.0)).norm();
            residuals.push(r);
            vecs.set_column(i, &v);
        }
        let scale = theta.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        best_residual = best_residual.min(worst);
        let exhausted = m == dim || last_beta < 1e-12 * scale;
        if worst <= tol * scale || (exhausted && want == k) {
            return Ok(LanczosResult { eigenvalues: theta[..want].to_vec(), eigenvectors: vecs, residuals });
        }
        // Restart from a combination weighted toward the lowest Ritz vector.
        let mut next = Vect::zeros(dim);
        for i in 0..want {
            next += vecs.column(i) * C64::new(1.0 / (1.0 + i as f64), 0.0);
        }
        let n = next.norm();
        start = next.unscale(n);
    }
    Err(Error::NoConvergence { residual: best_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, max_abs, random_hermitian, real};

    #[test]
    fn triplets_merge_and_sort() {
        let m = CsrMatrix::from_triplets(
            3,
            3,
            vec![(2, 0, real(1.0)), (0, 1, real(2.0)), (2, 0, real(3.0)), (1, 1, real(0.0))],
        );
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(2, 0), real(4.0));
        let entries: Vec<_> = m.iter().map(|(r, c, _)| (r, c)).collect();
        assert_eq!(entries, vec![(0, 1), (2, 0)]);
    }

    #[test]
    fn dense_round_trip_and_matvec() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(9, &mut rng);
        let s = CsrMatrix::from_dense(&h);
        assert!(max_abs(&(s.to_dense() - &h)) == 0.0);
        let x = random_state(9, &mut rng);
        assert!((s.matvec(&x) - &h * &x).norm() < 1e-13);
        assert!(s.hermiticity_deviation() < 1e-15);
    }

    #[test]
    fn lanczos_matches_dense_lowest() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(200, &mut rng);
        let (vals, _) = eigh(&h);
        let res = lanczos_lowest(|v| &h * v, 200, 3, 1e-10, 7).unwrap();
        for i in 0..3 {
            assert!((res.eigenvalues[i] - vals[i]).abs() < 1e-9, "{i}");
        }
    }
}
