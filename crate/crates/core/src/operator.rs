//! Few-site operators, many-body operators on (C^d)^⊗n, tensor placement and partial traces.
//!
//! Site 0 is the leftmost Kronecker factor.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::linalg::{self, checked_pow, zeros, Mat, Vect, C64, ZERO};
use crate::sparse::{lanczos_lowest, CsrMatrix};

/// Relative hermiticity tolerance applied to `max |M_ij|`.
pub const HERMITICITY_TOL: f64 = 1e-12;
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

static DENSE_LIMIT: AtomicUsize = AtomicUsize::new(DEFAULT_DENSE_LIMIT);

/// Largest Hilbert-space dimension stored densely.
pub fn dense_limit() -> usize {
    DENSE_LIMIT.load(Ordering::Relaxed)
}

pub fn set_dense_limit(limit: usize) {
    DENSE_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    local_dim: usize,
    arity: usize,
    matrix: Mat,
    hermitian: bool,
}

impl LocalOperator {
    /// Any square operator of size d^arity; the Hermitian flag is computed.
    pub fn new(local_dim: usize, arity: usize, matrix: Mat) -> Result<Self> {
        if local_dim < 2 {
            return Err(Error::InvalidDimension(format!("local dimension {local_dim} < 2")));
        }
        if arity == 0 {
            return Err(Error::InvalidDimension("arity must be at least 1".into()));
        }
        let dim = checked_pow(local_dim, arity)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{}, expected {dim}x{dim} for d={local_dim}, k={arity}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let hermitian = linalg::hermiticity_deviation(&matrix) <= HERMITICITY_TOL * linalg::max_abs(&matrix);
        Ok(LocalOperator { local_dim, arity, matrix, hermitian })
    }

    /// Like [`LocalOperator::new`] but rejects non-Hermitian input.
    pub fn hermitian(local_dim: usize, arity: usize, matrix: Mat) -> Result<Self> {
        linalg::check_hermitian(&matrix, HERMITICITY_TOL)?;
        Self::new(local_dim, arity, matrix)
    }

    /// Infers the arity from the matrix size.
    pub fn from_matrix(local_dim: usize, matrix: Mat) -> Result<Self> {
        let mut arity = 0;
        let mut size = 1usize;
        while size < matrix.nrows() {
            size = size.saturating_mul(local_dim.max(2));
            arity += 1;
        }
        if size != matrix.nrows() || arity == 0 {
            return Err(Error::InvalidDimension(format!(
                "matrix size {} is not a power of {local_dim}",
                matrix.nrows()
            )));
        }
        Self::new(local_dim, arity, matrix)
    }

    pub fn identity(local_dim: usize, arity: usize) -> Result<Self> {
        let dim = checked_pow(local_dim, arity)?;
        Self::new(local_dim, arity, linalg::eye(dim))
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn tensor(&self, other: &LocalOperator) -> Result<LocalOperator> {
        if self.local_dim != other.local_dim {
            return Err(Error::InvalidDimension("tensor factors have different local dimensions".into()));
        }
        LocalOperator::new(self.local_dim, self.arity + other.arity, linalg::kron(&self.matrix, &other.matrix))
    }
}

/// Storage of a [`ManyBodyOperator`].
#[derive(Clone, Debug)]
pub enum Storage {
    Dense(Mat),
    Sparse(CsrMatrix),
}

#[derive(Clone, Debug)]
pub struct ManyBodyOperator {
    n_sites: usize,
    local_dim: usize,
    storage: Storage,
}

impl ManyBodyOperator {
    pub fn from_dense(local_dim: usize, n_sites: usize, matrix: Mat) -> Result<Self> {
        let dim = checked_pow(local_dim, n_sites)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(ManyBodyOperator { n_sites, local_dim, storage: Storage::Dense(matrix) })
    }

    pub fn from_sparse(local_dim: usize, n_sites: usize, matrix: CsrMatrix) -> Result<Self> {
        let dim = checked_pow(local_dim, n_sites)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidDimension(format!("sparse matrix is not {dim}x{dim}")));
        }
        Ok(ManyBodyOperator { n_sites, local_dim, storage: Storage::Sparse(matrix) })
    }

    /// Zero operator, dense or sparse according to the dense limit.
    pub fn zeros(local_dim: usize, n_sites: usize) -> Result<Self> {
        let dim = checked_pow(local_dim, n_sites)?;
        if dim <= dense_limit() {
            Self::from_dense(local_dim, n_sites, zeros(dim, dim))
        } else {
            Self::from_sparse(local_dim, n_sites, CsrMatrix::zeros(dim, dim))
        }
    }

    pub fn identity(local_dim: usize, n_sites: usize) -> Result<Self> {
        let dim = checked_pow(local_dim, n_sites)?;
        if dim <= dense_limit() {
            Self::from_dense(local_dim, n_sites, linalg::eye(dim))
        } else {
            Self::from_sparse(local_dim, n_sites, CsrMatrix::identity(dim))
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.nrows(),
            Storage::Sparse(s) => s.nrows(),
        }
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn to_dense(&self) -> Mat {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(s) => s.to_dense(),
        }
    }

    pub fn into_dense(self) -> Mat {
        match self.storage {
            Storage::Dense(m) => m,
            Storage::Sparse(s) => s.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match &self.storage {
            Storage::Dense(m) => CsrMatrix::from_dense(m),
            Storage::Sparse(s) => s.clone(),
        }
    }

    /// Same operator with the other storage kind.
    pub fn converted(&self) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Sparse(CsrMatrix::from_dense(m)),
            Storage::Sparse(s) => Storage::Dense(s.to_dense()),
        };
        ManyBodyOperator { storage, ..*self }
    }

    /// Non-zero entries sorted by (row, col).
    pub fn entries(&self) -> Vec<(usize, usize, C64)> {
        match &self.storage {
            Storage::Dense(m) => {
                let mut out = Vec::new();
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        if m[(r, c)] != ZERO {
                            out.push((r, c, m[(r, c)]));
                        }
                    }
                }
                out
            }
            Storage::Sparse(s) => s.iter().collect(),
        }
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        match &self.storage {
            Storage::Dense(m) => m * x,
            Storage::Sparse(s) => s.apply(x),
        }
    }

    pub fn matvec(&self, x: &Vect) -> Vect {
        match &self.storage {
            Storage::Dense(m) => m * x,
            Storage::Sparse(s) => s.matvec(x),
        }
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.n_sites != other.n_sites || self.local_dim != other.local_dim {
            return Err(Error::InvalidDimension("operators act on different spaces".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let storage = match (&self.storage, &other.storage) {
            (Storage::Dense(a), Storage::Dense(b)) => Storage::Dense(a + b),
            (Storage::Dense(a), Storage::Sparse(b)) | (Storage::Sparse(b), Storage::Dense(a)) => {
                Storage::Dense(a + b.to_dense())
            }
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.add(b)),
        };
        Ok(ManyBodyOperator { storage, ..*self })
    }

    pub fn scaled(&self, s: f64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.scale(s)),
            Storage::Sparse(m) => Storage::Sparse(m.scaled(C64::new(s, 0.0))),
        };
        ManyBodyOperator { storage, ..*self }
    }

    pub fn trace(&self) -> C64 {
        match &self.storage {
            Storage::Dense(m) => linalg::trace(m),
            Storage::Sparse(s) => (0..s.nrows()).map(|i| s.get(i, i)).sum(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => linalg::max_abs(m),
            Storage::Sparse(s) => s.max_abs(),
        }
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => linalg::hermiticity_deviation(m),
            Storage::Sparse(s) => s.hermiticity_deviation(),
        }
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let tolerance = HERMITICITY_TOL * self.max_abs();
        let deviation = self.hermiticity_deviation();
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        Ok(())
    }

    /// Largest entrywise difference, whatever the storage kinds.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        let diff = self.add(&other.scaled(-1.0))?;
        Ok(diff.max_abs())
    }
}

/// Index bookkeeping for operators placed on a subset of sites.
struct Placement {
    /// Full-space offsets of each local basis index.
    offsets: Vec<usize>,
    /// Full-space indices with zero digits on the placed sites, ascending.
    bases: Vec<usize>,
}

fn placement(d: usize, n: usize, sites: &[usize]) -> Result<Placement> {
    let mut seen = vec![false; n];
    for &s in sites {
        if s >= n {
            return Err(Error::Sites(format!("site {s} out of range for {n} sites")));
        }
        if seen[s] {
            return Err(Error::Sites(format!("site {s} listed twice")));
        }
        seen[s] = true;
    }
    let stride = |s: usize| d.pow((n - 1 - s) as u32);
    let k = sites.len();
    let m = d.pow(k as u32);
    let offsets = (0..m)
        .map(|l| {
            (0..k)
                .map(|i| ((l / d.pow((k - 1 - i) as u32)) % d) * stride(sites[i]))
                .sum()
        })
        .collect();
    let others: Vec<usize> = (0..n).filter(|s| !seen[*s]).collect();
    let rest = d.pow(others.len() as u32);
    let mut bases: Vec<usize> = (0..rest)
        .map(|l| {
            (0..others.len())
                .map(|i| ((l / d.pow((others.len() - 1 - i) as u32)) % d) * stride(others[i]))
                .sum()
        })
        .collect();
    bases.sort_unstable();
    Ok(Placement { offsets, bases })
}

fn check_embed(op_dim: usize, d: usize, sites: &[usize], n: usize) -> Result<usize> {
    let full = checked_pow(d, n)?;
    let local = checked_pow(d, sites.len())?;
    if op_dim != local {
        return Err(Error::InvalidDimension(format!(
            "operator of size {op_dim} cannot act on {} sites of dimension {d}",
            sites.len()
        )));
    }
    Ok(full)
}

/// Dense embedding of a raw local matrix acting on `sites` (in that order).
pub fn embed_matrix(op: &Mat, d: usize, sites: &[usize], n: usize) -> Result<Mat> {
    let full = check_embed(op.nrows(), d, sites, n)?;
    let p = placement(d, n, sites)?;
    let mut out = zeros(full, full);
    let m = p.offsets.len();
    for &b in &p.bases {
        for lr in 0..m {
            let row = b + p.offsets[lr];
            for lc in 0..m {
                let v = op[(lr, lc)];
                if v != ZERO {
                    out[(row, b + p.offsets[lc])] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Sparse embedding of a raw local matrix.
pub fn embed_matrix_sparse(op: &Mat, d: usize, sites: &[usize], n: usize) -> Result<CsrMatrix> {
    let full = check_embed(op.nrows(), d, sites, n)?;
    let p = placement(d, n, sites)?;
    let m = p.offsets.len();
    let nz: Vec<(usize, usize, C64)> = (0..m)
        .flat_map(|r| (0..m).map(move |c| (r, c)))
        .filter(|&(r, c)| op[(r, c)] != ZERO)
        .map(|(r, c)| (r, c, op[(r, c)]))
        .collect();
    let mut trips = Vec::with_capacity(p.bases.len() * nz.len());
    for &b in &p.bases {
        for &(r, c, v) in &nz {
            trips.push((b + p.offsets[r], b + p.offsets[c], v));
        }
    }
    Ok(CsrMatrix::from_triplets(full, full, trips))
}

/// Places `op` on the listed sites of an n-site system, identity elsewhere.
pub fn embed(op: &LocalOperator, sites: &[usize], n: usize) -> Result<ManyBodyOperator> {
    if sites.len() != op.arity() {
        return Err(Error::Sites(format!("operator arity {} but {} sites given", op.arity(), sites.len())));
    }
    let d = op.local_dim();
    let full = checked_pow(d, n)?;
    if full <= dense_limit() {
        ManyBodyOperator::from_dense(d, n, embed_matrix(op.matrix(), d, sites, n)?)
    } else {
        ManyBodyOperator::from_sparse(d, n, embed_matrix_sparse(op.matrix(), d, sites, n)?)
    }
}

/// Applies a local matrix on `sites` to every column of `x` without forming the full operator.
pub fn apply_local(op: &Mat, d: usize, sites: &[usize], n: usize, x: &Mat) -> Result<Mat> {
    let full = check_embed(op.nrows(), d, sites, n)?;
    if x.nrows() != full {
        return Err(Error::InvalidDimension(format!("vector length {} != {full}", x.nrows())));
    }
    let p = placement(d, n, sites)?;
    let m = p.offsets.len();
    let mut y = zeros(full, x.ncols());
    let mut gathered = vec![ZERO; m];
    for c in 0..x.ncols() {
        for &b in &p.bases {
            for l in 0..m {
                gathered[l] = x[(b + p.offsets[l], c)];
            }
            for lr in 0..m {
                let mut acc = ZERO;
                for l in 0..m {
                    acc += op[(lr, l)] * gathered[l];
                }
                y[(b + p.offsets[lr], c)] += acc;
            }
        }
    }
    Ok(y)
}

/// Tensor product of states living on disjoint site groups that together cover [0, n).
pub fn place_states(parts: &[(&[usize], &Vect)], d: usize, n: usize) -> Result<Vect> {
    let mut covered = vec![false; n];
    for (sites, v) in parts {
        if v.len() != checked_pow(d, sites.len())? {
            return Err(Error::InvalidDimension("state length does not match its sites".into()));
        }
        for &s in *sites {
            if s >= n || covered[s] {
                return Err(Error::Sites(format!("site {s} invalid or repeated")));
            }
            covered[s] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return Err(Error::Sites("states must cover every site".into()));
    }
    let full = checked_pow(d, n)?;
    let mut out = Vect::zeros(full);
    for idx in 0..full {
        let mut amp = C64::new(1.0, 0.0);
        for (sites, v) in parts {
            let k = sites.len();
            let mut local = 0;
            for (i, &s) in sites.iter().enumerate() {
                let digit = (idx / d.pow((n - 1 - s) as u32)) % d;
                local += digit * d.pow((k - 1 - i) as u32);
            }
            amp *= v[local];
            if amp == ZERO {
                break;
            }
        }
        out[idx] = amp;
    }
    Ok(out)
}

/// Traces out one site.
pub fn partial_trace(h: &ManyBodyOperator, site: usize) -> Result<ManyBodyOperator> {
    let n = h.n_sites();
    let d = h.local_dim();
    if site >= n {
        return Err(Error::Sites(format!("site {site} out of range for {n} sites")));
    }
    if n == 1 {
        return Err(Error::Sites("cannot trace out the only site".into()));
    }
    let stride = d.pow((n - 1 - site) as u32);
    let reduce = |i: usize| (i / (stride * d)) * stride + i % stride;
    let digit = |i: usize| (i / stride) % d;
    let out_dim = h.dim() / d;
    match h.storage() {
        Storage::Dense(m) => {
            let p = placement(d, n, &[site])?;
            let mut out = zeros(out_dim, out_dim);
            for (i, &bi) in p.bases.iter().enumerate() {
                for (j, &bj) in p.bases.iter().enumerate() {
                    let mut acc = ZERO;
                    for &off in &p.offsets {
                        acc += m[(bi + off, bj + off)];
                    }
                    out[(i, j)] = acc;
                }
            }
            if out_dim <= dense_limit() {
                ManyBodyOperator::from_dense(d, n - 1, out)
            } else {
                ManyBodyOperator::from_sparse(d, n - 1, CsrMatrix::from_dense(&out))
            }
        }
        Storage::Sparse(s) => {
            let trips = s
                .iter()
                .filter(|(r, c, _)| digit(*r) == digit(*c))
                .map(|(r, c, v)| (reduce(r), reduce(c), v))
                .collect();
            let out = CsrMatrix::from_triplets(out_dim, out_dim, trips);
            if out_dim <= dense_limit() {
                ManyBodyOperator::from_dense(d, n - 1, out.to_dense())
            } else {
                ManyBodyOperator::from_sparse(d, n - 1, out)
            }
        }
    }
}

/// Spectral norm of a Hermitian operator together with the solver residual (0 for dense).
pub fn operator_norm_with_residual(h: &ManyBodyOperator) -> Result<(f64, f64)> {
    h.check_hermitian()?;
    match h.storage() {
        Storage::Dense(m) => {
            let (vals, _) = linalg::eigh(m);
            let norm = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            Ok((norm, 0.0))
        }
        Storage::Sparse(s) => {
            let dim = s.nrows();
            let low = lanczos_lowest(|v| s.matvec(v), dim, 1, 1e-10, 11)?;
            let high = lanczos_lowest(|v| -s.matvec(v), dim, 1, 1e-10, 13)?;
            let norm = low.eigenvalues[0].abs().max(high.eigenvalues[0].abs());
            let residual = low.residuals[0].max(high.residuals[0]);
            Ok((norm, residual))
        }
    }
}

pub fn operator_norm(h: &ManyBodyOperator) -> Result<f64> {
    operator_norm_with_residual(h).map(|(n, _)| n)
}
