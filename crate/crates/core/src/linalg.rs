//! Dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vect = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> Mat {
    Mat::zeros(r, c)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn kron_all(ops: &[&Mat]) -> Mat {
    let mut out = Mat::from_element(1, 1, ONE);
    for op in ops {
        out = out.kronecker(op);
    }
    out
}

pub fn kron_vec(a: &Vect, b: &Vect) -> Vect {
    a.kronecker(b)
}

/// Integer power with overflow reported as a dimension error.
pub fn checked_pow(d: usize, n: usize) -> Result<usize> {
    let mut out: usize = 1;
    for _ in 0..n {
        out = out
            .checked_mul(d)
            .ok_or_else(|| Error::InvalidDimension(format!("{d}^{n} overflows")))?;
    }
    Ok(out)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &Mat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Hermiticity with tolerance `rel_tol * max|M_ij|`.
pub fn check_hermitian(m: &Mat, rel_tol: f64) -> Result<()> {
    let tolerance = rel_tol * max_abs(m);
    let deviation = hermiticity_deviation(m);
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    Ok(())
}

pub fn trace(m: &Mat) -> C64 {
    m.diagonal().sum()
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

pub fn anticommutator(a: &Mat, b: &Mat) -> Mat {
    a * b + b * a
}

/// Hilbert-Schmidt inner product tr(a† b).
pub fn hs_inner(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
pub fn eigh(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    // Symmetrize exactly so roundoff asymmetry never leaks into the solver.
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vecs)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigh_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vecs)
}

pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = match m.clone().try_svd(false, false, f64::EPSILON, SVD_MAX_ITER) {
        Some(svd) => svd.singular_values.iter().copied().collect(),
        // The bidiagonal QR can stall on nearly-zero inputs; fall back to the Gram matrix.
        None => gram_singular_values(m),
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

const SVD_MAX_ITER: usize = 10_000;

fn gram_singular_values(m: &Mat) -> Vec<f64> {
    let g = if m.nrows() >= m.ncols() { m.adjoint() * m } else { m * m.adjoint() };
    eigh(&g).0.iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// Thin SVD (U, σ, V†) with an iteration cap; `None` if it fails to converge.
pub fn try_svd(m: &Mat) -> Option<(Mat, Vec<f64>, Mat)> {
    let svd = m.clone().try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)?;
    Some((svd.u?, svd.singular_values.iter().copied().collect(), svd.v_t?))
}

/// Spectral norm. Hermitian inputs use the eigenvalues, others the SVD.
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    if m.nrows() == m.ncols() && hermiticity_deviation(m) <= 1e-12 * scale {
        let (vals, _) = eigh(m);
        vals.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    } else {
        let g = if m.nrows() >= m.ncols() { m.adjoint() * m } else { m * m.adjoint() };
        eigh(&g).0.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }
}

/// Unitary (or isometric) polar factor W of `m = W |m|`.
pub fn polar(m: &Mat, min_sv: f64) -> Result<Mat> {
    let (u, sv, v_t) = try_svd(m).ok_or(Error::SingularPolar(0.0))?;
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest <= min_sv {
        return Err(Error::SingularPolar(smallest));
    }
    Ok(u * v_t)
}

/// f(M) for Hermitian M through its eigen-decomposition.
pub fn hermitian_function(m: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let (vals, vecs) = eigh(m);
    let mut scaled = vecs.clone();
    for (k, v) in vals.iter().enumerate() {
        let fv = f(*v);
        scaled.column_mut(k).scale_mut(fv);
    }
    scaled * vecs.adjoint()
}

/// Moore-Penrose inverse of a Hermitian matrix, eigenvalues below `cutoff` dropped.
pub fn hermitian_pinv(m: &Mat, cutoff: f64) -> Mat {
    hermitian_function(m, |v| if v.abs() > cutoff { 1.0 / v } else { 0.0 })
}

pub fn proj(v: &Vect) -> Mat {
    v * v.adjoint()
}

pub fn basis_vector(dim: usize, index: usize) -> Vect {
    let mut v = Vect::zeros(dim);
    v[index] = ONE;
    v
}

/// Projector onto the column span of an isometry.
pub fn range_projector(isometry: &Mat) -> Mat {
    isometry * isometry.adjoint()
}

/// Orthonormal basis of the column span, rank decided at `tol`.
pub fn orthonormal_span(m: &Mat, tol: f64) -> Mat {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd computed u");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > tol * top.max(1e-300))
        .collect();
    cols.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    Mat::from_fn(m.nrows(), cols.len(), |r, c| u[(r, cols[c])])
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random Hermitian matrix scaled to unit spectral norm.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let g = random_gaussian_matrix(n, n, rng);
    let h = (&g + g.adjoint()).scale(0.5);
    let norm = spectral_norm(&h);
    h.unscale(norm)
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let g = random_gaussian_matrix(n, n, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    q
}

pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vect {
    let v = Vect::from_fn(n, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v.unscale(norm)
}
