//! Eigen-decompositions with degeneracy clustering.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::{self, zeros, Mat, Vect, C64};
use crate::operator::{dense_limit, ManyBodyOperator, Storage, HERMITICITY_TOL};
use crate::sparse::lanczos_lowest;

/// Default cluster tolerance relative to the spectral diameter.
pub const CLUSTER_REL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors in the order of `eigenvalues`.
    pub eigenvectors: Mat,
    pub clusters: Vec<Range<usize>>,
    pub cluster_tol: f64,
    /// Largest eigenpair residual; zero for the dense path.
    pub residual: f64,
}

/// Default tolerance: 1e-8 of the spectral diameter, floored for flat spectra.
pub fn default_cluster_tol(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let diameter = if values.is_empty() { 0.0 } else { hi - lo };
    let scale = lo.abs().max(hi.abs());
    (CLUSTER_REL_TOL * diameter).max(1e-12 * scale).max(1e-14)
}

/// Groups ascending values; a cluster never spans more than `tol`.
pub fn cluster(values: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[start] > tol {
            out.push(start..i);
            start = i;
        }
    }
    if values.is_empty() {
        out.clear();
    }
    out
}

impl SpectralDecomposition {
    pub fn from_matrix(m: &Mat, cluster_tol: Option<f64>) -> Result<Self> {
        linalg::check_hermitian(m, HERMITICITY_TOL)?;
        let (eigenvalues, eigenvectors) = linalg::eigh(m);
        let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(&eigenvalues));
        let clusters = cluster(&eigenvalues, tol);
        Ok(SpectralDecomposition { eigenvalues, eigenvectors, clusters, cluster_tol: tol, residual: 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.eigenvectors.nrows()
    }

    /// Mean eigenvalue of each cluster.
    pub fn cluster_values(&self) -> Vec<f64> {
        self.clusters
            .iter()
            .map(|r| self.eigenvalues[r.clone()].iter().sum::<f64>() / r.len() as f64)
            .collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|r| r.len()).collect()
    }

    /// Orthonormal basis of the eigenspace of cluster `k`.
    pub fn cluster_basis(&self, k: usize) -> Mat {
        let r = self.clusters[k].clone();
        self.eigenvectors.columns(r.start, r.len()).into_owned()
    }

    pub fn cluster_projector(&self, k: usize) -> Mat {
        linalg::range_projector(&self.cluster_basis(k))
    }

    pub fn reconstruct(&self) -> Mat {
        let mut scaled = self.eigenvectors.clone();
        for (k, v) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*v);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// ‖H - VΛV†‖ relative to ‖H‖.
    pub fn reconstruction_error(&self, h: &Mat) -> f64 {
        let norm = linalg::spectral_norm(h).max(1e-300);
        linalg::spectral_norm(&(self.reconstruct() - h)) / norm
    }
}

/// Full decomposition; sparse operators above the dense limit need [`lowest_eigenpairs`].
pub fn spectral(h: &ManyBodyOperator, cluster_tol: Option<f64>) -> Result<SpectralDecomposition> {
    match h.storage() {
        Storage::Dense(m) => SpectralDecomposition::from_matrix(m, cluster_tol),
        Storage::Sparse(s) if s.nrows() <= dense_limit() => {
            SpectralDecomposition::from_matrix(&s.to_dense(), cluster_tol)
        }
        Storage::Sparse(_) => Err(Error::Unsupported(format!(
            "full spectrum of a {}-dimensional sparse operator; request extremal pairs instead",
            h.dim()
        ))),
    }
}

/// Lowest `k` eigenpairs: exact on the dense path, Lanczos on the sparse path.
pub fn lowest_eigenpairs(h: &ManyBodyOperator, k: usize, cluster_tol: Option<f64>) -> Result<SpectralDecomposition> {
    h.check_hermitian()?;
    if h.dim() <= dense_limit() {
        let full = spectral(h, cluster_tol)?;
        let k = k.min(full.eigenvalues.len());
        let eigenvalues = full.eigenvalues[..k].to_vec();
        let eigenvectors = full.eigenvectors.columns(0, k).into_owned();
        let clusters = cluster(&eigenvalues, full.cluster_tol);
        return Ok(SpectralDecomposition { eigenvalues, eigenvectors, clusters, cluster_tol: full.cluster_tol, residual: 0.0 });
    }
    let sparse = h.to_sparse();
    let res = lanczos_lowest(|v: &Vect| sparse.matvec(v), h.dim(), k, 1e-10, 17)?;
    let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(&res.eigenvalues));
    let clusters = cluster(&res.eigenvalues, tol);
    let residual = res.residuals.iter().copied().fold(0.0, f64::max);
    Ok(SpectralDecomposition {
        eigenvalues: res.eigenvalues,
        eigenvectors: res.eigenvectors,
        clusters,
        cluster_tol: tol,
        residual,
    })
}

/// Diagonal matrix from real values.
pub fn diag(values: &[f64]) -> Mat {
    let mut m = zeros(values.len(), values.len());
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = C64::new(*v, 0.0);
    }
    m
}
