use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::operator::HERMITICITY_TOL;
use crate::spectral::diag;

/// Ground/excited decomposition of a heavy Hamiltonian H₀ together with its
/// restricted inverse. All blocks are available both as full-space
/// projectors and in the H₀ eigenbasis.
#[derive(Clone, Debug)]
pub struct BlockSplit {
    pub h0: Mat,
    /// Ascending eigenvalues of H₀.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors of H₀; the first `ground_dim` columns span the ground space.
    pub eigenvectors: Mat,
    pub ground_dim: usize,
    /// Smallest excited eigenvalue; infinite when the excited space is empty.
    pub gap: f64,
    pub ground_energy: f64,
    pub tol: f64,
}

impl BlockSplit {
    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    /// Isometry onto the ground space (dim × g).
    pub fn ground(&self) -> Mat {
        self.eigenvectors.columns(0, self.ground_dim).into_owned()
    }

    /// Isometry onto the excited space.
    pub fn excited(&self) -> Mat {
        let g = self.ground_dim;
        self.eigenvectors.columns(g, self.dim() - g).into_owned()
    }

    pub fn pi_minus(&self) -> Mat {
        linalg::range_projector(&self.ground())
    }

    pub fn pi_plus(&self) -> Mat {
        linalg::eye(self.dim()) - self.pi_minus()
    }

    /// Whether λ_min((H₀)₊₊) ≥ 1 within tolerance.
    pub fn gap_ok(&self) -> bool {
        self.gap >= 1.0 - self.tol
    }

    /// Diagonal of the restricted inverse in the eigenbasis (zero on the ground space).
    pub fn inverse_diagonal(&self, power: i32) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &e)| if k < self.ground_dim { 0.0 } else { e.powi(-power) })
            .collect()
    }

    /// H₀^{-power} on the excited space, zero on the ground space.
    pub fn h0_pinv_power(&self, power: i32) -> Mat {
        let v = &self.eigenvectors;
        v * diag(&self.inverse_diagonal(power)) * v.adjoint()
    }

    pub fn h0_pinv(&self) -> Mat {
        self.h0_pinv_power(1)
    }

    /// O expressed in the H₀ eigenbasis.
    pub fn to_eigenbasis(&self, op: &Mat) -> Mat {
        self.eigenvectors.adjoint() * op * &self.eigenvectors
    }

    /// Full-space operator from its eigenbasis form.
    pub fn from_eigenbasis(&self, op: &Mat) -> Mat {
        &self.eigenvectors * op * self.eigenvectors.adjoint()
    }

    /// Π₋ O Π₋ compressed to the ground basis (g × g).
    pub fn compress(&self, op: &Mat) -> Mat {
        let g = self.ground();
        g.adjoint() * op * &g
    }

    /// Π₋ O Π₋ as a full-space operator.
    pub fn minus_minus(&self, op: &Mat) -> Mat {
        let p = self.pi_minus();
        &p * op * &p
    }

    /// ‖Π₋ O Π₊‖, the off-diagonal weight of O.
    pub fn off_diagonal_norm(&self, op: &Mat) -> f64 {
        let g = self.ground();
        let e = self.excited();
        if e.ncols() == 0 || g.ncols() == 0 {
            return 0.0;
        }
        linalg::spectral_norm(&(g.adjoint() * op * e))
    }
}

/// Splits H₀ into its zero-energy ground space and the excited space.
///
/// `tol` is absolute; the ground space is the eigenvalue cluster within
/// `tol` of zero, and H₀ must be positive semidefinite within `tol`.
pub fn block_split(h0: &Mat, tol: f64) -> Result<BlockSplit> {
    linalg::check_hermitian(h0, HERMITICITY_TOL)?;
    let (eigenvalues, eigenvectors) = linalg::eigh(h0);
    let ground_energy = eigenvalues.first().copied().unwrap_or(0.0);
    if ground_energy.abs() > tol {
        return Err(Error::GroundEnergyNotZero(ground_energy));
    }
    let ground_dim = eigenvalues.iter().take_while(|&&e| e <= tol).count();
    let gap = eigenvalues.get(ground_dim).copied().unwrap_or(f64::INFINITY);
    Ok(BlockSplit { h0: h0.clone(), eigenvalues, eigenvectors, ground_dim, gap, ground_energy, tol })
}

/// Default absolute tolerance for a heavy Hamiltonian of the given size.
pub fn default_split_tol(h0: &Mat) -> f64 {
    1e-9 * linalg::max_abs(h0).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, proj, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projector_heavy_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(4, &mut rng);
        let h0 = linalg::eye(4) - proj(&psi);
        let s = block_split(&h0, 1e-10).unwrap();
        assert_eq!(s.ground_dim, 1);
        assert!((s.gap - 1.0).abs() < 1e-12 && s.gap_ok());
        assert!(max_abs(&(s.pi_minus() - proj(&psi))) < 1e-12);
        assert!(max_abs(&(s.h0_pinv() - s.pi_plus())) < 1e-12);
        assert!(max_abs(&(s.h0_pinv() * &h0 - s.pi_plus())) < 1e-12);
        assert!(max_abs(&(&h0 * s.pi_minus())) < 1e-12);
        let sum = s.pi_minus() + s.pi_plus();
        assert!(max_abs(&(sum - linalg::eye(4))) < 1e-12);
    }

    #[test]
    fn rejects_shifted_heavy_term() {
        let h0 = linalg::eye(3);
        assert!(matches!(block_split(&h0, 1e-10), Err(Error::GroundEnergyNotZero(_))));
    }

    #[test]
    fn split_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = linalg::random_hermitian(6, &mut rng);
        let (vals, _) = linalg::eigh(&h);
        let shifted = &h - linalg::eye(6).scale(vals[0]);
        let a = block_split(&shifted, 1e-10).unwrap();
        let shifted2 = &shifted - linalg::eye(6).scale(a.ground_energy);
        let b = block_split(&shifted2, 1e-10).unwrap();
        assert_eq!(a.ground_dim, b.ground_dim);
        assert!(max_abs(&(a.pi_minus() - b.pi_minus())) < 1e-12);
    }
}
