//! Numerical certification that H′ simulates H: measure η and ε for a given
//! encoding isometry and energy cutoff.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::operator::dense_limit;
use crate::spectral::{cluster, default_cluster_tol};
use crate::sw::GadgetInstance;

#[derive(Clone, Debug)]
pub struct LowEnergyProjector {
    pub projector: Mat,
    /// Orthonormal basis of the range.
    pub basis: Mat,
    pub rank: usize,
    /// The cutoff fell inside a degenerate cluster, which was included whole.
    pub split_cluster: bool,
}

/// Spectral projector of `h` onto eigenvalues ≤ `cutoff`.
pub fn low_energy_projector(h: &Mat, cutoff: f64) -> Result<LowEnergyProjector> {
    if h.nrows() > dense_limit() {
        return Err(Error::Unsupported(format!("dimension {} exceeds the dense limit {}", h.nrows(), dense_limit())));
    }
    linalg::check_hermitian(h, crate::operator::HERMITICITY_TOL)?;
    let (vals, vecs) = linalg::eigh(h);
    let tol = default_cluster_tol(&vals);
    let mut rank = 0;
    let mut split_cluster = false;
    for group in cluster(&vals, tol) {
        let below = group.clone().filter(|&k| vals[k] <= cutoff).count();
        if below == 0 {
            break;
        }
        if below < group.len() {
            split_cluster = true;
        }
        rank = group.end;
    }
    let basis = vecs.columns(0, rank).into_owned();
    Ok(LowEnergyProjector { projector: linalg::range_projector(&basis), basis, rank, split_cluster })
}

/// How ε compares the low-energy block with the encoded target.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetMode {
    #[default]
    Exact,
    /// Subtract the best multiple of P before taking the norm.
    ModuloIdentity,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub delta: f64,
    pub low_space_dim: usize,
    pub encoded_dim: usize,
    pub rank_match: bool,
    pub eta: Option<f64>,
    pub eps: Option<f64>,
    pub identity_offset: Option<f64>,
    pub mode: OffsetMode,
    pub split_cluster: bool,
}

/// Measures (η, ε) for H′ simulating H through the encoding V at cutoff Δ.
///
/// Ṽ is the polar factor of P V, the isometry onto range(P) closest to V.
/// η = ‖Ṽ − V‖ and ε = ‖H′P − ṼHṼ†‖, both spectral norms.
pub fn certify_simulation(h_prime: &Mat, h: &Mat, v: &Mat, delta: f64, mode: OffsetMode) -> Result<SimulationReport> {
    if v.nrows() != h_prime.nrows() || v.ncols() != h.nrows() || !h.is_square() {
        return Err(Error::InvalidDimension(format!(
            "H' is {}x{}, H is {}x{}, V is {}x{}",
            h_prime.nrows(),
            h_prime.ncols(),
            h.nrows(),
            h.ncols(),
            v.nrows(),
            v.ncols()
        )));
    }
    let isometry_err = linalg::max_abs(&(v.adjoint() * v - linalg::eye(v.ncols())));
    if isometry_err > 1e-8 {
        return Err(Error::InvalidDimension(format!("V is not an isometry (deviation {isometry_err:.3e})")));
    }
    let low = low_energy_projector(h_prime, delta)?;
    let mut report = SimulationReport {
        delta,
        low_space_dim: low.rank,
        encoded_dim: v.ncols(),
        rank_match: low.rank == v.ncols(),
        eta: None,
        eps: None,
        identity_offset: None,
        mode,
        split_cluster: low.split_cluster,
    };
    if !report.rank_match {
        return Ok(report);
    }
    let p = &low.projector;
    let tilde = linalg::polar(&(p * v), 1e-12)?;
    report.eta = Some(linalg::spectral_norm(&(&tilde - v)));
    // H′P restricted to the low-energy space, expressed as a full operator.
    let low_block = p * h_prime * p;
    let encoded = &tilde * h * tilde.adjoint();
    let diff = &low_block - &encoded;
    let mut diff = (&diff + diff.adjoint()).scale(0.5);
    match mode {
        OffsetMode::Exact => report.identity_offset = Some(0.0),
        OffsetMode::ModuloIdentity => {
            let c = linalg::trace(&diff).re / low.rank.max(1) as f64;
            diff -= p.scale(c);
            report.identity_offset = Some(c);
        }
    }
    report.eps = Some(linalg::spectral_norm(&diff));
    Ok(report)
}

/// Certifies a gadget at Δ: H′ = ΔH₀ + Σ Δ^{e_k} H_k, cutoff Δ/2, encoding and
/// logical target supplied by the caller.
pub fn certify_gadget(g: &GadgetInstance, logical_target: &Mat, delta: f64, mode: OffsetMode) -> Result<SimulationReport> {
    let v = g
        .encoding
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("gadget '{}' has no encoding isometry", g.name)))?;
    let h_sim = g.h0.scale(delta) + g.perturbations.combined(g.order, delta, g.dim())?;
    let mut report = certify_simulation(&h_sim, logical_target, v, delta / 2.0, mode)?;
    report.delta = delta;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::projection_order1_gadget;
    use crate::linalg::{proj, random_hermitian, random_state, random_unitary, real};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> Mat {
        Mat::from_diagonal(&crate::linalg::Vect::from_iterator(v.len(), v.iter().map(|&x| real(x))))
    }

    #[test]
    fn projector_of_rank_one_penalty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_state(4, &mut rng);
        let h = linalg::eye(4) - proj(&psi);
        let low = low_energy_projector(&h, 0.5).unwrap();
        assert_eq!(low.rank, 1);
        assert!(linalg::max_abs(&(low.projector - proj(&psi))) < 1e-12);
    }

    #[test]
    fn diagonal_cutoff() {
        let low = low_energy_projector(&diag(&[0.0, 1.0, 2.0, 3.0]), 1.5).unwrap();
        assert_eq!(low.rank, 2);
        assert!(!low.split_cluster);
    }

    #[test]
    fn identity_simulates_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(5, &mut rng);
        let r = certify_simulation(&h, &h, &linalg::eye(5), 1e6, OffsetMode::Exact).unwrap();
        assert!(r.rank_match);
        assert!(r.eta.unwrap() < 1e-12);
        assert!(r.eps.unwrap() < 1e-12);
    }

    #[test]
    fn rank_mismatch_has_no_measurements() {
        let h = diag(&[0.0, 1.0, 2.0]);
        let v = linalg::eye(3).columns(0, 1).into_owned();
        let r = certify_simulation(&h, &diag(&[0.0]), &v, 1.5, OffsetMode::Exact).unwrap();
        assert!(!r.rank_match);
        assert!(r.eta.is_none() && r.eps.is_none());
    }

    #[test]
    fn matching_range_gives_zero_eta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(6, &mut rng);
        let h = &u * diag(&[0.0, 0.1, 0.2, 5.0, 6.0, 7.0]) * u.adjoint();
        let v = u.columns(0, 3).into_owned();
        let r = certify_simulation(&h, &diag(&[0.0, 0.1, 0.2]), &v, 1.0, OffsetMode::Exact).unwrap();
        assert!(r.eta.unwrap() < 1e-12);
        assert!(r.eps.unwrap() < 1e-12);
    }

    #[test]
    fn eps_is_invariant_under_rotating_target_and_encoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = projection_order1_gadget(7, 1e-9).unwrap().instance;
        let target = crate::gadgets::to_logical_target(&g);
        let delta = 1e4;
        let a = certify_gadget(&g, &target, delta, OffsetMode::Exact).unwrap();
        let w = random_unitary(target.nrows(), &mut rng);
        let rotated = g.clone().with_encoding(g.encoding.as_ref().unwrap() * w.adjoint());
        let b = certify_gadget(&rotated, &(&w * &target * w.adjoint()), delta, OffsetMode::Exact).unwrap();
        assert!((a.eps.unwrap() - b.eps.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn order1_gadget_error_at_large_delta() {
        let g = projection_order1_gadget(7, 1e-9).unwrap().instance;
        let target = crate::gadgets::to_logical_target(&g);
        let r = certify_gadget(&g, &target, 1e8, OffsetMode::Exact).unwrap();
        assert!(r.rank_match);
        assert!(r.eps.unwrap() <= 1e-6, "{:?}", r);
    }
}
