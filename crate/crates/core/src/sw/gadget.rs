use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::sw::series::{chain, Perturbations};
use crate::sw::split::{block_split, default_split_tol, BlockSplit};

/// A perturbative gadget ready for assembly: heavy term, perturbations and the
/// operator it is meant to simulate on the ground space.
#[derive(Clone, Debug)]
pub struct GadgetInstance {
    pub name: String,
    pub order: usize,
    pub local_dim: usize,
    pub n_sites: usize,
    pub h0: Mat,
    pub perturbations: Perturbations,
    pub split: BlockSplit,
    /// Physical sites carrying each logical site.
    pub site_map: Vec<Vec<usize>>,
    /// V H_target V† as a full-space operator, when known.
    pub target: Option<Mat>,
    /// Encoding isometry from the logical space into the ground space.
    pub encoding: Option<Mat>,
}

impl GadgetInstance {
    pub fn new(name: &str, order: usize, local_dim: usize, n_sites: usize, h0: Mat, perturbations: Perturbations) -> Result<Self> {
        if !(1..=4).contains(&order) {
            return Err(Error::OutOfRange(format!("order {order} not in 1..=4")));
        }
        let dim = linalg::checked_pow(local_dim, n_sites)?;
        if h0.nrows() != dim || h0.ncols() != dim {
            return Err(Error::InvalidDimension(format!("H0 is {}x{}, expected {dim}", h0.nrows(), h0.ncols())));
        }
        perturbations.scaled_terms(order)?;
        let split = block_split(&h0, default_split_tol(&h0))?;
        Ok(GadgetInstance {
            name: name.to_string(),
            order,
            local_dim,
            n_sites,
            h0,
            perturbations,
            split,
            site_map: Vec::new(),
            target: None,
            encoding: None,
        })
    }

    pub fn with_target(mut self, target: Mat) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_site_map(mut self, site_map: Vec<Vec<usize>>) -> Self {
        self.site_map = site_map;
        self
    }

    pub fn with_encoding(mut self, encoding: Mat) -> Self {
        self.encoding = Some(encoding);
        self
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    /// Λ = max ‖H_k‖.
    pub fn lambda(&self) -> f64 {
        self.perturbations.lambda()
    }

    fn zero(&self) -> Mat {
        linalg::zeros(self.dim(), self.dim())
    }

    /// The order-specific effective operator predicted by perturbation theory, compressed
    /// to the ground basis of the split.
    pub fn predicted_effective(&self) -> Mat {
        let p = &self.perturbations;
        let zero = self.zero();
        let h1 = p.h1.as_ref().unwrap_or(&zero);
        let h2 = p.h2.as_ref().unwrap_or(&zero);
        let h4 = p.h4.as_ref().unwrap_or(&zero);
        let s = &self.split;
        match self.order {
            1 => s.compress(h1),
            2 => s.compress(h1) - chain(s, &[h2, h2]),
            3 => s.compress(h1) + chain(s, &[h2, h2, h2]),
            _ => s.compress(h1) + chain(s, &[h4, h2, h4]) - chain(s, &[h4, h4, h4, h4]),
        }
    }

    /// Target compressed to the ground basis, falling back to the predicted operator.
    pub fn target_ground_block(&self) -> Mat {
        match &self.target {
            Some(t) => self.split.compress(t),
            None => self.predicted_effective(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub gadget: String,
    pub order: usize,
    pub lambda: f64,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.residual)
    }
}

/// Residual norms of every precondition of the order-specific simulation bound.
pub fn check_gadget_conditions(g: &GadgetInstance, tol: f64) -> ConditionReport {
    let s = &g.split;
    let p = &g.perturbations;
    let zero = g.zero();
    let h1 = p.h1.as_ref().unwrap_or(&zero);
    let h1p = p.h1_prime.as_ref().unwrap_or(&zero);
    let h2 = p.h2.as_ref().unwrap_or(&zero);
    let h3 = p.h3.as_ref().unwrap_or(&zero);
    let h4 = p.h4.as_ref().unwrap_or(&zero);
    let norm = linalg::spectral_norm;

    let mut checks = Vec::new();
    let mut push = |name: &str, residual: f64| {
        checks.push(ConditionCheck { name: name.to_string(), residual, passed: residual <= tol });
    };
    push("H0 ground energy is zero", s.ground_energy.abs());
    push("H0 excited gap is at least 1", (1.0 - s.gap).max(0.0));
    match g.order {
        1 => {}
        2 => {
            push("H1 block-diagonal", s.off_diagonal_norm(h1));
            push("(H2)-- = 0", norm(&s.compress(h2)));
        }
        3 => {
            push("H1 block-diagonal", s.off_diagonal_norm(h1));
            push("H1' block-diagonal", s.off_diagonal_norm(h1p));
            push("(H2)-- = 0", norm(&s.compress(h2)));
            push("(H1')-- = (H2)-+ H0^-1 (H2)+-", norm(&(s.compress(h1p) - chain(s, &[h2, h2]))));
        }
        _ => {
            push("H2 block-diagonal", s.off_diagonal_norm(h2));
            push("H3 block-diagonal", s.off_diagonal_norm(h3));
            push("(H4)-- = 0", norm(&s.compress(h4)));
            push("(H2)-- = P H4 H0^-1 H4 P", norm(&(s.compress(h2) - chain(s, &[h4, h4]))));
            push("(H3)-- = -P H4 H0^-1 H4 H0^-1 H4 P", norm(&(s.compress(h3) + chain(s, &[h4, h4, h4]))));
        }
    }
    ConditionReport { gadget: g.name.clone(), order: g.order, lambda: g.lambda(), checks }
}

/// ΔH₀ + Σ Δ^{e_k} H_k, after verifying the gadget conditions at `tol`.
pub fn assemble_simulator(g: &GadgetInstance, delta: f64, tol: f64) -> Result<Mat> {
    let report = check_gadget_conditions(g, tol);
    if let Some(f) = report.first_failure() {
        return Err(Error::Condition { name: f.name.clone(), residual: f.residual });
    }
    Ok(g.h0.scale(delta) + g.perturbations.combined(g.order, delta, g.dim())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{proj, random_hermitian, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn projector_gadget(order: usize, p: Perturbations) -> GadgetInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = random_state(2, &mut rng);
        let h0 = linalg::kron(&linalg::eye(2), &(linalg::eye(2) - proj(&psi)));
        GadgetInstance::new("test", order, 2, 2, h0, p).unwrap()
    }

    #[test]
    fn zero_perturbations_pass() {
        for order in 1..=4 {
            let g = projector_gadget(order, Perturbations::default());
            let r = check_gadget_conditions(&g, 1e-12);
            assert!(r.passed(), "{order}");
            assert!(r.checks.iter().all(|c| c.residual < 1e-12));
        }
    }

    #[test]
    fn simulator_scaling_by_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h1 = random_hermitian(4, &mut rng);
        let g = projector_gadget(1, Perturbations { h1: Some(h1.clone()), ..Default::default() });
        let sim = assemble_simulator(&g, 100.0, 1e-9).unwrap();
        assert!(linalg::max_abs(&(sim - (g.h0.scale(100.0) + &h1))) < 1e-12);
    }

    #[test]
    fn violated_condition_is_named() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h2 = random_hermitian(4, &mut rng);
        let g = projector_gadget(2, Perturbations { h2: Some(h2), ..Default::default() });
        match assemble_simulator(&g, 100.0, 1e-9) {
            Err(Error::Condition { name, .. }) => assert_eq!(name, "(H2)-- = 0"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
