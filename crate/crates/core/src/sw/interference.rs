use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// One fourth-order mediator gadget inside a shared system: its heavy term and
/// H₄, both as full-space operators.
#[derive(Clone, Debug)]
pub struct InterferenceGadget {
    pub h0: Mat,
    pub h4: Mat,
}

#[derive(Clone, Debug)]
pub struct InterferenceReport {
    /// Projector onto the joint ground space Π = Π_i Π₋^(i).
    pub pi: Mat,
    /// Σ_{i≠j} cross terms of the general expression, full-space.
    pub general: Mat,
    /// -½ Σ_{i<j} Π[H₄^(i), H₄^(j)]²Π.
    pub simplified: Mat,
    /// ‖H₀^(i) H₄^(i) Π − H₄^(i) Π‖ per gadget; zero when the simplified form applies.
    pub projector_condition: Vec<f64>,
    /// ‖Π₋^(i) H₄^(i) Π₋^(i)‖ per gadget.
    pub h4_ground_block: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterferenceSummary {
    pub general_vs_simplified: f64,
    pub projector_condition: Vec<f64>,
    pub h4_ground_block: Vec<f64>,
}

impl InterferenceReport {
    /// ‖general − simplified‖; meaningful when every projector condition holds.
    pub fn agreement(&self) -> f64 {
        linalg::spectral_norm(&(&self.general - &self.simplified))
    }

    pub fn summary(&self) -> InterferenceSummary {
        InterferenceSummary {
            general_vs_simplified: self.agreement(),
            projector_condition: self.projector_condition.clone(),
            h4_ground_block: self.h4_ground_block.clone(),
        }
    }
}

fn ground_projector(h0: &Mat, tol: f64) -> Result<Mat> {
    let (vals, vecs) = linalg::eigh(h0);
    if vals.first().is_some_and(|v| v.abs() > tol) {
        return Err(Error::GroundEnergyNotZero(vals[0]));
    }
    let g = vals.iter().take_while(|v| v.abs() <= tol).count();
    Ok(linalg::range_projector(&vecs.columns(0, g).into_owned()))
}

/// Cross-gadget interference between fourth-order gadgets sharing a system register.
pub fn cross_gadget_interference(gadgets: &[InterferenceGadget], tol: f64) -> Result<InterferenceReport> {
    let n = gadgets.first().map(|g| g.h0.nrows()).ok_or_else(|| Error::OutOfRange("no gadgets given".into()))?;
    if gadgets.iter().any(|g| g.h0.nrows() != n || g.h4.nrows() != n) {
        return Err(Error::InvalidDimension("gadgets act on different spaces".into()));
    }
    let mut pi = linalg::eye(n);
    let mut locals = Vec::with_capacity(gadgets.len());
    for g in gadgets {
        let p = ground_projector(&g.h0, tol)?;
        pi = &pi * &p;
        locals.push(p);
    }
    let pinv: Vec<Mat> = gadgets.iter().map(|g| linalg::hermitian_pinv(&g.h0, 0.5)).collect();
    let mut general = linalg::zeros(n, n);
    let mut simplified = linalg::zeros(n, n);
    for i in 0..gadgets.len() {
        for j in 0..gadgets.len() {
            if i == j {
                continue;
            }
            let (a, b) = (&gadgets[i].h4, &gadgets[j].h4);
            let (gi, gj) = (&pinv[i], &pinv[j]);
            let gij = linalg::hermitian_pinv(&(&gadgets[i].h0 + &gadgets[j].h0), 0.5);
            let t1 = a * gi * b * gj * b * gi * a;
            let t2 = a * gi * b * &gij * b * gi * a;
            let t3 = a * gi * b * &gij * a * gj * b;
            general += &pi * (t1 - t2 - t3) * &pi;
            if i < j {
                let c = linalg::commutator(a, b);
                simplified -= (&pi * &c * &c * &pi).scale(0.5);
            }
        }
    }
    let projector_condition = gadgets
        .iter()
        .map(|g| linalg::spectral_norm(&(&g.h0 * &g.h4 * &pi - &g.h4 * &pi)))
        .collect();
    let h4_ground_block = gadgets
        .iter()
        .zip(&locals)
        .map(|(g, p)| linalg::spectral_norm(&(p * &g.h4 * p)))
        .collect();
    Ok(InterferenceReport { pi, general, simplified, projector_condition, h4_ground_block })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron_all, proj, random_hermitian, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// H₄ with its ground block removed so that Π₋H₄Π₋ = 0.
    fn strip_ground_block(h4: &Mat, p: &Mat) -> Mat {
        h4 - p * h4 * p
    }

    #[test]
    fn disjoint_gadgets_do_not_interfere() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let id2 = linalg::eye(2);
        // Sites: system 0, system 1, mediator 2, mediator 3.
        let m0 = linalg::eye(2) - proj(&random_state(2, &mut rng));
        let m1 = linalg::eye(2) - proj(&random_state(2, &mut rng));
        let h0a = kron_all(&[&id2, &id2, &m0, &id2]);
        let h0b = kron_all(&[&id2, &id2, &id2, &m1]);
        let pa = linalg::eye(16) - &h0a;
        let pb = linalg::eye(16) - &h0b;
        let a_local = random_hermitian(4, &mut rng);
        let b_local = random_hermitian(4, &mut rng);
        let a = crate::operator::embed_matrix(&a_local, 2, &[0, 2], 4).unwrap();
        let b = crate::operator::embed_matrix(&b_local, 2, &[1, 3], 4).unwrap();
        let gadgets = [
            InterferenceGadget { h0: h0a, h4: strip_ground_block(&a, &pa) },
            InterferenceGadget { h0: h0b, h4: strip_ground_block(&b, &pb) },
        ];
        let r = cross_gadget_interference(&gadgets, 1e-10).unwrap();
        assert!(linalg::max_abs(&r.general) < 1e-12);
        assert!(linalg::max_abs(&r.simplified) < 1e-12);
    }

    #[test]
    fn general_form_reduces_to_commutator_form_for_projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let id2 = linalg::eye(2);
        for _ in 0..5 {
            // Sites: shared system 0, mediators 1 and 2.
            let m1 = linalg::eye(2) - proj(&random_state(2, &mut rng));
            let m2 = linalg::eye(2) - proj(&random_state(2, &mut rng));
            let h0a = kron_all(&[&id2, &m1, &id2]);
            let h0b = kron_all(&[&id2, &id2, &m2]);
            let pa = linalg::eye(8) - &h0a;
            let pb = linalg::eye(8) - &h0b;
            let a = crate::operator::embed_matrix(&random_hermitian(4, &mut rng), 2, &[0, 1], 3).unwrap();
            let b = crate::operator::embed_matrix(&random_hermitian(4, &mut rng), 2, &[0, 2], 3).unwrap();
            let gadgets = [
                InterferenceGadget { h0: h0a, h4: strip_ground_block(&a, &pa) },
                InterferenceGadget { h0: h0b, h4: strip_ground_block(&b, &pb) },
            ];
            let r = cross_gadget_interference(&gadgets, 1e-10).unwrap();
            assert!(r.projector_condition.iter().all(|&x| x < 1e-12));
            assert!(r.h4_ground_block.iter().all(|&x| x < 1e-12));
            assert!(r.agreement() < 1e-10, "{}", r.agreement());
            assert!(linalg::max_abs(&r.general) > 1e-6);
        }
    }
}
