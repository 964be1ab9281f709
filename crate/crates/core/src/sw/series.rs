use crate::error::{Error, Result};
use crate::linalg::{zeros, Mat};
use crate::sw::split::BlockSplit;

/// Perturbation operators of a gadget, all on the full simulator space.
#[derive(Clone, Debug, Default)]
pub struct Perturbations {
    pub h1: Option<Mat>,
    pub h1_prime: Option<Mat>,
    pub h2: Option<Mat>,
    pub h3: Option<Mat>,
    pub h4: Option<Mat>,
}

impl Perturbations {
    /// (name, operator, Δ exponent) of every term present, for a given order.
    pub fn scaled_terms(&self, order: usize) -> Result<Vec<(&'static str, &Mat, f64)>> {
        let allowed: &[&str] = match order {
            1 => &["H1"],
            2 => &["H1", "H2"],
            3 => &["H1", "H1'", "H2"],
            4 => &["H1", "H2", "H3", "H4"],
            _ => return Err(Error::OutOfRange(format!("order {order} not in 1..=4"))),
        };
        let exponent = |name: &str| -> f64 {
            match (order, name) {
                (2, "H2") => 0.5,
                (3, "H2") => 2.0 / 3.0,
                (3, "H1'") => 1.0 / 3.0,
                (4, "H4") => 0.75,
                (4, "H2") => 0.5,
                (4, "H3") => 0.25,
                _ => 0.0,
            }
        };
        let mut out = Vec::new();
        for (name, op) in [("H1", &self.h1), ("H1'", &self.h1_prime), ("H2", &self.h2), ("H3", &self.h3), ("H4", &self.h4)] {
            if let Some(m) = op {
                if !allowed.contains(&name) {
                    return Err(Error::Unsupported(format!("{name} is not part of an order-{order} gadget")));
                }
                out.push((name, m, exponent(name)));
            }
        }
        Ok(out)
    }

    /// A = Σ Δ^{e_k} H_k with the exponents of the order-specific simulator.
    pub fn combined(&self, order: usize, delta: f64, dim: usize) -> Result<Mat> {
        let mut a = zeros(dim, dim);
        for (_, m, e) in self.scaled_terms(order)? {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidDimension("perturbation dimension differs from H0".into()));
            }
            a += m.scale(delta.powf(e));
        }
        Ok(a)
    }

    /// max ‖H_k‖ over the terms present.
    pub fn lambda(&self) -> f64 {
        [&self.h1, &self.h1_prime, &self.h2, &self.h3, &self.h4]
            .iter()
            .filter_map(|o| o.as_ref())
            .map(crate::linalg::spectral_norm)
            .fold(0.0, f64::max)
    }
}

/// Blocks of an operator in the H₀ eigenbasis.
pub(crate) struct Blocks {
    pub mm: Mat,
    pub mp: Mat,
    pub pm: Mat,
    pub pp: Mat,
    /// 1/E for each excited eigenvalue E.
    pub inv: Vec<f64>,
}

impl Blocks {
    pub fn new(split: &BlockSplit, op: &Mat) -> Self {
        let t = split.to_eigenbasis(op);
        let g = split.ground_dim;
        let e = split.dim() - g;
        Blocks {
            mm: t.view((0, 0), (g, g)).into_owned(),
            mp: t.view((0, g), (g, e)).into_owned(),
            pm: t.view((g, 0), (e, g)).into_owned(),
            pp: t.view((g, g), (e, e)).into_owned(),
            inv: split.eigenvalues[g..].iter().map(|x| 1.0 / x).collect(),
        }
    }

    /// Multiplies rows of an excited-space block by G^power.
    pub fn g_left(&self, m: &Mat, power: i32) -> Mat {
        let mut out = m.clone();
        for (r, w) in self.inv.iter().enumerate() {
            out.row_mut(r).scale_mut(w.powi(power));
        }
        out
    }
}

/// Schrieffer-Wolff series terms H_eff,1..H_eff,4, compressed to the ground
/// eigenbasis of the split (g × g each). All four are kept; the truncation
/// matching the gadget order is `partial_sum(order)`.
#[derive(Clone, Debug)]
pub struct EffectiveSeries {
    pub order: usize,
    pub delta: f64,
    pub terms: Vec<Mat>,
}

impl EffectiveSeries {
    /// Σ_{k ≤ upto} H_eff,k.
    pub fn partial_sum(&self, upto: usize) -> Mat {
        let g = self.terms[0].nrows();
        self.terms.iter().take(upto).fold(zeros(g, g), |acc, t| acc + t)
    }

    pub fn total(&self) -> Mat {
        self.partial_sum(4)
    }

    /// Largest anti-Hermitian part across the terms.
    pub fn hermiticity_residual(&self) -> f64 {
        self.terms.iter().map(crate::linalg::hermiticity_deviation).fold(0.0, f64::max)
    }
}

fn herm(m: Mat) -> Mat {
    let adj = m.adjoint();
    m + adj
}

/// Series terms for H_sim = ΔH₀ + A with A built from `p` for the given order.
pub fn effective_series(split: &BlockSplit, p: &Perturbations, delta: f64, order: usize) -> Result<EffectiveSeries> {
    let a = p.combined(order, delta, split.dim())?;
    Ok(series_for_operator(split, &a, delta, order))
}

/// Series terms for an explicit A. All four terms are computed; `order` is recorded.
pub fn series_for_operator(split: &BlockSplit, a: &Mat, delta: f64, order: usize) -> EffectiveSeries {
    let b = Blocks::new(split, a);
    let g_pm = b.g_left(&b.pm, 1);
    let g2_pm = b.g_left(&b.pm, 2);
    let g3_pm = b.g_left(&b.pm, 3);
    let ag_a = &b.mp * &g_pm;
    let ag2_a = &b.mp * &g2_pm;
    let ag3_a = &b.mp * &g3_pm;
    let app_g_pm = &b.pp * &g_pm;
    let g_app_g_pm = b.g_left(&app_g_pm, 1);
    let agaga = &b.mp * &g_app_g_pm;

    let h1 = b.mm.clone();
    let h2 = -ag_a.unscale(delta);
    let h3 = agaga.unscale(delta * delta) - herm(&ag2_a * &b.mm).unscale(2.0 * delta * delta);

    let g2_app_g_pm = b.g_left(&app_g_pm, 2);
    let ag2aga = &b.mp * &g2_app_g_pm;
    let app_g2_pm = &b.pp * &g2_pm;
    let agag2a = &b.mp * b.g_left(&app_g2_pm, 1);
    let app_gappg_pm = &b.pp * &g_app_g_pm;
    let agagaga = &b.mp * b.g_left(&app_gappg_pm, 1);
    let inner = &ag2_a * &ag_a - agagaga + &ag2aga * &b.mm + &agag2a * &b.mm - &ag3_a * &b.mm * &b.mm;
    let h4 = herm(inner).unscale(2.0 * delta.powi(3));
    EffectiveSeries { order, delta, terms: vec![h1, h2, h3, h4] }
}

/// Π₋ O₁ H₀⁻¹ O₂ H₀⁻¹ … O_k Π₋ compressed to the ground basis.
pub(crate) fn chain(split: &BlockSplit, ops: &[&Mat]) -> Mat {
    let v = &split.eigenvectors;
    let g = split.ground_dim;
    let inv = split.inverse_diagonal(1);
    let mut iter = ops.iter().map(|op| v.adjoint() * *op * v);
    let mut acc = iter.next().expect("chain needs at least one operator").rows(0, g).into_owned();
    for t in iter {
        for (c, w) in inv.iter().enumerate() {
            acc.column_mut(c).scale_mut(*w);
        }
        acc *= t;
    }
    acc.columns(0, g).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, max_abs, proj, random_hermitian, random_state};
    use crate::sw::split::block_split;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn first_order_only_when_others_absent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_state(4, &mut rng);
        let split = block_split(&(linalg::eye(4) - proj(&psi)), 1e-10).unwrap();
        let h1 = random_hermitian(4, &mut rng);
        let p = Perturbations { h1: Some(h1.clone()), ..Default::default() };
        let s = effective_series(&split, &p, 1e6, 1).unwrap();
        assert!(max_abs(&(&s.terms[0] - split.compress(&h1))) < 1e-12);
        let zero = Perturbations::default();
        let s = effective_series(&split, &zero, 1e3, 4).unwrap();
        assert!(s.terms.iter().all(|t| max_abs(t) == 0.0));
    }

    #[test]
    fn order_term_mismatch_is_an_error() {
        let p = Perturbations { h4: Some(linalg::eye(2)), ..Default::default() };
        assert!(p.combined(2, 10.0, 2).is_err());
        assert!(p.combined(5, 10.0, 2).is_err());
    }

    #[test]
    fn chain_matches_direct_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let psi = random_state(6, &mut rng);
        let split = block_split(&(linalg::eye(6) - proj(&psi)).scale(2.0), 1e-10).unwrap();
        let a = random_hermitian(6, &mut rng);
        let b = random_hermitian(6, &mut rng);
        let direct = split.compress(&(&a * split.h0_pinv() * &b));
        assert!(max_abs(&(chain(&split, &[&a, &b]) - direct)) < 1e-12);
    }

    #[test]
    fn terms_are_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h0 = {
            let mut m = linalg::zeros(8, 8);
            for k in 2..8 {
                m[(k, k)] = linalg::real(1.0 + 0.3 * k as f64);
            }
            let u = linalg::random_unitary(8, &mut rng);
            &u * m * u.adjoint()
        };
        let split = block_split(&h0, 1e-10).unwrap();
        let a = random_hermitian(8, &mut rng);
        let s = series_for_operator(&split, &a, 50.0, 4);
        assert!(s.hermiticity_residual() < 1e-11);
    }
}
