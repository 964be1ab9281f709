use crate::error::Result;
use crate::gadgets::{encoding_residual, norm, on, GadgetOutput, GadgetReport, CONDITION_TOL};
use crate::interactions::{aklt, heisenberg_su2};
use crate::linalg::{self, Mat};
use crate::operator::place_states;
use crate::rep::antisymmetric_state;
use crate::sw::series::chain;
use crate::sw::{GadgetInstance, Perturbations};

const N: usize = 5;
const D: usize = 3;

/// Second-order gadget turning AKLT couplings into the SU(3)-invariant h + h²
/// between qutrits 0 and 1, mediated by an antisymmetric triple on qutrits 2..5.
pub fn aklt_su3_gadget(tol: f64) -> Result<GadgetOutput> {
    let lambda1 = 22.0;
    let lambda2 = 27f64.sqrt();
    let ha = aklt()?.operator.into_matrix();
    let h = heisenberg_su2(D)?.operator.into_matrix();
    let h2 = &h * &h;
    let dim = D.pow(N as u32);
    let id = linalg::eye(dim);

    let h0 = on(&ha, D, &[2, 3], N)? + on(&ha, D, &[3, 4], N)? + on(&ha, D, &[2, 4], N)? + id.scale(6.0);
    let pert2 = (on(&ha, D, &[0, 2], N)? + on(&ha, D, &[1, 2], N)? - id.scale(8.0 / 3.0)).scale(lambda2);
    let pert1 = on(&ha, D, &[0, 1], N)?.scale(lambda1);
    let h12 = on(&h, D, &[0, 1], N)?;
    let h12sq = on(&h2, D, &[0, 1], N)?;
    let target = (&h12 + &h12sq).scale(20.0) - id.scale(272.0 / 3.0);

    let psi = antisymmetric_state(D)?;
    let encoding = {
        let mut v = linalg::zeros(dim, D * D);
        for k in 0..D * D {
            let sys = linalg::basis_vector(D * D, k);
            let s = place_states(&[(&[0, 1], &sys), (&[2, 3, 4], &psi)], D, N)?;
            v.set_column(k, &s);
        }
        v
    };

    let g = GadgetInstance::new(
        "aklt-su3",
        2,
        D,
        N,
        h0,
        Perturbations { h1: Some(pert1.clone()), h2: Some(pert2.clone()), ..Default::default() },
    )?
    .with_target(target.clone())
    .with_site_map(vec![vec![0], vec![1]])
    .with_encoding(encoding.clone());

    let s = &g.split;
    let second = -chain(s, &[&pert2, &pert2]);
    let second_expected = s.compress(&(&h12.scale(23.0) + &h12sq + id.scale(136.0 / 3.0))).scale(-2.0 * lambda2 * lambda2 / 27.0);
    let simulated = s.compress(&pert1) + &second;
    let expected = s.compress(&target);

    let mut report = GadgetReport::new("aklt-su3", D);
    report.param("lambda1", lambda1).param("lambda2", lambda2);
    report.absorb_conditions(&g, CONDITION_TOL);
    report.check("ground space is the antisymmetric mediator state", encoding_residual(&g, &encoding), CONDITION_TOL);
    report.check("P H2 P = 0", norm(&s.compress(&pert2)), CONDITION_TOL);
    report.check("second-order term = -(2 l2^2/27)(23h + h^2 + 136/3 I)", norm(&(&second - &second_expected)), tol);
    report.check("simulated operator = 20(h + h^2) - 272/3 I", norm(&(&simulated - &expected)), tol);
    report.derive("ground_dim", s.ground_dim as f64).derive("h0_gap", s.gap);
    report.operators(&logical(&g, &simulated, &encoding), &logical(&g, &expected, &encoding));
    Ok(GadgetOutput { instance: g, report })
}

fn logical(g: &GadgetInstance, block: &Mat, encoding: &Mat) -> Mat {
    crate::gadgets::to_logical(g, block, encoding)
}
