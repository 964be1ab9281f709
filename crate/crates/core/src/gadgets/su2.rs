use crate::basis::spin_operators;
use crate::error::{Error, Result};
use crate::gadgets::{encoding_residual, fit_operator, norm, on, to_logical, GadgetOutput, GadgetReport, CONDITION_TOL};
use crate::interactions::heisenberg_su2;
use crate::linalg::{self, c64, kron, Mat, Vect};
use crate::rep::singlet_state_su2;
use crate::sw::series::chain;
use crate::sw::{cross_gadget_interference, GadgetInstance, InterferenceGadget, Perturbations};

/// λ = (d²−1)/4, the value of Σ_a S^a S^a.
pub fn su2_lambda(d: usize) -> f64 {
    (d as f64 * d as f64 - 1.0) / 4.0
}

/// (μ₁, μ₂) that make the fourth-order gadget produce α h + β h².
pub fn h_to_h2_weights(d: usize, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if !(beta >= 0.0) {
        return Err(Error::OutOfRange(format!("beta = {beta} must be non-negative")));
    }
    let l = su2_lambda(d);
    let mu2 = (135.0 * beta / (4.0 * (11.0 * l * l + 3.0 * l))).powf(0.25);
    let mu1 = alpha - mu2.powi(4) * l / 135.0 * (88.0 * l * l + 30.0 * l - 27.0);
    Ok((mu1, mu2))
}

/// Fourth-order mediator gadget producing α h₀₁ + β h₀₁² from SU(2)
/// Heisenberg couplings. Sites 0, 1 are the system, 2, 3 the singlet pair E, F.
///
/// The third-order term carries the sign that makes the condition
/// Π H₃ Π = −Π H₄ H₀⁻¹ H₄ H₀⁻¹ H₄ Π hold; the opposite sign is evaluated and
/// reported as `opposite_sign_h3_residual`.
pub fn h_to_h2_gadget(d: usize, alpha: f64, beta: f64, tol: f64) -> Result<GadgetOutput> {
    let (mu1, mu2) = h_to_h2_weights(d, alpha, beta)?;
    let n = 4;
    let l = su2_lambda(d);
    let h = heisenberg_su2(d)?.operator.into_matrix();
    let dim = linalg::checked_pow(d, n)?;
    let id = linalg::eye(dim);
    let h01 = on(&h, d, &[0, 1], n)?;
    let h01sq = &h01 * &h01;
    let shifted = &h01 + id.scale(l);

    let h0 = on(&h, d, &[2, 3], n)? + id.scale(l);
    let h4 = (on(&h, d, &[0, 2], n)? + on(&h, d, &[1, 2], n)?).scale(mu2);
    let h2 = shifted.scale(2.0 * mu2 * mu2 * l / 3.0);
    let h3 = shifted.scale(mu2.powi(3) * l / 3.0);
    let h1 = h01.scale(mu1);
    let c = mu2.powi(4) * l / 135.0 * (44.0 * l * l + 18.0 * l - 27.0) * l;
    let target = h01.scale(alpha) + h01sq.scale(beta) + id.scale(c);

    let psi = singlet_state_su2(d)?;
    let encoding = {
        let mut v = linalg::zeros(dim, d * d);
        for k in 0..d * d {
            v.set_column(k, &crate::operator::place_states(&[(&[0, 1], &linalg::basis_vector(d * d, k)), (&[2, 3], &psi)], d, n)?);
        }
        v
    };
    let g = GadgetInstance::new(
        "h-to-h2",
        4,
        d,
        n,
        h0,
        Perturbations { h1: Some(h1.clone()), h2: Some(h2.clone()), h3: Some(h3.clone()), h4: Some(h4.clone()), ..Default::default() },
    )?
    .with_target(target.clone())
    .with_site_map(vec![vec![0], vec![1]])
    .with_encoding(encoding.clone());

    let s = &g.split;
    let mut report = GadgetReport::new("h-to-h2", d);
    report.param("alpha", alpha).param("beta", beta).param("mu1", mu1).param("mu2", mu2).param("lambda", l);
    report.absorb_conditions(&g, CONDITION_TOL);
    report.check("ground space is the mediator singlet", encoding_residual(&g, &encoding), CONDITION_TOL);
    let third = chain(s, &[&h4, &h4, &h4]);
    report.derive("opposite_sign_h3_residual", norm(&(-s.compress(&h3) + &third)));

    let a = chain(s, &[&h4, &h2, &h4]);
    let b = chain(s, &[&h4, &h4, &h4, &h4]);
    let poly = h01sq.scale(4.0 * (11.0 * l + 3.0)) + h01.scale(88.0 * l * l + 30.0 * l - 27.0) + id.scale((44.0 * l * l + 18.0 * l - 27.0) * l);
    let closed = s.compress(&poly.scale(mu2.powi(4) * l / 135.0));
    report.check("A - B matches the lambda polynomial", norm(&(&a - &b - &closed)), tol);
    let simulated = s.compress(&h1) + &a - &b;
    report.check("simulated operator = alpha h + beta h^2 + c I", norm(&(&simulated - s.compress(&target))), tol);
    report.derive("identity_offset_c", c);
    report.derive("ground_dim", s.ground_dim as f64).derive("h0_gap", s.gap);
    report.operators(&to_logical(&g, &simulated, &encoding), &to_logical(&g, &s.compress(&target), &encoding));
    Ok(GadgetOutput { instance: g, report })
}

/// Interference between two h→h² gadgets sharing system qudit 0: sites 1, 2
/// are the other system qudits, (3, 4) and (5, 6) the mediator pairs.
/// Couplings are normalised to μ₂ = 1.
pub fn h_to_h2_interference(d: usize, tol: f64) -> Result<GadgetReport> {
    let n = 7;
    let dim = linalg::checked_pow(d, n)?;
    if dim > crate::operator::dense_limit() {
        return Err(Error::InvalidDimension(format!("dimension {dim} exceeds the dense limit")));
    }
    let l = su2_lambda(d);
    let h = heisenberg_su2(d)?.operator.into_matrix();
    let id = linalg::eye(dim);
    let gi = InterferenceGadget { h0: on(&h, d, &[3, 4], n)? + id.scale(l), h4: on(&h, d, &[0, 3], n)? + on(&h, d, &[1, 3], n)? };
    let gj = InterferenceGadget { h0: on(&h, d, &[5, 6], n)? + id.scale(l), h4: on(&h, d, &[0, 5], n)? + on(&h, d, &[2, 5], n)? };
    let r = cross_gadget_interference(&[gi, gj], 1e-8)?;
    let mut report = GadgetReport::new("h-to-h2-interference", d);
    report.param("lambda", l);
    for (k, v) in r.projector_condition.iter().enumerate() {
        report.check(&format!("H0 H4 P = H4 P for gadget {k}"), *v, CONDITION_TOL);
    }
    for (k, v) in r.h4_ground_block.iter().enumerate() {
        report.check(&format!("P H4 P = 0 for gadget {k}"), *v, CONDITION_TOL);
    }
    report.check("general interference equals the commutator form", r.agreement(), tol);
    let expected = r.pi.scale(l.powi(3) / 9.0);
    report.check("interference = (lambda^3/9) P", norm(&(&r.simplified - &expected)), tol);
    let tr_pi = linalg::trace(&r.pi).re;
    report.derive("interference_identity_coefficient", linalg::trace(&r.simplified).re / tr_pi);
    report.derive("lambda_cubed_over_9", l.powi(3) / 9.0);
    Ok(report)
}

/// Residuals of the eigenvalue-1 and eigenvalue-3 sectors of h_EF + λI
/// reached from the singlet: S^b_E|ψ⟩ and (½{S^b,S^c} − λ/3 δ)|ψ⟩.
pub fn singlet_sector_residuals(d: usize) -> Result<(f64, f64)> {
    let s = spin_operators(d)?;
    let psi = singlet_state_su2(d)?;
    let h = heisenberg_su2(d)?.operator.into_matrix();
    let l = su2_lambda(d);
    let h0 = &h + linalg::eye(d * d).scale(l);
    let id = linalg::eye(d);
    let ops: Vec<Mat> = s.components().iter().map(|m| kron(m, &id)).collect();
    let mut one: f64 = 0.0;
    let mut three: f64 = 0.0;
    for b in 0..3 {
        let v = &ops[b] * &psi;
        one = one.max((&h0 * &v - &v).norm());
        for c in 0..3 {
            let anti = (&ops[b] * &ops[c] + &ops[c] * &ops[b]).scale(0.5);
            let mut w: Vect = &anti * &psi;
            if b == c {
                w -= psi.scale(l / 3.0);
            }
            three = three.max((&h0 * &w - w.scale(3.0)).norm());
        }
    }
    Ok((one, three))
}

/// Spin-1 triplet inside a pair of spin-(d−1)/2 qudits: kernel of (C−2I)²,
/// ordered m = +1, 0, −1 and phased by the lowering operator.
pub fn pair_triplet_basis(d: usize) -> Result<Mat> {
    let s = spin_operators(d)?;
    let [sx, sy, sz] = s.components();
    let id = linalg::eye(d);
    let jx = kron(sx, &id) + kron(&id, sx);
    let jy = kron(sy, &id) + kron(&id, sy);
    let jz = kron(sz, &id) + kron(&id, sz);
    let c = &jx * &jx + &jy * &jy + &jz * &jz;
    let shifted = &c - linalg::eye(d * d).scale(2.0);
    let pen = &shifted * &shifted;
    let (vals, vecs) = linalg::eigh(&pen);
    let k = vals.iter().filter(|v| v.abs() < 1e-9).count();
    if k != 3 {
        return Err(Error::InvalidDimension(format!("(C-2I)^2 kernel has dimension {k}, expected 3")));
    }
    let kernel = vecs.columns(0, 3).into_owned();
    let jz_k = kernel.adjoint() * &jz * &kernel;
    let (zv, zvec) = linalg::eigh(&jz_k);
    let top_idx = zv.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap();
    let top: Vect = &kernel * zvec.column(top_idx);
    let lower = &jx - &jy * c64(0.0, 1.0);
    let mid: Vect = (&lower * &top).unscale(2f64.sqrt());
    let bottom: Vect = (&lower * &mid).unscale(2f64.sqrt());
    Ok(Mat::from_columns(&[top, mid, bottom]))
}

/// Two logical qutrits, each the triplet of a qudit pair, coupled by
/// h₀₂ + h₀₃ + h₁₂ + h₁₃; the logical operator is the spin-1 Heisenberg interaction.
pub fn qutrit_encoding_check(d: usize, tol: f64) -> Result<GadgetOutput> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let n = 4;
    let l = su2_lambda(d);
    let h = heisenberg_su2(d)?.operator.into_matrix();
    let pair_id = linalg::eye(d * d);
    let shifted = (&h + pair_id.scale(l - 1.0)).scale(2.0);
    let pen = &shifted * &shifted;
    let expansion = (&h * &h + h.scale(2.0 * (l - 1.0)) + pair_id.scale((l - 1.0) * (l - 1.0))).scale(4.0);

    let mut report = GadgetReport::new("qutrit-encoding", d);
    report.param("lambda", l);
    report.check("(C-2I)^2 = 4(h^2 + 2(lambda-1)h + (lambda-1)^2 I)", norm(&(&pen - &expansion)), CONDITION_TOL);
    let (vals, _) = linalg::eigh(&pen);
    let kernel = vals.iter().filter(|v| v.abs() < 1e-9).count();
    report.derive("kernel_dimension", kernel as f64);
    report.check("kernel dimension is 3", (kernel as f64 - 3.0).abs(), 0.0);
    report.check("(C-2I)^2 is positive semidefinite", (-vals[0]).max(0.0), CONDITION_TOL);

    let w = pair_triplet_basis(d)?;
    report.check("triplet basis is orthonormal", norm(&(w.adjoint() * &w - linalg::eye(3))), CONDITION_TOL);
    let enc = kron(&w, &w);
    let h0 = on(&pen, d, &[0, 1], n)? + on(&pen, d, &[2, 3], n)?;
    let h1 = on(&h, d, &[0, 2], n)? + on(&h, d, &[0, 3], n)? + on(&h, d, &[1, 2], n)? + on(&h, d, &[1, 3], n)?;
    let spin1 = heisenberg_su2(3)?.operator.into_matrix();
    let target = &enc * &spin1 * enc.adjoint();
    let g = GadgetInstance::new("qutrit-encoding", 1, d, n, h0, Perturbations { h1: Some(h1.clone()), ..Default::default() })?
        .with_target(target)
        .with_site_map(vec![vec![0, 1], vec![2, 3]])
        .with_encoding(enc.clone());
    report.absorb_conditions(&g, CONDITION_TOL);
    report.check("ground space is the product of triplets", encoding_residual(&g, &enc), CONDITION_TOL);
    let logical = to_logical(&g, &g.split.compress(&h1), &enc);
    report.check("projected coupling = spin-1 Heisenberg interaction", norm(&(&logical - &spin1)), tol);
    let (coeffs, _) = fit_operator(&logical, std::slice::from_ref(&spin1));
    report.derive("spin1_coefficient", coeffs[0]);
    report.operators(&logical, &spin1);
    Ok(GadgetOutput { instance: g, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_to_h2_conditions_and_closed_form() {
        for d in [2, 3] {
            let out = h_to_h2_gadget(d, 1.0, 1.0, 1e-9).unwrap();
            assert!(out.report.passed, "d={d} {:?}", out.report.failures());
            assert!(out.report.derived["opposite_sign_h3_residual"] > 0.1);
        }
    }

    #[test]
    fn h_to_h2_weights_d2() {
        // λ = 3/4: 11λ² + 3λ = 135/16, so μ₂⁴ = 4β.
        let (mu1, mu2) = h_to_h2_weights(2, 1.0, 1.0).unwrap();
        assert!((mu2.powi(4) - 4.0).abs() < 1e-12);
        let l: f64 = 0.75;
        assert!((mu1 - (1.0 - 4.0 * l / 135.0 * (88.0 * l * l + 30.0 * l - 27.0))).abs() < 1e-12);
        assert!(h_to_h2_weights(2, 1.0, -0.1).is_err());
    }

    #[test]
    fn interference_is_identity() {
        let r = h_to_h2_interference(2, 1e-9).unwrap();
        assert!(r.passed, "{:?}", r.failures());
        assert!((r.derived["interference_identity_coefficient"] - 0.421875 / 9.0).abs() < 1e-10);
    }

    #[test]
    fn singlet_sectors() {
        for d in 2..=5 {
            let (one, three) = singlet_sector_residuals(d).unwrap();
            assert!(one < 1e-10 && three < 1e-10, "{d}: {one} {three}");
        }
    }

    #[test]
    fn qutrit_encoding_reproduces_spin1() {
        for d in [2, 3, 4] {
            let out = qutrit_encoding_check(d, 1e-10).unwrap();
            assert!(out.report.passed, "d={d} {:?}", out.report.failures());
        }
    }
}
