use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::gadgets::{encoding_residual, fit_operator, norm, normalize_gap, on, to_logical, traceless, GadgetOutput, GadgetReport, CONDITION_TOL};
use crate::interactions::{bilinear_biquadratic, heisenberg_su2};
use crate::linalg::{self, kron, real, Mat, Vect};
use crate::operator::place_states;
use crate::sw::series::chain;
use crate::sw::{GadgetInstance, Perturbations};

const D: usize = 3;
const N: usize = 4;

fn spin1_h() -> Result<Mat> {
    Ok(heisenberg_su2(D)?.operator.into_matrix())
}

/// (|02⟩ − |11⟩ + |20⟩)/√3, the h = −2 eigenvector.
pub fn bbq_singlet() -> Vect {
    let s = 1.0 / 3f64.sqrt();
    let mut v = Vect::zeros(9);
    v[2] = real(s);
    v[4] = real(-s);
    v[6] = real(s);
    v
}

/// Whether θ lies in (0, arctan 1/3) ∪ (π/4, π) away from arctan 2.
pub fn mediator_range_ok(theta: f64) -> bool {
    let t = crate::interactions::reduce_angle(theta);
    let in_low = t > 0.0 && t < (1.0f64 / 3.0).atan();
    let in_high = t > FRAC_PI_4 && t < std::f64::consts::PI;
    (in_low || in_high) && (t - 2f64.atan()).abs() > 1e-9
}

/// Whether θ lies in (arctan 1/3, arctan 5).
pub fn logical_range_ok(theta: f64) -> bool {
    let t = crate::interactions::reduce_angle(theta);
    t > (1.0f64 / 3.0).atan() && t < 5f64.atan()
}

/// Coefficients (h², h, I) of h̃(θ) = Π H₂ H₀⁻¹ H₂ Π / λ₂² for the mediator gadget
/// with H₀ = h^θ₃₄ + (2α − 4β)I.
pub fn tilde_h_coefficients(theta: f64) -> [f64; 3] {
    let (a, b) = (theta.cos(), theta.sin());
    let pre = 2.0 / (9.0 * (a - b));
    [
        pre * b * b,
        pre * (6.0 * a.powi(3) - 12.0 * a * a * b + 8.0 * a * b * b - 3.0 * b.powi(3)) / (a - 3.0 * b),
        pre * 2.0 * (18.0 * a.powi(3) - 36.0 * a * a * b + 23.0 * a * b * b - 6.0 * b.powi(3)) / (3.0 * (a - 3.0 * b)),
    ]
}

/// Relative norm of the traceless part of h̃(θ) orthogonal to h^θ. Zero means the
/// mediator gadget cannot change the interaction angle.
pub fn tilde_h_independence(theta: f64) -> Result<f64> {
    let h = spin1_h()?;
    let h2 = &h * &h;
    let [c2, c1, c0] = tilde_h_coefficients(theta);
    let tilde = h2.scale(c2) + h.scale(c1) + linalg::eye(9).scale(c0);
    let bbq = traceless(&bilinear_biquadratic(theta)?.operator.into_matrix());
    let t = traceless(&tilde);
    let (_, rest) = fit_operator(&t, &[bbq]);
    Ok(rest / norm(&t).max(1e-300))
}

/// Second-order mediator gadget on four qutrits: system (0, 1), mediators (2, 3).
/// Returns the effective λ₁ h^θ − s λ₂² h̃(θ), where s is the sign of the heavy term.
pub fn bbq_mediator_gadget(theta: f64, lambda1: f64, lambda2: f64, tol: f64) -> Result<GadgetOutput> {
    if !mediator_range_ok(theta) {
        return Err(Error::OutOfRange(format!(
            "theta = {theta} outside (0, arctan 1/3) U (pi/4, pi) minus arctan 2 required by the mediator gadget"
        )));
    }
    let (a, b) = (theta.cos(), theta.sin());
    let sign = if a > 3.0 * b { 1.0 } else { -1.0 };
    let h = spin1_h()?;
    let hth = bilinear_biquadratic(theta)?.operator.into_matrix();
    let dim = 81;
    let id = linalg::eye(dim);
    let h02 = on(&h, D, &[0, 2], N)?;
    let h12 = on(&h, D, &[1, 2], N)?;
    let h23 = on(&h, D, &[2, 3], N)?;
    let h01 = on(&h, D, &[0, 1], N)?;
    let h01sq = &h01 * &h01;

    let mut h0 = (on(&hth, D, &[2, 3], N)? + id.scale(2.0 * a - 4.0 * b)).scale(sign);
    let mut h2 = (on(&hth, D, &[0, 2], N)? + on(&hth, D, &[1, 2], N)? - id.scale(8.0 * b / 3.0)).scale(lambda2);
    let h1 = on(&hth, D, &[0, 1], N)?.scale(lambda1);
    let am = &h02 + &h12;
    let bm = &h02 * &h02 + h02.scale(0.5) + &h12 * &h12 + h12.scale(0.5) - id.scale(8.0 / 3.0);

    let mut report = GadgetReport::new("bbq-mediator", D);
    report.param("theta", theta).param("lambda1", lambda1).param("lambda2", lambda2).param("sign", sign);
    report.check("H2 = l2((a - b/2)A + bB)", norm(&(&h2 - (am.scale(a - b / 2.0) + bm.scale(b)).scale(lambda2))), CONDITION_TOL);

    let scale = normalize_gap(&mut h0, &mut h2, 1e-9);
    report.param("gap_scale", scale);
    let [c2, c1, c0] = tilde_h_coefficients(theta);
    let tilde = h01sq.scale(c2) + h01.scale(c1) + id.scale(c0);
    let target = &h1 - tilde.scale(sign * lambda2 * lambda2);

    let psi = bbq_singlet();
    let encoding = {
        let mut v = linalg::zeros(dim, 9);
        for k in 0..9 {
            v.set_column(k, &place_states(&[(&[0, 1], &linalg::basis_vector(9, k)), (&[2, 3], &psi)], D, N)?);
        }
        v
    };
    let g = GadgetInstance::new("bbq-mediator", 2, D, N, h0, Perturbations { h1: Some(h1.clone()), h2: Some(h2.clone()), ..Default::default() })?
        .with_target(target.clone())
        .with_site_map(vec![vec![0], vec![1]])
        .with_encoding(encoding.clone());
    report.absorb_conditions(&g, CONDITION_TOL);
    report.check("ground space is h^theta's extremal singlet", encoding_residual(&g, &encoding), CONDITION_TOL);

    let pi = linalg::range_projector(&encoding);
    report.check("A P lies in the h_34 = -1 sector", norm(&((&h23 + &id) * &am * &pi)), CONDITION_TOL);
    report.check("B P lies in the h_34 = +1 sector", norm(&((&h23 - &id) * &bm * &pi)), CONDITION_TOL);
    let a2 = &pi * &am * &am * &pi;
    let b2 = &pi * &bm * &bm * &pi;
    report.check("P A^2 P = 4/3 (2I + h_12) P", norm(&(&a2 - (id.scale(2.0) + &h01).scale(4.0 / 3.0) * &pi)), tol);
    report.check(
        "P B^2 P = (2/3 h^2 + 1/3 h + 2/9 I) P",
        norm(&(&b2 - (h01sq.scale(2.0 / 3.0) + h01.scale(1.0 / 3.0) + id.scale(2.0 / 9.0)) * &pi)),
        tol,
    );

    let s = &g.split;
    let second = chain(s, &[&h2, &h2]);
    report.check("P H2 H0^-1 H2 P = s l2^2 h~(theta)", norm(&(&second - s.compress(&tilde).scale(sign * lambda2 * lambda2))), tol);
    let simulated = s.compress(&h1) - &second;
    report.check("simulated operator = l1 h^theta - s l2^2 h~(theta)", norm(&(&simulated - s.compress(&target))), tol);

    let logical = to_logical(&g, &simulated, &encoding);
    let h_l = h.clone();
    let (coeffs, rest) = fit_operator(&logical, &[linalg::eye(9), h_l.clone(), &h_l * &h_l]);
    report.check("effective operator lies in span{I, h, h^2}", rest, tol);
    report.derive("effective_identity", coeffs[0]).derive("effective_h", coeffs[1]).derive("effective_h2", coeffs[2]);
    report.derive("tilde_h2_coefficient", c2).derive("tilde_h_coefficient", c1).derive("tilde_identity", c0);
    report.derive("tilde_independence", tilde_h_independence(theta)?);
    report.operators(&logical, &to_logical(&g, &s.compress(&target), &encoding));
    Ok(GadgetOutput { instance: g, report })
}

/// Antisymmetric triplet spanning the ground space of h^θ on a qutrit pair,
/// ordered by total m = +1, 0, −1.
pub fn bbq_logical_basis() -> Mat {
    let s = 0.5f64.sqrt();
    let mut w = linalg::zeros(9, 3);
    for (col, (i, j)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
        w[(i * 3 + j, col)] = real(s);
        w[(j * 3 + i, col)] = real(-s);
    }
    w
}

/// Final coefficient multiplying h_L + h_L² in the logical gadget.
pub fn logical_final_coefficient(theta: f64) -> f64 {
    let (a, b) = (theta.cos(), theta.sin());
    (5.0 * a.powi(3) - 8.0 * a * a * b + 13.0 * a * b * b - 2.0 * b.powi(3)) / (3.0 * b - a)
}

/// Second-order gadget coupling two logical qutrits, each the 3-dim ground space
/// of h^θ on a pair: (0, 1) and (2, 3). With λ₁ = α − β, λ₂ = 2√α the logical
/// interaction is a positive multiple of h_L + h_L².
pub fn bbq_logical_gadget(theta: f64, tol: f64) -> Result<GadgetOutput> {
    if !logical_range_ok(theta) {
        return Err(Error::OutOfRange(format!("theta = {theta} outside (arctan 1/3, arctan 5) required by the logical gadget")));
    }
    let (a, b) = (theta.cos(), theta.sin());
    let hth = bilinear_biquadratic(theta)?.operator.into_matrix();
    let h = spin1_h()?;
    let dim = 81;
    let id = linalg::eye(dim);
    let lambda1 = a - b;
    let lambda2 = 2.0 * a.sqrt();

    let mut h0 = on(&hth, D, &[0, 1], N)? + on(&hth, D, &[2, 3], N)? + id.scale(2.0 * (a - b));
    let mut h2 = (on(&hth, D, &[0, 2], N)? - on(&hth, D, &[1, 3], N)?).scale(lambda2);
    let h1 = on(&hth, D, &[0, 2], N)?.scale(4.0 * lambda1);
    let scale = normalize_gap(&mut h0, &mut h2, 1e-9);

    let w = bbq_logical_basis();
    let enc = kron(&w, &w);
    let h_l = h.clone();
    let h_l2 = &h_l * &h_l;
    let k = logical_final_coefficient(theta);
    let target_l = (&h_l + &h_l2).scale(k);
    let target = &enc * &target_l * enc.adjoint();
    let g = GadgetInstance::new("bbq-logical", 2, D, N, h0, Perturbations { h1: Some(h1.clone()), h2: Some(h2.clone()), ..Default::default() })?
        .with_target(target)
        .with_site_map(vec![vec![0, 1], vec![2, 3]])
        .with_encoding(enc.clone());

    let mut report = GadgetReport::new("bbq-logical", D);
    report.param("theta", theta).param("lambda1", lambda1).param("lambda2", lambda2).param("gap_scale", scale);
    // H₁ = 4λ₁h^θ₁₃ is not block-diagonal; its off-diagonal part only enters at order Δ^{-1/2}.
    report.absorb_conditions_except(&g, CONDITION_TOL, &["H1 block-diagonal"]);
    report.note("H1 block-diagonal condition waived; off-diagonal norm recorded as derived");
    report.derive("ground_dim", g.split.ground_dim as f64);
    report.check("ground space is 9-dimensional", (g.split.ground_dim as f64 - 9.0).abs(), 0.0);
    report.check("logical triplets span the ground space", encoding_residual(&g, &enc), CONDITION_TOL);

    let hth_l = h_l.scale(a) + h_l2.scale(b);
    let quarter = hth_l.scale(0.25) + linalg::eye(9).scale(b);
    let mut worst: f64 = 0.0;
    for i in [0, 1] {
        for j in [2, 3] {
            let proj = to_logical(&g, &g.split.compress(&on(&hth, D, &[i, j], N)?), &enc);
            worst = worst.max(norm(&(proj - &quarter)));
        }
    }
    report.check("P h^theta_ij P = (1/4 h^theta_L + beta I) P", worst, tol);
    report.check("P H2 P = 0", norm(&g.split.compress(&h2)), CONDITION_TOL);

    let second = to_logical(&g, &(-chain(&g.split, &[&h2, &h2])), &enc);
    let basis = [linalg::eye(9), h_l.clone(), h_l2.clone()];
    let (sc, srest) = fit_operator(&second, &basis);
    report.check("second-order term lies in span{I, h_L, h_L^2}", srest, tol);
    let pre = lambda2 * lambda2 / (2.0 * a * (a - 3.0 * b));
    let expect_h = pre * (-3.0 * a.powi(3) + 6.0 * a * a * b - 8.0 * a * b * b + b.powi(3));
    let expect_h2 = -pre * 0.5 * (5.0 * a.powi(3) - 7.0 * a * a * b + 9.0 * a * b * b + b.powi(3));
    report.check("second-order h_L coefficient", (sc[1] - expect_h).abs(), tol);
    report.check("second-order h_L^2 coefficient", (sc[2] - expect_h2).abs(), tol);
    report.derive("second_order_identity", sc[0]);

    let first = to_logical(&g, &g.split.compress(&h1), &enc);
    let simulated = &first + &second;
    let (fc, frest) = fit_operator(&simulated, &basis);
    report.check("simulated operator lies in span{I, h_L, h_L^2}", frest, tol);
    report.check("h_L and h_L^2 coefficients agree", (fc[1] - fc[2]).abs(), tol);
    report.check("h_L coefficient equals the closed form", (fc[1] - k).abs(), tol);
    report.check("final coefficient is positive", (-k).max(0.0), 0.0);
    report.derive("final_coefficient", k).derive("identity_offset", fc[0]);
    report.operators(&traceless(&simulated), &traceless(&target_l));
    Ok(GadgetOutput { instance: g, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, PI};

    #[test]
    fn mediator_both_regimes() {
        for theta in [0.2, 3.0 * PI / 4.0, 0.9, 2.5] {
            let out = bbq_mediator_gadget(theta, 1.0, 1.0, 1e-9).unwrap();
            assert!(out.report.passed, "theta={theta} {:?}", out.report.failures());
        }
    }

    #[test]
    fn mediator_three_quarter_pi_coefficients() {
        // α = −√2/2, β = √2/2: h̃ = (2/(9(α−β)))(β² h² + (6α³−12α²β+8αβ²−3β³)/(α−3β) h + …).
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b) = (-r, r);
        let h2c = 2.0 * b * b / (9.0 * (a - b));
        let hc = 2.0 / (9.0 * (a - b)) * (6.0 * a * a * a - 12.0 * a * a * b + 8.0 * a * b * b - 3.0 * b * b * b) / (a - 3.0 * b);
        assert!((h2c + 1.0 / (9.0 * 2f64.sqrt())).abs() < 1e-14);
        let out = bbq_mediator_gadget(3.0 * PI / 4.0, 1.0, 1.0, 1e-9).unwrap();
        // Heavy term is negated here (α < β), so the effective operator is h^θ + h̃.
        assert!((out.report.derived["effective_h2"] - (b + h2c)).abs() < 1e-9);
        assert!((out.report.derived["effective_h"] - (a + hc)).abs() < 1e-9);
    }

    #[test]
    fn mediator_rejects_out_of_range() {
        assert!(bbq_mediator_gadget(0.5, 1.0, 1.0, 1e-9).is_err());
        assert!(bbq_mediator_gadget(2f64.atan(), 1.0, 1.0, 1e-9).is_err());
    }

    #[test]
    fn tilde_h_degenerates_at_arctan_two() {
        assert!(tilde_h_independence(2f64.atan()).unwrap() < 1e-10);
        assert!(tilde_h_independence(0.2).unwrap() > 1e-3);
    }

    #[test]
    fn logical_gadget_pi_over_3() {
        let out = bbq_logical_gadget(FRAC_PI_3, 1e-9).unwrap();
        assert!(out.report.passed, "{:?}", out.report.failures());
        let (a, b) = (0.5, 3f64.sqrt() / 2.0);
        let k = (5.0 * a * a * a - 8.0 * a * a * b + 13.0 * a * b * b - 2.0 * b * b * b) / (3.0 * b - a);
        assert!((out.report.derived["final_coefficient"] - k).abs() < 1e-12);
    }

    #[test]
    fn logical_gadget_small_gap_angles() {
        for theta in [0.6, 1.2, FRAC_PI_4] {
            let out = bbq_logical_gadget(theta, 1e-9).unwrap();
            assert!(out.report.passed, "theta={theta} {:?}", out.report.failures());
        }
        assert!(bbq_logical_gadget(1.5, 1e-9).is_err());
    }
}
