use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::gadgets::{encoding_residual, norm, on, to_logical, GadgetOutput, GadgetReport, CONDITION_TOL};
use crate::linalg::{self, real, Mat, Vect};
use crate::operator::place_states;
use crate::sw::series::chain;
use crate::sw::{GadgetInstance, Perturbations};

fn ancilla_encoding(d: usize, n: usize, ancilla: usize, psi: &Vect) -> Result<Mat> {
    let sys: Vec<usize> = (0..n).filter(|&k| k != ancilla).collect();
    let m = linalg::checked_pow(d, sys.len())?;
    let mut v = linalg::zeros(linalg::checked_pow(d, n)?, m);
    for k in 0..m {
        v.set_column(k, &place_states(&[(&sys, &linalg::basis_vector(m, k)), (&[ancilla], psi)], d, n)?);
    }
    Ok(v)
}

/// First-order demo: two system qubits coupled to an ancilla held in a random
/// state ψ. With H₁ = Σ_k A_k ⊗ B_k the simulated operator is Σ_k ⟨ψ|B_k|ψ⟩ A_k.
pub fn projection_order1_gadget(seed: u64, tol: f64) -> Result<GadgetOutput> {
    let (d, n) = (2, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = linalg::random_state(d, &mut rng);
    let dim = 8;
    let h0 = linalg::eye(dim) - on(&linalg::proj(&psi), d, &[2], n)?;
    let mut h1 = linalg::zeros(dim, dim);
    let mut expected_sys = linalg::zeros(4, 4);
    for _ in 0..3 {
        let a = linalg::random_hermitian(4, &mut rng);
        let b = linalg::random_hermitian(2, &mut rng);
        let ev = psi.dotc(&(&b * &psi)).re;
        h1 += on(&linalg::kron(&a, &b), d, &[0, 1, 2], n)?;
        expected_sys += a.scale(ev);
    }
    let scale = norm(&h1);
    let h1 = h1.unscale(scale);
    let expected_sys = expected_sys.unscale(scale);
    let enc = ancilla_encoding(d, n, 2, &psi)?;
    let target = on(&expected_sys, d, &[0, 1], n)?;
    let g = GadgetInstance::new("projection-order1", 1, d, n, h0, Perturbations { h1: Some(h1.clone()), ..Default::default() })?
        .with_target(target)
        .with_site_map(vec![vec![0], vec![1]])
        .with_encoding(enc.clone());
    let mut report = GadgetReport::new("projection-order1", d);
    report.param("seed", seed as f64);
    report.absorb_conditions(&g, CONDITION_TOL);
    report.check("ground space is system x |psi>", encoding_residual(&g, &enc), CONDITION_TOL);
    let eff = to_logical(&g, &g.split.compress(&h1), &enc);
    report.check("P H1 P = sum_k <psi|B_k|psi> A_k", norm(&(&eff - &expected_sys)), tol);
    report.operators(&eff, &expected_sys);
    Ok(GadgetOutput { instance: g, report })
}

/// Third-order demo on three qutrits: A = diag(−1, 2, 1/2), ancilla state
/// ψ = (√2|0⟩ + |1⟩)/√3 with ⟨A⟩ = 0. The simulated operator is
/// 3⟨A³⟩(A² ⊗ A + A ⊗ A²) on the two system qutrits.
pub fn three_eigenvalue_order3_gadget(tol: f64) -> Result<GadgetOutput> {
    three_eigenvalue_order3_scaled(1.0, tol)
}

/// Same construction with A multiplied by `scale`.
pub fn three_eigenvalue_order3_scaled(scale: f64, tol: f64) -> Result<GadgetOutput> {
    let (d, n) = (3, 3);
    let a = Mat::from_diagonal(&Vect::from_vec(vec![real(-scale), real(2.0 * scale), real(0.5 * scale)]));
    let mut psi = Vect::zeros(3);
    psi[0] = real((2.0f64 / 3.0).sqrt());
    psi[1] = real((1.0f64 / 3.0).sqrt());
    let ev = |m: &Mat| psi.dotc(&(m * &psi)).re;
    let a2 = &a * &a;
    let a3 = &a2 * &a;
    let (m1, m2, m3) = (ev(&a), ev(&a2), ev(&a3));

    let dim = 27;
    let h0 = linalg::eye(dim) - on(&linalg::proj(&psi), d, &[2], n)?;
    let a0 = on(&a, d, &[0], n)?;
    let a1 = on(&a, d, &[1], n)?;
    let a2s = on(&a, d, &[2], n)?;
    let sum = &a0 + &a1;
    let h2 = &sum * &a2s;
    let h1p = (&sum * &sum).scale(m2);
    let h1 = (&a0 * &a0 * &a0 + &a1 * &a1 * &a1).scale(-m3);
    let target_sys = (linalg::kron(&a2, &a) + linalg::kron(&a, &a2)).scale(3.0 * m3);
    let target = on(&target_sys, d, &[0, 1], n)?;
    let enc = ancilla_encoding(d, n, 2, &psi)?;
    let g = GadgetInstance::new(
        "three-eigenvalue-order3",
        3,
        d,
        n,
        h0,
        Perturbations { h1: Some(h1.clone()), h1_prime: Some(h1p), h2: Some(h2.clone()), ..Default::default() },
    )?
    .with_target(target)
    .with_site_map(vec![vec![0], vec![1]])
    .with_encoding(enc.clone());

    let mut report = GadgetReport::new("three-eigenvalue-order3", d);
    report.derive("mean_A", m1).derive("mean_A2", m2).derive("mean_A3", m3);
    report.check("<psi|A|psi> = 0", m1.abs(), 1e-14);
    report.absorb_conditions(&g, CONDITION_TOL);
    let s = &g.split;
    let simulated = s.compress(&h1) + chain(s, &[&h2, &h2, &h2]);
    let eff = to_logical(&g, &simulated, &enc);
    report.check("simulated operator = 3<A^3>(A^2 x A + A x A^2)", norm(&(&eff - &target_sys)), tol);
    report.operators(&eff, &target_sys);
    Ok(GadgetOutput { instance: g, report })
}
