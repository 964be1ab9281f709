use gadgetforge::classify::{classify_two_qudit, two_local_rank};
use gadgetforge::interactions::{heisenberg_sud, WeightedTermList};
use gadgetforge::io::{operator_from_json, operator_to_json};
use gadgetforge::linalg::{self, kron, random_hermitian, random_unitary, Mat};
use gadgetforge::operator::{embed_matrix, ManyBodyOperator};
use gadgetforge::simcert::{certify_simulation, OffsetMode};
use gadgetforge::spectral::SpectralDecomposition;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn one_local(a: &Mat, b: &Mat) -> Mat {
    let d = a.nrows();
    kron(a, &linalg::eye(d)) + kron(&linalg::eye(d), b)
}

/// A random two-qudit Hermitian operator whose two-local part has rank `r`.
fn random_rank(d: usize, r: usize, rng: &mut ChaCha8Rng) -> Mat {
    let mut h = linalg::zeros(d * d, d * d);
    for _ in 0..r {
        let a = random_hermitian(d, rng);
        let b = random_hermitian(d, rng);
        h += kron(&a, &b);
    }
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn embedding_is_multiplicative(seed in any::<u64>(), d in 2usize..4, sites in prop::sample::select(vec![[0usize, 1], [0, 2], [2, 1]])) {
        let mut r = rng(seed);
        let a = linalg::random_gaussian_matrix(d * d, d * d, &mut r);
        let b = linalg::random_gaussian_matrix(d * d, d * d, &mut r);
        let lhs = embed_matrix(&(&a * &b), d, &sites, 3).unwrap();
        let rhs = embed_matrix(&a, d, &sites, 3).unwrap() * embed_matrix(&b, d, &sites, 3).unwrap();
        prop_assert!(linalg::max_abs(&(lhs - rhs)) < 1e-11);
    }

    #[test]
    fn spectral_decomposition_reconstructs(seed in any::<u64>(), n in 1usize..80) {
        let h = random_hermitian(n, &mut rng(seed));
        let s = SpectralDecomposition::from_matrix(&h, None).unwrap();
        prop_assert!(s.reconstruction_error(&h) <= 1e-10 * linalg::spectral_norm(&h).max(1.0));
    }

    #[test]
    fn rank_survives_local_unitaries_and_fields(seed in any::<u64>(), d in 2usize..5, r in 0usize..4) {
        let mut g = rng(seed);
        let h = random_rank(d, r, &mut g);
        let expected = two_local_rank(&h, d, 1e-8).unwrap();
        prop_assert_eq!(expected, r.min(d * d - 1));
        let uv = kron(&random_unitary(d, &mut g), &random_unitary(d, &mut g));
        let fields = one_local(&random_hermitian(d, &mut g), &random_hermitian(d, &mut g));
        let moved = &uv * &h * uv.adjoint() + fields;
        prop_assert_eq!(two_local_rank(&moved, d, 1e-8).unwrap(), expected);
    }

    #[test]
    fn class_survives_joint_rotation(seed in any::<u64>(), d in 2usize..4, r in 0usize..3) {
        let mut g = rng(seed);
        let h = random_rank(d, r, &mut g);
        let u = random_unitary(d, &mut g);
        let uu = kron(&u, &u);
        let fields = one_local(&random_hermitian(d, &mut g), &random_hermitian(d, &mut g));
        let moved = &uu * &h * uu.adjoint() + fields;
        let a = classify_two_qudit(&h, d, 1e-8).unwrap();
        let b = classify_two_qudit(&moved, d, 1e-8).unwrap();
        prop_assert_eq!(a.class, b.class);
        prop_assert_eq!(a.witness.is_some(), a.class.label() == "LA_STOQUASTIC_UNIVERSAL");
    }

    #[test]
    fn sud_heisenberg_commutes_with_u_tensor_u(seed in any::<u64>(), d in 2usize..5) {
        let h = heisenberg_sud(d).unwrap();
        let u = random_unitary(d, &mut rng(seed));
        let uu = kron(&u, &u);
        prop_assert!(linalg::max_abs(&(&uu * h.matrix() * uu.adjoint() - h.matrix())) < 1e-12);
    }

    #[test]
    fn assembly_is_linear_in_weights(seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let mut g = rng(seed);
        let h = heisenberg_sud(2).unwrap();
        let mut list = WeightedTermList::new(2, 4).unwrap();
        for (i, j) in [(0usize, 1usize), (1, 2), (2, 3), (0, 3)] {
            let w: f64 = rand::Rng::random_range(&mut g, -2.0..2.0);
            list.push(&h, &[i, j], w).unwrap();
        }
        let scaled = list.scaled(alpha).assemble_dense().unwrap();
        let direct = list.assemble_dense().unwrap().scale(alpha);
        prop_assert!(linalg::max_abs(&(scaled - direct)) < 1e-12);
    }

    #[test]
    fn aligned_isometry_has_zero_eta(seed in any::<u64>(), low in 1usize..4) {
        let mut g = rng(seed);
        let dim = 6;
        let u = random_unitary(dim, &mut g);
        let mut spectrum = vec![0.0; dim];
        for (k, e) in spectrum.iter_mut().enumerate() {
            *e = if k < low { 0.1 * k as f64 } else { 10.0 + k as f64 };
        }
        let h_prime = &u * gadgetforge::spectral::diag(&spectrum) * u.adjoint();
        // Any isometry with the low-energy range, rotated inside it.
        let w = random_unitary(low, &mut g);
        let v = u.columns(0, low).into_owned() * &w;
        let target = w.adjoint() * gadgetforge::spectral::diag(&spectrum[..low]) * &w;
        let r = certify_simulation(&h_prime, &target, &v, 5.0, OffsetMode::Exact).unwrap();
        prop_assert!(r.rank_match);
        prop_assert!(r.eta.unwrap() < 1e-12);
        prop_assert!(r.eps.unwrap() < 1e-10);
    }

    #[test]
    fn eps_invariant_under_joint_rotation(seed in any::<u64>()) {
        let mut g = rng(seed);
        let dim = 6;
        let h_prime = random_hermitian(dim, &mut g);
        let (_, vecs) = linalg::eigh(&h_prime);
        // Perturb the encoding away from the exact low space so eta, eps are non-trivial.
        let v = linalg::polar(&(vecs.columns(0, 2) + linalg::random_gaussian_matrix(dim, 2, &mut g).scale(0.05)), 1e-12).unwrap();
        let h = random_hermitian(2, &mut g);
        let (vals, _) = linalg::eigh(&h_prime);
        let cutoff = 0.5 * (vals[1] + vals[2]);
        let u = random_unitary(2, &mut g);
        let a = certify_simulation(&h_prime, &h, &v, cutoff, OffsetMode::Exact).unwrap();
        let b = certify_simulation(&h_prime, &(&u * &h * u.adjoint()), &(&v * u.adjoint()), cutoff, OffsetMode::Exact).unwrap();
        prop_assert!((a.eps.unwrap() - b.eps.unwrap()).abs() < 1e-10);
        prop_assert!(a.eta.unwrap() >= 0.0 && a.eps.unwrap() >= 0.0);
    }

    #[test]
    fn operator_json_round_trips(seed in any::<u64>(), d in 2usize..4) {
        let m = random_hermitian(d * d, &mut rng(seed));
        let op = ManyBodyOperator::from_dense(d, 2, m).unwrap();
        let back = operator_from_json(&operator_to_json(&op).unwrap()).unwrap();
        prop_assert_eq!(back.to_dense(), op.to_dense());
    }
}
