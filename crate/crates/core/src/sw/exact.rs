use crate::error::{Error, Result};
use crate::linalg::{self, zeros, Mat, C64};
use crate::sw::split::BlockSplit;

/// Exact effective Hamiltonian on the ground space of H₀.
#[derive(Clone, Debug)]
pub struct ExactEffective {
    /// Ṽ† H_sim Ṽ expressed in the ground basis of the split (g × g).
    pub h_eff: Mat,
    /// ‖Ṽ − V₋‖ with V₋ the ground isometry of H₀.
    pub eta: f64,
    /// Ṽ as a full-space isometry (dim × g).
    pub isometry: Mat,
}

/// Direct-rotation effective Hamiltonian of H_sim = ΔH₀ + A, low-energy cutoff Δ/2.
///
/// Works in the H₀ eigenbasis on M = D + Ã/Δ so that the O(Δ) scale never
/// enters an eigensolver. With the low-energy space written as the graph
/// span[I; X] over the ground block, Ṽ = [I; X](I + X†X)^{-1/2}.
pub fn exact_schrieffer_wolff(split: &BlockSplit, a: &Mat, delta: f64) -> Result<ExactEffective> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::OutOfRange(format!("delta {delta} must be positive and finite")));
    }
    let n = split.dim();
    let g = split.ground_dim;
    let e = n - g;
    let at = split.to_eigenbasis(a);
    let at = (&at + at.adjoint()).scale(0.5);
    let d_plus: Vec<f64> = split.eigenvalues[g..].to_vec();

    let mut m = at.unscale(delta);
    for (k, ev) in d_plus.iter().enumerate() {
        m[(g + k, g + k)] += C64::new(*ev, 0.0);
    }
    let (vals, vecs) = linalg::eigh(&m);
    let found = vals.iter().filter(|&&v| v <= 0.5).count();
    if found != g {
        return Err(Error::RankMismatch { expected: g, found });
    }
    if g == 0 {
        return Ok(ExactEffective { h_eff: zeros(0, 0), eta: 0.0, isometry: zeros(n, 0) });
    }
    let y = vecs.columns(0, g);
    let y_minus = y.rows(0, g).into_owned();
    let y_plus = y.rows(g, e).into_owned();
    let y_minus_inv = y_minus
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularPolar(linalg::singular_values(&y_minus).last().copied().unwrap_or(0.0)))?;
    let x = y_plus * y_minus_inv;

    let nmat = linalg::eye(g) + x.adjoint() * &x;
    let n_inv_sqrt = linalg::hermitian_function(&nmat, |v| 1.0 / v.sqrt());

    let amm = at.view((0, 0), (g, g));
    let amp = at.view((0, g), (g, e));
    let apm = at.view((g, 0), (e, g));
    let mut heavy = at.view((g, g), (e, e)).into_owned();
    for (k, ev) in d_plus.iter().enumerate() {
        heavy[(k, k)] += C64::new(delta * ev, 0.0);
    }
    let inner = amm + amp * &x + x.adjoint() * apm + x.adjoint() * heavy * &x;
    let h_eff = &n_inv_sqrt * inner * &n_inv_sqrt;
    let h_eff = (&h_eff + h_eff.adjoint()).scale(0.5);

    let mut graph = zeros(n, g);
    graph.view_mut((0, 0), (g, g)).copy_from(&linalg::eye(g));
    graph.view_mut((g, 0), (e, g)).copy_from(&x);
    let tilde = graph * &n_inv_sqrt;
    let mut reference = zeros(n, g);
    reference.view_mut((0, 0), (g, g)).copy_from(&linalg::eye(g));
    let eta = linalg::spectral_norm(&(&tilde - reference));
    let isometry = &split.eigenvectors * tilde;
    Ok(ExactEffective { h_eff, eta, isometry })
}

/// Polar factor of Π₋P + (I−Π₋)(I−P): the minimal rotation taking range(P) to range(Π₋).
pub fn direct_rotation_unitary(p: &Mat, pi_minus: &Mat) -> Result<Mat> {
    let n = p.nrows();
    let id = linalg::eye(n);
    let m = pi_minus * p + (&id - pi_minus) * (&id - p);
    linalg::polar(&m, 1e-12)
}

/// Effective Hamiltonian of an arbitrary H_sim on the span of `ground` (an isometry),
/// using the full direct-rotation unitary and the low-energy cutoff `cutoff`.
pub fn exact_sw_polar(h_sim: &Mat, ground: &Mat, cutoff: f64) -> Result<ExactEffective> {
    let (vals, vecs) = linalg::eigh(h_sim);
    let found = vals.iter().filter(|&&v| v <= cutoff).count();
    let g = ground.ncols();
    if found != g {
        return Err(Error::RankMismatch { expected: g, found });
    }
    let low = vecs.columns(0, found).into_owned();
    let p = linalg::range_projector(&low);
    let pi_minus = linalg::range_projector(ground);
    let u = direct_rotation_unitary(&p, &pi_minus)?;
    let tilde = u.adjoint() * ground;
    let h_eff = tilde.adjoint() * h_sim * &tilde;
    let h_eff = (&h_eff + h_eff.adjoint()).scale(0.5);
    let eta = linalg::spectral_norm(&(&tilde - ground));
    Ok(ExactEffective { h_eff, eta, isometry: tilde })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, proj, random_hermitian, random_state};
    use crate::sw::series::series_for_operator;
    use crate::sw::split::block_split;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_split(n: usize, g: usize, seed: u64) -> BlockSplit {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = zeros(n, n);
        for k in g..n {
            d[(k, k)] = C64::new(1.0 + 0.5 * (k - g) as f64, 0.0);
        }
        let u = linalg::random_unitary(n, &mut rng);
        block_split(&(&u * d * u.adjoint()), 1e-10).unwrap()
    }

    #[test]
    fn heavy_term_alone_gives_zero() {
        let split = random_split(6, 2, 1);
        let r = exact_schrieffer_wolff(&split, &zeros(6, 6), 1e3).unwrap();
        assert!(max_abs(&r.h_eff) < 1e-12);
        assert!(r.eta < 1e-12);
    }

    #[test]
    fn eigenbasis_and_polar_routes_agree() {
        let split = random_split(8, 3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(8, &mut rng).scale(3.0);
        let delta = 40.0;
        let fast = exact_schrieffer_wolff(&split, &a, delta).unwrap();
        let h_sim = split.h0.scale(delta) + &a;
        let slow = exact_sw_polar(&h_sim, &split.ground(), delta / 2.0).unwrap();
        assert!(max_abs(&(&fast.h_eff - &slow.h_eff)) < 1e-9);
        assert!((fast.eta - slow.eta).abs() < 1e-9);
        assert!(max_abs(&(&fast.isometry - &slow.isometry)) < 1e-9);
        // The isometry spans the low-energy space and reproduces its spectrum.
        let (vals, _) = linalg::eigh(&h_sim);
        let (eff_vals, _) = linalg::eigh(&fast.h_eff);
        for k in 0..3 {
            assert!((vals[k] - eff_vals[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn first_order_error_shrinks_like_inverse_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = random_state(4, &mut rng);
        let split = block_split(&(linalg::eye(4) - proj(&psi)), 1e-10).unwrap();
        let h1 = random_hermitian(4, &mut rng);
        let target = split.compress(&h1);
        let err = |delta: f64| {
            let r = exact_schrieffer_wolff(&split, &h1, delta).unwrap();
            linalg::spectral_norm(&(r.h_eff - &target))
        };
        let e1 = err(1e4);
        let e2 = err(1e6);
        assert!(e2 < 1e-5 && e1 / e2 > 50.0, "{e1} {e2}");
    }

    #[test]
    fn series_converges_to_exact_with_order() {
        let split = random_split(7, 2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_hermitian(7, &mut rng);
        let mut prev = f64::INFINITY;
        for delta in [20.0, 80.0, 320.0] {
            let exact = exact_schrieffer_wolff(&split, &a, delta).unwrap();
            let s = series_for_operator(&split, &a, delta, 4);
            let r = linalg::spectral_norm(&(&exact.h_eff - s.total()));
            // Fifth-order remainder: a 4x step in Δ shrinks it by ~4⁴.
            assert!(r < prev / 100.0 || prev.is_infinite(), "{r} {prev}");
            prev = r;
        }
    }

    #[test]
    fn rank_mismatch_is_reported() {
        let split = random_split(4, 1, 7);
        let a = linalg::eye(4).scale(-10.0);
        let r = exact_schrieffer_wolff(&split, &a, 1.0);
        assert!(matches!(r, Err(Error::RankMismatch { .. })));
    }
}
