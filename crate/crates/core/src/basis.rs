//! Generalized Gell-Mann basis of su(d), spin-s matrices and the Levi-Civita symbol.

use crate::error::{Error, Result};
use crate::linalg::{c64, commutator, real, trace, zeros, Mat, I};
use crate::operator::LocalOperator;

/// Traceless Hermitian generators normalized to tr(T^a T^b) = δ_ab / 2.
///
/// Ordering: symmetric pairs (j<k, ascending), then antisymmetric pairs,
/// then the d-1 diagonal elements.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    d: usize,
    elements: Vec<LocalOperator>,
    structure: Vec<f64>,
}

impl HermitianBasis {
    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[LocalOperator] {
        &self.elements
    }

    pub fn element(&self, a: usize) -> &Mat {
        self.elements[a].matrix()
    }

    /// f_abc with [T^a, T^b] = i Σ_c f_abc T^c.
    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        let m = self.elements.len();
        self.structure[(a * m + b) * m + c]
    }

    /// Largest deviation of [T^a,T^b] from Σ_c i f_abc T^c.
    pub fn commutator_residual(&self) -> f64 {
        let m = self.len();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                let lhs = commutator(self.element(a), self.element(b));
                let mut rhs = zeros(self.d, self.d);
                for c in 0..m {
                    let f = self.f(a, b, c);
                    if f != 0.0 {
                        rhs += self.element(c) * (I * f);
                    }
                }
                worst = worst.max(crate::linalg::max_abs(&(lhs - rhs)));
            }
        }
        worst
    }
}

/// Generalized Gell-Mann matrices for su(d).
pub fn gell_mann_basis(d: usize) -> Result<HermitianBasis> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let mut mats: Vec<Mat> = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = zeros(d, d);
            m[(j, k)] = real(0.5);
            m[(k, j)] = real(0.5);
            mats.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = zeros(d, d);
            m[(j, k)] = c64(0.0, -0.5);
            m[(k, j)] = c64(0.0, 0.5);
            mats.push(m);
        }
    }
    for l in 1..d {
        let lf = l as f64;
        let scale = 0.5 * (2.0 / (lf * (lf + 1.0))).sqrt();
        let mut m = zeros(d, d);
        for j in 0..l {
            m[(j, j)] = real(scale);
        }
        m[(l, l)] = real(-lf * scale);
        mats.push(m);
    }

    let count = mats.len();
    let mut structure = vec![0.0; count * count * count];
    for a in 0..count {
        for b in (a + 1)..count {
            let comm = commutator(&mats[a], &mats[b]);
            for c in 0..count {
                // f_abc = -2i tr([T^a,T^b] T^c)
                let v = (trace(&(&comm * &mats[c])) * c64(0.0, -2.0)).re;
                let v = if v.abs() < 1e-15 { 0.0 } else { v };
                structure[(a * count + b) * count + c] = v;
                structure[(b * count + a) * count + c] = -v;
            }
        }
    }

    let elements = mats
        .into_iter()
        .map(|m| LocalOperator::hermitian(d, 1, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(HermitianBasis { d, elements, structure })
}

/// Spin-s matrices (s = (d-1)/2) in the basis m = s, s-1, ..., -s.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub x: LocalOperator,
    pub y: LocalOperator,
    pub z: LocalOperator,
}

impl SpinOperators {
    pub fn components(&self) -> [&Mat; 3] {
        [self.x.matrix(), self.y.matrix(), self.z.matrix()]
    }

    /// Casimir eigenvalue λ = (d²-1)/4.
    pub fn casimir(&self) -> f64 {
        let d = self.z.local_dim() as f64;
        (d * d - 1.0) / 4.0
    }
}

pub fn spin_operators(d: usize) -> Result<SpinOperators> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let s = (d as f64 - 1.0) / 2.0;
    let mut plus = zeros(d, d);
    let mut z = zeros(d, d);
    for k in 0..d {
        let m = s - k as f64;
        z[(k, k)] = real(m);
        if k > 0 {
            plus[(k - 1, k)] = real((s * (s + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let minus = plus.adjoint();
    let x = (&plus + &minus).scale(0.5);
    let y = (&plus - &minus) * c64(0.0, -0.5);
    Ok(SpinOperators {
        x: LocalOperator::hermitian(d, 1, x)?,
        y: LocalOperator::hermitian(d, 1, y)?,
        z: LocalOperator::hermitian(d, 1, z)?,
    })
}

/// Levi-Civita symbol on {0,1,2}.
pub fn levi_civita(a: usize, b: usize, c: usize) -> i32 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eye, max_abs};

    fn pauli() -> (Mat, Mat, Mat) {
        let x = Mat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let y = Mat::from_row_slice(2, 2, &[real(0.0), c64(0.0, -1.0), c64(0.0, 1.0), real(0.0)]);
        let z = Mat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)]);
        (x, y, z)
    }

    #[test]
    fn qubit_basis_is_half_paulis() {
        let b = gell_mann_basis(2).unwrap();
        let (x, y, z) = pauli();
        assert!(max_abs(&(b.element(0) - x.scale(0.5))) < 1e-15);
        assert!(max_abs(&(b.element(1) - y.scale(0.5))) < 1e-15);
        assert!(max_abs(&(b.element(2) - z.scale(0.5))) < 1e-15);
        // su(2): f = ε
        assert_eq!(b.f(0, 1, 2), 1.0);
    }

    #[test]
    fn trace_orthonormality_all_pairs_d3() {
        let b = gell_mann_basis(3).unwrap();
        assert_eq!(b.len(), 8);
        for a in 0..8 {
            assert!(trace(b.element(a)).norm() < 1e-15);
            for c in 0..8 {
                let t = trace(&(b.element(a) * b.element(c)));
                let expected = if a == c { 0.5 } else { 0.0 };
                assert!((t - real(expected)).norm() < 1e-14, "pair ({a},{c})");
            }
        }
    }

    #[test]
    fn quadratic_casimir_of_fundamental() {
        for d in 2..=6 {
            let b = gell_mann_basis(d).unwrap();
            let mut sum = zeros(d, d);
            for t in b.elements() {
                sum += t.matrix() * t.matrix();
            }
            let df = d as f64;
            assert!(max_abs(&(sum - eye(d).scale((df * df - 1.0) / (2.0 * df)))) < 1e-13);
        }
    }

    #[test]
    fn structure_constants_reconstruct_commutators() {
        for d in 2..=5 {
            let b = gell_mann_basis(d).unwrap();
            assert!(b.commutator_residual() <= 1e-12, "d={d}");
        }
    }

    #[test]
    fn structure_constants_totally_antisymmetric() {
        let b = gell_mann_basis(3).unwrap();
        for a in 0..8 {
            for c in 0..8 {
                for e in 0..8 {
                    let f = b.f(a, c, e);
                    assert!((f + b.f(c, a, e)).abs() < 1e-13);
                    assert!((f - b.f(c, e, a)).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(gell_mann_basis(1).is_err());
        assert!(spin_operators(0).is_err());
    }

    #[test]
    fn spin_one_matches_explicit_matrices() {
        let s = spin_operators(3).unwrap();
        let r = 1.0 / 2f64.sqrt();
        let x = Mat::from_row_slice(
            3,
            3,
            &[real(0.0), real(r), real(0.0), real(r), real(0.0), real(r), real(0.0), real(r), real(0.0)],
        );
        let y = Mat::from_row_slice(
            3,
            3,
            &[
                real(0.0),
                c64(0.0, -r),
                real(0.0),
                c64(0.0, r),
                real(0.0),
                c64(0.0, -r),
                real(0.0),
                c64(0.0, r),
                real(0.0),
            ],
        );
        let z = Mat::from_diagonal(&crate::linalg::Vect::from_vec(vec![real(1.0), real(0.0), real(-1.0)]));
        assert!(max_abs(&(s.x.matrix() - x)) < 1e-15);
        assert!(max_abs(&(s.y.matrix() - y)) < 1e-15);
        assert!(max_abs(&(s.z.matrix() - z)) < 1e-15);
    }

    #[test]
    fn spin_algebra_and_casimir() {
        for d in 2..=7 {
            let s = spin_operators(d).unwrap();
            let comps = s.components();
            let mut cas = zeros(d, d);
            for a in 0..3 {
                cas += comps[a] * comps[a];
                for b in 0..3 {
                    let mut rhs = zeros(d, d);
                    for c in 0..3 {
                        rhs += comps[c] * (I * levi_civita(a, b, c) as f64);
                    }
                    assert!(max_abs(&(commutator(comps[a], comps[b]) - rhs)) < 1e-12);
                }
            }
            assert!(max_abs(&(cas - eye(d).scale(s.casimir()))) < 1e-12);
        }
        let s5 = spin_operators(5).unwrap();
        assert_eq!(s5.casimir(), 6.0);
    }

    #[test]
    fn levi_civita_contraction_identity() {
        let delta = |i: usize, j: usize| i32::from(i == j);
        for b in 0..3 {
            for c in 0..3 {
                for e in 0..3 {
                    for f in 0..3 {
                        let lhs: i32 = (0..3).map(|a| levi_civita(a, b, c) * levi_civita(a, e, f)).sum();
                        assert_eq!(lhs, delta(b, e) * delta(c, f) - delta(b, f) * delta(c, e));
                    }
                }
            }
        }
    }
}
