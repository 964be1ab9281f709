//! Casimir eigenvalues from Young diagrams, Casimir operators on site sets,
//! and the invariant states used by the SU(d) and SU(2) constructions.

use serde::{Deserialize, Serialize};

use crate::basis::{levi_civita, spin_operators, HermitianBasis};
use crate::error::{Error, Result};
use crate::interactions::heisenberg_sud;
use crate::linalg::{self, checked_pow, kron, real, Mat, Vect};
use crate::operator::{embed, embed_matrix, ManyBodyOperator};
use crate::spectral::SpectralDecomposition;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDiagram")]
pub struct YoungDiagram {
    rows: Vec<usize>,
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Deserialize)]
struct RawDiagram {
    rows: Vec<usize>,
    #[serde(rename = "N")]
    n: usize,
}

impl TryFrom<RawDiagram> for YoungDiagram {
    type Error = Error;
    fn try_from(raw: RawDiagram) -> Result<Self> {
        YoungDiagram::new(raw.rows, raw.n)
    }
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(format!("su({n}) is not defined")));
        }
        if rows.contains(&0) {
            return Err(Error::OutOfRange("Young diagram rows must be positive".into()));
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::OutOfRange(format!("rows {rows:?} are not non-increasing")));
        }
        if rows.len() > n {
            return Err(Error::OutOfRange(format!("{} rows exceed N = {n}", rows.len())));
        }
        Ok(YoungDiagram { rows, n })
    }

    /// Single column of `len` boxes.
    pub fn column(len: usize, n: usize) -> Result<Self> {
        Self::new(vec![1; len], n)
    }

    /// Adjoint representation: a column of N-1 boxes plus one extra box in the first row.
    pub fn adjoint(n: usize) -> Result<Self> {
        let mut rows = vec![1; n.saturating_sub(1)];
        if let Some(r) = rows.first_mut() {
            *r = 2;
        }
        Self::new(rows, n)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn boxes(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn columns(&self) -> Vec<usize> {
        let width = self.rows.first().copied().unwrap_or(0);
        (0..width).map(|c| self.rows.iter().filter(|&&r| r > c).count()).collect()
    }

    /// c_R = ½[l(N - l/N) + Σ b_i² - Σ a_i²].
    pub fn casimir_eigenvalue(&self) -> f64 {
        let l = self.boxes() as f64;
        let n = self.n as f64;
        let rows: f64 = self.rows.iter().map(|&b| (b * b) as f64).sum();
        let cols: f64 = self.columns().iter().map(|&a| (a * a) as f64).sum();
        0.5 * (l * (n - l / n) + rows - cols)
    }
}

/// T^a_S = Σ_{i∈S} T^a_i as a dense matrix.
pub fn total_generator(basis: &HermitianBasis, a: usize, sites: &[usize], n: usize) -> Result<Mat> {
    let d = basis.local_dim();
    let dim = checked_pow(d, n)?;
    let mut out = linalg::zeros(dim, dim);
    for &s in sites {
        out += embed_matrix(basis.element(a), d, &[s], n)?;
    }
    Ok(out)
}

/// C(S) = Σ_{i≠j∈S} h_ij + l(d²-1)/(2d) I.
pub fn casimir_operator(sites: &[usize], n: usize, basis: &HermitianBasis) -> Result<ManyBodyOperator> {
    if sites.is_empty() {
        return Err(Error::Sites("Casimir operator needs a non-empty site set".into()));
    }
    for (k, &s) in sites.iter().enumerate() {
        if s >= n || sites[..k].contains(&s) {
            return Err(Error::Sites(format!("site set {sites:?} invalid for {n} sites")));
        }
    }
    let d = basis.local_dim();
    let h = heisenberg_sud(d)?;
    let l = sites.len() as f64;
    let df = d as f64;
    let mut c = ManyBodyOperator::identity(d, n)?.scaled(l * (df * df - 1.0) / (2.0 * df));
    for (x, &i) in sites.iter().enumerate() {
        for &j in &sites[x + 1..] {
            c = c.add(&embed(&h.operator, &[i, j], n)?.scaled(2.0))?;
        }
    }
    Ok(c)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// (1/√d!) Σ_σ sgn(σ) |σ(0)…σ(d-1)⟩ on d qudits of dimension d.
pub fn antisymmetric_state(d: usize) -> Result<Vect> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let dim = checked_pow(d, d)?;
    if d > 8 {
        return Err(Error::InvalidDimension(format!("antisymmetric state on {d} qudits is too large")));
    }
    let perms = permutations(d);
    let norm = 1.0 / (perms.len() as f64).sqrt();
    let mut v = Vect::zeros(dim);
    for (p, sign) in perms {
        let idx = p.iter().fold(0, |acc, &x| acc * d + x);
        v[idx] = real(sign as f64 * norm);
    }
    Ok(v)
}

/// (1/√d) Σ_i (-1)^i |i⟩|d-1-i⟩, annihilated by S^a ⊗ I + I ⊗ S^a.
pub fn singlet_state_su2(d: usize) -> Result<Vect> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut v = Vect::zeros(d * d);
    for i in 0..d {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        v[i * d + (d - 1 - i)] = real(sign * norm);
    }
    Ok(v)
}

/// Irrep dimensions in the tensor square of the d-dimensional su(2) irrep.
pub fn su2_tensor_decomposition(d: usize) -> Result<Vec<usize>> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    Ok((0..d).map(|j| 2 * j + 1).collect())
}

/// Spectral decomposition of the two-site Casimir Σ_a (S^a⊗I + I⊗S^a)².
pub fn su2_pair_casimir_spectrum(d: usize) -> Result<SpectralDecomposition> {
    let s = spin_operators(d)?;
    let id = linalg::eye(d);
    let mut c = linalg::zeros(d * d, d * d);
    for comp in s.components() {
        let t = kron(comp, &id) + kron(&id, comp);
        c += &t * &t;
    }
    SpectralDecomposition::from_matrix(&c, None)
}

/// Largest absolute deviations of the singlet moment identities of orders 1 through 4.
pub fn singlet_moment_residuals(d: usize) -> Result<[f64; 4]> {
    let s = spin_operators(d)?;
    let psi = singlet_state_su2(d)?;
    let id = linalg::eye(d);
    let ops: Vec<Mat> = s.components().iter().map(|m| kron(m, &id)).collect();
    let lambda = (d as f64 * d as f64 - 1.0) / 4.0;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let ev = |m: &Mat| psi.dotc(&(m * &psi));
    let mut res = [0.0f64; 4];
    for a in 0..3 {
        res[0] = res[0].max(ev(&ops[a]).norm());
        for b in 0..3 {
            let ab = &ops[a] * &ops[b];
            res[1] = res[1].max((ev(&ab) - real(lambda / 3.0 * delta(a, b))).norm());
            for c in 0..3 {
                let abc = &ab * &ops[c];
                let expect = linalg::c64(0.0, lambda / 6.0 * levi_civita(a, b, c) as f64);
                res[2] = res[2].max((ev(&abc) - expect).norm());
                for e in 0..3 {
                    let abce = &abc * &ops[e];
                    let expect = lambda / 15.0
                        * ((lambda - 2.0) * delta(a, c) * delta(b, e)
                            + (lambda + 0.5) * (delta(a, b) * delta(c, e) + delta(a, e) * delta(b, c)));
                    res[3] = res[3].max((ev(&abce) - real(expect)).norm());
                }
            }
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gell_mann_basis;
    use crate::linalg::max_abs;

    #[test]
    fn casimir_values_from_diagrams() {
        for d in 2..=6 {
            let df = d as f64;
            let fund = YoungDiagram::new(vec![1], d).unwrap();
            assert!((fund.casimir_eigenvalue() - (df * df - 1.0) / (2.0 * df)).abs() < 1e-14);
            assert!((YoungDiagram::adjoint(d).unwrap().casimir_eigenvalue() - df).abs() < 1e-14);
            assert!(YoungDiagram::column(d, d).unwrap().casimir_eigenvalue().abs() < 1e-14);
        }
        assert_eq!(YoungDiagram::new(vec![3, 1], 3).unwrap().columns(), vec![2, 1, 1]);
        assert!(YoungDiagram::new(vec![1, 2], 3).is_err());
        assert!(YoungDiagram::new(vec![1, 1, 1, 1], 3).is_err());
    }

    #[test]
    fn casimir_operator_identity_and_ground_state() {
        for d in 2..=3 {
            let basis = gell_mann_basis(d).unwrap();
            let sites: Vec<usize> = (0..d).collect();
            let c = casimir_operator(&sites, d, &basis).unwrap().to_dense();
            let mut direct = linalg::zeros(c.nrows(), c.ncols());
            for a in 0..basis.len() {
                let t = total_generator(&basis, a, &sites, d).unwrap();
                direct += &t * &t;
                assert!(max_abs(&(&c * &t - &t * &c)) < 1e-12);
            }
            assert!(max_abs(&(&c - &direct)) < 1e-12);
            let s = SpectralDecomposition::from_matrix(&c, None).unwrap();
            assert!(s.eigenvalues[0].abs() < 1e-12);
            assert_eq!(s.multiplicities()[0], 1);
            let psi = antisymmetric_state(d).unwrap();
            assert!((s.cluster_basis(0).adjoint() * &psi)[0].norm() > 1.0 - 1e-12);

            let single = casimir_operator(&[1], 2, &basis).unwrap().to_dense();
            let df = d as f64;
            assert!(max_abs(&(single - linalg::eye(d * d).scale((df * df - 1.0) / (2.0 * df)))) < 1e-13);
        }
        let basis = gell_mann_basis(2).unwrap();
        assert!(casimir_operator(&[], 2, &basis).is_err());
    }

    #[test]
    fn antisymmetric_states() {
        let v = antisymmetric_state(2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((v[1].re - r).abs() < 1e-15 && (v[2].re + r).abs() < 1e-15);
        let v = antisymmetric_state(3).unwrap();
        let c = 1.0 / 6f64.sqrt();
        for (digits, sign) in [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0), ([1, 0, 2], -1.0)] {
            let idx = digits[0] * 9 + digits[1] * 3 + digits[2];
            assert!((v[idx].re - sign * c).abs() < 1e-15);
        }
        // Exchanging the first two sites flips the sign.
        let swap = embed_matrix(&crate::interactions::swap_matrix(3), 3, &[0, 1], 3).unwrap();
        assert!((swap * &v + &v).norm() < 1e-14);
    }

    #[test]
    fn paired_states_overlap_is_one_over_d() {
        for d in 2..=3 {
            let psi = antisymmetric_state(d).unwrap();
            let n = 2 * d;
            let a: Vec<usize> = (2..=d).collect();
            let b: Vec<usize> = (d + 1..2 * d).collect();
            let site_a: Vec<usize> = std::iter::once(0).chain(a.iter().copied()).collect();
            let site_b: Vec<usize> = std::iter::once(1).chain(b.iter().copied()).collect();
            let phi1 = crate::operator::place_states(&[(site_a.as_slice(), &psi), (site_b.as_slice(), &psi)], d, n).unwrap();
            let cross_a: Vec<usize> = std::iter::once(0).chain(b.iter().copied()).collect();
            let cross_b: Vec<usize> = std::iter::once(1).chain(a.iter().copied()).collect();
            let phi2 = crate::operator::place_states(&[(cross_a.as_slice(), &psi), (cross_b.as_slice(), &psi)], d, n).unwrap();
            let overlap = phi1.dotc(&phi2);
            assert!((overlap.re - 1.0 / d as f64).abs() < 1e-13 && overlap.im.abs() < 1e-13, "d={d}");
        }
    }

    #[test]
    fn singlet_annihilation_and_moments() {
        for d in 2..=6 {
            let s = spin_operators(d).unwrap();
            let psi = singlet_state_su2(d).unwrap();
            let id = linalg::eye(d);
            for comp in s.components() {
                let t = kron(comp, &id) + kron(&id, comp);
                assert!((t * &psi).norm() < 1e-12, "d={d}");
            }
            let r = singlet_moment_residuals(d).unwrap();
            assert!(r.iter().all(|&x| x <= 1e-11), "d={d}: {r:?}");
        }
    }

    #[test]
    fn tensor_square_decomposition_matches_spectrum() {
        for d in 2..=4 {
            let dims = su2_tensor_decomposition(d).unwrap();
            let s = su2_pair_casimir_spectrum(d).unwrap();
            assert_eq!(s.multiplicities(), dims);
            for (v, k) in s.cluster_values().iter().zip(&dims) {
                let kf = *k as f64;
                assert!((v - (kf * kf - 1.0) / 4.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn diagram_json_shape() {
        let y: YoungDiagram = serde_json::from_str(r#"{"rows":[2,1],"N":3}"#).unwrap();
        assert_eq!(y.boxes(), 3);
        assert!(serde_json::from_str::<YoungDiagram>(r#"{"rows":[1,2],"N":3}"#).is_err());
    }
}
