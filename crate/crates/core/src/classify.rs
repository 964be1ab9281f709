//! Classification of qudit interactions: 2-local parts and rank, the two-qudit
//! decision tree, decomposition of k-local interactions into components on
//! site subsets, set classification and stoquastic witness unitaries.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::basis::{gell_mann_basis, HermitianBasis};
use crate::error::{Error, Result};
use crate::interactions::Interaction;
use crate::linalg::{self, checked_pow, kron, kron_all, real, Mat, Vect, C64};
use crate::operator::{embed_matrix, partial_trace, ManyBodyOperator};
use crate::spectral::cluster;

pub const RANK_TOL: f64 = 1e-8;
pub const CLUSTER_TOL: f64 = 1e-8;
/// Relative residual allowed when matching a component against (d|ψ⟩⟨ψ| − I)^⊗k.
pub const FORM_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct TwoLocalDecomposition {
    pub local_dim: usize,
    pub h_prime: Mat,
    /// M_ab with H′ = Σ_ab M_ab T^a ⊗ T^b.
    pub m: Vec<Vec<f64>>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Some singular value lies within a factor 10 of the rank threshold.
    pub borderline: bool,
}

impl TwoLocalDecomposition {
    pub fn reconstruct(&self, basis: &HermitianBasis) -> Mat {
        let n = self.local_dim * self.local_dim;
        let mut out = linalg::zeros(n, n);
        for (a, row) in self.m.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    out += kron(basis.element(a), basis.element(b)).scale(v);
                }
            }
        }
        out
    }

    fn m_complex(&self) -> Mat {
        let k = self.m.len();
        Mat::from_fn(k, k, |a, b| real(self.m[a][b]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InteractionClass {
    LaUniversal,
    LaStoquasticUniversal,
    OneLocalOnly,
}

impl InteractionClass {
    pub fn label(self) -> &'static str {
        match self {
            InteractionClass::LaUniversal => "LA_UNIVERSAL",
            InteractionClass::LaStoquasticUniversal => "LA_STOQUASTIC_UNIVERSAL",
            InteractionClass::OneLocalOnly => "ONE_LOCAL_ONLY",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub psi: Vect,
    /// α in H′ = α (|ψ⟩⟨ψ| − I/d)^⊗2 for two-qudit verdicts, the largest |κ| for sets.
    pub scale: f64,
    pub sign: f64,
    /// Per-qudit unitaries. Two-qudit verdicts include the interaction's own
    /// 1-local terms; set verdicts carry the common basis change ψ → |0⟩.
    pub unitaries: Vec<Mat>,
}

#[derive(Clone, Debug)]
pub struct ClassificationVerdict {
    pub class: InteractionClass,
    pub rule: String,
    pub witness: Option<Witness>,
    pub residuals: BTreeMap<String, f64>,
    pub borderline: bool,
    pub rank: Option<usize>,
}

impl ClassificationVerdict {
    fn new(class: InteractionClass, rule: &str) -> Self {
        ClassificationVerdict {
            class,
            rule: rule.to_string(),
            witness: None,
            residuals: BTreeMap::new(),
            borderline: false,
            rank: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let cvec = |v: &Vect| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        let cmat = |m: &Mat| {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        json!({
            "class": self.class.label(),
            "rule": self.rule,
            "rank": self.rank,
            "borderline": self.borderline,
            "residuals": self.residuals,
            "witness": self.witness.as_ref().map(|w| json!({
                "psi": cvec(&w.psi),
                "scale": w.scale,
                "sign": w.sign,
                "unitaries": w.unitaries.iter().map(cmat).collect::<Vec<_>>(),
            })),
        })
    }
}

/// Replaces `site` by the maximally mixed state: I/d ⊗ tr_site(m).
fn average_site(m: &Mat, d: usize, n: usize, site: usize) -> Result<Mat> {
    let reduced = trace_out(m, d, n, site)?;
    if n == 1 {
        return Ok(linalg::eye(d) * (reduced[(0, 0)] / d as f64));
    }
    let others: Vec<usize> = (0..n).filter(|&s| s != site).collect();
    Ok(embed_matrix(&reduced, d, &others, n)?.unscale(d as f64))
}

fn trace_out(m: &Mat, d: usize, n: usize, site: usize) -> Result<Mat> {
    if n == 1 && site == 0 {
        return Ok(Mat::from_element(1, 1, linalg::trace(m)));
    }
    let op = ManyBodyOperator::from_dense(d, n, m.clone())?;
    Ok(partial_trace(&op, site)?.into_dense())
}

fn arity_of(m: &Mat, d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let mut k = 0;
    let mut dim = 1;
    while dim < m.nrows() {
        dim *= d;
        k += 1;
    }
    if dim != m.nrows() || m.nrows() != m.ncols() || k == 0 {
        return Err(Error::InvalidDimension(format!("{}x{} is not a power of {d}", m.nrows(), m.ncols())));
    }
    Ok(k)
}

/// Descending singular values and the rank at `tol` relative to the largest.
fn rank_of(sv: &[f64], tol: f64) -> (usize, bool) {
    let top = sv.first().copied().unwrap_or(0.0);
    if top <= 1e-14 {
        return (0, false);
    }
    let cut = tol * top;
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let borderline = sv.iter().any(|&s| s > cut / 10.0 && s < cut * 10.0);
    (rank, borderline)
}

/// H′ = H − I/d ⊗ tr₁H − tr₂H ⊗ I/d + tr(H)/d² · I and its coefficient matrix.
pub fn two_local_part(h: &Mat, d: usize, tol: f64) -> Result<TwoLocalDecomposition> {
    if arity_of(h, d)? != 2 {
        return Err(Error::InvalidDimension(format!("two-local part needs a 2-qudit operator, got dimension {}", h.nrows())));
    }
    linalg::check_hermitian(h, crate::operator::HERMITICITY_TOL)?;
    let basis = gell_mann_basis(d)?;
    let a0 = average_site(h, d, 2, 0)?;
    let a1 = average_site(h, d, 2, 1)?;
    let both = average_site(&a0, d, 2, 1)?;
    let h_prime = h - a0 - a1 + both;
    let k = basis.len();
    let mut m = vec![vec![0.0; k]; k];
    for (a, row) in m.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = 4.0 * linalg::hs_inner(&kron(basis.element(a), basis.element(b)), &h_prime).re;
        }
    }
    let mc = Mat::from_fn(k, k, |a, b| real(m[a][b]));
    let mut sv = linalg::singular_values(&mc);
    sv.sort_by(|a, b| b.total_cmp(a));
    let (rank, borderline) = rank_of(&sv, tol);
    Ok(TwoLocalDecomposition { local_dim: d, h_prime, m, singular_values: sv, rank, borderline })
}

pub fn two_local_rank(h: &Mat, d: usize, tol: f64) -> Result<usize> {
    Ok(two_local_part(h, d, tol)?.rank)
}

/// H′ = coeff · A ⊗ B with ‖A‖_F = ‖B‖_F = 1 from the top singular pair of M.
/// A's sign makes its leading nonzero diagonal entry non-negative.
pub fn rank_one_factors(dec: &TwoLocalDecomposition, basis: &HermitianBasis) -> Option<(f64, Mat, Mat)> {
    let (u, sv, vt) = linalg::try_svd(&dec.m_complex())?;
    let top = (0..sv.len()).max_by(|&a, &b| sv[a].total_cmp(&sv[b]))?;
    let d = dec.local_dim;
    let mut a = linalg::zeros(d, d);
    let mut b = linalg::zeros(d, d);
    for k in 0..basis.len() {
        a += basis.element(k) * u[(k, top)];
        b += basis.element(k) * vt[(top, k)];
    }
    // M is real, so the singular vectors are real up to one common phase.
    let phase = {
        let z = (0..basis.len()).map(|k| u[(k, top)]).max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
        z / z.norm()
    };
    a = a.map(|z| z / phase);
    b = b.map(|z| z * phase);
    let (fa, fb) = (linalg::frobenius(&a), linalg::frobenius(&b));
    let mut coeff = sv[top] * fa * fb;
    a = a.unscale(fa);
    b = b.unscale(fb);
    let lead = (0..d).map(|i| a[(i, i)].re).find(|x| x.abs() > 1e-12).unwrap_or(0.0);
    if lead < 0.0 {
        a = -a;
        coeff = -coeff;
    }
    Some((coeff, a, b))
}

/// ψ with A = a|ψ⟩⟨ψ| + bI, when A's spectrum splits into clusters of sizes 1 and d−1.
fn rank_one_projector_state(a: &Mat) -> Option<(Vect, f64)> {
    let d = a.nrows();
    let (vals, vecs) = linalg::eigh(a);
    let spread = vals[d - 1] - vals[0];
    if spread <= 1e-14 {
        return None;
    }
    let groups = cluster(&vals, CLUSTER_TOL * spread);
    if groups.len() != 2 {
        return None;
    }
    let sizes = (groups[0].len(), groups[1].len());
    let k = if d == 2 || sizes == (d - 1, 1) {
        d - 1
    } else if sizes == (1, d - 1) {
        0
    } else {
        return None;
    };
    let other = if k == 0 { vals[d - 1] } else { vals[0] };
    Some((vecs.column(k).into_owned(), vals[k] - other))
}

/// d|ψ⟩⟨ψ| − I.
pub fn centered_projector(psi: &Vect) -> Mat {
    let d = psi.len();
    linalg::proj(psi).scale(d as f64) - linalg::eye(d)
}

/// Unitary W with W|ψ⟩ = |0⟩.
pub fn basis_change_to_zero(psi: &Vect) -> Mat {
    let d = psi.len();
    let mut cols = Mat::zeros(d, d + 1);
    cols.set_column(0, psi);
    for i in 0..d {
        cols.set_column(i + 1, &linalg::basis_vector(d, i));
    }
    let mut q = Mat::zeros(d, d);
    let mut filled = 0;
    for c in 0..=d {
        let mut v: Vect = cols.column(c).into_owned();
        for j in 0..filled {
            let qj = q.column(j).into_owned();
            v -= &qj * qj.dotc(&v);
        }
        let nv = v.norm();
        if nv > 1e-8 && filled < d {
            q.set_column(filled, &v.unscale(nv));
            filled += 1;
        }
    }
    q.adjoint()
}

/// Two-qudit decision tree.
pub fn classify_two_qudit(h: &Mat, d: usize, tol: f64) -> Result<ClassificationVerdict> {
    let dec = two_local_part(h, d, tol)?;
    let basis = gell_mann_basis(d)?;
    let mut verdict = match dec.rank {
        0 => ClassificationVerdict::new(InteractionClass::OneLocalOnly, "two-local part vanishes"),
        1 => classify_rank_one(h, &dec, &basis)?,
        _ => ClassificationVerdict::new(InteractionClass::LaUniversal, "two-local rank at least 2"),
    };
    verdict.rank = Some(dec.rank);
    verdict.borderline = dec.borderline;
    verdict.residuals.insert("reconstruction".into(), linalg::max_abs(&(dec.reconstruct(&basis) - &dec.h_prime)));
    Ok(verdict)
}

fn classify_rank_one(h: &Mat, dec: &TwoLocalDecomposition, basis: &HermitianBasis) -> Result<ClassificationVerdict> {
    let d = dec.local_dim;
    let (coeff, a, b) = rank_one_factors(dec, basis)
        .ok_or(Error::NoConvergence { residual: f64::NAN })?;
    let sym = kron(&a, &b) + kron(&b, &a);
    let sym_dec = two_local_part(&sym, d, RANK_TOL)?;
    if sym_dec.rank != 1 {
        let mut v = ClassificationVerdict::new(InteractionClass::LaUniversal, "rank-one product of distinct operators");
        v.residuals.insert("symmetrized_rank".into(), sym_dec.rank as f64);
        return Ok(v);
    }
    let Some((psi, gap)) = rank_one_projector_state(&a) else {
        let (vals, _) = linalg::eigh(&a);
        let groups = cluster(&vals, CLUSTER_TOL * (vals[d - 1] - vals[0]).max(1e-300));
        let rule = if groups.len() >= 3 {
            "three distinct eigenvalues"
        } else {
            "operator not of the form a|psi><psi| + bI"
        };
        return Ok(ClassificationVerdict::new(InteractionClass::LaUniversal, rule));
    };
    // B = ±A; H′ = coeff·A⊗B = α (|ψ⟩⟨ψ| − I/d)^⊗2.
    let b_sign = if linalg::hs_inner(&a, &b).re >= 0.0 { 1.0 } else { -1.0 };
    let alpha = coeff * b_sign * gap * gap;
    let q = linalg::proj(&psi) - linalg::eye(d).unscale(d as f64);
    let form = kron(&q, &q).scale(alpha);
    let mut v = ClassificationVerdict::new(InteractionClass::LaStoquasticUniversal, "tensor square of a rank-one projector");
    v.residuals.insert("form".into(), linalg::max_abs(&(&form - &dec.h_prime)));

    let w = basis_change_to_zero(&psi);
    let mut unitaries = Vec::with_capacity(2);
    for site in 0..2 {
        let field = one_local_component(h, d, 2, site)?;
        let rotated = &w * field * w.adjoint();
        let out = stoquastic_witness(&rotated)?;
        unitaries.push(out.unitary * &w);
    }
    let rotated = kron(&unitaries[0], &unitaries[1]) * h * kron(&unitaries[0], &unitaries[1]).adjoint();
    v.residuals.insert("positive_offdiagonal".into(), max_positive_offdiagonal(&rotated));
    v.witness = Some(Witness { psi, scale: alpha.abs(), sign: alpha.signum(), unitaries });
    Ok(v)
}

/// Traceless part of the reduced operator on `site`, normalized per remaining dimension.
pub fn one_local_component(h: &Mat, d: usize, n: usize, site: usize) -> Result<Mat> {
    let mut m = h.clone();
    let mut sites: Vec<usize> = (0..n).collect();
    for s in (0..n).rev() {
        if s != site {
            m = trace_out(&m, d, sites.len(), sites.iter().position(|&x| x == s).unwrap_or(0))?;
            sites.retain(|&x| x != s);
        }
    }
    let m = m.unscale(checked_pow(d, n - 1)? as f64);
    let t = linalg::trace(&m).re / d as f64;
    Ok(m - linalg::eye(d).scale(t))
}

/// Largest positive real part, or largest modulus of a complex entry, among off-diagonals.
pub fn max_positive_offdiagonal(m: &Mat) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if r != c {
                let z = m[(r, c)];
                worst = worst.max(z.re).max(z.im.abs());
            }
        }
    }
    worst
}

#[derive(Clone, Debug)]
pub struct WitnessOutcome {
    /// U₂U₁, fixing |0⟩ up to phase.
    pub unitary: Mat,
    pub rotated: Mat,
    pub max_positive_offdiagonal: f64,
}

/// Given a 1-local term M in the basis where ψ = |0⟩: U₁ diagonalizes M on
/// span{|1⟩, …, |d−1⟩} and U₂ applies phases −e^{iθ_j}, after which every
/// off-diagonal entry is −|a_j| on the |0⟩ row and column.
pub fn stoquastic_witness(m: &Mat) -> Result<WitnessOutcome> {
    let d = m.nrows();
    linalg::check_hermitian(m, 1e-10)?;
    let sub = m.view((1, 1), (d - 1, d - 1)).into_owned();
    let (_, v) = linalg::eigh(&sub);
    let mut u1 = linalg::eye(d);
    u1.view_mut((1, 1), (d - 1, d - 1)).copy_from(&v.adjoint());
    let m1 = &u1 * m * u1.adjoint();
    let mut u2 = linalg::eye(d);
    for j in 1..d {
        let a = m1[(0, j)];
        if a.norm() > 1e-15 {
            u2[(j, j)] = -(a / a.norm());
        }
    }
    let unitary = &u2 * &u1;
    let rotated = &unitary * m * unitary.adjoint();
    let worst = max_positive_offdiagonal(&rotated);
    Ok(WitnessOutcome { unitary, rotated, max_positive_offdiagonal: worst })
}

/// Result of rotating an n-site Hamiltonian into stoquastic form with a witness.
#[derive(Clone, Debug)]
pub struct Stoquastified {
    pub unitaries: Vec<Mat>,
    pub rotated: Mat,
    pub max_positive_offdiagonal: f64,
}

/// Per-site witness unitaries for a Hamiltonian built from a stoquastic set plus
/// arbitrary 1-local terms, and the rotated matrix.
pub fn stoquastify(h: &Mat, d: usize, n: usize, psi: &Vect) -> Result<Stoquastified> {
    let w = basis_change_to_zero(psi);
    let mut unitaries = Vec::with_capacity(n);
    for site in 0..n {
        let field = one_local_component(h, d, n, site)?;
        let out = stoquastic_witness(&(&w * field * w.adjoint()))?;
        unitaries.push(out.unitary * &w);
    }
    let refs: Vec<&Mat> = unitaries.iter().collect();
    let u = kron_all(&refs);
    let rotated = &u * h * u.adjoint();
    let worst = max_positive_offdiagonal(&rotated);
    Ok(Stoquastified { unitaries, rotated, max_positive_offdiagonal: worst })
}

/// Decomposes a k-qudit operator as Σ_S H_S with H_S traceless on every site of S
/// and acting trivially elsewhere. Keys are sorted site lists; values act on those
/// sites only. Components below `zero_tol` (max entry) are dropped, except S = {}.
pub fn extract_subinteractions(h: &Mat, d: usize, zero_tol: f64) -> Result<BTreeMap<Vec<usize>, Mat>> {
    let k = arity_of(h, d)?;
    // Averaged copies E_T(h) for every subset T of averaged sites, built incrementally.
    let subsets = 1usize << k;
    let mut averaged: Vec<Option<Mat>> = vec![None; subsets];
    averaged[0] = Some(h.clone());
    for mask in 1..subsets {
        let low = mask.trailing_zeros() as usize;
        let prev = averaged[mask & (mask - 1)].as_ref().expect("built in order");
        averaged[mask] = Some(average_site(prev, d, k, low)?);
    }
    let mut out = BTreeMap::new();
    for s_mask in 0..subsets {
        // H_S = Σ_{T ⊆ S} (−1)^{|T|} E_{T ∪ S^c}(h).
        let complement = (subsets - 1) & !s_mask;
        let mut comp = linalg::zeros(h.nrows(), h.ncols());
        let mut t = s_mask;
        loop {
            let e = averaged[t | complement].as_ref().expect("all subsets built");
            if t.count_ones() % 2 == 0 {
                comp += e;
            } else {
                comp -= e;
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & s_mask;
        }
        let sites: Vec<usize> = (0..k).filter(|&i| s_mask & (1 << i) != 0).collect();
        if !sites.is_empty() && linalg::max_abs(&comp) <= zero_tol {
            continue;
        }
        let mut reduced = comp;
        let mut live: Vec<usize> = (0..k).collect();
        for s in (0..k).rev() {
            if !sites.contains(&s) {
                let pos = live.iter().position(|&x| x == s).expect("live site");
                reduced = trace_out(&reduced, d, live.len(), pos)?.unscale(d as f64);
                live.remove(pos);
            }
        }
        out.insert(sites, reduced);
    }
    Ok(out)
}

/// Coefficients c_{a₁…a_m} = 2^m tr(C · T^{a₁} ⊗ … ⊗ T^{a_m}), row-major in a₁.
fn coefficient_tensor(c: &Mat, m: usize, basis: &HermitianBasis) -> Vec<f64> {
    let k = basis.len();
    let total = k.pow(m as u32);
    let scale = 2f64.powi(m as i32);
    (0..total)
        .map(|mut idx| {
            let mut digits = vec![0; m];
            for slot in (0..m).rev() {
                digits[slot] = idx % k;
                idx /= k;
            }
            let ops: Vec<&Mat> = digits.iter().map(|&a| basis.element(a)).collect();
            scale * linalg::hs_inner(&kron_all(&ops), c).re
        })
        .collect()
}

/// Site-0 factor of a component by the top left singular vector of its
/// coefficient tensor reshaped as (d²−1) × rest.
fn leading_factor(c: &Mat, m: usize, basis: &HermitianBasis) -> Option<Mat> {
    let coeffs = coefficient_tensor(c, m, basis);
    let k = basis.len();
    let rest = coeffs.len() / k;
    let mat = Mat::from_fn(k, rest, |r, col| real(coeffs[r * rest + col]));
    let (u, sv, _) = linalg::try_svd(&mat)?;
    let top = (0..sv.len()).max_by(|&a, &b| sv[a].total_cmp(&sv[b]))?;
    let d = basis.local_dim();
    let mut a = linalg::zeros(d, d);
    for j in 0..k {
        a += basis.element(j) * u[(j, top)];
    }
    let z = (0..k).map(|j| u[(j, top)]).max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    Some(a.map(|x| x * z.conj() / z.norm()))
}

/// Classifies a set of interactions over a common local dimension.
pub fn classify_interaction_set(set: &[Interaction], tol: f64) -> Result<ClassificationVerdict> {
    let d = set.first().map(|i| i.local_dim()).ok_or_else(|| Error::InvalidDimension("empty interaction set".into()))?;
    if set.iter().any(|i| i.local_dim() != d) {
        return Err(Error::InvalidDimension("interactions have different local dimensions".into()));
    }
    let basis = gell_mann_basis(d)?;
    let mut components: Vec<(String, Vec<usize>, Mat)> = Vec::new();
    for it in set {
        let zero_tol = tol * linalg::max_abs(it.matrix()).max(1e-300);
        for (sites, comp) in extract_subinteractions(it.matrix(), d, zero_tol)? {
            if sites.len() >= 2 {
                components.push((it.name.clone(), sites, comp));
            }
        }
    }
    if components.is_empty() {
        return Ok(ClassificationVerdict::new(InteractionClass::OneLocalOnly, "all interactions are one-local"));
    }
    for it in set {
        if it.arity() == 2 {
            let dec = two_local_part(it.matrix(), d, tol)?;
            if dec.rank >= 2 {
                let mut v = ClassificationVerdict::new(InteractionClass::LaUniversal, "two-local rank at least 2");
                v.rank = Some(dec.rank);
                v.borderline = dec.borderline;
                return Ok(v);
            }
        }
    }
    let (_, sites, first) = &components[0];
    let candidate = leading_factor(first, sites.len(), &basis).and_then(|a| rank_one_projector_state(&a));
    let Some((psi, _)) = candidate else {
        return Ok(ClassificationVerdict::new(InteractionClass::LaUniversal, "operator not of the form a|psi><psi| + bI"));
    };
    let q1 = centered_projector(&psi);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    let mut residuals = BTreeMap::new();
    for (name, sites, comp) in &components {
        let ops: Vec<&Mat> = vec![&q1; sites.len()];
        let q = kron_all(&ops);
        let kappa = linalg::hs_inner(&q, comp).re / linalg::hs_inner(&q, &q).re;
        let rel = linalg::frobenius(&(comp - q.scale(kappa))) / linalg::frobenius(comp).max(1e-300);
        residuals.insert(format!("{name}{sites:?}"), rel);
        worst = worst.max(rel);
        scale = scale.max(kappa.abs());
    }
    if worst > FORM_TOL.max(tol) {
        let mut v = ClassificationVerdict::new(InteractionClass::LaUniversal, "no common state for all components");
        v.residuals = residuals;
        return Ok(v);
    }
    let mut v = ClassificationVerdict::new(InteractionClass::LaStoquasticUniversal, "tensor powers of a common rank-one projector");
    v.residuals = residuals;
    v.witness = Some(Witness { psi: psi.clone(), scale, sign: 1.0, unitaries: vec![basis_change_to_zero(&psi)] });
    Ok(v)
}

/// Result of the projection span check for one site of a k-qudit operator.
#[derive(Clone, Debug)]
pub struct SpanCheck {
    /// dim span{A_i} for H = Σ_i A_i ⊗ B_i with B_i the {I, T^a} basis on `site`.
    pub span_rank: usize,
    /// Rank of {⟨ψ|B_i|ψ⟩ A_i summed} over sampled states ψ.
    pub projected_rank: usize,
    /// Rank of the moment matrix x_i(ψ) = ⟨ψ|B_i|ψ⟩ restricted to nonzero A_i.
    pub moment_rank: usize,
}

/// Projecting `site` onto random states reaches every operator in span{A_i}.
pub fn projection_span_check(h: &Mat, d: usize, site: usize, samples: usize, seed: u64) -> Result<SpanCheck> {
    let k = arity_of(h, d)?;
    if site >= k {
        return Err(Error::Sites(format!("site {site} out of range for {k} sites")));
    }
    let basis = gell_mann_basis(d)?;
    let mut site_ops: Vec<Mat> = vec![linalg::eye(d)];
    site_ops.extend(basis.elements().iter().map(|e| e.matrix().clone()));
    let norms: Vec<f64> = site_ops.iter().map(|b| linalg::hs_inner(b, b).re).collect();
    let sub_dim = checked_pow(d, k - 1)?;
    // A_i = tr_site(h · B_i) / tr(B_i²).
    let mut a_ops = Vec::with_capacity(site_ops.len());
    for (b, nb) in site_ops.iter().zip(&norms) {
        let bb = embed_matrix(b, d, &[site], k)?;
        let mut r = &bb * h;
        r = trace_out(&r, d, k, site)?;
        a_ops.push(r.unscale(*nb));
    }
    let flatten = |ops: &[Mat]| Mat::from_fn(sub_dim * sub_dim, ops.len(), |r, c| ops[c][(r / sub_dim, r % sub_dim)]);
    let rank = |m: &Mat| {
        let mut sv = linalg::singular_values(m);
        sv.sort_by(|a, b| b.total_cmp(a));
        rank_of(&sv, 1e-9).0
    };
    let span_rank = rank(&flatten(&a_ops));
    let live: Vec<usize> = (0..a_ops.len()).filter(|&i| linalg::max_abs(&a_ops[i]) > 1e-12).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut projected = Vec::with_capacity(samples);
    let mut moments = Mat::zeros(samples, live.len());
    for s in 0..samples {
        let psi = linalg::random_state(d, &mut rng);
        let mut acc = linalg::zeros(sub_dim, sub_dim);
        for (i, b) in site_ops.iter().enumerate() {
            let x: C64 = psi.dotc(&(b * &psi));
            acc += &a_ops[i] * x;
            if let Some(col) = live.iter().position(|&l| l == i) {
                moments[(s, col)] = x;
            }
        }
        projected.push(acc);
    }
    Ok(SpanCheck { span_rank, projected_rank: rank(&flatten(&projected)), moment_rank: rank(&moments) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian_input() {
        let mut h = linalg::zeros(4, 4);
        h[(0, 1)] = real(1.0);
        assert!(matches!(classify_two_qudit(&h, 2, 1e-8), Err(Error::NotHermitian { .. })));
    }
    use crate::interactions::{heisenberg_sud, Interaction};

    fn pauli() -> (Mat, Mat, Mat) {
        let x = Mat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let y = Mat::from_row_slice(2, 2, &[real(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), real(0.0)]);
        let z = Mat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)]);
        (x, y, z)
    }

    fn diag(v: &[f64]) -> Mat {
        Mat::from_diagonal(&Vect::from_iterator(v.len(), v.iter().map(|&x| real(x))))
    }

    #[test]
    fn xx_plus_local_y_has_rank_one() {
        let (x, y, _) = pauli();
        let h = kron(&x, &x) + kron(&y, &linalg::eye(2));
        let dec = two_local_part(&h, 2, RANK_TOL).unwrap();
        assert_eq!(dec.rank, 1);
        assert!(linalg::max_abs(&(&dec.h_prime - kron(&x, &x))) < 1e-12);
    }

    #[test]
    fn heisenberg_has_full_rank_and_equal_singular_values() {
        for d in 2..=4 {
            let h = heisenberg_sud(d).unwrap();
            let dec = two_local_part(h.matrix(), d, RANK_TOL).unwrap();
            assert_eq!(dec.rank, d * d - 1);
            assert!(linalg::max_abs(&(&dec.h_prime - h.matrix())) < 1e-12);
            let s = &dec.singular_values;
            assert!((s[0] - s[s.len() - 1]).abs() < 1e-10);
            let basis = gell_mann_basis(d).unwrap();
            assert!(linalg::max_abs(&(dec.reconstruct(&basis) - &dec.h_prime)) < 1e-12);
        }
    }

    #[test]
    fn sum_of_local_terms_has_rank_zero() {
        let (x, _, z) = pauli();
        let h = kron(&x, &linalg::eye(2)) + kron(&linalg::eye(2), &z);
        assert_eq!(two_local_rank(&h, 2, RANK_TOL).unwrap(), 0);
        let v = classify_two_qudit(&h, 2, RANK_TOL).unwrap();
        assert_eq!(v.class, InteractionClass::OneLocalOnly);
    }

    #[test]
    fn ranks_of_simple_products() {
        let (x, y, z) = pauli();
        assert_eq!(two_local_rank(&kron(&z, &z), 2, RANK_TOL).unwrap(), 1);
        let xyz = kron(&x, &x) + kron(&y, &y) + kron(&z, &z);
        assert_eq!(two_local_rank(&xyz, 2, RANK_TOL).unwrap(), 3);
        let s2 = diag(&[1.0, -1.0, 0.0]);
        assert_eq!(two_local_rank(&kron(&s2, &s2), 3, RANK_TOL).unwrap(), 1);
    }

    #[test]
    fn s1_is_stoquastic_with_witness_zero() {
        let s1 = diag(&[1.0, -1.0, -1.0]);
        let v = classify_two_qudit(&kron(&s1, &s1), 3, RANK_TOL).unwrap();
        assert_eq!(v.class, InteractionClass::LaStoquasticUniversal);
        let w = v.witness.unwrap();
        assert!((w.psi[0].norm() - 1.0).abs() < 1e-10);
        assert!(v.residuals["form"] < 1e-10);
        assert!(v.residuals["positive_offdiagonal"] < 1e-10);
    }

    #[test]
    fn s2_is_universal() {
        let s2 = diag(&[1.0, -1.0, 0.0]);
        let v = classify_two_qudit(&kron(&s2, &s2), 3, RANK_TOL).unwrap();
        assert_eq!(v.class, InteractionClass::LaUniversal);
        assert_eq!(v.rule, "three distinct eigenvalues");
    }

    #[test]
    fn zz_is_stoquastic_and_xz_is_not() {
        let (x, _, z) = pauli();
        let v = classify_two_qudit(&kron(&z, &z), 2, RANK_TOL).unwrap();
        assert_eq!(v.class, InteractionClass::LaStoquasticUniversal);
        let v = classify_two_qudit(&kron(&x, &z), 2, RANK_TOL).unwrap();
        assert_eq!(v.class, InteractionClass::LaUniversal);
        assert_eq!(v.rule, "rank-one product of distinct operators");
    }

    #[test]
    fn rank_one_factors_are_normalized() {
        let s1 = diag(&[1.0, -1.0, -1.0]);
        let h = kron(&s1, &s1).scale(-2.5);
        let dec = two_local_part(&h, 3, RANK_TOL).unwrap();
        let basis = gell_mann_basis(3).unwrap();
        let (c, a, b) = rank_one_factors(&dec, &basis).unwrap();
        assert!((linalg::frobenius(&a) - 1.0).abs() < 1e-12);
        assert!(a[(0, 0)].re >= 0.0);
        assert!(linalg::max_abs(&(kron(&a, &b).scale(c) - &dec.h_prime)) < 1e-10);
    }

    #[test]
    fn product_of_traceless_ops_has_single_component() {
        let (x, _, z) = pauli();
        let comps = extract_subinteractions(&kron(&x, &z), 2, 1e-12).unwrap();
        let nonzero: Vec<_> = comps.iter().filter(|(_, m)| linalg::max_abs(m) > 1e-12).map(|(s, _)| s.clone()).collect();
        assert_eq!(nonzero, vec![vec![0, 1]]);
    }

    #[test]
    fn projector_on_000_has_all_components() {
        let p = linalg::proj(&linalg::basis_vector(8, 0));
        let comps = extract_subinteractions(&p, 2, 1e-12).unwrap();
        assert_eq!(comps.len(), 8);
        let (_, _, z) = pauli();
        let expected = kron_all(&[&z, &z, &z]).unscale(8.0);
        assert!(linalg::max_abs(&(&comps[&vec![0, 1, 2]] - expected)) < 1e-12);
        let mut total = linalg::zeros(8, 8);
        for (sites, m) in &comps {
            total += if sites.is_empty() { linalg::eye(8) * m[(0, 0)] } else { embed_matrix(m, 2, sites, 3).unwrap() };
        }
        assert!(linalg::max_abs(&(total - p)) < 1e-12);
    }

    #[test]
    fn components_are_traceless_on_their_sites() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = linalg::random_hermitian(27, &mut rng);
        let comps = extract_subinteractions(&h, 3, 0.0).unwrap();
        for (sites, m) in &comps {
            for pos in 0..sites.len() {
                let t = trace_out(m, 3, sites.len(), pos).unwrap();
                assert!(linalg::max_abs(&t) < 1e-10, "{sites:?}");
            }
        }
    }

    #[test]
    fn projected_states_span_the_operator_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = linalg::random_hermitian(9, &mut rng);
        let check = projection_span_check(&h, 3, 1, 20, 5).unwrap();
        assert_eq!(check.span_rank, 9);
        assert_eq!(check.projected_rank, check.span_rank);
        assert_eq!(check.moment_rank, 9);
    }

    #[test]
    fn set_classification_examples() {
        let p0 = linalg::proj(&linalg::basis_vector(27, 0));
        let set = vec![Interaction::custom("p000", 3, p0).unwrap()];
        let v = classify_interaction_set(&set, RANK_TOL).unwrap();
        assert_eq!(v.class, InteractionClass::LaStoquasticUniversal);
        assert!((v.witness.unwrap().psi[0].norm() - 1.0).abs() < 1e-10);

        let psi = Vect::from_vec(vec![real(1.0), real(0.0)]);
        let phi = Vect::from_vec(vec![real(0.6), real(0.8)]);
        let qa = centered_projector(&psi);
        let qb = centered_projector(&phi);
        let set = vec![
            Interaction::custom("a", 2, kron(&qa, &qa)).unwrap(),
            Interaction::custom("b", 2, kron(&qb, &qb)).unwrap(),
        ];
        assert_eq!(classify_interaction_set(&set, RANK_TOL).unwrap().class, InteractionClass::LaUniversal);

        let set = vec![heisenberg_sud(3).unwrap()];
        assert_eq!(classify_interaction_set(&set, RANK_TOL).unwrap().class, InteractionClass::LaUniversal);
    }

    #[test]
    fn witness_on_already_stoquastic_term_is_diagonal() {
        let m = Mat::from_row_slice(2, 2, &[real(0.3), real(-1.0), real(-1.0), real(0.1)]);
        let out = stoquastic_witness(&m).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                if r != c {
                    assert!(out.unitary[(r, c)].norm() < 1e-12);
                }
            }
        }
        assert!(out.max_positive_offdiagonal < 1e-12);
    }

    #[test]
    fn witness_gives_minus_abs_coupling() {
        let m = Mat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let out = stoquastic_witness(&m).unwrap();
        assert!((out.rotated[(0, 1)] - real(-1.0)).norm() < 1e-12);
    }

    #[test]
    fn random_witnesses_are_stoquastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let m = linalg::random_hermitian(3, &mut rng);
            let out = stoquastic_witness(&m).unwrap();
            assert!(out.max_positive_offdiagonal < 1e-12);
        }
    }

    #[test]
    fn verdict_serializes() {
        let s1 = diag(&[1.0, -1.0, -1.0]);
        let v = classify_two_qudit(&kron(&s1, &s1), 3, RANK_TOL).unwrap();
        let j = v.to_json();
        assert_eq!(j["class"], "LA_STOQUASTIC_UNIVERSAL");
        assert_eq!(j["witness"]["unitaries"].as_array().unwrap().len(), 2);
    }
}
