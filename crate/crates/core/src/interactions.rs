//! Interaction families, weighted term lists and Quantum Max-d-Cut instances.

use serde::{Deserialize, Serialize};

use crate::basis::{gell_mann_basis, spin_operators};
use crate::error::{Error, Result};
use crate::linalg::{self, checked_pow, kron, real, zeros, Mat, Vect, C64};
use crate::operator::{dense_limit, embed_matrix_sparse, LocalOperator, ManyBodyOperator};
use crate::spectral::lowest_eigenpairs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    HeisenbergSud,
    AltHeisenbergSud,
    HeisenbergSu2,
    BilinearBiquadratic,
    Aklt,
    StateProjector,
    SymProjector,
    Swap,
    Custom,
}

impl InteractionKind {
    pub fn label(self) -> &'static str {
        match self {
            InteractionKind::HeisenbergSud => "heisenberg_sud",
            InteractionKind::AltHeisenbergSud => "alt_heisenberg_sud",
            InteractionKind::HeisenbergSu2 => "heisenberg_su2",
            InteractionKind::BilinearBiquadratic => "bilinear_biquadratic",
            InteractionKind::Aklt => "aklt",
            InteractionKind::StateProjector => "state_projector",
            InteractionKind::SymProjector => "sym_projector",
            InteractionKind::Swap => "swap",
            InteractionKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Interaction {
    pub kind: InteractionKind,
    pub name: String,
    pub operator: LocalOperator,
    pub parameters: Vec<f64>,
    /// Invariance under exchanging the two sites, verified at construction (two-site only).
    pub swap_symmetric: Option<bool>,
}

impl Interaction {
    fn build(kind: InteractionKind, d: usize, matrix: Mat, parameters: Vec<f64>, symmetric: bool) -> Result<Self> {
        let operator = LocalOperator::from_matrix(d, matrix)?;
        if !operator.is_hermitian() {
            let m = operator.matrix();
            return Err(Error::NotHermitian {
                deviation: linalg::hermiticity_deviation(m),
                tolerance: crate::operator::HERMITICITY_TOL * linalg::max_abs(m),
            });
        }
        let swap_symmetric = if operator.arity() == 2 { Some(is_swap_symmetric(&operator)) } else { None };
        if symmetric && swap_symmetric != Some(true) {
            return Err(Error::InvalidDimension(format!("{} failed its swap-symmetry check", kind.label())));
        }
        Ok(Interaction { kind, name: kind.label().to_string(), operator, parameters, swap_symmetric })
    }

    /// Explicit interaction from a Hermitian matrix.
    pub fn custom(name: &str, d: usize, matrix: Mat) -> Result<Self> {
        let mut it = Self::build(InteractionKind::Custom, d, matrix, Vec::new(), false)?;
        it.name = name.to_string();
        Ok(it)
    }

    pub fn local_dim(&self) -> usize {
        self.operator.local_dim()
    }

    pub fn arity(&self) -> usize {
        self.operator.arity()
    }

    pub fn matrix(&self) -> &Mat {
        self.operator.matrix()
    }
}

/// SWAP|ij> = |ji>.
pub fn swap_matrix(d: usize) -> Mat {
    let mut m = zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(j * d + i, i * d + j)] = real(1.0);
        }
    }
    m
}

fn is_swap_symmetric(op: &LocalOperator) -> bool {
    let s = swap_matrix(op.local_dim());
    let conj = &s * op.matrix() * &s;
    linalg::max_abs(&(conj - op.matrix())) <= 1e-12 * linalg::max_abs(op.matrix()).max(1.0)
}

/// h = Σ_a T^a ⊗ T^a over the Gell-Mann basis.
pub fn heisenberg_sud(d: usize) -> Result<Interaction> {
    let basis = gell_mann_basis(d)?;
    let mut h = zeros(d * d, d * d);
    for t in basis.elements() {
        h += kron(t.matrix(), t.matrix());
    }
    Interaction::build(InteractionKind::HeisenbergSud, d, h, vec![], true)
}

/// h̃ = Σ_a T^a ⊗ (-T^a)^*.
pub fn alt_heisenberg_sud(d: usize) -> Result<Interaction> {
    let basis = gell_mann_basis(d)?;
    let mut h = zeros(d * d, d * d);
    for t in basis.elements() {
        let conj = t.matrix().map(|z| -z.conj());
        h += kron(t.matrix(), &conj);
    }
    Interaction::build(InteractionKind::AltHeisenbergSud, d, h, vec![], true)
}

/// Spin-s Heisenberg interaction Σ_a S^a ⊗ S^a with d = 2s+1.
pub fn heisenberg_su2(d: usize) -> Result<Interaction> {
    let s = spin_operators(d)?;
    let mut h = zeros(d * d, d * d);
    for c in s.components() {
        h += kron(c, c);
    }
    Interaction::build(InteractionKind::HeisenbergSu2, d, h, vec![], true)
}

/// Reduces an angle to [0, 2π).
pub fn reduce_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = theta.rem_euclid(two_pi);
    if r >= two_pi {
        0.0
    } else {
        r
    }
}

/// cos θ · h + sin θ · h² on two qutrits.
pub fn bilinear_biquadratic(theta: f64) -> Result<Interaction> {
    if !theta.is_finite() {
        return Err(Error::OutOfRange("theta must be finite".into()));
    }
    let theta = reduce_angle(theta);
    let h = heisenberg_su2(3)?.operator.into_matrix();
    let m = h.scale(theta.cos()) + (&h * &h).scale(theta.sin());
    Interaction::build(InteractionKind::BilinearBiquadratic, 3, m, vec![theta], true)
}

/// 3h + h² on two qutrits.
pub fn aklt() -> Result<Interaction> {
    let h = heisenberg_su2(3)?.operator.into_matrix();
    let m = h.scale(3.0) + &h * &h;
    Interaction::build(InteractionKind::Aklt, 3, m, vec![], true)
}

/// |ψ><ψ| for a normalized state on k qudits.
pub fn state_projector(psi: &Vect, d: usize) -> Result<Interaction> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    Interaction::build(InteractionKind::StateProjector, d, linalg::proj(psi), vec![], false)
}

/// Projector onto the symmetric subspace of two qudits.
pub fn sym_projector(d: usize) -> Result<Interaction> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let p = (swap_matrix(d) + linalg::eye(d * d)).scale(0.5);
    Interaction::build(InteractionKind::SymProjector, d, p, vec![], true)
}

pub fn swap(d: usize) -> Result<Interaction> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    Interaction::build(InteractionKind::Swap, d, swap_matrix(d), vec![], true)
}

/// Looks up an interaction family by its label.
pub fn interaction_by_name(name: &str, d: usize, params: &[f64]) -> Result<Interaction> {
    let need = |k: usize| -> Result<()> {
        if params.len() < k {
            Err(Error::Parse(format!("interaction '{name}' needs {k} parameter(s)")))
        } else {
            Ok(())
        }
    };
    let only_qutrits = || -> Result<()> {
        if d != 3 {
            Err(Error::InvalidDimension(format!("interaction '{name}' is defined for d=3 only")))
        } else {
            Ok(())
        }
    };
    match name {
        "heisenberg_sud" => heisenberg_sud(d),
        "alt_heisenberg_sud" => alt_heisenberg_sud(d),
        "heisenberg_su2" => heisenberg_su2(d),
        "bilinear_biquadratic" => {
            only_qutrits()?;
            need(1)?;
            bilinear_biquadratic(params[0])
        }
        "aklt" => {
            only_qutrits()?;
            aklt()
        }
        "sym_projector" => sym_projector(d),
        "swap" => swap(d),
        "state_projector" => {
            let psi = Vect::from_iterator(params.len(), params.iter().map(|x| real(*x)));
            state_projector(&psi, d)
        }
        other => Err(Error::Parse(format!("unknown interaction '{other}'"))),
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub interaction: Interaction,
    pub sites: Vec<usize>,
    pub weight: f64,
}

/// H = Σ_i α_i H^(i), each term an interaction placed on a site tuple.
#[derive(Clone, Debug)]
pub struct WeightedTermList {
    n_sites: usize,
    local_dim: usize,
    terms: Vec<Term>,
}

impl WeightedTermList {
    pub fn new(local_dim: usize, n_sites: usize) -> Result<Self> {
        if local_dim < 2 {
            return Err(Error::InvalidDimension(format!("local dimension {local_dim} < 2")));
        }
        checked_pow(local_dim, n_sites)?;
        Ok(WeightedTermList { n_sites, local_dim, terms: Vec::new() })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn push(&mut self, interaction: &Interaction, sites: &[usize], weight: f64) -> Result<()> {
        if !weight.is_finite() {
            return Err(Error::OutOfRange(format!("weight {weight} is not finite")));
        }
        if interaction.local_dim() != self.local_dim {
            return Err(Error::InvalidDimension("interaction dimension differs from the system".into()));
        }
        if sites.len() != interaction.arity() {
            return Err(Error::Sites(format!("{} sites for an interaction of arity {}", sites.len(), interaction.arity())));
        }
        for (k, &s) in sites.iter().enumerate() {
            if s >= self.n_sites || sites[..k].contains(&s) {
                return Err(Error::Sites(format!("site list {sites:?} invalid for {} sites", self.n_sites)));
            }
        }
        self.terms.push(Term { interaction: interaction.clone(), sites: sites.to_vec(), weight });
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.terms.iter_mut().for_each(|t| t.weight *= alpha);
        out
    }

    pub fn assemble_dense(&self) -> Result<Mat> {
        let dim = checked_pow(self.local_dim, self.n_sites)?;
        let mut h = zeros(dim, dim);
        for t in &self.terms {
            let m = crate::operator::embed_matrix(t.interaction.matrix(), self.local_dim, &t.sites, self.n_sites)?;
            h += m.scale(t.weight);
        }
        Ok(h)
    }

    /// Σ α_i embed(term_i); dense or sparse according to the dense limit.
    pub fn assemble(&self) -> Result<ManyBodyOperator> {
        let dim = checked_pow(self.local_dim, self.n_sites)?;
        if dim <= dense_limit() {
            return ManyBodyOperator::from_dense(self.local_dim, self.n_sites, self.assemble_dense()?);
        }
        let mut trips = Vec::new();
        for t in &self.terms {
            let s = embed_matrix_sparse(t.interaction.matrix(), self.local_dim, &t.sites, self.n_sites)?;
            trips.extend(s.iter().map(|(r, c, v)| (r, c, v * t.weight)));
        }
        ManyBodyOperator::from_sparse(
            self.local_dim,
            self.n_sites,
            crate::sparse::CsrMatrix::from_triplets(dim, dim, trips),
        )
    }

    /// Applies H to every column of `x` without assembling it.
    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        let mut y = zeros(x.nrows(), x.ncols());
        for t in &self.terms {
            y += crate::operator::apply_local(t.interaction.matrix(), self.local_dim, &t.sites, self.n_sites, x)?
                .scale(t.weight);
        }
        Ok(y)
    }
}

/// Weighted undirected graph with non-negative edge weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    pub fn cycle(n: usize) -> Self {
        Graph { n, edges: (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        for &(a, b, w) in &self.edges {
            if a >= self.n || b >= self.n || a == b {
                return Err(Error::Sites(format!("edge ({a},{b}) invalid for {} vertices", self.n)));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::OutOfRange(format!("edge weight {w} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}

/// Σ_edges w · P_sym on the edge.
pub fn max_d_cut_hamiltonian(graph: &Graph, d: usize) -> Result<WeightedTermList> {
    graph.validate()?;
    let p = sym_projector(d)?;
    let mut list = WeightedTermList::new(d, graph.n)?;
    for &(a, b, w) in &graph.edges {
        list.push(&p, &[a, b], w)?;
    }
    Ok(list)
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxCutResult {
    pub d: usize,
    pub n: usize,
    pub quantum_ground_energy: f64,
    pub quantum_residual: f64,
    /// Minimum total weight of monochromatic edges over all d-colorings.
    pub classical_min_penalty: f64,
    pub classical_best_coloring: Vec<usize>,
    pub max_cut_weight: f64,
    pub total_weight: f64,
}

/// Quantum ground energy of the Max-d-Cut Hamiltonian and the brute-force classical optimum.
pub fn max_d_cut(graph: &Graph, d: usize) -> Result<MaxCutResult> {
    let h = max_d_cut_hamiltonian(graph, d)?.assemble()?;
    let low = lowest_eigenpairs(&h, 1, None)?;
    let colorings = checked_pow(d, graph.n)?;
    let total: f64 = graph.edges.iter().map(|e| e.2).sum();
    let mut best = f64::INFINITY;
    let mut best_coloring = vec![0; graph.n];
    let mut colors = vec![0usize; graph.n];
    for idx in 0..colorings {
        let mut rest = idx;
        for v in (0..graph.n).rev() {
            colors[v] = rest % d;
            rest /= d;
        }
        let penalty: f64 = graph.edges.iter().filter(|e| colors[e.0] == colors[e.1]).map(|e| e.2).sum();
        if penalty < best {
            best = penalty;
            best_coloring.clone_from(&colors);
        }
    }
    Ok(MaxCutResult {
        d,
        n: graph.n,
        quantum_ground_energy: low.eigenvalues[0],
        quantum_residual: low.residual,
        classical_min_penalty: best,
        classical_best_coloring: best_coloring,
        max_cut_weight: total - best,
        total_weight: total,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub i: Vec<usize>,
    pub w: f64,
    #[serde(rename = "ref")]
    pub reference: String,
}

/// `{"d": 3, "interactions": [...], "terms": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionSetFile {
    pub d: usize,
    pub interactions: Vec<InteractionSpec>,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl InteractionSetFile {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn resolve(&self) -> Result<Vec<Interaction>> {
        self.interactions
            .iter()
            .map(|spec| match &spec.matrix {
                Some(values) => {
                    let side = (values.len() as f64).sqrt().round() as usize;
                    if side * side != values.len() {
                        return Err(Error::Parse(format!("matrix of '{}' is not square", spec.name)));
                    }
                    let m = Mat::from_row_iterator(side, side, values.iter().map(|&(re, im)| C64::new(re, im)));
                    Interaction::custom(&spec.name, self.d, m)
                }
                None => interaction_by_name(&spec.name, self.d, &spec.params),
            })
            .collect()
    }

    pub fn to_term_list(&self) -> Result<WeightedTermList> {
        let resolved = self.resolve()?;
        let n = match self.n {
            Some(n) => n,
            None => self.terms.iter().flat_map(|t| t.i.iter().copied()).max().map_or(0, |m| m + 1),
        };
        let mut list = WeightedTermList::new(self.d, n)?;
        for t in &self.terms {
            let k = self
                .interactions
                .iter()
                .position(|s| s.name == t.reference)
                .ok_or_else(|| Error::Parse(format!("term references unknown interaction '{}'", t.reference)))?;
            list.push(&resolved[k], &t.i, t.w)?;
        }
        Ok(list)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, max_abs, random_unitary};
    use crate::spectral::SpectralDecomposition;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn heisenberg_qubits_is_quarter_paulis() {
        let h = heisenberg_sud(2).unwrap();
        let x = Mat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        let y = Mat::from_row_slice(2, 2, &[real(0.0), c64(0.0, -1.0), c64(0.0, 1.0), real(0.0)]);
        let z = Mat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)]);
        let expected = (kron(&x, &x) + kron(&y, &y) + kron(&z, &z)).scale(0.25);
        assert!(max_abs(&(h.matrix() - expected)) < 1e-15);
        assert_eq!(h.swap_symmetric, Some(true));
    }

    #[test]
    fn swap_relation_brute_force() {
        for d in 2..=4 {
            let h = heisenberg_sud(d).unwrap();
            let rhs = h.matrix().scale(2.0) + linalg::eye(d * d).scale(1.0 / d as f64);
            assert!(max_abs(&(swap_matrix(d) - rhs)) < 1e-14, "d={d}");
        }
    }

    #[test]
    fn u_tensor_u_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for d in 2..=4 {
            let h = heisenberg_sud(d).unwrap();
            for _ in 0..20 {
                let u = random_unitary(d, &mut rng);
                let uu = kron(&u, &u);
                let rotated = &uu * h.matrix() * uu.adjoint();
                assert!(max_abs(&(rotated - h.matrix())) < 1e-12);
            }
        }
    }

    #[test]
    fn alternative_closed_form() {
        for d in 2..=5 {
            let h = alt_heisenberg_sud(d).unwrap();
            let df = d as f64;
            let mut phi = Vect::zeros(d * d);
            for i in 0..d {
                phi[i * d + i] = real(1.0 / df.sqrt());
            }
            let expected = linalg::eye(d * d).scale(1.0 / (2.0 * df)) - linalg::proj(&phi).scale(df / 2.0);
            assert!(max_abs(&(h.matrix() - &expected)) < 1e-14, "d={d}");
            let eig = (h.matrix() * &phi)[0] / phi[0];
            assert!((eig.re - (1.0 / (2.0 * df) - df / 2.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn spin_one_spectrum_and_cubic_relation() {
        let h = heisenberg_su2(3).unwrap();
        let s = SpectralDecomposition::from_matrix(h.matrix(), None).unwrap();
        assert_eq!(s.multiplicities(), vec![1, 3, 5]);
        let vals = s.cluster_values();
        for (v, e) in vals.iter().zip([-2.0, -1.0, 1.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let m = h.matrix();
        let h2 = m * m;
        let h3 = &h2 * m;
        assert!(max_abs(&(h3 - (m - h2.scale(2.0) + linalg::eye(9).scale(2.0)))) < 1e-12);
        assert!(max_abs(&(heisenberg_su2(2).unwrap().matrix() - heisenberg_sud(2).unwrap().matrix())) < 1e-15);
    }

    #[test]
    fn bbq_special_angles() {
        let theta = (1.0f64 / 3.0).atan();
        let b = bilinear_biquadratic(theta).unwrap();
        let a = aklt().unwrap();
        let ratio = a.matrix()[(0, 0)] / b.matrix()[(0, 0)];
        assert!(max_abs(&(b.matrix() * ratio - a.matrix())) < 1e-12);

        let b = bilinear_biquadratic(std::f64::consts::FRAC_PI_2).unwrap();
        let s = SpectralDecomposition::from_matrix(b.matrix(), None).unwrap();
        assert_eq!(s.multiplicities()[0], 8);
        let mut excluded = Vect::zeros(9);
        excluded[2] = real(1.0);
        excluded[4] = real(-1.0);
        excluded[6] = real(1.0);
        let ground = s.cluster_basis(0);
        assert!((ground.adjoint() * &excluded).norm() < 1e-12);

        let b = bilinear_biquadratic(std::f64::consts::FRAC_PI_4).unwrap();
        let s = SpectralDecomposition::from_matrix(b.matrix(), None).unwrap();
        assert_eq!(s.multiplicities()[0], 3);
        let p = s.cluster_projector(0);
        for (i, j) in [(0usize, 1usize), (1, 2), (0, 2)] {
            let mut v = Vect::zeros(9);
            v[i * 3 + j] = real(1.0);
            v[j * 3 + i] = real(-1.0);
            assert!((&p * &v - &v).norm() < 1e-12);
        }
    }

    #[test]
    fn projector_examples() {
        let mut v = Vect::zeros(4);
        v[0] = real(1.0);
        let p = state_projector(&v, 2).unwrap();
        assert_eq!(p.matrix()[(0, 0)], real(1.0));
        assert!(linalg::trace(p.matrix()).re == 1.0);
        let mut singlet = Vect::zeros(4);
        singlet[1] = real(1.0 / 2f64.sqrt());
        singlet[2] = real(-1.0 / 2f64.sqrt());
        let p = state_projector(&singlet, 2).unwrap();
        let expected = (linalg::eye(4) - swap_matrix(2)).scale(0.5);
        assert!(max_abs(&(p.matrix() - expected)) < 1e-15);
        assert!(matches!(state_projector(&(v * real(2.0)), 2), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn symmetric_projector_properties() {
        for d in 2..=4 {
            let p = sym_projector(d).unwrap();
            let m = p.matrix();
            assert!(max_abs(&(m * m - m)) < 1e-14);
            assert!((linalg::trace(m).re - (d * (d + 1) / 2) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn cycle_max_cut() {
        let r = max_d_cut(&Graph::cycle(4), 2).unwrap();
        assert!(r.quantum_ground_energy > 0.5);
        assert_eq!(r.classical_min_penalty, 0.0);
        assert_eq!(r.max_cut_weight, 4.0);
        let bad = Graph { n: 2, edges: vec![(0, 1, -1.0)] };
        assert!(max_d_cut(&bad, 2).is_err());
    }

    #[test]
    fn aklt_triangle_unique_antisymmetric_ground_state() {
        let a = aklt().unwrap();
        let mut list = WeightedTermList::new(3, 3).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            list.push(&a, &[i, j], 1.0).unwrap();
        }
        let h = list.assemble_dense().unwrap() + linalg::eye(27).scale(6.0);
        let s = SpectralDecomposition::from_matrix(&h, None).unwrap();
        assert_eq!(s.multiplicities()[0], 1);
        assert!(s.eigenvalues[0].abs() < 1e-12);
        let psi = crate::rep::antisymmetric_state(3).unwrap();
        let overlap = (s.cluster_basis(0).adjoint() * &psi)[0].norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interaction_set_file_parsing() {
        let json = r#"{"d":2,"interactions":[{"name":"zz","matrix":[[1,0],[0,0],[0,0],[0,0],[0,0],[-1,0],[0,0],[0,0],[0,0],[0,0],[-1,0],[0,0],[0,0],[0,0],[0,0],[1,0]]},{"name":"swap"}],"terms":[{"i":[0,1],"w":0.5,"ref":"zz"},{"i":[1,2],"w":1.0,"ref":"swap"}]}"#;
        let f = InteractionSetFile::from_json(json).unwrap();
        let list = f.to_term_list().unwrap();
        assert_eq!(list.n_sites(), 3);
        assert_eq!(list.terms().len(), 2);
        let bad = r#"{"d":2,"interactions":[{"name":"nope"}]}"#;
        assert!(InteractionSetFile::from_json(bad).unwrap().resolve().is_err());
    }
}
