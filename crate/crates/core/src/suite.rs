//! The reproduction suite: twelve numbered criteria, each run independently and
//! summarized as pass/fail with the metrics behind the verdict.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::gell_mann_basis;
use crate::classify::{
    classify_interaction_set, classify_two_qudit, stoquastify, two_local_rank, InteractionClass, RANK_TOL,
};
use crate::error::Result;
use crate::gadgets::{
    aklt_su3_gadget, alt_sud_reduction_gadget, bbq_logical_gadget, bbq_mediator_gadget, h_to_h2_gadget,
    h_to_h2_interference, projector_gadget_chain, qutrit_encoding_check, sud_coupling_gadget,
    sud_logical_qubit_gadget, sweep_representative, CouplingPattern, GadgetReport,
};
use crate::gadgets::bbq::{logical_range_ok, mediator_range_ok};
use crate::gadgets::projector::ProjectorVerdict;
use crate::gadgets::su2::singlet_sector_residuals;
use crate::interactions::{bilinear_biquadratic, heisenberg_sud, max_d_cut, Graph, Interaction};
use crate::linalg::{self, kron, real, Mat, Vect};
use crate::operator::embed_matrix;
use crate::rep::{casimir_operator, singlet_moment_residuals, su2_pair_casimir_spectrum, YoungDiagram};
use crate::spectral::SpectralDecomposition;
use crate::sw::convergence_sweep;
use crate::sw::sweep::default_deltas;

pub const CRITERIA: usize = 12;

const TITLES: [&str; CRITERIA] = [
    "AKLT gadget coefficients",
    "SU(d) logical qubit gadget",
    "SU(d) two-gadget coupling",
    "alternative SU(d) reduction",
    "fourth-order h -> h^2 gadget",
    "convergence scaling of exact SW",
    "projector chain",
    "SU(2) moment and sector identities",
    "bilinear-biquadratic gadgets",
    "classifier",
    "Quantum Max-2-Cut on the 4-cycle",
    "Casimir cross-check",
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub failures: Vec<String>,
    /// Set when a failure matches a documented, reproducible discrepancy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_discrepancy: Option<String>,
    /// Wall time; kept out of the serialized report so reruns are byte-identical.
    #[serde(skip)]
    pub seconds: f64,
}

impl CriterionResult {
    fn new(id: usize) -> Self {
        CriterionResult {
            id,
            title: TITLES[id - 1].to_string(),
            passed: true,
            metrics: BTreeMap::new(),
            failures: Vec::new(),
            known_discrepancy: None,
            seconds: 0.0,
        }
    }

    fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    fn require(&mut self, what: impl Into<String>, ok: bool) {
        if !ok {
            self.passed = false;
            self.failures.push(what.into());
        }
    }

    fn absorb(&mut self, label: &str, report: &GadgetReport) {
        for r in &report.residuals {
            if !r.passed {
                self.require(format!("{label}: {} = {:.3e} > {:.1e}", r.name, r.value, r.tolerance), false);
            }
        }
    }

    fn error(&mut self, label: &str, e: impl std::fmt::Display) {
        self.require(format!("{label}: {e}"), false);
    }

    /// One summary line.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("[{status}] {:>2}. {} ({:.2}s)", self.id, self.title, self.seconds);
        if let Some(k) = &self.known_discrepancy {
            s.push_str(&format!(" -- known discrepancy: {k}"));
        } else if let Some(f) = self.failures.first() {
            s.push_str(&format!(" -- {f}"));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionResult>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn lines(&self) -> Vec<String> {
        self.criteria.iter().map(CriterionResult::line).collect()
    }

    pub fn timings(&self) -> BTreeMap<usize, f64> {
        self.criteria.iter().map(|c| (c.id, c.seconds)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub deltas: Vec<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, deltas: default_deltas() }
    }
}

/// Runs one criterion by number (1..=12).
pub fn run_criterion(id: usize, opts: &SuiteOptions) -> CriterionResult {
    let start = Instant::now();
    let mut c = CriterionResult::new(id.clamp(1, CRITERIA));
    if !(1..=CRITERIA).contains(&id) {
        c.error("criterion", format!("no criterion {id}"));
        return c;
    }
    match id {
        1 => aklt(&mut c),
        2 => sud_logical(&mut c),
        3 => sud_coupling(&mut c),
        4 => alt_sud(&mut c),
        5 => h_to_h2(&mut c),
        6 => convergence(&mut c, &opts.deltas),
        7 => projector_chain(&mut c, opts.seed),
        8 => su2_identities(&mut c),
        9 => bbq(&mut c),
        10 => classifier(&mut c, opts.seed),
        11 => max_cut(&mut c),
        _ => casimir(&mut c),
    }
    c.seconds = start.elapsed().as_secs_f64();
    c
}

pub fn run_suite(opts: &SuiteOptions) -> SuiteReport {
    run_selected(&(1..=CRITERIA).collect::<Vec<_>>(), opts)
}

pub fn run_selected(ids: &[usize], opts: &SuiteOptions) -> SuiteReport {
    let criteria: Vec<CriterionResult> = ids.iter().map(|&id| run_criterion(id, opts)).collect();
    let passed = criteria.iter().filter(|c| c.passed).count();
    SuiteReport { failed: criteria.len() - passed, passed, criteria }
}

fn aklt(c: &mut CriterionResult) {
    match aklt_su3_gadget(1e-9) {
        Ok(out) => {
            c.absorb("aklt-su3", &out.report);
            c.metric("dimension", out.instance.dim() as f64);
        }
        Err(e) => c.error("aklt-su3", e),
    }
}

fn sud_logical(c: &mut CriterionResult) {
    for d in [2, 3] {
        match sud_logical_qubit_gadget(d, 1e-9) {
            Ok(out) => {
                c.absorb(&format!("d={d}"), &out.report);
                c.metric(format!("d{d}_ground_dim"), out.instance.split.ground_dim as f64);
                c.require(format!("d={d}: ground space is 2-dimensional"), out.instance.split.ground_dim == 2);
            }
            Err(e) => c.error(&format!("d={d}"), e),
        }
    }
}

fn sud_coupling(c: &mut CriterionResult) {
    let d = 2usize;
    let q = (d * d - 1) as f64;
    let stated = match sud_coupling_gadget(d, &CouplingPattern::stated(), 1e-9) {
        Ok((_, r)) => r,
        Err(e) => return c.error("stated pattern", e),
    };
    let prop = stated.residual("2-local part proportional to XX + 3/(d^2-1) ZZ").unwrap_or(f64::INFINITY);
    let xx = stated.derived.get("xx_coefficient").copied().unwrap_or(f64::NAN);
    let zz = stated.derived.get("zz_coefficient").copied().unwrap_or(f64::NAN);
    c.metric("stated_proportionality_residual", prop);
    c.metric("stated_xx", xx);
    c.metric("stated_zz", zz);
    if let Some(r) = stated.residual("dense second-order term agrees with the block evaluation") {
        c.metric("dense_vs_block", r);
        c.require("dense simulator agrees with the block evaluation", r <= 1e-9);
    }
    c.require(format!("stated pattern: 2-local part not proportional to XX + 3/(d^2-1) ZZ (residual {prop:.3e})"), prop <= 1e-8);

    let balanced = sud_coupling_gadget(d, &CouplingPattern::balanced(), 1e-9).map(|(_, r)| r);
    let balanced_prop = balanced
        .as_ref()
        .ok()
        .and_then(|r| r.residual("2-local part proportional to XX + 3/(d^2-1) ZZ"))
        .unwrap_or(f64::INFINITY);
    c.metric("balanced_proportionality_residual", balanced_prop);

    // The stated weights give (1/(8d q))(−q XX + ZZ); the 7-term pattern gives the claimed ratio.
    let scale = 1.0 / (8.0 * d as f64 * q);
    let reproduces = (xx + q * scale).abs() < 1e-10 && (zz - scale).abs() < 1e-10 && balanced_prop <= 1e-8;
    if !c.passed && reproduces {
        c.known_discrepancy = Some(format!(
            "stated weights give {xx:.6} XX + {zz:.6} ZZ; balanced pattern residual {balanced_prop:.1e}"
        ));
    }
}

fn alt_sud(c: &mut CriterionResult) {
    for d in [2, 3] {
        for mu in [-2.0, 0.0, 1.0] {
            match alt_sud_reduction_gadget(d, mu, 1e-9) {
                Ok(out) => c.absorb(&format!("d={d}, mu={mu}"), &out.report),
                Err(e) => c.error(&format!("d={d}, mu={mu}"), e),
            }
        }
    }
}

fn h_to_h2(c: &mut CriterionResult) {
    for d in [2, 3] {
        for (alpha, beta) in [(1.0, 1.0), (0.5, 2.0)] {
            match h_to_h2_gadget(d, alpha, beta, 1e-9) {
                Ok(out) => {
                    c.absorb(&format!("d={d}, alpha={alpha}, beta={beta}"), &out.report);
                    let worst = out
                        .report
                        .residuals
                        .iter()
                        .filter(|r| r.tolerance <= 1e-10)
                        .map(|r| r.value)
                        .fold(0.0, f64::max);
                    c.metric(format!("d{d}_a{alpha}_b{beta}_max_condition"), worst);
                }
                Err(e) => c.error(&format!("d={d}"), e),
            }
        }
    }
    match h_to_h2_interference(2, 1e-9) {
        Ok(r) => {
            c.absorb("interference", &r);
            if let Some(v) = r.residual("interference = (lambda^3/9) P") {
                c.metric("interference_residual", v);
            }
        }
        Err(e) => c.error("interference", e),
    }
}

const SLOPE_LIMITS: [f64; 4] = [-0.9, -0.45, -0.30, -0.20];

fn convergence(c: &mut CriterionResult, deltas: &[f64]) {
    for order in 1..=4 {
        let g = match sweep_representative(order) {
            Ok(g) => g,
            Err(e) => return c.error(&format!("order {order}"), e),
        };
        match convergence_sweep(&g, deltas) {
            Ok(r) => {
                let slope = r.slope.unwrap_or(f64::NAN);
                c.metric(format!("order{order}_slope"), slope);
                c.require(format!("order {order}: eps not monotone decreasing"), r.monotone);
                c.require(
                    format!("order {order}: slope {slope:.3} above {}", SLOPE_LIMITS[order - 1]),
                    slope <= SLOPE_LIMITS[order - 1],
                );
                c.require(format!("order {order}: rank mismatch"), r.rows.iter().all(|row| row.rank_ok));
            }
            Err(e) => c.error(&format!("order {order}"), e),
        }
    }
}

fn entangled_state(d: usize, rng: &mut ChaCha8Rng) -> Vect {
    loop {
        let psi = linalg::random_state(d * d, rng);
        let m = Mat::from_fn(d, d, |a, b| psi[a * d + b]);
        let sv = linalg::singular_values(&m);
        let mut sorted = sv.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        if sorted[1] > 1e-3 {
            return psi;
        }
    }
}

fn projector_chain(c: &mut CriterionResult, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7072_6f6a);
    let mut trials = 0;
    for d in [2, 3, 4] {
        let mut worst: f64 = 0.0;
        for k in 0..10 {
            let psi = entangled_state(d, &mut rng);
            let alpha = rng.random_range(-2.0..2.0);
            let beta = rng.random_range(-2.0..2.0);
            match projector_gadget_chain(&psi, d, alpha, beta, 1e-9) {
                Ok(out) => {
                    trials += 1;
                    c.absorb(&format!("d={d}, trial {k}"), &out.report);
                    c.require(format!("d={d}, trial {k}: entangled state classified as classical"), out.verdict != ProjectorVerdict::Classical);
                    worst = out.report.residuals.iter().map(|r| r.value).fold(worst, f64::max);
                }
                Err(e) => c.error(&format!("d={d}, trial {k}"), e),
            }
        }
        c.metric(format!("d{d}_max_residual"), worst);
        let a = linalg::random_state(d, &mut rng);
        let b = linalg::random_state(d, &mut rng);
        match projector_gadget_chain(&linalg::kron_vec(&a, &b), d, 0.7, 1.3, 1e-9) {
            Ok(out) => c.require(format!("d={d}: product state not classical"), out.verdict == ProjectorVerdict::Classical),
            Err(e) => c.error(&format!("d={d} product"), e),
        }
    }
    c.metric("trials", trials as f64);
}

fn su2_identities(c: &mut CriterionResult) {
    for d in 2..=6 {
        match singlet_moment_residuals(d) {
            Ok(r) => {
                let worst = r.iter().copied().fold(0.0, f64::max);
                c.metric(format!("d{d}_moments"), worst);
                c.require(format!("d={d}: moment identities residual {worst:.3e}"), worst <= 1e-11);
            }
            Err(e) => c.error(&format!("d={d}"), e),
        }
        match singlet_sector_residuals(d) {
            Ok((one, three)) => {
                c.metric(format!("d{d}_sectors"), one.max(three));
                c.require(format!("d={d}: sector membership residual {:.3e}", one.max(three)), one.max(three) <= 1e-10);
            }
            Err(e) => c.error(&format!("d={d}"), e),
        }
    }
    for d in 2..=4 {
        match qutrit_encoding_check(d, 1e-10) {
            Ok(out) => {
                c.absorb(&format!("qutrit encoding d={d}"), &out.report);
                c.metric(format!("d{d}_kernel"), out.report.derived.get("kernel_dimension").copied().unwrap_or(f64::NAN));
            }
            Err(e) => c.error(&format!("qutrit encoding d={d}"), e),
        }
    }
}

fn bbq(c: &mut CriterionResult) {
    let mut worst: f64 = 0.0;
    for k in 0..32 {
        let theta = 2.0 * PI * (k as f64 + 0.5) / 32.0;
        let (a, b) = (theta.cos(), theta.sin());
        let spec = bilinear_biquadratic(theta).and_then(|h| SpectralDecomposition::from_matrix(h.matrix(), None));
        match spec {
            Ok(s) => {
                let mut expected = [(4.0 * b - 2.0 * a, 1usize), (b - a, 3), (b + a, 5)];
                expected.sort_by(|x, y| x.0.total_cmp(&y.0));
                let mut want: Vec<f64> = expected.iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m)).collect();
                want.sort_by(f64::total_cmp);
                let dev = s.eigenvalues.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                worst = worst.max(dev);
            }
            Err(e) => c.error(&format!("theta={theta:.3}"), e),
        }
    }
    c.metric("spectrum_max_deviation", worst);
    c.require(format!("h^theta spectrum deviation {worst:.3e}"), worst <= 1e-10);

    let grid: Vec<f64> = (0..96).map(|k| 2.0 * PI * (k as f64 + 0.25) / 96.0).collect();
    let mediator: Vec<f64> = grid.iter().copied().filter(|&t| mediator_range_ok(t)).collect();
    let logical: Vec<f64> = grid.iter().copied().filter(|&t| logical_range_ok(t)).collect();
    let pick = |v: &[f64], n: usize| -> Vec<f64> {
        if v.len() <= n {
            return v.to_vec();
        }
        (0..n).map(|i| v[i * (v.len() - 1) / (n - 1)]).collect()
    };
    let mediator = pick(&mediator, 6);
    let logical = pick(&logical, 5);
    for &t in &mediator {
        match bbq_mediator_gadget(t, 1.0, 1.0, 1e-9) {
            Ok(out) => c.absorb(&format!("mediator theta={t:.4}"), &out.report),
            Err(e) => c.error(&format!("mediator theta={t:.4}"), e),
        }
    }
    for &t in &logical {
        match bbq_logical_gadget(t, 1e-9) {
            Ok(out) => c.absorb(&format!("logical theta={t:.4}"), &out.report),
            Err(e) => c.error(&format!("logical theta={t:.4}"), e),
        }
    }
    c.metric("mediator_samples", mediator.len() as f64);
    c.metric("logical_samples", logical.len() as f64);
}

fn diag(v: &[f64]) -> Mat {
    Mat::from_diagonal(&Vect::from_iterator(v.len(), v.iter().map(|&x| real(x))))
}

fn traceless<R: Rng>(d: usize, rng: &mut R) -> Mat {
    let m = linalg::random_hermitian(d, rng);
    let t = linalg::trace(&m).re / d as f64;
    m - linalg::eye(d).scale(t)
}

/// Random assembled Hamiltonian on `n` sites from 2-site interactions plus random 1-local fields.
fn random_assembly<R: Rng>(set: &[Mat], d: usize, n: usize, rng: &mut R) -> Result<Mat> {
    let dim = linalg::checked_pow(d, n)?;
    let mut h = linalg::zeros(dim, dim);
    for op in set {
        let k = {
            let mut k = 0;
            let mut x = 1;
            while x < op.nrows() {
                x *= d;
                k += 1;
            }
            k
        };
        for _ in 0..3 {
            let mut sites: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.random_range(i..n);
                sites.swap(i, j);
            }
            h += embed_matrix(op, d, &sites[..k], n)?.scale(rng.random_range(-2.0..2.0));
        }
    }
    for s in 0..n {
        h += embed_matrix(&linalg::random_hermitian(d, rng), d, &[s], n)?;
    }
    Ok(h)
}

fn classifier(c: &mut CriterionResult, seed: u64) {
    let s1 = diag(&[1.0, -1.0, -1.0]);
    let s2 = diag(&[1.0, -1.0, 0.0]);
    let z = diag(&[1.0, -1.0]);
    let s1s1 = kron(&s1, &s1);
    let zz = kron(&z, &z);
    let cases: [(&str, &Mat, usize, InteractionClass); 3] = [
        ("S1", &s1s1, 3, InteractionClass::LaStoquasticUniversal),
        ("S2", &kron(&s2, &s2), 3, InteractionClass::LaUniversal),
        ("ZZ", &zz, 2, InteractionClass::LaStoquasticUniversal),
    ];
    let mut witnesses: Vec<(String, Mat, usize, Vect)> = Vec::new();
    for (name, h, d, want) in cases {
        match classify_two_qudit(h, d, RANK_TOL) {
            Ok(v) => {
                c.require(format!("{name}: got {}", v.class.label()), v.class == want);
                if let Some(w) = v.witness {
                    witnesses.push((name.to_string(), h.clone(), d, w.psi));
                }
            }
            Err(e) => c.error(name, e),
        }
    }
    if let Some((_, _, _, psi)) = witnesses.iter().find(|w| w.0 == "S1") {
        let overlap = psi[0].norm();
        c.metric("s1_witness_overlap_with_0", overlap);
        c.require("S1 witness is |0>", (overlap - 1.0).abs() < 1e-10);
    }
    match heisenberg_sud(3).and_then(|h| classify_interaction_set(&[h], RANK_TOL)) {
        Ok(v) => c.require(format!("h_SU(3): got {}", v.class.label()), v.class == InteractionClass::LaUniversal),
        Err(e) => c.error("h_SU(3)", e),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636c_6173);
    let mut agree = 0;
    for trial in 0..100 {
        let d = if trial % 2 == 0 { 2 } else { 3 };
        let r = 1 + trial % 3;
        let mut h = linalg::zeros(d * d, d * d);
        for _ in 0..r {
            h += kron(&traceless(d, &mut rng), &traceless(d, &mut rng));
        }
        let u = kron(&linalg::random_unitary(d, &mut rng), &linalg::random_unitary(d, &mut rng));
        let rotated = &u * &h * u.adjoint()
            + kron(&linalg::random_hermitian(d, &mut rng), &linalg::eye(d))
            + kron(&linalg::eye(d), &linalg::random_hermitian(d, &mut rng));
        let (a, b) = (two_local_rank(&h, d, RANK_TOL), two_local_rank(&rotated, d, RANK_TOL));
        if matches!((a, b), (Ok(x), Ok(y)) if x == y && x == r) {
            agree += 1;
        }
    }
    c.metric("rank_invariance_agreements", agree as f64);
    c.require(format!("rank invariance held in {agree}/100 trials"), agree == 100);

    let p000 = linalg::proj(&linalg::basis_vector(27, 0));
    match Interaction::custom("p000", 3, p000.clone()).and_then(|i| classify_interaction_set(&[i], RANK_TOL)) {
        Ok(v) => {
            c.require(format!("|000><000|: got {}", v.class.label()), v.class == InteractionClass::LaStoquasticUniversal);
            if let Some(w) = v.witness {
                witnesses.push(("p000".into(), p000, 3, w.psi));
            }
        }
        Err(e) => c.error("p000", e),
    }
    let mut worst: f64 = 0.0;
    for (name, h, d, psi) in &witnesses {
        for _ in 0..5 {
            let n = if *d == 2 { 4 } else { 3 };
            let assembled = random_assembly(std::slice::from_ref(h), *d, n, &mut rng);
            match assembled.and_then(|m| stoquastify(&m, *d, n, psi)) {
                Ok(s) => worst = worst.max(s.max_positive_offdiagonal),
                Err(e) => c.error(name, e),
            }
        }
    }
    c.metric("witness_max_positive_offdiagonal", worst);
    c.require(format!("witness leaves off-diagonal entry {worst:.3e}"), worst <= 1e-10);
}

fn max_cut(c: &mut CriterionResult) {
    match max_d_cut(&Graph::cycle(4), 2) {
        Ok(r) => {
            c.metric("quantum_ground_energy", r.quantum_ground_energy);
            c.metric("classical_min_penalty", r.classical_min_penalty);
            c.require(format!("quantum ground energy {} not positive", r.quantum_ground_energy), r.quantum_ground_energy > 1e-9);
            c.require("classical cut leaves a monochromatic edge", r.classical_min_penalty == 0.0);
        }
        Err(e) => c.error("max-cut", e),
    }
}

fn partitions(n: usize, max_part: usize, max_rows: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    if max_rows == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max_part)).rev() {
        for mut rest in partitions(n - first, first, max_rows - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn casimir(c: &mut CriterionResult) {
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        let basis = match gell_mann_basis(d) {
            Ok(b) => b,
            Err(e) => return c.error(&format!("d={d}"), e),
        };
        // Fundamental on one site; all diagrams with d boxes (adjoint and trivial among them) on d sites.
        for sites in [1, 2, d] {
            let all: Vec<usize> = (0..sites).collect();
            let spectrum = casimir_operator(&all, sites, &basis).and_then(|op| SpectralDecomposition::from_matrix(&op.to_dense(), None));
            let s = match spectrum {
                Ok(s) => s,
                Err(e) => return c.error(&format!("d={d}"), e),
            };
            let values: Vec<f64> = partitions(sites, sites, d)
                .into_iter()
                .filter_map(|rows| YoungDiagram::new(rows, d).ok().map(|y| y.casimir_eigenvalue()))
                .collect();
            for ev in s.cluster_values() {
                let dev = values.iter().map(|v| (v - ev).abs()).fold(f64::INFINITY, f64::min);
                worst = worst.max(dev);
            }
            if sites == d {
                for (label, y) in [("adjoint", YoungDiagram::adjoint(d)), ("trivial", YoungDiagram::column(d, d))] {
                    let v = y.map(|y| y.casimir_eigenvalue()).unwrap_or(f64::NAN);
                    let dev = s.cluster_values().iter().map(|e| (e - v).abs()).fold(f64::INFINITY, f64::min);
                    c.require(format!("d={d}: {label} value {v} absent from the spectrum"), dev <= 1e-10);
                }
            }
        }
        match su2_pair_casimir_spectrum(d) {
            Ok(s) => {
                let values = s.cluster_values();
                c.require(format!("d={d}: su(2) pair spectrum has {} clusters", values.len()), values.len() == d);
                for (j, ev) in values.iter().enumerate() {
                    let y = if j == 0 { YoungDiagram::new(Vec::new(), 2) } else { YoungDiagram::new(vec![2 * j], 2) };
                    let v = y.map(|y| y.casimir_eigenvalue()).unwrap_or(f64::NAN);
                    worst = worst.max((v - ev).abs());
                }
            }
            Err(e) => c.error(&format!("su(2) d={d}"), e),
        }
    }
    c.metric("max_deviation", worst);
    c.require(format!("Casimir deviation {worst:.3e}"), worst <= 1e-10);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_four() {
        assert_eq!(partitions(4, 4, 4).len(), 5);
        assert_eq!(partitions(4, 4, 2), vec![vec![4], vec![3, 1], vec![2, 2]]);
    }

    #[test]
    fn cheap_criteria_pass() {
        let opts = SuiteOptions::default();
        for id in [11, 12] {
            let r = run_criterion(id, &opts);
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(13, &SuiteOptions::default()).passed);
    }
}
