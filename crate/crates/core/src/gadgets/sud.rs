use crate::basis::{gell_mann_basis, HermitianBasis};
use crate::error::{Error, Result};
use crate::gadgets::{encoding_residual, norm, on, to_logical, GadgetOutput, GadgetReport, CONDITION_TOL};
use crate::interactions::{alt_heisenberg_sud, heisenberg_sud};
use crate::linalg::{self, kron, real, Mat, Vect};
use crate::operator::{apply_local, dense_limit, place_states};
use crate::rep::{antisymmetric_state, casimir_operator};
use crate::sw::series::chain;
use crate::sw::{GadgetInstance, Perturbations};

/// Site groups of one logical-qubit gadget on 2d qudits: the two special
/// qudits and the blocks A, B of d-1 qudits each.
#[derive(Clone, Debug)]
pub struct LogicalLayout {
    pub d: usize,
    pub one: usize,
    pub two: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl LogicalLayout {
    pub fn new(d: usize, offset: usize) -> Self {
        LogicalLayout {
            d,
            one: offset,
            two: offset + 1,
            a: (offset + 2..offset + d + 1).collect(),
            b: (offset + d + 1..offset + 2 * d).collect(),
        }
    }

    pub fn all(&self) -> Vec<usize> {
        let mut v = vec![self.one, self.two];
        v.extend(&self.a);
        v.extend(&self.b);
        v
    }

    /// Sites of a group label: '1', '2', 'A' or 'B'.
    pub fn group(&self, label: char) -> Result<Vec<usize>> {
        match label {
            '1' => Ok(vec![self.one]),
            '2' => Ok(vec![self.two]),
            'A' => Ok(self.a.clone()),
            'B' => Ok(self.b.clone()),
            other => Err(Error::Parse(format!("unknown site group '{other}'"))),
        }
    }
}

/// Per-generator closed forms of Π T^a_i T^a_j Π on the logical qubit.
pub fn table_row(d: usize, i: char, j: char) -> Mat {
    let (x, z, id) = paulis();
    let q = (d * d - 1) as f64;
    let df = d as f64;
    let key = if i <= j { (i, j) } else { (j, i) };
    match key {
        (a, b) if a == b => id.scale(1.0 / (2.0 * df)),
        ('1', 'A') | ('2', 'B') => -x.scale(1.0 / (4.0 * q.sqrt())) - z.scale(1.0 / (4.0 * q)) - id.scale((df * df - 2.0) / (4.0 * df * q)),
        ('1', 'B') | ('2', 'A') => x.scale(1.0 / (4.0 * q.sqrt())) - z.scale(1.0 / (4.0 * q)) - id.scale((df * df - 2.0) / (4.0 * df * q)),
        ('1', '2') | ('A', 'B') => z.scale(1.0 / (2.0 * q)) - id.scale(1.0 / (2.0 * df * q)),
        _ => unreachable!("labels are 1, 2, A, B"),
    }
}

/// Removes the identity and 1-local components of a two-qubit operator.
fn two_local_part(m: &Mat) -> Mat {
    let mut left = linalg::zeros(2, 2);
    let mut right = linalg::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                left[(i, j)] += m[(2 * i + k, 2 * j + k)];
                right[(i, j)] += m[(2 * k + i, 2 * k + j)];
            }
        }
    }
    let id = linalg::eye(2);
    let t = linalg::trace(m).re;
    m - kron(&left, &id).scale(0.5) - kron(&id, &right).scale(0.5) + linalg::eye(4).scale(t / 4.0)
}

fn paulis() -> (Mat, Mat, Mat) {
    let x = Mat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
    let z = Mat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)]);
    (x, z, linalg::eye(2))
}

/// H₀ = C(E) + C(A) + C(B) − (d²−1)/d · I on one logical gadget of `n` sites.
fn logical_h0(layout: &LogicalLayout, n: usize, basis: &HermitianBasis) -> Result<Mat> {
    let d = layout.d as f64;
    let ce = casimir_operator(&layout.all(), n, basis)?.to_dense();
    let ca = casimir_operator(&layout.a, n, basis)?.to_dense();
    let cb = casimir_operator(&layout.b, n, basis)?.to_dense();
    let dim = ce.nrows();
    Ok(ce + ca + cb - linalg::eye(dim).scale((d * d - 1.0) / d))
}

/// φ₁ = |Ψ⟩_{1A}|Ψ⟩_{2B}, φ₂ = |Ψ⟩_{1B}|Ψ⟩_{2A}.
fn paired_states(layout: &LogicalLayout, n: usize) -> Result<(Vect, Vect)> {
    let d = layout.d;
    let psi = antisymmetric_state(d)?;
    let mut s1a = vec![layout.one];
    s1a.extend(&layout.a);
    let mut s2b = vec![layout.two];
    s2b.extend(&layout.b);
    let mut s1b = vec![layout.one];
    s1b.extend(&layout.b);
    let mut s2a = vec![layout.two];
    s2a.extend(&layout.a);
    let phi1 = place_states(&[(&s1a, &psi), (&s2b, &psi)], d, n)?;
    let phi2 = place_states(&[(&s1b, &psi), (&s2a, &psi)], d, n)?;
    Ok((phi1, phi2))
}

/// |0_L⟩ ∝ φ₁ + φ₂, |1_L⟩ ∝ φ₁ − φ₂ as columns of a dim × 2 isometry.
fn logical_basis(phi1: &Vect, phi2: &Vect, d: usize) -> Mat {
    let df = d as f64;
    let zero = (phi1 + phi2).scale((df / (2.0 * (df + 1.0))).sqrt());
    let one = (phi1 - phi2).scale((df / (2.0 * (df - 1.0))).sqrt());
    Mat::from_columns(&[zero, one])
}

/// Σ_{k∈A} h_{ik} style coupling Σ_a T^a_S ⊗ T^a_R between two site groups.
fn group_coupling(h: &Mat, d: usize, s: &[usize], r: &[usize], n: usize) -> Result<Mat> {
    let dim = linalg::checked_pow(d, n)?;
    let mut out = linalg::zeros(dim, dim);
    for &i in s {
        for &j in r {
            out += on(h, d, &[i, j], n)?;
        }
    }
    Ok(out)
}

const TABLE_ROWS: [(&str, &[(char, char)]); 4] = [
    ("(1,1),(2,2),(A,A),(B,B)", &[('1', '1'), ('2', '2'), ('A', 'A'), ('B', 'B')]),
    ("(1,A),(2,B)", &[('1', 'A'), ('2', 'B')]),
    ("(1,B),(2,A)", &[('1', 'B'), ('2', 'A')]),
    ("(1,2),(A,B)", &[('1', '2'), ('A', 'B')]),
];

/// Logical qubit encoded in 2d qudits of dimension d, with the projected
/// generator table verified for every a.
pub fn sud_logical_qubit_gadget(d: usize, tol: f64) -> Result<GadgetOutput> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let n = 2 * d;
    let dim = linalg::checked_pow(d, n)?;
    if dim > dense_limit() {
        return Err(Error::InvalidDimension(format!("dimension {dim} exceeds the dense limit {}", dense_limit())));
    }
    let basis = gell_mann_basis(d)?;
    let layout = LogicalLayout::new(d, 0);
    let h0 = logical_h0(&layout, n, &basis)?;
    let (phi1, phi2) = paired_states(&layout, n)?;
    let enc = logical_basis(&phi1, &phi2, d);

    let h = heisenberg_sud(d)?.operator.into_matrix();
    let h1a = group_coupling(&h, d, &[layout.one], &layout.a, n)?;
    let h12 = on(&h, d, &[layout.one, layout.two], n)?;
    let q = (d * d - 1) as f64;
    let logical_target = (table_row(d, '1', 'A') + table_row(d, '1', '2')).scale(q);
    let target = &enc * &logical_target * enc.adjoint();
    let pert = Perturbations { h1: Some(&h1a + &h12), ..Default::default() };
    let g = GadgetInstance::new("sud-logical", 1, d, n, h0.clone(), pert)?
        .with_target(target)
        .with_site_map(vec![layout.all()])
        .with_encoding(enc.clone());

    let mut report = GadgetReport::new("sud-logical", d);
    report.absorb_conditions(&g, CONDITION_TOL);
    report.derive("ground_dim", g.split.ground_dim as f64);
    report.check("ground space is 2-dimensional", (g.split.ground_dim as f64 - 2.0).abs(), 0.0);
    let overlap = phi1.dotc(&phi2);
    report.derive("paired_state_overlap", overlap.re);
    report.check("<phi1|phi2> = 1/d", (overlap - real(1.0 / d as f64)).norm(), 1e-10);
    report.check("paired states lie in the ground space", norm(&(&h0 * Mat::from_columns(&[phi1.clone(), phi2.clone()]))), CONDITION_TOL);
    report.check("logical basis spans the ground space", encoding_residual(&g, &enc), CONDITION_TOL);

    // T^a_S V for every group and generator.
    let mut tv = std::collections::BTreeMap::new();
    for label in ['1', '2', 'A', 'B'] {
        let sites = layout.group(label)?;
        let mut per_a = Vec::with_capacity(basis.len());
        for a in 0..basis.len() {
            let mut acc = linalg::zeros(dim, 2);
            for &s in &sites {
                acc += apply_local(basis.element(a), d, &[s], n, &enc)?;
            }
            per_a.push(acc);
        }
        tv.insert(label, per_a);
    }
    for (row, pairs) in TABLE_ROWS {
        let mut worst: f64 = 0.0;
        for &(i, j) in pairs {
            let expect = table_row(d, i, j);
            for a in 0..basis.len() {
                let m = tv[&i][a].adjoint() * &tv[&j][a];
                worst = worst.max(norm(&(m - &expect)));
            }
        }
        report.check(&format!("table row {row}"), worst, tol);
    }
    let eff = to_logical(&g, &g.split.compress(g.perturbations.h1.as_ref().unwrap()), &enc);
    report.check("projected h_1A + h_12 matches the table", norm(&(&eff - &logical_target)), tol);
    report.operators(&eff, &logical_target);
    Ok(GadgetOutput { instance: g, report })
}

/// Which inter-gadget couplings h_{ij'} carry weight 1 in H₂.
#[derive(Clone, Debug)]
pub struct CouplingPattern(pub Vec<(char, char)>);

impl CouplingPattern {
    /// {(1,A), (2,B), (A,1), (B,A), (B,B)}.
    pub fn stated() -> Self {
        CouplingPattern(vec![('1', 'A'), ('2', 'B'), ('A', '1'), ('B', 'A'), ('B', 'B')])
    }

    /// A seven-term pattern whose logical 2-local part is exactly (1/(8d))(XX + 3/(d²−1) ZZ).
    pub fn balanced() -> Self {
        CouplingPattern(vec![('1', '2'), ('1', 'A'), ('2', '2'), ('2', 'B'), ('A', 'A'), ('A', 'B'), ('B', '1')])
    }
}

/// Second-order coupling of two logical-qubit gadgets, evaluated on the
/// logical space from the per-gadget generator table (valid because every
/// excitation T^b_S|ψ⟩ has H₀-eigenvalue 2d). At d = 2 the dense 256-dim
/// simulator is also built and compared.
pub fn sud_coupling_gadget(d: usize, pattern: &CouplingPattern, tol: f64) -> Result<(Option<GadgetOutput>, GadgetReport)> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("local dimension {d} < 2")));
    }
    let n1 = 2 * d;
    let single_dim = linalg::checked_pow(d, n1)?;
    if single_dim > dense_limit() {
        return Err(Error::InvalidDimension(format!("single gadget dimension {single_dim} exceeds the dense limit")));
    }
    let basis = gell_mann_basis(d)?;
    let layout = LogicalLayout::new(d, 0);
    let h0 = logical_h0(&layout, n1, &basis)?;
    let (phi1, phi2) = paired_states(&layout, n1)?;
    let enc = logical_basis(&phi1, &phi2, d);
    let df = d as f64;
    let q = df * df - 1.0;

    let mut report = GadgetReport::new("sud-coupling", d);
    for (i, j) in &pattern.0 {
        report.note(format!("coupling h_({i},{j}')"));
    }

    // Excitations T^b_S V: H₀ eigenvalue d within one gadget, Π-projection zero.
    let mut gens: std::collections::BTreeMap<char, Vec<Mat>> = std::collections::BTreeMap::new();
    let mut excitation: f64 = 0.0;
    let mut first_order: f64 = 0.0;
    for label in ['1', '2', 'A', 'B'] {
        let sites = layout.group(label)?;
        let mut per_a = Vec::with_capacity(basis.len());
        for a in 0..basis.len() {
            let mut acc = linalg::zeros(single_dim, 2);
            for &s in &sites {
                acc += apply_local(basis.element(a), d, &[s], n1, &enc)?;
            }
            excitation = excitation.max(norm(&(&h0 * &acc - acc.scale(df))));
            first_order = first_order.max(norm(&(enc.adjoint() * &acc)));
            per_a.push(acc);
        }
        gens.insert(label, per_a);
    }
    report.check("H0 T^b_S|psi> = d T^b_S|psi>", excitation, CONDITION_TOL);
    report.check("P T^b_S P = 0", first_order, CONDITION_TOL);

    // −(1/2d) Σ αα Σ_a (Π T^a_i T^a_k Π) ⊗ (Π T^a_j T^a_l Π).
    let mut eff = linalg::zeros(4, 4);
    for &(i, j) in &pattern.0 {
        for &(k, l) in &pattern.0 {
            for a in 0..basis.len() {
                let left = gens[&i][a].adjoint() * &gens[&k][a];
                let right = gens[&j][a].adjoint() * &gens[&l][a];
                eff -= kron(&left, &right).scale(1.0 / (2.0 * df));
            }
        }
    }
    let two_local = two_local_part(&eff);
    let (x, z, _) = paulis();
    let xx = kron(&x, &x);
    let zz = kron(&z, &z);
    let coeff_xx = linalg::hs_inner(&xx, &two_local).re / 4.0;
    let coeff_zz = linalg::hs_inner(&zz, &two_local).re / 4.0;
    let stated = (&xx + zz.scale(3.0 / q)).scale(1.0 / (8.0 * df * q));
    report.derive("xx_coefficient", coeff_xx).derive("zz_coefficient", coeff_zz);
    report.derive("xx_coefficient_times_8d(d^2-1)", coeff_xx * 8.0 * df * q);
    report.derive("zz_coefficient_times_8d(d^2-1)", coeff_zz * 8.0 * df * q);
    report.derive("identity_coefficient", linalg::trace(&eff).re / 4.0);

    // Table-based cross-check of the same quantity.
    let mut from_table = linalg::zeros(4, 4);
    for &(i, j) in &pattern.0 {
        for &(k, l) in &pattern.0 {
            from_table -= kron(&table_row(d, i, k), &table_row(d, j, l)).scale(q / (2.0 * df));
        }
    }
    report.check("logical operator agrees with the generator table", norm(&(&eff - &from_table)), tol);

    let (coeffs, outside) = crate::gadgets::fit_operator(&two_local, &[xx.clone() + zz.scale(3.0 / q)]);
    let proportional = if coeffs[0] > 0.0 { outside / norm(&two_local).max(1e-300) } else { f64::INFINITY };
    report.derive("fitted_multiple_of_xx_plus_3zz", coeffs[0]);
    report.check("2-local part proportional to XX + 3/(d^2-1) ZZ", proportional, 1e-8);
    report.check("2-local part equals (1/(8d(d^2-1)))(XX + 3/(d^2-1) ZZ)", norm(&(&two_local - &stated)), 1e-8);
    report.operators(&two_local, &stated);

    if d != 2 {
        report.note("dense simulator skipped; logical operator evaluated from single-gadget blocks");
        return Ok((None, report));
    }

    // Dense two-gadget simulator.
    let n = 2 * n1;
    let left = LogicalLayout::new(d, 0);
    let right = LogicalLayout::new(d, n1);
    let big_h0 = logical_h0(&left, n, &basis)? + logical_h0(&right, n, &basis)?;
    let h = heisenberg_sud(d)?.operator.into_matrix();
    let dim = linalg::checked_pow(d, n)?;
    let mut h2 = linalg::zeros(dim, dim);
    for &(i, j) in &pattern.0 {
        h2 += group_coupling(&h, d, &left.group(i)?, &right.group(j)?, n)?;
    }
    let big_enc = kron(&enc, &enc);
    let target = &big_enc * &eff * big_enc.adjoint();
    let g = GadgetInstance::new("sud-coupling", 2, d, n, big_h0, Perturbations { h2: Some(h2.clone()), ..Default::default() })?
        .with_target(target)
        .with_site_map(vec![left.all(), right.all()])
        .with_encoding(big_enc.clone());
    report.absorb_conditions(&g, CONDITION_TOL);
    report.check("two-gadget ground space is the logical product space", encoding_residual(&g, &big_enc), CONDITION_TOL);
    let dense = to_logical(&g, &(-chain(&g.split, &[&h2, &h2])), &big_enc);
    report.check("dense second-order term agrees with the block evaluation", norm(&(&dense - &eff)), tol);
    Ok((Some(GadgetOutput { instance: g, report: report.clone() }), report))
}

/// Second-order reduction from the alternative SU(d) interaction to
/// Σ_a T^a ⊗ T^a on qudits 0 and 1, mediated by a maximally entangled pair (2, 3).
pub fn alt_sud_reduction_gadget(d: usize, mu: f64, tol: f64) -> Result<GadgetOutput> {
    if !mu.is_finite() {
        return Err(Error::OutOfRange("mu must be finite".into()));
    }
    let n = 4;
    let ht = alt_heisenberg_sud(d)?.operator.into_matrix();
    let h = heisenberg_sud(d)?.operator.into_matrix();
    let dim = linalg::checked_pow(d, n)?;
    let id = linalg::eye(dim);
    let df = d as f64;
    let q = df * df - 1.0;

    let mut phi = Vect::zeros(d * d);
    for i in 0..d {
        phi[i * d + i] = real(1.0 / df.sqrt());
    }
    let pi_local = linalg::proj(&phi);
    let h0 = (on(&ht, d, &[2, 3], n)? + id.scale(q / (2.0 * df))).scale(2.0 / df);
    let projector_form = &id - on(&pi_local, d, &[2, 3], n)?;
    let h2 = on(&ht, d, &[0, 3], n)? + on(&ht, d, &[1, 3], n)?.scale(mu);
    let target = id.scale(-(1.0 + mu * mu) * q / (4.0 * df * df)) - on(&h, d, &[0, 1], n)?.scale(mu / df);

    let enc = {
        let mut v = linalg::zeros(dim, d * d);
        for k in 0..d * d {
            let sys = linalg::basis_vector(d * d, k);
            v.set_column(k, &place_states(&[(&[0, 1], &sys), (&[2, 3], &phi)], d, n)?);
        }
        v
    };
    let g = GadgetInstance::new("alt-sud", 2, d, n, h0.clone(), Perturbations { h2: Some(h2.clone()), ..Default::default() })?
        .with_target(target.clone())
        .with_site_map(vec![vec![0], vec![1]])
        .with_encoding(enc.clone());

    let s = &g.split;
    let second = -chain(s, &[&h2, &h2]);
    let expected = s.compress(&target);
    let mut report = GadgetReport::new("alt-sud", d);
    report.param("mu", mu);
    report.absorb_conditions(&g, CONDITION_TOL);
    report.check("H0 = I - |phi><phi|", norm(&(&h0 - &projector_form)), CONDITION_TOL);
    report.check("P H2 P = 0", norm(&s.compress(&h2)), CONDITION_TOL);
    report.check("-P H2 H0^-1 H2 P = -(1+mu^2)(d^2-1)/(4d^2) I - (mu/d) h_12", norm(&(&second - &expected)), tol);
    let eff_l = to_logical(&g, &second, &enc);
    let (coeffs, _) = crate::gadgets::fit_operator(&eff_l, &[linalg::eye(d * d), h.clone()]);
    report.derive("identity_coefficient", coeffs[0]).derive("h_coefficient", coeffs[1]);
    report.operators(&eff_l, &to_logical(&g, &expected, &enc));
    Ok(GadgetOutput { instance: g, report })
}
