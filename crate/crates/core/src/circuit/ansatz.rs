//! Ansatz families.

use serde::{Deserialize, Serialize};

use super::gate::{Gate, Param};
use super::synth::{Angle, TwoLevelBuilder};
use super::Circuit;
use crate::error::{check_dim, Error, Result};
use crate::model::{check_sites, strong_coupling_state};
use crate::sim::StateVector;

/// Real vector given by its nonzero computational-basis components.
pub type SupportVector = Vec<(u64, f64)>;

/// `a_n = prod_{i<n} sin(theta_i) cos(theta_n)`, last entry the full sine
/// product; `theta.len() + 1` weights with unit norm.
pub fn hyperspherical_weights(theta: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(theta.len() + 1);
    let mut prefix = 1.0;
    for &t in theta {
        out.push(prefix * t.cos());
        prefix *= t.sin();
    }
    out.push(prefix);
    out
}

/// The ten baryon amplitudes from nine angles.
pub fn hyperspherical_amplitudes(theta: &[f64]) -> Result<Vec<f64>> {
    check_dim(9, theta.len())?;
    Ok(hyperspherical_weights(theta))
}

/// A circuit with its input state and what it is meant to span.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ansatz {
    pub name: String,
    pub circuit: Circuit,
    /// Computational basis input `|Psi_0>`.
    pub input: u64,
    pub baryon_number: i32,
    /// For superposition ansaetze, the vectors weighted by
    /// [`hyperspherical_weights`]; empty otherwise.
    pub elements: Vec<SupportVector>,
    /// Whether every output is a color singlet.
    pub singlet: bool,
}

impl Ansatz {
    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params
    }

    pub fn state(&self, theta: &[f64]) -> Result<StateVector> {
        let mut s = StateVector::basis(self.n_qubits(), self.input)?;
        s.apply_circuit(&self.circuit, theta)?;
        Ok(s)
    }

    /// Output predicted from the element list, for superposition ansaetze.
    pub fn predicted_state(&self, theta: &[f64]) -> Result<StateVector> {
        if self.elements.is_empty() {
            return Err(Error::Contract(format!("{} has no element list", self.name)));
        }
        check_dim(self.n_params(), theta.len())?;
        let w = hyperspherical_weights(theta);
        let mut amps = vec![0.0; 1 << self.n_qubits()];
        for (e, a) in self.elements.iter().zip(w) {
            for &(b, c) in e {
                amps[b as usize] += a * c;
            }
        }
        StateVector::from_real(self.n_qubits(), &amps)
    }
}

fn check_elements(n_qubits: usize, elements: &[SupportVector]) -> Result<()> {
    if elements.is_empty() {
        return Err(Error::Parameter("superposition needs at least one element".into()));
    }
    let limit = 1u64.checked_shl(n_qubits as u32).unwrap_or(0);
    for (i, e) in elements.iter().enumerate() {
        let norm: f64 = e.iter().map(|(_, c)| c * c).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter(format!("element {i} has norm^2 {norm}")));
        }
        for (k, &(b, _)) in e.iter().enumerate() {
            if limit != 0 && b >= limit {
                return Err(Error::Parameter(format!("state {b:#b} outside {n_qubits} qubits")));
            }
            if e[..k].iter().any(|&(b2, _)| b2 == b) {
                return Err(Error::Parameter(format!("element {i} repeats state {b:#b}")));
            }
        }
    }
    for i in 0..elements.len() {
        for j in 0..i {
            let dot: f64 = elements[i]
                .iter()
                .map(|&(b, c)| c * elements[j].iter().find(|e| e.0 == b).map(|e| e.1).unwrap_or(0.0))
                .sum();
            if dot.abs() > 1e-10 {
                return Err(Error::Parameter(format!("elements {j} and {i} overlap ({dot})")));
            }
        }
    }
    Ok(())
}

/// Elements whose supports intersect, transitively, as index lists.
fn blocks(elements: &[SupportVector]) -> Vec<Vec<usize>> {
    let n = elements.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in 0..i {
            if elements[i].iter().any(|(b, _)| elements[j].iter().any(|(b2, _)| b == b2)) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => out[k].push(i),
            None => {
                roots.push(r);
                out.push(vec![i]);
            }
        }
    }
    out
}

/// Orthonormal completion of the given columns inside `dim` dimensions.
fn complete(columns: &[(usize, Vec<f64>)], dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = columns.iter().map(|c| c.1.clone()).collect();
    let mut extra = Vec::new();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        for _ in 0..2 {
            for u in &basis {
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v.clone());
            extra.push(v);
        }
    }
    extra
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    nalgebra::DMatrix::from_fn(d, d, |i, j| m[i][j]).determinant()
}

/// Circuit preparing `sum_n a_n(theta) |v_n>` from `|up...up>`.
///
/// Each element gets a primary basis state (its first listed state not yet
/// taken by an overlapping element). The variational part flips bits to
/// reach the first primary and spreads weight over the primaries with a
/// hyperspherical cascade of two-level rotations; the static tail rotates
/// each primary onto its element. Rotations use only the controls needed on
/// the reachable subspace.
pub fn ansatz_superposition(
    name: &str,
    n_qubits: usize,
    baryon_number: i32,
    elements: Vec<SupportVector>,
    singlet: bool,
) -> Result<Ansatz> {
    check_elements(n_qubits, &elements)?;
    let groups = blocks(&elements);
    let mut primary = vec![0u64; elements.len()];
    for g in &groups {
        let mut taken: Vec<u64> = Vec::new();
        for &i in g {
            let p = elements[i]
                .iter()
                .map(|e| e.0)
                .find(|b| !taken.contains(b))
                .or_else(|| {
                    // fall back to any support state of the block
                    g.iter().flat_map(|&j| elements[j].iter().map(|e| e.0)).find(|b| !taken.contains(b))
                })
                .ok_or_else(|| Error::Contract("block has fewer states than elements".into()))?;
            taken.push(p);
            primary[i] = p;
        }
    }
    let d = elements.len();
    let mut builder = TwoLevelBuilder::new(n_qubits, 0, true);
    builder.prepare(primary[0])?;
    for k in 0..d - 1 {
        builder.givens(primary[k], primary[k + 1], Angle::Slot(k))?;
    }
    builder.reserve_params(d - 1);
    let mut elements = elements;
    for g in &groups {
        let mut states: Vec<u64> = g.iter().flat_map(|&i| elements[i].iter().map(|e| e.0)).collect();
        states.sort_unstable();
        states.dedup();
        let dim = states.len();
        let idx = |b: u64| states.iter().position(|&s| s == b).unwrap();
        let column = |e: &SupportVector| {
            let mut v = vec![0.0; dim];
            for &(b, c) in e {
                v[idx(b)] = c;
            }
            v
        };
        let cols: Vec<(usize, Vec<f64>)> = g.iter().map(|&i| (idx(primary[i]), column(&elements[i]))).collect();
        if cols.iter().all(|(k, v)| (v[*k] - 1.0).abs() < 1e-15) {
            continue;
        }
        let mut extra = complete(&cols, dim).into_iter();
        let mut q = vec![vec![0.0; dim]; dim];
        let mut free_cols = Vec::new();
        for k in 0..dim {
            let v = match cols.iter().find(|c| c.0 == k) {
                Some(c) => c.1.clone(),
                None => {
                    free_cols.push(k);
                    extra.next().expect("completion size")
                }
            };
            for (r, row) in q.iter_mut().enumerate() {
                row[k] = v[r];
            }
        }
        if determinant(&q) < 0.0 {
            // flip a completion column when there is one, else the last element
            let k = match free_cols.first() {
                Some(&k) => k,
                None => {
                    let i = *g.last().unwrap();
                    elements[i].iter_mut().for_each(|e| e.1 = -e.1);
                    idx(primary[i])
                }
            };
            q.iter_mut().for_each(|row| row[k] = -row[k]);
        }
        builder.orthogonal(&states, &q)?;
    }
    Ok(Ansatz {
        name: name.to_string(),
        circuit: builder.finish(),
        input: 0,
        baryon_number,
        elements,
        singlet,
    })
}

/// Superposition of basis states with optional singlet pairs: each pair
/// `(i, j)` merges `states[i]` and `states[j]` into
/// `(|states_i> - |states_j>)/sqrt2` at the position of `i`.
pub fn ansatz_basis_superposition(
    n_qubits: usize,
    baryon_number: i32,
    states: &[u64],
    pairing: &[(usize, usize)],
) -> Result<Ansatz> {
    for (i, s) in states.iter().enumerate() {
        if states[..i].contains(s) {
            return Err(Error::Parameter(format!("state {s:#b} listed twice")));
        }
    }
    let mut partner: Vec<Option<usize>> = vec![None; states.len()];
    let mut used = vec![false; states.len()];
    for &(i, j) in pairing {
        if i >= states.len() || j >= states.len() || i == j {
            return Err(Error::Parameter(format!("pair ({i}, {j}) invalid")));
        }
        if used[i] || used[j] {
            return Err(Error::Parameter(format!("pair ({i}, {j}) overlaps another pair")));
        }
        used[i] = true;
        used[j] = true;
        partner[i] = Some(j);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::new();
    for (i, &s) in states.iter().enumerate() {
        match partner[i] {
            Some(j) => elements.push(vec![(s, h), (states[j], -h)]),
            None if !used[i] => elements.push(vec![(s, 1.0)]),
            None => {}
        }
    }
    let singlet = !pairing.is_empty();
    ansatz_superposition("basis-superposition", n_qubits, baryon_number, elements, singlet)
}

/// The general `N = 4`, `B = 1` circuit: nine angles spanning the ten
/// singlet states of the sector.
pub fn ansatz_n4_baryon_general() -> Result<Ansatz> {
    let basis = crate::exact::singlet_basis_n4_b1();
    let elements = basis.elements.iter().map(|e| e.coefficients()).collect();
    let mut a = ansatz_superposition("n4-baryon-general", 8, 1, elements, true)?;
    a.circuit.n_params = 9;
    Ok(a)
}

/// Singlet superposition over every color-singlet state of the sector.
pub fn ansatz_singlet_sector(n_sites: usize, baryon_number: i32) -> Result<Ansatz> {
    let elements = crate::exact::singlet_vectors(n_sites, baryon_number)?;
    ansatz_superposition(
        &format!("singlet-n{n_sites}-b{baryon_number}"),
        2 * n_sites,
        baryon_number,
        elements,
        true,
    )
}

/// Singlet superposition restricted to states with at most `max_particles`
/// fermions and antifermions relative to the bare vacuum.
pub fn ansatz_singlet_cut(n_sites: usize, baryon_number: i32, max_particles: u32) -> Result<Ansatz> {
    let vac = strong_coupling_state(n_sites, 0)?;
    let all = if n_sites == 4 && baryon_number == 1 {
        crate::exact::singlet_basis_n4_b1().elements.iter().map(|e| e.coefficients()).collect()
    } else {
        crate::exact::singlet_vectors(n_sites, baryon_number)?
    };
    let elements: Vec<SupportVector> = all
        .into_iter()
        .filter(|e| e.iter().all(|&(b, _)| (b ^ vac).count_ones() <= max_particles))
        .collect();
    ansatz_superposition(
        &format!("singlet-n{n_sites}-b{baryon_number}-cut{max_particles}"),
        2 * n_sites,
        baryon_number,
        elements,
        true,
    )
}

/// The `N = 2`, `B = 0` vacuum and meson family over
/// `{|up up down down>, (|up down down up> - |down up up down>)/sqrt2, |down down up up>}`.
pub fn ansatz_n2_vacuum() -> Result<Ansatz> {
    let p = crate::model::parse_spins;
    let states = [p("↑↑↓↓")?, p("↑↓↓↑")?, p("↓↑↑↓")?, p("↓↓↑↑")?];
    let mut a = ansatz_basis_superposition(4, 0, &states, &[(1, 2)])?;
    a.name = "n2-vacuum".into();
    Ok(a)
}

/// Excitation-preserving brickwork: layer `k` applies `PSWAP(theta[k(2N-1)+j])`
/// on `(j, j+1)` for `j = 0..2N-1` in ascending order. Input is the
/// strong-coupling state of the sector.
pub fn ansatz_brickwork(n_sites: usize, baryon_number: i32, layers: usize) -> Result<Ansatz> {
    check_sites(n_sites)?;
    if layers == 0 {
        return Err(Error::Parameter("brickwork needs at least one layer".into()));
    }
    let nq = 2 * n_sites;
    let mut c = Circuit::new(nq);
    for k in 0..layers {
        for j in 0..nq - 1 {
            c.push(Gate::pswap(j, j + 1, Param::slot(k * (nq - 1) + j)));
        }
    }
    Ok(Ansatz {
        name: format!("brickwork-n{n_sites}-b{baryon_number}-l{layers}"),
        circuit: c,
        input: strong_coupling_state(n_sites, baryon_number)?,
        baryon_number,
        elements: Vec::new(),
        singlet: false,
    })
}
