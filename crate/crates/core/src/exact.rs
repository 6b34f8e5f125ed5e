//! Dense exact diagonalization inside symmetry sectors.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_sites, format_spins, parse_spins, LatticeParams, ModelOperators};
use crate::par::{self, ExecMode};
use crate::pauli::PauliSum;
use crate::sim::StateVector;

/// Largest register handled by the dense solver.
pub const MAX_DENSE_QUBITS: usize = 16;
/// Eigenvalue threshold for the `Q^2 = 0` null space.
pub const SINGLET_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub baryon_number: i32,
    pub qz_zero: bool,
    pub singlet_only: bool,
}

impl SectorSpec {
    pub fn new(baryon_number: i32) -> Self {
        SectorSpec { baryon_number, qz_zero: true, singlet_only: false }
    }

    pub fn singlet(baryon_number: i32) -> Self {
        SectorSpec { baryon_number, qz_zero: true, singlet_only: true }
    }

    pub fn full(baryon_number: i32) -> Self {
        SectorSpec { baryon_number, qz_zero: false, singlet_only: false }
    }
}

/// Cell types `(up-down, down-up)` counts of a basis state.
fn antiparallel_counts(n_sites: usize, b: u64) -> (usize, usize) {
    let mut ud = 0;
    let mut du = 0;
    for n in 0..n_sites {
        match b >> (2 * n) & 0b11 {
            0b10 => ud += 1,
            0b01 => du += 1,
            _ => {}
        }
    }
    (ud, du)
}

/// Computational basis states of a sector, ascending.
pub fn sector_basis(n_sites: usize, spec: &SectorSpec) -> Result<Vec<u64>> {
    check_sites(n_sites)?;
    let nq = 2 * n_sites;
    if nq > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!("{nq} qubits > {MAX_DENSE_QUBITS}")));
    }
    // sum sigma^z = nq - 2 * downs = 4B
    let downs = nq as i64 - 4 * spec.baryon_number as i64;
    if downs < 0 || downs % 2 != 0 || downs / 2 > nq as i64 {
        return Ok(Vec::new());
    }
    let downs = (downs / 2) as u32;
    Ok((0..1u64 << nq)
        .filter(|b| b.count_ones() == downs)
        .filter(|&b| {
            if !spec.qz_zero {
                return true;
            }
            let (ud, du) = antiparallel_counts(n_sites, b);
            ud == du
        })
        .collect())
}

/// Matrix of `h` restricted to `basis` (which must be closed under `h`).
pub fn sector_matrix(h: &PauliSum, basis: &[u64], mode: ExecMode) -> Result<DMatrix<f64>> {
    let index: HashMap<u64, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let d = basis.len();
    let cols = par::map(mode, basis, |&b| {
        // single strings may leave the sector; only their sum must not
        let mut acc: std::collections::BTreeMap<u64, Complex64> = std::collections::BTreeMap::new();
        for (p, c) in h.iter() {
            let (b2, ph) = p.apply_to_basis(b);
            *acc.entry(b2).or_default() += ph.to_complex() * c;
        }
        let mut col: Vec<(usize, Complex64)> = Vec::new();
        for (b2, v) in acc {
            match index.get(&b2) {
                Some(&i) => col.push((i, v)),
                None if v.norm() < 1e-12 => {}
                None => return Err(Error::Contract(format!("operator leaves sector at {b2:#b}"))),
            }
        }
        Ok(col)
    });
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col? {
            if v.im.abs() > 1e-12 {
                return Err(Error::NonHermitian(v.im, format!("element ({i}, {j})")));
            }
            m[(i, j)] += v.re;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub energies: Vec<f64>,
    /// Eigenvectors expressed on `basis`.
    pub states: Vec<Vec<f64>>,
    pub basis: Vec<u64>,
    pub sector: SectorSpec,
    pub params: LatticeParams,
    /// Dimension of the space diagonalized (singlet subspace when requested).
    pub dim: usize,
}

impl SpectrumResult {
    pub fn state_vector(&self, k: usize) -> Result<StateVector> {
        let nq = self.params.n_qubits();
        let mut amps = vec![0.0; 1 << nq];
        for (&b, &a) in self.basis.iter().zip(&self.states[k]) {
            amps[b as usize] = a;
        }
        StateVector::from_real(nq, &amps)
    }
}

fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (vals, vecs)
}

fn fix_phase(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|a| a.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
    }
}

/// Orthonormal basis (columns, on `basis`) of the `Q^2 = 0` subspace.
pub fn singlet_subspace(ops: &ModelOperators, basis: &[u64], mode: ExecMode) -> Result<DMatrix<f64>> {
    let q2 = sector_matrix(&ops.charge_casimir()?, basis, mode)?;
    let (vals, vecs) = sorted_eigen(q2);
    let k = vals.iter().take_while(|&&v| v < SINGLET_TOLERANCE).count();
    Ok(vecs.columns(0, k).into_owned())
}

/// Lowest `k` eigenpairs of the Hamiltonian inside a sector.
pub fn eigensolve_sector(p: &LatticeParams, spec: &SectorSpec, k: usize) -> Result<SpectrumResult> {
    eigensolve_sector_with(&ModelOperators::new(p.n_sites)?, p, spec, k, ExecMode::best())
}

pub fn eigensolve_sector_with(
    ops: &ModelOperators,
    p: &LatticeParams,
    spec: &SectorSpec,
    k: usize,
    mode: ExecMode,
) -> Result<SpectrumResult> {
    if spec.singlet_only && !spec.qz_zero {
        return Err(Error::Parameter("singlet restriction requires qz_zero".into()));
    }
    let basis = sector_basis(p.n_sites, spec)?;
    if basis.is_empty() {
        return Err(Error::Parameter(format!("sector {spec:?} is empty for N = {}", p.n_sites)));
    }
    let h = ops.hamiltonian(p.m_tilde, p.x)?;
    let hm = sector_matrix(&h, &basis, mode)?;
    let (vals, vecs, dim) = if spec.singlet_only {
        let v = singlet_subspace(ops, &basis, mode)?;
        let hs = v.transpose() * &hm * &v;
        let (vals, u) = sorted_eigen(hs);
        (vals, &v * u, v.ncols())
    } else {
        let d = basis.len();
        let (vals, vecs) = sorted_eigen(hm);
        (vals, vecs, d)
    };
    if k == 0 || k > dim {
        return Err(Error::Parameter(format!("k = {k} outside 1..={dim}")));
    }
    let states = (0..k)
        .map(|i| {
            let mut v: Vec<f64> = vecs.column(i).iter().copied().collect();
            fix_phase(&mut v);
            v
        })
        .collect();
    Ok(SpectrumResult {
        energies: vals[..k].to_vec(),
        states,
        basis,
        sector: *spec,
        params: *p,
        dim,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HadronMasses {
    pub params: LatticeParams,
    pub e_v: f64,
    pub e_b: f64,
    pub e_m: f64,
    pub m_b: f64,
    pub m_m: f64,
    /// `M_m / M_b`; `None` when the baryon gap vanishes.
    pub r: Option<f64>,
}

/// Vacuum, baryon and meson energies from the color-singlet sectors.
pub fn hadron_masses(p: &LatticeParams) -> Result<HadronMasses> {
    hadron_masses_with(&ModelOperators::new(p.n_sites)?, p, ExecMode::best())
}

pub fn hadron_masses_with(ops: &ModelOperators, p: &LatticeParams, mode: ExecMode) -> Result<HadronMasses> {
    let vac = eigensolve_sector_with(ops, p, &SectorSpec::singlet(0), 2, mode)?;
    let bar = eigensolve_sector_with(ops, p, &SectorSpec::singlet(1), 1, mode)?;
    let (e_v, e_m, e_b) = (vac.energies[0], vac.energies[1], bar.energies[0]);
    let m_b = e_b - e_v;
    let m_m = e_m - e_v;
    let r = if m_b.abs() > 1e-9 { Some(m_m / m_b) } else { None };
    Ok(HadronMasses { params: *p, e_v, e_b, e_m, m_b, m_m, r })
}

/// Hadron masses over a parameter list, in input order.
pub fn scan_masses(points: &[LatticeParams], mode: ExecMode) -> Result<Vec<HadronMasses>> {
    let mut cache: HashMap<usize, ModelOperators> = HashMap::new();
    for p in points {
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(p.n_sites) {
            e.insert(ModelOperators::new(p.n_sites)?);
        }
    }
    par::map(mode, points, |p| hadron_masses_with(&cache[&p.n_sites], p, ExecMode::Sequential))
        .into_iter()
        .collect()
}

/// One element of a singlet basis: `(|primary> - |partner>)/sqrt2`, or the
/// bare primary state when unpaired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingletElement {
    pub primary: u64,
    pub partner: Option<u64>,
}

impl SingletElement {
    pub fn coefficients(&self) -> Vec<(u64, f64)> {
        match self.partner {
            None => vec![(self.primary, 1.0)],
            Some(q) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                vec![(self.primary, h), (q, -h)]
            }
        }
    }

    pub fn state_vector(&self, n_qubits: usize) -> Result<StateVector> {
        let mut amps = vec![0.0; 1 << n_qubits];
        for (b, a) in self.coefficients() {
            amps[b as usize] = a;
        }
        StateVector::from_real(n_qubits, &amps)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingletBasis {
    pub n_sites: usize,
    pub elements: Vec<SingletElement>,
}

impl SingletBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `sum_n a_n |s~_n>`.
    pub fn superposition(&self, amplitudes: &[f64]) -> Result<StateVector> {
        crate::error::check_dim(self.len(), amplitudes.len())?;
        let nq = 2 * self.n_sites;
        let mut amps = vec![0.0; 1 << nq];
        for (e, &a) in self.elements.iter().zip(amplitudes) {
            for (b, c) in e.coefficients() {
                amps[b as usize] += a * c;
            }
        }
        StateVector::from_real(nq, &amps)
    }

    /// Every computational state used by the basis.
    pub fn support(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .elements
            .iter()
            .flat_map(|e| std::iter::once(e.primary).chain(e.partner))
            .collect();
        v.sort_unstable();
        v
    }
}

/// The ten `N = 4`, `B = 1` singlet states, in table order.
pub fn singlet_basis_n4_b1() -> SingletBasis {
    const ROWS: [(&str, Option<&str>); 10] = [
        ("↑↑↑↑↑↑↓↓", None),
        ("↑↑↑↑↓↓↑↑", None),
        ("↑↑↓↓↑↑↑↑", None),
        ("↓↓↑↑↑↑↑↑", None),
        ("↑↓↓↑↑↑↑↑", Some("↓↑↑↓↑↑↑↑")),
        ("↑↓↑↑↓↑↑↑", Some("↓↑↑↑↑↓↑↑")),
        ("↑↓↑↑↑↑↓↑", Some("↓↑↑↑↑↑↑↓")),
        ("↑↑↑↑↑↓↓↑", Some("↑↑↑↑↓↑↑↓")),
        ("↑↑↑↓↑↑↓↑", Some("↑↑↓↑↑↑↑↓")),
        ("↑↑↑↓↓↑↑↑", Some("↑↑↓↑↑↓↑↑")),
    ];
    let elements = ROWS
        .iter()
        .map(|(a, b)| SingletElement {
            primary: parse_spins(a).expect("table word"),
            partner: b.map(|w| parse_spins(w).expect("table word")),
        })
        .collect();
    SingletBasis { n_sites: 4, elements }
}

/// A singlet basis built per cell configuration: states with no antiparallel
/// cell stay single; states with exactly one up-down and one down-up cell are
/// paired with the state that swaps those two cells.
///
/// Covers sectors whose singlet states have at most two antiparallel cells;
/// returns a contract error otherwise.
pub fn singlet_basis_paired(n_sites: usize, baryon_number: i32) -> Result<SingletBasis> {
    let basis = sector_basis(n_sites, &SectorSpec::new(baryon_number))?;
    let mut elements = Vec::new();
    for &b in &basis {
        let (ud, du) = antiparallel_counts(n_sites, b);
        match (ud, du) {
            (0, 0) => elements.push(SingletElement { primary: b, partner: None }),
            (1, 1) => {
                let mut partner = b;
                for n in 0..n_sites {
                    let cell = b >> (2 * n) & 0b11;
                    if cell == 0b10 || cell == 0b01 {
                        partner ^= 0b11 << (2 * n);
                    }
                }
                // keep the member whose first antiparallel cell is up-down
                let first = (0..n_sites).find(|&n| matches!(b >> (2 * n) & 0b11, 0b10 | 0b01)).unwrap();
                if b >> (2 * first) & 0b11 == 0b10 {
                    elements.push(SingletElement { primary: b, partner: Some(partner) });
                }
            }
            _ => {
                return Err(Error::Contract(format!(
                    "state {} has {} antiparallel cells",
                    format_spins(2 * n_sites, b),
                    ud + du
                )))
            }
        }
    }
    Ok(SingletBasis { n_sites, elements })
}

/// Orthonormal color-singlet vectors of a sector, grouped by cell pattern.
///
/// The charges act inside each antiparallel cell, so the singlet space splits
/// into blocks labelled by which cells are up-up, down-down or antiparallel.
/// Inside a block the vectors come from projecting basis states (ascending)
/// onto the `Q^2 = 0` space and orthonormalizing. Vectors are ordered by
/// distance from the bare vacuum, then by their first basis state.
pub fn singlet_vectors(n_sites: usize, baryon_number: i32) -> Result<Vec<crate::circuit::SupportVector>> {
    let basis = sector_basis(n_sites, &SectorSpec::new(baryon_number))?;
    let ops = ModelOperators::new(n_sites)?;
    let q2 = ops.charge_casimir()?;
    let pattern = |b: u64| {
        let mut anti = 0u64;
        let mut down = 0u64;
        for n in 0..n_sites {
            match b >> (2 * n) & 0b11 {
                0b01 | 0b10 => anti |= 1 << n,
                0b11 => down |= 1 << n,
                _ => {}
            }
        }
        (anti, down)
    };
    let mut blocks: Vec<((u64, u64), Vec<u64>)> = Vec::new();
    for &b in &basis {
        let key = pattern(b);
        match blocks.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(b),
            None => blocks.push((key, vec![b])),
        }
    }
    let vac = crate::model::strong_coupling_state(n_sites, 0)?;
    let mut out: Vec<crate::circuit::SupportVector> = Vec::new();
    for (_, states) in blocks {
        let v = singlet_subspace_of(&q2, &states)?;
        let d = states.len();
        // projector onto the null space, applied to basis vectors in order
        let proj = &v * v.transpose();
        let mut found: Vec<Vec<f64>> = Vec::new();
        for k in 0..d {
            if found.len() == v.ncols() {
                break;
            }
            let mut w: Vec<f64> = proj.column(k).iter().copied().collect();
            for _ in 0..2 {
                for u in &found {
                    let dot: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
                    w.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                w.iter_mut().for_each(|x| *x /= norm);
                found.push(w);
            }
        }
        for w in found {
            let sv: Vec<(u64, f64)> = states
                .iter()
                .zip(&w)
                .filter(|(_, a)| a.abs() > 1e-12)
                .map(|(&b, &a)| (b, a))
                .collect();
            out.push(sv);
        }
    }
    let particles = |e: &crate::circuit::SupportVector| e.iter().map(|(b, _)| (b ^ vac).count_ones()).max().unwrap();
    out.sort_by_key(|e| (particles(e), e[0].0));
    Ok(out)
}

fn singlet_subspace_of(q2: &PauliSum, states: &[u64]) -> Result<DMatrix<f64>> {
    let m = sector_matrix(q2, states, ExecMode::Sequential)?;
    let (vals, vecs) = sorted_eigen(m);
    let k = vals.iter().take_while(|&&v| v < SINGLET_TOLERANCE).count();
    Ok(vecs.columns(0, k).into_owned())
}
