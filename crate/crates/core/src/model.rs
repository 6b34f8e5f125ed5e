//! The gauge-eliminated qubit Hamiltonian, its conserved charges and the
//! strong-coupling reference states.
//!
//! Site `n` (1-based) owns the qubit pair `(2n-1, 2n)`, stored internally at
//! zero-based indices `(2n-2, 2n-1)`. Spin up is bit value 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{ladder_plus_hc, ComplexPauliSum, Ladder, Pauli, PauliString, PauliSum};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub n_sites: usize,
    pub m_tilde: f64,
    pub x: f64,
}

impl LatticeParams {
    pub fn new(n_sites: usize, m_tilde: f64, x: f64) -> Result<Self> {
        check_sites(n_sites)?;
        if !(m_tilde.is_finite() && m_tilde >= 0.0) {
            return Err(Error::Parameter(format!("m_tilde = {m_tilde} must be finite and >= 0")));
        }
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Parameter(format!("x = {x} must be finite and > 0")));
        }
        Ok(LatticeParams { n_sites, m_tilde, x })
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites
    }

    pub fn with(&self, m_tilde: f64, x: f64) -> Result<Self> {
        LatticeParams::new(self.n_sites, m_tilde, x)
    }
}

pub(crate) fn check_sites(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Parameter(format!("N = {n} must be even and >= 2")));
    }
    if 2 * n > crate::pauli::MAX_QUBITS {
        return Err(Error::Capacity(format!("N = {n} needs more than 64 qubits")));
    }
    Ok(())
}

fn z(n_qubits: usize, q: usize) -> PauliString {
    PauliString::single(n_qubits, q, Pauli::Z)
}

fn zz(n_qubits: usize, a: usize, b: usize) -> PauliString {
    PauliString::from_factors(n_qubits, &[(a, Pauli::Z), (b, Pauli::Z)])
}

/// Mass term, including the constant `+1` per site.
pub fn build_mass_term(n_sites: usize) -> Result<PauliSum> {
    check_sites(n_sites)?;
    let nq = 2 * n_sites;
    let mut h = PauliSum::identity(nq, n_sites as f64);
    for n in 1..=n_sites {
        let s = if n % 2 == 0 { 0.5 } else { -0.5 };
        h.add_term(z(nq, 2 * n - 2), s);
        h.add_term(z(nq, 2 * n - 1), s);
    }
    Ok(h)
}

/// Kinetic (hopping) term: two next-nearest-neighbour hops per link.
pub fn build_kinetic_term(n_sites: usize) -> Result<PauliSum> {
    check_sites(n_sites)?;
    let nq = 2 * n_sites;
    let mut h = PauliSum::zero(nq);
    for n in 1..n_sites {
        for a in [2 * n - 2, 2 * n - 1] {
            let hop = ladder_plus_hc(nq, &[(a, Ladder::Raise), (a + 1, Ladder::Z), (a + 2, Ladder::Lower)]);
            h.add_scaled(&hop, -0.5)?;
        }
    }
    Ok(h)
}

/// Color-electric energy after gauge-field elimination.
pub fn build_electric_term(n_sites: usize) -> Result<PauliSum> {
    check_sites(n_sites)?;
    let nq = 2 * n_sites;
    let big_n = n_sites as f64;
    let mut h = PauliSum::zero(nq);
    for n in 1..n_sites {
        let w = 3.0 / 16.0 * (big_n - n as f64);
        h.add_term(PauliString::identity(nq), w);
        h.add_term(zz(nq, 2 * n - 2, 2 * n - 1), -w);
    }
    for n in 1..n_sites.saturating_sub(1) {
        for m in n + 1..n_sites {
            let w = big_n - m as f64;
            let (a1, a2) = (2 * n - 2, 2 * n - 1);
            let (b1, b2) = (2 * m - 2, 2 * m - 1);
            // (Z_a1 - Z_a2)(Z_b1 - Z_b2) / 16
            h.add_term(zz(nq, a1, b1), w / 16.0);
            h.add_term(zz(nq, a1, b2), -w / 16.0);
            h.add_term(zz(nq, a2, b1), -w / 16.0);
            h.add_term(zz(nq, a2, b2), w / 16.0);
            let flip = ladder_plus_hc(
                nq,
                &[(a1, Ladder::Raise), (a2, Ladder::Lower), (b2, Ladder::Raise), (b1, Ladder::Lower)],
            );
            h.add_scaled(&flip, 0.5 * w)?;
        }
    }
    Ok(h)
}

/// Parameter-free blocks of the Hamiltonian plus the conserved operators.
#[derive(Clone, Debug)]
pub struct ModelOperators {
    pub n_sites: usize,
    pub h_mass: PauliSum,
    pub h_kinetic: PauliSum,
    pub h_electric: PauliSum,
    pub q_x: PauliSum,
    pub q_y: PauliSum,
    pub q_z: PauliSum,
    pub b_op: PauliSum,
}

impl ModelOperators {
    pub fn new(n_sites: usize) -> Result<Self> {
        let (q_x, q_y, q_z) = charge_operators(n_sites)?;
        Ok(ModelOperators {
            n_sites,
            h_mass: build_mass_term(n_sites)?,
            h_kinetic: build_kinetic_term(n_sites)?,
            h_electric: build_electric_term(n_sites)?,
            q_x,
            q_y,
            q_z,
            b_op: baryon_number_operator(n_sites)?,
        })
    }

    /// `m_tilde H_m + H_el / x + H_kin`.
    pub fn hamiltonian(&self, m_tilde: f64, x: f64) -> Result<PauliSum> {
        let p = LatticeParams::new(self.n_sites, m_tilde, x)?;
        let mut h = self.h_kinetic.clone();
        h.add_scaled(&self.h_mass, p.m_tilde)?;
        h.add_scaled(&self.h_electric, 1.0 / p.x)?;
        Ok(h)
    }

    /// Total charge Casimir `Qx^2 + Qy^2 + Qz^2`.
    pub fn charge_casimir(&self) -> Result<PauliSum> {
        let mut acc = ComplexPauliSum::zero(2 * self.n_sites);
        for q in [&self.q_x, &self.q_y, &self.q_z] {
            acc.add(&q.product(q)?, 1.0.into());
        }
        acc.into_real(1e-12)
    }
}

pub fn build_hamiltonian(p: &LatticeParams) -> Result<PauliSum> {
    ModelOperators::new(p.n_sites)?.hamiltonian(p.m_tilde, p.x)
}

/// Total color charges `(Qx, Qy, Qz)`.
pub fn charge_operators(n_sites: usize) -> Result<(PauliSum, PauliSum, PauliSum)> {
    check_sites(n_sites)?;
    let nq = 2 * n_sites;
    let mut qx = PauliSum::zero(nq);
    let mut qy = ComplexPauliSum::zero(nq);
    let mut qz = PauliSum::zero(nq);
    for n in 1..=n_sites {
        let (a, b) = (2 * n - 2, 2 * n - 1);
        qx.add_scaled(&ladder_plus_hc(nq, &[(a, Ladder::Raise), (b, Ladder::Lower)]), 0.5)?;
        // (i/2)(s-_a s+_b - h.c.)
        let t = crate::pauli::expand_ladder_product(nq, &[(a, Ladder::Lower), (b, Ladder::Raise)]);
        let half_i = num_complex::Complex64::new(0.0, 0.5);
        qy.add(&t, half_i);
        qy.add(&t.adjoint(), -half_i);
        qz.add_term(z(nq, a), 0.25);
        qz.add_term(z(nq, b), -0.25);
    }
    Ok((qx, qy.into_real(1e-14)?, qz))
}

/// `B = sigma^z_tot / 4`.
pub fn baryon_number_operator(n_sites: usize) -> Result<PauliSum> {
    check_sites(n_sites)?;
    let nq = 2 * n_sites;
    PauliSum::from_terms(nq, (0..nq).map(|q| (z(nq, q), 0.25)))
}

/// Baryon number of a computational basis state.
pub fn basis_baryon_number(n_qubits: usize, b: u64) -> f64 {
    let down = b.count_ones() as f64;
    (n_qubits as f64 - 2.0 * down) / 4.0
}

/// Distinct-string counts of the Hamiltonian against the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCount {
    /// Strings in the canonical expansion with all constants merged.
    pub merged: usize,
    /// Sum of the per-block counts (mass, electric, kinetic), so the identity
    /// is counted once in each block that contains it.
    pub per_block: usize,
    /// `6N^2 - 11N + 9`.
    pub formula: usize,
}

impl TermCount {
    pub fn offset(&self) -> i64 {
        self.formula as i64 - self.merged as i64
    }
}

pub fn pauli_term_count(n_sites: usize) -> Result<TermCount> {
    let ops = ModelOperators::new(n_sites)?;
    let h = ops.hamiltonian(1.0, 1.0)?;
    let n = n_sites;
    Ok(TermCount {
        merged: h.len(),
        per_block: ops.h_mass.len() + ops.h_electric.len() + ops.h_kinetic.len(),
        formula: 6 * n * n + 9 - 11 * n,
    })
}

/// Strong-coupling ground state: odd sites up-up, even sites down-down; for
/// `B = 1` site `N` is flipped to up-up.
pub fn strong_coupling_state(n_sites: usize, baryon_number: i32) -> Result<u64> {
    check_sites(n_sites)?;
    if !(0..=1).contains(&baryon_number) {
        return Err(Error::Parameter(format!("strong-coupling state for B = {baryon_number}")));
    }
    let mut b = 0u64;
    for n in (2..=n_sites).step_by(2) {
        if baryon_number == 1 && n == n_sites {
            continue;
        }
        b |= 0b11 << (2 * n - 2);
    }
    Ok(b)
}

/// Parses a spin word such as `"↑↑↓↓"` or `"uudd"` (qubit 1 leftmost).
pub fn parse_spins(word: &str) -> Result<u64> {
    let mut b = 0u64;
    for (q, c) in word.chars().enumerate() {
        match c {
            '↑' | 'u' | 'U' | '0' => {}
            '↓' | 'd' | 'D' | '1' => b |= 1 << q,
            _ => return Err(Error::Parse(format!("bad spin {c:?} in {word:?}"))),
        }
    }
    Ok(b)
}

/// Spin word for a basis state, qubit 1 leftmost.
pub fn format_spins(n_qubits: usize, b: u64) -> String {
    (0..n_qubits).map(|q| if b >> q & 1 == 0 { '↑' } else { '↓' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_term_examples() {
        let hm = build_mass_term(2).unwrap();
        assert_eq!(hm.basis_expectation(parse_spins("↓↓↓↓").unwrap()), 2.0);
        assert_eq!(hm.basis_expectation(parse_spins("↑↑↓↓").unwrap()), 0.0);
        let hm4 = build_mass_term(4).unwrap();
        assert_eq!(hm4.basis_expectation(parse_spins("↑↑↓↓↑↑↑↑").unwrap()), 2.0);
    }

    #[test]
    fn kinetic_strings_n2() {
        let k = build_kinetic_term(2).unwrap();
        let want = PauliSum::from_words(&[
            (-0.25, "XZXI"),
            (-0.25, "YZYI"),
            (-0.25, "IXZX"),
            (-0.25, "IYZY"),
        ])
        .unwrap();
        assert_eq!(k.len(), 4);
        assert!(k.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn electric_n2() {
        let e = build_electric_term(2).unwrap();
        let want = PauliSum::from_words(&[(3.0 / 16.0, "IIII"), (-3.0 / 16.0, "ZZII")]).unwrap();
        assert_eq!(e, want);
        assert_eq!(e.basis_expectation(parse_spins("↑↓↓↓").unwrap()), 3.0 / 8.0);
        let e4 = build_electric_term(4).unwrap();
        assert_eq!(e4.basis_expectation(parse_spins("↑↑↓↓↑↑↓↓").unwrap()), 0.0);
    }

    #[test]
    fn hamiltonian_examples() {
        let h = build_hamiltonian(&LatticeParams::new(2, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(h.basis_expectation(parse_spins("↑↑↓↓").unwrap()), 0.0);
        assert_eq!(h.basis_expectation(parse_spins("↑↑↑↑").unwrap()), 2.0);
        assert!(LatticeParams::new(2, 1.0, 0.0).is_err());
        assert!(LatticeParams::new(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn charges_and_baryon_number() {
        let (_, _, qz) = charge_operators(2).unwrap();
        assert_eq!(qz.basis_expectation(parse_spins("↑↓↑↑").unwrap()), 0.5);
        let b = baryon_number_operator(2).unwrap();
        assert_eq!(b.basis_expectation(0b1111), -1.0);
    }

    #[test]
    fn strong_coupling_states() {
        assert_eq!(format_spins(4, strong_coupling_state(2, 0).unwrap()), "↑↑↓↓");
        assert_eq!(format_spins(4, strong_coupling_state(2, 1).unwrap()), "↑↑↑↑");
        assert_eq!(format_spins(8, strong_coupling_state(4, 1).unwrap()), "↑↑↓↓↑↑↑↑");
        assert!(strong_coupling_state(4, 2).is_err());
    }

    #[test]
    fn term_count_n2_n4() {
        let c2 = pauli_term_count(2).unwrap();
        assert_eq!((c2.merged, c2.per_block, c2.formula), (10, 11, 11));
        let c4 = pauli_term_count(4).unwrap();
        assert_eq!(c4.formula, 61);
        assert_eq!(c4.per_block, 61);
    }
}
