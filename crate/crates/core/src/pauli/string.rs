use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Largest register a [`PauliString`] can address.
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Power of `i` in {0, 1, 2, 3}, i.e. one of +1, +i, -1, -i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u32 {
        self.0 as u32
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `+1.0` or `-1.0` for a real phase.
    pub fn real_sign(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// Hermitian Pauli string in symplectic form.
///
/// Qubit `q` (zero-based) carries an X component when bit `q` of `x` is set
/// and a Z component when bit `q` of `z` is set; both set is Y. As an operator
/// the string equals `i^{|x & z|} X^x Z^z`. Field order gives the canonical
/// ordering `(z, x)` for strings of equal size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: u8,
    z: u64,
    x: u64,
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliString { n: n_qubits as u8, z: 0, x: 0 }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n_qubits} qubits > {MAX_QUBITS}")));
        }
        let m = mask(n_qubits);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::Parameter(format!(
                "mask bits beyond {n_qubits} qubits"
            )));
        }
        Ok(PauliString { n: n_qubits as u8, z, x })
    }

    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.set(qubit, p);
        s
    }

    /// Builds a string from `(qubit, factor)` pairs; unlisted qubits are identity.
    pub fn from_factors(n_qubits: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n_qubits);
        for &(q, p) in factors {
            s.set(q, p);
        }
        s
    }

    /// Parses a word such as `"XZIY"`, qubit 1 leftmost.
    pub fn from_word(word: &str) -> Result<Self> {
        let n = word.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n} qubits > {MAX_QUBITS}")));
        }
        let mut s = Self::identity(n);
        for (q, c) in word.chars().enumerate() {
            let p = Pauli::from_char(c)
                .ok_or_else(|| Error::Parse(format!("bad Pauli letter {c:?} in {word:?}")))?;
            s.set(q, p);
        }
        Ok(s)
    }

    pub fn to_word(&self) -> String {
        (0..self.n_qubits()).map(|q| self.get(q).as_char()).collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n_qubits(), "qubit {q} out of range");
        let (xb, zb) = p.bits();
        let bit = 1u64 << q;
        self.x = if xb { self.x | bit } else { self.x & !bit };
        self.z = if zb { self.z | bit } else { self.z & !bit };
    }

    /// Product `self * other = phase * result`.
    pub fn multiply(&self, other: &PauliString) -> Result<(PauliString, Phase)> {
        check_dim(self.n_qubits(), other.n_qubits())?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> (PauliString, Phase) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // i^{|x1 z1|} X^x1 Z^z1 i^{|x2 z2|} X^x2 Z^z2 = i^{..} (-1)^{|z1 x2|} X^x Z^z
        let k = (self.x & self.z).count_ones() + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        (PauliString { n: self.n, z, x }, Phase::from_power(k))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        check_dim(self.n_qubits(), other.n_qubits())?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 0
    }

    /// True when every position holds equal factors or at least one identity.
    pub fn qubitwise_compatible(&self, other: &PauliString) -> Result<bool> {
        check_dim(self.n_qubits(), other.n_qubits())?;
        let both = self.support() & other.support();
        let differ = (self.x ^ other.x) | (self.z ^ other.z);
        Ok(both & differ == 0)
    }

    /// Action on a computational basis state: `P|b> = phase |b'>`.
    ///
    /// Bit value 0 is spin up (Z eigenvalue +1), bit value 1 is spin down.
    pub fn apply_to_basis(&self, b: u64) -> (u64, Phase) {
        let k = (self.x & self.z).count_ones() + 2 * (self.z & b).count_ones();
        (b ^ self.x, Phase::from_power(k))
    }

    /// Diagonal matrix element `<b|P|b>` (zero unless the string is diagonal).
    pub fn basis_expectation(&self, b: u64) -> f64 {
        if self.x != 0 {
            0.0
        } else if (self.z & b).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Drops the listed qubits (which must carry identity) and packs the rest.
    pub(crate) fn compress(&self, keep: &[usize]) -> PauliString {
        let mut out = PauliString::identity(keep.len());
        for (new_q, &old_q) in keep.iter().enumerate() {
            out.set(new_q, self.get(old_q));
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_word())
    }
}
