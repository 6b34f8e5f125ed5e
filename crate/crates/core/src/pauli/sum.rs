use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::string::{Pauli, PauliString};
use crate::error::{check_dim, Error, Result};

/// Coefficients below this magnitude are dropped when a sum is canonicalized.
pub const DROP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coefficient: f64,
}

impl PauliTerm {
    pub fn new(string: PauliString, coefficient: f64) -> Self {
        PauliTerm { string, coefficient }
    }
}

/// Real-weighted sum of Pauli strings in canonical `(z, x)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, coefficient: f64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.add_term(PauliString::identity(n_qubits), coefficient);
        s
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut s = Self::zero(n_qubits);
        for (p, c) in terms {
            check_dim(n_qubits, p.n_qubits())?;
            if !c.is_finite() {
                return Err(Error::Parameter(format!("non-finite coefficient on {p}")));
            }
            s.add_term(p, c);
        }
        Ok(s)
    }

    /// Convenience constructor from `(coefficient, word)` pairs.
    pub fn from_words(terms: &[(f64, &str)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, w)| w.len())
            .ok_or_else(|| Error::Parameter("empty term list".into()))?;
        let parsed = terms
            .iter()
            .map(|&(c, w)| PauliString::from_word(w).map(|p| (p, c)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, parsed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Accumulates `coefficient * string`, dropping the entry if it cancels.
    pub fn add_term(&mut self, string: PauliString, coefficient: f64) {
        debug_assert_eq!(string.n_qubits(), self.n_qubits);
        let e = self.terms.entry(string).or_insert(0.0);
        *e += coefficient;
        if e.abs() < DROP_TOLERANCE {
            self.terms.remove(&string);
        }
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        self.terms.get(string).copied().unwrap_or(0.0)
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.coefficient(&PauliString::identity(self.n_qubits))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> + '_ {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(&p, &c)| PauliTerm::new(p, c))
    }

    pub fn strings(&self) -> impl Iterator<Item = &PauliString> + '_ {
        self.terms.keys()
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        for (p, c) in self.iter() {
            out.add_term(*p, c * factor);
        }
        out
    }

    pub fn add_scaled(&mut self, other: &PauliSum, factor: f64) -> Result<()> {
        check_dim(self.n_qubits, other.n_qubits)?;
        for (p, c) in other.iter() {
            self.add_term(*p, c * factor);
        }
        Ok(())
    }

    /// Removes entries whose magnitude is below `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.abs() >= tol);
    }

    /// Largest absolute difference of coefficients against `other`.
    pub fn max_abs_diff(&self, other: &PauliSum) -> f64 {
        let mut m = 0.0f64;
        for (p, c) in self.iter() {
            m = m.max((c - other.coefficient(p)).abs());
        }
        for (p, c) in other.iter() {
            if !self.terms.contains_key(p) {
                m = m.max(c.abs());
            }
        }
        m
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Operator product `self * other` with complex weights.
    pub fn product(&self, other: &PauliSum) -> Result<ComplexPauliSum> {
        check_dim(self.n_qubits, other.n_qubits)?;
        let mut out = ComplexPauliSum::zero(self.n_qubits);
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                let (p, ph) = a.mul_unchecked(b);
                out.add_term(p, ph.to_complex() * (ca * cb));
            }
        }
        Ok(out)
    }

    /// Returns `C` with `[self, other] = i C`; `C` is real because both
    /// operands are Hermitian.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        check_dim(self.n_qubits, other.n_qubits)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                if a.commutes_unchecked(b) {
                    continue;
                }
                // anticommuting: ab - ba = 2ab = 2 phase p with phase = +-i
                let (p, ph) = a.mul_unchecked(b);
                let sign = if ph.power() == 1 { 1.0 } else { -1.0 };
                out.add_term(p, 2.0 * sign * ca * cb);
            }
        }
        Ok(out)
    }

    /// Dense matrix in the computational basis (bit 0 of the index is qubit 1).
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (p, c) in self.iter() {
            for b in 0..dim as u64 {
                let (b2, ph) = p.apply_to_basis(b);
                m[(b2 as usize, b as usize)] += ph.to_complex() * c;
            }
        }
        m
    }

    /// `<b|self|b>` for a computational basis state.
    pub fn basis_expectation(&self, b: u64) -> f64 {
        self.iter()
            .filter(|(p, _)| p.is_diagonal())
            .map(|(p, c)| c * p.basis_expectation(b))
            .sum()
    }

    /// Restricts to qubits `0..n` when the remaining qubits all carry identity.
    pub fn embed(&self, n_qubits: usize) -> Result<PauliSum> {
        if n_qubits < self.n_qubits {
            return Err(Error::Parameter("embedding into a smaller register".into()));
        }
        let mut out = PauliSum::zero(n_qubits);
        for (p, c) in self.iter() {
            let q = PauliString::from_masks(n_qubits, p.x_mask(), p.z_mask())?;
            out.add_term(q, c);
        }
        Ok(out)
    }

    /// Union of strings of several sums (coefficients ignored, set to 1).
    pub fn string_union<'a, I>(n_qubits: usize, sums: I) -> PauliSum
    where
        I: IntoIterator<Item = &'a PauliSum>,
    {
        let mut terms = BTreeMap::new();
        for s in sums {
            for p in s.strings() {
                terms.insert(*p, 1.0);
            }
        }
        PauliSum { n_qubits, terms }
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0).expect("qubit count mismatch in PauliSum addition");
        out
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0).expect("qubit count mismatch in PauliSum subtraction");
        out
    }
}

impl Mul<f64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: f64) -> PauliSum {
        self.scaled(rhs)
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scaled(-1.0)
    }
}

/// Complex-weighted intermediate used while expanding products.
#[derive(Clone, Debug, Default)]
pub struct ComplexPauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl ComplexPauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        ComplexPauliSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, string: PauliString, c: Complex64) {
        *self.terms.entry(string).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn add(&mut self, other: &ComplexPauliSum, factor: Complex64) {
        for (p, c) in &other.terms {
            self.add_term(*p, c * factor);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> + '_ {
        self.terms.iter()
    }

    /// Hermitian conjugate (conjugated weights; strings are Hermitian).
    pub fn adjoint(&self) -> ComplexPauliSum {
        ComplexPauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(p, c)| (*p, c.conj())).collect(),
        }
    }

    pub fn product(&self, other: &ComplexPauliSum) -> ComplexPauliSum {
        let mut out = ComplexPauliSum::zero(self.n_qubits);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (p, ph) = a.mul_unchecked(b);
                out.add_term(p, ph.to_complex() * ca * cb);
            }
        }
        out
    }

    /// Converts to a real sum, failing if any imaginary part survives.
    pub fn into_real(self, tol: f64) -> Result<PauliSum> {
        let mut out = PauliSum::zero(self.n_qubits);
        for (p, c) in self.terms {
            if c.im.abs() > tol {
                return Err(Error::NonHermitian(c.im, p.to_word()));
            }
            out.add_term(p, c.re);
        }
        Ok(out)
    }
}

impl From<&PauliSum> for ComplexPauliSum {
    fn from(s: &PauliSum) -> Self {
        ComplexPauliSum {
            n_qubits: s.n_qubits,
            terms: s.iter().map(|(p, c)| (*p, Complex64::new(c, 0.0))).collect(),
        }
    }
}

/// Ladder operators used to expand the model's sigma^+/sigma^- products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    /// `(X + iY) / 2`, maps spin down to spin up.
    Raise,
    /// `(X - iY) / 2`.
    Lower,
    Z,
}

/// Expands a product of single-qubit ladder/Z factors on distinct qubits.
pub fn expand_ladder_product(n_qubits: usize, factors: &[(usize, Ladder)]) -> ComplexPauliSum {
    let mut acc = ComplexPauliSum::zero(n_qubits);
    acc.add_term(PauliString::identity(n_qubits), Complex64::new(1.0, 0.0));
    for &(q, op) in factors {
        let mut f = ComplexPauliSum::zero(n_qubits);
        match op {
            Ladder::Z => f.add_term(PauliString::single(n_qubits, q, Pauli::Z), 1.0.into()),
            Ladder::Raise | Ladder::Lower => {
                let s = if op == Ladder::Raise { 0.5 } else { -0.5 };
                f.add_term(PauliString::single(n_qubits, q, Pauli::X), 0.5.into());
                f.add_term(PauliString::single(n_qubits, q, Pauli::Y), Complex64::new(0.0, s));
            }
        }
        acc = acc.product(&f);
    }
    acc
}

/// `product + h.c.` as a real Pauli sum.
pub fn ladder_plus_hc(n_qubits: usize, factors: &[(usize, Ladder)]) -> PauliSum {
    let p = expand_ladder_product(n_qubits, factors);
    let mut both = p.adjoint();
    both.add(&p, 1.0.into());
    both.into_real(1e-14).expect("operator plus its adjoint is Hermitian")
}
