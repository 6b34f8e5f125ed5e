use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind, Param};
use crate::error::{check_dim, Error, Result};
use crate::par::{self, ExecMode};
use crate::pauli::{PauliString, PauliSum};

/// Pure state over `2^n` computational basis states; index bit `q` is qubit
/// `q` with 0 = spin up.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl StateVector {
    pub fn basis(n_qubits: usize, b: u64) -> Result<Self> {
        if n_qubits > 26 {
            return Err(Error::Capacity(format!("statevector of {n_qubits} qubits")));
        }
        if n_qubits < 64 && b >> n_qubits != 0 {
            return Err(Error::Parameter(format!("basis index {b} outside {n_qubits} qubits")));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[b as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps amplitudes; the vector must have length `2^n` and unit norm.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_dim(1 << n_qubits, amps.len())?;
        let s = StateVector { n_qubits, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter(format!("state norm {norm} != 1")));
        }
        Ok(s)
    }

    pub fn from_real(n_qubits: usize, amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(n_qubits, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, b: u64) -> Complex64 {
        self.amps[b as usize]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probability(&self, b: u64) -> f64 {
        self.amps[b as usize].norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.n_qubits, other.n_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies a gate whose parameter, if any, is already fixed.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.validate(self.n_qubits)?;
        let angle = match g.param {
            Some(Param::Slot { .. }) => return Err(Error::SymbolicParameter(g.to_string())),
            Some(Param::Fixed(v)) => v,
            None => 0.0,
        };
        let (cmask, cval) = g
            .controls()
            .fold((0usize, 0usize), |(m, v), (q, s)| (m | 1 << q, v | (s.bit() as usize) << q));
        let t = g.targets();
        match g.kind {
            GateKind::X | GateKind::CNOT | GateKind::TOFFOLI => {
                let tb = 1usize << t[0];
                for b in 0..self.amps.len() {
                    if b & tb == 0 && b & cmask == cval {
                        self.amps.swap(b, b | tb);
                    }
                }
            }
            GateKind::RY | GateKind::CRY => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                let tb = 1usize << t[0];
                for b in 0..self.amps.len() {
                    if b & tb == 0 && b & cmask == cval {
                        let (a0, a1) = (self.amps[b], self.amps[b | tb]);
                        self.amps[b] = a0 * c - a1 * s;
                        self.amps[b | tb] = a0 * s + a1 * c;
                    }
                }
            }
            GateKind::SWAP | GateKind::PSWAP => {
                let (c, s) = (angle.cos(), angle.sin());
                let swap = g.kind == GateKind::SWAP;
                let (ab, bb) = (1usize << t[0], 1usize << t[1]);
                for b in 0..self.amps.len() {
                    // b: first qubit up, second down; partner swaps them
                    if b & ab == 0 && b & bb != 0 {
                        let p = (b | ab) & !bb;
                        if swap {
                            self.amps.swap(b, p);
                            continue;
                        }
                        let (ud, du) = (self.amps[b], self.amps[p]);
                        self.amps[b] = ud * c - du * s;
                        self.amps[p] = ud * s + du * c;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit, theta: &[f64]) -> Result<()> {
        check_dim(c.n_qubits, self.n_qubits)?;
        check_dim(c.n_params, theta.len())?;
        for g in &c.gates {
            self.apply_gate(&g.bind(theta))?;
        }
        Ok(())
    }

    /// Applies a single-qubit 2x2 unitary `[[m00, m01], [m10, m11]]`.
    pub(crate) fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let tb = 1usize << q;
        for b in 0..self.amps.len() {
            if b & tb == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | tb]);
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[b | tb] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies a Pauli string (used by noise injection).
    pub(crate) fn apply_pauli(&mut self, p: &PauliString) {
        let mut out = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let (b2, ph) = p.apply_to_basis(b as u64);
            out[b2 as usize] = ph.to_complex() * a;
        }
        self.amps = out;
    }

    /// `<psi|P|psi>` for one string.
    pub fn expectation_string(&self, p: &PauliString) -> f64 {
        let mut acc = 0.0;
        for (b, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (b2, ph) = p.apply_to_basis(b as u64);
            acc += (self.amps[b2 as usize].conj() * ph.to_complex() * a).re;
        }
        acc
    }

    /// Expectations of many strings, in input order.
    pub fn string_expectations(&self, strings: &[PauliString], mode: ExecMode) -> Vec<f64> {
        par::map(mode, strings, |p| self.expectation_string(p))
    }

    /// Exact `<psi|h|psi>`.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        check_dim(h.n_qubits(), self.n_qubits)?;
        Ok(h.iter().map(|(p, c)| c * self.expectation_string(p)).sum())
    }

    /// `h|psi>` as a raw amplitude vector.
    pub fn apply_sum(&self, h: &PauliSum) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.amps.len()];
        for (p, c) in h.iter() {
            for (b, a) in self.amps.iter().enumerate() {
                let (b2, ph) = p.apply_to_basis(b as u64);
                out[b2 as usize] += ph.to_complex() * a * c;
            }
        }
        out
    }
}

/// Dense matrix of a bound gate on `n` qubits, built from its local matrix.
pub fn gate_dense(g: &Gate, n: usize) -> Result<DMatrix<Complex64>> {
    g.validate(n)?;
    let local = g.local_matrix()?;
    let dim = 1usize << n;
    let support_mask = g.qubits.iter().fold(0usize, |m, &q| m | 1 << q);
    let extract = |b: usize| {
        g.qubits.iter().enumerate().fold(0usize, |l, (i, &q)| l | (b >> q & 1) << i)
    };
    let deposit = |rest: usize, l: usize| {
        g.qubits.iter().enumerate().fold(rest, |b, (i, &q)| b | (l >> i & 1) << q)
    };
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for b in 0..dim {
        let rest = b & !support_mask;
        let lin = extract(b);
        for lout in 0..local.nrows() {
            let v = local[(lout, lin)];
            if v != ZERO {
                m[(deposit(rest, lout), b)] += v;
            }
        }
    }
    Ok(m)
}

/// Dense unitary of a bound circuit.
pub fn circuit_dense(c: &Circuit, theta: &[f64]) -> Result<DMatrix<Complex64>> {
    let dim = 1usize << c.n_qubits;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for g in &c.gates {
        u = gate_dense(&g.bind(theta), c.n_qubits)? * u;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Spin;

    #[test]
    fn x_flips_down_to_up() {
        let mut s = StateVector::basis(1, 1).unwrap();
        s.apply_gate(&Gate::x(0)).unwrap();
        assert_eq!(s.probability(0), 1.0);
    }

    #[test]
    fn kernels_match_dense() {
        let gates = vec![
            Gate::ry(1, Param::Fixed(0.7)),
            Gate::cry(&[(0, Spin::Up)], 2, Param::Fixed(-1.1)),
            Gate::cry(&[(0, Spin::Down), (2, Spin::Up)], 1, Param::Fixed(0.4)),
            Gate::cnot(2, 0),
            Gate::cnot_on(1, Spin::Up, 0),
            Gate::toffoli(&[(0, Spin::Up), (1, Spin::Down)], 2),
            Gate::swap(0, 2),
            Gate::pswap(2, 1, Param::Fixed(0.3)),
            Gate::x(1),
        ];
        let amps: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.into_iter().map(|a| a / norm).collect();
        for g in gates {
            let mut s = StateVector::from_amplitudes(3, amps.clone()).unwrap();
            s.apply_gate(&g).unwrap();
            let v = gate_dense(&g, 3).unwrap() * nalgebra::DVector::from_vec(amps.clone());
            for b in 0..8 {
                assert!((s.amplitude(b) - v[b as usize]).norm() < 1e-14, "{g}");
            }
        }
    }

    #[test]
    fn pswap_full_swap_at_quarter_turn() {
        // |up down> has qubit 1 down: index 0b10
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_gate(&Gate::pswap(0, 1, Param::Fixed(std::f64::consts::FRAC_PI_2))).unwrap();
        assert!((s.probability(0b01) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn z_expectation() {
        let s = StateVector::basis(1, 0).unwrap();
        let z = PauliSum::from_words(&[(1.0, "Z")]).unwrap();
        assert_eq!(s.expectation(&z).unwrap(), 1.0);
    }
}
