use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::circuit::{Circuit, GateKind};
use crate::error::{check_dim, Error, Result};
use crate::pauli::{conjugate_gate, Pauli, PauliString, PauliSum, DEFAULT_TERM_CAP};

/// Per-qubit readout confusion `m[observed][true]`; columns sum to one.
pub type Confusion = [[f64; 2]; 2];

/// Symmetric confusion with flip probability `e`.
pub fn symmetric_confusion(e: f64) -> Confusion {
    [[1.0 - e, e], [e, 1.0 - e]]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Two-qubit depolarizing probability after every CNOT-equivalent.
    pub two_qubit_depolarizing_p: f64,
    /// Optional per-qubit readout confusion.
    #[serde(default)]
    pub readout_confusion: Option<Vec<Confusion>>,
    pub seed: u64,
}

impl NoiseModel {
    pub fn noiseless(seed: u64) -> Self {
        NoiseModel { two_qubit_depolarizing_p: 0.0, readout_confusion: None, seed }
    }

    pub fn depolarizing(p: f64, seed: u64) -> Self {
        NoiseModel { two_qubit_depolarizing_p: p, readout_confusion: None, seed }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let p = self.two_qubit_depolarizing_p;
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Parameter(format!("depolarizing p = {p} outside [0, 1)")));
        }
        if let Some(conf) = &self.readout_confusion {
            check_dim(n_qubits, conf.len())?;
            for (q, m) in conf.iter().enumerate() {
                for col in 0..2 {
                    let s = m[0][col] + m[1][col];
                    if (s - 1.0).abs() > 1e-12 || m[0][col] < 0.0 || m[1][col] < 0.0 {
                        return Err(Error::Parameter(format!(
                            "confusion matrix of qubit {q} is not column-stochastic"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Purposes separating RNG streams drawn from one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Shots = 1,
    Trajectory = 2,
    Readout = 3,
    Overlap = 4,
    Optimizer = 5,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, purpose, group, fold, block)`.
pub fn rng_stream(seed: u64, purpose: Purpose, group: u64, fold: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = splitmix(purpose as u64);
    for v in [group, fold, block] {
        s = splitmix(s ^ v);
    }
    rng.set_stream(s);
    rng
}

/// Damping of a Pauli string's expectation by one two-qubit depolarizing
/// channel that acts non-trivially on it.
pub fn depolarizing_damping(p: f64) -> f64 {
    1.0 - 16.0 * p / 15.0
}

fn depolarize(state: &mut StateVector, pair: (usize, usize), p: f64, rng: &mut ChaCha8Rng) {
    if p == 0.0 || rng.random::<f64>() >= p {
        return;
    }
    let k = rng.random_range(1..16u32);
    let code = |c: u32| match c {
        0 => Pauli::I,
        1 => Pauli::X,
        2 => Pauli::Y,
        _ => Pauli::Z,
    };
    let s = PauliString::from_factors(state.n_qubits(), &[(pair.0, code(k & 3)), (pair.1, code(k >> 2))]);
    state.apply_pauli(&s);
}

/// Number of channels a gate receives at fold factor `fold`. CNOTs are
/// folded literally, so each copy carries one channel.
fn channel_repeats(kind: GateKind, fold: usize) -> usize {
    if kind == GateKind::CNOT {
        1
    } else {
        fold
    }
}

/// One noisy trajectory of `c` (CNOTs folded `fold` times).
pub fn apply_circuit_trajectory(
    state: &mut StateVector,
    c: &Circuit,
    theta: &[f64],
    p: f64,
    fold: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let folded = c.fold_cnots(fold)?;
    check_dim(c.n_params, theta.len())?;
    for g in &folded.gates {
        state.apply_gate(&g.bind(theta))?;
        if p > 0.0 {
            for _ in 0..channel_repeats(g.kind, fold) {
                for pair in g.noise_pairs() {
                    depolarize(state, pair, p, rng);
                }
            }
        }
    }
    Ok(())
}

/// Exact depolarized expectation `Tr(h rho)` with `rho` the noisy output of
/// `c` on basis state `input`, by Heisenberg propagation of `h`.
pub fn noisy_expectation_exact(
    c: &Circuit,
    theta: &[f64],
    input: u64,
    h: &PauliSum,
    p: f64,
    fold: usize,
) -> Result<f64> {
    check_dim(c.n_qubits, h.n_qubits())?;
    let folded = c.fold_cnots(fold)?.bind(theta)?;
    let damp = depolarizing_damping(p);
    let mut op = h.clone();
    for g in folded.gates.iter().rev() {
        if p > 0.0 {
            let reps = channel_repeats(g.kind, fold);
            let pairs = g.noise_pairs();
            let mut next = PauliSum::zero(op.n_qubits());
            for (s, w) in op.iter() {
                let hits = pairs
                    .iter()
                    .filter(|(a, b)| s.support() & (1 << a | 1 << b) != 0)
                    .count();
                next.add_term(*s, w * damp.powi((hits * reps) as i32));
            }
            op = next;
        }
        op = conjugate_gate(&op, g, DEFAULT_TERM_CAP)?;
    }
    Ok(op.basis_expectation(input))
}
