//! Static-tail conjugation and inactive-qubit elimination.

use super::gate::Spin;
use super::Circuit;
use crate::error::{check_dim, Error, Result};
use crate::pauli::{conjugate_gate, project_fixed_qubits, PauliSum, DEFAULT_TERM_CAP};

/// `U_s^dag h U_s` for a parameter-free tail, folding gates right to left.
pub fn conjugate_hamiltonian_by_tail(h: &PauliSum, tail: &Circuit) -> Result<PauliSum> {
    conjugate_hamiltonian_by_tail_capped(h, tail, DEFAULT_TERM_CAP)
}

pub fn conjugate_hamiltonian_by_tail_capped(h: &PauliSum, tail: &Circuit, cap: usize) -> Result<PauliSum> {
    check_dim(tail.n_qubits, h.n_qubits())?;
    let mut out = h.clone();
    for g in tail.gates.iter().rev() {
        out = conjugate_gate(&out, g, cap)?;
    }
    Ok(out)
}

/// A circuit and Hamiltonian on the active qubits only.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedProblem {
    pub circuit: Circuit,
    pub hamiltonian: PauliSum,
    /// Inactive qubits (original indices) with their input values.
    pub fixed: Vec<(usize, Spin)>,
    /// Original index of each reduced qubit.
    pub active: Vec<usize>,
    /// Input restricted to the active qubits.
    pub input: u64,
}

/// Drops qubits touched by no gate of `variational`, fixing them to their
/// value in `input` and projecting `h_effective` accordingly.
pub fn reduce_inactive_qubits(variational: &Circuit, h_effective: &PauliSum, input: u64) -> Result<ReducedProblem> {
    let n = variational.n_qubits;
    check_dim(n, h_effective.n_qubits())?;
    let touched = variational.touched_mask();
    let active: Vec<usize> = (0..n).filter(|q| touched >> q & 1 == 1).collect();
    let fixed: Vec<(usize, Spin)> = (0..n)
        .filter(|q| touched >> q & 1 == 0)
        .map(|q| (q, Spin::from_bit(input >> q & 1 == 1)))
        .collect();
    let mut map = vec![usize::MAX; n];
    for (i, &q) in active.iter().enumerate() {
        map[q] = i;
    }
    let mut gates = Vec::with_capacity(variational.gates.len());
    for g in &variational.gates {
        let mut g2 = g.clone();
        for q in g2.qubits.iter_mut() {
            if map[*q] == usize::MAX {
                return Err(Error::Contract(format!("gate {g} touches inactive qubit {q}")));
            }
            *q = map[*q];
        }
        gates.push(g2);
    }
    let circuit = Circuit::from_gates(active.len(), variational.n_params, gates)?;
    let hamiltonian = project_fixed_qubits(h_effective, &fixed)?;
    let reduced_input = active
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &q)| acc | (input >> q & 1) << i);
    Ok(ReducedProblem { circuit, hamiltonian, fixed, active, input: reduced_input })
}

/// Splits off the static tail, conjugates `h` by it and removes inactive
/// qubits.
pub fn split_and_reduce(c: &Circuit, h: &PauliSum, input: u64) -> Result<ReducedProblem> {
    let (var, tail) = c.split_static_tail();
    let h_eff = conjugate_hamiltonian_by_tail(h, &tail)?;
    reduce_inactive_qubits(&var, &h_eff, input)
}
