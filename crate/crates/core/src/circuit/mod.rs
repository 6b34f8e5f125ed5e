//! Parameterized circuit IR, ansatz families, static-tail splitting and
//! inactive-qubit reduction.

mod ansatz;
mod gate;
mod split;
mod synth;

pub use ansatz::{
    ansatz_basis_superposition, ansatz_brickwork, ansatz_n2_vacuum, ansatz_n4_baryon_general,
    ansatz_singlet_cut, ansatz_singlet_sector, ansatz_superposition, hyperspherical_amplitudes,
    hyperspherical_weights, Ansatz, SupportVector,
};
pub use gate::{Gate, GateKind, Param, Spin};
pub use split::{
    conjugate_hamiltonian_by_tail, conjugate_hamiltonian_by_tail_capped, reduce_inactive_qubits,
    split_and_reduce, ReducedProblem,
};
pub use synth::{Angle, TwoLevelBuilder};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angle vector bound to a circuit's symbolic slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite angle".into()));
        }
        Ok(ParamVector(values))
    }

    pub fn zeros(n: usize) -> Self {
        ParamVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Angles reduced into `[0, 2pi)`.
    pub fn wrapped(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.rem_euclid(std::f64::consts::TAU)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_params: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, n_params: 0, gates: Vec::new() }
    }

    pub fn from_gates(n_qubits: usize, n_params: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Circuit { n_qubits, n_params, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) {
        if let Some(crate::circuit::Param::Slot { slot, .. }) = g.param {
            self.n_params = self.n_params.max(slot + 1);
        }
        self.gates.push(g);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            g.validate(self.n_qubits)?;
            if let Some(Param::Slot { slot, scale, .. }) = g.param {
                if slot >= self.n_params {
                    return Err(Error::Parameter(format!(
                        "slot {slot} beyond {} parameters",
                        self.n_params
                    )));
                }
                if !scale.is_finite() {
                    return Err(Error::Parameter("non-finite slot scale".into()));
                }
            }
        }
        Ok(())
    }

    /// Reversed gate order with every rotation angle negated.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            n_params: self.n_params,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Copy with every slot resolved against `theta`.
    pub fn bind(&self, theta: &[f64]) -> Result<Circuit> {
        if theta.len() != self.n_params {
            return Err(Error::Dimension { expected: self.n_params, actual: theta.len() });
        }
        Ok(Circuit {
            n_qubits: self.n_qubits,
            n_params: 0,
            gates: self.gates.iter().map(|g| g.bind(theta)).collect(),
        })
    }

    /// `self` followed by `next`, sharing the parameter space.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        crate::error::check_dim(self.n_qubits, next.n_qubits)?;
        let mut gates = self.gates.clone();
        gates.extend(next.gates.iter().cloned());
        Ok(Circuit {
            n_qubits: self.n_qubits,
            n_params: self.n_params.max(next.n_params),
            gates,
        })
    }

    /// Splits into `(variational, static_tail)` where the tail is the longest
    /// parameter-free suffix.
    pub fn split_static_tail(&self) -> (Circuit, Circuit) {
        let cut = self
            .gates
            .iter()
            .rposition(|g| g.is_parameterized())
            .map(|i| i + 1)
            .unwrap_or(0);
        let var = Circuit {
            n_qubits: self.n_qubits,
            n_params: self.n_params,
            gates: self.gates[..cut].to_vec(),
        };
        let tail = Circuit {
            n_qubits: self.n_qubits,
            n_params: 0,
            gates: self.gates[cut..].to_vec(),
        };
        (var, tail)
    }

    /// Bitmask of qubits touched by at least one gate.
    pub fn touched_mask(&self) -> u64 {
        self.gates
            .iter()
            .flat_map(|g| g.qubits.iter())
            .fold(0u64, |m, &q| m | 1 << q)
    }

    /// Replaces every CNOT with `fold` consecutive copies (`fold` odd).
    pub fn fold_cnots(&self, fold: usize) -> Result<Circuit> {
        if fold % 2 == 0 {
            return Err(Error::Parameter(format!("fold factor {fold} must be odd")));
        }
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let copies = if g.kind == GateKind::CNOT { fold } else { 1 };
            gates.extend(std::iter::repeat_n(g.clone(), copies));
        }
        Ok(Circuit { n_qubits: self.n_qubits, n_params: self.n_params, gates })
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Circuit> {
        let c: Circuit = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }
}
