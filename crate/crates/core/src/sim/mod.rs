//! Statevector execution, shot sampling, noise and error mitigation.

mod mitigation;
mod noise;
mod sampling;
mod state;

pub use mitigation::{
    apply_confusion, linear_extrapolate, readout_invert, readout_mitigate, zne_cnot_folding, ZneResult,
};
pub use noise::{
    apply_circuit_trajectory, depolarizing_damping, noisy_expectation_exact, rng_stream,
    symmetric_confusion, Confusion, NoiseModel, Purpose,
};
pub use sampling::{
    estimate_expectations, rotate_to_basis, sample_groups, sample_groups_circuit, Estimate,
    MeasurementRecord, SHOT_BLOCK,
};
pub use state::{circuit_dense, gate_dense, StateVector};

use rand::Rng;

use crate::circuit::Circuit;
use crate::error::{check_dim, Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

/// Output of `c` on basis state `input` at `theta`.
pub fn run(c: &Circuit, theta: &[f64], input: u64) -> Result<StateVector> {
    let mut s = StateVector::basis(c.n_qubits, input)?;
    s.apply_circuit(c, theta)?;
    Ok(s)
}

/// `<psi|h|psi>`.
pub fn expectation_exact(state: &StateVector, h: &PauliSum) -> Result<f64> {
    state.expectation(h)
}

/// `|input><input|` as a Pauli sum (`2^n` terms).
pub fn basis_projector(n_qubits: usize, input: u64) -> PauliSum {
    let mut out = PauliSum::zero(n_qubits);
    let w = 1.0 / (1u64 << n_qubits) as f64;
    for zmask in 0..1u64 << n_qubits {
        let sign = if (zmask & input).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let factors: Vec<(usize, Pauli)> =
            (0..n_qubits).filter(|q| zmask >> q & 1 == 1).map(|q| (q, Pauli::Z)).collect();
        out.add_term(PauliString::from_factors(n_qubits, &factors), sign * w);
    }
    out
}

/// Probability of recovering `input` from `U(theta)^dag U(theta_ref) |input>`.
///
/// `shots = None` gives the exact value (depolarized when `noise` is set);
/// otherwise the frequency over `shots` seeded samples.
pub fn overlap_probability(
    c: &Circuit,
    theta: &[f64],
    theta_ref: &[f64],
    input: u64,
    shots: Option<usize>,
    noise: Option<&NoiseModel>,
) -> Result<f64> {
    check_dim(c.n_params, theta.len())?;
    check_dim(c.n_params, theta_ref.len())?;
    let combined = c.bind(theta_ref)?.then(&c.inverse().bind(theta)?)?;
    let p = noise.map(|n| n.two_qubit_depolarizing_p).unwrap_or(0.0);
    let exact = if p == 0.0 {
        run(&combined, &[], input)?.probability(input)
    } else {
        noisy_expectation_exact(&combined, &[], input, &basis_projector(c.n_qubits, input), p, 1)?
    };
    let Some(shots) = shots else {
        return Ok(exact.clamp(0.0, 1.0));
    };
    if shots == 0 {
        return Err(Error::Parameter("shots must be positive".into()));
    }
    let seed = noise.map(|n| n.seed).unwrap_or(0);
    let mut hits = 0usize;
    let blocks = shots.div_ceil(SHOT_BLOCK);
    for blk in 0..blocks {
        let n = SHOT_BLOCK.min(shots - blk * SHOT_BLOCK);
        let prob = if p == 0.0 {
            exact
        } else {
            let mut s = StateVector::basis(c.n_qubits, input)?;
            let mut rng = rng_stream(seed, Purpose::Trajectory, u64::MAX, 1, blk as u64);
            apply_circuit_trajectory(&mut s, &combined, &[], p, 1, &mut rng)?;
            s.probability(input)
        };
        let mut rng = rng_stream(seed, Purpose::Overlap, 0, 1, blk as u64);
        hits += (0..n).filter(|_| rng.random::<f64>() < prob).count();
    }
    Ok(hits as f64 / shots as f64)
}

/// `(1 - p_e) <psi|h|psi> + p_e <err|h|err>`: expectation in a state mixed with
/// a parameter-independent error state.
pub fn mixed_expectation(state: &StateVector, error_state: &StateVector, p_e: f64, h: &PauliSum) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_e) {
        return Err(Error::Parameter(format!("mixing probability {p_e} outside [0, 1]")));
    }
    Ok((1.0 - p_e) * state.expectation(h)? + p_e * error_state.expectation(h)?)
}
