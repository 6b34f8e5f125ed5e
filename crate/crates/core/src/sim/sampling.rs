use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mitigation::readout_mitigate;
use super::noise::{apply_circuit_trajectory, rng_stream, Confusion, NoiseModel, Purpose};
use super::state::StateVector;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::par::{self, ExecMode};
use crate::pauli::{Axis, MeasurementGroup, PauliString, PauliSum};

/// Shots per noisy trajectory.
pub const SHOT_BLOCK: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub group: usize,
    pub basis: Vec<Axis>,
    pub shots: usize,
    /// Observed bitstring (bit `q` = qubit `q`, 1 = down) to count.
    pub counts: BTreeMap<u64, u64>,
    pub fold: usize,
    pub rotated: bool,
}

impl MeasurementRecord {
    pub fn frequencies(&self, n_qubits: usize) -> Vec<f64> {
        let mut p = vec![0.0; 1 << n_qubits];
        for (&b, &c) in &self.counts {
            p[b as usize] = c as f64 / self.shots as f64;
        }
        p
    }
}

/// Rotates `state` so that a Z-basis measurement realizes `basis`.
pub fn rotate_to_basis(state: &mut StateVector, basis: &[Axis]) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |v: f64| Complex64::new(v, 0.0);
    for (q, axis) in basis.iter().enumerate() {
        match axis {
            // RY(-pi/2): R^dag Z R = X
            Axis::X => state.apply_1q(q, [[r(h), r(h)], [r(-h), r(h)]]),
            // RX(pi/2): R^dag Z R = Y
            Axis::Y => state.apply_1q(
                q,
                [[r(h), Complex64::new(0.0, -h)], [Complex64::new(0.0, -h), r(h)]],
            ),
            Axis::Z | Axis::Free => {}
        }
    }
}

fn draw(cumulative: &[f64], rng: &mut ChaCha8Rng) -> u64 {
    let total = *cumulative.last().unwrap();
    let u = rng.random::<f64>() * total;
    cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1) as u64
}

fn flip_readout(b: u64, conf: &[Confusion], rng: &mut ChaCha8Rng) -> u64 {
    let mut out = b;
    for (q, m) in conf.iter().enumerate() {
        let bit = (b >> q & 1) as usize;
        // probability of observing the other value
        if rng.random::<f64>() < m[1 - bit][bit] {
            out ^= 1 << q;
        }
    }
    out
}

fn sample_block(
    state: &StateVector,
    basis: &[Axis],
    shots: usize,
    conf: Option<&[Confusion]>,
    shot_rng: &mut ChaCha8Rng,
    readout_rng: &mut ChaCha8Rng,
    counts: &mut BTreeMap<u64, u64>,
) {
    let mut s = state.clone();
    rotate_to_basis(&mut s, basis);
    let mut acc = 0.0;
    let cumulative: Vec<f64> = s
        .probabilities()
        .into_iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    for _ in 0..shots {
        let mut b = draw(&cumulative, shot_rng);
        if let Some(conf) = conf {
            b = flip_readout(b, conf, readout_rng);
        }
        *counts.entry(b).or_insert(0) += 1;
    }
}

/// Samples every group from a fixed state (readout noise only).
pub fn sample_groups(
    state: &StateVector,
    groups: &[MeasurementGroup],
    shots: usize,
    noise: Option<&NoiseModel>,
    mode: ExecMode,
) -> Result<Vec<MeasurementRecord>> {
    if shots == 0 {
        return Err(Error::Parameter("shots must be positive".into()));
    }
    let seed = noise.map(|n| n.seed).unwrap_or(0);
    let conf = noise.and_then(|n| n.readout_confusion.as_deref());
    let idx: Vec<usize> = (0..groups.len()).collect();
    Ok(par::map(mode, &idx, |&gi| {
        let g = &groups[gi];
        let mut counts = BTreeMap::new();
        let mut shot_rng = rng_stream(seed, Purpose::Shots, gi as u64, 1, 0);
        let mut ro_rng = rng_stream(seed, Purpose::Readout, gi as u64, 1, 0);
        sample_block(state, &g.basis, shots, conf, &mut shot_rng, &mut ro_rng, &mut counts);
        MeasurementRecord { group: gi, basis: g.basis.clone(), shots, counts, fold: 1, rotated: true }
    }))
}

/// Samples every group from noisy executions of `c` on basis state `input`;
/// each block of [`SHOT_BLOCK`] shots shares one trajectory.
pub fn sample_groups_circuit(
    c: &Circuit,
    theta: &[f64],
    input: u64,
    groups: &[MeasurementGroup],
    shots: usize,
    noise: &NoiseModel,
    fold: usize,
    mode: ExecMode,
) -> Result<Vec<MeasurementRecord>> {
    if shots == 0 {
        return Err(Error::Parameter("shots must be positive".into()));
    }
    noise.validate(c.n_qubits)?;
    let p = noise.two_qubit_depolarizing_p;
    let conf = noise.readout_confusion.as_deref();
    let ideal = if p == 0.0 {
        let mut s = StateVector::basis(c.n_qubits, input)?;
        s.apply_circuit(c, theta)?;
        Some(s)
    } else {
        None
    };
    let idx: Vec<usize> = (0..groups.len()).collect();
    par::map(mode, &idx, |&gi| {
        let g = &groups[gi];
        let mut counts = BTreeMap::new();
        let blocks = shots.div_ceil(SHOT_BLOCK);
        for blk in 0..blocks {
            let n = SHOT_BLOCK.min(shots - blk * SHOT_BLOCK);
            let key = (gi as u64, fold as u64, blk as u64);
            let state = match &ideal {
                Some(s) => s.clone(),
                None => {
                    let mut s = StateVector::basis(c.n_qubits, input)?;
                    let mut rng = rng_stream(noise.seed, Purpose::Trajectory, key.0, key.1, key.2);
                    apply_circuit_trajectory(&mut s, c, theta, p, fold, &mut rng)?;
                    s
                }
            };
            let mut shot_rng = rng_stream(noise.seed, Purpose::Shots, key.0, key.1, key.2);
            let mut ro_rng = rng_stream(noise.seed, Purpose::Readout, key.0, key.1, key.2);
            sample_block(&state, &g.basis, n, conf, &mut shot_rng, &mut ro_rng, &mut counts);
        }
        Ok(MeasurementRecord { group: gi, basis: g.basis.clone(), shots, counts, fold, rotated: true })
    })
    .into_iter()
    .collect()
}

/// Estimated expectations from measurement records.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub values: BTreeMap<PauliString, f64>,
    pub energy: f64,
    pub standard_error: f64,
}

fn parity(b: u64, p: &PauliString) -> f64 {
    if (b & p.support()).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Reconstructs every string of `h` from its group's samples; optional
/// readout mitigation is applied to each group's distribution first.
pub fn estimate_expectations(
    records: &[MeasurementRecord],
    groups: &[MeasurementGroup],
    h: &PauliSum,
    mitigation: Option<&[Confusion]>,
) -> Result<Estimate> {
    let n = h.n_qubits();
    let mut values = BTreeMap::new();
    let mut energy = h.identity_coefficient();
    let mut var = 0.0;
    for rec in records {
        let g = groups
            .get(rec.group)
            .ok_or_else(|| Error::Parameter(format!("record for unknown group {}", rec.group)))?;
        let dist: Vec<(u64, f64)> = match mitigation {
            Some(conf) => readout_mitigate(&rec.frequencies(n), conf)?
                .into_iter()
                .enumerate()
                .filter(|(_, p)| *p != 0.0)
                .map(|(b, p)| (b as u64, p))
                .collect(),
            None => rec
                .counts
                .iter()
                .map(|(&b, &c)| (b, c as f64 / rec.shots as f64))
                .collect(),
        };
        let mut e1 = 0.0;
        let mut e2 = 0.0;
        for &(b, prob) in &dist {
            let e: f64 = g.members.iter().map(|s| h.coefficient(s) * parity(b, s)).sum();
            e1 += prob * e;
            e2 += prob * e * e;
        }
        for s in &g.members {
            let m: f64 = dist.iter().map(|&(b, prob)| prob * parity(b, s)).sum();
            values.insert(*s, m);
            energy += h.coefficient(s) * m;
        }
        var += (e2 - e1 * e1).max(0.0) / rec.shots as f64;
    }
    for s in h.strings() {
        if !s.is_identity() && !values.contains_key(s) {
            return Err(Error::CacheMiss(format!("no record covers {s}")));
        }
    }
    Ok(Estimate { values, energy, standard_error: var.sqrt() })
}
