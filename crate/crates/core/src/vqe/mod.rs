//! Cost functions, the mesh + Gaussian-process optimizer, the expectation
//! cache and the hadron-mass protocols.

mod cache;
mod optimizer;
mod protocol;

pub use cache::{energy_from_values, reweight_cache, CacheEntry, EvaluationCache, DEFAULT_QUANTUM};
pub use optimizer::{
    optimize, sinusoid_sweep, LocalSearch, OptimizerConfig, Source, TraceEntry, VqeResult,
};
pub use protocol::{
    default_beta, run_baryon_mass, run_brickwork, run_meson_mass, BaryonRow, BrickworkResult,
    ExcitedMethod, MesonRow, MesonSteps, ProtocolConfig, SectorProblem,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::circuit::Circuit;
use crate::error::{check_dim, Error, Result};
use crate::par::ExecMode;
use crate::pauli::{group_for_measurement, MeasurementGroup, PauliString, PauliSum};
use crate::sim::{
    estimate_expectations, overlap_probability, sample_groups_circuit, NoiseModel, StateVector,
};

/// How expectations are obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Estimator {
    Exact,
    /// Grouped sampling with `shots` per group. The noise seed is combined
    /// with the cache key of each point, so repeated points reproduce.
    Sampled { shots: usize, noise: NoiseModel },
}

impl Estimator {
    pub fn shots(&self) -> Option<usize> {
        match self {
            Estimator::Exact => None,
            Estimator::Sampled { shots, .. } => Some(*shots),
        }
    }

    pub fn noise(&self) -> Option<&NoiseModel> {
        match self {
            Estimator::Exact => None,
            Estimator::Sampled { noise, .. } => Some(noise),
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn key_seed(seed: u64, key: &[i64]) -> u64 {
    key.iter().fold(mix(seed), |acc, &k| mix(acc ^ k as u64))
}

/// Evaluates string expectations of one circuit, through a cache.
#[derive(Debug)]
pub struct Evaluator {
    pub circuit: Circuit,
    pub input: u64,
    pub strings: Vec<PauliString>,
    pub estimator: Estimator,
    pub cache: EvaluationCache,
    pub mode: ExecMode,
    /// Mixes the output with the maximally mixed state at this probability.
    pub convex_error: Option<f64>,
    groups: Vec<MeasurementGroup>,
    plan: PauliSum,
}

impl Evaluator {
    /// `strings` is the measurement plan: every non-identity string of every
    /// observable that will be evaluated.
    pub fn new(circuit: Circuit, input: u64, strings: &[PauliString], estimator: Estimator) -> Result<Self> {
        let n = circuit.n_qubits;
        let mut plan = PauliSum::zero(n);
        for s in strings {
            check_dim(n, s.n_qubits())?;
            if !s.is_identity() {
                plan.add_term(*s, 1.0);
            }
        }
        if let Estimator::Sampled { shots, noise } = &estimator {
            if *shots == 0 {
                return Err(Error::Parameter("shots must be positive".into()));
            }
            noise.validate(n)?;
        }
        let groups = match estimator {
            Estimator::Exact => Vec::new(),
            Estimator::Sampled { .. } => group_for_measurement(&plan),
        };
        Ok(Evaluator {
            circuit,
            input,
            strings: plan.strings().copied().collect(),
            estimator,
            cache: EvaluationCache::default(),
            mode: ExecMode::best(),
            convex_error: None,
            groups,
            plan,
        })
    }

    /// Plan covering the union of the given sums.
    pub fn for_observables<'a, I>(circuit: Circuit, input: u64, sums: I, estimator: Estimator) -> Result<Self>
    where
        I: IntoIterator<Item = &'a PauliSum>,
    {
        let u = PauliSum::string_union(circuit.n_qubits, sums);
        let strings: Vec<PauliString> = u.strings().copied().collect();
        Evaluator::new(circuit, input, &strings, estimator)
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params
    }

    pub fn groups(&self) -> &[MeasurementGroup] {
        &self.groups
    }

    pub fn state(&self, theta: &[f64]) -> Result<StateVector> {
        let mut s = StateVector::basis(self.circuit.n_qubits, self.input)?;
        s.apply_circuit(&self.circuit, theta)?;
        Ok(s)
    }

    /// Expectations at `theta`, computed once per cache key.
    pub fn expectations(&self, theta: &[f64]) -> Result<Arc<CacheEntry>> {
        check_dim(self.n_params(), theta.len())?;
        if let Some(e) = self.cache.get(theta) {
            return Ok(e);
        }
        let shrink = 1.0 - self.convex_error.unwrap_or(0.0);
        let entry = match &self.estimator {
            Estimator::Exact => {
                let s = self.state(theta)?;
                let vals = s.string_expectations(&self.strings, self.mode);
                CacheEntry {
                    theta: theta.to_vec(),
                    values: self.strings.iter().copied().zip(vals.into_iter().map(|v| shrink * v)).collect(),
                    shots: None,
                    records: Vec::new(),
                }
            }
            Estimator::Sampled { shots, noise } => {
                let mut nm = noise.clone();
                nm.seed = key_seed(noise.seed, &self.cache.key(theta));
                let recs =
                    sample_groups_circuit(&self.circuit, theta, self.input, &self.groups, *shots, &nm, 1, self.mode)?;
                let est = estimate_expectations(&recs, &self.groups, &self.plan, noise.readout_confusion.as_deref())?;
                let values: BTreeMap<PauliString, f64> =
                    est.values.into_iter().map(|(k, v)| (k, shrink * v)).collect();
                CacheEntry { theta: theta.to_vec(), values, shots: Some(*shots), records: recs }
            }
        };
        Ok(self.cache.insert(entry))
    }

    /// `<H>` at `theta` from the (possibly cached) expectations.
    pub fn energy(&self, theta: &[f64], h: &PauliSum) -> Result<f64> {
        energy_from_values(h, &self.expectations(theta)?.values)
    }

    /// `|<Psi(theta)|Psi(theta_ref)>|^2`, exact or sampled per the estimator.
    pub fn overlap(&self, theta: &[f64], theta_ref: &[f64]) -> Result<f64> {
        let (shots, noise) = match &self.estimator {
            Estimator::Exact => (None, None),
            Estimator::Sampled { shots, noise } => {
                let mut nm = noise.clone();
                let mut key = self.cache.key(theta);
                key.extend(self.cache.key(theta_ref));
                nm.seed = key_seed(noise.seed ^ 0x6f76_6c70, &key);
                (Some(*shots), Some(nm))
            }
        };
        let p = overlap_probability(&self.circuit, theta, theta_ref, self.input, shots, noise.as_ref())?;
        Ok(match self.convex_error {
            // the mixed part hits the reference with probability 2^-n
            Some(pe) => (1.0 - pe) * p + pe / (1u64 << self.circuit.n_qubits) as f64,
            None => p,
        })
    }
}

/// `<Psi(theta)|H|Psi(theta)>`.
pub fn cost_ground(theta: &[f64], h: &PauliSum, ev: &Evaluator) -> Result<f64> {
    ev.energy(theta, h)
}

/// How the overlap enters the penalty.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PenaltyForm {
    /// `beta * |<Psi|Psi_ref>|`, the square root of the measured probability.
    #[default]
    Magnitude,
    /// `beta * |<Psi|Psi_ref>|^2`.
    Probability,
}

/// `<H> + beta * |<Psi(theta)|Psi(theta_ref)>|`.
pub fn cost_excited_penalty(
    theta: &[f64],
    h: &PauliSum,
    theta_ref: &[f64],
    beta: f64,
    ev: &Evaluator,
    form: PenaltyForm,
) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::Parameter(format!("beta = {beta} must be positive")));
    }
    let e = ev.energy(theta, h)?;
    let p = ev.overlap(theta, theta_ref)?.clamp(0.0, 1.0);
    Ok(match form {
        PenaltyForm::Magnitude => e + beta * p.sqrt(),
        PenaltyForm::Probability => e + beta * p,
    })
}

/// Default guard of the Gram-Schmidt denominator.
pub const GRAM_SCHMIDT_GUARD: f64 = 1e-6;

/// `(<H> - E_v P) / (1 - P)` with `P = |<Psi(theta)|Psi(theta_ref)>|^2`;
/// out of domain when `P >= 1 - guard`.
pub fn cost_excited_gram_schmidt(
    theta: &[f64],
    h: &PauliSum,
    theta_ref: &[f64],
    e_v: f64,
    ev: &Evaluator,
    guard: f64,
) -> Result<f64> {
    let e = ev.energy(theta, h)?;
    let p = ev.overlap(theta, theta_ref)?.clamp(0.0, 1.0);
    gram_schmidt_value(e, p, e_v, guard)
}

/// The Gram-Schmidt formula on given energy and overlap probability.
pub fn gram_schmidt_value(energy: f64, overlap: f64, e_v: f64, guard: f64) -> Result<f64> {
    if overlap >= 1.0 - guard {
        return Err(Error::OutOfDomain(format!("overlap {overlap} within {guard} of one")));
    }
    Ok((energy - e_v * overlap) / (1.0 - overlap))
}
