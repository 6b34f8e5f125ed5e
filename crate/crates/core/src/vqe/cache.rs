use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::sim::MeasurementRecord;

/// Default angle quantization of cache keys.
pub const DEFAULT_QUANTUM: f64 = 1e-6;

/// Measured or computed string expectations at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct CacheEntry {
    pub theta: Vec<f64>,
    pub values: BTreeMap<PauliString, f64>,
    /// Shots per measurement group; `None` for exact values.
    pub shots: Option<usize>,
    pub records: Vec<MeasurementRecord>,
}

/// `sum_k c_k <P_k>` plus the identity coefficient, summed in the canonical
/// string order of `h`.
pub fn energy_from_values(h: &PauliSum, values: &BTreeMap<PauliString, f64>) -> Result<f64> {
    let mut e = 0.0;
    for (p, c) in h.iter() {
        if p.is_identity() {
            e += c;
            continue;
        }
        match values.get(p) {
            Some(v) => e += c * v,
            None => return Err(Error::CacheMiss(format!("string {p}"))),
        }
    }
    Ok(e)
}

/// Expectation store keyed by angles reduced mod 2pi and quantized.
#[derive(Debug)]
pub struct EvaluationCache {
    quantum: f64,
    entries: Mutex<HashMap<Vec<i64>, Arc<CacheEntry>>>,
}

impl Default for EvaluationCache {
    fn default() -> Self {
        EvaluationCache::new(DEFAULT_QUANTUM)
    }
}

impl EvaluationCache {
    pub fn new(quantum: f64) -> Self {
        EvaluationCache { quantum, entries: Mutex::new(HashMap::new()) }
    }

    pub fn quantum(&self) -> f64 {
        self.quantum
    }

    pub fn key(&self, theta: &[f64]) -> Vec<i64> {
        let steps = (std::f64::consts::TAU / self.quantum).round() as i64;
        theta
            .iter()
            .map(|t| {
                let k = (t.rem_euclid(std::f64::consts::TAU) / self.quantum).round() as i64;
                if k >= steps {
                    k - steps
                } else {
                    k
                }
            })
            .collect()
    }

    pub fn get(&self, theta: &[f64]) -> Option<Arc<CacheEntry>> {
        self.entries.lock().unwrap().get(&self.key(theta)).cloned()
    }

    /// Stores `entry`; an existing entry under the same key is replaced
    /// (values are identical by determinism).
    pub fn insert(&self, entry: CacheEntry) -> Arc<CacheEntry> {
        let e = Arc::new(entry);
        self.entries.lock().unwrap().insert(self.key(&e.theta), e.clone());
        e
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.entries.lock().unwrap().clear();
    }

    /// All entries, ordered by key.
    pub fn entries(&self) -> Vec<Arc<CacheEntry>> {
        let map = self.entries.lock().unwrap();
        let mut keys: Vec<&Vec<i64>> = map.keys().collect();
        keys.sort();
        keys.into_iter().map(|k| map[k].clone()).collect()
    }

    /// Energy of a new coefficient set from stored expectations.
    pub fn reweight(&self, theta: &[f64], h: &PauliSum) -> Result<f64> {
        let e = self
            .get(theta)
            .ok_or_else(|| Error::CacheMiss(format!("no entry at theta = {theta:?}")))?;
        energy_from_values(h, &e.values)
    }

    /// Lowest reweighted energy over every stored point, with its angles.
    pub fn best_reweighted(&self, h: &PauliSum) -> Option<(Vec<f64>, f64)> {
        self.entries()
            .into_iter()
            .filter_map(|e| energy_from_values(h, &e.values).ok().map(|v| (e.theta.clone(), v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// `reweight_cache(cache, theta, h)`: the stored expectations at `theta`
/// combined with the coefficients of `h`.
pub fn reweight_cache(cache: &EvaluationCache, theta: &[f64], h: &PauliSum) -> Result<f64> {
    cache.reweight(theta, h)
}
