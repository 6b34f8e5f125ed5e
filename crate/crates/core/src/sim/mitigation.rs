use serde::{Deserialize, Serialize};

use super::noise::{noisy_expectation_exact, Confusion, NoiseModel};
use super::sampling::{estimate_expectations, sample_groups_circuit};
use crate::circuit::Circuit;
use crate::error::{check_dim, Error, Result};
use crate::par::ExecMode;
use crate::pauli::{group_for_measurement, PauliSum};

fn apply_per_qubit(probs: &[f64], mats: &[[[f64; 2]; 2]]) -> Vec<f64> {
    let mut v = probs.to_vec();
    for (q, m) in mats.iter().enumerate() {
        let tb = 1usize << q;
        for b in 0..v.len() {
            if b & tb == 0 {
                let (p0, p1) = (v[b], v[b | tb]);
                v[b] = m[0][0] * p0 + m[0][1] * p1;
                v[b | tb] = m[1][0] * p0 + m[1][1] * p1;
            }
        }
    }
    v
}

fn check_len(probs: &[f64], conf: &[Confusion]) -> Result<()> {
    check_dim(1usize << conf.len(), probs.len())
}

/// Observed distribution `(Lambda_1 x ... x Lambda_n) p_true`.
pub fn apply_confusion(probs: &[f64], conf: &[Confusion]) -> Result<Vec<f64>> {
    check_len(probs, conf)?;
    Ok(apply_per_qubit(probs, conf))
}

/// Applies the tensor inverse of the confusion matrices without clipping.
pub fn readout_invert(probs: &[f64], conf: &[Confusion]) -> Result<Vec<f64>> {
    check_len(probs, conf)?;
    let mut inv = Vec::with_capacity(conf.len());
    for (q, m) in conf.iter().enumerate() {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-12 {
            return Err(Error::Singular(format!("confusion matrix of qubit {q}")));
        }
        inv.push([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]);
    }
    Ok(apply_per_qubit(probs, &inv))
}

/// Inverts the readout map, clips negative quasi-probabilities to zero and
/// renormalizes.
pub fn readout_mitigate(probs: &[f64], conf: &[Confusion]) -> Result<Vec<f64>> {
    let mut v = readout_invert(probs, conf)?;
    for p in v.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    let total: f64 = v.iter().sum();
    if total <= 0.0 {
        return Err(Error::Singular("mitigated distribution vanished".into()));
    }
    v.iter_mut().for_each(|p| *p /= total);
    Ok(v)
}

/// Least-squares line through `(x, y)` evaluated at `x = 0`.
pub fn linear_extrapolate(xs: &[f64], ys: &[f64]) -> Result<f64> {
    check_dim(xs.len(), ys.len())?;
    if xs.len() < 2 {
        return Err(Error::Parameter("extrapolation needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Parameter("extrapolation abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(my - sxy / sxx * mx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZneResult {
    pub folds: Vec<usize>,
    pub values: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub extrapolated: f64,
}

/// CNOT-folding zero-noise extrapolation of `<observable>` on `c|input>`.
///
/// With `shots = None` each fold is evaluated in exact-expectation mode;
/// otherwise by grouped sampling, readout-mitigated when the noise model
/// carries a confusion matrix.
#[allow(clippy::too_many_arguments)]
pub fn zne_cnot_folding(
    c: &Circuit,
    theta: &[f64],
    input: u64,
    observable: &PauliSum,
    noise: &NoiseModel,
    folds: &[usize],
    shots: Option<usize>,
    mode: ExecMode,
) -> Result<ZneResult> {
    if folds.len() < 2 {
        return Err(Error::Parameter("zero-noise extrapolation needs at least two folds".into()));
    }
    if let Some(f) = folds.iter().find(|f| *f % 2 == 0) {
        return Err(Error::Parameter(format!("fold factor {f} must be odd")));
    }
    noise.validate(c.n_qubits)?;
    let p = noise.two_qubit_depolarizing_p;
    let mut values = Vec::with_capacity(folds.len());
    let mut errs = Vec::with_capacity(folds.len());
    match shots {
        None => {
            for &f in folds {
                values.push(noisy_expectation_exact(c, theta, input, observable, p, f)?);
                errs.push(0.0);
            }
        }
        Some(s) => {
            let groups = group_for_measurement(observable);
            for &f in folds {
                let recs = sample_groups_circuit(c, theta, input, &groups, s, noise, f, mode)?;
                let est = estimate_expectations(&recs, &groups, observable, noise.readout_confusion.as_deref())?;
                values.push(est.energy);
                errs.push(est.standard_error);
            }
        }
    }
    let xs: Vec<f64> = folds.iter().map(|&f| f as f64).collect();
    let extrapolated = linear_extrapolate(&xs, &values)?;
    Ok(ZneResult { folds: folds.to_vec(), values, standard_errors: errs, extrapolated })
}
