use log::info;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::optimizer::{optimize, sinusoid_sweep, LocalSearch, OptimizerConfig, VqeResult};
use super::{
    cost_excited_gram_schmidt, cost_excited_penalty, Estimator, Evaluator, PenaltyForm, GRAM_SCHMIDT_GUARD,
};
use crate::circuit::{
    ansatz_brickwork, ansatz_n2_vacuum, ansatz_n4_baryon_general, ansatz_singlet_cut, ansatz_singlet_sector,
    conjugate_hamiltonian_by_tail, reduce_inactive_qubits, Ansatz,
};
use crate::error::{Error, Result};
use crate::model::{LatticeParams, ModelOperators};
use crate::par::{self, ExecMode};
use crate::pauli::PauliSum;
use crate::sim::{rng_stream, Purpose, StateVector};

/// One baryon-number sector: an ansatz, its Hamiltonian blocks after static
/// tail conjugation and inactive-qubit removal, and an evaluator.
#[derive(Debug)]
pub struct SectorProblem {
    pub ansatz: Ansatz,
    pub n_sites: usize,
    /// `[mass, electric, kinetic]` on the evaluated register.
    pub blocks: [PauliSum; 3],
    pub evaluator: Evaluator,
    /// Original index of each evaluated qubit.
    pub active: Vec<usize>,
}

impl SectorProblem {
    pub fn new(ansatz: Ansatz, estimator: Estimator, split: bool) -> Result<Self> {
        let n_sites = ansatz.n_qubits() / 2;
        let ops = ModelOperators::new(n_sites)?;
        let full = [ops.h_mass, ops.h_electric, ops.h_kinetic];
        let (circuit, input, blocks, active) = if split {
            let (var, tail) = ansatz.circuit.split_static_tail();
            let mut blocks = Vec::with_capacity(3);
            let mut reduced = None;
            for b in &full {
                let r = reduce_inactive_qubits(&var, &conjugate_hamiltonian_by_tail(b, &tail)?, ansatz.input)?;
                blocks.push(r.hamiltonian.clone());
                reduced = Some(r);
            }
            let r = reduced.unwrap();
            let blocks: [PauliSum; 3] = blocks.try_into().unwrap();
            (r.circuit, r.input, blocks, r.active)
        } else {
            (ansatz.circuit.clone(), ansatz.input, full, (0..ansatz.n_qubits()).collect())
        };
        let estimator = match estimator {
            Estimator::Sampled { shots, mut noise } => {
                // readout calibration follows the qubits that are still measured
                if let Some(conf) = noise.readout_confusion.take() {
                    if conf.len() != ansatz.n_qubits() {
                        return Err(Error::Dimension { expected: ansatz.n_qubits(), actual: conf.len() });
                    }
                    noise.readout_confusion = Some(active.iter().map(|&q| conf[q]).collect());
                }
                Estimator::Sampled { shots, noise }
            }
            e => e,
        };
        let evaluator = Evaluator::for_observables(circuit, input, blocks.iter(), estimator)?;
        Ok(SectorProblem { ansatz, n_sites, blocks, evaluator, active })
    }

    /// `m H_m + H_el / x + H_kin` on the evaluated register.
    pub fn hamiltonian(&self, m_tilde: f64, x: f64) -> Result<PauliSum> {
        let p = LatticeParams::new(self.n_sites, m_tilde, x)?;
        let mut h = self.blocks[2].clone();
        h.add_scaled(&self.blocks[0], p.m_tilde)?;
        h.add_scaled(&self.blocks[1], 1.0 / p.x)?;
        Ok(h)
    }

    pub fn n_params(&self) -> usize {
        self.evaluator.n_params()
    }

    pub fn energy(&self, theta: &[f64], h: &PauliSum) -> Result<f64> {
        self.evaluator.energy(theta, h)
    }
}

/// Which circuit families the protocols use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnsatzChoice {
    /// Every singlet state of the sector (the nine-angle circuit for
    /// `N = 4`, `B = 1`).
    #[default]
    General,
    /// Singlet states with at most this many fermions and antifermions.
    ParticleCut(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub estimator: Estimator,
    pub optimizer: OptimizerConfig,
    /// Penalty weight; `None` uses [`default_beta`].
    pub beta: Option<f64>,
    pub penalty_form: PenaltyForm,
    pub split: bool,
    /// Probability of mixing in the maximally mixed state.
    pub convex_error: Option<f64>,
    pub ansatz: AnsatzChoice,
    pub mode: ExecMode,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            estimator: Estimator::Exact,
            optimizer: OptimizerConfig::default(),
            beta: None,
            penalty_form: PenaltyForm::Magnitude,
            split: true,
            convex_error: None,
            ansatz: AnsatzChoice::General,
            mode: ExecMode::best(),
        }
    }
}

/// `2 (m N + |H_el|_1 / x)`, an upper bound on every gap of the model.
pub fn default_beta(n_sites: usize, m_tilde: f64, x: f64) -> Result<f64> {
    let ops = ModelOperators::new(n_sites)?;
    Ok(2.0 * (m_tilde * n_sites as f64 + ops.h_electric.one_norm() / x))
}

fn sector_ansatz(n_sites: usize, baryon_number: i32, choice: AnsatzChoice) -> Result<Ansatz> {
    match (choice, n_sites, baryon_number) {
        (AnsatzChoice::General, 2, 0) => ansatz_n2_vacuum(),
        (AnsatzChoice::General, 4, 1) => ansatz_n4_baryon_general(),
        (AnsatzChoice::General, n, b) => ansatz_singlet_sector(n, b),
        (AnsatzChoice::ParticleCut(k), n, b) => ansatz_singlet_cut(n, b, k),
    }
}

fn problem(n_sites: usize, baryon_number: i32, cfg: &ProtocolConfig) -> Result<SectorProblem> {
    // the mixed-state error has to act on the full register for it to be the
    // same state in both sectors
    let split = cfg.split && cfg.convex_error.is_none();
    let mut p = SectorProblem::new(sector_ansatz(n_sites, baryon_number, cfg.ansatz)?, cfg.estimator.clone(), split)?;
    p.evaluator.convex_error = cfg.convex_error;
    p.evaluator.mode = ExecMode::Sequential;
    Ok(p)
}

/// Ground-state search on one sector, warm-started from the best cached
/// point reweighted to the new couplings.
fn ground(p: &SectorProblem, h: &PauliSum, cfg: &ProtocolConfig) -> Result<(Vec<f64>, f64, usize)> {
    if p.n_params() == 0 {
        let e = p.energy(&[], h)?;
        return Ok((vec![], e, 1));
    }
    let mut oc = cfg.optimizer.clone();
    if let Some((theta, _)) = p.evaluator.cache.best_reweighted(h) {
        oc.initial_points.push(theta);
    }
    let r = optimize(p.n_params(), |t: &[f64]| p.energy(t, h), &oc, cfg.mode)?;
    Ok((r.best_theta.clone(), r.best_value, r.evaluations()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaryonRow {
    pub n_sites: usize,
    pub m_tilde: f64,
    pub x: f64,
    pub e_v: f64,
    pub e_b: f64,
    pub m_b: f64,
    pub evals_used: usize,
    pub theta_v: Vec<f64>,
    pub theta_b: Vec<f64>,
}

/// Vacuum and baryon VQE over `x_grid` (in the given order), returning
/// `M_b = E_b - E_v` per point. Later points start from the cached
/// expectations of earlier ones, reweighted to the new `x`.
pub fn run_baryon_mass(n_sites: usize, m_tilde: f64, x_grid: &[f64], cfg: &ProtocolConfig) -> Result<Vec<BaryonRow>> {
    let vac = problem(n_sites, 0, cfg)?;
    let bar = problem(n_sites, 1, cfg)?;
    let mut rows = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let h_v = vac.hamiltonian(m_tilde, x)?;
        let h_b = bar.hamiltonian(m_tilde, x)?;
        let (theta_v, e_v, nv) = ground(&vac, &h_v, cfg)?;
        let (theta_b, e_b, nb) = ground(&bar, &h_b, cfg)?;
        info!("baryon N={n_sites} m={m_tilde} x={x}: E_v={e_v:.10} E_b={e_b:.10} M_b={:.10}", e_b - e_v);
        rows.push(BaryonRow {
            n_sites,
            m_tilde,
            x,
            e_v,
            e_b,
            m_b: e_b - e_v,
            evals_used: nv + nb,
            theta_v,
            theta_b,
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcitedMethod {
    Penalty,
    GramSchmidt,
}

/// The four logged steps of one meson point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MesonSteps {
    /// Step I: vacuum energy and angles.
    pub e_v: f64,
    pub theta_v: Vec<f64>,
    /// Step II: overlap circuit evaluated at the vacuum angles (one when
    /// exact).
    pub overlap_check: f64,
    /// Step III: excited energy, angles and final overlap with the vacuum.
    pub e_m: f64,
    pub theta_m: Vec<f64>,
    pub overlap_final: f64,
    /// Step IV.
    pub m_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MesonRow {
    pub n_sites: usize,
    pub m_tilde: f64,
    pub x: f64,
    pub method: ExcitedMethod,
    /// `None` when the excited search never left the guarded region.
    pub steps: Option<MesonSteps>,
    pub e_v: f64,
    pub evals_used: usize,
}

impl MesonRow {
    pub fn flagged(&self) -> bool {
        self.steps.is_none()
    }
}

/// Penalty search. A run on `beta P` (smooth, same minimizer once `beta`
/// exceeds the gap) precedes the configured form, which otherwise leaves
/// pattern polls stuck on the kink of `beta |<.|.>|` at zero overlap.
fn excited_penalty(
    vac: &SectorProblem,
    h: &PauliSum,
    theta_v: &[f64],
    beta: f64,
    cfg: &ProtocolConfig,
) -> Result<(usize, VqeResult)> {
    let d = vac.n_params();
    let smooth = optimize(
        d,
        |t: &[f64]| cost_excited_penalty(t, h, theta_v, beta, &vac.evaluator, PenaltyForm::Probability),
        &cfg.optimizer,
        cfg.mode,
    )?;
    let used = smooth.evaluations();
    if cfg.penalty_form == PenaltyForm::Probability || used >= cfg.optimizer.budget {
        return Ok((used, smooth));
    }
    let mut oc = cfg.optimizer.clone();
    oc.budget -= used;
    oc.local = LocalSearch::Pattern;
    oc.mesh_points = Some(1);
    oc.lhs_points = Some(1);
    oc.initial_points = vec![smooth.best_theta.clone()];
    let r = optimize(
        d,
        |t: &[f64]| cost_excited_penalty(t, h, theta_v, beta, &vac.evaluator, cfg.penalty_form),
        &oc,
        cfg.mode,
    )?;
    Ok((used + r.evaluations(), r))
}

/// Vacuum VQE, overlap circuit, excited VQE and mass difference over
/// `x_grid`.
pub fn run_meson_mass(
    n_sites: usize,
    m_tilde: f64,
    x_grid: &[f64],
    method: ExcitedMethod,
    cfg: &ProtocolConfig,
) -> Result<Vec<MesonRow>> {
    let vac = problem(n_sites, 0, cfg)?;
    let d = vac.n_params();
    if d == 0 {
        return Err(Error::Parameter("vacuum ansatz has no free angle for an excited search".into()));
    }
    let mut rows = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let h = vac.hamiltonian(m_tilde, x)?;
        // I
        let (theta_v, e_v, n1) = ground(&vac, &h, cfg)?;
        info!("meson N={n_sites} m={m_tilde} x={x} step I: E_v={e_v:.10}");
        // II
        let overlap_check = vac.evaluator.overlap(&theta_v, &theta_v)?;
        info!("meson x={x} step II: overlap at vacuum angles {overlap_check:.6}");
        // III
        let result = match method {
            ExcitedMethod::Penalty => {
                let beta = match cfg.beta {
                    Some(b) => b,
                    None => default_beta(n_sites, m_tilde, x)?,
                };
                excited_penalty(&vac, &h, &theta_v, beta, cfg)
            }
            ExcitedMethod::GramSchmidt => {
                // a ratio of trigonometric polynomials: the coordinate fit is
                // not exact here
                let mut oc = cfg.optimizer.clone();
                oc.local = LocalSearch::Pattern;
                optimize(
                    d,
                    |t: &[f64]| cost_excited_gram_schmidt(t, &h, &theta_v, e_v, &vac.evaluator, GRAM_SCHMIDT_GUARD),
                    &oc,
                    cfg.mode,
                )
                .map(|r| (r.evaluations(), r))
            }
        };
        let (steps, n3) = match result {
            Ok((n, r)) => {
                // the Gram-Schmidt cost is itself the energy of the
                // orthogonalized state; the penalty optimum is orthogonal
                let e_m = match method {
                    ExcitedMethod::Penalty => vac.energy(&r.best_theta, &h)?,
                    ExcitedMethod::GramSchmidt => r.best_value,
                };
                let overlap_final = vac.evaluator.overlap(&r.best_theta, &theta_v)?;
                info!("meson x={x} step III: E_m={e_m:.10} overlap={overlap_final:.3e}");
                info!("meson x={x} step IV: M_m={:.10}", e_m - e_v);
                (
                    Some(MesonSteps {
                        e_v,
                        theta_v: theta_v.clone(),
                        overlap_check,
                        e_m,
                        theta_m: r.best_theta,
                        overlap_final,
                        m_m: e_m - e_v,
                    }),
                    n,
                )
            }
            Err(Error::OutOfDomain(msg)) => {
                info!("meson x={x} step III flagged: {msg}");
                (None, cfg.optimizer.budget)
            }
            Err(e) => return Err(e),
        };
        rows.push(MesonRow { n_sites, m_tilde, x, method, steps, e_v, evals_used: n1 + n3 });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrickworkResult {
    pub params: LatticeParams,
    pub layers: (usize, usize),
    pub e_v: f64,
    pub e_b: f64,
    pub m_b: f64,
    pub theta_v: Vec<f64>,
    pub theta_b: Vec<f64>,
    pub evaluations: usize,
}

/// Brickwork VQE in both sectors with exact energies; angles start uniformly
/// in `[-0.1, 0.1]` and are refined by per-angle sinusoid sweeps.
pub fn run_brickwork(
    p: &LatticeParams,
    layers: (usize, usize),
    sweeps: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<BrickworkResult> {
    let h = ModelOperators::new(p.n_sites)?.hamiltonian(p.m_tilde, p.x)?;
    let sectors = [(0, layers.0), (1, layers.1)];
    let runs = par::map(mode, &sectors, |&(b, l)| -> Result<(Vec<f64>, f64, usize)> {
        let a = ansatz_brickwork(p.n_sites, b, l)?;
        let mut rng = rng_stream(seed, Purpose::Optimizer, b as u64, l as u64, 0);
        let init: Vec<f64> = (0..a.n_params()).map(|_| rng.random_range(-0.1..0.1)).collect();
        let cost = |t: &[f64]| -> Result<f64> {
            let mut s = StateVector::basis(a.n_qubits(), a.input)?;
            s.apply_circuit(&a.circuit, t)?;
            s.expectation(&h)
        };
        let r = sinusoid_sweep(cost, &init, sweeps, 1e-10, ExecMode::Sequential)?;
        let n = r.evaluations();
        Ok((r.best_theta, r.best_value, n))
    });
    let mut it = runs.into_iter();
    let (theta_v, e_v, nv) = it.next().unwrap()?;
    let (theta_b, e_b, nb) = it.next().unwrap()?;
    Ok(BrickworkResult {
        params: *p,
        layers,
        e_v,
        e_b,
        m_b: e_b - e_v,
        theta_v,
        theta_b,
        evaluations: nv + nb,
    })
}
