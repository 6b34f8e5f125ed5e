//! Experiment drivers. Each returns its artifacts fully built; nothing touches
//! the filesystem here.

use anyhow::Result;
use log::info;
use serde_json::json;

use su2_hadron::circuit::{ansatz_n2_vacuum, ansatz_singlet_sector};
use su2_hadron::exact::{scan_masses, HadronMasses};
use su2_hadron::model::{build_hamiltonian, LatticeParams};
use su2_hadron::par::{self, ExecMode};
use su2_hadron::pauli::io::to_text;
use su2_hadron::sim::{symmetric_confusion, zne_cnot_folding, NoiseModel};
use su2_hadron::vqe::{
    optimize, run_baryon_mass, run_brickwork, run_meson_mass, Estimator, ExcitedMethod, OptimizerConfig,
    ProtocolConfig, SectorProblem,
};

use crate::config::{Experiment, ExperimentConfig, Mode};
use crate::output::{Artifact, Cell, Table};

pub struct Outcome {
    pub tables: Vec<(String, Table)>,
    pub texts: Vec<Artifact>,
}

impl Outcome {
    fn table(name: &str, t: Table) -> Self {
        Outcome { tables: vec![(name.to_string(), t)], texts: Vec::new() }
    }

    /// CSV and JSON mirror per table, extra text files, then the manifest.
    pub fn artifacts(&self, cfg: &ExperimentConfig) -> Vec<Artifact> {
        let mut out = Vec::new();
        for (name, t) in &self.tables {
            out.push(Artifact { name: format!("{name}.csv"), contents: t.to_csv() });
            out.push(Artifact { name: format!("{name}.json"), contents: t.to_json() });
        }
        out.extend(self.texts.iter().cloned());
        let files: Vec<&str> = out.iter().map(|a| a.name.as_str()).collect();
        let manifest = json!({
            "experiment": cfg.experiment.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg.to_text(),
            "seed": cfg.seed,
            "parallel": cfg!(feature = "parallel"),
            "files": files,
        });
        let mut m = serde_json::to_string_pretty(&manifest).unwrap();
        m.push('\n');
        out.push(Artifact { name: "manifest.json".into(), contents: m });
        out
    }
}

fn points(cfg: &ExperimentConfig) -> Result<Vec<LatticeParams>> {
    cfg.points().collect()
}

/// `(N, m)` pairs, each carrying the whole `x` grid.
fn lines(cfg: &ExperimentConfig) -> Vec<(usize, f64)> {
    cfg.n_sites.iter().flat_map(|&n| cfg.m_tilde.iter().map(move |&m| (n, m))).collect()
}

fn noise_model(cfg: &ExperimentConfig, n_qubits: usize, p: f64) -> NoiseModel {
    let readout_confusion = (cfg.readout_error > 0.0).then(|| vec![symmetric_confusion(cfg.readout_error); n_qubits]);
    NoiseModel { two_qubit_depolarizing_p: p, readout_confusion, seed: cfg.seed_or_default() }
}

fn optimizer_config(cfg: &ExperimentConfig) -> OptimizerConfig {
    OptimizerConfig { budget: cfg.budget, local: cfg.local, seed: cfg.seed_or_default(), ..Default::default() }
}

fn protocol(cfg: &ExperimentConfig, n_sites: usize) -> ProtocolConfig {
    let estimator = match cfg.mode {
        Mode::Exact => Estimator::Exact,
        Mode::Sampled => Estimator::Sampled {
            shots: cfg.shots,
            noise: noise_model(cfg, 2 * n_sites, cfg.depolarizing_p[0]),
        },
    };
    ProtocolConfig {
        estimator,
        optimizer: optimizer_config(cfg),
        beta: cfg.beta,
        ..Default::default()
    }
}

pub fn run(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Outcome> {
    info!("running {}", cfg.experiment.name());
    match cfg.experiment {
        Experiment::ModelDump => model_dump(cfg),
        Experiment::EdScan => ed_scan(cfg, mode),
        Experiment::RatioContour => ratio_contour(cfg, mode),
        Experiment::BaryonMass => baryon_mass(cfg, mode),
        Experiment::MesonMass => meson_mass(cfg, mode),
        Experiment::N6Brickwork => brickwork(cfg, mode),
        Experiment::NoiseStudy => noise_study(cfg, mode),
    }
}

fn model_dump(cfg: &ExperimentConfig) -> Result<Outcome> {
    let pts = points(cfg)?;
    let mut texts = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let name = if pts.len() == 1 { "hamiltonian.txt".to_string() } else { format!("hamiltonian_{i}.txt") };
        texts.push(Artifact { name, contents: to_text(&build_hamiltonian(p)?) });
    }
    let mut t = Table::new(&["file", "n", "m_tilde", "x", "terms"]);
    for (a, p) in texts.iter().zip(&pts) {
        let terms = a.contents.lines().count();
        t.push(vec![a.name.as_str().into(), p.n_sites.into(), p.m_tilde.into(), p.x.into(), terms.into()]);
    }
    Ok(Outcome { tables: vec![("model_dump".into(), t)], texts })
}

fn masses(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Vec<HadronMasses>> {
    Ok(scan_masses(&points(cfg)?, mode)?)
}

pub fn ed_scan(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Outcome> {
    let mut t = Table::new(&["N", "m_tilde", "x", "E_v", "E_b", "E_m", "M_b", "M_m", "r"]);
    for h in masses(cfg, mode)? {
        let p = h.params;
        t.push(vec![
            p.n_sites.into(),
            p.m_tilde.into(),
            p.x.into(),
            h.e_v.into(),
            h.e_b.into(),
            h.e_m.into(),
            h.m_b.into(),
            h.m_m.into(),
            h.r.into(),
        ]);
    }
    Ok(Outcome::table("ed_scan", t))
}

fn ratio_contour(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Outcome> {
    let mut t = Table::new(&["N", "m_tilde", "x", "M_b", "M_m", "r"]);
    for h in masses(cfg, mode)? {
        let p = h.params;
        t.push(vec![p.n_sites.into(), p.m_tilde.into(), p.x.into(), h.m_b.into(), h.m_m.into(), h.r.into()]);
    }
    Ok(Outcome::table("ratio_contour", t))
}

fn baryon_mass(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Outcome> {
    points(cfg)?;
    let runs = par::map(mode, &lines(cfg), |&(n, m)| run_baryon_mass(n, m, &cfg.x, &protocol(cfg, n)));
    let mut t = Table::new(&["N", "m_tilde", "x", "E_v", "E_b", "M_b", "evals_used"]);
    for rows in runs {
        for r in rows? {
            t.push(vec![
                r.n_sites.into(),
                r.m_tilde.into(),
                r.x.into(),
                r.e_v.into(),
                r.e_b.into(),
                r.m_b.into(),
                r.evals_used.into(),
            ]);
        }
    }
    Ok(Outcome::table("baryon_mass", t))
}

fn meson_mass(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Outcome> {
    points(cfg)?;
    let runs = par::map(mode, &lines(cfg), |&(n, m)| run_meson_mass(n, m, &cfg.x, cfg.method, &protocol(cfg, n)));
    let method = if cfg.method == ExcitedMethod::Penalty { "penalty" } else { "gram_schmidt" };
    let mut t = Table::new(&[
        "N",
        "m_tilde",
        "x",
        "method",
        "E_v",
        "E_m",
        "M_m",
        "overlap_check",
        "overlap_final",
        "evals_used",
        "flagged",
    ]);
    for rows in runs {
        for r in rows? {
            let s = r.steps.as_ref();
            t.push(vec![
                r.n_sites.into(),
                r.m_tilde.into(),
                r.x.into(),
                method.into(),
                r.e_v.into(),
                s.map(|s| s.e_m).into(),
                s.map(|s| s.m_m).into(),
                s.map(|s| s.overlap_check).into(),
                s.map(|s| s.overlap_final).into(),
                r.evals_used.into(),
                r.flagged().into(),
            ]);
        }
    }
    Ok(Outcome::table("meson_mass", t))
}

fn brickwork(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Outcome> {
    let pts = points(cfg)?;
    let layers = (cfg.layers_vacuum, cfg.layers_baryon);
    let runs = par::map(mode, &pts, |p| -> Result<_> {
        Ok((run_brickwork(p, layers, cfg.sweeps, cfg.seed_or_default(), ExecMode::Sequential)?, su2_hadron::exact::hadron_masses(p)?))
    });
    let mut t = Table::new(&[
        "N",
        "m_tilde",
        "x",
        "layers_vacuum",
        "layers_baryon",
        "E_v",
        "E_b",
        "M_b",
        "M_b_ed",
        "evaluations",
    ]);
    for run in runs {
        let (r, ed) = run?;
        let p = r.params;
        t.push(vec![
            p.n_sites.into(),
            p.m_tilde.into(),
            p.x.into(),
            layers.0.into(),
            layers.1.into(),
            r.e_v.into(),
            r.e_b.into(),
            r.m_b.into(),
            ed.m_b.into(),
            r.evaluations.into(),
        ]);
    }
    Ok(Outcome::table("n6_brickwork", t))
}

/// Vacuum angles from an exact VQE, then CNOT-folded energies and their
/// zero-noise extrapolation for every depolarizing level.
fn noise_study(cfg: &ExperimentConfig, mode: ExecMode) -> Result<Outcome> {
    let pts = points(cfg)?;
    let mut header: Vec<String> = ["N", "m_tilde", "x", "p", "E_v_ed", "E_v_ideal"].map(String::from).to_vec();
    header.extend(cfg.folds.iter().map(|f| format!("E_fold{f}")));
    header.push("E_zne".into());
    let mut t = Table::new(&header);
    let shots = (cfg.mode == Mode::Sampled).then_some(cfg.shots);
    for p in &pts {
        let ansatz = if p.n_sites == 2 { ansatz_n2_vacuum()? } else { ansatz_singlet_sector(p.n_sites, 0)? };
        let prob = SectorProblem::new(ansatz, Estimator::Exact, false)?;
        let h = prob.hamiltonian(p.m_tilde, p.x)?;
        let oc = optimizer_config(cfg);
        let best = optimize(prob.n_params(), |th: &[f64]| prob.energy(th, &h), &oc, mode)?;
        let ed = su2_hadron::exact::hadron_masses(p)?;
        let a = &prob.ansatz;
        for &dp in &cfg.depolarizing_p {
            let noise = noise_model(cfg, a.n_qubits(), dp);
            let z = zne_cnot_folding(&a.circuit, &best.best_theta, a.input, &h, &noise, &cfg.folds, shots, mode)?;
            let mut row: Vec<Cell> = vec![
                p.n_sites.into(),
                p.m_tilde.into(),
                p.x.into(),
                dp.into(),
                ed.e_v.into(),
                best.best_value.into(),
            ];
            row.extend(z.values.iter().map(|&v| Cell::from(v)));
            row.push(z.extrapolated.into());
            t.push(row);
        }
    }
    Ok(Outcome::table("noise_study", t))
}
