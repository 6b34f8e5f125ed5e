mod config;
mod experiments;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use su2_hadron::exact::{eigensolve_sector, SectorSpec};
use su2_hadron::model::{build_hamiltonian, pauli_term_count, LatticeParams};
use su2_hadron::pauli::io::to_text;
use su2_hadron::ExecMode;

use config::{parse_override, ExperimentConfig};
use output::write_artifacts;

#[derive(Parser)]
#[command(name = "su2h", version, about = "SU(2) lattice gauge theory hadron masses on qubits")]
struct Cli {
    /// Run every grid point on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hamiltonian text and term counts.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Exact diagonalization.
    #[command(subcommand)]
    Ed(EdCmd),
    /// Variational runs.
    #[command(subcommand)]
    Vqe(VqeCmd),
    #[command(subcommand)]
    Scan(ScanCmd),
    #[command(subcommand)]
    Noise(NoiseCmd),
    /// Run an experiment from a `key = value` config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. `--set x=0.5,1`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Print the Hamiltonian in canonical text form.
    Dump {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        mtilde: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x: f64,
    },
    /// Print the distinct-string count next to `6N^2 - 11N + 9`.
    Count {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorKind {
    Singlet,
    Qz,
    Full,
}

#[derive(Subcommand)]
enum EdCmd {
    /// Lowest energies of one sector as JSON.
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        mtilde: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        baryon: i32,
        #[arg(long, value_enum, default_value_t = SectorKind::Singlet)]
        sector: SectorKind,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Hadron masses over a parameter grid.
    Scan(GridArgs),
}

#[derive(Subcommand)]
enum VqeCmd {
    Baryon(GridArgs),
    Meson(GridArgs),
    /// Excitation-preserving brickwork in both sectors.
    Brickwork(GridArgs),
}

#[derive(Subcommand)]
enum ScanCmd {
    /// Mass ratio over an `(x, m)` grid.
    Ratio(GridArgs),
}

#[derive(Subcommand)]
enum NoiseCmd {
    /// Folded-CNOT energies and zero-noise extrapolation.
    Study(GridArgs),
}

/// Grid and run options shared by the experiment subcommands. Lists are
/// `a,b,c` or `start:stop:count`.
#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    n: String,
    #[arg(long, allow_hyphen_values = true)]
    mtilde: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// `exact` or `sampled`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    shots: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Directory for CSV, JSON and manifest; CSV goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any other config key, e.g. `--set method=gram_schmidt`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl GridArgs {
    fn config(&self, experiment: &str) -> Result<ExperimentConfig> {
        let mut map = BTreeMap::new();
        map.insert("experiment".to_string(), experiment.to_string());
        map.insert("n".to_string(), self.n.clone());
        let opt = [("m_tilde", &self.mtilde), ("x", &self.x), ("mode", &self.mode), ("shots", &self.shots), ("seed", &self.seed)];
        for (k, v) in opt {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        if let Some(o) = &self.out {
            map.insert("output".to_string(), o.display().to_string());
        }
        for s in &self.overrides {
            let (k, v) = parse_override(s)?;
            map.insert(k, v);
        }
        ExperimentConfig::from_map(map)
    }
}

fn run_config(cfg: &ExperimentConfig, mode: ExecMode) -> Result<()> {
    let outcome = experiments::run(cfg, mode)?;
    match &cfg.output {
        Some(dir) => write_artifacts(dir, &outcome.artifacts(cfg))?,
        None => {
            for (_, t) in &outcome.tables {
                print!("{}", t.to_csv());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mode = if cli.sequential { ExecMode::Sequential } else { ExecMode::best() };
    match dispatch(cli.cmd, mode) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Cmd, mode: ExecMode) -> Result<()> {
    match cmd {
        Cmd::Model(ModelCmd::Dump { n, mtilde, x }) => {
            print!("{}", to_text(&build_hamiltonian(&LatticeParams::new(n, mtilde, x)?)?));
        }
        Cmd::Model(ModelCmd::Count { n }) => {
            let c = pauli_term_count(n)?;
            println!("actual,formula");
            println!("{},{}", c.merged, c.formula);
        }
        Cmd::Ed(EdCmd::Spectrum { n, mtilde, x, baryon, sector, k }) => {
            let p = LatticeParams::new(n, mtilde, x)?;
            let spec = match sector {
                SectorKind::Singlet => SectorSpec::singlet(baryon),
                SectorKind::Qz => SectorSpec::new(baryon),
                SectorKind::Full => SectorSpec::full(baryon),
            };
            let r = eigensolve_sector(&p, &spec, k)?;
            let out = json!({ "energies": r.energies, "sector_dim": r.dim });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Cmd::Ed(EdCmd::Scan(g)) => run_config(&g.config("ed_scan")?, mode)?,
        Cmd::Vqe(VqeCmd::Baryon(g)) => run_config(&g.config("baryon_mass")?, mode)?,
        Cmd::Vqe(VqeCmd::Meson(g)) => run_config(&g.config("meson_mass")?, mode)?,
        Cmd::Vqe(VqeCmd::Brickwork(g)) => run_config(&g.config("n6_brickwork")?, mode)?,
        Cmd::Scan(ScanCmd::Ratio(g)) => run_config(&g.config("ratio_contour")?, mode)?,
        Cmd::Noise(NoiseCmd::Study(g)) => run_config(&g.config("noise_study")?, mode)?,
        Cmd::Run { config, overrides } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let overrides = overrides.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>>>()?;
            run_config(&ExperimentConfig::from_text(&text, &overrides)?, mode)?;
        }
    }
    Ok(())
}
