//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};

use su2_hadron::model::LatticeParams;
use su2_hadron::vqe::{ExcitedMethod, LocalSearch};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    BaryonMass,
    MesonMass,
    RatioContour,
    N6Brickwork,
    NoiseStudy,
    ModelDump,
    EdScan,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::BaryonMass,
        Experiment::MesonMass,
        Experiment::RatioContour,
        Experiment::N6Brickwork,
        Experiment::NoiseStudy,
        Experiment::ModelDump,
        Experiment::EdScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::BaryonMass => "baryon_mass",
            Experiment::MesonMass => "meson_mass",
            Experiment::RatioContour => "ratio_contour",
            Experiment::N6Brickwork => "n6_brickwork",
            Experiment::NoiseStudy => "noise_study",
            Experiment::ModelDump => "model_dump",
            Experiment::EdScan => "ed_scan",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| anyhow!("unknown experiment '{s}'"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_sites: Vec<usize>,
    pub m_tilde: Vec<f64>,
    pub x: Vec<f64>,
    pub mode: Mode,
    pub shots: usize,
    pub depolarizing_p: Vec<f64>,
    pub readout_error: f64,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub method: ExcitedMethod,
    pub budget: usize,
    pub local: LocalSearch,
    pub beta: Option<f64>,
    pub layers_vacuum: usize,
    pub layers_baryon: usize,
    pub sweeps: usize,
    pub folds: Vec<usize>,
}

const KEYS: [&str; 18] = [
    "experiment",
    "n",
    "m_tilde",
    "x",
    "mode",
    "shots",
    "depolarizing_p",
    "readout_error",
    "seed",
    "output",
    "method",
    "budget",
    "local",
    "beta",
    "layers_vacuum",
    "layers_baryon",
    "sweeps",
    "folds",
];

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected 'key = value'", i + 1))?;
        let k = k.trim().to_string();
        if map.insert(k.clone(), v.trim().to_string()).is_some() {
            bail!("line {}: duplicate key '{k}'", i + 1);
        }
    }
    Ok(map)
}

/// Parses a single `key=value` override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("override '{s}' is not key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let v = match parts.as_slice() {
        [a, b, n] => {
            let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
            let n: usize = n.trim().parse()?;
            match n {
                0 => vec![],
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        [_] => s
            .split(',')
            .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number '{t}'")))
            .collect::<Result<_>>()?,
        _ => bail!("bad range '{s}'"),
    };
    Ok(v)
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad integer '{t}'")))
        .collect()
}

fn fmt_list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub fn from_map(mut map: BTreeMap<String, String>) -> Result<Self> {
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            bail!("unknown key '{k}'");
        }
        let mut take = |k: &str| map.remove(k);
        let experiment = Experiment::parse(&take("experiment").ok_or_else(|| anyhow!("missing key 'experiment'"))?)?;
        let n_sites = parse_usize_list(&take("n").ok_or_else(|| anyhow!("missing key 'n'"))?)?;
        let m_tilde = take("m_tilde").map(|s| parse_f64_list(&s)).transpose()?.unwrap_or_else(|| vec![1.0]);
        let x = take("x").map(|s| parse_f64_list(&s)).transpose()?.unwrap_or_else(|| vec![1.0]);
        let mode = match take("mode").as_deref() {
            None | Some("exact") => Mode::Exact,
            Some("sampled") => Mode::Sampled,
            Some(o) => bail!("mode must be exact or sampled, got '{o}'"),
        };
        let shots = take("shots").map(|s| s.parse()).transpose()?.unwrap_or(8192);
        let depolarizing_p = take("depolarizing_p").map(|s| parse_f64_list(&s)).transpose()?.unwrap_or_else(|| vec![0.0]);
        let readout_error = take("readout_error").map(|s| s.parse()).transpose()?.unwrap_or(0.0);
        let seed = take("seed").map(|s| s.parse()).transpose().context("seed")?;
        let output = take("output").filter(|s| !s.is_empty()).map(PathBuf::from);
        let method = match take("method").as_deref() {
            None | Some("penalty") => ExcitedMethod::Penalty,
            Some("gram_schmidt") => ExcitedMethod::GramSchmidt,
            Some(o) => bail!("method must be penalty or gram_schmidt, got '{o}'"),
        };
        let budget = take("budget").map(|s| s.parse()).transpose()?.unwrap_or(6000);
        let local = match take("local").as_deref() {
            None | Some("coordinate") => LocalSearch::Coordinate,
            Some("pattern") => LocalSearch::Pattern,
            Some(o) => bail!("local must be coordinate or pattern, got '{o}'"),
        };
        let beta = take("beta").filter(|s| s != "auto").map(|s| s.parse()).transpose().context("beta")?;
        let layers_vacuum = take("layers_vacuum").map(|s| s.parse()).transpose()?.unwrap_or(10);
        let layers_baryon = take("layers_baryon").map(|s| s.parse()).transpose()?.unwrap_or(15);
        let sweeps = take("sweeps").map(|s| s.parse()).transpose()?.unwrap_or(20);
        let folds = take("folds").map(|s| parse_usize_list(&s)).transpose()?.unwrap_or_else(|| vec![1, 3, 5]);
        let cfg = ExperimentConfig {
            experiment,
            n_sites,
            m_tilde,
            x,
            mode,
            shots,
            depolarizing_p,
            readout_error,
            seed,
            output,
            method,
            budget,
            local,
            beta,
            layers_vacuum,
            layers_baryon,
            sweeps,
            folds,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_text(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut map = parse_text(text)?;
        for (k, v) in overrides {
            map.insert(k.clone(), v.clone());
        }
        Self::from_map(map)
    }

    fn validate(&self) -> Result<()> {
        if self.n_sites.is_empty() || self.m_tilde.is_empty() || self.x.is_empty() || self.depolarizing_p.is_empty() {
            bail!("parameter ranges must be nonempty");
        }
        for p in self.points() {
            p?;
        }
        if self.mode == Mode::Sampled {
            if self.seed.is_none() {
                bail!("sampled mode requires a seed");
            }
            if self.shots == 0 {
                bail!("shots must be positive");
            }
        }
        if self.mode == Mode::Sampled || self.experiment == Experiment::NoiseStudy {
            if let Some(p) = self.depolarizing_p.iter().find(|p| !(0.0..1.0).contains(*p)) {
                bail!("depolarizing_p = {p} outside [0, 1)");
            }
            if !(0.0..0.5).contains(&self.readout_error) {
                bail!("readout_error = {} outside [0, 0.5)", self.readout_error);
            }
        }
        if let Some(b) = self.beta {
            if !(b.is_finite() && b > 0.0) {
                bail!("beta = {b} must be positive");
            }
        }
        if self.budget == 0 {
            bail!("budget must be positive");
        }
        if self.experiment == Experiment::NoiseStudy && (self.folds.len() < 2 || self.folds.iter().any(|f| f % 2 == 0)) {
            bail!("folds must list at least two odd factors");
        }
        Ok(())
    }

    /// Every `(N, m, x)` in row order.
    pub fn points(&self) -> impl Iterator<Item = Result<LatticeParams>> + '_ {
        self.n_sites.iter().flat_map(move |&n| {
            self.m_tilde
                .iter()
                .flat_map(move |&m| self.x.iter().map(move |&x| LatticeParams::new(n, m, x).map_err(Into::into)))
        })
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Canonical text form, readable by [`ExperimentConfig::from_text`].
    pub fn to_text(&self) -> String {
        let f = |v: &[f64]| v.iter().map(|t| format!("{t:?}")).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        kv("experiment", self.experiment.name().into());
        kv("n", fmt_list(&self.n_sites));
        kv("m_tilde", f(&self.m_tilde));
        kv("x", f(&self.x));
        kv("mode", if self.mode == Mode::Exact { "exact" } else { "sampled" }.into());
        kv("shots", self.shots.to_string());
        kv("depolarizing_p", f(&self.depolarizing_p));
        kv("readout_error", format!("{:?}", self.readout_error));
        if let Some(seed) = self.seed {
            kv("seed", seed.to_string());
        }
        if let Some(o) = &self.output {
            kv("output", o.display().to_string());
        }
        kv("method", if self.method == ExcitedMethod::Penalty { "penalty" } else { "gram_schmidt" }.into());
        kv("budget", self.budget.to_string());
        kv("local", if self.local == LocalSearch::Coordinate { "coordinate" } else { "pattern" }.into());
        kv("beta", self.beta.map_or("auto".into(), |b| format!("{b:?}")));
        kv("layers_vacuum", self.layers_vacuum.to_string());
        kv("layers_baryon", self.layers_baryon.to_string());
        kv("sweeps", self.sweeps.to_string());
        kv("folds", fmt_list(&self.folds));
        s
    }
}
