//! Plain-text `key = value` configuration. Every key has a default; files
//! may omit any subset. `#` starts a comment. The resolved config is emitted
//! as a comment header on every CSV output and can be fed back verbatim.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hidnet::dataset::SyntheticSpec;
use hidnet::diffusion::{DiffusionConfig, Mode};
use hidnet::perturb::AttackKind;
use hidnet::train::TrainConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    // dataset: "synthetic" or a directory in the standard text format
    pub dataset: String,
    pub n: usize,
    pub classes: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub feature_dim: usize,
    pub signal: f64,
    pub data_seed: u64,
    // diffusion
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dt: f64,
    pub steps: usize,
    pub mode: String,
    pub eta: f64,
    // training
    pub hidden: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub dropout: f64,
    pub epochs: usize,
    pub patience: usize,
    // experiment
    pub repeats: usize,
    pub seed: u64,
    pub output: String,
    pub attack: String,
    pub rate: f64,
    pub k_list: Vec<usize>,
    pub rates: Vec<f64>,
    // walk verification
    pub walk_root: usize,
    pub walk_steps: usize,
    pub trials: usize,
    // bench
    pub n_list: Vec<usize>,
    pub degree: f64,
    pub bench_dim: usize,
    pub bench_steps: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            dataset: "synthetic".into(),
            n: 400,
            classes: 3,
            p_in: 0.10,
            p_out: 0.01,
            feature_dim: 16,
            signal: 1.25,
            data_seed: 0,
            alpha: 0.1,
            beta: 0.9,
            gamma: 0.3,
            dt: 1.0,
            steps: 10,
            mode: "hid".into(),
            eta: 0.1,
            hidden: 32,
            lr: 0.01,
            weight_decay: 0.0,
            dropout: 0.3,
            epochs: 300,
            patience: 50,
            repeats: 5,
            seed: 0,
            output: "out.csv".into(),
            attack: "edge_add".into(),
            rate: 0.1,
            k_list: vec![2, 4, 8, 16, 20],
            rates: vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40],
            walk_root: 0,
            walk_steps: 5,
            trials: 100_000,
            n_list: vec![1000, 2000, 4000, 8000],
            degree: 4.0,
            bench_dim: 8,
            bench_steps: 10,
        }
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_str_body(&text)
    }

    pub fn from_str_body(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`", lineno + 1);
            };
            cfg.set(key.trim(), value.trim())
                .with_context(|| format!("config line {}", lineno + 1))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| anyhow::anyhow!("bad value `{value}` for {key}"))
        }
        fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
            value
                .split(',')
                .map(|t| t.trim())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse()
                        .map_err(|_| anyhow::anyhow!("bad list entry `{t}` for {key}"))
                })
                .collect()
        }
        match key {
            "dataset" => self.dataset = value.into(),
            "n" => self.n = num(key, value)?,
            "classes" => self.classes = num(key, value)?,
            "p_in" => self.p_in = num(key, value)?,
            "p_out" => self.p_out = num(key, value)?,
            "feature_dim" => self.feature_dim = num(key, value)?,
            "signal" => self.signal = num(key, value)?,
            "data_seed" => self.data_seed = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "dt" => self.dt = num(key, value)?,
            "steps" => self.steps = num(key, value)?,
            "mode" => self.mode = value.into(),
            "eta" => self.eta = num(key, value)?,
            "hidden" => self.hidden = num(key, value)?,
            "lr" => self.lr = num(key, value)?,
            "weight_decay" => self.weight_decay = num(key, value)?,
            "dropout" => self.dropout = num(key, value)?,
            "epochs" => self.epochs = num(key, value)?,
            "patience" => self.patience = num(key, value)?,
            "repeats" => self.repeats = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "output" => self.output = value.into(),
            "attack" => self.attack = value.into(),
            "rate" => self.rate = num(key, value)?,
            "k_list" => self.k_list = list(key, value)?,
            "rates" => self.rates = list(key, value)?,
            "walk_root" => self.walk_root = num(key, value)?,
            "walk_steps" => self.walk_steps = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "n_list" => self.n_list = list(key, value)?,
            "degree" => self.degree = num(key, value)?,
            "bench_dim" => self.bench_dim = num(key, value)?,
            "bench_steps" => self.bench_steps = num(key, value)?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    /// The full resolved config as `# key = value` lines; parsing these lines
    /// back reproduces this config exactly.
    pub fn to_header(&self) -> String {
        fn join<T: std::fmt::Display>(items: &[T]) -> String {
            items
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
        let mut s = String::new();
        let pairs: Vec<(&str, String)> = vec![
            ("dataset", self.dataset.clone()),
            ("n", self.n.to_string()),
            ("classes", self.classes.to_string()),
            ("p_in", self.p_in.to_string()),
            ("p_out", self.p_out.to_string()),
            ("feature_dim", self.feature_dim.to_string()),
            ("signal", self.signal.to_string()),
            ("data_seed", self.data_seed.to_string()),
            ("alpha", self.alpha.to_string()),
            ("beta", self.beta.to_string()),
            ("gamma", self.gamma.to_string()),
            ("dt", self.dt.to_string()),
            ("steps", self.steps.to_string()),
            ("mode", self.mode.clone()),
            ("eta", self.eta.to_string()),
            ("hidden", self.hidden.to_string()),
            ("lr", self.lr.to_string()),
            ("weight_decay", self.weight_decay.to_string()),
            ("dropout", self.dropout.to_string()),
            ("epochs", self.epochs.to_string()),
            ("patience", self.patience.to_string()),
            ("repeats", self.repeats.to_string()),
            ("seed", self.seed.to_string()),
            ("output", self.output.clone()),
            ("attack", self.attack.clone()),
            ("rate", self.rate.to_string()),
            ("k_list", join(&self.k_list)),
            ("rates", join(&self.rates)),
            ("walk_root", self.walk_root.to_string()),
            ("walk_steps", self.walk_steps.to_string()),
            ("trials", self.trials.to_string()),
            ("n_list", join(&self.n_list)),
            ("degree", self.degree.to_string()),
            ("bench_dim", self.bench_dim.to_string()),
            ("bench_steps", self.bench_steps.to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s
    }

    pub fn diffusion(&self) -> Result<DiffusionConfig> {
        let mode = match self.mode.as_str() {
            "hid" => Mode::Hid,
            "sgc" => Mode::Sgc,
            "appnp" => Mode::Appnp { eta: self.eta },
            other => bail!("unsupported mode `{other}` (expected hid, sgc, appnp)"),
        };
        Ok(DiffusionConfig {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            dt: self.dt,
            steps: self.steps,
            mode,
        })
    }

    pub fn training(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.lr,
            weight_decay: self.weight_decay,
            epochs: self.epochs,
            patience: self.patience,
            hidden_dim: self.hidden,
            dropout: self.dropout,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }

    pub fn synthetic_spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            n: self.n,
            classes: self.classes,
            p_in: self.p_in,
            p_out: self.p_out,
            feature_dim: self.feature_dim,
            signal: self.signal,
            seed: self.data_seed,
        }
    }

    pub fn attack_kind(&self) -> Result<AttackKind> {
        Ok(AttackKind::parse(&self.attack)?)
    }

    /// Seeds for repeated runs: seed, seed+1, ...
    pub fn repeat_seeds(&self) -> Vec<u64> {
        (0..self.repeats.max(1)).map(|i| self.seed + i as u64).collect()
    }
}
