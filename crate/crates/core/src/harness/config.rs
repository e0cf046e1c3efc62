//! `key=value` experiment configuration.
//!
//! ```text
//! tree=t4.tree
//! horizon=10000
//! epsilon=0.5
//! seed=1
//! replications=20
//! env=iid                 # iid | fixed | piecewise
//! env_seed=7              # iid only, defaults to 0 and never to `seed`
//! env_weights=1:3=1,4=1   # iid only, optional (uniform otherwise)
//! env_file=envs.txt       # fixed only
//! env_segments=a.txt:3,b.txt:2   # piecewise only
//! out_dir=out
//! allow_large_epsilon=false
//! record_policy_every=0
//! ```
//!
//! Relative paths resolve against the config file's directory. Unknown keys
//! are errors.

use std::fs;
use std::path::{Path, PathBuf};

use super::envs::{EnvSpec, IidWeights};
use super::experiment::Experiment;
use crate::error::{Error, Result};
use crate::game_tree::{parse_environments, Game};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvKind {
    Iid,
    Fixed,
    Piecewise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub tree: Option<PathBuf>,
    pub horizon: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub replications: u32,
    pub env: EnvKind,
    pub env_seed: Option<u64>,
    pub env_weights: Option<String>,
    pub env_file: Option<PathBuf>,
    pub env_segments: Vec<(PathBuf, u64)>,
    pub out_dir: Option<PathBuf>,
    pub allow_large_epsilon: bool,
    pub record_policy_every: u64,
    base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            tree: None,
            horizon: 1000,
            epsilon: 0.5,
            seed: 0,
            replications: 1,
            env: EnvKind::Iid,
            env_seed: None,
            env_weights: None,
            env_file: None,
            env_segments: Vec::new(),
            out_dir: None,
            allow_large_epsilon: false,
            record_policy_every: 0,
            base_dir: PathBuf::from("."),
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value for {key}: `{value}`"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value))
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig {
            base_dir: base_dir.to_path_buf(),
            ..Default::default()
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Applies one key; used by the file parser and by command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "tree" => self.tree = Some(self.path(value)),
            "horizon" | "T" => self.horizon = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "replications" => self.replications = num(key, value)?,
            "env" => {
                self.env = match value {
                    "iid" => EnvKind::Iid,
                    "fixed" => EnvKind::Fixed,
                    "piecewise" => EnvKind::Piecewise,
                    _ => return Err(bad(key, value)),
                }
            }
            "env_seed" => self.env_seed = Some(num(key, value)?),
            "env_weights" => self.env_weights = Some(value.to_string()),
            "env_file" => self.env_file = Some(self.path(value)),
            "env_segments" => {
                self.env_segments = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|seg| {
                        let (p, len) = seg.rsplit_once(':').ok_or_else(|| bad(key, seg))?;
                        Ok((self.path(p), num(key, len)?))
                    })
                    .collect::<Result<_>>()?;
            }
            "out_dir" => self.out_dir = Some(self.path(value)),
            "allow_large_epsilon" => self.allow_large_epsilon = num(key, value)?,
            "record_policy_every" => self.record_policy_every = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn path(&self, value: &str) -> PathBuf {
        let p = PathBuf::from(value);
        if p.is_absolute() {
            p
        } else {
            self.base_dir.join(p)
        }
    }

    /// Reads the referenced files and produces a runnable experiment.
    pub fn resolve(&self) -> Result<Experiment> {
        if self.horizon < 2 {
            return Err(Error::HorizonTooShort(self.horizon));
        }
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        let tree_path = self
            .tree
            .as_ref()
            .ok_or_else(|| Error::Config("missing `tree`".into()))?;
        let game = Game::parse(&fs::read_to_string(tree_path)?)?;
        let read_envs = |p: &Path| -> Result<_> { parse_environments(&game.tree, &fs::read_to_string(p)?) };
        let env = match self.env {
            EnvKind::Iid => {
                let weights = match &self.env_weights {
                    Some(w) => IidWeights::parse(&game.tree, w)?,
                    None => IidWeights::uniform(&game.tree),
                };
                EnvSpec::Iid {
                    weights,
                    seed: self.env_seed.unwrap_or(0),
                }
            }
            EnvKind::Fixed => {
                let p = self
                    .env_file
                    .as_ref()
                    .ok_or_else(|| Error::Config("env=fixed needs env_file".into()))?;
                EnvSpec::Fixed(read_envs(p)?)
            }
            EnvKind::Piecewise => {
                if self.env_segments.is_empty() {
                    return Err(Error::Config("env=piecewise needs env_segments".into()));
                }
                EnvSpec::Piecewise(
                    self.env_segments
                        .iter()
                        .map(|(p, len)| Ok((read_envs(p)?, *len)))
                        .collect::<Result<_>>()?,
                )
            }
        };
        Ok(Experiment {
            game,
            horizon: self.horizon,
            epsilon: self.epsilon,
            env,
            seed: self.seed,
            replications: self.replications,
            allow_large_epsilon: self.allow_large_epsilon,
            record_policy_every: self.record_policy_every,
        })
    }
}
