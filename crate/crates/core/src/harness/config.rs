//! Experiment configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::Representation;
use crate::entropy::{Entropy, EntropySpec};
use crate::error::{Error, Result};
use crate::games::{normalize_payoffs, FiniteGame, GameSpec};
use crate::learning::{DelayModel, NoiseModel, RecordMode, RevisionProcess, StepSchedule};
use crate::profile::MixedProfile;

/// A game given inline or as a path to a game file, relative to the config.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameSource {
    File(PathBuf),
    Inline(GameSpec),
}

impl GameSource {
    pub fn load(&self, base: &Path) -> Result<FiniteGame> {
        match self {
            GameSource::Inline(spec) => spec.build(),
            GameSource::File(p) => {
                let path = base.join(p);
                let text = fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("game file {}: {e}", path.display())))?;
                let spec: GameSpec = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("game file {}: {e}", path.display())))?;
                spec.build()
                    .map_err(|e| Error::Config(format!("game file {}: {e}", path.display())))
            }
        }
    }
}

/// A config file parsed both as raw JSON (for hashing) and as `T`.
pub struct Loaded<T> {
    pub raw: Value,
    pub config: T,
    /// Directory that relative paths resolve against.
    pub base: PathBuf,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<Loaded<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(e.to_string()))?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    let config = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    Ok(Loaded {
        raw,
        config,
        base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    })
}

pub fn entropy_or_gibbs(spec: &Option<EntropySpec>) -> Result<Entropy> {
    match spec {
        Some(s) => s.build(),
        None => Ok(Entropy::gibbs()),
    }
}

fn default_dt() -> f64 {
    crate::dynamics::DEFAULT_DT
}

fn default_space() -> Representation {
    Representation::Strategy
}

fn default_record_every() -> usize {
    10
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub game: GameSource,
    #[serde(default)]
    pub entropy: Option<EntropySpec>,
    #[serde(rename = "T")]
    pub temperature: f64,
    /// Initial profile; uniform when absent.
    #[serde(default)]
    pub x0: Option<MixedProfile>,
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_space")]
    pub space: Representation,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub rates: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Score,
    #[default]
    Strategy,
    Async,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    #[default]
    Uniform,
    Dirichlet,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitSpec {
    Named(InitKind),
    Profile(MixedProfile),
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::Named(InitKind::Uniform)
    }
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn one() -> usize {
    1
}

fn default_check_tolerance() -> f64 {
    1e-2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnConfig {
    pub game: GameSource,
    #[serde(default)]
    pub entropy: Option<EntropySpec>,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(default)]
    pub algorithm: Algorithm,
    pub schedule: StepSchedule,
    pub iters: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Replicates per seed.
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub revision: RevisionProcess,
    #[serde(default)]
    pub delay: DelayModel,
    #[serde(default)]
    pub initial: InitSpec,
    #[serde(default)]
    pub record: RecordMode,
    /// Rescale each player's payoffs onto `[0, 1]` first.
    #[serde(default)]
    pub normalize: bool,
    /// Largest final distance to a QRE accepted by `--check`.
    #[serde(default = "default_check_tolerance")]
    pub check_tolerance: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub rho_max: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QreConfig {
    pub game: GameSource,
    #[serde(default)]
    pub entropy: Option<EntropySpec>,
    /// Rationality level; give this or `T`.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default, rename = "T")]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub init: Option<MixedProfile>,
    #[serde(default)]
    pub path: Option<PathSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl QreConfig {
    pub fn rationality(&self) -> Result<f64> {
        match (self.rho, self.temperature) {
            (Some(r), None) => Ok(r),
            (None, Some(t)) if t > 0.0 => Ok(1.0 / t),
            (None, Some(t)) => Err(Error::Config(format!("`T` must be positive, got {t}"))),
            _ => Err(Error::Config("give exactly one of `rho` or `T`".into())),
        }
    }
}

/// Temperatures as a list or an evenly spaced range.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TemperatureGrid {
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
}

impl TemperatureGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            TemperatureGrid::List(v) if !v.is_empty() => Ok(v.clone()),
            TemperatureGrid::List(_) => Err(Error::Config("temperature list is empty".into())),
            TemperatureGrid::Range { min, max, count } => {
                if *count < 2 || !(min < max) {
                    return Err(Error::Config(
                        "temperature range needs min < max and count >= 2".into(),
                    ));
                }
                Ok((0..*count)
                    .map(|i| min + (max - min) * i as f64 / (*count - 1) as f64)
                    .collect())
            }
        }
    }
}

fn default_portrait_grid() -> usize {
    5
}

fn default_portrait_t_end() -> f64 {
    20.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitConfig {
    pub game: GameSource,
    #[serde(default)]
    pub entropy: Option<EntropySpec>,
    pub temperatures: TemperatureGrid,
    /// Initial conditions per axis.
    #[serde(default = "default_portrait_grid")]
    pub grid: usize,
    #[serde(default = "default_portrait_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcateConfig {
    pub game: GameSource,
    #[serde(default)]
    pub entropy: Option<EntropySpec>,
    pub temperatures: TemperatureGrid,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_fig2_temperature() -> f64 {
    0.2
}

fn default_fig2_schedule() -> StepSchedule {
    StepSchedule::ShiftedPower {
        c: 1.0,
        a: 5.0,
        b: 0.6,
    }
}

fn default_fig2_replicates() -> usize {
    1000
}

fn default_checkpoints() -> Vec<usize> {
    vec![0, 2, 5, 10, 20, 50]
}

fn default_density_grid() -> usize {
    crate::learning::DENSITY_GRID
}

fn default_epsilon() -> f64 {
    0.01
}

fn default_resamples() -> usize {
    1000
}

fn dirichlet() -> InitSpec {
    InitSpec::Named(InitKind::Dirichlet)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Config {
    pub game: GameSource,
    #[serde(default)]
    pub entropy: Option<EntropySpec>,
    #[serde(rename = "T", default = "default_fig2_temperature")]
    pub temperature: f64,
    #[serde(default = "default_fig2_schedule")]
    pub schedule: StepSchedule,
    #[serde(default = "default_fig2_replicates")]
    pub replicates: usize,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<usize>,
    #[serde(default = "default_density_grid")]
    pub grid: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "dirichlet")]
    pub initial: InitSpec,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// The game, optionally rescaled onto `[0, 1]`.
pub fn prepared_game(source: &GameSource, base: &Path, normalize: bool) -> Result<FiniteGame> {
    let g = source.load(base)?;
    Ok(if normalize {
        normalize_payoffs(&g).0
    } else {
        g
    })
}
