//! JSON configuration for fits, samples and replication studies.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{critical_value, FitOptions, ModelKind, Solver};
use crate::io::tables::open;
use crate::model::{param_len, MagnitudeKind, SimilarityKind};
use crate::simulation::{FitKind, GeneratorSpec, GroupLaw};

/// Maps feature columns to one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub name: String,
    pub columns: Vec<String>,
    #[serde(default)]
    pub similarity: SimilarityKind,
    #[serde(default)]
    pub magnitude: MagnitudeKind,
}

impl GroupConfig {
    /// A one-column group named after its column.
    pub fn single(column: &str) -> Self {
        Self {
            name: column.to_string(),
            columns: vec![column.to_string()],
            similarity: SimilarityKind::default(),
            magnitude: MagnitudeKind::default(),
        }
    }
}

/// How the penalty level is chosen: `"auto"` (path + NBIC), `{"fixed": x}`,
/// or `"no-penalty"` (plain MLE).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaPolicy {
    #[default]
    Auto,
    Fixed(f64),
    NoPenalty,
}

fn default_gamma() -> f64 {
    1.0
}

fn default_level() -> f64 {
    0.95
}

fn default_true() -> bool {
    true
}

fn default_grid_points() -> usize {
    50
}

/// Settings shared by `fit`, `path` and `sample`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Column grouping; one group per column when absent.
    #[serde(default)]
    pub groups: Option<Vec<GroupConfig>>,
    #[serde(default)]
    pub lambda: LambdaPolicy,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default = "default_true")]
    pub exempt_structural: bool,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Recorded in reports; fitting itself is deterministic.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            groups: None,
            lambda: LambdaPolicy::Auto,
            gamma: default_gamma(),
            level: default_level(),
            exempt_structural: true,
            model: ModelKind::Full,
            solver: Solver::default(),
            grid_points: default_grid_points(),
            seed: None,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        critical_value(self.level)?;
        if let LambdaPolicy::Fixed(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Config(format!("fixed lambda must be >= 0, got {l}")));
            }
        }
        self.options(1)?;
        Ok(())
    }

    pub fn options(&self, m: usize) -> Result<FitOptions<f64>> {
        let options = FitOptions {
            gamma: self.gamma,
            exempt_structural: self.exempt_structural,
            grid_points: self.grid_points,
            solver: self.solver,
            ..FitOptions::default()
        }
        .with_model(self.model, m);
        options.validate()?;
        Ok(options)
    }
}

fn default_replications() -> usize {
    200
}

fn default_n_grid() -> Vec<usize> {
    vec![100]
}

/// A replication study over one or more network sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub fit_kind: FitKind,
    /// Feature laws; the four-group benchmark design when absent.
    #[serde(default)]
    pub groups: Option<Vec<GroupLaw>>,
    /// Benchmark coefficients when absent.
    #[serde(default)]
    pub theta_true: Option<Vec<f64>>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_true")]
    pub exempt_structural: bool,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl StudyConfig {
    /// Replications and sizes of the full published sweep.
    pub const PAPER_REPLICATIONS: usize = 1000;
    pub const PAPER_N_GRID: [usize; 4] = [50, 100, 200, 400];

    pub fn benchmark(seed: u64, replications: usize, n_grid: Vec<usize>) -> Self {
        Self {
            seed,
            replications,
            n_grid,
            fit_kind: FitKind::RmlePath,
            groups: None,
            theta_true: None,
            gamma: default_gamma(),
            exempt_structural: true,
            solver: Solver::default(),
            grid_points: default_grid_points(),
        }
    }

    pub fn paper_scale(mut self) -> Self {
        self.replications = Self::PAPER_REPLICATIONS;
        self.n_grid = Self::PAPER_N_GRID.to_vec();
        self
    }

    /// Generator for size `n`. Every size shares the master seed; the
    /// per-replication streams are derived from it.
    pub fn spec(&self, n: usize) -> Result<GeneratorSpec> {
        let mut spec = GeneratorSpec::benchmark(n, self.seed);
        if let Some(groups) = &self.groups {
            spec.groups = groups.clone();
        }
        if let Some(theta) = &self.theta_true {
            spec.theta_true = theta.clone();
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn options(&self) -> Result<FitOptions<f64>> {
        let options = FitOptions {
            gamma: self.gamma,
            exempt_structural: self.exempt_structural,
            grid_points: self.grid_points,
            solver: self.solver,
            ..FitOptions::default()
        };
        options.validate()?;
        Ok(options)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid is empty".into()));
        }
        for &n in &self.n_grid {
            let spec = self.spec(n)?;
            if spec.theta_true.len() != param_len(spec.groups.len()) {
                return Err(Error::Config("theta_true does not match the groups".into()));
            }
        }
        self.options()?;
        Ok(())
    }
}

/// `{"theta": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaFile {
    pub theta: Vec<f64>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(std::io::BufReader::new(open(path)?)).map_err(|e| {
        if e.is_io() {
            Error::io(path, e.into())
        } else {
            Error::Config(format!("{}: {e}", path.display()))
        }
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?).map_err(|e| Error::io(path, e))
}
