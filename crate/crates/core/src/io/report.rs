//! Fit and study reports, and the pipelines that produce them.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    adaptive_weights, fit_mle, fit_path, fit_rmle, nbic, standard_errors, ModelKind, Solver,
};
use crate::io::config::{FitConfig, LambdaPolicy, StudyConfig};
use crate::io::tables::create;
use crate::model::{
    build_dyad_design, coefficient_label, dyads_from_adjacency, Adjacency, Block, FeatureTable,
    ParamVector,
};
use crate::simulation::{run_replications, MetricsReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftwareInfo {
    pub name: String,
    pub version: String,
}

impl SoftwareInfo {
    pub fn current() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub n: usize,
    /// Number of dyads, `n(n-1)/2`.
    pub n_dyads: usize,
    pub m: usize,
    pub p: usize,
    pub groups: Vec<String>,
    pub model: ModelKind,
    pub directed_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    /// 1-based.
    pub index: usize,
    pub label: String,
    pub block: Block,
    pub group: Option<String>,
    pub estimate: f64,
    pub active: bool,
    pub se: Option<f64>,
    pub ci_lower: Option<f64>,
    pub ci_upper: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    Mle,
    Rmle,
    RmlePath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm of the score (unpenalised fits).
    pub score_sup_norm: Option<f64>,
    /// Per-dyad KKT residual (penalised fits).
    pub kkt_violation: Option<f64>,
    pub solver: Option<Solver>,
    /// Path fits only: every grid point converged.
    pub path_converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub lambda: f64,
    pub df: usize,
    pub loglik: f64,
    pub nbic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub kkt_violation: f64,
    pub selected: bool,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub software: SoftwareInfo,
    pub seed: Option<u64>,
    pub method: FitMethod,
    pub model: ModelSummary,
    pub lambda: Option<f64>,
    /// `log N`, for path fits.
    pub reference_lambda: Option<f64>,
    pub gamma: f64,
    pub level: f64,
    pub exempt_structural: bool,
    /// Adaptive weights, for penalised fits.
    pub weights: Option<Vec<f64>>,
    pub coefficients: Vec<Coefficient>,
    /// 1-based.
    pub active_set: Vec<usize>,
    pub loglik: f64,
    pub nbic: f64,
    pub df: usize,
    pub diagnostics: Diagnostics,
    pub path: Option<Vec<PathRow>>,
}

impl FitReport {
    pub fn theta(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}

/// Fits the network described by `features` and `x` as `config` asks.
/// `with_path` keeps the whole regularisation path in the report.
pub fn run_fit(
    features: &FeatureTable<f64>,
    x: &Adjacency,
    config: &FitConfig,
    with_path: bool,
) -> Result<FitReport> {
    config.validate()?;
    let design = build_dyad_design(features)?;
    let y = dyads_from_adjacency(x)?;
    if y.len() != design.len() {
        return Err(Error::Dimension(format!(
            "network has {} nodes, features {}",
            x.n(),
            features.n()
        )));
    }
    let m = features.m();
    let p = design.p();
    let n_dyads = design.len();
    let options = config.options(m)?;
    if with_path && config.lambda != LambdaPolicy::Auto {
        return Err(Error::Config("a path fit needs lambda = \"auto\"".into()));
    }

    let mle = fit_mle(&y, &design, &options)?;
    if !mle.converged {
        return Err(Error::NotConverged(format!(
            "MLE score sup-norm {} after {} iterations",
            mle.score_sup_norm, mle.iterations
        )));
    }
    let free: Vec<usize> = match &options.free_mask {
        Some(mask) => (0..p).filter(|&k| mask[k]).collect(),
        None => (0..p).collect(),
    };

    struct Chosen {
        method: FitMethod,
        theta: ParamVector<f64>,
        active: Vec<usize>,
        lambda: Option<f64>,
        loglik: f64,
        df: usize,
        diagnostics: Diagnostics,
        weights: Option<Vec<f64>>,
        reference: Option<f64>,
        path: Option<Vec<PathRow>>,
    }

    let chosen = match config.lambda {
        LambdaPolicy::NoPenalty => Chosen {
            method: FitMethod::Mle,
            loglik: mle.loglik,
            df: free.len(),
            diagnostics: Diagnostics {
                converged: mle.converged,
                iterations: mle.iterations,
                score_sup_norm: Some(mle.score_sup_norm),
                kkt_violation: None,
                solver: None,
                path_converged: None,
            },
            theta: mle.theta_hat.clone(),
            active: free.clone(),
            lambda: None,
            weights: None,
            reference: None,
            path: None,
        },
        LambdaPolicy::Fixed(lambda) => {
            let weights = adaptive_weights(&mle.theta_hat, options.gamma, options.weight_cap);
            let fit = fit_rmle(&y, &design, lambda, &weights, &mle.theta_hat, &options)?;
            if !fit.converged {
                return Err(Error::NotConverged(format!(
                    "penalised fit at lambda = {lambda} after {} iterations",
                    fit.iterations
                )));
            }
            Chosen {
                method: FitMethod::Rmle,
                loglik: fit.loglik,
                df: fit.df,
                diagnostics: Diagnostics {
                    converged: fit.converged,
                    iterations: fit.iterations,
                    score_sup_norm: None,
                    kkt_violation: Some(fit.kkt_violation),
                    solver: Some(options.solver),
                    path_converged: None,
                },
                active: fit.active_set.clone(),
                theta: fit.theta_hat,
                lambda: Some(lambda),
                weights: Some(weights),
                reference: None,
                path: None,
            }
        }
        LambdaPolicy::Auto => {
            let path = fit_path(&y, &design, &options)?;
            let sel = path.selected();
            let rows = with_path.then(|| {
                path.records
                    .iter()
                    .enumerate()
                    .map(|(i, r)| PathRow {
                        lambda: r.lambda,
                        df: r.df,
                        loglik: r.loglik,
                        nbic: r.nbic,
                        converged: r.converged,
                        iterations: r.iterations,
                        kkt_violation: r.kkt_violation,
                        selected: i == path.selected_index,
                        theta: r.theta_hat.as_slice().to_vec(),
                    })
                    .collect()
            });
            Chosen {
                method: FitMethod::RmlePath,
                loglik: sel.loglik,
                df: sel.df,
                diagnostics: Diagnostics {
                    converged: sel.converged,
                    iterations: sel.iterations,
                    score_sup_norm: None,
                    kkt_violation: Some(sel.kkt_violation),
                    solver: Some(options.solver),
                    path_converged: Some(path.records.iter().all(|r| r.converged)),
                },
                theta: sel.theta_hat.clone(),
                active: sel.active_set.clone(),
                lambda: Some(sel.lambda),
                weights: Some(path.weights.clone()),
                reference: Some(path.reference_lambda),
                path: rows,
            }
        }
    };

    let inference = if chosen.active.is_empty() {
        None
    } else {
        Some(standard_errors(&design, &chosen.theta, &chosen.active, config.level)?)
    };
    let names: Vec<String> = features.groups().iter().map(|g| g.name.clone()).collect();
    let coefficients = (0..p)
        .map(|k| {
            let (block, group) = Block::of(k, m);
            let pos = inference
                .as_ref()
                .and_then(|inf| inf.active_set.iter().position(|&a| a == k));
            let pick = |v: fn(&crate::estimation::InferenceResult<f64>) -> &Vec<f64>| {
                pos.map(|i| v(inference.as_ref().expect("position implies inference"))[i])
            };
            Coefficient {
                index: k + 1,
                label: coefficient_label(k, &names),
                block,
                group: group.map(|g| names[g].clone()),
                estimate: chosen.theta[k],
                active: chosen.active.contains(&k),
                se: pick(|i| &i.se),
                ci_lower: pick(|i| &i.ci_lower),
                ci_upper: pick(|i| &i.ci_upper),
            }
        })
        .collect();

    Ok(FitReport {
        software: SoftwareInfo::current(),
        seed: config.seed,
        method: chosen.method,
        model: ModelSummary {
            n: features.n(),
            n_dyads,
            m,
            p,
            groups: names,
            model: config.model,
            directed_edges: x.edge_count(),
        },
        lambda: chosen.lambda,
        reference_lambda: chosen.reference,
        gamma: config.gamma,
        level: config.level,
        exempt_structural: config.exempt_structural,
        weights: chosen.weights,
        coefficients,
        active_set: chosen.active.iter().map(|k| k + 1).collect(),
        nbic: nbic(chosen.loglik, chosen.df, n_dyads),
        loglik: chosen.loglik,
        df: chosen.df,
        diagnostics: chosen.diagnostics,
        path: chosen.path,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// One row per coefficient; missing inference fields are left empty.
pub fn write_coefficients_csv<W: Write>(sink: W, report: &FitReport) -> Result<()> {
    let mut w = csv_writer(sink);
    w.write_record(["index", "label", "block", "group", "estimate", "active", "se", "ci_lower", "ci_upper"])?;
    for c in &report.coefficients {
        let block = serde_json::to_value(c.block)?;
        w.write_record([
            c.index.to_string(),
            c.label.clone(),
            block.as_str().unwrap_or_default().to_string(),
            c.group.clone().unwrap_or_default(),
            c.estimate.to_string(),
            c.active.to_string(),
            opt(c.se),
            opt(c.ci_lower),
            opt(c.ci_upper),
        ])?;
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub software: SoftwareInfo,
    pub config: StudyConfig,
    pub studies: Vec<MetricsReport>,
}

/// Runs the configured study for every size in `n_grid`, in order.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let options = config.options()?;
    let mut studies = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let spec = config.spec(n)?;
        let reps = run_replications(&spec, config.replications, config.fit_kind, &options)?;
        let names: Vec<String> = spec.groups.iter().map(|g| g.name.clone()).collect();
        let labels: Vec<String> = (0..spec.p()).map(|k| coefficient_label(k, &names)).collect();
        studies.push(MetricsReport::new(n, &reps, &spec.theta_true, &labels)?);
    }
    Ok(StudyReport {
        software: SoftwareInfo::current(),
        config: config.clone(),
        studies,
    })
}

/// Estimation metrics, one row per (n, coordinate).
pub fn write_table1_csv<W: Write>(sink: W, report: &StudyReport) -> Result<()> {
    let mut w = csv_writer(sink);
    w.write_record(["n", "index", "label", "truth", "bias", "sd", "rmse", "ase", "cp"])?;
    for s in &report.studies {
        for c in &s.coordinates {
            w.write_record([
                s.n.to_string(),
                c.index.to_string(),
                c.label.clone(),
                c.truth.to_string(),
                c.bias.to_string(),
                c.sd.to_string(),
                c.rmse.to_string(),
                c.ase.to_string(),
                c.cp.to_string(),
            ])?;
        }
    }
    finish(w)
}

/// Selection metrics with their standard deviations, one row per n.
pub fn write_table2_csv<W: Write>(sink: W, report: &StudyReport) -> Result<()> {
    let mut w = csv_writer(sink);
    w.write_record(["n", "cf", "cf_sd", "tpr", "tpr_sd", "fpr", "fpr_sd", "ms", "ms_sd"])?;
    for s in &report.studies {
        let Some(sel) = &s.selection else { continue };
        w.write_record([
            s.n.to_string(),
            sel.cf.to_string(),
            sel.cf_sd.to_string(),
            sel.tpr.to_string(),
            sel.tpr_sd.to_string(),
            sel.fpr.to_string(),
            sel.fpr_sd.to_string(),
            sel.ms.to_string(),
            sel.ms_sd.to_string(),
        ])?;
    }
    finish(w)
}

pub fn save_with<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(std::io::BufWriter<std::fs::File>) -> Result<()>,
{
    write(std::io::BufWriter::new(create(path)?))
}
