//! Seeded replication studies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{fit_mle, fit_path, standard_errors, FitOptions};
use crate::model::build_dyad_design;
use crate::simulation::generator::{generate_features, sample_network, GeneratorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    Mle,
    #[default]
    RmlePath,
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `r`: `mix64(mix64(master) ^ r)`.
pub fn derive_seed(master: u64, r: u64) -> u64 {
    mix64(mix64(master) ^ r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationFailure {
    pub index: usize,
    pub seed: u64,
    pub message: String,
}

/// Outcome of one replication that fitted successfully.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub estimate: Vec<f64>,
    /// Zero off the active set.
    pub se: Vec<f64>,
    pub active_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSet {
    pub p: usize,
    pub fit_kind: FitKind,
    /// One row per successful replication.
    pub estimates: Vec<Vec<f64>>,
    pub ses: Vec<Vec<f64>>,
    /// 0-based.
    pub active_sets: Vec<Vec<usize>>,
    /// Seeds of the successful replications, same order as the rows.
    pub seeds: Vec<u64>,
    pub failures: Vec<ReplicationFailure>,
}

impl ReplicationSet {
    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn from_replications(p: usize, fit_kind: FitKind, reps: Vec<(u64, Replication)>) -> Self {
        let mut set = Self {
            p,
            fit_kind,
            estimates: Vec::with_capacity(reps.len()),
            ses: Vec::with_capacity(reps.len()),
            active_sets: Vec::with_capacity(reps.len()),
            seeds: Vec::with_capacity(reps.len()),
            failures: Vec::new(),
        };
        for (seed, r) in reps {
            set.estimates.push(r.estimate);
            set.ses.push(r.se);
            set.active_sets.push(r.active_set);
            set.seeds.push(seed);
        }
        set
    }
}

/// Simulates and fits a single replication from its own seed.
pub fn run_one(
    spec: &GeneratorSpec,
    seed: u64,
    fit_kind: FitKind,
    options: &FitOptions<f64>,
    level: f64,
) -> Result<Replication> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = generate_features(spec, &mut rng)?;
    let design = build_dyad_design(&features)?;
    let y = sample_network(&spec.theta()?, &design, &mut rng)?;
    let (theta, active_set) = match fit_kind {
        FitKind::Mle => {
            let fit = fit_mle(&y, &design, options)?;
            if !fit.converged {
                return Err(Error::NotConverged(format!(
                    "MLE score sup-norm {} after {} iterations",
                    fit.score_sup_norm, fit.iterations
                )));
            }
            let mask = options.free_mask.clone().unwrap_or_else(|| vec![true; spec.p()]);
            let active: Vec<usize> = (0..spec.p()).filter(|&k| mask[k]).collect();
            (fit.theta_hat, active)
        }
        FitKind::RmlePath => {
            let path = fit_path(&y, &design, options)?;
            let sel = path.selected();
            (sel.theta_hat.clone(), sel.active_set.clone())
        }
    };
    let se = if active_set.is_empty() {
        vec![0.0; spec.p()]
    } else {
        standard_errors(&design, &theta, &active_set, level)?.dense_se(spec.p())
    };
    Ok(Replication {
        estimate: theta.into_vec(),
        se,
        active_set,
    })
}

/// Runs `r` independent replications (in parallel on the current rayon
/// pool). Output depends only on `(spec, r, fit_kind, options)`.
pub fn run_replications(
    spec: &GeneratorSpec,
    r: usize,
    fit_kind: FitKind,
    options: &FitOptions<f64>,
) -> Result<ReplicationSet> {
    if r == 0 {
        return Err(Error::Config("need at least one replication".into()));
    }
    spec.validate()?;
    options.validate()?;
    let outcomes: Vec<(u64, Result<Replication>)> = (0..r)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(spec.seed, i as u64);
            (seed, run_one(spec, seed, fit_kind, options, 0.95))
        })
        .collect();

    let mut ok = Vec::with_capacity(r);
    let mut failures = Vec::new();
    for (index, (seed, outcome)) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(rep) => ok.push((seed, rep)),
            Err(e) => failures.push(ReplicationFailure {
                index,
                seed,
                message: e.to_string(),
            }),
        }
    }
    // more than 5% failed
    if failures.len() * 20 > r {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: r,
            first: failures[0].message.clone(),
        });
    }
    let mut set = ReplicationSet::from_replications(spec.p(), fit_kind, ok);
    set.failures = failures;
    Ok(set)
}
