//! Estimation and selection summaries over replications.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::study::{FitKind, ReplicationSet};

/// Fixed 95% normal critical value used for coverage.
pub const COVERAGE_Z: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateMetrics {
    /// 1-based coefficient index.
    pub index: usize,
    pub label: String,
    pub truth: f64,
    pub bias: f64,
    /// Population standard deviation (divisor R).
    pub sd: f64,
    pub rmse: f64,
    pub ase: f64,
    pub cp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionMetrics {
    pub cf: f64,
    pub cf_sd: f64,
    pub tpr: f64,
    pub tpr_sd: f64,
    pub fpr: f64,
    pub fpr_sd: f64,
    pub ms: f64,
    pub ms_sd: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn pop_sd(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    (xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// BIAS, SD, RMSE, ASE and CP for every coordinate.
pub fn estimation_metrics(
    reps: &ReplicationSet,
    theta_true: &[f64],
    labels: &[String],
) -> Result<Vec<CoordinateMetrics>> {
    if reps.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 replications, got {}",
            reps.len()
        )));
    }
    if theta_true.len() != reps.p || labels.len() != reps.p {
        return Err(Error::Dimension("theta_true / labels do not match p".into()));
    }
    Ok((0..reps.p)
        .map(|k| {
            let est: Vec<f64> = reps.estimates.iter().map(|row| row[k]).collect();
            let se: Vec<f64> = reps.ses.iter().map(|row| row[k]).collect();
            let truth = theta_true[k];
            let bias = mean(&est) - truth;
            let sd = pop_sd(&est);
            let covered = est
                .iter()
                .zip(&se)
                .filter(|(&t, &s)| t - COVERAGE_Z * s <= truth && truth <= t + COVERAGE_Z * s)
                .count();
            CoordinateMetrics {
                index: k + 1,
                label: labels[k].clone(),
                truth,
                bias,
                sd,
                rmse: (bias * bias + sd * sd).sqrt(),
                ase: mean(&se),
                cp: covered as f64 / est.len() as f64,
            }
        })
        .collect())
}

/// CF, TPR, FPR and MS against the 0-based `true_active` set.
pub fn selection_metrics(reps: &ReplicationSet, true_active: &[usize]) -> Result<SelectionMetrics> {
    let p = reps.p;
    if reps.is_empty() {
        return Err(Error::InvalidInput("no replications".into()));
    }
    if true_active.is_empty() || true_active.len() >= p || true_active.iter().any(|&k| k >= p) {
        return Err(Error::InvalidInput(
            "true active set must be a nonempty proper subset of the coefficients".into(),
        ));
    }
    let mut truth = vec![false; p];
    for &k in true_active {
        truth[k] = true;
    }
    let n_active = true_active.len() as f64;
    let n_inactive = (p - true_active.len()) as f64;
    let (mut cf, mut tpr, mut fpr, mut ms) = (vec![], vec![], vec![], vec![]);
    for set in &reps.active_sets {
        let tp = set.iter().filter(|&&k| truth[k]).count() as f64;
        let fp = set.len() as f64 - tp;
        let exact = tp == n_active && fp == 0.0;
        cf.push(if exact { 1.0 } else { 0.0 });
        tpr.push(tp / n_active);
        fpr.push(fp / n_inactive);
        ms.push(set.len() as f64);
    }
    Ok(SelectionMetrics {
        cf: mean(&cf),
        cf_sd: pop_sd(&cf),
        tpr: mean(&tpr),
        tpr_sd: pop_sd(&tpr),
        fpr: mean(&fpr),
        fpr_sd: pop_sd(&fpr),
        ms: mean(&ms),
        ms_sd: pop_sd(&ms),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub fit_kind: FitKind,
    pub replications: usize,
    pub failed: usize,
    pub failures: Vec<crate::simulation::study::ReplicationFailure>,
    /// 1-based.
    pub true_active: Vec<usize>,
    pub coordinates: Vec<CoordinateMetrics>,
    pub selection: Option<SelectionMetrics>,
}

impl MetricsReport {
    pub fn new(
        n: usize,
        reps: &ReplicationSet,
        theta_true: &[f64],
        labels: &[String],
    ) -> Result<Self> {
        let true_active: Vec<usize> = (0..reps.p).filter(|&k| theta_true[k] != 0.0).collect();
        let selection = match reps.fit_kind {
            FitKind::RmlePath if !true_active.is_empty() && true_active.len() < reps.p => {
                Some(selection_metrics(reps, &true_active)?)
            }
            _ => None,
        };
        Ok(Self {
            n,
            fit_kind: reps.fit_kind,
            replications: reps.len() + reps.failures.len(),
            failed: reps.failures.len(),
            failures: reps.failures.clone(),
            true_active: true_active.iter().map(|k| k + 1).collect(),
            coordinates: estimation_metrics(reps, theta_true, labels)?,
            selection,
        })
    }

    pub fn coordinate(&self, one_based: usize) -> &CoordinateMetrics {
        &self.coordinates[one_based - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reps(estimates: Vec<Vec<f64>>, active_sets: Vec<Vec<usize>>) -> ReplicationSet {
        let p = estimates[0].len();
        ReplicationSet {
            p,
            fit_kind: FitKind::RmlePath,
            ses: estimates.iter().map(|r| vec![0.1; r.len()]).collect(),
            seeds: vec![0; estimates.len()],
            estimates,
            active_sets,
            failures: vec![],
        }
    }

    #[test]
    fn two_estimates_example() {
        let r = reps(vec![vec![1.0], vec![1.2]], vec![vec![0], vec![0]]);
        let m = estimation_metrics(&r, &[1.0], &["x".into()]).unwrap();
        assert!((m[0].bias - 0.1).abs() < 1e-12);
        assert!((m[0].sd - 0.1).abs() < 1e-12);
        assert!((m[0].rmse - 0.141421).abs() < 1e-6);
        assert!((m[0].ase - 0.1).abs() < 1e-15);
        assert_eq!(m[0].cp, 0.5);
    }

    #[test]
    fn perfect_estimates() {
        let r = reps(vec![vec![2.0]; 3], vec![vec![0]; 3]);
        let m = estimation_metrics(&r, &[2.0], &["x".into()]).unwrap();
        assert_eq!((m[0].bias, m[0].sd, m[0].rmse), (0.0, 0.0, 0.0));
    }

    #[test]
    fn selection_example() {
        let r = reps(vec![vec![0.0; 4]; 2], vec![vec![0, 1], vec![0, 1, 2]]);
        let s = selection_metrics(&r, &[0, 1]).unwrap();
        assert_eq!((s.cf, s.tpr, s.fpr, s.ms), (0.5, 1.0, 0.25, 2.5));
        let r = reps(vec![vec![0.0; 4]; 2], vec![vec![0, 1]; 2]);
        let s = selection_metrics(&r, &[0, 1]).unwrap();
        assert_eq!((s.cf, s.tpr, s.fpr, s.ms), (1.0, 1.0, 0.0, 2.0));
        assert!(selection_metrics(&r, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn needs_two_replications() {
        let r = reps(vec![vec![1.0]], vec![vec![0]]);
        assert!(estimation_metrics(&r, &[1.0], &["x".into()]).is_err());
    }
}
