//! Warm-started regularisation path with NBIC selection.

use crate::error::{Error, Result};
use crate::estimation::mle::{fit_mle, MleResult};
use crate::estimation::options::FitOptions;
use crate::estimation::rmle::{adaptive_weights, lambda_grid, path_origin, ProxSolver, RmleResult};
use crate::model::{DyadCategoryVector, DyadDesign};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult<T> {
    /// Descending.
    pub grid: Vec<T>,
    pub records: Vec<RmleResult<T>>,
    pub selected_index: usize,
    /// `log N`.
    pub reference_lambda: T,
    /// Pilot estimate the adaptive weights were built from.
    pub mle: MleResult<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> PathResult<T> {
    pub fn selected(&self) -> &RmleResult<T> {
        &self.records[self.selected_index]
    }

    /// Record fitted at `log N`; it is always on the grid.
    pub fn reference(&self) -> &RmleResult<T> {
        self.records
            .iter()
            .find(|r| r.lambda == self.reference_lambda)
            .expect("reference lambda is merged into the grid")
    }
}

/// Index of the smallest NBIC; ties go to the earlier (larger) lambda.
pub(crate) fn argmin_nbic<T: Scalar>(records: &[RmleResult<T>]) -> usize {
    let mut best = 0;
    for (i, r) in records.iter().enumerate().skip(1) {
        if r.nbic < records[best].nbic {
            best = i;
        }
    }
    best
}

pub fn fit_path<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    options: &FitOptions<T>,
) -> Result<PathResult<T>> {
    let mle = fit_mle(y, design, options)?;
    if !mle.converged {
        return Err(Error::NotConverged(format!(
            "pilot MLE stopped after {} iterations with score sup-norm {}",
            mle.iterations, mle.score_sup_norm
        )));
    }
    let weights = adaptive_weights(&mle.theta_hat, options.gamma, options.weight_cap);
    let grid = lambda_grid(y, design, &weights, options.grid_points, options)?;
    let mask = options.mask(design.p())?;
    let mut solver = ProxSolver::new(y, design, &mask, options);
    let mut init = path_origin(y, design, options)?;
    let mut records = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let rec = solver.solve(lambda, &weights, &init)?;
        init.copy_from_slice(rec.theta_hat.as_slice());
        records.push(rec);
    }
    let selected_index = argmin_nbic(&records);
    Ok(PathResult {
        reference_lambda: T::from_count(design.len()).ln(),
        grid,
        records,
        selected_index,
        mle,
        weights,
    })
}
