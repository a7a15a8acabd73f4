//! Unpenalised maximum likelihood by damped Newton.

use crate::error::{Error, Result};
use crate::estimation::options::FitOptions;
use crate::linalg::Cholesky;
use crate::model::likelihood::{information_flat, loglik_and_score};
use crate::model::{DyadCategoryVector, DyadDesign, ParamVector};
use crate::scalar::{sup_norm, Scalar};

const MAX_HALVINGS: usize = 30;
const DIVERGENCE_BOUND: f64 = 1e3;
/// Newton decrement `g' H^-1 g` below which the full step is taken unchecked.
const FULL_STEP_DECREMENT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct MleResult<T> {
    pub theta_hat: ParamVector<T>,
    pub loglik: T,
    pub iterations: usize,
    pub score_sup_norm: T,
    pub converged: bool,
}

pub(crate) fn coordinate_name(k: usize) -> String {
    format!("theta[{}]", k + 1)
}

pub fn fit_mle<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    options: &FitOptions<T>,
) -> Result<MleResult<T>> {
    let p = design.p();
    let mask = options.mask(p)?;
    if design.is_empty() {
        return Err(Error::InvalidInput("no dyads to fit".into()));
    }
    if y.len() != design.len() {
        return Err(Error::Dimension(format!(
            "{} dyad categories for {} design rows",
            y.len(),
            design.len()
        )));
    }
    let free: Vec<usize> = (0..p).filter(|&k| mask[k]).collect();
    newton(y, design, vec![T::zero(); p], &free, options)
}

/// Newton ascent over the `free` coordinates starting from `theta`.
pub(crate) fn newton<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    mut theta: Vec<T>,
    free: &[usize],
    options: &FitOptions<T>,
) -> Result<MleResult<T>> {
    let p = theta.len();
    let mut grad = vec![T::zero(); p];
    let mut ll = loglik_and_score(y, design, &theta, Some(&mut grad))?;
    let free_sup = |g: &[T]| free.iter().fold(T::zero(), |a, &k| a.max(g[k].abs()));
    let mut sup = free_sup(&grad);
    let mut iterations = 0;
    // Near the optimum the achievable increase is below round-off.
    let slack = |v: T| T::epsilon() * T::lit(64.0) * (T::one() + v.abs());

    while sup > options.newton_tol && iterations < options.newton_max_iter {
        iterations += 1;
        let info = information_flat(design, &theta)?.principal(free);
        let chol = Cholesky::new(&info).map_err(|e| {
            let mut names = vec![coordinate_name(free[e.index])];
            names.extend(e.partners.iter().map(|&i| coordinate_name(free[i])));
            Error::Collinear(names)
        })?;
        let rhs: Vec<T> = free.iter().map(|&k| grad[k]).collect();
        let direction = chol.solve(&rhs);

        // Below this decrement the predicted gain is under the round-off of
        // the summed log-likelihood, so value comparisons cannot guide the step.
        let decrement: T = rhs.iter().zip(&direction).map(|(&g, &d)| g * d).sum();
        let unchecked = decrement < T::lit(FULL_STEP_DECREMENT);
        let mut t = T::one();
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut cand = theta.clone();
            for (&k, &d) in free.iter().zip(&direction) {
                cand[k] = theta[k] + t * d;
            }
            if let Ok(v) = loglik_and_score(y, design, &cand, None) {
                if unchecked || v >= ll - slack(ll) {
                    accepted = Some(cand);
                    break;
                }
            }
            t = t / T::lit(2.0);
        }
        let Some(next) = accepted else { break };
        theta = next;
        if sup_norm(&theta) > T::lit(DIVERGENCE_BOUND) {
            return Err(Error::Degenerate(format!(
                "Newton iterate exceeded |theta| = {DIVERGENCE_BOUND} after {iterations} iterations"
            )));
        }
        ll = loglik_and_score(y, design, &theta, Some(&mut grad))?;
        sup = free_sup(&grad);
    }

    Ok(MleResult {
        theta_hat: ParamVector::from_vec(theta)?,
        loglik: ll,
        iterations,
        score_sup_norm: sup,
        converged: sup <= options.newton_tol,
    })
}
