//! Adaptive-LASSO penalised likelihood: weights, proximal map, solver and
//! the regularisation grid.

use crate::error::{Error, Result};
use crate::estimation::mle::newton;
use crate::estimation::options::{FitOptions, Solver};
use crate::model::likelihood::{information_flat, loglik_and_score};
use crate::linalg::Matrix;
use crate::model::{DyadCategoryVector, DyadDesign, ParamVector};
use crate::scalar::{sup_norm, Scalar};

/// `w_k = min(1 / |pilot_k|^gamma, cap)`.
pub fn adaptive_weights<T: Scalar>(pilot: &ParamVector<T>, gamma: T, cap: T) -> Vec<T> {
    pilot
        .as_slice()
        .iter()
        .map(|&t| {
            let a = t.abs();
            if a == T::zero() {
                cap
            } else {
                (T::one() / a.powf(gamma)).min(cap)
            }
        })
        .collect()
}

/// `sign(z) * max(|z| - t, 0)`.
#[inline]
pub fn soft_threshold<T: Scalar>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmleResult<T> {
    pub theta_hat: ParamVector<T>,
    pub lambda: T,
    pub weights: Vec<T>,
    /// 0-based indices of the nonzero coefficients.
    pub active_set: Vec<usize>,
    pub loglik: T,
    pub nbic: T,
    pub df: usize,
    /// Largest KKT residual, per dyad.
    pub kkt_violation: T,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

/// `-loglik / sqrt(N) + log(N) * df`.
pub fn nbic<T: Scalar>(loglik: T, df: usize, n_dyads: usize) -> T {
    let n = T::from_count(n_dyads);
    -loglik / n.sqrt() + n.ln() * T::from_count(df)
}

fn check_inputs<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    weights: &[T],
) -> Result<()> {
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
    if weights.len() != design.p() {
        return Err(Error::Dimension(format!(
            "{} weights for p = {}",
            weights.len(),
            design.p()
        )));
    }
    if weights.iter().any(|&w| !(w > T::zero()) || !w.is_finite()) {
        return Err(Error::InvalidInput("adaptive weights must be positive".into()));
    }
    Ok(())
}

/// Per-coordinate penalty level `lambda * w_k`, zero where unpenalised.
fn penalty_levels<T: Scalar>(lambda: T, weights: &[T], penalised: &[bool]) -> Vec<T> {
    weights
        .iter()
        .zip(penalised)
        .map(|(&w, &on)| if on { lambda * w } else { T::zero() })
        .collect()
}

fn penalty<T: Scalar>(theta: &[T], levels: &[T]) -> T {
    theta.iter().zip(levels).map(|(&t, &l)| l * t.abs()).sum()
}

/// KKT residual of `-L(theta) + sum_k levels_k |theta_k|` over free
/// coordinates, divided by the number of dyads.
pub(crate) fn kkt_residual<T: Scalar>(
    theta: &[T],
    score: &[T],
    levels: &[T],
    mask: &[bool],
    n_dyads: usize,
) -> T {
    let mut worst = T::zero();
    for k in 0..theta.len() {
        if !mask[k] {
            continue;
        }
        let g = -score[k];
        let r = if theta[k] != T::zero() {
            (g + levels[k] * theta[k].signum()).abs()
        } else {
            (g.abs() - levels[k]).max(T::zero())
        };
        worst = worst.max(r);
    }
    worst / T::from_count(n_dyads)
}

/// Penalised fit at a single `lambda`, warm-started from `init`.
pub fn fit_rmle<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    lambda: T,
    weights: &[T],
    init: &ParamVector<T>,
    options: &FitOptions<T>,
) -> Result<RmleResult<T>> {
    check_inputs(y, design, weights)?;
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("lambda must be >= 0, got {lambda}")));
    }
    if init.len() != design.p() {
        return Err(Error::Dimension(format!(
            "init has length {}, expected {}",
            init.len(),
            design.p()
        )));
    }
    let mask = options.mask(design.p())?;
    let mut solver = ProxSolver::new(y, design, &mask, options);
    solver.solve(lambda, weights, init.as_slice())
}

/// Penalised solver shared by single fits and the path. For the accelerated
/// gradient method it holds the step size so warm starts can reuse it.
pub(crate) struct ProxSolver<'a, T> {
    y: &'a DyadCategoryVector,
    design: &'a DyadDesign<T>,
    mask: &'a [bool],
    penalised: Vec<bool>,
    options: &'a FitOptions<T>,
    step: Option<T>,
}

impl<'a, T: Scalar> ProxSolver<'a, T> {
    pub(crate) fn new(
        y: &'a DyadCategoryVector,
        design: &'a DyadDesign<T>,
        mask: &'a [bool],
        options: &'a FitOptions<T>,
    ) -> Self {
        Self {
            y,
            design,
            mask,
            penalised: options.penalised(mask),
            options,
            step: None,
        }
    }

    fn neg_loglik(&self, theta: &[T], grad: Option<&mut [T]>) -> Result<T> {
        Ok(-loglik_and_score(self.y, self.design, theta, grad)?)
    }

    /// Starting step: inverse trace of the information restricted to the
    /// free coordinates, an upper bound on its largest eigenvalue.
    fn initial_step(&self, theta: &[T]) -> Result<T> {
        let info = information_flat(self.design, theta)?;
        let trace: T = (0..theta.len())
            .filter(|&k| self.mask[k])
            .map(|k| info[(k, k)])
            .sum();
        Ok(if trace > T::zero() {
            T::one() / trace
        } else {
            T::one()
        })
    }

    fn prox(&self, point: &[T], grad: &[T], step: T, levels: &[T], out: &mut [T]) {
        for k in 0..point.len() {
            out[k] = if self.mask[k] {
                soft_threshold(point[k] - step * grad[k], step * levels[k])
            } else {
                T::zero()
            };
        }
    }

    pub(crate) fn solve(&mut self, lambda: T, weights: &[T], init: &[T]) -> Result<RmleResult<T>> {
        let levels = penalty_levels(lambda, weights, &self.penalised);
        let x: Vec<T> = init
            .iter()
            .zip(self.mask)
            .map(|(&v, &free)| if free { v } else { T::zero() })
            .collect();
        let (x, fx, iterations, restarts, converged) = match self.options.solver {
            Solver::ProximalNewton => self.newton_iterations(x, &levels)?,
            Solver::AcceleratedGradient => self.gradient_iterations(x, &levels)?,
        };

        let n_dyads = self.design.len();
        let mut score_x = vec![T::zero(); x.len()];
        let loglik = loglik_and_score(self.y, self.design, &x, Some(&mut score_x))?;
        debug_assert!(loglik == -fx);
        let kkt = kkt_residual(&x, &score_x, &levels, self.mask, n_dyads);
        let theta_hat = ParamVector::from_vec(x)?;
        let active_set = theta_hat.support();
        let df = active_set.len();
        Ok(RmleResult {
            nbic: nbic(loglik, df, n_dyads),
            theta_hat,
            lambda,
            weights: weights.to_vec(),
            active_set,
            loglik,
            df,
            kkt_violation: kkt,
            iterations,
            restarts,
            converged,
        })
    }

    /// Minimises `sum_k g_k d_k + d'Hd/2 + sum_k levels_k |x_k + d_k|` by
    /// cyclic coordinate descent and returns `x + d`.
    fn quadratic_model_minimiser(&self, x: &[T], grad: &[T], hess: &Matrix<T>, levels: &[T], tol: T) -> Vec<T> {
        let p = x.len();
        let floor = T::epsilon() * (T::one() + hess.diagonal().into_iter().fold(T::zero(), T::max));
        let mut z = x.to_vec();
        let mut hd = vec![T::zero(); p];
        for _ in 0..1000 {
            let mut largest = T::zero();
            for k in (0..p).filter(|&k| self.mask[k]) {
                let h = hess[(k, k)].max(floor);
                let r = grad[k] + hd[k];
                let new = soft_threshold(z[k] - r / h, levels[k] / h);
                let change = new - z[k];
                if change != T::zero() {
                    for (i, v) in hd.iter_mut().enumerate() {
                        *v = *v + hess[(i, k)] * change;
                    }
                    z[k] = new;
                    largest = largest.max(change.abs());
                }
            }
            if largest <= tol {
                break;
            }
        }
        z
    }

    /// Proximal Newton: each outer step minimises the penalised local
    /// quadratic model exactly, then backtracks along the resulting direction
    /// until the Armijo condition holds for the penalised objective.
    fn newton_iterations(&self, mut x: Vec<T>, levels: &[T]) -> Result<(Vec<T>, T, usize, usize, bool)> {
        let p = x.len();
        let tol = self.options.prox_tol;
        let sigma = T::lit(1e-4);
        let mut grad = vec![T::zero(); p];
        let mut fx = self.neg_loglik(&x, Some(&mut grad))?;
        grad.iter_mut().for_each(|g| *g = -*g);
        let mut obj = fx + penalty(&x, levels);
        let mut converged = false;
        let mut iterations = 0;
        let mut cand = vec![T::zero(); p];

        while iterations < self.options.prox_max_iter {
            iterations += 1;
            let scale = T::one() + sup_norm(&x);
            let hess = information_flat(self.design, &x)?;
            let z = self.quadratic_model_minimiser(&x, &grad, &hess, levels, tol * scale * T::lit(1e-3));
            let dir: Vec<T> = z.iter().zip(&x).map(|(&a, &b)| a - b).collect();
            let size = sup_norm(&dir);
            let decrease: T = grad.iter().zip(&dir).map(|(&g, &d)| g * d).sum::<T>()
                + penalty(&z, levels)
                - penalty(&x, levels);

            // A model decrease this small is below the round-off of the
            // objective; the full step is taken without comparing values.
            let unchecked = -decrease < T::lit(1e-4);
            let mut t = T::one();
            let mut accepted = None;
            for _ in 0..40 {
                for k in 0..p {
                    cand[k] = x[k] + t * dir[k];
                }
                match self.neg_loglik(&cand, None) {
                    Ok(f) => {
                        let o = f + penalty(&cand, levels);
                        let slack = T::epsilon() * T::lit(64.0) * (T::one() + obj.abs());
                        if unchecked || o <= obj + sigma * t * decrease.min(T::zero()) + slack {
                            accepted = Some((f, o));
                            break;
                        }
                    }
                    Err(Error::NumericDomain(_)) => {}
                    Err(e) => return Err(e),
                }
                t = t / T::lit(2.0);
            }
            let Some((f, o)) = accepted else {
                converged = size < tol * scale;
                break;
            };
            std::mem::swap(&mut x, &mut cand);
            fx = f;
            obj = o;
            if t * size < tol * scale {
                converged = true;
                break;
            }
            fx = self.neg_loglik(&x, Some(&mut grad))?;
            grad.iter_mut().for_each(|g| *g = -*g);
        }
        Ok((x, fx, iterations, 0, converged))
    }

    fn gradient_iterations(&mut self, mut x: Vec<T>, levels: &[T]) -> Result<(Vec<T>, T, usize, usize, bool)> {
        let p = x.len();
        let tol = self.options.prox_tol;
        let levels = levels.to_vec();
        let mut fx = self.neg_loglik(&x, None)?;
        let mut obj = fx + penalty(&x, &levels);
        let mut step = match self.step {
            Some(s) => s,
            None => self.initial_step(&x)?,
        };

        let mut yk = x.clone();
        let mut momentum = T::one();
        let mut grad = vec![T::zero(); p];
        let mut cand = vec![T::zero(); p];
        let mut converged = false;
        let mut iterations = 0;
        let mut restarts = 0;
        let mut plain_step = true;

        while iterations < self.options.prox_max_iter {
            iterations += 1;
            let fy = self.neg_loglik(&yk, Some(&mut grad))?;
            grad.iter_mut().for_each(|g| *g = -*g);

            // Backtrack until the quadratic upper bound holds at the candidate.
            let f_cand = loop {
                self.prox(&yk, &grad, step, &levels, &mut cand);
                let mut lin = T::zero();
                let mut sq = T::zero();
                for k in 0..p {
                    let d = cand[k] - yk[k];
                    lin = lin + grad[k] * d;
                    sq = sq + d * d;
                }
                let bound = fy + lin + sq / (T::lit(2.0) * step);
                match self.neg_loglik(&cand, None) {
                    Ok(f) if f <= bound + T::epsilon() * T::lit(16.0) * (T::one() + fy.abs()) => {
                        break f
                    }
                    Ok(_) | Err(Error::NumericDomain(_)) => {}
                    Err(e) => return Err(e),
                }
                step = step / T::lit(2.0);
                if step < T::min_positive_value().sqrt() {
                    return Err(Error::NotConverged(
                        "proximal step size underflowed during backtracking".into(),
                    ));
                }
            };

            let obj_cand = f_cand + penalty(&cand, &levels);
            let delta = cand
                .iter()
                .zip(&x)
                .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
            let scale = T::one() + sup_norm(&x);

            if obj_cand > obj {
                if plain_step {
                    // A plain proximal step from x cannot increase the
                    // objective except through round-off: we are at the floor.
                    converged = delta < tol * scale;
                    break;
                }
                yk.copy_from_slice(&x);
                momentum = T::one();
                restarts += 1;
                plain_step = true;
                continue;
            }

            let next = (T::one() + (T::one() + T::lit(4.0) * momentum * momentum).sqrt()) / T::lit(2.0);
            let beta = (momentum - T::one()) / next;
            for k in 0..p {
                yk[k] = cand[k] + beta * (cand[k] - x[k]);
            }
            plain_step = beta == T::zero();
            momentum = next;
            std::mem::swap(&mut x, &mut cand);
            fx = f_cand;
            obj = obj_cand;

            if delta < tol * scale {
                converged = true;
                break;
            }
        }
        self.step = Some(step);
        Ok((x, fx, iterations, restarts, converged))
    }
}

/// Unpenalised base point of the path: zero, except that exempt structural
/// coordinates sit at their restricted MLE.
pub(crate) fn path_origin<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    options: &FitOptions<T>,
) -> Result<Vec<T>> {
    let p = design.p();
    let mask = options.mask(p)?;
    let penalised = options.penalised(&mask);
    let unpenalised: Vec<usize> = (0..p).filter(|&k| mask[k] && !penalised[k]).collect();
    if unpenalised.is_empty() {
        return Ok(vec![T::zero(); p]);
    }
    let fit = newton(y, design, vec![T::zero(); p], &unpenalised, options)?;
    if !fit.converged {
        return Err(Error::NotConverged(
            "restricted fit of the unpenalised coordinates".into(),
        ));
    }
    Ok(fit.theta_hat.into_vec())
}

/// Descending, log-spaced grid from `lambda_max` down to `1e-4 * lambda_max`
/// with `log N` merged in.
pub fn lambda_grid<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    weights: &[T],
    n_points: usize,
    options: &FitOptions<T>,
) -> Result<Vec<T>> {
    check_inputs(y, design, weights)?;
    if n_points < 2 {
        return Err(Error::Config("lambda grid needs at least 2 points".into()));
    }
    let mask = options.mask(design.p())?;
    let penalised = options.penalised(&mask);
    let origin = path_origin(y, design, options)?;
    let mut score = vec![T::zero(); design.p()];
    loglik_and_score(y, design, &origin, Some(&mut score))?;
    let lambda_max = (0..design.p())
        .filter(|&k| penalised[k])
        .map(|k| score[k].abs() / weights[k])
        .fold(T::zero(), T::max);
    if !(lambda_max > T::zero()) || !lambda_max.is_finite() {
        return Err(Error::Degenerate(
            "score at the origin is zero on every penalised coordinate".into(),
        ));
    }
    // Slack so that round-off in lambda * w_k cannot undercut |score_k|.
    let lambda_max = lambda_max * (T::one() + T::lit(1e-10));
    let last = T::from_count(n_points - 1);
    let mut grid: Vec<T> = (0..n_points)
        .map(|i| lambda_max * T::lit(10.0).powf(T::lit(-4.0) * T::from_count(i) / last))
        .collect();
    grid.push(T::from_count(design.len()).ln());
    grid.sort_by(|a, b| b.partial_cmp(a).expect("finite grid"));
    grid.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-12) * b.abs());
    Ok(grid)
}
