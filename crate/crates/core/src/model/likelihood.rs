//! Dyad probabilities, sufficient statistics, log-likelihood, score and
//! observed information.
//!
//! Every dyad-level quantity derives from the three category log-weights
//! relative to the empty dyad:
//!
//! ```text
//! forward  (1,0): density + <homophily, w> + <out, g1> + <in, g2>
//! backward (0,1): density + <homophily, w> + <out, g2> + <in, g1>
//! mutual   (1,1): reciprocity + forward + backward
//! ```
//!
//! which is `Z_c . theta` for the category design vectors
//! `Z_mutual = (1, 2, 2w, g1+g2, g1+g2)`, `Z_forward = (0, 1, w, g1, g2)`,
//! `Z_backward = (0, 1, w, g2, g1)` and `Z_null = 0`.
//!
//! All dyad sums accumulate sequentially in pair order, so results are
//! bit-reproducible.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::design::{DyadDesign, DyadRow};
use crate::model::params::{param_len, Category, DyadCategoryVector, ParamVector};
use crate::scalar::Scalar;

/// Vector of network statistics `s(x, V)`, same layout as [`ParamVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStats<T>(pub Vec<T>);

impl<T: Scalar> SufficientStats<T> {
    pub fn reciprocity(&self) -> T {
        self.0[0]
    }

    pub fn edges(&self) -> T {
        self.0[1]
    }

    /// `theta . s`.
    pub fn dot(&self, theta: &ParamVector<T>) -> T {
        self.0.iter().zip(theta.as_slice()).map(|(&s, &t)| s * t).sum()
    }
}

/// Log-weights `[mutual, forward, backward, null]` for a flat `theta`.
#[inline]
pub(crate) fn log_weights<T: Scalar>(row: DyadRow<'_, T>, theta: &[T]) -> [T; 4] {
    let m = row.m();
    let gamma = &theta[2..2 + m];
    let zeta = &theta[2 + m..2 + 2 * m];
    let eta = &theta[2 + 2 * m..2 + 3 * m];
    let mut hw = T::zero();
    let mut fwd = T::zero();
    let mut bwd = T::zero();
    for k in 0..m {
        hw = hw + gamma[k] * row.w[k];
        fwd = fwd + zeta[k] * row.g1[k] + eta[k] * row.g2[k];
        bwd = bwd + zeta[k] * row.g2[k] + eta[k] * row.g1[k];
    }
    let forward = theta[1] + hw + fwd;
    let backward = theta[1] + hw + bwd;
    [theta[0] + forward + backward, forward, backward, T::zero()]
}

/// Normalised probabilities and `log z` from log-weights.
#[inline]
fn normalise<T: Scalar>(lw: &[T; 4]) -> Result<([T; 4], T)> {
    if lw.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericDomain(
            "non-finite dyad log-weight (covariates or theta overflow)".into(),
        ));
    }
    let max = lw.iter().copied().fold(T::neg_infinity(), T::max);
    let e = lw.map(|x| (x - max).exp());
    let s = e[0] + e[1] + e[2] + e[3];
    Ok((e.map(|x| x / s), max + s.ln()))
}

fn check_row<T: Scalar>(row: &DyadRow<'_, T>, theta: &ParamVector<T>) -> Result<()> {
    if row.g1.len() != row.m() || row.g2.len() != row.m() || theta.m() != row.m() {
        return Err(Error::Dimension(format!(
            "dyad row has m = {} but theta has m = {}",
            row.m(),
            theta.m()
        )));
    }
    Ok(())
}

fn check_shapes<T: Scalar>(
    y: Option<&DyadCategoryVector>,
    design: &DyadDesign<T>,
    theta_len: usize,
) -> Result<()> {
    if let Some(y) = y {
        if y.len() != design.len() {
            return Err(Error::Dimension(format!(
                "{} dyad categories for {} design rows",
                y.len(),
                design.len()
            )));
        }
    }
    if theta_len != design.p() {
        return Err(Error::Dimension(format!(
            "theta has length {theta_len}, design needs {}",
            design.p()
        )));
    }
    Ok(())
}

/// `log T_c` (zero for the empty dyad).
pub fn category_log_weight<T: Scalar>(
    row: DyadRow<'_, T>,
    theta: &ParamVector<T>,
    c: Category,
) -> Result<T> {
    check_row(&row, theta)?;
    Ok(log_weights(row, theta.as_slice())[c.index()])
}

/// Design vector `Z_c` of category `c`.
pub fn category_design_vector<T: Scalar>(row: DyadRow<'_, T>, c: Category) -> Vec<T> {
    let m = row.m();
    let mut z = vec![T::zero(); param_len(m)];
    let (fwd, bwd) = c.edges();
    if fwd && bwd {
        z[0] = T::one();
    }
    for (on, first, second) in [(fwd, row.g1, row.g2), (bwd, row.g2, row.g1)] {
        if !on {
            continue;
        }
        z[1] = z[1] + T::one();
        for k in 0..m {
            z[2 + k] = z[2 + k] + row.w[k];
            z[2 + m + k] = z[2 + m + k] + first[k];
            z[2 + 2 * m + k] = z[2 + 2 * m + k] + second[k];
        }
    }
    z
}

/// Category probabilities `[mutual, forward, backward, null]`.
pub fn dyad_probabilities<T: Scalar>(row: DyadRow<'_, T>, theta: &ParamVector<T>) -> Result<[T; 4]> {
    check_row(&row, theta)?;
    normalise(&log_weights(row, theta.as_slice())).map(|(p, _)| p)
}

pub fn sufficient_statistics<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
) -> Result<SufficientStats<T>> {
    check_shapes(Some(y), design, design.p())?;
    let mut s = vec![T::zero(); design.p()];
    for (row, &c) in design.rows().zip(y.iter()) {
        for (acc, z) in s.iter_mut().zip(category_design_vector(row, c)) {
            *acc = *acc + z;
        }
    }
    Ok(SufficientStats(s))
}

/// Log-likelihood and, optionally, its gradient on a flat `theta`.
pub(crate) fn loglik_and_score<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    theta: &[T],
    mut grad: Option<&mut [T]>,
) -> Result<T> {
    let m = design.m();
    if let Some(g) = grad.as_deref_mut() {
        g.iter_mut().for_each(|x| *x = T::zero());
    }
    let mut ll = T::zero();
    for (row, &c) in design.rows().zip(y.iter()) {
        let lw = log_weights(row, theta);
        let (p, log_z) = normalise(&lw)?;
        ll = ll + lw[c.index()] - log_z;
        if let Some(g) = grad.as_deref_mut() {
            let (af, ab) = c.edges();
            let ind = |b: bool| if b { T::one() } else { T::zero() };
            let rf = ind(af) - (p[0] + p[1]);
            let rb = ind(ab) - (p[0] + p[2]);
            let dens = rf + rb;
            g[0] = g[0] + ind(af && ab) - p[0];
            g[1] = g[1] + dens;
            for k in 0..m {
                g[2 + k] = g[2 + k] + row.w[k] * dens;
                g[2 + m + k] = g[2 + m + k] + row.g1[k] * rf + row.g2[k] * rb;
                g[2 + 2 * m + k] = g[2 + 2 * m + k] + row.g2[k] * rf + row.g1[k] * rb;
            }
        }
    }
    Ok(ll)
}

pub fn log_likelihood<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    theta: &ParamVector<T>,
) -> Result<T> {
    check_shapes(Some(y), design, theta.len())?;
    loglik_and_score(y, design, theta.as_slice(), None)
}

/// Gradient of the log-likelihood: `sum_d (Z_y - E[Z])`.
pub fn score<T: Scalar>(
    y: &DyadCategoryVector,
    design: &DyadDesign<T>,
    theta: &ParamVector<T>,
) -> Result<Vec<T>> {
    check_shapes(Some(y), design, theta.len())?;
    let mut g = vec![T::zero(); theta.len()];
    loglik_and_score(y, design, theta.as_slice(), Some(&mut g))?;
    Ok(g)
}

pub(crate) fn information_flat<T: Scalar>(design: &DyadDesign<T>, theta: &[T]) -> Result<Matrix<T>> {
    // With af = x[j1][j2], ab = x[j2][j1]: Z = af*A + ab*B + af*ab*e_0, where
    // A = (0, 1, w, g1, g2) and B = (0, 1, w, g2, g1). Cov(Z) then expands
    // into the (co)variances of the three indicators.
    let p = design.p();
    let m = design.m();
    let mut info = Matrix::zeros(p, p);
    let mut a = vec![T::zero(); p];
    let mut b = vec![T::zero(); p];
    a[1] = T::one();
    b[1] = T::one();
    for row in design.rows() {
        let (prob, _) = normalise(&log_weights(row, theta))?;
        let qf = prob[0] + prob[1];
        let qb = prob[0] + prob[2];
        let var_f = qf * (T::one() - qf);
        let var_b = qb * (T::one() - qb);
        let cov_fb = prob[0] - qf * qb;
        let var_m = prob[0] * (T::one() - prob[0]);
        let cov_fm = prob[0] * (T::one() - qf);
        let cov_bm = prob[0] * (T::one() - qb);
        for k in 0..m {
            a[2 + k] = row.w[k];
            b[2 + k] = row.w[k];
            a[2 + m + k] = row.g1[k];
            b[2 + m + k] = row.g2[k];
            a[2 + 2 * m + k] = row.g2[k];
            b[2 + 2 * m + k] = row.g1[k];
        }
        info[(0, 0)] = info[(0, 0)] + var_m;
        for j in 1..p {
            info[(0, j)] = info[(0, j)] + cov_fm * a[j] + cov_bm * b[j];
        }
        for i in 1..p {
            let (ai, bi) = (a[i], b[i]);
            let ua = var_f * ai + cov_fb * bi;
            let ub = var_b * bi + cov_fb * ai;
            for j in i..p {
                info[(i, j)] = info[(i, j)] + ua * a[j] + ub * b[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            info[(i, j)] = info[(j, i)];
        }
    }
    Ok(info)
}

/// Reference implementation of the information: explicit category design
/// vectors, `sum_c p_c (Z_c - mean)(Z_c - mean)^T`.
#[cfg(test)]
pub(crate) fn information_by_categories(design: &DyadDesign<f64>, theta: &[f64]) -> Matrix<f64> {
    let p = design.p();
    let mut info = Matrix::zeros(p, p);
    for row in design.rows() {
        let (prob, _) = normalise(&log_weights(row, theta)).unwrap();
        let zs: Vec<Vec<f64>> = Category::ALL
            .iter()
            .map(|&c| category_design_vector(row, c))
            .collect();
        let mean: Vec<f64> = (0..p)
            .map(|i| (0..4).map(|c| prob[c] * zs[c][i]).sum())
            .collect();
        for i in 0..p {
            for j in 0..p {
                info[(i, j)] += (0..4)
                    .map(|c| prob[c] * (zs[c][i] - mean[i]) * (zs[c][j] - mean[j]))
                    .sum::<f64>();
            }
        }
    }
    info
}

/// Total observed information `sum_d Cov_theta(Z)`; the negative Hessian of
/// the log-likelihood. It does not depend on the observed categories.
pub fn observed_information<T: Scalar>(
    design: &DyadDesign<T>,
    theta: &ParamVector<T>,
) -> Result<Matrix<T>> {
    check_shapes(None, design, theta.len())?;
    information_flat(design, theta.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_row_design(w: f64, g1: f64, g2: f64) -> DyadDesign<f64> {
        DyadDesign::from_parts(2, 1, vec![(0, 1)], vec![w], vec![g1], vec![g2]).unwrap()
    }

    fn theta(v: &[f64]) -> ParamVector<f64> {
        ParamVector::from_vec(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_theta_gives_zero_log_weights_and_uniform_probabilities() {
        let d = single_row_design(0.7, -1.3, 2.1);
        let t = ParamVector::zeros(1);
        for c in Category::ALL {
            assert_eq!(category_log_weight(d.row(0), &t, c).unwrap(), 0.0);
        }
        assert_eq!(dyad_probabilities(d.row(0), &t).unwrap(), [0.25; 4]);
    }

    #[test]
    fn reciprocity_only() {
        let d = single_row_design(0.7, -1.3, 2.1);
        let t = theta(&[2f64.ln(), 0.0, 0.0, 0.0, 0.0]);
        let lw = category_log_weight(d.row(0), &t, Category::Mutual).unwrap();
        assert!((lw - 2f64.ln()).abs() < 1e-15);
        let p = dyad_probabilities(d.row(0), &t).unwrap();
        for (a, b) in p.iter().zip([0.4, 0.2, 0.2, 0.2]) {
            assert!((a - b).abs() < 1e-15);
        }
        let y = DyadCategoryVector(vec![Category::Mutual]);
        assert!((log_likelihood(&y, &d, &t).unwrap() - 0.4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn density_only_factorises() {
        let d = single_row_design(0.7, -1.3, 2.1);
        let t = theta(&[0.0, 3f64.ln(), 0.0, 0.0, 0.0]);
        let p = dyad_probabilities(d.row(0), &t).unwrap();
        for (a, b) in p.iter().zip([9.0 / 16.0, 3.0 / 16.0, 3.0 / 16.0, 1.0 / 16.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn mutual_weight_is_sum_of_single_edges_plus_reciprocity() {
        let d = single_row_design(0.3, 0.8, -0.4);
        let t = theta(&[0.9, -1.1, 2.0, 0.5, -0.7]);
        let lw = |c| category_log_weight(d.row(0), &t, c).unwrap();
        let lhs = lw(Category::Mutual);
        let rhs = lw(Category::Forward) + lw(Category::Backward) + t.reciprocity();
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn overflow_is_a_domain_error() {
        let d = single_row_design(1.0, 1e308, 1e308);
        let t = theta(&[0.0, 0.0, 0.0, 10.0, 10.0]);
        assert!(matches!(
            dyad_probabilities(d.row(0), &t),
            Err(Error::NumericDomain(_))
        ));
    }

    #[test]
    fn zero_theta_score_is_observed_minus_uniform_mean() {
        let d = DyadDesign::from_parts(
            3,
            1,
            vec![(0, 1), (0, 2), (1, 2)],
            vec![0.2, 0.9, 0.5],
            vec![1.0, 1.0, -0.5],
            vec![-0.5, 2.0, 2.0],
        )
        .unwrap();
        let y = DyadCategoryVector(vec![Category::Mutual, Category::Backward, Category::Null]);
        let g = score(&y, &d, &ParamVector::zeros(1)).unwrap();
        let mut expect = vec![0.0; 5];
        for (i, row) in d.rows().enumerate() {
            let zy = category_design_vector(row, y.0[i]);
            let zs: Vec<Vec<f64>> = [Category::Mutual, Category::Forward, Category::Backward]
                .iter()
                .map(|&c| category_design_vector(row, c))
                .collect();
            for k in 0..5 {
                expect[k] += zy[k] - (zs[0][k] + zs[1][k] + zs[2][k]) / 4.0;
            }
        }
        for (a, b) in g.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn structured_information_matches_category_expansion() {
        let d = DyadDesign::from_parts(
            4,
            2,
            vec![(0, 1), (0, 2), (1, 3)],
            vec![0.2, 0.9, 0.5, 0.1, 1.0, 0.3],
            vec![1.0, 1.0, -0.5, 0.0, 2.0, 0.7],
            vec![-0.5, 2.0, 2.0, 1.0, -1.0, 0.4],
        )
        .unwrap();
        let t = [1.5, -0.7, 0.4, -0.2, 0.3, 0.9, -1.1, 0.05];
        let a = information_flat(&d, &t).unwrap();
        let b = information_by_categories(&d, &t);
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).abs() < 1e-13, "{x} vs {y}");
        }
    }

    #[test]
    fn shape_errors() {
        let d = single_row_design(0.3, 0.8, -0.4);
        let y = DyadCategoryVector(vec![Category::Mutual, Category::Null]);
        assert!(log_likelihood(&y, &d, &ParamVector::zeros(1)).is_err());
        let y = DyadCategoryVector(vec![Category::Mutual]);
        assert!(log_likelihood(&y, &d, &ParamVector::zeros(2)).is_err());
        assert!(sufficient_statistics(&DyadCategoryVector(vec![]), &d).is_err());
    }
}
