//! Wald standard errors and confidence intervals on the active set.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimation::mle::coordinate_name;
use crate::linalg::Cholesky;
use crate::model::likelihood::information_flat;
use crate::model::{DyadDesign, ParamVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult<T> {
    /// 0-based coordinates the entries below refer to.
    pub active_set: Vec<usize>,
    pub se: Vec<T>,
    pub ci_lower: Vec<T>,
    pub ci_upper: Vec<T>,
    pub level: T,
}

impl<T: Scalar> InferenceResult<T> {
    /// Standard errors spread over all `p` coordinates, zero off the active set.
    pub fn dense_se(&self, p: usize) -> Vec<T> {
        let mut out = vec![T::zero(); p];
        for (&k, &s) in self.active_set.iter().zip(&self.se) {
            out[k] = s;
        }
        out
    }
}

/// Two-sided normal critical value; exactly 1.96 at the 95% level.
pub fn critical_value(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("confidence level {level} not in (0, 1)")));
    }
    if (level - 0.95).abs() < 1e-12 {
        return Ok(1.96);
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + level / 2.0))
}

/// Standard errors from the inverse of the total observed information
/// restricted to `active_set`, and `theta +- z * SE` intervals.
pub fn standard_errors<T: Scalar>(
    design: &DyadDesign<T>,
    theta_hat: &ParamVector<T>,
    active_set: &[usize],
    level: T,
) -> Result<InferenceResult<T>> {
    if active_set.is_empty() {
        return Err(Error::InvalidInput("active set is empty".into()));
    }
    if theta_hat.len() != design.p() {
        return Err(Error::Dimension(format!(
            "theta has length {}, design needs {}",
            theta_hat.len(),
            design.p()
        )));
    }
    if let Some(&k) = active_set.iter().find(|&&k| k >= design.p()) {
        return Err(Error::InvalidInput(format!("active index {k} out of range")));
    }
    let z = T::lit(critical_value(level.as_f64())?);
    let info = information_flat(design, theta_hat.as_slice())?.principal(active_set);
    let chol = Cholesky::new(&info).map_err(|e| {
        let mut names = vec![coordinate_name(active_set[e.index])];
        names.extend(e.partners.iter().map(|&i| coordinate_name(active_set[i])));
        Error::Collinear(names)
    })?;
    let se: Vec<T> = chol.inverse().diagonal().into_iter().map(|v| v.sqrt()).collect();
    let est: Vec<T> = active_set.iter().map(|&k| theta_hat[k]).collect();
    Ok(InferenceResult {
        active_set: active_set.to_vec(),
        ci_lower: est.iter().zip(&se).map(|(&t, &s)| t - z * s).collect(),
        ci_upper: est.iter().zip(&se).map(|(&t, &s)| t + z * s).collect(),
        se,
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values() {
        assert_eq!(critical_value(0.95).unwrap(), 1.96);
        assert!((critical_value(0.90).unwrap() - 1.6448536).abs() < 1e-6);
        assert!(critical_value(1.0).is_err());
    }

    #[test]
    fn interval_from_unit_estimate() {
        let (t, s) = (1.0_f64, 0.5);
        let z = critical_value(0.95).unwrap();
        assert!(((t - z * s) - 0.02).abs() < 1e-12);
        assert!(((t + z * s) - 1.98).abs() < 1e-12);
    }
}
