use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::param_len;
use crate::scalar::Scalar;

/// Nested special cases of the full model, expressed as which coefficients
/// are free (the rest are held at zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// Independent edges with a common probability: density only.
    ErdosRenyi,
    /// Density plus nodal homophily.
    Homophily,
    /// Density plus out- and in-edge nodal effects.
    NodalEffects,
    #[default]
    Full,
}

impl ModelKind {
    pub fn free_mask(self, m: usize) -> Vec<bool> {
        let p = param_len(m);
        (0..p)
            .map(|k| match (self, k) {
                (ModelKind::Full, _) => true,
                (_, 1) => true,
                (ModelKind::Homophily, k) => (2..2 + m).contains(&k),
                (ModelKind::NodalEffects, k) => k >= 2 + m,
                _ => false,
            })
            .collect()
    }
}

/// Algorithm for the penalised fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    /// Coordinate descent on the local quadratic model with an Armijo line
    /// search on the penalised objective.
    #[default]
    ProximalNewton,
    /// FISTA with backtracking and function-value restarts.
    AcceleratedGradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions<T> {
    /// Free coordinates; `None` frees all. Frozen coordinates stay at 0.
    pub free_mask: Option<Vec<bool>>,
    /// Sup-norm of the score at which Newton stops.
    pub newton_tol: T,
    pub newton_max_iter: usize,
    /// Relative parameter change at which the proximal iteration stops.
    pub prox_tol: T,
    pub prox_max_iter: usize,
    /// Exponent of the adaptive weights.
    pub gamma: T,
    pub weight_cap: T,
    /// Leave reciprocity and density unpenalised. On by default: with both
    /// penalised, NBIC drops them at realistic network sizes.
    pub exempt_structural: bool,
    pub grid_points: usize,
    pub solver: Solver,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            free_mask: None,
            newton_tol: T::lit(1e-8),
            newton_max_iter: 100,
            prox_tol: T::lit(1e-7),
            prox_max_iter: 5000,
            gamma: T::one(),
            weight_cap: T::lit(1e8),
            exempt_structural: true,
            grid_points: 50,
            solver: Solver::default(),
        }
    }
}

impl<T: Scalar> FitOptions<T> {
    pub fn with_model(mut self, kind: ModelKind, m: usize) -> Self {
        self.free_mask = Some(kind.free_mask(m));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: T| x > T::zero() && x.is_finite();
        if !pos(self.newton_tol) || !pos(self.prox_tol) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !pos(self.gamma) || !pos(self.weight_cap) {
            return Err(Error::Config("gamma and weight_cap must be positive".into()));
        }
        if self.newton_max_iter == 0 || self.prox_max_iter == 0 {
            return Err(Error::Config("iteration caps must be at least 1".into()));
        }
        if self.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        Ok(())
    }

    pub(crate) fn mask(&self, p: usize) -> Result<Vec<bool>> {
        self.validate()?;
        let mask = match &self.free_mask {
            None => vec![true; p],
            Some(m) if m.len() == p => m.clone(),
            Some(m) => {
                return Err(Error::Dimension(format!(
                    "free_mask has length {}, expected {p}",
                    m.len()
                )))
            }
        };
        if !mask.iter().any(|&b| b) {
            return Err(Error::Config("free_mask has no free coordinate".into()));
        }
        Ok(mask)
    }

    /// Free coordinates that carry an L1 penalty.
    pub(crate) fn penalised(&self, mask: &[bool]) -> Vec<bool> {
        mask.iter()
            .enumerate()
            .map(|(k, &free)| free && !(self.exempt_structural && k < 2))
            .collect()
    }
}
