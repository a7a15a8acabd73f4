//! Per-pair covariates: similarity `w` and the two endpoint magnitudes.

use crate::error::{Error, Result};
use crate::model::features::{FeatureTable, MagnitudeKind};
use crate::model::params::pairs;
use crate::scalar::Scalar;

/// Covariates of a single unordered pair `(j1, j2)`, each of length `m`.
#[derive(Debug, Clone, Copy)]
pub struct DyadRow<'a, T> {
    pub w: &'a [T],
    pub g1: &'a [T],
    pub g2: &'a [T],
}

impl<'a, T> DyadRow<'a, T> {
    pub fn new(w: &'a [T], g1: &'a [T], g2: &'a [T]) -> Self {
        Self { w, g1, g2 }
    }

    /// The same pair seen from `(j2, j1)`.
    pub fn swapped(self) -> Self {
        Self {
            w: self.w,
            g1: self.g2,
            g2: self.g1,
        }
    }

    pub fn m(&self) -> usize {
        self.w.len()
    }
}

/// Pair enumeration plus `N x m` matrices `w`, `g1`, `g2` (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct DyadDesign<T> {
    n: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
    w: Vec<T>,
    g1: Vec<T>,
    g2: Vec<T>,
}

impl<T: Scalar> DyadDesign<T> {
    /// Design from explicit rows; `pairs` must be `(j1 < j2)` with `j2 < n`.
    pub fn from_parts(
        n: usize,
        m: usize,
        pairs: Vec<(usize, usize)>,
        w: Vec<T>,
        g1: Vec<T>,
        g2: Vec<T>,
    ) -> Result<Self> {
        let rows = pairs.len();
        if w.len() != rows * m || g1.len() != rows * m || g2.len() != rows * m {
            return Err(Error::Dimension(format!(
                "design matrices must be {rows} x {m}"
            )));
        }
        if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= b || b >= n) {
            return Err(Error::InvalidInput(format!("invalid pair ({a}, {b}) for n = {n}")));
        }
        Ok(Self {
            n,
            m,
            pairs,
            w,
            g1,
            g2,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        3 * self.m + 2
    }

    /// Number of dyads.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn row(&self, i: usize) -> DyadRow<'_, T> {
        let r = i * self.m..(i + 1) * self.m;
        DyadRow {
            w: &self.w[r.clone()],
            g1: &self.g1[r.clone()],
            g2: &self.g2[r],
        }
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = DyadRow<'_, T>> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }
}

pub fn build_dyad_design<T: Scalar>(features: &FeatureTable<T>) -> Result<DyadDesign<T>> {
    let n = features.n();
    let m = features.m();
    for g in features.groups() {
        if g.spec.magnitude == MagnitudeKind::Identity && g.width() != 1 {
            return Err(Error::InvalidInput(format!(
                "group {:?} has width {} but identity magnitude requires width 1",
                g.name,
                g.width()
            )));
        }
    }
    // Magnitudes only depend on the node, so compute them once.
    let mut mag = vec![T::zero(); n * m];
    for j in 0..n {
        for k in 0..m {
            mag[j * m + k] = features.magnitude(k, j)?;
        }
    }
    let pair_list: Vec<_> = pairs(n).collect();
    let rows = pair_list.len();
    let mut w = Vec::with_capacity(rows * m);
    let mut g1 = Vec::with_capacity(rows * m);
    let mut g2 = Vec::with_capacity(rows * m);
    for &(a, b) in &pair_list {
        for k in 0..m {
            w.push(features.similarity(k, a, b)?);
        }
        g1.extend_from_slice(&mag[a * m..(a + 1) * m]);
        g2.extend_from_slice(&mag[b * m..(b + 1) * m]);
    }
    DyadDesign::from_parts(n, m, pair_list, w, g1, g2)
}
