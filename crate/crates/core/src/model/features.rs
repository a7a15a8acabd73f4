//! Nodal feature table and the per-group similarity and magnitude maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Similarity `w(a, b)` between two nodes' feature vectors of one group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityKind {
    /// `exp(-||a - b||^2)`.
    #[default]
    Gaussian,
    /// 1 when the (binary) vectors agree in every entry, else 0.
    Hamming,
}

/// Magnitude `g(a)` of one node's feature vector within a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MagnitudeKind {
    /// The scalar itself; only defined for width-1 groups.
    #[default]
    Identity,
    EuclideanNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct GroupSpec {
    #[serde(default)]
    pub similarity: SimilarityKind,
    #[serde(default)]
    pub magnitude: MagnitudeKind,
}

impl GroupSpec {
    pub fn new(similarity: SimilarityKind, magnitude: MagnitudeKind) -> Self {
        Self {
            similarity,
            magnitude,
        }
    }
}

pub fn compute_similarity<T: Scalar>(a: &[T], b: &[T], kind: SimilarityKind) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "similarity operands have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    match kind {
        SimilarityKind::Gaussian => {
            let sq: T = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
            Ok((-sq).exp())
        }
        SimilarityKind::Hamming => {
            if !a.iter().chain(b).all(|&x| is_binary(x)) {
                return Err(Error::InvalidInput(
                    "hamming similarity requires entries in {0, 1}".into(),
                ));
            }
            Ok(if a == b { T::one() } else { T::zero() })
        }
    }
}

pub fn compute_magnitude<T: Scalar>(a: &[T], kind: MagnitudeKind) -> Result<T> {
    match kind {
        MagnitudeKind::Identity => match a {
            [x] => Ok(*x),
            _ => Err(Error::InvalidInput(format!(
                "identity magnitude needs a width-1 group, got width {}",
                a.len()
            ))),
        },
        MagnitudeKind::EuclideanNorm => Ok(a.iter().map(|&x| x * x).sum::<T>().sqrt()),
    }
}

fn is_binary<T: Scalar>(x: T) -> bool {
    x == T::zero() || x == T::one()
}

/// One feature group: an `n x width` block of the feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGroup<T> {
    pub name: String,
    pub spec: GroupSpec,
    width: usize,
    /// Row-major, `n * width`.
    values: Vec<T>,
}

impl<T: Scalar> FeatureGroup<T> {
    pub fn new(name: impl Into<String>, spec: GroupSpec, width: usize, values: Vec<T>) -> Self {
        Self {
            name: name.into(),
            spec,
            width,
            values,
        }
    }

    /// Width-1 group from a single column.
    pub fn scalar(name: impl Into<String>, spec: GroupSpec, column: Vec<T>) -> Self {
        Self::new(name, spec, 1, column)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, node: usize) -> &[T] {
        &self.values[node * self.width..(node + 1) * self.width]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Grouped nodal features. Row order is the canonical node order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable<T> {
    node_ids: Vec<String>,
    groups: Vec<FeatureGroup<T>>,
}

impl<T: Scalar> FeatureTable<T> {
    pub fn new(node_ids: Vec<String>, groups: Vec<FeatureGroup<T>>) -> Result<Self> {
        let n = node_ids.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 nodes, got {n}")));
        }
        let mut seen = std::collections::HashSet::with_capacity(n);
        for id in &node_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate node id {id:?}")));
            }
        }
        for g in &groups {
            if g.width == 0 {
                return Err(Error::InvalidInput(format!("group {:?} has width 0", g.name)));
            }
            if g.values.len() != n * g.width {
                return Err(Error::Dimension(format!(
                    "group {:?} has {} values, expected {} rows x {} columns",
                    g.name,
                    g.values.len(),
                    n,
                    g.width
                )));
            }
            if let Some(pos) = g.values.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "group {:?} has a non-finite value for node {:?}",
                    g.name,
                    node_ids[pos / g.width]
                )));
            }
            if g.spec.similarity == SimilarityKind::Hamming
                && !g.values.iter().all(|&x| is_binary(x))
            {
                return Err(Error::InvalidInput(format!(
                    "group {:?} uses hamming similarity but has non-binary entries",
                    g.name
                )));
            }
        }
        Ok(Self { node_ids, groups })
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    /// Number of feature groups.
    pub fn m(&self) -> usize {
        self.groups.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn groups(&self) -> &[FeatureGroup<T>] {
        &self.groups
    }

    pub fn group(&self, k: usize) -> &FeatureGroup<T> {
        &self.groups[k]
    }

    /// Similarity of nodes `a` and `b` in group `k`.
    pub fn similarity(&self, k: usize, a: usize, b: usize) -> Result<T> {
        let g = &self.groups[k];
        compute_similarity(g.row(a), g.row(b), g.spec.similarity)
    }

    pub fn magnitude(&self, k: usize, node: usize) -> Result<T> {
        let g = &self.groups[k];
        compute_magnitude(g.row(node), g.spec.magnitude)
    }

    /// Keeps only the listed nodes, in the given order.
    pub fn select_nodes(&self, keep: &[usize]) -> Result<Self> {
        let node_ids = keep.iter().map(|&j| self.node_ids[j].clone()).collect();
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let values = keep.iter().flat_map(|&j| g.row(j).iter().copied()).collect();
                FeatureGroup::new(g.name.clone(), g.spec, g.width, values)
            })
            .collect();
        Self::new(node_ids, groups)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_similarity_values() {
        let a = [0.3_f64, -1.2];
        assert_eq!(compute_similarity(&a, &a, SimilarityKind::Gaussian).unwrap(), 1.0);
        let v = compute_similarity(&[0.0_f64], &[1.0], SimilarityKind::Gaussian).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn hamming_similarity_values() {
        let s = compute_similarity(&[1.0_f64, 0.0], &[1.0, 1.0], SimilarityKind::Hamming).unwrap();
        assert_eq!(s, 0.0);
        let s = compute_similarity(&[1.0_f64, 0.0], &[1.0, 0.0], SimilarityKind::Hamming).unwrap();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn similarity_errors() {
        assert!(matches!(
            compute_similarity(&[1.0_f64], &[1.0, 0.0], SimilarityKind::Gaussian),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            compute_similarity(&[0.5_f64], &[1.0], SimilarityKind::Hamming),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn magnitude_kinds() {
        assert_eq!(compute_magnitude(&[-2.0_f64], MagnitudeKind::Identity).unwrap(), -2.0);
        assert_eq!(compute_magnitude(&[3.0_f64, 4.0], MagnitudeKind::EuclideanNorm).unwrap(), 5.0);
        assert!(compute_magnitude(&[3.0_f64, 4.0], MagnitudeKind::Identity).is_err());
    }

    #[test]
    fn table_validation() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let ham = GroupSpec::new(SimilarityKind::Hamming, MagnitudeKind::Identity);
        assert!(FeatureTable::new(ids.clone(), vec![FeatureGroup::scalar("x", ham, vec![0.0, 2.0])])
            .is_err());
        assert!(FeatureTable::new(ids.clone(), vec![FeatureGroup::scalar("x", ham, vec![0.0])]).is_err());
        assert!(FeatureTable::<f64>::new(vec!["a".into()], vec![]).is_err());
        assert!(FeatureTable::<f64>::new(vec!["a".into(), "a".into()], vec![]).is_err());
        let t = FeatureTable::new(ids, vec![FeatureGroup::scalar("x", ham, vec![0.0, 1.0])]).unwrap();
        assert_eq!((t.n(), t.m()), (2, 1));
    }
}
