//! Feature and network generation from the model.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::likelihood::dyad_probabilities;
use crate::model::{
    param_len, Category, DyadCategoryVector, DyadDesign, FeatureGroup, FeatureTable, GroupSpec,
    MagnitudeKind, ParamVector, SimilarityKind,
};
use crate::scalar::Scalar;

/// Marginal law of every entry of a feature group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum FeatureLaw {
    StandardNormal,
    Bernoulli { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupLaw {
    pub name: String,
    #[serde(flatten)]
    pub law: FeatureLaw,
    #[serde(default = "one")]
    pub width: usize,
    #[serde(default)]
    pub similarity: SimilarityKind,
    #[serde(default)]
    pub magnitude: MagnitudeKind,
}

fn one() -> usize {
    1
}

impl GroupLaw {
    pub fn new(name: impl Into<String>, law: FeatureLaw) -> Self {
        Self {
            name: name.into(),
            law,
            width: 1,
            similarity: SimilarityKind::Gaussian,
            magnitude: MagnitudeKind::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub groups: Vec<GroupLaw>,
    pub theta_true: Vec<f64>,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Four scalar groups, `V1, V2 ~ N(0, 1)` and `V3, V4 ~ Bernoulli(0.5)`,
    /// gaussian similarity and identity magnitude, with
    /// `theta = (6, -6, 6, 0, 0, 0, -6, 0, 0, 0, 6, 0, 0, 0)`.
    pub fn benchmark(n: usize, seed: u64) -> Self {
        let groups = vec![
            GroupLaw::new("V1", FeatureLaw::StandardNormal),
            GroupLaw::new("V2", FeatureLaw::StandardNormal),
            GroupLaw::new("V3", FeatureLaw::Bernoulli { p: 0.5 }),
            GroupLaw::new("V4", FeatureLaw::Bernoulli { p: 0.5 }),
        ];
        let mut theta_true = vec![0.0; 14];
        theta_true[0] = 6.0;
        theta_true[1] = -6.0;
        theta_true[2] = 6.0;
        theta_true[6] = -6.0;
        theta_true[10] = 6.0;
        Self {
            n,
            groups,
            theta_true,
            seed,
        }
    }

    pub fn m(&self) -> usize {
        self.groups.len()
    }

    pub fn p(&self) -> usize {
        param_len(self.m())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.theta_true.len() != self.p() {
            return Err(Error::Config(format!(
                "theta_true has length {}, expected 3m + 2 = {}",
                self.theta_true.len(),
                self.p()
            )));
        }
        for g in &self.groups {
            if g.width == 0 {
                return Err(Error::Config(format!("group {:?} has width 0", g.name)));
            }
            if let FeatureLaw::Bernoulli { p } = g.law {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Config(format!(
                        "group {:?}: bernoulli p = {p} not in [0, 1]",
                        g.name
                    )));
                }
            }
            if g.similarity == SimilarityKind::Hamming && g.law == FeatureLaw::StandardNormal {
                return Err(Error::Config(format!(
                    "group {:?}: hamming similarity needs a binary law",
                    g.name
                )));
            }
        }
        ParamVector::from_vec(self.theta_true.clone()).map(|_| ())
    }

    pub fn theta(&self) -> Result<ParamVector<f64>> {
        ParamVector::from_vec(self.theta_true.clone())
    }

    /// 0-based support of `theta_true`.
    pub fn true_active(&self) -> Vec<usize> {
        (0..self.p()).filter(|&k| self.theta_true[k] != 0.0).collect()
    }
}

/// Draws every group column by column, nodes in order.
pub fn generate_features<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R) -> Result<FeatureTable<f64>> {
    spec.validate()?;
    let n = spec.n;
    let node_ids = (1..=n).map(|j| format!("n{j}")).collect();
    let groups = spec
        .groups
        .iter()
        .map(|g| {
            let mut values = vec![0.0; n * g.width];
            for col in 0..g.width {
                for j in 0..n {
                    values[j * g.width + col] = match g.law {
                        FeatureLaw::StandardNormal => rng.sample(StandardNormal),
                        FeatureLaw::Bernoulli { p } => {
                            if rng.random::<f64>() < p {
                                1.0
                            } else {
                                0.0
                            }
                        }
                    };
                }
            }
            FeatureGroup::new(
                g.name.clone(),
                GroupSpec::new(g.similarity, g.magnitude),
                g.width,
                values,
            )
        })
        .collect();
    FeatureTable::new(node_ids, groups)
}

/// Inverse-CDF draw of a category from one uniform.
pub fn draw_category(probs: &[f64; 4], u: f64) -> Category {
    let mut acc = 0.0;
    for (c, &p) in Category::ALL.iter().zip(probs) {
        acc += p;
        if u < acc {
            return *c;
        }
    }
    Category::Null
}

/// Independent dyads, one uniform per dyad in pair order.
pub fn sample_network<T: Scalar, R: Rng + ?Sized>(
    theta: &ParamVector<T>,
    design: &DyadDesign<T>,
    rng: &mut R,
) -> Result<DyadCategoryVector> {
    if theta.len() != design.p() {
        return Err(Error::Dimension(format!(
            "theta has length {}, design needs {}",
            theta.len(),
            design.p()
        )));
    }
    design
        .rows()
        .map(|row| {
            let p = dyad_probabilities(row, theta)?.map(|x| x.as_f64());
            Ok(draw_category(&p, rng.random::<f64>()))
        })
        .collect::<Result<Vec<_>>>()
        .map(DyadCategoryVector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn benchmark_spec_shape() {
        let s = GeneratorSpec::benchmark(50, 1);
        assert_eq!(s.p(), 14);
        assert_eq!(s.true_active(), vec![0, 1, 2, 6, 10]);
        s.validate().unwrap();
    }

    #[test]
    fn same_seed_same_features() {
        let s = GeneratorSpec::benchmark(30, 9);
        let a = generate_features(&s, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = generate_features(&s, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.group(2).values().iter().all(|&x| x == 0.0 || x == 1.0));
    }

    #[test]
    fn draw_category_boundaries() {
        let p = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(draw_category(&p, 0.0), Category::Mutual);
        assert_eq!(draw_category(&p, 0.1), Category::Forward);
        assert_eq!(draw_category(&p, 0.29), Category::Forward);
        assert_eq!(draw_category(&p, 0.61), Category::Null);
        assert_eq!(draw_category(&p, 0.999_999), Category::Null);
    }

    #[test]
    fn spec_validation() {
        let mut s = GeneratorSpec::benchmark(10, 0);
        s.theta_true.pop();
        assert!(s.validate().is_err());
        let mut s = GeneratorSpec::benchmark(1, 0);
        assert!(s.validate().is_err());
        s.n = 5;
        s.groups[0].similarity = SimilarityKind::Hamming;
        assert!(s.validate().is_err());
    }
}
