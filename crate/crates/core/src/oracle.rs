//! Exhaustive enumeration of every directed graph on a handful of nodes.
//!
//! The global density `P(X = x) = exp(theta . s(x, V)) / z(theta)` is
//! evaluated graph by graph, with `s` computed straight from the adjacency
//! matrix and the raw features rather than through the dyad design. That
//! makes it an independent reference for normalisation, the sufficient
//! statistics and the dyad factorisation the likelihood relies on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    build_dyad_design, dyad_probabilities, dyads_from_adjacency, sufficient_statistics, Adjacency,
    Category, FeatureGroup, FeatureTable, GroupSpec, MagnitudeKind, ParamVector, SimilarityKind,
};

pub const MAX_NODES: usize = 4;

fn check_size(n: usize) -> Result<()> {
    if !(2..=MAX_NODES).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "enumeration needs 2 <= n <= {MAX_NODES}, got {n}"
        )));
    }
    Ok(())
}

/// All `2^(n(n-1))` adjacency matrices on `n` nodes. Graph `i` has edge
/// number `b` (off-diagonal cells in row-major order) iff bit `b` of `i` is set.
pub fn enumerate_graphs(n: usize) -> Result<Vec<Adjacency>> {
    check_size(n)?;
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    Ok((0u32..1 << cells.len())
        .map(|mask| {
            let mut x = Adjacency::zeros(n);
            for (b, &(i, j)) in cells.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    x.set(i, j, true);
                }
            }
            x
        })
        .collect())
}

/// Sufficient statistics of a whole graph: mutual pairs, directed edges,
/// and per group the homophily, sender and receiver sums over edges.
pub fn graph_statistics(x: &Adjacency, features: &FeatureTable<f64>) -> Result<Vec<f64>> {
    let n = features.n();
    let m = features.m();
    if x.n() != n {
        return Err(Error::Dimension(format!(
            "adjacency has {} nodes, features {n}",
            x.n()
        )));
    }
    let mut s = vec![0.0; 3 * m + 2];
    for i in 0..n {
        for j in 0..n {
            if i == j || !x.get(i, j) {
                continue;
            }
            if i < j && x.get(j, i) {
                s[0] += 1.0;
            }
            s[1] += 1.0;
            for k in 0..m {
                s[2 + k] += features.similarity(k, i, j)?;
                s[2 + m + k] += features.magnitude(k, i)?;
                s[2 + 2 * m + k] += features.magnitude(k, j)?;
            }
        }
    }
    Ok(s)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone)]
pub struct GraphEnumeration {
    pub n: usize,
    pub graphs: Vec<Adjacency>,
    /// `theta . s(x, V)` per graph.
    pub log_weights: Vec<f64>,
    pub log_z: f64,
}

impl GraphEnumeration {
    pub fn new(theta: &ParamVector<f64>, features: &FeatureTable<f64>) -> Result<Self> {
        if theta.m() != features.m() {
            return Err(Error::Dimension(format!(
                "theta has m = {}, features m = {}",
                theta.m(),
                features.m()
            )));
        }
        let graphs = enumerate_graphs(features.n())?;
        let log_weights = graphs
            .iter()
            .map(|x| Ok(dot(theta.as_slice(), &graph_statistics(x, features)?)))
            .collect::<Result<Vec<_>>>()?;
        let log_z = log_sum_exp(&log_weights);
        if !log_z.is_finite() {
            return Err(Error::NumericDomain("normalising constant overflowed".into()));
        }
        Ok(Self {
            n: features.n(),
            graphs,
            log_weights,
            log_z,
        })
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_weights.iter().map(move |lw| (lw - self.log_z).exp())
    }

    pub fn probability_of(&self, x: &Adjacency) -> Result<f64> {
        let i = self
            .graphs
            .iter()
            .position(|g| g == x)
            .ok_or_else(|| Error::InvalidInput("not a loop-free graph on these nodes".into()))?;
        Ok((self.log_weights[i] - self.log_z).exp())
    }

    /// Marginal distribution of the category of `pair = (a, b)`, `a < b`.
    pub fn dyad_marginal(&self, pair: (usize, usize)) -> Result<[f64; 4]> {
        let (a, b) = pair;
        if a >= b || b >= self.n {
            return Err(Error::InvalidInput(format!("invalid pair ({a}, {b})")));
        }
        let mut out = [0.0; 4];
        for (x, p) in self.graphs.iter().zip(self.probabilities()) {
            out[Category::from_edges(x.get(a, b), x.get(b, a)).index()] += p;
        }
        Ok(out)
    }
}

pub fn brute_force_graph_probability(
    x: &Adjacency,
    theta: &ParamVector<f64>,
    features: &FeatureTable<f64>,
) -> Result<f64> {
    GraphEnumeration::new(theta, features)?.probability_of(x)
}

pub fn brute_force_dyad_marginal(
    theta: &ParamVector<f64>,
    features: &FeatureTable<f64>,
    pair: (usize, usize),
) -> Result<[f64; 4]> {
    GraphEnumeration::new(theta, features)?.dyad_marginal(pair)
}

/// Worst deviations seen by [`oracle_check`], each compared against
/// [`OracleReport::TOLERANCE`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub graphs_per_trial: usize,
    /// `|sum of graph probabilities - 1|`.
    pub normalisation: f64,
    /// Joint probability vs the product of model dyad probabilities.
    pub factorisation: f64,
    /// Enumerated dyad marginals vs model dyad probabilities.
    pub marginals: f64,
    /// Graph statistics vs the dyad-based sufficient statistics.
    pub statistics: f64,
    pub passed: bool,
}

impl OracleReport {
    pub const TOLERANCE: f64 = 1e-10;
}

/// Features for oracle trials: one standard-normal group with gaussian
/// similarity, one Bernoulli(1/2) group with hamming similarity.
pub fn random_features<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FeatureTable<f64>> {
    let normal: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let binary: Vec<f64> = (0..n).map(|_| f64::from(u8::from(rng.random_bool(0.5)))).collect();
    FeatureTable::new(
        (0..n).map(|i| format!("v{i}")).collect(),
        vec![
            FeatureGroup::scalar("normal", GroupSpec::default(), normal),
            FeatureGroup::scalar(
                "binary",
                GroupSpec::new(SimilarityKind::Hamming, MagnitudeKind::Identity),
                binary,
            ),
        ],
    )
}

pub fn oracle_check(n: usize, trials: usize, seed: u64) -> Result<OracleReport> {
    check_size(n)?;
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graphs = enumerate_graphs(n)?;
    let mut report = OracleReport {
        n,
        trials,
        seed,
        graphs_per_trial: graphs.len(),
        normalisation: 0.0,
        factorisation: 0.0,
        marginals: 0.0,
        statistics: 0.0,
        passed: false,
    };
    for _ in 0..trials {
        let features = random_features(n, &mut rng)?;
        let theta = ParamVector::from_vec(
            (0..3 * features.m() + 2)
                .map(|_| rng.random_range(-2.0..2.0))
                .collect(),
        )?;
        let design = build_dyad_design(&features)?;
        let dyad_probs = design
            .rows()
            .map(|row| dyad_probabilities(row, &theta))
            .collect::<Result<Vec<_>>>()?;
        let en = GraphEnumeration::new(&theta, &features)?;

        let total: f64 = en.probabilities().sum();
        report.normalisation = report.normalisation.max((total - 1.0).abs());

        for (x, joint) in en.graphs.iter().zip(en.probabilities()) {
            let y = dyads_from_adjacency(x)?;
            let product: f64 = y.iter().zip(&dyad_probs).map(|(c, p)| p[c.index()]).product();
            report.factorisation = report.factorisation.max((joint - product).abs());

            let direct = graph_statistics(x, &features)?;
            let via_dyads = sufficient_statistics(&y, &design)?;
            for (a, b) in direct.iter().zip(&via_dyads.0) {
                report.statistics = report.statistics.max((a - b).abs());
            }
        }
        for (i, &pair) in design.pairs().iter().enumerate() {
            let marginal = en.dyad_marginal(pair)?;
            for c in 0..4 {
                report.marginals = report.marginals.max((marginal[c] - dyad_probs[i][c]).abs());
            }
        }
    }
    report.passed = [
        report.normalisation,
        report.factorisation,
        report.marginals,
        report.statistics,
    ]
    .iter()
    .all(|&d| d < OracleReport::TOLERANCE);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_counts_and_diagonal() {
        assert_eq!(enumerate_graphs(2).unwrap().len(), 4);
        let g3 = enumerate_graphs(3).unwrap();
        assert_eq!(g3.len(), 64);
        assert!(g3.iter().all(|x| (0..3).all(|i| !x.get(i, i))));
        assert!(enumerate_graphs(1).is_err());
        assert!(enumerate_graphs(5).is_err());
    }

    #[test]
    fn uniform_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_features(3, &mut rng).unwrap();
        let en = GraphEnumeration::new(&ParamVector::zeros(2), &f).unwrap();
        assert!(en.probabilities().all(|p| (p - 1.0 / 64.0).abs() < 1e-15));
        let marginal = en.dyad_marginal((0, 2)).unwrap();
        assert!(marginal.iter().all(|p| (p - 0.25).abs() < 1e-14));
    }

    #[test]
    fn two_node_marginal_is_the_joint() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_features(2, &mut rng).unwrap();
        let theta = ParamVector::from_vec(vec![0.7, -0.3, 1.0, 0.5, -0.2, 0.1, 0.4, -0.6]).unwrap();
        let en = GraphEnumeration::new(&theta, &f).unwrap();
        let marginal = en.dyad_marginal((0, 1)).unwrap();
        for x in &en.graphs {
            let c = Category::from_edges(x.get(0, 1), x.get(1, 0));
            assert!((en.probability_of(x).unwrap() - marginal[c.index()]).abs() < 1e-15);
        }
    }

    #[test]
    fn quick_check_passes() {
        let r = oracle_check(3, 10, 9).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
