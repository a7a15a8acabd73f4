//! Parameter vector layout, dyad categories and adjacency matrices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of coefficients for `m` feature groups.
pub const fn param_len(m: usize) -> usize {
    3 * m + 2
}

/// Which block of the coefficient vector an index belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Block {
    Reciprocity,
    Density,
    Homophily,
    OutEffect,
    InEffect,
}

impl Block {
    /// Block and within-block group index (0-based) of flat index `k`.
    pub fn of(k: usize, m: usize) -> (Block, Option<usize>) {
        match k {
            0 => (Block::Reciprocity, None),
            1 => (Block::Density, None),
            k if k < 2 + m => (Block::Homophily, Some(k - 2)),
            k if k < 2 + 2 * m => (Block::OutEffect, Some(k - 2 - m)),
            k => (Block::InEffect, Some(k - 2 - 2 * m)),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Block::Reciprocity => "reciprocity",
            Block::Density => "density",
            Block::Homophily => "homophily",
            Block::OutEffect => "out",
            Block::InEffect => "in",
        }
    }
}

/// Human-readable label for coefficient `k`, e.g. `homophily[V1]`.
pub fn coefficient_label(k: usize, group_names: &[String]) -> String {
    match Block::of(k, group_names.len()) {
        (b, None) => b.as_str().to_string(),
        (b, Some(g)) => format!("{}[{}]", b.as_str(), group_names[g]),
    }
}

/// Coefficient vector of length `3m + 2`.
///
/// Flat layout (0-based): `0` reciprocity, `1` density, `2..2+m` homophily,
/// `2+m..2+2m` out-effects, `2+2m..2+3m` in-effects.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector<T> {
    m: usize,
    theta: Vec<T>,
}

impl<T: Scalar> ParamVector<T> {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            theta: vec![T::zero(); param_len(m)],
        }
    }

    pub fn from_vec(theta: Vec<T>) -> Result<Self> {
        let p = theta.len();
        if p < 2 || !(p - 2).is_multiple_of(3) {
            return Err(Error::Dimension(format!(
                "parameter vector length {p} is not of the form 3m + 2"
            )));
        }
        if let Some(k) = theta.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("theta[{}] is not finite", k + 1)));
        }
        Ok(Self {
            m: (p - 2) / 3,
            theta,
        })
    }

    /// Assembles the vector from its blocks.
    pub fn from_blocks(
        reciprocity: T,
        density: T,
        homophily: &[T],
        out_effects: &[T],
        in_effects: &[T],
    ) -> Result<Self> {
        let m = homophily.len();
        if out_effects.len() != m || in_effects.len() != m {
            return Err(Error::Dimension("nodal blocks must all have length m".into()));
        }
        let mut theta = Vec::with_capacity(param_len(m));
        theta.push(reciprocity);
        theta.push(density);
        theta.extend_from_slice(homophily);
        theta.extend_from_slice(out_effects);
        theta.extend_from_slice(in_effects);
        Self::from_vec(theta)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.theta
    }

    pub fn into_vec(self) -> Vec<T> {
        self.theta
    }

    pub fn reciprocity(&self) -> T {
        self.theta[0]
    }

    pub fn density(&self) -> T {
        self.theta[1]
    }

    pub fn homophily(&self) -> &[T] {
        &self.theta[2..2 + self.m]
    }

    pub fn out_effects(&self) -> &[T] {
        &self.theta[2 + self.m..2 + 2 * self.m]
    }

    pub fn in_effects(&self) -> &[T] {
        &self.theta[2 + 2 * self.m..]
    }

    /// 0-based indices of the nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.theta
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != T::zero())
            .map(|(k, _)| k)
            .collect()
    }
}

impl<T> std::ops::Index<usize> for ParamVector<T> {
    type Output = T;
    fn index(&self, k: usize) -> &T {
        &self.theta[k]
    }
}

/// State of the dyad `(x[j1][j2], x[j2][j1])` for `j1 < j2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Category {
    /// (1, 1)
    Mutual = 1,
    /// (1, 0): edge j1 -> j2 only
    Forward = 2,
    /// (0, 1): edge j2 -> j1 only
    Backward = 3,
    /// (0, 0)
    Null = 4,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Mutual,
        Category::Forward,
        Category::Backward,
        Category::Null,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_code(c: u8) -> Result<Self> {
        match c {
            1 => Ok(Category::Mutual),
            2 => Ok(Category::Forward),
            3 => Ok(Category::Backward),
            4 => Ok(Category::Null),
            _ => Err(Error::InvalidInput(format!("dyad category {c} not in 1..=4"))),
        }
    }

    pub fn from_edges(forward: bool, backward: bool) -> Self {
        match (forward, backward) {
            (true, true) => Category::Mutual,
            (true, false) => Category::Forward,
            (false, true) => Category::Backward,
            (false, false) => Category::Null,
        }
    }

    /// `(x[j1][j2], x[j2][j1])`.
    pub fn edges(self) -> (bool, bool) {
        match self {
            Category::Mutual => (true, true),
            Category::Forward => (true, false),
            Category::Backward => (false, true),
            Category::Null => (false, false),
        }
    }

    pub fn edge_count(self) -> usize {
        let (a, b) = self.edges();
        a as usize + b as usize
    }

    /// Category after swapping the roles of `j1` and `j2`.
    pub fn swapped(self) -> Self {
        let (a, b) = self.edges();
        Category::from_edges(b, a)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Observed dyad states in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadCategoryVector(pub Vec<Category>);

impl DyadCategoryVector {
    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        codes
            .iter()
            .map(|&c| Category::from_code(c))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn codes(&self) -> Vec<u8> {
        self.0.iter().map(|c| c.code()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Category> {
        self.0.iter()
    }

    pub fn directed_edge_count(&self) -> usize {
        self.0.iter().map(|c| c.edge_count()).sum()
    }

    /// Rebuilds the adjacency matrix for `n` nodes.
    pub fn to_adjacency(&self, n: usize) -> Result<Adjacency> {
        if self.0.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Dimension(format!(
                "{} dyads do not match n = {n}",
                self.0.len()
            )));
        }
        let mut adj = Adjacency::zeros(n);
        for ((a, b), c) in pairs(n).zip(&self.0) {
            let (f, r) = c.edges();
            adj.set(a, b, f);
            adj.set(b, a, r);
        }
        Ok(adj)
    }
}

/// Lexicographic enumeration of `j1 < j2`.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
}

/// Position of pair `(a, b)`, `a < b`, in lexicographic order.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Dense binary `n x n` adjacency matrix, row = sender.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Adjacency {
    n: usize,
    cells: Vec<u8>,
}

impl Adjacency {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            cells: vec![0; n * n],
        }
    }

    /// Square, binary rows. The diagonal is not checked here.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "adjacency row {} has length {}, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|&x| x > 1) {
                return Err(Error::InvalidInput(format!(
                    "adjacency entry ({}, {}) = {} is not binary",
                    i + 1,
                    j + 1,
                    row[j]
                )));
            }
            cells.extend_from_slice(row);
        }
        Ok(Self { n, cells })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: usize, to: usize) -> bool {
        self.cells[from * self.n + to] == 1
    }

    pub fn set(&mut self, from: usize, to: usize, edge: bool) {
        self.cells[from * self.n + to] = edge as u8;
    }

    pub fn edge_count(&self) -> usize {
        self.cells.iter().map(|&c| c as usize).sum()
    }

    /// Directed edges `(from, to)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(move |(i, _)| (i / n, i % n))
    }
}

pub fn dyads_from_adjacency(adjacency: &Adjacency) -> Result<DyadCategoryVector> {
    let n = adjacency.n();
    if let Some(j) = (0..n).find(|&j| adjacency.get(j, j)) {
        return Err(Error::InvalidInput(format!(
            "adjacency has a nonzero diagonal entry at node {}",
            j + 1
        )));
    }
    Ok(DyadCategoryVector(
        pairs(n)
            .map(|(a, b)| Category::from_edges(adjacency.get(a, b), adjacency.get(b, a)))
            .collect(),
    ))
}
