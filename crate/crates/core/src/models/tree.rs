//! CART regression tree.

use std::collections::BTreeSet;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::Predict;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Growth limits for a single tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    /// `None` grows until the other limits stop it.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: Some(8),
            min_samples_leaf: 2,
            min_samples_split: 2,
        }
    }
}

impl TreeParams {
    pub fn unlimited() -> Self {
        Self {
            max_depth: None,
            min_samples_leaf: 1,
            min_samples_split: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf < 1 {
            return Err(Error::invalid("min_samples_leaf must be >= 1"));
        }
        if self.min_samples_split < 2 {
            return Err(Error::invalid("min_samples_split must be >= 2"));
        }
        Ok(())
    }
}

/// A node of the flattened tree. Children are indices into the node array;
/// the root is node 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Node>", into = "Vec<Node>")]
pub struct Tree {
    nodes: Vec<Node>,
}

impl From<Tree> for Vec<Node> {
    fn from(t: Tree) -> Self {
        t.nodes
    }
}

impl TryFrom<Vec<Node>> for Tree {
    type Error = Error;

    fn try_from(nodes: Vec<Node>) -> Result<Self> {
        Tree::from_nodes(nodes)
    }
}

impl Tree {
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    /// `x[feature] <= threshold` routes to `left`, otherwise `right`.
    pub fn stump(feature: usize, threshold: f64, left: f64, right: f64) -> Self {
        Self {
            nodes: vec![
                Node::Split {
                    feature,
                    threshold,
                    left: 1,
                    right: 2,
                },
                Node::Leaf { value: left },
                Node::Leaf { value: right },
            ],
        }
    }

    /// Builds a tree from a node array. Children must point forward, which
    /// rules out cycles; every node except the root has exactly one parent.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Empty("tree has no nodes"));
        }
        let mut parents = vec![0usize; nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            match *node {
                Node::Split {
                    threshold, left, right, ..
                } => {
                    if !threshold.is_finite() {
                        return Err(Error::NonFinite(format!("threshold of node {i}")));
                    }
                    for c in [left, right] {
                        if c <= i || c >= nodes.len() {
                            return Err(Error::invalid(format!("node {i} has invalid child {c}")));
                        }
                        parents[c] += 1;
                    }
                }
                Node::Leaf { value } => {
                    if !value.is_finite() {
                        return Err(Error::NonFinite(format!("leaf value of node {i}")));
                    }
                }
            }
        }
        if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
            return Err(Error::invalid("node array is not a single tree"));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Feature indices referenced by any split node.
    pub fn used_features(&self) -> BTreeSet<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return Ok(value),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let v = *x.get(feature).ok_or(Error::FeatureOutOfBounds {
                        index: feature,
                        len: x.len(),
                    })?;
                    i = if v <= threshold { left } else { right };
                }
            }
        }
    }
}

impl Predict for Tree {
    fn input_len(&self) -> usize {
        self.used_features().last().map_or(0, |f| f + 1)
    }

    fn predict_row(&self, x: &[f64]) -> Result<f64> {
        self.predict(x)
    }
}

/// Mean that returns the common value exactly when all inputs are equal.
pub(crate) fn mean_of(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut it = values.clone();
    let first = it.next().expect("mean of an empty set");
    if it.all(|v| v == first) {
        return first;
    }
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

pub(crate) fn check_training_input(rows: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if rows.is_empty() {
        return Err(Error::Empty("no training samples"));
    }
    if rows.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            actual: y.len(),
        });
    }
    let n_features = rows[0].len();
    for r in rows {
        if r.len() != n_features {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                actual: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training feature".into()));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training target".into()));
    }
    Ok(n_features)
}

/// Greedy CART on all rows, considering every feature at every split.
pub fn fit_tree(rows: &[Vec<f64>], y: &[f64], params: &TreeParams) -> Result<Tree> {
    let samples: Vec<usize> = (0..rows.len()).collect();
    fit_tree_on(rows, y, &samples, params, None)
}

/// Greedy CART on the rows listed in `samples` (duplicates allowed, as in a
/// bootstrap sample). With `feature_sampling = Some((k, rng))` each split
/// considers a fresh random subset of `k` features drawn from `rng`.
pub fn fit_tree_on(
    rows: &[Vec<f64>],
    y: &[f64],
    samples: &[usize],
    params: &TreeParams,
    feature_sampling: Option<(usize, &mut Stream)>,
) -> Result<Tree> {
    let n_features = check_training_input(rows, y)?;
    params.validate()?;
    if samples.is_empty() {
        return Err(Error::Empty("no training samples"));
    }
    if let Some(&bad) = samples.iter().find(|&&i| i >= rows.len()) {
        return Err(Error::invalid(format!("sample index {bad} out of range")));
    }
    let mut builder = Builder {
        rows,
        y,
        params,
        n_features,
        sampling: feature_sampling.map(|(k, rng)| (k.clamp(1, n_features.max(1)), rng)),
        nodes: Vec::new(),
    };
    builder.grow(samples.to_vec(), 0);
    Ok(Tree { nodes: builder.nodes })
}

struct Builder<'a, 'r> {
    rows: &'a [Vec<f64>],
    y: &'a [f64],
    params: &'a TreeParams,
    n_features: usize,
    sampling: Option<(usize, &'r mut Stream)>,
    nodes: Vec<Node>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    child_sse: f64,
}

impl Builder<'_, '_> {
    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let value = mean_of(samples.iter().map(|&i| self.y[i]));
        self.nodes.push(Node::Leaf { value });

        let n = samples.len();
        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        let constant = samples.iter().all(|&i| self.y[i] == self.y[samples[0]]);
        if !depth_ok || constant || n < self.params.min_samples_split || n < 2 * self.params.min_samples_leaf {
            return id;
        }

        let features: Vec<usize> = match self.sampling.as_mut() {
            Some((k, rng)) if *k < self.n_features => {
                let mut f = index::sample(&mut **rng, self.n_features, *k).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..self.n_features).collect(),
        };

        let centered: Vec<f64> = samples.iter().map(|&i| self.y[i] - value).collect();
        let total: f64 = centered.iter().sum();
        let total_sq: f64 = centered.iter().map(|c| c * c).sum();
        let parent_sse = total_sq - total * total / n as f64;
        let tie_eps = 1e-12 * parent_sse.abs();

        let mut best: Option<Candidate> = None;
        for &f in &features {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| self.rows[samples[a]][f].total_cmp(&self.rows[samples[b]][f]));
            let mut s_left = 0.0;
            let mut sq_left = 0.0;
            for pos in 0..n - 1 {
                let c = centered[order[pos]];
                s_left += c;
                sq_left += c * c;
                let n_left = pos + 1;
                let n_right = n - n_left;
                if n_left < self.params.min_samples_leaf || n_right < self.params.min_samples_leaf {
                    continue;
                }
                let lo = self.rows[samples[order[pos]]][f];
                let hi = self.rows[samples[order[pos + 1]]][f];
                if lo >= hi {
                    continue;
                }
                let s_right = total - s_left;
                let child_sse = (sq_left - s_left * s_left / n_left as f64)
                    + ((total_sq - sq_left) - s_right * s_right / n_right as f64);
                // a later candidate must win by more than rounding noise
                if best.as_ref().is_none_or(|b| child_sse < b.child_sse - tie_eps) {
                    best = Some(Candidate {
                        feature: f,
                        threshold: midpoint(lo, hi),
                        child_sse,
                    });
                }
            }
        }

        let Some(best) = best else { return id };
        if parent_sse - best.child_sse <= 1e-12 * parent_sse {
            return id;
        }
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| self.rows[i][best.feature] <= best.threshold);
        let left_id = self.grow(left, depth + 1);
        let right_id = self.grow(right, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: left_id,
            right: right_id,
        };
        id
    }
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    // adjacent floats: keep the split strictly between the two groups
    if m >= hi {
        lo
    } else {
        m
    }
}
