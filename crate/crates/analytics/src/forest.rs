//! Regression trees and a bootstrap forest over them.
//!
//! Trees grow by exhaustive SSE minimization: every feature is scanned
//! at every node, candidate thresholds are midpoints between adjacent
//! distinct sorted values, and the (feature, threshold) pair with the
//! smallest total child SSE wins. Ties go to the lowest feature index,
//! then the lowest threshold, so growth is fully deterministic. The
//! forest draws one bootstrap resample per tree from a seed stream, and
//! predicts the mean of its trees.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ForestError {
    #[error("feature matrix has {rows} rows but y has {targets}")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("row {row} has {got} features, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("non-finite value in {which}")]
    NonFinite { which: &'static str },
    #[error("min_leaf must be at least 1")]
    BadMinLeaf,
    #[error("a forest needs at least one tree")]
    NoTrees,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        value: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// A single grown tree. Queries descend with `x[feature] <= threshold`
/// going left.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    root: Node,
}

impl RegressionTree {
    pub fn predict(&self, features: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if features[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Sizes of all leaves, for inspecting how far growth went.
    pub fn leaf_sizes(&self) -> Vec<usize> {
        fn walk(node: &Node, out: &mut Vec<usize>) {
            match node {
                Node::Leaf { samples, .. } => out.push(*samples),
                Node::Split { left, right, .. } => {
                    walk(left, out);
                    walk(right, out);
                }
            }
        }
        let mut sizes = Vec::new();
        walk(&self.root, &mut sizes);
        sizes
    }
}

/// A bag of bootstrap-grown trees predicting by averaging.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    trees: Vec<RegressionTree>,
}

impl ForestModel {
    pub fn predict(&self, features: &[f64]) -> f64 {
        self.trees
            .iter()
            .map(|t| t.predict(features))
            .sum::<f64>()
            / self.trees.len() as f64
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

fn validate(x: &[Vec<f64>], y: &[f64], min_leaf: usize) -> Result<(), ForestError> {
    if x.len() != y.len() {
        return Err(ForestError::LengthMismatch {
            rows: x.len(),
            targets: y.len(),
        });
    }
    if y.len() < 2 {
        return Err(ForestError::TooFewSamples {
            got: y.len(),
            need: 2,
        });
    }
    let p = x[0].len();
    for (i, row) in x.iter().enumerate() {
        if row.len() != p {
            return Err(ForestError::RaggedRow {
                row: i,
                got: row.len(),
                expected: p,
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(ForestError::NonFinite { which: "features" });
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(ForestError::NonFinite { which: "targets" });
    }
    if min_leaf == 0 {
        return Err(ForestError::BadMinLeaf);
    }
    Ok(())
}

struct BestSplit {
    sse: f64,
    feature: usize,
    threshold: f64,
}

fn find_best_split(x: &[Vec<f64>], y: &[f64], idx: &[usize], min_leaf: usize) -> Option<BestSplit> {
    let n = idx.len();
    if n < 2 * min_leaf {
        return None;
    }
    let n_features = x[idx[0]].len();
    let mut best: Option<BestSplit> = None;
    let mut order = idx.to_vec();
    for feature in 0..n_features {
        order.sort_by(|&a, &b| x[a][feature].partial_cmp(&x[b][feature]).unwrap());
        let total_sum: f64 = order.iter().map(|&i| y[i]).sum();
        let total_sq: f64 = order.iter().map(|&i| y[i] * y[i]).sum();
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for s in 1..n {
            let yi = y[order[s - 1]];
            left_sum += yi;
            left_sq += yi * yi;
            if s < min_leaf || n - s < min_leaf {
                continue;
            }
            let lo = x[order[s - 1]][feature];
            let hi = x[order[s]][feature];
            if lo == hi {
                continue;
            }
            // SSE = sum(y^2) - (sum y)^2 / n per side; rounding can push
            // a pure side a hair negative, hence the clamp.
            let left = (left_sq - left_sum * left_sum / s as f64).max(0.0);
            let right_sum = total_sum - left_sum;
            let right = ((total_sq - left_sq) - right_sum * right_sum / (n - s) as f64).max(0.0);
            let sse = left + right;
            let mut threshold = (lo + hi) / 2.0;
            if threshold >= hi {
                // Adjacent floats can round the midpoint onto hi, which
                // would misroute hi to the left side; fall back to lo,
                // which partitions identically under <=.
                threshold = lo;
            }
            // Strict improvement only: scanning features then thresholds
            // in ascending order makes the first optimum the winner.
            if best.as_ref().is_none_or(|b| sse < b.sse) {
                best = Some(BestSplit {
                    sse,
                    feature,
                    threshold,
                });
            }
        }
    }
    best
}

fn grow(x: &[Vec<f64>], y: &[f64], idx: &[usize], min_leaf: usize) -> Node {
    let first = y[idx[0]];
    if idx.iter().all(|&i| y[i] == first) {
        return Node::Leaf {
            value: first,
            samples: idx.len(),
        };
    }
    match find_best_split(x, y, idx, min_leaf) {
        None => Node::Leaf {
            value: idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64,
            samples: idx.len(),
        },
        Some(split) => {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
                .iter()
                .partition(|&&i| x[i][split.feature] <= split.threshold);
            Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: Box::new(grow(x, y, &left_idx, min_leaf)),
                right: Box::new(grow(x, y, &right_idx, min_leaf)),
            }
        }
    }
}

/// Grow one tree on the full sample.
pub fn tree_fit(x: &[Vec<f64>], y: &[f64], min_leaf: usize) -> Result<RegressionTree, ForestError> {
    validate(x, y, min_leaf)?;
    let idx: Vec<usize> = (0..y.len()).collect();
    Ok(RegressionTree {
        root: grow(x, y, &idx, min_leaf),
    })
}

/// Deterministic seed stream for per-tree bootstrap draws.
struct SeedStream {
    state: u64,
}

impl SeedStream {
    fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Grow `n_trees` trees, each on its own bootstrap resample.
pub fn forest_fit(
    x: &[Vec<f64>],
    y: &[f64],
    n_trees: usize,
    seed: u64,
    min_leaf: usize,
) -> Result<ForestModel, ForestError> {
    validate(x, y, min_leaf)?;
    if n_trees == 0 {
        return Err(ForestError::NoTrees);
    }
    let m = y.len();
    let mut seeds = SeedStream { state: seed };
    let trees = (0..n_trees)
        .map(|_| {
            let mut rng = ChaCha8Rng::seed_from_u64(seeds.next());
            let idx: Vec<usize> = (0..m).map(|_| rng.gen_range(0..m)).collect();
            RegressionTree {
                root: grow(x, y, &idx, min_leaf),
            }
        })
        .collect();
    Ok(ForestModel { trees })
}
