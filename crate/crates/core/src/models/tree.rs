//! Binary classification tree grown greedily by Gini impurity.
//!
//! Split scores are compared exactly in integer arithmetic. Minimizing the
//! size-weighted child Gini is the same as maximizing
//! `(l0² + l1²) / nl + (r0² + r1²) / nr`, which is compared by
//! cross-multiplication, so ties are real ties. Ties go to the lowest
//! feature index, then the lowest threshold.

use super::{Predictor, TrainConfig, TIE_CLASS};
use crate::data::{Dataset, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        class: u8,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Fitted tree. Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features: usize,
}

/// Sum of squared class counts over the node size, as an exact fraction.
#[derive(Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn node(c: [usize; 2]) -> Score {
        let n = (c[0] + c[1]) as u128;
        Score {
            num: (c[0] as u128).pow(2) + (c[1] as u128).pow(2),
            den: n,
        }
    }

    fn split(l: [usize; 2], r: [usize; 2]) -> Score {
        let (a, b) = (Score::node(l), Score::node(r));
        Score {
            num: a.num * b.den + b.num * a.den,
            den: a.den * b.den,
        }
    }

    fn beats(self, other: Score) -> bool {
        self.num * other.den > other.num * self.den
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    score: Score,
}

fn counts(labels: &[u8], rows: &[usize]) -> [usize; 2] {
    let mut c = [0; 2];
    for &i in rows {
        c[usize::from(labels[i])] += 1;
    }
    c
}

fn majority(c: [usize; 2]) -> u8 {
    match c[0].cmp(&c[1]) {
        std::cmp::Ordering::Greater => 0,
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Equal => TIE_CLASS,
    }
}

fn best_split(x: &Matrix, labels: &[u8], rows: &[usize]) -> Option<Candidate> {
    let total = counts(labels, rows);
    let mut best: Option<Candidate> = None;
    let mut order = rows.to_vec();
    for feature in 0..x.n_cols() {
        order.sort_by(|&a, &b| x.get(a, feature).total_cmp(&x.get(b, feature)));
        let mut left = [0usize; 2];
        for w in 0..order.len() - 1 {
            left[usize::from(labels[order[w]])] += 1;
            let (lo, hi) = (x.get(order[w], feature), x.get(order[w + 1], feature));
            if lo == hi {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let score = Score::split(left, right);
            if best.as_ref().is_none_or(|b| score.beats(b.score)) {
                let mid = lo + (hi - lo) / 2.0;
                let threshold = if mid >= hi { lo } else { mid };
                best = Some(Candidate {
                    feature,
                    threshold,
                    score,
                });
            }
        }
    }
    best
}

pub fn tree_fit(train: &Dataset, cfg: &TrainConfig) -> Result<DecisionTree> {
    if train.is_empty() {
        return Err(Error::Empty("decision tree needs training rows"));
    }
    let x = train.features();
    let labels = train.labels();
    let mut nodes = vec![Node::Leaf { class: TIE_CLASS }];
    // (node slot, rows reaching it, depth)
    let mut work: Vec<(usize, Vec<usize>, usize)> = vec![(0, (0..train.n_rows()).collect(), 0)];
    while let Some((slot, rows, depth)) = work.pop() {
        let c = counts(labels, &rows);
        let pure = c[0] == 0 || c[1] == 0;
        let capped = cfg.max_depth.is_some_and(|m| depth >= m);
        let split = if pure || capped {
            None
        } else {
            best_split(x, labels, &rows)
        };
        match split {
            None => nodes[slot] = Node::Leaf { class: majority(c) },
            Some(s) => {
                let (l_rows, r_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| x.get(i, s.feature) <= s.threshold);
                let (left, right) = (nodes.len(), nodes.len() + 1);
                nodes.push(Node::Leaf { class: TIE_CLASS });
                nodes.push(Node::Leaf { class: TIE_CLASS });
                nodes[slot] = Node::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                };
                work.push((right, r_rows, depth + 1));
                work.push((left, l_rows, depth + 1));
            }
        }
    }
    Ok(DecisionTree {
        nodes,
        n_features: train.n_features(),
    })
}

pub fn tree_predict(tree: &DecisionTree, rows: &Matrix) -> Result<Vec<u8>> {
    if rows.n_cols() != tree.n_features {
        return Err(Error::ShapeMismatch {
            expected: format!("{} features", tree.n_features),
            found: format!("{}", rows.n_cols()),
        });
    }
    Ok(rows.rows().map(|r| tree.classify(r)).collect())
}

impl DecisionTree {
    fn classify(&self, row: &[f64]) -> u8 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

impl Predictor for DecisionTree {
    fn predict_proba(&self, rows: &Matrix) -> Result<Vec<f64>> {
        Ok(tree_predict(self, rows)?.into_iter().map(f64::from).collect())
    }

    fn is_probabilistic(&self) -> bool {
        false
    }
}
