//! Depth-capped CART over the sixteen order-statistic features.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::FeatureRecord;

pub const FEATURES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Node {
    /// `x[feature] <= threshold` goes to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: String,
        counts: BTreeMap<String, u64>,
    },
}

/// Nodes in preorder; the root is `nodes[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub max_depth: usize,
    pub nodes: Vec<Node>,
}

struct Sample<'a> {
    x: &'a [f64; FEATURES],
    label: usize,
}

pub fn train_cart(records: &[FeatureRecord], max_depth: usize) -> Result<DecisionTree> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut labels: Vec<&str> = Vec::with_capacity(records.len());
    for r in records {
        match &r.label {
            Some(l) => labels.push(l),
            None => return Err(Error::Unlabeled(r.id.clone())),
        }
    }
    let mut names = labels.clone();
    names.sort_unstable();
    names.dedup();
    let samples: Vec<Sample> = records
        .iter()
        .zip(&labels)
        .map(|(r, l)| Sample {
            x: &r.x,
            label: names.binary_search(l).unwrap(),
        })
        .collect();
    let mut builder = Builder {
        names: &names,
        max_depth,
        nodes: Vec::new(),
    };
    let all: Vec<&Sample> = samples.iter().collect();
    builder.grow(all, 0);
    Ok(DecisionTree {
        max_depth,
        nodes: builder.nodes,
    })
}

struct Builder<'a> {
    names: &'a [&'a str],
    max_depth: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, samples: Vec<&Sample>, depth: usize) -> usize {
        let at = self.nodes.len();
        let counts = tally(&samples, self.names.len());
        let split = if depth < self.max_depth {
            best_split(&samples, &counts)
        } else {
            None
        };
        let Some((feature, threshold)) = split else {
            let best = (0..counts.len()).max_by_key(|&c| (counts[c], std::cmp::Reverse(c))).unwrap();
            self.nodes.push(Node::Leaf {
                label: self.names[best].to_string(),
                counts: counts
                    .iter()
                    .enumerate()
                    .filter(|p| *p.1 > 0)
                    .map(|(c, &n)| (self.names[c].to_string(), n))
                    .collect(),
            });
            return at;
        };
        self.nodes.push(Node::Split {
            feature,
            threshold,
            left: 0,
            right: 0,
        });
        let (lo, hi): (Vec<&Sample>, Vec<&Sample>) = samples.into_iter().partition(|s| s.x[feature] <= threshold);
        let l = self.grow(lo, depth + 1);
        let r = self.grow(hi, depth + 1);
        if let Node::Split { left, right, .. } = &mut self.nodes[at] {
            (*left, *right) = (l, r);
        }
        at
    }
}

fn tally(samples: &[&Sample], classes: usize) -> Vec<u64> {
    let mut counts = vec![0; classes];
    for s in samples {
        counts[s.label] += 1;
    }
    counts
}

fn sum_sq(counts: &[u64]) -> u128 {
    counts.iter().map(|&c| u128::from(c) * u128::from(c)).sum()
}

/// Purity of a partition as an exact fraction: `sum_sides sum_c n_c^2 / n_side`.
/// Larger is better; maximizing it minimizes the weighted Gini impurity.
#[derive(Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn better_than(self, other: Purity) -> bool {
        self.num * other.den > other.num * self.den
    }
}

fn best_split(samples: &[&Sample], counts: &[u64]) -> Option<(usize, f64)> {
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let n = samples.len() as u128;
    let mut best = Purity {
        num: sum_sq(counts),
        den: n,
    };
    let mut choice = None;
    let mut order: Vec<&Sample> = samples.to_vec();
    for f in 0..FEATURES {
        order.sort_by(|a, b| a.x[f].total_cmp(&b.x[f]));
        let mut left = vec![0u64; counts.len()];
        for i in 0..order.len() - 1 {
            left[order[i].label] += 1;
            let (a, b) = (order[i].x[f], order[i + 1].x[f]);
            if a == b {
                continue;
            }
            let right: Vec<u64> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
            let (nl, nr) = (i as u128 + 1, n - i as u128 - 1);
            let cand = Purity {
                num: sum_sq(&left) * nr + sum_sq(&right) * nl,
                den: nl * nr,
            };
            if cand.better_than(best) {
                best = cand;
                choice = Some((f, a + (b - a) / 2.0));
            }
        }
    }
    choice
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64; FEATURES]) -> &str {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { label, .. } => return label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Length of the longest root-to-leaf path in edges.
    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, left).max(walk(t, right)),
            }
        }
        walk(self, 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trees serialize")
    }

    /// Parses and checks that the nodes form a single tree rooted at 0.
    pub fn from_json(text: &str) -> Result<DecisionTree> {
        let tree: DecisionTree = serde_json::from_str(text).map_err(|e| Error::MalformedTree(e.to_string()))?;
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::MalformedTree("no nodes".into()));
        }
        let mut parents = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Split {
                feature, left, right, ..
            } = *node
            {
                if feature >= FEATURES {
                    return Err(Error::MalformedTree(format!("node {i} splits on feature {feature}")));
                }
                for child in [left, right] {
                    if child <= i || child >= self.nodes.len() {
                        return Err(Error::MalformedTree(format!("node {i} has child {child}")));
                    }
                    parents[child] += 1;
                }
            }
        }
        if parents[0] != 0 || parents[1..].iter().any(|&p| p != 1) {
            return Err(Error::MalformedTree("nodes do not form a single tree".into()));
        }
        Ok(())
    }

    /// Indented rules, one line per node.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_node(0, 0, &mut out);
        out
    }

    fn render_node(&self, i: usize, depth: usize, out: &mut String) {
        let pad = "|   ".repeat(depth);
        match &self.nodes[i] {
            Node::Leaf { label, counts } => {
                let total: u64 = counts.values().sum();
                let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
                let _ = writeln!(out, "{pad}class = {label}  (n = {total}; {})", parts.join(", "));
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let _ = writeln!(out, "{pad}X[{feature}] <= {threshold:.6}");
                self.render_node(*left, depth + 1, out);
                let _ = writeln!(out, "{pad}X[{feature}] >  {threshold:.6}");
                self.render_node(*right, depth + 1, out);
            }
        }
    }
}

pub fn predict<'t>(tree: &'t DecisionTree, record: &FeatureRecord) -> &'t str {
    tree.predict(&record.x)
}

/// Share of labeled records the tree gets right.
pub fn training_accuracy(tree: &DecisionTree, records: &[FeatureRecord]) -> Result<Ratio<u64>> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut right = 0;
    for r in records {
        let label = r.label.as_deref().ok_or_else(|| Error::Unlabeled(r.id.clone()))?;
        if tree.predict(&r.x) == label {
            right += 1;
        }
    }
    Ok(Ratio::new(right, records.len() as u64))
}
