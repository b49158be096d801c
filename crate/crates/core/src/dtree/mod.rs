//! C4.5-style decision trees over feature vectors.
//!
//! Numeric attributes only, binary `<=` / `>` splits. For each feature the
//! threshold with the highest information gain is found (midpoints between
//! consecutive distinct values); among features whose best gain is at least
//! the average, the one with the highest gain ratio is chosen. Ties go to the
//! lowest feature index, then the lowest threshold. Optional error-based
//! pruning uses C4.5's upper confidence limit at CF = 0.25.

mod eval;
mod rules;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Label, CSV_HEADER, FEATURE_COUNT};

pub use eval::{
    auc, evaluate, kfold_cv, pr_curve, roc_curve, stratified_split, stratified_split_indices,
    write_pr_csv, write_roc_csv, CvResult, EvalReport, PrPoint, RocPoint,
};
pub use rules::{extract_rules, Comparator, Condition, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub min_leaf: usize,
    pub max_depth: usize,
    pub min_gain_ratio: f64,
    pub prune: bool,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            min_leaf: 2,
            max_depth: 16,
            min_gain_ratio: 0.0,
            prune: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        /// `value <= threshold`
        left: Box<Node>,
        /// `value > threshold`
        right: Box<Node>,
    },
    Leaf {
        easy: usize,
        hard: usize,
    },
}

impl Node {
    fn leaf(counts: Counts) -> Self {
        Node::Leaf {
            easy: counts.easy,
            hard: counts.hard,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn counts(&self) -> Counts {
        match self {
            Node::Leaf { easy, hard } => Counts {
                easy: *easy,
                hard: *hard,
            },
            Node::Split { left, right, .. } => left.counts().add(right.counts()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

/// Majority class of a leaf; ties go to EASY.
pub fn leaf_class(easy: usize, hard: usize) -> Label {
    if hard > easy {
        Label::Hard
    } else {
        Label::Easy
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
    pub params: TrainParams,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    easy: usize,
    hard: usize,
}

impl Counts {
    fn total(self) -> usize {
        self.easy + self.hard
    }

    fn add(self, o: Counts) -> Counts {
        Counts {
            easy: self.easy + o.easy,
            hard: self.hard + o.hard,
        }
    }

    fn sub(self, o: Counts) -> Counts {
        Counts {
            easy: self.easy - o.easy,
            hard: self.hard - o.hard,
        }
    }

    fn push(&mut self, hard: bool) {
        if hard {
            self.hard += 1;
        } else {
            self.easy += 1;
        }
    }

    fn entropy(self) -> f64 {
        let n = self.total() as f64;
        [self.easy, self.hard]
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum()
    }

    fn errors(self) -> usize {
        self.easy.min(self.hard)
    }
}

/// Training rows as plain feature arrays plus `is_hard`.
struct Sample {
    x: [f64; FEATURE_COUNT],
    hard: bool,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
    ratio: f64,
}

pub fn train_c45(dataset: &[FeatureVector], params: TrainParams) -> Result<DecisionTree> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let samples = dataset
        .iter()
        .enumerate()
        .map(|(row, fv)| match fv.label {
            Label::Unlabeled => Err(Error::UnlabeledVector { row }),
            label => Ok(Sample {
                x: fv.values(),
                hard: label == Label::Hard,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    if params.min_leaf == 0 {
        return Err(Error::InvalidParameter(
            "min_leaf must be at least 1".into(),
        ));
    }
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    let mut root = grow(&samples, &mut idx, params, 0);
    if params.prune {
        prune(&mut root);
    }
    Ok(DecisionTree { root, params })
}

fn tally(samples: &[Sample], idx: &[usize]) -> Counts {
    let mut c = Counts::default();
    for &i in idx {
        c.push(samples[i].hard);
    }
    c
}

fn grow(samples: &[Sample], idx: &mut [usize], params: TrainParams, depth: usize) -> Node {
    let counts = tally(samples, idx);
    if counts.easy == 0
        || counts.hard == 0
        || depth >= params.max_depth
        || counts.total() < 2 * params.min_leaf
    {
        return Node::leaf(counts);
    }
    let Some(best) = best_split(samples, idx, counts, params) else {
        return Node::leaf(counts);
    };
    let (feature, threshold) = (best.feature, best.threshold);
    idx.sort_by(|&a, &b| {
        let (la, lb) = (
            samples[a].x[feature] <= threshold,
            samples[b].x[feature] <= threshold,
        );
        lb.cmp(&la).then(a.cmp(&b))
    });
    let cut = idx.partition_point(|&i| samples[i].x[feature] <= threshold);
    let (left_idx, right_idx) = idx.split_at_mut(cut);
    let left = grow(samples, left_idx, params, depth + 1);
    let right = grow(samples, right_idx, params, depth + 1);
    Node::Split {
        feature,
        threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

fn best_split(
    samples: &[Sample],
    idx: &[usize],
    counts: Counts,
    params: TrainParams,
) -> Option<Candidate> {
    let base = counts.entropy();
    let n = counts.total() as f64;
    let mut per_feature: Vec<Candidate> = Vec::new();
    let mut order: Vec<usize> = idx.to_vec();

    for feature in 0..FEATURE_COUNT {
        order.sort_by(|&a, &b| samples[a].x[feature].total_cmp(&samples[b].x[feature]));
        let mut left = Counts::default();
        let mut best: Option<Candidate> = None;
        for k in 0..order.len() - 1 {
            left.push(samples[order[k]].hard);
            let (lo, hi) = (
                samples[order[k]].x[feature],
                samples[order[k + 1]].x[feature],
            );
            if lo == hi {
                continue;
            }
            let right = counts.sub(left);
            if left.total() < params.min_leaf || right.total() < params.min_leaf {
                continue;
            }
            let (pl, pr) = (left.total() as f64 / n, right.total() as f64 / n);
            let gain = base - pl * left.entropy() - pr * right.entropy();
            if best.is_none_or(|b| gain > b.gain + 1e-12) {
                let split_info = -(pl * pl.log2() + pr * pr.log2());
                let threshold = lo + (hi - lo) / 2.0;
                best = Some(Candidate {
                    feature,
                    threshold,
                    gain,
                    ratio: gain / split_info,
                });
            }
        }
        if let Some(c) = best.filter(|c| c.gain > 1e-12) {
            per_feature.push(c);
        }
    }
    if per_feature.is_empty() {
        return None;
    }
    let avg_gain = per_feature.iter().map(|c| c.gain).sum::<f64>() / per_feature.len() as f64;
    per_feature
        .into_iter()
        .filter(|c| c.gain >= avg_gain - 1e-12)
        .fold(None, |acc: Option<Candidate>, c| match acc {
            Some(a) if c.ratio <= a.ratio + 1e-12 => Some(a),
            _ => Some(c),
        })
        .filter(|c| c.ratio > 0.0 && c.ratio >= params.min_gain_ratio)
}

/// Upper confidence bound on errors (C4.5, CF = 0.25), as extra errors over `e`.
fn added_errors(n: f64, e: f64) -> f64 {
    const CF: f64 = 0.25;
    // Standard normal quantile at 1 - CF.
    const Z: f64 = 0.674_489_750_196_081_7;
    if e < 1.0 {
        let base = n * (1.0 - CF.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let f = (e + 0.5) / n;
    let r = (f + Z * Z / (2.0 * n) + Z * (f / n - f * f / n + Z * Z / (4.0 * n * n)).sqrt())
        / (1.0 + Z * Z / n);
    r * n - e
}

fn estimated_errors(node: &Node) -> f64 {
    match node {
        Node::Leaf { easy, hard } => {
            let c = Counts {
                easy: *easy,
                hard: *hard,
            };
            c.errors() as f64 + added_errors(c.total() as f64, c.errors() as f64)
        }
        Node::Split { left, right, .. } => estimated_errors(left) + estimated_errors(right),
    }
}

/// Bottom-up subtree replacement.
fn prune(node: &mut Node) {
    if let Node::Split { left, right, .. } = node {
        prune(left);
        prune(right);
        let counts = node.counts();
        let as_leaf =
            counts.errors() as f64 + added_errors(counts.total() as f64, counts.errors() as f64);
        if as_leaf <= estimated_errors(node) + 0.1 {
            *node = Node::leaf(counts);
        }
    }
}

impl DecisionTree {
    /// Class and Laplace-smoothed HARD probability of the reached leaf.
    pub fn predict(&self, fv: &FeatureVector) -> (Label, f64) {
        self.predict_values(&fv.values())
    }

    pub fn predict_values(&self, x: &[f64; FEATURE_COUNT]) -> (Label, f64) {
        let mut node = &self.root;
        loop {
            match node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
                Node::Leaf { easy, hard } => {
                    let p = (*hard as f64 + 1.0) / ((easy + hard) as f64 + 2.0);
                    return (leaf_class(*easy, *hard), p);
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// One node per line; a split's `<=` child is listed before its `>` child.
    pub fn to_text(&self) -> String {
        fn walk(node: &Node, indent: usize, out: &mut String) {
            let pad = "  ".repeat(indent);
            match node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let _ = writeln!(out, "{pad}{} <= {threshold}", CSV_HEADER[*feature]);
                    walk(left, indent + 1, out);
                    walk(right, indent + 1, out);
                }
                Node::Leaf { easy, hard } => {
                    let _ = writeln!(
                        out,
                        "{pad}leaf: {} ({easy}, {hard})",
                        leaf_class(*easy, *hard)
                    );
                }
            }
        }
        let mut out = String::new();
        walk(&self.root, 0, &mut out);
        out
    }

    /// Parses the output of [`DecisionTree::to_text`]. Training parameters
    /// are not part of the text form and come back as defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let body = l.trim_start_matches(' ');
                ((l.len() - body.len()) / 2, body)
            })
            .collect();
        let mut pos = 0;
        let root = parse_node(&lines, &mut pos, 0)?;
        if pos != lines.len() {
            return Err(Error::InvalidParameter(format!(
                "trailing tree line {}",
                pos + 1
            )));
        }
        Ok(Self {
            root,
            params: TrainParams::default(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn parse_node(lines: &[(usize, &str)], pos: &mut usize, depth: usize) -> Result<Node> {
    let bad = |line: usize, what: &str| {
        Error::InvalidParameter(format!("tree line {}: {what}", line + 1))
    };
    let &(indent, body) = lines.get(*pos).ok_or_else(|| bad(*pos, "unexpected end"))?;
    if indent != depth {
        return Err(bad(*pos, "wrong indentation"));
    }
    let line = *pos;
    *pos += 1;
    if let Some(rest) = body.strip_prefix("leaf: ") {
        let open = rest.find('(').ok_or_else(|| bad(line, "missing counts"))?;
        let inner = rest[open + 1..].trim_end_matches(')');
        let (e, h) = inner
            .split_once(',')
            .ok_or_else(|| bad(line, "missing counts"))?;
        let easy = e.trim().parse().map_err(|_| bad(line, "bad easy count"))?;
        let hard = h.trim().parse().map_err(|_| bad(line, "bad hard count"))?;
        return Ok(Node::Leaf { easy, hard });
    }
    let (name, thr) = body
        .split_once(" <= ")
        .ok_or_else(|| bad(line, "expected `feature <= threshold`"))?;
    let feature = CSV_HEADER[..FEATURE_COUNT]
        .iter()
        .position(|&h| h == name)
        .ok_or_else(|| bad(line, "unknown feature"))?;
    let threshold: f64 = thr.parse().map_err(|_| bad(line, "bad threshold"))?;
    let left = parse_node(lines, pos, depth + 1)?;
    let right = parse_node(lines, pos, depth + 1)?;
    Ok(Node::Split {
        feature,
        threshold,
        left: Box::new(left),
        right: Box::new(right),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    pub(crate) fn fv(v: u64, zmax: u64, label: Label) -> FeatureVector {
        FeatureVector {
            u_card: 10,
            v_card: v,
            e_card: 20,
            comb_estimate: 1,
            social_degree: Ratio::from_integer(1),
            weight_max: 2,
            size_max: zmax,
            freq_weight2: 0,
            freq_size2: 0,
            label,
        }
    }

    #[test]
    fn pure_dataset_is_a_single_leaf() {
        let data: Vec<_> = (0..10).map(|i| fv(10 + i, i % 4, Label::Easy)).collect();
        let tree = train_c45(&data, TrainParams::default()).unwrap();
        assert_eq!(tree.root, Node::Leaf { easy: 10, hard: 0 });
        let (class, p) = tree.predict(&fv(100, 100, Label::Unlabeled));
        assert_eq!(class, Label::Easy);
        assert!((p - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn planted_threshold_gives_depth_one() {
        // zmax in 0..=7, HARD iff zmax > 3; v is noise uncorrelated with label.
        let data: Vec<_> = (0..80)
            .map(|i| {
                let z = (i % 8) as u64;
                let v = 20 + ((i * 7) % 13) as u64;
                fv(v, z, if z > 3 { Label::Hard } else { Label::Easy })
            })
            .collect();
        let tree = train_c45(
            &data,
            TrainParams {
                min_gain_ratio: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(tree.depth(), 1);
        match &tree.root {
            Node::Split {
                feature, threshold, ..
            } => {
                assert_eq!(CSV_HEADER[*feature], "zmax");
                assert!(*threshold > 3.0 && *threshold < 4.0);
            }
            other => panic!("expected a split, got {other:?}"),
        }
    }

    #[test]
    fn boundary_goes_left() {
        let tree = DecisionTree {
            root: Node::Split {
                feature: 6,
                threshold: 3.0,
                left: Box::new(Node::Leaf { easy: 5, hard: 0 }),
                right: Box::new(Node::Leaf { easy: 0, hard: 5 }),
            },
            params: TrainParams::default(),
        };
        assert_eq!(tree.predict(&fv(10, 3, Label::Unlabeled)).0, Label::Easy);
        assert_eq!(tree.predict(&fv(10, 4, Label::Unlabeled)).0, Label::Hard);
    }

    #[test]
    fn rejects_bad_datasets() {
        assert!(matches!(
            train_c45(&[], TrainParams::default()),
            Err(Error::EmptyDataset)
        ));
        let data = vec![fv(1, 1, Label::Easy), fv(1, 1, Label::Unlabeled)];
        assert!(matches!(
            train_c45(&data, TrainParams::default()),
            Err(Error::UnlabeledVector { row: 1 })
        ));
    }

    #[test]
    fn depth_limit_is_respected() {
        let data: Vec<_> = (0..64)
            .map(|i| {
                fv(
                    i,
                    i % 5,
                    if (i * 37) % 3 == 0 {
                        Label::Hard
                    } else {
                        Label::Easy
                    },
                )
            })
            .collect();
        let tree = train_c45(
            &data,
            TrainParams {
                max_depth: 2,
                min_leaf: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(tree.depth() <= 2);
    }

    #[test]
    fn text_and_json_round_trip() {
        let data: Vec<_> = (0..60)
            .map(|i| {
                let (v, z) = (30 + (i % 40), i % 7);
                let hard = z > 3 && v > 57;
                fv(v, z, if hard { Label::Hard } else { Label::Easy })
            })
            .collect();
        let tree = train_c45(&data, TrainParams::default()).unwrap();
        let text = tree.to_text();
        assert!(text.lines().any(|l| l.trim_start().starts_with("leaf: ")));
        assert_eq!(DecisionTree::from_text(&text).unwrap().root, tree.root);
        assert_eq!(
            DecisionTree::from_json(&tree.to_json().unwrap()).unwrap(),
            tree
        );
        assert!(DecisionTree::from_text("bogus <= 1\n").is_err());
    }

    #[test]
    fn pruning_collapses_noise_splits() {
        // Label noise only: every split is spurious.
        let data: Vec<_> = (0..200)
            .map(|i| {
                fv(
                    i,
                    i % 9,
                    if (i * 7919) % 10 == 0 {
                        Label::Hard
                    } else {
                        Label::Easy
                    },
                )
            })
            .collect();
        let grown = train_c45(
            &data,
            TrainParams {
                min_leaf: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let pruned = train_c45(
            &data,
            TrainParams {
                min_leaf: 1,
                prune: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(pruned.root.leaf_count() < grown.root.leaf_count());
    }

    #[test]
    fn added_errors_reference_values() {
        // Normal-approximation bound, recomputed by hand for 1 error in 6 cases.
        assert!((added_errors(6.0, 1.0) - 1.303_506_558).abs() < 1e-6);
        assert!((added_errors(4.0, 3.6) - 0.4).abs() < 1e-12);
        assert!((added_errors(6.0, 0.0) - 6.0 * (1.0 - 0.25f64.powf(1.0 / 6.0))).abs() < 1e-12);
    }
}
