use std::fmt;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureVector, Label, CSV_HEADER};

use super::{leaf_class, DecisionTree, Node};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    Le,
    Gt,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: usize,
    pub op: Comparator,
    pub threshold: f64,
}

impl Condition {
    pub fn holds(&self, x: &[f64]) -> bool {
        match self.op {
            Comparator::Le => x[self.feature] <= self.threshold,
            Comparator::Gt => x[self.feature] > self.threshold,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            Comparator::Le => "<=",
            Comparator::Gt => ">",
        };
        write!(f, "{} {op} {}", CSV_HEADER[self.feature], self.threshold)
    }
}

/// A root-to-leaf path read as an implication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub class: Label,
    /// Training vectors reaching the leaf.
    pub support: usize,
    /// Fraction of `support` carrying `class`.
    pub confidence: f64,
}

impl Rule {
    pub fn matches(&self, fv: &FeatureVector) -> bool {
        let x = fv.values();
        self.conditions.iter().all(|c| c.holds(&x))
    }

    pub fn mentions(&self, feature: usize) -> bool {
        self.conditions.iter().any(|c| c.feature == feature)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conditions.is_empty() {
            f.write_str("TRUE")?;
        }
        for (i, c) in self.conditions.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(f, "{c}")?;
        }
        write!(
            f,
            " => {} (support {}, confidence {:.3})",
            self.class, self.support, self.confidence
        )
    }
}

/// One rule per leaf, left subtrees first.
pub fn extract_rules(tree: &DecisionTree) -> Vec<Rule> {
    fn walk(node: &Node, path: &mut Vec<Condition>, out: &mut Vec<Rule>) {
        match node {
            Node::Leaf { easy, hard } => {
                let class = leaf_class(*easy, *hard);
                let support = easy + hard;
                let hits = if class == Label::Hard { *hard } else { *easy };
                out.push(Rule {
                    conditions: path.clone(),
                    class,
                    support,
                    confidence: if support == 0 {
                        0.0
                    } else {
                        hits as f64 / support as f64
                    },
                });
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                for (op, child) in [(Comparator::Le, left), (Comparator::Gt, right)] {
                    path.push(Condition {
                        feature: *feature,
                        op,
                        threshold: *threshold,
                    });
                    walk(child, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(&tree.root, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::super::TrainParams;
    use super::*;

    #[test]
    fn single_leaf_gives_one_empty_rule() {
        let tree = DecisionTree {
            root: Node::Leaf { easy: 3, hard: 1 },
            params: TrainParams::default(),
        };
        let rules = extract_rules(&tree);
        assert_eq!(rules.len(), 1);
        assert!(rules[0].conditions.is_empty());
        assert_eq!(rules[0].class, Label::Easy);
        assert_eq!(rules[0].support, 4);
        assert!((rules[0].confidence - 0.75).abs() < 1e-12);
        assert!(rules[0].to_string().starts_with("TRUE => EASY"));
    }

    #[test]
    fn depth_one_tree_gives_two_rules() {
        let tree = DecisionTree {
            root: Node::Split {
                feature: 6,
                threshold: 3.5,
                left: Box::new(Node::Leaf { easy: 9, hard: 1 }),
                right: Box::new(Node::Leaf { easy: 2, hard: 8 }),
            },
            params: TrainParams::default(),
        };
        let rules = extract_rules(&tree);
        assert_eq!(rules.len(), 2);
        assert_eq!(
            rules[1].to_string(),
            "zmax > 3.5 => HARD (support 10, confidence 0.800)"
        );
        assert!(rules[0].mentions(6));
    }
}
