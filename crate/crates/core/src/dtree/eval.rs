//! Classifier evaluation. HARD is the positive class.
//!
//! `EvalReport::fpr` / `fnr` follow the labeling study's orientation: FPR is
//! the share of HARD instances predicted EASY, FNR the share of EASY
//! instances predicted HARD. ROC and PR points use the usual definitions
//! (ROC x = EASY predicted HARD / all EASY, y = recall on HARD).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::features::{FeatureVector, Label};
use crate::rng::Stream;

use super::{train_c45, DecisionTree, TrainParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub recall: f64,
    pub precision: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    /// HARD predicted EASY over all HARD; `None` without HARD instances.
    pub fpr: Option<f64>,
    /// EASY predicted HARD over all EASY; `None` without EASY instances.
    pub fnr: Option<f64>,
    /// False when the dataset holds a single class and ROC is undefined.
    pub roc_defined: bool,
    pub roc_points: Vec<RocPoint>,
    pub pr_points: Vec<PrPoint>,
    pub auc: Option<f64>,
}

fn distinct_desc(scores: &[f64]) -> Vec<f64> {
    let mut t: Vec<f64> = scores.to_vec();
    t.sort_by(|a, b| b.total_cmp(a));
    t.dedup();
    t
}

/// Confusion counts `(tp, fp)` when predicting HARD for `score >= threshold`.
fn positives_at(scores: &[f64], is_hard: &[bool], threshold: f64) -> (usize, usize) {
    scores
        .iter()
        .zip(is_hard)
        .fold((0, 0), |(tp, fp), (&s, &h)| {
            if s >= threshold {
                if h {
                    (tp + 1, fp)
                } else {
                    (tp, fp + 1)
                }
            } else {
                (tp, fp)
            }
        })
}

/// ROC points from `+∞` (nothing predicted HARD) down to the lowest score
/// (everything predicted HARD). `None` unless both classes are present.
pub fn roc_curve(scores: &[f64], is_hard: &[bool]) -> Option<Vec<RocPoint>> {
    assert_eq!(scores.len(), is_hard.len());
    let p = is_hard.iter().filter(|&&h| h).count();
    let n = is_hard.len() - p;
    if p == 0 || n == 0 {
        return None;
    }
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    for t in distinct_desc(scores) {
        let (tp, fp) = positives_at(scores, is_hard, t);
        points.push(RocPoint {
            threshold: t,
            fpr: fp as f64 / n as f64,
            tpr: tp as f64 / p as f64,
        });
    }
    Some(points)
}

/// One (recall, precision) point per distinct score. `None` without HARD instances.
pub fn pr_curve(scores: &[f64], is_hard: &[bool]) -> Option<Vec<PrPoint>> {
    assert_eq!(scores.len(), is_hard.len());
    let p = is_hard.iter().filter(|&&h| h).count();
    if p == 0 {
        return None;
    }
    Some(
        distinct_desc(scores)
            .into_iter()
            .map(|t| {
                let (tp, fp) = positives_at(scores, is_hard, t);
                PrPoint {
                    threshold: t,
                    recall: tp as f64 / p as f64,
                    precision: tp as f64 / (tp + fp) as f64,
                }
            })
            .collect(),
    )
}

/// Trapezoidal area under ROC points ordered by decreasing threshold.
pub fn auc(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

fn hard_flags(dataset: &[FeatureVector]) -> Result<Vec<bool>> {
    dataset
        .iter()
        .enumerate()
        .map(|(row, fv)| match fv.label {
            Label::Unlabeled => Err(Error::UnlabeledVector { row }),
            l => Ok(l == Label::Hard),
        })
        .collect()
}

pub fn evaluate(tree: &DecisionTree, dataset: &[FeatureVector]) -> Result<EvalReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let is_hard = hard_flags(dataset)?;
    let (classes, scores): (Vec<Label>, Vec<f64>) =
        dataset.iter().map(|fv| tree.predict(fv)).unzip();
    let (mut hard_as_easy, mut easy_as_hard, mut correct) = (0usize, 0usize, 0usize);
    for (&c, &h) in classes.iter().zip(&is_hard) {
        match (h, c == Label::Hard) {
            (true, false) => hard_as_easy += 1,
            (false, true) => easy_as_hard += 1,
            _ => correct += 1,
        }
    }
    let p = is_hard.iter().filter(|&&h| h).count();
    let n = dataset.len() - p;
    let rate = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    let roc = roc_curve(&scores, &is_hard);
    Ok(EvalReport {
        n: dataset.len(),
        accuracy: correct as f64 / dataset.len() as f64,
        fpr: rate(hard_as_easy, p),
        fnr: rate(easy_as_hard, n),
        roc_defined: roc.is_some(),
        auc: roc.as_deref().map(auc),
        roc_points: roc.unwrap_or_default(),
        pr_points: pr_curve(&scores, &is_hard).unwrap_or_default(),
    })
}

/// Indices of each class, shuffled with one stream per class.
fn shuffled_by_class(is_hard: &[bool], seed: u64) -> [Vec<usize>; 2] {
    let mut easy: Vec<usize> = (0..is_hard.len()).filter(|&i| !is_hard[i]).collect();
    let mut hard: Vec<usize> = (0..is_hard.len()).filter(|&i| is_hard[i]).collect();
    Stream::new(seed, 0).shuffle(&mut easy);
    Stream::new(seed, 1).shuffle(&mut hard);
    [easy, hard]
}

/// Label-stratified split; `train_fraction` of each class goes to the first
/// set. Both outputs keep the input order.
pub fn stratified_split(
    dataset: &[FeatureVector],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<FeatureVector>, Vec<FeatureVector>)> {
    let (train, valid) = stratified_split_indices(&hard_flags(dataset)?, train_fraction, seed)?;
    let pick = |idx: Vec<usize>| idx.into_iter().map(|i| dataset[i].clone()).collect();
    Ok((pick(train), pick(valid)))
}

/// Index form of [`stratified_split`], for callers that carry side data.
pub fn stratified_split_indices(
    is_hard: &[bool],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(Error::InvalidParameter(
            "train fraction must lie in [0, 1]".into(),
        ));
    }
    let mut in_train = vec![false; is_hard.len()];
    for class in shuffled_by_class(is_hard, seed) {
        let take = (class.len() as f64 * train_fraction).round() as usize;
        for &i in &class[..take] {
            in_train[i] = true;
        }
    }
    Ok((0..is_hard.len()).partition(|&i| in_train[i]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub folds: Vec<EvalReport>,
    pub best_fold: usize,
    pub best: DecisionTree,
}

/// Stratified k-fold cross-validation. The best tree has the highest fold
/// accuracy; ties go to the lower FPR, then the earlier fold.
pub fn kfold_cv(
    dataset: &[FeatureVector],
    k: usize,
    params: TrainParams,
    seed: u64,
    exec: Exec,
) -> Result<CvResult> {
    if k < 2 || k > dataset.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} needs 2 <= k <= dataset size ({})",
            dataset.len()
        )));
    }
    let is_hard = hard_flags(dataset)?;
    let mut fold_of = vec![0usize; dataset.len()];
    let mut pos = 0;
    for class in shuffled_by_class(&is_hard, seed) {
        for i in class {
            fold_of[i] = pos % k;
            pos += 1;
        }
    }
    let runs = exec.map_range(k, |f| -> Result<(DecisionTree, EvalReport)> {
        let train: Vec<FeatureVector> = dataset
            .iter()
            .zip(&fold_of)
            .filter(|(_, &g)| g != f)
            .map(|(x, _)| x.clone())
            .collect();
        let test: Vec<FeatureVector> = dataset
            .iter()
            .zip(&fold_of)
            .filter(|(_, &g)| g == f)
            .map(|(x, _)| x.clone())
            .collect();
        let tree = train_c45(&train, params)?;
        let report = evaluate(&tree, &test)?;
        Ok((tree, report))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let best_fold = (0..k)
        .min_by(|&a, &b| {
            let (ra, rb) = (&runs[a].1, &runs[b].1);
            rb.accuracy
                .total_cmp(&ra.accuracy)
                .then(
                    ra.fpr
                        .unwrap_or(f64::INFINITY)
                        .total_cmp(&rb.fpr.unwrap_or(f64::INFINITY)),
                )
                .then(a.cmp(&b))
        })
        .expect("k >= 2");
    let best = runs[best_fold].0.clone();
    Ok(CvResult {
        folds: runs.into_iter().map(|r| r.1).collect(),
        best_fold,
        best,
    })
}

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

pub fn write_roc_csv<W: Write>(mut out: W, points: &[RocPoint]) -> std::io::Result<()> {
    writeln!(out, "threshold,fpr,tpr")?;
    for p in points {
        writeln!(out, "{},{},{}", num(p.threshold), num(p.fpr), num(p.tpr))?;
    }
    Ok(())
}

pub fn write_pr_csv<W: Write>(mut out: W, points: &[PrPoint]) -> std::io::Result<()> {
    writeln!(out, "threshold,recall,precision")?;
    for p in points {
        writeln!(
            out,
            "{},{},{}",
            num(p.threshold),
            num(p.recall),
            num(p.precision)
        )?;
    }
    Ok(())
}
