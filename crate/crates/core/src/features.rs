//! Per-instance feature vectors, the order parameter and EASY/HARD labels.
//!
//! Every feature except `|U|`, `|V|`, `|E|` and the social degree is read off
//! the two gram matrices, so extraction is polynomial.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bigraph::{BipartiteGraph, GramMatrix, Side};
use crate::decimal;
use crate::error::{Error, Result};
use crate::solver::{size_max_via_gram, weight_upper_bound, SearchBudget, SolveReport, Solver};

/// Minimum gram entry counted as a 2-weight (or 2-size) biclique.
pub const PAIR_THRESHOLD: u32 = 2;

/// Column names, in feature-index order, followed by `label`.
pub const CSV_HEADER: [&str; 10] = [
    "u", "v", "e", "comb", "social", "wmax", "zmax", "fw2", "fs2", "label",
];

pub const FEATURE_COUNT: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Easy,
    Hard,
    Unlabeled,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Easy => "EASY",
            Label::Hard => "HARD",
            Label::Unlabeled => "UNLABELED",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EASY" => Ok(Label::Easy),
            "HARD" => Ok(Label::Hard),
            "UNLABELED" | "" => Ok(Label::Unlabeled),
            other => Err(Error::Csv(format!("unknown label `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub u_card: u64,
    pub v_card: u64,
    pub e_card: u64,
    pub comb_estimate: u64,
    pub social_degree: Ratio<u64>,
    pub weight_max: u64,
    pub size_max: u64,
    pub freq_weight2: u64,
    pub freq_size2: u64,
    pub label: Label,
}

impl FeatureVector {
    /// The nine features as reals, in `CSV_HEADER` order.
    pub fn values(&self) -> [f64; FEATURE_COUNT] {
        [
            self.u_card as f64,
            self.v_card as f64,
            self.e_card as f64,
            self.comb_estimate as f64,
            *self.social_degree.numer() as f64 / *self.social_degree.denom() as f64,
            self.weight_max as f64,
            self.size_max as f64,
            self.freq_weight2 as f64,
            self.freq_size2 as f64,
        ]
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    fn to_record(&self) -> [String; 10] {
        [
            self.u_card.to_string(),
            self.v_card.to_string(),
            self.e_card.to_string(),
            self.comb_estimate.to_string(),
            decimal::render(&self.social_degree, 6),
            self.weight_max.to_string(),
            self.size_max.to_string(),
            self.freq_weight2.to_string(),
            self.freq_size2.to_string(),
            self.label.to_string(),
        ]
    }

    fn from_record(rec: &csv::StringRecord, row: usize) -> Result<Self> {
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Csv(format!(
                "row {row}: expected 10 fields, found {}",
                rec.len()
            )));
        }
        let int = |i: usize| -> Result<u64> {
            rec[i].trim().parse().map_err(|_| {
                Error::Csv(format!(
                    "row {row}: bad `{}` value `{}`",
                    CSV_HEADER[i], &rec[i]
                ))
            })
        };
        let social = decimal::parse(&rec[4])
            .ok_or_else(|| Error::Csv(format!("row {row}: bad `social` value `{}`", &rec[4])))?;
        Ok(Self {
            u_card: int(0)?,
            v_card: int(1)?,
            e_card: int(2)?,
            comb_estimate: int(3)?,
            social_degree: social,
            weight_max: int(5)?,
            size_max: int(6)?,
            freq_weight2: int(7)?,
            freq_size2: int(8)?,
            label: rec[9].parse()?,
        })
    }
}

pub fn write_features_csv<W: Write>(out: W, rows: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)
        .map_err(|e| Error::Csv(e.to_string()))?;
    for fv in rows {
        w.write_record(fv.to_record())
            .map_err(|e| Error::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

pub fn read_features_csv<R: Read>(input: R) -> Result<Vec<FeatureVector>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    if headers.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(Error::Csv(format!(
            "unexpected header `{}`, want `{}`",
            headers.iter().collect::<Vec<_>>().join(","),
            CSV_HEADER.join(",")
        )));
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
            FeatureVector::from_record(&rec, i + 2)
        })
        .collect()
}

/// Product of the three largest strictly-lower-triangular entries of the
/// U-side gram matrix; fewer entries multiply what exists, none gives 0.
pub fn comb_estimate(gram_u: &GramMatrix) -> u64 {
    assert_eq!(gram_u.side(), Side::U);
    let mut lower: Vec<u32> = gram_u.lower_triangle().collect();
    if lower.is_empty() {
        return 0;
    }
    lower.sort_unstable_by(|a, b| b.cmp(a));
    lower.iter().take(3).map(|&x| u64::from(x)).product()
}

/// `(|U|·|V|) / w` as an exact rational.
pub fn social_degree(u_card: u64, v_card: u64, w: u64) -> Result<Ratio<u64>> {
    if w == 0 {
        return Err(Error::ZeroObservations);
    }
    Ok(Ratio::new(u_card * v_card, w))
}

/// Strictly-lower-triangular entries `>= threshold`.
pub fn count_pairs(gram: &GramMatrix, threshold: u32) -> u64 {
    gram.lower_triangle().filter(|&x| x >= threshold).count() as u64
}

/// Number of 2-weight bicliques (u-pairs sharing at least `PAIR_THRESHOLD` neighbours).
pub fn count_weight2(gram_u: &GramMatrix) -> u64 {
    assert_eq!(gram_u.side(), Side::U);
    count_pairs(gram_u, PAIR_THRESHOLD)
}

/// Number of 2-size bicliques (v-pairs sharing at least `PAIR_THRESHOLD` neighbours).
pub fn count_size2(gram_v: &GramMatrix) -> u64 {
    assert_eq!(gram_v.side(), Side::V);
    count_pairs(gram_v, PAIR_THRESHOLD)
}

/// Computes all nine features; `w` defaults to `|E|`.
pub fn extract_features(g: &BipartiteGraph, w: Option<usize>) -> Result<FeatureVector> {
    let gram_u = g.gram();
    let gram_v = g.gram_t();
    let (u, v, e) = (
        g.u_count() as u64,
        g.v_count() as u64,
        g.edge_count() as u64,
    );
    let w = w.map_or(e, |w| w as u64);
    Ok(FeatureVector {
        u_card: u,
        v_card: v,
        e_card: e,
        comb_estimate: comb_estimate(&gram_u),
        social_degree: social_degree(u, v, w)?,
        weight_max: weight_upper_bound(&gram_v, 2) as u64,
        size_max: size_max_via_gram(&gram_u) as u64,
        freq_weight2: count_weight2(&gram_u),
        freq_size2: count_size2(&gram_v),
        label: Label::Unlabeled,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderParameter {
    pub pi: Ratio<u64>,
    /// `log2(pi)`, or negative infinity when `pi = 0`.
    pub pi_log2: f64,
}

impl OrderParameter {
    pub fn new(size_max: u64, v_card: u64) -> Self {
        assert!(v_card >= 1, "order parameter needs |V| >= 1");
        let pi = Ratio::new(size_max, v_card);
        let pi_log2 = if size_max == 0 {
            f64::NEG_INFINITY
        } else {
            (size_max as f64 / v_card as f64).log2()
        };
        Self { pi, pi_log2 }
    }

    pub fn is_zero(&self) -> bool {
        *self.pi.numer() == 0
    }
}

/// `π = z_max / |V|`.
pub fn order_parameter(fv: &FeatureVector) -> OrderParameter {
    OrderParameter::new(fv.size_max, fv.v_card)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub label: Label,
    pub report: SolveReport,
}

/// EASY when a size-maximal, weight-maximal search finishes within `budget`.
pub fn label_instance(g: &BipartiteGraph, budget: SearchBudget) -> Result<Labeling> {
    let solver = Solver::new(g);
    let z_max = solver.z_max();
    if z_max < 2 {
        return Ok(Labeling {
            label: Label::Easy,
            report: SolveReport::trivial_no(),
        });
    }
    let report = solver.find_max_weight_of_size(z_max, budget)?;
    let label = if report.budget_exhausted {
        Label::Hard
    } else {
        Label::Easy
    };
    Ok(Labeling { label, report })
}
