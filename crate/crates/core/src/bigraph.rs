//! Bipartite graphs, their adjacency and gram matrices, and text ingestion.
//!
//! Vertices are dense indices on each side. Adjacency is kept twice: one bit
//! row per u-vertex (over V) and one per v-vertex (over U), so both
//! neighbourhood directions are word-parallel intersections.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    u_count: usize,
    v_count: usize,
    edge_count: usize,
    u_rows: Vec<BitRow>,
    v_rows: Vec<BitRow>,
    u_labels: Option<Vec<String>>,
    v_labels: Option<Vec<String>>,
}

impl BipartiteGraph {
    /// Builds a graph from index pairs. Duplicate pairs collapse to one edge;
    /// vertices without edges are kept.
    pub fn from_edges(
        u_count: usize,
        v_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if u_count == 0 || v_count == 0 {
            return Err(Error::InvalidParameter(format!(
                "both sides need at least one vertex (got |U|={u_count}, |V|={v_count})"
            )));
        }
        let mut u_rows = vec![BitRow::new(v_count); u_count];
        let mut v_rows = vec![BitRow::new(u_count); v_count];
        let mut edge_count = 0;
        for (u, v) in edges {
            if u >= u_count {
                return Err(Error::IndexOutOfRange {
                    index: u,
                    len: u_count,
                });
            }
            if v >= v_count {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    len: v_count,
                });
            }
            if u_rows[u].insert(v) {
                v_rows[v].insert(u);
                edge_count += 1;
            }
        }
        Ok(Self {
            u_count,
            v_count,
            edge_count,
            u_rows,
            v_rows,
            u_labels: None,
            v_labels: None,
        })
    }

    /// The complete bipartite graph K_{m,n}.
    pub fn complete(u_count: usize, v_count: usize) -> Result<Self> {
        Self::from_edges(
            u_count,
            v_count,
            (0..u_count).flat_map(|u| (0..v_count).map(move |v| (u, v))),
        )
    }

    /// Attaches provenance labels. Lengths must match the vertex counts.
    pub fn with_labels(mut self, u_labels: Vec<String>, v_labels: Vec<String>) -> Result<Self> {
        if u_labels.len() != self.u_count || v_labels.len() != self.v_count {
            return Err(Error::InvalidParameter(
                "label tables must match vertex counts".into(),
            ));
        }
        self.u_labels = Some(u_labels);
        self.v_labels = Some(v_labels);
        Ok(self)
    }

    /// Parses the line-oriented edge-list format.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        ObservationLog::parse(text)?.to_graph()
    }

    /// Parses an observation log, returning the deduplicated graph and the
    /// raw record count `w`.
    pub fn from_observation_log(text: &str) -> Result<(Self, usize)> {
        let log = ObservationLog::parse(text)?;
        let graph = log.to_graph()?;
        Ok((graph, log.w()))
    }

    #[inline]
    pub fn u_count(&self) -> usize {
        self.u_count
    }

    #[inline]
    pub fn v_count(&self) -> usize {
        self.v_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.u_count && self.u_rows[u].contains(v)
    }

    /// Neighbours of `u` as a row over V.
    #[inline]
    pub fn u_row(&self, u: usize) -> &BitRow {
        &self.u_rows[u]
    }

    /// Neighbours of `v` as a row over U.
    #[inline]
    pub fn v_row(&self, v: usize) -> &BitRow {
        &self.v_rows[v]
    }

    pub fn u_degree(&self, u: usize) -> usize {
        self.u_rows[u].count_ones()
    }

    pub fn v_degree(&self, v: usize) -> usize {
        self.v_rows[v].count_ones()
    }

    pub fn u_label(&self, u: usize) -> String {
        match &self.u_labels {
            Some(labels) => labels[u].clone(),
            None => format!("u{u}"),
        }
    }

    pub fn v_label(&self, v: usize) -> String {
        match &self.v_labels {
            Some(labels) => labels[v].clone(),
            None => format!("v{v}"),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.u_rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |v| (u, v)))
    }

    /// `{ u : v_subset ⊆ N(u) }`.
    pub fn adjacent_to(&self, v_subset: &[usize]) -> Result<BitRow> {
        if v_subset.is_empty() {
            return Err(Error::InvalidParameter("v_subset must be nonempty".into()));
        }
        if let Some(&v) = v_subset.iter().find(|&&v| v >= self.v_count) {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: self.v_count,
            });
        }
        Ok(self.common_neighbourhood(v_subset))
    }

    /// Unchecked `adjacent_to`; an empty subset yields all of U.
    pub fn common_neighbourhood(&self, v_subset: &[usize]) -> BitRow {
        let mut acc = BitRow::full(self.u_count);
        for &v in v_subset {
            acc.intersect_with(&self.v_rows[v]);
        }
        acc
    }

    pub fn adjacency_matrix(&self) -> AdjacencyMatrix<'_> {
        AdjacencyMatrix { graph: self }
    }

    /// `Q·Qᵀ`, the U-side gram matrix.
    pub fn gram(&self) -> GramMatrix {
        GramMatrix::from_rows(&self.u_rows, Side::U)
    }

    /// `Qᵀ·Q`, the V-side gram matrix.
    pub fn gram_t(&self) -> GramMatrix {
        GramMatrix::from_rows(&self.v_rows, Side::V)
    }

    /// Serializes to the edge-list format: one `u v` line per edge, sorted
    /// lexicographically so output is byte-stable.
    pub fn to_edge_list(&self) -> String {
        let mut lines: Vec<String> = self
            .edges()
            .map(|(u, v)| format!("{} {}", self.u_label(u), self.v_label(v)))
            .collect();
        lines.sort();
        let mut out = String::new();
        for line in lines {
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

/// Read-only 0/1 view of a graph's adjacency, |U| rows by |V| columns.
#[derive(Clone, Copy, Debug)]
pub struct AdjacencyMatrix<'g> {
    graph: &'g BipartiteGraph,
}

impl AdjacencyMatrix<'_> {
    pub fn rows(&self) -> usize {
        self.graph.u_count
    }

    pub fn cols(&self) -> usize {
        self.graph.v_count
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        u8::from(self.graph.has_edge(i, j))
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn gram(&self) -> GramMatrix {
        self.graph.gram()
    }

    pub fn gram_t(&self) -> GramMatrix {
        self.graph.gram_t()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

/// Symmetric matrix of common-neighbourhood sizes; the diagonal holds degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    order: usize,
    side: Side,
    entries: Vec<u32>,
}

impl GramMatrix {
    fn from_rows(rows: &[BitRow], side: Side) -> Self {
        let n = rows.len();
        let mut entries = vec![0u32; n * n];
        for k in 0..n {
            entries[k * n + k] = rows[k].count_ones() as u32;
            for l in 0..k {
                let c = rows[k].intersection_count(&rows[l]) as u32;
                entries[k * n + l] = c;
                entries[l * n + k] = c;
            }
        }
        Self {
            order: n,
            side,
            entries,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn side(&self) -> Side {
        self.side
    }

    #[inline]
    pub fn entry(&self, k: usize, l: usize) -> u32 {
        self.entries[k * self.order + l]
    }

    /// Strictly-lower-triangular entries in row-major order.
    pub fn lower_triangle(&self) -> impl Iterator<Item = u32> + '_ {
        (1..self.order).flat_map(move |k| (0..k).map(move |l| self.entry(k, l)))
    }

    /// Largest off-diagonal entry, 0 for order < 2.
    pub fn max_off_diagonal(&self) -> u32 {
        self.lower_triangle().max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        self.entries
            .chunks(self.order.max(1))
            .map(<[u32]>::to_vec)
            .collect()
    }
}

/// A complete bipartite subgraph given by sorted index sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Biclique {
    pub u_set: Vec<usize>,
    pub v_set: Vec<usize>,
}

impl Biclique {
    pub fn weight(&self) -> usize {
        self.u_set.len()
    }

    pub fn size(&self) -> usize {
        self.v_set.len()
    }

    /// Both sides nonempty, sorted, and every cross pair an edge of `g`.
    pub fn is_valid_in(&self, g: &BipartiteGraph) -> bool {
        !self.u_set.is_empty()
            && !self.v_set.is_empty()
            && self.u_set.windows(2).all(|w| w[0] < w[1])
            && self.v_set.windows(2).all(|w| w[0] < w[1])
            && self
                .u_set
                .iter()
                .all(|&u| self.v_set.iter().all(|&v| g.has_edge(u, v)))
    }
}

/// Raw `(actor, target)` records in file order, repetitions kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservationLog {
    pub records: Vec<(String, String)>,
}

impl ObservationLog {
    pub fn parse(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::MalformedLine {
                    line: idx + 1,
                    tokens: tokens.len(),
                });
            }
            records.push((tokens[0].to_owned(), tokens[1].to_owned()));
        }
        Ok(Self { records })
    }

    /// Number of observations, repetitions included.
    pub fn w(&self) -> usize {
        self.records.len()
    }

    /// Indexes labels in first-appearance order and deduplicates edges.
    pub fn to_graph(&self) -> Result<BipartiteGraph> {
        if self.records.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut u_index: HashMap<&str, usize> = HashMap::new();
        let mut v_index: HashMap<&str, usize> = HashMap::new();
        let mut u_labels = Vec::new();
        let mut v_labels = Vec::new();
        let mut edges = Vec::with_capacity(self.records.len());
        for (a, t) in &self.records {
            let u = *u_index.entry(a).or_insert_with(|| {
                u_labels.push(a.clone());
                u_labels.len() - 1
            });
            let v = *v_index.entry(t).or_insert_with(|| {
                v_labels.push(t.clone());
                v_labels.len() - 1
            });
            edges.push((u, v));
        }
        BipartiteGraph::from_edges(u_labels.len(), v_labels.len(), edges)?
            .with_labels(u_labels, v_labels)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, t) in &self.records {
            let _ = writeln!(out, "{a} {t}");
        }
        out
    }
}
