//! Backtracking biclique search with blacklist pruning.
//!
//! The search walks candidate v-subsets round by round (`r = 2..=z`) in
//! lexicographic order. Every candidate whose common neighbourhood is
//! actually evaluated costs one "combination explored"; candidates pruned by
//! the blacklist are tallied separately. Counts depend only on the graph and
//! the request, never on hardware or thread count.

mod oracle;
mod search;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bigraph::{Biclique, BipartiteGraph, GramMatrix, Side};
use crate::error::{Error, Result};

pub use oracle::{brute_force_oracle, BruteForceOracle, DEFAULT_ORACLE_CAP};
pub use search::lex_rank;

/// Cap on combinations the solver may explore.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_combinations: Option<u64>,
}

impl SearchBudget {
    pub const fn unlimited() -> Self {
        Self {
            max_combinations: None,
        }
    }

    pub fn bounded(max_combinations: u64) -> Result<Self> {
        if max_combinations == 0 {
            return Err(Error::InvalidParameter("budget must be positive".into()));
        }
        Ok(Self {
            max_combinations: Some(max_combinations),
        })
    }

    pub fn is_bounded(&self) -> bool {
        self.max_combinations.is_some()
    }

    #[inline]
    fn allows(&self, explored: u64) -> bool {
        self.max_combinations.is_none_or(|max| explored < max)
    }
}

/// How the blacklist filters candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pruning {
    /// Skip a candidate when any blacklisted set is a subset of it.
    #[default]
    Subset,
    /// Skip only on exact membership. Entries are always smaller than the
    /// candidates of later rounds, so this never fires.
    Literal,
    /// No blacklist at all.
    Off,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub pruning: Pruning,
    /// Answer requests with `z > z_max` (from the U-side gram matrix) as
    /// `NoSolution` without searching.
    pub guarantee_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Found(Biclique),
    NoSolution,
}

impl Outcome {
    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    pub fn biclique(&self) -> Option<&Biclique> {
        match self {
            Outcome::Found(b) => Some(b),
            Outcome::NoSolution => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub combinations_explored: u64,
    pub blacklist_skips: u64,
    /// Last round started, 0 if the search never ran.
    pub max_r_reached: usize,
    pub budget_exhausted: bool,
}

impl SolveReport {
    pub(crate) fn trivial_no() -> Self {
        Self {
            outcome: Outcome::NoSolution,
            combinations_explored: 0,
            blacklist_skips: 0,
            max_r_reached: 0,
            budget_exhausted: false,
        }
    }

    /// Line-oriented `key: value` rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.outcome {
            Outcome::Found(b) => {
                out.push_str("outcome: found\n");
                out.push_str(&format!("weight: {}\n", b.weight()));
                out.push_str(&format!("size: {}\n", b.size()));
                out.push_str(&format!("u_set: {}\n", join(&b.u_set)));
                out.push_str(&format!("v_set: {}\n", join(&b.v_set)));
            }
            Outcome::NoSolution => out.push_str("outcome: no_solution\n"),
        }
        out.push_str(&format!(
            "combinations_explored: {}\n",
            self.combinations_explored
        ));
        out.push_str(&format!("blacklist_skips: {}\n", self.blacklist_skips));
        out.push_str(&format!("max_r_reached: {}\n", self.max_r_reached));
        out.push_str(&format!("budget_exhausted: {}\n", self.budget_exhausted));
        out
    }
}

fn join(items: &[usize]) -> String {
    items
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub report: SolveReport,
}

/// What the final round (`r = z`) accepts.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Goal {
    /// Stop at the first candidate whose common neighbourhood reaches `min_weight`.
    FirstHit { min_weight: usize },
    /// Scan every candidate for the heaviest one, stopping early at `bound`.
    MaxWeight { bound: usize },
}

/// A graph plus lazily computed gram-derived bounds, shared by all queries.
pub struct Solver<'g> {
    graph: &'g BipartiteGraph,
    options: SolveOptions,
    z_max: OnceLock<usize>,
    w_max: OnceLock<usize>,
}

impl<'g> Solver<'g> {
    pub fn new(graph: &'g BipartiteGraph) -> Self {
        Self::with_options(graph, SolveOptions::default())
    }

    pub fn with_options(graph: &'g BipartiteGraph, options: SolveOptions) -> Self {
        Self {
            graph,
            options,
            z_max: OnceLock::new(),
            w_max: OnceLock::new(),
        }
    }

    pub fn graph(&self) -> &'g BipartiteGraph {
        self.graph
    }

    pub fn options(&self) -> SolveOptions {
        self.options
    }

    /// Size of a size-maximal biclique with weight ≥ 2.
    pub fn z_max(&self) -> usize {
        *self
            .z_max
            .get_or_init(|| size_max_via_gram(&self.graph.gram()))
    }

    /// Weight of the heaviest size-2 biclique.
    pub fn w_max(&self) -> usize {
        *self
            .w_max
            .get_or_init(|| weight_upper_bound(&self.graph.gram_t(), 2))
    }

    fn check_z(&self, z: usize) -> Result<()> {
        if z < 2 {
            return Err(Error::InvalidParameter(format!(
                "z must be at least 2, got {z}"
            )));
        }
        Ok(())
    }

    fn ruled_out(&self, z: usize) -> bool {
        z > self.graph.v_count() || (self.options.guarantee_check && z > self.z_max())
    }

    /// First biclique of size `z` with weight ≥ 2 in lexicographic v-order.
    /// The returned u-set is the full common neighbourhood of its v-set.
    pub fn find_biclique(&self, z: usize, budget: SearchBudget) -> Result<SolveReport> {
        self.check_z(z)?;
        if self.ruled_out(z) {
            return Ok(SolveReport::trivial_no());
        }
        Ok(search::run(
            self.graph,
            z,
            Goal::FirstHit { min_weight: 2 },
            budget,
            self.options.pruning,
        ))
    }

    /// Heaviest biclique of size `z`; ties go to the lexicographically
    /// smallest v-set.
    pub fn find_max_weight_of_size(&self, z: usize, budget: SearchBudget) -> Result<SolveReport> {
        self.check_z(z)?;
        if self.ruled_out(z) {
            return Ok(SolveReport::trivial_no());
        }
        let bound = self.w_max();
        Ok(search::run(
            self.graph,
            z,
            Goal::MaxWeight { bound },
            budget,
            self.options.pruning,
        ))
    }

    /// Is there a biclique with weight ≥ `t` and size ≥ `z`?
    pub fn decide(&self, t: usize, z: usize, budget: SearchBudget) -> Result<Decision> {
        if t == 0 {
            return Err(Error::InvalidParameter("t must be positive".into()));
        }
        self.check_z(z)?;
        if t == 1 {
            // A single u-vertex with z neighbours suffices.
            let yes = (0..self.graph.u_count()).any(|u| self.graph.u_degree(u) >= z);
            return Ok(Decision {
                verdict: if yes { Verdict::Yes } else { Verdict::No },
                report: SolveReport::trivial_no(),
            });
        }
        if self.ruled_out(z) || t > self.graph.u_count() {
            return Ok(Decision {
                verdict: Verdict::No,
                report: SolveReport::trivial_no(),
            });
        }
        let report = search::run(
            self.graph,
            z,
            Goal::FirstHit { min_weight: t },
            budget,
            self.options.pruning,
        );
        let verdict = match (&report.outcome, report.budget_exhausted) {
            (Outcome::Found(_), _) => Verdict::Yes,
            (Outcome::NoSolution, true) => Verdict::Unknown,
            (Outcome::NoSolution, false) => Verdict::No,
        };
        Ok(Decision { verdict, report })
    }
}

pub fn find_biclique(g: &BipartiteGraph, z: usize, budget: SearchBudget) -> Result<SolveReport> {
    Solver::new(g).find_biclique(z, budget)
}

pub fn find_max_weight_of_size(
    g: &BipartiteGraph,
    z: usize,
    budget: SearchBudget,
) -> Result<SolveReport> {
    Solver::new(g).find_max_weight_of_size(z, budget)
}

pub fn decide(g: &BipartiteGraph, t: usize, z: usize, budget: SearchBudget) -> Result<Decision> {
    Solver::new(g).decide(t, z, budget)
}

/// Largest off-diagonal entry of the U-side gram matrix: any weight-≥2
/// biclique contains a weight-2 one of the same size.
pub fn size_max_via_gram(gram_u: &GramMatrix) -> usize {
    assert_eq!(
        gram_u.side(),
        Side::U,
        "size_max_via_gram needs the U-side gram matrix"
    );
    gram_u.max_off_diagonal() as usize
}

/// Largest off-diagonal entry of the V-side gram matrix, which bounds the
/// weight of every biclique of size ≥ 2.
pub fn weight_upper_bound(gram_v: &GramMatrix, z: usize) -> usize {
    assert_eq!(
        gram_v.side(),
        Side::V,
        "weight_upper_bound needs the V-side gram matrix"
    );
    debug_assert!(z >= 2);
    gram_v.max_off_diagonal() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_k23_blocks() -> BipartiteGraph {
        let mut edges = Vec::new();
        for block in 0..2 {
            for u in 0..2 {
                for v in 0..3 {
                    edges.push((block * 2 + u, block * 3 + v));
                }
            }
        }
        BipartiteGraph::from_edges(4, 6, edges).unwrap()
    }

    /// {u0,u1,u2}×{v0,v1} ∪ {u0,u1}×{v2}
    fn three_graph() -> BipartiteGraph {
        let mut edges = vec![];
        for u in 0..3 {
            edges.push((u, 0));
            edges.push((u, 1));
        }
        edges.push((0, 2));
        edges.push((1, 2));
        BipartiteGraph::from_edges(3, 3, edges).unwrap()
    }

    #[test]
    fn k44_first_hit_costs_seven() {
        let g = BipartiteGraph::complete(4, 4).unwrap();
        let r = find_biclique(&g, 3, SearchBudget::unlimited()).unwrap();
        let b = r.outcome.biclique().unwrap();
        assert_eq!((b.weight(), b.size()), (4, 3));
        assert_eq!(b.v_set, vec![0, 1, 2]);
        assert_eq!(r.combinations_explored, 7);
        assert_eq!(r.blacklist_skips, 0);
        assert_eq!(r.max_r_reached, 3);
    }

    #[test]
    fn disjoint_stars_have_no_pair() {
        let g = BipartiteGraph::from_edges(3, 3, [(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(g.gram().max_off_diagonal(), 0);
        let r = find_biclique(&g, 2, SearchBudget::unlimited()).unwrap();
        assert_eq!(r.outcome, Outcome::NoSolution);
        assert_eq!(r.combinations_explored, 3);
    }

    #[test]
    fn two_blocks_have_no_size_four() {
        let g = two_k23_blocks();
        let r = find_biclique(&g, 4, SearchBudget::unlimited()).unwrap();
        assert_eq!(r.outcome, Outcome::NoSolution);
        assert!(!r.budget_exhausted);
        // pairs: 15; good pairs are the 3+3 within-block ones; triples: 1+1 survive.
        assert_eq!(r.combinations_explored, 15 + 2);
        assert_eq!(r.blacklist_skips, (20 - 2) + 15);
    }

    #[test]
    fn z_above_v_count_is_free() {
        let g = BipartiteGraph::complete(3, 3).unwrap();
        assert_eq!(
            find_biclique(&g, 4, SearchBudget::unlimited()).unwrap(),
            SolveReport::trivial_no()
        );
        assert!(find_biclique(&g, 1, SearchBudget::unlimited()).is_err());
    }

    #[test]
    fn max_weight_examples() {
        let k44 = BipartiteGraph::complete(4, 4).unwrap();
        let r = find_max_weight_of_size(&k44, 3, SearchBudget::unlimited()).unwrap();
        assert_eq!(r.outcome.biclique().unwrap().weight(), 4);
        assert_eq!(r.combinations_explored, 7);

        let g = three_graph();
        let r = find_max_weight_of_size(&g, 2, SearchBudget::unlimited()).unwrap();
        let b = r.outcome.biclique().unwrap();
        assert_eq!(b.weight(), 3);
        assert_eq!(b.v_set, vec![0, 1]);
        assert_eq!(weight_upper_bound(&g.gram_t(), 2), 3);

        let z_max = size_max_via_gram(&g.gram());
        let r = find_max_weight_of_size(&g, z_max + 1, SearchBudget::unlimited()).unwrap();
        assert_eq!(r.outcome, Outcome::NoSolution);
    }

    #[test]
    fn max_weight_prefers_later_heavier_pair() {
        // Pair {v0,v1} has weight 2 but {v2,v3} has weight 3 = bound.
        let edges = [
            (0, 0),
            (1, 0),
            (0, 1),
            (1, 1),
            (2, 2),
            (3, 2),
            (4, 2),
            (2, 3),
            (3, 3),
            (4, 3),
        ];
        let g = BipartiteGraph::from_edges(5, 4, edges).unwrap();
        let r = find_max_weight_of_size(&g, 2, SearchBudget::unlimited()).unwrap();
        assert_eq!(r.outcome.biclique().unwrap().v_set, vec![2, 3]);
        assert_eq!(r.combinations_explored, 6);
    }

    #[test]
    fn decide_examples() {
        let k33 = BipartiteGraph::complete(3, 3).unwrap();
        let yes = decide(&k33, 3, 3, SearchBudget::unlimited()).unwrap();
        assert_eq!(yes.verdict, Verdict::Yes);
        let no = decide(&k33, 4, 3, SearchBudget::unlimited()).unwrap();
        assert_eq!(no.verdict, Verdict::No);
        assert!(decide(&k33, 0, 3, SearchBudget::unlimited()).is_err());
        assert!(decide(&k33, 2, 0, SearchBudget::unlimited()).is_err());
    }

    #[test]
    fn decide_with_single_vertex_weight() {
        let g = BipartiteGraph::from_edges(2, 4, [(0, 0), (0, 1), (0, 2), (1, 3)]).unwrap();
        assert_eq!(
            decide(&g, 1, 3, SearchBudget::unlimited()).unwrap().verdict,
            Verdict::Yes
        );
        assert_eq!(
            decide(&g, 1, 4, SearchBudget::unlimited()).unwrap().verdict,
            Verdict::No
        );
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let g = BipartiteGraph::complete(6, 6).unwrap();
        let budget = SearchBudget::bounded(5).unwrap();
        let r = find_biclique(&g, 4, budget).unwrap();
        assert!(r.budget_exhausted);
        assert_eq!(r.outcome, Outcome::NoSolution);
        assert_eq!(r.combinations_explored, 5);
        let d = decide(&g, 2, 4, budget).unwrap();
        assert_eq!(d.verdict, Verdict::Unknown);
        assert!(SearchBudget::bounded(0).is_err());
    }

    #[test]
    fn gram_shortcuts() {
        let k25 = BipartiteGraph::complete(2, 5).unwrap();
        assert_eq!(size_max_via_gram(&k25.gram()), 5);
        let stars = BipartiteGraph::from_edges(2, 2, [(0, 0), (1, 1)]).unwrap();
        assert_eq!(size_max_via_gram(&stars.gram()), 0);
        assert_eq!(weight_upper_bound(&stars.gram_t(), 2), 0);
        let k44 = BipartiteGraph::complete(4, 4).unwrap();
        assert_eq!(weight_upper_bound(&k44.gram_t(), 3), 4);
    }

    #[test]
    fn guarantee_check_skips_search() {
        let g = two_k23_blocks();
        let opts = SolveOptions {
            guarantee_check: true,
            ..Default::default()
        };
        let solver = Solver::with_options(&g, opts);
        assert_eq!(solver.z_max(), 3);
        let r = solver
            .find_max_weight_of_size(4, SearchBudget::unlimited())
            .unwrap();
        assert_eq!(r, SolveReport::trivial_no());
        let r = solver
            .find_max_weight_of_size(3, SearchBudget::unlimited())
            .unwrap();
        assert!(r.outcome.is_found());
    }

    #[test]
    fn pruning_modes_agree_on_verdict() {
        let g = two_k23_blocks();
        for pruning in [Pruning::Subset, Pruning::Literal, Pruning::Off] {
            let solver = Solver::with_options(
                &g,
                SolveOptions {
                    pruning,
                    guarantee_check: false,
                },
            );
            let r = solver.find_biclique(3, SearchBudget::unlimited()).unwrap();
            assert_eq!(r.outcome.biclique().unwrap().v_set, vec![0, 1, 2]);
        }
        let off = Solver::with_options(
            &g,
            SolveOptions {
                pruning: Pruning::Off,
                guarantee_check: false,
            },
        );
        let r = off.find_biclique(4, SearchBudget::unlimited()).unwrap();
        assert_eq!(r.combinations_explored, 15 + 20 + 15);
        assert_eq!(r.blacklist_skips, 0);
    }

    #[test]
    fn report_text_is_line_oriented() {
        let g = BipartiteGraph::complete(3, 3).unwrap();
        let r = find_biclique(&g, 3, SearchBudget::unlimited()).unwrap();
        let text = r.to_text();
        assert!(text.starts_with("outcome: found\nweight: 3\nsize: 3\n"));
        assert!(text.contains("combinations_explored: 4\n"));
    }
}
