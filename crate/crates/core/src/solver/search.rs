//! Round-by-round candidate enumeration.
//!
//! With subset pruning, an r-set survives iff every (r-1)-subset was explored
//! and kept a common neighbourhood of at least two: a blacklisted B ⊆ V′ with
//! |B| < r-1 forces the (r-1)-supersets of B inside V′ to be pruned or
//! blacklisted themselves. Survivors are therefore generated by joining kept
//! sets that share all but their last element, which also yields them in
//! lexicographic order.

use std::collections::HashSet;

use crate::bigraph::{Biclique, BipartiteGraph};
use crate::bits::BitRow;

use super::{Goal, Outcome, Pruning, SearchBudget, SolveReport};

/// Minimum common neighbourhood for a set to stay off the blacklist.
const MIN_WEIGHT: usize = 2;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays exact because acc = C(n, i).
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of `r`-subsets of `0..n` lexicographically smaller than `set`.
pub fn lex_rank(n: usize, set: &[usize]) -> u128 {
    let r = set.len();
    let mut rank: u128 = 0;
    let mut lo = 0;
    for (i, &c) in set.iter().enumerate() {
        for x in lo..c {
            rank = rank.saturating_add(binomial(n - 1 - x, r - 1 - i));
        }
        lo = c + 1;
    }
    rank
}

fn clamp(x: u128) -> u64 {
    u64::try_from(x).unwrap_or(u64::MAX)
}

enum Step {
    Continue,
    Stop,
}

/// Shared bookkeeping for one search call.
struct Tally<'a> {
    graph: &'a BipartiteGraph,
    z: usize,
    goal: Goal,
    budget: SearchBudget,
    explored: u64,
    skips: u128,
    max_r: usize,
    best: Option<(usize, Vec<usize>)>,
    exhausted: bool,
}

impl<'a> Tally<'a> {
    /// Called before evaluating a candidate; false once the budget is spent.
    fn admit(&mut self) -> bool {
        if self.budget.allows(self.explored) {
            self.explored += 1;
            true
        } else {
            self.exhausted = true;
            false
        }
    }

    /// Final-round acceptance.
    fn offer(&mut self, set: &[usize], weight: usize) -> Step {
        match self.goal {
            Goal::FirstHit { min_weight } => {
                if weight >= min_weight.max(MIN_WEIGHT) {
                    self.best = Some((weight, set.to_vec()));
                    return Step::Stop;
                }
            }
            Goal::MaxWeight { bound } => {
                if weight >= MIN_WEIGHT && self.best.as_ref().is_none_or(|(w, _)| weight > *w) {
                    self.best = Some((weight, set.to_vec()));
                    if weight >= bound {
                        return Step::Stop;
                    }
                }
            }
        }
        Step::Continue
    }

    fn finish(self) -> SolveReport {
        let outcome = match (&self.best, self.exhausted) {
            (Some((_, v_set)), false) => {
                let u_set = self.graph.common_neighbourhood(v_set).iter().collect();
                Outcome::Found(Biclique {
                    u_set,
                    v_set: v_set.clone(),
                })
            }
            _ => Outcome::NoSolution,
        };
        SolveReport {
            outcome,
            combinations_explored: self.explored,
            blacklist_skips: clamp(self.skips),
            max_r_reached: self.max_r,
            budget_exhausted: self.exhausted,
        }
    }
}

pub(crate) fn run(
    graph: &BipartiteGraph,
    z: usize,
    goal: Goal,
    budget: SearchBudget,
    pruning: Pruning,
) -> SolveReport {
    debug_assert!(z >= 2 && z <= graph.v_count());
    let mut tally = Tally {
        graph,
        z,
        goal,
        budget,
        explored: 0,
        skips: 0,
        max_r: 0,
        best: None,
        exhausted: false,
    };
    match pruning {
        Pruning::Subset => run_subset(&mut tally),
        Pruning::Literal => run_exhaustive(&mut tally, Some(HashSet::new())),
        Pruning::Off => run_exhaustive(&mut tally, None),
    }
    tally.finish()
}

/// Sets kept in one round, stored flat with stride `r`.
struct Level {
    r: usize,
    items: Vec<usize>,
    adj: Vec<BitRow>,
}

impl Level {
    fn new(r: usize) -> Self {
        Self {
            r,
            items: Vec::new(),
            adj: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn set(&self, i: usize) -> &[usize] {
        &self.items[i * self.r..(i + 1) * self.r]
    }

    fn push(&mut self, set: &[usize], adj: BitRow) {
        self.items.extend_from_slice(set);
        self.adj.push(adj);
    }

    fn contains(&self, set: &[usize]) -> bool {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.set(mid).cmp(set) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

fn run_subset(t: &mut Tally<'_>) {
    let n = t.graph.v_count();
    let z = t.z;
    let mut level = Level::new(1);
    for v in 0..n {
        level.push(&[v], t.graph.v_row(v).clone());
    }

    let mut cand = Vec::with_capacity(z);
    let mut scratch = BitRow::new(t.graph.u_count());
    for r in 2..=z {
        t.max_r = r;
        let last = r == z;
        let mut next = Level::new(r);
        let mut explored_here: u128 = 0;
        let mut stopped_at: Option<Vec<usize>> = None;

        'round: for i in 0..level.len() {
            let head = level.set(i);
            let prefix = &head[..r - 2];
            for j in i + 1..level.len() {
                let tail = level.set(j);
                if &tail[..r - 2] != prefix {
                    break;
                }
                cand.clear();
                cand.extend_from_slice(head);
                cand.push(tail[r - 2]);
                if r > 2 && !all_faces_kept(&level, &cand) {
                    continue;
                }
                if !t.admit() {
                    stopped_at = Some(cand.clone());
                    break 'round;
                }
                explored_here += 1;
                scratch.assign_intersection(&level.adj[i], &level.adj[j]);
                let weight = scratch.count_ones();
                if last {
                    if let Step::Stop = t.offer(&cand, weight) {
                        explored_here -= 1;
                        stopped_at = Some(cand.clone());
                        break 'round;
                    }
                } else if weight >= MIN_WEIGHT {
                    next.push(&cand, scratch.clone());
                }
            }
        }

        match stopped_at {
            Some(pos) => {
                t.skips += lex_rank(n, &pos).saturating_sub(explored_here);
                return;
            }
            None => t.skips += binomial(n, r).saturating_sub(explored_here),
        }
        if next.len() == 0 && !last {
            // Nothing survives; every later candidate is pruned.
            for rest in r + 1..=z {
                t.skips = t.skips.saturating_add(binomial(n, rest));
            }
            t.max_r = z;
            return;
        }
        level = next;
    }
}

/// Every r-1 face of `cand` obtained by dropping one of its first r-2
/// elements is a kept set. The two faces dropping the last elements are the
/// join parents and are kept by construction.
fn all_faces_kept(level: &Level, cand: &[usize]) -> bool {
    let r = cand.len();
    let mut face = Vec::with_capacity(r - 1);
    (0..r - 2).all(|drop| {
        face.clear();
        face.extend(
            cand.iter()
                .enumerate()
                .filter(|&(k, _)| k != drop)
                .map(|(_, &v)| v),
        );
        level.contains(&face)
    })
}

/// Plain lexicographic enumeration of every r-subset, optionally consulting
/// an exact-membership blacklist.
fn run_exhaustive(t: &mut Tally<'_>, mut blacklist: Option<HashSet<Vec<usize>>>) {
    let n = t.graph.v_count();
    for r in 2..=t.z {
        t.max_r = r;
        let last = r == t.z;
        let mut combos = Combos::new(t.graph, r);
        loop {
            let set = combos.current();
            if blacklist.as_ref().is_some_and(|b| b.contains(set)) {
                t.skips += 1;
            } else {
                if !t.admit() {
                    return;
                }
                let weight = combos.weight();
                if last {
                    if let Step::Stop = t.offer(set, weight) {
                        return;
                    }
                } else if weight < MIN_WEIGHT {
                    if let Some(b) = blacklist.as_mut() {
                        b.insert(set.to_vec());
                    }
                }
            }
            if !combos.advance(n) {
                break;
            }
        }
    }
}

/// Lexicographic r-combinations with cached prefix intersections.
struct Combos<'g> {
    graph: &'g BipartiteGraph,
    idx: Vec<usize>,
    /// `prefix[k]` = common neighbourhood of `idx[..=k]`.
    prefix: Vec<BitRow>,
}

impl<'g> Combos<'g> {
    fn new(graph: &'g BipartiteGraph, r: usize) -> Self {
        let mut c = Self {
            graph,
            idx: (0..r).collect(),
            prefix: vec![BitRow::new(graph.u_count()); r],
        };
        c.refresh_from(0);
        c
    }

    fn refresh_from(&mut self, k: usize) {
        for i in k..self.idx.len() {
            let col = self.graph.v_row(self.idx[i]);
            if i == 0 {
                self.prefix[0] = col.clone();
            } else {
                let (done, rest) = self.prefix.split_at_mut(i);
                rest[0].assign_intersection(&done[i - 1], col);
            }
        }
    }

    fn current(&self) -> &[usize] {
        &self.idx
    }

    fn weight(&self) -> usize {
        self.prefix.last().map_or(0, BitRow::count_ones)
    }

    fn advance(&mut self, n: usize) -> bool {
        let r = self.idx.len();
        let Some(i) = (0..r).rev().find(|&i| self.idx[i] < n - r + i) else {
            return false;
        };
        self.idx[i] += 1;
        for k in i + 1..r {
            self.idx[k] = self.idx[k - 1] + 1;
        }
        self.refresh_from(i);
        true
    }
}
