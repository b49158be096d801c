//! Exhaustive verifier over every nonempty v-subset.

use crate::bigraph::{Biclique, BipartiteGraph};
use crate::error::{Error, Result};

pub const DEFAULT_ORACLE_CAP: usize = 20;

/// Common-neighbourhood table for all `2^|V|` v-subsets.
///
/// Built from `has_edge` lookups only; shares no code with the search.
pub struct BruteForceOracle {
    v_count: usize,
    /// `common[mask]` = bitmask over U of vertices adjacent to all of `mask`.
    common: Vec<u128>,
}

impl BruteForceOracle {
    pub fn new(g: &BipartiteGraph) -> Result<Self> {
        Self::with_cap(g, DEFAULT_ORACLE_CAP)
    }

    pub fn with_cap(g: &BipartiteGraph, cap: usize) -> Result<Self> {
        let v_count = g.v_count();
        if v_count > cap || v_count >= usize::BITS as usize {
            return Err(Error::OracleCapExceeded { v_count, cap });
        }
        if g.u_count() > 128 {
            return Err(Error::InvalidParameter(
                "brute-force oracle supports at most 128 u-vertices".into(),
            ));
        }
        let column = |v: usize| -> u128 {
            (0..g.u_count())
                .filter(|&u| g.has_edge(u, v))
                .fold(0u128, |acc, u| acc | (1u128 << u))
        };
        let all_u = if g.u_count() == 128 {
            u128::MAX
        } else {
            (1u128 << g.u_count()) - 1
        };
        let mut common = vec![0u128; 1 << v_count];
        common[0] = all_u;
        let columns: Vec<u128> = (0..v_count).map(column).collect();
        for mask in 1usize..1 << v_count {
            let low = mask.trailing_zeros() as usize;
            common[mask] = common[mask & (mask - 1)] & columns[low];
        }
        Ok(Self { v_count, common })
    }

    fn weight(&self, mask: usize) -> usize {
        self.common[mask].count_ones() as usize
    }

    fn to_biclique(&self, mask: usize) -> Biclique {
        let c = self.common[mask];
        Biclique {
            u_set: (0..128).filter(|&u| c >> u & 1 == 1).collect(),
            v_set: (0..self.v_count).filter(|&v| mask >> v & 1 == 1).collect(),
        }
    }

    fn masks(&self) -> impl Iterator<Item = usize> {
        1usize..1 << self.v_count
    }

    /// Is there a biclique with weight ≥ `t` and size ≥ `z`?
    pub fn verdict(&self, t: usize, z: usize) -> bool {
        self.masks()
            .any(|m| m.count_ones() as usize >= z && self.weight(m) >= t)
    }

    /// Largest size among bicliques with weight ≥ 2.
    pub fn z_max(&self) -> usize {
        self.masks()
            .filter(|&m| self.weight(m) >= 2)
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Size-maximal, then weight-maximal, then lexicographically smallest
    /// v-set, among bicliques with weight ≥ 2.
    pub fn best(&self) -> Option<Biclique> {
        self.pick(|_| true)
    }

    /// Heaviest size-`z` biclique with weight ≥ 2, ties to the smallest v-set.
    pub fn max_weight_of_size(&self, z: usize) -> Option<Biclique> {
        self.pick(|m| m.count_ones() as usize == z)
    }

    fn pick(&self, keep: impl Fn(usize) -> bool) -> Option<Biclique> {
        self.masks()
            .filter(|&m| keep(m) && self.weight(m) >= 2)
            .map(|m| self.to_biclique(m))
            .min_by(|a, b| {
                b.size()
                    .cmp(&a.size())
                    .then(b.weight().cmp(&a.weight()))
                    .then(a.v_set.cmp(&b.v_set))
            })
    }
}

/// Exact `(t, z)` answer plus the oracle's best witness.
pub fn brute_force_oracle(
    g: &BipartiteGraph,
    t: usize,
    z: usize,
) -> Result<(bool, Option<Biclique>)> {
    let oracle = BruteForceOracle::new(g)?;
    Ok((oracle.verdict(t, z), oracle.best()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph() {
        let g = BipartiteGraph::complete(3, 3).unwrap();
        let (yes, best) = brute_force_oracle(&g, 3, 3).unwrap();
        assert!(yes);
        let best = best.unwrap();
        assert_eq!((best.weight(), best.size()), (3, 3));
    }

    #[test]
    fn edgeless_pairs() {
        let g = BipartiteGraph::from_edges(2, 2, [(0, 0), (1, 1)]).unwrap();
        let (yes, best) = brute_force_oracle(&g, 2, 2).unwrap();
        assert!(!yes);
        assert!(best.is_none());
    }

    #[test]
    fn refuses_large_v() {
        let g = BipartiteGraph::complete(2, 21).unwrap();
        assert!(matches!(
            BruteForceOracle::new(&g),
            Err(Error::OracleCapExceeded {
                v_count: 21,
                cap: 20
            })
        ));
        assert!(BruteForceOracle::with_cap(&g, 21).is_ok());
    }

    #[test]
    fn witness_ordering() {
        // {u0,u1,u2}×{v0,v1} ∪ {u0,u1}×{v2}
        let edges = [
            (0, 0),
            (0, 1),
            (1, 0),
            (1, 1),
            (2, 0),
            (2, 1),
            (0, 2),
            (1, 2),
        ];
        let g = BipartiteGraph::from_edges(3, 3, edges).unwrap();
        let o = BruteForceOracle::new(&g).unwrap();
        assert_eq!(o.z_max(), 3);
        assert_eq!(
            o.best().unwrap(),
            Biclique {
                u_set: vec![0, 1],
                v_set: vec![0, 1, 2]
            }
        );
        assert_eq!(
            o.max_weight_of_size(2).unwrap(),
            Biclique {
                u_set: vec![0, 1, 2],
                v_set: vec![0, 1]
            }
        );
    }
}
