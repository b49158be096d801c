//! Seeded instance generators.
//!
//! Instance `i` of an ensemble draws from `Stream::new(seed, i)`; a retry
//! after an edgeless draw moves to stream `i + (attempt << 32)`.

use crate::bigraph::{BipartiteGraph, ObservationLog};
use crate::error::{Error, Result};
use crate::rng::Stream;

const MAX_ATTEMPTS: u32 = 64;

fn stream_id(index: u64, attempt: u32) -> u64 {
    index.wrapping_add(u64::from(attempt) << 32)
}

fn check_uniform(u_n: usize, v_n: usize, edge_prob: f64) -> Result<()> {
    if u_n == 0 || v_n == 0 {
        return Err(Error::InvalidParameter(
            "u_n and v_n must be positive".into(),
        ));
    }
    if !(edge_prob > 0.0 && edge_prob < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "edge_prob must lie in (0, 1), got {edge_prob}"
        )));
    }
    Ok(())
}

/// Each of the `u_n · v_n` pairs (u-major) is an edge when `unit() < edge_prob`.
pub fn gen_uniform(u_n: usize, v_n: usize, edge_prob: f64, seed: u64) -> Result<BipartiteGraph> {
    gen_uniform_instance(u_n, v_n, edge_prob, seed, 0)
}

pub fn gen_uniform_instance(
    u_n: usize,
    v_n: usize,
    edge_prob: f64,
    seed: u64,
    index: u64,
) -> Result<BipartiteGraph> {
    check_uniform(u_n, v_n, edge_prob)?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = Stream::new(seed, stream_id(index, attempt));
        let mut edges = Vec::new();
        for u in 0..u_n {
            for v in 0..v_n {
                if rng.unit() < edge_prob {
                    edges.push((u, v));
                }
            }
        }
        if !edges.is_empty() {
            return BipartiteGraph::from_edges(u_n, v_n, edges);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

fn check_powerlaw(u_pool: usize, v_pool: usize, w: usize, exponent: f64) -> Result<()> {
    if u_pool < 2 || v_pool < 2 {
        return Err(Error::InvalidParameter(
            "pools need at least 2 vertices".into(),
        ));
    }
    if w == 0 {
        return Err(Error::ZeroObservations);
    }
    if !exponent.is_finite() || exponent <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "exponent must exceed 1, got {exponent}"
        )));
    }
    Ok(())
}

/// Cumulative popularity of targets `1..=v_pool`, proportional to `k^-exponent`.
fn popularity_cdf(v_pool: usize, exponent: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = (1..=v_pool)
        .map(|k| {
            acc += (k as f64).powf(-exponent);
            acc
        })
        .collect();
    let total = acc;
    for c in &mut cdf {
        *c /= total;
    }
    cdf
}

/// Draws `w` observations: actor `below(u_pool)` then target by inverse CDF
/// on `unit()`. Labels are `a<i>` / `t<k>` (targets ranked from 0 by
/// popularity). Unobserved vertices do not appear in the graph.
pub fn gen_powerlaw(
    u_pool: usize,
    v_pool: usize,
    w_observations: usize,
    exponent: f64,
    seed: u64,
) -> Result<(BipartiteGraph, usize)> {
    let log = gen_powerlaw_log(u_pool, v_pool, w_observations, exponent, seed, 0)?;
    Ok((log.to_graph()?, log.w()))
}

pub fn gen_powerlaw_log(
    u_pool: usize,
    v_pool: usize,
    w_observations: usize,
    exponent: f64,
    seed: u64,
    index: u64,
) -> Result<ObservationLog> {
    check_powerlaw(u_pool, v_pool, w_observations, exponent)?;
    let cdf = popularity_cdf(v_pool, exponent);
    let mut rng = Stream::new(seed, stream_id(index, 0));
    let records = (0..w_observations)
        .map(|_| {
            let actor = rng.below(u_pool);
            let x = rng.unit();
            let target = cdf.partition_point(|&c| c <= x).min(v_pool - 1);
            (format!("a{actor}"), format!("t{target}"))
        })
        .collect();
    Ok(ObservationLog { records })
}
