//! Two-phase Louvain modularity maximisation.
//!
//! Phase 1 sweeps the nodes in a fixed order and moves each one into the
//! neighbouring community with the largest strictly positive modularity gain,
//! until a full sweep makes no move. Phase 2 collapses communities into
//! super-nodes (internal weight becomes a self-loop). Steps repeat until one
//! fails to improve modularity; the best partition seen is returned.
//!
//! A single greedy run can settle in a poor local optimum on small graphs, so
//! the run is repeated with a few extra seeded sweep orders and the first run
//! is replaced only by a strictly better one.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::modularity::CommunityGraph;

/// Minimum modularity improvement treated as a real gain.
const GAIN_EPSILON: f64 = 1e-12;
const MAX_SWEEPS: usize = 10_000;
const RESTART_SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LouvainConfig {
    /// `None` sweeps nodes in ascending order on the first run; `Some(seed)`
    /// shuffles the sweep order of every level with a seeded generator.
    pub shuffle_seed: Option<u64>,
    /// Extra runs with shuffled sweep orders.
    #[serde(default = "default_restarts")]
    pub restarts: u32,
}

fn default_restarts() -> u32 {
    8
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            shuffle_seed: None,
            restarts: default_restarts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainOutcome {
    /// Compact community label per node, communities numbered by their
    /// smallest member.
    pub labels: Vec<usize>,
    pub modularity: f64,
    /// Modularity after every completed step, starting with the singleton
    /// partition.
    pub history: Vec<f64>,
}

pub fn louvain(graph: &CommunityGraph, config: &LouvainConfig) -> LouvainOutcome {
    let mut best = single_run(graph, config.shuffle_seed.map(ChaCha8Rng::seed_from_u64));
    let base = config.shuffle_seed.unwrap_or(RESTART_SEED);
    for r in 0..config.restarts {
        let seed = base.wrapping_add(u64::from(r) + 1);
        let alt = single_run(graph, Some(ChaCha8Rng::seed_from_u64(seed)));
        if alt.modularity > best.modularity + GAIN_EPSILON {
            best = alt;
        }
    }
    best
}

fn single_run(graph: &CommunityGraph, mut rng: Option<ChaCha8Rng>) -> LouvainOutcome {
    let n = graph.node_count();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut best_labels = membership.clone();
    let mut best_q = graph.modularity(&membership);
    let mut history = vec![best_q];
    let mut current = graph.clone();

    while current.node_count() > 1 {
        let mut order: Vec<usize> = (0..current.node_count()).collect();
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let (local, moved) = local_moves(&current, &order);
        if !moved {
            break;
        }
        let local = compact(&local);
        membership = membership.iter().map(|&m| local[m]).collect();
        let q = graph.modularity(&membership);
        history.push(q);
        if q <= best_q + GAIN_EPSILON {
            break;
        }
        best_q = q;
        best_labels = membership.clone();
        current = current.aggregate(&local);
    }

    LouvainOutcome {
        labels: compact(&best_labels),
        modularity: best_q,
        history,
    }
}

/// One phase-1 pass to convergence. Returns the community of every node and
/// whether any node moved.
pub fn local_moves(graph: &CommunityGraph, order: &[usize]) -> (Vec<usize>, bool) {
    let n = graph.node_count();
    let two_w = graph.total_weight();
    let mut labels: Vec<usize> = (0..n).collect();
    if two_w <= 0.0 {
        return (labels, false);
    }
    let strength = graph.strengths();
    let mut tot = strength.clone();
    let mut any_moved = false;

    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for &i in order {
            let current = labels[i];
            let ki = strength[i];
            let mut links: BTreeMap<usize, f64> = BTreeMap::new();
            for &(j, w) in graph.neighbors(i) {
                *links.entry(labels[j]).or_default() += w;
            }
            tot[current] -= ki;
            // gain of joining community c, in units of W * dQ
            let gain = |c: usize, k_ic: f64, tot: &[f64]| k_ic - tot[c] * ki / two_w;
            let mut best = current;
            let mut best_gain = gain(current, links.get(&current).copied().unwrap_or(0.0), &tot);
            for (&c, &k_ic) in &links {
                if c == current {
                    continue;
                }
                let g = gain(c, k_ic, &tot);
                if (g - best_gain) / (two_w / 2.0) > GAIN_EPSILON {
                    best = c;
                    best_gain = g;
                }
            }
            tot[best] += ki;
            if best != current {
                labels[i] = best;
                moved = true;
                any_moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    (labels, any_moved)
}

/// Renumbers labels to `0..k` in order of first appearance.
pub fn compact(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}
