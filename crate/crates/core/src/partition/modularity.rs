//! Modularity of single-layer and multilayer partitions.
//!
//! Weights follow the ordered-pair convention: every undirected edge
//! contributes to both `A_ij` and `A_ji`, self-loops carry the ordered sum of
//! the weights they absorbed, and `2W` is the sum of all `A_ij`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::multilayer::{Layer, LayerView, MultilayerGraph};

/// Weighted undirected graph in the form Louvain works on.
#[derive(Debug, Clone)]
pub struct CommunityGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl CommunityGraph {
    pub fn from_view(view: &LayerView) -> Self {
        Self {
            adj: view.adjacency(),
            self_loops: vec![0.0; view.node_count()],
        }
    }

    /// Graph over `n` nodes from undirected `(a, b, weight)` triples; parallel
    /// edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        let mut self_loops = vec![0.0; n];
        for &(a, b, w) in edges {
            if a == b {
                self_loops[a] += 2.0 * w;
            } else {
                *adj[a].entry(b).or_default() += w;
                *adj[b].entry(a).or_default() += w;
            }
        }
        Self {
            adj: adj.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    pub fn self_loop(&self, i: usize) -> f64 {
        self.self_loops[i]
    }

    /// Connectivity strength `sigma_i = sum_j A_ij`.
    pub fn strength(&self, i: usize) -> f64 {
        self.self_loops[i] + self.adj[i].iter().map(|&(_, w)| w).sum::<f64>()
    }

    pub fn strengths(&self) -> Vec<f64> {
        (0..self.node_count()).map(|i| self.strength(i)).collect()
    }

    /// `2W`, the ordered-pair weight total.
    pub fn total_weight(&self) -> f64 {
        self.strengths().iter().sum()
    }

    /// Modularity of `labels` (one community label per node).
    pub fn modularity(&self, labels: &[usize]) -> f64 {
        assert_eq!(labels.len(), self.node_count());
        let two_w = self.total_weight();
        if two_w <= 0.0 {
            return 0.0;
        }
        let mut inner: BTreeMap<usize, f64> = BTreeMap::new();
        let mut tot: BTreeMap<usize, f64> = BTreeMap::new();
        for i in 0..self.node_count() {
            let c = labels[i];
            let within: f64 = self.adj[i]
                .iter()
                .filter(|&&(j, _)| labels[j] == c)
                .map(|&(_, w)| w)
                .sum();
            *inner.entry(c).or_default() += within + self.self_loops[i];
            *tot.entry(c).or_default() += self.strength(i);
        }
        inner
            .iter()
            .map(|(c, &in_c)| {
                let t = tot[c] / two_w;
                in_c / two_w - t * t
            })
            .sum()
    }

    /// Collapses each community into a super-node. `labels` must be compact
    /// (`0..k`).
    pub fn aggregate(&self, labels: &[usize]) -> Self {
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
        let mut self_loops = vec![0.0; k];
        for i in 0..self.node_count() {
            let ci = labels[i];
            self_loops[ci] += self.self_loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = labels[j];
                if ci == cj {
                    self_loops[ci] += w;
                } else {
                    *adj[ci].entry(cj).or_default() += w;
                }
            }
        }
        Self {
            adj: adj.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }
}

/// Single-layer modularity of `assignment` on `view`. A graph without edges
/// scores zero.
pub fn modularity(view: &LayerView, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != view.node_count() {
        return Err(Error::AssignmentMismatch {
            expected: view.node_count(),
            got: assignment.len(),
        });
    }
    Ok(CommunityGraph::from_view(view).modularity(assignment))
}

/// Community labels for the replicas of every device in each layer. Labels
/// are global: two replicas (in the same or in different layers) belong to
/// the same community iff their labels are equal.
pub type LayerLabels = BTreeMap<Layer, Vec<usize>>;

/// Multilayer modularity: the intra-layer Newman term of every layer plus a
/// unit coupling for every inter-layer replica edge whose endpoints share a
/// community, normalised by the total intra-layer weight `2W`.
pub fn multilayer_modularity(g: &MultilayerGraph, labels: &LayerLabels) -> Result<f64> {
    let n = g.device_count();
    for l in labels.values() {
        if l.len() != n {
            return Err(Error::AssignmentMismatch {
                expected: n,
                got: l.len(),
            });
        }
    }
    let graphs: BTreeMap<Layer, CommunityGraph> = labels
        .keys()
        .map(|&layer| (layer, CommunityGraph::from_view(&g.layer_view(layer))))
        .collect();
    let two_w: f64 = graphs.values().map(CommunityGraph::total_weight).sum();
    if two_w <= 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for (layer, graph) in &graphs {
        let two_wl = graph.total_weight();
        if two_wl <= 0.0 {
            continue;
        }
        let lab = &labels[layer];
        let sigma = graph.strengths();
        for i in 0..n {
            for &(j, w) in graph.neighbors(i) {
                if lab[i] == lab[j] {
                    sum += w;
                }
            }
            for j in 0..n {
                if lab[i] == lab[j] {
                    sum -= sigma[i] * sigma[j] / two_wl;
                }
            }
        }
    }
    for (&l, lab) in labels {
        for (&l2, lab2) in labels {
            if l == l2 {
                continue;
            }
            for i in 0..n {
                if lab[i] == lab2[i] {
                    sum += g.inter_edge_count(crate::model::DeviceId(i as u32), l, l2) as f64;
                }
            }
        }
    }
    Ok(sum / two_w)
}
