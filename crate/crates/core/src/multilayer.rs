//! Four-layer fog graph: the physical network plus one similarity layer per
//! resource type, with every device replicated in every layer.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Device, DeviceId, NetworkLink};
use crate::topology::validate_devices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Network,
    Cpu,
    Memory,
    Storage,
}

impl Layer {
    pub const ALL: [Layer; 4] = [Layer::Network, Layer::Cpu, Layer::Memory, Layer::Storage];
    pub const RESOURCES: [Layer; 3] = [Layer::Cpu, Layer::Memory, Layer::Storage];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Resource dimension backing the layer, `None` for the network layer.
    pub fn resource_dim(self) -> Option<usize> {
        match self {
            Layer::Network => None,
            Layer::Cpu => Some(0),
            Layer::Memory => Some(1),
            Layer::Storage => Some(2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Layer::Network => "network",
            Layer::Cpu => "cpu",
            Layer::Memory => "memory",
            Layer::Storage => "storage",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Undirected weighted edge between two device positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub a: DeviceId,
    pub b: DeviceId,
    pub weight: f64,
}

/// Edge between the replicas of one device in two different layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterLayerEdge {
    pub device: DeviceId,
    pub from: Layer,
    pub to: Layer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultilayerConfig {
    /// Resource-layer edges lighter than this are dropped. Zero keeps the
    /// complete graph.
    pub min_weight: f64,
}

impl Default for MultilayerConfig {
    fn default() -> Self {
        Self { min_weight: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct MultilayerGraph {
    devices: Vec<Device>,
    intra: [Vec<WeightedEdge>; 4],
    inter: Vec<InterLayerEdge>,
}

/// Similarity of two devices in one resource layer:
/// `1 / (1 + |R_i - R_j|)`.
pub fn similarity_weight(a: &Device, b: &Device, layer: Layer) -> f64 {
    let dim = layer
        .resource_dim()
        .expect("similarity weights are defined for resource layers only");
    1.0 / (1.0 + (a.resource(dim) - b.resource(dim)).abs())
}

/// Builds the multilayer graph: network-layer edges mirror `links` with unit
/// weight, resource layers are complete similarity graphs (optionally
/// thresholded), and every device is linked to its replicas in all layers.
pub fn build_multilayer(
    devices: &[Device],
    links: &[NetworkLink],
    config: &MultilayerConfig,
) -> Result<MultilayerGraph> {
    validate_devices(devices)?;
    let n = devices.len();
    let mut network = Vec::with_capacity(links.len());
    let mut seen = std::collections::BTreeSet::new();
    for link in links {
        let (a, b) = link.endpoints;
        if a.index() >= n || b.index() >= n || a == b {
            return Err(Error::DanglingLink(a, b));
        }
        if !seen.insert(link.key()) {
            return Err(Error::DuplicateLink(a, b));
        }
        let (a, b) = link.key();
        network.push(WeightedEdge { a, b, weight: 1.0 });
    }
    let mut intra: [Vec<WeightedEdge>; 4] = Default::default();
    intra[Layer::Network.index()] = network;
    for layer in Layer::RESOURCES {
        let edges = &mut intra[layer.index()];
        for i in 0..n {
            for j in (i + 1)..n {
                let weight = similarity_weight(&devices[i], &devices[j], layer);
                if weight >= config.min_weight {
                    edges.push(WeightedEdge {
                        a: devices[i].id,
                        b: devices[j].id,
                        weight,
                    });
                }
            }
        }
    }
    Ok(MultilayerGraph {
        devices: devices.to_vec(),
        intra,
        inter: complete_inter_edges(n),
    })
}

fn complete_inter_edges(n: usize) -> Vec<InterLayerEdge> {
    let mut inter = Vec::with_capacity(n * 6);
    for d in 0..n {
        for (i, &from) in Layer::ALL.iter().enumerate() {
            for &to in &Layer::ALL[i + 1..] {
                inter.push(InterLayerEdge {
                    device: DeviceId(d as u32),
                    from,
                    to,
                });
            }
        }
    }
    inter
}

impl MultilayerGraph {
    /// Builds a graph from explicit per-layer edge sets (layers not present
    /// in `layers` get no intra-layer edges). Inter-layer edges are complete.
    pub fn from_layer_edges(
        devices: &[Device],
        layers: BTreeMap<Layer, Vec<WeightedEdge>>,
    ) -> Result<Self> {
        validate_devices(devices)?;
        let n = devices.len();
        let mut intra: [Vec<WeightedEdge>; 4] = Default::default();
        for (layer, edges) in layers {
            let mut seen = std::collections::BTreeSet::new();
            for e in &edges {
                if e.a.index() >= n || e.b.index() >= n || e.a == e.b {
                    return Err(Error::DanglingLink(e.a, e.b));
                }
                if !seen.insert((e.a.min(e.b), e.a.max(e.b))) {
                    return Err(Error::DuplicateLink(e.a, e.b));
                }
                if !(e.weight > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "edge {} -- {} in layer {layer} has non-positive weight",
                        e.a, e.b
                    )));
                }
            }
            intra[layer.index()] = edges;
        }
        Ok(Self {
            devices: devices.to_vec(),
            intra,
            inter: complete_inter_edges(n),
        })
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn device_count(&self) -> usize {
        self.devices.len()
    }

    pub fn intra_edges(&self, layer: Layer) -> &[WeightedEdge] {
        &self.intra[layer.index()]
    }

    pub fn inter_edges(&self) -> &[InterLayerEdge] {
        &self.inter
    }

    /// Number of inter-layer edges of `device` between `from` and `to`.
    pub fn inter_edge_count(&self, device: DeviceId, from: Layer, to: Layer) -> usize {
        self.inter
            .iter()
            .filter(|e| {
                e.device == device
                    && ((e.from == from && e.to == to) || (e.from == to && e.to == from))
            })
            .count()
    }

    pub fn layer_view(&self, layer: Layer) -> LayerView {
        LayerView::new(
            Some(layer),
            self.devices.len(),
            self.intra[layer.index()].clone(),
        )
    }
}

/// Single-layer projection: nodes are device positions, no inter-layer
/// edges.
#[derive(Debug, Clone)]
pub struct LayerView {
    pub layer: Option<Layer>,
    node_count: usize,
    edges: Vec<WeightedEdge>,
}

impl LayerView {
    pub fn new(layer: Option<Layer>, node_count: usize, edges: Vec<WeightedEdge>) -> Self {
        Self {
            layer,
            node_count,
            edges,
        }
    }

    /// Unit-weight view over `node_count` nodes.
    pub fn unweighted(node_count: usize, pairs: &[(u32, u32)]) -> Self {
        let edges = pairs
            .iter()
            .map(|&(a, b)| WeightedEdge {
                a: DeviceId(a),
                b: DeviceId(b),
                weight: 1.0,
            })
            .collect();
        Self::new(None, node_count, edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    /// Sum of edge weights counting each undirected edge once.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Neighbor lists with edge weights, neighbors in ascending order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); self.node_count];
        for e in &self.edges {
            *adj[e.a.index()].entry(e.b.index()).or_default() += e.weight;
            *adj[e.b.index()].entry(e.a.index()).or_default() += e.weight;
        }
        adj.into_iter().map(|m| m.into_iter().collect()).collect()
    }
}
