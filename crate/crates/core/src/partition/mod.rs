//! Layer partitioning, graph compression and feature partitioning of the
//! multilayer fog graph.

pub mod louvain;
pub mod modularity;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Device, DeviceId};
use crate::multilayer::{InterLayerEdge, Layer, LayerView, MultilayerGraph};

pub use louvain::{louvain, LouvainConfig, LouvainOutcome};
pub use modularity::{modularity, multilayer_modularity, CommunityGraph, LayerLabels};

/// Disjoint partitions of the devices of one layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSet {
    pub layer: Option<Layer>,
    /// Partition id of every device (indexed by device position).
    pub assignment: Vec<usize>,
    /// Member devices of every partition (indexed by partition id).
    pub partitions: Vec<Vec<DeviceId>>,
    pub modularity: f64,
}

impl PartitionSet {
    pub fn from_labels(layer: Option<Layer>, labels: Vec<usize>, modularity: f64) -> Self {
        let labels = louvain::compact(&labels);
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut partitions = vec![Vec::new(); k];
        for (d, &p) in labels.iter().enumerate() {
            partitions[p].push(DeviceId(d as u32));
        }
        Self {
            layer,
            assignment: labels,
            partitions,
            modularity,
        }
    }

    pub fn partition_of(&self, d: DeviceId) -> usize {
        self.assignment[d.index()]
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    /// Partitions as sorted sets of raw device ids, handy for comparisons.
    pub fn as_sets(&self) -> BTreeSet<BTreeSet<u32>> {
        self.partitions
            .iter()
            .map(|p| p.iter().map(|d| d.0).collect())
            .collect()
    }
}

/// Louvain partitioning of one layer.
pub fn louvain_partition(view: &LayerView, config: &LouvainConfig) -> PartitionSet {
    let out = louvain(&CommunityGraph::from_view(view), config);
    PartitionSet::from_labels(view.layer, out.labels, out.modularity)
}

/// Average cpu speed, memory and storage of a group of devices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureTriplet {
    pub avg_cpu: f64,
    pub avg_mem: f64,
    pub avg_storage: f64,
}

impl FeatureTriplet {
    pub fn get(&self, dim: usize) -> f64 {
        match dim {
            0 => self.avg_cpu,
            1 => self.avg_mem,
            2 => self.avg_storage,
            _ => panic!("resource dimension {dim} out of range"),
        }
    }

    pub fn distance(&self, other: &FeatureTriplet) -> f64 {
        (0..3)
            .map(|d| (self.get(d) - other.get(d)).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

pub fn partition_feature<'a, I>(devices: I) -> Result<FeatureTriplet>
where
    I: IntoIterator<Item = &'a Device>,
{
    let mut sums = [0.0; 3];
    let mut count = 0usize;
    for d in devices {
        for (dim, s) in sums.iter_mut().enumerate() {
            *s += d.resource(dim);
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyPartition);
    }
    let c = count as f64;
    Ok(FeatureTriplet {
        avg_cpu: sums[0] / c,
        avg_mem: sums[1] / c,
        avg_storage: sums[2] / c,
    })
}

/// A resource-layer partition as a node of the compressed graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressedNode {
    pub layer: Layer,
    pub partition: usize,
    pub devices: Vec<DeviceId>,
    pub feature: FeatureTriplet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressedGraph {
    pub nodes: Vec<CompressedNode>,
    /// Undirected node pairs `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl CompressedGraph {
    pub fn node_index(&self, layer: Layer, partition: usize) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| n.layer == layer && n.partition == partition)
    }
}

/// Merges the partitions of the given resource layers into one node each and
/// links two nodes whenever an inter-layer edge joins devices they contain.
pub fn compress_graph(
    layers: &[&PartitionSet],
    devices: &[Device],
    inter_edges: &[InterLayerEdge],
) -> Result<CompressedGraph> {
    let mut nodes = Vec::new();
    let mut offset: BTreeMap<Layer, usize> = BTreeMap::new();
    for set in layers {
        let layer = set.layer.ok_or_else(|| {
            Error::InvalidConfig("compressed partitions must belong to a layer".into())
        })?;
        if set.assignment.len() != devices.len() {
            return Err(Error::AssignmentMismatch {
                expected: devices.len(),
                got: set.assignment.len(),
            });
        }
        if offset.insert(layer, nodes.len()).is_some() {
            return Err(Error::InvalidConfig(format!("layer {layer} given twice")));
        }
        for (pid, members) in set.partitions.iter().enumerate() {
            let feature = partition_feature(members.iter().map(|d| &devices[d.index()]))?;
            nodes.push(CompressedNode {
                layer,
                partition: pid,
                devices: members.clone(),
                feature,
            });
        }
    }
    let by_layer: BTreeMap<Layer, &PartitionSet> = layers
        .iter()
        .map(|s| (s.layer.expect("checked"), *s))
        .collect();
    let mut edges = BTreeSet::new();
    for e in inter_edges {
        let (Some(from), Some(to)) = (by_layer.get(&e.from), by_layer.get(&e.to)) else {
            continue;
        };
        let a = offset[&e.from] + from.partition_of(e.device);
        let b = offset[&e.to] + to.partition_of(e.device);
        edges.insert((a.min(b), a.max(b)));
    }
    Ok(CompressedGraph {
        nodes,
        edges: edges.into_iter().collect(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompressedWeights {
    /// `1 / (1 + euclidean(F_p, F_q))` on every compressed edge.
    #[default]
    FeatureSimilarity,
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePartition {
    /// Indices into the compressed graph's nodes.
    pub members: Vec<usize>,
    /// Union of the member partitions' devices, sorted.
    pub devices: Vec<DeviceId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePartitionSet {
    pub partitions: Vec<FeaturePartition>,
    pub modularity: f64,
}

impl FeaturePartitionSet {
    /// Feature partition containing compressed node `node`.
    pub fn partition_of(&self, node: usize) -> Option<usize> {
        self.partitions
            .iter()
            .position(|fp| fp.members.contains(&node))
    }
}

/// Louvain clustering of the compressed graph.
pub fn feature_partition(
    cg: &CompressedGraph,
    weights: CompressedWeights,
    config: &LouvainConfig,
) -> FeaturePartitionSet {
    let edges: Vec<(usize, usize, f64)> = cg
        .edges
        .iter()
        .map(|&(a, b)| {
            let w = match weights {
                CompressedWeights::Unit => 1.0,
                CompressedWeights::FeatureSimilarity => {
                    1.0 / (1.0 + cg.nodes[a].feature.distance(&cg.nodes[b].feature))
                }
            };
            (a, b, w)
        })
        .collect();
    let graph = CommunityGraph::from_edges(cg.nodes.len(), &edges);
    let out = louvain(&graph, config);
    let k = out.labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut partitions: Vec<FeaturePartition> = (0..k)
        .map(|_| FeaturePartition {
            members: Vec::new(),
            devices: Vec::new(),
        })
        .collect();
    for (node, &fp) in out.labels.iter().enumerate() {
        partitions[fp].members.push(node);
        partitions[fp]
            .devices
            .extend(cg.nodes[node].devices.iter().copied());
    }
    for fp in &mut partitions {
        fp.devices.sort_unstable();
        fp.devices.dedup();
    }
    FeaturePartitionSet {
        partitions,
        modularity: out.modularity,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    /// Resource layers taking part in compression and feature partitioning.
    pub resource_layers: Vec<Layer>,
    pub compressed_weights: CompressedWeights,
    pub louvain: LouvainConfig,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            resource_layers: Layer::RESOURCES.to_vec(),
            compressed_weights: CompressedWeights::default(),
            louvain: LouvainConfig::default(),
        }
    }
}

/// Everything produced by the multilayer resource partitioning pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOutput {
    pub network: PartitionSet,
    pub resource_layers: Vec<PartitionSet>,
    pub compressed: CompressedGraph,
    pub features: FeaturePartitionSet,
    /// Multilayer modularity, with resource-layer replicas coupled when their
    /// partitions share a feature partition and the network layer uncoupled.
    pub multilayer_modularity: f64,
}

impl PartitionOutput {
    /// Global community labels used for the multilayer modularity
    /// diagnostic.
    pub fn coupled_labels(&self) -> LayerLabels {
        let mut labels = LayerLabels::new();
        let fp_count = self.features.partitions.len();
        labels.insert(
            Layer::Network,
            self.network
                .assignment
                .iter()
                .map(|&p| fp_count + p)
                .collect(),
        );
        for set in &self.resource_layers {
            let layer = set.layer.expect("resource partitions carry their layer");
            let l: Vec<usize> = set
                .assignment
                .iter()
                .map(|&p| {
                    let node = self.compressed.node_index(layer, p).expect("node exists");
                    self.features.partition_of(node).expect("node is clustered")
                })
                .collect();
            labels.insert(layer, l);
        }
        labels
    }
}

/// Partitions the network and resource layers, compresses the resource-layer
/// partitions, and clusters them into feature partitions.
pub fn multilayer_resource_partition(
    g: &MultilayerGraph,
    config: &PartitionConfig,
) -> Result<PartitionOutput> {
    if g.device_count() == 0 {
        return Err(Error::InvalidConfig("infrastructure has no devices".into()));
    }
    let network = louvain_partition(&g.layer_view(Layer::Network), &config.louvain);
    let resource_layers: Vec<PartitionSet> = config
        .resource_layers
        .iter()
        .map(|&l| louvain_partition(&g.layer_view(l), &config.louvain))
        .collect();
    let refs: Vec<&PartitionSet> = resource_layers.iter().collect();
    let compressed = compress_graph(&refs, g.devices(), g.inter_edges())?;
    let features = feature_partition(&compressed, config.compressed_weights, &config.louvain);
    let mut out = PartitionOutput {
        network,
        resource_layers,
        compressed,
        features,
        multilayer_modularity: 0.0,
    };
    out.multilayer_modularity = multilayer_modularity(g, &out.coupled_labels())?;
    log::debug!(
        "partitioned {} devices: {} network partitions, {} feature partitions",
        g.device_count(),
        out.network.len(),
        out.features.partitions.len()
    );
    Ok(out)
}
