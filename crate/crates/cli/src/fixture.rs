//! Hand-written layered graphs: devices plus explicit intra-layer edges.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use fogpart_core::model::{Device, DeviceId};
use fogpart_core::multilayer::{Layer, MultilayerGraph, WeightedEdge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    LayeredGraph,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureDevice {
    pub id: u32,
    #[serde(default)]
    pub label: Option<String>,
    pub cores: u32,
    pub cpu_speed: f64,
    pub mem: f64,
    pub storage: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredGraphFixture {
    pub schema_version: u32,
    pub kind: FixtureKind,
    #[serde(default)]
    pub description: Option<String>,
    pub devices: Vec<FixtureDevice>,
    /// Layer name (`network`, `cpu`, `memory`, `storage`) to `[a, b, weight]`
    /// edges.
    pub layers: BTreeMap<String, Vec<(u32, u32, f64)>>,
}

fn layer_by_name(name: &str) -> Result<Layer> {
    match Layer::ALL.into_iter().find(|l| l.name() == name) {
        Some(l) => Ok(l),
        None => bail!("unknown layer {name:?}"),
    }
}

impl LayeredGraphFixture {
    pub fn devices(&self) -> Vec<Device> {
        self.devices
            .iter()
            .map(|d| Device::new(DeviceId(d.id), d.cores, d.cpu_speed, d.mem, d.storage))
            .collect()
    }

    /// The resource layers that carry edges in the fixture.
    pub fn resource_layers(&self) -> Result<Vec<Layer>> {
        let mut out = Vec::new();
        for name in self.layers.keys() {
            let l = layer_by_name(name)?;
            if l != Layer::Network {
                out.push(l);
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn graph(&self) -> Result<MultilayerGraph> {
        let mut layers = BTreeMap::new();
        for (name, edges) in &self.layers {
            let edges = edges
                .iter()
                .map(|&(a, b, weight)| WeightedEdge {
                    a: DeviceId(a),
                    b: DeviceId(b),
                    weight,
                })
                .collect();
            layers.insert(layer_by_name(name)?, edges);
        }
        Ok(MultilayerGraph::from_layer_edges(&self.devices(), layers)?)
    }
}
