//! Physical network topology and shortest-hop routing over live devices.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{transmission_time, Device, DeviceId, NetworkLink, Transmission};

/// Validates `devices` and `links` and builds an adjacency structure.
#[derive(Debug, Clone)]
pub struct Topology {
    links: Vec<NetworkLink>,
    /// Per device: (neighbor, link index), sorted by neighbor id.
    adjacency: Vec<Vec<(DeviceId, usize)>>,
}

impl Topology {
    pub fn new(devices: &[Device], links: &[NetworkLink]) -> Result<Self> {
        validate_devices(devices)?;
        let n = devices.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for (i, link) in links.iter().enumerate() {
            let (a, b) = link.endpoints;
            if a.index() >= n || b.index() >= n || a == b {
                return Err(Error::DanglingLink(a, b));
            }
            if !seen.insert(link.key()) {
                return Err(Error::DuplicateLink(a, b));
            }
            if !(link.bandwidth > 0.0) || link.latency < 0.0 {
                return Err(Error::InvalidTransmission(format!(
                    "link {a} -- {b} needs positive bandwidth and non-negative latency"
                )));
            }
            adjacency[a.index()].push((b, i));
            adjacency[b.index()].push((a, i));
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        Ok(Self {
            links: links.to_vec(),
            adjacency,
        })
    }

    pub fn device_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn links(&self) -> &[NetworkLink] {
        &self.links
    }

    pub fn neighbors(&self, d: DeviceId) -> impl Iterator<Item = DeviceId> + '_ {
        self.adjacency[d.index()].iter().map(|&(n, _)| n)
    }

    /// All-pairs shortest-hop routes using only devices marked alive.
    pub fn routes(&self, alive: &[bool]) -> RouteTable {
        let n = self.device_count();
        let trees = (0..n)
            .map(|src| self.bfs(DeviceId(src as u32), alive))
            .collect();
        RouteTable {
            links: self.links.clone(),
            trees,
        }
    }

    /// Shortest-hop routes assuming every device is alive.
    pub fn all_alive_routes(&self) -> RouteTable {
        self.routes(&vec![true; self.device_count()])
    }

    fn bfs(&self, src: DeviceId, alive: &[bool]) -> RouteTree {
        let n = self.device_count();
        let mut tree = RouteTree {
            hops: vec![None; n],
            parent_link: vec![None; n],
        };
        if !alive[src.index()] {
            return tree;
        }
        tree.hops[src.index()] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let h = tree.hops[v.index()].expect("queued nodes are reached");
            for &(w, link) in &self.adjacency[v.index()] {
                if alive[w.index()] && tree.hops[w.index()].is_none() {
                    tree.hops[w.index()] = Some(h + 1);
                    tree.parent_link[w.index()] = Some(link);
                    queue.push_back(w);
                }
            }
        }
        tree
    }
}

/// Device ids must be unique and equal to their position.
pub fn validate_devices(devices: &[Device]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, d) in devices.iter().enumerate() {
        if !seen.insert(d.id) {
            return Err(Error::DuplicateDevice(d.id));
        }
        if d.id.index() != i {
            return Err(Error::NonDenseDeviceIds {
                position: i,
                found: d.id,
            });
        }
        d.validate()?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct RouteTree {
    hops: Vec<Option<u32>>,
    parent_link: Vec<Option<usize>>,
}

/// Shortest-hop routing state for one liveness snapshot.
#[derive(Debug, Clone)]
pub struct RouteTable {
    links: Vec<NetworkLink>,
    trees: Vec<RouteTree>,
}

impl RouteTable {
    /// Hop count from `from` to `to`; `None` when unreachable.
    pub fn hops(&self, from: DeviceId, to: DeviceId) -> Option<u32> {
        self.trees[from.index()].hops[to.index()]
    }

    /// Links of the route from `from` to `to`, in travel order.
    pub fn path(&self, from: DeviceId, to: DeviceId) -> Option<Vec<&NetworkLink>> {
        let tree = &self.trees[from.index()];
        tree.hops[to.index()]?;
        let mut path = Vec::new();
        let mut at = to;
        while at != from {
            let link = &self.links[tree.parent_link[at.index()].expect("reached node has parent")];
            path.push(link);
            at = link.other(at);
        }
        path.reverse();
        Some(path)
    }
}

impl Transmission for RouteTable {
    fn transmission_ms(&self, from: DeviceId, to: DeviceId, size: f64) -> Option<f64> {
        let path = self.path(from, to)?;
        transmission_time(path, size).ok()
    }
}

/// Outcome of a hop-distance query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HopDistance {
    Hops(u32),
    Unreachable,
}

/// Shortest-path hop count over live links; zero when `device` is the
/// gateway itself.
pub fn hop_distance(routes: &RouteTable, gateway: DeviceId, device: DeviceId) -> HopDistance {
    match routes.hops(gateway, device) {
        Some(h) => HopDistance::Hops(h),
        None => HopDistance::Unreachable,
    }
}
