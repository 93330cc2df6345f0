//! Infrastructure and application model, plus the timing and constraint
//! formulas used by placement and simulation.
//!
//! Units used throughout the crate:
//!
//! - cpu speed in MI per second (per core), workload in MI
//! - memory in GB, storage in TB
//! - link latency in ms, bandwidth in bytes per ms, message size in bytes
//! - every time value (execution, transmission, response, deadline) in ms

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Position of a device in the infrastructure's device list.
    DeviceId
);
id_type!(
    /// Position of a service inside its application.
    ServiceId
);
id_type!(AppId);
id_type!(UserId);
id_type!(RequestId);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceRole {
    #[default]
    Fog,
    Gateway,
    Cloud,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub id: DeviceId,
    #[serde(default)]
    pub role: DeviceRole,
    pub cores: u32,
    /// MI per second, per core.
    pub cpu_speed: f64,
    /// GB.
    pub mem: f64,
    /// TB.
    pub storage: f64,
    pub residual_cores: u32,
    pub residual_mem: f64,
    pub residual_storage: f64,
    #[serde(default = "alive_default")]
    pub alive: bool,
}

fn alive_default() -> bool {
    true
}

impl Device {
    /// A fresh device with all capacity available.
    pub fn new(id: DeviceId, cores: u32, cpu_speed: f64, mem: f64, storage: f64) -> Self {
        Self {
            id,
            role: DeviceRole::Fog,
            cores,
            cpu_speed,
            mem,
            storage,
            residual_cores: cores,
            residual_mem: mem,
            residual_storage: storage,
            alive: true,
        }
    }

    pub fn with_role(mut self, role: DeviceRole) -> Self {
        self.role = role;
        self
    }

    /// Resource value of the device in one of the three resource dimensions
    /// (0 = cpu speed, 1 = memory, 2 = storage).
    pub fn resource(&self, dim: usize) -> f64 {
        match dim {
            0 => self.cpu_speed,
            1 => self.mem,
            2 => self.storage,
            _ => panic!("resource dimension {dim} out of range"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidDevice(self.id, msg.to_string()));
        if !(self.cpu_speed > 0.0 && self.mem > 0.0 && self.storage > 0.0) {
            return bad("cpu speed, memory and storage must be strictly positive");
        }
        if self.residual_cores > self.cores
            || !(0.0..=self.mem).contains(&self.residual_mem)
            || !(0.0..=self.storage).contains(&self.residual_storage)
        {
            return bad("residual capacity outside [0, capacity]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLink {
    pub endpoints: (DeviceId, DeviceId),
    /// Bytes per ms.
    pub bandwidth: f64,
    /// ms.
    pub latency: f64,
}

impl NetworkLink {
    pub fn new(a: DeviceId, b: DeviceId, bandwidth: f64, latency: f64) -> Self {
        Self {
            endpoints: (a, b),
            bandwidth,
            latency,
        }
    }

    /// Endpoints as an ordered pair, smaller id first.
    pub fn key(&self) -> (DeviceId, DeviceId) {
        let (a, b) = self.endpoints;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn other(&self, end: DeviceId) -> DeviceId {
        if self.endpoints.0 == end {
            self.endpoints.1
        } else {
            self.endpoints.0
        }
    }

    /// Time to push `size` bytes across this single link.
    pub fn hop_time(&self, size: f64) -> f64 {
        self.latency + size / self.bandwidth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Service {
    pub id: ServiceId,
    /// MI.
    pub workload: f64,
    /// GB.
    pub mem_demand: f64,
    /// TB.
    pub storage_demand: f64,
}

impl Service {
    pub fn new(id: u32, workload: f64, mem_demand: f64, storage_demand: f64) -> Self {
        Self {
            id: ServiceId(id),
            workload,
            mem_demand,
            storage_demand,
        }
    }

    pub fn demand(&self, dim: usize) -> f64 {
        match dim {
            0 => self.workload,
            1 => self.mem_demand,
            2 => self.storage_demand,
            _ => panic!("resource dimension {dim} out of range"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    User,
    Service(ServiceId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub source: Endpoint,
    pub destination: ServiceId,
    /// Bytes.
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Application {
    pub id: AppId,
    pub services: Vec<Service>,
    /// Every message of the application, including the single entry message
    /// sent by the user.
    pub messages: Vec<Message>,
    /// ms.
    pub deadline: f64,
}

impl Application {
    pub fn entry_message(&self) -> Option<&Message> {
        self.messages.iter().find(|m| m.source == Endpoint::User)
    }

    pub fn entry_service(&self) -> Option<ServiceId> {
        self.entry_message().map(|m| m.destination)
    }

    /// Messages arriving at `service` from other services.
    pub fn incoming(&self, service: ServiceId) -> impl Iterator<Item = (ServiceId, &Message)> {
        self.messages.iter().filter_map(move |m| match m.source {
            Endpoint::Service(src) if m.destination == service => Some((src, m)),
            _ => None,
        })
    }

    /// Structural checks: dense service ids, positive demands and sizes,
    /// exactly one entry message, an acyclic graph reachable from the entry.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidApplication(self.id.0, msg));
        if self.services.is_empty() {
            return bad("no services".into());
        }
        for (i, s) in self.services.iter().enumerate() {
            if s.id.index() != i {
                return bad(format!("service at position {i} has id {}", s.id));
            }
            if !(s.workload > 0.0 && s.mem_demand > 0.0 && s.storage_demand > 0.0) {
                return bad(format!("service {} has a non-positive demand", s.id));
            }
        }
        let n = self.services.len();
        let mut entries = 0;
        for m in &self.messages {
            if !(m.size > 0.0) {
                return bad("message with non-positive size".into());
            }
            if m.destination.index() >= n {
                return bad(format!("message to unknown service {}", m.destination));
            }
            match m.source {
                Endpoint::User => entries += 1,
                Endpoint::Service(s) if s.index() >= n => {
                    return bad(format!("message from unknown service {s}"));
                }
                Endpoint::Service(s) if s == m.destination => {
                    return bad(format!("self-loop on service {s}"));
                }
                Endpoint::Service(_) => {}
            }
        }
        if entries != 1 {
            return bad(format!(
                "expected exactly one entry message, found {entries}"
            ));
        }
        let order = self.topological_order()?;
        // reachability from the entry
        let entry = self.entry_service().expect("entry checked above");
        let mut reached = vec![false; n];
        reached[entry.index()] = true;
        for s in &order {
            if !reached[s.index()] {
                continue;
            }
            for m in &self.messages {
                if m.source == Endpoint::Service(*s) {
                    reached[m.destination.index()] = true;
                }
            }
        }
        if let Some(i) = reached.iter().position(|r| !r) {
            return bad(format!("service {i} is unreachable from the entry service"));
        }
        Ok(())
    }

    /// Kahn's algorithm, smallest ready id first.
    pub fn topological_order(&self) -> Result<Vec<ServiceId>> {
        let n = self.services.len();
        let mut indegree = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for m in &self.messages {
            if let Endpoint::Service(src) = m.source {
                indegree[m.destination.index()] += 1;
                out[src.index()].push(m.destination.index());
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(next) = ready.pop_first() {
            order.push(ServiceId(next as u32));
            for &dst in &out[next] {
                indegree[dst] -= 1;
                if indegree[dst] == 0 {
                    ready.insert(dst);
                }
            }
        }
        if order.len() != n {
            return Err(Error::InvalidApplication(
                self.id.0,
                "service graph contains a cycle".into(),
            ));
        }
        Ok(order)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: UserId,
    pub gateway: DeviceId,
}

/// One user asking for one application instance to be placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementRequest {
    pub id: RequestId,
    pub user: UserId,
    pub app: AppId,
}

/// Assignment of every service of one application to a device, `None`
/// marking an invalid placement.
pub type Assignment = Vec<Option<DeviceId>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementPlan {
    pub request: RequestId,
    pub app: AppId,
    pub user: UserId,
    #[serde(with = "assignment_serde")]
    pub assignment: Assignment,
    /// Response time of every service; empty unless the whole application
    /// was placed.
    pub per_service_rt: Vec<f64>,
    pub app_rt: Option<f64>,
}

impl PlacementPlan {
    pub fn placed_count(&self) -> usize {
        self.assignment.iter().filter(|d| d.is_some()).count()
    }

    pub fn fully_placed(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }
}

/// Assignments serialize as a service id -> device id | "invalid" map.
mod assignment_serde {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::DeviceId;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Slot {
        Device(u32),
        Invalid(String),
    }

    pub fn serialize<S: Serializer>(a: &[Option<DeviceId>], s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<u32, Slot> = a
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let slot = match d {
                    Some(d) => Slot::Device(d.0),
                    None => Slot::Invalid("invalid".to_string()),
                };
                (i as u32, slot)
            })
            .collect();
        map.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<DeviceId>>, D::Error> {
        let map: BTreeMap<u32, Slot> = BTreeMap::deserialize(d)?;
        let mut out = vec![None; map.len()];
        for (k, v) in map {
            let i = k as usize;
            let slot = out
                .get_mut(i)
                .ok_or_else(|| D::Error::custom(format!("service index {i} out of range")))?;
            *slot = match v {
                Slot::Device(d) => Some(DeviceId(d)),
                Slot::Invalid(s) if s == "invalid" => None,
                Slot::Invalid(s) => return Err(D::Error::custom(format!("bad slot {s:?}"))),
            };
        }
        Ok(out)
    }
}

/// Whether `service` may be placed on `device` for an application with
/// deadline `deadline` (ms): the execution time must not exceed the deadline,
/// memory and storage demands must fit the residuals, and one core must be
/// free.
pub fn placement_valid(service: &Service, device: &Device, deadline: f64) -> bool {
    device.alive
        && device.cpu_speed > 0.0
        && service.workload / device.cpu_speed * 1000.0 <= deadline
        && service.mem_demand <= device.residual_mem
        && service.storage_demand <= device.residual_storage
        && device.residual_cores >= 1
}

/// Execution time in ms.
pub fn execution_time(service: &Service, device: &Device) -> Result<f64> {
    if !(device.cpu_speed > 0.0) {
        return Err(Error::NonPositiveSpeed(device.id));
    }
    Ok(service.workload / device.cpu_speed * 1000.0)
}

/// Sum of per-hop `latency + size / bandwidth` along `path`; an empty path
/// (co-located endpoints) costs nothing.
pub fn transmission_time<'a, I>(path: I, size: f64) -> Result<f64>
where
    I: IntoIterator<Item = &'a NetworkLink>,
{
    if !(size > 0.0) {
        return Err(Error::InvalidTransmission(format!(
            "message size must be positive, got {size}"
        )));
    }
    let mut total = 0.0;
    for link in path {
        if !(link.bandwidth > 0.0) || link.latency < 0.0 {
            return Err(Error::InvalidTransmission(format!(
                "link {} -- {} has bandwidth {} and latency {}",
                link.endpoints.0, link.endpoints.1, link.bandwidth, link.latency
            )));
        }
        total += link.hop_time(size);
    }
    Ok(total)
}

/// Source of device-to-device message transmission times.
pub trait Transmission {
    /// Transmission time in ms, or `None` when `to` is unreachable from
    /// `from` (including either device being down).
    fn transmission_ms(&self, from: DeviceId, to: DeviceId, size: f64) -> Option<f64>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTimes {
    pub per_service: Vec<f64>,
    pub app_rt: f64,
}

/// Response time of every service and of the whole application, with the
/// user's requests entering the infrastructure at `gateway`.
///
/// The entry service costs the transmission from the gateway plus its
/// execution time; any other service costs the slowest predecessor
/// (predecessor response plus message transmission) plus its own execution.
pub fn response_times<T: Transmission + ?Sized>(
    app: &Application,
    assignment: &[Option<DeviceId>],
    devices: &[Device],
    gateway: DeviceId,
    net: &T,
) -> Result<ResponseTimes> {
    let order = app.topological_order()?;
    let mut rt = vec![f64::NAN; app.services.len()];
    for sid in order {
        let host = assignment
            .get(sid.index())
            .copied()
            .flatten()
            .ok_or(Error::UnplacedDependency(sid))?;
        let exec = execution_time(&app.services[sid.index()], &devices[host.index()])?;
        let mut arrival: Option<f64> = None;
        for m in app.messages.iter().filter(|m| m.destination == sid) {
            let (from, ready) = match m.source {
                Endpoint::User => (gateway, 0.0),
                Endpoint::Service(p) => {
                    let from = assignment[p.index()].ok_or(Error::UnplacedDependency(p))?;
                    (from, rt[p.index()])
                }
            };
            let t = net
                .transmission_ms(from, host, m.size)
                .ok_or(Error::Unreachable { from, to: host })?;
            let candidate = ready + t;
            arrival = Some(arrival.map_or(candidate, |a: f64| a.max(candidate)));
        }
        rt[sid.index()] = arrival.unwrap_or(0.0) + exec;
    }
    let app_rt = rt.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ResponseTimes {
        per_service: rt,
        app_rt,
    })
}

/// Deadline fulfilment is strict: `rt_a < deadline`.
pub fn deadline_satisfied(app: &Application, rt_a: f64) -> bool {
    rt_a < app.deadline
}
