//! Seeded synthesis of fog infrastructures, applications, users and request
//! schedules.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AppId, Application, Device, DeviceId, DeviceRole, Endpoint, Message, NetworkLink,
    PlacementRequest, RequestId, Service, ServiceId, User, UserId,
};
use crate::topology::Topology;

pub const SCHEMA_VERSION: u32 = 1;

/// Independent random streams, one per generated component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Topology = 1,
    Resources = 2,
    Applications = 3,
    Users = 4,
    Requests = 5,
    Failures = 6,
}

/// ChaCha8 generator for one component, derived from the run seed.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Inclusive integer range sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformRange {
    pub min: u64,
    pub max: u64,
}

impl UniformRange {
    pub const fn new(min: u64, max: u64) -> Self {
        Self { min, max }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(self.min..=self.max)
    }

    pub fn contains(&self, v: u64) -> bool {
        (self.min..=self.max).contains(&v)
    }

    fn check(&self, name: &str) -> Result<()> {
        if self.min > self.max {
            return Err(Error::InvalidConfig(format!(
                "{name}: min {} exceeds max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceRanges {
    pub cores: UniformRange,
    /// MI/s.
    pub cpu_speed: UniformRange,
    pub mem_gb: UniformRange,
    pub storage_tb: UniformRange,
}

impl Default for ResourceRanges {
    fn default() -> Self {
        Self {
            cores: UniformRange::new(10, 25),
            cpu_speed: UniformRange::new(20, 60),
            mem_gb: UniformRange::new(10, 25),
            storage_tb: UniformRange::new(10, 25),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppRanges {
    pub services: UniformRange,
    pub deadline_ms: UniformRange,
    pub mem_gb: UniformRange,
    pub storage_tb: UniformRange,
    pub message_size_kb: UniformRange,
    pub workload_mi: UniformRange,
}

impl Default for AppRanges {
    fn default() -> Self {
        Self {
            services: UniformRange::new(2, 10),
            deadline_ms: UniformRange::new(300, 50_000),
            mem_gb: UniformRange::new(1, 6),
            storage_tb: UniformRange::new(1, 6),
            message_size_kb: UniformRange::new(1500, 4500),
            workload_mi: UniformRange::new(20, 60),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    pub latency_ms: f64,
    pub bandwidth_bytes_per_ms: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            latency_ms: 5.0,
            bandwidth_bytes_per_ms: 75_000.0,
        }
    }
}

/// Periodic requests: every user re-requests its application at
/// `k * period_s` for `k = 1, 2, ...` up to the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub period_s: f64,
    pub horizon_s: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            period_s: 1.557,
            horizon_s: 2000.0,
        }
    }
}

impl ScheduleConfig {
    /// Number of requests each user issues within `horizon_s`.
    pub fn requests_per_user(&self, horizon_s: f64) -> usize {
        if !(self.period_s > 0.0) || !(horizon_s > 0.0) {
            return 0;
        }
        let mut k = (horizon_s / self.period_s).floor() as usize;
        while k > 0 && k as f64 * self.period_s > horizon_s {
            k -= 1;
        }
        while (k + 1) as f64 * self.period_s <= horizon_s {
            k += 1;
        }
        k
    }

    /// Request times in seconds within `horizon_s`.
    pub fn times_s(&self, horizon_s: f64) -> impl Iterator<Item = f64> + '_ {
        let period = self.period_s;
        (1..=self.requests_per_user(horizon_s)).map(move |k| k as f64 * period)
    }
}

/// The evaluation scenarios: three one-shot placement sizes and their
/// deadline-fulfilment counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "SMALL")]
    Small,
    #[serde(rename = "MEDIUM")]
    Medium,
    #[serde(rename = "LARGE")]
    Large,
    #[serde(rename = "D-SMALL")]
    DSmall,
    #[serde(rename = "D-MEDIUM")]
    DMedium,
    #[serde(rename = "D-LARGE")]
    DLarge,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Small,
        Preset::Medium,
        Preset::Large,
        Preset::DSmall,
        Preset::DMedium,
        Preset::DLarge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Small => "SMALL",
            Preset::Medium => "MEDIUM",
            Preset::Large => "LARGE",
            Preset::DSmall => "D-SMALL",
            Preset::DMedium => "D-MEDIUM",
            Preset::DLarge => "D-LARGE",
        }
    }

    /// `(applications, users)`.
    pub fn counts(self) -> (usize, usize) {
        match self {
            Preset::Small | Preset::DSmall => (10, 29),
            Preset::Medium | Preset::DMedium => (20, 65),
            Preset::Large | Preset::DLarge => (30, 98),
        }
    }

    pub fn is_deadline_scenario(self) -> bool {
        matches!(self, Preset::DSmall | Preset::DMedium | Preset::DLarge)
    }

    pub fn config(self, seed: u64) -> ScenarioConfig {
        let (app_count, user_count) = self.counts();
        ScenarioConfig {
            name: self.name().to_string(),
            app_count,
            user_count,
            schedule: self.is_deadline_scenario().then(ScheduleConfig::default),
            seed,
            ..ScenarioConfig::default()
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase().replace('_', "-");
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == upper)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown preset {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub device_count: usize,
    pub gateway_count: usize,
    /// Edges added by every new node of the preferential-attachment graph.
    pub ba_attachment: usize,
    pub resources: ResourceRanges,
    pub apps: AppRanges,
    pub network: NetworkParams,
    pub app_count: usize,
    pub user_count: usize,
    /// Present for deadline-fulfilment scenarios.
    pub schedule: Option<ScheduleConfig>,
    /// Add a cloud device with every resource range maximum multiplied by
    /// `cloud_factor`.
    pub cloud: bool,
    pub cloud_factor: u64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "custom".to_string(),
            device_count: 100,
            gateway_count: 25,
            ba_attachment: 2,
            resources: ResourceRanges::default(),
            apps: AppRanges::default(),
            network: NetworkParams::default(),
            app_count: 10,
            user_count: 29,
            schedule: None,
            cloud: true,
            cloud_factor: 10,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.device_count == 0 {
            return fail("device_count must be positive".into());
        }
        if self.gateway_count == 0 || self.gateway_count >= self.device_count {
            return fail(format!(
                "gateway_count {} must be in 1..{}",
                self.gateway_count, self.device_count
            ));
        }
        if self.ba_attachment == 0 || self.ba_attachment >= self.device_count {
            return fail(format!(
                "ba_attachment {} must be in 1..{}",
                self.ba_attachment, self.device_count
            ));
        }
        if self.app_count == 0 || self.user_count == 0 {
            return fail("app_count and user_count must be positive".into());
        }
        let r = &self.resources;
        r.cores.check("resources.cores")?;
        r.cpu_speed.check("resources.cpu_speed")?;
        r.mem_gb.check("resources.mem_gb")?;
        r.storage_tb.check("resources.storage_tb")?;
        let a = &self.apps;
        a.services.check("apps.services")?;
        a.deadline_ms.check("apps.deadline_ms")?;
        a.mem_gb.check("apps.mem_gb")?;
        a.storage_tb.check("apps.storage_tb")?;
        a.message_size_kb.check("apps.message_size_kb")?;
        a.workload_mi.check("apps.workload_mi")?;
        let positive = [
            ("resources.cores.min", r.cores.min),
            ("resources.cpu_speed.min", r.cpu_speed.min),
            ("resources.mem_gb.min", r.mem_gb.min),
            ("resources.storage_tb.min", r.storage_tb.min),
            ("apps.services.min", a.services.min),
            ("apps.deadline_ms.min", a.deadline_ms.min),
            ("apps.mem_gb.min", a.mem_gb.min),
            ("apps.storage_tb.min", a.storage_tb.min),
            ("apps.message_size_kb.min", a.message_size_kb.min),
            ("apps.workload_mi.min", a.workload_mi.min),
        ];
        for (name, v) in positive {
            if v == 0 {
                return fail(format!("{name} must be positive"));
            }
        }
        if !(self.network.bandwidth_bytes_per_ms > 0.0) || !(self.network.latency_ms >= 0.0) {
            return fail("network needs positive bandwidth and non-negative latency".into());
        }
        if let Some(s) = &self.schedule {
            if !(s.period_s > 0.0) || !(s.horizon_s >= 0.0) {
                return fail("schedule needs a positive period and non-negative horizon".into());
            }
        }
        if self.cloud && self.cloud_factor == 0 {
            return fail("cloud_factor must be positive".into());
        }
        Ok(())
    }
}

/// Undirected preferential-attachment graph on `n` nodes. Starts from a
/// star on `m + 1` nodes; each later node links to `m` distinct existing
/// nodes picked with probability proportional to their degree.
pub fn barabasi_albert<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    assert!(m >= 1 && m < n, "need 1 <= m < n");
    let mut edges: Vec<(usize, usize)> = (1..=m).map(|leaf| (0, leaf)).collect();
    let mut repeated: Vec<usize> = Vec::with_capacity(2 * m * n);
    for &(a, b) in &edges {
        repeated.push(a);
        repeated.push(b);
    }
    for source in (m + 1)..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(repeated[rng.random_range(0..repeated.len())]);
        }
        for t in targets {
            edges.push((t, source));
            repeated.push(t);
            repeated.push(source);
        }
    }
    edges
}

/// Exact betweenness centrality of an unweighted undirected graph
/// (Brandes), unnormalised.
pub fn betweenness_centrality(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for row in &mut adj {
        row.sort_unstable();
    }
    let mut cb = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        stack.clear();
        for p in &mut preds {
            p.clear();
        }
        sigma.fill(0.0);
        dist.fill(-1);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }
    // each pair was counted from both endpoints
    cb.iter_mut().for_each(|c| *c /= 2.0);
    cb
}

/// Node ids sorted by ascending centrality, ties by id.
pub fn rank_by_centrality(centrality: &[f64]) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..centrality.len()).collect();
    ids.sort_by(|&a, &b| centrality[a].total_cmp(&centrality[b]).then(a.cmp(&b)));
    ids
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedTopology {
    pub devices: Vec<Device>,
    pub links: Vec<NetworkLink>,
    pub gateways: Vec<DeviceId>,
    pub cloud: Option<DeviceId>,
    pub centrality: Vec<f64>,
}

pub fn generate_topology(cfg: &ScenarioConfig) -> Result<GeneratedTopology> {
    cfg.validate()?;
    let n = cfg.device_count;
    let mut topo_rng = stream_rng(cfg.seed, Stream::Topology);
    let edges = barabasi_albert(n, cfg.ba_attachment, &mut topo_rng);
    let centrality = betweenness_centrality(n, &edges);
    let ranked = rank_by_centrality(&centrality);
    let mut gateways: Vec<DeviceId> = ranked[..cfg.gateway_count]
        .iter()
        .map(|&i| DeviceId(i as u32))
        .collect();
    gateways.sort_unstable();
    let hub = *ranked.last().expect("at least one device");

    let mut res_rng = stream_rng(cfg.seed, Stream::Resources);
    let r = &cfg.resources;
    let mut devices: Vec<Device> = (0..n)
        .map(|i| {
            let cores = r.cores.sample(&mut res_rng) as u32;
            let speed = r.cpu_speed.sample(&mut res_rng) as f64;
            let mem = r.mem_gb.sample(&mut res_rng) as f64;
            let storage = r.storage_tb.sample(&mut res_rng) as f64;
            Device::new(DeviceId(i as u32), cores, speed, mem, storage)
        })
        .collect();
    for g in &gateways {
        devices[g.index()].role = DeviceRole::Gateway;
    }
    let net = cfg.network;
    let mut links: Vec<NetworkLink> = edges
        .iter()
        .map(|&(a, b)| {
            NetworkLink::new(
                DeviceId(a as u32),
                DeviceId(b as u32),
                net.bandwidth_bytes_per_ms,
                net.latency_ms,
            )
        })
        .collect();
    let mut cloud = None;
    if cfg.cloud {
        let f = cfg.cloud_factor;
        let id = DeviceId(n as u32);
        devices.push(
            Device::new(
                id,
                (r.cores.max * f) as u32,
                (r.cpu_speed.max * f) as f64,
                (r.mem_gb.max * f) as f64,
                (r.storage_tb.max * f) as f64,
            )
            .with_role(DeviceRole::Cloud),
        );
        links.push(NetworkLink::new(
            DeviceId(hub as u32),
            id,
            net.bandwidth_bytes_per_ms,
            net.latency_ms,
        ));
        cloud = Some(id);
    }
    log::debug!(
        "topology: {} devices, {} links, hub {hub}",
        devices.len(),
        links.len()
    );
    Ok(GeneratedTopology {
        devices,
        links,
        gateways,
        cloud,
        centrality,
    })
}

/// Growing-network DAG on `n` nodes: node `i >= 1` picks one earlier node
/// with probability proportional to its degree. Returned as parent -> child
/// pairs, so node 0 is the single root.
pub fn growing_network_dag<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let mut degree = vec![1u64, 1];
    let mut edges = vec![(0, 1)];
    for source in 2..n {
        let total: u64 = degree.iter().sum();
        let mut pick = rng.random_range(0..total);
        let mut target = 0;
        for (i, &d) in degree.iter().enumerate() {
            if pick < d {
                target = i;
                break;
            }
            pick -= d;
        }
        edges.push((target, source));
        degree[target] += 1;
        degree.push(1);
    }
    edges
}

pub fn generate_applications(cfg: &ScenarioConfig, count: usize) -> Result<Vec<Application>> {
    cfg.validate()?;
    if count == 0 {
        return Err(Error::InvalidConfig(
            "application count must be positive".into(),
        ));
    }
    let mut rng = stream_rng(cfg.seed, Stream::Applications);
    let a = &cfg.apps;
    let mut apps = Vec::with_capacity(count);
    for id in 0..count {
        let n = a.services.sample(&mut rng) as usize;
        let services: Vec<Service> = (0..n)
            .map(|i| {
                let workload = a.workload_mi.sample(&mut rng) as f64;
                let mem = a.mem_gb.sample(&mut rng) as f64;
                let storage = a.storage_tb.sample(&mut rng) as f64;
                Service::new(i as u32, workload, mem, storage)
            })
            .collect();
        let size = |rng: &mut ChaCha8Rng| a.message_size_kb.sample(rng) as f64 * 1000.0;
        let mut messages = vec![Message {
            source: Endpoint::User,
            destination: ServiceId(0),
            size: size(&mut rng),
        }];
        for (p, c) in growing_network_dag(n, &mut rng) {
            messages.push(Message {
                source: Endpoint::Service(ServiceId(p as u32)),
                destination: ServiceId(c as u32),
                size: size(&mut rng),
            });
        }
        let deadline = a.deadline_ms.sample(&mut rng) as f64;
        let app = Application {
            id: AppId(id as u32),
            services,
            messages,
            deadline,
        };
        app.validate()?;
        apps.push(app);
    }
    Ok(apps)
}

/// Users pinned to uniformly chosen gateways, each requesting one uniformly
/// chosen application.
pub fn generate_users(
    cfg: &ScenarioConfig,
    gateways: &[DeviceId],
    app_count: usize,
) -> Result<(Vec<User>, Vec<PlacementRequest>)> {
    if gateways.is_empty() {
        return Err(Error::InvalidConfig(
            "no gateways to attach users to".into(),
        ));
    }
    if app_count == 0 {
        return Err(Error::InvalidConfig("no applications to request".into()));
    }
    let mut user_rng = stream_rng(cfg.seed, Stream::Users);
    let users: Vec<User> = (0..cfg.user_count)
        .map(|i| User {
            id: UserId(i as u32),
            gateway: gateways[user_rng.random_range(0..gateways.len())],
        })
        .collect();
    let mut req_rng = stream_rng(cfg.seed, Stream::Requests);
    let requests = users
        .iter()
        .map(|u| PlacementRequest {
            id: RequestId(u.id.0),
            user: u.id,
            app: AppId(req_rng.random_range(0..app_count) as u32),
        })
        .collect();
    Ok((users, requests))
}

/// A complete, replayable scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub config: ScenarioConfig,
    pub devices: Vec<Device>,
    pub links: Vec<NetworkLink>,
    pub gateways: Vec<DeviceId>,
    pub cloud: Option<DeviceId>,
    pub apps: Vec<Application>,
    pub users: Vec<User>,
    /// One placement request per user.
    pub requests: Vec<PlacementRequest>,
    pub schedule: Option<ScheduleConfig>,
}

impl Scenario {
    pub fn generate(cfg: &ScenarioConfig) -> Result<Self> {
        let topo = generate_topology(cfg)?;
        let apps = generate_applications(cfg, cfg.app_count)?;
        let (users, requests) = generate_users(cfg, &topo.gateways, apps.len())?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            config: cfg.clone(),
            devices: topo.devices,
            links: topo.links,
            gateways: topo.gateways,
            cloud: topo.cloud,
            apps,
            users,
            requests,
            schedule: cfg.schedule,
        })
    }

    pub fn topology(&self) -> Result<Topology> {
        Topology::new(&self.devices, &self.links)
    }

    pub fn service_request_count(&self) -> usize {
        self.requests
            .iter()
            .map(|r| self.apps[r.app.index()].services.len())
            .sum()
    }

    /// Structural consistency of a loaded bundle.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidScenario(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.devices.is_empty() {
            return Err(Error::InvalidScenario("scenario has no devices".into()));
        }
        self.topology()?;
        for (i, a) in self.apps.iter().enumerate() {
            if a.id.index() != i {
                return Err(Error::InvalidScenario(format!(
                    "application at position {i} has id {}",
                    a.id
                )));
            }
            a.validate()?;
        }
        for (i, u) in self.users.iter().enumerate() {
            if u.id.index() != i || u.gateway.index() >= self.devices.len() {
                return Err(Error::InvalidScenario(format!(
                    "user at position {i} is malformed"
                )));
            }
        }
        for r in &self.requests {
            if r.user.index() >= self.users.len() || r.app.index() >= self.apps.len() {
                return Err(Error::InvalidScenario(format!(
                    "request {} references an unknown user or application",
                    r.id
                )));
            }
        }
        Ok(())
    }
}
