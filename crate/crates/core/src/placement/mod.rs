//! Deadline-ordered placement of application services onto feature
//! partitions, residual accounting, and two baseline strategies.

pub mod fitness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    placement_valid, response_times, AppId, Application, Assignment, Device, DeviceId,
    PlacementPlan, PlacementRequest, RequestId, Service, ServiceId, Transmission, User,
};
use crate::partition::PartitionOutput;
use crate::topology::RouteTable;

pub use fitness::{demand_similarity, fitness, Fitness, FitnessConfig, NormalizationRanges};

/// Reserves one core plus the memory and storage demand of `s` on `d`.
pub fn commit_placement(d: &mut Device, s: &Service, deadline: f64) -> Result<()> {
    let reason = if !d.alive {
        Some("device is down")
    } else if d.residual_cores < 1 {
        Some("no free core")
    } else if s.mem_demand > d.residual_mem {
        Some("not enough memory")
    } else if s.storage_demand > d.residual_storage {
        Some("not enough storage")
    } else if !placement_valid(s, d, deadline) {
        Some("execution time exceeds the deadline")
    } else {
        None
    };
    if let Some(reason) = reason {
        return Err(Error::OverCommit {
            device: d.id,
            service: s.id,
            reason,
        });
    }
    d.residual_cores -= 1;
    d.residual_mem -= s.mem_demand;
    d.residual_storage -= s.storage_demand;
    Ok(())
}

/// Releases what [`commit_placement`] reserved.
pub fn rollback_placement(d: &mut Device, s: &Service) -> Result<()> {
    let over = d.residual_cores >= d.cores
        || d.residual_mem + s.mem_demand > d.mem
        || d.residual_storage + s.storage_demand > d.storage;
    if over {
        return Err(Error::OverCommit {
            device: d.id,
            service: s.id,
            reason: "rollback would exceed the device capacity",
        });
    }
    d.residual_cores += 1;
    d.residual_mem += s.mem_demand;
    d.residual_storage += s.storage_demand;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Multilayer,
    FirstFit,
    ConnectivityGreedy,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::Multilayer,
        Strategy::FirstFit,
        Strategy::ConnectivityGreedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Multilayer => "multilayer",
            Strategy::FirstFit => "first_fit",
            Strategy::ConnectivityGreedy => "connectivity_greedy",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown strategy {s:?}")))
    }
}

/// Application ids by ascending deadline, ties by id.
pub fn sort_applications(apps: &[Application]) -> Vec<AppId> {
    let mut ids: Vec<&Application> = apps.iter().collect();
    ids.sort_by(|a, b| a.deadline.total_cmp(&b.deadline).then(a.id.cmp(&b.id)));
    ids.into_iter().map(|a| a.id).collect()
}

/// Requests in placement order: deadline of the requested application, then
/// application id, then request id.
pub fn order_requests(
    requests: &[PlacementRequest],
    apps: &[Application],
) -> Vec<PlacementRequest> {
    let mut out = requests.to_vec();
    out.sort_by(|a, b| {
        let (da, db) = (apps[a.app.index()].deadline, apps[b.app.index()].deadline);
        da.total_cmp(&db)
            .then(a.app.cmp(&b.app))
            .then(a.id.cmp(&b.id))
    });
    out
}

/// One accepted placement, in commit order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub request: RequestId,
    pub app: AppId,
    pub service: ServiceId,
    pub device: DeviceId,
    pub deadline: f64,
}

/// Devices ranked inside every feature partition by transmission time from
/// one gateway (ties by device id). Unreachable devices are left out.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceMatrix {
    pub rows: Vec<Vec<(DeviceId, f64)>>,
}

impl DeviceMatrix {
    pub fn min_time(&self, fp: usize) -> Option<f64> {
        self.rows[fp].first().map(|&(_, t)| t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedPartition {
    pub fp: usize,
    pub fitness: Fitness,
}

/// Everything a placement run reads.
#[derive(Debug, Clone, Copy)]
pub struct PlacementInput<'a> {
    pub devices: &'a [Device],
    pub apps: &'a [Application],
    pub users: &'a [User],
    pub requests: &'a [PlacementRequest],
    pub routes: &'a RouteTable,
    pub partitions: &'a PartitionOutput,
}

/// Mutable residual state plus the read-only inputs of the placement
/// algorithms.
#[derive(Debug)]
pub struct PlacementContext<'a> {
    devices: Vec<Device>,
    audit: Vec<CommitRecord>,
    routes: &'a RouteTable,
    partitions: &'a PartitionOutput,
    fitness: FitnessConfig,
    ranges: NormalizationRanges,
}

impl<'a> PlacementContext<'a> {
    pub fn new(
        devices: &[Device],
        routes: &'a RouteTable,
        partitions: &'a PartitionOutput,
        fitness: FitnessConfig,
        ranges: NormalizationRanges,
    ) -> Result<Self> {
        fitness.validate()?;
        if partitions.network.assignment.len() != devices.len() {
            return Err(Error::AssignmentMismatch {
                expected: devices.len(),
                got: partitions.network.assignment.len(),
            });
        }
        Ok(Self {
            devices: devices.to_vec(),
            audit: Vec::new(),
            routes,
            partitions,
            fitness,
            ranges,
        })
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn audit(&self) -> &[CommitRecord] {
        &self.audit
    }

    pub fn into_parts(self) -> (Vec<Device>, Vec<CommitRecord>) {
        (self.devices, self.audit)
    }

    fn network_partition(&self, d: DeviceId) -> usize {
        self.partitions.network.assignment[d.index()]
    }

    fn commit(
        &mut self,
        req: &PlacementRequest,
        app: &Application,
        s: &Service,
        d: DeviceId,
    ) -> Result<()> {
        commit_placement(&mut self.devices[d.index()], s, app.deadline)?;
        self.audit.push(CommitRecord {
            request: req.id,
            app: app.id,
            service: s.id,
            device: d,
            deadline: app.deadline,
        });
        Ok(())
    }

    pub fn d_matrix(&self, gateway: DeviceId, size: f64) -> DeviceMatrix {
        let rows = self
            .partitions
            .features
            .partitions
            .iter()
            .map(|fp| {
                let mut row: Vec<(DeviceId, f64)> = fp
                    .devices
                    .iter()
                    .filter(|d| self.devices[d.index()].alive)
                    .filter_map(|&d| {
                        self.routes
                            .transmission_ms(gateway, d, size)
                            .map(|t| (d, t))
                    })
                    .collect();
                row.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                row
            })
            .collect();
        DeviceMatrix { rows }
    }

    /// All feature partitions by fitness for `s`, best first, ties by id.
    pub fn rank_feature_partitions(&self, s: &Service, dm: &DeviceMatrix) -> Vec<RankedPartition> {
        let nodes = &self.partitions.compressed.nodes;
        let mut rank: Vec<RankedPartition> = self
            .partitions
            .features
            .partitions
            .iter()
            .enumerate()
            .map(|(i, fp)| {
                let max_sim = fp
                    .members
                    .iter()
                    .map(|&n| demand_similarity(&nodes[n].feature, s, &self.ranges))
                    .fold(0.0, f64::max);
                RankedPartition {
                    fp: i,
                    fitness: fitness(max_sim, dm.min_time(i), &self.fitness),
                }
            })
            .collect();
        rank.sort_by(|a, b| {
            b.fitness
                .value
                .total_cmp(&a.fitness.value)
                .then(a.fp.cmp(&b.fp))
        });
        rank
    }

    /// First device, in fitness then transmission order, that lies in the
    /// anchor network partition (when given) and can host `s`. The placement
    /// is committed before returning.
    pub fn place_service(
        &mut self,
        req: &PlacementRequest,
        app: &Application,
        s: &Service,
        rank: &[RankedPartition],
        dm: &DeviceMatrix,
        anchor: Option<usize>,
    ) -> Result<Option<DeviceId>> {
        for r in rank {
            for &(d, _) in &dm.rows[r.fp] {
                if anchor.is_some_and(|p| self.network_partition(d) != p) {
                    continue;
                }
                if placement_valid(s, &self.devices[d.index()], app.deadline) {
                    self.commit(req, app, s, d)?;
                    return Ok(Some(d));
                }
            }
        }
        Ok(None)
    }

    /// Places every service of `app` in topological order. The network
    /// partition of the first placed service constrains the rest.
    pub fn select_feature_partitions(
        &mut self,
        req: &PlacementRequest,
        app: &Application,
        gateway: DeviceId,
    ) -> Result<Assignment> {
        let size = app
            .entry_message()
            .ok_or_else(|| Error::InvalidApplication(app.id.0, "no entry message".into()))?
            .size;
        let dm = self.d_matrix(gateway, size);
        let mut assignment = vec![None; app.services.len()];
        let mut anchor = None;
        for sid in app.topological_order()? {
            let s = &app.services[sid.index()];
            let rank = self.rank_feature_partitions(s, &dm);
            let placed = self.place_service(req, app, s, &rank, &dm, anchor)?;
            if let Some(d) = placed {
                anchor.get_or_insert(self.network_partition(d));
            }
            assignment[sid.index()] = placed;
        }
        Ok(assignment)
    }

    /// Each service on the lowest-id device that can host it.
    pub fn baseline_first_fit(
        &mut self,
        req: &PlacementRequest,
        app: &Application,
    ) -> Result<Assignment> {
        let all: Vec<DeviceId> = self.devices.iter().map(|d| d.id).collect();
        self.first_fit_within(req, app, &all)
    }

    /// The whole application inside the network partition holding the most
    /// residual resource units, first fit by id within it.
    pub fn baseline_connectivity_greedy(
        &mut self,
        req: &PlacementRequest,
        app: &Application,
    ) -> Result<Assignment> {
        let net = &self.partitions.network;
        let mut best: Option<(usize, f64)> = None;
        for (p, members) in net.partitions.iter().enumerate() {
            let units: f64 = members
                .iter()
                .map(|d| &self.devices[d.index()])
                .filter(|d| d.alive)
                .map(residual_units)
                .sum();
            if best.is_none_or(|(_, u)| units > u) {
                best = Some((p, units));
            }
        }
        let members = best
            .map(|(p, _)| net.partitions[p].clone())
            .unwrap_or_default();
        self.first_fit_within(req, app, &members)
    }

    fn first_fit_within(
        &mut self,
        req: &PlacementRequest,
        app: &Application,
        candidates: &[DeviceId],
    ) -> Result<Assignment> {
        let mut assignment = vec![None; app.services.len()];
        for sid in app.topological_order()? {
            let s = &app.services[sid.index()];
            let found = candidates
                .iter()
                .copied()
                .find(|d| placement_valid(s, &self.devices[d.index()], app.deadline));
            if let Some(d) = found {
                self.commit(req, app, s, d)?;
            }
            assignment[sid.index()] = found;
        }
        Ok(assignment)
    }
}

/// `max(cores, GB, TB)` of what is still free on a device.
pub fn residual_units(d: &Device) -> f64 {
    f64::from(d.residual_cores)
        .max(d.residual_mem)
        .max(d.residual_storage)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementOutcome {
    pub strategy: Strategy,
    /// One plan per request, ordered by request id.
    pub plans: Vec<PlacementPlan>,
    /// Accepted placements in commit order.
    pub audit: Vec<CommitRecord>,
    /// Residual state after the last commit.
    pub devices: Vec<Device>,
}

/// Places every request with `strategy`, in deadline order.
pub fn place_all(
    input: &PlacementInput<'_>,
    strategy: Strategy,
    fitness: FitnessConfig,
) -> Result<PlacementOutcome> {
    for (i, a) in input.apps.iter().enumerate() {
        if a.id.index() != i {
            return Err(Error::InvalidApplication(
                a.id.0,
                format!("listed at position {i}"),
            ));
        }
        a.validate()?;
    }
    let ranges = NormalizationRanges::from_scenario(input.devices, input.apps);
    let mut ctx = PlacementContext::new(
        input.devices,
        input.routes,
        input.partitions,
        fitness,
        ranges,
    )?;
    let mut plans = Vec::with_capacity(input.requests.len());
    for req in order_requests(input.requests, input.apps) {
        let app = &input.apps[req.app.index()];
        let user = input
            .users
            .get(req.user.index())
            .filter(|u| u.id == req.user)
            .ok_or_else(|| {
                Error::InvalidScenario(format!(
                    "request {} names unknown user {}",
                    req.id, req.user
                ))
            })?;
        let assignment = match strategy {
            Strategy::Multilayer => ctx.select_feature_partitions(&req, app, user.gateway)?,
            Strategy::FirstFit => ctx.baseline_first_fit(&req, app)?,
            Strategy::ConnectivityGreedy => ctx.baseline_connectivity_greedy(&req, app)?,
        };
        let mut plan = PlacementPlan {
            request: req.id,
            app: app.id,
            user: user.id,
            assignment,
            per_service_rt: Vec::new(),
            app_rt: None,
        };
        if plan.fully_placed() {
            if let Ok(rt) = response_times(
                app,
                &plan.assignment,
                input.devices,
                user.gateway,
                input.routes,
            ) {
                plan.per_service_rt = rt.per_service;
                plan.app_rt = Some(rt.app_rt);
            }
        }
        log::trace!(
            "{strategy}: request {} placed {}/{} services",
            req.id,
            plan.placed_count(),
            app.services.len()
        );
        plans.push(plan);
    }
    plans.sort_by_key(|p| p.request);
    let (devices, audit) = ctx.into_parts();
    Ok(PlacementOutcome {
        strategy,
        plans,
        audit,
        devices,
    })
}
