//! Discrete-event replay of placed applications with optional device
//! failures.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{response_times, Device, DeviceId, DeviceRole, PlacementPlan};
use crate::scenario::{stream_rng, Scenario, ScheduleConfig, Stream};
use crate::topology::{RouteTable, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Reliable,
    Faulty,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Reliable => "reliable",
            Mode::Faulty => "faulty",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reliable" => Ok(Mode::Reliable),
            "faulty" => Ok(Mode::Faulty),
            _ => Err(Error::InvalidConfig(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub mode: Mode,
    pub horizon_s: f64,
    pub failure_period_s: f64,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Reliable,
            horizon_s: 2000.0,
            failure_period_s: 20.0,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon_s >= 0.0) || !self.horizon_s.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "bad horizon {}",
                self.horizon_s
            )));
        }
        if self.mode == Mode::Faulty && !(self.failure_period_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "failure period must be positive, got {}",
                self.failure_period_s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Satisfied,
    DeadlineMissed,
    /// A service is unplaced, sits on a dead device, or cannot be reached.
    FailedDependency,
}

/// Fog devices fail one at a time, every `period_s`, in `victims` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureSchedule {
    pub period_s: f64,
    pub victims: Vec<DeviceId>,
}

impl FailureSchedule {
    /// Seeded permutation of every non-cloud device.
    pub fn seeded(devices: &[Device], period_s: f64, seed: u64) -> Self {
        let mut victims: Vec<DeviceId> = devices
            .iter()
            .filter(|d| d.role != DeviceRole::Cloud)
            .map(|d| d.id)
            .collect();
        victims.shuffle(&mut stream_rng(seed, Stream::Failures));
        Self { period_s, victims }
    }

    /// `(time_s, device)` of every failure within `horizon_s`.
    pub fn events(&self, horizon_s: f64) -> Vec<(f64, DeviceId)> {
        self.victims
            .iter()
            .enumerate()
            .map(|(k, &d)| ((k + 1) as f64 * self.period_s, d))
            .take_while(|&(t, _)| t <= horizon_s)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub time_s: f64,
    pub device: DeviceId,
}

/// Cumulative counts after all requests issued at `time_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub time_s: f64,
    pub requests: u64,
    pub satisfied: u64,
    pub cumulative_ratio: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub satisfied: u64,
    pub deadline_missed: u64,
    pub failed_dependency: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.satisfied + self.deadline_missed + self.failed_dependency
    }

    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Satisfied => self.satisfied += 1,
            Outcome::DeadlineMissed => self.deadline_missed += 1,
            Outcome::FailedDependency => self.failed_dependency += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub config: SimulationConfig,
    pub counts: OutcomeCounts,
    pub failures: Vec<FailureRecord>,
    pub series: Vec<SeriesPoint>,
    /// Liveness of every device when the horizon is reached.
    pub alive_at_end: Vec<bool>,
}

impl SimulationResult {
    pub fn satisfaction(&self) -> Option<f64> {
        self.series.last().map(|p| p.cumulative_ratio)
    }

    pub const CSV_HEADER: &'static str = "time_s,requests,satisfied,cumulative_ratio";

    pub fn series_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.series {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.time_s, p.requests, p.satisfied, p.cumulative_ratio
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Failure(DeviceId),
    Request(usize),
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time_s: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time_s
            .total_cmp(&other.time_s)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Mutable state of one run.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub clock_s: f64,
    pub devices: Vec<Device>,
    topology: Topology,
    routes: RouteTable,
    queue: BinaryHeap<Reverse<Event>>,
    next_seq: u64,
    /// Per plan, the outcome valid until the next failure.
    cache: Vec<Option<Outcome>>,
}

impl SimulationState {
    pub fn new(devices: &[Device], topology: Topology, plan_count: usize) -> Self {
        let alive: Vec<bool> = devices.iter().map(|d| d.alive).collect();
        let routes = topology.routes(&alive);
        Self {
            clock_s: 0.0,
            devices: devices.to_vec(),
            topology,
            routes,
            queue: BinaryHeap::new(),
            next_seq: 0,
            cache: vec![None; plan_count],
        }
    }

    fn push(&mut self, time_s: f64, kind: EventKind) {
        self.queue.push(Reverse(Event {
            time_s,
            seq: self.next_seq,
            kind,
        }));
        self.next_seq += 1;
    }

    pub fn alive(&self) -> Vec<bool> {
        self.devices.iter().map(|d| d.alive).collect()
    }

    pub fn dead_count(&self) -> usize {
        self.devices.iter().filter(|d| !d.alive).count()
    }

    pub fn routes(&self) -> &RouteTable {
        &self.routes
    }
}

/// Marks `device` dead at time `t_s` and recomputes routes over the
/// remaining devices. Residuals of the dead device are left untouched.
pub fn inject_failure(state: &mut SimulationState, device: DeviceId, t_s: f64) {
    state.clock_s = t_s;
    let d = &mut state.devices[device.index()];
    if !d.alive {
        return;
    }
    d.alive = false;
    state.routes = state.topology.routes(&state.alive());
    state.cache.iter_mut().for_each(|c| *c = None);
    log::debug!("t = {t_s} s: device {device} failed");
}

fn classify(scenario: &Scenario, plan: &PlacementPlan, state: &SimulationState) -> Outcome {
    let app = &scenario.apps[plan.app.index()];
    let gateway = scenario.users[plan.user.index()].gateway;
    let hosts_alive = plan
        .assignment
        .iter()
        .all(|d| d.is_some_and(|d| state.devices[d.index()].alive));
    if !hosts_alive || !state.devices[gateway.index()].alive {
        return Outcome::FailedDependency;
    }
    match response_times(
        app,
        &plan.assignment,
        &state.devices,
        gateway,
        &state.routes,
    ) {
        Ok(rt) if rt.app_rt < app.deadline => Outcome::Satisfied,
        Ok(_) => Outcome::DeadlineMissed,
        Err(_) => Outcome::FailedDependency,
    }
}

/// Replays every plan at its scheduled request times. Without a schedule
/// each plan is requested once at t = 0.
pub fn run(
    scenario: &Scenario,
    plans: &[PlacementPlan],
    config: &SimulationConfig,
) -> Result<SimulationResult> {
    config.validate()?;
    for p in plans {
        if p.app.index() >= scenario.apps.len() || p.user.index() >= scenario.users.len() {
            return Err(Error::InvalidScenario(format!(
                "plan for request {} references an unknown app or user",
                p.request
            )));
        }
        if p.assignment.len() != scenario.apps[p.app.index()].services.len() {
            return Err(Error::AssignmentMismatch {
                expected: scenario.apps[p.app.index()].services.len(),
                got: p.assignment.len(),
            });
        }
    }
    let mut state = SimulationState::new(&scenario.devices, scenario.topology()?, plans.len());

    if config.mode == Mode::Faulty {
        let schedule =
            FailureSchedule::seeded(&scenario.devices, config.failure_period_s, config.seed);
        for (t, d) in schedule.events(config.horizon_s) {
            state.push(t, EventKind::Failure(d));
        }
    }
    match scenario.schedule {
        Some(ScheduleConfig { period_s, .. }) => {
            let sched = ScheduleConfig {
                period_s,
                horizon_s: config.horizon_s,
            };
            for t in sched.times_s(config.horizon_s) {
                for i in 0..plans.len() {
                    state.push(t, EventKind::Request(i));
                }
            }
        }
        None => {
            for i in 0..plans.len() {
                state.push(0.0, EventKind::Request(i));
            }
        }
    }

    let mut counts = OutcomeCounts::default();
    let mut failures = Vec::new();
    let mut series: Vec<SeriesPoint> = Vec::new();
    while let Some(Reverse(ev)) = state.queue.pop() {
        debug_assert!(ev.time_s >= state.clock_s);
        state.clock_s = ev.time_s;
        match ev.kind {
            EventKind::Failure(d) => {
                inject_failure(&mut state, d, ev.time_s);
                failures.push(FailureRecord {
                    time_s: ev.time_s,
                    device: d,
                });
            }
            EventKind::Request(i) => {
                let outcome = match state.cache[i] {
                    Some(o) => o,
                    None => {
                        let o = classify(scenario, &plans[i], &state);
                        state.cache[i] = Some(o);
                        o
                    }
                };
                counts.add(outcome);
                let point = SeriesPoint {
                    time_s: ev.time_s,
                    requests: counts.total(),
                    satisfied: counts.satisfied,
                    cumulative_ratio: counts.satisfied as f64 / counts.total() as f64,
                };
                match series.last_mut() {
                    Some(last) if last.time_s == ev.time_s => *last = point,
                    _ => series.push(point),
                }
            }
        }
    }
    Ok(SimulationResult {
        config: *config,
        counts,
        failures,
        series,
        alive_at_end: state.alive(),
    })
}
