//! Evaluation metrics and machine-readable reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Application, Device, PlacementPlan, Service, User};
use crate::placement::Strategy;
use crate::scenario::SCHEMA_VERSION;
use crate::simulator::SimulationResult;
use crate::topology::{hop_distance, HopDistance, RouteTable};

/// Resource units of a service: it takes one core, so
/// `max(1, GB, TB)`.
pub fn service_units(s: &Service) -> f64 {
    1f64.max(s.mem_demand).max(s.storage_demand)
}

/// Resource units of a device: `max(cores, GB, TB)` of its full capacity.
pub fn device_units(d: &Device) -> f64 {
    f64::from(d.cores).max(d.mem).max(d.storage)
}

/// Placed services over requested services.
pub fn placement_success_rate(plans: &[PlacementPlan]) -> Result<f64> {
    let requested: usize = plans.iter().map(|p| p.assignment.len()).sum();
    if requested == 0 {
        return Err(Error::ZeroServices);
    }
    let placed: usize = plans.iter().map(PlacementPlan::placed_count).sum();
    Ok(placed as f64 / requested as f64)
}

/// Share of the infrastructure's resource units left unused by the placed
/// services. Every device counts, failed or not.
pub fn resource_wastage(plans: &[PlacementPlan], apps: &[Application], devices: &[Device]) -> f64 {
    1.0 - consumed_fraction(plans, apps, devices)
}

/// Consumed resource units over total device units.
pub fn consumed_fraction(plans: &[PlacementPlan], apps: &[Application], devices: &[Device]) -> f64 {
    let total: f64 = devices.iter().map(device_units).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let used: f64 = plans
        .iter()
        .flat_map(|p| {
            let app = &apps[p.app.index()];
            p.assignment
                .iter()
                .enumerate()
                .filter(|(_, d)| d.is_some())
                .map(move |(i, _)| service_units(&app.services[i]))
        })
        .sum();
    used / total
}

/// Fraction of requests whose placement-time response time beats the
/// deadline. Partially placed requests count as misses.
pub fn deadline_satisfaction(plans: &[PlacementPlan], apps: &[Application]) -> f64 {
    if plans.is_empty() {
        return 0.0;
    }
    let met = plans
        .iter()
        .filter(|p| p.app_rt.is_some_and(|rt| rt < apps[p.app.index()].deadline))
        .count();
    met as f64 / plans.len() as f64
}

/// Hop distance from the requesting user's gateway to every placed service.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopHistogram {
    pub buckets: BTreeMap<u32, u64>,
    pub unreachable: u64,
}

impl HopHistogram {
    pub fn total(&self) -> u64 {
        self.buckets.values().sum::<u64>() + self.unreachable
    }

    pub fn mean(&self) -> Option<f64> {
        let n: u64 = self.buckets.values().sum();
        (n > 0).then(|| {
            self.buckets
                .iter()
                .map(|(&h, &c)| f64::from(h) * c as f64)
                .sum::<f64>()
                / n as f64
        })
    }
}

pub fn hop_histogram(plans: &[PlacementPlan], routes: &RouteTable, users: &[User]) -> HopHistogram {
    let mut h = HopHistogram::default();
    for p in plans {
        let gateway = users[p.user.index()].gateway;
        for d in p.assignment.iter().flatten() {
            match hop_distance(routes, gateway, *d) {
                HopDistance::Hops(n) => *h.buckets.entry(n).or_default() += 1,
                HopDistance::Unreachable => h.unreachable += 1,
            }
        }
    }
    h
}

/// Metrics of one (scenario, strategy) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub scenario: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub requested_services: u64,
    pub placed_services: u64,
    pub success_rate: f64,
    pub resource_wastage: f64,
    /// Placement-time deadline satisfaction.
    pub deadline_satisfaction: f64,
    /// Final cumulative ratio of a simulation run, when one was made.
    pub simulated_satisfaction: Option<f64>,
    pub hop_histogram: HopHistogram,
}

impl RunMetrics {
    #[allow(clippy::too_many_arguments)]
    pub fn compute(
        scenario: &str,
        strategy: Strategy,
        seed: u64,
        plans: &[PlacementPlan],
        apps: &[Application],
        devices: &[Device],
        users: &[User],
        routes: &RouteTable,
        simulation: Option<&SimulationResult>,
    ) -> Result<Self> {
        Ok(Self {
            scenario: scenario.to_string(),
            strategy,
            seed,
            requested_services: plans.iter().map(|p| p.assignment.len() as u64).sum(),
            placed_services: plans.iter().map(|p| p.placed_count() as u64).sum(),
            success_rate: placement_success_rate(plans)?,
            resource_wastage: resource_wastage(plans, apps, devices),
            deadline_satisfaction: deadline_satisfaction(plans, apps),
            simulated_satisfaction: simulation.and_then(SimulationResult::satisfaction),
            hop_histogram: hop_histogram(plans, routes, users),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub runs: Vec<RunMetrics>,
}

impl Report {
    pub fn new(runs: Vec<RunMetrics>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            runs,
        }
    }
}

pub const COMPARISON_COLUMNS: [&str; 10] = [
    "scenario",
    "strategy",
    "seed",
    "requested_services",
    "placed_services",
    "success_rate",
    "resource_wastage",
    "deadline_satisfaction",
    "simulated_satisfaction",
    "mean_hop_distance",
];

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub scenario: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub requested_services: u64,
    pub placed_services: u64,
    pub success_rate: f64,
    pub resource_wastage: f64,
    pub deadline_satisfaction: f64,
    pub simulated_satisfaction: Option<f64>,
    pub mean_hop_distance: Option<f64>,
}

impl From<&RunMetrics> for ComparisonRow {
    fn from(m: &RunMetrics) -> Self {
        Self {
            scenario: m.scenario.clone(),
            strategy: m.strategy,
            seed: m.seed,
            requested_services: m.requested_services,
            placed_services: m.placed_services,
            success_rate: m.success_rate,
            resource_wastage: m.resource_wastage,
            deadline_satisfaction: m.deadline_satisfaction,
            simulated_satisfaction: m.simulated_satisfaction,
            mean_hop_distance: m.hop_histogram.mean(),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Comparison table with the fixed [`COMPARISON_COLUMNS`] order. Floats use
/// the shortest representation that parses back to the same value.
pub fn comparison_csv(runs: &[RunMetrics]) -> String {
    let mut out = COMPARISON_COLUMNS.join(",");
    out.push('\n');
    for r in runs.iter().map(ComparisonRow::from) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.scenario,
            r.strategy,
            r.seed,
            r.requested_services,
            r.placed_services,
            r.success_rate,
            r.resource_wastage,
            r.deadline_satisfaction,
            opt(r.simulated_satisfaction),
            opt(r.mean_hop_distance),
        ));
    }
    out
}

pub fn parse_comparison_csv(text: &str) -> Result<Vec<ComparisonRow>> {
    let bad =
        |line: usize, m: String| Error::InvalidConfig(format!("comparison csv line {line}: {m}"));
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad(1, "missing header".into()))?;
    if header != COMPARISON_COLUMNS.join(",") {
        return Err(bad(1, format!("unexpected header {header:?}")));
    }
    let num = |line: usize, s: &str| {
        s.parse::<f64>()
            .map_err(|e| bad(line, format!("{s:?}: {e}")))
    };
    let int = |line: usize, s: &str| {
        s.parse::<u64>()
            .map_err(|e| bad(line, format!("{s:?}: {e}")))
    };
    let optnum = |line: usize, s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            num(line, s).map(Some)
        }
    };
    let mut rows = Vec::new();
    for (i, l) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != COMPARISON_COLUMNS.len() {
            return Err(bad(
                n,
                format!(
                    "expected {} fields, got {}",
                    COMPARISON_COLUMNS.len(),
                    f.len()
                ),
            ));
        }
        rows.push(ComparisonRow {
            scenario: f[0].to_string(),
            strategy: f[1].parse()?,
            seed: int(n, f[2])?,
            requested_services: int(n, f[3])?,
            placed_services: int(n, f[4])?,
            success_rate: num(n, f[5])?,
            resource_wastage: num(n, f[6])?,
            deadline_satisfaction: num(n, f[7])?,
            simulated_satisfaction: optnum(n, f[8])?,
            mean_hop_distance: optnum(n, f[9])?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Writes `report.json` and/or `comparison.csv` into `dir` and returns the
/// written paths.
pub fn emit_report(report: &Report, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut written = Vec::new();
    for f in formats {
        let (name, body) = match f {
            ReportFormat::Json => (
                "report.json",
                serde_json::to_string_pretty(report).expect("report serializes") + "\n",
            ),
            ReportFormat::Csv => ("comparison.csv", comparison_csv(&report.runs)),
        };
        let path = dir.join(name);
        write_file(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}
