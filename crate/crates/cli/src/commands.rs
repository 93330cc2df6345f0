use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use fogpart_core::metrics::{comparison_csv, Report, RunMetrics};
use fogpart_core::model::PlacementPlan;
use fogpart_core::multilayer::{build_multilayer, Layer, MultilayerConfig};
use fogpart_core::partition::{
    multilayer_resource_partition, CompressedWeights, LouvainConfig, PartitionConfig,
    PartitionOutput,
};
use fogpart_core::placement::{place_all, CommitRecord, FitnessConfig, PlacementInput, Strategy};
use fogpart_core::scenario::{Scenario, SCHEMA_VERSION};
use fogpart_core::simulator::{run, Mode, SimulationConfig, SimulationResult};

use crate::config::ConfigFile;
use crate::fixture::{FixtureKind, LayeredGraphFixture};
use crate::manifest::{sha256_hex, ManifestBuilder};

const LAMBDA_COUPLING: &str = "resource-layer replicas of a device count as one community when \
their layer partitions share a feature partition; network-layer replicas are never coupled";

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse<T: for<'de> Deserialize<'de>>(bytes: &[u8], path: &Path) -> Result<T> {
    serde_json::from_slice(bytes).with_context(|| format!("cannot parse {}", path.display()))
}

fn load_scenario(path: &Path) -> Result<(Scenario, Vec<u8>)> {
    let bytes = read(path)?;
    let sc: Scenario = parse(&bytes, path)?;
    sc.validate()
        .with_context(|| format!("invalid scenario {}", path.display()))?;
    Ok((sc, bytes))
}

pub fn generate(config: &Path, seed: Option<u64>, out: &Path) -> Result<()> {
    let text = fs::read_to_string(config)
        .with_context(|| format!("cannot read config {}", config.display()))?;
    let cfg = ConfigFile::parse(&text, config)?.resolve(seed)?;
    let scenario = Scenario::generate(&cfg)?;
    let mut m = ManifestBuilder::new("generate", Some(cfg.seed), serde_json::to_value(&cfg)?, out)?;
    m.input(config, text.as_bytes());
    m.write_json("scenario.json", &scenario)?;
    let summary = json!({
        "scenario": cfg.name,
        "devices": scenario.devices.len(),
        "gateways": scenario.gateways.len(),
        "applications": scenario.apps.len(),
        "services": scenario.apps.iter().map(|a| a.services.len()).sum::<usize>(),
        "users": scenario.users.len(),
        "app_requests": scenario.requests.len(),
        "service_requests": scenario.service_request_count(),
    });
    m.finish(summary)?;
    log::info!("wrote scenario {} to {}", cfg.name, out.display());
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerSummary {
    pub layer: Layer,
    pub partitions: usize,
    pub modularity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionDocument {
    pub schema_version: u32,
    pub source: String,
    pub config: PartitionConfig,
    pub min_weight: f64,
    pub lambda_coupling: String,
    pub layers: Vec<LayerSummary>,
    pub feature_partitions: usize,
    pub feature_modularity: f64,
    pub multilayer_modularity: f64,
    pub output: PartitionOutput,
}

pub fn partition(
    input: &Path,
    out: &Path,
    unit_weights: bool,
    min_weight: f64,
    louvain_seed: Option<u64>,
) -> Result<()> {
    let bytes = read(input)?;
    let value: Value = parse(&bytes, input)?;
    let is_fixture = value.get("kind").and_then(Value::as_str) == Some("layered_graph");
    let mut config = PartitionConfig {
        compressed_weights: if unit_weights {
            CompressedWeights::Unit
        } else {
            CompressedWeights::FeatureSimilarity
        },
        louvain: LouvainConfig {
            shuffle_seed: louvain_seed,
            ..LouvainConfig::default()
        },
        ..PartitionConfig::default()
    };
    let (source, graph) = if is_fixture {
        let fx: LayeredGraphFixture = parse(&bytes, input)?;
        ensure!(fx.kind == FixtureKind::LayeredGraph);
        ensure!(
            fx.schema_version == SCHEMA_VERSION,
            "unsupported fixture schema_version {}",
            fx.schema_version
        );
        ensure!(!fx.devices.is_empty(), "{} has no devices", input.display());
        config.resource_layers = fx.resource_layers()?;
        ("layered_graph", fx.graph()?)
    } else {
        let sc: Scenario = parse(&bytes, input)?;
        sc.validate()
            .with_context(|| format!("invalid scenario {}", input.display()))?;
        let g = build_multilayer(&sc.devices, &sc.links, &MultilayerConfig { min_weight })?;
        ("scenario", g)
    };
    let output = multilayer_resource_partition(&graph, &config)?;
    let mut layers = vec![LayerSummary {
        layer: Layer::Network,
        partitions: output.network.len(),
        modularity: output.network.modularity,
    }];
    for set in &output.resource_layers {
        layers.push(LayerSummary {
            layer: set.layer.expect("resource partitions carry their layer"),
            partitions: set.len(),
            modularity: set.modularity,
        });
    }
    let doc = PartitionDocument {
        schema_version: SCHEMA_VERSION,
        source: source.to_string(),
        config: config.clone(),
        min_weight,
        lambda_coupling: LAMBDA_COUPLING.to_string(),
        layers: layers.clone(),
        feature_partitions: output.features.partitions.len(),
        feature_modularity: output.features.modularity,
        multilayer_modularity: output.multilayer_modularity,
        output,
    };
    let effective = json!({ "partition": config, "min_weight": min_weight, "input_sha256": sha256_hex(&bytes) });
    let mut m = ManifestBuilder::new("partition", louvain_seed, effective, out)?;
    m.input(input, &bytes);
    m.write_json("partitions.json", &doc)?;
    let mut csv = String::from("layer,partitions,modularity\n");
    for l in &layers {
        csv.push_str(&format!("{},{},{}\n", l.layer, l.partitions, l.modularity));
    }
    csv.push_str(&format!(
        "feature,{},{}\n",
        doc.feature_partitions, doc.feature_modularity
    ));
    m.write("modularity.csv", &csv)?;
    m.finish(json!({
        "network_partitions": doc.output.network.len(),
        "feature_partitions": doc.feature_partitions,
        "multilayer_modularity": doc.multilayer_modularity,
    }))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanDocument {
    pub schema_version: u32,
    pub scenario: String,
    pub strategy: Strategy,
    pub fitness: FitnessConfig,
    pub success_rate: f64,
    pub plans: Vec<PlacementPlan>,
    pub audit: Vec<CommitRecord>,
}

pub fn place(
    scenario_path: &Path,
    partitions: Option<&Path>,
    strategy: Strategy,
    alpha: f64,
    beta: f64,
    out: &Path,
) -> Result<()> {
    let fitness = FitnessConfig::new(alpha, beta)?;
    let (sc, sc_bytes) = load_scenario(scenario_path)?;
    let mut inputs = vec![(scenario_path.to_path_buf(), sc_bytes.clone())];
    let part = match partitions {
        Some(p) => {
            let bytes = read(p)?;
            let doc: PartitionDocument = parse(&bytes, p)?;
            ensure!(
                doc.source == "scenario",
                "{} was not computed from a scenario",
                p.display()
            );
            ensure!(
                doc.output.network.assignment.len() == sc.devices.len(),
                "{} covers {} devices, scenario has {}",
                p.display(),
                doc.output.network.assignment.len(),
                sc.devices.len()
            );
            inputs.push((p.to_path_buf(), bytes));
            doc.output
        }
        None => {
            let g = build_multilayer(&sc.devices, &sc.links, &MultilayerConfig::default())?;
            multilayer_resource_partition(&g, &PartitionConfig::default())?
        }
    };
    let routes = sc.topology()?.all_alive_routes();
    let input = PlacementInput {
        devices: &sc.devices,
        apps: &sc.apps,
        users: &sc.users,
        requests: &sc.requests,
        routes: &routes,
        partitions: &part,
    };
    let outcome = place_all(&input, strategy, fitness)?;
    let metrics = RunMetrics::compute(
        &sc.config.name,
        strategy,
        sc.config.seed,
        &outcome.plans,
        &sc.apps,
        &sc.devices,
        &sc.users,
        &routes,
        None,
    )?;
    let effective = json!({
        "strategy": strategy,
        "fitness": fitness,
        "inputs_sha256": inputs.iter().map(|(_, b)| sha256_hex(b)).collect::<Vec<_>>(),
    });
    let mut m = ManifestBuilder::new("place", Some(sc.config.seed), effective, out)?;
    for (p, b) in &inputs {
        m.input(p, b);
    }
    m.write_json(
        "plans.json",
        &PlanDocument {
            schema_version: SCHEMA_VERSION,
            scenario: sc.config.name.clone(),
            strategy,
            fitness,
            success_rate: metrics.success_rate,
            plans: outcome.plans,
            audit: outcome.audit,
        },
    )?;
    m.write_json("metrics.json", &metrics)?;
    m.finish(json!({
        "strategy": strategy,
        "placed_services": metrics.placed_services,
        "requested_services": metrics.requested_services,
        "success_rate": metrics.success_rate,
        "resource_wastage": metrics.resource_wastage,
    }))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationDocument {
    pub schema_version: u32,
    pub scenario: String,
    pub strategy: Strategy,
    pub result: SimulationResult,
}

pub fn simulate(
    scenario_path: &Path,
    plans_path: &Path,
    mode: Mode,
    horizon_s: f64,
    failure_period_s: f64,
    seed: Option<u64>,
    out: &Path,
) -> Result<()> {
    let (sc, sc_bytes) = load_scenario(scenario_path)?;
    let plan_bytes = read(plans_path)?;
    let plans: PlanDocument = parse(&plan_bytes, plans_path)?;
    let config = SimulationConfig {
        mode,
        horizon_s,
        failure_period_s,
        seed: seed.unwrap_or(sc.config.seed),
    };
    let result = run(&sc, &plans.plans, &config)?;
    let effective = json!({
        "simulation": config,
        "inputs_sha256": [sha256_hex(&sc_bytes), sha256_hex(&plan_bytes)],
    });
    let mut m = ManifestBuilder::new(
        &format!("simulate_{mode}"),
        Some(config.seed),
        effective,
        out,
    )?;
    m.input(scenario_path, &sc_bytes);
    m.input(plans_path, &plan_bytes);
    m.write(&format!("series_{mode}.csv"), &result.series_csv())?;
    let summary = json!({
        "mode": mode,
        "requests": result.counts.total(),
        "satisfied": result.counts.satisfied,
        "deadline_missed": result.counts.deadline_missed,
        "failed_dependency": result.counts.failed_dependency,
        "cumulative_satisfaction": result.satisfaction(),
        "failures": result.failures.len(),
        "devices_alive_at_end": result.alive_at_end.iter().filter(|a| **a).count(),
    });
    m.write_json(
        &format!("simulation_{mode}.json"),
        &SimulationDocument {
            schema_version: SCHEMA_VERSION,
            scenario: plans.scenario,
            strategy: plans.strategy,
            result,
        },
    )?;
    m.finish(summary)?;
    Ok(())
}

pub fn report(runs: &[std::path::PathBuf], out: &Path) -> Result<()> {
    let mut metrics = Vec::new();
    let mut inputs = Vec::new();
    for dir in runs {
        if !dir.is_dir() {
            bail!("run directory {} does not exist", dir.display());
        }
        let path = dir.join("metrics.json");
        let bytes = read(&path)?;
        let mut m: RunMetrics = parse(&bytes, &path)?;
        inputs.push((path, bytes));
        for mode in [Mode::Reliable, Mode::Faulty] {
            let sim_path = dir.join(format!("simulation_{mode}.json"));
            if sim_path.is_file() {
                let bytes = read(&sim_path)?;
                let doc: SimulationDocument = parse(&bytes, &sim_path)?;
                m.simulated_satisfaction = doc.result.satisfaction();
                inputs.push((sim_path, bytes));
                break;
            }
        }
        metrics.push(m);
    }
    let effective = json!({
        "inputs_sha256": inputs.iter().map(|(_, b)| sha256_hex(b)).collect::<Vec<_>>(),
    });
    let mut mb = ManifestBuilder::new("report", None, effective, out)?;
    for (p, b) in &inputs {
        mb.input(p, b);
    }
    let report = Report::new(metrics);
    mb.write_json("report.json", &report)?;
    mb.write("comparison.csv", &comparison_csv(&report.runs))?;
    mb.finish(json!({ "runs": report.runs.len() }))?;
    Ok(())
}
