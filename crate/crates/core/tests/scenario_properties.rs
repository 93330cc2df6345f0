//! Ranges, determinism and structure of generated scenarios.

use fogpart_core::model::{DeviceRole, Endpoint};
use fogpart_core::scenario::{
    barabasi_albert, betweenness_centrality, growing_network_dag, stream_rng, Preset, Scenario,
    Stream, UniformRange,
};
use fogpart_core::topology::{hop_distance, HopDistance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn ten_thousand_samples_stay_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for r in [
        UniformRange { min: 10, max: 25 },
        UniformRange {
            min: 300,
            max: 50_000,
        },
        UniformRange { min: 2, max: 2 },
    ] {
        let mut lo = u64::MAX;
        let mut hi = 0;
        for _ in 0..10_000 {
            let v = r.sample(&mut rng);
            assert!(r.contains(v), "{v} outside {r:?}");
            lo = lo.min(v);
            hi = hi.max(v);
        }
        // both ends are reachable
        if r.max - r.min < 100 {
            assert_eq!((lo, hi), (r.min, r.max));
        }
    }
}

#[test]
fn generated_values_respect_configured_ranges() {
    let mut samples = 0usize;
    for seed in 0..20 {
        let cfg = Preset::Large.config(seed);
        let sc = Scenario::generate(&cfg).unwrap();
        let r = &cfg.resources;
        for d in sc.devices.iter().filter(|d| d.role != DeviceRole::Cloud) {
            assert!(r.cores.contains(u64::from(d.cores)));
            assert!(r.cpu_speed.contains(d.cpu_speed as u64));
            assert!(r.mem_gb.contains(d.mem as u64));
            assert!(r.storage_tb.contains(d.storage as u64));
            samples += 4;
        }
        let a = &cfg.apps;
        for app in &sc.apps {
            assert!(a.services.contains(app.services.len() as u64));
            assert!(a.deadline_ms.contains(app.deadline as u64));
            for s in &app.services {
                assert!(a.workload_mi.contains(s.workload as u64));
                assert!(a.mem_gb.contains(s.mem_demand as u64));
                assert!(a.storage_tb.contains(s.storage_demand as u64));
                samples += 3;
            }
            for m in &app.messages {
                assert_eq!(m.size % 1000.0, 0.0);
                assert!(a.message_size_kb.contains((m.size / 1000.0) as u64));
                samples += 1;
            }
        }
    }
    assert!(samples >= 10_000, "{samples}");
}

#[test]
fn preset_counts() {
    for (preset, apps, users) in [
        (Preset::Small, 10, 29),
        (Preset::Medium, 20, 65),
        (Preset::Large, 30, 98),
        (Preset::DSmall, 10, 29),
        (Preset::DMedium, 20, 65),
        (Preset::DLarge, 30, 98),
    ] {
        let sc = Scenario::generate(&preset.config(3)).unwrap();
        assert_eq!(sc.apps.len(), apps);
        assert_eq!(sc.users.len(), users);
        assert_eq!(sc.requests.len(), users);
        assert_eq!(sc.gateways.len(), 25);
        assert_eq!(sc.devices.len(), 101);
        assert_eq!(sc.schedule.is_some(), preset.is_deadline_scenario());
    }
    let sc = Scenario::generate(&Preset::DSmall.config(3)).unwrap();
    let per_user = sc.schedule.unwrap().requests_per_user(2000.0);
    assert_eq!(per_user, 1284);
    assert_eq!(per_user * sc.users.len(), 37_236);
}

#[test]
fn topology_is_connected_and_gateways_are_the_least_central() {
    for seed in 0..10 {
        let sc = Scenario::generate(&Preset::Small.config(seed)).unwrap();
        let routes = sc.topology().unwrap().all_alive_routes();
        for d in &sc.devices {
            assert!(matches!(
                hop_distance(&routes, sc.devices[0].id, d.id),
                HopDistance::Hops(_)
            ));
        }
        let edges: Vec<(usize, usize)> = sc
            .links
            .iter()
            .filter(|l| Some(l.endpoints.1) != sc.cloud && Some(l.endpoints.0) != sc.cloud)
            .map(|l| (l.endpoints.0.index(), l.endpoints.1.index()))
            .collect();
        let c = betweenness_centrality(100, &edges);
        let worst_gateway = sc
            .gateways
            .iter()
            .map(|g| c[g.index()])
            .fold(f64::MIN, f64::max);
        let best_other = (0..100)
            .filter(|i| !sc.gateways.iter().any(|g| g.index() == *i))
            .map(|i| c[i])
            .fold(f64::MAX, f64::min);
        assert!(worst_gateway <= best_other);
        for u in &sc.users {
            assert!(sc.gateways.contains(&u.gateway));
        }
        let cloud = sc.cloud.unwrap();
        let hub = sc
            .links
            .iter()
            .find(|l| l.endpoints.1 == cloud || l.endpoints.0 == cloud)
            .unwrap();
        let hub = if hub.endpoints.0 == cloud {
            hub.endpoints.1
        } else {
            hub.endpoints.0
        };
        let max = c.iter().copied().fold(f64::MIN, f64::max);
        assert_eq!(c[hub.index()], max);
    }
}

#[test]
fn applications_have_one_entry_and_no_cycles() {
    for seed in 0..10 {
        let sc = Scenario::generate(&Preset::Large.config(seed)).unwrap();
        for app in &sc.apps {
            app.validate().unwrap();
            let entries: Vec<_> = app
                .messages
                .iter()
                .filter(|m| m.source == Endpoint::User)
                .collect();
            assert_eq!(entries.len(), 1);
            assert_eq!(app.entry_service().unwrap().0, 0);
            assert_eq!(app.topological_order().unwrap().len(), app.services.len());
        }
    }
}

#[test]
fn generation_is_a_pure_function_of_config() {
    for preset in [Preset::Small, Preset::DMedium] {
        let a = Scenario::generate(&preset.config(42)).unwrap();
        let b = Scenario::generate(&preset.config(42)).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = Scenario::generate(&preset.config(43)).unwrap();
        assert_ne!(a, c);
        let back: Scenario = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        back.validate().unwrap();
    }
}

proptest! {
    #[test]
    fn uniform_samples_within_bounds(min in 0u64..1000, span in 0u64..1000, seed in any::<u64>()) {
        let r = UniformRange { min, max: min + span };
        let mut rng = stream_rng(seed, Stream::Resources);
        for _ in 0..100 {
            prop_assert!(r.contains(r.sample(&mut rng)));
        }
    }

    #[test]
    fn ba_graph_is_simple_and_connected(n in 3usize..60, m in 1usize..4, seed in any::<u64>()) {
        prop_assume!(m < n);
        let edges = barabasi_albert(n, m, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut seen = std::collections::BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            prop_assert!(a != b && a < n && b < n);
            prop_assert!(seen.insert((a.min(b), a.max(b))));
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut stack = vec![0];
        let mut visited = vec![false; n];
        visited[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
        prop_assert!(visited.iter().all(|&v| v));
    }

    #[test]
    fn growing_dag_is_a_tree_rooted_at_zero(n in 1usize..40, seed in any::<u64>()) {
        let edges = growing_network_dag(n, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(edges.len(), n.saturating_sub(1));
        let mut parents = vec![0; n];
        for &(p, c) in &edges {
            prop_assert!(p < c);
            parents[c] += 1;
        }
        prop_assert_eq!(parents[0], 0);
        prop_assert!(parents.iter().skip(1).all(|&k| k == 1));
    }
}
