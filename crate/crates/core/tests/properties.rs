use lorawan_psc::agreement::{self, DecisionLabel, TIE_TOLERANCE};
use lorawan_psc::allocator::{self, AllocationContext, Basis, EquilibriumThresholds, PoolApp};
use lorawan_psc::config::{ScenarioConfig, SelectionMode};
use lorawan_psc::metrics::{self, RestorationInputs, Survivability};
use lorawan_psc::model::{transition_allowed, AppSource, AppState, Host, RejectReason, ServerState};
use lorawan_psc::topology::build_topology;
use proptest::prelude::*;

proptest! {
    #[test]
    fn link_count_closed_form(b in 1u32..20, extra_l in 0u32..50, s in 1u32..80, e in 1u32..500) {
        let l = b + extra_l;
        let cfg = ScenarioConfig { n_servers: b, n_gateways: l, n_aps: s, n_users: e, ..Default::default() };
        let topo = build_topology(&cfg.validate().unwrap());
        prop_assert_eq!(topo.link_count() as u32, 1 + b + l + s + e);
    }

    #[test]
    fn failed_aps_contribute_no_links(failed in 0u32..=100) {
        let mut topo = build_topology(&ScenarioConfig::default());
        topo.fail_first_aps(failed);
        let route = topo.lora_route(0, 0);
        let links = metrics::count_active_links(&topo, [route.as_slice()]);
        prop_assert_eq!(links, route.len() + (100 - failed) as usize);
    }
}

fn state_strategy() -> impl Strategy<Value = AppState> {
    prop_oneof![
        Just(AppState::Pending),
        (0u32..3).prop_map(|b| AppState::Active(Host::Server(b))),
        (0u32..3).prop_map(|a| AppState::Active(Host::AccessPoint(a))),
        Just(AppState::Closed),
        Just(AppState::Rejected(RejectReason::Capacity)),
        Just(AppState::Rejected(RejectReason::EquilibriumViolated)),
    ]
}

fn legal_oracle(from: AppState, to: AppState) -> bool {
    use AppState::*;
    matches!(
        (from, to),
        (Pending, Active(_)) | (Pending, Rejected(_)) | (Active(_), Closed) | (Active(Host::AccessPoint(_)), Pending)
    )
}

proptest! {
    #[test]
    fn state_machine_admits_only_legal_edges(seq in prop::collection::vec(state_strategy(), 1..12)) {
        let cfg = ScenarioConfig::default();
        let mut app = lorawan_psc::model::Application::new(0, AppSource::Psc, 0, 1, 0.0, &cfg);
        for to in seq {
            let from = app.state;
            let result = app.transition(to);
            prop_assert_eq!(result.is_ok(), legal_oracle(from, to));
            prop_assert_eq!(transition_allowed(from, to), legal_oracle(from, to));
            if result.is_err() {
                prop_assert_eq!(app.state, from);
            }
        }
    }

    #[test]
    fn server_memory_matches_hosted_sum(ops in prop::collection::vec((any::<bool>(), 1u32..=10), 1..80)) {
        let cfg = ScenarioConfig::default();
        let mut server = ServerState::new(0, &cfg);
        let mut hosted: Vec<(u32, u32)> = Vec::new();
        let mut next = 0;
        for (admit, mem) in ops {
            if admit || hosted.is_empty() {
                if server.can_host(mem) {
                    server.admit(next, AppSource::LoRa, mem, cfg.energy_per_app);
                    hosted.push((next, mem));
                    next += 1;
                }
            } else {
                let (id, m) = hosted.remove(0);
                server.release(id, AppSource::LoRa, m, cfg.energy_per_app);
            }
            let sum: u64 = hosted.iter().map(|(_, m)| u64::from(*m)).sum();
            prop_assert_eq!(server.mem_used, sum);
            prop_assert!(server.mem_used <= server.mem_capacity);
            prop_assert!(server.slots_used <= server.slots);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn decision_labels_are_total_and_scale_free(
        q in 0.0f64..=1.0,
        x in -1e3f64..1e3,
        y in -1e3f64..1e3,
        tail in prop::collection::vec(-1e3f64..1e3, 0..5),
        c in 1e-3f64..1e3,
    ) {
        let d = agreement::memory_decision(q, x, &tail);
        let oracle = if d.value.abs() <= TIE_TOLERANCE { DecisionLabel::Continue }
            else if d.value < 0.0 { DecisionLabel::Reset } else { DecisionLabel::Expand };
        prop_assert_eq!(d.label, oracle);
        let e = agreement::energy_decision(q, x, y);
        prop_assert_eq!(e.label, DecisionLabel::from_value(e.value));

        let scaled_tail: Vec<f64> = tail.iter().map(|t| t * c).collect();
        let ds = agreement::memory_decision(q, x * c, &scaled_tail);
        let es = agreement::energy_decision(q, x * c, y * c);
        // Away from the tie band the value scales by c, so the sign survives.
        let clear = |a: f64, b: f64| a.abs() > 1e-6 && b.abs() > 1e-6;
        if clear(d.value, ds.value) {
            prop_assert_eq!(d.label, ds.label);
        }
        if clear(e.value, es.value) {
            prop_assert_eq!(e.label, es.label);
        }
    }
}

proptest! {
    #[test]
    fn restoration_monotone(
        k_closed in 0usize..50,
        extra in 1usize..50,
        e in prop::collection::vec(0.0f64..=1.0, 1..6),
        bump in 0.0f64..0.5,
    ) {
        let base = RestorationInputs {
            k_closed,
            k_total: k_closed + extra,
            links_active: 300,
            links_total: 1211,
            e_r_norm: e.clone(),
            a_r_norm: e.clone(),
            n1: 0.5,
            n2: 0.3,
        };
        let r0 = metrics::resource_restoration(&base).unwrap();
        let more_closed = RestorationInputs { k_closed: k_closed + 1, ..base.clone() };
        prop_assert!(metrics::resource_restoration(&more_closed).unwrap() >= r0);
        let mut higher = base.clone();
        higher.e_r_norm[0] = (higher.e_r_norm[0] + bump).min(1.0);
        prop_assert!(metrics::resource_restoration(&higher).unwrap() >= r0 - 1e-15);
    }

    #[test]
    fn sustainability_within_series_bounds(values in prop::collection::vec(-10.0f64..10.0, 2..30)) {
        let t: Vec<f64> = (0..values.len()).map(|k| k as f64 * 360.0).collect();
        let (s1, _, _) = metrics::average_sustainability(&t, &values, &values).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s1 >= lo - 1e-9 && s1 <= hi + 1e-9);
    }

    #[test]
    fn survivability_monotone(delta in 0.0f64..1.0, drains in prop::collection::vec(0.0f64..0.1, 0..20), extra in 0.0f64..0.1) {
        let before = metrics::survivability(delta, &drains);
        let mut more = drains.clone();
        more.push(extra);
        let after = metrics::survivability(delta, &more);
        prop_assert!(!(before == Survivability::Unavailable && after == Survivability::Available));
    }

    #[test]
    fn normalisation_peaks_at_one(raw in prop::collection::vec(-5.0f64..5.0, 1..10)) {
        let n = metrics::normalize_over_servers(&raw);
        prop_assert!(n.iter().all(|v| (0.0..=1.0).contains(v)));
        if raw.iter().any(|v| *v > 0.0) {
            let peak = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let trough = raw.iter().cloned().fold(f64::INFINITY, f64::min);
            if peak >= -trough {
                prop_assert_eq!(n.iter().cloned().fold(0.0, f64::max), 1.0);
            }
        }
    }

    #[test]
    fn q_tail_plus_head_is_one(rate in 0.0f64..1e-2, boundary in 0usize..25) {
        let p = agreement::exponential_series(rate, 360.0, 20);
        let tail = agreement::q_tail_probability(&p, boundary);
        let head: f64 = p[..=boundary.min(20)].iter().sum();
        prop_assert!((tail + head - 1.0).abs() < 1e-12);
    }

    #[test]
    fn selection_never_empty_with_finite_decay(drains in prop::collection::vec(0u64..50_000, 1..6)) {
        let cfg = ScenarioConfig::default();
        let servers: Vec<ServerState> = drains.iter().enumerate().map(|(i, d)| {
            let mut s = ServerState::new(i as u32, &cfg);
            s.last_mem_admitted = *d;
            s
        }).collect();
        let chosen = allocator::select_available_servers(&servers, 360.0, SelectionMode::Relaxed, Basis::Memory, 360.0);
        prop_assert!(!chosen.is_empty());
    }
}

fn pool_strategy() -> impl Strategy<Value = Vec<(u32, u32)>> {
    prop::collection::vec((0u32..5, 1u32..=10), 0..15)
}

proptest! {
    #[test]
    fn allocation_is_capacity_safe_and_fcfs(
        mems in prop::collection::vec(10u64..60, 1..4),
        pool in pool_strategy(),
    ) {
        let cfg = ScenarioConfig { slots_per_server: 4, ..Default::default() };
        let mut servers: Vec<ServerState> = mems.iter().enumerate().map(|(i, m)| {
            let mut s = ServerState::new(i as u32, &cfg);
            s.mem_capacity = *m;
            s
        }).collect();
        let mut apps: Vec<PoolApp> = pool.iter().enumerate().map(|(k, (t, m))| PoolApp {
            id: k as u32,
            arrival_time: f64::from(*t) * 360.0,
            mem_demand: *m,
            energy_budget: cfg.energy_per_app,
        }).collect();
        apps.sort_by(|a, b| a.arrival_time.total_cmp(&b.arrival_time).then(a.id.cmp(&b.id)));
        let counts = vec![0; servers.len()];
        let ctx = AllocationContext { config: &cfg, elapsed: 360.0, lora_counts: &counts };
        let r = allocator::allocate(&apps, &mut servers, EquilibriumThresholds::zero(&cfg), &ctx);

        for s in &servers {
            prop_assert!(s.mem_used <= s.mem_capacity);
            prop_assert!(s.slots_used <= s.slots);
        }
        prop_assert_eq!(r.placements.len() + r.rejected.len(), apps.len());
        let order: Vec<usize> = r.placements.iter()
            .map(|(id, _)| apps.iter().position(|a| a.id == *id).unwrap())
            .collect();
        prop_assert!(order.windows(2).all(|w| w[0] < w[1]));
        if r.deadlock {
            prop_assert!(!r.rejected.is_empty());
        }
        if !r.deadlock && !apps.is_empty() {
            let mut b_prime: Vec<usize> = r.available.iter().map(|id| *id as usize).collect();
            for (_, sid) in &r.placements {
                if !b_prime.contains(&(*sid as usize)) {
                    b_prime.push(*sid as usize);
                }
            }
            prop_assert!(allocator::equilibrium_holds(&servers, &b_prime, &r.final_thresholds, &ctx));
        }
    }
}
