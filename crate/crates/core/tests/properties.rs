use metamob::analysis::{fit_loglog_ols, gini, retention_rate, top_share_of};
use metamob::net::{build_network, WeightKind};
use metamob::sim::PopularityTable;
use metamob::{canonicalize_trajectories, manhattan_distance, LocationId, MovementEvent, TrajectorySet};
use proptest::prelude::*;

fn grid_id() -> impl Strategy<Value = LocationId> {
    (-200i64..200, -200i64..200).prop_map(|(x, y)| LocationId::grid(x, y))
}

fn event_log() -> impl Strategy<Value = Vec<MovementEvent>> {
    prop::collection::vec((0u8..6, 0u64..40, 0u8..12), 0..120).prop_map(|raw| {
        raw.into_iter()
            .map(|(a, t, l)| MovementEvent::new(format!("a{a}"), t, format!("L{l}")))
            .collect()
    })
}

fn events_of(set: &TrajectorySet) -> Vec<MovementEvent> {
    set.to_events()
}

proptest! {
    #[test]
    fn manhattan_is_a_metric(a in grid_id(), b in grid_id(), c in grid_id()) {
        let d = |p: &LocationId, q: &LocationId| manhattan_distance(p, q).unwrap();
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        if a != b {
            prop_assert!(d(&a, &b) > 0);
        }
    }

    #[test]
    fn canonicalize_is_idempotent(events in event_log()) {
        let once = canonicalize_trajectories(events.clone());
        let twice = canonicalize_trajectories(events_of(&once));
        prop_assert_eq!(events_of(&once), events_of(&twice));
        prop_assert_eq!(once.event_count(), events.len());
    }

    #[test]
    fn canonical_order_is_per_agent_time_order(mut events in event_log(), k in any::<usize>()) {
        let before = canonicalize_trajectories(events.clone());
        if !events.is_empty() {
            let n = events.len();
            events.rotate_left(k % n);
        }
        let after = canonicalize_trajectories(events);
        let key = |set: &TrajectorySet| {
            let mut v: Vec<(String, u64, String)> = set
                .to_events()
                .into_iter()
                .map(|e| (e.agent, e.t, e.loc.to_string()))
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(key(&before), key(&after));
        for tr in after.iter() {
            prop_assert!(tr.visits.windows(2).all(|w| w[0].t <= w[1].t));
        }
    }

    #[test]
    fn network_conserves_transitions(events in event_log()) {
        let set = canonicalize_trajectories(events);
        let expected: u64 = set.iter().map(|t| t.len().saturating_sub(1) as u64).sum();
        for directed in [false, true] {
            let net = build_network(&set, directed);
            prop_assert_eq!(net.total_transitions(), expected);
            let events: u64 = net.nodes().iter().map(|n| n.events).sum();
            prop_assert_eq!(events, set.event_count() as u64);
        }
    }

    #[test]
    fn undirected_weight_sums_both_directions(events in event_log()) {
        let set = canonicalize_trajectories(events);
        let d = build_network(&set, true);
        let u = build_network(&set, false);
        for ((a, b), w) in u.sorted_edges() {
            let (ia, ib) = (set.loc_id(a), set.loc_id(b));
            let fwd = d.edge(ia, ib).map_or(0, |w| w.events);
            let back = d.edge(ib, ia).map_or(0, |w| w.events);
            prop_assert_eq!(w.events, fwd + back);
            prop_assert!(w.agents <= w.events);
            let fa = d.edge(ia, ib).map_or(0, |w| w.agents);
            let ba = d.edge(ib, ia).map_or(0, |w| w.agents);
            prop_assert!(w.agents >= fa.max(ba) && w.agents <= fa + ba);
        }
        prop_assert_eq!(
            u.edge_weights(WeightKind::Events).iter().sum::<u64>(),
            d.edge_weights(WeightKind::Events).iter().sum::<u64>()
        );
    }

    #[test]
    fn retention_complements_moves(events in event_log()) {
        let set = canonicalize_trajectories(events);
        let total: usize = set.iter().map(|t| t.len().saturating_sub(1)).sum();
        let moves: usize = set
            .iter()
            .map(|t| t.visits.windows(2).filter(|w| w[0].loc != w[1].loc).count())
            .sum();
        match retention_rate(&set) {
            Ok(r) => prop_assert!((r + moves as f64 / total as f64 - 1.0).abs() <= f64::EPSILON),
            Err(_) => prop_assert_eq!(total, 0),
        }
    }

    #[test]
    fn gini_is_scale_invariant_and_bounded(
        xs in prop::collection::vec(0.0f64..1e3, 1..60),
        c in 0.01f64..100.0,
    ) {
        prop_assume!(xs.iter().any(|&x| x > 0.0));
        let g = gini(&xs).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
        let gs = gini(&scaled).unwrap();
        prop_assert!((g - gs).abs() < 1e-9);
        let n = xs.len() as f64;
        prop_assert!(g >= 0.0 && g <= (n - 1.0) / n + 1e-12);
        // pairwise definition
        let mean = xs.iter().sum::<f64>() / n;
        let pair: f64 = xs.iter().flat_map(|a| xs.iter().map(move |b| (a - b).abs())).sum();
        prop_assert!((g - pair / (2.0 * n * n * mean)).abs() < 1e-9);
    }

    #[test]
    fn top_share_is_monotone(
        vs in prop::collection::vec(0u64..500, 1..80),
        mut fs in prop::collection::vec(0.001f64..1.0, 2..8),
    ) {
        prop_assume!(vs.iter().any(|&v| v > 0));
        fs.sort_by(f64::total_cmp);
        let shares: Vec<f64> = fs.iter().map(|&f| top_share_of(&vs, f).unwrap()).collect();
        for w in shares.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        prop_assert_eq!(top_share_of(&vs, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn ols_slope_ignores_y_scale(
        slope in -3.0f64..3.0,
        noise in prop::collection::vec(-0.3f64..0.3, 40),
        c in 0.001f64..1000.0,
    ) {
        let pairs: Vec<(f64, f64)> = noise
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let x = (i + 1) as f64;
                (x, x.powf(slope) * e.exp())
            })
            .collect();
        let scaled: Vec<(f64, f64)> = pairs.iter().map(|&(x, y)| (x, c * y)).collect();
        let a = fit_loglog_ols(&pairs).unwrap();
        let b = fit_loglog_ols(&scaled).unwrap();
        prop_assert!((a.exponent - b.exponent).abs() < 1e-9);
    }

    #[test]
    fn popularity_counts_are_conserved(
        incs in prop::collection::vec((0usize..30, 1u64..5), 0..200),
    ) {
        let mut table = PopularityTable::new(30, 1.0);
        for &(i, d) in &incs {
            table.increment(i, d);
        }
        let total: u64 = incs.iter().map(|p| p.1).sum();
        prop_assert_eq!(table.total_count(), total);
        prop_assert!((table.total_weight() - (total as f64 + 30.0)).abs() < 1e-6);
    }
}
