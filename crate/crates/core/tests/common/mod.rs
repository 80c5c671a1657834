#![allow(dead_code)]

use metamob::net::{build_network, MobilityNetwork};
use metamob::{canonicalize_trajectories, MovementEvent};
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;

/// Random undirected graph as a network: one two-event agent per edge and a
/// one-event agent per node so isolated nodes exist too.
pub fn random_graph(seed: u64, max_nodes: usize) -> (MobilityNetwork, usize, Vec<(usize, usize)>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let p = rng.random_range(0.2..4.0) / n as f64;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    let mut events: Vec<MovementEvent> = (0..n)
        .map(|i| MovementEvent::new(format!("n{i}"), 0, format!("v{i}")))
        .collect();
    for (k, &(a, b)) in edges.iter().enumerate() {
        let agent = format!("e{k}");
        events.push(MovementEvent::new(agent.clone(), 0, format!("v{a}")));
        events.push(MovementEvent::new(agent, 1, format!("v{b}")));
    }
    (build_network(&canonicalize_trajectories(events), false), n, edges)
}

/// All-pairs hop counts; `None` when unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    const INF: u32 = u32::MAX / 2;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < INF).then_some(x)).collect())
        .collect()
}
