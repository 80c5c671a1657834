mod common;

use metamob::net::{shortest_path_distance, Distance};
use metamob::LocationId;

#[test]
fn bfs_matches_floyd_warshall() {
    for seed in 0..50 {
        let (net, n, edges) = common::random_graph(seed, 200);
        let fw = common::floyd_warshall(n, &edges);
        let adj = net.adjacency();
        let idx: Vec<u32> = (0..n)
            .map(|i| net.node_index(&LocationId::new(format!("v{i}"))).unwrap())
            .collect();
        for i in 0..n {
            let row = adj.bfs(idx[i]);
            for j in 0..n {
                assert_eq!(row[idx[j] as usize], fw[i][j], "seed {seed} pair {i},{j}");
            }
        }
        for (i, j) in [(0, n - 1), (n / 2, 0), (1 % n, n / 3)] {
            let want = fw[i][j].map_or(Distance::Unreachable, Distance::Hops);
            let got = shortest_path_distance(
                &net,
                &LocationId::new(format!("v{i}")),
                &LocationId::new(format!("v{j}")),
            )
            .unwrap();
            assert_eq!(got, want);
        }
    }
}

#[test]
fn unknown_node_is_an_error() {
    let (net, _, _) = common::random_graph(1, 10);
    assert!(shortest_path_distance(&net, &"v0".into(), &"nowhere".into()).is_err());
}
