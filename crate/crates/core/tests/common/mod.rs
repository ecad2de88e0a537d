#![allow(dead_code)]

use splz::generate;
use splz::graph::{parse_dimacs, Graph, RawGraph, Spt, VertexId};

pub const SIX_GR: &str = include_str!("../data/six.gr");
pub const SIX_CO: &str = include_str!("../data/six.co");

/// The six-vertex worked example, 0-based.
pub fn six_graph() -> RawGraph {
    parse_dimacs(SIX_GR.as_bytes(), SIX_CO.as_bytes()).unwrap()
}

/// Last-move rows of the worked example, one per source.
pub const SIX_TABLE: [[u8; 6]; 6] = [
    [0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, 0],
    [0, 0, 3, 0, 0, 1],
    [0, 0, 2, 1, 1, 0],
];

/// Bellman-Ford over the normalized graph's out-edges.
pub fn bellman_ford(graph: &Graph, source: VertexId) -> Vec<Option<u64>> {
    let n = graph.vertex_count();
    let mut dist = vec![None; n];
    dist[source as usize] = Some(0u64);
    for _ in 0..n {
        let mut changed = false;
        for u in 0..n as VertexId {
            let Some(du) = dist[u as usize] else { continue };
            for e in graph.out_edges(u) {
                let nd = du + e.weight as u64;
                if dist[e.head as usize].is_none_or(|d| nd < d) {
                    dist[e.head as usize] = Some(nd);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Bellman-Ford over a raw edge list.
pub fn bellman_ford_raw(raw: &RawGraph, source: VertexId) -> Vec<Option<u64>> {
    let mut dist = vec![None; raw.vertex_count];
    dist[source as usize] = Some(0u64);
    for _ in 0..raw.vertex_count {
        let mut changed = false;
        for &(t, h, w) in &raw.edges {
            if t == h {
                continue;
            }
            if let Some(dt) = dist[t as usize] {
                let nd = dt + w as u64;
                if dist[h as usize].is_none_or(|d| nd < d) {
                    dist[h as usize] = Some(nd);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Brute-force tree for graphs without zero-weight edges: each vertex
/// takes the lowest local index among its tight in-edges.
pub fn brute_force_spt(graph: &Graph, source: VertexId) -> Spt {
    assert!(
        (0..graph.vertex_count() as VertexId).all(|v| graph.in_edges(v).iter().all(|e| e.weight > 0)),
        "tie rule is only unambiguous without zero-weight edges"
    );
    let dist = bellman_ford(graph, source);
    let mut last_move = vec![0u8; graph.vertex_count()];
    for v in 0..graph.vertex_count() {
        if v as VertexId == source {
            continue;
        }
        let Some(dv) = dist[v] else { continue };
        last_move[v] = graph
            .in_edges(v as VertexId)
            .iter()
            .position(|e| dist[e.tail as usize].is_some_and(|dt| dt + e.weight as u64 == dv))
            .expect("reachable vertex has a tight in-edge") as u8;
    }
    Spt { source, last_move }
}

/// Checks that `spt` is a shortest-path tree: every reachable vertex's
/// chosen in-edge is tight and its parent chain ends at the source;
/// unreachable vertices hold 0.
pub fn assert_valid_spt(graph: &Graph, spt: &Spt) {
    let n = graph.vertex_count();
    let dist = bellman_ford(graph, spt.source);
    assert_eq!(spt.last_move.len(), n);
    for v in 0..n {
        let vid = v as VertexId;
        let Some(dv) = dist[v] else {
            assert_eq!(spt.last_move[v], 0, "unreachable vertex {v}");
            continue;
        };
        if vid == spt.source {
            continue;
        }
        let e = graph.in_edges(vid)[spt.last_move[v] as usize];
        assert_eq!(dist[e.tail as usize].map(|d| d + e.weight as u64), Some(dv), "edge into {v} is not tight");
        let mut cur = vid;
        let mut steps = 0;
        while cur != spt.source {
            cur = spt.parent(graph, cur).unwrap();
            steps += 1;
            assert!(steps <= n, "parent chain of {v} loops");
        }
    }
}

/// Test corpus: grids, random geometric graphs and stars that force
/// virtual-vertex splits.
pub fn corpus() -> Vec<(String, RawGraph)> {
    let mut out = Vec::new();
    for (w, h, seed) in [(1, 1, 0), (2, 2, 1), (5, 5, 2), (10, 10, 3), (20, 20, 4), (30, 7, 5), (35, 35, 6), (50, 50, 7)] {
        out.push((format!("grid {w}x{h}"), generate::grid(w, h, 1..=9, seed)));
    }
    out.push(("unit grid 12x12".into(), generate::grid(12, 12, 1..=1, 0)));
    for (n, k, seed) in [(10, 2, 1), (50, 3, 2), (200, 3, 3), (500, 4, 4), (1000, 3, 5), (2500, 3, 6), (5000, 3, 7)] {
        out.push((format!("geometric {n}"), generate::random_geometric(n, k, seed)));
    }
    for (spokes, seed) in [(17, 1), (20, 2), (40, 3), (100, 4), (300, 5)] {
        out.push((format!("star {spokes}"), generate::star(spokes, seed)));
    }
    out
}
