//! Synthetic road-like graphs for tests, benchmarks and experiments.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{RawGraph, VertexId};

/// Spacing between neighboring grid vertices in coordinate units.
pub const GRID_SPACING: i64 = 100;

/// `width x height` 4-neighbor grid with undirected edges whose weights are
/// drawn uniformly from `weights`. Vertex `(x, y)` has id `y * width + x`.
pub fn grid(width: usize, height: usize, weights: RangeInclusive<u32>, seed: u64) -> RawGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = RawGraph::new(width * height);
    let id = |x: usize, y: usize| (y * width + x) as VertexId;
    for y in 0..height {
        for x in 0..width {
            if x + 1 < width {
                g.add_undirected(id(x, y), id(x + 1, y), rng.gen_range(weights.clone()));
            }
            if y + 1 < height {
                g.add_undirected(id(x, y), id(x, y + 1), rng.gen_range(weights.clone()));
            }
        }
    }
    g.coords = Some(
        (0..height)
            .flat_map(|y| (0..width).map(move |x| (x as i64 * GRID_SPACING, y as i64 * GRID_SPACING)))
            .collect(),
    );
    g
}

/// Square grid with about `n` vertices.
pub fn square_grid(n: usize, weights: RangeInclusive<u32>, seed: u64) -> RawGraph {
    let side = (n as f64).sqrt().round().max(1.0) as usize;
    grid(side, side, weights, seed)
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// `n` points uniform in a square, each joined both ways to its `k` nearest
/// neighbors with weight equal to the rounded Euclidean distance. Extra
/// edges join the components so every vertex reaches every other.
pub fn random_geometric(n: usize, k: usize, seed: u64) -> RawGraph {
    const SIDE: i64 = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(i64, i64)> = (0..n)
        .map(|_| (rng.gen_range(0..SIDE), rng.gen_range(0..SIDE)))
        .collect();
    let dist = |a: usize, b: usize| {
        let dx = (pts[a].0 - pts[b].0) as f64;
        let dy = (pts[a].1 - pts[b].1) as f64;
        ((dx * dx + dy * dy).sqrt().round() as u32).max(1)
    };
    let mut g = RawGraph::new(n);
    let mut parent: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for a in 0..n {
        order.clear();
        order.extend((0..n).filter(|&b| b != a));
        let k = k.min(order.len());
        if k == 0 {
            continue;
        }
        order.select_nth_unstable_by_key(k - 1, |&b| (dist(a, b), b));
        for &b in &order[..k] {
            g.add_undirected(a as VertexId, b as VertexId, dist(a, b));
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    loop {
        let main = find(&mut parent, 0);
        let Some(a) = (0..n).find(|&v| find(&mut parent, v) != main) else {
            break;
        };
        let b = (0..n)
            .filter(|&v| find(&mut parent, v) == main)
            .min_by_key(|&v| (dist(a, v), v))
            .unwrap();
        g.add_undirected(a as VertexId, b as VertexId, dist(a, b));
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    g.coords = Some(pts);
    g
}

/// Hub `0` joined both ways to `spokes` leaves on a circle, plus a ring
/// through the leaves. The hub's in-degree forces virtual-vertex splits
/// once `spokes > 16`.
pub fn star(spokes: usize, seed: u64) -> RawGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = RawGraph::new(spokes + 1);
    let mut coords = vec![(0i64, 0i64)];
    for s in 1..=spokes {
        let a = s as f64 / spokes as f64 * std::f64::consts::TAU;
        coords.push(((a.cos() * 10_000.0) as i64, (a.sin() * 10_000.0) as i64));
        g.add_edge(s as VertexId, 0, rng.gen_range(1..=20));
        g.add_edge(0, s as VertexId, rng.gen_range(1..=20));
        if spokes > 2 {
            let next = s % spokes + 1;
            g.add_undirected(s as VertexId, next as VertexId, rng.gen_range(1..=20));
        }
    }
    g.coords = Some(coords);
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = grid(3, 2, 1..=1, 0);
        assert_eq!(g.vertex_count, 6);
        assert_eq!(g.edges.len(), 2 * (2 * 2 + 3));
        assert_eq!(g.coords.as_ref().unwrap()[4], (100, 100));
        g.validate().unwrap();
    }

    #[test]
    fn geometric_is_connected_and_deterministic() {
        let a = random_geometric(300, 3, 9);
        assert_eq!(a, random_geometric(300, 3, 9));
        let g = crate::graph::normalize(&a);
        assert!(g.reachable_from(0).iter().all(|&r| r));
    }

    #[test]
    fn star_hub_degree() {
        let g = star(40, 1);
        assert_eq!(g.edges.iter().filter(|e| e.1 == 0).count(), 40);
    }
}
