//! Exact shortest-path trees with deterministic tie-breaking.
//!
//! The heap orders by `(distance, vertex id)`. When an edge offers a
//! distance equal to the current label of an unsettled vertex, the parent
//! with the smaller id wins; in-neighbor lists are sorted by tail id, so
//! that is also the smaller local index.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::graph::{Graph, Spt, VertexId};

pub const UNREACHABLE: u64 = u64::MAX;

/// Reusable scratch space for repeated runs on one graph.
#[derive(Debug, Default)]
pub struct Workspace {
    dist: Vec<u64>,
    settled: Vec<bool>,
    heap: BinaryHeap<Reverse<(u64, VertexId)>>,
}

impl Workspace {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.vertex_count();
        Workspace {
            dist: vec![UNREACHABLE; n],
            settled: vec![false; n],
            heap: BinaryHeap::with_capacity(n),
        }
    }

    /// Distances left behind by the most recent run.
    pub fn distances(&self) -> &[u64] {
        &self.dist
    }

    /// Runs Dijkstra from `source`, writing local parent indices into
    /// `last_move` (length `vertex_count`).
    pub fn run(&mut self, graph: &Graph, source: VertexId, last_move: &mut [u8]) {
        let n = graph.vertex_count();
        assert_eq!(last_move.len(), n);
        if self.dist.len() != n {
            *self = Workspace::new(graph);
        } else {
            self.dist.fill(UNREACHABLE);
            self.settled.fill(false);
        }
        last_move.fill(0);
        self.heap.clear();

        let dist = &mut self.dist;
        let settled = &mut self.settled;
        dist[source as usize] = 0;
        self.heap.push(Reverse((0, source)));
        while let Some(Reverse((d, u))) = self.heap.pop() {
            if settled[u as usize] {
                continue;
            }
            settled[u as usize] = true;
            for e in graph.out_edges(u) {
                let h = e.head as usize;
                if settled[h] {
                    continue;
                }
                let nd = d + e.weight as u64;
                if nd < dist[h] {
                    dist[h] = nd;
                    last_move[h] = e.local;
                    self.heap.push(Reverse((nd, e.head)));
                } else if nd == dist[h] && e.local < last_move[h] {
                    last_move[h] = e.local;
                }
            }
        }
        last_move[source as usize] = 0;
    }
}

pub fn dijkstra_spt(graph: &Graph, source: VertexId) -> Spt {
    let mut ws = Workspace::new(graph);
    let mut last_move = vec![0u8; graph.vertex_count()];
    ws.run(graph, source, &mut last_move);
    Spt { source, last_move }
}

/// Shortest distances from `source`; `None` where unreachable.
pub fn distances(graph: &Graph, source: VertexId) -> Vec<Option<u64>> {
    let mut ws = Workspace::new(graph);
    let mut scratch = vec![0u8; graph.vertex_count()];
    ws.run(graph, source, &mut scratch);
    ws.dist
        .iter()
        .map(|&d| (d != UNREACHABLE).then_some(d))
        .collect()
}

/// Computes the tree of every source in `sources` and hands each one to
/// `sink` in source order.
///
/// With `threads > 1` trees are computed on a rayon pool in bounded
/// batches and delivered in order; the delivered sequence is identical for
/// any thread count. A sink error stops the sweep.
pub fn apsp_sweep<E, F>(graph: &Graph, sources: &[VertexId], threads: usize, mut sink: F) -> Result<(), E>
where
    F: FnMut(Spt) -> Result<(), E>,
{
    if threads <= 1 || sources.len() <= 1 {
        let mut ws = Workspace::new(graph);
        for &s in sources {
            let mut last_move = vec![0u8; graph.vertex_count()];
            ws.run(graph, s, &mut last_move);
            sink(Spt { source: s, last_move })?;
        }
        return Ok(());
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build thread pool");
    let batch = threads * 4;
    for chunk in sources.chunks(batch) {
        let trees: Vec<Spt> = pool.install(|| {
            chunk
                .par_iter()
                .map_init(
                    || Workspace::new(graph),
                    |ws, &s| {
                        let mut last_move = vec![0u8; graph.vertex_count()];
                        ws.run(graph, s, &mut last_move);
                        Spt { source: s, last_move }
                    },
                )
                .collect()
        });
        for spt in trees {
            sink(spt)?;
        }
    }
    Ok(())
}

/// Resolves a thread count: `0` means every available core.
pub fn effective_threads(requested: usize) -> usize {
    if requested == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        requested
    }
}
