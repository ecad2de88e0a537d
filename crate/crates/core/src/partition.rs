//! Spatial regions and dictionary chains.
//!
//! Real vertices are clustered with k-means on their coordinates into
//! `round(c * sqrt(|V|))` regions. Each region's root is the member closest
//! to the region's mean coordinate, and its tree is the region dictionary.
//! With a finite `len_to_dic = d`, a vertex instead uses the tree of its
//! ancestor `d` steps up the root's tree, as long as that walk stays inside
//! the region.

use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Spt, VertexId};
use crate::sssp;

const KMEANS_ITERATIONS: usize = 25;

/// Tree distance between a vertex and the vertex whose tree it is
/// compressed against. `None` is infinity (one-step compression).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LenToDic(Option<NonZeroU32>);

impl LenToDic {
    pub const INFINITE: LenToDic = LenToDic(None);

    pub fn finite(d: u32) -> Result<Self> {
        NonZeroU32::new(d)
            .map(|d| LenToDic(Some(d)))
            .ok_or_else(|| Error::InvalidArgument("len-to-dic must be at least 1".into()))
    }

    pub fn get(self) -> Option<u32> {
        self.0.map(NonZeroU32::get)
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_none()
    }

    /// Header encoding: 0 is infinity.
    pub fn to_raw(self) -> u32 {
        self.get().unwrap_or(0)
    }

    pub fn from_raw(raw: u32) -> Self {
        LenToDic(NonZeroU32::new(raw))
    }
}

impl fmt::Display for LenToDic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(d) => write!(f, "{d}"),
            None => f.write_str("inf"),
        }
    }
}

impl FromStr for LenToDic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(LenToDic::INFINITE);
        }
        let d: u32 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad len-to-dic `{s}`")))?;
        LenToDic::finite(d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPlan {
    pub region_count: usize,
    pub region_of: Vec<u32>,
    pub root_of: Vec<VertexId>,
    /// `None` means the region dictionary is used directly.
    pub dict_parent: Vec<Option<VertexId>>,
    /// Number of compressed ancestors that must be expanded first.
    pub depth: Vec<u32>,
    pub len_to_dic: LenToDic,
    pub seed: u64,
}

impl RegionPlan {
    pub fn vertex_count(&self) -> usize {
        self.region_of.len()
    }

    pub fn is_root(&self, v: VertexId) -> bool {
        self.root_of[self.region_of[v as usize] as usize] == v
    }

    /// Decompression passes needed to answer a query for `v`.
    pub fn passes(&self, v: VertexId) -> u32 {
        if self.is_root(v) {
            0
        } else {
            self.depth[v as usize] + 1
        }
    }

    pub fn members(&self, region: u32) -> impl Iterator<Item = VertexId> + '_ {
        self.region_of
            .iter()
            .enumerate()
            .filter(move |(_, &r)| r == region)
            .map(|(v, _)| v as VertexId)
    }

    pub fn check(&self, graph: &Graph) -> Result<()> {
        let n = graph.vertex_count();
        let bad = |m: String| Err(Error::PlanMismatch(m));
        if self.region_of.len() != n || self.dict_parent.len() != n || self.depth.len() != n {
            return bad(format!("plan covers {} vertices, graph has {n}", self.region_of.len()));
        }
        if self.root_of.len() != self.region_count {
            return bad("root table size differs from region count".into());
        }
        if self.region_of.iter().any(|&r| r as usize >= self.region_count) {
            return bad("region index out of range".into());
        }
        for (r, &root) in self.root_of.iter().enumerate() {
            if root as usize >= n || self.region_of[root as usize] as usize != r {
                return bad(format!("root {root} does not lie in region {r}"));
            }
        }
        for (v, p) in self.dict_parent.iter().enumerate() {
            if let Some(p) = *p {
                if p as usize >= n || self.region_of[p as usize] != self.region_of[v] {
                    return bad(format!("dictionary parent of {v} leaves its region"));
                }
                if self.depth[v] != self.depth[p as usize] + 1 {
                    return bad(format!("depth of {v} is inconsistent with its parent"));
                }
            } else if self.depth[v] != 0 {
                return bad(format!("vertex {v} uses the region dictionary but has depth {}", self.depth[v]));
            }
        }
        Ok(())
    }
}

/// `max(1, round(c * sqrt(n)))`, capped at `n`.
pub fn region_count_for(c: f64, vertex_count: usize) -> usize {
    let k = (c * (vertex_count as f64).sqrt()).round();
    (k.max(1.0) as usize).min(vertex_count.max(1))
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    dx * dx + dy * dy
}

fn nearest(p: (f64, f64), centers: &[(f64, f64)]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, &c) in centers.iter().enumerate() {
        let d = dist2(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// k-means on real vertices; virtual vertices inherit their origin's region.
pub fn kmeans_partition(graph: &Graph, c: f64, seed: u64) -> Result<(Vec<u32>, usize)> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("region factor must be positive, got {c}")));
    }
    let coords = graph.coords().ok_or(Error::MissingCoordinates)?;
    let n_real = graph.original_vertex_count();
    let k = region_count_for(c, n_real);
    let points: Vec<(f64, f64)> = coords[..n_real]
        .iter()
        .map(|&(x, y)| (x as f64, y as f64))
        .collect();
    let assign = kmeans(&points, k, seed);

    let mut region_of = Vec::with_capacity(graph.vertex_count());
    region_of.extend(assign.iter().map(|&a| a as u32));
    for v in n_real..graph.vertex_count() {
        region_of.push(region_of[graph.origin(v as VertexId) as usize]);
    }
    Ok((region_of, k))
}

/// Lloyd's algorithm with k-means++ seeding. Returns a cluster per point;
/// every cluster is non-empty when `k <= points.len()`.
fn kmeans(points: &[(f64, f64)], k: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    if k <= 1 {
        return vec![0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = Vec::with_capacity(k);
    centers.push(points[rng.gen_range(0..n)]);
    let mut d2: Vec<f64> = points.iter().map(|&p| dist2(p, centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if r < w {
                    chosen = i;
                    break;
                }
                r -= w;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        let c = points[pick];
        centers.push(c);
        for (d, &p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, c));
        }
    }

    let mut assign = vec![usize::MAX; n];
    let mut dist = vec![0.0f64; n];
    for _ in 0..KMEANS_ITERATIONS {
        let mut changed = false;
        for (i, &p) in points.iter().enumerate() {
            let (c, d) = nearest(p, &centers);
            dist[i] = d;
            if assign[i] != c {
                assign[i] = c;
                changed = true;
            }
        }
        changed |= fill_empty_clusters(points, &mut assign, &mut dist, &mut centers);
        if !changed {
            break;
        }
        let mut sums = vec![(0.0f64, 0.0f64, 0usize); k];
        for (i, &p) in points.iter().enumerate() {
            let s = &mut sums[assign[i]];
            s.0 += p.0;
            s.1 += p.1;
            s.2 += 1;
        }
        for (c, s) in centers.iter_mut().zip(&sums) {
            if s.2 > 0 {
                *c = (s.0 / s.2 as f64, s.1 / s.2 as f64);
            }
        }
    }
    fill_empty_clusters(points, &mut assign, &mut dist, &mut centers);
    assign
}

/// Moves the point farthest from its center into each empty cluster.
fn fill_empty_clusters(
    points: &[(f64, f64)],
    assign: &mut [usize],
    dist: &mut [f64],
    centers: &mut [(f64, f64)],
) -> bool {
    let k = centers.len();
    let mut sizes = vec![0usize; k];
    for &a in assign.iter() {
        sizes[a] += 1;
    }
    let mut moved = false;
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut far: Option<usize> = None;
        for i in 0..points.len() {
            if sizes[assign[i]] > 1 && far.is_none_or(|f| dist[i] > dist[f]) {
                far = Some(i);
            }
        }
        let Some(i) = far else { break };
        sizes[assign[i]] -= 1;
        sizes[empty] = 1;
        assign[i] = empty;
        dist[i] = 0.0;
        centers[empty] = points[i];
        moved = true;
    }
    moved
}

/// Root of each region: the real member nearest the members' mean
/// coordinate, smaller id on ties.
pub fn choose_roots(graph: &Graph, region_of: &[u32], region_count: usize) -> Vec<VertexId> {
    let n_real = graph.original_vertex_count();
    let coords = graph.coords();
    let pos = |v: usize| -> (f64, f64) {
        coords.map_or((0.0, 0.0), |c| (c[v].0 as f64, c[v].1 as f64))
    };
    let mut sums = vec![(0.0f64, 0.0f64, 0usize); region_count];
    for v in 0..n_real {
        let p = pos(v);
        let s = &mut sums[region_of[v] as usize];
        s.0 += p.0;
        s.1 += p.1;
        s.2 += 1;
    }
    let means: Vec<(f64, f64)> = sums
        .iter()
        .map(|s| (s.0 / s.2.max(1) as f64, s.1 / s.2.max(1) as f64))
        .collect();
    let mut best: Vec<Option<(f64, VertexId)>> = vec![None; region_count];
    for (v, &r) in region_of.iter().enumerate().take(n_real) {
        let r = r as usize;
        let d = dist2(pos(v), means[r]);
        if best[r].is_none_or(|(bd, _)| d < bd) {
            best[r] = Some((d, v as VertexId));
        }
    }
    best.into_iter()
        .enumerate()
        .map(|(r, b)| b.unwrap_or_else(|| panic!("region {r} has no real member")).1)
        .collect()
}

/// Predecessor of `v` in `spt`, skipping over virtual vertices.
fn real_parent(graph: &Graph, spt: &Spt, reachable: &[bool], v: VertexId) -> Option<VertexId> {
    if !reachable[v as usize] {
        return None;
    }
    let mut p = spt.parent(graph, v)?;
    while graph.is_virtual(p) {
        p = spt.parent(graph, p)?;
    }
    Some(p)
}

pub fn assign_dict_parents(
    graph: &Graph,
    region_of: &[u32],
    root_of: &[VertexId],
    root_spts: &[Spt],
    len_to_dic: LenToDic,
    seed: u64,
) -> RegionPlan {
    let n = graph.vertex_count();
    let n_real = graph.original_vertex_count();
    let mut dict_parent: Vec<Option<VertexId>> = vec![None; n];

    if let Some(d) = len_to_dic.get() {
        for (r, (&root, spt)) in root_of.iter().zip(root_spts).enumerate() {
            debug_assert_eq!(spt.source, root);
            let r = r as u32;
            let reachable = graph.reachable_from(root);
            for v in 0..n_real as VertexId {
                if region_of[v as usize] != r || v == root {
                    continue;
                }
                let mut cur = v;
                let mut target = None;
                for step in 1..=d {
                    match real_parent(graph, spt, &reachable, cur) {
                        Some(p) if p != root && region_of[p as usize] == r => {
                            cur = p;
                            if step == d {
                                target = Some(p);
                            }
                        }
                        _ => break,
                    }
                }
                dict_parent[v as usize] = target;
            }
        }
    }

    // virtual vertices share their origin's dictionary
    for v in n_real..n {
        let o = graph.origin(v as VertexId) as usize;
        dict_parent[v] = dict_parent[o];
    }

    let depth = chain_depths(&dict_parent);
    RegionPlan {
        region_count: root_of.len(),
        region_of: region_of.to_vec(),
        root_of: root_of.to_vec(),
        dict_parent,
        depth,
        len_to_dic,
        seed,
    }
}

fn chain_depths(dict_parent: &[Option<VertexId>]) -> Vec<u32> {
    const UNSET: u32 = u32::MAX;
    let mut depth = vec![UNSET; dict_parent.len()];
    let mut stack = Vec::new();
    for v in 0..dict_parent.len() {
        let mut cur = v;
        while depth[cur] == UNSET {
            match dict_parent[cur] {
                None => {
                    depth[cur] = 0;
                    break;
                }
                Some(p) => {
                    stack.push(cur);
                    cur = p as usize;
                }
            }
        }
        while let Some(u) = stack.pop() {
            depth[u] = depth[dict_parent[u].unwrap() as usize] + 1;
        }
    }
    depth
}

/// Partition, roots and dictionary chains in one call.
pub fn plan_regions(
    graph: &Graph,
    c: f64,
    len_to_dic: LenToDic,
    seed: u64,
    threads: usize,
) -> Result<RegionPlan> {
    let (region_of, region_count) = kmeans_partition(graph, c, seed)?;
    let root_of = choose_roots(graph, &region_of, region_count);
    let mut root_spts = Vec::new();
    if !len_to_dic.is_infinite() {
        sssp::apsp_sweep::<(), _>(graph, &root_of, threads, |s| {
            root_spts.push(s);
            Ok(())
        })
        .expect("infallible sink");
    } else {
        root_spts = root_of
            .iter()
            .map(|&r| Spt {
                source: r,
                last_move: Vec::new(),
            })
            .collect();
    }
    Ok(assign_dict_parents(
        graph,
        &region_of,
        &root_of,
        &root_spts,
        len_to_dic,
        seed,
    ))
}

/// Every vertex in a single region.
pub fn single_region_plan(graph: &Graph, root: VertexId, len_to_dic: LenToDic, seed: u64) -> RegionPlan {
    let region_of = vec![0u32; graph.vertex_count()];
    let spt = if len_to_dic.is_infinite() {
        Spt {
            source: root,
            last_move: Vec::new(),
        }
    } else {
        sssp::dijkstra_spt(graph, root)
    };
    assign_dict_parents(graph, &region_of, &[root], &[spt], len_to_dic, seed)
}
