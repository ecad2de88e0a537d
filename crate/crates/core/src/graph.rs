//! Road-network model: DIMACS parsing, normalization to a graph whose
//! in-neighbor lists fit a 4-bit local index, and conversion between
//! global predecessor arrays and last-move tables.

use std::collections::{BTreeMap, VecDeque};
use std::io::BufRead;

use crate::error::{Error, Result};

pub type VertexId = u32;

/// Largest in-degree a normalized vertex may have. Local indices 0..=15
/// fill the literal nibble exactly.
pub const MAX_IN_DEGREE: usize = 16;

/// Graph exactly as read from disk, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawGraph {
    pub vertex_count: usize,
    /// `(tail, head, weight)`
    pub edges: Vec<(VertexId, VertexId, u32)>,
    pub coords: Option<Vec<(i64, i64)>>,
}

impl RawGraph {
    pub fn new(vertex_count: usize) -> Self {
        RawGraph {
            vertex_count,
            edges: Vec::new(),
            coords: None,
        }
    }

    pub fn add_edge(&mut self, tail: VertexId, head: VertexId, weight: u32) {
        self.edges.push((tail, head, weight));
    }

    /// Adds `a -> b` and `b -> a` with the same weight.
    pub fn add_undirected(&mut self, a: VertexId, b: VertexId, weight: u32) {
        self.edges.push((a, b, weight));
        self.edges.push((b, a, weight));
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count as u64;
        for &(t, h, _) in &self.edges {
            if t as u64 >= n || h as u64 >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({t}, {h}) outside [0, {n})"
                )));
            }
        }
        if let Some(coords) = &self.coords {
            if coords.len() != self.vertex_count {
                return Err(Error::LengthMismatch {
                    expected: self.vertex_count,
                    actual: coords.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InEdge {
    pub tail: VertexId,
    pub weight: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutEdge {
    pub head: VertexId,
    pub weight: u32,
    /// Position of the tail inside the head's in-neighbor list.
    pub local: u8,
}

/// Normalized graph. Immutable once built; every in-neighbor list is sorted
/// by tail id and holds at most [`MAX_IN_DEGREE`] entries.
#[derive(Debug, Clone)]
pub struct Graph {
    out_offsets: Vec<u32>,
    out_edges: Vec<OutEdge>,
    in_offsets: Vec<u32>,
    in_edges: Vec<InEdge>,
    origin: Vec<VertexId>,
    original_vertex_count: usize,
    coords: Option<Vec<(i64, i64)>>,
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.origin.len()
    }

    /// Number of vertices before virtual vertices were added.
    pub fn original_vertex_count(&self) -> usize {
        self.original_vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.len()
    }

    #[inline]
    pub fn out_edges(&self, v: VertexId) -> &[OutEdge] {
        let v = v as usize;
        &self.out_edges[self.out_offsets[v] as usize..self.out_offsets[v + 1] as usize]
    }

    #[inline]
    pub fn in_edges(&self, v: VertexId) -> &[InEdge] {
        let v = v as usize;
        &self.in_edges[self.in_offsets[v] as usize..self.in_offsets[v + 1] as usize]
    }

    pub fn local_index(&self, tail: VertexId, head: VertexId) -> Option<u8> {
        self.in_edges(head)
            .binary_search_by_key(&tail, |e| e.tail)
            .ok()
            .map(|i| i as u8)
    }

    /// Tail of the `local`-th in-edge of `v`.
    #[inline]
    pub fn in_neighbor(&self, v: VertexId, local: u8) -> Option<VertexId> {
        self.in_edges(v).get(local as usize).map(|e| e.tail)
    }

    pub fn origin(&self, v: VertexId) -> VertexId {
        self.origin[v as usize]
    }

    pub fn is_virtual(&self, v: VertexId) -> bool {
        v as usize >= self.original_vertex_count
    }

    pub fn virtual_count(&self) -> usize {
        self.vertex_count() - self.original_vertex_count
    }

    /// Per-vertex coordinates; virtual vertices carry their origin's.
    pub fn coords(&self) -> Option<&[(i64, i64)]> {
        self.coords.as_deref()
    }

    /// Flattens back to an edge list over all (real and virtual) vertices.
    pub fn to_raw(&self) -> RawGraph {
        let mut raw = RawGraph::new(self.vertex_count());
        for t in 0..self.vertex_count() as VertexId {
            for e in self.out_edges(t) {
                raw.add_edge(t, e.head, e.weight);
            }
        }
        raw.coords = self.coords.clone();
        raw
    }

    /// Vertices reachable from `source` following out-edges.
    pub fn reachable_from(&self, source: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::new();
        seen[source as usize] = true;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for e in self.out_edges(u) {
                if !seen[e.head as usize] {
                    seen[e.head as usize] = true;
                    queue.push_back(e.head);
                }
            }
        }
        seen
    }

    pub fn check_vertex(&self, v: u64) -> Result<VertexId> {
        if v < self.vertex_count() as u64 {
            Ok(v as VertexId)
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            })
        }
    }
}

/// Last-move table for one source: entry `v` is the local index of `v`'s
/// predecessor within `v`'s in-neighbor list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Spt {
    pub source: VertexId,
    pub last_move: Vec<u8>,
}

impl Spt {
    /// Predecessor of `v` as a vertex id, `None` for the source.
    pub fn parent(&self, graph: &Graph, v: VertexId) -> Option<VertexId> {
        if v == self.source {
            return None;
        }
        graph.in_neighbor(v, self.last_move[v as usize])
    }
}

struct LineReader<R> {
    inner: R,
    file: &'static str,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> LineReader<R> {
    fn new(inner: R, file: &'static str) -> Self {
        LineReader {
            inner,
            file,
            line_no: 0,
            buf: String::new(),
        }
    }

    /// Next non-comment, non-blank line.
    fn next_line(&mut self) -> Result<Option<(usize, &str)>> {
        loop {
            self.buf.clear();
            if self.inner.read_line(&mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let t = self.buf.trim();
            if t.is_empty() || t.starts_with('c') {
                continue;
            }
            return Ok(Some((self.line_no, self.buf.trim())));
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            file: self.file,
            line: self.line_no,
            message: message.into(),
        }
    }
}

fn parse_field<T: std::str::FromStr>(
    tok: Option<&str>,
    what: &str,
    line: usize,
    file: &'static str,
) -> Result<T> {
    tok.and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
        file,
        line,
        message: format!("expected {what}"),
    })
}

/// Reads a DIMACS `.gr` file (`p sp n m` header, `a u v w` arcs).
pub fn parse_gr<R: BufRead>(reader: R) -> Result<RawGraph> {
    const FILE: &str = ".gr";
    let mut lines = LineReader::new(reader, FILE);
    let mut graph: Option<RawGraph> = None;
    let mut declared_arcs = 0usize;
    while let Some((line_no, line)) = lines.next_line()? {
        let mut toks = line.split_ascii_whitespace();
        match toks.next() {
            Some("p") => {
                if graph.is_some() {
                    return Err(lines.err("duplicate problem line"));
                }
                if toks.next() != Some("sp") {
                    return Err(lines.err("expected `p sp <n> <m>`"));
                }
                let n: usize = parse_field(toks.next(), "vertex count", line_no, FILE)?;
                declared_arcs = parse_field(toks.next(), "arc count", line_no, FILE)?;
                let mut g = RawGraph::new(n);
                g.edges.reserve(declared_arcs);
                graph = Some(g);
            }
            Some("a") => {
                let Some(g) = graph.as_mut() else {
                    return Err(lines.err("arc before problem line"));
                };
                let u: u64 = parse_field(toks.next(), "tail id", line_no, FILE)?;
                let v: u64 = parse_field(toks.next(), "head id", line_no, FILE)?;
                let w: u32 = parse_field(toks.next(), "non-negative weight", line_no, FILE)?;
                let n = g.vertex_count as u64;
                for id in [u, v] {
                    if id == 0 || id > n {
                        return Err(lines.err(format!("vertex id {id} outside [1, {n}]")));
                    }
                }
                g.edges.push(((u - 1) as VertexId, (v - 1) as VertexId, w));
            }
            _ => return Err(lines.err("unrecognized line")),
        }
    }
    let graph = graph.ok_or_else(|| lines.err("missing problem line"))?;
    if graph.edges.len() != declared_arcs {
        return Err(lines.err(format!(
            "header declares {declared_arcs} arcs, found {}",
            graph.edges.len()
        )));
    }
    Ok(graph)
}

/// Reads a DIMACS `.co` file (`v id x y` lines) for `vertex_count` vertices.
pub fn parse_co<R: BufRead>(reader: R, vertex_count: usize) -> Result<Vec<(i64, i64)>> {
    const FILE: &str = ".co";
    let mut lines = LineReader::new(reader, FILE);
    let mut coords: Vec<Option<(i64, i64)>> = vec![None; vertex_count];
    while let Some((line_no, line)) = lines.next_line()? {
        let mut toks = line.split_ascii_whitespace();
        match toks.next() {
            Some("p") => {
                // `p aux sp co <n>`
                let count = toks.last().and_then(|s| s.parse::<usize>().ok());
                if count != Some(vertex_count) {
                    return Err(lines.err(format!(
                        "coordinate header does not declare {vertex_count} vertices"
                    )));
                }
            }
            Some("v") => {
                let id: u64 = parse_field(toks.next(), "vertex id", line_no, FILE)?;
                let x: i64 = parse_field(toks.next(), "x coordinate", line_no, FILE)?;
                let y: i64 = parse_field(toks.next(), "y coordinate", line_no, FILE)?;
                if id == 0 || id > vertex_count as u64 {
                    return Err(lines.err(format!(
                        "vertex id {id} outside [1, {vertex_count}]"
                    )));
                }
                coords[(id - 1) as usize] = Some((x, y));
            }
            _ => return Err(lines.err("unrecognized line")),
        }
    }
    let end = lines.line_no;
    coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| Error::Parse {
                file: FILE,
                line: end,
                message: format!("no coordinate line for vertex {}", i + 1),
            })
        })
        .collect()
}

pub fn parse_dimacs<G: BufRead, C: BufRead>(gr: G, co: C) -> Result<RawGraph> {
    let mut graph = parse_gr(gr)?;
    graph.coords = Some(parse_co(co, graph.vertex_count)?);
    Ok(graph)
}

/// Writes `raw` back out in DIMACS `.gr` / `.co` form (1-based ids).
pub fn write_dimacs<G: std::io::Write, C: std::io::Write>(
    raw: &RawGraph,
    mut gr: G,
    co: Option<C>,
) -> std::io::Result<()> {
    writeln!(gr, "p sp {} {}", raw.vertex_count, raw.edges.len())?;
    for &(t, h, w) in &raw.edges {
        writeln!(gr, "a {} {} {}", t + 1, h + 1, w)?;
    }
    if let (Some(mut co), Some(coords)) = (co, raw.coords.as_ref()) {
        writeln!(co, "p aux sp co {}", raw.vertex_count)?;
        for (i, (x, y)) in coords.iter().enumerate() {
            writeln!(co, "v {} {} {}", i + 1, x, y)?;
        }
    }
    Ok(())
}

/// Builds the normalized graph.
///
/// Duplicate arcs keep their minimum weight and self-loops are dropped.
/// A vertex with more than [`MAX_IN_DEGREE`] in-neighbors keeps its 15
/// lowest-id tails plus a zero-weight link from a virtual clone; the clone
/// takes over the remaining tails, continuing into further clones when
/// needed. Every clone is linked to its chain neighbor by zero-weight edges
/// in both directions, so distances between real vertices are unchanged.
pub fn normalize(raw: &RawGraph) -> Graph {
    let n = raw.vertex_count;
    let mut best: BTreeMap<(VertexId, VertexId), u32> = BTreeMap::new();
    for &(t, h, w) in &raw.edges {
        if t == h {
            continue;
        }
        best.entry((h, t))
            .and_modify(|cur| *cur = (*cur).min(w))
            .or_insert(w);
    }

    // in-lists keyed by head, tails ascending (BTreeMap order).
    let mut incoming: Vec<Vec<InEdge>> = vec![Vec::new(); n];
    for (&(h, t), &w) in &best {
        incoming[h as usize].push(InEdge { tail: t, weight: w });
    }

    let mut origin: Vec<VertexId> = (0..n as VertexId).collect();
    let mut coords = raw.coords.clone();
    for h in 0..n {
        if incoming[h].len() <= MAX_IN_DEGREE {
            continue;
        }
        let tails = std::mem::take(&mut incoming[h]);
        let mut rest = tails.into_iter();
        let mut kept: Vec<InEdge> = rest.by_ref().take(MAX_IN_DEGREE - 1).collect();
        let mut remaining: Vec<InEdge> = rest.collect();

        let mut prev = h as VertexId;
        let first = origin.len() as VertexId;
        kept.push(InEdge { tail: first, weight: 0 });
        incoming[h] = kept;
        while !remaining.is_empty() {
            let id = origin.len() as VertexId;
            origin.push(h as VertexId);
            if let Some(c) = coords.as_mut() {
                let at = c[h];
                c.push(at);
            }
            // one slot for the link from `prev`, one more if another clone follows
            let room = if remaining.len() > MAX_IN_DEGREE - 1 {
                MAX_IN_DEGREE - 2
            } else {
                MAX_IN_DEGREE - 1
            };
            let take = room.min(remaining.len());
            let mut list: Vec<InEdge> = remaining.drain(..take).collect();
            list.push(InEdge { tail: prev, weight: 0 });
            if !remaining.is_empty() {
                list.push(InEdge { tail: id + 1, weight: 0 });
            }
            list.sort_by_key(|e| e.tail);
            // the link back towards `prev` was added to prev's list already
            incoming.push(list);
            prev = id;
        }
    }

    let total = origin.len();
    let mut in_offsets = Vec::with_capacity(total + 1);
    let mut in_edges = Vec::new();
    in_offsets.push(0u32);
    for list in &incoming {
        debug_assert!(list.len() <= MAX_IN_DEGREE);
        in_edges.extend_from_slice(list);
        in_offsets.push(in_edges.len() as u32);
    }

    let mut outgoing: Vec<Vec<OutEdge>> = vec![Vec::new(); total];
    for (h, list) in incoming.iter().enumerate() {
        for (i, e) in list.iter().enumerate() {
            outgoing[e.tail as usize].push(OutEdge {
                head: h as VertexId,
                weight: e.weight,
                local: i as u8,
            });
        }
    }
    let mut out_offsets = Vec::with_capacity(total + 1);
    let mut out_edges = Vec::with_capacity(in_edges.len());
    out_offsets.push(0u32);
    for list in &outgoing {
        out_edges.extend_from_slice(list);
        out_offsets.push(out_edges.len() as u32);
    }

    Graph {
        out_offsets,
        out_edges,
        in_offsets,
        in_edges,
        origin,
        original_vertex_count: n,
        coords,
    }
}

/// Converts a global predecessor array (over normalized vertices) into a
/// last-move table. `None` entries (source, unreachable) map to 0.
pub fn to_local(global: &[Option<VertexId>], graph: &Graph, source: VertexId) -> Result<Spt> {
    if global.len() != graph.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: graph.vertex_count(),
            actual: global.len(),
        });
    }
    let mut last_move = vec![0u8; global.len()];
    for (v, pred) in global.iter().enumerate() {
        if v as VertexId == source {
            continue;
        }
        if let Some(p) = *pred {
            last_move[v] = graph
                .local_index(p, v as VertexId)
                .ok_or(Error::Inconsistent {
                    vertex: v as VertexId,
                    predecessor: p,
                })?;
        }
    }
    Ok(Spt { source, last_move })
}

/// Converts a last-move table into predecessor ids over the original
/// vertices. Parent chains through virtual vertices report the real
/// predecessor; the source and unreachable vertices report `None`.
pub fn to_global(spt: &Spt, graph: &Graph) -> Vec<Option<VertexId>> {
    let reachable = graph.reachable_from(spt.source);
    let n = graph.original_vertex_count();
    let mut out = vec![None; n];
    for v in 0..n as VertexId {
        if v == spt.source || !reachable[v as usize] {
            continue;
        }
        let mut p = spt.parent(graph, v);
        while let Some(u) = p {
            if !graph.is_virtual(u) || u == spt.source {
                break;
            }
            p = spt.parent(graph, u);
        }
        out[v as usize] = p.filter(|&u| !graph.is_virtual(u));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(spokes: u32) -> RawGraph {
        let mut g = RawGraph::new(spokes as usize + 1);
        for s in 1..=spokes {
            g.add_edge(s, 0, s);
            g.add_edge(0, s, 1);
        }
        g
    }

    #[test]
    fn parses_minimal_file() {
        let gr = "c tiny\np sp 2 1\na 1 2 5\n";
        let co = "p aux sp co 2\nv 1 10 20\nv 2 -3 4\n";
        let g = parse_dimacs(gr.as_bytes(), co.as_bytes()).unwrap();
        assert_eq!(g.vertex_count, 2);
        assert_eq!(g.edges, vec![(0, 1, 5)]);
        assert_eq!(g.coords, Some(vec![(10, 20), (-3, 4)]));
    }

    #[test]
    fn rejects_out_of_range_arc_with_line_number() {
        let gr = "p sp 2 1\na 1 3 5\n";
        match parse_gr(gr.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_header_and_missing_coordinates() {
        assert!(matches!(
            parse_gr("p sp x 1\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_gr("a 1 2 3\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        let err = parse_co("v 1 0 0\n".as_bytes(), 2).unwrap_err();
        assert!(err.to_string().contains("vertex 2"), "{err}");
    }

    #[test]
    fn small_degree_graph_is_unchanged() {
        let mut raw = RawGraph::new(3);
        raw.add_undirected(0, 1, 4);
        raw.add_undirected(1, 2, 4);
        let g = normalize(&raw);
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.virtual_count(), 0);
        assert!((0..3).all(|v| g.origin(v) == v));
        assert_eq!(g.local_index(0, 1), Some(0));
        assert_eq!(g.local_index(2, 1), Some(1));
    }

    #[test]
    fn duplicate_arcs_keep_minimum_weight() {
        let mut raw = RawGraph::new(2);
        raw.add_edge(0, 1, 9);
        raw.add_edge(0, 1, 3);
        raw.add_edge(1, 1, 1);
        let g = normalize(&raw);
        assert_eq!(g.in_edges(1), &[InEdge { tail: 0, weight: 3 }]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn star_with_twenty_spokes_splits_once() {
        let g = normalize(&star(20));
        assert_eq!(g.vertex_count(), 22);
        let virt = 21;
        assert!(g.is_virtual(virt));
        assert_eq!(g.origin(virt), 0);
        let center = g.in_edges(0);
        assert_eq!(center.len(), 16);
        assert_eq!(center[15], InEdge { tail: virt, weight: 0 });
        let tails: Vec<_> = g.in_edges(virt).iter().map(|e| e.tail).collect();
        assert_eq!(tails, vec![0, 16, 17, 18, 19, 20]);
        assert_eq!(g.local_index(0, virt), Some(0));
    }

    #[test]
    fn long_chains_respect_cap() {
        for spokes in [17, 30, 31, 32, 60, 200] {
            let g = normalize(&star(spokes));
            for v in 0..g.vertex_count() as VertexId {
                let list = g.in_edges(v);
                assert!(list.len() <= MAX_IN_DEGREE, "spokes {spokes} vertex {v}");
                assert!(list.windows(2).all(|w| w[0].tail < w[1].tail));
            }
            // every spoke still reaches the center
            let mut real_in = 0;
            for v in 0..g.vertex_count() as VertexId {
                if g.origin(v) == 0 {
                    real_in += g.in_edges(v).iter().filter(|e| !g.is_virtual(e.tail) && e.tail != 0).count();
                }
            }
            assert_eq!(real_in, spokes as usize);
        }
    }

    #[test]
    fn to_local_rejects_non_neighbor() {
        let mut raw = RawGraph::new(3);
        raw.add_edge(0, 1, 1);
        raw.add_edge(1, 2, 1);
        let g = normalize(&raw);
        let err = to_local(&[None, Some(0), Some(0)], &g, 0).unwrap_err();
        assert!(matches!(err, Error::Inconsistent { vertex: 2, predecessor: 0 }));
    }

    #[test]
    fn single_vertex_tables() {
        let g = normalize(&RawGraph::new(1));
        let spt = to_local(&[None], &g, 0).unwrap();
        assert_eq!(spt.last_move, vec![0]);
        assert_eq!(to_global(&spt, &g), vec![None]);
    }

    #[test]
    fn unreachable_vertices_report_no_predecessor() {
        let mut raw = RawGraph::new(3);
        raw.add_edge(0, 1, 1);
        raw.add_edge(2, 1, 1);
        let g = normalize(&raw);
        let spt = to_local(&[None, Some(0), None], &g, 0).unwrap();
        assert_eq!(to_global(&spt, &g), vec![None, Some(0), None]);
    }
}
