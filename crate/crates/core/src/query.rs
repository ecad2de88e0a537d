//! Single-source queries against an archive, plus the timing harness.

use std::hint::black_box;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::archive::ArchiveReader;
use crate::codec::expand_into;
use crate::error::{Error, Result};
use crate::graph::{to_global, Graph, Spt, VertexId};
use crate::sssp;

/// Reusable scratch for queries: two alternating length-|V| buffers, the
/// chain being resolved, and a buffer for file-backed reads.
#[derive(Debug, Default)]
pub struct QueryContext {
    current: Vec<u8>,
    next: Vec<u8>,
    chain: Vec<VertexId>,
    scratch: Vec<u8>,
}

impl QueryContext {
    pub fn new(vertex_count: usize) -> Self {
        QueryContext {
            current: vec![0; vertex_count],
            next: vec![0; vertex_count],
            chain: Vec::new(),
            scratch: Vec::new(),
        }
    }

    fn resolve_chain(&mut self, reader: &ArchiveReader, v: VertexId) {
        self.chain.clear();
        let mut cur = Some(v);
        while let Some(u) = cur {
            self.chain.push(u);
            cur = reader.dict_parent(u);
        }
    }
}

/// Last-move table of `v`, borrowed from `ctx` (or straight from the
/// dictionary when `v` is a root).
pub fn query_into<'a>(reader: &'a ArchiveReader, v: VertexId, ctx: &'a mut QueryContext) -> Result<&'a [u8]> {
    let v = reader.check_vertex(v as u64)?;
    let region = reader.region_of(v);
    let dictionary = reader.dictionary(region);
    if reader.is_root(v) {
        return Ok(dictionary);
    }
    let n = reader.vertex_count();
    ctx.current.resize(n, 0);
    ctx.next.resize(n, 0);
    ctx.resolve_chain(reader, v);

    let mut first = true;
    for i in (0..ctx.chain.len()).rev() {
        let u = ctx.chain[i];
        let bytes = reader.stream_bytes_of(u, &mut ctx.scratch)?;
        let source: &[u8] = if first { dictionary } else { &ctx.current };
        expand_into(bytes, source, &mut ctx.next)
            .map_err(|e| Error::Corrupt(format!("record of vertex {u}: {e}")))?;
        std::mem::swap(&mut ctx.current, &mut ctx.next);
        first = false;
    }
    Ok(&ctx.current)
}

pub fn query_spt(reader: &ArchiveReader, v: VertexId) -> Result<Spt> {
    let mut ctx = QueryContext::new(reader.vertex_count());
    let last_move = query_into(reader, v, &mut ctx)?.to_vec();
    Ok(Spt { source: v, last_move })
}

/// Predecessor ids over the original vertices.
pub fn query_global(reader: &ArchiveReader, graph: &Graph, v: VertexId) -> Result<Vec<Option<VertexId>>> {
    check_graph(reader, graph)?;
    Ok(to_global(&query_spt(reader, v)?, graph))
}

pub fn check_graph(reader: &ArchiveReader, graph: &Graph) -> Result<()> {
    if reader.vertex_count() != graph.vertex_count() || reader.original_vertex_count() != graph.original_vertex_count() {
        return Err(Error::PlanMismatch(format!(
            "archive has {} vertices ({} original), graph has {} ({})",
            reader.vertex_count(),
            reader.original_vertex_count(),
            graph.vertex_count(),
            graph.original_vertex_count()
        )));
    }
    Ok(())
}

/// Chain resolution and record fetch only; returns the bytes fetched.
pub fn lookup(reader: &ArchiveReader, v: VertexId, ctx: &mut QueryContext) -> Result<usize> {
    ctx.resolve_chain(reader, v);
    let mut total = 0;
    for i in 0..ctx.chain.len() {
        let u = ctx.chain[i];
        if !reader.is_root(u) {
            total += reader.stream_bytes_of(u, &mut ctx.scratch)?.len();
        }
    }
    Ok(total)
}

/// Summary statistics in microseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub name: String,
    pub queries: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub p99_us: f64,
}

impl Timing {
    pub fn from_samples(name: &str, samples: &mut [Duration]) -> Self {
        samples.sort_unstable();
        let us = |d: Duration| d.as_secs_f64() * 1e6;
        let n = samples.len();
        let mean = if n == 0 {
            0.0
        } else {
            samples.iter().map(|&d| us(d)).sum::<f64>() / n as f64
        };
        let pick = |q: f64| {
            if n == 0 {
                0.0
            } else {
                us(samples[((n as f64 * q).ceil() as usize).clamp(1, n) - 1])
            }
        };
        Timing {
            name: name.to_string(),
            queries: n,
            mean_us: mean,
            median_us: if n == 0 {
                0.0
            } else if n % 2 == 1 {
                us(samples[n / 2])
            } else {
                (us(samples[n / 2 - 1]) + us(samples[n / 2])) / 2.0
            },
            p99_us: pick(0.99),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub queries: usize,
    pub warmup: usize,
    pub seed: u64,
    pub loop_copy: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            queries: 1000,
            warmup: 100,
            seed: 0,
            loop_copy: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub vertex_count: usize,
    pub rows: Vec<Timing>,
}

pub const SPLZ: &str = "splz";
pub const SPLZ_LOOKUP: &str = "splz-lookup";
pub const BULK_COPY: &str = "bulk-copy";
pub const LOOP_COPY: &str = "loop-copy";
pub const DIJKSTRA: &str = "dijkstra";

impl BenchReport {
    pub fn row(&self, name: &str) -> Option<&Timing> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Mean latency of `name` relative to the bulk-copy baseline.
    pub fn ratio_to_bulk_copy(&self, name: &str) -> Option<f64> {
        let base = self.row(BULK_COPY)?.mean_us;
        Some(self.row(name)?.mean_us / base)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["name", "queries", "vertex_count", "mean_us", "median_us", "p99_us", "ratio_to_bulk_copy"])?;
        for r in &self.rows {
            let ratio = self.ratio_to_bulk_copy(&r.name).unwrap_or(f64::NAN);
            out.write_record([
                r.name.clone(),
                r.queries.to_string(),
                self.vertex_count.to_string(),
                format!("{:.3}", r.mean_us),
                format!("{:.3}", r.median_us),
                format!("{:.3}", r.p99_us),
                format!("{ratio:.3}"),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Uniformly random query sources over the original vertices.
pub fn random_sources(reader: &ArchiveReader, count: usize, seed: u64) -> Vec<VertexId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = reader.original_vertex_count() as VertexId;
    (0..count).map(|_| rng.gen_range(0..n)).collect()
}

fn time_each<F: FnMut(VertexId) -> Result<()>>(
    sources: &[VertexId],
    warmup: usize,
    mut f: F,
) -> Result<Vec<Duration>> {
    for &s in sources.iter().cycle().take(warmup.min(sources.len() * 4)) {
        f(s)?;
    }
    let mut samples = Vec::with_capacity(sources.len());
    for &s in sources {
        let t = Instant::now();
        f(s)?;
        samples.push(t.elapsed());
    }
    Ok(samples)
}

/// Times queries against the copy baselines and, when `graph` is given,
/// against a fresh Dijkstra per source.
pub fn bench(reader: &ArchiveReader, graph: Option<&Graph>, options: &BenchOptions) -> Result<BenchReport> {
    if let Some(g) = graph {
        check_graph(reader, g)?;
    }
    let n = reader.vertex_count();
    let sources = random_sources(reader, options.queries, options.seed);
    let mut rows = Vec::new();

    let mut ctx = QueryContext::new(n);
    let mut samples = time_each(&sources, options.warmup, |v| {
        black_box(query_into(reader, v, &mut ctx)?);
        Ok(())
    })?;
    rows.push(Timing::from_samples(SPLZ, &mut samples));

    let mut samples = time_each(&sources, options.warmup, |v| {
        black_box(lookup(reader, v, &mut ctx)?);
        Ok(())
    })?;
    rows.push(Timing::from_samples(SPLZ_LOOKUP, &mut samples));

    let src: Vec<u8> = (0..n).map(|i| (i % 16) as u8).collect();
    let mut dst = vec![0u8; n];
    let mut samples = time_each(&sources, options.warmup, |_| {
        dst.copy_from_slice(black_box(&src));
        black_box(&mut dst);
        Ok(())
    })?;
    rows.push(Timing::from_samples(BULK_COPY, &mut samples));

    if options.loop_copy {
        let mut samples = time_each(&sources, options.warmup, |_| {
            let s = black_box(&src);
            for i in 0..n {
                // SAFETY: both indices are in bounds of equally sized buffers.
                unsafe {
                    let b = std::ptr::read_volatile(s.as_ptr().add(i));
                    std::ptr::write_volatile(dst.as_mut_ptr().add(i), b);
                }
            }
            Ok(())
        })?;
        rows.push(Timing::from_samples(LOOP_COPY, &mut samples));
    }

    if let Some(g) = graph {
        let mut ws = sssp::Workspace::new(g);
        let mut last_move = vec![0u8; n];
        let mut samples = time_each(&sources, options.warmup.min(10), |v| {
            ws.run(g, v, &mut last_move);
            black_box(&last_move);
            Ok(())
        })?;
        rows.push(Timing::from_samples(DIJKSTRA, &mut samples));
    }

    Ok(BenchReport { vertex_count: n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_statistics() {
        let mut s: Vec<Duration> = (1..=100).map(Duration::from_micros).collect();
        let t = Timing::from_samples("x", &mut s);
        assert_eq!(t.queries, 100);
        assert!((t.mean_us - 50.5).abs() < 1e-9);
        assert!((t.median_us - 50.5).abs() < 1e-9);
        assert!((t.p99_us - 99.0).abs() < 1e-9);
    }

    #[test]
    fn empty_timing_is_zero() {
        let t = Timing::from_samples("x", &mut []);
        assert_eq!((t.mean_us, t.median_us, t.p99_us), (0.0, 0.0, 0.0));
    }
}
