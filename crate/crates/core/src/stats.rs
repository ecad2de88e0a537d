//! Similarity and compression-ratio measurements.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::archive::{build_archive, SizeBreakdown};
use crate::codec::{encode_stream, DictIndex};
use crate::error::{Error, Result};
use crate::graph::{Graph, Spt, VertexId};
use crate::partition::{plan_regions, LenToDic};
use crate::sssp;

/// One sampled pair `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilaritySample {
    pub u: VertexId,
    pub v: VertexId,
    /// Real edges on the tree path from `u` to `v` in SPT(u).
    pub path_len: u32,
    /// Fraction of equal last-move entries between SPT(u) and SPT(v).
    pub similarity: f64,
    /// `|V|` over the encoded size of SPT(v) compressed against SPT(u).
    pub compression_ratio: f64,
}

/// Number of real edges on the tree path from the source to `v`, or `None`
/// when `v` is unreachable.
pub fn path_len(graph: &Graph, spt: &Spt, reachable: &[bool], v: VertexId) -> Option<u32> {
    if !reachable[v as usize] {
        return None;
    }
    let mut len = 0;
    let mut cur = v;
    while cur != spt.source {
        let p = spt.parent(graph, cur)?;
        if graph.origin(p) != graph.origin(cur) {
            len += 1;
        }
        cur = p;
    }
    Some(len)
}

pub fn similarity(a: &[u8], b: &[u8]) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    same as f64 / a.len() as f64
}

/// Samples `pairs` ordered pairs of original vertices with `v` reachable
/// from `u`.
pub fn similarity_samples(graph: &Graph, pairs: usize, seed: u64) -> Result<Vec<SimilaritySample>> {
    let n = graph.original_vertex_count();
    if n == 0 || pairs == 0 {
        return Err(Error::InvalidArgument("need at least one vertex and one pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trees: HashMap<VertexId, (Spt, Vec<bool>)> = HashMap::new();
    let mut ws = sssp::Workspace::new(graph);
    let mut tree = |v: VertexId, ws: &mut sssp::Workspace| {
        trees
            .entry(v)
            .or_insert_with(|| {
                let mut last_move = vec![0u8; graph.vertex_count()];
                ws.run(graph, v, &mut last_move);
                (Spt { source: v, last_move }, graph.reachable_from(v))
            })
            .clone()
    };
    let mut out = Vec::with_capacity(pairs);
    let mut attempts = 0usize;
    while out.len() < pairs {
        attempts += 1;
        if attempts > pairs * 100 {
            return Err(Error::InvalidArgument("too few reachable pairs".into()));
        }
        let u = rng.gen_range(0..n) as VertexId;
        let v = rng.gen_range(0..n) as VertexId;
        let (su, reach) = tree(u, &mut ws);
        let Some(len) = path_len(graph, &su, &reach, v) else {
            continue;
        };
        let (sv, _) = tree(v, &mut ws);
        let encoded = encode_stream(&DictIndex::new(&su.last_move)?.compress(&sv.last_move)?)?;
        out.push(SimilaritySample {
            u,
            v,
            path_len: len,
            similarity: similarity(&su.last_move, &sv.last_move),
            compression_ratio: if encoded.is_empty() {
                f64::INFINITY
            } else {
                graph.vertex_count() as f64 / encoded.len() as f64
            },
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    /// Lower bound of the path-length bucket.
    pub path_len: u32,
    pub pairs: usize,
    pub mean_similarity: f64,
    pub mean_compression_ratio: f64,
}

/// Buckets samples by `path_len / bucket_width`.
pub fn similarity_curve(samples: &[SimilaritySample], bucket_width: u32) -> Vec<CurvePoint> {
    let w = bucket_width.max(1);
    let mut buckets: std::collections::BTreeMap<u32, (usize, f64, f64)> = Default::default();
    for s in samples {
        let e = buckets.entry(s.path_len / w * w).or_default();
        e.0 += 1;
        e.1 += s.similarity;
        // infinite ratios (identical trees) are capped at |V| for averaging
        e.2 += s.compression_ratio.min(1e12);
    }
    buckets
        .into_iter()
        .map(|(path_len, (pairs, sim, ratio))| CurvePoint {
            path_len,
            pairs,
            mean_similarity: sim / pairs as f64,
            mean_compression_ratio: ratio / pairs as f64,
        })
        .collect()
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return f64::NAN;
    }
    cov / (va * vb).sqrt()
}

/// Spearman rank correlation with average ranks for ties. `NaN` when either
/// side is constant or the inputs are shorter than two.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    if a.len() < 2 {
        return f64::NAN;
    }
    pearson(&average_ranks(a), &average_ranks(b))
}

pub fn write_similarity_csv<W: Write>(w: W, samples: &[SimilaritySample], metadata: &[(&str, String)]) -> Result<()> {
    let mut w = w;
    for (k, v) in metadata {
        writeln!(w, "# {k}={v}")?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["u", "v", "path_len", "similarity", "compression_ratio"])?;
    for s in samples {
        out.write_record([
            s.u.to_string(),
            s.v.to_string(),
            s.path_len.to_string(),
            format!("{:.6}", s.similarity),
            format!("{:.6}", s.compression_ratio),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub c: f64,
    pub len_to_dic: LenToDic,
    pub region_count: usize,
    pub sizes: SizeBreakdown,
}

impl RatioRow {
    pub fn archive_bytes(&self) -> u64 {
        self.sizes.total()
    }
    pub fn ratio(&self) -> f64 {
        self.sizes.ratio()
    }
}

/// Builds one archive per `(c, d)` combination and records its sizes.
pub fn ratio_sweep(
    graph: &Graph,
    c_values: &[f64],
    d_values: &[LenToDic],
    seed: u64,
    threads: usize,
) -> Result<Vec<RatioRow>> {
    if c_values.is_empty() || d_values.is_empty() {
        return Err(Error::InvalidArgument("empty sweep".into()));
    }
    let mut rows = Vec::new();
    for &c in c_values {
        for &d in d_values {
            let plan = plan_regions(graph, c, d, seed, threads)?;
            let report = build_archive(graph, &plan, threads, std::io::sink())?;
            rows.push(RatioRow {
                c,
                len_to_dic: d,
                region_count: plan.region_count,
                sizes: report.sizes,
            });
        }
    }
    Ok(rows)
}

pub fn write_ratio_csv<W: Write>(w: W, rows: &[RatioRow], metadata: &[(&str, String)]) -> Result<()> {
    let mut w = w;
    for (k, v) in metadata {
        writeln!(w, "# {k}={v}")?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "c",
        "len_to_dic",
        "region_count",
        "archive_bytes",
        "dictionary_bytes",
        "stream_bytes",
        "index_bytes",
        "raw_bytes",
        "ratio",
        "dictionary_proportion",
    ])?;
    for r in rows {
        let s = &r.sizes;
        out.write_record([
            r.c.to_string(),
            r.len_to_dic.to_string(),
            r.region_count.to_string(),
            s.total().to_string(),
            s.dictionary_bytes.to_string(),
            s.stream_bytes.to_string(),
            s.index_bytes.to_string(),
            s.raw_bytes().to_string(),
            format!("{:.6}", s.ratio()),
            format!("{:.6}", s.dictionary_proportion()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_known_values() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((spearman(&a, &[5.0, 6.0, 7.0, 8.0, 9.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&a, &[9.0, 7.0, 5.0, 3.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!(spearman(&a, &[1.0; 5]).is_nan());
    }

    #[test]
    fn average_ranks_for_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn similarity_counts_equal_entries() {
        assert_eq!(similarity(&[1, 2, 3, 4], &[1, 0, 3, 0]), 0.5);
        assert_eq!(similarity(&[], &[]), 1.0);
    }

    #[test]
    fn curve_buckets() {
        let s = |path_len, similarity| SimilaritySample {
            u: 0,
            v: 0,
            path_len,
            similarity,
            compression_ratio: 1.0,
        };
        let curve = similarity_curve(&[s(0, 1.0), s(3, 0.8), s(4, 0.6), s(9, 0.2)], 5);
        assert_eq!(curve.len(), 2);
        assert_eq!(curve[0].pairs, 3);
        assert!((curve[0].mean_similarity - 0.8).abs() < 1e-12);
        assert_eq!(curve[1].path_len, 5);
    }
}
