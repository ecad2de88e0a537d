//! Archives shared by the benchmarks.

use splz::archive::{build_archive_bytes, ArchiveReader};
use splz::generate;
use splz::graph::{normalize, Graph};
use splz::partition::{plan_regions, LenToDic};

/// Square grid with about `n` vertices and weights in `1..=100`.
pub fn grid(n: usize) -> Graph {
    normalize(&generate::square_grid(n, 1..=100, 1))
}

/// In-memory archive of `graph` with one region per `sqrt(|V|)` vertices.
pub fn archive(graph: &Graph, len_to_dic: LenToDic) -> ArchiveReader {
    let plan = plan_regions(graph, 1.0, len_to_dic, 0, 0).expect("plan");
    let (bytes, _) = build_archive_bytes(graph, &plan, 0).expect("build");
    ArchiveReader::from_bytes(bytes).expect("open")
}
