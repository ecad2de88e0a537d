//! Shortest-path trees for every source of a road network, compressed
//! against per-region dictionary trees so that one source's tree can be
//! recovered with a few memory copies.
//!
//! Pipeline: [`graph::normalize`] a [`RawGraph`], plan regions with
//! [`plan_regions`], write an archive with [`build_archive`], then open it
//! with [`ArchiveReader`] and answer queries with [`query_spt`].

pub mod archive;
pub mod codec;
pub mod error;
pub mod generate;
pub mod graph;
pub mod partition;
pub mod query;
pub mod sssp;
pub mod stats;

pub use archive::{build_archive, build_archive_bytes, ArchiveHeader, ArchiveReader, BuildReport, Record, SizeBreakdown, StoreMode};
pub use codec::{compress_spt, decode_stream, decompress_spt, encode_stream, DictIndex, Token, TokenStream};
pub use error::{Error, Result};
pub use graph::{normalize, parse_dimacs, to_global, to_local, Graph, RawGraph, Spt, VertexId};
pub use partition::{plan_regions, single_region_plan, LenToDic, RegionPlan};
pub use query::{query_global, query_into, query_spt, QueryContext};
pub use sssp::{apsp_sweep, dijkstra_spt};
