use std::io;

use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{file} line {line}: {message}")]
    Parse {
        file: &'static str,
        line: usize,
        message: String,
    },

    #[error("vertex {vertex}: predecessor {predecessor} is not an in-neighbor")]
    Inconsistent {
        vertex: VertexId,
        predecessor: VertexId,
    },

    #[error("graph has no coordinates; coordinate-free partitioning is not supported, supply a .co file")]
    MissingCoordinates,

    #[error("value {value} at position {position} is outside the 4-bit alphabet")]
    Alphabet { position: usize, value: u8 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{field} {value} is outside every code range")]
    Range { field: &'static str, value: i64 },

    #[error("corrupt stream: {0}")]
    Corrupt(String),

    #[error("invalid archive: {0}")]
    Format(String),

    #[error("plan does not match graph: {0}")]
    PlanMismatch(String),

    #[error("vertex {vertex} out of range (vertex count {count})")]
    VertexOutOfRange { vertex: u64, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
