use std::fmt;

use thiserror::Error;

/// Reason a mesh file failed to parse.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    MissingHeader,
    MalformedHeader(String),
    MalformedCounts,
    MalformedNumber(String),
    NonFiniteCoordinate,
    NonTriangleFace(usize),
    IndexOutOfRange { index: i64, vertex_count: usize },
    RepeatedIndex,
    UnexpectedEof,
    TooFewElements { vertices: usize, faces: usize },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingHeader => write!(f, "missing OFF header"),
            Self::MalformedHeader(h) => write!(f, "malformed header {h:?}"),
            Self::MalformedCounts => write!(f, "malformed element counts"),
            Self::MalformedNumber(tok) => write!(f, "malformed number {tok:?}"),
            Self::NonFiniteCoordinate => write!(f, "non-finite vertex coordinate"),
            Self::NonTriangleFace(n) => write!(f, "face has {n} vertices, only triangles are supported"),
            Self::IndexOutOfRange { index, vertex_count } => {
                write!(f, "vertex index {index} out of range (vertex count {vertex_count})")
            }
            Self::RepeatedIndex => write!(f, "face repeats a vertex index"),
            Self::UnexpectedEof => write!(f, "unexpected end of file"),
            Self::TooFewElements { vertices, faces } => write!(
                f,
                "mesh needs at least 3 vertices and 1 face, found {vertices} and {faces}"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{path}: {source}")]
    File { path: String, source: Box<Error> },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate mesh: all vertices coincide")]
    DegenerateMesh,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error(
        "norm span {span:.6} cannot hold {bins} bins of width 2*delta = {min_width}; \
         use a smaller payload or a smaller delta"
    )]
    Capacity { span: f64, bins: usize, min_width: f64 },

    #[error("no carrier vertices fall into bin(s) {0:?}; use a smaller payload")]
    EmptyBins(Vec<usize>),

    #[error("attack spec {spec:?}: {reason}")]
    AttackSpec { spec: String, reason: String },

    #[error("non-manifold edge ({0}, {1}) has more than two incident faces")]
    NonManifoldEdge(usize, usize),

    #[error("attack left only {0} vertices")]
    TooFewVertices(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
