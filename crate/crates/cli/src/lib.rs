//! Command-line front end and benchmark harness for `meshmark`.
//!
//! Every subcommand is a plain function returning the text it prints, so the
//! binary is a thin argument parser and the commands are testable in-process.

pub mod bench;
pub mod commands;
pub mod config;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/benchmark.md")]
mod book_benchmark {}

use meshmark::Error;
use thiserror::Error;

pub use bench::{run_bench, BenchOptions, BenchReport, BenchRow, Stage};
pub use config::BenchConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("config: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Unreadable or malformed input: mesh files, configs, command lines, and
    /// meshes an attack cannot process.
    pub const PARSE: i32 = 2;
    /// Invalid key, or a payload the mesh cannot hold.
    pub const KEY: i32 = 3;
    pub const ATTACK_GRAMMAR: i32 = 4;
    pub const INTERNAL: i32 = 5;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => exit::PARSE,
            Self::Internal(_) => exit::INTERNAL,
            Self::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Io { .. }
        | Error::InvalidMesh(_)
        | Error::DegenerateMesh
        | Error::NonManifoldEdge(..) => exit::PARSE,
        Error::File { source, .. } => core_exit_code(source),
        Error::InvalidKey(_) | Error::Capacity { .. } | Error::EmptyBins(_) => exit::KEY,
        Error::AttackSpec { .. } => exit::ATTACK_GRAMMAR,
        _ => exit::INTERNAL,
    }
}
