//! Command-line surface and I/O formats for the reasonet engine: JSON network
//! specs, CSV datasets, DOT factor graphs, Sudoku board files, and the
//! `reasonet` binary's dispatch.

pub mod board;
pub mod dataset;
pub mod dispatch;
pub mod dot;
pub mod error;
pub mod spec;

pub use dispatch::cli_dispatch;
pub use error::CliError;
