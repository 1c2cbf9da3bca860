//! File formats, configuration and the command-line driver around
//! [`paretosmg_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod io;
pub mod libsvm;

pub use error::{CliError, CliResult, ExitKind};
