//! File formats, the Monte Carlo harness and the command-line front end for
//! [`gradrec_core`].

pub mod cli;
pub mod error;
pub mod harness;
pub mod io;

pub use error::AppError;
pub use gradrec_core;
