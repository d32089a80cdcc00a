#![no_std]

extern crate alloc;

pub mod error;
pub mod linalg;
pub mod nonuniform;
pub mod recon;
pub mod spectral;
pub mod synth;
pub mod uniqueness;

pub use error::{Error, Result};
