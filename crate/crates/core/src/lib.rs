pub mod bogoliubov;
pub mod cli;
pub mod dispersion;
pub mod error;
pub mod expdata;
pub mod hp_algebra;
pub mod lattice;
pub mod meanfield;
pub mod model;
pub mod plot;

pub use error::{Error, Result};
