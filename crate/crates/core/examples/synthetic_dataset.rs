//! Writes noise-free lower-polariton energies from the renormalized model,
//! in the measurement CSV format, to standard output.
//!
//!     cargo run --example synthetic_dataset > data/synthetic_renormalized_hopfield_lp.csv

use polariton::expdata::{synthesize, write_measurements, Metadata};
use polariton::model::ModelKind;

fn main() -> polariton::Result<()> {
    let set = synthesize(ModelKind::RenormalizedHopfield3D, Metadata::default(), 0.9, 3.2, 24)?;
    write_measurements(&set, std::io::stdout().lock())
}
