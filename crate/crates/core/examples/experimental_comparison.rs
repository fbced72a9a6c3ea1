//! Scores the three candidate models against lower-polariton energies.
//!
//!     cargo run --example experimental_comparison [path/to/data.csv]

use polariton::expdata::{infer_eta_from_eta_prime, load_measurements, model_residuals, Metadata};
use polariton::model::ModelKind;

fn main() -> polariton::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/synthetic_renormalized_hopfield_lp.csv").into());
    let meta = Metadata::default();
    let data = load_measurements(&path, meta)?;
    println!(
        "{} points, omega0 = {} eV, eta' = {} -> eta = {:.5}",
        data.len(),
        meta.omega0_ev,
        meta.eta_prime,
        infer_eta_from_eta_prime(meta.eta_prime, -1.0 / 3.0)?
    );
    for kind in [ModelKind::RenormalizedHopfield3D, ModelKind::DickeLike, ModelKind::BareHopfield] {
        let report = model_residuals(&data, kind)?;
        println!("{kind:<24} {}  phase {}", report.summary_json(), report.points[0].phase);
    }
    Ok(())
}
