//! Lower and upper polaritons of the renormalized and bare models, written
//! as CSV and SVG into a directory (default `target/plots`).

use std::path::PathBuf;

use polariton::dispersion::{scan, Axis, ModelParams, ScanSpec};
use polariton::expdata::infer_eta_from_eta_prime;
use polariton::model::ModelKind;
use polariton::plot::emit_plot;

fn main() -> polariton::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/plots".into()));
    std::fs::create_dir_all(&dir)?;
    let eta = infer_eta_from_eta_prime(1.83, -1.0 / 3.0)?;
    let mut spec = ScanSpec::new(Axis::OmegaK, 0.05, 3.0, 200)?;
    spec.longitudinal = true;
    for kind in [ModelKind::RenormalizedHopfield3D, ModelKind::BareHopfield, ModelKind::DickeLike] {
        let curve = scan(&ModelParams::new(kind, eta), &spec)?;
        let stem = dir.join(kind.name());
        std::fs::write(stem.with_extension("csv"), curve.to_csv())?;
        emit_plot(&curve, &format!("{kind}, eta = {eta:.3}"), stem.with_extension("svg"))?;
        println!("wrote {}.{{csv,svg}}", stem.display());
    }

    let coupling_axis = ScanSpec::new(Axis::Eta, 0.0, 1.5, 151)?;
    let curve = scan(&ModelParams::new(ModelKind::RenormalizedHopfield3D, 0.0), &coupling_axis)?;
    let path = dir.join("coupling_scan.svg");
    emit_plot(&curve, "resonant polaritons against coupling", &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
