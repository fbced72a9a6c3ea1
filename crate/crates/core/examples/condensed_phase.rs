//! Above the critical coupling: the condensate, its stationarity, the
//! vanishing macroscopic electric field and the fluctuation spectrum.

use polariton::bogoliubov::symplectic_spectrum;
use polariton::dispersion::condensed_branch;
use polariton::lattice::StructureFactor;
use polariton::meanfield::{condensate_parameters, field_expectations, multistart, stationarity_residual};
use polariton::model::{build_condensed_3d, CouplingSet};

fn main() -> polariton::Result<()> {
    let f_perp = -1.0 / 3.0;
    let f = StructureFactor::uniaxial(f_perp, 2.0 / 3.0);
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>12}", "eta", "B^2/N", "|P|", "|E|", "residual", "spectrum");
    for eta in [0.9, 1.0, 1.5, 3.0] {
        let coupling = CouplingSet::bulk(1.0, 1.0, eta)?;
        let params = condensate_parameters(&coupling, f_perp);
        let (_d, p, e) = field_expectations(&params, &f);
        let residual = stationarity_residual(&params, &coupling, &f);
        let spec = symplectic_spectrum(&build_condensed_3d(&coupling, f_perp)?)?;
        let (lo, hi) = condensed_branch(1.0, 1.0, eta, f_perp)?;
        println!(
            "{eta:>5.2} {:>10.6} {:>10.6} {:>10.2e} {residual:>10.2e}   {:?}  (branch {lo:.6}, {hi:.6})",
            params.sum_b2,
            p[0].hypot(p[1]),
            e[0].hypot(e[1]),
            spec.frequencies.iter().map(|w| (w * 1e6).round() / 1e6).collect::<Vec<_>>()
        );
    }

    let bare = CouplingSet::bulk(1.0, 1.0, 0.8)?;
    let report = multistart(&bare, &StructureFactor::uniaxial(0.0, 0.0), 32, 7);
    println!(
        "no dipole coupling: {} converged starts, {} distinct solutions",
        report.converged.len(),
        report.distinct(1e-8).len()
    );
    Ok(())
}
