//! Dipole sums of a simple cubic lattice at small wavevector, and the
//! structure constant of the square layer.

use nalgebra::Vector3;
use polariton::lattice::{
    dipole_sum_sequence, f_longwave_3d, mu_2d, split_transverse_longitudinal, tail_nulling_cutoffs,
    LatticeFamily, LatticeSpec,
};

fn main() -> polariton::Result<()> {
    let spec = LatticeSpec::new(LatticeFamily::Sc, 1.0)?;
    let k_hat = Vector3::z();
    let k = k_hat * 0.05;
    let cutoffs = tail_nulling_cutoffs(k.norm(), 3, 0.0)?;
    let seq = dipole_sum_sequence(&spec, &k, &cutoffs)?;
    for (r, m) in seq.cutoffs.iter().zip(&seq.partial) {
        println!("R = {r:8.3}: S_xx = {:10.6}  S_zz = {:10.6}", m[(0, 0)], m[(2, 2)]);
    }
    let s = seq.extrapolated;
    let (perp, par) = split_transverse_longitudinal(&s, &k_hat)?;
    println!("extrapolated: S_perp = {perp:.6}, S_par = {par:.6}, ratio = {:.6}", perp / par);

    let closed = f_longwave_3d(&k_hat)?;
    println!("long-wave form: f_perp / f_par = {:.6}", closed.f_perp / closed.f_par);
    println!("8 pi / 3 = {:.6}", 8.0 * std::f64::consts::PI / 3.0);

    let mu = mu_2d(1e-12)?;
    println!(
        "square layer: mu = {:.12} (bound {:.1e}, cutoff {}), 4 pi mu = {:.6}",
        mu.value,
        mu.error_bound,
        mu.cutoff,
        4.0 * std::f64::consts::PI * mu.value
    );
    Ok(())
}
