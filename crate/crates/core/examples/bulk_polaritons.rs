//! Bulk polaritons three ways: the closed-form branches, the symplectic
//! spectrum of the five-mode Hamiltonian, and the same spectrum after the
//! matter block has been diagonalized first.

use nalgebra::Vector3;
use polariton::bogoliubov::{ground_state_check, matter_prediagonalize, symplectic_spectrum};
use polariton::dispersion::{longitudinal_branch, normal_branches};
use polariton::lattice::f_longwave_3d;
use polariton::model::{build_bulk_3d, CouplingSet};

fn main() -> polariton::Result<()> {
    let f = f_longwave_3d(&Vector3::z())?;
    let eta = 0.6;
    println!("f_perp = {:.6}, f_par = {:.6}, eta = {eta}", f.f_perp, f.f_par);
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "w_k", "LP", "UP", "LONG", "max dev");
    for wk in [0.25, 0.5, 1.0, 1.5, 2.5] {
        let params = CouplingSet::bulk(1.0, wk, eta)?;
        let form = build_bulk_3d(&params, &f)?;
        let direct = symplectic_spectrum(&form)?;
        let two_step = symplectic_spectrum(&matter_prediagonalize(&form)?)?;
        let (lo, hi) = normal_branches(wk, 1.0, eta, f.f_perp)?;
        let long = longitudinal_branch(1.0, eta, f.f_par)?;
        let mut expected = vec![lo, lo, hi, hi, long];
        expected.sort_by(f64::total_cmp);
        let dev = direct
            .frequencies
            .iter()
            .chain(&two_step.frequencies)
            .zip(expected.iter().chain(&expected))
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max);
        println!("{wk:>6.2} {lo:>12.8} {hi:>12.8} {long:>12.8} {dev:>10.2e}");
    }
    let params = CouplingSet::bulk(1.0, 1.0, eta)?;
    let e0 = ground_state_check(&build_bulk_3d(&params, &f)?)?;
    println!("ground-state energy shift at resonance: {e0:.8}");
    Ok(())
}
