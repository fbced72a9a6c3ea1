//! A dipole layer in a multimode planar cavity: roots of the dispersion
//! relation against the spectrum of the full quadratic Hamiltonian.

use polariton::bogoliubov::symplectic_spectrum;
use polariton::dispersion::layer_dispersion_roots;
use polariton::model::{build_layer_2d, cavity_ladder, CouplingSet};

fn main() -> polariton::Result<()> {
    let params = CouplingSet::layer(1.0, vec![0.7], 0.25, 0.2)?;
    for k_max in [1, 3, 5] {
        let ladder = cavity_ladder(&params, k_max)?;
        let roots = layer_dispersion_roots(&params, &ladder)?;
        let spec = symplectic_spectrum(&build_layer_2d(&params, k_max)?)?;
        println!("K = {k_max}: cavity {ladder:?}");
        println!("  roots    {:?}", roots.iter().map(|r| format!("{r:.6}")).collect::<Vec<_>>());
        println!("  spectrum {:?}", spec.frequencies.iter().map(|r| format!("{r:.6}")).collect::<Vec<_>>());
    }
    Ok(())
}
