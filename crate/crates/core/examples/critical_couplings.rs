//! Critical couplings of the bulk models at resonance.

use polariton::dispersion::critical_coupling;
use polariton::model::{soft_mode_coupling, ModelKind};

fn main() -> polariton::Result<()> {
    let f_perp = -1.0 / 3.0;
    for kind in [ModelKind::RenormalizedHopfield3D, ModelKind::DickeLike, ModelKind::BareHopfield] {
        match critical_coupling(kind, f_perp)? {
            Some(eta) => println!("{kind:<24} eta_c = {eta:.10}"),
            None => println!("{kind:<24} no soft mode up to eta = 10"),
        }
    }
    println!("closed form 1/(2 sqrt(-f_perp)) = {:.10}", soft_mode_coupling(f_perp).unwrap());
    Ok(())
}
