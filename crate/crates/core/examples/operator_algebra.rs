//! Site operators of a two-level dipole with a threefold excited state,
//! their bosonization and plane-wave modes of a short chain.

use polariton::hp_algebra::{build_site_operators, collective_mode_matrices, hp_map_matrices, verify_all};

fn main() -> polariton::Result<()> {
    let ops = build_site_operators();
    println!("sigma^-_1 =\n{}", ops.lower[0]);
    let map = hp_map_matrices(2)?;
    println!(
        "boson space with at most 2 quanta: {} states, physical states at {:?}",
        map.bosons.space.dim(),
        map.physical
    );
    let chain = collective_mode_matrices(3)?;
    println!("3-site chain: {} states, k = {:?}", chain.space.dim(), (0..3).map(|m| chain.wavenumber(m)).collect::<Vec<_>>());

    let report = verify_all()?;
    print!("{}", report.table());
    println!("max deviation over asserted relations: {:.3e}", report.max_deviation());
    Ok(())
}
