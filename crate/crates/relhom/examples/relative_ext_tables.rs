//! Relative Ext tables and their independent cross-checks.
//!
//! Run with `cargo run --example relative_ext_tables`.

use relhom::cohomology::{relative_ext, relative_ext_table};
use relhom::modules::ZmModule;
use relhom::oracle;
use relhom::relative::SubcatDescriptor;

fn main() -> anyhow::Result<()> {
    let m = 4;
    let proj = SubcatDescriptor::proj(m)?;
    let gp = SubcatDescriptor::gp(m)?;
    let z2 = ZmModule::cyclic(m, 2)?;
    let z4 = ZmModule::cyclic(m, 4)?;

    // the 2-periodic resolution of Z2 over Z/4 gives Z2 in every degree
    let table = relative_ext_table(&z2, &z2, 5, &proj)?;
    println!("Ext_PROJ(Z2, Z2) over Z/4:");
    for (n, group) in &table.entries {
        println!("  n={n}: {group}");
    }
    println!("as JSON: {}", table.to_json());
    print!("as CSV:\n{}", table.to_csv());

    // vanishing against a projective coefficient module
    for n in 1..=3 {
        println!(
            "Ext^{n}_PROJ(Z2, Z4) = {}",
            relative_ext(&z2, &z4, n, &proj)?
        );
    }

    // the classical theory is recovered at the projectives; the oracle
    // recomputes it independently from the textbook periodic resolution
    for n in 0..=3 {
        let engine = relative_ext(&z2, &z2, n, &proj)?;
        let classical = oracle::classical_ext(&z2, &z2, n);
        println!(
            "n={n}: engine {engine}, classical {classical}, agree: {}",
            engine == classical
        );
    }

    // relative to the Gorenstein projectives everything vanishes positively
    for n in 1..=2 {
        println!("Ext^{n}_GP(Z2, Z2) = {}", relative_ext(&z2, &z2, n, &gp)?);
    }
    Ok(())
}
