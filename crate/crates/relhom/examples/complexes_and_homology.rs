//! Cochain complexes with exact sign conventions: shift, cone, Hom complex,
//! homology, and homotopy solving.
//!
//! Run with `cargo run --example complexes_and_homology`.

use relhom::complexes::{cone, hom_complex, hom_k, homology, null_homotopy, ChainMap, Complex};
use relhom::modules::{ModuleMorphism, ZmModule};

fn main() -> anyhow::Result<()> {
    let m = 4;
    let z4 = ZmModule::cyclic(m, 4)?;
    let z2 = ZmModule::cyclic(m, 2)?;

    // Z4 --x2--> Z4 in degrees -1, 0
    let d = ModuleMorphism::new(z4.clone(), z4.clone(), vec![2])?;
    let x = Complex::new(m, -1, vec![z4.clone(), z4.clone()], vec![d])?;
    println!("X = {x}");
    println!(
        "H^0(X) = {}, H^-1(X) = {}",
        homology(&x, 0),
        homology(&x, -1)
    );

    // the shift multiplies differentials by (-1)^n; over Z4, -2 = 2
    let shifted = x.shift(1);
    println!(
        "X[1] differential entry: {}",
        shifted.differential(-2).entry(0, 0)
    );

    // Hom(X, Z2) has zero differentials here, so cohomology is Z2 twice
    let hom = hom_complex(&x, &Complex::stalk(z2.clone(), 0));
    println!(
        "Hom(X, Z2): H^0 = {}, H^1 = {}",
        homology(&hom.complex, 0),
        homology(&hom.complex, 1)
    );
    println!(
        "Hom_K(X, Z2[0]) = {}",
        hom_k(&x, &Complex::stalk(z2.clone(), 0), 0)
    );

    // the cone of the identity is contractible, and the solver finds the
    // contraction as one global linear system
    let c = cone(&ChainMap::identity(&x));
    let contraction = null_homotopy(&ChainMap::identity(&c.complex));
    println!("cone(id) contractible: {}", contraction.is_some());

    // the identity of a nonzero stalk is not null-homotopic
    let stalk = Complex::stalk(z2, 0);
    println!(
        "id on stalk Z2 null-homotopic: {}",
        null_homotopy(&ChainMap::identity(&stalk)).is_some()
    );
    Ok(())
}
