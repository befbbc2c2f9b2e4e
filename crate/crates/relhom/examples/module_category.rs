//! The module category at desk scale: canonical forms, Hom groups,
//! kernels, cokernels, and biproducts.
//!
//! Run with `cargo run --example module_category`.

use relhom::linalg::IntMatrix;
use relhom::modules::{
    cokernel, decompose, direct_sum, hom_group, is_in_add, kernel, ModuleMorphism, ZmModule,
};

fn main() -> anyhow::Result<()> {
    // canonical form merges cyclic factors into invariant factors
    let m = ZmModule::new(12, &[2, 3, 4])?;
    println!("Z2 + Z3 + Z4 over Z/12 canonicalizes to {m}");

    let z4 = ZmModule::cyclic(4, 4)?;
    let z2 = ZmModule::cyclic(4, 2)?;
    let (hom, basis) = hom_group(&z4, &z2)?;
    println!("Hom(Z4, Z2) = {hom} with {} generator(s)", basis.len());

    // kernel and cokernel of multiplication by 2 on Z4
    let times2 = ModuleMorphism::new(z4.clone(), z4.clone(), vec![2])?;
    let (k, incl) = kernel(&times2);
    let (c, _proj) = cokernel(&times2);
    println!("x2 on Z4: kernel {k}, cokernel {c}");
    println!("inclusion matrix: {incl}");

    // biproducts come with injections and projections that compose right
    let sum = direct_sum(&[z4.clone(), z2.clone()])?;
    println!("Z4 ⊕ Z2 has orders {:?}", sum.module.orders());
    println!(
        "proj ∘ inj = id: {}",
        sum.injections[0].then(&sum.projections[0]) == ModuleMorphism::identity(&z4)
    );

    // presentations decompose to canonical form through the Smith form
    let presented = decompose(&IntMatrix::from_i64(2, 1, &[2, 2])?, 4)?;
    println!("cokernel of (2,2)^T over Z/4: {presented}");

    // additive-closure membership, decided on indecomposable pieces
    println!(
        "Z2 in add(Z4)? {}  |  Z2 in add(Z4 ⊕ Z2)? {}",
        is_in_add(&z2, &[z4.clone()])?,
        is_in_add(&z2, &[sum.module.clone()])?
    );
    Ok(())
}
