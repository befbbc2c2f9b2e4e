//! Proper resolutions with respect to a subcategory, with machine-checkable
//! properness certificates, and relative projective dimension.
//!
//! Run with `cargo run --example proper_resolutions`.

use relhom::modules::{kernel, ModuleMorphism, ZmModule};
use relhom::relative::{proper_resolution, x_pd, x_precover, SubcatDescriptor};

fn main() -> anyhow::Result<()> {
    let m = 4;
    let z4 = ZmModule::cyclic(m, 4)?;
    let z2 = ZmModule::cyclic(m, 2)?;
    let proj = SubcatDescriptor::proj(m)?;
    let gp = SubcatDescriptor::gp(m)?;

    // the canonical precover evaluates every basis hom at once, so
    // Hom(G, -) applied to it is surjective by construction
    let pre = x_precover(&z2, &proj);
    println!(
        "precover of Z2: {} -> Z2 with {} witness(es)",
        pre.map.source(),
        pre.witnesses.len()
    );

    // over Z/4 the projective resolution of Z2 is 2-periodic
    let res = proper_resolution(&z2, &proj, 4)?;
    println!("resolution of Z2: {}", res.resolution);
    res.verify()?;
    println!("certificates verified: components in add, augmented complex Hom-exact");

    // the kernel of x2 on Z4 never reaches a projective syzygy ...
    let times2 = ModuleMorphism::new(z4.clone(), z4.clone(), vec![2])?;
    let (k, _) = kernel(&times2);
    println!("x_pd({k}, PROJ, 8) = {}", x_pd(&k, &proj, 8)?);

    // ... but every module is Gorenstein projective over Z/4
    println!("x_pd({k}, GP, 8) = {}", x_pd(&k, &gp, 8)?);
    println!("x_pd({z4}, PROJ, 8) = {}", x_pd(&z4, &proj, 8)?);
    Ok(())
}
