//! Tate cohomology in all integer degrees, computed by two independent
//! routes that must agree.
//!
//! Run with `cargo run --example tate_cohomology`.

use relhom::cohomology::{complete_resolution, tate_ext_complete, tate_ext_cone};
use relhom::modules::ZmModule;
use relhom::relative::SubcatDescriptor;

fn main() -> anyhow::Result<()> {
    let m = 4;
    let proj = SubcatDescriptor::proj(m)?;
    let gp = SubcatDescriptor::gp(m)?;
    let z2 = ZmModule::cyclic(m, 2)?;
    let z4 = ZmModule::cyclic(m, 4)?;

    // the complete resolution of Z2 over Z/4 is the 2-periodic strand of
    // Z4's with multiplication by 2 everywhere
    let tate = complete_resolution(&z2, &proj, 4)?;
    println!("T (window [-4, 4]): {}", tate.t);
    println!(
        "period: {}, comparison bijective below {}",
        tate.period, tate.bijective_below
    );

    // negative degrees come from the complete resolution alone
    for n in -2..=2 {
        println!(
            "TateExt^{n}(Z2, Z2) = {}",
            tate_ext_complete(&z2, &z2, n, 4)?
        );
    }

    // for n >= 1 the cone of a lifting W -> X computes the same groups
    for n in 1..=3usize {
        let complete = tate_ext_complete(&z2, &z2, n as i64, n + 3)?;
        let cone = tate_ext_cone(&z2, &z2, n, &gp, &proj, n + 3)?;
        println!(
            "n={n}: complete {complete}, cone {cone}, agree: {}",
            complete == cone
        );
    }

    // projective modules have trivial Tate theory; the strand is empty
    let trivial = complete_resolution(&z4, &proj, 3)?;
    println!("complete resolution of Z4 is zero: {}", trivial.t.is_zero());
    Ok(())
}
