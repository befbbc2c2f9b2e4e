//! Right fractions and their reduction to genuine chain maps: splitting a
//! relative quasi-isomorphism and composing back.
//!
//! Run with `cargo run --example fractions`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use relhom::complexes::{cone, null_homotopy, ChainMap, Complex};
use relhom::modules::{ModuleMorphism, ZmModule};
use relhom::oracle;
use relhom::relative::{reduce_fraction, split_x_quasi_iso, Fraction, SubcatDescriptor};

fn main() -> anyhow::Result<()> {
    let m = 4;
    let gp = SubcatDescriptor::gp(m)?;
    let z4 = ZmModule::cyclic(m, 4)?;

    // D: a two-term complex of subcategory objects
    let d = Complex::new(
        m,
        -1,
        vec![z4.clone(), z4.clone()],
        vec![ModuleMorphism::new(z4.clone(), z4.clone(), vec![2])?],
    )?;

    // roof = D ⊕ (contractible); the projection s is a GP-quasi-isomorphism
    let w = Complex::stalk(ZmModule::cyclic(m, 2)?, 0);
    let contractible = cone(&ChainMap::identity(&w)).complex;
    let (roof, s) = oracle::sum_complexes(&d, &contractible);
    println!(
        "roof has components of orders {:?}",
        roof.component(0).orders()
    );

    // split: find g with s ∘ g homotopic to the identity of D
    let g = split_x_quasi_iso(&s, &gp)?;
    let witness = g.then(&s).sub(&ChainMap::identity(&d));
    println!("s ∘ g ~ id_D: {}", null_homotopy(&witness).is_some());

    // a fraction f/s reduces to the genuine chain map f ∘ g
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let target = Complex::stalk(ZmModule::cyclic(m, 2)?, 0);
    let f = oracle::random_chain_map(&mut rng, &roof, &target);
    let fraction = Fraction::new(s.clone(), f.clone(), &gp)?;
    let reduced = reduce_fraction(&fraction, &d, &gp)?;

    // composing back with s recovers f up to homotopy
    let back = s.then(&reduced).sub(&f);
    println!("reduced ∘ s ~ f: {}", null_homotopy(&back).is_some());
    Ok(())
}
