//! Exact integer linear algebra: Smith normal form and congruence solving.
//!
//! Run with `cargo run --example smith_normal_form`.

use num_bigint::BigInt;
use relhom::linalg::{kernel_mod, smith_normal_form, solve_linear_mod, IntMatrix};

fn main() -> anyhow::Result<()> {
    let a = IntMatrix::from_i64(3, 3, &[2, 4, 4, -6, 6, 12, 10, 4, 16])?;
    let snf = smith_normal_form(&a);
    println!("diagonal of S: {:?}", snf.s.diag());
    println!("reconstructs A: {}", snf.u.mul(&snf.s).mul(&snf.v) == a);

    // solve 2x = 2 (mod 4): the solver decides exactly, no trial and error
    let system = IntMatrix::from_i64(1, 1, &[2])?;
    let solution = solve_linear_mod(&system, &[BigInt::from(2)], &[BigInt::from(4)])?;
    println!("2x = 2 (mod 4): x = {:?}", solution);
    let none = solve_linear_mod(&system, &[BigInt::from(1)], &[BigInt::from(4)])?;
    println!("2x = 1 (mod 4): {:?}", none);

    // kernel of x2 : Z4 -> Z4, computed by lifting to an integer system
    let gens = kernel_mod(&system, &[4], &[4])?;
    println!("kernel generators of x2 on Z4: {:?}", gens);
    Ok(())
}
