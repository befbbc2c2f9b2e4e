//! Independent brute-force oracles and random instance generators.
//!
//! Everything in this module deliberately avoids the engine's own machinery
//! where it serves as a cross-check: homology is recounted by enumerating
//! elements, Hom groups by counting generator images, classical Ext by the
//! textbook periodic resolution over cyclic factors. Sizes must stay tiny
//! (total carriers around 16) for the enumerations to be exhaustive.

use rand::Rng;

use crate::complexes::{ChainMap, Complex};
use crate::modules::{direct_sum_with_modulus, hom_basis, AbGroup, ModuleMorphism, ZmModule};

/// All elements of a module, in coordinate form. The zero module has exactly
/// one element, the empty tuple.
pub fn enumerate_elements(m: &ZmModule) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &d in m.orders() {
        let mut next = Vec::with_capacity(out.len() * d as usize);
        for prefix in &out {
            for v in 0..d {
                let mut e = prefix.clone();
                e.push(v);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

fn add_elements(a: &[u64], b: &[u64], orders: &[u64]) -> Vec<u64> {
    a.iter()
        .zip(b)
        .zip(orders)
        .map(|((&x, &y), &d)| (x + y) % d)
        .collect()
}

fn scale_element(k: u64, a: &[u64], orders: &[u64]) -> Vec<u64> {
    a.iter()
        .zip(orders)
        .map(|(&x, &d)| (x as u128 * k as u128 % d as u128) as u64)
        .collect()
}

/// Number of well-defined homomorphisms `M -> N`, counted by enumerating
/// candidate generator images.
pub fn brute_hom_count(m: &ZmModule, n: &ZmModule) -> u128 {
    let elements = enumerate_elements(n);
    m.orders()
        .iter()
        .map(|&d| {
            elements
                .iter()
                .filter(|y| scale_element(d, y, n.orders()).iter().all(|&v| v == 0))
                .count() as u128
        })
        .product()
}

/// Subgroup generated by a list of elements.
fn generated_subgroup(gens: &[Vec<u64>], orders: &[u64]) -> std::collections::BTreeSet<Vec<u64>> {
    let zero = vec![0u64; orders.len()];
    let mut set = std::collections::BTreeSet::new();
    set.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(v) = frontier.pop() {
        for g in gens {
            let s = add_elements(&v, g, orders);
            if set.insert(s.clone()) {
                frontier.push(s);
            }
        }
    }
    set
}

/// Does the subquotient `kernel / image` realize `group`? Checked by order
/// and by counting `k`-torsion for every divisor `k` of the exponent, which
/// pins the isomorphism class of a finite abelian group.
pub fn subquotient_matches(
    kernel: &std::collections::BTreeSet<Vec<u64>>,
    image: &std::collections::BTreeSet<Vec<u64>>,
    orders: &[u64],
    group: &AbGroup,
) -> bool {
    if !image.is_subset(kernel) {
        return false;
    }
    let quotient_order = (kernel.len() / image.len()) as u128;
    if num_bigint::BigInt::from(quotient_order) != group.order() {
        return false;
    }
    let exponent = orders.iter().copied().max().unwrap_or(1);
    for k in 1..=exponent {
        if exponent % k != 0 {
            continue;
        }
        // elements of the quotient killed by k
        let torsion = kernel
            .iter()
            .filter(|x| image.contains(&scale_element(k, x, orders)))
            .count() as u128
            / image.len() as u128;
        let expected: u128 = group
            .invariant_factors()
            .iter()
            .map(|&e| crate::modules::gcd(e, k) as u128)
            .product();
        if torsion != expected {
            return false;
        }
    }
    true
}

/// Exhaustive check of `H^n(C)` against element enumeration.
pub fn brute_homology_matches(c: &Complex, n: i64, group: &AbGroup) -> bool {
    let comp = c.component(n);
    let orders = comp.orders().to_vec();
    let d_out = c.differential(n);
    let d_in = c.differential(n - 1);
    let kernel: std::collections::BTreeSet<Vec<u64>> = enumerate_elements(&comp)
        .into_iter()
        .filter(|x| d_out.apply(x).iter().all(|&v| v == 0))
        .collect();
    let image: std::collections::BTreeSet<Vec<u64>> = enumerate_elements(&c.component(n - 1))
        .into_iter()
        .map(|y| d_in.apply(&y))
        .collect();
    subquotient_matches(&kernel, &image, &orders, group)
}

/// All morphisms `M -> N`, through the Hom basis coordinates.
pub fn enumerate_morphisms(m: &ZmModule, n: &ZmModule) -> Vec<ModuleMorphism> {
    let basis = hom_basis(m, n);
    let mut coords = vec![0u64; basis.len()];
    let mut out = Vec::new();
    loop {
        out.push(crate::modules::coords_to_morphism(m, n, &basis, &coords));
        // multi-radix increment
        let mut i = 0;
        loop {
            if i == basis.len() {
                return out;
            }
            coords[i] += 1;
            if coords[i] < basis[i].order {
                break;
            }
            coords[i] = 0;
            i += 1;
        }
    }
}

/// Families `(f^k : X^k -> Y^{k+n})` over the combined support.
fn enumerate_families(x: &Complex, y: &Complex, n: i64) -> Vec<Vec<(i64, ModuleMorphism)>> {
    let Some((xlo, xhi)) = x.support() else {
        return vec![Vec::new()];
    };
    let mut families: Vec<Vec<(i64, ModuleMorphism)>> = vec![Vec::new()];
    for k in xlo..=xhi {
        let options = enumerate_morphisms(&x.component(k), &y.component(k + n));
        let mut next = Vec::with_capacity(families.len() * options.len());
        for fam in &families {
            for opt in &options {
                let mut f = fam.clone();
                f.push((k, opt.clone()));
                next.push(f);
            }
        }
        families = next;
    }
    families
}

fn family_component(
    fam: &[(i64, ModuleMorphism)],
    x: &Complex,
    y: &Complex,
    n: i64,
    k: i64,
) -> ModuleMorphism {
    fam.iter()
        .find(|(deg, _)| *deg == k)
        .map(|(_, f)| f.clone())
        .unwrap_or_else(|| ModuleMorphism::zero(x.component(k), y.component(k + n)))
}

/// Count of degree-`n` cycles of `Hom(X, Y)` (equivalently chain maps
/// `X -> Y[n]`), by exhaustive enumeration.
pub fn brute_chain_map_count(x: &Complex, y: &Complex, n: i64) -> u128 {
    let sign = n.rem_euclid(2) == 1;
    enumerate_families(x, y, n)
        .into_iter()
        .filter(|fam| {
            let (xlo, xhi) = match x.support() {
                Some(r) => r,
                None => return true,
            };
            (xlo - 1..=xhi).all(|k| {
                let f_k = family_component(fam, x, y, n, k);
                let f_k1 = family_component(fam, x, y, n, k + 1);
                let lhs = f_k.then(&y.differential(k + n));
                let rhs = x.differential(k).then(&f_k1);
                if sign {
                    lhs == rhs.neg()
                } else {
                    lhs == rhs
                }
            })
        })
        .count() as u128
}

/// Count of degree-`n` boundaries of `Hom(X, Y)`: images of degree-`n-1`
/// families under the Hom differential, as a set.
pub fn brute_boundary_count(x: &Complex, y: &Complex, n: i64) -> u128 {
    let sign_prev = (n - 1).rem_euclid(2) == 1;
    let mut boundaries = std::collections::BTreeSet::new();
    let Some((xlo, xhi)) = x.support() else {
        return 1;
    };
    for s in enumerate_families(x, y, n - 1) {
        let mut key = Vec::new();
        for k in xlo..=xhi {
            let s_k = family_component(&s, x, y, n - 1, k);
            let s_k1 = family_component(&s, x, y, n - 1, k + 1);
            let first = s_k.then(&y.differential(k + n - 1));
            let second = x.differential(k).then(&s_k1);
            let b = if sign_prev {
                first.add(&second)
            } else {
                first.sub(&second)
            };
            key.extend(b.entries().iter().copied());
        }
        boundaries.insert(key);
    }
    boundaries.len() as u128
}

/// Homotopy-class count `|cycles| / |boundaries|` by brute force; compare
/// against the order of `hom_k(X, Y, n)`.
pub fn brute_homotopy_class_count(x: &Complex, y: &Complex, n: i64) -> u128 {
    brute_chain_map_count(x, y, n) / brute_boundary_count(x, y, n)
}

/// Existence of a null-homotopy, decided by exhausting homotopy families.
pub fn brute_null_homotopic(f: &ChainMap) -> bool {
    let x = f.source();
    let y = f.target();
    for s in enumerate_families(x, y, -1) {
        let (xlo, xhi) = match x.support() {
            Some(r) => r,
            None => return true,
        };
        let works = (xlo..=xhi).all(|k| {
            let s_k = family_component(&s, x, y, -1, k);
            let s_k1 = family_component(&s, x, y, -1, k + 1);
            let rhs = s_k
                .then(&y.differential(k - 1))
                .add(&x.differential(k).then(&s_k1));
            f.component(k) == rhs
        });
        if works {
            return true;
        }
    }
    false
}

/// Classical `Ext^n` over `Z/m` by the textbook periodic resolution,
/// computed independently on cyclic factors: for `Z_a`, the resolution
/// alternates multiplication by `a` and `m/a`, and each Ext group is the
/// cyclic subquotient `ker / im` counted element by element.
pub fn classical_ext(m: &ZmModule, n: &ZmModule, degree: usize) -> AbGroup {
    let modulus = m.modulus();
    let mut orders = Vec::new();
    for &a in m.orders() {
        for &b in n.orders() {
            let mult = |j: usize| -> u64 {
                if j % 2 == 1 {
                    a
                } else {
                    modulus / a
                }
            };
            let count_ker = |c: u64| {
                (0..b)
                    .filter(|y| (c as u128 * *y as u128) % b as u128 == 0)
                    .count() as u64
            };
            let count_im = |c: u64| {
                let mut set = std::collections::BTreeSet::new();
                for y in 0..b {
                    set.insert((c as u128 * y as u128 % b as u128) as u64);
                }
                set.len() as u64
            };
            // ker(d^{n+1}*) / im(d^n*) is a cyclic subquotient of Z_b
            let order = if degree == 0 {
                count_ker(mult(1))
            } else {
                count_ker(mult(degree + 1)) / count_im(mult(degree))
            };
            if order > 1 {
                orders.push(order);
            }
        }
    }
    AbGroup::from_orders(&orders)
}

/// Subgroup membership oracle: is `candidate` inside the subgroup generated
/// by `gens` in the module with the given orders?
pub fn in_generated_subgroup(candidate: &[u64], gens: &[Vec<u64>], orders: &[u64]) -> bool {
    generated_subgroup(gens, orders).contains(candidate)
}

/// Full solution set of `A x = b (mod moduli)` over the coordinate box, for
/// cross-checking the exact solver on small instances.
pub fn brute_solutions(
    a: &crate::linalg::IntMatrix,
    b: &[u64],
    moduli: &[u64],
    box_sizes: &[u64],
) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut x = vec![0u64; box_sizes.len()];
    loop {
        let ok = (0..a.rows()).all(|i| {
            let mut acc = num_bigint::BigInt::from(0);
            for (j, &xj) in x.iter().enumerate() {
                acc += a.get(i, j) * num_bigint::BigInt::from(xj);
            }
            acc -= num_bigint::BigInt::from(b[i]);
            crate::linalg::reduce_mod(&acc, moduli[i]) == 0
        });
        if ok {
            out.push(x.clone());
        }
        let mut i = 0;
        loop {
            if i == box_sizes.len() {
                return out;
            }
            x[i] += 1;
            if x[i] < box_sizes[i] {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

// --- random instance generation -------------------------------------------

pub fn divisors_gt1(m: u64) -> Vec<u64> {
    (2..=m).filter(|d| m % d == 0).collect()
}

pub fn random_module<R: Rng>(rng: &mut R, modulus: u64, max_rank: usize) -> ZmModule {
    let rank = rng.gen_range(0..=max_rank);
    let divisors = divisors_gt1(modulus);
    let orders: Vec<u64> = (0..rank)
        .map(|_| divisors[rng.gen_range(0..divisors.len())])
        .collect();
    ZmModule::new(modulus, &orders).expect("orders divide the modulus")
}

pub fn random_nonzero_module<R: Rng>(rng: &mut R, modulus: u64, max_rank: usize) -> ZmModule {
    loop {
        let m = random_module(rng, modulus, max_rank.max(1));
        if !m.is_zero() {
            return m;
        }
    }
}

pub fn random_morphism<R: Rng>(rng: &mut R, src: &ZmModule, tgt: &ZmModule) -> ModuleMorphism {
    let basis = hom_basis(src, tgt);
    let coords: Vec<u64> = basis.iter().map(|b| rng.gen_range(0..b.order)).collect();
    crate::modules::coords_to_morphism(src, tgt, &basis, &coords)
}

/// Random finite-support complex built from stalks, contractible pieces,
/// periodic strand windows, sums, and cones.
pub fn random_complex<R: Rng>(rng: &mut R, modulus: u64, max_rank: usize, depth: u32) -> Complex {
    let kind = if depth == 0 {
        rng.gen_range(0..3)
    } else {
        rng.gen_range(0..5)
    };
    match kind {
        0 => {
            let deg = rng.gen_range(-2..=1);
            Complex::stalk(random_module(rng, modulus, max_rank), deg)
        }
        1 => {
            let m = random_module(rng, modulus, max_rank);
            let deg = rng.gen_range(-2..=0);
            Complex::new(
                modulus,
                deg,
                vec![m.clone(), m.clone()],
                vec![ModuleMorphism::identity(&m)],
            )
            .expect("identity two-term complex")
        }
        2 => {
            let divisors = divisors_gt1(modulus);
            let d = divisors[rng.gen_range(0..divisors.len())];
            let width = rng.gen_range(2..=4usize);
            let start = rng.gen_range(-3..=0i64);
            let parity: u64 = rng.gen_range(0..2);
            let free = ZmModule::free(modulus, 1);
            let components = vec![free.clone(); width];
            let mut diffs = Vec::new();
            for i in 0..width - 1 {
                let mult = if (i as u64 + parity) % 2 == 0 {
                    d
                } else {
                    modulus / d
                };
                diffs.push(
                    ModuleMorphism::new(free.clone(), free.clone(), vec![mult % modulus])
                        .expect("strand map"),
                );
            }
            match Complex::new(modulus, start, components, diffs) {
                Ok(c) => c,
                Err(_) => Complex::stalk(ZmModule::free(modulus, 1), start),
            }
        }
        3 => {
            let a = random_complex(rng, modulus, max_rank, depth - 1);
            let b = random_complex(rng, modulus, max_rank, depth - 1);
            sum_complexes(&a, &b).0
        }
        _ => {
            let a = random_complex(rng, modulus, max_rank, depth - 1);
            let b = random_complex(rng, modulus, max_rank, depth - 1);
            let f = random_chain_map(rng, &a, &b);
            crate::complexes::cone(&f).complex
        }
    }
}

/// Bounded variant of [`random_complex`]: rejection-samples until the
/// trimmed support width and every component rank fit the caps. Resolution
/// budgets downstream grow geometrically with these sizes.
pub fn random_bounded_complex<R: Rng>(
    rng: &mut R,
    modulus: u64,
    max_width: usize,
    max_rank: usize,
) -> Complex {
    for _ in 0..32 {
        let c = random_complex(rng, modulus, 1, 1).trimmed();
        let Some((lo, hi)) = c.support() else {
            continue;
        };
        let width = (hi - lo) as usize + 1;
        if width <= max_width && (lo..=hi).all(|n| c.component(n).rank() <= max_rank) {
            return c;
        }
    }
    Complex::stalk(random_nonzero_module(rng, modulus, max_rank.max(1)), 0)
}

/// Random chain map `X -> Y`: a boundary `d s + s d` of a random degreewise
/// family, which always commutes with the differentials.
pub fn random_chain_map<R: Rng>(rng: &mut R, x: &Complex, y: &Complex) -> ChainMap {
    let lo = x.lo().min(y.lo());
    let hi = x.hi().max(y.hi()) + 1;
    let mut s = std::collections::BTreeMap::new();
    for k in lo..=hi {
        s.insert(
            k,
            random_morphism(rng, &x.component(k), &y.component(k - 1)),
        );
    }
    let mut comps = std::collections::BTreeMap::new();
    for k in lo..=hi {
        let zero = ModuleMorphism::zero(x.component(k + 1), y.component(k));
        let s_k1 = s.get(&(k + 1)).unwrap_or(&zero);
        let f = s[&k]
            .then(&y.differential(k - 1))
            .add(&x.differential(k).then(s_k1));
        comps.insert(k, f);
    }
    ChainMap::new(x.clone(), y.clone(), comps).expect("boundaries are chain maps")
}

/// Direct sum of two complexes with the projection onto the first summand.
pub fn sum_complexes(a: &Complex, b: &Complex) -> (Complex, ChainMap) {
    let lo = a.lo().min(b.lo());
    let hi = a.hi().max(b.hi());
    let m = a.modulus();
    let mut comps = Vec::new();
    let mut sums = Vec::new();
    for n in lo..=hi {
        let s = direct_sum_with_modulus(m, &[a.component(n), b.component(n)]);
        comps.push(s.module.clone());
        sums.push(s);
    }
    let mut diffs = Vec::new();
    for n in lo..hi {
        let i = (n - lo) as usize;
        let d = sums[i].projections[0]
            .then(&a.differential(n))
            .then(&sums[i + 1].injections[0])
            .add(
                &sums[i].projections[1]
                    .then(&b.differential(n))
                    .then(&sums[i + 1].injections[1]),
            );
        diffs.push(d);
    }
    let total = Complex::new(m, lo, comps, diffs).expect("blockwise differential squares to zero");
    let projection = ChainMap::new(
        total.clone(),
        a.clone(),
        (lo..=hi)
            .map(|n| (n, sums[(n - lo) as usize].projections[0].clone()))
            .collect(),
    )
    .expect("projection is a chain map");
    (total, projection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{hom_k, homology, null_homotopy};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(m: u64, orders: &[u64]) -> ZmModule {
        ZmModule::new(m, orders).unwrap()
    }

    #[test]
    fn hom_count_matches_engine() {
        let cases = [
            (4u64, vec![2u64], vec![2u64]),
            (4, vec![4], vec![2]),
            (4, vec![4, 2], vec![2]),
            (8, vec![4], vec![8, 2]),
            (9, vec![3], vec![9]),
        ];
        for (m, a, b) in cases {
            let ma = z(m, &a);
            let mb = z(m, &b);
            let (group, _) = crate::modules::hom_group(&ma, &mb).unwrap();
            assert_eq!(
                group.order(),
                num_bigint::BigInt::from(brute_hom_count(&ma, &mb)),
                "m={m} {a:?} {b:?}"
            );
        }
    }

    #[test]
    fn homology_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let m = [4u64, 8, 9][rng.gen_range(0..3)];
            let c = random_complex(&mut rng, m, 2, 1);
            if c.component(0).group_order() > num_bigint::BigInt::from(16)
                || c.component(-1).group_order() > num_bigint::BigInt::from(16)
            {
                continue;
            }
            for n in -1..=1 {
                let h = homology(&c, n);
                assert!(brute_homology_matches(&c, n, &h), "H^{n} of {c}");
            }
        }
    }

    #[test]
    fn hom_k_matches_homotopy_classes() {
        let m = 4;
        let z2 = z(m, &[2]);
        let z4 = z(m, &[4]);
        let stalk2 = Complex::stalk(z2.clone(), 0);
        let two_term = Complex::new(
            m,
            -1,
            vec![z4.clone(), z4.clone()],
            vec![ModuleMorphism::from_int_entries(z4.clone(), z4.clone(), &[2]).unwrap()],
        )
        .unwrap();
        for (x, y) in [
            (&stalk2, &stalk2),
            (&two_term, &stalk2),
            (&stalk2, &two_term),
        ] {
            for n in -1..=1 {
                let engine = hom_k(x, y, n).order();
                let brute = brute_homotopy_class_count(x, y, n);
                assert_eq!(engine, num_bigint::BigInt::from(brute), "X={x} Y={y} n={n}");
            }
        }
    }

    #[test]
    fn null_homotopy_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = [4u64, 9][rng.gen_range(0..2)];
            let x = random_complex(&mut rng, m, 1, 1);
            let y = random_complex(&mut rng, m, 1, 1);
            let total: num_bigint::BigInt = (x.lo().min(y.lo())..=x.hi().max(y.hi()))
                .map(|n| x.component(n).group_order() * y.component(n).group_order())
                .product();
            if total > num_bigint::BigInt::from(64) {
                continue;
            }
            let f = random_chain_map(&mut rng, &x, &y);
            let engine = null_homotopy(&f).is_some();
            assert_eq!(engine, brute_null_homotopic(&f));
        }
    }

    #[test]
    fn classical_ext_is_additive_and_periodic() {
        let m = 4;
        let z2 = z(m, &[2]);
        let z4 = z(m, &[4]);
        for n in 1..=4 {
            assert_eq!(classical_ext(&z2, &z2, n).invariant_factors(), &[2]);
            assert!(classical_ext(&z2, &z4, n).is_trivial());
            assert!(classical_ext(&z4, &z2, n).is_trivial());
        }
        assert_eq!(classical_ext(&z2, &z2, 0).invariant_factors(), &[2]);
        let z22 = z(m, &[2, 2]);
        assert_eq!(classical_ext(&z22, &z2, 2).invariant_factors(), &[2, 2]);
    }

    #[test]
    fn random_complexes_are_complexes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let m = [4u64, 8, 9, 12][rng.gen_range(0..4)];
            // constructor would reject d∘d != 0
            let c = random_complex(&mut rng, m, 2, 2);
            let _ = c.support();
        }
    }
}
