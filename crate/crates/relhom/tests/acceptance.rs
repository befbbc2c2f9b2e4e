//! Acceptance suite: one test per exit criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see them on success).
//!
//! Every expected value is either frozen from a hand computation on the
//! periodic resolutions over Z/4 or recomputed here by an independent
//! exhaustive oracle; nothing is copied from the engine under test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relhom::cohomology::{
    am_sequence, les_contravariant, les_covariant, relative_ext, tate_ext_complete, tate_ext_cone,
    ModuleSes,
};
use relhom::complexes::{hom_k, homology, null_homotopy, ChainMap, Complex};
use relhom::linalg::{solve_linear_mod, IntMatrix};
use relhom::modules::{hom_group, kernel, ModuleMorphism, ZmModule};
use relhom::oracle;
use relhom::relative::{
    is_x_quasi_iso_within, proper_resolution, resolve_complex, split_x_quasi_iso, x_pd, Fraction,
    SubcatDescriptor, XPd,
};

fn pass(criterion: usize, name: &str) {
    println!("ACCEPTANCE {criterion} ({name}): PASS");
}

fn z(m: u64, orders: &[u64]) -> ZmModule {
    ZmModule::new(m, orders).unwrap()
}

/// Criterion 1: over Z/4 the kernel of multiplication by 2 on Z4 is Z2 with
/// exact invariant factors, and that kernel has no finite projective
/// dimension within a budget of 8.
#[test]
fn criterion_1_kernel_and_infinite_pd() {
    let m = 4;
    let z4 = z(m, &[4]);
    let times2 = ModuleMorphism::new(z4.clone(), z4.clone(), vec![2]).unwrap();
    let (k, incl) = kernel(&times2);
    assert_eq!(k.orders(), &[2], "kernel of x2 on Z4 must be exactly Z2");
    assert!(incl.is_injective());
    assert!(incl.then(&times2).is_zero_map());
    let proj = SubcatDescriptor::proj(m).unwrap();
    let pd = x_pd(&k, &proj, 8).unwrap();
    assert_eq!(pd, XPd::AtLeast(8), "2Z4 has infinite projective dimension");
    pass(1, "kernel of x2 on Z4 and its projective dimension");
}

/// Criterion 2: the relative Ext tables over Z/4 match the hand-computed
/// periodic-resolution values: Ext^n(Z2, Z2) = Z2 for n = 0..5 and
/// Ext^n(Z2, Z4) = 0 for n = 1..5.
#[test]
fn criterion_2_relative_ext_oracle() {
    let m = 4;
    let proj = SubcatDescriptor::proj(m).unwrap();
    let z2 = z(m, &[2]);
    let z4 = z(m, &[4]);
    for n in 0..=5 {
        let got = relative_ext(&z2, &z2, n, &proj).unwrap();
        assert_eq!(got.invariant_factors(), &[2], "Ext^{n}(Z2,Z2) must be Z2");
    }
    for n in 1..=5 {
        let got = relative_ext(&z2, &z4, n, &proj).unwrap();
        assert!(got.is_trivial(), "Ext^{n}(Z2,Z4) must vanish");
    }
    pass(2, "periodic-resolution Ext oracle over Z/4");
}

/// Criterion 3: for 50 random instances, relative Ext computed through the
/// plain cochain assembly equals the Hom-complex route on the same
/// resolution (the standard-formula identification), as exact groups.
#[test]
fn criterion_3_standard_formula_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7342);
    let mut checked = 0;
    while checked < 50 {
        let m = [4u64, 8, 9][rng.gen_range(0..3)];
        let n_deg = rng.gen_range(0..=3usize);
        let a = oracle::random_module(&mut rng, m, 2);
        let b = oracle::random_module(&mut rng, m, 2);
        let x = if rng.gen_bool(0.5) {
            SubcatDescriptor::proj(m).unwrap()
        } else {
            SubcatDescriptor::gp(m).unwrap()
        };
        // the resolution the Hom-complex route uses
        let res = relhom::cohomology::resolution_for_ext(&a, &x, n_deg + 2).unwrap();
        let via_hom_complex = hom_k(&res.resolution, &Complex::stalk(b.clone(), 0), n_deg as i64);
        let via_cochain = relative_ext(&a, &b, n_deg, &x).unwrap();
        assert_eq!(
            via_cochain, via_hom_complex,
            "routes disagree for Ext^{n_deg}({a}, {b}) rel {x}"
        );
        checked += 1;
    }
    pass(
        3,
        "cochain route = Hom-complex route on 50 random instances",
    );
}

/// Criterion 4: resolving 100 random bounded complexes by subcategory
/// complexes succeeds with all three postconditions verified (componentwise
/// membership, X-acyclic kernel on the window, degreewise Hom-exactness),
/// and the epimorphism is an X-quasi-isomorphism on the window.
#[test]
fn criterion_4_resolve_complex_postconditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x39AD);
    let mut done = 0;
    while done < 100 {
        let m = [4u64, 8, 9][rng.gen_range(0..3)];
        let (width, rank) = if m == 8 { (2, 1) } else { (3, 2) };
        let gp = SubcatDescriptor::gp(m).unwrap();
        let t = oracle::random_bounded_complex(&mut rng, m, width, rank);
        // resolve_complex verifies membership, kernel acyclicity, and the
        // degreewise Hom-exactness certificates before returning
        let resolved = resolve_complex(&t, &gp, 2)
            .unwrap_or_else(|e| panic!("instance {done} failed: {e} on {t}"));
        if !resolved.d.is_zero() {
            assert!(
                is_x_quasi_iso_within(
                    &resolved.epi,
                    &gp,
                    resolved.d.lo() + 2 + (width as i64),
                    resolved.d.hi() + 1
                ),
                "density witness failed on instance {done}"
            );
        }
        done += 1;
    }
    pass(
        4,
        "complex resolution postconditions on 100 random instances",
    );
}

/// Criterion 5: for 50 random fractions with splittable denominators, the
/// reduction is a genuine chain map representing the same morphism:
/// `s ∘ g ~ id` and `f ∘ g ∘ s ~ f`.
#[test]
fn criterion_5_fraction_reduction_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1CEB);
    let mut done = 0;
    while done < 50 {
        let m = [4u64, 8, 9][rng.gen_range(0..3)];
        let gp = SubcatDescriptor::gp(m).unwrap();
        let d = oracle::random_bounded_complex(&mut rng, m, 3, 2);
        let w = oracle::random_bounded_complex(&mut rng, m, 2, 1);
        let contractible = relhom::complexes::cone(&ChainMap::identity(&w)).complex;
        let (_roof, s) = oracle::sum_complexes(&d, &contractible);
        let target = oracle::random_bounded_complex(&mut rng, m, 2, 1);
        let f = oracle::random_chain_map(&mut rng, s.source(), &target);
        let fraction = Fraction::new(s.clone(), f.clone(), &gp).unwrap();
        let g = split_x_quasi_iso(&fraction.s, &gp).unwrap();
        let reduced = relhom::relative::reduce_fraction(&fraction, &d, &gp).unwrap();
        // s ∘ g ~ id_D
        let sg = g.then(&s).sub(&ChainMap::identity(&d));
        assert!(null_homotopy(&sg).is_some(), "s∘g !~ id on instance {done}");
        // f ∘ g ∘ s ~ f (the reduced map represents the same fraction)
        let back = s.then(&reduced).sub(&f);
        assert!(
            null_homotopy(&back).is_some(),
            "f∘g∘s !~ f on instance {done}"
        );
        done += 1;
    }
    pass(5, "fraction reduction witnesses on 50 random instances");
}

/// Criterion 6: the two Tate cohomology routes agree as exact groups for
/// n = 1..4 on 50 random module pairs.
#[test]
fn criterion_6_tate_route_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7A7E);
    let mut done = 0;
    while done < 50 {
        let m = [4u64, 8, 9][rng.gen_range(0..3)];
        let gp = SubcatDescriptor::gp(m).unwrap();
        let proj = SubcatDescriptor::proj(m).unwrap();
        let a = oracle::random_module(&mut rng, m, 2);
        let b = oracle::random_module(&mut rng, m, 2);
        for n in 1..=4usize {
            let via_cone = tate_ext_cone(&a, &b, n, &gp, &proj, n + 3).unwrap();
            let via_complete = tate_ext_complete(&a, &b, n as i64, n + 3).unwrap();
            assert_eq!(
                via_cone, via_complete,
                "routes disagree at n={n} for ({a}, {b})"
            );
        }
        done += 1;
    }
    pass(6, "Tate route agreement for n=1..4 on 50 random pairs");
}

/// Criterion 7: the long exact sequences and the interlaced sequence emit
/// passing im = ker certificates at every node on 50 random instances each;
/// the interlaced sequence additionally certifies its boundary facts.
#[test]
fn criterion_7_verified_exact_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE5AC);
    for instance in 0..50 {
        let m = [4u64, 8, 9][rng.gen_range(0..3)];
        let gp = SubcatDescriptor::gp(m).unwrap();
        let a = oracle::random_module(&mut rng, m, 2);
        let b = oracle::random_module(&mut rng, m, 2);
        let other = oracle::random_module(&mut rng, m, 2);
        let seq = ModuleSes::split(&a, &b).unwrap();
        let cov = les_covariant(&other, &seq, &gp, 2)
            .unwrap_or_else(|e| panic!("covariant instance {instance}: {e}"));
        assert!(cov.all_exact);
        let contra = les_contravariant(&seq, &other, &gp, 2)
            .unwrap_or_else(|e| panic!("contravariant instance {instance}: {e}"));
        assert!(contra.all_exact);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xA417);
    for instance in 0..50 {
        let m = [4u64, 8, 9][rng.gen_range(0..3)];
        let gp = SubcatDescriptor::gp(m).unwrap();
        let proj = SubcatDescriptor::proj(m).unwrap();
        let a = oracle::random_module(&mut rng, m, 2);
        let b = oracle::random_module(&mut rng, m, 2);
        let am = am_sequence(&a, &b, &gp, &proj, 5)
            .unwrap_or_else(|e| panic!("interlaced instance {instance}: {e}"));
        assert!(
            am.sequence.all_exact,
            "node certificate failed on {instance}"
        );
        assert!(am.h1_cone_trivial, "H^1(Hom(cone f, N)) != 0 on {instance}");
        assert!(
            am.ext_x_vanishes_past_d,
            "Ext_X termination failed on {instance}"
        );
        assert!(am.tate_route_agreement && am.ext_columns_agree);
    }
    pass(7, "exact-sequence certificates on 150 random instances");
}

// --- criterion 8: exhaustive brute-force layer -------------------------------

/// All canonical modules over `m` with group order at most `cap`.
fn small_modules(m: u64, cap: u128) -> Vec<ZmModule> {
    let divisors: Vec<u64> = (2..=m).filter(|d| m % d == 0).collect();
    let mut out = vec![ZmModule::zero(m)];
    let mut stack: Vec<(Vec<u64>, u128)> = vec![(Vec::new(), 1)];
    while let Some((orders, order)) = stack.pop() {
        for &d in &divisors {
            if orders.last().map(|&last| d > last).unwrap_or(false) {
                continue; // keep orders nonincreasing to avoid duplicates
            }
            let next_order = order * d as u128;
            if next_order > cap {
                continue;
            }
            let mut next = orders.clone();
            next.push(d);
            let module = ZmModule::new(m, &next).unwrap();
            if module.orders() == next.as_slice() {
                out.push(module);
                stack.push((next, next_order));
            }
        }
    }
    out.sort_by_key(|a| (a.group_order(), a.orders().to_vec()));
    out.dedup();
    out
}

#[test]
fn criterion_8a_hom_group_exhaustive() {
    for m in [4u64, 6, 8, 9, 12] {
        let modules = small_modules(m, 16);
        for a in &modules {
            for b in &modules {
                let (group, gens) = hom_group(a, b).unwrap();
                assert_eq!(
                    group.order(),
                    num_bigint::BigInt::from(oracle::brute_hom_count(a, b)),
                    "Hom({a}, {b})"
                );
                for g in &gens {
                    assert_eq!(g.source(), a);
                    assert_eq!(g.target(), b);
                }
            }
        }
    }
    pass(8, "hom_group vs exhaustive count, all carriers <= 16");
}

#[test]
fn criterion_8b_solve_exhaustive() {
    // every 1x1 and 2x2 congruence system over a uniform modulus with
    // carrier at most 16
    for m in [4u64, 6, 8, 9, 12, 16] {
        for rows_cols in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
            let (rows, cols) = rows_cols;
            if (m as u128).pow(cols as u32) > 16 {
                continue;
            }
            let cells = rows * cols;
            let mut counters = vec![0u64; cells + rows];
            loop {
                let entries: Vec<i64> = counters[..cells].iter().map(|&v| v as i64).collect();
                let b: Vec<u64> = counters[cells..].to_vec();
                let a = IntMatrix::from_i64(rows, cols, &entries).unwrap();
                let moduli = vec![m; rows];
                let engine = solve_linear_mod(
                    &a,
                    &b.iter()
                        .map(|&v| num_bigint::BigInt::from(v))
                        .collect::<Vec<_>>(),
                    &moduli
                        .iter()
                        .map(|&v| num_bigint::BigInt::from(v))
                        .collect::<Vec<_>>(),
                )
                .unwrap();
                let brute = oracle::brute_solutions(&a, &b, &moduli, &vec![m; cols]);
                match engine {
                    Some(x) => {
                        assert!(!brute.is_empty(), "engine found a phantom solution");
                        let valid = (0..rows).all(|i| {
                            let mut acc = num_bigint::BigInt::from(0);
                            for (j, xj) in x.iter().enumerate() {
                                acc += a.get(i, j) * xj;
                            }
                            acc -= num_bigint::BigInt::from(b[i]);
                            relhom::linalg::reduce_mod(&acc, m) == 0
                        });
                        assert!(valid, "engine solution does not solve the system");
                    }
                    None => assert!(brute.is_empty(), "engine missed solutions of {entries:?}"),
                }
                // odometer over all entries and right-hand sides
                let mut idx = 0;
                loop {
                    if idx == counters.len() {
                        break;
                    }
                    counters[idx] += 1;
                    if counters[idx] < m {
                        break;
                    }
                    counters[idx] = 0;
                    idx += 1;
                }
                if idx == counters.len() {
                    break;
                }
            }
        }
    }
    pass(
        8,
        "solve_linear_mod vs exhaustive enumeration, all carriers <= 16",
    );
}

/// All two-term complexes (every valid differential between every ordered
/// pair of small modules), checked for homology and null-homotopy.
#[test]
fn criterion_8c_homology_and_homotopy_exhaustive() {
    for m in [4u64, 6, 9] {
        let modules = small_modules(m, 4);
        for a in &modules {
            for b in &modules {
                if a.group_order() * b.group_order() > num_bigint::BigInt::from(16) {
                    continue;
                }
                for d in oracle::enumerate_morphisms(a, b) {
                    let c = Complex::new(m, -1, vec![a.clone(), b.clone()], vec![d]).unwrap();
                    for n in -2..=1 {
                        let h = homology(&c, n);
                        assert!(
                            oracle::brute_homology_matches(&c, n, &h),
                            "H^{n} mismatch on {c}"
                        );
                    }
                    // every chain map from the stalk of a onto the complex,
                    // decided against exhaustive homotopy search
                    for phi in oracle::enumerate_morphisms(a, a) {
                        let stalk = Complex::stalk(a.clone(), -1);
                        if let Ok(f) = ChainMap::new(
                            stalk.clone(),
                            c.clone(),
                            std::collections::BTreeMap::from([(-1, phi)]),
                        ) {
                            assert_eq!(
                                null_homotopy(&f).is_some(),
                                oracle::brute_null_homotopic(&f),
                                "null-homotopy decision mismatch on {c}"
                            );
                        }
                    }
                }
            }
        }
    }
    pass(
        8,
        "homology and null_homotopy vs exhaustive search, carriers <= 16",
    );
}

/// The augmentation of every proper resolution built here is an
/// X-quasi-isomorphism on the window interior (spot check that ties the
/// suite together; not a numbered criterion).
#[test]
fn resolution_augmentations_are_relative_quasi_isos() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF00D);
    for _ in 0..10 {
        let m = [4u64, 8, 9][rng.gen_range(0..3)];
        let proj = SubcatDescriptor::proj(m).unwrap();
        let module = oracle::random_module(&mut rng, m, 2);
        let res = proper_resolution(&module, &proj, 4).unwrap();
        res.verify().unwrap();
        if !module.is_zero() {
            assert!(is_x_quasi_iso_within(
                &res.augmentation_map(),
                &proj,
                res.resolution.lo() + 2,
                1
            ));
        }
    }
}
