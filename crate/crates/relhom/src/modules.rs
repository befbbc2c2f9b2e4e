//! The abelian category of finitely generated `Z/m`-modules at desk scale.
//!
//! Objects are kept in canonical cyclic form (invariant factors, descending),
//! morphisms are matrices of congruence-constrained entries, and every
//! categorical construction (kernel, cokernel, direct sum, Hom group) is
//! computed exactly through the Smith normal form of an integer lift.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::linalg::{kernel_mod, reduce_mod, smith_normal_form, IntMatrix};
use crate::{Error, Result};

/// Finitely generated `Z/m`-module in canonical cyclic form.
///
/// `orders` lists the cyclic orders `d_i` with `1 < d_i <= m`, each dividing
/// `m`, sorted descending and forming a divisibility chain (largest first).
/// The zero module has an empty list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZmModule {
    modulus: u64,
    orders: Vec<u64>,
}

impl ZmModule {
    /// Builds the module `⊕ Z_{d_i}` over `Z/m` and canonicalizes it.
    ///
    /// The input orders may be any cyclic orders dividing `m`; the result is
    /// stored in invariant-factor form, so e.g. `[2, 3]` over `m = 6`
    /// becomes `[6]`.
    pub fn new(modulus: u64, orders: &[u64]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InputError(format!(
                "modulus must be >= 2, got {modulus}"
            )));
        }
        for &d in orders {
            if d == 0 || d > modulus || modulus % d != 0 {
                return Err(Error::InputError(format!(
                    "cyclic order {d} does not divide modulus {modulus}"
                )));
            }
        }
        Ok(ZmModule {
            modulus,
            orders: invariant_factors_desc(orders),
        })
    }

    pub fn zero(modulus: u64) -> Self {
        ZmModule {
            modulus,
            orders: Vec::new(),
        }
    }

    pub fn cyclic(modulus: u64, order: u64) -> Result<Self> {
        Self::new(modulus, &[order])
    }

    /// Free module `(Z/m)^rank`.
    pub fn free(modulus: u64, rank: usize) -> Self {
        ZmModule {
            modulus,
            orders: vec![modulus; rank],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_zero(&self) -> bool {
        self.orders.is_empty()
    }

    /// Number of elements. Arbitrary precision: deep resolutions over
    /// multi-generator subcategories produce modules far beyond `u128`.
    pub fn group_order(&self) -> BigInt {
        self.orders.iter().map(|&d| BigInt::from(d)).product()
    }

    /// Indecomposable summands as prime powers (the Krull-Schmidt pieces).
    pub fn prime_power_parts(&self) -> BTreeSet<u64> {
        let mut parts = BTreeSet::new();
        for &d in &self.orders {
            for (p, k) in factorize(d) {
                parts.insert(p.pow(k));
            }
        }
        parts
    }

    pub fn to_ab_group(&self) -> AbGroup {
        AbGroup::from_orders(&self.orders)
    }
}

impl fmt::Display for ZmModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0@{}", self.modulus);
        }
        let parts: Vec<String> = self.orders.iter().map(|d| format!("Z{d}")).collect();
        write!(f, "{}@{}", parts.join("+"), self.modulus)
    }
}

/// Finite abelian group in invariant-factor form, `e_1 | e_2 | ...`
/// ascending, all `e_i >= 2`. The value type of homology and Ext groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbGroup {
    invariant_factors: Vec<u64>,
}

impl AbGroup {
    pub fn trivial() -> Self {
        AbGroup {
            invariant_factors: Vec::new(),
        }
    }

    /// Canonicalizes an arbitrary list of cyclic orders.
    pub fn from_orders(orders: &[u64]) -> Self {
        let mut desc = invariant_factors_desc(orders);
        desc.reverse();
        AbGroup {
            invariant_factors: desc,
        }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors
            .iter()
            .map(|&e| BigInt::from(e))
            .product()
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|e| format!("Z{e}"))
            .collect();
        write!(f, "{}", parts.join(" \u{2295} "))
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors of `⊕ Z_{orders[i]}`, descending, trivial factors
/// dropped.
fn invariant_factors_desc(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &d in orders {
        for (p, k) in factorize(d) {
            by_prime.entry(p).or_default().push(k);
        }
    }
    let mut slots = 0;
    for exps in by_prime.values_mut() {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        slots = slots.max(exps.len());
    }
    let mut factors = Vec::new();
    for t in 0..slots {
        let mut e = 1u64;
        for (p, exps) in &by_prime {
            if let Some(&k) = exps.get(t) {
                e *= p.pow(k);
            }
        }
        if e > 1 {
            factors.push(e);
        }
    }
    factors
}

/// Morphism between canonical modules, stored as a reduced matrix.
///
/// Row `i` indexes target cyclic factors, column `j` source factors; the
/// entry `a_ij` defines `x -> a_ij * x : Z_{d_j} -> Z_{e_i}`, which is well
/// defined exactly when `e_i / gcd(e_i, d_j)` divides `a_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMorphism {
    source: ZmModule,
    target: ZmModule,
    entries: Vec<u64>, // row-major, target.rank() x source.rank(), reduced mod e_i
}

impl ModuleMorphism {
    pub fn new(source: ZmModule, target: ZmModule, entries: Vec<u64>) -> Result<Self> {
        if source.modulus() != target.modulus() {
            return Err(Error::ModulusMismatch(source.modulus(), target.modulus()));
        }
        if entries.len() != source.rank() * target.rank() {
            return Err(Error::DimensionMismatch(format!(
                "morphism {} -> {} needs {} entries, got {}",
                source,
                target,
                source.rank() * target.rank(),
                entries.len()
            )));
        }
        let mut reduced = entries;
        for i in 0..target.rank() {
            let ei = target.orders()[i];
            for j in 0..source.rank() {
                let a = &mut reduced[i * source.rank() + j];
                *a %= ei;
                let dj = source.orders()[j];
                let constraint = ei / gcd(ei, dj);
                if *a % constraint != 0 {
                    return Err(Error::InvalidMorphism(format!(
                        "entry {a} at ({i},{j}) is not a map Z{dj} -> Z{ei}"
                    )));
                }
            }
        }
        Ok(ModuleMorphism {
            source,
            target,
            entries: reduced,
        })
    }

    /// Builds a morphism from possibly-negative integer entries, reducing
    /// them into canonical range first.
    pub fn from_int_entries(source: ZmModule, target: ZmModule, entries: &[i64]) -> Result<Self> {
        let reduced: Vec<u64> = entries
            .iter()
            .enumerate()
            .map(|(idx, &e)| {
                let i = if source.rank() == 0 {
                    0
                } else {
                    idx / source.rank()
                };
                let ei = target.orders().get(i).copied().unwrap_or(1);
                (e.rem_euclid(ei as i64)) as u64
            })
            .collect();
        Self::new(source, target, reduced)
    }

    pub fn zero(source: ZmModule, target: ZmModule) -> Self {
        let entries = vec![0; source.rank() * target.rank()];
        ModuleMorphism {
            source,
            target,
            entries,
        }
    }

    pub fn identity(m: &ZmModule) -> Self {
        let n = m.rank();
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        ModuleMorphism {
            source: m.clone(),
            target: m.clone(),
            entries,
        }
    }

    pub fn source(&self) -> &ZmModule {
        &self.source
    }

    pub fn target(&self) -> &ZmModule {
        &self.target
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.source.rank() + j]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn is_zero_map(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::new(
            self.target.rank(),
            self.source.rank(),
            self.entries.iter().map(|&e| BigInt::from(e)).collect(),
        )
        .expect("shape is consistent by construction")
    }

    /// `self` followed by `next`, i.e. the composite `next ∘ self`.
    /// Panics when the middle objects differ.
    pub fn then(&self, next: &ModuleMorphism) -> ModuleMorphism {
        assert_eq!(
            self.target, next.source,
            "composition mismatch: {} vs {}",
            self.target, next.source
        );
        let rows = next.target.rank();
        let mid = self.target.rank();
        let cols = self.source.rank();
        let mut entries = vec![0u64; rows * cols];
        for i in 0..rows {
            let ei = next.target.orders()[i] as u128;
            for j in 0..cols {
                let mut acc: u128 = 0;
                for k in 0..mid {
                    acc += next.entry(i, k) as u128 * self.entry(k, j) as u128;
                    acc %= ei;
                }
                entries[i * cols + j] = acc as u64;
            }
        }
        ModuleMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            entries,
        }
    }

    pub fn add(&self, other: &ModuleMorphism) -> ModuleMorphism {
        assert_eq!(self.source, other.source, "addition endpoint mismatch");
        assert_eq!(self.target, other.target, "addition endpoint mismatch");
        let mut entries = self.entries.clone();
        for i in 0..self.target.rank() {
            let ei = self.target.orders()[i];
            for j in 0..self.source.rank() {
                let idx = i * self.source.rank() + j;
                entries[idx] = (entries[idx] + other.entries[idx]) % ei;
            }
        }
        ModuleMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            entries,
        }
    }

    pub fn neg(&self) -> ModuleMorphism {
        let mut entries = self.entries.clone();
        for i in 0..self.target.rank() {
            let ei = self.target.orders()[i];
            for j in 0..self.source.rank() {
                let idx = i * self.source.rank() + j;
                entries[idx] = (ei - entries[idx]) % ei;
            }
        }
        ModuleMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            entries,
        }
    }

    pub fn sub(&self, other: &ModuleMorphism) -> ModuleMorphism {
        self.add(&other.neg())
    }

    /// Applies the morphism to an element given in source coordinates.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(
            x.len(),
            self.source.rank(),
            "element has wrong coordinate count"
        );
        (0..self.target.rank())
            .map(|i| {
                let ei = self.target.orders()[i] as u128;
                let mut acc: u128 = 0;
                for (j, &xj) in x.iter().enumerate() {
                    acc += self.entry(i, j) as u128 * xj as u128;
                    acc %= ei;
                }
                acc as u64
            })
            .collect()
    }

    /// Order of the image subgroup, by exact cokernel counting.
    pub fn image_order(&self) -> BigInt {
        let coker_order = cokernel(self).0.group_order();
        self.target.group_order() / coker_order
    }

    pub fn kernel_order(&self) -> BigInt {
        self.source.group_order() / self.image_order()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_order() == self.target.group_order()
    }

    pub fn is_injective(&self) -> bool {
        use num_traits::One;
        self.kernel_order().is_one()
    }
}

impl fmt::Display for ModuleMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.target.rank() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.source.rank() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "] : {} -> {}", self.source, self.target)
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// One basis element of `Hom(M, N)`: the morphism with the single entry
/// `scale = e_row / gcd(e_row, d_col)` at `(row, col)`, of order
/// `order = gcd(e_row, d_col)` in the Hom group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomBasisElem {
    pub row: usize,
    pub col: usize,
    pub order: u64,
    pub scale: u64,
}

/// Basis of `Hom(M, N)` as a product of cyclic groups, in row-major pair
/// order. Pairs with trivial Hom (`gcd = 1`) are omitted.
pub fn hom_basis(source: &ZmModule, target: &ZmModule) -> Vec<HomBasisElem> {
    let mut basis = Vec::new();
    for row in 0..target.rank() {
        let e = target.orders()[row];
        for col in 0..source.rank() {
            let d = source.orders()[col];
            let g = gcd(e, d);
            if g > 1 {
                basis.push(HomBasisElem {
                    row,
                    col,
                    order: g,
                    scale: e / g,
                });
            }
        }
    }
    basis
}

/// The group `Hom(M, N)` together with generating morphisms.
///
/// On cyclic factors `Hom(Z_d, Z_e)` is cyclic of order `gcd(d, e)`,
/// generated by multiplication by `e / gcd(d, e)`; the Hom group of sums is
/// the product over all factor pairs.
pub fn hom_group(source: &ZmModule, target: &ZmModule) -> Result<(AbGroup, Vec<ModuleMorphism>)> {
    if source.modulus() != target.modulus() {
        return Err(Error::ModulusMismatch(source.modulus(), target.modulus()));
    }
    let basis = hom_basis(source, target);
    let orders: Vec<u64> = basis.iter().map(|b| b.order).collect();
    let gens = basis
        .iter()
        .map(|b| {
            let mut entries = vec![0u64; source.rank() * target.rank()];
            entries[b.row * source.rank() + b.col] = b.scale;
            ModuleMorphism::new(source.clone(), target.clone(), entries)
                .expect("basis morphism satisfies the entry constraint by construction")
        })
        .collect();
    Ok((AbGroup::from_orders(&orders), gens))
}

/// Coordinates of a morphism in the `hom_basis` parametrization.
pub(crate) fn morphism_to_coords(f: &ModuleMorphism, basis: &[HomBasisElem]) -> Vec<u64> {
    basis
        .iter()
        .map(|b| {
            let a = f.entry(b.row, b.col);
            debug_assert_eq!(a % b.scale, 0, "entry violates hom constraint");
            (a / b.scale) % b.order
        })
        .collect()
}

pub(crate) fn coords_to_morphism(
    source: &ZmModule,
    target: &ZmModule,
    basis: &[HomBasisElem],
    coords: &[u64],
) -> ModuleMorphism {
    let mut entries = vec![0u64; source.rank() * target.rank()];
    for (b, &c) in basis.iter().zip(coords) {
        let e = target.orders()[b.row];
        entries[b.row * source.rank() + b.col] =
            ((c % b.order) as u128 * b.scale as u128 % e as u128) as u64;
    }
    ModuleMorphism::new(source.clone(), target.clone(), entries)
        .expect("scaled coordinates satisfy the entry constraint")
}

/// A product of cyclic groups together with an explicit isomorphism to its
/// canonical form. Raw coordinates index the given `raw_orders`; canonical
/// coordinates index the invariant factors of `module`.
#[derive(Debug, Clone)]
pub struct CyclicProduct {
    pub raw_orders: Vec<u64>,
    pub module: ZmModule,
    to_canon: Vec<Vec<u64>>,   // module.rank() rows of raw length
    from_canon: Vec<Vec<u64>>, // raw length rows of module.rank()
}

impl CyclicProduct {
    pub fn new(modulus: u64, raw_orders: Vec<u64>) -> Self {
        let diag = IntMatrix::diagonal(
            &raw_orders
                .iter()
                .map(|&d| BigInt::from(d))
                .collect::<Vec<_>>(),
        );
        let snf = smith_normal_form(&diag);
        let diag_s = snf.s.diag();
        let kept: Vec<usize> = (0..diag_s.len())
            .filter(|&i| diag_s[i] > BigInt::from(1u64))
            .rev() // canonical form lists largest factor first
            .collect();
        let canon_orders: Vec<u64> = kept
            .iter()
            .map(|&i| u64::try_from(&diag_s[i]).expect("factor fits in u64"))
            .collect();
        let module = ZmModule {
            modulus,
            orders: canon_orders.clone(),
        };
        let to_canon: Vec<Vec<u64>> = kept
            .iter()
            .enumerate()
            .map(|(a, &i)| {
                (0..raw_orders.len())
                    .map(|t| reduce_mod(snf.u_inv.get(i, t), canon_orders[a]))
                    .collect()
            })
            .collect();
        let from_canon: Vec<Vec<u64>> = (0..raw_orders.len())
            .map(|t| {
                kept.iter()
                    .map(|&i| reduce_mod(snf.u.get(t, i), raw_orders[t].max(1)))
                    .collect()
            })
            .collect();
        CyclicProduct {
            raw_orders,
            module,
            to_canon,
            from_canon,
        }
    }

    pub fn raw_to_canon(&self, raw: &[u64]) -> Vec<u64> {
        assert_eq!(raw.len(), self.raw_orders.len());
        self.to_canon
            .iter()
            .zip(self.module.orders())
            .map(|(row, &ord)| {
                let mut acc: u128 = 0;
                for (c, &x) in row.iter().zip(raw) {
                    acc += *c as u128 * x as u128;
                    acc %= ord as u128;
                }
                acc as u64
            })
            .collect()
    }

    pub fn canon_to_raw(&self, canon: &[u64]) -> Vec<u64> {
        assert_eq!(canon.len(), self.module.rank());
        self.from_canon
            .iter()
            .zip(&self.raw_orders)
            .map(|(row, &ord)| {
                let ord = ord.max(1);
                let mut acc: u128 = 0;
                for (c, &x) in row.iter().zip(canon) {
                    acc += *c as u128 * x as u128;
                    acc %= ord as u128;
                }
                acc as u64
            })
            .collect()
    }
}

/// Direct sum with its biproduct structure.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub module: ZmModule,
    pub injections: Vec<ModuleMorphism>,
    pub projections: Vec<ModuleMorphism>,
}

/// Direct sum of modules, re-canonicalized, with injections and projections
/// satisfying the biproduct identities.
pub fn direct_sum(summands: &[ZmModule]) -> Result<DirectSum> {
    let modulus = match summands.first() {
        None => {
            return Err(Error::InputError(
                "direct sum of an empty family needs a modulus; use ZmModule::zero".into(),
            ))
        }
        Some(m) => m.modulus(),
    };
    for m in summands {
        if m.modulus() != modulus {
            return Err(Error::ModulusMismatch(modulus, m.modulus()));
        }
    }
    Ok(direct_sum_with_modulus(modulus, summands))
}

pub(crate) fn direct_sum_with_modulus(modulus: u64, summands: &[ZmModule]) -> DirectSum {
    let mut raw_orders = Vec::new();
    let mut offsets = Vec::new();
    for m in summands {
        offsets.push(raw_orders.len());
        raw_orders.extend_from_slice(m.orders());
    }
    let product = CyclicProduct::new(modulus, raw_orders.clone());
    let total = product.module.clone();
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    for (idx, m) in summands.iter().enumerate() {
        let offset = offsets[idx];
        // injection: canonical coordinates of each raw basis vector
        let mut inj_entries = vec![0u64; m.rank() * total.rank()];
        for j in 0..m.rank() {
            let mut raw = vec![0u64; raw_orders.len()];
            raw[offset + j] = 1;
            let canon = product.raw_to_canon(&raw);
            for (a, &v) in canon.iter().enumerate() {
                inj_entries[a * m.rank() + j] = v;
            }
        }
        injections.push(
            ModuleMorphism::new(m.clone(), total.clone(), inj_entries)
                .expect("injection is well defined"),
        );
        // projection: block of the inverse isomorphism
        let mut proj_entries = vec![0u64; total.rank() * m.rank()];
        for a in 0..total.rank() {
            let mut canon = vec![0u64; total.rank()];
            canon[a] = 1;
            let raw = product.canon_to_raw(&canon);
            for j in 0..m.rank() {
                proj_entries[j * total.rank() + a] = raw[offset + j] % m.orders()[j];
            }
        }
        projections.push(
            ModuleMorphism::new(total.clone(), m.clone(), proj_entries)
                .expect("projection is well defined"),
        );
    }
    DirectSum {
        module: total,
        injections,
        projections,
    }
}

/// Kernel of a morphism: the canonical module `K` with a monomorphism
/// `incl : K -> source(f)` whose image is the set-theoretic kernel.
pub fn kernel(f: &ModuleMorphism) -> (ZmModule, ModuleMorphism) {
    let m = f.source().modulus();
    let src = f.source().orders();
    let n = src.len();
    if n == 0 {
        let k = ZmModule::zero(m);
        let incl = ModuleMorphism::zero(k.clone(), f.source().clone());
        return (k, incl);
    }
    let gens = kernel_mod(&f.to_int_matrix(), src, f.target().orders())
        .expect("morphism shape is consistent");
    // lattice of integer solutions: kernel generators plus the source relations
    let mut cols: Vec<BigInt> = Vec::new();
    for g in &gens {
        for i in 0..n {
            cols.push(BigInt::from(g[i]));
        }
    }
    let k_count = gens.len();
    let mut lattice = IntMatrix::zero(n, k_count + n);
    for (c, chunk) in cols.chunks(n).enumerate() {
        for i in 0..n {
            lattice.set(i, c, chunk[i].clone());
        }
    }
    for j in 0..n {
        lattice.set(j, k_count + j, BigInt::from(src[j]));
    }
    let snf1 = smith_normal_form(&lattice);
    let diag1 = snf1.s.diag();
    debug_assert!(
        diag1.iter().all(|d| *d != BigInt::from(0)),
        "solution lattice has full rank"
    );
    // basis B of the lattice: columns s_i * u_i; express the relations in it
    let relations = IntMatrix::diagonal(&src.iter().map(|&d| BigInt::from(d)).collect::<Vec<_>>());
    let mut quotient = snf1.u_inv.mul(&relations);
    for i in 0..n {
        for j in 0..n {
            let e = quotient.get(i, j).clone();
            let (q, r) = num_integer::Integer::div_rem(&e, &diag1[i]);
            debug_assert!(
                num_traits::Zero::is_zero(&r),
                "relations lie in the lattice"
            );
            quotient.set(i, j, q);
        }
    }
    let snf2 = smith_normal_form(&quotient);
    let diag2 = snf2.s.diag();
    let kept: Vec<usize> = (0..n)
        .filter(|&i| diag2[i] > BigInt::from(1u64))
        .rev()
        .collect();
    let k_orders: Vec<u64> = kept
        .iter()
        .map(|&i| u64::try_from(&diag2[i]).expect("order fits u64"))
        .collect();
    let k_module = ZmModule {
        modulus: m,
        orders: k_orders,
    };
    // inclusion columns: B * u2 at the kept indices
    let mut incl_entries = vec![0u64; k_module.rank() * n];
    for (a, &i) in kept.iter().enumerate() {
        let u2_col = snf2.u.column(i);
        for row in 0..n {
            let mut acc = BigInt::from(0);
            for t in 0..n {
                // column t of B is s_t * (u1 column t)
                acc += snf1.u.get(row, t) * &diag1[t] * &u2_col[t];
            }
            incl_entries[row * k_module.rank() + a] = reduce_mod(&acc, src[row]);
        }
    }
    let incl = ModuleMorphism::new(k_module.clone(), f.source().clone(), incl_entries)
        .expect("kernel inclusion is well defined");
    debug_assert!(
        incl.then(f).is_zero_map(),
        "f composed with its kernel must vanish"
    );
    (k_module, incl)
}

/// Cokernel with its projection.
pub fn cokernel(f: &ModuleMorphism) -> (ZmModule, ModuleMorphism) {
    let (c, proj, _) = cokernel_data(f);
    (c, proj)
}

/// Cokernel together with a chosen set-theoretic section: for each canonical
/// generator of the cokernel, a representative element of the target in
/// target coordinates.
pub fn cokernel_data(f: &ModuleMorphism) -> (ZmModule, ModuleMorphism, Vec<Vec<u64>>) {
    let m = f.target().modulus();
    let tgt = f.target().orders();
    let r = tgt.len();
    if r == 0 {
        let c = ZmModule::zero(m);
        return (
            c.clone(),
            ModuleMorphism::zero(f.target().clone(), c),
            Vec::new(),
        );
    }
    let relations = IntMatrix::diagonal(&tgt.iter().map(|&d| BigInt::from(d)).collect::<Vec<_>>());
    let presented = f.to_int_matrix().hstack(&relations);
    let snf = smith_normal_form(&presented);
    let diag = snf.s.diag();
    let kept: Vec<usize> = (0..r)
        .filter(|&i| diag[i] > BigInt::from(1u64))
        .rev()
        .collect();
    let orders: Vec<u64> = kept
        .iter()
        .map(|&i| u64::try_from(&diag[i]).expect("order fits u64"))
        .collect();
    let c_module = ZmModule {
        modulus: m,
        orders: orders.clone(),
    };
    let mut proj_entries = vec![0u64; r * c_module.rank()];
    for (a, &i) in kept.iter().enumerate() {
        for j in 0..r {
            proj_entries[a * r + j] = reduce_mod(snf.u_inv.get(i, j), orders[a]);
        }
    }
    let proj = ModuleMorphism::new(f.target().clone(), c_module.clone(), proj_entries)
        .expect("cokernel projection is well defined");
    let section: Vec<Vec<u64>> = kept
        .iter()
        .map(|&i| {
            (0..r)
                .map(|t| reduce_mod(snf.u.get(t, i), tgt[t]))
                .collect()
        })
        .collect();
    debug_assert!(f.then(&proj).is_zero_map(), "projection kills the image");
    (c_module, proj, section)
}

/// Canonical form of the cokernel of an integer presentation matrix over
/// `Z/m`: the module `(Z/m)^rows / (columns of P)`.
pub fn decompose(presentation: &IntMatrix, modulus: u64) -> Result<ZmModule> {
    if modulus < 2 {
        return Err(Error::InputError(format!(
            "modulus must be >= 2, got {modulus}"
        )));
    }
    let r = presentation.rows();
    let relations = IntMatrix::diagonal(&vec![BigInt::from(modulus); r]);
    let snf = smith_normal_form(&presentation.hstack(&relations));
    let diag = snf.s.diag();
    let mut orders: Vec<u64> = (0..r)
        .filter(|&i| diag[i] > BigInt::from(1u64))
        .map(|i| u64::try_from(&diag[i]).expect("order fits u64"))
        .collect();
    orders.reverse();
    Ok(ZmModule { modulus, orders })
}

/// Parses the module literal syntax `Z4+Z2+Z2@4` (orders `[4,2,2]` over
/// modulus 4). The `@modulus` suffix may be omitted when a default modulus
/// is supplied; `0` denotes the zero module.
pub fn parse_module_literal(s: &str, default_modulus: Option<u64>) -> Result<ZmModule> {
    let s = s.trim();
    let (body, modulus) = match s.split_once('@') {
        Some((body, m)) => {
            let m: u64 = m
                .trim()
                .parse()
                .map_err(|_| Error::InputError(format!("bad modulus in literal {s}")))?;
            (body.trim(), m)
        }
        None => {
            let m = default_modulus
                .ok_or_else(|| Error::InputError(format!("literal {s} needs @modulus or --m")))?;
            (s, m)
        }
    };
    if body == "0" || body.is_empty() {
        return Ok(ZmModule::zero(modulus));
    }
    let mut orders = Vec::new();
    for part in body.split('+') {
        let part = part.trim();
        let digits = part
            .strip_prefix('Z')
            .or_else(|| part.strip_prefix('z'))
            .ok_or_else(|| Error::InputError(format!("bad factor {part} in literal {s}")))?;
        let d: u64 = digits
            .parse()
            .map_err(|_| Error::InputError(format!("bad factor {part} in literal {s}")))?;
        orders.push(d);
    }
    ZmModule::new(modulus, &orders)
}

/// Membership in `add(gens)`: every indecomposable (prime-power cyclic)
/// summand of `M` must occur as an indecomposable summand of some generator.
/// Correct over `Z/m` by Krull-Schmidt, where the indecomposables are the
/// `Z_{p^k}`.
pub fn is_in_add(m: &ZmModule, gens: &[ZmModule]) -> Result<bool> {
    let mut available = BTreeSet::new();
    for g in gens {
        if g.modulus() != m.modulus() {
            return Err(Error::ModulusMismatch(m.modulus(), g.modulus()));
        }
        available.extend(g.prime_power_parts());
    }
    Ok(m.prime_power_parts().is_subset(&available))
}
