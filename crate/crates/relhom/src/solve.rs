//! Linear solver for systems whose unknowns are module morphisms.
//!
//! A morphism `h : W -> K` is parametrized by one coordinate per Hom-basis
//! element, each living modulo the cyclic order of that basis element. Any
//! equation of the form `sum_k  A_k ∘ h_{u_k} ∘ B_k = C` (with `A_k`, `B_k`,
//! `C` fixed morphisms) is linear in those coordinates, so a whole family of
//! such equations assembles into one integer congruence system that
//! [`crate::linalg::solve_linear_mod`] decides exactly. Homotopy
//! construction, lifting through Hom-exact sequences, and the splitting of
//! relative quasi-isomorphisms all reduce to this.
//!
//! Assembling one global system instead of solving degree by degree matters:
//! the degreewise choices interact, and a greedy pass can fail where a global
//! solution exists.

use num_bigint::BigInt;

use crate::linalg::{solve_linear_mod, IntMatrix};
use crate::modules::{coords_to_morphism, hom_basis, HomBasisElem, ModuleMorphism, ZmModule};

#[derive(Debug, Clone)]
struct Unknown {
    source: ZmModule,
    target: ZmModule,
    basis: Vec<HomBasisElem>,
    offset: usize,
}

/// One `sign * A ∘ h ∘ B` summand of an equation. `pre` is `A` (post-composed,
/// may be omitted for the identity), `post` is `B` (pre-composed).
#[derive(Debug, Clone)]
pub(crate) struct Term<'a> {
    pub unknown: usize,
    pub pre: Option<&'a ModuleMorphism>,
    pub post: Option<&'a ModuleMorphism>,
    pub negated: bool,
}

impl<'a> Term<'a> {
    #[allow(dead_code)] // exercised from tests
    pub fn plain(unknown: usize) -> Self {
        Term {
            unknown,
            pre: None,
            post: None,
            negated: false,
        }
    }

    pub fn pre(unknown: usize, a: &'a ModuleMorphism) -> Self {
        Term {
            unknown,
            pre: Some(a),
            post: None,
            negated: false,
        }
    }

    pub fn post(unknown: usize, b: &'a ModuleMorphism) -> Self {
        Term {
            unknown,
            pre: None,
            post: Some(b),
            negated: false,
        }
    }

    pub fn negate(mut self) -> Self {
        self.negated = !self.negated;
        self
    }
}

#[derive(Debug, Default)]
pub(crate) struct MorphismSystem {
    unknowns: Vec<Unknown>,
    n_vars: usize,
    coefficients: Vec<Vec<BigInt>>,
    moduli: Vec<BigInt>,
    rhs: Vec<BigInt>,
}

impl MorphismSystem {
    pub fn new() -> Self {
        MorphismSystem::default()
    }

    /// Registers an unknown morphism `W -> K`, returning its handle.
    pub fn unknown(&mut self, source: &ZmModule, target: &ZmModule) -> usize {
        let basis = hom_basis(source, target);
        let offset = self.n_vars;
        self.n_vars += basis.len();
        self.unknowns.push(Unknown {
            source: source.clone(),
            target: target.clone(),
            basis,
            offset,
        });
        self.unknowns.len() - 1
    }

    /// Adds the equation `sum_k terms_k = rhs`, entrywise over `Hom(S, T)`
    /// where `S = rhs.source()` and `T = rhs.target()`.
    pub fn equation(&mut self, terms: &[Term<'_>], rhs: &ModuleMorphism) {
        let s_rank = rhs.source().rank();
        let t_orders = rhs.target().orders().to_vec();
        for term in terms {
            let u = &self.unknowns[term.unknown];
            if let Some(a) = term.pre {
                assert_eq!(a.source(), &u.target, "pre-factor source mismatch");
                assert_eq!(a.target(), rhs.target(), "pre-factor target mismatch");
            } else {
                assert_eq!(&u.target, rhs.target(), "unknown target mismatch");
            }
            if let Some(b) = term.post {
                assert_eq!(b.target(), &u.source, "post-factor target mismatch");
                assert_eq!(b.source(), rhs.source(), "post-factor source mismatch");
            } else {
                assert_eq!(&u.source, rhs.source(), "unknown source mismatch");
            }
        }
        for p in 0..t_orders.len() {
            for i in 0..s_rank {
                let mut row = vec![BigInt::from(0); self.n_vars];
                for term in terms {
                    let u = &self.unknowns[term.unknown];
                    for (t, b) in u.basis.iter().enumerate() {
                        // coefficient of coordinate t in entry (p, i):
                        // pre[p][b.row] * scale * post[b.col][i]
                        let pre_factor = match term.pre {
                            Some(a) => a.entry(p, b.row),
                            None => u64::from(p == b.row),
                        };
                        if pre_factor == 0 {
                            continue;
                        }
                        let post_factor = match term.post {
                            Some(m) => m.entry(b.col, i),
                            None => u64::from(b.col == i),
                        };
                        if post_factor == 0 {
                            continue;
                        }
                        let mut c = BigInt::from(pre_factor)
                            * BigInt::from(b.scale)
                            * BigInt::from(post_factor);
                        if term.negated {
                            c = -c;
                        }
                        row[u.offset + t] += c;
                    }
                }
                self.coefficients.push(row);
                self.moduli.push(BigInt::from(t_orders[p]));
                self.rhs.push(BigInt::from(rhs.entry(p, i)));
            }
        }
    }

    /// Solves the accumulated system. Returns one morphism per unknown, or
    /// `None` when the system has no solution. Deterministic: ties are broken
    /// by the Smith-form coordinates of the assembled system.
    pub fn solve(&self) -> Option<Vec<ModuleMorphism>> {
        let rows = self.coefficients.len();
        let mut entries = Vec::with_capacity(rows * self.n_vars);
        for row in &self.coefficients {
            entries.extend(row.iter().cloned());
        }
        let matrix = IntMatrix::new(rows, self.n_vars, entries).expect("assembled shape");
        let solution = solve_linear_mod(&matrix, &self.rhs, &self.moduli)
            .expect("assembled dimensions are consistent")?;
        let mut out = Vec::with_capacity(self.unknowns.len());
        for u in &self.unknowns {
            let coords: Vec<u64> = u
                .basis
                .iter()
                .enumerate()
                .map(|(t, b)| crate::linalg::reduce_mod(&solution[u.offset + t], b.order))
                .collect();
            out.push(coords_to_morphism(&u.source, &u.target, &u.basis, &coords));
        }
        Some(out)
    }
}

/// Factor `g` through a monomorphism: find `h` with `mono ∘ h = g`.
pub fn factor_through_mono(
    mono: &ModuleMorphism,
    g: &ModuleMorphism,
) -> crate::Result<ModuleMorphism> {
    let mut sys = MorphismSystem::new();
    let h = sys.unknown(g.source(), mono.source());
    sys.equation(&[Term::pre(h, mono)], g);
    sys.solve()
        .map(|mut v| v.swap_remove(h))
        .ok_or_else(|| crate::Error::NoPreimage(format!("{g} does not factor through {mono}")))
}

/// Lift `g` through an epimorphism (or any map with `g` in its postcomposition
/// image): find `h` with `epi ∘ h = g`.
pub fn lift_through_epi(epi: &ModuleMorphism, g: &ModuleMorphism) -> crate::Result<ModuleMorphism> {
    let mut sys = MorphismSystem::new();
    let h = sys.unknown(g.source(), epi.source());
    sys.equation(&[Term::pre(h, epi)], g);
    sys.solve()
        .map(|mut v| v.swap_remove(h))
        .ok_or_else(|| crate::Error::NoPreimage(format!("{g} does not lift through {epi}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{kernel, ZmModule};

    fn z(m: u64, orders: &[u64]) -> ZmModule {
        ZmModule::new(m, orders).unwrap()
    }

    #[test]
    fn factor_through_kernel_inclusion() {
        let z4 = z(4, &[4]);
        let times2 = ModuleMorphism::from_int_entries(z4.clone(), z4.clone(), &[2]).unwrap();
        let (_k, incl) = kernel(&times2);
        // x2 : Z4 -> Z4 lands in the kernel of x2, so it factors through incl
        let h = factor_through_mono(&incl, &times2).unwrap();
        assert_eq!(h.then(&incl), times2);
    }

    #[test]
    fn lift_through_reduction() {
        // Hom(Z4, -) applied to the reduction Z4 -> Z2 is surjective, so any
        // map from a free module lifts.
        let m = 4;
        let z4 = z(m, &[4]);
        let z2 = z(m, &[2]);
        let red = ModuleMorphism::from_int_entries(z4.clone(), z2.clone(), &[1]).unwrap();
        let g = ModuleMorphism::from_int_entries(z4.clone(), z2, &[1]).unwrap();
        let h = lift_through_epi(&red, &g).unwrap();
        assert_eq!(h.then(&red), g);
    }

    #[test]
    fn unsolvable_system_reports_no_preimage() {
        let m = 4;
        let z4 = z(m, &[4]);
        let z2 = z(m, &[2]);
        // x2 : Z2 -> Z4 is not surjective; the identity of Z4 cannot factor
        let incl = ModuleMorphism::from_int_entries(z2, z4.clone(), &[2]).unwrap();
        assert!(lift_through_epi(&incl, &ModuleMorphism::identity(&z4)).is_err());
    }

    #[test]
    fn two_unknown_system() {
        // solve f + g = id on Z4 with f constrained through x2
        let z4 = z(4, &[4]);
        let times2 = ModuleMorphism::from_int_entries(z4.clone(), z4.clone(), &[2]).unwrap();
        let mut sys = MorphismSystem::new();
        let f = sys.unknown(&z4, &z4);
        let g = sys.unknown(&z4, &z4);
        let id = ModuleMorphism::identity(&z4);
        sys.equation(&[Term::pre(f, &times2), Term::plain(g)], &id);
        let sol = sys.solve().expect("solvable");
        assert_eq!(sol[f].then(&times2).add(&sol[g]), id);
    }
}
