//! Relative Ext, Tate cohomology by two independent routes, and the long
//! exact sequences connecting them, each emitted together with machine
//! certificates (`im = ker` at every node, verified by order counting and
//! inclusion checks).

use std::collections::BTreeMap;
use std::fmt;

use crate::complexes::{
    cone, connecting_map, degreewise_kernel, hom_complex, homology, homology_data,
    induced_on_homology, induced_post, induced_pre, ChainMap, Complex, HomologyData,
};
use crate::modules::{
    coords_to_morphism, direct_sum_with_modulus, hom_basis, AbGroup, CyclicProduct, ModuleMorphism,
    ZmModule,
};
use crate::relative::{
    finite_proper_resolution, is_x_acyclic, lift_through, proper_resolution, x_pd, ComplexSes,
    ProperResolution, StageCertificate, SubcatDescriptor, XPd,
};
use crate::solve::{lift_through_epi, MorphismSystem, Term};
use crate::{Error, Result};

/// Which derived functor a table of groups belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtFlavor {
    Relative { subcat: String },
    Classical,
    Tate,
}

impl fmt::Display for ExtFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtFlavor::Relative { subcat } => write!(f, "relative({subcat})"),
            ExtFlavor::Classical => write!(f, "classical"),
            ExtFlavor::Tate => write!(f, "tate"),
        }
    }
}

/// A computed table of Ext groups, one per requested degree.
#[derive(Debug, Clone)]
pub struct ExtTable {
    pub flavor: ExtFlavor,
    pub entries: BTreeMap<i64, AbGroup>,
    pub depth_used: usize,
}

impl ExtTable {
    /// JSON form: `{"flavor":"tate","entries":{"1":[2],"2":[2]},"depth_used":6}`.
    pub fn to_json(&self) -> serde_json::Value {
        let flavor = match &self.flavor {
            ExtFlavor::Relative { subcat } => format!("relative:{subcat}"),
            ExtFlavor::Classical => "classical".to_string(),
            ExtFlavor::Tate => "tate".to_string(),
        };
        let mut entries = serde_json::Map::new();
        for (n, group) in &self.entries {
            entries.insert(n.to_string(), serde_json::json!(group.invariant_factors()));
        }
        serde_json::json!({
            "flavor": flavor,
            "entries": serde_json::Value::Object(entries),
            "depth_used": self.depth_used,
        })
    }

    /// CSV form with header `n,invariant_factors`; factors joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,invariant_factors\n");
        for (n, group) in &self.entries {
            let factors: Vec<String> = group
                .invariant_factors()
                .iter()
                .map(|e| e.to_string())
                .collect();
            out.push_str(&format!("{n},{}\n", factors.join(";")));
        }
        out
    }
}

/// `Ext^n` relative to `X`: homology of `Hom(resolution, N)` at `n`, with
/// the resolution built to depth `n + 2` so the answer sits inside the
/// trusted window.
///
/// Deliberately assembled as a plain cochain of Hom groups with
/// precomposition differentials, not through the general Hom-complex
/// machinery; the two routes cross-check each other.
pub fn relative_ext(
    m: &ZmModule,
    n_var: &ZmModule,
    degree: usize,
    x: &SubcatDescriptor,
) -> Result<AbGroup> {
    let res = resolution_for_ext(m, x, degree + 2)?;
    let complex = ext_cochain(&res.resolution, n_var);
    Ok(homology(&complex, degree as i64))
}

/// A proper resolution adequate for Ext up to the window: the finite
/// canonical one when the X-dimension certifies within the depth budget
/// (its components stay small), otherwise the canonical resolution cut at
/// the requested depth. Ext does not depend on the choice.
pub fn resolution_for_ext(
    m: &ZmModule,
    x: &SubcatDescriptor,
    depth: usize,
) -> Result<ProperResolution> {
    match x_pd(m, x, depth)? {
        XPd::Finite(_) => Ok(finite_proper_resolution(m, x, depth)?.0),
        XPd::AtLeast(_) => proper_resolution(m, x, depth),
    }
}

/// Table of relative Ext groups for `n = 0..=range`, sharing one resolution.
pub fn relative_ext_table(
    m: &ZmModule,
    n_var: &ZmModule,
    range: usize,
    x: &SubcatDescriptor,
) -> Result<ExtTable> {
    let depth = range + 2;
    let res = resolution_for_ext(m, x, depth)?;
    let complex = ext_cochain(&res.resolution, n_var);
    let entries = (0..=range as i64)
        .map(|n| (n, homology(&complex, n)))
        .collect();
    Ok(ExtTable {
        flavor: ExtFlavor::Relative {
            subcat: x.name().to_string(),
        },
        entries,
        depth_used: depth,
    })
}

/// The cochain `C^k = Hom(X^{-k}, N)` with differentials given by
/// precomposition with the resolution differentials.
fn ext_cochain(resolution: &Complex, n_var: &ZmModule) -> Complex {
    let m = resolution.modulus();
    let lo = resolution.lo();
    let top = -lo; // cochain degrees 0..=top
    let mut products = Vec::new();
    for k in 0..=top {
        let source = resolution.component(-k);
        let orders: Vec<u64> = hom_basis(&source, n_var).iter().map(|b| b.order).collect();
        products.push(CyclicProduct::new(m, orders));
    }
    let components: Vec<ZmModule> = products.iter().map(|p| p.module.clone()).collect();
    let mut differentials = Vec::new();
    for k in 0..top {
        let src_mod = &components[k as usize];
        let tgt_mod = &components[(k + 1) as usize];
        let src_obj = resolution.component(-k);
        let tgt_obj = resolution.component(-k - 1);
        let src_basis = hom_basis(&src_obj, n_var);
        let tgt_basis = hom_basis(&tgt_obj, n_var);
        let d = resolution.differential(-k - 1);
        let mut entries = vec![0u64; src_mod.rank() * tgt_mod.rank()];
        for a in 0..src_mod.rank() {
            let mut canon = vec![0u64; src_mod.rank()];
            canon[a] = 1;
            let raw = products[k as usize].canon_to_raw(&canon);
            let f = coords_to_morphism(&src_obj, n_var, &src_basis, &raw);
            let composed = d.then(&f);
            let out_raw = crate::modules::morphism_to_coords(&composed, &tgt_basis);
            let out = products[(k + 1) as usize].raw_to_canon(&out_raw);
            for (i, &v) in out.iter().enumerate() {
                entries[i * src_mod.rank() + a] = v;
            }
        }
        differentials.push(
            ModuleMorphism::new(src_mod.clone(), tgt_mod.clone(), entries)
                .expect("precomposition is well defined"),
        );
    }
    Complex::new(m, 0, components, differentials).expect("Ext cochain squares to zero")
}

/// Tate resolution data: a window of the totally acyclic complex `T`, the
/// proper resolution `W` it compares against, and the comparison `nu`,
/// bijective strictly below `bijective_below`.
#[derive(Debug, Clone)]
pub struct TateResolution {
    pub t: Complex,
    pub period: usize,
    /// isomorphisms `T^k -> T^{k+period}` realizing the periodicity, one
    /// per residue class starting at the window bottom; identities for the
    /// strand construction
    pub period_maps: Vec<ModuleMorphism>,
    pub w: ProperResolution,
    pub nu: ChainMap,
    pub module: ZmModule,
    pub bijective_below: i64,
}

/// Builds the complete (totally acyclic) resolution of `M` over `Z/m` with
/// respect to the projectives, on the window `[-window, window]`.
///
/// Each non-free cyclic factor `Z_d` contributes the 2-periodic strand
/// `... -> Z_m --d--> Z_m --m/d--> Z_m -> ...`; free factors contribute
/// nothing. `nu` is the identity in negative degrees and the slot inclusion
/// in degree 0.
pub fn complete_resolution(
    m: &ZmModule,
    w: &SubcatDescriptor,
    window: usize,
) -> Result<TateResolution> {
    if !w.is_projectives() {
        return Err(Error::UnsupportedSubcategory(format!(
            "complete resolutions are only built over the projectives, got {w}"
        )));
    }
    if m.modulus() != w.modulus() {
        return Err(Error::ModulusMismatch(m.modulus(), w.modulus()));
    }
    let modulus = m.modulus();
    let strands: Vec<u64> = m
        .orders()
        .iter()
        .copied()
        .filter(|&d| d < modulus)
        .collect();
    let slot_of_strand: Vec<usize> = m
        .orders()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d < modulus)
        .map(|(i, _)| i)
        .collect();
    let c = strands.len();
    let k = m.rank();
    let win = window as i64;

    // strand entry at degree deg: x d for odd degrees, x (m/d) for even
    let strand_entry = |deg: i64, d: u64| -> u64 {
        if deg.rem_euclid(2) == 1 {
            d
        } else {
            modulus / d
        }
    };

    // W: Z_m^k in degree 0, Z_m^c below, with diagonal strand maps
    let mut w_components: Vec<ZmModule> = Vec::new();
    let mut w_diffs: Vec<ModuleMorphism> = Vec::new();
    for deg in -win..=0 {
        let comp = if deg == 0 {
            ZmModule::free(modulus, k)
        } else {
            ZmModule::free(modulus, c)
        };
        w_components.push(comp);
    }
    for deg in -win..0 {
        let src = w_components[(deg + win) as usize].clone();
        let tgt = w_components[(deg + 1 + win) as usize].clone();
        let mut entries = vec![0u64; src.rank() * tgt.rank()];
        for (t, &d) in strands.iter().enumerate() {
            let row = if deg == -1 { slot_of_strand[t] } else { t };
            entries[row * src.rank() + t] = strand_entry(deg, d);
        }
        w_diffs.push(ModuleMorphism::new(src, tgt, entries).expect("strand map is well defined"));
    }
    let w_complex = Complex::new(modulus, -win, w_components, w_diffs)?;
    let mut aug_entries = vec![0u64; k * k];
    for i in 0..k {
        aug_entries[i * k + i] = 1;
    }
    let augmentation = ModuleMorphism::new(w_complex.component(0), m.clone(), aug_entries)?;
    let w_res = certify_resolution(m, w, w_complex.clone(), augmentation)?;

    // T: Z_m^c everywhere with the alternating strand maps
    let t_components: Vec<ZmModule> = (-win..=win).map(|_| ZmModule::free(modulus, c)).collect();
    let mut t_diffs = Vec::new();
    for deg in -win..win {
        let src = ZmModule::free(modulus, c);
        let tgt = ZmModule::free(modulus, c);
        let mut entries = vec![0u64; c * c];
        for (t, &d) in strands.iter().enumerate() {
            entries[t * c + t] = strand_entry(deg, d);
        }
        t_diffs.push(ModuleMorphism::new(src, tgt, entries).expect("strand map is well defined"));
    }
    let t_complex = Complex::new(modulus, -win, t_components, t_diffs)?;

    // nu: identity below zero, slot inclusion at zero
    let mut nu_components = BTreeMap::new();
    for deg in -win..0 {
        nu_components.insert(deg, ModuleMorphism::identity(&t_complex.component(deg)));
    }
    let mut incl_entries = vec![0u64; c * k];
    for (t, &slot) in slot_of_strand.iter().enumerate() {
        incl_entries[slot * c + t] = 1;
    }
    nu_components.insert(
        0,
        ModuleMorphism::new(
            t_complex.component(0),
            w_res.resolution.component(0),
            incl_entries,
        )?,
    );
    let nu = ChainMap::new(t_complex.clone(), w_res.resolution.clone(), nu_components)?;

    // verify total acyclicity on the window interior, both ways
    let from = -win + 2;
    let to = win - 1;
    for n in from..=to {
        if !homology(&t_complex, n).is_trivial() {
            return Err(Error::VerificationFailure(format!(
                "T not exact at degree {n}"
            )));
        }
    }
    for g in w.generators() {
        let covariant = hom_complex(&Complex::stalk(g.clone(), 0), &t_complex).complex;
        let contravariant = hom_complex(&t_complex, &Complex::stalk(g.clone(), 0)).complex;
        for n in from..=to {
            if !homology(&covariant, n).is_trivial() {
                return Err(Error::VerificationFailure(format!(
                    "Hom(G, T) not exact at degree {n}"
                )));
            }
            if !homology(&contravariant, -n).is_trivial() {
                return Err(Error::VerificationFailure(format!(
                    "Hom(T, G) not exact at degree {}",
                    -n
                )));
            }
        }
    }

    let period = if strands.iter().all(|&d| d * d == modulus) {
        1
    } else {
        2
    };
    // the strand construction is periodic on the nose
    let period_maps: Vec<ModuleMorphism> = (0..period as i64)
        .map(|k| {
            let src = t_complex.component(-win + k);
            if -win + k + period as i64 <= win {
                debug_assert_eq!(src, t_complex.component(-win + k + period as i64));
            }
            ModuleMorphism::identity(&src)
        })
        .collect();
    for deg in -win..win - period as i64 {
        debug_assert_eq!(
            t_complex.differential(deg),
            t_complex.differential(deg + period as i64),
            "strand periodicity"
        );
    }
    Ok(TateResolution {
        t: t_complex,
        period,
        period_maps,
        w: w_res,
        nu,
        module: m.clone(),
        bijective_below: 0,
    })
}

/// Wraps an explicitly built resolution complex into a certified
/// [`ProperResolution`]: reconstructs the stage maps, solves for the
/// Hom-surjectivity witnesses, and verifies exactness.
pub fn certify_resolution(
    m: &ZmModule,
    x: &SubcatDescriptor,
    resolution: Complex,
    augmentation: ModuleMorphism,
) -> Result<ProperResolution> {
    let depth = (-resolution.lo()) as usize;
    let mut syzygies = Vec::new();
    let mut certificates = Vec::new();
    let mut stage_map = augmentation.clone();
    for stage in 0..=depth {
        let degree = -(stage as i64);
        if !stage_map.is_surjective() {
            return Err(Error::VerificationFailure(format!(
                "stage map at degree {degree} is not surjective"
            )));
        }
        let mut witnesses = Vec::new();
        for (gi, g) in x.generators().iter().enumerate() {
            for (bi, b) in hom_basis(g, stage_map.target()).iter().enumerate() {
                let mut entries = vec![0u64; g.rank() * stage_map.target().rank()];
                entries[b.row * g.rank() + b.col] = b.scale;
                let basis_map =
                    ModuleMorphism::new(g.clone(), stage_map.target().clone(), entries)?;
                let preimage = lift_through_epi(&stage_map, &basis_map).map_err(|_| {
                    Error::VerificationFailure(format!(
                        "Hom(G{gi}, -) is not surjective at degree {degree}"
                    ))
                })?;
                witnesses.push((gi, bi, preimage));
            }
        }
        certificates.push(StageCertificate { degree, witnesses });
        let (k, incl) = crate::modules::kernel(&stage_map);
        syzygies.push(k.clone());
        if stage < depth {
            stage_map =
                crate::solve::factor_through_mono(&incl, &resolution.differential(degree - 1))
                    .map_err(|_| {
                        Error::VerificationFailure(format!(
                            "differential at degree {} does not land in the syzygy",
                            degree - 1
                        ))
                    })?;
        }
    }
    let res = ProperResolution {
        module: m.clone(),
        subcat: x.clone(),
        resolution,
        augmentation,
        depth,
        syzygies,
        certificates,
    };
    res.verify()?;
    Ok(res)
}

/// Tate cohomology through the complete resolution:
/// `H^n(Hom(T, N))`, defined for all integer degrees.
pub fn tate_ext_complete(
    m: &ZmModule,
    n_var: &ZmModule,
    degree: i64,
    window: usize,
) -> Result<AbGroup> {
    if (window as i64) < degree.abs() + 2 {
        return Err(Error::WindowTooSmall(format!(
            "degree {degree} needs window >= {}",
            degree.abs() + 2
        )));
    }
    let w = SubcatDescriptor::proj(m.modulus())?;
    let tate = complete_resolution(m, &w, window)?;
    let h = hom_complex(&tate.t, &Complex::stalk(n_var.clone(), 0)).complex;
    Ok(homology(&h, degree))
}

/// Tate cohomology through the cone of a lifting `W -> X` of the identity:
/// `H^{n+1}(Hom(cone(f), N))`, defined for `n >= 1`.
pub fn tate_ext_cone(
    m: &ZmModule,
    n_var: &ZmModule,
    degree: usize,
    x: &SubcatDescriptor,
    w: &SubcatDescriptor,
    depth: usize,
) -> Result<AbGroup> {
    if degree < 1 {
        return Err(Error::InputError(
            "the cone route is defined for n >= 1".into(),
        ));
    }
    if depth < degree + 3 {
        return Err(Error::WindowTooSmall(format!(
            "degree {degree} needs depth >= {}",
            degree + 3
        )));
    }
    if !x.contains_subcat(w) {
        return Err(Error::InputError(format!("{w} is not contained in {x}")));
    }
    let f = lift_identity_between_resolutions(m, x, w, depth)?;
    let c = cone(&f);
    let h = hom_complex(&c.complex, &Complex::stalk(n_var.clone(), 0)).complex;
    Ok(homology(&h, degree as i64 + 1))
}

/// Lifts the identity of `M` to a chain map from its proper `W`-resolution
/// to its (finite) proper `X`-resolution, through the augmented sequence.
fn lift_identity_between_resolutions(
    m: &ZmModule,
    x: &SubcatDescriptor,
    w: &SubcatDescriptor,
    depth: usize,
) -> Result<ChainMap> {
    let wres = proper_resolution(m, w, depth)?;
    let (xres, _d) = finite_proper_resolution(m, x, depth)?;
    lift_resolution_map(&wres, &xres, &ModuleMorphism::identity(m))
}

/// Comparison lift: a chain map between resolutions covering
/// `f0 : module(from) -> module(to)`.
pub fn lift_resolution_map(
    from: &ProperResolution,
    to: &ProperResolution,
    f0: &ModuleMorphism,
) -> Result<ChainMap> {
    let alpha = from.augmentation_map().then(&ChainMap::stalk_map(f0, 0));
    let to_aug = to.augmentation_map();
    let (_k, incl) = degreewise_kernel(&to_aug);
    let seq = ComplexSes::new(incl, to_aug)?;
    lift_through(&seq, &alpha, &to.subcat)
}

/// Short exact sequence of modules `0 -> N --f--> N' --g--> N'' -> 0`.
#[derive(Debug, Clone)]
pub struct ModuleSes {
    pub f: ModuleMorphism,
    pub g: ModuleMorphism,
}

impl ModuleSes {
    pub fn new(f: ModuleMorphism, g: ModuleMorphism) -> Result<Self> {
        if f.target() != g.source() {
            return Err(Error::InputError("sequence maps do not compose".into()));
        }
        if !f.then(&g).is_zero_map() {
            return Err(Error::InputError("composite g∘f is nonzero".into()));
        }
        if !f.is_injective() {
            return Err(Error::InputError("first map is not injective".into()));
        }
        if !g.is_surjective() {
            return Err(Error::InputError("second map is not surjective".into()));
        }
        if f.image_order() != g.kernel_order() {
            return Err(Error::InputError(
                "sequence is not exact in the middle".into(),
            ));
        }
        Ok(ModuleSes { f, g })
    }

    pub fn sub(&self) -> &ZmModule {
        self.f.source()
    }

    pub fn mid(&self) -> &ZmModule {
        self.f.target()
    }

    pub fn quot(&self) -> &ZmModule {
        self.g.target()
    }

    /// The sequence as a three-term complex in degrees -2, -1, 0.
    pub fn as_complex(&self) -> Complex {
        Complex::new(
            self.sub().modulus(),
            -2,
            vec![self.sub().clone(), self.mid().clone(), self.quot().clone()],
            vec![self.f.clone(), self.g.clone()],
        )
        .expect("a short exact sequence is a complex")
    }

    /// Split sequence `0 -> A -> A ⊕ B -> B -> 0`.
    pub fn split(a: &ZmModule, b: &ZmModule) -> Result<Self> {
        let sum = crate::modules::direct_sum(&[a.clone(), b.clone()])?;
        ModuleSes::new(sum.injections[0].clone(), sum.projections[1].clone())
    }
}

/// One group in an emitted sequence.
#[derive(Debug, Clone)]
pub struct SequenceNode {
    pub label: String,
    pub group: AbGroup,
    pub module: ZmModule,
}

/// Exactness certificate at one node: the composite of the neighboring maps
/// vanishes and `|im| = |ker|`.
#[derive(Debug, Clone)]
pub struct NodeCertificate {
    pub node: usize,
    pub composite_zero: bool,
    pub image_order: num_bigint::BigInt,
    pub kernel_order: num_bigint::BigInt,
    pub exact: bool,
}

/// A verified exact sequence: groups, the maps between them, and one
/// certificate per node that has both neighbors (the node before the first
/// map counts, with zero incoming).
#[derive(Debug, Clone)]
pub struct LongExactSequence {
    pub nodes: Vec<SequenceNode>,
    pub maps: Vec<ModuleMorphism>,
    pub certificates: Vec<NodeCertificate>,
    pub all_exact: bool,
}

fn verify_nodes(nodes: &[SequenceNode], maps: &[ModuleMorphism]) -> (Vec<NodeCertificate>, bool) {
    let mut certs = Vec::new();
    let mut all = true;
    for i in 0..maps.len() {
        let image_order = if i == 0 {
            num_bigint::BigInt::from(1)
        } else {
            maps[i - 1].image_order()
        };
        let kernel_order = maps[i].kernel_order();
        let composite_zero = if i == 0 {
            true
        } else {
            maps[i - 1].then(&maps[i]).is_zero_map()
        };
        let exact = composite_zero && image_order == kernel_order;
        all &= exact;
        certs.push(NodeCertificate {
            node: i,
            composite_zero,
            image_order,
            kernel_order,
            exact,
        });
    }
    let _ = nodes;
    (certs, all)
}

/// Covariant long exact sequence: for an X-acyclic `0 -> N -> N' -> N'' -> 0`
/// and `M`, the sequence `... Ext^n(M,N) -> Ext^n(M,N') -> Ext^n(M,N'') ->
/// Ext^{n+1}(M,N) ...` with connecting maps from the snake construction on
/// the degreewise-exact Hom sequence.
pub fn les_covariant(
    m: &ZmModule,
    seq: &ModuleSes,
    x: &SubcatDescriptor,
    range: usize,
) -> Result<LongExactSequence> {
    if !is_x_acyclic(&seq.as_complex(), x) {
        return Err(Error::NotXAcyclicInput);
    }
    let res = resolution_for_ext(m, x, range + 3)?;
    let ha = hom_complex(&res.resolution, &Complex::stalk(seq.sub().clone(), 0));
    let hb = hom_complex(&res.resolution, &Complex::stalk(seq.mid().clone(), 0));
    let hc = hom_complex(&res.resolution, &Complex::stalk(seq.quot().clone(), 0));
    let u = induced_post(&ha, &hb, &seq.f)?;
    let v = induced_post(&hb, &hc, &seq.g)?;
    let max_n = range as i64 + 1;
    let data_a: Vec<HomologyData> = (0..=max_n).map(|n| homology_data(&ha.complex, n)).collect();
    let data_b: Vec<HomologyData> = (0..=max_n).map(|n| homology_data(&hb.complex, n)).collect();
    let data_c: Vec<HomologyData> = (0..=max_n).map(|n| homology_data(&hc.complex, n)).collect();
    let mut nodes = Vec::new();
    let mut maps = Vec::new();
    for n in 0..=max_n {
        let i = n as usize;
        nodes.push(node(format!("Ext^{n}_{}(M,N)", x.name()), &data_a[i]));
        maps.push(induced_on_homology(&u, &data_a[i], &data_b[i])?);
        nodes.push(node(format!("Ext^{n}_{}(M,N')", x.name()), &data_b[i]));
        maps.push(induced_on_homology(&v, &data_b[i], &data_c[i])?);
        nodes.push(node(format!("Ext^{n}_{}(M,N'')", x.name()), &data_c[i]));
        if n < max_n {
            maps.push(connecting_map(&u, &v, &data_c[i], &data_a[i + 1])?);
        }
    }
    finish_les(nodes, maps, range)
}

/// Contravariant long exact sequence: `... Ext^n(N'',M) -> Ext^n(N',M) ->
/// Ext^n(N,M) -> Ext^{n+1}(N'',M) ...`.
///
/// The functorial maps come from comparison lifts between the canonical
/// resolutions; the connecting maps come from the snake construction on the
/// degreewise-split Hom sequence of a horseshoe resolution of the middle
/// term. Two independent lifts are compared on homology before the maps are
/// trusted.
pub fn les_contravariant(
    seq: &ModuleSes,
    m: &ZmModule,
    x: &SubcatDescriptor,
    range: usize,
) -> Result<LongExactSequence> {
    if !is_x_acyclic(&seq.as_complex(), x) {
        return Err(Error::NotXAcyclicInput);
    }
    let depth = range + 3;
    let rn = resolution_for_ext(seq.sub(), x, depth)?;
    let rn1 = resolution_for_ext(seq.mid(), x, depth)?;
    let rn2 = resolution_for_ext(seq.quot(), x, depth)?;
    let stalk_m = Complex::stalk(m.clone(), 0);
    let h_n = hom_complex(&rn.resolution, &stalk_m);
    let h_n1 = hom_complex(&rn1.resolution, &stalk_m);
    let h_n2 = hom_complex(&rn2.resolution, &stalk_m);

    // functorial maps via comparison lifts
    let f_lift = lift_resolution_map(&rn, &rn1, &seq.f)?;
    let g_lift = lift_resolution_map(&rn1, &rn2, &seq.g)?;
    let a_map = induced_pre(&h_n2, &h_n1, &g_lift)?; // Ext(g, M)
    let b_map = induced_pre(&h_n1, &h_n, &f_lift)?; // Ext(f, M)

    // horseshoe resolution of the middle term for the connecting maps
    let (iota, rho) = horseshoe(seq, &rn, &rn2)?;
    let h_d = hom_complex(iota.target(), &stalk_m);
    let u = induced_pre(&h_n2, &h_d, &rho)?;
    let v = induced_pre(&h_d, &h_n, &iota)?;

    let max_n = range as i64 + 1;
    let data_n: Vec<HomologyData> = (0..=max_n)
        .map(|n| homology_data(&h_n.complex, n))
        .collect();
    let data_n1: Vec<HomologyData> = (0..=max_n)
        .map(|n| homology_data(&h_n1.complex, n))
        .collect();
    let data_n2: Vec<HomologyData> = (0..=max_n)
        .map(|n| homology_data(&h_n2.complex, n))
        .collect();

    // a second, independent lift must induce the same maps on homology
    let g_lift2 = perturb_lift(&g_lift);
    for n in 0..=max_n {
        let i = n as usize;
        let first = induced_on_homology(
            &induced_pre(&h_n2, &h_n1, &g_lift)?,
            &data_n2[i],
            &data_n1[i],
        )?;
        let second = induced_on_homology(
            &induced_pre(&h_n2, &h_n1, &g_lift2)?,
            &data_n2[i],
            &data_n1[i],
        )?;
        if first != second {
            return Err(Error::VerificationFailure(
                "two lifts of g induce different maps on cohomology".into(),
            ));
        }
    }

    let mut nodes = Vec::new();
    let mut maps = Vec::new();
    for n in 0..=max_n {
        let i = n as usize;
        nodes.push(node(format!("Ext^{n}_{}(N'',M)", x.name()), &data_n2[i]));
        maps.push(induced_on_homology(&a_map, &data_n2[i], &data_n1[i])?);
        nodes.push(node(format!("Ext^{n}_{}(N',M)", x.name()), &data_n1[i]));
        maps.push(induced_on_homology(&b_map, &data_n1[i], &data_n[i])?);
        nodes.push(node(format!("Ext^{n}_{}(N,M)", x.name()), &data_n[i]));
        if n < max_n {
            maps.push(connecting_map(&u, &v, &data_n[i], &data_n2[i + 1])?);
        }
    }
    finish_les(nodes, maps, range)
}

fn node(label: String, data: &HomologyData) -> SequenceNode {
    SequenceNode {
        label,
        group: data.group.clone(),
        module: data.module.clone(),
    }
}

fn finish_les(
    nodes: Vec<SequenceNode>,
    maps: Vec<ModuleMorphism>,
    range: usize,
) -> Result<LongExactSequence> {
    let (certs, all) = verify_nodes(&nodes, &maps);
    // trim the working margin: report through Ext^range of the last column
    let keep_nodes = 3 * (range + 1);
    let keep_maps = keep_nodes - 1;
    let nodes: Vec<SequenceNode> = nodes.into_iter().take(keep_nodes).collect();
    let maps: Vec<ModuleMorphism> = maps.into_iter().take(keep_maps).collect();
    let certificates: Vec<NodeCertificate> =
        certs.into_iter().filter(|c| c.node < keep_maps).collect();
    let all_exact = all && certificates.iter().all(|c| c.exact);
    if !all_exact {
        return Err(Error::VerificationFailure(
            "an exactness certificate failed in the long exact sequence".into(),
        ));
    }
    Ok(LongExactSequence {
        nodes,
        maps,
        certificates,
        all_exact,
    })
}

/// A different valid lift: add the boundary of a deterministic homotopy-like
/// family to the given one.
fn perturb_lift(lift: &ChainMap) -> ChainMap {
    let x = lift.source().clone();
    let y = lift.target().clone();
    let mut comps = BTreeMap::new();
    // s^k : X^k -> Y^{k-1}: first hom basis element of each degree
    let mut s: BTreeMap<i64, ModuleMorphism> = BTreeMap::new();
    for k in x.lo()..=x.hi() + 1 {
        let src = x.component(k);
        let tgt = y.component(k - 1);
        let basis = hom_basis(&src, &tgt);
        let morphism = match basis.first() {
            Some(b) => {
                let mut entries = vec![0u64; src.rank() * tgt.rank()];
                entries[b.row * src.rank() + b.col] = b.scale;
                ModuleMorphism::new(src, tgt, entries).expect("basis morphism")
            }
            None => ModuleMorphism::zero(src, tgt),
        };
        s.insert(k, morphism);
    }
    for k in x.lo()..=x.hi() {
        let boundary = s[&k]
            .then(&y.differential(k - 1))
            .add(&x.differential(k).then(&s[&(k + 1)]));
        comps.insert(k, lift.component(k).add(&boundary));
    }
    ChainMap::new(x, y, comps).expect("boundary perturbation stays a chain map")
}

/// Horseshoe: a degreewise-split resolution of the middle term built from
/// resolutions of the outer terms, with the block inclusion and projection.
fn horseshoe(
    seq: &ModuleSes,
    rn: &ProperResolution,
    rn2: &ProperResolution,
) -> Result<(ChainMap, ChainMap)> {
    let m = seq.sub().modulus();
    // the horseshoe must cover the deeper of the two windows: one side may
    // be a finite resolution while the other runs to full depth
    let lo = rn.resolution.lo().min(rn2.resolution.lo());
    let mut sums = BTreeMap::new();
    let mut components = Vec::new();
    for deg in lo..=0 {
        let sum = direct_sum_with_modulus(
            m,
            &[rn.resolution.component(deg), rn2.resolution.component(deg)],
        );
        components.push(sum.module.clone());
        sums.insert(deg, sum);
    }
    // h : RN''^0 -> N' with g h = aug''
    let h = lift_through_epi(&seq.g, &rn2.augmentation).map_err(|_| Error::NotXAcyclicInput)?;
    // correction maps tau^k : RN''^k -> RN^{k+1}
    let f_aug = rn.augmentation.then(&seq.f); // RN^0 -> N'
    let mut taus: BTreeMap<i64, ModuleMorphism> = BTreeMap::new();
    for deg in (lo..0).rev() {
        let src = rn2.resolution.component(deg);
        let rhs = if deg == -1 {
            rn2.resolution.differential(-1).then(&h).neg()
        } else {
            rn2.resolution
                .differential(deg)
                .then(&taus[&(deg + 1)])
                .neg()
        };
        let mut sys = MorphismSystem::new();
        let tau = sys.unknown(&src, &rn.resolution.component(deg + 1));
        let through = if deg == -1 {
            f_aug.clone()
        } else {
            rn.resolution.differential(deg + 1)
        };
        sys.equation(&[Term::pre(tau, &through)], &rhs);
        let sol = sys
            .solve()
            .ok_or_else(|| Error::VerificationFailure("horseshoe correction unsolvable".into()))?;
        taus.insert(deg, sol.into_iter().next().expect("one unknown"));
    }
    let mut differentials = Vec::new();
    for deg in lo..0 {
        let s = &sums[&deg];
        let s_next = &sums[&(deg + 1)];
        let d = s.projections[0]
            .then(&rn.resolution.differential(deg))
            .then(&s_next.injections[0])
            .add(
                &s.projections[1]
                    .then(&rn2.resolution.differential(deg))
                    .then(&s_next.injections[1]),
            )
            .add(
                &s.projections[1]
                    .then(&taus[&deg])
                    .then(&s_next.injections[0]),
            );
        differentials.push(d);
    }
    let d_complex = Complex::new(m, lo, components, differentials)?;
    let iota = ChainMap::new(
        rn.resolution.clone(),
        d_complex.clone(),
        (lo..=0)
            .map(|deg| (deg, sums[&deg].injections[0].clone()))
            .collect(),
    )?;
    let rho = ChainMap::new(
        d_complex,
        rn2.resolution.clone(),
        (lo..=0)
            .map(|deg| (deg, sums[&deg].projections[1].clone()))
            .collect(),
    )?;
    Ok((iota, rho))
}

/// The interlaced exact sequence
/// `0 -> Ext^1_X -> Ext^1_W -> TateExt^1_W -> Ext^2_X -> ...` up to
/// `TateExt^d_W -> 0`, where `d` is the (finite) X-projective dimension of
/// `M`, assembled from the triangle `W -> X -> cone -> W[1]` and verified
/// node by node.
#[derive(Debug, Clone)]
pub struct AmSequence {
    pub d: usize,
    pub sequence: LongExactSequence,
    /// the boundary fact `H^1(Hom(cone f, N)) = 0`
    pub h1_cone_trivial: bool,
    /// `Ext^{d+1}_X(M, N) = 0` (and beyond, within the window)
    pub ext_x_vanishes_past_d: bool,
    /// the Tate column agrees with the complete-resolution route
    pub tate_route_agreement: bool,
    /// the Ext columns agree with `relative_ext` recomputed from scratch
    pub ext_columns_agree: bool,
}

pub fn am_sequence(
    m: &ZmModule,
    n_var: &ZmModule,
    x: &SubcatDescriptor,
    w: &SubcatDescriptor,
    depth: usize,
) -> Result<AmSequence> {
    if !x.contains_subcat(w) {
        return Err(Error::InputError(format!("{w} is not contained in {x}")));
    }
    let XPd::Finite(d) = x_pd(m, x, depth)? else {
        return Err(Error::PdExceedsBudget(depth));
    };
    if depth < d + 3 {
        return Err(Error::WindowTooSmall(format!(
            "depth must be at least {}",
            d + 3
        )));
    }
    let emit_max = if d == 0 { (depth - 3).max(1) } else { d };

    let wres = proper_resolution(m, w, depth)?;
    let (xres, _) = finite_proper_resolution(m, x, depth)?;
    let f = lift_resolution_map(&wres, &xres, &ModuleMorphism::identity(m))?;
    let c = cone(&f);
    let stalk_n = Complex::stalk(n_var.clone(), 0);
    let w_shifted = wres.resolution.shift(1);
    let ha = hom_complex(&w_shifted, &stalk_n);
    let hb = hom_complex(&c.complex, &stalk_n);
    let hc = hom_complex(&xres.resolution, &stalk_n);
    let u = induced_pre(&ha, &hb, &c.to_shifted_source)?;
    let v = induced_pre(&hb, &hc, &c.from_target)?;

    let top = emit_max as i64 + 1;
    let data_a: Vec<HomologyData> = (0..=top).map(|n| homology_data(&ha.complex, n)).collect();
    let data_b: Vec<HomologyData> = (0..=top).map(|n| homology_data(&hb.complex, n)).collect();
    let data_c: Vec<HomologyData> = (0..=top).map(|n| homology_data(&hc.complex, n)).collect();

    let h1_cone_trivial = data_b[1].group.is_trivial();
    if !h1_cone_trivial {
        return Err(Error::VerificationFailure(
            "H^1(Hom(cone f, N)) is nonzero".into(),
        ));
    }
    let ext_x_vanishes_past_d =
        ((d + 1) as i64..=top).all(|n| homology(&hc.complex, n).is_trivial());

    // assemble: Ext^n_X = H^n(C), Ext^n_W = H^{n+1}(A), TateExt^n = H^{n+1}(B)
    let mut nodes = Vec::new();
    let mut maps = Vec::new();
    for n in 1..=emit_max {
        let i = n as i64 as usize;
        nodes.push(node(format!("Ext^{n}_{}(M,N)", x.name()), &data_c[i]));
        maps.push(connecting_map(&u, &v, &data_c[i], &data_a[i + 1])?);
        nodes.push(node(format!("Ext^{n}_{}(M,N)", w.name()), &data_a[i + 1]));
        maps.push(induced_on_homology(&u, &data_a[i + 1], &data_b[i + 1])?);
        nodes.push(node(
            format!("TateExt^{n}_{}(M,N)", w.name()),
            &data_b[i + 1],
        ));
        maps.push(induced_on_homology(&v, &data_b[i + 1], &data_c[i + 1])?);
    }
    // trailing node: Ext^{emit_max+1}_X, zero when d is honest
    nodes.push(node(
        format!("Ext^{}_{}(M,N)", emit_max + 1, x.name()),
        &data_c[emit_max + 1],
    ));
    let (certificates, all_exact) = verify_nodes(&nodes, &maps);
    if !all_exact {
        return Err(Error::VerificationFailure(
            "an exactness certificate failed in the interlaced sequence".into(),
        ));
    }
    let sequence = LongExactSequence {
        nodes,
        maps,
        certificates,
        all_exact,
    };

    // cross-route verification
    let mut tate_route_agreement = true;
    if w.is_projectives() {
        for n in 1..=emit_max {
            let complete = tate_ext_complete(m, n_var, n as i64, depth)?;
            if complete != data_b[n + 1].group {
                tate_route_agreement = false;
            }
        }
    }
    let mut ext_columns_agree = true;
    for n in 1..=emit_max {
        if relative_ext(m, n_var, n, x)? != data_c[n].group {
            ext_columns_agree = false;
        }
        if relative_ext(m, n_var, n, w)? != data_a[n + 1].group {
            ext_columns_agree = false;
        }
    }
    if !(tate_route_agreement && ext_columns_agree) {
        return Err(Error::VerificationFailure(
            "route agreement failed between the sequence terms and the direct computations".into(),
        ));
    }
    Ok(AmSequence {
        d,
        sequence,
        h1_cone_trivial,
        ext_x_vanishes_past_d,
        tate_route_agreement,
        ext_columns_agree,
    })
}
