//! Hyperoperads whose algebras are operads.
//!
//! The generators live over a category of colors `K`. They are spanned by
//! seeds `(S₀, T₀; i, f)` acted on freely by `K` in the two inputs and the
//! output, then divided by the equivariance relation. The three
//! associativity families are imposed as quadratic relations. With
//! `K = Σ` the algebras are single-colored symmetric operads; with `K` the
//! scheme category of `C` they are `C`-operads.

use crate::collection::{act_morphism, act_target, act_vec, sigma_map, sigma_vec, slot_generators, slot_morphisms, Collection, NsCollection, Slot, SymCollection};
use crate::endalg::{check_algebra, end_operad, CFunctor, EndError, EndOperad, Images, Presentation};
use crate::fincat::{scheme_category, sigma_cat, sigma_mor_perm, CatError, LinearCat, Mor, Obj, Scheme, SchemeMorphism};
use crate::linalg::{BasedSpace, LinMap, SVec};
use crate::operad::{check_operad, from_partial_f, to_partial_f, COperad, Operad, PartialFPresentation, Quotient};
use crate::perm::Perm;
use crate::report::Report;
use crate::tensor::AssocCase;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HyperError {
    #[error(transparent)]
    Cat(#[from] CatError),
    #[error(transparent)]
    End(#[from] EndError),
    #[error("{0}")]
    Invalid(String),
}

/// The permutation category `Σ` truncated at `n ≤ bound`, with lookups.
#[derive(Debug)]
pub struct SigmaColors {
    cat: Arc<LinearCat>,
    bound: usize,
    perm_of: Vec<Perm>,
    mor_of: HashMap<(usize, Perm), Mor>,
}

impl SigmaColors {
    pub fn new(bound: usize) -> Self {
        let cat = Arc::new(sigma_cat(bound));
        let perm_of: Vec<Perm> = (0..cat.morphisms().len()).map(|m| sigma_mor_perm(&cat, m)).collect();
        let mor_of = perm_of.iter().enumerate().map(|(m, p)| ((cat.mor(m).src, p.clone()), m)).collect();
        SigmaColors { cat, bound, perm_of, mor_of }
    }

    pub fn mor(&self, n: usize, p: &Perm) -> Mor {
        self.mor_of[&(n, p.clone())]
    }

    pub fn perm(&self, m: Mor) -> &Perm {
        &self.perm_of[m]
    }
}

/// The category of schemes of a linearized category, with lookups.
#[derive(Debug)]
pub struct SchemeColors {
    base: Arc<LinearCat>,
    cat: Arc<LinearCat>,
    bound: usize,
    schemes: Vec<Scheme>,
    obj_of: HashMap<Scheme, Obj>,
    morphs: Vec<SchemeMorphism>,
    mor_of: HashMap<SchemeMorphism, Mor>,
}

impl SchemeColors {
    pub fn new(base: Arc<LinearCat>, bound: usize) -> Result<Self, HyperError> {
        let (cat, schemes, morphs) = scheme_category(&base, bound)?;
        let obj_of = schemes.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mor_of = morphs.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(SchemeColors { base, cat: Arc::new(cat), bound, schemes, obj_of, morphs, mor_of })
    }

    pub fn base(&self) -> &Arc<LinearCat> {
        &self.base
    }

    pub fn scheme(&self, o: Obj) -> &Scheme {
        &self.schemes[o]
    }

    pub fn object(&self, s: &Scheme) -> Option<Obj> {
        self.obj_of.get(s).copied()
    }

    pub fn morphism(&self, m: Mor) -> &SchemeMorphism {
        &self.morphs[m]
    }

    pub fn mor_index(&self, m: &SchemeMorphism) -> Option<Mor> {
        self.mor_of.get(m).copied()
    }
}

/// Category of colors of a hyperoperad.
#[derive(Debug)]
pub enum Colors {
    Sigma(SigmaColors),
    Schemes(SchemeColors),
}

/// A generating seed `∗_slot^f: (s, t) → u` with `u = s ∘_slot t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed {
    pub s: Obj,
    pub t: Obj,
    pub u: Obj,
    pub slot: usize,
    pub f: Option<Mor>,
}

impl Colors {
    pub fn cat(&self) -> &Arc<LinearCat> {
        match self {
            Colors::Sigma(c) => &c.cat,
            Colors::Schemes(c) => &c.cat,
        }
    }

    pub fn bound(&self) -> usize {
        match self {
            Colors::Sigma(c) => c.bound,
            Colors::Schemes(c) => c.bound,
        }
    }

    pub fn arity(&self, o: Obj) -> usize {
        match self {
            Colors::Sigma(_) => o,
            Colors::Schemes(c) => c.schemes[o].arity(),
        }
    }

    /// Color of `s ∘_i t`, if within the bound.
    pub fn insert(&self, s: Obj, i: usize, t: Obj) -> Option<Obj> {
        if i >= self.arity(s) {
            return None;
        }
        match self {
            Colors::Sigma(c) => (s + t - 1 <= c.bound).then_some(s + t - 1),
            Colors::Schemes(c) => c.object(&c.schemes[s].insert(i, &c.schemes[t])),
        }
    }

    /// Decorations of seeds at `(s, t)` in slot `i`.
    pub fn decorations(&self, s: Obj, i: usize, t: Obj) -> Vec<Option<Mor>> {
        match self {
            Colors::Sigma(_) => vec![None],
            Colors::Schemes(c) => c.base.hom(c.schemes[t].output, c.schemes[s].inputs[i]).iter().map(|&f| Some(f)).collect(),
        }
    }

    /// The seed and output morphism `ρ` equated with `(seed; a1, a2; id)`.
    pub fn eq_target(&self, seed: &Seed, a1: Mor, a2: Mor) -> Result<(Seed, Mor), HyperError> {
        match self {
            Colors::Sigma(c) => {
                let (sigma, tau) = (c.perm(a1), c.perm(a2));
                let target = Seed { slot: sigma.apply(seed.slot), ..seed.clone() };
                Ok((target, c.mor(seed.u, &sigma.block_insert(seed.slot, tau))))
            }
            Colors::Schemes(c) => {
                let (m1, m2) = (&c.morphs[a1], &c.morphs[a2]);
                let i = seed.slot;
                let f = seed.f.ok_or_else(|| HyperError::Invalid("undecorated seed over schemes".into()))?;
                let b = &c.base;
                let fh = b.compose(f, m2.output_map).unwrap_or_default();
                let full = b.compose_vec(&SVec::unit(m1.input_maps[i]), &fh);
                let (big_f, _) = full.leading().ok_or_else(|| HyperError::Invalid("decoration composite vanishes".into()))?;
                let j = m1.perm.apply(i);
                let (s, t) = (&m1.source, &m2.source);
                let u_new = s.insert(j, t);
                let u_old = &c.schemes[seed.u];
                let mut input_maps = m1.input_maps[..i].to_vec();
                input_maps.extend_from_slice(&m2.input_maps);
                input_maps.extend_from_slice(&m1.input_maps[i + 1..]);
                let rho = SchemeMorphism {
                    source: u_new.clone(),
                    target: u_old.clone(),
                    perm: m1.perm.block_insert(i, &m2.perm),
                    input_maps,
                    output_map: m1.output_map,
                };
                rho.validate(b)?;
                let target = Seed {
                    s: c.cat.mor(a1).src,
                    t: c.cat.mor(a2).src,
                    u: c.object(&u_new).ok_or_else(|| HyperError::Invalid("color out of bound".into()))?,
                    slot: j,
                    f: Some(big_f),
                };
                let r = c.mor_index(&rho).ok_or_else(|| HyperError::Invalid("missing scheme morphism".into()))?;
                Ok((target, r))
            }
        }
    }

    pub fn seed_label(&self, seed: &Seed) -> String {
        let k = self.cat();
        match (self, seed.f) {
            (Colors::Schemes(c), Some(f)) => format!("∗{}^{}({},{})", seed.slot, c.base.mor_name(f), k.object_name(seed.s), k.object_name(seed.t)),
            _ => format!("∗{}({},{})", seed.slot, k.object_name(seed.s), k.object_name(seed.t)),
        }
    }
}

/// Basis element `(seed; a1, a2; out)` of the freely generated collection:
/// `a1: S → s`, `a2: T → t`, `out: u → U`, living at `(S T; U)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeGen {
    pub seed: usize,
    pub a1: Mor,
    pub a2: Mor,
    pub out: Mor,
}

/// The collection freely generated by the seeds under the `K`-actions.
pub struct FreeGenerators {
    colors: Arc<Colors>,
    seeds: Vec<Seed>,
    seed_index: HashMap<Seed, usize>,
    basis: BTreeMap<Scheme, Vec<FreeGen>>,
    index: HashMap<Scheme, HashMap<FreeGen, usize>>,
}

impl FreeGenerators {
    pub fn new(colors: Arc<Colors>) -> Self {
        let k = colors.cat().clone();
        let nobj = k.num_objects();
        let mut seeds = Vec::new();
        for s in 0..nobj {
            for t in 0..nobj {
                for i in 0..colors.arity(s) {
                    if let Some(u) = colors.insert(s, i, t) {
                        for f in colors.decorations(s, i, t) {
                            seeds.push(Seed { s, t, u, slot: i, f });
                        }
                    }
                }
            }
        }
        let seed_index = seeds.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut incoming: Vec<Vec<Mor>> = vec![Vec::new(); nobj];
        let mut outgoing: Vec<Vec<Mor>> = vec![Vec::new(); nobj];
        for (m, d) in k.morphisms().iter().enumerate() {
            incoming[d.tgt].push(m);
            outgoing[d.src].push(m);
        }
        let mut basis: BTreeMap<Scheme, Vec<FreeGen>> = BTreeMap::new();
        for (si, seed) in seeds.iter().enumerate() {
            for &a1 in &incoming[seed.s] {
                for &a2 in &incoming[seed.t] {
                    for &out in &outgoing[seed.u] {
                        let sch = Scheme::new(vec![k.mor(a1).src, k.mor(a2).src], k.mor(out).tgt);
                        basis.entry(sch).or_default().push(FreeGen { seed: si, a1, a2, out });
                    }
                }
            }
        }
        for v in basis.values_mut() {
            v.sort_by_key(|g| (!k.is_identity(g.a1), !k.is_identity(g.a2), g.seed, g.a1, g.a2, g.out));
        }
        let index = basis.iter().map(|(s, v)| (s.clone(), v.iter().enumerate().map(|(i, g)| (*g, i)).collect())).collect();
        FreeGenerators { colors, seeds, seed_index, basis, index }
    }

    pub fn colors(&self) -> &Arc<Colors> {
        &self.colors
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn seed_index(&self, seed: &Seed) -> Option<usize> {
        self.seed_index.get(seed).copied()
    }

    pub fn element(&self, s: &Scheme, a: usize) -> FreeGen {
        self.basis[s][a]
    }

    pub fn index_of(&self, s: &Scheme, g: &FreeGen) -> Option<usize> {
        self.index.get(s).and_then(|m| m.get(g)).copied()
    }

    pub fn seed_scheme(&self, k: usize) -> Scheme {
        let seed = &self.seeds[k];
        Scheme::new(vec![seed.s, seed.t], seed.u)
    }

    /// Index of `(seed; id, id; id)` in its scheme.
    pub fn seed_element(&self, k: usize) -> usize {
        let seed = &self.seeds[k];
        let c = self.colors.cat();
        let g = FreeGen { seed: k, a1: c.identity(seed.s), a2: c.identity(seed.t), out: c.identity(seed.u) };
        self.index_of(&self.seed_scheme(k), &g).expect("seed element")
    }

    fn act_gen(&self, s: &Scheme, slot: Slot, f: Mor, a: usize) -> (Scheme, usize) {
        let c = self.colors.cat();
        let mut g = self.basis[s][a];
        let lead = |v: SVec| v.leading().map(|(i, _)| i).expect("linearized composite");
        match slot {
            Slot::Input(0) => g.a1 = lead(c.compose(g.a1, f).expect("composable")),
            Slot::Input(_) => g.a2 = lead(c.compose(g.a2, f).expect("composable")),
            Slot::Output => g.out = lead(c.compose(f, g.out).expect("composable")),
        }
        let t = act_target(c, s, slot, f).expect("acts");
        let b = self.index_of(&t, &g).expect("closed under actions");
        (t, b)
    }
}

impl Collection for FreeGenerators {
    fn cat(&self) -> &LinearCat {
        self.colors.cat()
    }

    fn schemes(&self) -> Vec<Scheme> {
        self.basis.keys().cloned().collect()
    }

    fn dim(&self, s: &Scheme) -> usize {
        self.basis.get(s).map(Vec::len).unwrap_or(0)
    }

    fn label(&self, s: &Scheme, a: usize) -> String {
        let c = self.colors.cat();
        let g = self.basis[s][a];
        format!("{}[{}|{}|{}]", self.colors.seed_label(&self.seeds[g.seed]), c.mor_name(g.a1), c.mor_name(g.a2), c.mor_name(g.out))
    }

    fn act(&self, s: &Scheme, slot: Slot, f: Mor, a: usize) -> SVec {
        SVec::unit(self.act_gen(s, slot, f, a).1)
    }
}

/// The free collection divided by the congruence generated by equated pairs.
pub struct EqQuotient {
    /// Generating pairs `(scheme, x, y)`.
    pub pairs: Vec<(Scheme, usize, usize)>,
    /// Class of each basis element.
    pub class_of: BTreeMap<Scheme, Vec<usize>>,
    /// Minimal member of each class.
    pub reps: BTreeMap<Scheme, Vec<usize>>,
    pub q: NsCollection,
    pub well_defined: Report,
}

impl EqQuotient {
    pub fn class(&self, s: &Scheme, a: usize) -> usize {
        self.class_of[s][a]
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Smallest action-stable equivalence containing the pairs, and the induced
/// collection.
pub fn quotient_eq(x: &FreeGenerators, pairs: Vec<(Scheme, usize, usize)>) -> EqQuotient {
    let c = x.colors.cat().clone();
    let schemes = x.schemes();
    let mut offset = HashMap::new();
    let mut owner = Vec::new();
    for (k, s) in schemes.iter().enumerate() {
        offset.insert(s.clone(), owner.len());
        owner.extend(std::iter::repeat_n(k, x.dim(s)));
    }
    let gens: Vec<Vec<(Slot, Mor)>> = schemes.iter().map(|s| slot_generators(&c, s)).collect();
    let mut parent: Vec<usize> = (0..owner.len()).collect();
    let mut work: Vec<(usize, usize)> = pairs.iter().map(|(s, a, b)| (offset[s] + a, offset[s] + b)).collect();
    while let Some((a, b)) = work.pop() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        parent[ra.max(rb)] = ra.min(rb);
        let sk = owner[a];
        let s = &schemes[sk];
        let base = offset[s];
        for &(slot, f) in &gens[sk] {
            let (t, xa) = x.act_gen(s, slot, f, a - base);
            let (_, xb) = x.act_gen(s, slot, f, b - base);
            let o = offset[&t];
            work.push((o + xa, o + xb));
        }
    }
    let mut class_of = BTreeMap::new();
    let mut reps = BTreeMap::new();
    let mut q = NsCollection::new(c.clone());
    for s in &schemes {
        let base = offset[s];
        let n = x.dim(s);
        let mut rep_list = Vec::new();
        let mut cls = vec![0usize; n];
        let mut by_root = HashMap::new();
        for a in 0..n {
            let r = find(&mut parent, base + a);
            let k = *by_root.entry(r).or_insert_with(|| {
                rep_list.push(r - base);
                rep_list.len() - 1
            });
            cls[a] = k;
        }
        let labels = rep_list.iter().map(|&r| x.label(s, r)).collect();
        q.add_space(s.clone(), BasedSpace::new(labels).unwrap_or_else(|_| BasedSpace::standard(rep_list.len())));
        class_of.insert(s.clone(), cls);
        reps.insert(s.clone(), rep_list);
    }
    let mut well_defined = Report::new("equivalence quotient");
    for s in &schemes {
        for (slot, f) in slot_morphisms(&c, s) {
            let t = act_target(&c, s, slot, f).expect("acts");
            let cols = reps[s].iter().map(|&r| SVec::unit(class_of[&t][x.act_gen(s, slot, f, r).1])).collect();
            q.set_action(s, slot, f, LinMap::from_columns(reps[&t].len(), cols).expect("shape")).expect("shape");
        }
        for (slot, f) in slot_generators(&c, s) {
            for a in 0..x.dim(s) {
                let r = reps[s][class_of[s][a]];
                let (t, xa) = x.act_gen(s, slot, f, a);
                let (_, xr) = x.act_gen(s, slot, f, r);
                well_defined.check("induced action", class_of[&t][xa] == class_of[&t][xr], || format!("{} at {} by {}", x.label(s, a), c.scheme_name(s), c.mor_name(f)));
            }
        }
    }
    EqQuotient { pairs, class_of, reps, q, well_defined }
}

/// One associativity relation `outer ∘_0 inner − (rewritten)`.
#[derive(Clone, Debug)]
pub struct Associator {
    pub case: AssocCase,
    pub outer: usize,
    pub inner: usize,
    pub scheme: Scheme,
    pub vector: SVec,
}

/// The hyperoperad presented over a category of colors.
pub struct Hyperoperad {
    pub x: FreeGenerators,
    pub eq: EqQuotient,
    pub presentation: Presentation,
    pub associators: Vec<Associator>,
    /// Associativity instances dropped because a rewritten color exceeds the bound.
    pub truncated: usize,
}

/// Hyperoperad whose algebras are symmetric operads with arities `≤ bound`.
pub fn build_h(bound: usize, weight: usize) -> Result<Hyperoperad, HyperError> {
    build(Arc::new(Colors::Sigma(SigmaColors::new(bound))), weight)
}

/// Hyperoperad whose algebras are `C`-operads with arities `≤ bound`.
pub fn build_hc(base: Arc<LinearCat>, bound: usize, weight: usize) -> Result<Hyperoperad, HyperError> {
    build(Arc::new(Colors::Schemes(SchemeColors::new(base, bound)?)), weight)
}

pub fn build(colors: Arc<Colors>, weight: usize) -> Result<Hyperoperad, HyperError> {
    let x = FreeGenerators::new(colors.clone());
    let k = colors.cat().clone();
    let mut incoming: Vec<Vec<Mor>> = vec![Vec::new(); k.num_objects()];
    for (m, d) in k.morphisms().iter().enumerate() {
        incoming[d.tgt].push(m);
    }
    let mut pairs = Vec::new();
    for (si, seed) in x.seeds.iter().enumerate() {
        for &a1 in &incoming[seed.s] {
            for &a2 in &incoming[seed.t] {
                if k.is_identity(a1) && k.is_identity(a2) {
                    continue;
                }
                let (target, rho) = colors.eq_target(seed, a1, a2)?;
                let ti = x.seed_index(&target).ok_or_else(|| HyperError::Invalid(format!("missing seed {}", colors.seed_label(&target))))?;
                let sch = Scheme::new(vec![k.mor(a1).src, k.mor(a2).src], seed.u);
                let lhs = FreeGen { seed: si, a1, a2, out: k.identity(seed.u) };
                let rhs = FreeGen { seed: ti, a1: k.identity(target.s), a2: k.identity(target.t), out: rho };
                let a = x.index_of(&sch, &lhs).expect("basis");
                let b = x.index_of(&sch, &rhs).ok_or_else(|| HyperError::Invalid("equated element at another scheme".into()))?;
                pairs.push((sch, a, b));
            }
        }
    }
    let eq = quotient_eq(&x, pairs);
    let mut presentation = Presentation::new(eq.q.clone(), true, weight + 1, weight);
    let mut h = Hyperoperad { x, eq, presentation: Presentation::new(NsCollection::new(k.clone()), false, 0, 0), associators: Vec::new(), truncated: 0 };
    if weight >= 2 {
        let (assoc, truncated) = associators(&h, &presentation);
        presentation.relations = assoc.iter().filter(|a| !a.vector.is_zero()).map(|a| (a.scheme.clone(), a.vector.clone())).collect();
        h.associators = assoc;
        h.truncated = truncated;
    }
    h.presentation = presentation;
    Ok(h)
}

fn associators(h: &Hyperoperad, p: &Presentation) -> (Vec<Associator>, usize) {
    let colors = h.x.colors.clone();
    let free = p.free_operad();
    let gen = |k: usize| {
        let s = h.x.seed_scheme(k);
        let q = h.eq.class(&s, h.x.seed_element(k));
        (s.clone(), p.generator(&s, q))
    };
    let tau = Perm::transposition(3, 1, 2);
    let mut out = Vec::new();
    let mut truncated = 0;
    for (ia, a) in h.x.seeds.iter().enumerate() {
        for (ib, b) in h.x.seeds.iter().enumerate().filter(|(_, b)| b.s == a.u) {
            let (j, i) = (a.slot, b.slot);
            let (m, kk) = (colors.arity(a.t), colors.arity(b.t));
            let (sb, gb) = gen(ib);
            let (sa, ga) = gen(ia);
            let Some(lhs) = free.compose_vec(&sb, 0, &sa, &gb, &ga) else { continue };
            let scheme = sb.insert(0, &sa);
            let lookup = |s: Obj, t: Obj, slot: usize, f: Option<Mor>| -> Option<usize> {
                let u = colors.insert(s, slot, t)?;
                h.x.seed_index(&Seed { s, t, u, slot, f })
            };
            let (case, rhs) = if i < j {
                let inner = lookup(a.s, b.t, i, b.f);
                let outer = inner.and_then(|n| lookup(h.x.seeds[n].u, a.t, j + kk - 1, a.f));
                let (Some(n), Some(o)) = (inner, outer) else {
                    truncated += 1;
                    continue;
                };
                let ((so, go), (sn, gn)) = (gen(o), gen(n));
                let v = free.compose_vec(&so, 0, &sn, &go, &gn).expect("within bounds");
                (AssocCase::Before, sigma_vec(free.carrier(), &so.insert(0, &sn), &tau, &v))
            } else if i < j + m {
                let inner = lookup(a.t, b.t, i - j, b.f);
                let outer = inner.and_then(|n| lookup(a.s, h.x.seeds[n].u, j, a.f));
                let (Some(n), Some(o)) = (inner, outer) else {
                    truncated += 1;
                    continue;
                };
                let ((so, go), (sn, gn)) = (gen(o), gen(n));
                (AssocCase::Inside, free.compose_vec(&so, 1, &sn, &go, &gn).expect("within bounds"))
            } else {
                let inner = lookup(a.s, b.t, i - m + 1, b.f);
                let outer = inner.and_then(|n| lookup(h.x.seeds[n].u, a.t, j, a.f));
                let (Some(n), Some(o)) = (inner, outer) else {
                    truncated += 1;
                    continue;
                };
                let ((so, go), (sn, gn)) = (gen(o), gen(n));
                let v = free.compose_vec(&so, 0, &sn, &go, &gn).expect("within bounds");
                (AssocCase::After, sigma_vec(free.carrier(), &so.insert(0, &sn), &tau, &v))
            };
            let mut vector = lhs;
            vector.sub(&rhs);
            out.push(Associator { case, outer: ib, inner: ia, scheme, vector });
        }
    }
    (out, truncated)
}

impl Hyperoperad {
    pub fn colors(&self) -> &Arc<Colors> {
        self.x.colors()
    }

    /// Generator class of a seed: its scheme and index in the quotient.
    pub fn seed_generator(&self, k: usize) -> (Scheme, usize) {
        let s = self.x.seed_scheme(k);
        let q = self.eq.class(&s, self.x.seed_element(k));
        (s, q)
    }

    pub fn quotient(&self) -> Result<Quotient, HyperError> {
        Ok(self.presentation.quotient()?)
    }

    /// Image of a free basis element: `A(out) ∘ α(seed) ∘ (A(a1) ⊗ A(a2))`.
    fn alpha_x(&self, end: &EndOperad, seed_images: &[SVec], s: &Scheme, a: usize) -> SVec {
        let c = self.colors().cat();
        let g = self.x.element(s, a);
        let mut sch = self.x.seed_scheme(g.seed);
        let mut v = seed_images[g.seed].clone();
        for (slot, m) in [(Slot::Input(0), g.a1), (Slot::Input(1), g.a2), (Slot::Output, g.out)] {
            if !c.is_identity(m) {
                v = act_vec(end.carrier(), &sch, slot, m, &v);
                sch = act_target(c, &sch, slot, m).expect("acts");
            }
        }
        v
    }

    fn seed_images(&self, images: &BTreeMap<(Scheme, usize), SVec>) -> Result<Vec<SVec>, HyperError> {
        (0..self.x.seeds.len())
            .map(|k| {
                let key = self.seed_generator(k);
                images.get(&key).cloned().ok_or_else(|| HyperError::Invalid(format!("no image for {}", self.colors().seed_label(&self.x.seeds[k]))))
            })
            .collect()
    }

    /// Images of all generator classes from seed images, through representatives.
    pub fn images_from_seeds(&self, end: &EndOperad, seed_images: &[SVec]) -> BTreeMap<(Scheme, usize), SVec> {
        let mut out = BTreeMap::new();
        for (s, reps) in &self.eq.reps {
            for (q, &r) in reps.iter().enumerate() {
                out.insert((s.clone(), q), self.alpha_x(end, seed_images, s, r));
            }
        }
        out
    }

    /// Whether an assignment into an endomorphism operad is an algebra: the
    /// equated pairs agree, every free element maps through its class, and
    /// the presentation's naturality and relations hold.
    pub fn check_algebra(&self, end: &EndOperad, images: &BTreeMap<(Scheme, usize), SVec>) -> Result<Report, HyperError> {
        let seeds = self.seed_images(images)?;
        let mut r = Report::new("hyperoperad algebra");
        let c = self.colors().cat();
        for (s, a, b) in &self.eq.pairs {
            let (va, vb) = (self.alpha_x(end, &seeds, s, *a), self.alpha_x(end, &seeds, s, *b));
            r.check("equated pair", va == vb, || format!("{} vs {} at {}", self.x.label(s, *a), self.x.label(s, *b), c.scheme_name(s)));
        }
        for (s, cls) in &self.eq.class_of {
            for (a, &q) in cls.iter().enumerate() {
                let ok = images.get(&(s.clone(), q)).map(|v| *v == self.alpha_x(end, &seeds, s, a)).unwrap_or(false);
                r.check("descends to classes", ok, || format!("{} at {}", self.x.label(s, a), c.scheme_name(s)));
            }
        }
        r.merge(check_algebra(&self.presentation, end, images)?);
        Ok(r)
    }

    fn sigma(&self) -> Result<&SigmaColors, HyperError> {
        match self.colors().as_ref() {
            Colors::Sigma(c) => Ok(c),
            _ => Err(HyperError::Invalid("needs permutation colors".into())),
        }
    }

    fn schemes(&self) -> Result<&SchemeColors, HyperError> {
        match self.colors().as_ref() {
            Colors::Schemes(c) => Ok(c),
            _ => Err(HyperError::Invalid("needs scheme colors".into())),
        }
    }
}

/// A single-colored symmetric operad given by its partial compositions.
#[derive(Clone, Debug, PartialEq)]
pub struct MarklOperad {
    pub bound: usize,
    pub dims: Vec<usize>,
    /// Right actions of non-identity permutations.
    pub sigma: BTreeMap<(usize, Perm), LinMap>,
    /// `∘_i: P(n) ⊗ P(m) → P(n+m−1)` keyed `(n, i, m)`.
    pub comps: BTreeMap<(usize, usize, usize), LinMap>,
}

fn arity_scheme(n: usize) -> Scheme {
    Scheme::new(vec![0; n], 0)
}

impl MarklOperad {
    /// Reads the data of a symmetric operad over the terminal category.
    pub fn from_operad(p: &dyn Operad, bound: usize) -> Result<Self, HyperError> {
        let x = p.carrier();
        if x.cat().num_objects() != 1 || !p.symmetric() {
            return Err(HyperError::Invalid("needs a single-colored symmetric operad".into()));
        }
        let dims: Vec<usize> = (0..=bound).map(|n| x.dim(&arity_scheme(n))).collect();
        let mut sigma = BTreeMap::new();
        for n in 0..=bound {
            for s in Perm::all(n).into_iter().filter(|s| !s.is_identity()) {
                sigma.insert((n, s.clone()), sigma_map(x, &arity_scheme(n), &s));
            }
        }
        let mut comps = BTreeMap::new();
        for n in 1..=bound {
            for m in 0..=bound + 1 - n {
                for i in 0..n {
                    let (sn, sm) = (arity_scheme(n), arity_scheme(m));
                    let cols = (0..dims[n] * dims[m]).map(|k| p.compose(&sn, i, &sm, k / dims[m], k % dims[m]).unwrap_or_default()).collect();
                    comps.insert((n, i, m), LinMap::from_columns(dims[n + m - 1], cols).expect("shape"));
                }
            }
        }
        Ok(MarklOperad { bound, dims, sigma, comps })
    }

    /// The same data as an operad over the terminal category.
    pub fn to_operad(&self, terminal: Arc<LinearCat>) -> Result<COperad, HyperError> {
        let mut ns = NsCollection::new(terminal);
        for (n, &d) in self.dims.iter().enumerate() {
            ns.add_space(arity_scheme(n), BasedSpace::standard(d));
        }
        let mut sym = SymCollection::new(ns);
        for ((n, s), m) in &self.sigma {
            sym.set_sigma(&arity_scheme(*n), s, m.clone()).map_err(|e| HyperError::Invalid(e.to_string()))?;
        }
        let mut p = COperad::new(sym, true, self.bound);
        for ((n, i, m), map) in &self.comps {
            p.set_comp(&arity_scheme(*n), *i, &arity_scheme(*m), map.clone()).map_err(|e| HyperError::Invalid(e.to_string()))?;
        }
        Ok(p)
    }

    /// Unit, equivariance and associativity axioms of the composition data.
    pub fn check(&self, terminal: Arc<LinearCat>) -> Result<Report, HyperError> {
        Ok(check_operad(&self.to_operad(terminal)?))
    }
}

/// The algebra over the permutation hyperoperad carried by a symmetric
/// operad: the functor is the right action, seeds go to `∘_i`.
pub fn markl_to_halgebra(h: &Hyperoperad, m: &MarklOperad) -> Result<(EndOperad, Images), HyperError> {
    let sc = h.sigma()?;
    if m.bound < sc.bound {
        return Err(HyperError::Invalid(format!("operad truncated at {} below {}", m.bound, sc.bound)));
    }
    let spaces = (0..=sc.bound).map(|n| BasedSpace::standard(m.dims[n])).collect();
    let maps = sc.perm_of.iter().enumerate().filter(|(_, p)| !p.is_identity()).map(|(f, p)| (f, m.sigma[&(p.len(), p.clone())].clone())).collect();
    let end = end_operad(CFunctor::new(sc.cat.clone(), spaces, maps)?, 3);
    let seeds = h
        .x
        .seeds
        .iter()
        .map(|seed| {
            let map = m.comps.get(&(seed.s, seed.slot, seed.t)).cloned().unwrap_or_else(|| LinMap::zero(m.dims[seed.u], m.dims[seed.s] * m.dims[seed.t]));
            end.element(&Scheme::new(vec![seed.s, seed.t], seed.u), &map)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let images = h.images_from_seeds(&end, &seeds);
    Ok((end, images))
}

/// Reads the composition data back from an algebra over the permutation hyperoperad.
pub fn halgebra_to_markl(h: &Hyperoperad, end: &EndOperad, images: &BTreeMap<(Scheme, usize), SVec>) -> Result<MarklOperad, HyperError> {
    let sc = h.sigma()?;
    let a = end.functor();
    let dims: Vec<usize> = (0..=sc.bound).map(|n| a.dim(n)).collect();
    let sigma = sc.perm_of.iter().enumerate().filter(|(_, p)| !p.is_identity()).map(|(f, p)| ((p.len(), p.clone()), a.map(f))).collect();
    let seeds = h.seed_images(images)?;
    let mut comps = BTreeMap::new();
    for (k, seed) in h.x.seeds.iter().enumerate() {
        comps.insert((seed.s, seed.slot, seed.t), end.matrix(&h.x.seed_scheme(k), &seeds[k]));
    }
    Ok(MarklOperad { bound: sc.bound, dims, sigma, comps })
}

/// The algebra over the scheme hyperoperad carried by a symmetric
/// `C`-operad: the functor is the action of scheme morphisms, seeds go to
/// the twisted compositions `∘_i^f`.
pub fn coperad_to_halgebra(h: &Hyperoperad, p: &COperad) -> Result<(EndOperad, Images), HyperError> {
    let sc = h.schemes()?;
    if !p.symmetric {
        return Err(HyperError::Invalid("needs a symmetric operad".into()));
    }
    let x = &p.carrier;
    let spaces = sc.schemes.iter().map(|s| BasedSpace::new((0..x.dim(s)).map(|a| x.label(s, a)).collect()).unwrap_or_else(|_| BasedSpace::standard(x.dim(s)))).collect();
    let mut maps = BTreeMap::new();
    for f in sc.cat.non_identities() {
        let m = &sc.morphs[f];
        let cols = (0..x.dim(&m.source)).map(|a| act_morphism(x, m, &SVec::unit(a))).collect();
        maps.insert(f, LinMap::from_columns(x.dim(&m.target), cols).expect("shape"));
    }
    let end = end_operad(CFunctor::new(sc.cat.clone(), spaces, maps)?, 3);
    let partial = to_partial_f(p);
    let seeds = h
        .x
        .seeds
        .iter()
        .map(|seed| {
            let (s0, t0) = (&sc.schemes[seed.s], &sc.schemes[seed.t]);
            let key = (s0.clone(), seed.slot, seed.f.expect("decorated"), t0.clone());
            let map = partial.comp_f.get(&key).cloned().unwrap_or_else(|| LinMap::zero(x.dim(&sc.schemes[seed.u]), x.dim(s0) * x.dim(t0)));
            end.element(&Scheme::new(vec![seed.s, seed.t], seed.u), &map)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let images = h.images_from_seeds(&end, &seeds);
    Ok((end, images))
}

/// Reads a symmetric `C`-operad back from an algebra over the scheme hyperoperad.
pub fn halgebra_to_coperad(h: &Hyperoperad, end: &EndOperad, images: &BTreeMap<(Scheme, usize), SVec>) -> Result<COperad, HyperError> {
    let sc = h.schemes()?;
    let a = end.functor();
    let base = &sc.base;
    let mut ns = NsCollection::new(base.clone());
    for (o, s) in sc.schemes.iter().enumerate() {
        ns.add_space(s.clone(), a.space(o).clone());
    }
    let map_of = |m: SchemeMorphism| -> Result<LinMap, HyperError> {
        let f = sc.mor_index(&m).ok_or_else(|| HyperError::Invalid("missing scheme morphism".into()))?;
        Ok(a.map(f))
    };
    for s in &sc.schemes {
        if a.dim(sc.obj_of[s]) == 0 {
            continue;
        }
        for (slot, f) in slot_morphisms(base, s) {
            let t = act_target(base, s, slot, f).expect("acts");
            let mut m = SchemeMorphism { target: t.clone(), ..SchemeMorphism::identity(base, s) };
            match slot {
                Slot::Input(k) => m.input_maps[k] = f,
                Slot::Output => m.output_map = f,
            }
            if sc.obj_of.contains_key(&t) {
                ns.set_action(s, slot, f, map_of(m)?).map_err(|e| HyperError::Invalid(e.to_string()))?;
            }
        }
    }
    let mut sym = SymCollection::new(ns);
    for s in &sc.schemes {
        for sigma in Perm::all(s.arity()).into_iter().filter(|p| !p.is_identity()) {
            sym.set_sigma(s, &sigma, map_of(SchemeMorphism::permutation(base, s, &sigma))?).map_err(|e| HyperError::Invalid(e.to_string()))?;
        }
    }
    let seeds = h.seed_images(images)?;
    let mut comp_f = BTreeMap::new();
    for (k, seed) in h.x.seeds.iter().enumerate() {
        let m = end.matrix(&h.x.seed_scheme(k), &seeds[k]);
        if !m.is_zero() {
            comp_f.insert((sc.schemes[seed.s].clone(), seed.slot, seed.f.expect("decorated"), sc.schemes[seed.t].clone()), m);
        }
    }
    Ok(from_partial_f(&PartialFPresentation { carrier: sym, symmetric: true, arity_bound: sc.bound, comp_f }))
}
