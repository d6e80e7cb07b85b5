//! C-collections: functors from schemes to finite-dimensional spaces.
//!
//! A [`Collection`] exposes basis-level actions of single morphisms at one
//! slot. Input slots are contravariant: for `f: d → c_k` the action maps
//! `X(.. c_k ..; c)` to `X(.. d ..; c)`. The output slot is covariant.
//! Symmetric collections also carry the right action `(−)σ: X(s) → X(s_σ)`.

use crate::fincat::{LinearCat, Mor, Obj, Scheme, SchemeMorphism};
use crate::linalg::{BasedSpace, LinMap, SVec};
use crate::perm::Perm;
use crate::report::Report;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollectionError {
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("morphism does not act at this slot: {0}")]
    BadMorphism(String),
    #[error("shape mismatch for {0}")]
    Shape(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Input(usize),
    Output,
}

/// Target scheme of acting by `f` at `slot`, if `f` has the right endpoint.
pub fn act_target(c: &LinearCat, s: &Scheme, slot: Slot, f: Mor) -> Option<Scheme> {
    let m = c.mor(f);
    match slot {
        Slot::Input(k) => (k < s.arity() && m.tgt == s.inputs[k]).then(|| s.with_input(k, m.src)),
        Slot::Output => (m.src == s.output).then(|| s.with_output(m.tgt)),
    }
}

pub trait Collection: Send + Sync {
    fn cat(&self) -> &LinearCat;

    /// Schemes with nonzero component, sorted.
    fn schemes(&self) -> Vec<Scheme>;

    fn dim(&self, s: &Scheme) -> usize;

    fn label(&self, _s: &Scheme, a: usize) -> String {
        format!("e{a}")
    }

    /// Action of a basis morphism on a basis element.
    fn act(&self, s: &Scheme, slot: Slot, f: Mor, a: usize) -> SVec;

    fn is_symmetric(&self) -> bool {
        false
    }

    /// Right action `(−)σ: X(s) → X(s_σ)` on a basis element.
    fn act_sigma(&self, _s: &Scheme, _sigma: &Perm, _a: usize) -> SVec {
        panic!("collection has no symmetric structure")
    }
}

pub fn act_vec(x: &dyn Collection, s: &Scheme, slot: Slot, f: Mor, v: &SVec) -> SVec {
    let mut out = SVec::new();
    for (a, c) in v.iter() {
        out.add_scaled(&x.act(s, slot, f, a), c);
    }
    out
}

/// Action of a combination of basis morphisms.
pub fn act_vec_comb(x: &dyn Collection, s: &Scheme, slot: Slot, f: &SVec, v: &SVec) -> SVec {
    let mut out = SVec::new();
    for (m, c) in f.iter() {
        out.add_scaled(&act_vec(x, s, slot, m, v), c);
    }
    out
}

pub fn sigma_vec(x: &dyn Collection, s: &Scheme, sigma: &Perm, v: &SVec) -> SVec {
    let mut out = SVec::new();
    for (a, c) in v.iter() {
        out.add_scaled(&x.act_sigma(s, sigma, a), c);
    }
    out
}

pub fn action_map(x: &dyn Collection, s: &Scheme, slot: Slot, f: Mor) -> LinMap {
    let t = act_target(x.cat(), s, slot, f).expect("morphism acts at slot");
    let cols = (0..x.dim(s)).map(|a| x.act(s, slot, f, a)).collect();
    LinMap::from_columns(x.dim(&t), cols).expect("action lands in target")
}

pub fn sigma_map(x: &dyn Collection, s: &Scheme, sigma: &Perm) -> LinMap {
    let t = s.permuted(sigma);
    let cols = (0..x.dim(s)).map(|a| x.act_sigma(s, sigma, a)).collect();
    LinMap::from_columns(x.dim(&t), cols).expect("sigma action lands in target")
}

/// Action of a full scheme morphism from `(d; x)` to `(c; y)`: first `(−)σ`,
/// then the input maps slot by slot, then the output map.
pub fn act_morphism(x: &dyn Collection, m: &SchemeMorphism, v: &SVec) -> SVec {
    let c = x.cat();
    let mut s = m.source.clone();
    let mut v = if m.perm.is_identity() {
        v.clone()
    } else {
        let w = sigma_vec(x, &s, &m.perm, v);
        s = s.permuted(&m.perm);
        w
    };
    for (i, &f) in m.input_maps.iter().enumerate() {
        if !c.is_identity(f) {
            v = act_vec(x, &s, Slot::Input(i), f, &v);
            s = s.with_input(i, c.mor(f).src);
        }
    }
    if !c.is_identity(m.output_map) {
        v = act_vec(x, &s, Slot::Output, m.output_map, &v);
    }
    v
}

/// Explicit non-symmetric collection with stored action matrices.
///
/// Absent spaces are zero; absent actions between nonzero spaces are zero maps.
#[derive(Clone, Debug)]
pub struct NsCollection {
    cat: Arc<LinearCat>,
    spaces: BTreeMap<Scheme, BasedSpace>,
    actions: BTreeMap<(Scheme, Slot, Mor), LinMap>,
}

impl NsCollection {
    pub fn new(cat: Arc<LinearCat>) -> Self {
        NsCollection { cat, spaces: BTreeMap::new(), actions: BTreeMap::new() }
    }

    pub fn cat_arc(&self) -> &Arc<LinearCat> {
        &self.cat
    }

    pub fn add_space(&mut self, s: Scheme, space: BasedSpace) {
        if space.dim() > 0 {
            self.spaces.insert(s, space);
        }
    }

    pub fn space(&self, s: &Scheme) -> Option<&BasedSpace> {
        self.spaces.get(s)
    }

    pub fn spaces(&self) -> &BTreeMap<Scheme, BasedSpace> {
        &self.spaces
    }

    pub fn actions(&self) -> &BTreeMap<(Scheme, Slot, Mor), LinMap> {
        &self.actions
    }

    pub fn set_action(&mut self, s: &Scheme, slot: Slot, f: Mor, map: LinMap) -> Result<(), CollectionError> {
        let t = act_target(&self.cat, s, slot, f)
            .ok_or_else(|| CollectionError::BadMorphism(format!("{} at {:?} of {}", self.cat.mor_name(f), slot, self.cat.scheme_name(s))))?;
        let (ds, dt) = (self.dim_of(s), self.dim_of(&t));
        if map.cols() != ds || map.rows() != dt {
            return Err(CollectionError::Shape(format!("{} at {:?} of {}", self.cat.mor_name(f), slot, self.cat.scheme_name(s))));
        }
        if ds > 0 && dt > 0 && !map.is_zero() {
            self.actions.insert((s.clone(), slot, f), map);
        }
        Ok(())
    }

    fn dim_of(&self, s: &Scheme) -> usize {
        self.spaces.get(s).map(|b| b.dim()).unwrap_or(0)
    }

    /// Copies all data of another collection over the same category.
    pub fn materialize(x: &dyn Collection, cat: Arc<LinearCat>) -> NsCollection {
        let mut out = NsCollection::new(cat);
        for s in x.schemes() {
            let labels = (0..x.dim(&s)).map(|a| x.label(&s, a)).collect();
            out.add_space(s.clone(), BasedSpace::new(labels).unwrap_or_else(|_| BasedSpace::standard(x.dim(&s))));
        }
        let schemes: Vec<Scheme> = out.spaces.keys().cloned().collect();
        for s in &schemes {
            for (slot, f) in slot_morphisms(&out.cat, s) {
                let t = act_target(&out.cat, s, slot, f).expect("acts");
                if out.dim_of(&t) == 0 {
                    continue;
                }
                let map = action_map(x, s, slot, f);
                out.set_action(s, slot, f, map).expect("shape");
            }
        }
        out
    }
}

/// All `(slot, non-identity basis morphism)` pairs that act on `s`.
pub fn slot_morphisms(c: &LinearCat, s: &Scheme) -> Vec<(Slot, Mor)> {
    let mut out = Vec::new();
    for k in 0..s.arity() {
        for f in c.non_identities() {
            if c.mor(f).tgt == s.inputs[k] {
                out.push((Slot::Input(k), f));
            }
        }
    }
    for f in c.non_identities() {
        if c.mor(f).src == s.output {
            out.push((Slot::Output, f));
        }
    }
    out
}

/// Like [`slot_morphisms`] but only generating morphisms.
pub fn slot_generators(c: &LinearCat, s: &Scheme) -> Vec<(Slot, Mor)> {
    let mut out = Vec::new();
    for k in 0..s.arity() {
        for &f in c.generators() {
            if c.mor(f).tgt == s.inputs[k] {
                out.push((Slot::Input(k), f));
            }
        }
    }
    for &f in c.generators() {
        if c.mor(f).src == s.output {
            out.push((Slot::Output, f));
        }
    }
    out
}

impl Collection for NsCollection {
    fn cat(&self) -> &LinearCat {
        &self.cat
    }

    fn schemes(&self) -> Vec<Scheme> {
        self.spaces.keys().cloned().collect()
    }

    fn dim(&self, s: &Scheme) -> usize {
        self.dim_of(s)
    }

    fn label(&self, s: &Scheme, a: usize) -> String {
        self.spaces[s].label(a).to_string()
    }

    fn act(&self, s: &Scheme, slot: Slot, f: Mor, a: usize) -> SVec {
        if self.cat.is_identity(f) {
            return SVec::unit(a);
        }
        match self.actions.get(&(s.clone(), slot, f)) {
            Some(m) => m.column(a).clone(),
            None => SVec::new(),
        }
    }
}

/// Explicit symmetric collection: an ns collection plus stored `(−)σ` maps.
#[derive(Clone, Debug)]
pub struct SymCollection {
    pub underlying: NsCollection,
    sigma: BTreeMap<(Scheme, Perm), LinMap>,
}

impl SymCollection {
    pub fn new(underlying: NsCollection) -> Self {
        SymCollection { underlying, sigma: BTreeMap::new() }
    }

    pub fn set_sigma(&mut self, s: &Scheme, sigma: &Perm, map: LinMap) -> Result<(), CollectionError> {
        let t = s.permuted(sigma);
        if sigma.len() != s.arity() || map.cols() != self.underlying.dim_of(s) || map.rows() != self.underlying.dim_of(&t) {
            return Err(CollectionError::Shape(format!("sigma {} at {}", sigma, self.underlying.cat.scheme_name(s))));
        }
        if !sigma.is_identity() && map.cols() > 0 {
            self.sigma.insert((s.clone(), sigma.clone()), map);
        }
        Ok(())
    }

    pub fn sigma_maps(&self) -> &BTreeMap<(Scheme, Perm), LinMap> {
        &self.sigma
    }

    /// Copies all data of a symmetric collection.
    pub fn materialize(x: &dyn Collection, cat: Arc<LinearCat>) -> SymCollection {
        let under = NsCollection::materialize(x, cat);
        let mut out = SymCollection::new(under);
        for s in out.underlying.schemes() {
            for p in Perm::all(s.arity()) {
                if !p.is_identity() {
                    let m = sigma_map(x, &s, &p);
                    out.set_sigma(&s, &p, m).expect("shape");
                }
            }
        }
        out
    }
}

impl Collection for SymCollection {
    fn cat(&self) -> &LinearCat {
        self.underlying.cat()
    }

    fn schemes(&self) -> Vec<Scheme> {
        self.underlying.schemes()
    }

    fn dim(&self, s: &Scheme) -> usize {
        self.underlying.dim(s)
    }

    fn label(&self, s: &Scheme, a: usize) -> String {
        self.underlying.label(s, a)
    }

    fn act(&self, s: &Scheme, slot: Slot, f: Mor, a: usize) -> SVec {
        self.underlying.act(s, slot, f, a)
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn act_sigma(&self, s: &Scheme, sigma: &Perm, a: usize) -> SVec {
        if sigma.is_identity() {
            return SVec::unit(a);
        }
        match self.sigma.get(&(s.clone(), sigma.clone())) {
            Some(m) => m.column(a).clone(),
            None => SVec::new(),
        }
    }
}

fn in_range(x: &dyn Collection, t: &Scheme, v: &SVec) -> bool {
    v.max_index().map(|i| i < x.dim(t)).unwrap_or(true)
}

/// Exhaustive functoriality check over the supported schemes.
pub fn validate_functor(x: &dyn Collection) -> Report {
    let mut r = Report::new("functor");
    let c = x.cat();
    for s in x.schemes() {
        let name = c.scheme_name(&s);
        let d = x.dim(&s);
        for a in 0..d {
            for k in 0..s.arity() {
                let id = c.identity(s.inputs[k]);
                r.check("identity", x.act(&s, Slot::Input(k), id, a) == SVec::unit(a), || format!("input {k} of {name}, basis {a}"));
            }
            r.check("identity", x.act(&s, Slot::Output, c.identity(s.output), a) == SVec::unit(a), || format!("output of {name}, basis {a}"));
        }
        let moves = slot_morphisms(c, &s);
        for &(slot, f) in &moves {
            let t = act_target(c, &s, slot, f).expect("acts");
            for a in 0..d {
                let fa = x.act(&s, slot, f, a);
                r.check("range", in_range(x, &t, &fa), || format!("{} at {slot:?} of {name}", c.mor_name(f)));
                // Composites with a second morphism at the same slot.
                for (slot2, g) in slot_morphisms(c, &t) {
                    if slot2 != slot {
                        continue;
                    }
                    let comp = match slot {
                        Slot::Input(_) => c.compose(f, g),
                        Slot::Output => c.compose(g, f),
                    };
                    let Some(comp) = comp else { continue };
                    let lhs = act_vec_comb(x, &s, slot, &comp, &SVec::unit(a));
                    let rhs = act_vec(x, &t, slot, g, &fa);
                    r.check("composition", lhs == rhs, || format!("{} then {} at {slot:?} of {name}, basis {a}", c.mor_name(f), c.mor_name(g)));
                }
                // Actions at different slots commute.
                for &(slot2, g) in &moves {
                    if slot2 <= slot {
                        continue;
                    }
                    let t2 = act_target(c, &s, slot2, g).expect("acts");
                    let lhs = act_vec(x, &t, slot2, g, &fa);
                    let rhs = act_vec(x, &t2, slot, f, &x.act(&s, slot2, g, a));
                    r.check("interchange", lhs == rhs, || format!("{} at {slot:?} and {} at {slot2:?} of {name}", c.mor_name(f), c.mor_name(g)));
                }
            }
        }
    }
    r
}

/// Checks the symmetric structure: strict action law and compatibility with
/// the C-actions. Exhaustive over pairs of permutations up to arity 4 and
/// over adjacent transpositions above.
pub fn validate_symmetric(x: &dyn Collection) -> Report {
    let mut r = Report::new("symmetric collection");
    let c = x.cat();
    for s in x.schemes() {
        let n = s.arity();
        let name = c.scheme_name(&s);
        let all = Perm::all(n);
        let seconds: Vec<Perm> = if n <= 4 { all.clone() } else { (0..n - 1).map(|k| Perm::transposition(n, k, k + 1)).collect() };
        for a in 0..x.dim(&s) {
            r.check("sigma identity", x.act_sigma(&s, &Perm::identity(n), a) == SVec::unit(a), || format!("{name}, basis {a}"));
            for tau in &all {
                let xt = x.act_sigma(&s, tau, a);
                let st = s.permuted(tau);
                r.check("sigma range", in_range(x, &st, &xt), || format!("{tau} on {name}"));
                for sigma in &seconds {
                    let lhs = sigma_vec(x, &st, sigma, &xt);
                    let rhs = x.act_sigma(&s, &tau.compose(sigma), a);
                    r.check("sigma action", lhs == rhs, || format!("{tau} then {sigma} on {name}, basis {a}"));
                }
                // (x·f at slot τ(i))τ = (xτ)·f at slot i.
                for (slot, f) in slot_morphisms(c, &st) {
                    let lhs = act_vec(x, &st, slot, f, &xt);
                    let orig_slot = match slot {
                        Slot::Input(i) => Slot::Input(tau.apply(i)),
                        Slot::Output => Slot::Output,
                    };
                    let t = act_target(c, &s, orig_slot, f).expect("acts");
                    let rhs = sigma_vec(x, &t, tau, &x.act(&s, orig_slot, f, a));
                    r.check("sigma naturality", lhs == rhs, || format!("{tau} and {} at {slot:?} on {name}, basis {a}", c.mor_name(f)));
                }
            }
        }
    }
    r
}

/// `X^i_c`: freezes input slot `i` at color `c`.
pub fn partial_eval(x: &NsCollection, i: usize, c: Obj) -> Result<NsCollection, CollectionError> {
    let mut out = NsCollection::new(x.cat.clone());
    for (s, sp) in &x.spaces {
        if i >= s.arity() {
            return Err(CollectionError::SlotOutOfRange { slot: i, arity: s.arity() });
        }
        if s.inputs[i] == c {
            out.add_space(s.remove_input(i), sp.clone());
        }
    }
    for ((s, slot, f), m) in &x.actions {
        if s.inputs[i] != c {
            continue;
        }
        let slot2 = match *slot {
            Slot::Input(k) if k == i => continue,
            Slot::Input(k) if k > i => Slot::Input(k - 1),
            other => other,
        };
        out.set_action(&s.remove_input(i), slot2, *f, m.clone()).expect("shape");
    }
    Ok(out)
}

/// `X^i_f: X^i_c → X^i_d` for `f: d → c`, keyed by the frozen schemes.
pub fn partial_eval_map(x: &NsCollection, i: usize, f: Mor) -> BTreeMap<Scheme, LinMap> {
    let cat = &x.cat;
    let (d, c) = (cat.mor(f).src, cat.mor(f).tgt);
    let mut out = BTreeMap::new();
    for s in x.spaces.keys() {
        if s.inputs.get(i) == Some(&c) {
            let t = s.with_input(i, d);
            let map = if x.dim_of(&t) == 0 { LinMap::zero(0, x.dim_of(s)) } else { action_map(x, s, Slot::Input(i), f) };
            out.insert(s.remove_input(i), map);
        }
    }
    out
}

/// `^cY`: the components with output `c`, with output actions dropped.
pub fn output_eval(y: &NsCollection, c: Obj) -> NsCollection {
    let mut out = NsCollection::new(y.cat.clone());
    for (s, sp) in &y.spaces {
        if s.output == c {
            out.add_space(s.clone(), sp.clone());
        }
    }
    for ((s, slot, f), m) in &y.actions {
        if s.output == c && *slot != Slot::Output {
            out.set_action(s, *slot, *f, m.clone()).expect("shape");
        }
    }
    out
}

/// `σ(X)(s) = X(s_σ)`.
pub fn sigma_act(x: &NsCollection, sigma: &Perm) -> NsCollection {
    let inv = sigma.inverse();
    let mut out = NsCollection::new(x.cat.clone());
    for (t, sp) in &x.spaces {
        if t.arity() == sigma.len() {
            out.add_space(t.permuted(&inv), sp.clone());
        }
    }
    for ((t, slot, f), m) in &x.actions {
        if t.arity() != sigma.len() {
            continue;
        }
        let slot2 = match *slot {
            Slot::Input(j) => Slot::Input(sigma.apply(j)),
            Slot::Output => Slot::Output,
        };
        out.set_action(&t.permuted(&inv), slot2, *f, m.clone()).expect("shape");
    }
    out
}

/// Data-level equality of explicit collections.
pub fn same_data(a: &NsCollection, b: &NsCollection) -> bool {
    a.spaces == b.spaces && a.actions == b.actions
}

/// One tensor factor of a product collection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `hom(−, e)` at an input, `hom(e, −)` at the output.
    Rep(Obj),
    /// The constant functor ℚ.
    Const,
}

fn factor_basis(c: &LinearCat, f: Factor, x: Obj, input: bool) -> Vec<Option<Mor>> {
    match f {
        Factor::Const => vec![None],
        Factor::Rep(e) => {
            let h = if input { c.hom(x, e) } else { c.hom(e, x) };
            h.iter().map(|&m| Some(m)).collect()
        }
    }
}

/// The collection `X(c_1 ⋯ c_n; c) = F_1(c_1) ⊗ ⋯ ⊗ F_n(c_n) ⊗ G(c)` over
/// all schemes of arity `inputs.len()`.
pub fn product_collection(cat: Arc<LinearCat>, inputs: &[Factor], output: Factor) -> NsCollection {
    let n = inputs.len();
    let schemes: Vec<Scheme> = crate::fincat::all_schemes(&cat, n).into_iter().filter(|s| s.arity() == n).collect();
    let basis_of = |s: &Scheme| -> Vec<Vec<Option<Mor>>> {
        let mut per: Vec<Vec<Option<Mor>>> = (0..n).map(|k| factor_basis(&cat, inputs[k], s.inputs[k], true)).collect();
        per.push(factor_basis(&cat, output, s.output, false));
        let mut out: Vec<Vec<Option<Mor>>> = vec![Vec::new()];
        for choices in &per {
            let mut next = Vec::new();
            for prefix in &out {
                for &ch in choices {
                    let mut p = prefix.clone();
                    p.push(ch);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    };
    let mut x = NsCollection::new(cat.clone());
    let mut bases = BTreeMap::new();
    for s in &schemes {
        let b = basis_of(s);
        let labels = b
            .iter()
            .map(|t| t.iter().map(|m| m.map(|m| cat.mor_name(m).to_string()).unwrap_or_else(|| "1".into())).collect::<Vec<_>>().join("⊗"))
            .collect();
        x.add_space(s.clone(), BasedSpace::new(labels).expect("distinct tuples"));
        bases.insert(s.clone(), b);
    }
    for s in &schemes {
        if x.dim_of(s) == 0 {
            continue;
        }
        for (slot, f) in slot_morphisms(&cat, s) {
            let t = act_target(&cat, s, slot, f).expect("acts");
            if x.dim_of(&t) == 0 {
                continue;
            }
            let tb = &bases[&t];
            let index: std::collections::HashMap<&Vec<Option<Mor>>, usize> = tb.iter().enumerate().map(|(i, v)| (v, i)).collect();
            let pos = match slot {
                Slot::Input(k) => k,
                Slot::Output => n,
            };
            let cols = bases[s]
                .iter()
                .map(|tuple| match tuple[pos] {
                    None => SVec::unit(index[tuple]),
                    Some(g) => {
                        let comp = match slot {
                            Slot::Input(_) => cat.compose(g, f).expect("composable"),
                            Slot::Output => cat.compose(f, g).expect("composable"),
                        };
                        let mut v = SVec::new();
                        for (h, coef) in comp.iter() {
                            let mut t2 = tuple.clone();
                            t2[pos] = Some(h);
                            v.add_term(index[&t2], coef);
                        }
                        v
                    }
                })
                .collect();
            x.set_action(s, slot, f, LinMap::from_columns(tb.len(), cols).expect("shape")).expect("shape");
        }
    }
    x
}

/// Pointwise direct sum of two collections.
pub fn direct_sum(x: &NsCollection, y: &NsCollection) -> NsCollection {
    let mut out = NsCollection::new(x.cat.clone());
    let keys: std::collections::BTreeSet<Scheme> = x.spaces.keys().chain(y.spaces.keys()).cloned().collect();
    for s in &keys {
        let parts = [x.spaces.get(s).cloned().unwrap_or_else(BasedSpace::zero), y.spaces.get(s).cloned().unwrap_or_else(BasedSpace::zero)];
        out.add_space(s.clone(), BasedSpace::direct_sum(&parts));
    }
    for s in &keys {
        for (slot, f) in slot_morphisms(&x.cat, s) {
            let t = act_target(&x.cat, s, slot, f).expect("acts");
            if out.dim_of(&t) == 0 || out.dim_of(s) == 0 {
                continue;
            }
            let blocks = [
                pad(&action_or_zero(x, s, slot, f), x.dim_of(&t), x.dim_of(s)),
                pad(&action_or_zero(y, s, slot, f), y.dim_of(&t), y.dim_of(s)),
            ];
            out.set_action(s, slot, f, LinMap::direct_sum(&blocks)).expect("shape");
        }
    }
    out
}

/// Pointwise tensor product of two collections of the same arity. Only
/// functorial over linearized categories.
pub fn pointwise_tensor(x: &NsCollection, y: &NsCollection) -> NsCollection {
    let mut out = NsCollection::new(x.cat.clone());
    for (s, a) in &x.spaces {
        if let Some(b) = y.spaces.get(s) {
            out.add_space(s.clone(), a.tensor(b));
        }
    }
    let keys: Vec<Scheme> = out.spaces.keys().cloned().collect();
    for s in &keys {
        for (slot, f) in slot_morphisms(&x.cat, s) {
            let t = act_target(&x.cat, s, slot, f).expect("acts");
            if out.dim_of(&t) == 0 {
                continue;
            }
            let m = action_or_zero(x, s, slot, f).tensor(&action_or_zero(y, s, slot, f));
            out.set_action(s, slot, f, m).expect("shape");
        }
    }
    out
}

fn action_or_zero(x: &NsCollection, s: &Scheme, slot: Slot, f: Mor) -> LinMap {
    let t = act_target(&x.cat, s, slot, f).expect("acts");
    match x.actions.get(&(s.clone(), slot, f)) {
        Some(m) => m.clone(),
        None => LinMap::zero(x.dim_of(&t), x.dim_of(s)),
    }
}

fn pad(m: &LinMap, rows: usize, cols: usize) -> LinMap {
    if m.rows() == rows && m.cols() == cols {
        m.clone()
    } else {
        LinMap::zero(rows, cols)
    }
}

/// Natural transformation between collections: one map per scheme.
pub type NatMap = BTreeMap<Scheme, LinMap>;

/// Checks that `map: a → b` commutes with every stored action.
pub fn check_natural(a: &dyn Collection, b: &dyn Collection, map: &NatMap) -> Report {
    let mut r = Report::new("naturality");
    let c = a.cat();
    let apply = |s: &Scheme, v: &SVec| -> SVec { map.get(s).map(|m| m.apply(v)).unwrap_or_default() };
    let mut schemes: std::collections::BTreeSet<Scheme> = a.schemes().into_iter().collect();
    schemes.extend(b.schemes());
    for s in &schemes {
        for (slot, f) in slot_morphisms(c, s) {
            let t = act_target(c, s, slot, f).expect("acts");
            for q in 0..a.dim(s) {
                let lhs = apply(&t, &a.act(s, slot, f, q));
                let rhs = act_vec(b, s, slot, f, &apply(s, &SVec::unit(q)));
                r.check("natural", lhs == rhs, || format!("{} at {slot:?} of {}, basis {q}", c.mor_name(f), c.scheme_name(s)));
            }
        }
    }
    r
}

/// Whether every component is an isomorphism and the supports agree.
pub fn is_iso_family(a: &dyn Collection, b: &dyn Collection, map: &NatMap) -> bool {
    let sa: Vec<Scheme> = a.schemes();
    let sb: Vec<Scheme> = b.schemes();
    sa == sb && sa.iter().all(|s| map.get(s).map(|m| m.rows() == b.dim(s) && m.cols() == a.dim(s) && m.is_iso()).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinCat;
    use crate::linalg::q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn arrow() -> Arc<LinearCat> {
        Arc::new(FinCat::walking_arrow().linearize())
    }

    /// Arity-1 collection over the arrow category built from hom spaces:
    /// `X(x; y) = hom(x, y)` with composition actions.
    pub(crate) fn hom_collection(c: Arc<LinearCat>) -> NsCollection {
        let mut x = NsCollection::new(c.clone());
        let n = c.num_objects();
        for a in 0..n {
            for b in 0..n {
                let h = c.hom(a, b);
                if !h.is_empty() {
                    x.add_space(Scheme::new(vec![a], b), BasedSpace::new(h.iter().map(|&m| c.mor_name(m).to_string()).collect()).unwrap());
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let s = Scheme::new(vec![a], b);
                let h = c.hom(a, b).to_vec();
                for (slot, f) in slot_morphisms(&c, &s) {
                    let t = act_target(&c, &s, slot, f).unwrap();
                    let th = c.hom(t.inputs[0], t.output).to_vec();
                    if h.is_empty() || th.is_empty() {
                        continue;
                    }
                    let cols = h
                        .iter()
                        .map(|&g| {
                            let v = match slot {
                                Slot::Input(_) => c.compose(g, f).unwrap(),
                                Slot::Output => c.compose(f, g).unwrap(),
                            };
                            v.map_indices(|m| th.iter().position(|&x| x == m).unwrap())
                        })
                        .collect();
                    x.set_action(&s, slot, f, LinMap::from_columns(th.len(), cols).unwrap()).unwrap();
                }
            }
        }
        x
    }

    /// Random arity-2 collection over a discrete two-object category.
    fn random_discrete(rng: &mut ChaCha8Rng) -> NsCollection {
        let c = Arc::new(FinCat::discrete(&["p", "q"]).linearize());
        let mut x = NsCollection::new(c.clone());
        for s in crate::fincat::all_schemes(&c, 2).into_iter().filter(|s| s.arity() == 2) {
            let d = rng.gen_range(0..3);
            x.add_space(s, BasedSpace::standard(d));
        }
        x
    }

    #[test]
    fn hom_collection_is_functorial() {
        let x = hom_collection(arrow());
        assert!(validate_functor(&x).ok(), "{}", validate_functor(&x));
    }

    fn chain() -> Arc<LinearCat> {
        let o = |x: &str| x.to_string();
        Arc::new(
            FinCat::new(
                vec![o("a"), o("b"), o("c")],
                vec![
                    (o("ia"), o("a"), o("a")),
                    (o("ib"), o("b"), o("b")),
                    (o("ic"), o("c"), o("c")),
                    (o("f"), o("a"), o("b")),
                    (o("g"), o("b"), o("c")),
                    (o("h"), o("a"), o("c")),
                ],
                vec![(o("a"), o("ia")), (o("b"), o("ib")), (o("c"), o("ic"))],
                vec![(o("g"), o("f"), o("h"))],
            )
            .unwrap()
            .linearize(),
        )
    }

    #[test]
    fn planted_nonfunctorial_action_reported() {
        let c = chain();
        let mut x = hom_collection(c.clone());
        assert!(validate_functor(&x).ok());
        // Break the action of the composite h on X(c; c).
        let s = Scheme::new(vec![2], 2);
        let h = c.mor_index("h").unwrap();
        x.set_action(&s, Slot::Input(0), h, LinMap::from_int_rows(&[&[2]])).unwrap();
        let r = validate_functor(&x);
        assert!(!r.ok());
        assert!(r.has_check("composition"));
        assert!(r.violations.iter().any(|v| v.witness.contains("then")));
    }

    #[test]
    fn partial_eval_reads_stored_matrix() {
        let c = arrow();
        let x = hom_collection(c.clone());
        let f = c.mor_index("f").unwrap();
        // X^1_f: X^1_b → X^1_a, frozen scheme (; b).
        let m = partial_eval_map(&x, 0, f);
        let s = Scheme::new(vec![], 1);
        assert_eq!(m[&s], x.actions()[&(Scheme::new(vec![1], 1), Slot::Input(0), f)]);
        let pe = partial_eval(&x, 0, 1).unwrap();
        assert_eq!(pe.schemes(), vec![Scheme::new(vec![], 1)]);
        assert!(partial_eval(&x, 3, 0).is_err());
        let oe = output_eval(&x, 1);
        assert_eq!(oe.schemes().len(), 2);
    }

    #[test]
    fn sigma_act_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_discrete(&mut rng);
        let sw = Perm::from_one_line(&[2, 1]).unwrap();
        let y = sigma_act(&x, &sw);
        for s in y.schemes() {
            assert_eq!(y.dim(&s), x.dim(&Scheme::new(vec![s.inputs[1], s.inputs[0]], s.output)));
        }
        assert!(same_data(&sigma_act(&x, &Perm::identity(2)), &x));
    }

    #[test]
    fn sigma_act_composes_strictly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = Arc::new(FinCat::discrete(&["p", "q"]).linearize());
        let mut x = NsCollection::new(c.clone());
        for s in crate::fincat::all_schemes(&c, 3).into_iter().filter(|s| s.arity() == 3) {
            x.add_space(s, BasedSpace::standard(rng.gen_range(0..3)));
        }
        let all = Perm::all(3);
        for _ in 0..10 {
            let s = &all[rng.gen_range(0..6)];
            let t = &all[rng.gen_range(0..6)];
            assert!(same_data(&sigma_act(&sigma_act(&x, s), t), &sigma_act(&x, &t.compose(s))));
        }
    }

    #[test]
    fn sigma_act_on_arrow_preserves_functoriality() {
        let c = arrow();
        let mut x = NsCollection::new(c.clone());
        // X(u v; w) = hom(u, w) ⊗ hom(v, w)-like dimension pattern, acting only at slot 0.
        let f = c.mor_index("f").unwrap();
        for s in crate::fincat::all_schemes(&c, 2).into_iter().filter(|s| s.arity() == 2) {
            x.add_space(s.clone(), BasedSpace::standard(1));
        }
        for s in crate::fincat::all_schemes(&c, 2).into_iter().filter(|s| s.arity() == 2) {
            for (slot, g) in slot_morphisms(&c, &s) {
                assert_eq!(g, f);
                x.set_action(&s, slot, g, LinMap::from_int_rows(&[&[1]])).unwrap();
            }
        }
        assert!(validate_functor(&x).ok());
        let sw = Perm::from_one_line(&[2, 1]).unwrap();
        let y = sigma_act(&x, &sw);
        assert!(validate_functor(&y).ok());
        // partial_eval(σX, i, c) equals partial_eval(X, σ(i), c) up to reindexing.
        for i in 0..2 {
            for col in 0..2 {
                let a = partial_eval(&y, i, col).unwrap();
                let b = partial_eval(&x, sw.apply(i), col).unwrap();
                assert_eq!(a.spaces().len(), b.spaces().len());
                for (s, sp) in a.spaces() {
                    assert_eq!(Some(sp), b.space(s));
                }
            }
        }
    }

    #[test]
    fn symmetric_validation_detects_bad_sigma() {
        let c = Arc::new(FinCat::terminal().linearize());
        let mut x = NsCollection::new(c.clone());
        let s = Scheme::new(vec![0, 0], 0);
        x.add_space(s.clone(), BasedSpace::standard(2));
        let mut good = SymCollection::new(x.clone());
        let sw = Perm::from_one_line(&[2, 1]).unwrap();
        good.set_sigma(&s, &sw, LinMap::from_int_rows(&[&[0, 1], &[1, 0]])).unwrap();
        assert!(validate_symmetric(&good).ok());
        let mut bad = SymCollection::new(x);
        bad.set_sigma(&s, &sw, LinMap::from_rows(2, 2, &[vec![q(2), q(0)], vec![q(0), q(1)]]).unwrap()).unwrap();
        assert!(validate_symmetric(&bad).has_check("sigma action"));
    }
}
