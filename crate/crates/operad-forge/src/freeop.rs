//! Leveled planar trees, interchange normal forms, and the free operad
//! constructions: non-symmetric non-unital, symmetrization and unit adjoining.
//!
//! A leveled tree is a list of levels from the leaves down to the root. Level
//! `k` is an elementary map `n_k → n_{k+1}` whose one marked fiber is the block
//! `[pos, pos + size)`, collapsed to the point `pos`; `size = 0` inserts a
//! point and `size = 1` is a unary vertex.

use crate::collection::{act_target, slot_morphisms, Collection, NsCollection, Slot};
use crate::fincat::{LinearCat, Mor, Obj, Scheme};
use crate::linalg::{quotient_by_dim, BasedSpace, LinMap, QuotientSpace, SVec};
use crate::operad::{COperad, Operad};
use crate::perm::Perm;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeError {
    #[error("slot {slot} out of range for {leaves} leaves")]
    SlotOutOfRange { slot: usize, leaves: usize },
    #[error("image for {0} has the wrong scheme or dimension")]
    BadImage(String),
    #[error("composite leaves the target truncation at {0}")]
    Truncated(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LeveledTree {
    pub leaves: usize,
    pub levels: Vec<(usize, usize)>,
}

impl LeveledTree {
    pub fn corolla(n: usize) -> Self {
        LeveledTree { leaves: n, levels: vec![(0, n)] }
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Point counts `n_1, …, n_{k+1}`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![self.leaves];
        for &(_, t) in &self.levels {
            let n = *out.last().unwrap();
            out.push(n + 1 - t);
        }
        out
    }

    pub fn fiber_sequence(&self) -> Vec<usize> {
        self.levels.iter().map(|&(_, t)| t).collect()
    }

    pub fn is_valid(&self) -> bool {
        let mut n = self.leaves;
        for &(p, t) in &self.levels {
            if t > n || p + t > n {
                return false;
            }
            n = n + 1 - t;
        }
        n == 1 && !self.levels.is_empty()
    }

    /// Whether levels `k` and `k+1` have disjoint fibers.
    pub fn can_swap(&self, k: usize) -> bool {
        if k + 1 >= self.levels.len() {
            return false;
        }
        let (i, _) = self.levels[k];
        let (j, u) = self.levels[k + 1];
        !(j <= i && i < j + u)
    }

    /// Applies the interchange move at levels `k, k+1`.
    pub fn swap(&self, k: usize) -> Option<LeveledTree> {
        if !self.can_swap(k) {
            return None;
        }
        let (i, t) = self.levels[k];
        let (j, u) = self.levels[k + 1];
        let (first, second) = if i < j { ((j + t - 1, u), (i, t)) } else { ((j, u), (i + 1 - u, t)) };
        let mut levels = self.levels.clone();
        levels[k] = first;
        levels[k + 1] = second;
        Some(LeveledTree { leaves: self.leaves, levels })
    }

    pub fn moves(&self) -> Vec<usize> {
        (0..self.levels.len().saturating_sub(1)).filter(|&k| self.can_swap(k)).collect()
    }

    /// Interchange orbit; each tree with the level permutation `new → old`.
    pub fn orbit(&self) -> Vec<(LeveledTree, Vec<usize>)> {
        let mut seen: HashMap<LeveledTree, Vec<usize>> = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(self.clone(), (0..self.height()).collect());
        queue.push_back(self.clone());
        while let Some(t) = queue.pop_front() {
            let perm = seen[&t].clone();
            for k in t.moves() {
                let u = t.swap(k).expect("move applies");
                if !seen.contains_key(&u) {
                    let mut p = perm.clone();
                    p.swap(k, k + 1);
                    seen.insert(u.clone(), p);
                    queue.push_back(u);
                }
            }
        }
        let mut out: Vec<_> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// Lexicographically least tree in the interchange orbit, with the level
    /// permutation `new → old`.
    pub fn normal_form_with_perm(&self) -> (LeveledTree, Vec<usize>) {
        if self.moves().is_empty() {
            return (self.clone(), (0..self.height()).collect());
        }
        self.orbit().into_iter().next().expect("orbit contains self")
    }

    pub fn normal_form(&self) -> LeveledTree {
        self.normal_form_with_perm().0
    }

    /// `t2` stacked above leaf `i`.
    pub fn graft(&self, i: usize, t2: &LeveledTree) -> Result<LeveledTree, FreeError> {
        if i >= self.leaves {
            return Err(FreeError::SlotOutOfRange { slot: i, leaves: self.leaves });
        }
        let mut levels: Vec<(usize, usize)> = t2.levels.iter().map(|&(p, t)| (p + i, t)).collect();
        levels.extend_from_slice(&self.levels);
        Ok(LeveledTree { leaves: self.leaves + t2.leaves - 1, levels })
    }

    /// Edge ids: leaves are `0..n`, level `k` outputs edge `n + k`. Returns,
    /// per level, the input edges, and the leaf-to-(level, input slot) map.
    pub fn edges(&self) -> (Vec<Vec<usize>>, Vec<(usize, usize)>) {
        let n = self.leaves;
        let mut boundary: Vec<usize> = (0..n).collect();
        let mut inputs = Vec::with_capacity(self.height());
        let mut consumer = vec![(usize::MAX, 0); n + self.height()];
        for (k, &(p, t)) in self.levels.iter().enumerate() {
            let ins: Vec<usize> = boundary[p..p + t].to_vec();
            for (q, &e) in ins.iter().enumerate() {
                consumer[e] = (k, q);
            }
            boundary.splice(p..p + t, std::iter::once(n + k));
            inputs.push(ins);
        }
        (inputs, consumer)
    }

    pub fn encode(&self) -> String {
        let lv: Vec<String> = self.levels.iter().map(|(p, t)| format!("{p}.{t}")).collect();
        format!("{}:{}", self.leaves, lv.join(","))
    }
}

impl fmt::Display for LeveledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// All leveled trees with `n` leaves, `1..=max_vertices` levels and fiber
/// sizes in `allowed`, sorted.
pub fn enumerate_trees(n: usize, max_vertices: usize, allowed: &BTreeSet<usize>) -> Vec<LeveledTree> {
    // Build upward from the root: a level (p, t) below a boundary of size m
    // comes from a boundary of size m + t − 1.
    fn rec(m: usize, target: usize, budget: usize, allowed: &BTreeSet<usize>, above: &mut Vec<(usize, usize)>, out: &mut Vec<LeveledTree>) {
        if m == target && !above.is_empty() {
            let mut levels = above.clone();
            levels.reverse();
            out.push(LeveledTree { leaves: target, levels });
        }
        if budget == 0 {
            return;
        }
        for &t in allowed {
            if m + t == 0 {
                continue;
            }
            let prev = m + t - 1;
            for p in 0..m {
                above.push((p, t));
                rec(prev, target, budget - 1, allowed, above, out);
                above.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(1, n, max_vertices, allowed, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Interchange classes of a list of trees, by exhaustive move closure.
pub fn interchange_classes(trees: &[LeveledTree]) -> Vec<Vec<LeveledTree>> {
    let mut seen: HashSet<LeveledTree> = HashSet::new();
    let mut out = Vec::new();
    for t in trees {
        if seen.contains(t) {
            continue;
        }
        let orbit: Vec<LeveledTree> = t.orbit().into_iter().map(|(u, _)| u).collect();
        seen.extend(orbit.iter().cloned());
        out.push(orbit);
    }
    out
}

/// A tree whose levels carry generator basis elements `(scheme, index)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub tree: LeveledTree,
    pub labels: Vec<(Scheme, usize)>,
}

impl Monomial {
    pub fn weight(&self) -> usize {
        self.labels.len()
    }

    pub fn scheme(&self) -> Scheme {
        let (_, consumer) = self.tree.edges();
        let inputs = (0..self.tree.leaves)
            .map(|e| {
                let (k, q) = consumer[e];
                self.labels[k].0.inputs[q]
            })
            .collect();
        Scheme::new(inputs, self.labels.last().expect("nonempty").0.output)
    }

    pub fn normalized(self) -> Monomial {
        let (tree, perm) = self.tree.normal_form_with_perm();
        let labels = perm.iter().map(|&k| self.labels[k].clone()).collect();
        Monomial { tree, labels }
    }

    pub fn graft(&self, i: usize, other: &Monomial) -> Monomial {
        let tree = self.tree.graft(i, &other.tree).expect("slot in range");
        let mut labels = other.labels.clone();
        labels.extend(self.labels.iter().cloned());
        Monomial { tree, labels }.normalized()
    }

    pub fn label(&self, x: &dyn Collection) -> String {
        let ls: Vec<String> = self.labels.iter().map(|(s, a)| format!("{}{}", x.cat().scheme_name(s), x.label(s, *a))).collect();
        format!("{}[{}]", self.tree.encode(), ls.join(";"))
    }
}

/// One component `F(X)(s)`: ambient monomials and the quotient by edge relations.
#[derive(Clone, Debug)]
pub struct FreeComponent {
    pub monomials: Vec<Monomial>,
    pub index: HashMap<Monomial, usize>,
    pub quotient: QuotientSpace,
}

impl FreeComponent {
    /// Class of a combination of monomials.
    pub fn class(&self, terms: &[(Monomial, crate::linalg::Scalar)]) -> SVec {
        let mut v = SVec::new();
        for (m, c) in terms {
            v.add_term(self.index[m], c);
        }
        self.quotient.project(&v)
    }

    pub fn representative(&self, q: usize) -> &Monomial {
        &self.monomials[self.quotient.basis()[q]]
    }
}

/// The free non-symmetric non-unital operad on `X`, truncated by arity and weight.
pub struct FreeOperad {
    pub gens: NsCollection,
    pub arity_bound: usize,
    pub weight_bound: usize,
    pub components: BTreeMap<Scheme, FreeComponent>,
    pub carrier: NsCollection,
}

fn replace_label(m: &Monomial, k: usize, s: Scheme, a: usize) -> Monomial {
    let mut out = m.clone();
    out.labels[k] = (s, a);
    out
}

/// Builds `F₁(X)` up to arity `n` and weight `w`.
pub fn free_ns(x: &NsCollection, n: usize, w: usize) -> FreeOperad {
    let cat = x.cat_arc().clone();
    let gens: Vec<(Scheme, usize)> = x.spaces().iter().flat_map(|(s, b)| (0..b.dim()).map(move |a| (s.clone(), a))).collect();
    let mut by_out: BTreeMap<Obj, Vec<(Scheme, usize)>> = BTreeMap::new();
    for g in &gens {
        by_out.entry(g.0.output).or_default().push(g.clone());
    }
    let has_nullary = gens.iter().any(|(s, _)| s.arity() == 0);
    let cap = |weight: usize| if has_nullary { n + w - weight } else { n };
    let mut all: BTreeSet<Monomial> = BTreeSet::new();
    let mut layer: BTreeSet<Monomial> = gens
        .iter()
        .filter(|(s, _)| s.arity() <= cap(1))
        .map(|(s, a)| Monomial { tree: LeveledTree::corolla(s.arity()), labels: vec![(s.clone(), *a)] })
        .collect();
    for weight in 1..=w {
        all.extend(layer.iter().cloned());
        if weight == w {
            break;
        }
        let next: Vec<Monomial> = layer
            .par_iter()
            .flat_map_iter(|m| {
                let sch = m.scheme();
                let mut out = Vec::new();
                for p in 0..m.tree.leaves {
                    for (s, a) in by_out.get(&sch.inputs[p]).map(|v| v.as_slice()).unwrap_or(&[]) {
                        if m.tree.leaves + s.arity() - 1 <= cap(weight + 1) {
                            let top = Monomial { tree: LeveledTree::corolla(s.arity()), labels: vec![(s.clone(), *a)] };
                            out.push(m.graft(p, &top));
                        }
                    }
                }
                out
            })
            .collect();
        layer = next.into_iter().collect();
    }
    let mut per_scheme: BTreeMap<Scheme, Vec<Monomial>> = BTreeMap::new();
    for m in all {
        let s = m.scheme();
        if s.arity() <= n {
            per_scheme.entry(s).or_default().push(m);
        }
    }
    for v in per_scheme.values_mut() {
        v.sort_by(|a, b| (a.weight(), &a.tree, &a.labels).cmp(&(b.weight(), &b.tree, &b.labels)));
    }
    let comps: Vec<(Scheme, FreeComponent)> = per_scheme
        .into_par_iter()
        .map(|(s, monomials)| {
            let index: HashMap<Monomial, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let rels = edge_relations(x, &monomials, &index);
            let quotient = quotient_by_dim(monomials.len(), &rels).expect("relations in range");
            (s, FreeComponent { monomials, index, quotient })
        })
        .collect();
    let components: BTreeMap<Scheme, FreeComponent> = comps.into_iter().collect();
    let mut carrier = NsCollection::new(cat.clone());
    for (s, comp) in &components {
        let labels: Vec<String> = comp.quotient.basis().iter().map(|&j| comp.monomials[j].label(x)).collect();
        carrier.add_space(s.clone(), BasedSpace::new(labels).unwrap_or_else(|_| BasedSpace::standard(comp.quotient.dim())));
    }
    let mut out = FreeOperad { gens: x.clone(), arity_bound: n, weight_bound: w, components, carrier };
    let acts: Vec<(Scheme, Slot, Mor, LinMap)> = out
        .components
        .par_iter()
        .flat_map_iter(|(s, comp)| {
            let mut v = Vec::new();
            if comp.quotient.dim() == 0 {
                return v;
            }
            for (slot, f) in slot_morphisms(&cat, s) {
                let t = act_target(&cat, s, slot, f).expect("acts");
                let Some(tc) = out.components.get(&t) else { continue };
                if tc.quotient.dim() == 0 {
                    continue;
                }
                let cols = (0..comp.quotient.dim()).map(|q| out.act_monomial(comp.representative(q), slot, f, tc)).collect();
                v.push((s.clone(), slot, f, LinMap::from_columns(tc.quotient.dim(), cols).expect("shape")));
            }
            v
        })
        .collect();
    for (s, slot, f, m) in acts {
        out.carrier.set_action(&s, slot, f, m).expect("shape");
    }
    out
}

fn edge_relations(x: &NsCollection, monomials: &[Monomial], index: &HashMap<Monomial, usize>) -> Vec<SVec> {
    let c = x.cat();
    let mut contexts: BTreeSet<(Monomial, usize)> = BTreeSet::new();
    for m in monomials {
        let (inputs, consumer) = m.tree.edges();
        let _ = inputs;
        let n = m.tree.leaves;
        for k in 0..m.weight() - 1 {
            let (l, q) = consumer[n + k];
            let mut key = m.clone();
            key.labels[k] = (key.labels[k].0.with_output(usize::MAX), usize::MAX);
            let mut sl = key.labels[l].0.clone();
            sl.inputs[q] = usize::MAX;
            key.labels[l] = (sl, usize::MAX);
            contexts.insert((key, k));
        }
    }
    let mut rels = Vec::new();
    for (ctx, k) in contexts {
        let (_, consumer) = ctx.tree.edges();
        let (l, q) = consumer[ctx.tree.leaves + k];
        for &f in c.generators() {
            let (d, cc) = (c.mor(f).src, c.mor(f).tgt);
            let upper_d = ctx.labels[k].0.with_output(d);
            let upper_c = ctx.labels[k].0.with_output(cc);
            let lower_c = ctx.labels[l].0.with_input(q, cc);
            let lower_d = ctx.labels[l].0.with_input(q, d);
            for a in 0..x.dim(&lower_c) {
                let af = x.act(&lower_c, Slot::Input(q), f, a);
                for b in 0..x.dim(&upper_d) {
                    let fb = x.act(&upper_d, Slot::Output, f, b);
                    let mut r = SVec::new();
                    for (a2, coef) in af.iter() {
                        let m = replace_label(&replace_label(&ctx, l, lower_d.clone(), a2), k, upper_d.clone(), b);
                        r.add_term(index[&m], coef);
                    }
                    for (b2, coef) in fb.iter() {
                        let m = replace_label(&replace_label(&ctx, l, lower_c.clone(), a), k, upper_c.clone(), b2);
                        r.add_term(index[&m], &-coef);
                    }
                    if !r.is_zero() {
                        rels.push(r);
                    }
                }
            }
        }
    }
    rels
}

impl FreeOperad {
    fn act_monomial(&self, m: &Monomial, slot: Slot, f: Mor, target: &FreeComponent) -> SVec {
        let (k, s_slot) = match slot {
            Slot::Input(p) => {
                let (_, consumer) = m.tree.edges();
                let (k, q) = consumer[p];
                (k, Slot::Input(q))
            }
            Slot::Output => (m.weight() - 1, Slot::Output),
        };
        let (ls, la) = &m.labels[k];
        let ts = act_target(self.gens.cat(), ls, s_slot, f).expect("acts");
        let v = self.gens.act(ls, s_slot, f, *la);
        let terms: Vec<(Monomial, crate::linalg::Scalar)> = v.iter().map(|(b, coef)| (replace_label(m, k, ts.clone(), b), coef.clone())).collect();
        target.class(&terms)
    }

    /// The class of a single generator basis element.
    pub fn generator(&self, s: &Scheme, a: usize) -> Option<SVec> {
        let m = Monomial { tree: LeveledTree::corolla(s.arity()), labels: vec![(s.clone(), a)] };
        self.components.get(s).map(|c| c.class(&[(m, crate::fincat::one())]))
    }

    pub fn cat_arc(&self) -> &Arc<LinearCat> {
        self.carrier.cat_arc()
    }

    /// Component dimensions by weight.
    pub fn dims_by_weight(&self, s: &Scheme) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        if let Some(c) = self.components.get(s) {
            for q in 0..c.quotient.dim() {
                *out.entry(c.representative(q).weight()).or_insert(0) += 1;
            }
        }
        out
    }
}

impl Operad for FreeOperad {
    fn carrier(&self) -> &dyn Collection {
        &self.carrier
    }

    fn symmetric(&self) -> bool {
        false
    }

    fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    fn compose(&self, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize) -> Option<SVec> {
        let (ca, cb) = (self.components.get(s)?, self.components.get(t)?);
        let (ma, mb) = (ca.representative(a), cb.representative(b));
        if ma.weight() + mb.weight() > self.weight_bound || s.arity() + t.arity() - 1 > self.arity_bound {
            return None;
        }
        let g = ma.graft(i, mb);
        let r = s.insert(i, t);
        Some(self.components.get(&r).map(|c| c.class(&[(g, crate::fincat::one())])).unwrap_or_default())
    }

    fn weight(&self, s: &Scheme, a: usize) -> Option<usize> {
        self.components.get(s).map(|c| c.representative(a).weight())
    }

    fn weight_bound(&self) -> Option<usize> {
        Some(self.weight_bound)
    }
}

/// Symmetrization `⊕_π π(A_n)`: basis `(π, a)` stands for `a·π`.
pub struct Symmetrized<A: Operad> {
    pub base: A,
    carrier: SymCarrier,
}

struct SymCarrier {
    cat: Arc<LinearCat>,
    /// Per scheme: (π, base scheme, offset, dim) blocks.
    blocks: BTreeMap<Scheme, Vec<(Perm, Scheme, usize, usize)>>,
    base_labels: BTreeMap<Scheme, Vec<String>>,
    base_acts: BTreeMap<(Scheme, Slot, Mor), Vec<SVec>>,
}

impl SymCarrier {
    fn dim(&self, s: &Scheme) -> usize {
        self.blocks.get(s).and_then(|b| b.last()).map(|(_, _, o, d)| o + d).unwrap_or(0)
    }

    fn decode(&self, s: &Scheme, a: usize) -> (&Perm, &Scheme, usize, usize) {
        let bl = &self.blocks[s];
        let (p, t, o, _) = bl.iter().rev().find(|(_, _, o, _)| *o <= a).expect("in range");
        (p, t, a - o, *o)
    }

    fn offset(&self, s: &Scheme, p: &Perm) -> Option<usize> {
        self.blocks.get(s)?.iter().find(|(q, _, _, _)| q == p).map(|(_, _, o, _)| *o)
    }
}

impl Collection for SymCarrier {
    fn cat(&self) -> &LinearCat {
        &self.cat
    }

    fn schemes(&self) -> Vec<Scheme> {
        self.blocks.keys().cloned().collect()
    }

    fn dim(&self, s: &Scheme) -> usize {
        SymCarrier::dim(self, s)
    }

    fn label(&self, s: &Scheme, a: usize) -> String {
        let (p, t, b, _) = self.decode(s, a);
        format!("{}·{}", self.base_labels[t][b], p.to_string_dotted())
    }

    fn act(&self, s: &Scheme, slot: Slot, f: Mor, a: usize) -> SVec {
        if self.cat.is_identity(f) {
            return SVec::unit(a);
        }
        let (p, t, b, _) = self.decode(s, a);
        let bslot = match slot {
            Slot::Input(k) => Slot::Input(p.apply(k)),
            Slot::Output => Slot::Output,
        };
        let tt = act_target(&self.cat, s, slot, f).expect("acts");
        let Some(o) = self.offset(&tt, p) else { return SVec::new() };
        let v = match self.base_acts.get(&(t.clone(), bslot, f)) {
            Some(cols) => cols[b].clone(),
            None => SVec::new(),
        };
        v.map_indices(|x| x + o)
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn act_sigma(&self, s: &Scheme, sigma: &Perm, a: usize) -> SVec {
        let (p, _, b, _) = self.decode(s, a);
        let np = p.compose(sigma);
        let o = self.offset(&s.permuted(sigma), &np).expect("block exists");
        SVec::unit(o + b)
    }
}

impl<A: Operad> Symmetrized<A> {
    pub fn new(base: A, cat: Arc<LinearCat>) -> Self {
        let bx = base.carrier();
        let mut blocks: BTreeMap<Scheme, Vec<(Perm, Scheme, usize, usize)>> = BTreeMap::new();
        let mut targets: BTreeSet<Scheme> = BTreeSet::new();
        for t in bx.schemes() {
            for p in Perm::all(t.arity()) {
                targets.insert(t.permuted(&p));
            }
        }
        for s in targets {
            let mut off = 0;
            let mut v = Vec::new();
            for p in Perm::all(s.arity()) {
                let t = s.permuted(&p.inverse());
                let d = bx.dim(&t);
                if d > 0 {
                    v.push((p, t, off, d));
                    off += d;
                }
            }
            if off > 0 {
                blocks.insert(s, v);
            }
        }
        let base_labels = bx.schemes().into_iter().map(|t| (t.clone(), (0..bx.dim(&t)).map(|a| bx.label(&t, a)).collect())).collect();
        let mut base_acts = BTreeMap::new();
        for t in bx.schemes() {
            for (slot, f) in slot_morphisms(&cat, &t) {
                let cols: Vec<SVec> = (0..bx.dim(&t)).map(|a| bx.act(&t, slot, f, a)).collect();
                if cols.iter().any(|c| !c.is_zero()) {
                    base_acts.insert((t.clone(), slot, f), cols);
                }
            }
        }
        let carrier = SymCarrier { cat, blocks, base_labels, base_acts };
        Symmetrized { base, carrier }
    }

    /// `(π, base scheme, base index)` of a basis element.
    pub fn decode(&self, s: &Scheme, a: usize) -> (Perm, Scheme, usize) {
        let (p, t, b, _) = self.carrier.decode(s, a);
        (p.clone(), t.clone(), b)
    }

    /// Embeds `a·π` for a base vector `a ∈ A(t)`.
    pub fn embed(&self, t: &Scheme, p: &Perm, v: &SVec) -> SVec {
        let s = t.permuted(p);
        let o = self.carrier.offset(&s, p).unwrap_or(0);
        v.map_indices(|x| x + o)
    }
}

impl<A: Operad> Operad for Symmetrized<A> {
    fn carrier(&self) -> &dyn Collection {
        &self.carrier
    }

    fn symmetric(&self) -> bool {
        true
    }

    fn arity_bound(&self) -> usize {
        self.base.arity_bound()
    }

    /// `(a·π) ∘_i (b·ρ) = (a ∘_{π(i)} b)·(π ∘_i ρ)`.
    fn compose(&self, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize) -> Option<SVec> {
        let (p, sa, ia, _) = self.carrier.decode(s, a);
        let (r, tb, ib, _) = self.carrier.decode(t, b);
        let v = self.base.compose(sa, p.apply(i), tb, ia, ib)?;
        let perm = p.block_insert(i, r);
        Some(self.embed(&sa.insert(p.apply(i), tb), &perm, &v))
    }

    fn weight(&self, s: &Scheme, a: usize) -> Option<usize> {
        let (_, t, b, _) = self.carrier.decode(s, a);
        self.base.weight(t, b)
    }

    fn weight_bound(&self) -> Option<usize> {
        self.base.weight_bound()
    }
}

pub fn symmetrize<A: Operad>(a: A, cat: Arc<LinearCat>) -> Symmetrized<A> {
    Symmetrized::new(a, cat)
}

/// `A ⊕ I` with `I` the hom collection in arity one; basis of `(a; b)` is
/// `A(a; b)` followed by `hom(a, b)`.
pub struct WithUnit<A: Operad> {
    pub base: A,
    carrier: UnitCarrier,
}

struct UnitCarrier {
    cat: Arc<LinearCat>,
    schemes: Vec<Scheme>,
    base_dims: BTreeMap<Scheme, usize>,
    base_labels: BTreeMap<Scheme, Vec<String>>,
    base_acts: BTreeMap<(Scheme, Slot, Mor), Vec<SVec>>,
    base_sigma: BTreeMap<(Scheme, Perm), Vec<SVec>>,
    symmetric: bool,
}

impl UnitCarrier {
    fn bdim(&self, s: &Scheme) -> usize {
        self.base_dims.get(s).copied().unwrap_or(0)
    }

    fn hom(&self, s: &Scheme) -> &[Mor] {
        if s.arity() == 1 {
            self.cat.hom(s.inputs[0], s.output)
        } else {
            &[]
        }
    }

    fn unit_index(&self, f: Mor) -> (Scheme, usize) {
        let m = self.cat.mor(f);
        let s = Scheme::new(vec![m.src], m.tgt);
        let k = self.hom(&s).iter().position(|&g| g == f).expect("in hom");
        let o = self.bdim(&s);
        (s, o + k)
    }

    fn units_vec(&self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (f, c) in v.iter() {
            out.add_term(self.unit_index(f).1, c);
        }
        out
    }
}

impl Collection for UnitCarrier {
    fn cat(&self) -> &LinearCat {
        &self.cat
    }

    fn schemes(&self) -> Vec<Scheme> {
        self.schemes.clone()
    }

    fn dim(&self, s: &Scheme) -> usize {
        self.bdim(s) + self.hom(s).len()
    }

    fn label(&self, s: &Scheme, a: usize) -> String {
        let d = self.bdim(s);
        if a < d {
            self.base_labels[s][a].clone()
        } else {
            format!("u_{}", self.cat.mor_name(self.hom(s)[a - d]))
        }
    }

    fn act(&self, s: &Scheme, slot: Slot, f: Mor, a: usize) -> SVec {
        let d = self.bdim(s);
        if a < d {
            if self.cat.is_identity(f) {
                return SVec::unit(a);
            }
            return self.base_acts.get(&(s.clone(), slot, f)).map(|c| c[a].clone()).unwrap_or_default();
        }
        let g = self.hom(s)[a - d];
        let comp = match slot {
            Slot::Input(_) => self.cat.compose(g, f).expect("composable"),
            Slot::Output => self.cat.compose(f, g).expect("composable"),
        };
        self.units_vec(&comp)
    }

    fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn act_sigma(&self, s: &Scheme, sigma: &Perm, a: usize) -> SVec {
        if sigma.is_identity() {
            return SVec::unit(a);
        }
        self.base_sigma.get(&(s.clone(), sigma.clone())).map(|c| c[a].clone()).unwrap_or_default()
    }
}

impl<A: Operad> WithUnit<A> {
    pub fn new(base: A, cat: Arc<LinearCat>) -> Self {
        let bx = base.carrier();
        let mut schemes: BTreeSet<Scheme> = bx.schemes().into_iter().collect();
        for a in 0..cat.num_objects() {
            for b in 0..cat.num_objects() {
                if !cat.hom(a, b).is_empty() {
                    schemes.insert(Scheme::new(vec![a], b));
                }
            }
        }
        let base_dims = bx.schemes().into_iter().map(|s| (s.clone(), bx.dim(&s))).collect();
        let base_labels = bx.schemes().into_iter().map(|t| (t.clone(), (0..bx.dim(&t)).map(|a| bx.label(&t, a)).collect())).collect();
        let mut base_acts = BTreeMap::new();
        let mut base_sigma = BTreeMap::new();
        let offsets_target = |t: &Scheme| t.clone();
        for t in bx.schemes() {
            for (slot, f) in slot_morphisms(&cat, &t) {
                let cols: Vec<SVec> = (0..bx.dim(&t)).map(|a| bx.act(&t, slot, f, a)).collect();
                base_acts.insert((offsets_target(&t), slot, f), cols);
            }
            if base.symmetric() {
                for p in Perm::all(t.arity()).into_iter().filter(|p| !p.is_identity()) {
                    let cols: Vec<SVec> = (0..bx.dim(&t)).map(|a| bx.act_sigma(&t, &p, a)).collect();
                    base_sigma.insert((t.clone(), p), cols);
                }
            }
        }
        let symmetric = base.symmetric();
        let carrier = UnitCarrier { cat, schemes: schemes.into_iter().collect(), base_dims, base_labels, base_acts, base_sigma, symmetric };
        WithUnit { base, carrier }
    }
}

impl<A: Operad> Operad for WithUnit<A> {
    fn carrier(&self) -> &dyn Collection {
        &self.carrier
    }

    fn symmetric(&self) -> bool {
        self.base.symmetric()
    }

    fn arity_bound(&self) -> usize {
        self.base.arity_bound()
    }

    fn compose(&self, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize) -> Option<SVec> {
        let c = &self.carrier;
        let (ds, dt) = (c.bdim(s), c.bdim(t));
        match (a < ds, b < dt) {
            (true, true) => self.base.compose(s, i, t, a, b),
            (true, false) => {
                let f = c.hom(t)[b - dt];
                Some(if self.carrier.cat.is_identity(f) { SVec::unit(a) } else { c.act(s, Slot::Input(i), f, a) })
            }
            (false, true) => {
                let f = c.hom(s)[a - ds];
                Some(if self.carrier.cat.is_identity(f) { SVec::unit(b) } else { c.act(t, Slot::Output, f, b) })
            }
            (false, false) => {
                let (f, g) = (c.hom(s)[a - ds], c.hom(t)[b - dt]);
                Some(c.units_vec(&self.carrier.cat.compose(f, g).expect("composable")))
            }
        }
    }

    fn unit(&self, f: Mor) -> Option<SVec> {
        Some(SVec::unit(self.carrier.unit_index(f).1))
    }

    fn is_unital(&self) -> bool {
        true
    }

    fn weight(&self, s: &Scheme, a: usize) -> Option<usize> {
        if a < self.carrier.bdim(s) {
            self.base.weight(s, a)
        } else {
            Some(0)
        }
    }

    fn weight_bound(&self) -> Option<usize> {
        self.base.weight_bound()
    }
}

pub fn adjoin_unit<A: Operad>(a: A, cat: Arc<LinearCat>) -> WithUnit<A> {
    WithUnit::new(a, cat)
}

/// Evaluates a monomial in a target operad: the root label's image, then
/// `∘_{pos}` with each higher level's image.
pub fn evaluate_monomial(m: &Monomial, images: &BTreeMap<(Scheme, usize), SVec>, target: &dyn Operad) -> Result<SVec, FreeError> {
    let img = |k: usize| -> Result<SVec, FreeError> {
        let (s, a) = &m.labels[k];
        images.get(&(s.clone(), *a)).cloned().ok_or_else(|| FreeError::BadImage(format!("{} basis {a}", target.carrier().cat().scheme_name(s))))
    };
    let h = m.weight();
    let mut cur = img(h - 1)?;
    let mut sc = m.labels[h - 1].0.clone();
    for k in (0..h - 1).rev() {
        let (p, _) = m.tree.levels[k];
        let t = &m.labels[k].0;
        cur = target.compose_vec(&sc, p, t, &cur, &img(k)?).ok_or_else(|| FreeError::Truncated(target.carrier().cat().scheme_name(&sc)))?;
        sc = sc.insert(p, t);
    }
    Ok(cur)
}

/// The operad map `F₁(X) → A` extending `images`, one matrix per scheme.
pub fn universal_map(free: &FreeOperad, images: &BTreeMap<(Scheme, usize), SVec>, target: &dyn Operad) -> Result<BTreeMap<Scheme, LinMap>, FreeError> {
    let tx = target.carrier();
    for ((s, a), v) in images {
        if free.gens.dim(s) <= *a || v.max_index().map(|k| k >= tx.dim(s)).unwrap_or(false) {
            return Err(FreeError::BadImage(format!("{} basis {a}", tx.cat().scheme_name(s))));
        }
    }
    let mut out = BTreeMap::new();
    for (s, comp) in &free.components {
        let cols = (0..comp.quotient.dim()).map(|q| evaluate_monomial(comp.representative(q), images, target)).collect::<Result<Vec<_>, _>>()?;
        out.insert(s.clone(), LinMap::from_columns(tx.dim(s), cols).expect("shape"));
    }
    Ok(out)
}

/// Evaluates `a·π` elements of a symmetrized free operad in a symmetric target.
pub fn universal_map_sym(
    free: &Symmetrized<FreeOperad>,
    images: &BTreeMap<(Scheme, usize), SVec>,
    target: &dyn Operad,
    s: &Scheme,
    v: &SVec,
) -> Result<SVec, FreeError> {
    let tx = target.carrier();
    let mut out = SVec::new();
    for (a, coef) in v.iter() {
        let (p, t, b, _) = free.carrier.decode(s, a);
        let m = free.base.components[t].representative(b);
        let e = evaluate_monomial(m, images, target)?;
        out.add_scaled(&crate::collection::sigma_vec(tx, t, p, &e), coef);
    }
    Ok(out)
}

/// Materialized free operad with weights attached.
pub fn materialize_free(f: &FreeOperad) -> COperad {
    let mut c = COperad::materialize(f, f.cat_arc().clone());
    c.weight_bound = Some(f.weight_bound);
    c
}
