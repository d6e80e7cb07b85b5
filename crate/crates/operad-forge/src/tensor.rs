//! The products `X ⊗_i Y` as coends, with their associativity, equivariance
//! and unit isomorphisms.
//!
//! For a merged scheme `S` the ambient space is `⊕_c X(S_x[c]) ⊗ Y(S_y; c)`
//! and the relations are `α·f ⊗ β − α ⊗ f·β` for generating `f: d → c`.
//! Slots are 0-based throughout.

use crate::collection::{
    act_target, act_vec, check_natural, is_iso_family, sigma_act, slot_morphisms, Collection, NatMap, NsCollection, Slot,
};
use crate::fincat::{LinearCat, Mor, Obj, Scheme};
use crate::linalg::{quotient_by_dim, BasedSpace, LinMap, QuotientSpace, SVec};
use crate::perm::Perm;
use crate::report::Report;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("collection mixes arities {0:?}")]
    MixedArity(Vec<usize>),
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("collections live over different categories")]
    CategoryMismatch,
    #[error("index ranges inconsistent: {0}")]
    BadIndices(String),
    #[error("permutation sizes do not match arities")]
    PermMismatch,
}

/// Common arity of a collection, `None` when empty.
pub fn arity_of(x: &NsCollection) -> Result<Option<usize>, TensorError> {
    let ar: BTreeSet<usize> = x.spaces().keys().map(|s| s.arity()).collect();
    match ar.len() {
        0 => Ok(None),
        1 => Ok(ar.into_iter().next()),
        _ => Err(TensorError::MixedArity(ar.into_iter().collect())),
    }
}

fn same_cat(a: &NsCollection, b: &NsCollection) -> bool {
    Arc::ptr_eq(a.cat_arc(), b.cat_arc())
}

/// One summand `X(x_scheme) ⊗ Y(y_scheme)` of an ambient space.
#[derive(Clone, Debug)]
pub struct Block {
    pub color: Obj,
    pub x_scheme: Scheme,
    pub y_scheme: Scheme,
    pub offset: usize,
    pub dx: usize,
    pub dy: usize,
}

#[derive(Clone, Debug)]
pub struct CoendComponent {
    pub blocks: Vec<Block>,
    pub ambient_dim: usize,
    pub quotient: QuotientSpace,
}

impl CoendComponent {
    pub fn block(&self, c: Obj) -> Option<&Block> {
        self.blocks.iter().find(|b| b.color == c)
    }

    /// Ambient index to `(block, a, b)`.
    pub fn decode(&self, j: usize) -> (&Block, usize, usize) {
        let blk = self.blocks.iter().rev().find(|b| b.offset <= j).expect("index in range");
        let r = j - blk.offset;
        (blk, r / blk.dy, r % blk.dy)
    }

    fn embed(&self, c: Obj, a: &SVec, b: &SVec) -> SVec {
        let Some(blk) = self.block(c) else { return SVec::new() };
        let mut v = SVec::new();
        for (p, x) in a.iter() {
            for (q, y) in b.iter() {
                v.add_term(blk.offset + p * blk.dy + q, &(x * y));
            }
        }
        v
    }
}

/// `X ⊗_i Y` with its ambient layout and quotient data.
#[derive(Clone, Debug)]
pub struct CoendResult {
    pub result: NsCollection,
    pub components: BTreeMap<Scheme, CoendComponent>,
    pub x: NsCollection,
    pub y: NsCollection,
    pub slot: usize,
    pub y_arity: usize,
    pub well_defined: Report,
    pub truncation: String,
}

impl CoendResult {
    /// Splits a merged scheme at color `c` into the X and Y schemes.
    pub fn split(&self, s: &Scheme, c: Obj) -> (Scheme, Scheme) {
        split_scheme(s, self.slot, self.y_arity, c)
    }

    /// Class of `a ⊗ b` for `a ∈ X(xs)`, `b ∈ Y(ys)`.
    pub fn inject(&self, xs: &Scheme, a: &SVec, ys: &Scheme, b: &SVec) -> (Scheme, SVec) {
        let s = xs.insert(self.slot, ys);
        let v = match self.components.get(&s) {
            Some(comp) => comp.quotient.project(&comp.embed(ys.output, a, b)),
            None => SVec::new(),
        };
        (s, v)
    }

    /// The injection `X(xs) ⊗ Y(ys) → (X ⊗_i Y)(S)` as a matrix.
    pub fn injection(&self, xs: &Scheme, ys: &Scheme) -> LinMap {
        let (dx, dy) = (self.x.dim(xs), self.y.dim(ys));
        let s = xs.insert(self.slot, ys);
        let cols = (0..dx * dy).map(|j| self.inject(xs, &SVec::unit(j / dy), ys, &SVec::unit(j % dy)).1).collect();
        LinMap::from_columns(self.result.dim(&s), cols).expect("shape")
    }

    /// Section representative of a quotient basis element.
    pub fn lift(&self, s: &Scheme, qi: usize) -> (Obj, Scheme, usize, Scheme, usize) {
        let comp = &self.components[s];
        let j = comp.quotient.basis()[qi];
        let (blk, a, b) = comp.decode(j);
        (blk.color, blk.x_scheme.clone(), a, blk.y_scheme.clone(), b)
    }

    fn act_ambient(&self, s: &Scheme, slot: Slot, f: Mor, j: usize) -> (Scheme, SVec) {
        let comp = &self.components[s];
        let cat = self.result.cat();
        let t = act_target(cat, s, slot, f).expect("acts");
        let (blk, a, b) = comp.decode(j);
        let (i, m) = (self.slot, self.y_arity);
        let (xs, ys) = (&blk.x_scheme, &blk.y_scheme);
        let (va, vb) = match slot {
            Slot::Input(k) if k < i => (self.x.act(xs, Slot::Input(k), f, a), SVec::unit(b)),
            Slot::Input(k) if k < i + m => (SVec::unit(a), self.y.act(ys, Slot::Input(k - i), f, b)),
            Slot::Input(k) => (self.x.act(xs, Slot::Input(k + 1 - m), f, a), SVec::unit(b)),
            Slot::Output => (self.x.act(xs, Slot::Output, f, a), SVec::unit(b)),
        };
        let v = match self.components.get(&t) {
            Some(tc) => tc.embed(blk.color, &va, &vb),
            None => SVec::new(),
        };
        (t, v)
    }
}

fn split_scheme(s: &Scheme, i: usize, m: usize, c: Obj) -> (Scheme, Scheme) {
    let mut xin = s.inputs[..i].to_vec();
    xin.push(c);
    xin.extend_from_slice(&s.inputs[i + m..]);
    (Scheme::new(xin, s.output), Scheme::new(s.inputs[i..i + m].to_vec(), c))
}

/// The coend `X ⊗_i Y`.
pub fn otimes_i(x: &NsCollection, y: &NsCollection, i: usize) -> Result<CoendResult, TensorError> {
    if !same_cat(x, y) {
        return Err(TensorError::CategoryMismatch);
    }
    let cat: &LinearCat = x.cat();
    let n = arity_of(x)?;
    let m = arity_of(y)?;
    if let Some(n) = n {
        if i >= n {
            return Err(TensorError::SlotOutOfRange { slot: i, arity: n });
        }
    }
    let mut out = CoendResult {
        result: NsCollection::new(x.cat_arc().clone()),
        components: BTreeMap::new(),
        x: x.clone(),
        y: y.clone(),
        slot: i,
        y_arity: m.unwrap_or(0),
        well_defined: Report::new("induced actions"),
        truncation: "finite support of the inputs".into(),
    };
    let (Some(_), Some(m)) = (n, m) else { return Ok(out) };
    let mut merged = BTreeSet::new();
    for xs in x.spaces().keys() {
        for ys in y.spaces().keys() {
            if xs.inputs[i] == ys.output {
                merged.insert(xs.insert(i, ys));
            }
        }
    }
    for s in &merged {
        let mut blocks = Vec::new();
        let mut offset = 0;
        for c in 0..cat.num_objects() {
            let (xs, ys) = split_scheme(s, i, m, c);
            let (dx, dy) = (x.dim(&xs), y.dim(&ys));
            if dx > 0 && dy > 0 {
                blocks.push(Block { color: c, x_scheme: xs, y_scheme: ys, offset, dx, dy });
                offset += dx * dy;
            }
        }
        let mut comp = CoendComponent { blocks, ambient_dim: offset, quotient: quotient_by_dim(0, &[]).expect("empty") };
        let mut rels = Vec::new();
        for &f in cat.generators() {
            let (d, c) = (cat.mor(f).src, cat.mor(f).tgt);
            let (xs_c, _) = split_scheme(s, i, m, c);
            let (_, ys_d) = split_scheme(s, i, m, d);
            for a in 0..x.dim(&xs_c) {
                let af = x.act(&xs_c, Slot::Input(i), f, a);
                for b in 0..y.dim(&ys_d) {
                    let fb = y.act(&ys_d, Slot::Output, f, b);
                    let mut r = comp.embed(d, &af, &SVec::unit(b));
                    r.sub(&comp.embed(c, &SVec::unit(a), &fb));
                    if !r.is_zero() {
                        rels.push(r);
                    }
                }
            }
        }
        comp.quotient = quotient_by_dim(comp.ambient_dim, &rels).expect("relations in range");
        if comp.quotient.dim() > 0 {
            let labels = comp
                .quotient
                .basis()
                .iter()
                .map(|&j| {
                    let (blk, a, b) = comp.decode(j);
                    format!("{}|{}|{}", cat.object_name(blk.color), x.label(&blk.x_scheme, a), y.label(&blk.y_scheme, b))
                })
                .collect();
            out.result.add_space(s.clone(), BasedSpace::new(labels).unwrap_or_else(|_| BasedSpace::standard(comp.quotient.dim())));
        }
        out.components.insert(s.clone(), comp);
    }
    // Induced actions, checked for well-definedness on every relation.
    let schemes: Vec<Scheme> = out.components.keys().cloned().collect();
    let mut wd = Report::new("induced actions");
    let mut actions = Vec::new();
    for s in &schemes {
        for (slot, f) in slot_morphisms(cat, s) {
            let t = act_target(cat, s, slot, f).expect("acts");
            let Some(tc) = out.components.get(&t) else { continue };
            let comp = &out.components[s];
            let image = |j: usize| tc.quotient.project(&out.act_ambient(s, slot, f, j).1);
            for r in comp.quotient.relations() {
                let mut v = SVec::new();
                for (j, c) in r.iter() {
                    v.add_scaled(&image(j), c);
                }
                wd.check("well defined", v.is_zero(), || format!("{} at {slot:?} of {}", cat.mor_name(f), cat.scheme_name(s)));
            }
            if comp.quotient.dim() > 0 && tc.quotient.dim() > 0 {
                let cols = comp.quotient.basis().iter().map(|&j| image(j)).collect();
                actions.push((s.clone(), slot, f, LinMap::from_columns(tc.quotient.dim(), cols).expect("shape")));
            }
        }
    }
    for (s, slot, f, mapm) in actions {
        out.result.set_action(&s, slot, f, mapm).expect("shape");
    }
    out.well_defined = wd;
    Ok(out)
}

/// Exhaustive cowedge check over all non-identity morphisms.
pub fn check_cowedge(r: &CoendResult) -> Report {
    let mut rep = Report::new("cowedge");
    let cat = r.result.cat();
    for (s, comp) in &r.components {
        for f in cat.non_identities() {
            let (d, c) = (cat.mor(f).src, cat.mor(f).tgt);
            let (xs_c, _) = r.split(s, c);
            let (xs_d, ys_d) = r.split(s, d);
            let (_, ys_c) = r.split(s, c);
            for a in 0..r.x.dim(&xs_c) {
                for b in 0..r.y.dim(&ys_d) {
                    let lhs = r.inject(&xs_d, &r.x.act(&xs_c, Slot::Input(r.slot), f, a), &ys_d, &SVec::unit(b)).1;
                    let rhs = r.inject(&xs_c, &SVec::unit(a), &ys_c, &r.y.act(&ys_d, Slot::Output, f, b)).1;
                    rep.check("cowedge", lhs == rhs, || format!("{} at {}", cat.mor_name(f), cat.scheme_name(s)));
                }
            }
        }
        let _ = comp;
    }
    rep
}

/// Which of the three associativity cases applies to `(X ⊗_j Y) ⊗_i Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssocCase {
    /// `i < j`: `(X ⊗_i Z) ⊗_{j+k−1} Y`.
    Before,
    /// `j ≤ i < j+m`: `X ⊗_j (Y ⊗_{i−j} Z)`.
    Inside,
    /// `i ≥ j+m`: `(X ⊗_{i−m+1} Z) ⊗_j Y`.
    After,
}

pub struct AssocIso {
    pub case: AssocCase,
    pub lhs: CoendResult,
    pub inner: CoendResult,
    pub rhs: CoendResult,
    pub maps: NatMap,
    pub report: Report,
}

/// The canonical isomorphism out of `(X ⊗_j Y) ⊗_i Z`.
pub fn assoc_iso(x: &NsCollection, y: &NsCollection, z: &NsCollection, i: usize, j: usize) -> Result<AssocIso, TensorError> {
    let (n, m, k) = (
        arity_of(x)?.ok_or_else(|| TensorError::BadIndices("empty X".into()))?,
        arity_of(y)?.ok_or_else(|| TensorError::BadIndices("empty Y".into()))?,
        arity_of(z)?.ok_or_else(|| TensorError::BadIndices("empty Z".into()))?,
    );
    if j >= n || i >= n + m - 1 {
        return Err(TensorError::BadIndices(format!("i={i}, j={j}, n={n}, m={m}")));
    }
    let xy = otimes_i(x, y, j)?;
    let lhs = otimes_i(&xy.result, z, i)?;
    let case = if i < j {
        AssocCase::Before
    } else if i < j + m {
        AssocCase::Inside
    } else {
        AssocCase::After
    };
    let (inner, rhs) = match case {
        AssocCase::Before => {
            let xz = otimes_i(x, z, i)?;
            let r = otimes_i(&xz.result, y, j + k - 1)?;
            (xz, r)
        }
        AssocCase::Inside => {
            let yz = otimes_i(y, z, i - j)?;
            let r = otimes_i(x, &yz.result, j)?;
            (yz, r)
        }
        AssocCase::After => {
            let xz = otimes_i(x, z, i + 1 - m)?;
            let r = otimes_i(&xz.result, y, j)?;
            (xz, r)
        }
    };
    // Class of a ⊗ b ⊗ c in the right-hand bracketing.
    let triple_rhs = |xs: &Scheme, a: usize, ys: &Scheme, b: usize, zs: &Scheme, c: usize| -> (Scheme, SVec) {
        let (ua, ub, uc) = (SVec::unit(a), SVec::unit(b), SVec::unit(c));
        match case {
            AssocCase::Before | AssocCase::After => {
                let (s1, v1) = inner.inject(xs, &ua, zs, &uc);
                rhs.inject(&s1, &v1, ys, &ub)
            }
            AssocCase::Inside => {
                let (s1, v1) = inner.inject(ys, &ub, zs, &uc);
                rhs.inject(xs, &ua, &s1, &v1)
            }
        }
    };
    let triple_lhs = |xs: &Scheme, a: usize, ys: &Scheme, b: usize, zs: &Scheme, c: usize| -> (Scheme, SVec) {
        let (s1, v1) = xy.inject(xs, &SVec::unit(a), ys, &SVec::unit(b));
        lhs.inject(&s1, &v1, zs, &SVec::unit(c))
    };
    let mut report = Report::new("associativity iso");
    let mut maps = NatMap::new();
    for (s, comp) in &lhs.components {
        let d = comp.quotient.dim();
        if d == 0 {
            continue;
        }
        let mut cols = Vec::with_capacity(d);
        for qi in 0..d {
            let (_, s1, q1, zs, c) = lhs.lift(s, qi);
            let (_, xs, a, ys, b) = xy.lift(&s1, q1);
            let (t, v) = triple_rhs(&xs, a, &ys, b, &zs, c);
            debug_assert_eq!(&t, s);
            cols.push(v);
        }
        maps.insert(s.clone(), LinMap::from_columns(rhs.result.dim(s), cols).expect("shape"));
    }
    // The map must send every triple class to the triple class.
    for (s1, comp1) in &xy.components {
        for blk in &comp1.blocks {
            for zs in z.spaces().keys() {
                if zs.output != s1.inputs.get(i).copied().unwrap_or(usize::MAX) {
                    continue;
                }
                for a in 0..blk.dx {
                    for b in 0..blk.dy {
                        for c in 0..z.dim(zs) {
                            let (t, l) = triple_lhs(&blk.x_scheme, a, &blk.y_scheme, b, zs, c);
                            let (t2, r) = triple_rhs(&blk.x_scheme, a, &blk.y_scheme, b, zs, c);
                            let img = maps.get(&t).map(|mm| mm.apply(&l)).unwrap_or_default();
                            report.check("triples", t == t2 && img == r, || format!("triple at {}", x.cat().scheme_name(&t)));
                        }
                    }
                }
            }
        }
    }
    report.check("iso", is_iso_family(&lhs.result, &rhs.result, &maps), || "not an isomorphism".into());
    report.merge(check_natural(&lhs.result, &rhs.result, &maps));
    Ok(AssocIso { case, lhs, inner, rhs, maps, report })
}

pub struct EquivIso {
    pub lhs: CoendResult,
    pub base: CoendResult,
    /// `(σ ∘_j τ)(X ⊗_j Y)` with `j = σ⁻¹(i)`.
    pub rhs: NsCollection,
    pub perm: Perm,
    pub base_slot: usize,
    pub maps: NatMap,
    pub report: Report,
}

/// `σ(X) ⊗_i τ(Y) ≅ (σ ∘_j τ)(X ⊗_j Y)` with `j = σ⁻¹(i)`.
pub fn equiv_iso(x: &NsCollection, y: &NsCollection, sigma: &Perm, tau: &Perm, i: usize) -> Result<EquivIso, TensorError> {
    let n = arity_of(x)?.unwrap_or(sigma.len());
    let m = arity_of(y)?.unwrap_or(tau.len());
    if sigma.len() != n || tau.len() != m {
        return Err(TensorError::PermMismatch);
    }
    if i >= n {
        return Err(TensorError::SlotOutOfRange { slot: i, arity: n });
    }
    let j = sigma.inverse().apply(i);
    let lhs = otimes_i(&sigma_act(x, sigma), &sigma_act(y, tau), i)?;
    let base = otimes_i(x, y, j)?;
    let perm = sigma.block_insert(j, tau);
    let rhs = sigma_act(&base.result, &perm);
    let mut maps = NatMap::new();
    for (s, comp) in &lhs.components {
        let d = comp.quotient.dim();
        if d == 0 {
            continue;
        }
        let t = s.permuted(&perm);
        let cols = (0..d)
            .map(|qi| {
                let (_, xs, a, ys, b) = lhs.lift(s, qi);
                // σ(X)(xs) is X(xs_σ) with the same basis; likewise for τ(Y).
                let (t2, v) = base.inject(&xs.permuted(sigma), &SVec::unit(a), &ys.permuted(tau), &SVec::unit(b));
                debug_assert_eq!(t2, t);
                v
            })
            .collect();
        maps.insert(s.clone(), LinMap::from_columns(rhs.dim(s), cols).expect("shape"));
    }
    let mut report = Report::new("equivariance iso");
    report.check("iso", is_iso_family(&lhs.result, &rhs, &maps), || "not an isomorphism".into());
    report.merge(check_natural(&lhs.result, &rhs, &maps));
    Ok(EquivIso { lhs, base, rhs, perm, base_slot: j, maps, report })
}

/// The hom collection `U(a; b) = hom(a, b)`.
pub fn otimes_unit(cat: Arc<LinearCat>) -> NsCollection {
    let mut u = NsCollection::new(cat.clone());
    let k = cat.num_objects();
    let mut bases = BTreeMap::new();
    for a in 0..k {
        for b in 0..k {
            let h = cat.hom(a, b).to_vec();
            if !h.is_empty() {
                let s = Scheme::new(vec![a], b);
                u.add_space(s.clone(), BasedSpace::new(h.iter().map(|&f| cat.mor_name(f).to_string()).collect()).expect("distinct ids"));
                bases.insert(s, h);
            }
        }
    }
    let schemes: Vec<Scheme> = bases.keys().cloned().collect();
    for s in &schemes {
        for (slot, f) in slot_morphisms(&cat, s) {
            let t = act_target(&cat, s, slot, f).expect("acts");
            let Some(tb) = bases.get(&t) else { continue };
            let cols = bases[s]
                .iter()
                .map(|&g| {
                    let v = match slot {
                        Slot::Input(_) => cat.compose(g, f).expect("composable"),
                        Slot::Output => cat.compose(f, g).expect("composable"),
                    };
                    v.map_indices(|h| tb.iter().position(|&x| x == h).expect("same hom"))
                })
                .collect();
            u.set_action(s, slot, f, LinMap::from_columns(tb.len(), cols).expect("shape")).expect("shape");
        }
    }
    u
}

pub struct UnitIso {
    pub right: CoendResult,
    pub left: CoendResult,
    /// `X ⊗_i U → X`, `x ⊗ g ↦ x·g`.
    pub right_maps: NatMap,
    /// `U ⊗_1 X → X`, `g ⊗ x ↦ g·x`.
    pub left_maps: NatMap,
    pub report: Report,
}

pub fn unit_iso(x: &NsCollection, i: usize) -> Result<UnitIso, TensorError> {
    let cat = x.cat_arc().clone();
    let u = otimes_unit(cat.clone());
    let right = otimes_i(x, &u, i)?;
    let left = otimes_i(&u, x, 0)?;
    let mut right_maps = NatMap::new();
    for (s, comp) in &right.components {
        if comp.quotient.dim() == 0 {
            continue;
        }
        let cols = (0..comp.quotient.dim())
            .map(|qi| {
                let (_, xs, a, ys, b) = right.lift(s, qi);
                let g = cat.hom(ys.inputs[0], ys.output)[b];
                x.act(&xs, Slot::Input(i), g, a)
            })
            .collect();
        right_maps.insert(s.clone(), LinMap::from_columns(x.dim(s), cols).expect("shape"));
    }
    let mut left_maps = NatMap::new();
    for (s, comp) in &left.components {
        if comp.quotient.dim() == 0 {
            continue;
        }
        let cols = (0..comp.quotient.dim())
            .map(|qi| {
                let (_, us, a, ys, b) = left.lift(s, qi);
                let g = cat.hom(us.inputs[0], us.output)[a];
                act_vec(x, &ys, Slot::Output, g, &SVec::unit(b))
            })
            .collect();
        left_maps.insert(s.clone(), LinMap::from_columns(x.dim(s), cols).expect("shape"));
    }
    let mut report = Report::new("unit iso");
    report.check("right iso", is_iso_family(&right.result, x, &right_maps), || "X ⊗ U → X".into());
    report.check("left iso", is_iso_family(&left.result, x, &left_maps), || "U ⊗ X → X".into());
    report.merge(check_natural(&right.result, x, &right_maps));
    report.merge(check_natural(&left.result, x, &left_maps));
    Ok(UnitIso { right, left, right_maps, left_maps, report })
}

/// Map `X ⊗_i Y → X' ⊗_i Y'` induced by `fx: X → X'` and `fy: Y → Y'`.
pub fn otimes_maps(src: &CoendResult, tgt: &CoendResult, fx: &NatMap, fy: &NatMap) -> NatMap {
    let mut out = NatMap::new();
    for (s, comp) in &src.components {
        let d = comp.quotient.dim();
        if d == 0 {
            continue;
        }
        let cols = (0..d)
            .map(|qi| {
                let (_, xs, a, ys, b) = src.lift(s, qi);
                let va = fx.get(&xs).map(|m| m.apply(&SVec::unit(a))).unwrap_or_default();
                let vb = fy.get(&ys).map(|m| m.apply(&SVec::unit(b))).unwrap_or_default();
                tgt.inject(&xs, &va, &ys, &vb).1
            })
            .collect();
        out.insert(s.clone(), LinMap::from_columns(tgt.result.dim(s), cols).expect("shape"));
    }
    out
}

/// Identity natural transformation of an explicit collection.
pub fn identity_nat(x: &NsCollection) -> NatMap {
    x.spaces().iter().map(|(s, b)| (s.clone(), LinMap::identity(b.dim()))).collect()
}

/// Componentwise composite `g ∘ f`.
pub fn compose_nat(g: &NatMap, f: &NatMap) -> NatMap {
    f.iter()
        .filter_map(|(s, fm)| g.get(s).map(|gm| (s.clone(), gm.compose(fm).expect("shapes"))))
        .collect()
}

/// Componentwise inverse, if every component is invertible.
pub fn invert_nat(f: &NatMap) -> Option<NatMap> {
    f.iter().map(|(s, m)| m.inverse().map(|inv| (s.clone(), inv))).collect()
}
