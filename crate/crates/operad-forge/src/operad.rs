//! C-operads: the `∘_i` and `∘_i^f` presentations, units, substitution,
//! exhaustive axiom checks, ideals and quotients.
//!
//! Compositions are indexed by 0-based slots. For `a ∈ P(s)` and `b ∈ P(t)`
//! with `t.output == s.inputs[i]`, `a ∘_i b` lives in `P(s.insert(i, t))`.
//! The symmetric structure is the right action `(−)σ: P(s) → P(s_σ)` and the
//! equivariance axiom reads `(aσ) ∘_i (bτ) = (a ∘_{σ(i)} b)(σ ∘_i τ)`.

use crate::collection::{
    act_target, act_vec, sigma_vec, slot_generators, slot_morphisms, validate_functor, validate_symmetric, Collection, NsCollection, Slot,
    SymCollection,
};
use crate::fincat::{LinearCat, Mor, Obj, Scheme};
use crate::linalg::{BasedSpace, Echelon, LinMap, QuotientSpace, SVec, Scalar};
use crate::perm::Perm;
use crate::report::Report;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperadError {
    #[error("composition shape mismatch at {0}")]
    Shape(String),
    #[error("vector outside component {0}")]
    BadVector(String),
    #[error("operad has no units")]
    NotUnital,
    #[error("ideal did not stabilize within {0} rounds")]
    NoFixpoint(usize),
    #[error("{0}")]
    Invalid(String),
}

/// A C-operad given by its `∘_i` family on basis elements.
pub trait Operad: Send + Sync {
    fn carrier(&self) -> &dyn Collection;

    /// Whether the operad carries a symmetric structure.
    fn symmetric(&self) -> bool;

    fn arity_bound(&self) -> usize;

    /// `a ∘_i b`, or `None` when the result lies outside the truncation.
    fn compose(&self, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize) -> Option<SVec>;

    fn compose_vec(&self, s: &Scheme, i: usize, t: &Scheme, u: &SVec, v: &SVec) -> Option<SVec> {
        let mut out = SVec::new();
        for (a, x) in u.iter() {
            for (b, y) in v.iter() {
                out.add_scaled(&self.compose(s, i, t, a, b)?, &(x * y));
            }
        }
        Some(out)
    }

    /// `u_f ∈ P(a; b)` for a basis morphism `f: a → b`.
    fn unit(&self, _f: Mor) -> Option<SVec> {
        None
    }

    fn is_unital(&self) -> bool {
        false
    }

    /// Weight of a basis element, for weight-graded operads.
    fn weight(&self, _s: &Scheme, _a: usize) -> Option<usize> {
        None
    }

    /// Compositions of total weight above this lie outside the truncation.
    fn weight_bound(&self) -> Option<usize> {
        None
    }
}

/// Least basis weight per scheme, when the operad is weight-truncated.
struct WeightFilter {
    bound: usize,
    least: HashMap<Scheme, usize>,
}

impl WeightFilter {
    fn new(p: &dyn Operad, schemes: &[Scheme]) -> Option<Self> {
        let bound = p.weight_bound()?;
        let mut least = HashMap::new();
        for s in schemes {
            let w = (0..p.carrier().dim(s)).map(|a| p.weight(s, a)).collect::<Option<Vec<_>>>()?;
            least.insert(s.clone(), w.into_iter().min().unwrap_or(0));
        }
        Some(WeightFilter { bound, least })
    }

    fn vector_weight(p: &dyn Operad, s: &Scheme, v: &SVec) -> usize {
        v.iter().filter_map(|(a, _)| p.weight(s, a)).min().unwrap_or(0)
    }

    /// Whether every composite of a vector of weight `w` with `t` is truncated.
    fn excludes(&self, w: usize, t: &Scheme) -> bool {
        w + self.least.get(t).copied().unwrap_or(0) > self.bound
    }
}

pub fn cat_of(p: &dyn Operad) -> &LinearCat {
    p.carrier().cat()
}

/// Operad with explicitly stored composition matrices. Column `a·dim(t)+b`
/// of `comps[(s, i, t)]` is `a ∘_i b`; missing entries are zero.
#[derive(Clone, Debug)]
pub struct COperad {
    pub carrier: SymCollection,
    pub symmetric: bool,
    pub arity_bound: usize,
    pub weight_bound: Option<usize>,
    pub comps: BTreeMap<(Scheme, usize, Scheme), LinMap>,
    pub units: Option<BTreeMap<Mor, SVec>>,
    /// Per-basis weights when the basis is weight-homogeneous.
    pub weights: Option<BTreeMap<Scheme, Vec<usize>>>,
}

impl COperad {
    pub fn new(carrier: SymCollection, symmetric: bool, arity_bound: usize) -> Self {
        COperad { carrier, symmetric, arity_bound, weight_bound: None, comps: BTreeMap::new(), units: None, weights: None }
    }

    pub fn cat_arc(&self) -> &Arc<LinearCat> {
        self.carrier.underlying.cat_arc()
    }

    pub fn set_comp(&mut self, s: &Scheme, i: usize, t: &Scheme, m: LinMap) -> Result<(), OperadError> {
        let r = s.insert(i, t);
        let (dx, dy, dr) = (self.carrier.dim(s), self.carrier.dim(t), self.carrier.dim(&r));
        if i >= s.arity() || s.inputs[i] != t.output || m.cols() != dx * dy || m.rows() != dr {
            return Err(OperadError::Shape(format!("{} ∘_{i} {}", self.carrier.cat().scheme_name(s), self.carrier.cat().scheme_name(t))));
        }
        if !m.is_zero() {
            self.comps.insert((s.clone(), i, t.clone()), m);
        } else {
            self.comps.remove(&(s.clone(), i, t.clone()));
        }
        Ok(())
    }

    /// Copies every composition of `p` within its truncation.
    pub fn materialize(p: &dyn Operad, cat: Arc<LinearCat>) -> COperad {
        let carrier = if p.symmetric() {
            SymCollection::materialize(p.carrier(), cat)
        } else {
            SymCollection::new(NsCollection::materialize(p.carrier(), cat))
        };
        let mut out = COperad::new(carrier, p.symmetric(), p.arity_bound());
        let schemes = p.carrier().schemes();
        let by_out = by_output(&schemes);
        let cells: Vec<(Scheme, usize, Scheme)> = composable_cells(&schemes, &by_out, p.arity_bound());
        let mats: Vec<_> = cells
            .par_iter()
            .map(|(s, i, t)| {
                let (dx, dy) = (p.carrier().dim(s), p.carrier().dim(t));
                let r = s.insert(*i, t);
                let mut cols = Vec::with_capacity(dx * dy);
                for a in 0..dx {
                    for b in 0..dy {
                        cols.push(p.compose(s, *i, t, a, b).unwrap_or_default());
                    }
                }
                LinMap::from_columns(p.carrier().dim(&r), cols).expect("shape")
            })
            .collect();
        for ((s, i, t), m) in cells.into_iter().zip(mats) {
            out.set_comp(&s, i, &t, m).expect("shape");
        }
        if p.is_unital() {
            let c = p.carrier().cat();
            out.units = Some((0..c.morphisms().len()).filter_map(|f| p.unit(f).map(|u| (f, u))).collect());
        }
        let ws: BTreeMap<Scheme, Vec<usize>> =
            schemes.iter().map(|s| (s.clone(), (0..p.carrier().dim(s)).map(|a| p.weight(s, a)).collect::<Option<Vec<_>>>())).filter_map(|(s, w)| w.map(|w| (s, w))).collect();
        if !ws.is_empty() && ws.len() == schemes.len() {
            out.weights = Some(ws);
        }
        out
    }

    /// Same carrier and compositions, with the given units.
    pub fn with_units(mut self, units: BTreeMap<Mor, SVec>) -> COperad {
        self.units = Some(units);
        self
    }

    /// Compositions whose result weight is at most `w`.
    fn weight_ok(&self, s: &Scheme, a: usize, t: &Scheme, b: usize) -> bool {
        match (self.weight_bound, &self.weights) {
            (Some(w), Some(ws)) => ws.get(s).map(|v| v[a]).unwrap_or(0) + ws.get(t).map(|v| v[b]).unwrap_or(0) <= w,
            _ => true,
        }
    }
}

impl Operad for COperad {
    fn carrier(&self) -> &dyn Collection {
        &self.carrier
    }

    fn symmetric(&self) -> bool {
        self.symmetric
    }

    fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    fn compose(&self, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize) -> Option<SVec> {
        if s.arity() + t.arity() - 1 > self.arity_bound || !self.weight_ok(s, a, t, b) {
            return None;
        }
        let dy = self.carrier.dim(t);
        Some(match self.comps.get(&(s.clone(), i, t.clone())) {
            Some(m) => m.column(a * dy + b).clone(),
            None => SVec::new(),
        })
    }

    fn unit(&self, f: Mor) -> Option<SVec> {
        self.units.as_ref().map(|u| u.get(&f).cloned().unwrap_or_default())
    }

    fn is_unital(&self) -> bool {
        self.units.is_some()
    }

    fn weight(&self, s: &Scheme, a: usize) -> Option<usize> {
        self.weights.as_ref().and_then(|w| w.get(s)).map(|v| v[a])
    }

    fn weight_bound(&self) -> Option<usize> {
        self.weights.as_ref().and(self.weight_bound)
    }
}

/// Schemes grouped by output color.
pub fn by_output(schemes: &[Scheme]) -> BTreeMap<Obj, Vec<Scheme>> {
    let mut m: BTreeMap<Obj, Vec<Scheme>> = BTreeMap::new();
    for s in schemes {
        m.entry(s.output).or_default().push(s.clone());
    }
    m
}

/// All `(s, i, t)` with `t.output == s.inputs[i]` and result within `bound`.
pub fn composable_cells(schemes: &[Scheme], by_out: &BTreeMap<Obj, Vec<Scheme>>, bound: usize) -> Vec<(Scheme, usize, Scheme)> {
    let mut out = Vec::new();
    for s in schemes {
        for i in 0..s.arity() {
            for t in by_out.get(&s.inputs[i]).map(|v| v.as_slice()).unwrap_or(&[]) {
                if s.arity() + t.arity() - 1 <= bound {
                    out.push((s.clone(), i, t.clone()));
                }
            }
        }
    }
    out
}

fn sname(p: &dyn Operad, s: &Scheme) -> String {
    cat_of(p).scheme_name(s)
}

/// Exhaustive check of the operad axioms on all stored basis elements:
/// cowedge, naturality of `∘_i` in the remaining slots, equivariance (when
/// symmetric) and the three associativity cases.
pub fn check_operad(p: &dyn Operad) -> Report {
    let mut rep = Report::new("operad axioms");
    let x = p.carrier();
    rep.merge(validate_functor(x));
    if p.symmetric() {
        rep.merge(validate_symmetric(x));
    }
    let schemes = x.schemes();
    let by_out = by_output(&schemes);
    let parts: Vec<Report> = schemes.par_iter().map(|s| check_at(p, s, &by_out)).collect();
    for r in parts {
        rep.merge(r);
    }
    rep
}

fn check_at(p: &dyn Operad, s: &Scheme, by_out: &BTreeMap<Obj, Vec<Scheme>>) -> Report {
    let mut rep = Report::new("operad axioms");
    let x = p.carrier();
    let c = x.cat();
    let n = s.arity();
    let empty: Vec<Scheme> = Vec::new();
    let with_out = |o: Obj| by_out.get(&o).unwrap_or(&empty);
    for i in 0..n {
        // Cowedge: (a·f) ∘_i b = a ∘_i (f·b) for f: d → s.inputs[i].
        for f in c.non_identities().filter(|&f| c.mor(f).tgt == s.inputs[i]) {
            let d = c.mor(f).src;
            let sd = s.with_input(i, d);
            for t in with_out(d) {
                let tc = t.with_output(s.inputs[i]);
                for a in 0..x.dim(s) {
                    let af = x.act(s, Slot::Input(i), f, a);
                    for b in 0..x.dim(t) {
                        let fb = x.act(t, Slot::Output, f, b);
                        let (Some(l), Some(r)) = (p.compose_vec(&sd, i, t, &af, &SVec::unit(b)), p.compose_vec(s, i, &tc, &SVec::unit(a), &fb)) else {
                            continue;
                        };
                        rep.check("cowedge", l == r, || format!("{} at slot {i} of {} ∘ {}, basis {a} ⊗ {b}", c.mor_name(f), sname(p, s), sname(p, t)));
                    }
                }
            }
        }
        for t in with_out(s.inputs[i]) {
            let m = t.arity();
            let r = s.insert(i, t);
            if r.arity() > p.arity_bound() {
                continue;
            }
            for a in 0..x.dim(s) {
                for b in 0..x.dim(t) {
                    let Some(ab) = p.compose(s, i, t, a, b) else { continue };
                    // Naturality in the other slots.
                    for (slot, g) in slot_generators(c, &r) {
                        let lhs = act_vec(x, &r, slot, g, &ab);
                        let rhs = match slot {
                            Slot::Input(k) if k < i => p.compose_vec(&act_target(c, s, Slot::Input(k), g).unwrap(), i, t, &x.act(s, Slot::Input(k), g, a), &SVec::unit(b)),
                            Slot::Input(k) if k < i + m => p.compose_vec(s, i, &act_target(c, t, Slot::Input(k - i), g).unwrap(), &SVec::unit(a), &x.act(t, Slot::Input(k - i), g, b)),
                            Slot::Input(k) => {
                                let k2 = k + 1 - m;
                                p.compose_vec(&act_target(c, s, Slot::Input(k2), g).unwrap(), i, t, &x.act(s, Slot::Input(k2), g, a), &SVec::unit(b))
                            }
                            Slot::Output => p.compose_vec(&act_target(c, s, Slot::Output, g).unwrap(), i, t, &x.act(s, Slot::Output, g, a), &SVec::unit(b)),
                        };
                        if let Some(rhs) = rhs {
                            rep.check("naturality", lhs == rhs, || format!("{} at {slot:?} of {} ∘_{i} {}, basis {a} ⊗ {b}", c.mor_name(g), sname(p, s), sname(p, t)));
                        }
                    }
                    if p.symmetric() {
                        check_equivariance(p, s, i, t, a, b, &mut rep);
                    }
                    check_associativity(p, s, i, t, a, b, &ab, by_out, &mut rep);
                }
            }
        }
    }
    rep
}

/// `(aσ) ∘_k (bτ) = (a ∘_{σ(k)} b)(σ ∘_k τ)` for all `σ, τ` and all `k` with `σ(k) = i`.
fn check_equivariance(p: &dyn Operad, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize, rep: &mut Report) {
    let x = p.carrier();
    let (n, m) = (s.arity(), t.arity());
    let Some(ab) = p.compose(s, i, t, a, b) else { return };
    let r = s.insert(i, t);
    for sigma in Perm::all(n) {
        let k = sigma.inverse().apply(i);
        let s_sig = s.permuted(&sigma);
        let a_sig = x.act_sigma(s, &sigma, a);
        for tau in Perm::all(m) {
            let t_tau = t.permuted(&tau);
            let b_tau = x.act_sigma(t, &tau, b);
            let Some(lhs) = p.compose_vec(&s_sig, k, &t_tau, &a_sig, &b_tau) else { continue };
            let rhs = sigma_vec(x, &r, &sigma.block_insert(k, &tau), &ab);
            rep.check("equivariance", lhs == rhs, || format!("σ={sigma}, τ={tau}, slot {k} on {} ∘ {}, basis {a} ⊗ {b}", sname(p, s), sname(p, t)));
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check_associativity(p: &dyn Operad, s: &Scheme, j: usize, t: &Scheme, a: usize, b: usize, ab: &SVec, by_out: &BTreeMap<Obj, Vec<Scheme>>, rep: &mut Report) {
    let x = p.carrier();
    let m = t.arity();
    let st = s.insert(j, t);
    for i in 0..st.arity() {
        for u in by_out.get(&st.inputs[i]).map(|v| v.as_slice()).unwrap_or(&[]) {
            let k = u.arity();
            if st.arity() + k - 1 > p.arity_bound() {
                continue;
            }
            for c in 0..x.dim(u) {
                let uc = SVec::unit(c);
                let Some(lhs) = p.compose_vec(&st, i, u, ab, &uc) else { continue };
                let (name, rhs) = if i < j {
                    let Some(ac) = p.compose(s, i, u, a, c) else { continue };
                    ("associativity (i<j)", p.compose_vec(&s.insert(i, u), j + k - 1, t, &ac, &SVec::unit(b)))
                } else if i < j + m {
                    let Some(bc) = p.compose(t, i - j, u, b, c) else { continue };
                    ("associativity (j≤i<j+m)", p.compose_vec(s, j, &t.insert(i - j, u), &SVec::unit(a), &bc))
                } else {
                    let i2 = i + 1 - m;
                    let Some(ac) = p.compose(s, i2, u, a, c) else { continue };
                    ("associativity (i≥j+m)", p.compose_vec(&s.insert(i2, u), j, t, &ac, &SVec::unit(b)))
                };
                let Some(rhs) = rhs else { continue };
                rep.check(name, lhs == rhs, || {
                    format!("({} ∘_{j} {}) ∘_{i} {}, basis {a} ⊗ {b} ⊗ {c}", sname(p, s), sname(p, t), sname(p, u))
                });
            }
        }
    }
}

/// Cowedge squares only.
pub fn check_cowedge_only(p: &dyn Operad) -> Report {
    let mut rep = Report::new("cowedge");
    let x = p.carrier();
    let c = x.cat();
    let schemes = x.schemes();
    let by_out = by_output(&schemes);
    for s in &schemes {
        for i in 0..s.arity() {
            for f in c.non_identities().filter(|&f| c.mor(f).tgt == s.inputs[i]) {
                let d = c.mor(f).src;
                let sd = s.with_input(i, d);
                for t in by_out.get(&d).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let tc = t.with_output(s.inputs[i]);
                    for a in 0..x.dim(s) {
                        for b in 0..x.dim(t) {
                            let l = p.compose_vec(&sd, i, t, &x.act(s, Slot::Input(i), f, a), &SVec::unit(b));
                            let r = p.compose_vec(s, i, &tc, &SVec::unit(a), &x.act(t, Slot::Output, f, b));
                            if let (Some(l), Some(r)) = (l, r) {
                                rep.check("cowedge", l == r, || format!("{} at slot {i} of {} ∘ {}, basis {a} ⊗ {b}", c.mor_name(f), sname(p, s), sname(p, t)));
                            }
                        }
                    }
                }
            }
        }
    }
    rep
}

/// Unit naturality and both unit axioms on all basis elements.
pub fn check_unital(p: &dyn Operad) -> Report {
    let mut rep = Report::new("unit axioms");
    if !p.is_unital() {
        rep.fail("units", "operad has no units".into());
        return rep;
    }
    let x = p.carrier();
    let c = x.cat();
    let u = |f: Mor| p.unit(f).unwrap_or_default();
    let lin_unit = |v: &SVec| -> SVec {
        let mut out = SVec::new();
        for (f, k) in v.iter() {
            out.add_scaled(&u(f), k);
        }
        out
    };
    for f in 0..c.morphisms().len() {
        let (a, b) = (c.mor(f).src, c.mor(f).tgt);
        let s = Scheme::new(vec![a], b);
        let uf = u(f);
        rep.check("unit range", uf.max_index().map(|k| k < x.dim(&s)).unwrap_or(true), || format!("u_{}", c.mor_name(f)));
        for h in c.non_identities().filter(|&h| c.mor(h).tgt == a) {
            let lhs = act_vec(x, &s, Slot::Input(0), h, &uf);
            rep.check("unit naturality", lhs == lin_unit(&c.compose(f, h).unwrap()), || format!("u_{} · {}", c.mor_name(f), c.mor_name(h)));
        }
        for g in c.non_identities().filter(|&g| c.mor(g).src == b) {
            let lhs = act_vec(x, &s, Slot::Output, g, &uf);
            rep.check("unit naturality", lhs == lin_unit(&c.compose(g, f).unwrap()), || format!("{} · u_{}", c.mor_name(g), c.mor_name(f)));
        }
    }
    let schemes = x.schemes();
    for s in &schemes {
        let name = c.scheme_name(s);
        for a in 0..x.dim(s) {
            let ua = SVec::unit(a);
            // u_f ∘_0 x = x·f at the output.
            for f in (0..c.morphisms().len()).filter(|&f| c.mor(f).src == s.output) {
                let us = Scheme::new(vec![s.output], c.mor(f).tgt);
                if let Some(l) = p.compose_vec(&us, 0, s, &u(f), &ua) {
                    let r = if c.is_identity(f) { ua.clone() } else { x.act(s, Slot::Output, f, a) };
                    rep.check("left unit", l == r, || format!("u_{} ∘ basis {a} of {name}", c.mor_name(f)));
                }
            }
            // x ∘_i u_f = x·f at input i.
            for i in 0..s.arity() {
                for f in (0..c.morphisms().len()).filter(|&f| c.mor(f).tgt == s.inputs[i]) {
                    let us = Scheme::new(vec![c.mor(f).src], s.inputs[i]);
                    if let Some(l) = p.compose_vec(s, i, &us, &ua, &u(f)) {
                        let r = if c.is_identity(f) { ua.clone() } else { x.act(s, Slot::Input(i), f, a) };
                        rep.check("right unit", l == r, || format!("basis {a} of {name} ∘_{i} u_{}", c.mor_name(f)));
                    }
                }
            }
        }
    }
    rep
}

/// Reproduces the argument that units and associativity force the cowedge
/// condition: `(a·f) ∘_i b = (a ∘_i u_f) ∘_i b = a ∘_i (u_f ∘_0 b) = a ∘_i (f·b)`.
/// Without units only the cowedge squares are checked.
pub fn cowedge_from_unital(p: &dyn Operad) -> Report {
    if !p.is_unital() {
        let mut r = check_cowedge_only(p);
        r.name = "cowedge (no units)".into();
        return r;
    }
    let mut rep = Report::new("cowedge from units");
    let x = p.carrier();
    let c = x.cat();
    let schemes = x.schemes();
    let by_out = by_output(&schemes);
    for s in &schemes {
        for i in 0..s.arity() {
            for f in c.non_identities().filter(|&f| c.mor(f).tgt == s.inputs[i]) {
                let d = c.mor(f).src;
                let uf = p.unit(f).unwrap_or_default();
                let us = Scheme::new(vec![d], s.inputs[i]);
                let sd = s.with_input(i, d);
                for t in by_out.get(&d).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let tc = t.with_output(s.inputs[i]);
                    for a in 0..x.dim(s) {
                        let ua = SVec::unit(a);
                        for b in 0..x.dim(t) {
                            let ub = SVec::unit(b);
                            let w = || format!("{} at slot {i} of {} ∘ {}, basis {a} ⊗ {b}", c.mor_name(f), sname(p, s), sname(p, t));
                            let lhs = p.compose_vec(&sd, i, t, &x.act(s, Slot::Input(i), f, a), &ub);
                            let rhs = p.compose_vec(s, i, &tc, &ua, &x.act(t, Slot::Output, f, b));
                            let au = p.compose_vec(s, i, &us, &ua, &uf);
                            let via1 = au.as_ref().and_then(|au| p.compose_vec(&sd, i, t, au, &ub));
                            let ub2 = p.compose_vec(&us, 0, t, &uf, &ub);
                            let via2 = ub2.as_ref().and_then(|v| p.compose_vec(s, i, &tc, &ua, v));
                            let (Some(lhs), Some(rhs), Some(via1), Some(via2)) = (lhs, rhs, via1, via2) else { continue };
                            rep.check("right unit step", lhs == via1, w);
                            rep.check("associativity step", via1 == via2, w);
                            rep.check("left unit step", via2 == rhs, w);
                            rep.check("cowedge", lhs == rhs, w);
                        }
                    }
                }
            }
        }
    }
    rep
}

/// The `∘_i^f` presentation: for `f: t.output → s.inputs[i]`, column
/// `a·dim(t)+b` of `comp_f[(s, i, f, t)]` is `∘_i^f(a, b) ∈ P(s.insert(i, t))`.
#[derive(Clone, Debug)]
pub struct PartialFPresentation {
    pub carrier: SymCollection,
    pub symmetric: bool,
    pub arity_bound: usize,
    pub comp_f: BTreeMap<(Scheme, usize, Mor, Scheme), LinMap>,
}

impl PartialFPresentation {
    pub fn get(&self, s: &Scheme, i: usize, f: Mor, t: &Scheme, a: usize, b: usize) -> Option<SVec> {
        if s.arity() + t.arity() - 1 > self.arity_bound {
            return None;
        }
        let dy = self.carrier.dim(t);
        Some(self.comp_f.get(&(s.clone(), i, f, t.clone())).map(|m| m.column(a * dy + b).clone()).unwrap_or_default())
    }

    /// `∘_i^g` for a combination `g` of basis morphisms, on vectors.
    pub fn get_vec(&self, s: &Scheme, i: usize, g: &SVec, t: &Scheme, u: &SVec, v: &SVec) -> Option<SVec> {
        let mut out = SVec::new();
        for (f, k) in g.iter() {
            for (a, x) in u.iter() {
                for (b, y) in v.iter() {
                    out.add_scaled(&self.get(s, i, f, t, a, b)?, &(k * x * y));
                }
            }
        }
        Some(out)
    }
}

/// `∘_i^f(a, b) = (a·f) ∘_i b`.
pub fn to_partial_f(p: &COperad) -> PartialFPresentation {
    let x = &p.carrier;
    let c = x.cat();
    let schemes = x.schemes();
    let mut comp_f = BTreeMap::new();
    for s in &schemes {
        for i in 0..s.arity() {
            for d in 0..c.num_objects() {
                for &f in c.hom(d, s.inputs[i]) {
                    let sd = s.with_input(i, d);
                    for t in schemes.iter().filter(|t| t.output == d) {
                        if s.arity() + t.arity() - 1 > p.arity_bound {
                            continue;
                        }
                        let (dx, dy) = (x.dim(s), x.dim(t));
                        let r = s.insert(i, t);
                        let cols = (0..dx * dy)
                            .map(|k| {
                                let af = if c.is_identity(f) { SVec::unit(k / dy) } else { x.act(s, Slot::Input(i), f, k / dy) };
                                p.compose_vec(&sd, i, t, &af, &SVec::unit(k % dy)).unwrap_or_default()
                            })
                            .collect();
                        let m = LinMap::from_columns(x.dim(&r), cols).expect("shape");
                        if !m.is_zero() {
                            comp_f.insert((s.clone(), i, f, t.clone()), m);
                        }
                    }
                }
            }
        }
    }
    PartialFPresentation { carrier: p.carrier.clone(), symmetric: p.symmetric, arity_bound: p.arity_bound, comp_f }
}

/// `∘_i = ∘_i^{id}`.
pub fn from_partial_f(q: &PartialFPresentation) -> COperad {
    let c = q.carrier.cat();
    let mut out = COperad::new(q.carrier.clone(), q.symmetric, q.arity_bound);
    for ((s, i, f, t), m) in &q.comp_f {
        if c.is_identity(*f) {
            out.set_comp(s, *i, t, m.clone()).expect("shape");
        }
    }
    out
}

/// Axioms of the `∘_i^f` presentation: naturality in `f` from both sides,
/// naturality in the other slots, equivariance and the three associativity
/// cases with twisted compositions.
pub fn check_partial_f(q: &PartialFPresentation) -> Report {
    let mut rep = Report::new("partial-f axioms");
    let x = &q.carrier;
    let c = x.cat();
    let schemes = x.schemes();
    let by_out = by_output(&schemes);
    let nmor = c.morphisms().len();
    for s in &schemes {
        let n = s.arity();
        for i in 0..n {
            for f in (0..nmor).filter(|&f| c.mor(f).tgt == s.inputs[i]) {
                let d = c.mor(f).src;
                for t in by_out.get(&d).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let m = t.arity();
                    let r = s.insert(i, t);
                    if r.arity() > q.arity_bound {
                        continue;
                    }
                    for a in 0..x.dim(s) {
                        let ua = SVec::unit(a);
                        for b in 0..x.dim(t) {
                            let ub = SVec::unit(b);
                            let Some(ab) = q.get(s, i, f, t, a, b) else { continue };
                            let w = || format!("{} ∘_{i}^{} {}, basis {a} ⊗ {b}", c.scheme_name(s), c.mor_name(f), c.scheme_name(t));
                            // ∘^{f∘h}(a, b') = ∘^f(a, h·b') for h: d' → d.
                            for h in c.non_identities().filter(|&h| c.mor(h).tgt == d) {
                                let d2 = c.mor(h).src;
                                for t2 in by_out.get(&d2).map(|v| v.as_slice()).unwrap_or(&[]).iter().filter(|t2| t2.inputs == t.inputs) {
                                    for b2 in 0..x.dim(t2) {
                                        let l = q.get_vec(s, i, &c.compose(f, h).unwrap(), t2, &ua, &SVec::unit(b2));
                                        let rr = q.get_vec(s, i, &SVec::unit(f), t, &ua, &x.act(t2, Slot::Output, h, b2));
                                        if let (Some(l), Some(rr)) = (l, rr) {
                                            rep.check("f-naturality (inner)", l == rr, w);
                                        }
                                    }
                                }
                            }
                            // ∘^{g∘f}(a', b) = ∘^f(a'·g, b) for g: c_i → c'.
                            for g in c.non_identities().filter(|&g| c.mor(g).src == s.inputs[i]) {
                                let s2 = s.with_input(i, c.mor(g).tgt);
                                for a2 in 0..x.dim(&s2) {
                                    let l = q.get_vec(&s2, i, &c.compose(g, f).unwrap(), t, &SVec::unit(a2), &ub);
                                    let rr = q.get_vec(s, i, &SVec::unit(f), t, &x.act(&s2, Slot::Input(i), g, a2), &ub);
                                    if let (Some(l), Some(rr)) = (l, rr) {
                                        rep.check("f-naturality (outer)", l == rr, w);
                                    }
                                }
                            }
                            // Other slots.
                            for (slot, g) in slot_generators(c, &r) {
                                let lhs = act_vec(x, &r, slot, g, &ab);
                                let fv = SVec::unit(f);
                                let rhs = match slot {
                                    Slot::Input(k) if k < i => q.get_vec(&act_target(c, s, Slot::Input(k), g).unwrap(), i, &fv, t, &x.act(s, Slot::Input(k), g, a), &ub),
                                    Slot::Input(k) if k < i + m => q.get_vec(s, i, &fv, &act_target(c, t, Slot::Input(k - i), g).unwrap(), &ua, &x.act(t, Slot::Input(k - i), g, b)),
                                    Slot::Input(k) => {
                                        let k2 = k + 1 - m;
                                        q.get_vec(&act_target(c, s, Slot::Input(k2), g).unwrap(), i, &fv, t, &x.act(s, Slot::Input(k2), g, a), &ub)
                                    }
                                    Slot::Output => q.get_vec(&act_target(c, s, Slot::Output, g).unwrap(), i, &fv, t, &x.act(s, Slot::Output, g, a), &ub),
                                };
                                if let Some(rhs) = rhs {
                                    rep.check("naturality", lhs == rhs, w);
                                }
                            }
                            if q.symmetric {
                                for sigma in Perm::all(n) {
                                    let k = sigma.inverse().apply(i);
                                    for tau in Perm::all(m) {
                                        let l = q.get_vec(&s.permuted(&sigma), k, &SVec::unit(f), &t.permuted(&tau), &x.act_sigma(s, &sigma, a), &x.act_sigma(t, &tau, b));
                                        if let Some(l) = l {
                                            rep.check("equivariance", l == sigma_vec(x, &r, &sigma.block_insert(k, &tau), &ab), w);
                                        }
                                    }
                                }
                            }
                            check_partial_assoc(q, s, i, f, t, a, b, &ab, &by_out, &mut rep);
                        }
                    }
                }
            }
        }
    }
    rep
}

#[allow(clippy::too_many_arguments)]
fn check_partial_assoc(q: &PartialFPresentation, s: &Scheme, j: usize, f: Mor, t: &Scheme, a: usize, b: usize, ab: &SVec, by_out: &BTreeMap<Obj, Vec<Scheme>>, rep: &mut Report) {
    let x = &q.carrier;
    let c = x.cat();
    let m = t.arity();
    let st = s.insert(j, t);
    for i in 0..st.arity() {
        for g in (0..c.morphisms().len()).filter(|&g| c.mor(g).tgt == st.inputs[i]) {
            let e = c.mor(g).src;
            for u in by_out.get(&e).map(|v| v.as_slice()).unwrap_or(&[]) {
                let k = u.arity();
                if st.arity() + k - 1 > q.arity_bound {
                    continue;
                }
                for cc in 0..x.dim(u) {
                    let uc = SVec::unit(cc);
                    let gv = SVec::unit(g);
                    let Some(lhs) = q.get_vec(&st, i, &gv, u, ab, &uc) else { continue };
                    let fv = SVec::unit(f);
                    let rhs = if i < j {
                        q.get_vec(s, i, &gv, u, &SVec::unit(a), &uc).and_then(|ac| q.get_vec(&s.insert(i, u), j + k - 1, &fv, t, &ac, &SVec::unit(b)))
                    } else if i < j + m {
                        q.get_vec(t, i - j, &gv, u, &SVec::unit(b), &uc).and_then(|bc| q.get_vec(s, j, &fv, &t.insert(i - j, u), &SVec::unit(a), &bc))
                    } else {
                        let i2 = i + 1 - m;
                        q.get_vec(s, i2, &gv, u, &SVec::unit(a), &uc).and_then(|ac| q.get_vec(&s.insert(i2, u), j, &fv, t, &ac, &SVec::unit(b)))
                    };
                    if let Some(rhs) = rhs {
                        rep.check("associativity", lhs == rhs, || {
                            format!("({} ∘_{j}^{} {}) ∘_{i}^{} {}, basis {a} ⊗ {b} ⊗ {cc}", c.scheme_name(s), c.mor_name(f), c.scheme_name(t), c.mor_name(g), c.scheme_name(u))
                        });
                    }
                }
            }
        }
    }
}

/// Substitution `μ(a; b_1, …, b_n)` and unit `η`. Column index of
/// `mu[(s, profile)]` is lexicographic in `(a, b_1, …, b_n)`.
#[derive(Clone, Debug)]
pub struct Substitude {
    pub carrier: SymCollection,
    pub symmetric: bool,
    pub arity_bound: usize,
    pub mu: BTreeMap<(Scheme, Vec<Scheme>), LinMap>,
    pub eta: BTreeMap<Mor, SVec>,
}

fn profiles(s: &Scheme, by_out: &BTreeMap<Obj, Vec<Scheme>>, bound: usize) -> Vec<Vec<Scheme>> {
    let mut out: Vec<(Vec<Scheme>, usize)> = vec![(Vec::new(), 0)];
    for (k, &c) in s.inputs.iter().enumerate() {
        let rest_min = 0;
        let mut next = Vec::new();
        for (prof, ar) in &out {
            for t in by_out.get(&c).map(|v| v.as_slice()).unwrap_or(&[]) {
                if ar + t.arity() + rest_min <= bound {
                    let mut p = prof.clone();
                    p.push(t.clone());
                    next.push((p, ar + t.arity()));
                }
            }
        }
        out = next;
        let _ = k;
    }
    out.into_iter().map(|(p, _)| p).collect()
}

fn iterated(p: &dyn Operad, s: &Scheme, a: &SVec, profile: &[Scheme], bs: &[SVec]) -> Option<SVec> {
    let mut cur = a.clone();
    let mut sc = s.clone();
    for k in (0..profile.len()).rev() {
        cur = p.compose_vec(&sc, k, &profile[k], &cur, &bs[k])?;
        sc = sc.insert(k, &profile[k]);
    }
    Some(cur)
}

/// `μ` from iterated `∘_i` in right-to-left slot order; `η` from the units.
pub fn to_substitude(p: &COperad) -> Result<Substitude, OperadError> {
    let units = p.units.clone().ok_or(OperadError::NotUnital)?;
    let x = &p.carrier;
    let schemes = x.schemes();
    let by_out = by_output(&schemes);
    let mut mu = BTreeMap::new();
    for s in schemes.iter().filter(|s| s.arity() > 0) {
        for prof in profiles(s, &by_out, p.arity_bound) {
            let dims: Vec<usize> = std::iter::once(x.dim(s)).chain(prof.iter().map(|t| x.dim(t))).collect();
            let total: usize = dims.iter().product();
            let target = prof.iter().fold(Scheme::new(Vec::new(), s.output), |mut acc, t| {
                acc.inputs.extend_from_slice(&t.inputs);
                acc
            });
            let mut cols = Vec::with_capacity(total);
            let mut ok = true;
            for idx in 0..total {
                let mut rem = idx;
                let mut digits = vec![0; dims.len()];
                for k in (0..dims.len()).rev() {
                    digits[k] = rem % dims[k];
                    rem /= dims[k];
                }
                let bs: Vec<SVec> = digits[1..].iter().map(|&d| SVec::unit(d)).collect();
                match iterated(p, s, &SVec::unit(digits[0]), &prof, &bs) {
                    Some(v) => cols.push(v),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let m = LinMap::from_columns(x.dim(&target), cols).expect("shape");
                if !m.is_zero() {
                    mu.insert((s.clone(), prof), m);
                }
            }
        }
    }
    Ok(Substitude { carrier: p.carrier.clone(), symmetric: p.symmetric, arity_bound: p.arity_bound, mu, eta: units })
}

/// `a ∘_i b = μ(a; η(id), …, b, …, η(id))`.
pub fn from_substitude(sb: &Substitude) -> COperad {
    let x = &sb.carrier;
    let c = x.cat();
    let schemes = x.schemes();
    let by_out = by_output(&schemes);
    let mut out = COperad::new(sb.carrier.clone(), sb.symmetric, sb.arity_bound);
    for (s, i, t) in composable_cells(&schemes, &by_out, sb.arity_bound) {
        let prof: Vec<Scheme> = (0..s.arity()).map(|k| if k == i { t.clone() } else { Scheme::new(vec![s.inputs[k]], s.inputs[k]) }).collect();
        let units: Vec<SVec> = (0..s.arity()).map(|k| sb.eta.get(&c.identity(s.inputs[k])).cloned().unwrap_or_default()).collect();
        let (dx, dy) = (x.dim(&s), x.dim(&t));
        let r = s.insert(i, &t);
        let m = sb.mu.get(&(s.clone(), prof.clone()));
        let dims: Vec<usize> = std::iter::once(dx).chain(prof.iter().map(|t| x.dim(t))).collect();
        let cols = (0..dx * dy)
            .map(|k| {
                let Some(m) = m else { return SVec::new() };
                // Expand the tensor a ⊗ η ⊗ … ⊗ b ⊗ … ⊗ η into column indices.
                let mut terms: Vec<(usize, Scalar)> = vec![(k / dy, crate::fincat::one())];
                for (slot, &d) in dims[1..].iter().enumerate() {
                    let factor: Vec<(usize, Scalar)> = if slot == i { vec![(k % dy, crate::fincat::one())] } else { units[slot].iter().map(|(q, v)| (q, v.clone())).collect() };
                    let mut next = Vec::new();
                    for (idx, coef) in &terms {
                        for (q, v) in &factor {
                            next.push((idx * d + q, coef * v));
                        }
                    }
                    terms = next;
                }
                let mut v = SVec::new();
                for (idx, coef) in terms {
                    v.add_scaled(m.column(idx), &coef);
                }
                v
            })
            .collect();
        out.set_comp(&s, i, &t, LinMap::from_columns(x.dim(&r), cols).expect("shape")).expect("shape");
    }
    out.units = Some(sb.eta.clone());
    out
}

/// Data equality of two explicit operads.
pub fn same_operad(a: &COperad, b: &COperad) -> bool {
    crate::collection::same_data(&a.carrier.underlying, &b.carrier.underlying)
        && a.carrier.sigma_maps() == b.carrier.sigma_maps()
        && a.comps == b.comps
        && a.units == b.units
}

/// Subcollection spans closed under compositions and actions.
#[derive(Clone, Debug)]
pub struct OperadicIdeal {
    pub generators: Vec<(Scheme, SVec)>,
    pub spans: BTreeMap<Scheme, Echelon>,
}

impl OperadicIdeal {
    pub fn dim(&self, s: &Scheme) -> usize {
        self.spans.get(s).map(|e| e.rank()).unwrap_or(0)
    }

    pub fn contains(&self, s: &Scheme, v: &SVec) -> bool {
        v.is_zero() || self.spans.get(s).map(|e| e.contains(v)).unwrap_or(false)
    }
}

/// Breadth-first saturation of the generators under all actions, all
/// symmetric group generators and all compositions on either side.
pub fn ideal_closure(p: &dyn Operad, gens: &[(Scheme, SVec)]) -> Result<OperadicIdeal, OperadError> {
    let x = p.carrier();
    let c = x.cat();
    let schemes = x.schemes();
    let by_out = by_output(&schemes);
    let mut by_in: BTreeMap<Obj, Vec<(Scheme, usize)>> = BTreeMap::new();
    for s in &schemes {
        for (i, &col) in s.inputs.iter().enumerate() {
            by_in.entry(col).or_default().push((s.clone(), i));
        }
    }
    let mut spans: BTreeMap<Scheme, Echelon> = BTreeMap::new();
    let mut queue: VecDeque<(Scheme, SVec)> = VecDeque::new();
    let push = |s: Scheme, v: SVec, spans: &mut BTreeMap<Scheme, Echelon>, queue: &mut VecDeque<(Scheme, SVec)>| {
        if v.is_zero() {
            return;
        }
        let e = spans.entry(s.clone()).or_insert_with(|| Echelon::new(x.dim(&s)));
        if let Some(r) = e.insert_reduced(v) {
            queue.push_back((s, r));
        }
    };
    for (s, v) in gens {
        if v.max_index().map(|k| k >= x.dim(s)).unwrap_or(false) {
            return Err(OperadError::BadVector(c.scheme_name(s)));
        }
        push(s.clone(), v.clone(), &mut spans, &mut queue);
    }
    let filter = WeightFilter::new(p, &schemes);
    let excluded = |s: &Scheme, v: &SVec, t: &Scheme| filter.as_ref().map(|f| f.excludes(WeightFilter::vector_weight(p, s, v), t)).unwrap_or(false);
    let limit = 1usize << 40;
    let mut rounds = 0usize;
    while let Some((s, v)) = queue.pop_front() {
        rounds += 1;
        if rounds > limit {
            return Err(OperadError::NoFixpoint(limit));
        }
        for (slot, f) in slot_generators(c, &s) {
            let t = act_target(c, &s, slot, f).expect("acts");
            if x.dim(&t) > 0 {
                push(t, act_vec(x, &s, slot, f, &v), &mut spans, &mut queue);
            }
        }
        if p.symmetric() {
            let n = s.arity();
            for k in 0..n.saturating_sub(1) {
                let tr = Perm::transposition(n, k, k + 1);
                push(s.permuted(&tr), sigma_vec(x, &s, &tr, &v), &mut spans, &mut queue);
            }
        }
        for i in 0..s.arity() {
            for t in by_out.get(&s.inputs[i]).map(|v| v.as_slice()).unwrap_or(&[]) {
                if excluded(&s, &v, t) {
                    continue;
                }
                for b in 0..x.dim(t) {
                    if let Some(w) = p.compose_vec(&s, i, t, &v, &SVec::unit(b)) {
                        push(s.insert(i, t), w, &mut spans, &mut queue);
                    }
                }
            }
        }
        for (s2, i) in by_in.get(&s.output).map(|v| v.as_slice()).unwrap_or(&[]) {
            if excluded(&s, &v, s2) {
                continue;
            }
            for a in 0..x.dim(s2) {
                if let Some(w) = p.compose_vec(s2, *i, &s, &SVec::unit(a), &v) {
                    push(s2.insert(*i, &s), w, &mut spans, &mut queue);
                }
            }
        }
    }
    Ok(OperadicIdeal { generators: gens.to_vec(), spans })
}

/// Result of dividing an operad by an ideal.
pub struct Quotient {
    pub operad: COperad,
    pub quotients: BTreeMap<Scheme, QuotientSpace>,
    pub well_defined: Report,
}

/// `P / I` with the induced actions, symmetric structure, compositions and units.
pub fn quotient_operad(p: &dyn Operad, ideal: &OperadicIdeal, cat: Arc<LinearCat>) -> Quotient {
    let x = p.carrier();
    let c = x.cat();
    let schemes = x.schemes();
    let mut quotients = BTreeMap::new();
    let mut under = NsCollection::new(cat.clone());
    for s in &schemes {
        let d = x.dim(s);
        let qs = match ideal.spans.get(s) {
            Some(e) => QuotientSpace::from_echelon(e, e.rref().into_values().collect()),
            None => QuotientSpace::from_echelon(&Echelon::new(d), Vec::new()),
        };
        let labels: Vec<String> = qs.basis().iter().map(|&j| x.label(s, j)).collect();
        under.add_space(s.clone(), BasedSpace::new(labels).unwrap_or_else(|_| BasedSpace::standard(qs.dim())));
        quotients.insert(s.clone(), qs);
    }
    let lift = |s: &Scheme, q: usize| -> SVec { quotients[s].section_basis(q) };
    let proj = |s: &Scheme, v: &SVec| -> SVec { quotients.get(s).map(|q| q.project(v)).unwrap_or_default() };
    let live: Vec<Scheme> = under.spaces().keys().cloned().collect();
    for s in &live {
        for (slot, f) in slot_morphisms(c, s) {
            let t = act_target(c, s, slot, f).expect("acts");
            let dt = under.space(&t).map(|b| b.dim()).unwrap_or(0);
            if dt == 0 {
                continue;
            }
            let cols = (0..under.space(s).unwrap().dim()).map(|q| proj(&t, &act_vec(x, s, slot, f, &lift(s, q)))).collect();
            under.set_action(s, slot, f, LinMap::from_columns(dt, cols).expect("shape")).expect("shape");
        }
    }
    let mut carrier = SymCollection::new(under);
    if p.symmetric() {
        for s in &live {
            for sigma in Perm::all(s.arity()).into_iter().filter(|g| !g.is_identity()) {
                let t = s.permuted(&sigma);
                let dt = carrier.underlying.space(&t).map(|b| b.dim()).unwrap_or(0);
                let ds = carrier.underlying.space(s).unwrap().dim();
                if dt == 0 {
                    continue;
                }
                let cols = (0..ds).map(|q| proj(&t, &sigma_vec(x, s, &sigma, &lift(s, q)))).collect();
                carrier.set_sigma(s, &sigma, LinMap::from_columns(dt, cols).expect("shape")).expect("shape");
            }
        }
    }
    let mut out = COperad::new(carrier, p.symmetric(), p.arity_bound());
    let by_out = by_output(&live);
    let cells = composable_cells(&live, &by_out, p.arity_bound());
    let mats: Vec<Option<LinMap>> = cells
        .par_iter()
        .map(|(s, i, t)| {
            let r = s.insert(*i, t);
            let dr = out.carrier.dim(&r);
            let (ds, dt) = (out.carrier.dim(s), out.carrier.dim(t));
            let mut cols = Vec::with_capacity(ds * dt);
            for a in 0..ds {
                let la = lift(s, a);
                for b in 0..dt {
                    cols.push(p.compose_vec(s, *i, t, &la, &lift(t, b)).map(|v| proj(&r, &v)).unwrap_or_default());
                }
            }
            (dr > 0).then(|| LinMap::from_columns(dr, cols).expect("shape"))
        })
        .collect();
    for ((s, i, t), m) in cells.iter().zip(mats) {
        if let Some(m) = m {
            out.set_comp(s, *i, t, m).expect("shape");
        }
    }
    if p.is_unital() {
        let units = (0..c.morphisms().len())
            .filter_map(|f| {
                let s = Scheme::new(vec![c.mor(f).src], c.mor(f).tgt);
                p.unit(f).map(|u| (f, proj(&s, &u)))
            })
            .collect();
        out.units = Some(units);
    }
    if let Some(ws) = (0..1).find_map(|_| {
        live.iter().map(|s| (0..x.dim(s)).map(|a| p.weight(s, a)).collect::<Option<Vec<usize>>>().map(|w| (s.clone(), quotients[s].basis().iter().map(|&j| w[j]).collect::<Vec<usize>>()))).collect::<Option<BTreeMap<_, _>>>()
    }) {
        out.weights = Some(ws);
    }
    // Ideal elements compose into the ideal.
    let mut wd = Report::new("quotient well-defined");
    let filter = WeightFilter::new(p, &schemes);
    for (s, e) in &ideal.spans {
        for v in e.rref().values() {
            let vw = WeightFilter::vector_weight(p, s, v);
            for i in 0..s.arity() {
                for t in by_out.get(&s.inputs[i]).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if filter.as_ref().map(|f| f.excludes(vw, t)).unwrap_or(false) {
                        continue;
                    }
                    for b in 0..x.dim(t) {
                        if let Some(w) = p.compose_vec(s, i, t, v, &SVec::unit(b)) {
                            wd.check("left factor in ideal", ideal.contains(&s.insert(i, t), &w), || format!("{} ∘_{i} {}", c.scheme_name(s), c.scheme_name(t)));
                        }
                    }
                }
            }
        }
    }
    Quotient { operad: out, quotients, well_defined: wd }
}

/// Generators only in arity 2 and every relation homogeneous of weight 2.
pub fn is_quadratic_binary(generators: &dyn Collection, free: &dyn Operad, relations: &[(Scheme, SVec)]) -> bool {
    generators.schemes().iter().all(|s| s.arity() == 2)
        && relations.iter().all(|(s, v)| v.iter().all(|(a, _)| free.weight(s, a) == Some(2)))
}

/// Basis elements of a weight-graded operad split by weight.
pub fn weight_split(p: &dyn Operad, s: &Scheme) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..p.carrier().dim(s) {
        if let Some(w) = p.weight(s, a) {
            out.entry(w).or_default().push(a);
        }
    }
    out
}

/// The associative operad over the terminal category: basis of arity `n`
/// is `Σ_n`, `e_σ ∘_i e_τ = e_{σ ∘_i τ}` and `e_π σ = e_{π∘σ}`.
pub fn associative_operad(bound: usize, unital: bool) -> COperad {
    let cat = Arc::new(crate::fincat::FinCat::terminal().linearize());
    let mut under = NsCollection::new(cat.clone());
    let sch = |n: usize| Scheme::new(vec![0; n], 0);
    for n in 1..=bound {
        let labels = Perm::all(n).iter().map(|p| p.to_string_dotted()).collect();
        under.add_space(sch(n), BasedSpace::new(labels).expect("distinct"));
    }
    let mut carrier = SymCollection::new(under);
    for n in 1..=bound {
        let all = Perm::all(n);
        for sigma in all.iter().filter(|g| !g.is_identity()) {
            let m = LinMap::from_index_map(all.len(), all.len(), |r| all[r].compose(sigma).rank());
            carrier.set_sigma(&sch(n), sigma, m).expect("shape");
        }
    }
    let mut op = COperad::new(carrier, true, bound);
    for n in 1..=bound {
        for m in 1..=bound + 1 - n {
            let (pn, pm) = (Perm::all(n), Perm::all(m));
            for i in 0..n {
                let mat = LinMap::from_index_map(crate::perm::factorial(n + m - 1), pn.len() * pm.len(), |k| pn[k / pm.len()].block_insert(i, &pm[k % pm.len()]).rank());
                op.set_comp(&sch(n), i, &sch(m), mat).expect("shape");
            }
        }
    }
    if unital {
        op.units = Some(BTreeMap::from([(0, SVec::unit(0))]));
    }
    op
}

/// Replaces one composition matrix entry, for mutation tests.
pub fn perturb(p: &COperad, s: &Scheme, i: usize, t: &Scheme, col: usize, v: SVec) -> COperad {
    let mut out = p.clone();
    let key = (s.clone(), i, t.clone());
    let r = s.insert(i, t);
    let mut m = out.comps.get(&key).cloned().unwrap_or_else(|| LinMap::zero(p.carrier.dim(&r), p.carrier.dim(s) * p.carrier.dim(t)));
    m.set_column(col, v);
    out.set_comp(s, i, t, m).expect("shape");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use proptest::prelude::*;

    /// Words as sequences of letters; composition substitutes a word for a letter.
    fn word_compose(w: &[usize], i: usize, u: &[usize]) -> Vec<usize> {
        let m = u.len();
        let mut out = Vec::new();
        for &l in w {
            if l < i {
                out.push(l);
            } else if l == i {
                out.extend(u.iter().map(|&x| x + i));
            } else {
                out.push(l + m - 1);
            }
        }
        out
    }

    fn word_act(w: &[usize], sigma: &Perm) -> Vec<usize> {
        let inv = sigma.inverse();
        w.iter().map(|&l| inv.apply(l)).collect()
    }

    fn sch(n: usize) -> Scheme {
        Scheme::new(vec![0; n], 0)
    }

    /// Basis element e_π corresponds to the word `π⁻¹` (letter positions).
    fn word_of(p: &Perm) -> Vec<usize> {
        p.inverse().images().to_vec()
    }

    #[test]
    fn associative_operad_matches_word_oracle() {
        let op = associative_operad(4, false);
        for n in 1..=4 {
            for m in 1..=5 - n {
                for (ai, a) in Perm::all(n).iter().enumerate() {
                    for (bi, b) in Perm::all(m).iter().enumerate() {
                        for i in 0..n {
                            let got = op.compose(&sch(n), i, &sch(m), ai, bi).unwrap();
                            let (k, _) = got.leading().unwrap();
                            let w = word_compose(&word_of(a), i, &word_of(b));
                            assert_eq!(word_of(&Perm::unrank(n + m - 1, k)), w);
                        }
                    }
                }
            }
            for (ai, a) in Perm::all(n).iter().enumerate() {
                for sigma in Perm::all(n) {
                    let v = op.carrier.act_sigma(&sch(n), &sigma, ai);
                    assert_eq!(word_of(&Perm::unrank(n, v.leading().unwrap().0)), word_act(&word_of(a), &sigma));
                }
            }
        }
    }

    #[test]
    fn associative_operad_is_valid() {
        let op = associative_operad(4, true);
        let r = check_operad(&op);
        assert!(r.ok(), "{r}");
        assert!(r.checks > 1000);
        assert!(check_unital(&op).ok());
    }

    #[test]
    fn zero_operad_is_valid() {
        let cat = Arc::new(crate::fincat::FinCat::walking_arrow().linearize());
        let op = COperad::new(SymCollection::new(NsCollection::new(cat)), true, 3);
        assert!(check_operad(&op).ok());
    }

    #[test]
    fn perturbed_composition_reported() {
        let op = associative_operad(4, false);
        let bad = perturb(&op, &sch(2), 0, &sch(2), 0, SVec::unit(1));
        let r = check_operad(&bad);
        assert!(r.has_check("associativity (i<j)") || r.has_check("associativity (j≤i<j+m)") || r.has_check("associativity (i≥j+m)"), "{r}");
    }

    #[test]
    fn scaled_unit_breaks_both_axioms() {
        let op = associative_operad(3, true);
        let bad = op.clone().with_units(BTreeMap::from([(0, SVec::unit(0).scaled(&q(2)))]));
        let r = check_unital(&bad);
        assert!(r.has_check("left unit") && r.has_check("right unit"));
    }

    #[test]
    fn partial_f_round_trip_on_associative() {
        let op = associative_operad(4, false);
        let pf = to_partial_f(&op);
        assert!(check_partial_f(&pf).ok());
        assert!(same_operad(&from_partial_f(&pf), &op));
        let again = to_partial_f(&from_partial_f(&pf));
        assert_eq!(again.comp_f, pf.comp_f);
    }

    #[test]
    fn substitude_round_trip_on_associative() {
        let op = associative_operad(4, true);
        let sb = to_substitude(&op).unwrap();
        // n = 1 substitution is ∘_0.
        let m1 = &sb.mu[&(sch(1), vec![sch(3)])];
        let c1 = &op.comps[&(sch(1), 0, sch(3))];
        assert_eq!(m1, c1);
        let back = from_substitude(&sb);
        assert!(same_operad(&back, &op));
        assert_eq!(to_substitude(&back).unwrap().mu, sb.mu);
        // μ(μ; …) associativity instance against words.
        let w = sb.mu[&(sch(2), vec![sch(2), sch(1)])].column(0).clone();
        assert_eq!(word_of(&Perm::unrank(3, w.leading().unwrap().0)), vec![0, 1, 2]);
    }

    #[test]
    fn ideal_of_whole_component_kills_it() {
        let op = associative_operad(3, false);
        let gens: Vec<(Scheme, SVec)> = (0..2).map(|k| (sch(2), SVec::unit(k))).collect();
        let ideal = ideal_closure(&op, &gens).unwrap();
        let q = quotient_operad(&op, &ideal, op.cat_arc().clone());
        assert_eq!(q.operad.carrier.dim(&sch(2)), 0);
        assert_eq!(q.operad.carrier.dim(&sch(3)), 0);
        assert_eq!(q.operad.carrier.dim(&sch(1)), 1);
        assert!(q.well_defined.ok());
        assert!(check_operad(&q.operad).ok());
    }

    #[test]
    fn empty_ideal_keeps_operad() {
        let op = associative_operad(3, true);
        let ideal = ideal_closure(&op, &[]).unwrap();
        let q = quotient_operad(&op, &ideal, op.cat_arc().clone());
        assert!(same_operad(&q.operad, &op));
    }

    #[test]
    fn commutator_ideal_gives_commutative_operad() {
        // e_id − e_(21) in arity 2 generates the commutative operad: all dims 1.
        let op = associative_operad(4, false);
        let mut v = SVec::unit(0);
        v.add_term(1, &q(-1));
        let ideal = ideal_closure(&op, &[(sch(2), v)]).unwrap();
        let q = quotient_operad(&op, &ideal, op.cat_arc().clone());
        for n in 1..=4 {
            assert_eq!(q.operad.carrier.dim(&sch(n)), 1);
        }
        assert!(check_operad(&q.operad).ok());
    }

    #[test]
    fn cowedge_lemma_on_unital() {
        let op = associative_operad(3, true);
        let r = cowedge_from_unital(&op);
        assert!(r.ok());
    }

    proptest! {
        #[test]
        fn equivariant_schemes_match(n in 1usize..5, m in 0usize..4, seed in 0usize..1000) {
            let all_n = Perm::all(n);
            let all_m = Perm::all(m);
            let sigma = &all_n[seed % all_n.len()];
            let tau = &all_m[seed % all_m.len()];
            let i = seed % n;
            let s = Scheme::new((0..n).collect(), 9);
            let t = Scheme::new((10..10 + m).collect(), s.inputs[sigma.apply(i)]);
            let lhs = s.permuted(sigma).insert(i, &t.permuted(tau));
            let rhs = s.insert(sigma.apply(i), &t).permuted(&sigma.block_insert(i, tau));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
