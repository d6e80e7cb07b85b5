//! Endomorphism operads of functors `A: C → Vect`, algebras over presented
//! operads, the transform of an operad in `Vect^C` to a C-operad, and the
//! differential graded associative example over the chain category.

use crate::collection::{act_target, act_vec, slot_generators, Collection, NsCollection, Slot};
use crate::fincat::{all_schemes, build_d_truncated, d_arrow, d_degree, FinCat, LinearCat, Mor, Obj, Scheme};
use crate::freeop::{evaluate_monomial, free_ns, symmetrize, universal_map, FreeError, FreeOperad, Symmetrized};
use crate::linalg::{q, quotient_by_dim, sign, BasedSpace, LinMap, QuotientSpace, SVec, Scalar};
use crate::operad::{ideal_closure, quotient_operad, COperad, Operad, OperadError, Quotient};
use crate::perm::Perm;
use crate::report::Report;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EndError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("assignment does not match the generators: {0}")]
    Scheme(String),
    #[error("monoidal table incomplete: {0}")]
    Monoidal(String),
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error("{0}")]
    Invalid(String),
}

/// Images of generators, keyed by scheme and basis index.
pub type Images = BTreeMap<(Scheme, usize), SVec>;

/// A functor `C → Vect` given on basis morphisms; identities act trivially
/// and unlisted morphisms act by zero.
#[derive(Clone, Debug)]
pub struct CFunctor {
    cat: Arc<LinearCat>,
    spaces: Vec<BasedSpace>,
    maps: BTreeMap<Mor, LinMap>,
}

impl CFunctor {
    pub fn new(cat: Arc<LinearCat>, spaces: Vec<BasedSpace>, maps: BTreeMap<Mor, LinMap>) -> Result<Self, EndError> {
        if spaces.len() != cat.num_objects() {
            return Err(EndError::Shape(format!("{} spaces for {} objects", spaces.len(), cat.num_objects())));
        }
        for (&f, m) in &maps {
            if f >= cat.morphisms().len() {
                return Err(EndError::Shape(format!("morphism {f} out of range")));
            }
            let d = cat.mor(f);
            if m.rows() != spaces[d.tgt].dim() || m.cols() != spaces[d.src].dim() {
                return Err(EndError::Shape(format!("map of {}", cat.mor_name(f))));
            }
        }
        Ok(CFunctor { cat, spaces, maps })
    }

    pub fn cat(&self) -> &LinearCat {
        &self.cat
    }

    pub fn cat_arc(&self) -> &Arc<LinearCat> {
        &self.cat
    }

    pub fn dim(&self, o: Obj) -> usize {
        self.spaces[o].dim()
    }

    pub fn space(&self, o: Obj) -> &BasedSpace {
        &self.spaces[o]
    }

    pub fn map(&self, f: Mor) -> LinMap {
        if self.cat.is_identity(f) {
            return LinMap::identity(self.dim(self.cat.mor(f).src));
        }
        let d = self.cat.mor(f);
        self.maps.get(&f).cloned().unwrap_or_else(|| LinMap::zero(self.dim(d.tgt), self.dim(d.src)))
    }

    /// Image of a combination of basis morphisms from `a` to `b`.
    pub fn map_comb(&self, v: &SVec, a: Obj, b: Obj) -> LinMap {
        let mut out = LinMap::zero(self.dim(b), self.dim(a));
        for (f, c) in v.iter() {
            out = out.add(&self.map(f).scaled(c)).expect("shape");
        }
        out
    }
}

/// Identity and composition laws on all basis morphisms.
pub fn check_functor(a: &CFunctor) -> Report {
    let mut r = Report::new("functor");
    let c = a.cat();
    for o in 0..c.num_objects() {
        let id = c.identity(o);
        r.check("identity", a.maps.get(&id).map(|m| *m == LinMap::identity(a.dim(o))).unwrap_or(true), || c.mor_name(id).to_string());
    }
    let n = c.morphisms().len();
    for f in 0..n {
        for g in 0..n {
            if c.mor(g).src != c.mor(f).tgt {
                continue;
            }
            let gf = c.compose(g, f).expect("composable");
            let lhs = a.map(g).compose(&a.map(f)).expect("shape");
            let rhs = a.map_comb(&gf, c.mor(f).src, c.mor(g).tgt);
            r.check("composition", lhs == rhs, || format!("{} ∘ {}", c.mor_name(g), c.mor_name(f)));
        }
    }
    r
}

fn mixed_encode(j: &[usize], dims: &[usize]) -> usize {
    j.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

fn mixed_decode(mut x: usize, dims: &[usize]) -> Vec<usize> {
    let mut j = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        j[k] = x % dims[k];
        x /= dims[k];
    }
    j
}

struct EndCarrier {
    a: CFunctor,
    schemes: Vec<Scheme>,
}

impl EndCarrier {
    fn input_dims(&self, s: &Scheme) -> Vec<usize> {
        s.inputs.iter().map(|&c| self.a.dim(c)).collect()
    }

    fn cols(&self, s: &Scheme) -> usize {
        self.input_dims(s).iter().product()
    }

    /// `(row, multi-index)` of a matrix unit.
    fn decode(&self, s: &Scheme, x: usize) -> (usize, Vec<usize>) {
        let dims = self.input_dims(s);
        let c: usize = dims.iter().product();
        (x / c, mixed_decode(x % c, &dims))
    }

    fn encode(&self, s: &Scheme, r: usize, j: &[usize]) -> usize {
        let dims = self.input_dims(s);
        r * dims.iter().product::<usize>() + mixed_encode(j, &dims)
    }
}

impl Collection for EndCarrier {
    fn cat(&self) -> &LinearCat {
        self.a.cat()
    }

    fn schemes(&self) -> Vec<Scheme> {
        self.schemes.clone()
    }

    fn dim(&self, s: &Scheme) -> usize {
        self.a.dim(s.output) * self.cols(s)
    }

    fn label(&self, s: &Scheme, x: usize) -> String {
        let (r, j) = self.decode(s, x);
        let js: Vec<String> = j.iter().map(|v| v.to_string()).collect();
        format!("E{r}|{}", js.join(","))
    }

    /// Input slot: `φ ↦ φ ∘ (1 ⊗ A(f) ⊗ 1)`; output: `φ ↦ A(f) ∘ φ`.
    fn act(&self, s: &Scheme, slot: Slot, f: Mor, x: usize) -> SVec {
        let t = act_target(self.a.cat(), s, slot, f).expect("acts");
        let (r, j) = self.decode(s, x);
        let m = self.a.map(f);
        let mut out = SVec::new();
        match slot {
            Slot::Input(k) => {
                for y in 0..m.cols() {
                    let e = m.entry(j[k], y);
                    if !e.is_zero() {
                        let mut j2 = j.clone();
                        j2[k] = y;
                        out.add_term(self.encode(&t, r, &j2), &e);
                    }
                }
            }
            Slot::Output => {
                for (r2, e) in m.column(r).iter() {
                    out.add_term(self.encode(&t, r2, &j), e);
                }
            }
        }
        out
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    /// `(φσ)(x) = φ(y)` with `y_{σ(k)} = x_k`.
    fn act_sigma(&self, s: &Scheme, sigma: &Perm, x: usize) -> SVec {
        let (r, j) = self.decode(s, x);
        let j2: Vec<usize> = (0..j.len()).map(|k| j[sigma.apply(k)]).collect();
        SVec::unit(self.encode(&s.permuted(sigma), r, &j2))
    }
}

/// `End_A` with matrix-unit bases, row-major over the lexicographic tensor basis.
pub struct EndOperad {
    carrier: EndCarrier,
    bound: usize,
}

pub fn end_operad(a: CFunctor, bound: usize) -> EndOperad {
    let schemes = all_schemes(a.cat(), bound).into_iter().filter(|s| a.dim(s.output) > 0 && s.inputs.iter().all(|&c| a.dim(c) > 0)).collect();
    EndOperad { carrier: EndCarrier { a, schemes }, bound }
}

impl EndOperad {
    pub fn functor(&self) -> &CFunctor {
        &self.carrier.a
    }

    /// Vector of a multilinear map given as a matrix on the tensor basis.
    pub fn element(&self, s: &Scheme, m: &LinMap) -> Result<SVec, EndError> {
        let cols = self.carrier.cols(s);
        if m.rows() != self.carrier.a.dim(s.output) || m.cols() != cols {
            return Err(EndError::Shape(self.carrier.a.cat().scheme_name(s)));
        }
        let mut v = SVec::new();
        for c in 0..cols {
            for (r, e) in m.column(c).iter() {
                v.add_term(r * cols + c, e);
            }
        }
        Ok(v)
    }

    pub fn matrix(&self, s: &Scheme, v: &SVec) -> LinMap {
        let cols = self.carrier.cols(s);
        let rows = self.carrier.a.dim(s.output);
        let mut cs = vec![SVec::new(); cols];
        for (x, e) in v.iter() {
            cs[x % cols].add_term(x / cols, e);
        }
        LinMap::from_columns(rows, cs).expect("shape")
    }
}

impl Operad for EndOperad {
    fn carrier(&self) -> &dyn Collection {
        &self.carrier
    }

    fn symmetric(&self) -> bool {
        true
    }

    fn arity_bound(&self) -> usize {
        self.bound
    }

    fn compose(&self, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize) -> Option<SVec> {
        self.compose_vec(s, i, t, &SVec::unit(a), &SVec::unit(b))
    }

    /// `φ ∘_i ψ = φ ∘ (1 ⊗ ψ ⊗ 1)` by matching the row of `ψ` with index `i` of `φ`.
    fn compose_vec(&self, s: &Scheme, i: usize, t: &Scheme, u: &SVec, v: &SVec) -> Option<SVec> {
        if s.arity() + t.arity() - 1 > self.bound {
            return None;
        }
        let c = &self.carrier;
        let r = s.insert(i, t);
        let mut by_row: HashMap<usize, Vec<(Vec<usize>, &Scalar)>> = HashMap::new();
        for (b, y) in v.iter() {
            let (r2, j2) = c.decode(t, b);
            by_row.entry(r2).or_default().push((j2, y));
        }
        let mut out = SVec::new();
        for (a, x) in u.iter() {
            let (row, j) = c.decode(s, a);
            if let Some(list) = by_row.get(&j[i]) {
                for (j2, y) in list {
                    let mut jj = j[..i].to_vec();
                    jj.extend_from_slice(j2);
                    jj.extend_from_slice(&j[i + 1..]);
                    out.add_term(c.encode(&r, row, &jj), &(x * *y));
                }
            }
        }
        Some(out)
    }

    fn unit(&self, f: Mor) -> Option<SVec> {
        let d = self.carrier.a.cat().mor(f);
        self.element(&Scheme::new(vec![d.src], d.tgt), &self.carrier.a.map(f)).ok()
    }

    fn is_unital(&self) -> bool {
        true
    }
}

/// The free operad a presentation is built on.
pub enum FreeModel {
    Ns(FreeOperad),
    Sym(Symmetrized<FreeOperad>),
}

impl FreeModel {
    pub fn operad(&self) -> &dyn Operad {
        match self {
            FreeModel::Ns(f) => f,
            FreeModel::Sym(f) => f,
        }
    }

    pub fn ns(&self) -> &FreeOperad {
        match self {
            FreeModel::Ns(f) => f,
            FreeModel::Sym(f) => &f.base,
        }
    }
}

/// An operad given by a generating collection and relation vectors in the
/// free operad on it.
pub struct Presentation {
    pub generators: NsCollection,
    pub free: FreeModel,
    pub relations: Vec<(Scheme, SVec)>,
}

impl Presentation {
    pub fn new(generators: NsCollection, symmetric: bool, arity_bound: usize, weight_bound: usize) -> Self {
        let f = free_ns(&generators, arity_bound, weight_bound);
        let cat = generators.cat_arc().clone();
        let free = if symmetric { FreeModel::Sym(symmetrize(f, cat)) } else { FreeModel::Ns(f) };
        Presentation { generators, free, relations: Vec::new() }
    }

    pub fn free_operad(&self) -> &dyn Operad {
        self.free.operad()
    }

    /// Class of a generator basis element in the free operad.
    pub fn generator(&self, s: &Scheme, a: usize) -> SVec {
        let v = self.free.ns().generator(s, a).unwrap_or_default();
        match &self.free {
            FreeModel::Ns(_) => v,
            FreeModel::Sym(f) => f.embed(s, &Perm::identity(s.arity()), &v),
        }
    }

    pub fn quotient(&self) -> Result<Quotient, EndError> {
        let ideal = ideal_closure(self.free_operad(), &self.relations)?;
        Ok(quotient_operad(self.free_operad(), &ideal, self.generators.cat_arc().clone()))
    }

    /// Evaluates an element of the free operad under a generator assignment.
    pub fn evaluate(&self, images: &BTreeMap<(Scheme, usize), SVec>, target: &dyn Operad, s: &Scheme, v: &SVec) -> Result<SVec, EndError> {
        Ok(match &self.free {
            FreeModel::Ns(f) => {
                let mut out = SVec::new();
                for (qi, c) in v.iter() {
                    out.add_scaled(&evaluate_monomial(f.components[s].representative(qi), images, target)?, c);
                }
                out
            }
            FreeModel::Sym(f) => crate::freeop::universal_map_sym(f, images, target, s, v)?,
        })
    }
}

fn check_assignment(p: &Presentation, target: &dyn Operad, images: &BTreeMap<(Scheme, usize), SVec>) -> Result<(), EndError> {
    let x = &p.generators;
    let tx = target.carrier();
    for (s, b) in x.spaces() {
        for a in 0..b.dim() {
            let v = images.get(&(s.clone(), a)).ok_or_else(|| EndError::Scheme(format!("no image for {} basis {a}", x.cat().scheme_name(s))))?;
            if v.max_index().map(|k| k >= tx.dim(s)).unwrap_or(false) {
                return Err(EndError::Scheme(format!("image for {} basis {a} outside the target", x.cat().scheme_name(s))));
            }
        }
    }
    for (s, a) in images.keys() {
        if *a >= x.dim(s) {
            return Err(EndError::Scheme(format!("{} has no basis element {a}", x.cat().scheme_name(s))));
        }
    }
    Ok(())
}

/// Whether a generator assignment extends to an operad map: the assignment
/// intertwines the generator actions and every relation maps to zero.
pub fn check_algebra(p: &Presentation, target: &dyn Operad, images: &BTreeMap<(Scheme, usize), SVec>) -> Result<Report, EndError> {
    check_assignment(p, target, images)?;
    let x = &p.generators;
    let tx = target.carrier();
    let c = x.cat();
    let mut r = Report::new("algebra");
    for (s, b) in x.spaces() {
        for a in 0..b.dim() {
            for (slot, f) in slot_generators(c, s) {
                let t = act_target(c, s, slot, f).expect("acts");
                let mut lhs = SVec::new();
                for (b2, coef) in x.act(s, slot, f, a).iter() {
                    lhs.add_scaled(&images[&(t.clone(), b2)], coef);
                }
                let rhs = act_vec(tx, s, slot, f, &images[&(s.clone(), a)]);
                r.check("generator naturality", lhs == rhs, || format!("{} basis {a}, {slot:?} by {}", c.scheme_name(s), c.mor_name(f)));
            }
        }
    }
    for (k, (s, v)) in p.relations.iter().enumerate() {
        let img = p.evaluate(images, target, s, v)?;
        r.check("relation", img.is_zero(), || format!("relation {k} at {} maps to a nonzero element", c.scheme_name(s)));
    }
    Ok(r)
}

/// Relation images through whole-component matrices of the universal map.
pub fn relation_images_by_matrices(p: &Presentation, target: &dyn Operad, images: &BTreeMap<(Scheme, usize), SVec>) -> Result<Vec<SVec>, EndError> {
    check_assignment(p, target, images)?;
    let mats = universal_map(p.free.ns(), images, target)?;
    let tx = target.carrier();
    let mut out = Vec::new();
    for (s, v) in &p.relations {
        out.push(match &p.free {
            FreeModel::Ns(_) => mats[s].apply(v),
            FreeModel::Sym(f) => {
                let mut acc = SVec::new();
                // Group coordinates by permutation block.
                let mut blocks: BTreeMap<(Perm, Scheme), SVec> = BTreeMap::new();
                for (a, coef) in v.iter() {
                    let (perm, t, b) = f.decode(s, a);
                    blocks.entry((perm, t)).or_default().add_term(b, coef);
                }
                for ((perm, t), w) in blocks {
                    acc.add(&crate::collection::sigma_vec(tx, &t, &perm, &mats[&t].apply(&w)));
                }
                acc
            }
        });
    }
    Ok(out)
}

/// Sign convention for the differential of a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DgaSign {
    /// `d(xy) = (dx)y + (−1)^{|x|} x(dy)`.
    FirstDegree,
    /// `d(xy) = (dx)y + (−1)^{|y|} x(dy)`.
    SecondDegree,
}

impl DgaSign {
    pub fn scalar(self, m: i64, n: i64) -> Scalar {
        match self {
            DgaSign::FirstDegree => sign(m),
            DgaSign::SecondDegree => sign(n),
        }
    }
}

/// The generating collection of the dg associative operad: `μ_{m,n}` at
/// `(m n; m+n)`, and `μ₁, μ₂` at `(m n; m+n−1)` with `μ₀ = μ₁ ± μ₂`.
pub fn dga_generators(cat: Arc<LinearCat>, sign: DgaSign) -> NsCollection {
    let objs: Vec<(i64, Obj)> = (0..cat.num_objects()).map(|o| (d_degree(&cat, o), o)).collect();
    let find = |deg: i64| objs.iter().find(|(d, _)| *d == deg).map(|(_, o)| *o);
    let mut x = NsCollection::new(cat.clone());
    for &(m, om) in &objs {
        for &(n, on) in &objs {
            if let Some(t) = find(m + n) {
                x.add_space(Scheme::new(vec![om, on], t), BasedSpace::new(vec![format!("μ[{m},{n}]")]).unwrap());
            }
            if let Some(t) = find(m + n - 1) {
                x.add_space(Scheme::new(vec![om, on], t), BasedSpace::new(vec![format!("μ1[{m},{n}]"), format!("μ2[{m},{n}]")]).unwrap());
            }
        }
    }
    for &(m, om) in &objs {
        for &(n, on) in &objs {
            let Some(t) = find(m + n - 1) else { continue };
            let low = Scheme::new(vec![om, on], t);
            if let (Some(om1), Ok(dm)) = (find(m - 1), d_arrow(&cat, m)) {
                x.set_action(&Scheme::new(vec![om1, on], t), Slot::Input(0), dm, LinMap::from_columns(2, vec![SVec::unit(0)]).unwrap()).unwrap();
            }
            if let (Some(on1), Ok(dn)) = (find(n - 1), d_arrow(&cat, n)) {
                x.set_action(&Scheme::new(vec![om, on1], t), Slot::Input(1), dn, LinMap::from_columns(2, vec![SVec::unit(1)]).unwrap()).unwrap();
            }
            if let (Some(top), Ok(d)) = (find(m + n), d_arrow(&cat, m + n)) {
                let mu0 = SVec::from_pairs([(0, q(1)), (1, sign.scalar(m, n))]);
                x.set_action(&Scheme::new(vec![om, on], top), Slot::Output, d, LinMap::from_columns(2, vec![mu0]).unwrap()).unwrap();
            }
            let _ = low;
        }
    }
    x
}

pub struct DgaOperad {
    pub cat: Arc<LinearCat>,
    pub sign: DgaSign,
    pub presentation: Presentation,
    pub quotient: Quotient,
}

/// The presented dg associative operad over the chain category on `lo..=hi`.
pub fn build_dga_operad(lo: i64, hi: i64, weight_bound: usize, sign: DgaSign) -> Result<DgaOperad, EndError> {
    let cat = Arc::new(build_d_truncated(lo, hi).map_err(|e| EndError::Invalid(e.to_string()))?);
    let x = dga_generators(cat.clone(), sign);
    let mut p = Presentation::new(x, false, 3, weight_bound.max(2));
    let objs: Vec<(i64, Obj)> = (0..cat.num_objects()).map(|o| (d_degree(&cat, o), o)).collect();
    let find = |deg: i64| objs.iter().find(|(d, _)| *d == deg).map(|(_, o)| *o);
    let f = p.free_operad();
    let mut rels = Vec::new();
    for &(m, om) in &objs {
        for &(n, on) in &objs {
            for &(k, ok) in &objs {
                let (Some(mn), Some(nk), Some(top)) = (find(m + n), find(n + k), find(m + n + k)) else { continue };
                let s_outer = Scheme::new(vec![mn, ok], top);
                let s_inner = Scheme::new(vec![om, on], mn);
                let lhs = f.compose_vec(&s_outer, 0, &s_inner, &p.generator(&s_outer, 0), &p.generator(&s_inner, 0));
                let t_outer = Scheme::new(vec![om, nk], top);
                let t_inner = Scheme::new(vec![on, ok], nk);
                let rhs = f.compose_vec(&t_outer, 1, &t_inner, &p.generator(&t_outer, 0), &p.generator(&t_inner, 0));
                if let (Some(mut l), Some(r)) = (lhs, rhs) {
                    l.sub(&r);
                    rels.push((Scheme::new(vec![om, on, ok], top), l));
                }
            }
        }
    }
    p.relations = rels;
    let quotient = p.quotient()?;
    Ok(DgaOperad { cat, sign, presentation: p, quotient })
}

/// A graded algebra over the chain category: spaces per degree, the
/// differential, and products `A_m ⊗ A_n → A_{m+n}` on the tensor basis.
#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    pub dims: BTreeMap<i64, usize>,
    pub d: BTreeMap<i64, LinMap>,
    pub mult: BTreeMap<(i64, i64), LinMap>,
}

impl GradedAlgebra {
    pub fn dim(&self, n: i64) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    /// `d: A_n → A_{n−1}`, zero when absent.
    pub fn diff(&self, n: i64) -> LinMap {
        self.d.get(&n).cloned().unwrap_or_else(|| LinMap::zero(self.dim(n - 1), self.dim(n)))
    }

    pub fn product(&self, m: i64, n: i64) -> LinMap {
        self.mult.get(&(m, n)).cloned().unwrap_or_else(|| LinMap::zero(self.dim(m + n), self.dim(m) * self.dim(n)))
    }
}

/// The functor on the chain category and the assignment `μ ↦ product`,
/// `μ₁ ↦ product ∘ (d ⊗ 1)`, `μ₂ ↦ product ∘ (1 ⊗ d)`.
pub fn dga_assignment(dga: &DgaOperad, alg: &GradedAlgebra) -> Result<(EndOperad, Images), EndError> {
    let cat = dga.cat.clone();
    let spaces = (0..cat.num_objects()).map(|o| BasedSpace::standard(alg.dim(d_degree(&cat, o)))).collect();
    let mut maps = BTreeMap::new();
    for o in 0..cat.num_objects() {
        let n = d_degree(&cat, o);
        if let Ok(f) = d_arrow(&cat, n) {
            maps.insert(f, alg.diff(n));
        }
    }
    let end = end_operad(CFunctor::new(cat.clone(), spaces, maps)?, 3);
    let mut images = BTreeMap::new();
    for (s, b) in dga.presentation.generators.spaces() {
        let (m, n, t) = (d_degree(&cat, s.inputs[0]), d_degree(&cat, s.inputs[1]), d_degree(&cat, s.output));
        if b.dim() == 1 {
            images.insert((s.clone(), 0), end.element(s, &alg.product(m, n))?);
        } else {
            debug_assert_eq!(t, m + n - 1);
            let id_m = LinMap::identity(alg.dim(m));
            let id_n = LinMap::identity(alg.dim(n));
            let mu1 = alg.product(m - 1, n).compose(&alg.diff(m).tensor(&id_n)).map_err(|e| EndError::Shape(e.to_string()))?;
            let mu2 = alg.product(m, n - 1).compose(&id_m.tensor(&alg.diff(n))).map_err(|e| EndError::Shape(e.to_string()))?;
            images.insert((s.clone(), 0), end.element(s, &mu1)?);
            images.insert((s.clone(), 1), end.element(s, &mu2)?);
        }
    }
    Ok((end, images))
}

/// A strict monoidal structure on a linear category with identity symmetry.
#[derive(Clone, Debug)]
pub struct MonoidalTable {
    pub unit: Obj,
    pub objects: HashMap<(Obj, Obj), Obj>,
    pub morphisms: HashMap<(Mor, Mor), SVec>,
}

impl MonoidalTable {
    pub fn obj(&self, a: Obj, b: Obj) -> Option<Obj> {
        self.objects.get(&(a, b)).copied()
    }

    pub fn obj_sum(&self, xs: &[Obj]) -> Option<Obj> {
        xs.iter().try_fold(self.unit, |acc, &x| self.obj(acc, x))
    }

    pub fn mor(&self, f: Mor, g: Mor) -> Result<SVec, EndError> {
        self.morphisms.get(&(f, g)).cloned().ok_or_else(|| EndError::Monoidal(format!("morphisms {f} ⊕ {g}")))
    }

    pub fn mor_vec(&self, f: &SVec, g: &SVec) -> Result<SVec, EndError> {
        let mut out = SVec::new();
        for (a, x) in f.iter() {
            for (b, y) in g.iter() {
                out.add_scaled(&self.mor(a, b)?, &(x * y));
            }
        }
        Ok(out)
    }

    /// `f_1 ⊕ ⋯ ⊕ f_k` folded from the left, starting at the unit identity.
    pub fn mor_sum(&self, c: &LinearCat, fs: &[SVec]) -> Result<SVec, EndError> {
        let mut acc = SVec::unit(c.identity(self.unit));
        for f in fs {
            acc = self.mor_vec(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn terminal(c: &LinearCat) -> Self {
        let id = c.identity(0);
        MonoidalTable { unit: 0, objects: HashMap::from([((0, 0), 0)]), morphisms: HashMap::from([((id, id), SVec::unit(id))]) }
    }

    /// Degree addition on the truncated chain category: `∂ ⊕ 1 = 1 ⊕ ∂ = ∂`
    /// and `∂ ⊕ ∂ = 0`, defined where the result stays in the window.
    pub fn chain(c: &LinearCat) -> Result<Self, EndError> {
        let objs: Vec<(i64, Obj)> = (0..c.num_objects()).map(|o| (d_degree(c, o), o)).collect();
        let find = |deg: i64| objs.iter().find(|(d, _)| *d == deg).map(|(_, o)| *o);
        let unit = find(0).ok_or_else(|| EndError::Monoidal("degree 0 outside the window".into()))?;
        let mut objects = HashMap::new();
        let mut morphisms = HashMap::new();
        for &(m, om) in &objs {
            for &(n, on) in &objs {
                let Some(t) = find(m + n) else { continue };
                objects.insert((om, on), t);
                morphisms.insert((c.identity(om), c.identity(on)), SVec::unit(c.identity(t)));
                if let (Ok(dm), Ok(dt)) = (d_arrow(c, m), d_arrow(c, m + n)) {
                    if find(m + n - 1).is_some() && find(m - 1).is_some() {
                        morphisms.insert((dm, c.identity(on)), SVec::unit(dt));
                    }
                }
                if let (Ok(dn), Ok(dt)) = (d_arrow(c, n), d_arrow(c, m + n)) {
                    if find(m + n - 1).is_some() && find(n - 1).is_some() {
                        morphisms.insert((c.identity(om), dn), SVec::unit(dt));
                    }
                }
                if let (Ok(dm), Ok(dn)) = (d_arrow(c, m), d_arrow(c, n)) {
                    morphisms.insert((dm, dn), SVec::new());
                }
            }
        }
        Ok(MonoidalTable { unit, objects, morphisms })
    }
}

/// An operad in `Vect^C` with Day convolution: functors `P(n)` and
/// compositions `P(n)(r) ⊗ P(m)(r') → P(n+m−1)(r ⊕ r')`.
#[derive(Clone, Debug)]
pub struct DayOperad {
    pub cat: Arc<LinearCat>,
    pub monoidal: MonoidalTable,
    pub arity_bound: usize,
    pub dims: BTreeMap<(usize, Obj), usize>,
    pub maps: BTreeMap<(usize, Mor), LinMap>,
    pub comps: BTreeMap<(usize, Obj, usize, usize, Obj), LinMap>,
}

impl DayOperad {
    pub fn dim(&self, n: usize, r: Obj) -> usize {
        self.dims.get(&(n, r)).copied().unwrap_or(0)
    }

    pub fn map(&self, n: usize, g: Mor) -> LinMap {
        let d = self.cat.mor(g);
        if self.cat.is_identity(g) {
            return LinMap::identity(self.dim(n, d.src));
        }
        self.maps.get(&(n, g)).cloned().unwrap_or_else(|| LinMap::zero(self.dim(n, d.tgt), self.dim(n, d.src)))
    }

    pub fn zero(cat: Arc<LinearCat>, monoidal: MonoidalTable, arity_bound: usize) -> Self {
        DayOperad { cat, monoidal, arity_bound, dims: BTreeMap::new(), maps: BTreeMap::new(), comps: BTreeMap::new() }
    }

    /// `P(n) = P_n ⊗ C(unit, −)` for a single-colored operad `p`.
    pub fn at_unit(p: &dyn Operad, cat: Arc<LinearCat>, monoidal: MonoidalTable) -> Result<Self, EndError> {
        let px = p.carrier();
        let n_max = p.arity_bound();
        let sch = |n: usize| Scheme::new(vec![0; n], 0);
        let u = monoidal.unit;
        let mut out = DayOperad::zero(cat.clone(), monoidal, n_max);
        for n in 0..=n_max {
            let pn = px.dim(&sch(n));
            if pn == 0 {
                continue;
            }
            for r in 0..cat.num_objects() {
                let h = cat.hom(u, r).len();
                if h > 0 {
                    out.dims.insert((n, r), pn * h);
                }
            }
            for g in cat.non_identities() {
                let d = cat.mor(g);
                let (hs, ht) = (cat.hom(u, d.src), cat.hom(u, d.tgt));
                if hs.is_empty() || ht.is_empty() {
                    continue;
                }
                let mut cols = Vec::new();
                for a in 0..pn {
                    for &x in hs {
                        let gx = cat.compose(g, x).expect("composable");
                        let mut v = SVec::new();
                        for (y, c) in gx.iter() {
                            let k = ht.iter().position(|&z| z == y).expect("in hom");
                            v.add_term(a * ht.len() + k, c);
                        }
                        cols.push(v);
                    }
                }
                out.maps.insert((n, g), LinMap::from_columns(pn * ht.len(), cols).expect("shape"));
            }
        }
        for n in 1..=n_max {
            for m in 0..=n_max + 1 - n {
                let (pn, pm, pr) = (px.dim(&sch(n)), px.dim(&sch(m)), px.dim(&sch(n + m - 1)));
                if pn == 0 || pm == 0 {
                    continue;
                }
                for r in 0..cat.num_objects() {
                    for r2 in 0..cat.num_objects() {
                        let (hr, hr2) = (cat.hom(u, r), cat.hom(u, r2));
                        let Some(rr) = out.monoidal.obj(r, r2) else { continue };
                        if hr.is_empty() || hr2.is_empty() {
                            continue;
                        }
                        let hrr = cat.hom(u, rr);
                        for i in 0..n {
                            let mut cols = Vec::new();
                            for a in 0..pn {
                                for &x in hr {
                                    for b in 0..pm {
                                        for &y in hr2 {
                                            let pc = p.compose(&sch(n), i, &sch(m), a, b).unwrap_or_default();
                                            let xy = out.monoidal.mor(x, y)?;
                                            let mut v = SVec::new();
                                            for (c, e) in pc.iter() {
                                                for (z, f) in xy.iter() {
                                                    let k = hrr.iter().position(|&w| w == z).expect("in hom");
                                                    v.add_term(c * hrr.len() + k, &(e * f));
                                                }
                                            }
                                            cols.push(v);
                                        }
                                    }
                                }
                            }
                            out.comps.insert((n, r, i, m, r2), LinMap::from_columns(pr * hrr.len(), cols).expect("shape"));
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

struct PcBlock {
    r: Obj,
    homs: Vec<Mor>,
    pdim: usize,
    offset: usize,
}

struct PcComponent {
    blocks: Vec<PcBlock>,
    quotient: QuotientSpace,
}

impl PcComponent {
    fn block(&self, r: Obj) -> Option<&PcBlock> {
        self.blocks.iter().find(|b| b.r == r)
    }

    /// Ambient vector of `h ⊗ p` for a combination `h` of morphisms.
    fn embed(&self, r: Obj, h: &SVec, p: &SVec) -> Option<SVec> {
        let b = self.block(r)?;
        let mut v = SVec::new();
        for (m, x) in h.iter() {
            let k = b.homs.iter().position(|&z| z == m).expect("in hom");
            for (a, y) in p.iter() {
                v.add_term(b.offset + k * b.pdim + a, &(x * y));
            }
        }
        Some(v)
    }

    fn lift(&self, qi: usize) -> (Obj, Mor, usize) {
        let j = self.quotient.basis()[qi];
        let b = self.blocks.iter().rev().find(|b| b.offset <= j).expect("in range");
        let k = j - b.offset;
        (b.r, b.homs[k / b.pdim], k % b.pdim)
    }
}

/// `P^C(c_1 ⋯ c_n; c) = ∫^r C(c_1 ⊕ ⋯ ⊕ c_n ⊕ r, c) ⊗ P(n)(r)`, materialized.
/// Coend variables whose sum leaves the truncation are dropped, which is
/// exact only when `P(n)(r)` vanishes for such `r`.
pub fn pc_transform(p: &DayOperad) -> Result<COperad, EndError> {
    let c = &p.cat;
    let mon = &p.monoidal;
    for (&(a, b), &ab) in &mon.objects {
        if mon.obj(b, a) != Some(ab) {
            return Err(EndError::Monoidal("object sum is not commutative".into()));
        }
    }
    let mut comps: BTreeMap<Scheme, PcComponent> = BTreeMap::new();
    for s in all_schemes(c, p.arity_bound) {
        let n = s.arity();
        let Some(cs) = mon.obj_sum(&s.inputs) else { continue };
        let mut blocks = Vec::new();
        let mut off = 0;
        for r in 0..c.num_objects() {
            let pd = p.dim(n, r);
            let Some(cr) = mon.obj(cs, r) else { continue };
            let homs = c.hom(cr, s.output).to_vec();
            if pd == 0 || homs.is_empty() {
                continue;
            }
            blocks.push(PcBlock { r, pdim: pd, offset: off, homs: homs.clone() });
            off += pd * homs.len();
        }
        if off == 0 {
            continue;
        }
        let comp0 = PcComponent { blocks, quotient: quotient_by_dim(0, &[]).expect("empty") };
        let mut rels = Vec::new();
        let id_cs = SVec::unit(c.identity(cs));
        for g in c.non_identities() {
            let d = c.mor(g);
            let (Some(bs), Some(bt)) = (comp0.block(d.src), comp0.block(d.tgt)) else { continue };
            let shift = mon.mor_vec(&id_cs, &SVec::unit(g))?;
            let pg = p.map(n, g);
            for &h in &bt.homs {
                for a in 0..bs.pdim {
                    let hs = c.compose_vec(&SVec::unit(h), &shift);
                    let mut v = comp0.embed(d.src, &hs, &SVec::unit(a)).expect("block");
                    v.sub(&comp0.embed(d.tgt, &SVec::unit(h), pg.column(a)).expect("block"));
                    if !v.is_zero() {
                        rels.push(v);
                    }
                }
            }
        }
        let quotient = quotient_by_dim(off, &rels).map_err(|e| EndError::Shape(e.to_string()))?;
        if quotient.dim() > 0 {
            comps.insert(s, PcComponent { blocks: comp0.blocks, quotient });
        }
    }
    let lazy = PcOperad { day: p, comps, carrier_cat: c.clone() };
    let carrier = lazy.build_carrier()?;
    let view = PcView { lazy: &lazy, carrier };
    Ok(COperad::materialize(&view, c.clone()))
}

struct PcOperad<'a> {
    day: &'a DayOperad,
    comps: BTreeMap<Scheme, PcComponent>,
    carrier_cat: Arc<LinearCat>,
}

impl PcOperad<'_> {
    fn project(&self, s: &Scheme, r: Obj, h: &SVec, pv: &SVec) -> SVec {
        match self.comps.get(s) {
            Some(comp) => comp.embed(r, h, pv).map(|v| comp.quotient.project(&v)).unwrap_or_default(),
            None => SVec::new(),
        }
    }

    fn build_carrier(&self) -> Result<NsCollection, EndError> {
        let c = &self.carrier_cat;
        let mon = &self.day.monoidal;
        let mut x = NsCollection::new(c.clone());
        for (s, comp) in &self.comps {
            x.add_space(s.clone(), BasedSpace::standard(comp.quotient.dim()));
        }
        for (s, comp) in &self.comps {
            for (slot, f) in crate::collection::slot_morphisms(c, s) {
                let t = act_target(c, s, slot, f).expect("acts");
                let Some(tc) = self.comps.get(&t) else { continue };
                let mut cols = Vec::new();
                for qi in 0..comp.quotient.dim() {
                    let (r, h, a) = comp.lift(qi);
                    let h2 = match slot {
                        Slot::Input(k) => {
                            let mut parts: Vec<SVec> = t.inputs.iter().map(|&o| SVec::unit(c.identity(o))).collect();
                            parts[k] = SVec::unit(f);
                            parts.push(SVec::unit(c.identity(r)));
                            let big = mon.mor_sum(c, &parts)?;
                            c.compose_vec(&SVec::unit(h), &big)
                        }
                        Slot::Output => c.compose(f, h).expect("composable"),
                    };
                    cols.push(self.project(&t, r, &h2, &SVec::unit(a)));
                }
                x.set_action(s, slot, f, LinMap::from_columns(tc.quotient.dim(), cols).expect("shape")).expect("shape");
            }
        }
        Ok(x)
    }

    /// `(h ⊗ p) ∘_i (h' ⊗ p') = h ∘ (1 ⊕ h' ⊕ 1 ⊕ 1) ⊗ (p ∘_i p')`.
    fn compose(&self, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize) -> Option<SVec> {
        let c = &self.carrier_cat;
        let mon = &self.day.monoidal;
        let (ca, cb) = (self.comps.get(s)?, self.comps.get(t)?);
        let (r, h, pa) = ca.lift(a);
        let (r2, h2, pb) = cb.lift(b);
        let rr = mon.obj(r, r2)?;
        let m = self.day.comps.get(&(s.arity(), r, i, t.arity(), r2))?;
        let pc = m.column(pa * self.day.dim(t.arity(), r2) + pb).clone();
        let mut parts: Vec<SVec> = s.inputs[..i].iter().map(|&o| SVec::unit(c.identity(o))).collect();
        parts.push(SVec::unit(h2));
        parts.extend(s.inputs[i + 1..].iter().map(|&o| SVec::unit(c.identity(o))));
        parts.push(SVec::unit(c.identity(r)));
        let big = mon.mor_sum(c, &parts).ok()?;
        let hh = c.compose_vec(&SVec::unit(h), &big);
        Some(self.project(&s.insert(i, t), rr, &hh, &pc))
    }
}

struct PcView<'a> {
    lazy: &'a PcOperad<'a>,
    carrier: NsCollection,
}

impl Operad for PcView<'_> {
    fn carrier(&self) -> &dyn Collection {
        &self.carrier
    }

    fn symmetric(&self) -> bool {
        false
    }

    fn arity_bound(&self) -> usize {
        self.lazy.day.arity_bound
    }

    fn compose(&self, s: &Scheme, i: usize, t: &Scheme, a: usize, b: usize) -> Option<SVec> {
        if s.arity() + t.arity() - 1 > self.lazy.day.arity_bound {
            return None;
        }
        Some(self.lazy.compose(s, i, t, a, b).unwrap_or_default())
    }
}

/// The non-symmetric associative operad: one binary generator `μ` over the
/// terminal category with `μ ∘_0 μ = μ ∘_1 μ`.
pub fn associative_presentation() -> Presentation {
    let term = Arc::new(FinCat::terminal().linearize());
    let b = Scheme::new(vec![0, 0], 0);
    let mut x = NsCollection::new(term);
    x.add_space(b.clone(), BasedSpace::new(vec!["μ".into()]).unwrap());
    let mut p = Presentation::new(x, false, 3, 2);
    let mu = p.generator(&b, 0);
    let f = p.free_operad();
    let mut r = f.compose_vec(&b, 0, &b, &mu, &mu).unwrap();
    r.sub(&f.compose_vec(&b, 1, &b, &mu, &mu).unwrap());
    p.relations.push((Scheme::new(vec![0; 3], 0), r));
    p
}

/// `V₀ = ⟨1, t⟩` with `t² = 0`, `V₁ = ⟨e⟩`, `de = t`, `e` a two-sided
/// module over `V₀` with `te = et = 0`.
pub fn two_term_dga(broken: bool) -> GradedAlgebra {
    let dims = BTreeMap::from([(0, 2), (1, 1)]);
    let d = BTreeMap::from([(1, LinMap::from_int_rows(&[&[0], &[1]]))]);
    let mut mult = BTreeMap::new();
    mult.insert((0, 0), LinMap::from_int_rows(&[&[1, 0, 0, 0], &[0, 1, 1, 0]]));
    mult.insert((0, 1), LinMap::from_int_rows(&[&[if broken { 0 } else { 1 }, 0]]));
    mult.insert((1, 0), LinMap::from_int_rows(&[&[1, 0]]));
    GradedAlgebra { dims, d, mult }
}

/// `End(V)` for `V = (ℚe → ℚ1)`, `de = 1`: degree 1 `u: 1 ↦ e`, degree 0
/// projections `p₀, p₁`, degree −1 `w: e ↦ 1`; `D(φ) = dφ − (−1)^{|φ|} φd`.
pub fn end_of_cone() -> GradedAlgebra {
    let dims = BTreeMap::from([(-1, 1), (0, 2), (1, 1)]);
    let d = BTreeMap::from([(1, LinMap::from_int_rows(&[&[1], &[1]])), (0, LinMap::from_int_rows(&[&[-1, 1]]))]);
    let mut mult = BTreeMap::new();
    mult.insert((1, 0), LinMap::from_int_rows(&[&[1, 0]]));
    mult.insert((0, 1), LinMap::from_int_rows(&[&[0, 1]]));
    mult.insert((0, 0), LinMap::from_int_rows(&[&[1, 0, 0, 0], &[0, 0, 0, 1]]));
    mult.insert((-1, 1), LinMap::from_int_rows(&[&[1], &[0]]));
    mult.insert((1, -1), LinMap::from_int_rows(&[&[0], &[1]]));
    mult.insert((-1, 0), LinMap::from_int_rows(&[&[0, 1]]));
    mult.insert((0, -1), LinMap::from_int_rows(&[&[1, 0]]));
    GradedAlgebra { dims, d, mult }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{associative_operad, check_operad, check_unital, cowedge_from_unital};

    fn arrow_functor() -> CFunctor {
        let cat = Arc::new(FinCat::walking_arrow().linearize());
        let f = cat.mor_index("f").unwrap();
        let inj = LinMap::from_int_rows(&[&[1], &[0]]);
        CFunctor::new(cat, vec![BasedSpace::standard(1), BasedSpace::standard(2)], BTreeMap::from([(f, inj)])).unwrap()
    }

    #[test]
    fn end_dims() {
        let term = Arc::new(FinCat::terminal().linearize());
        let one = end_operad(CFunctor::new(term.clone(), vec![BasedSpace::standard(1)], BTreeMap::new()).unwrap(), 4);
        let two = end_operad(CFunctor::new(term, vec![BasedSpace::standard(2)], BTreeMap::new()).unwrap(), 4);
        for n in 0..=4 {
            let s = Scheme::new(vec![0; n], 0);
            assert_eq!(one.carrier().dim(&s), 1);
            assert_eq!(two.carrier().dim(&s), 1 << (n + 1));
        }
        let s = Scheme::new(vec![0, 0], 0);
        assert_eq!(one.compose(&s, 1, &s, 0, 0), Some(SVec::unit(0)));
        assert!(check_operad(&two).ok());
        assert!(check_unital(&two).ok());
    }

    #[test]
    fn arrow_actions_are_pre_and_post_composition() {
        let a = arrow_functor();
        assert!(check_functor(&a).ok());
        let cat = a.cat_arc().clone();
        let f = cat.mor_index("f").unwrap();
        let end = end_operad(a, 3);
        // φ ∈ End(b; b) = 2×2 matrices; (f; 1) gives φ∘A(f) ∈ End(a; b).
        let phi = LinMap::from_int_rows(&[&[1, 2], &[3, 4]]);
        let v = end.element(&Scheme::new(vec![1], 1), &phi).unwrap();
        let pre = act_vec(end.carrier(), &Scheme::new(vec![1], 1), Slot::Input(0), f, &v);
        assert_eq!(end.matrix(&Scheme::new(vec![0], 1), &pre), LinMap::from_int_rows(&[&[1], &[3]]));
        // ψ ∈ End(a; a) = 1×1; (1; f) gives A(f)∘ψ ∈ End(a; b).
        let psi = LinMap::from_int_rows(&[&[5]]);
        let w = end.element(&Scheme::new(vec![0], 0), &psi).unwrap();
        let post = act_vec(end.carrier(), &Scheme::new(vec![0], 0), Slot::Output, f, &w);
        assert_eq!(end.matrix(&Scheme::new(vec![0], 1), &post), LinMap::from_int_rows(&[&[5], &[0]]));
        assert!(check_operad(&end).ok());
        assert!(check_unital(&end).ok());
        assert!(cowedge_from_unital(&end).ok());
        assert_eq!(end.unit(f).map(|u| end.matrix(&Scheme::new(vec![0], 1), &u)), Some(LinMap::from_int_rows(&[&[1], &[0]])));
    }

    #[test]
    fn end_sigma_action_permutes_arguments() {
        let term = Arc::new(FinCat::terminal().linearize());
        let end = end_operad(CFunctor::new(term, vec![BasedSpace::standard(2)], BTreeMap::new()).unwrap(), 3);
        let s = Scheme::new(vec![0, 0], 0);
        // φ(e_x ⊗ e_y) = e_0 when (x, y) = (0, 1); the swap reads (1, 0).
        let phi = end.carrier().label(&s, 1);
        assert_eq!(phi, "E0|0,1");
        let sw = Perm::transposition(2, 0, 1);
        let v = end.carrier().act_sigma(&s, &sw, 1);
        assert_eq!(end.carrier().label(&s, v.leading().unwrap().0), "E0|1,0");
    }

    /// Multiplication table on a 2-dim algebra as a matrix on `e_x ⊗ e_y`.
    fn mult_table(entries: &[[(i64, i64); 2]; 2]) -> LinMap {
        let cols: Vec<SVec> = (0..4).map(|k| {
            let (a, b) = entries[k / 2][k % 2];
            SVec::from_ints(&[(0, a), (1, b)])
        }).collect();
        LinMap::from_columns(2, cols).unwrap()
    }

    fn algebra_check(table: LinMap) -> (Report, Vec<SVec>) {
        let p = associative_presentation();
        let term = p.generators.cat_arc().clone();
        let end = end_operad(CFunctor::new(term, vec![BasedSpace::standard(2)], BTreeMap::new()).unwrap(), 3);
        let b = Scheme::new(vec![0, 0], 0);
        let images = BTreeMap::from([((b.clone(), 0), end.element(&b, &table).unwrap())]);
        let r = check_algebra(&p, &end, &images).unwrap();
        let by_mats = relation_images_by_matrices(&p, &end, &images).unwrap();
        (r, by_mats)
    }

    #[test]
    fn dual_numbers_are_associative() {
        // Basis 1, t with t² = 0.
        let (r, imgs) = algebra_check(mult_table(&[[(1, 0), (0, 1)], [(0, 1), (0, 0)]]));
        assert!(r.ok(), "{r}");
        assert!(imgs.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn nonassociative_table_is_rejected() {
        // e_0 e_0 = e_1, everything else 0: (e_0 e_0) e_0 = 0 but there is
        // no term either way; use e_0 e_0 = e_1, e_1 e_0 = e_0, e_0 e_1 = 0.
        let table = mult_table(&[[(0, 1), (0, 0)], [(1, 0), (0, 0)]]);
        // (e0 e0) e0 = e1 e0 = e0, e0 (e0 e0) = e0 e1 = 0.
        let (r, imgs) = algebra_check(table);
        assert!(!r.ok());
        assert!(r.has_check("relation"));
        assert!(imgs.iter().any(|v| !v.is_zero()));
    }

    #[test]
    fn free_operad_has_no_relations() {
        let mut p = associative_presentation();
        p.relations.clear();
        let term = p.generators.cat_arc().clone();
        let end = end_operad(CFunctor::new(term, vec![BasedSpace::standard(2)], BTreeMap::new()).unwrap(), 3);
        let b = Scheme::new(vec![0, 0], 0);
        let images = BTreeMap::from([((b.clone(), 0), SVec::from_ints(&[(1, 3), (6, -2)]))]);
        assert!(check_algebra(&p, &end, &images).unwrap().ok());
        let bad = BTreeMap::from([((b, 0), SVec::unit(99))]);
        assert!(check_algebra(&p, &end, &bad).is_err());
        assert!(check_algebra(&p, &end, &BTreeMap::new()).is_err());
    }

    #[test]
    fn dga_generators_match_displayed_data() {
        for sign in [DgaSign::FirstDegree, DgaSign::SecondDegree] {
            let dga = build_dga_operad(0, 3, 2, sign).unwrap();
            let cat = &dga.cat;
            let x = &dga.presentation.generators;
            let o = |n: i64| cat.object_index(&n.to_string()).unwrap();
            assert_eq!(x.dim(&Scheme::new(vec![o(1), o(2)], o(2))), 2);
            assert_eq!(x.dim(&Scheme::new(vec![o(1), o(2)], o(3))), 1);
            assert_eq!(x.dim(&Scheme::new(vec![o(1), o(1)], o(3))), 0);
            // μ_{m−1,n} ↦ μ₁, μ_{m,n−1} ↦ μ₂, μ_{m,n} ↦ μ₁ + (−1)^? μ₂.
            let (m, n) = (2i64, 1i64);
            let d = |k: i64| d_arrow(cat, k).unwrap();
            let tgt = o(m + n - 1);
            assert_eq!(x.act(&Scheme::new(vec![o(m - 1), o(n)], tgt), Slot::Input(0), d(m), 0), SVec::unit(0));
            assert_eq!(x.act(&Scheme::new(vec![o(m), o(n - 1)], tgt), Slot::Input(1), d(n), 0), SVec::unit(1));
            let mu0 = x.act(&Scheme::new(vec![o(m), o(n)], o(m + n)), Slot::Output, d(m + n), 0);
            let expected = match sign {
                DgaSign::FirstDegree => SVec::from_ints(&[(0, 1), (1, 1)]),
                DgaSign::SecondDegree => SVec::from_ints(&[(0, 1), (1, -1)]),
            };
            assert_eq!(mu0, expected);
            assert!(crate::collection::validate_functor(x).ok());
            assert!(crate::operad::is_quadratic_binary(x, dga.presentation.free_operad(), &dga.presentation.relations));
            assert!(check_operad(&dga.quotient.operad).ok());
        }
    }

    /// Leibniz rule checked directly on the graded pieces.
    fn leibniz_holds(alg: &GradedAlgebra, sign: DgaSign) -> bool {
        for m in -1..=2 {
            for n in -1..=2 {
                if alg.dim(m) == 0 || alg.dim(n) == 0 || alg.dim(m + n - 1) == 0 {
                    continue;
                }
                let lhs = alg.diff(m + n).compose(&alg.product(m, n)).unwrap();
                let t1 = alg.product(m - 1, n).compose(&alg.diff(m).tensor(&LinMap::identity(alg.dim(n)))).unwrap();
                let t2 = alg.product(m, n - 1).compose(&LinMap::identity(alg.dim(m)).tensor(&alg.diff(n))).unwrap();
                if lhs != t1.add(&t2.scaled(&sign.scalar(m, n))).unwrap() {
                    return false;
                }
            }
        }
        true
    }

    fn check_dga(alg: &GradedAlgebra, lo: i64, hi: i64, sign: DgaSign) -> Report {
        let dga = build_dga_operad(lo, hi, 2, sign).unwrap();
        let (end, images) = dga_assignment(&dga, alg).unwrap();
        let r = check_algebra(&dga.presentation, &end, &images).unwrap();
        let by_mats = relation_images_by_matrices(&dga.presentation, &end, &images).unwrap();
        assert_eq!(r.has_check("relation") && !r.ok() && r.violations.iter().any(|v| v.check == "relation"), by_mats.iter().any(|v| !v.is_zero()));
        r
    }

    #[test]
    fn two_term_dga_is_an_algebra_with_the_standard_sign() {
        let alg = two_term_dga(false);
        assert!(leibniz_holds(&alg, DgaSign::FirstDegree));
        assert!(!leibniz_holds(&alg, DgaSign::SecondDegree));
        let r = check_dga(&alg, 0, 2, DgaSign::FirstDegree);
        assert!(r.ok(), "{r}");
        let r2 = check_dga(&alg, 0, 2, DgaSign::SecondDegree);
        assert!(!r2.ok());
        assert!(r2.violations.iter().all(|v| v.check == "generator naturality"));
        let broken = check_dga(&two_term_dga(true), 0, 2, DgaSign::FirstDegree);
        assert!(!broken.ok());
    }

    #[test]
    fn products_of_boundaries_must_vanish() {
        // The generators have no component at (m n; m+n−2), so naturality
        // forces d((dx)y) = 0; End of the cone has (du)(du) = 1.
        let alg = end_of_cone();
        assert!(leibniz_holds(&alg, DgaSign::FirstDegree));
        let r = check_dga(&alg, -1, 1, DgaSign::FirstDegree);
        assert!(!r.ok());
        assert!(r.violations.iter().any(|v| v.witness.starts_with("(1 1; 1)") && v.witness.contains("Output")));
    }

    #[test]
    fn trivial_products_form_an_algebra_under_both_signs() {
        let alg = GradedAlgebra {
            dims: BTreeMap::from([(0, 1), (1, 1)]),
            d: BTreeMap::from([(1, LinMap::from_int_rows(&[&[1]]))]),
            mult: BTreeMap::new(),
        };
        for sign in [DgaSign::FirstDegree, DgaSign::SecondDegree] {
            let dga = build_dga_operad(0, 2, 2, sign).unwrap();
            let (end, images) = dga_assignment(&dga, &alg).unwrap();
            assert!(check_algebra(&dga.presentation, &end, &images).unwrap().ok());
        }
    }

    #[test]
    fn pc_transform_over_terminal_is_identity() {
        let term = Arc::new(FinCat::terminal().linearize());
        let mon = MonoidalTable::terminal(&term);
        let p = associative_operad(4, false);
        let day = DayOperad::at_unit(&p, term.clone(), mon.clone()).unwrap();
        let pc = pc_transform(&day).unwrap();
        for n in 1..=4 {
            let s = Scheme::new(vec![0; n], 0);
            assert_eq!(pc.carrier().dim(&s), p.carrier().dim(&s));
        }
        for (key, m) in &p.comps {
            let (s, i, t) = key;
            let mine = LinMap::from_columns(
                pc.carrier().dim(&s.insert(*i, t)),
                (0..pc.carrier().dim(s)).flat_map(|a| (0..pc.carrier().dim(t)).map(move |b| (a, b))).map(|(a, b)| pc.compose(s, *i, t, a, b).unwrap()).collect(),
            )
            .unwrap();
            assert_eq!(&mine, m);
        }
        let zero = pc_transform(&DayOperad::zero(term, mon, 3)).unwrap();
        assert!(zero.carrier().schemes().is_empty());
    }

    #[test]
    fn pc_transform_over_chain_category() {
        let cat = Arc::new(build_d_truncated(0, 3).unwrap());
        let mon = MonoidalTable::chain(&cat).unwrap();
        let p = associative_presentation().quotient().unwrap().operad;
        assert_eq!(p.carrier().dim(&Scheme::new(vec![0; 3], 0)), 1);
        let day = DayOperad::at_unit(&p, cat.clone(), mon).unwrap();
        let pc = pc_transform(&day).unwrap();
        let rep = check_operad(&pc);
        assert!(rep.ok(), "{rep}");
        let o = |n: i64| cat.object_index(&n.to_string()).unwrap();
        // Yoneda: dim = dim P_n · dim C(c_1 + ⋯ + c_n, c).
        for s in all_schemes(&cat, 3) {
            let degs: i64 = s.inputs.iter().map(|&c| d_degree(&cat, c)).sum();
            let expected = match cat.object_index(&degs.to_string()) {
                Some(src) if s.arity() >= 1 => p.carrier().dim(&Scheme::new(vec![0; s.arity()], 0)) * cat.hom(src, s.output).len(),
                _ => 0,
            };
            assert_eq!(pc.carrier().dim(&s), expected, "{}", cat.scheme_name(&s));
        }
        let dga = build_dga_operad(0, 3, 2, DgaSign::FirstDegree).unwrap();
        let dq = dga.quotient.operad.carrier();
        assert_eq!(pc.carrier().dim(&Scheme::new(vec![o(1), o(1)], o(2))), dq.dim(&Scheme::new(vec![o(1), o(1)], o(2))));
        assert_eq!(pc.carrier().dim(&Scheme::new(vec![o(1), o(1)], o(1))), 1);
        assert_eq!(dq.dim(&Scheme::new(vec![o(1), o(1)], o(1))), 2);
    }
}
