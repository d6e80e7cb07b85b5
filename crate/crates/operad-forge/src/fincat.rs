//! Finite categories, their linearizations, color schemes and scheme morphisms.
//!
//! Everything downstream works over a [`LinearCat`]: a category whose hom
//! spaces have a finite basis of named morphisms and whose composition is
//! bilinear. A finite category linearizes to one with single-term composites.

use crate::linalg::{q, Scalar, SVec};
use crate::perm::Perm;
use crate::report::Report;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

pub type Obj = usize;
pub type Mor = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("duplicate id `{0}`")]
    Duplicate(String),
    #[error("bad endpoints for `{0}`")]
    BadEndpoints(String),
    #[error("object `{0}` has no identity")]
    MissingIdentity(String),
    #[error("composite outside truncation: {0}")]
    OutOfTruncation(String),
    #[error("incompatible scheme morphisms: {0}")]
    Incompatible(String),
    #[error("invalid category description: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub id: String,
    pub src: Obj,
    pub tgt: Obj,
}

/// A finite category given by an explicit composition table.
#[derive(Clone, Debug)]
pub struct FinCat {
    objects: Vec<String>,
    morphisms: Vec<MorphismDecl>,
    identity: Vec<Mor>,
    table: HashMap<(Mor, Mor), Mor>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FinCatJson {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismJson>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
    pub identities: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismJson {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

impl FinCat {
    /// Builds a category; composites with an identity are filled in when absent.
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        identities: Vec<(String, String)>,
        compose: Vec<(String, String, String)>,
    ) -> Result<Self, CatError> {
        let mut obj_ix = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_ix.insert(o.clone(), i).is_some() {
                return Err(CatError::Duplicate(o.clone()));
            }
        }
        let obj = |s: &str| obj_ix.get(s).copied().ok_or_else(|| CatError::UnknownObject(s.to_string()));
        let mut decls = Vec::new();
        let mut mor_ix = HashMap::new();
        for (id, s, t) in &morphisms {
            if mor_ix.insert(id.clone(), decls.len()).is_some() {
                return Err(CatError::Duplicate(id.clone()));
            }
            decls.push(MorphismDecl { id: id.clone(), src: obj(s)?, tgt: obj(t)? });
        }
        let mor = |s: &str| mor_ix.get(s).copied().ok_or_else(|| CatError::UnknownMorphism(s.to_string()));
        let mut identity = vec![usize::MAX; objects.len()];
        for (o, m) in &identities {
            let (oi, mi) = (obj(o)?, mor(m)?);
            if decls[mi].src != oi || decls[mi].tgt != oi {
                return Err(CatError::BadEndpoints(m.clone()));
            }
            identity[oi] = mi;
        }
        if let Some(o) = identity.iter().position(|&m| m == usize::MAX) {
            return Err(CatError::MissingIdentity(objects[o].clone()));
        }
        let mut table = HashMap::new();
        for (g, f, gf) in &compose {
            let (gi, fi, hi) = (mor(g)?, mor(f)?, mor(gf)?);
            let (dg, df, dh) = (&decls[gi], &decls[fi], &decls[hi]);
            if df.tgt != dg.src || dh.src != df.src || dh.tgt != dg.tgt {
                return Err(CatError::BadEndpoints(format!("{g} ∘ {f} = {gf}")));
            }
            table.insert((gi, fi), hi);
        }
        for (mi, d) in decls.iter().enumerate() {
            table.entry((identity[d.tgt], mi)).or_insert(mi);
            table.entry((mi, identity[d.src])).or_insert(mi);
        }
        Ok(FinCat { objects, morphisms: decls, identity, table })
    }

    pub fn from_json(j: &FinCatJson) -> Result<Self, CatError> {
        FinCat::new(
            j.objects.clone(),
            j.morphisms.iter().map(|m| (m.id.clone(), m.src.clone(), m.tgt.clone())).collect(),
            j.identities.iter().map(|(o, m)| (o.clone(), m.clone())).collect(),
            j.compose.iter().map(|[g, f, h]| (g.clone(), f.clone(), h.clone())).collect(),
        )
    }

    pub fn to_json(&self) -> FinCatJson {
        let mut compose: Vec<[String; 3]> = self
            .table
            .iter()
            .map(|(&(g, f), &h)| [self.morphisms[g].id.clone(), self.morphisms[f].id.clone(), self.morphisms[h].id.clone()])
            .collect();
        compose.sort();
        FinCatJson {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismJson { id: m.id.clone(), src: self.objects[m.src].clone(), tgt: self.objects[m.tgt].clone() })
                .collect(),
            compose,
            identities: self
                .identity
                .iter()
                .enumerate()
                .map(|(o, &m)| (self.objects[o].clone(), self.morphisms[m].id.clone()))
                .collect(),
        }
    }

    pub fn terminal() -> Self {
        FinCat::new(vec!["*".into()], vec![("id".into(), "*".into(), "*".into())], vec![("*".into(), "id".into())], vec![])
            .expect("terminal category")
    }

    /// Two objects `a`, `b` and one arrow `f: a → b`.
    pub fn walking_arrow() -> Self {
        FinCat::new(
            vec!["a".into(), "b".into()],
            vec![
                ("id_a".into(), "a".into(), "a".into()),
                ("id_b".into(), "b".into(), "b".into()),
                ("f".into(), "a".into(), "b".into()),
            ],
            vec![("a".into(), "id_a".into()), ("b".into(), "id_b".into())],
            vec![],
        )
        .expect("walking arrow")
    }

    /// Discrete category on `names`.
    pub fn discrete(names: &[&str]) -> Self {
        FinCat::new(
            names.iter().map(|s| s.to_string()).collect(),
            names.iter().map(|s| (format!("id_{s}"), s.to_string(), s.to_string())).collect(),
            names.iter().map(|s| (s.to_string(), format!("id_{s}"))).collect(),
            vec![],
        )
        .expect("discrete category")
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[MorphismDecl] {
        &self.morphisms
    }

    pub fn identity(&self, o: Obj) -> Mor {
        self.identity[o]
    }

    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        self.table.get(&(g, f)).copied()
    }

    pub fn mor_index(&self, id: &str) -> Option<Mor> {
        self.morphisms.iter().position(|m| m.id == id)
    }

    pub fn linearize(&self) -> LinearCat {
        let table = self.table.iter().map(|(&k, &h)| (k, SVec::unit(h))).collect();
        LinearCat::new_unchecked("linearized".into(), self.objects.clone(), self.morphisms.clone(), self.identity.clone(), table)
    }
}

/// Exhaustive unit, totality and associativity check.
pub fn validate_category(c: &FinCat) -> Report {
    let mut r = Report::new("category");
    let ms = &c.morphisms;
    for (fi, f) in ms.iter().enumerate() {
        let (ia, ib) = (c.identity[f.src], c.identity[f.tgt]);
        r.check("left unit", c.compose(ib, fi) == Some(fi), || format!("id ∘ {}", f.id));
        r.check("right unit", c.compose(fi, ia) == Some(fi), || format!("{} ∘ id", f.id));
    }
    for (fi, f) in ms.iter().enumerate() {
        for (gi, g) in ms.iter().enumerate() {
            if g.src != f.tgt {
                continue;
            }
            let gf = c.compose(gi, fi);
            r.check("total", gf.is_some(), || format!("{} ∘ {} missing", g.id, f.id));
            let Some(gf) = gf else { continue };
            for (hi, h) in ms.iter().enumerate() {
                if h.src != g.tgt {
                    continue;
                }
                let lhs = c.compose(hi, gi).and_then(|hg| c.compose(hg, fi));
                let rhs = c.compose(hi, gf);
                r.check("associativity", lhs == rhs, || format!("({} ∘ {}) ∘ {} vs {} ∘ ({} ∘ {})", h.id, g.id, f.id, h.id, g.id, f.id));
            }
        }
    }
    r
}

/// Category with finite-dimensional hom spaces spanned by named basis morphisms.
#[derive(Clone, Debug)]
pub struct LinearCat {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<MorphismDecl>,
    identity: Vec<Mor>,
    table: HashMap<(Mor, Mor), SVec>,
    homs: HashMap<(Obj, Obj), Vec<Mor>>,
    generators: Vec<Mor>,
    index: HashMap<String, Mor>,
}

impl LinearCat {
    /// Builds from a composition table on basis pairs; missing composable
    /// pairs compose to zero.
    pub fn new_unchecked(
        name: String,
        objects: Vec<String>,
        morphisms: Vec<MorphismDecl>,
        identity: Vec<Mor>,
        table: HashMap<(Mor, Mor), SVec>,
    ) -> Self {
        let mut homs: HashMap<(Obj, Obj), Vec<Mor>> = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            homs.entry((m.src, m.tgt)).or_default().push(i);
        }
        let index = morphisms.iter().enumerate().map(|(i, m)| (m.id.clone(), i)).collect();
        let mut c = LinearCat { name, objects, morphisms, identity, table, homs, generators: Vec::new(), index };
        c.generators = c.compute_generators();
        c
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object_name(&self, o: Obj) -> &str {
        &self.objects[o]
    }

    pub fn object_index(&self, name: &str) -> Option<Obj> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphisms(&self) -> &[MorphismDecl] {
        &self.morphisms
    }

    pub fn mor(&self, m: Mor) -> &MorphismDecl {
        &self.morphisms[m]
    }

    pub fn mor_index(&self, id: &str) -> Option<Mor> {
        self.index.get(id).copied()
    }

    pub fn identity(&self, o: Obj) -> Mor {
        self.identity[o]
    }

    pub fn is_identity(&self, m: Mor) -> bool {
        self.identity[self.morphisms[m].src] == m
    }

    /// Basis of `hom(a, b)`.
    pub fn hom(&self, a: Obj, b: Obj) -> &[Mor] {
        self.homs.get(&(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Composite `g ∘ f` as a combination of basis morphisms; `None` if not composable.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<SVec> {
        if self.morphisms[g].src != self.morphisms[f].tgt {
            return None;
        }
        Some(self.table.get(&(g, f)).cloned().unwrap_or_default())
    }

    /// Bilinear extension of [`compose`](Self::compose) to combinations.
    pub fn compose_vec(&self, g: &SVec, f: &SVec) -> SVec {
        let mut out = SVec::new();
        for (gi, a) in g.iter() {
            for (fi, b) in f.iter() {
                if let Some(v) = self.compose(gi, fi) {
                    out.add_scaled(&v, &(a * b));
                }
            }
        }
        out
    }

    /// Non-identity basis morphisms that generate the rest under composition.
    pub fn generators(&self) -> &[Mor] {
        &self.generators
    }

    pub fn non_identities(&self) -> impl Iterator<Item = Mor> + '_ {
        (0..self.morphisms.len()).filter(|&m| !self.is_identity(m))
    }

    /// Whether every composite of basis morphisms is a single basis morphism.
    pub fn is_linearized(&self) -> bool {
        self.table.values().all(|v| v.nnz() == 1 && v.leading().map(|(_, c)| c.is_one()).unwrap_or(false))
            && self.composable_pairs().all(|(g, f)| self.table.contains_key(&(g, f)))
    }

    fn composable_pairs(&self) -> impl Iterator<Item = (Mor, Mor)> + '_ {
        let n = self.morphisms.len();
        (0..n).flat_map(move |f| (0..n).filter(move |&g| self.morphisms[g].src == self.morphisms[f].tgt).map(move |g| (g, f)))
    }

    /// Greedy generating set: a morphism is kept unless it is a scalar
    /// multiple of a composite of earlier generators.
    fn compute_generators(&self) -> Vec<Mor> {
        let mut gens = Vec::new();
        let mut reach: BTreeSet<Mor> = (0..self.objects.len()).map(|o| self.identity[o]).collect();
        for m in self.non_identities().collect::<Vec<_>>() {
            if reach.contains(&m) {
                continue;
            }
            gens.push(m);
            // Close `reach` under post-composition with generators.
            let mut frontier: Vec<Mor> = reach.iter().copied().collect();
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    for (a, b) in [(g, x), (x, g)] {
                        if let Some(v) = self.compose(a, b) {
                            if v.nnz() == 1 {
                                let (h, _) = v.leading().expect("nonzero");
                                if reach.insert(h) {
                                    frontier.push(h);
                                }
                            }
                        }
                    }
                }
            }
        }
        gens
    }

    pub fn mor_name(&self, m: Mor) -> &str {
        &self.morphisms[m].id
    }

    /// Display helper for schemes.
    pub fn scheme_name(&self, s: &Scheme) -> String {
        let ins: Vec<&str> = s.inputs.iter().map(|&c| self.objects[c].as_str()).collect();
        format!("({}; {})", ins.join(" "), self.objects[s.output])
    }
}

/// Exhaustive unit and associativity check on basis triples.
pub fn validate_linear_category(c: &LinearCat) -> Report {
    let mut r = Report::new("linear category");
    let n = c.morphisms.len();
    for f in 0..n {
        let d = &c.morphisms[f];
        r.check("left unit", c.compose(c.identity[d.tgt], f) == Some(SVec::unit(f)), || format!("id ∘ {}", d.id));
        r.check("right unit", c.compose(f, c.identity[d.src]) == Some(SVec::unit(f)), || format!("{} ∘ id", d.id));
    }
    for (g, f) in c.composable_pairs().collect::<Vec<_>>() {
        let gf = c.compose(g, f).expect("composable");
        for h in 0..n {
            if c.morphisms[h].src != c.morphisms[g].tgt {
                continue;
            }
            let hg = c.compose(h, g).expect("composable");
            let lhs = c.compose_vec(&hg, &SVec::unit(f));
            let rhs = c.compose_vec(&SVec::unit(h), &gf);
            r.check("associativity", lhs == rhs, || format!("{} {} {}", c.mor_name(h), c.mor_name(g), c.mor_name(f)));
        }
    }
    r
}

/// The permutation category truncated at `n ≤ bound`.
///
/// Morphism `k:σ` is `σ ∈ Σ_k`; the composite `g ∘ f` is the permutation
/// `f ∘ g` of functions, so that right actions become covariant functors.
pub fn sigma_cat(bound: usize) -> LinearCat {
    let objects: Vec<String> = (0..=bound).map(|n| n.to_string()).collect();
    let mut morphisms = Vec::new();
    let mut identity = Vec::new();
    let mut ids: HashMap<(usize, Perm), Mor> = HashMap::new();
    for n in 0..=bound {
        for p in Perm::all(n) {
            if p.is_identity() {
                identity.push(morphisms.len());
            }
            ids.insert((n, p.clone()), morphisms.len());
            morphisms.push(MorphismDecl { id: sigma_mor_id(n, &p), src: n, tgt: n });
        }
    }
    let mut table = HashMap::new();
    for n in 0..=bound {
        let all = Perm::all(n);
        for g in &all {
            for f in &all {
                table.insert((ids[&(n, g.clone())], ids[&(n, f.clone())]), SVec::unit(ids[&(n, f.compose(g))]));
            }
        }
    }
    LinearCat::new_unchecked(format!("sigma{bound}"), objects, morphisms, identity, table)
}

pub fn sigma_mor_id(n: usize, p: &Perm) -> String {
    format!("{n}:{}", p.to_string_dotted())
}

/// Reads back the permutation of a [`sigma_cat`] morphism.
pub fn sigma_mor_perm(c: &LinearCat, m: Mor) -> Perm {
    let id = c.mor_name(m);
    let (_, p) = id.split_once(':').expect("sigma morphism id");
    Perm::parse_dotted(p).expect("sigma morphism id")
}

/// The chain category on degrees `lo..=hi`: one arrow `d_n: n → n−1`,
/// composites of two arrows are zero.
pub fn build_d_truncated(lo: i64, hi: i64) -> Result<LinearCat, CatError> {
    if lo >= hi {
        return Err(CatError::Invalid(format!("need lo < hi, got {lo}..{hi}")));
    }
    let objects: Vec<String> = (lo..=hi).map(|n| n.to_string()).collect();
    let mut morphisms = Vec::new();
    let mut identity = Vec::new();
    for n in lo..=hi {
        let o = (n - lo) as usize;
        identity.push(morphisms.len());
        morphisms.push(MorphismDecl { id: format!("id_{n}"), src: o, tgt: o });
    }
    let mut table = HashMap::new();
    for n in lo + 1..=hi {
        let o = (n - lo) as usize;
        let d = morphisms.len();
        morphisms.push(MorphismDecl { id: format!("d_{n}"), src: o, tgt: o - 1 });
        table.insert((identity[o - 1], d), SVec::unit(d));
        table.insert((d, identity[o]), SVec::unit(d));
    }
    for o in 0..identity.len() {
        table.insert((identity[o], identity[o]), SVec::unit(identity[o]));
    }
    Ok(LinearCat::new_unchecked(format!("D[{lo},{hi}]"), objects, morphisms, identity, table))
}

/// Degree of an object of [`build_d_truncated`].
pub fn d_degree(c: &LinearCat, o: Obj) -> i64 {
    c.object_name(o).parse().expect("degree object")
}

/// `d_n` in the truncated chain category, if present.
pub fn d_arrow(c: &LinearCat, n: i64) -> Result<Mor, CatError> {
    c.mor_index(&format!("d_{n}")).ok_or_else(|| CatError::OutOfTruncation(format!("d_{n} in {}", c.name())))
}

/// A color scheme `(c_1 ⋯ c_n; c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scheme {
    pub inputs: Vec<Obj>,
    pub output: Obj,
}

impl Ord for Scheme {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.inputs.len(), &self.inputs, self.output).cmp(&(other.inputs.len(), &other.inputs, other.output))
    }
}

impl PartialOrd for Scheme {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Scheme {
    pub fn new(inputs: Vec<Obj>, output: Obj) -> Self {
        Scheme { inputs, output }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// `c_σ = (c_{σ(1)} ⋯ c_{σ(n)}; c)`.
    pub fn permuted(&self, sigma: &Perm) -> Scheme {
        Scheme { inputs: sigma.reindex(&self.inputs), output: self.output }
    }

    /// Scheme of `a ∘_i b` for `a` here and `b` at `t`.
    pub fn insert(&self, i: usize, t: &Scheme) -> Scheme {
        let mut inputs = self.inputs[..i].to_vec();
        inputs.extend_from_slice(&t.inputs);
        inputs.extend_from_slice(&self.inputs[i + 1..]);
        Scheme { inputs, output: self.output }
    }

    pub fn with_input(&self, i: usize, c: Obj) -> Scheme {
        let mut s = self.clone();
        s.inputs[i] = c;
        s
    }

    pub fn with_output(&self, c: Obj) -> Scheme {
        Scheme { inputs: self.inputs.clone(), output: c }
    }

    pub fn remove_input(&self, i: usize) -> Scheme {
        let mut s = self.clone();
        s.inputs.remove(i);
        s
    }

    pub fn insert_input(&self, i: usize, c: Obj) -> Scheme {
        let mut s = self.clone();
        s.inputs.insert(i, c);
        s
    }

    pub fn is_valid(&self, c: &LinearCat) -> bool {
        self.output < c.num_objects() && self.inputs.iter().all(|&x| x < c.num_objects())
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|c| c.to_string()).collect();
        write!(f, "({}; {})", ins.join(" "), self.output)
    }
}

/// All schemes of arity `≤ max_arity` over the objects of `c`.
pub fn all_schemes(c: &LinearCat, max_arity: usize) -> Vec<Scheme> {
    let k = c.num_objects();
    let mut out = Vec::new();
    for n in 0..=max_arity {
        for code in 0..k.pow(n as u32) {
            let mut inputs = vec![0; n];
            let mut x = code;
            for slot in inputs.iter_mut().rev() {
                *slot = x % k;
                x /= k;
            }
            for o in 0..k {
                out.push(Scheme::new(inputs.clone(), o));
            }
        }
    }
    out.sort();
    out
}

/// A morphism of `(𝕊C)^op × C` from `source = (d; x)` to `target = (c; y)`:
/// the permutation σ, input maps `f_i: c_i → d_{σ(i)}` and output map `f: x → y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchemeMorphism {
    pub source: Scheme,
    pub target: Scheme,
    pub perm: Perm,
    pub input_maps: Vec<Mor>,
    pub output_map: Mor,
}

impl SchemeMorphism {
    pub fn identity(c: &LinearCat, s: &Scheme) -> Self {
        SchemeMorphism {
            source: s.clone(),
            target: s.clone(),
            perm: Perm::identity(s.arity()),
            input_maps: s.inputs.iter().map(|&o| c.identity(o)).collect(),
            output_map: c.identity(s.output),
        }
    }

    /// Pure permutation from `s` to `s_σ`.
    pub fn permutation(c: &LinearCat, s: &Scheme, sigma: &Perm) -> Self {
        let t = s.permuted(sigma);
        SchemeMorphism {
            source: s.clone(),
            input_maps: t.inputs.iter().map(|&o| c.identity(o)).collect(),
            output_map: c.identity(s.output),
            target: t,
            perm: sigma.clone(),
        }
    }

    pub fn validate(&self, c: &LinearCat) -> Result<(), CatError> {
        let n = self.source.arity();
        let bad = || CatError::Incompatible(format!("{self:?}"));
        if self.target.arity() != n || self.perm.len() != n || self.input_maps.len() != n {
            return Err(bad());
        }
        for i in 0..n {
            let m = c.mor(self.input_maps[i]);
            if m.src != self.target.inputs[i] || m.tgt != self.source.inputs[self.perm.apply(i)] {
                return Err(bad());
            }
        }
        let m = c.mor(self.output_map);
        if m.src != self.source.output || m.tgt != self.target.output {
            return Err(bad());
        }
        Ok(())
    }
}

/// Composite "first, then second" as a combination of scheme morphisms.
pub fn compose_scheme_morphisms(
    c: &LinearCat,
    second: &SchemeMorphism,
    first: &SchemeMorphism,
) -> Result<Vec<(SchemeMorphism, Scalar)>, CatError> {
    if first.target != second.source {
        return Err(CatError::Incompatible(format!("{} then {}", c.scheme_name(&first.target), c.scheme_name(&second.source))));
    }
    let perm = first.perm.compose(&second.perm);
    // Each slot and the output contribute a combination; expand the product.
    let mut factors: Vec<SVec> = Vec::new();
    for (i, &g) in second.input_maps.iter().enumerate() {
        let f = first.input_maps[second.perm.apply(i)];
        factors.push(c.compose(f, g).expect("composable by construction"));
    }
    factors.push(c.compose(second.output_map, first.output_map).expect("composable by construction"));
    let mut terms: Vec<(Vec<Mor>, Scalar)> = vec![(Vec::new(), Scalar::one())];
    for v in &factors {
        let mut next = Vec::new();
        for (ms, x) in &terms {
            for (m, y) in v.iter() {
                let mut ms2 = ms.clone();
                ms2.push(m);
                next.push((ms2, x * y));
            }
        }
        terms = next;
    }
    Ok(terms
        .into_iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(mut ms, x)| {
            let output_map = ms.pop().expect("output factor");
            (
                SchemeMorphism { source: first.source.clone(), target: second.target.clone(), perm: perm.clone(), input_maps: ms, output_map },
                x,
            )
        })
        .collect())
}

/// All scheme morphisms from `source` to `target` (basis of the hom space).
pub fn scheme_morphisms_between(c: &LinearCat, source: &Scheme, target: &Scheme) -> Vec<SchemeMorphism> {
    let n = source.arity();
    if target.arity() != n {
        return Vec::new();
    }
    let mut out = Vec::new();
    for perm in Perm::all(n) {
        let choices: Vec<&[Mor]> = (0..n).map(|i| c.hom(target.inputs[i], source.inputs[perm.apply(i)])).collect();
        if choices.iter().any(|ch| ch.is_empty()) {
            continue;
        }
        for &out_map in c.hom(source.output, target.output) {
            let mut idx = vec![0usize; n];
            loop {
                out.push(SchemeMorphism {
                    source: source.clone(),
                    target: target.clone(),
                    perm: perm.clone(),
                    input_maps: (0..n).map(|i| choices[i][idx[i]]).collect(),
                    output_map: out_map,
                });
                let mut p = n;
                let mut done = true;
                while p > 0 {
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < choices[p].len() {
                        done = false;
                        break;
                    }
                    idx[p] = 0;
                }
                if done {
                    break;
                }
            }
        }
    }
    out
}

/// The category of schemes of arity `≤ bound` and scheme morphisms over a
/// linearized category. Its objects are named by [`LinearCat::scheme_name`].
pub fn scheme_category(c: &LinearCat, bound: usize) -> Result<(LinearCat, Vec<Scheme>, Vec<SchemeMorphism>), CatError> {
    if !c.is_linearized() {
        return Err(CatError::Invalid("scheme category needs a linearized finite category".into()));
    }
    let schemes = all_schemes(c, bound);
    let obj_of: HashMap<Scheme, Obj> = schemes.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut morphisms = Vec::new();
    let mut decls = Vec::new();
    let mut identity = vec![0; schemes.len()];
    for s in &schemes {
        for t in schemes.iter().filter(|t| t.arity() == s.arity()) {
            for m in scheme_morphisms_between(c, s, t) {
                if m == SchemeMorphism::identity(c, s) {
                    identity[obj_of[s]] = morphisms.len();
                }
                decls.push(MorphismDecl { id: scheme_morphism_id(c, &m), src: obj_of[s], tgt: obj_of[t] });
                morphisms.push(m);
            }
        }
    }
    let mor_of: HashMap<SchemeMorphism, Mor> = morphisms.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut table = HashMap::new();
    for (fi, f) in morphisms.iter().enumerate() {
        for (gi, g) in morphisms.iter().enumerate() {
            if g.source != f.target {
                continue;
            }
            let mut v = SVec::new();
            for (h, x) in compose_scheme_morphisms(c, g, f)? {
                v.add_term(mor_of[&h], &x);
            }
            table.insert((gi, fi), v);
        }
    }
    let objects = schemes.iter().map(|s| c.scheme_name(s)).collect();
    let cat = LinearCat::new_unchecked(format!("Bq({},{bound})", c.name()), objects, decls, identity, table);
    Ok((cat, schemes, morphisms))
}

fn scheme_morphism_id(c: &LinearCat, m: &SchemeMorphism) -> String {
    let ins: Vec<&str> = m.input_maps.iter().map(|&f| c.mor_name(f)).collect();
    format!("{}->{}[{}|{}|{}]", c.scheme_name(&m.source), c.scheme_name(&m.target), m.perm.to_string_dotted(), ins.join(","), c.mor_name(m.output_map))
}

/// Unit scalar used by constructions.
pub fn one() -> Scalar {
    q(1)
}
