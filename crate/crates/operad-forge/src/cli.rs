//! Command-line front end: JSON inputs, constructions, checks and
//! deterministic reports.

use crate::collection::{validate_functor, validate_symmetric, Collection, NsCollection, Slot, SymCollection};
use crate::endalg::{
    associative_presentation, build_dga_operad, check_algebra, check_functor, dga_assignment, end_of_cone, end_operad, two_term_dga, CFunctor, DgaSign, EndError, GradedAlgebra,
    Presentation,
};
use crate::fincat::{build_d_truncated, validate_category, validate_linear_category, CatError, FinCat, FinCatJson, LinearCat, Scheme};
use crate::freeop::{free_ns, symmetrize};
use crate::hyperop::{build, build_h, halgebra_to_markl, markl_to_halgebra, Colors, HyperError, MarklOperad, SchemeColors, SigmaColors};
use crate::linalg::{fmt_scalar, parse_scalar, BasedSpace, LinMap, SVec, Scalar};
use crate::operad::{associative_operad, check_operad, check_unital, is_quadratic_binary, weight_split, COperad, Operad};
use crate::perm::Perm;
use crate::report::Report;
use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

pub const FORMAT: &str = "operad-forge/1";

/// Failures that are the input's fault (exit code 2).
#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format {0:?}, expected {FORMAT:?}")]
    Format(String),
    #[error("unexpected document kind {0:?}")]
    Kind(String),
    #[error(transparent)]
    Cat(#[from] CatError),
    #[error(transparent)]
    End(#[from] EndError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Parser, Debug)]
#[command(name = "operad-forge", version, about = "Category-colored operads with exact rational arithmetic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include basis listings.
    #[arg(long, global = true)]
    pub basis: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a category, collection, operad or functor document.
    Validate { file: PathBuf },
    /// Dimensions of the free operad on a collection.
    Free {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        arity: usize,
        /// Defaults to `arity − 1`.
        #[arg(long)]
        weight: Option<usize>,
        /// Symmetrize the free operad.
        #[arg(long)]
        symmetric: bool,
    },
    /// Dimensions of a presented operad.
    Quotient {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long, default_value_t = 2)]
        weight: usize,
    },
    /// Dimension table of a collection or operad document.
    Dims { file: PathBuf },
    /// Dimension tables of the hyperoperad whose algebras are operads.
    Hyperoperad {
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long, default_value_t = 2)]
        weight: usize,
        /// Colors from the schemes of this category instead of permutations.
        #[arg(long)]
        category: Option<PathBuf>,
    },
    /// Round trip of a symmetric operad through hyperoperad algebras.
    VerifyMarkl {
        file: Option<PathBuf>,
        /// `associative` or `free-binary` instead of a file.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long, default_value_t = 4)]
        arity: usize,
    },
    /// Check an algebra document against its operad.
    CheckAlgebra { file: PathBuf },
    /// The dg associative operad over the chain category and its examples.
    DgaExample {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        degree_lo: i64,
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        degree_hi: i64,
        /// `first-degree` or `second-degree`.
        #[arg(long, default_value = "first-degree")]
        sign: String,
    },
}

/// One command result: titled sections of rows and checked reports.
#[derive(Debug, Default)]
pub struct Output {
    pub command: String,
    pub sections: Vec<(String, Vec<(String, Value)>)>,
    /// Reports with whether they are expected to pass.
    pub reports: Vec<(Report, bool)>,
}

impl Output {
    fn new(command: &str) -> Self {
        Output { command: command.to_string(), ..Default::default() }
    }

    fn section(&mut self, name: &str, rows: Vec<(String, Value)>) {
        self.sections.push((name.to_string(), rows));
    }

    fn report(&mut self, r: Report) {
        self.reports.push((r, true));
    }

    fn expect_failure(&mut self, r: Report) {
        self.reports.push((r, false));
    }

    /// Every report met its expectation.
    pub fn ok(&self) -> bool {
        self.reports.iter().all(|(r, expect)| r.ok() == *expect)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (name, rows) in &self.sections {
            out.push_str(&format!("# {name}\n"));
            for (k, v) in rows {
                let v = match v {
                    Value::String(s) => s.clone(),
                    Value::Object(m) if m.contains_key("basis") => {
                        let labels: Vec<&str> = m["basis"].as_array().map(|a| a.iter().filter_map(Value::as_str).collect()).unwrap_or_default();
                        format!("{} [{}]", m["dim"], labels.join(", "))
                    }
                    other => other.to_string(),
                };
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
        for (r, expect) in &self.reports {
            let status = if r.ok() { format!("ok ({} checks)", r.checks) } else { format!("{} violations in {} checks", r.failures, r.checks) };
            let note = match (*expect, r.ok()) {
                (true, _) => "",
                (false, false) => " (expected)",
                (false, true) => " (expected violations, none found)",
            };
            out.push_str(&format!("{}: {status}{note}\n", r.name));
            for v in &r.violations {
                out.push_str(&format!("  {}: {}\n", v.check, v.witness));
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let sections: Vec<Value> =
            self.sections.iter().map(|(name, rows)| json!({ "name": name, "rows": rows.iter().map(|(k, v)| json!({ "key": k, "value": v })).collect::<Vec<_>>() })).collect();
        let reports: Vec<Value> = self.reports.iter().map(|(r, expect)| json!({ "report": r, "expected_ok": expect })).collect();
        let doc = json!({
            "format": FORMAT,
            "command": self.command,
            "ok": self.ok(),
            "sections": sections,
            "reports": reports,
        });
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }
}

/// Parses arguments, runs, prints, and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = std::env::var("OPERAD_FORGE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(out) => {
            print!("{}", if cli.json { out.render_json() } else { out.render_text() });
            if out.ok() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            if cli.json {
                print!("{}", serde_json::to_string_pretty(&json!({ "format": FORMAT, "error": e.to_string() })).expect("serializable") + "\n");
            } else {
                eprintln!("error: {e}");
            }
            2
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Output, InputError> {
    match &cli.command {
        Command::Validate { file } => cmd_validate(&load(file)?),
        Command::Free { file, arity, weight, symmetric } => cmd_free(&load(file)?, *arity, weight.unwrap_or(arity.saturating_sub(1)), *symmetric, cli.basis),
        Command::Quotient { file, arity, weight } => cmd_quotient(&load(file)?, *arity, *weight, cli.basis),
        Command::Dims { file } => cmd_dims(&load(file)?, cli.basis),
        Command::Hyperoperad { arity, weight, category } => cmd_hyperoperad(*arity, *weight, category.as_deref(), cli.basis),
        Command::VerifyMarkl { file, builtin, arity } => cmd_verify_markl(file.as_deref(), builtin.as_deref(), *arity),
        Command::CheckAlgebra { file } => cmd_check_algebra(&load(file)?),
        Command::DgaExample { degree_lo, degree_hi, sign } => cmd_dga_example(*degree_lo, *degree_hi, sign),
    }
}

fn load(path: &Path) -> Result<Value, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io(path.display().to_string(), e))?;
    let v: Value = serde_json::from_str(&text)?;
    if let Some(f) = v.get("format") {
        if f.as_str() != Some(FORMAT) {
            return Err(InputError::Format(f.to_string()));
        }
    }
    Ok(v)
}

fn kind(doc: &Value) -> Result<&str, InputError> {
    doc.get("kind").and_then(Value::as_str).ok_or_else(|| InputError::Invalid("missing \"kind\"".into()))
}

// ---------------------------------------------------------------------------
// Document schemas.

#[derive(Deserialize)]
#[serde(untagged)]
enum CatSpec {
    Named(String),
    Chain { chain: (i64, i64) },
    Explicit(FinCatJson),
}

fn category(spec: &CatSpec) -> Result<(Arc<LinearCat>, Option<FinCat>), InputError> {
    Ok(match spec {
        CatSpec::Named(n) => {
            let c = match n.as_str() {
                "terminal" => FinCat::terminal(),
                "walking-arrow" => FinCat::walking_arrow(),
                other => return Err(InputError::Invalid(format!("unknown category {other:?}"))),
            };
            (Arc::new(c.linearize()), Some(c))
        }
        CatSpec::Chain { chain: (lo, hi) } => (Arc::new(build_d_truncated(*lo, *hi)?), None),
        CatSpec::Explicit(j) => {
            let c = FinCat::from_json(j)?;
            (Arc::new(c.linearize()), Some(c))
        }
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Text(String),
}

fn scalar(n: &Num) -> Result<Scalar, InputError> {
    match n {
        Num::Int(k) => Ok(Scalar::from_integer((*k).into())),
        Num::Text(s) => parse_scalar(s).map_err(|e| InputError::Invalid(e.to_string())),
    }
}

fn matrix(rows: &[Vec<Num>], shape: (usize, usize), what: &str) -> Result<LinMap, InputError> {
    let bad = || InputError::Invalid(format!("{what}: expected a {}×{} matrix", shape.0, shape.1));
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(bad());
    }
    let data = rows.iter().map(|r| r.iter().map(scalar).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    LinMap::from_rows(shape.0, shape.1, &data).map_err(|_| bad())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeJson {
    inputs: Vec<String>,
    output: String,
}

fn scheme(c: &LinearCat, s: &SchemeJson) -> Result<Scheme, InputError> {
    let obj = |n: &str| c.object_index(n).ok_or_else(|| InputError::Invalid(format!("unknown object {n:?}")));
    Ok(Scheme::new(s.inputs.iter().map(|n| obj(n)).collect::<Result<_, _>>()?, obj(&s.output)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentJson {
    inputs: Vec<String>,
    output: String,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    basis: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SlotJson {
    Input(usize),
    Named(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionJson {
    inputs: Vec<String>,
    output: String,
    slot: SlotJson,
    morphism: String,
    matrix: Vec<Vec<Num>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SigmaJson {
    inputs: Vec<String>,
    output: String,
    perm: Vec<usize>,
    matrix: Vec<Vec<Num>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompJson {
    outer: SchemeJson,
    slot: usize,
    inner: SchemeJson,
    matrix: Vec<Vec<Num>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CollectionDoc {
    #[serde(default)]
    format: Option<String>,
    kind: String,
    category: CatSpec,
    #[serde(default)]
    components: Vec<ComponentJson>,
    #[serde(default)]
    actions: Vec<ActionJson>,
    #[serde(default)]
    sigma: Vec<SigmaJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OperadDoc {
    #[serde(flatten)]
    collection: CollectionBody,
    #[serde(default)]
    symmetric: bool,
    arity_bound: usize,
    #[serde(default)]
    compositions: Vec<CompJson>,
    #[serde(default)]
    units: Option<BTreeMap<String, Vec<Num>>>,
}

#[derive(Deserialize)]
struct CollectionBody {
    #[serde(default)]
    #[allow(dead_code)]
    format: Option<String>,
    #[allow(dead_code)]
    kind: String,
    category: CatSpec,
    #[serde(default)]
    components: Vec<ComponentJson>,
    #[serde(default)]
    actions: Vec<ActionJson>,
    #[serde(default)]
    sigma: Vec<SigmaJson>,
}

impl CollectionDoc {
    fn body(self) -> CollectionBody {
        let _ = (&self.format, &self.kind);
        CollectionBody { format: self.format, kind: self.kind, category: self.category, components: self.components, actions: self.actions, sigma: self.sigma }
    }
}

fn build_collection(b: &CollectionBody) -> Result<(Arc<LinearCat>, Option<FinCat>, SymCollection), InputError> {
    let (cat, fin) = category(&b.category)?;
    let mut ns = NsCollection::new(cat.clone());
    for comp in &b.components {
        let s = scheme(&cat, &SchemeJson { inputs: comp.inputs.clone(), output: comp.output.clone() })?;
        let space = match (&comp.basis, comp.dim) {
            (Some(labels), d) => {
                if d.is_some_and(|d| d != labels.len()) {
                    return Err(InputError::Invalid(format!("component {}: dim and basis disagree", cat.scheme_name(&s))));
                }
                BasedSpace::new(labels.clone()).map_err(|e| InputError::Invalid(e.to_string()))?
            }
            (None, Some(d)) => BasedSpace::standard(d),
            (None, None) => return Err(InputError::Invalid(format!("component {} needs dim or basis", cat.scheme_name(&s)))),
        };
        if ns.space(&s).is_some() {
            return Err(InputError::Invalid(format!("duplicate component {}", cat.scheme_name(&s))));
        }
        ns.add_space(s, space);
    }
    for a in &b.actions {
        let s = scheme(&cat, &SchemeJson { inputs: a.inputs.clone(), output: a.output.clone() })?;
        let slot = match &a.slot {
            SlotJson::Input(k) if *k < s.arity() => Slot::Input(*k),
            SlotJson::Named(n) if n == "output" => Slot::Output,
            _ => return Err(InputError::Invalid(format!("action on {}: slot must be one input index or \"output\"", cat.scheme_name(&s)))),
        };
        let f = cat.mor_index(&a.morphism).ok_or_else(|| InputError::Invalid(format!("unknown morphism {:?}", a.morphism)))?;
        let t = crate::collection::act_target(&cat, &s, slot, f).ok_or_else(|| InputError::Invalid(format!("{} does not act on {}", a.morphism, cat.scheme_name(&s))))?;
        let m = matrix(&a.matrix, (ns.dim(&t), ns.dim(&s)), &format!("action of {} on {}", a.morphism, cat.scheme_name(&s)))?;
        ns.set_action(&s, slot, f, m).map_err(|e| InputError::Invalid(e.to_string()))?;
    }
    let mut sym = SymCollection::new(ns);
    for g in &b.sigma {
        let s = scheme(&cat, &SchemeJson { inputs: g.inputs.clone(), output: g.output.clone() })?;
        let p = Perm::new(g.perm.clone()).filter(|p| p.len() == s.arity()).ok_or_else(|| InputError::Invalid(format!("bad permutation {:?}", g.perm)))?;
        let t = s.permuted(&p);
        let m = matrix(&g.matrix, (sym.dim(&t), sym.dim(&s)), &format!("permutation {:?} on {}", g.perm, cat.scheme_name(&s)))?;
        sym.set_sigma(&s, &p, m).map_err(|e| InputError::Invalid(e.to_string()))?;
    }
    Ok((cat, fin, sym))
}

fn build_operad(doc: &Value) -> Result<(Option<FinCat>, COperad), InputError> {
    let d: OperadDoc = serde_json::from_value(doc.clone())?;
    let (cat, fin, sym) = build_collection(&d.collection)?;
    if !d.symmetric && !d.collection.sigma.is_empty() {
        return Err(InputError::Invalid("permutation actions on a non-symmetric operad".into()));
    }
    let mut p = COperad::new(sym, d.symmetric, d.arity_bound);
    for c in &d.compositions {
        let (s, t) = (scheme(&cat, &c.outer)?, scheme(&cat, &c.inner)?);
        if c.slot >= s.arity() || s.inputs[c.slot] != t.output {
            return Err(InputError::Invalid(format!("{} ∘_{} {} is not composable", cat.scheme_name(&s), c.slot, cat.scheme_name(&t))));
        }
        let r = s.insert(c.slot, &t);
        let m = matrix(&c.matrix, (p.carrier.dim(&r), p.carrier.dim(&s) * p.carrier.dim(&t)), &format!("{} ∘_{} {}", cat.scheme_name(&s), c.slot, cat.scheme_name(&t)))?;
        p.set_comp(&s, c.slot, &t, m).map_err(|e| InputError::Invalid(e.to_string()))?;
    }
    if let Some(units) = &d.units {
        let mut us = BTreeMap::new();
        for (name, v) in units {
            let f = cat.mor_index(name).ok_or_else(|| InputError::Invalid(format!("unknown morphism {name:?}")))?;
            let s = Scheme::new(vec![cat.mor(f).src], cat.mor(f).tgt);
            if v.len() != p.carrier.dim(&s) {
                return Err(InputError::Invalid(format!("unit of {name} has the wrong length")));
            }
            let dense = v.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
            us.insert(f, SVec::from_dense(&dense));
        }
        p = p.with_units(us);
    }
    Ok((fin, p))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctorDoc {
    #[serde(default)]
    #[allow(dead_code)]
    format: Option<String>,
    #[allow(dead_code)]
    kind: String,
    category: CatSpec,
    dims: BTreeMap<String, usize>,
    #[serde(default)]
    maps: BTreeMap<String, Vec<Vec<Num>>>,
}

fn build_functor(doc: &Value) -> Result<CFunctor, InputError> {
    let d: FunctorDoc = serde_json::from_value(doc.clone())?;
    let (cat, _) = category(&d.category)?;
    let mut spaces = vec![BasedSpace::zero(); cat.num_objects()];
    for (name, &dim) in &d.dims {
        let o = cat.object_index(name).ok_or_else(|| InputError::Invalid(format!("unknown object {name:?}")))?;
        spaces[o] = BasedSpace::standard(dim);
    }
    let mut maps = BTreeMap::new();
    for (name, rows) in &d.maps {
        let f = cat.mor_index(name).ok_or_else(|| InputError::Invalid(format!("unknown morphism {name:?}")))?;
        let (s, t) = (cat.mor(f).src, cat.mor(f).tgt);
        maps.insert(f, matrix(rows, (spaces[t].dim(), spaces[s].dim()), name)?);
    }
    Ok(CFunctor::new(cat, spaces, maps)?)
}

// ---------------------------------------------------------------------------
// Expressions in a free operad.

#[derive(Deserialize)]
#[serde(untagged)]
enum Expr {
    Gen { gen: String },
    Compose { compose: Box<ComposeExpr> },
    Permute { permute: Box<PermuteExpr> },
}

#[derive(Deserialize)]
struct ComposeExpr {
    outer: Expr,
    slot: usize,
    inner: Expr,
}

#[derive(Deserialize)]
struct PermuteExpr {
    expr: Expr,
    perm: Vec<usize>,
}

#[derive(Deserialize)]
struct TermJson {
    coeff: Num,
    expr: Expr,
}

fn eval_expr(p: &Presentation, e: &Expr) -> Result<(Scheme, SVec), InputError> {
    let free = p.free_operad();
    match e {
        Expr::Gen { gen } => {
            for (s, b) in p.generators.spaces() {
                if let Some(a) = b.index_of(gen) {
                    return Ok((s.clone(), p.generator(s, a)));
                }
            }
            Err(InputError::Invalid(format!("unknown generator {gen:?}")))
        }
        Expr::Compose { compose } => {
            let (s, u) = eval_expr(p, &compose.outer)?;
            let (t, v) = eval_expr(p, &compose.inner)?;
            let i = compose.slot;
            if i >= s.arity() || s.inputs[i] != t.output {
                return Err(InputError::Invalid(format!("composite at slot {i} does not match colors")));
            }
            let w = free.compose_vec(&s, i, &t, &u, &v).ok_or_else(|| InputError::Invalid("composite exceeds the bounds".into()))?;
            Ok((s.insert(i, &t), w))
        }
        Expr::Permute { permute } => {
            if !free.symmetric() {
                return Err(InputError::Invalid("permutations need \"symmetric\": true".into()));
            }
            let (s, v) = eval_expr(p, &permute.expr)?;
            let g = Perm::new(permute.perm.clone()).filter(|g| g.len() == s.arity()).ok_or_else(|| InputError::Invalid(format!("bad permutation {:?}", permute.perm)))?;
            Ok((s.permuted(&g), crate::collection::sigma_vec(free.carrier(), &s, &g, &v)))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationDoc {
    #[serde(default)]
    #[allow(dead_code)]
    format: Option<String>,
    #[allow(dead_code)]
    kind: String,
    category: CatSpec,
    #[serde(default)]
    components: Vec<ComponentJson>,
    #[serde(default)]
    actions: Vec<ActionJson>,
    #[serde(default)]
    symmetric: bool,
    #[serde(default)]
    relations: Vec<Vec<TermJson>>,
}

fn build_presentation(doc: &Value, arity: usize, weight: usize) -> Result<Presentation, InputError> {
    let d: PresentationDoc = serde_json::from_value(doc.clone())?;
    let body = CollectionBody { format: None, kind: String::new(), category: d.category, components: d.components, actions: d.actions, sigma: Vec::new() };
    let (_, _, sym) = build_collection(&body)?;
    let mut p = Presentation::new(sym.underlying, d.symmetric, arity, weight);
    for (k, terms) in d.relations.iter().enumerate() {
        let mut acc: Option<(Scheme, SVec)> = None;
        for t in terms {
            let (s, v) = eval_expr(&p, &t.expr)?;
            let c = scalar(&t.coeff)?;
            match &mut acc {
                None => acc = Some((s, v.scaled(&c))),
                Some((s0, w)) if *s0 == s => w.add_scaled(&v, &c),
                Some(_) => return Err(InputError::Invalid(format!("relation {k} mixes colors"))),
            }
        }
        if let Some((s, v)) = acc {
            p.relations.push((s, v));
        }
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Tables.

fn scheme_label(c: &LinearCat, s: &Scheme) -> String {
    let ins: Vec<&str> = s.inputs.iter().map(|&o| c.object_name(o)).collect();
    format!("({};{})", ins.join(","), c.object_name(s.output))
}

/// Rows sorted by arity, then scheme.
fn dim_rows(x: &dyn Collection, basis: bool) -> Vec<(String, Value)> {
    let c = x.cat();
    let mut schemes: Vec<Scheme> = x.schemes().into_iter().filter(|s| x.dim(s) > 0).collect();
    schemes.sort_by(|a, b| (a.arity(), a).cmp(&(b.arity(), b)));
    schemes
        .iter()
        .map(|s| {
            let d = x.dim(s);
            let v = if basis { json!({ "dim": d, "basis": (0..d).map(|a| x.label(s, a)).collect::<Vec<_>>() }) } else { json!(d) };
            (scheme_label(c, s), v)
        })
        .collect()
}

fn arity_rows(x: &dyn Collection) -> Vec<(String, Value)> {
    let mut by: BTreeMap<usize, usize> = BTreeMap::new();
    for s in x.schemes() {
        let d = x.dim(&s);
        if d > 0 {
            *by.entry(s.arity()).or_default() += d;
        }
    }
    by.into_iter().map(|(n, d)| (n.to_string(), json!(d))).collect()
}

fn weight_rows(p: &dyn Operad) -> Vec<(String, Value)> {
    let x = p.carrier();
    let c = x.cat();
    let mut schemes = x.schemes();
    schemes.sort_by(|a, b| (a.arity(), a).cmp(&(b.arity(), b)));
    let mut rows = Vec::new();
    for s in &schemes {
        for (w, basis) in weight_split(p, s) {
            rows.push((format!("{} w{w}", scheme_label(c, s)), json!(basis.len())));
        }
    }
    rows
}

// ---------------------------------------------------------------------------
// Commands.

fn cmd_validate(doc: &Value) -> Result<Output, InputError> {
    let mut out = Output::new("validate");
    let k = kind(doc)?;
    out.section("document", vec![("kind".into(), json!(k))]);
    match k {
        "category" => {
            let j: FinCatJson = serde_json::from_value(strip(doc, &["format", "kind"]))?;
            let c = FinCat::from_json(&j)?;
            let r = validate_category(&c);
            let ok = r.ok();
            out.report(r);
            if ok {
                out.report(validate_linear_category(&c.linearize()));
            }
        }
        "collection" => {
            let d: CollectionDoc = serde_json::from_value(doc.clone())?;
            let (_, fin, sym) = build_collection(&d.body())?;
            report_category(&mut out, fin.as_ref());
            out.report(validate_functor(&sym));
            if !sym.sigma_maps().is_empty() {
                out.report(validate_symmetric(&sym));
            }
        }
        "operad" => {
            let (fin, p) = build_operad(doc)?;
            report_category(&mut out, fin.as_ref());
            out.report(validate_functor(&p.carrier));
            out.report(check_operad(&p));
            if p.is_unital() {
                out.report(check_unital(&p));
            }
        }
        "functor" => out.report(check_functor(&build_functor(doc)?)),
        other => return Err(InputError::Kind(other.to_string())),
    }
    Ok(out)
}

fn strip(doc: &Value, keys: &[&str]) -> Value {
    let mut v = doc.clone();
    if let Some(m) = v.as_object_mut() {
        for k in keys {
            m.remove(*k);
        }
    }
    v
}

fn report_category(out: &mut Output, fin: Option<&FinCat>) {
    if let Some(c) = fin {
        out.report(validate_category(c));
    }
}

fn collection_of(doc: &Value) -> Result<SymCollection, InputError> {
    match kind(doc)? {
        "collection" => {
            let d: CollectionDoc = serde_json::from_value(doc.clone())?;
            Ok(build_collection(&d.body())?.2)
        }
        "operad" => Ok(build_operad(doc)?.1.carrier),
        other => Err(InputError::Kind(other.to_string())),
    }
}

fn cmd_free(doc: &Value, arity: usize, weight: usize, symmetric: bool, basis: bool) -> Result<Output, InputError> {
    let x = collection_of(doc)?.underlying;
    let f = free_ns(&x, arity, weight);
    let mut out = Output::new("free");
    if symmetric {
        let s = symmetrize(f, x.cat_arc().clone());
        out.section("dims by arity", arity_rows(s.carrier()));
        out.section("dims", dim_rows(s.carrier(), basis));
    } else {
        out.section("dims by arity", arity_rows(&f.carrier));
        out.section("dims", dim_rows(&f.carrier, basis));
    }
    Ok(out)
}

fn cmd_quotient(doc: &Value, arity: usize, weight: usize, basis: bool) -> Result<Output, InputError> {
    if kind(doc)? != "presentation" {
        return Err(InputError::Kind(kind(doc)?.to_string()));
    }
    let p = build_presentation(doc, arity, weight)?;
    let q = p.quotient()?;
    let mut out = Output::new("quotient");
    out.section(
        "presentation",
        vec![
            ("relations".into(), json!(p.relations.len())),
            ("quadratic binary".into(), json!(is_quadratic_binary(&p.generators, p.free_operad(), &p.relations))),
        ],
    );
    out.section("free dims", dim_rows(p.free_operad().carrier(), false));
    out.section("quotient dims by arity", arity_rows(&q.operad.carrier));
    out.section("quotient dims", dim_rows(&q.operad.carrier, basis));
    out.section("quotient dims by weight", weight_rows(&q.operad));
    out.report(q.well_defined);
    Ok(out)
}

fn cmd_dims(doc: &Value, basis: bool) -> Result<Output, InputError> {
    let x = collection_of(doc)?;
    let mut out = Output::new("dims");
    out.section("dims", dim_rows(&x, basis));
    Ok(out)
}

fn cmd_hyperoperad(arity: usize, weight: usize, category_file: Option<&Path>, basis: bool) -> Result<Output, InputError> {
    if arity < 1 || weight < 1 {
        return Err(InputError::Invalid("needs --arity ≥ 1 and --weight ≥ 1".into()));
    }
    let colors = match category_file {
        None => Colors::Sigma(SigmaColors::new(arity)),
        Some(path) => {
            let doc = load(path)?;
            let spec: CatSpec = serde_json::from_value(strip(&doc, &["format", "kind"]))?;
            let (cat, fin) = category(&spec)?;
            if let Some(c) = &fin {
                let r = validate_category(c);
                if !r.ok() {
                    return Err(InputError::Invalid(format!("invalid category: {r}")));
                }
            }
            Colors::Schemes(SchemeColors::new(cat, arity)?)
        }
    };
    let h = build(Arc::new(colors), weight)?;
    let free = h.presentation.free_operad();
    let mut out = Output::new("hyperoperad");
    let k = h.colors().cat();
    let seeds: Vec<(String, Value)> = h.x.seeds().iter().map(|s| (h.colors().seed_label(s), json!(scheme_label(k, &Scheme::new(vec![s.s, s.t], s.u))))).collect();
    out.section(
        "summary",
        vec![
            ("colors".into(), json!(k.num_objects())),
            ("seeds".into(), json!(seeds.len())),
            ("equated pairs".into(), json!(h.eq.pairs.len())),
            ("associators".into(), json!(h.associators.len())),
            ("truncated associators".into(), json!(h.truncated)),
            ("quadratic binary".into(), json!(is_quadratic_binary(&h.presentation.generators, free, &h.presentation.relations))),
        ],
    );
    if basis {
        out.section("seeds", seeds);
    }
    out.section("free generators", dim_rows(&h.x, false));
    out.section("generators", dim_rows(&h.eq.q, basis));
    let mut weight_two = Vec::new();
    let mut rank_rows = Vec::new();
    let mut by_scheme: BTreeMap<Scheme, Vec<SVec>> = BTreeMap::new();
    for a in &h.associators {
        by_scheme.entry(a.scheme.clone()).or_default().push(a.vector.clone());
    }
    let mut schemes = free.carrier().schemes();
    schemes.sort_by(|a, b| (a.arity(), a).cmp(&(b.arity(), b)));
    for s in &schemes {
        if let Some(w2) = weight_split(free, s).get(&2) {
            weight_two.push((scheme_label(k, s), json!(w2.len())));
        }
    }
    for (s, vs) in &by_scheme {
        let mut e = crate::linalg::Echelon::new(free.carrier().dim(s));
        for v in vs {
            e.insert(v.clone());
        }
        rank_rows.push((scheme_label(k, s), json!(e.rank())));
    }
    rank_rows.sort_by(|a, b| (a.0.matches(',').count(), &a.0).cmp(&(b.0.matches(',').count(), &b.0)));
    out.section("free weight 2", weight_two);
    out.section("associator rank", rank_rows);
    let q = h.quotient()?;
    out.section("hyperoperad dims by weight", weight_rows(&q.operad));
    out.report(h.eq.well_defined.clone());
    out.report(q.well_defined);
    Ok(out)
}

fn markl_from(file: Option<&Path>, builtin: Option<&str>, arity: usize) -> Result<MarklOperad, InputError> {
    let term = Arc::new(FinCat::terminal().linearize());
    match (file, builtin) {
        (Some(path), None) => {
            let (_, p) = build_operad(&load(path)?)?;
            if p.cat_arc().num_objects() != 1 {
                return Err(InputError::Invalid("needs a single-colored operad".into()));
            }
            Ok(MarklOperad::from_operad(&p, arity)?)
        }
        (None, Some("associative")) => Ok(MarklOperad::from_operad(&associative_operad(arity, false), arity)?),
        (None, Some("free-binary")) => {
            let mut x = NsCollection::new(term.clone());
            x.add_space(Scheme::new(vec![0, 0], 0), BasedSpace::new(vec!["μ".into()]).expect("label"));
            let sym = symmetrize(free_ns(&x, arity, arity.saturating_sub(1).max(1)), term);
            Ok(MarklOperad::from_operad(&sym, arity)?)
        }
        (None, Some(other)) => Err(InputError::Invalid(format!("unknown builtin {other:?}"))),
        _ => Err(InputError::Invalid("give exactly one of a file or --builtin".into())),
    }
}

fn cmd_verify_markl(file: Option<&Path>, builtin: Option<&str>, arity: usize) -> Result<Output, InputError> {
    if arity < 2 {
        return Err(InputError::Invalid("needs --arity ≥ 2".into()));
    }
    let m = markl_from(file, builtin, arity)?;
    let term = Arc::new(FinCat::terminal().linearize());
    let mut out = Output::new("verify-markl");
    out.section("operad dims", m.dims.iter().enumerate().map(|(n, d)| (n.to_string(), json!(d))).collect());
    let axioms = m.check(term)?;
    let valid = axioms.ok();
    out.report(axioms);
    let h = build_h(arity, 2)?;
    let (end, images) = markl_to_halgebra(&h, &m)?;
    let alg = h.check_algebra(&end, &images)?;
    let back = halgebra_to_markl(&h, &end, &images)?;
    let round_trip = back == m;
    out.section("round trip", vec![("identity".into(), json!(round_trip))]);
    if valid {
        out.report(alg);
    } else {
        out.expect_failure(alg);
    }
    let mut rt = Report::new("round trip");
    rt.check("identity on data", round_trip, || "composition or permutation data changed".into());
    out.report(rt);
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDoc {
    #[serde(default)]
    #[allow(dead_code)]
    format: Option<String>,
    #[allow(dead_code)]
    kind: String,
    operad: String,
    #[serde(default)]
    sign: Option<String>,
    #[serde(default)]
    degree_lo: Option<i64>,
    #[serde(default)]
    degree_hi: Option<i64>,
    dims: BTreeMap<String, usize>,
    #[serde(default)]
    d: BTreeMap<String, Vec<Vec<Num>>>,
    mult: BTreeMap<String, Vec<Vec<Num>>>,
}

fn parse_sign(s: &str) -> Result<DgaSign, InputError> {
    match s {
        "first-degree" => Ok(DgaSign::FirstDegree),
        "second-degree" => Ok(DgaSign::SecondDegree),
        other => Err(InputError::Invalid(format!("unknown sign {other:?}"))),
    }
}

fn degree(s: &str) -> Result<i64, InputError> {
    s.trim().parse().map_err(|_| InputError::Invalid(format!("bad degree {s:?}")))
}

fn cmd_check_algebra(doc: &Value) -> Result<Output, InputError> {
    if kind(doc)? != "algebra" {
        return Err(InputError::Kind(kind(doc)?.to_string()));
    }
    let d: AlgebraDoc = serde_json::from_value(doc.clone())?;
    let mut out = Output::new("check-algebra");
    match d.operad.as_str() {
        "associative" => {
            let n = *d.dims.get("*").ok_or_else(|| InputError::Invalid("associative algebras give dims {\"*\": n}".into()))?;
            let rows = d.mult.get("*").ok_or_else(|| InputError::Invalid("associative algebras give mult {\"*\": matrix}".into()))?;
            let table = matrix(rows, (n, n * n), "multiplication")?;
            let p = associative_presentation();
            let end = end_operad(CFunctor::new(p.generators.cat_arc().clone(), vec![BasedSpace::standard(n)], BTreeMap::new())?, 3);
            let b = Scheme::new(vec![0, 0], 0);
            let images = BTreeMap::from([((b.clone(), 0), end.element(&b, &table)?)]);
            out.report(check_algebra(&p, &end, &images)?);
        }
        "dga" => {
            let sign = parse_sign(d.sign.as_deref().unwrap_or("first-degree"))?;
            let mut dims = BTreeMap::new();
            for (k, &v) in &d.dims {
                dims.insert(degree(k)?, v);
            }
            let lo = d.degree_lo.unwrap_or_else(|| dims.keys().next().copied().unwrap_or(0));
            let hi = d.degree_hi.unwrap_or_else(|| dims.keys().last().copied().unwrap_or(0) + 1);
            let dim = |n: i64| dims.get(&n).copied().unwrap_or(0);
            let mut diff = BTreeMap::new();
            for (k, rows) in &d.d {
                let n = degree(k)?;
                diff.insert(n, matrix(rows, (dim(n - 1), dim(n)), &format!("d in degree {n}"))?);
            }
            let mut mult = BTreeMap::new();
            for (k, rows) in &d.mult {
                let (a, b) = k.split_once(',').ok_or_else(|| InputError::Invalid(format!("product key {k:?} is not \"m,n\"")))?;
                let (m, n) = (degree(a)?, degree(b)?);
                mult.insert((m, n), matrix(rows, (dim(m + n), dim(m) * dim(n)), &format!("product in degrees {m},{n}"))?);
            }
            let alg = GradedAlgebra { dims, d: diff, mult };
            let dga = build_dga_operad(lo, hi, 2, sign)?;
            let (end, images) = dga_assignment(&dga, &alg)?;
            out.section("operad", vec![("degrees".into(), json!(format!("{lo}..{hi}"))), ("sign".into(), json!(format!("{sign:?}")))]);
            out.report(check_algebra(&dga.presentation, &end, &images)?);
        }
        other => return Err(InputError::Invalid(format!("unknown operad {other:?}"))),
    }
    Ok(out)
}

fn cmd_dga_example(lo: i64, hi: i64, sign: &str) -> Result<Output, InputError> {
    let sign = parse_sign(sign)?;
    let dga = build_dga_operad(lo, hi, 2, sign)?;
    let x = &dga.presentation.generators;
    let c = x.cat();
    let mut out = Output::new("dga-example");
    out.section("generators", dim_rows(x, true));
    let mut actions = Vec::new();
    for ((s, slot, f), m) in x.actions() {
        let t = crate::collection::act_target(c, s, *slot, *f).expect("acts");
        for a in 0..m.cols() {
            let col = m.column(a);
            let terms: Vec<String> = col.iter().map(|(b, v)| format!("{} {}", fmt_scalar(v), x.label(&t, b))).collect();
            let place = match slot {
                Slot::Input(i) => format!("input {i}"),
                Slot::Output => "output".to_string(),
            };
            actions.push((format!("{} {place} by {}: {}", scheme_label(c, s), c.mor_name(*f), x.label(s, a)), json!(terms.join(" + "))));
        }
    }
    out.section("actions", actions);
    out.section("quotient dims", dim_rows(&dga.quotient.operad.carrier, false));
    if lo <= 0 && hi >= 2 {
        let (end, images) = dga_assignment(&dga, &two_term_dga(false))?;
        let mut r = check_algebra(&dga.presentation, &end, &images)?;
        r.name = "two-term example".into();
        if sign == DgaSign::FirstDegree {
            out.report(r);
        } else {
            out.expect_failure(r);
        }
        let (end, images) = dga_assignment(&dga, &two_term_dga(true))?;
        let mut r = check_algebra(&dga.presentation, &end, &images)?;
        r.name = "broken two-term example".into();
        out.expect_failure(r);
    }
    if lo <= -1 && hi >= 1 {
        let (end, images) = dga_assignment(&dga, &end_of_cone())?;
        let mut r = check_algebra(&dga.presentation, &end, &images)?;
        r.name = "endomorphisms of the cone".into();
        out.expect_failure(r);
    }
    Ok(out)
}
