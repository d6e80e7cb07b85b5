//! Exact linear algebra over the rationals.
//!
//! Vectors are sparse maps from basis index to a nonzero rational. Linear maps
//! store one sparse column per source basis element. Quotients and kernels are
//! computed by incremental row reduction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("cannot parse scalar `{0}`")]
    BadScalar(String),
}

pub fn q(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a scalar as an exact `p/q` string.
pub fn fmt_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or an integer.
pub fn parse_scalar(s: &str) -> Result<Scalar, LinalgError> {
    let bad = || LinalgError::BadScalar(s.to_string());
    let t = s.trim();
    if let Some((a, b)) = t.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| bad())?;
        let d: BigInt = b.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = t.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// Sparse vector: basis index to nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SVec(BTreeMap<usize, Scalar>);

impl SVec {
    pub fn new() -> Self {
        SVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut m = BTreeMap::new();
        m.insert(i, Scalar::one());
        SVec(m)
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Scalar)>>(pairs: I) -> Self {
        let mut v = SVec::new();
        for (i, c) in pairs {
            v.add_term(i, &c);
        }
        v
    }

    pub fn from_ints(pairs: &[(usize, i64)]) -> Self {
        SVec::from_pairs(pairs.iter().map(|&(i, c)| (i, q(c))))
    }

    pub fn from_dense(xs: &[Scalar]) -> Self {
        SVec::from_pairs(xs.iter().cloned().enumerate())
    }

    pub fn to_dense(&self, n: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); n];
        for (&i, c) in &self.0 {
            out[i] = c.clone();
        }
        out
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.0.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeff(&self, i: usize) -> Option<&Scalar> {
        self.0.get(&i)
    }

    pub fn add_term(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&i) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.0.remove(&i);
                }
            }
            None => {
                self.0.insert(i, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (&i, x) in &other.0 {
            self.add_term(i, &(x * c));
        }
    }

    pub fn add(&mut self, other: &SVec) {
        self.add_scaled(other, &Scalar::one());
    }

    pub fn sub(&mut self, other: &SVec) {
        self.add_scaled(other, &-Scalar::one());
    }

    pub fn scaled(&self, c: &Scalar) -> SVec {
        if c.is_zero() {
            return SVec::new();
        }
        SVec(self.0.iter().map(|(&i, x)| (i, x * c)).collect())
    }

    pub fn neg(&self) -> SVec {
        self.scaled(&-Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.0.iter().map(|(&i, c)| (i, c))
    }

    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.0.iter().next().map(|(&i, c)| (i, c))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    /// Reindexes through `f`, summing collisions.
    pub fn map_indices<F: Fn(usize) -> usize>(&self, f: F) -> SVec {
        let mut out = SVec::new();
        for (&i, c) in &self.0 {
            out.add_term(f(i), c);
        }
        out
    }

    pub fn check_dim(&self, dim: usize) -> Result<(), LinalgError> {
        match self.max_index() {
            Some(i) if i >= dim => Err(LinalgError::IndexOutOfRange { index: i, dim }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(i, c)| format!("{}*e{}", fmt_scalar(c), i))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Finite-dimensional space with labeled basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedSpace {
    labels: Arc<Vec<String>>,
}

impl BasedSpace {
    pub fn new(labels: Vec<String>) -> Result<Self, LinalgError> {
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(LinalgError::DuplicateLabel(l.clone()));
            }
        }
        Ok(BasedSpace { labels: Arc::new(labels) })
    }

    /// Space with labels `e0..e{n-1}`.
    pub fn standard(n: usize) -> Self {
        BasedSpace { labels: Arc::new((0..n).map(|i| format!("e{i}")).collect()) }
    }

    pub fn zero() -> Self {
        BasedSpace { labels: Arc::new(Vec::new()) }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Tensor product with lexicographic basis `(a,b)`.
    pub fn tensor(&self, other: &BasedSpace) -> BasedSpace {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in self.labels.iter() {
            for b in other.labels.iter() {
                labels.push(format!("({a},{b})"));
            }
        }
        BasedSpace { labels: Arc::new(labels) }
    }

    /// Direct sum with summand-tagged labels `k:label`.
    pub fn direct_sum(parts: &[BasedSpace]) -> BasedSpace {
        let mut labels = Vec::new();
        for (k, p) in parts.iter().enumerate() {
            for l in p.labels.iter() {
                labels.push(format!("{k}:{l}"));
            }
        }
        BasedSpace { labels: Arc::new(labels) }
    }
}

/// Linear map stored by sparse columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    rows: usize,
    cols: Vec<SVec>,
}

impl LinMap {
    pub fn zero(rows: usize, cols: usize) -> Self {
        LinMap { rows, cols: vec![SVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        LinMap { rows: n, cols: (0..n).map(SVec::unit).collect() }
    }

    pub fn from_columns(rows: usize, cols: Vec<SVec>) -> Result<Self, LinalgError> {
        for c in &cols {
            c.check_dim(rows)?;
        }
        Ok(LinMap { rows, cols })
    }

    /// Builds from a dense row-major matrix.
    pub fn from_rows(rows: usize, cols: usize, data: &[Vec<Scalar>]) -> Result<Self, LinalgError> {
        if data.len() != rows {
            return Err(LinalgError::DimensionMismatch { expected: rows, found: data.len() });
        }
        let mut out = LinMap::zero(rows, cols);
        for (r, row) in data.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, found: row.len() });
            }
            for (c, x) in row.iter().enumerate() {
                out.cols[c].add_term(r, x);
            }
        }
        Ok(out)
    }

    pub fn from_int_rows(data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = data.first().map(|r| r.len()).unwrap_or(0);
        let dense: Vec<Vec<Scalar>> = data.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        LinMap::from_rows(rows, cols, &dense).expect("rectangular")
    }

    /// Permutation-like map sending basis `j` to basis `f(j)`.
    pub fn from_index_map<F: Fn(usize) -> usize>(rows: usize, cols: usize, f: F) -> Self {
        LinMap { rows, cols: (0..cols).map(|j| SVec::unit(f(j))).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &SVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SVec] {
        &self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> Scalar {
        self.cols[c].get(r)
    }

    pub fn set_column(&mut self, j: usize, v: SVec) {
        self.cols[j] = v;
    }

    pub fn apply(&self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (j, c) in v.iter() {
            out.add_scaled(&self.cols[j], c);
        }
        out
    }

    pub fn try_apply(&self, v: &SVec) -> Result<SVec, LinalgError> {
        v.check_dim(self.cols())?;
        Ok(self.apply(v))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> Result<LinMap, LinalgError> {
        if other.rows != self.cols() {
            return Err(LinalgError::DimensionMismatch { expected: self.cols(), found: other.rows });
        }
        Ok(LinMap { rows: self.rows, cols: other.cols.iter().map(|c| self.apply(c)).collect() })
    }

    /// Kronecker product; basis `(i,j)` has index `i * dim2 + j`.
    pub fn tensor(&self, other: &LinMap) -> LinMap {
        let (r2, c2) = (other.rows, other.cols());
        let mut cols = Vec::with_capacity(self.cols() * c2);
        for a in &self.cols {
            for b in &other.cols {
                let mut v = SVec::new();
                for (i, x) in a.iter() {
                    for (j, y) in b.iter() {
                        v.add_term(i * r2 + j, &(x * y));
                    }
                }
                cols.push(v);
            }
        }
        LinMap { rows: self.rows * r2, cols }
    }

    pub fn direct_sum(parts: &[LinMap]) -> LinMap {
        let mut rows = 0;
        let mut cols = Vec::new();
        for p in parts {
            for c in &p.cols {
                cols.push(c.map_indices(|i| i + rows));
            }
            rows += p.rows;
        }
        LinMap { rows, cols }
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap, LinalgError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.cols.iter_mut().zip(&other.cols) {
            a.add(b);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LinMap) -> Result<LinMap, LinalgError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.cols.iter_mut().zip(&other.cols) {
            a.sub(b);
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &Scalar) -> LinMap {
        LinMap { rows: self.rows, cols: self.cols.iter().map(|v| v.scaled(c)).collect() }
    }

    fn same_shape(&self, other: &LinMap) -> Result<(), LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        if self.cols() != other.cols() {
            return Err(LinalgError::DimensionMismatch { expected: self.cols(), found: other.cols() });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn transpose(&self) -> LinMap {
        let mut out = LinMap::zero(self.cols(), self.rows);
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                out.cols[i].add_term(j, x);
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols()]; self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c.iter() {
                out[i][j] = x.clone();
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.rows);
        for c in &self.cols {
            e.insert(c.clone());
        }
        e.rank()
    }

    pub fn is_iso(&self) -> bool {
        self.rows == self.cols() && self.rank() == self.rows
    }

    /// Inverse of a square invertible map.
    pub fn inverse(&self) -> Option<LinMap> {
        if !self.is_iso() {
            return None;
        }
        let n = self.rows;
        // Reduce [A | I] to [I | A^-1].
        let t = self.transpose();
        let mut e = Echelon::new(2 * n);
        for (i, r) in t.cols.iter().enumerate() {
            let mut v = r.clone();
            v.add_term(n + i, &Scalar::one());
            e.insert(v);
        }
        let mut inv = LinMap::zero(n, n);
        for (p, row) in e.rref() {
            for (c, x) in row.iter() {
                if c >= n {
                    inv.cols[c - n].add_term(p, x);
                }
            }
        }
        Some(inv)
    }
}

/// Incrementally maintained row echelon form.
///
/// Each stored row has leading coefficient one at its pivot and is reduced
/// against earlier pivots on insertion.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    dim: usize,
    rows: BTreeMap<usize, SVec>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.rows.contains_key(&c)
    }

    pub fn reduce(&self, v: &SVec) -> SVec {
        let mut v = v.clone();
        let mut cursor = 0usize;
        loop {
            let next = v.0.range(cursor..).find(|(k, _)| self.rows.contains_key(k)).map(|(&k, c)| (k, c.clone()));
            match next {
                None => return v,
                Some((k, c)) => {
                    v.add_scaled(&self.rows[&k], &-c);
                    cursor = k + 1;
                }
            }
        }
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts a vector; returns whether the rank grew.
    pub fn insert(&mut self, v: SVec) -> bool {
        self.insert_reduced(v).is_some()
    }

    /// Inserts and returns the normalized new row when the rank grew.
    pub fn insert_reduced(&mut self, v: SVec) -> Option<SVec> {
        let r = self.reduce(&v);
        let (p, c) = match r.leading() {
            None => return None,
            Some((p, c)) => (p, c.clone()),
        };
        let row = r.scaled(&c.recip());
        self.rows.insert(p, row.clone());
        Some(row)
    }

    /// Fully reduced rows keyed by pivot.
    pub fn rref(&self) -> BTreeMap<usize, SVec> {
        let mut out: BTreeMap<usize, SVec> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut r = row.clone();
            for (c, x) in row.iter() {
                if c != p {
                    if let Some(other) = out.get(&c) {
                        r.add_scaled(other, &-x);
                    }
                }
            }
            out.insert(p, r);
        }
        out
    }
}

/// Quotient of a coordinate space by a span of relations.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    ambient_dim: usize,
    basis: Vec<usize>,
    index_of: Vec<Option<usize>>,
    reduced: BTreeMap<usize, SVec>,
    relations: Vec<SVec>,
}

impl QuotientSpace {
    pub fn from_echelon(ech: &Echelon, relations: Vec<SVec>) -> Self {
        let n = ech.dim();
        let mut basis = Vec::new();
        let mut index_of = vec![None; n];
        for (c, slot) in index_of.iter_mut().enumerate() {
            if !ech.is_pivot(c) {
                *slot = Some(basis.len());
                basis.push(c);
            }
        }
        let mut reduced: BTreeMap<usize, SVec> = BTreeMap::new();
        for (&p, row) in ech.rows.iter().rev() {
            let mut img = SVec::new();
            for (c, x) in row.iter() {
                if c == p {
                    continue;
                }
                let neg = -x;
                match index_of[c] {
                    Some(qi) => img.add_term(qi, &neg),
                    None => img.add_scaled(&reduced[&c], &neg),
                }
            }
            reduced.insert(p, img);
        }
        QuotientSpace { ambient_dim: n, basis, index_of, reduced, relations }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Ambient indices of the quotient basis.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn relations(&self) -> &[SVec] {
        &self.relations
    }

    pub fn project_basis(&self, j: usize) -> SVec {
        match self.index_of[j] {
            Some(qi) => SVec::unit(qi),
            None => self.reduced[&j].clone(),
        }
    }

    pub fn project(&self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (j, c) in v.iter() {
            match self.index_of[j] {
                Some(qi) => out.add_term(qi, c),
                None => out.add_scaled(&self.reduced[&j], c),
            }
        }
        out
    }

    pub fn section_basis(&self, qi: usize) -> SVec {
        SVec::unit(self.basis[qi])
    }

    pub fn section(&self, v: &SVec) -> SVec {
        v.map_indices(|qi| self.basis[qi])
    }

    pub fn projection(&self) -> LinMap {
        LinMap { rows: self.dim(), cols: (0..self.ambient_dim).map(|j| self.project_basis(j)).collect() }
    }

    pub fn section_map(&self) -> LinMap {
        LinMap { rows: self.ambient_dim, cols: (0..self.dim()).map(|qi| self.section_basis(qi)).collect() }
    }

    /// Labels of the quotient basis taken from the ambient labels.
    pub fn labels(&self, ambient: &BasedSpace) -> BasedSpace {
        BasedSpace { labels: Arc::new(self.basis.iter().map(|&j| ambient.label(j).to_string()).collect()) }
    }
}

/// Quotient of `ambient` by the span of `relations`.
pub fn quotient_by(ambient: &BasedSpace, relations: &[SVec]) -> Result<QuotientSpace, LinalgError> {
    quotient_by_dim(ambient.dim(), relations)
}

pub fn quotient_by_dim(dim: usize, relations: &[SVec]) -> Result<QuotientSpace, LinalgError> {
    let mut e = Echelon::new(dim);
    for r in relations {
        r.check_dim(dim)?;
        e.insert(r.clone());
    }
    Ok(QuotientSpace::from_echelon(&e, relations.to_vec()))
}

/// Kernel of a linear map with its inclusion.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub inclusion: LinMap,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.inclusion.cols()
    }
}

pub fn kernel(f: &LinMap) -> Kernel {
    let t = f.transpose();
    let mut e = Echelon::new(f.cols());
    for r in t.columns() {
        e.insert(r.clone());
    }
    let rref = e.rref();
    let mut cols = Vec::new();
    for j in 0..f.cols() {
        if rref.contains_key(&j) {
            continue;
        }
        let mut v = SVec::unit(j);
        for (&p, row) in &rref {
            let x = row.get(j);
            if !x.is_zero() {
                v.add_term(p, &-x);
            }
        }
        cols.push(v);
    }
    Kernel { inclusion: LinMap { rows: f.cols(), cols } }
}

/// Sign helper `(-1)^k`.
pub fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

pub fn is_integral(x: &Scalar) -> bool {
    x.is_integer()
}

pub fn abs(x: &Scalar) -> Scalar {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense fraction-free rank used as an independent oracle.
    fn dense_rank(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let ncols = m.first().map(|r| r.len()).unwrap_or(0);
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && !m[r][c].is_zero() {
                    let (a, b) = (m[rank][c].clone(), m[r][c].clone());
                    for k in 0..ncols {
                        let v = &m[r][k] * &a - &m[rank][k] * &b;
                        m[r][k] = v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn quotient_by_one_relation() {
        let amb = BasedSpace::standard(3);
        let qs = quotient_by(&amb, &[SVec::from_ints(&[(0, 1), (1, -1)])]).unwrap();
        assert_eq!(qs.dim(), 2);
    }

    #[test]
    fn quotient_by_dependent_relations() {
        let amb = BasedSpace::standard(4);
        let rels = vec![
            SVec::from_ints(&[(0, 1), (1, -1)]),
            SVec::from_ints(&[(1, 1), (2, -1)]),
            SVec::from_ints(&[(0, 1), (2, -1)]),
        ];
        let qs = quotient_by(&amb, &rels).unwrap();
        assert_eq!(qs.dim(), 2);
        for r in &rels {
            assert!(qs.project(r).is_zero());
        }
    }

    #[test]
    fn kernel_of_rank_three() {
        let f = LinMap::from_int_rows(&[&[1, 0, 2, 0, 1], &[0, 1, 1, 0, 0], &[0, 0, 0, 1, 3]]);
        assert_eq!(f.rank(), 3);
        let k = kernel(&f);
        assert_eq!(k.dim(), 2);
        assert!(f.compose(&k.inclusion).unwrap().is_zero());
    }

    #[test]
    fn out_of_range_vector_rejected() {
        let f = LinMap::identity(2);
        assert!(f.try_apply(&SVec::unit(5)).is_err());
        assert!(quotient_by_dim(2, &[SVec::unit(3)]).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(BasedSpace::new(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn scalar_round_trip() {
        let x = qf(-6, 4);
        assert_eq!(fmt_scalar(&x), "-3/2");
        assert_eq!(parse_scalar("-3/2").unwrap(), x);
        assert_eq!(parse_scalar("5").unwrap(), q(5));
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn tensor_index_convention() {
        let a = LinMap::from_int_rows(&[&[1, 2], &[3, 4]]);
        let b = LinMap::from_int_rows(&[&[0, 1], &[1, 0]]);
        let t = a.tensor(&b);
        // (a ⊗ b)[(i,j),(k,l)] = a[i,k] b[j,l]
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(t.entry(i * 2 + j, k * 2 + l), a.entry(i, k) * b.entry(j, l));
                    }
                }
            }
        }
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-2i64..3, c), r))
    }

    proptest! {
        #[test]
        fn rank_matches_dense_oracle(m in small_matrix()) {
            let refs: Vec<&[i64]> = m.iter().map(|r| r.as_slice()).collect();
            let f = LinMap::from_int_rows(&refs);
            prop_assert_eq!(f.rank(), dense_rank(&m));
            prop_assert_eq!(f.rank() + kernel(&f).dim(), f.cols());
            prop_assert!(f.compose(&kernel(&f).inclusion).unwrap().is_zero());
        }

        #[test]
        fn quotient_projection_properties(m in small_matrix()) {
            let dim = m[0].len();
            let rels: Vec<SVec> = m.iter().map(|r| SVec::from_pairs(r.iter().enumerate().map(|(i, &x)| (i, q(x))))).collect();
            let qs = quotient_by_dim(dim, &rels).unwrap();
            prop_assert_eq!(qs.dim(), dim - dense_rank(&m));
            let p = qs.projection();
            let s = qs.section_map();
            prop_assert_eq!(p.compose(&s).unwrap(), LinMap::identity(qs.dim()));
            for r in &rels {
                prop_assert!(qs.project(r).is_zero());
            }
            // v - s(p(v)) lies in the relation span.
            let mut e = Echelon::new(dim);
            for r in &rels { e.insert(r.clone()); }
            for j in 0..dim {
                let mut v = SVec::unit(j);
                v.sub(&s.apply(&p.apply(&SVec::unit(j))));
                prop_assert!(e.contains(&v));
            }
        }

        #[test]
        fn inverse_is_two_sided(m in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 3)) {
            let refs: Vec<&[i64]> = m.iter().map(|r| r.as_slice()).collect();
            let f = LinMap::from_int_rows(&refs);
            match f.inverse() {
                Some(g) => {
                    prop_assert_eq!(f.compose(&g).unwrap(), LinMap::identity(3));
                    prop_assert_eq!(g.compose(&f).unwrap(), LinMap::identity(3));
                }
                None => prop_assert!(dense_rank(&m) < 3),
            }
        }
    }
}
