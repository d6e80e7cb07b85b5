//! Permutations in one-line notation.
//!
//! `p.apply(i)` is the image of `i` (0-based). `a.compose(&b)` is the function
//! `i ↦ a(b(i))`.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// From 0-based images; `None` unless a bijection.
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(images))
    }

    /// From 1-based one-line notation.
    pub fn from_one_line(images: &[usize]) -> Option<Self> {
        if images.contains(&0) {
            return None;
        }
        Perm::new(images.iter().map(|&x| x - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "permutation sizes differ");
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x] = i;
        }
        Perm(out)
    }

    /// Swap of `a` and `b` in `Σ_n`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(a, b);
        Perm(v)
    }

    /// Block insertion `self ∘_i tau`: slot `i` (0-based) is expanded to a
    /// block permuted by `tau`; an empty `tau` deletes the slot.
    pub fn block_insert(&self, i: usize, tau: &Perm) -> Perm {
        let n = self.len();
        let m = tau.len();
        assert!(i < n, "slot out of range");
        let si = self.0[i];
        let adjust = |s: usize| -> usize {
            if s < si {
                s
            } else {
                s + m - 1
            }
        };
        let mut out = Vec::with_capacity(n + m - 1);
        for p in 0..n + m - 1 {
            let v = if p < i {
                adjust(self.0[p])
            } else if p < i + m {
                si + tau.0[p - i]
            } else {
                adjust(self.0[p + 1 - m])
            };
            out.push(v);
        }
        Perm(out)
    }

    /// All permutations of `n` in lexicographic order of one-line notation.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            let Some(k) = (0..n.saturating_sub(1)).rev().find(|&k| cur[k] < cur[k + 1]) else { break };
            let l = (k + 1..n).rev().find(|&l| cur[k] < cur[l]).expect("exists");
            cur.swap(k, l);
            cur[k + 1..].reverse();
        }
        out
    }

    /// Position in the lexicographic enumeration.
    pub fn rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller = self.0[i + 1..].iter().filter(|&&x| x < self.0[i]).count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    pub fn unrank(n: usize, mut rank: usize) -> Perm {
        let mut digits = vec![0; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        Perm(digits.into_iter().map(|d| pool.remove(d)).collect())
    }

    /// Applies the reindexing `out[k] = xs[self(k)]`.
    pub fn reindex<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        self.0.iter().map(|&j| xs[j].clone()).collect()
    }

    /// 1-based one-line string such as `2.1.3`.
    pub fn to_string_dotted(&self) -> String {
        self.0.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(".")
    }

    pub fn parse_dotted(s: &str) -> Option<Perm> {
        if s.is_empty() {
            return Some(Perm(Vec::new()));
        }
        let v: Option<Vec<usize>> = s.split('.').map(|t| t.parse().ok()).collect();
        Perm::from_one_line(&v?)
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_string_dotted())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Lays out blocks in target order and reads off where each source
    /// position lands.
    fn block_insert_oracle(sigma: &Perm, i: usize, tau: &Perm) -> Perm {
        let n = sigma.len();
        let m = tau.len();
        // Block b in target order has size 1 except the block σ(i), of size m.
        let size = |b: usize| if b == sigma.apply(i) { m } else { 1 };
        let mut start = vec![0; n];
        let mut acc = 0;
        for b in 0..n {
            start[b] = acc;
            acc += size(b);
        }
        let mut out = Vec::new();
        for p in 0..n {
            let b = sigma.apply(p);
            if p == i {
                for k in 0..m {
                    out.push(start[b] + tau.apply(k));
                }
            } else {
                out.push(start[b]);
            }
        }
        Perm::new(out).expect("bijection")
    }

    fn perm_strategy(max: usize) -> impl Strategy<Value = Perm> {
        (0..=max).prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle()).prop_map(|v| Perm::new(v).unwrap())
    }

    fn nonempty_perm(max: usize) -> impl Strategy<Value = Perm> {
        (1..=max).prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle()).prop_map(|v| Perm::new(v).unwrap())
    }

    #[test]
    fn enumeration_and_rank() {
        for n in 0..6 {
            let all = Perm::all(n);
            assert_eq!(all.len(), factorial(n));
            for (r, p) in all.iter().enumerate() {
                assert_eq!(p.rank(), r);
                assert_eq!(&Perm::unrank(n, r), p);
            }
        }
    }

    #[test]
    fn block_insert_small_cases() {
        let s = Perm::from_one_line(&[2, 1]).unwrap();
        let t = Perm::from_one_line(&[2, 1]).unwrap();
        // Swap two blocks, the first of which is internally reversed.
        assert_eq!(s.block_insert(0, &t).to_string_dotted(), "3.2.1");
        assert_eq!(s.block_insert(0, &Perm::identity(0)).to_string_dotted(), "1");
    }

    proptest! {
        #[test]
        fn block_insert_matches_oracle(s in nonempty_perm(5), t in perm_strategy(4), k in 0usize..5) {
            let i = k % s.len();
            prop_assert_eq!(s.block_insert(i, &t), block_insert_oracle(&s, i, &t));
        }

        #[test]
        fn block_insert_inverse(s in nonempty_perm(5), t in perm_strategy(4), k in 0usize..5) {
            let i = k % s.len();
            let lhs = s.block_insert(i, &t).inverse();
            let rhs = s.inverse().block_insert(s.apply(i), &t.inverse());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn block_insert_interchange(
            v in (1usize..5, 0usize..4).prop_flat_map(|(n, m)| (
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
                Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
                0..n,
            ))
        ) {
            let (a, b, c, d, i) = v;
            let (s2, s, t2, t) = (Perm::new(a).unwrap(), Perm::new(b).unwrap(), Perm::new(c).unwrap(), Perm::new(d).unwrap());
            let lhs = s2.compose(&s).block_insert(i, &t2.compose(&t));
            let rhs = s2.block_insert(s.apply(i), &t2).compose(&s.block_insert(i, &t));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn group_laws(v in (0usize..6).prop_flat_map(|n| (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        ))) {
            let (a, b) = (Perm::new(v.0).unwrap(), Perm::new(v.1).unwrap());
            prop_assert!(a.compose(&a.inverse()).is_identity());
            prop_assert_eq!(a.compose(&b).inverse(), b.inverse().compose(&a.inverse()));
            let xs: Vec<usize> = (10..10 + a.len()).collect();
            prop_assert_eq!(b.reindex(&a.reindex(&xs)), a.compose(&b).reindex(&xs));
        }
    }
}
