//! Acceptance suite: one pass/fail line per criterion.

use num_rational::BigRational;
use num_traits::Zero;
use operad_forge::collection::{check_natural, NatMap, direct_sum, product_collection, sigma_act, validate_functor, Collection, Factor, NsCollection, Slot};
use operad_forge::endalg::{build_dga_operad, check_algebra, dga_assignment, end_operad, two_term_dga, CFunctor, DgaSign, GradedAlgebra};
use operad_forge::fincat::{build_d_truncated, d_arrow, validate_category, FinCat, LinearCat, Scheme};
use operad_forge::freeop::{adjoin_unit, free_ns, symmetrize};
use operad_forge::hyperop::{build_h, build_hc, halgebra_to_markl, markl_to_halgebra, Colors, MarklOperad};
use operad_forge::linalg::{BasedSpace, LinMap, SVec};
use operad_forge::operad::{
    associative_operad, check_partial_f, cowedge_from_unital, from_partial_f, from_substitude, perturb, same_operad, to_partial_f, to_substitude, COperad, Operad,
};
use operad_forge::perm::Perm;
use operad_forge::tensor::{assoc_iso, compose_nat, equiv_iso, invert_nat, otimes_i, AssocCase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("coend correctness", Duration::from_secs(10), coend_correctness),
        ("discrete collapse", Duration::MAX, discrete_collapse),
        ("associativity and equivariance isos", Duration::from_secs(30), assoc_equiv_isos),
        ("free-operad combinatorics", Duration::from_secs(30), free_combinatorics),
        ("cowedge is redundant", Duration::MAX, cowedge_redundant),
        ("presentation equivalences", Duration::MAX, presentation_equivalences),
        ("hyperoperad dimensions", Duration::from_secs(60), hyperoperad_dimensions),
        ("operads as hyperoperad algebras", Duration::from_secs(120), operads_as_algebras),
        ("category-colored hyperoperad over a point", Duration::MAX, colored_over_point),
        ("dg associative operad", Duration::MAX, dga_operad),
        ("CLI determinism", Duration::MAX, cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; over the {}s budget", budget.as_secs())),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail} ({:.2}s)", k + 1, took.as_secs_f64());
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// Random small categories and collections.

fn cat_of(objects: &[&str], morphisms: &[(&str, &str, &str)], compose: &[(&str, &str, &str)]) -> FinCat {
    let s = |x: &str| x.to_string();
    FinCat::new(
        objects.iter().map(|o| s(o)).collect(),
        objects.iter().map(|o| (format!("id_{o}"), s(o), s(o))).chain(morphisms.iter().map(|(m, a, b)| (s(m), s(a), s(b)))).collect(),
        objects.iter().map(|o| (s(o), format!("id_{o}"))).collect(),
        compose.iter().map(|(g, f, h)| (s(g), s(f), s(h))).collect(),
    )
    .expect("well-formed category")
}

/// A random poset with at most 4 objects and 8 morphisms, or one of three
/// small monoids.
fn random_category(rng: &mut ChaCha8Rng) -> FinCat {
    match rng.gen_range(0..10) {
        0 => cat_of(&["o"], &[("e", "o", "o")], &[("e", "e", "e")]),
        1 => cat_of(&["o"], &[("g", "o", "o")], &[("g", "g", "id_o")]),
        2 => cat_of(&["o"], &[("a", "o", "o"), ("b", "o", "o")], &[("a", "a", "a"), ("a", "b", "a"), ("b", "a", "b"), ("b", "b", "b")]),
        _ => loop {
            let k = rng.gen_range(1..=4);
            let mut rel = vec![vec![false; k]; k];
            for (i, row) in rel.iter_mut().enumerate() {
                for r in row.iter_mut().skip(i + 1) {
                    *r = rng.gen_bool(0.45);
                }
            }
            for m in 0..k {
                for i in 0..k {
                    for j in 0..k {
                        if rel[i][m] && rel[m][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
            let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| rel[i][j]).collect();
            if k + pairs.len() > 8 {
                continue;
            }
            let names: Vec<String> = (0..k).map(|i| format!("p{i}")).collect();
            let mor = |i: usize, j: usize| format!("m{i}{j}");
            let morphisms: Vec<(String, String, String)> = pairs.iter().map(|&(i, j)| (mor(i, j), names[i].clone(), names[j].clone())).collect();
            let mut compose = Vec::new();
            for &(i, m) in &pairs {
                for &(m2, j) in &pairs {
                    if m == m2 {
                        compose.push((mor(m, j), mor(i, m), mor(i, j)));
                    }
                }
            }
            let o: Vec<&str> = names.iter().map(String::as_str).collect();
            let ms: Vec<(&str, &str, &str)> = morphisms.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
            let cs: Vec<(&str, &str, &str)> = compose.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
            break cat_of(&o, &ms, &cs);
        },
    }
}

fn random_factor(rng: &mut ChaCha8Rng, c: &LinearCat) -> Factor {
    if rng.gen_bool(0.3) {
        Factor::Const
    } else {
        Factor::Rep(rng.gen_range(0..c.num_objects()))
    }
}

/// A sum of one or two random product collections of arity `n`, with every
/// component at most `cap`-dimensional.
fn random_collection(rng: &mut ChaCha8Rng, c: &Arc<LinearCat>, n: usize, cap: usize) -> NsCollection {
    loop {
        let mut x = product_collection(c.clone(), &(0..n).map(|_| random_factor(rng, c)).collect::<Vec<_>>(), random_factor(rng, c));
        if rng.gen_bool(0.5) {
            let y = product_collection(c.clone(), &(0..n).map(|_| random_factor(rng, c)).collect::<Vec<_>>(), random_factor(rng, c));
            x = direct_sum(&x, &y);
        }
        if x.spaces().values().all(|b| b.dim() <= cap) && x.spaces().values().any(|b| b.dim() > 0) {
            return x;
        }
    }
}

// ---------------------------------------------------------------------------
// Dense exact rank, independent of the library's elimination.

fn dense_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &pivot;
                for k in col..cols {
                    let v = &rows[rank][k] * &f;
                    rows[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// 1. Coend against a brute-force coequalizer over every morphism.

fn coend_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0E0);
    let mut checked_schemes = 0;
    let instances = 24;
    for inst in 0..instances {
        let fin = random_category(&mut rng);
        ensure(validate_category(&fin).ok(), || format!("instance {inst}: generated category is invalid"))?;
        let c = Arc::new(fin.linearize());
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(0..=1);
        let i = rng.gen_range(0..n);
        let x = random_collection(&mut rng, &c, n, 4);
        let y = random_collection(&mut rng, &c, m, 4);
        let r = otimes_i(&x, &y, i).map_err(|e| e.to_string())?;
        ensure(r.well_defined.ok(), || format!("instance {inst}: {}", r.well_defined))?;
        ensure(validate_functor(&r.result).ok(), || format!("instance {inst}: result is not a functor"))?;
        // Blocks of the colimit diagram, grouped by merged scheme.
        let mut blocks: BTreeMap<Scheme, Vec<(usize, Scheme, Scheme)>> = BTreeMap::new();
        for xs in x.spaces().keys() {
            for ys in y.spaces().keys() {
                if xs.inputs[i] == ys.output && x.dim(xs) > 0 && y.dim(ys) > 0 {
                    blocks.entry(xs.insert(i, ys)).or_default().push((ys.output, xs.clone(), ys.clone()));
                }
            }
        }
        for s in r.result.schemes() {
            ensure(blocks.contains_key(&s), || format!("instance {inst}: unexpected component {s}"))?;
        }
        for (s, bl) in &blocks {
            let mut offset = BTreeMap::new();
            let mut ambient = 0;
            for (c0, xs, ys) in bl {
                offset.insert(*c0, (ambient, y.dim(ys)));
                ambient += x.dim(xs) * y.dim(ys);
            }
            let at = |color: usize, a: usize, b: usize| offset[&color].0 + a * offset[&color].1 + b;
            let mut relations: Vec<Vec<BigRational>> = Vec::new();
            for f in c.non_identities() {
                let (d, tgt) = (c.mor(f).src, c.mor(f).tgt);
                let xs_c = s_split(s, i, m, tgt).0;
                let ys_d = s_split(s, i, m, d).1;
                for a in 0..x.dim(&xs_c) {
                    for b in 0..y.dim(&ys_d) {
                        // a·f ⊗ b in the d-block minus a ⊗ f·b in the c-block.
                        let mut row = vec![BigRational::zero(); ambient];
                        if offset.contains_key(&d) {
                            for (p, v) in x.act(&xs_c, Slot::Input(i), f, a).iter() {
                                row[at(d, p, b)] += v;
                            }
                        }
                        if offset.contains_key(&tgt) {
                            for (q, v) in y.act(&ys_d, Slot::Output, f, b).iter() {
                                row[at(tgt, a, q)] -= v;
                            }
                        }
                        relations.push(row);
                    }
                }
            }
            let rel_rank = if relations.is_empty() { 0 } else { dense_rank(relations.clone()) };
            let expected = ambient - rel_rank;
            let got = r.result.dim(s);
            ensure(got == expected, || format!("instance {inst}: dim at {s} is {got}, coequalizer gives {expected}"))?;
            if got == 0 {
                continue;
            }
            // The assembled projection kills every relation and has full rank.
            let mut proj = vec![vec![BigRational::zero(); ambient]; got];
            for (c0, xs, ys) in bl {
                let inj = r.injection(xs, ys);
                for col in 0..inj.cols() {
                    for (row, v) in inj.column(col).iter() {
                        proj[row][offset[c0].0 + col] = v.clone();
                    }
                }
            }
            for rel in &relations {
                for row in &proj {
                    let dot: BigRational = row.iter().zip(rel).map(|(p, q)| p * q).fold(BigRational::zero(), |acc, t| acc + t);
                    ensure(dot.is_zero(), || format!("instance {inst}: projection at {s} does not kill a relation"))?;
                }
            }
            ensure(dense_rank(proj) == got, || format!("instance {inst}: projection at {s} is not onto"))?;
            checked_schemes += 1;
        }
    }
    Ok(format!("{instances} instances, {checked_schemes} components match the coequalizer"))
}

fn s_split(s: &Scheme, i: usize, m: usize, c: usize) -> (Scheme, Scheme) {
    let mut xin = s.inputs[..i].to_vec();
    xin.push(c);
    xin.extend_from_slice(&s.inputs[i + m..]);
    (Scheme::new(xin, s.output), Scheme::new(s.inputs[i..i + m].to_vec(), c))
}

// ---------------------------------------------------------------------------
// 2. Over a discrete category the coend is a plain direct sum.

fn discrete_collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD15C);
    for inst in 0..10 {
        let names = ["p", "q", "r"];
        let k = rng.gen_range(2..=3);
        let c = Arc::new(FinCat::discrete(&names[..k]).linearize());
        let mut x = NsCollection::new(c.clone());
        let mut y = NsCollection::new(c.clone());
        for s in operad_forge::fincat::all_schemes(&c, 2) {
            match s.arity() {
                2 => x.add_space(s, BasedSpace::standard(rng.gen_range(0..=3))),
                1 => y.add_space(s, BasedSpace::standard(rng.gen_range(0..=3))),
                _ => {}
            }
        }
        let i = rng.gen_range(0..2);
        let r = otimes_i(&x, &y, i).map_err(|e| e.to_string())?;
        ensure(r.result.actions().is_empty(), || format!("instance {inst}: actions over a discrete category"))?;
        let mut expected: BTreeMap<Scheme, Vec<(Scheme, Scheme)>> = BTreeMap::new();
        for (xs, xb) in x.spaces() {
            for (ys, yb) in y.spaces() {
                if xs.inputs[i] == ys.output && xb.dim() > 0 && yb.dim() > 0 {
                    expected.entry(xs.insert(i, ys)).or_default().push((xs.clone(), ys.clone()));
                }
            }
        }
        let got: Vec<Scheme> = r.result.schemes().into_iter().filter(|s| r.result.dim(s) > 0).collect();
        ensure(got == expected.keys().cloned().collect::<Vec<_>>(), || format!("instance {inst}: supports differ"))?;
        for (s, parts) in &expected {
            let total: usize = parts.iter().map(|(xs, ys)| x.dim(xs) * y.dim(ys)).sum();
            ensure(r.result.dim(s) == total, || format!("instance {inst}: dim at {s}"))?;
            // Summand injections in color order assemble to the identity.
            let mut col = 0;
            for (xs, ys) in parts {
                let inj = r.injection(xs, ys);
                for j in 0..inj.cols() {
                    ensure(inj.column(j) == &SVec::unit(col + j), || format!("instance {inst}: injection at {s} is not the summand inclusion"))?;
                }
                col += inj.cols();
            }
        }
    }
    Ok("10 instances equal the direct sum".into())
}

// ---------------------------------------------------------------------------
// 3. Associativity and equivariance isomorphisms.

fn certified(src: &NsCollection, tgt: &NsCollection, maps: &NatMap) -> bool {
    invert_nat(maps).is_some() && check_natural(src, tgt, maps).ok() && src.schemes().iter().all(|s| src.dim(s) == 0 || maps.contains_key(s))
}

fn assoc_equiv_isos() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA550);
    let mut cases = BTreeMap::from([(format!("{:?}", AssocCase::Before), 0), (format!("{:?}", AssocCase::Inside), 0), (format!("{:?}", AssocCase::After), 0)]);
    let mut equivs = 0;
    let mut coherence = 0;
    for inst in 0..8 {
        let fin = if inst == 0 { FinCat::walking_arrow() } else { random_category(&mut rng) };
        let c = Arc::new(fin.linearize());
        let (n, m) = (rng.gen_range(2..=3), rng.gen_range(1..=2));
        let x = random_collection(&mut rng, &c, n, 2);
        let y = random_collection(&mut rng, &c, m, 2);
        let z = random_collection(&mut rng, &c, 1, 2);
        for j in 0..n {
            for i in 0..n + m - 1 {
                let iso = assoc_iso(&x, &y, &z, i, j).map_err(|e| e.to_string())?;
                ensure(iso.report.ok(), || format!("instance {inst}: assoc ({i},{j}) {}", iso.report))?;
                ensure(certified(&iso.lhs.result, &iso.rhs.result, &iso.maps), || format!("instance {inst}: assoc ({i},{j}) not a natural iso"))?;
                *cases.get_mut(&format!("{:?}", iso.case)).expect("case") += 1;
            }
        }
        // The After case inverts the Before case with the roles of Y and Z swapped.
        let after = assoc_iso(&x, &y, &z, n + m - 2, 0).map_err(|e| e.to_string())?;
        if after.case == AssocCase::After {
            let before = assoc_iso(&x, &z, &y, 0, n - 1).map_err(|e| e.to_string())?;
            let round = compose_nat(&before.maps, &after.maps);
            ensure(round.iter().all(|(s, mm)| *mm == LinMap::identity(after.lhs.result.dim(s))), || format!("instance {inst}: case composites disagree"))?;
            coherence += 1;
        }
        let all_n = Perm::all(n);
        let all_m = Perm::all(m);
        let (s1, s2) = (&all_n[rng.gen_range(0..all_n.len())], &all_n[rng.gen_range(0..all_n.len())]);
        let (t1, t2) = (&all_m[rng.gen_range(0..all_m.len())], &all_m[rng.gen_range(0..all_m.len())]);
        let i = rng.gen_range(0..n);
        let e = equiv_iso(&x, &y, s1, t1, i).map_err(|e| e.to_string())?;
        ensure(e.report.ok(), || format!("instance {inst}: equiv {}", e.report))?;
        ensure(certified(&e.lhs.result, &e.rhs, &e.maps), || format!("instance {inst}: equiv not a natural iso"))?;
        equivs += 1;
        // Composite coherence: one step by (s2 s1, t2 t1) equals two steps.
        let one = equiv_iso(&x, &y, &s2.compose(s1), &t2.compose(t1), i).map_err(|e| e.to_string())?;
        let first = equiv_iso(&sigma_act(&x, s1), &sigma_act(&y, t1), s2, t2, i).map_err(|e| e.to_string())?;
        let second = equiv_iso(&x, &y, s1, t1, first.base_slot).map_err(|e| e.to_string())?;
        ensure(one.base_slot == second.base_slot && first.perm.compose(&second.perm) == one.perm, || format!("instance {inst}: composite permutations differ"))?;
        let moved: NatMap = second.maps.iter().map(|(s, mm)| (s.permuted(&first.perm.inverse()), mm.clone())).collect();
        let two = compose_nat(&moved, &first.maps);
        ensure(one.maps.iter().all(|(s, mm)| two.get(s) == Some(mm)), || format!("instance {inst}: equivariance composite incoherent"))?;
        coherence += 1;
    }
    ensure(cases.values().all(|&k| k > 0), || format!("not all cases exercised: {cases:?}"))?;
    Ok(format!("assoc cases {cases:?}, {equivs} equivariance isos, {coherence} coherence instances"))
}

// ---------------------------------------------------------------------------
// 4. Free operad on one binary generator.

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn free_combinatorics() -> Outcome {
    let c = Arc::new(FinCat::terminal().linearize());
    let mut x = NsCollection::new(c.clone());
    x.add_space(Scheme::new(vec![0, 0], 0), BasedSpace::standard(1));
    let f = free_ns(&x, 6, 5);
    let sym = symmetrize(free_ns(&x, 6, 5), c);
    let mut dims = Vec::new();
    for n in 2..=6u64 {
        let s = Scheme::new(vec![0; n as usize], 0);
        let catalan = binomial(2 * (n - 1), n - 1) / n;
        let got = f.carrier.dim(&s) as u64;
        ensure(got == catalan, || format!("arity {n}: {got} vs Catalan {catalan}"))?;
        let got_sym = sym.carrier().dim(&s) as u64;
        ensure(got_sym == factorial(n) * catalan, || format!("arity {n}: symmetrized {got_sym} vs {}", factorial(n) * catalan))?;
        dims.push(got);
    }
    Ok(format!("dims {dims:?}, symmetrized by n!"))
}

// ---------------------------------------------------------------------------
// 5. Units force the cowedge condition.

fn arrow_functor(dims: (usize, usize), f: &[&[i64]]) -> CFunctor {
    let c = Arc::new(FinCat::walking_arrow().linearize());
    let m = c.mor_index("f").expect("f");
    CFunctor::new(c, vec![BasedSpace::standard(dims.0), BasedSpace::standard(dims.1)], BTreeMap::from([(m, LinMap::from_int_rows(f))])).expect("functor")
}

fn chain_functor(lo: i64, hi: i64, dims: &[usize], ds: &[(i64, &[&[i64]])]) -> CFunctor {
    let c = Arc::new(build_d_truncated(lo, hi).expect("chain category"));
    let spaces = dims.iter().map(|&d| BasedSpace::standard(d)).collect();
    let maps = ds.iter().map(|(n, rows)| (d_arrow(&c, *n).expect("arrow"), LinMap::from_int_rows(rows))).collect();
    CFunctor::new(c, spaces, maps).expect("functor")
}

fn cowedge_redundant() -> Outcome {
    let ends = [
        end_operad(arrow_functor((1, 2), &[&[1], &[0]]), 2),
        end_operad(arrow_functor((2, 1), &[&[1, -1]]), 2),
        end_operad(arrow_functor((2, 2), &[&[1, 0], &[1, 1]]), 2),
        end_operad(chain_functor(0, 1, &[1, 1], &[(1, &[&[1]])]), 2),
        end_operad(chain_functor(0, 2, &[1, 2, 1], &[(1, &[&[1, 0]]), (2, &[&[0], &[1]])]), 2),
    ];
    let mut squares = 0;
    for (k, e) in ends.iter().enumerate() {
        ensure(e.is_unital(), || format!("End operad {k} is not unital"))?;
        let r = cowedge_from_unital(e);
        ensure(r.ok() && r.checks > 0, || format!("End operad {k}: {r}"))?;
        squares += r.checks;
    }
    let asso = associative_operad(3, true);
    let r = cowedge_from_unital(&asso);
    ensure(r.ok(), || format!("associative: {r}"))?;
    // Without units a perturbed composition breaks the cowedge squares.
    let c = Arc::new(FinCat::walking_arrow().linearize());
    let mut p = COperad::materialize(&ends[0], c.clone());
    p.units = None;
    let (a, b) = (0, 1);
    let (bb, ab) = (Scheme::new(vec![b], b), Scheme::new(vec![a], b));
    let col = p.comps[&(bb.clone(), 0, ab.clone())].column(0).clone();
    let bad = perturb(&p, &bb, 0, &ab, 0, col.scaled(&BigRational::from_integer(2.into())));
    let r = cowedge_from_unital(&bad);
    ensure(!r.ok() && r.first().is_some_and(|v| v.check == "cowedge"), || format!("non-unital counterexample not detected: {r}"))?;
    Ok(format!("6 unital operads pass ({squares} End checks); counterexample fails at {}", r.first().map(|v| v.witness.clone()).unwrap_or_default()))
}

// ---------------------------------------------------------------------------
// 6. Partial-f and substitude presentations.

fn presentation_equivalences() -> Outcome {
    let term = Arc::new(FinCat::terminal().linearize());
    let mut bin = NsCollection::new(term.clone());
    bin.add_space(Scheme::new(vec![0, 0], 0), BasedSpace::standard(1));
    let free_unital = COperad::materialize(&adjoin_unit(free_ns(&bin, 4, 3), term.clone()), term.clone());
    let dga = build_dga_operad(0, 2, 2, DgaSign::FirstDegree).map_err(|e| e.to_string())?;
    let dga_op = dga.quotient.operad.clone();
    let dga_unital = COperad::materialize(&adjoin_unit(dga_op.clone(), dga.cat.clone()), dga.cat.clone());
    let cases: Vec<(&str, COperad)> = vec![
        ("associative", associative_operad(4, true)),
        ("free unital", free_unital),
        ("dg associative", dga_op),
        ("unital dg associative", dga_unital),
    ];
    let mut notes = Vec::new();
    for (name, p) in &cases {
        let pf = to_partial_f(p);
        let r = check_partial_f(&pf);
        ensure(r.ok(), || format!("{name}: {r}"))?;
        let back = from_partial_f(&pf);
        let mut plain = p.clone();
        plain.units = None;
        plain.weights = None;
        let mut back_plain = back.clone();
        back_plain.weights = None;
        ensure(same_operad(&back_plain, &plain), || format!("{name}: partial-f round trip changed the data"))?;
        ensure(to_partial_f(&back).comp_f == pf.comp_f, || format!("{name}: partial-f data not stable"))?;
        let mut line = format!("{name}: partial-f ({} checks)", r.checks);
        if p.units.is_some() {
            let sb = to_substitude(p).map_err(|e| e.to_string())?;
            let back = from_substitude(&sb);
            ensure(same_operad(&back, p), || format!("{name}: substitude round trip changed the data"))?;
            ensure(to_substitude(&back).map_err(|e| e.to_string())?.mu == sb.mu, || format!("{name}: substitude data not stable"))?;
            line.push_str(" + substitude");
        }
        notes.push(line);
    }
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------------------
// 7. Generator dimensions of the hyperoperad.

fn hyperoperad_dimensions() -> Outcome {
    let h = build_h(4, 1).map_err(|e| e.to_string())?;
    let mut count = 0;
    for n in 1..=4u64 {
        for m in 0..=4u64 {
            let r = n + m - 1;
            if r > 4 {
                continue;
            }
            let s = Scheme::new(vec![n as usize, m as usize], r as usize);
            let x = h.x.dim(&s) as u64;
            let q = h.eq.q.dim(&s) as u64;
            let (ex, eq) = (n * factorial(n) * factorial(m) * factorial(r), n * factorial(r));
            ensure(x == ex, || format!("free generators at ({n} {m}; {r}): {x} vs {ex}"))?;
            ensure(q == eq, || format!("generators at ({n} {m}; {r}): {q} vs {eq}"))?;
            count += 1;
        }
    }
    ensure(h.eq.well_defined.ok(), || h.eq.well_defined.to_string())?;
    Ok(format!("{count} schemes match both closed forms"))
}

// ---------------------------------------------------------------------------
// 8. Symmetric operads are algebras over the hyperoperad.

fn operads_as_algebras() -> Outcome {
    let term = Arc::new(FinCat::terminal().linearize());
    let h = build_h(4, 2).map_err(|e| e.to_string())?;
    let mut bin = NsCollection::new(term.clone());
    bin.add_space(Scheme::new(vec![0, 0], 0), BasedSpace::standard(1));
    let free = MarklOperad::from_operad(&symmetrize(free_ns(&bin, 4, 3), term.clone()), 4).map_err(|e| e.to_string())?;
    let asso = MarklOperad::from_operad(&associative_operad(4, false), 4).map_err(|e| e.to_string())?;
    let mut checks = 0;
    for (name, m) in [("associative", asso), ("free binary", free)] {
        ensure(m.check(term.clone()).map_err(|e| e.to_string())?.ok(), || format!("{name}: not an operad"))?;
        let (end, images) = markl_to_halgebra(&h, &m).map_err(|e| e.to_string())?;
        let r = h.check_algebra(&end, &images).map_err(|e| e.to_string())?;
        ensure(r.ok(), || format!("{name}: {r}"))?;
        ensure(halgebra_to_markl(&h, &end, &images).map_err(|e| e.to_string())? == m, || format!("{name}: round trip is not the identity"))?;
        checks += r.checks;
    }
    let h3 = build_h(3, 2).map_err(|e| e.to_string())?;
    let mut bad = MarklOperad::from_operad(&associative_operad(3, false), 3).map_err(|e| e.to_string())?;
    let c = bad.comps.get_mut(&(2, 0, 2)).ok_or("missing composition")?;
    let old = c.column(0).leading().map(|(k, _)| k).unwrap_or(0);
    c.set_column(0, SVec::unit((old + 1) % 6));
    let (end, images) = markl_to_halgebra(&h3, &bad).map_err(|e| e.to_string())?;
    let r = h3.check_algebra(&end, &images).map_err(|e| e.to_string())?;
    let w = r.first().ok_or("mutated composition was accepted")?;
    Ok(format!("2 operads certified ({checks} checks), round trips exact; mutation rejected by {}: {}", w.check, w.witness))
}

// ---------------------------------------------------------------------------
// 9. Scheme colors over a point reproduce permutation colors.

fn colored_over_point() -> Outcome {
    let term = Arc::new(FinCat::terminal().linearize());
    let hc = build_hc(term, 3, 2).map_err(|e| e.to_string())?;
    let h = build_h(3, 2).map_err(|e| e.to_string())?;
    let Colors::Schemes(sc) = hc.colors().as_ref() else { return Err("unexpected colors".into()) };
    let to_arity = |s: &Scheme| Scheme::new(s.inputs.iter().map(|&o| sc.scheme(o).arity()).collect(), sc.scheme(s.output).arity());
    let dims = |x: &dyn Collection, f: &dyn Fn(&Scheme) -> Scheme| x.schemes().iter().filter(|s| x.dim(s) > 0).map(|s| (f(s), x.dim(s))).collect::<BTreeMap<_, _>>();
    let id = |s: &Scheme| s.clone();
    ensure(dims(&hc.x, &to_arity) == dims(&h.x, &id), || "free generator dims differ".into())?;
    ensure(dims(&hc.eq.q, &to_arity) == dims(&h.eq.q, &id), || "generator dims differ".into())?;
    let (qc, q) = (hc.quotient().map_err(|e| e.to_string())?, h.quotient().map_err(|e| e.to_string())?);
    let (a, b) = (dims(&qc.operad.carrier, &to_arity), dims(&q.operad.carrier, &id));
    ensure(a == b, || "quotient dims differ".into())?;
    Ok(format!("{} components agree up to arity 3", a.len()))
}

// ---------------------------------------------------------------------------
// 10. The dg associative operad.

fn dga_operad() -> Outcome {
    // Displayed data: μ_{m−1,n} ↦ μ1, μ_{m,n−1} ↦ μ2, μ_{m,n} ↦ μ0 = μ1 + (−1)^n μ2.
    let shown = build_dga_operad(0, 3, 2, DgaSign::SecondDegree).map_err(|e| e.to_string())?;
    let cat = &shown.cat;
    let x = &shown.presentation.generators;
    let o = |n: i64| cat.object_index(&n.to_string()).expect("degree");
    let d = |k: i64| d_arrow(cat, k).expect("arrow");
    let mut actions = 0;
    for m in 0..=3i64 {
        for n in 0..=3i64 {
            if m + n > 3 || m + n < 1 {
                continue;
            }
            let low = Scheme::new(vec![o(m), o(n)], o(m + n - 1));
            ensure(x.dim(&low) == 2, || format!("dim at ({m} {n}; {}) is {}", m + n - 1, x.dim(&low)))?;
            if m >= 1 {
                ensure(x.act(&Scheme::new(vec![o(m - 1), o(n)], o(m + n - 1)), Slot::Input(0), d(m), 0) == SVec::unit(0), || format!("∂ on the first input at ({m} {n})"))?;
                actions += 1;
            }
            if n >= 1 {
                ensure(x.act(&Scheme::new(vec![o(m), o(n - 1)], o(m + n - 1)), Slot::Input(1), d(n), 0) == SVec::unit(1), || format!("∂ on the second input at ({m} {n})"))?;
                actions += 1;
            }
            let sign = if n % 2 == 0 { 1 } else { -1 };
            ensure(x.act(&Scheme::new(vec![o(m), o(n)], o(m + n)), Slot::Output, d(m + n), 0) == SVec::from_ints(&[(0, 1), (1, sign)]), || format!("∂ on the output at ({m} {n})"))?;
            actions += 1;
        }
    }
    // Algebras: the Leibniz sign (−1)^m.
    let dga = build_dga_operad(0, 2, 2, DgaSign::FirstDegree).map_err(|e| e.to_string())?;
    let run = |alg: &GradedAlgebra| -> Result<operad_forge::report::Report, String> {
        let (end, images) = dga_assignment(&dga, alg).map_err(|e| e.to_string())?;
        check_algebra(&dga.presentation, &end, &images).map_err(|e| e.to_string())
    };
    let good = run(&two_term_dga(false))?;
    ensure(good.ok(), || format!("two-term example: {good}"))?;
    let bad = run(&two_term_dga(true))?;
    let w = bad.first().ok_or("broken example accepted")?;
    Ok(format!("{actions} displayed action values reproduced; two-term algebra passes ({} checks); non-example fails at {}", good.checks, w.witness))
}

// ---------------------------------------------------------------------------
// 11. Byte-identical CLI output across runs and thread counts.

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_operad-forge");
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/");
    let file = |f: &str| format!("{data}{f}");
    let commands: Vec<Vec<String>> = vec![
        vec!["validate".into(), file("terminal.json")],
        vec!["validate".into(), file("broken_category.json")],
        vec!["validate".into(), file("commutative_broken.json"), "--json".into()],
        vec!["validate".into(), file("arrow_collection.json")],
        vec!["free".into(), file("binary.json"), "--arity".into(), "5".into()],
        vec!["free".into(), file("binary.json"), "--arity".into(), "4".into(), "--symmetric".into(), "--json".into()],
        vec!["quotient".into(), file("associative.json"), "--arity".into(), "4".into(), "--weight".into(), "3".into(), "--basis".into()],
        vec!["dims".into(), file("empty.json")],
        vec!["dims".into(), file("commutative.json"), "--json".into()],
        vec!["hyperoperad".into(), "--arity".into(), "3".into()],
        vec!["hyperoperad".into(), "--arity".into(), "1".into(), "--category".into(), file("walking_arrow.json"), "--json".into()],
        vec!["verify-markl".into(), "--builtin".into(), "free-binary".into(), "--arity".into(), "3".into()],
        vec!["verify-markl".into(), file("commutative.json"), "--arity".into(), "3".into(), "--json".into()],
        vec!["check-algebra".into(), file("two_term_dga.json")],
        vec!["check-algebra".into(), file("dual_numbers.json"), "--json".into()],
        vec!["dga-example".into(), "--degree-lo".into(), "-1".into(), "--degree-hi".into(), "2".into(), "--basis".into()],
        vec!["dga-example".into(), "--json".into()],
    ];
    let mut bytes = 0;
    for args in &commands {
        let mut seen: Option<(Option<i32>, Vec<u8>)> = None;
        for threads in ["1", "4"] {
            for _ in 0..3 {
                let out = Command::new(bin).args(args).env("OPERAD_FORGE_THREADS", threads).output().map_err(|e| e.to_string())?;
                let got = (out.status.code(), out.stdout);
                match &seen {
                    None => seen = Some(got),
                    Some(first) => ensure(first == &got, || format!("`{}` differs at {threads} threads", args.join(" ")))?,
                }
            }
        }
        let (code, out) = seen.expect("ran");
        ensure(matches!(code, Some(0) | Some(1)), || format!("`{}` exited with {code:?}", args.join(" ")))?;
        bytes += out.len();
    }
    Ok(format!("{} commands × 3 runs × threads 1 and 4 identical ({bytes} bytes each round)", commands.len()))
}
