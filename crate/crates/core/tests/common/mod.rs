//! Independent oracles and random generators shared by the integration tests.
//!
//! Nothing here calls the library's Fox derivatives, divergence, necklaces,
//! Lyndon factorizations or rank computations; those are recomputed from
//! their definitions.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, One, Zero};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tangentia::envelope::{left_mul, right_mul};
use tangentia::{Derivation, Element, Endomorphism, EnvElement, Matrix, Monomial, Rational, Variety, VarietyKind};

pub mod suites;

pub type Key = (Monomial, Monomial);

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn q2(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A proptest runner with a fixed seed and no failure persistence.
pub fn runner(cases: u32, seed: u8) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

pub fn all_kinds() -> [VarietyKind; 4] {
    [
        VarietyKind::Polynomial,
        VarietyKind::FreeAssociative,
        VarietyKind::FreeLie,
        VarietyKind::MetabelianLie,
    ]
}

pub fn variety(kind: VarietyKind, n: usize) -> Variety {
    Variety::new(kind, n).unwrap()
}

// ---------------------------------------------------------------- random data

pub fn coefficient(r: &mut impl Rng) -> Rational {
    let n = loop {
        let n = r.gen_range(-3i64..=3);
        if n != 0 {
            break n;
        }
    };
    if r.gen_bool(0.2) {
        q2(n, 2)
    } else {
        q(n)
    }
}

/// A random product of `deg` generators, bracketed at random.
pub fn random_product(v: Variety, deg: usize, r: &mut impl Rng) -> Element {
    if deg == 1 {
        return Element::var(v, r.gen_range(0..v.rank()));
    }
    let k = r.gen_range(1..deg);
    let a = random_product(v, k, r);
    let b = random_product(v, deg - k, r);
    a.checked_mul(&b).unwrap()
}

/// A sum of up to `terms` random products with degrees in `lo..=hi`.
pub fn random_element(v: Variety, lo: usize, hi: usize, terms: usize, r: &mut impl Rng) -> Element {
    let mut acc = Element::zero(v);
    for _ in 0..r.gen_range(1..=terms) {
        let d = r.gen_range(lo..=hi);
        acc = &acc + &random_product(v, d, r).scale(&coefficient(r));
    }
    acc
}

pub fn nonzero_element(v: Variety, lo: usize, hi: usize, terms: usize, r: &mut impl Rng) -> Element {
    loop {
        let e = random_element(v, lo, hi, terms, r);
        if !e.is_zero() {
            return e;
        }
    }
}

/// Coordinates of degree in `lo..=hi`; each coordinate is zero with probability 1/3.
pub fn random_derivation(v: Variety, lo: usize, hi: usize, r: &mut impl Rng) -> Derivation {
    let coords = (0..v.rank())
        .map(|_| {
            if r.gen_bool(1.0 / 3.0) {
                Element::zero(v)
            } else {
                random_element(v, lo, hi, 2, r)
            }
        })
        .collect();
    Derivation::new(v, coords).unwrap()
}

/// A homogeneous derivation of degree `i` (coordinates of degree `i + 1`), nonzero.
pub fn random_homogeneous_derivation(v: Variety, i: usize, r: &mut impl Rng) -> Derivation {
    loop {
        let d = random_derivation(v, i + 1, i + 1, r);
        if !d.is_zero() {
            return d;
        }
    }
}

/// `x_k -> x_k + f_k` with `T = D` of degree `i`, plus random higher terms.
pub fn random_ia(v: Variety, i: usize, r: &mut impl Rng) -> Endomorphism {
    let d = random_homogeneous_derivation(v, i, r);
    let images = (0..v.rank())
        .map(|k| {
            let mut f = &Element::var(v, k) + d.coord(k);
            if r.gen_bool(0.5) {
                f = &f + &random_element(v, i + 2, i + 2, 1, r);
            }
            f
        })
        .collect();
    Endomorphism::new(v, images).unwrap()
}

/// An invertible integer matrix: a product of a few transvections and a scaling.
pub fn random_invertible(n: usize, r: &mut impl Rng) -> Matrix {
    let mut g = Matrix::identity(n);
    for _ in 0..3 {
        let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
        if a == b {
            continue;
        }
        let mut t = Matrix::identity(n);
        t.set(a, b, q(r.gen_range(-2..=2)));
        g = g.mul(&t);
    }
    let k = r.gen_range(0..n);
    let mut s = Matrix::identity(n);
    s.set(k, k, q(if r.gen_bool(0.5) { 2 } else { -1 }));
    g.mul(&s)
}

/// A random element of the enveloping algebra built from multiplication operators.
pub fn random_env(v: Variety, r: &mut impl Rng) -> EnvElement {
    let mut acc = EnvElement::zero(v);
    for _ in 0..r.gen_range(1..=3) {
        let mut term = EnvElement::scalar(v, coefficient(r));
        for _ in 0..r.gen_range(1..=2) {
            let a = random_element(v, 1, 2, 2, r);
            let op = if v.kind() == VarietyKind::FreeAssociative && r.gen_bool(0.5) {
                right_mul(&a)
            } else {
                left_mul(&a)
            };
            term = term.checked_mul(&op).unwrap();
        }
        acc = acc.checked_add(&term).unwrap();
    }
    acc
}

// ---------------------------------------------------------------- words

/// Lexicographically least rotation, by brute force.
pub fn min_rotation(w: &[u16]) -> Vec<u16> {
    (0..w.len().max(1))
        .map(|k| {
            let mut r = w[k.min(w.len())..].to_vec();
            r.extend_from_slice(&w[..k.min(w.len())]);
            r
        })
        .min()
        .unwrap_or_default()
}

fn lyndon(w: &[u16]) -> bool {
    !w.is_empty() && (1..w.len()).all(|k| w < &w[k..])
}

/// Standard factorization `w = uv` with `v` the longest proper Lyndon suffix.
fn standard(w: &[u16]) -> (&[u16], &[u16]) {
    let k = (1..w.len()).find(|&k| lyndon(&w[k..])).unwrap();
    (&w[..k], &w[k..])
}

type Poly = BTreeMap<Vec<u16>, Rational>;

fn poly_add(p: &mut Poly, w: Vec<u16>, c: Rational) {
    let e = p.entry(w.clone()).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&w);
    }
}

fn poly_commutator(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (u, cu) in a {
        for (w, cw) in b {
            let mut uw = u.clone();
            uw.extend_from_slice(w);
            let mut wu = w.clone();
            wu.extend_from_slice(u);
            poly_add(&mut out, uw, cu * cw);
            poly_add(&mut out, wu, -(cu * cw));
        }
    }
    out
}

fn lie_expand(w: &[u16], memo: &mut HashMap<Vec<u16>, Poly>) -> Poly {
    if w.len() == 1 {
        return [(w.to_vec(), Rational::one())].into();
    }
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let (u, v) = standard(w);
    let p = poly_commutator(&lie_expand(u, memo), &lie_expand(v, memo));
    memo.insert(w.to_vec(), p.clone());
    p
}

fn left_normed_expand(w: &[u16]) -> Poly {
    let mut p: Poly = [(vec![w[0]], Rational::one())].into();
    for &x in &w[1..] {
        p = poly_commutator(&p, &[(vec![x], Rational::one())].into());
    }
    p
}

/// The element as a noncommutative polynomial, from the definitions of the
/// Lyndon and left-normed bases.
pub fn associative_words(a: &Element) -> Poly {
    let mut out = Poly::new();
    let mut memo = HashMap::new();
    for (m, c) in a.terms() {
        let l = m.letters();
        let p = match a.variety().kind() {
            VarietyKind::Polynomial | VarietyKind::FreeAssociative => [(l.to_vec(), Rational::one())].into(),
            VarietyKind::FreeLie => lie_expand(l, &mut memo),
            VarietyKind::MetabelianLie => left_normed_expand(l),
        };
        for (w, k) in p {
            poly_add(&mut out, w, c * k);
        }
    }
    out
}

// ---------------------------------------------------------------- Fox and divergence oracles

fn add(map: &mut BTreeMap<Key, Rational>, k: Key, c: Rational) {
    let e = map.entry(k.clone()).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        map.remove(&k);
    }
}

/// Ordinary partial derivative of a commutative polynomial.
pub fn partial(f: &Element, i: usize) -> BTreeMap<Vec<u16>, Rational> {
    let mut out = BTreeMap::new();
    for (m, c) in f.terms() {
        let mut exps = vec![0i64; f.variety().rank()];
        for &x in m.letters() {
            exps[x as usize] += 1;
        }
        if exps[i] == 0 {
            continue;
        }
        let k = exps[i];
        exps[i] -= 1;
        let mut w = Vec::new();
        for (j, &e) in exps.iter().enumerate() {
            w.extend(std::iter::repeat_n(j as u16, e as usize));
        }
        let e = out.entry(w).or_insert_with(Rational::zero);
        *e += c * q(k);
    }
    out.retain(|_, c: &mut Rational| !c.is_zero());
    out
}

/// `∂f/∂x_i`, in the library's key layout, from the definitions:
/// ordinary partials; occurrences `u x_i v -> u ⊗ v`; and, in Lie varieties,
/// the unique `∂f/∂x_i` with `f = Σ ∂f/∂x_i · x_i` in the free associative
/// algebra (abelianized for metabelian algebras).
pub fn fox_oracle(f: &Element, i: usize) -> BTreeMap<Key, Rational> {
    let mut out = BTreeMap::new();
    let e = Monomial::empty();
    match f.variety().kind() {
        VarietyKind::Polynomial => {
            for (w, c) in partial(f, i) {
                add(&mut out, (Monomial::new(w), e.clone()), c);
            }
        }
        VarietyKind::FreeAssociative => {
            for (m, c) in f.terms() {
                let l = m.letters();
                for p in 0..l.len() {
                    if l[p] as usize == i {
                        add(
                            &mut out,
                            (Monomial::new(l[..p].to_vec()), Monomial::new(l[p + 1..].to_vec())),
                            c.clone(),
                        );
                    }
                }
            }
        }
        kind @ (VarietyKind::FreeLie | VarietyKind::MetabelianLie) => {
            for (w, c) in associative_words(f) {
                if w.last().map(|&x| x as usize) == Some(i) {
                    let mut prefix = w[..w.len() - 1].to_vec();
                    if kind == VarietyKind::MetabelianLie {
                        prefix.sort();
                    }
                    add(&mut out, (Monomial::new(prefix), e.clone()), c);
                }
            }
        }
    }
    out
}

/// The divergence class of `d`, normalized without the library's necklace code.
pub fn divergence_oracle(d: &Derivation) -> BTreeMap<Key, Rational> {
    let mut out = BTreeMap::new();
    let kind = d.variety().kind();
    for (i, f) in d.coords().iter().enumerate() {
        for ((a, b), c) in fox_oracle(f, i) {
            let key = match kind {
                VarietyKind::FreeAssociative | VarietyKind::FreeLie => (
                    Monomial::new(min_rotation(a.letters())),
                    Monomial::new(min_rotation(b.letters())),
                ),
                _ => (a, b),
            };
            add(&mut out, key, c);
        }
    }
    out
}

pub fn env_terms(u: &EnvElement) -> BTreeMap<Key, Rational> {
    u.terms().clone()
}

// ---------------------------------------------------------------- Leibniz oracle

/// A monomial as a product tree of generators.
enum Tree {
    Leaf(usize),
    Node(Box<Tree>, Box<Tree>),
}

fn tree_of(kind: VarietyKind, l: &[u16]) -> Tree {
    match kind {
        VarietyKind::FreeLie if l.len() > 1 => {
            let (u, v) = standard(l);
            Tree::Node(Box::new(tree_of(kind, u)), Box::new(tree_of(kind, v)))
        }
        _ => {
            let mut t = Tree::Leaf(l[0] as usize);
            for &x in &l[1..] {
                t = Tree::Node(Box::new(t), Box::new(Tree::Leaf(x as usize)));
            }
            t
        }
    }
}

fn tree_eval(t: &Tree, leaf: &mut dyn FnMut(usize) -> Element) -> Element {
    match t {
        Tree::Leaf(i) => leaf(*i),
        Tree::Node(a, b) => tree_eval(a, leaf).checked_mul(&tree_eval(b, leaf)).unwrap(),
    }
}

fn count_leaves(t: &Tree) -> usize {
    match t {
        Tree::Leaf(_) => 1,
        Tree::Node(a, b) => count_leaves(a) + count_leaves(b),
    }
}

/// `D(a)` by the Leibniz rule on product trees of the basis monomials.
pub fn leibniz_apply(d: &Derivation, a: &Element) -> Element {
    let v = a.variety();
    let mut acc = Element::zero(v);
    for (m, c) in a.terms() {
        if m.is_empty() {
            continue;
        }
        let t = tree_of(v.kind(), m.letters());
        for target in 0..count_leaves(&t) {
            let mut pos = 0;
            let mut leaf = |i: usize| {
                let e = if pos == target {
                    d.coord(i).clone()
                } else {
                    Element::var(v, i)
                };
                pos += 1;
                e
            };
            acc = &acc + &tree_eval(&t, &mut leaf).scale(c);
        }
    }
    acc
}

// ---------------------------------------------------------------- exact rank

/// Rank of a rational matrix by fraction-free (Bareiss) elimination over the integers.
pub fn bareiss_rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r
                .iter()
                .fold(BigInt::one(), |acc, c| num::integer::lcm(acc, c.denom().clone()));
            r.iter()
                .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let (nr, nc) = (m.len(), m[0].len());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..nc {
        let Some(p) = (rank..nr).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..nr {
            for c in col + 1..nc {
                let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == nr {
            break;
        }
    }
    rank
}

/// Dimension of the degree-1 divergence kernel, by enumerating a basis of
/// degree-1 derivations and the oracle divergence of each.
pub fn divergence_kernel_dim_degree1(v: Variety) -> usize {
    let n = v.rank() as u16;
    let mut quadratics: Vec<Element> = Vec::new();
    match v.kind() {
        VarietyKind::Polynomial => {
            for a in 0..n {
                for b in a..n {
                    quadratics.push(&Element::var(v, a as usize) * &Element::var(v, b as usize));
                }
            }
        }
        VarietyKind::FreeAssociative => {
            for a in 0..n {
                for b in 0..n {
                    quadratics.push(&Element::var(v, a as usize) * &Element::var(v, b as usize));
                }
            }
        }
        _ => {
            for a in 0..n {
                for b in a + 1..n {
                    quadratics.push(&Element::var(v, a as usize) * &Element::var(v, b as usize));
                }
            }
        }
    }
    let mut vectors = Vec::new();
    for j in 0..v.rank() {
        for f in &quadratics {
            let d = Derivation::single(v, j, f.clone()).unwrap();
            vectors.push(divergence_oracle(&d));
        }
    }
    let keys: Vec<Key> = vectors
        .iter()
        .flat_map(|m| m.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let rows: Vec<Vec<Rational>> = vectors
        .iter()
        .map(|m| {
            keys.iter()
                .map(|k| m.get(k).cloned().unwrap_or_else(Rational::zero))
                .collect()
        })
        .collect();
    vectors.len() - if keys.is_empty() { 0 } else { bareiss_rank(&rows) }
}

// ---------------------------------------------------------------- corpus maps

pub struct CorpusMap {
    pub name: &'static str,
    pub map: Endomorphism,
}

/// The named corpus automorphisms, built directly from their formulas.
pub fn corpus_maps() -> Vec<CorpusMap> {
    let mut out = Vec::new();

    let v = Variety::polynomial(3);
    let (x, y, z) = (Element::var(v, 0), Element::var(v, 1), Element::var(v, 2));
    let c = &(&z * &x) - &(&y * &y);
    let nagata = Endomorphism::new(
        v,
        vec![
            &(&x + &(&y * &c).scale(&q(2))) + &(&z * &(&c * &c)),
            &y + &(&z * &c),
            z.clone(),
        ],
    )
    .unwrap();
    out.push(CorpusMap {
        name: "nagata",
        map: nagata,
    });

    let v = Variety::associative(3);
    let (x, y, z) = (Element::var(v, 0), Element::var(v, 1), Element::var(v, 2));
    let c = &(&x * &z) - &(&z * &y);
    let anick = Endomorphism::new(v, vec![&x + &(&z * &c), &y + &(&c * &z), z.clone()]).unwrap();
    out.push(CorpusMap {
        name: "anick",
        map: anick,
    });

    let v = Variety::associative(2);
    let (a, b) = (Element::var(v, 0), Element::var(v, 1));
    let c = &(&a * &b) - &(&b * &a);
    let bergman = Endomorphism::new(v, vec![&a + &(&c * &c), b.clone()]).unwrap();
    out.push(CorpusMap {
        name: "bergman",
        map: bergman,
    });

    let v = Variety::metabelian(3);
    let y = |i| Element::var(v, i);
    let u = &y(0) * &y(1);
    let e = Endomorphism::new(v, (0..3).map(|i| &y(i) + &(&u * &y(i))).collect()).unwrap();
    out.push(CorpusMap {
        name: "drensky-exp",
        map: e,
    });

    let v = Variety::metabelian(4);
    let y = |i| Element::var(v, i);
    let tau = Endomorphism::new(v, vec![&y(0) + &(&y(1) * &y(2)), y(1), y(2), y(3)]).unwrap();
    out.push(CorpusMap { name: "tau", map: tau });
    let chein = Endomorphism::new(v, vec![&y(0) + &(&(&y(1) * &y(2)) * &y(0)), y(1), y(2), y(3)]).unwrap();
    out.push(CorpusMap {
        name: "chein-cubic",
        map: chein,
    });
    out
}
