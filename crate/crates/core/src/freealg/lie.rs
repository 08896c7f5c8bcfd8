//! Free Lie algebra in the Lyndon basis.
//!
//! A Lyndon word stands for its standard bracketing. Products of basis
//! elements are rewritten into the basis with the usual triangular
//! algorithm: for Lyndon `u < v`, `[u, v]` is the basis element `uv` when
//! `u` is a letter or the right standard factor of `u` is at least `v`;
//! otherwise `u = [a, b]` and `[[a, b], v] = [a, [b, v]] + [[a, v], b]`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num::{BigInt, One, Zero};

use crate::word::{lex_cmp, standard_split, Monomial};

type IntTerms = Vec<(Monomial, BigInt)>;

thread_local! {
    static BRACKETS: RefCell<HashMap<(Monomial, Monomial), Rc<IntTerms>>> = RefCell::new(HashMap::new());
    static ASSOC: RefCell<HashMap<Monomial, Rc<IntTerms>>> = RefCell::new(HashMap::new());
}

fn add_int(map: &mut BTreeMap<Monomial, BigInt>, k: Monomial, c: BigInt) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Split a Lyndon word of length >= 2 into its standard factors.
pub(crate) fn factors(w: &Monomial) -> (Monomial, Monomial) {
    let l = w.letters();
    let k = standard_split(l);
    (Monomial::new(l[..k].to_vec()), Monomial::new(l[k..].to_vec()))
}

/// `[u, v]` for Lyndon words `u`, `v`, expanded in the Lyndon basis.
pub(crate) fn bracket(u: &Monomial, v: &Monomial) -> Rc<IntTerms> {
    let key = (u.clone(), v.clone());
    if let Some(hit) = BRACKETS.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let result = Rc::new(compute_bracket(u, v));
    BRACKETS.with(|c| c.borrow_mut().insert(key, result.clone()));
    result
}

fn compute_bracket(u: &Monomial, v: &Monomial) -> IntTerms {
    match lex_cmp(u.letters(), v.letters()) {
        Ordering::Equal => Vec::new(),
        Ordering::Greater => bracket(v, u).iter().map(|(m, c)| (m.clone(), -c)).collect(),
        Ordering::Less => {
            if u.degree() == 1 {
                return vec![(u.concat(v), BigInt::one())];
            }
            let (a, b) = factors(u);
            if lex_cmp(b.letters(), v.letters()) != Ordering::Less {
                return vec![(u.concat(v), BigInt::one())];
            }
            let mut acc = BTreeMap::new();
            // [a, [b, v]]
            for (w, c) in bracket(&b, v).iter() {
                for (z, d) in bracket(&a, w).iter() {
                    add_int(&mut acc, z.clone(), c * d);
                }
            }
            // [[a, v], b]
            for (w, c) in bracket(&a, v).iter() {
                for (z, d) in bracket(w, &b).iter() {
                    add_int(&mut acc, z.clone(), c * d);
                }
            }
            acc.into_iter().collect()
        }
    }
}

/// Image of the Lyndon basis element in the free associative algebra.
pub(crate) fn assoc_image(w: &Monomial) -> Rc<IntTerms> {
    if let Some(hit) = ASSOC.with(|c| c.borrow().get(w).cloned()) {
        return hit;
    }
    let result = if w.degree() == 1 {
        vec![(w.clone(), BigInt::one())]
    } else {
        let (u, v) = factors(w);
        let pu = assoc_image(&u);
        let pv = assoc_image(&v);
        let mut acc = BTreeMap::new();
        for (a, ca) in pu.iter() {
            for (b, cb) in pv.iter() {
                add_int(&mut acc, a.concat(b), ca * cb);
                add_int(&mut acc, b.concat(a), -(ca * cb));
            }
        }
        acc.into_iter().collect()
    };
    let result = Rc::new(result);
    ASSOC.with(|c| c.borrow_mut().insert(w.clone(), result.clone()));
    result
}

/// Fox derivative of the Lyndon basis element with respect to `x_i`, as an
/// element of the free associative algebra: `d[u,v] = P_u dv - P_v du`.
pub(crate) fn fox(w: &Monomial, i: usize) -> BTreeMap<Monomial, BigInt> {
    let mut out = BTreeMap::new();
    if !w.involves(i) {
        return out;
    }
    if w.degree() == 1 {
        out.insert(Monomial::empty(), BigInt::one());
        return out;
    }
    let (u, v) = factors(w);
    let du = fox(&u, i);
    let dv = fox(&v, i);
    for (p, cp) in assoc_image(&u).iter() {
        for (d, cd) in &dv {
            add_int(&mut out, p.concat(d), cp * cd);
        }
    }
    for (p, cp) in assoc_image(&v).iter() {
        for (d, cd) in &du {
            add_int(&mut out, p.concat(d), -(cp * cd));
        }
    }
    out
}
