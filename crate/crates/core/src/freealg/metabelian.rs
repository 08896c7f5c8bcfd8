//! Free metabelian Lie algebra.
//!
//! Basis: generators `[i]`, and left-normed brackets `[i1, i2, i3, .., im]`
//! with `i1 > i2 <= i3 <= .. <= im`. The tail after the first two letters is
//! a multiset because elements of the derived algebra act on it through the
//! abelianization.

use crate::word::{Letter, Monomial};

fn key(a: Letter, b: Letter, mut tail: Vec<Letter>) -> Monomial {
    tail.sort_unstable();
    let mut v = Vec::with_capacity(tail.len() + 2);
    v.push(a);
    v.push(b);
    v.extend(tail);
    Monomial::new(v)
}

/// Rewrites `[[a, b], tail...]` (any letters, tail in any order) in the basis.
pub(crate) fn normalize(a: Letter, b: Letter, mut tail: Vec<Letter>) -> Vec<(Monomial, i64)> {
    if a == b {
        return Vec::new();
    }
    if a < b {
        return normalize(b, a, tail).into_iter().map(|(m, s)| (m, -s)).collect();
    }
    tail.sort_unstable();
    match tail.first() {
        Some(&c) if c < b => {
            // [[a,b],c] = [[a,c],b] - [[b,c],a]; c is the minimum of everything
            let rest = &tail[1..];
            let mut t1 = rest.to_vec();
            t1.push(b);
            let mut t2 = rest.to_vec();
            t2.push(a);
            vec![(key(a, c, t1), 1), (key(b, c, t2), -1)]
        }
        _ => vec![(key(a, b, tail), 1)],
    }
}

/// Product of two basis elements.
pub(crate) fn bracket(u: &Monomial, v: &Monomial) -> Vec<(Monomial, i64)> {
    let (lu, lv) = (u.letters(), v.letters());
    match (lu.len(), lv.len()) {
        (1, 1) => normalize(lu[0], lv[0], Vec::new()),
        (_, 1) => {
            let mut tail = lu[2..].to_vec();
            tail.push(lv[0]);
            normalize(lu[0], lu[1], tail)
        }
        (1, _) => bracket(v, u).into_iter().map(|(m, s)| (m, -s)).collect(),
        _ => Vec::new(),
    }
}

pub(crate) fn is_basis_key(w: &[Letter]) -> bool {
    match w.len() {
        0 => false,
        1 => true,
        _ => w[0] > w[1] && w[2..].iter().all(|&t| t >= w[1]) && w[2..].windows(2).all(|p| p[0] <= p[1]),
    }
}
