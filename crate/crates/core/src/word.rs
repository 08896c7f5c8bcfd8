//! Words over the generator alphabet and the combinatorics built on them:
//! degree-lexicographic order, Lyndon words, standard factorization and
//! necklaces (minimal rotations).
//!
//! Letters are zero-based generator indices, so the letter `0` is `x1`.

use std::cmp::Ordering;
use std::fmt;

pub type Letter = u16;

/// A finite word over the generators. Ordered degree-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<Letter>);

impl Monomial {
    pub fn new(letters: Vec<Letter>) -> Self {
        Monomial(letters)
    }

    pub fn empty() -> Self {
        Monomial(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Monomial(vec![i as Letter])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn involves(&self, i: usize) -> bool {
        self.0.iter().any(|&l| l as usize == i)
    }

    pub fn max_letter(&self) -> Option<usize> {
        self.0.iter().map(|&l| l as usize).max()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial(v)
    }

    /// Product of two sorted words (commutative monomials).
    pub fn merge_sorted(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut v = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                v.push(a[i]);
                i += 1;
            } else {
                v.push(b[j]);
                j += 1;
            }
        }
        v.extend_from_slice(&a[i..]);
        v.extend_from_slice(&b[j..]);
        Monomial(v)
    }

    pub fn sorted(mut self) -> Monomial {
        self.0.sort_unstable();
        self
    }

    pub fn necklace(&self) -> Monomial {
        Monomial(necklace(&self.0))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{:?}", self.0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Plain lexicographic comparison (a proper prefix is smaller), the order
/// Lyndon-word theory is stated in.
pub fn lex_cmp(a: &[Letter], b: &[Letter]) -> Ordering {
    a.cmp(b)
}

/// A nonempty word strictly smaller than each of its proper rotations.
pub fn is_lyndon(w: &[Letter]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|k| {
        let rot: Vec<Letter> = w[k..].iter().chain(&w[..k]).copied().collect();
        w < rot.as_slice()
    })
}

/// Split point of the standard factorization `w = u v` of a Lyndon word of
/// length at least two: `v` is the longest proper suffix that is Lyndon.
pub fn standard_split(w: &[Letter]) -> usize {
    debug_assert!(w.len() >= 2);
    (1..w.len())
        .find(|&k| is_lyndon(&w[k..]))
        .expect("every word of length >= 2 has a Lyndon suffix")
}

/// Lexicographically minimal rotation.
pub fn necklace(w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    if n < 2 {
        return w.to_vec();
    }
    let mut best = 0;
    for k in 1..n {
        for j in 0..n {
            let a = w[(k + j) % n];
            let b = w[(best + j) % n];
            if a != b {
                if a < b {
                    best = k;
                }
                break;
            }
        }
    }
    w[best..].iter().chain(&w[..best]).copied().collect()
}

/// All Lyndon words of length `len` over `rank` letters (Duval's generation).
pub fn lyndon_words(rank: usize, len: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    if rank == 0 || len == 0 {
        return out;
    }
    let k = rank as Letter;
    let mut w: Vec<Letter> = vec![0];
    loop {
        if w.len() == len {
            out.push(w.clone());
        }
        let m = w.len();
        while w.len() < len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// All words of length `len` over `rank` letters, in lexicographic order.
pub fn all_words(rank: usize, len: usize) -> Vec<Vec<Letter>> {
    let mut out: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * rank);
        for w in &out {
            for l in 0..rank {
                let mut v = w.clone();
                v.push(l as Letter);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Nondecreasing words of length `len` (commutative monomials).
pub fn sorted_words(rank: usize, len: usize) -> Vec<Vec<Letter>> {
    fn rec(rank: usize, len: usize, start: usize, cur: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for l in start..rank {
            cur.push(l as Letter);
            rec(rank, len, l, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(rank, len, 0, &mut Vec::new(), &mut out);
    out
}
