//! Free algebras of the four supported varieties, with exact rational
//! coefficients and the standard degree grading.
//!
//! Every [`Element`] is a sparse map from canonical monomials to nonzero
//! rationals. What a monomial means depends on the variety:
//!
//! * `Polynomial`: a nondecreasing word, i.e. an exponent vector;
//! * `FreeAssociative`: a word;
//! * `FreeLie`: a Lyndon word, standing for its standard bracketing;
//! * `MetabelianLie`: a generator `[i]` or a left-normed bracket key
//!   `[i1, i2, i3, .., im]` with `i1 > i2 <= i3 <= .. <= im`.

mod lie;
mod metabelian;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::word::{is_lyndon, Letter, Monomial};
use crate::Rational;

pub(crate) use lie::{assoc_image as lie_assoc_image, factors as lyndon_factors, fox as lie_fox};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarietyKind {
    Polynomial,
    FreeAssociative,
    FreeLie,
    MetabelianLie,
}

impl VarietyKind {
    pub fn is_unital(self) -> bool {
        matches!(self, VarietyKind::Polynomial | VarietyKind::FreeAssociative)
    }

    pub fn is_lie(self) -> bool {
        !self.is_unital()
    }

    pub fn keyword(self) -> &'static str {
        match self {
            VarietyKind::Polynomial => "polynomial",
            VarietyKind::FreeAssociative => "associative",
            VarietyKind::FreeLie => "lie",
            VarietyKind::MetabelianLie => "metabelian",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "polynomial" | "commutative" => VarietyKind::Polynomial,
            "associative" | "free-associative" => VarietyKind::FreeAssociative,
            "lie" | "free-lie" => VarietyKind::FreeLie,
            "metabelian" | "metabelian-lie" => VarietyKind::MetabelianLie,
            _ => return None,
        })
    }
}

/// A variety together with the number of free generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Variety {
    kind: VarietyKind,
    rank: usize,
}

impl Variety {
    pub fn new(kind: VarietyKind, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        Ok(Variety { kind, rank })
    }

    pub fn polynomial(rank: usize) -> Self {
        Self::new(VarietyKind::Polynomial, rank).expect("rank >= 1")
    }

    pub fn associative(rank: usize) -> Self {
        Self::new(VarietyKind::FreeAssociative, rank).expect("rank >= 1")
    }

    pub fn lie(rank: usize) -> Self {
        Self::new(VarietyKind::FreeLie, rank).expect("rank >= 1")
    }

    pub fn metabelian(rank: usize) -> Self {
        Self::new(VarietyKind::MetabelianLie, rank).expect("rank >= 1")
    }

    pub fn kind(&self) -> VarietyKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn unital(&self) -> bool {
        self.kind.is_unital()
    }

    pub fn with_rank(&self, rank: usize) -> Result<Self> {
        Variety::new(self.kind, rank)
    }

    /// Whether `m` is a canonical basis monomial of this variety.
    pub fn is_canonical(&self, m: &Monomial) -> bool {
        let l = m.letters();
        if l.iter().any(|&x| x as usize >= self.rank) {
            return false;
        }
        match self.kind {
            VarietyKind::Polynomial => l.windows(2).all(|p| p[0] <= p[1]),
            VarietyKind::FreeAssociative => true,
            VarietyKind::FreeLie => is_lyndon(l),
            VarietyKind::MetabelianLie => metabelian::is_basis_key(l),
        }
    }

    pub(crate) fn check_same(&self, other: &Variety) -> Result<()> {
        if self != other {
            return Err(Error::VarietyMismatch {
                expected: *self,
                found: *other,
            });
        }
        Ok(())
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.rank {
            return Err(Error::IndexOutOfRange {
                index: i,
                rank: self.rank,
            });
        }
        Ok(())
    }

    /// Default generator names `x1, .., xn`.
    pub fn default_names(&self) -> Vec<String> {
        (1..=self.rank).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind.keyword(), self.rank)
    }
}

impl Serialize for Variety {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn add_term<K: Ord>(map: &mut BTreeMap<K, Rational>, k: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub(crate) fn int(c: &BigInt) -> Rational {
    Rational::from_integer(c.clone())
}

/// An element of the free algebra of a variety.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    variety: Variety,
    terms: BTreeMap<Monomial, Rational>,
}

impl Element {
    pub fn zero(variety: Variety) -> Self {
        Element {
            variety,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(variety: Variety, c: Rational) -> Result<Self> {
        if !variety.unital() && !c.is_zero() {
            return Err(Error::ConstantInNonUnital(variety));
        }
        let mut e = Element::zero(variety);
        add_term(&mut e.terms, Monomial::empty(), c);
        Ok(e)
    }

    pub fn one(variety: Variety) -> Result<Self> {
        Self::constant(variety, Rational::one())
    }

    pub fn generator(variety: Variety, i: usize) -> Result<Self> {
        variety.check_index(i)?;
        let mut e = Element::zero(variety);
        e.terms.insert(Monomial::letter(i), Rational::one());
        Ok(e)
    }

    /// Generator `x_{i+1}`; panics when out of range.
    pub fn var(variety: Variety, i: usize) -> Self {
        Self::generator(variety, i).expect("generator index in range")
    }

    /// Builds an element from canonical monomials, rejecting non-canonical keys.
    pub fn from_terms<I>(variety: Variety, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut e = Element::zero(variety);
        for (m, c) in terms {
            if m.is_empty() && !variety.unital() {
                if c.is_zero() {
                    continue;
                }
                return Err(Error::ConstantInNonUnital(variety));
            }
            if !m.is_empty() && !variety.is_canonical(&m) {
                return Err(Error::Invariant(format!(
                    "monomial {m:?} is not canonical in {variety}"
                )));
            }
            add_term(&mut e.terms, m, c);
        }
        Ok(e)
    }

    pub(crate) fn from_map_unchecked(variety: Variety, terms: BTreeMap<Monomial, Rational>) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        Element { variety, terms }
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest degree of a term, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Smallest degree of a term, `None` for zero.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.involves(i))
    }

    /// The part of degree exactly `k`.
    pub fn homogeneous_component(&self, k: usize) -> Element {
        self.filter(|m| m.degree() == k)
    }

    /// Homogeneous parts keyed by degree; they sum back to `self`.
    pub fn homogeneous_components(&self) -> BTreeMap<usize, Element> {
        let mut out: BTreeMap<usize, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Element::zero(self.variety))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Drops every term of degree above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Element {
        self.filter(|m| m.degree() <= max_degree)
    }

    fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Element {
        Element {
            variety: self.variety,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::empty())
    }

    /// Coefficients of `x_1, .., x_n` in the degree-one part.
    pub fn linear_coefficients(&self) -> Vec<Rational> {
        (0..self.variety.rank)
            .map(|j| self.coefficient(&Monomial::letter(j)))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero(self.variety);
        }
        Element {
            variety: self.variety,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        self.variety.check_same(&other.variety)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(Element {
            variety: self.variety,
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.checked_add(&-other)
    }

    /// The variety's product: concatenation, commutative product, or Lie bracket.
    pub fn checked_mul(&self, other: &Element) -> Result<Element> {
        self.variety.check_same(&other.variety)?;
        Ok(self.mul_truncated(other, usize::MAX))
    }

    pub(crate) fn mul_truncated(&self, other: &Element, max_degree: usize) -> Element {
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.degree() + b.degree() > max_degree {
                    continue;
                }
                let c = ca * cb;
                mul_monomials(self.variety.kind, a, b, |m, k| add_term(&mut terms, m, &c * k));
            }
        }
        Element {
            variety: self.variety,
            terms,
        }
    }

    /// `ab - ba`; in Lie varieties this equals `2[a,b]`, so callers there
    /// normally want [`Element::checked_mul`] instead.
    pub fn commutator(&self, other: &Element) -> Result<Element> {
        let ab = self.checked_mul(other)?;
        let ba = other.checked_mul(self)?;
        ab.checked_sub(&ba)
    }

    /// Bracket in Lie varieties, commutator `ab - ba` otherwise.
    pub fn bracket(&self, other: &Element) -> Result<Element> {
        if self.variety.kind.is_lie() {
            self.checked_mul(other)
        } else {
            self.commutator(other)
        }
    }

    pub fn pow(&self, e: u32) -> Result<Element> {
        if e == 0 {
            return Element::one(self.variety);
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Image under the homomorphism `x_i -> args[i]`. The arguments may live
    /// in a free algebra of the same kind and a different rank.
    pub fn substitute(&self, args: &[Element]) -> Result<Element> {
        self.substitute_truncated(args, usize::MAX)
    }

    /// Like [`Element::substitute`], dropping everything above `max_degree`.
    /// Exact through `max_degree` as long as no argument has a constant term.
    pub fn substitute_truncated(&self, args: &[Element], max_degree: usize) -> Result<Element> {
        if args.len() != self.variety.rank {
            return Err(Error::ArityMismatch {
                expected: self.variety.rank,
                found: args.len(),
            });
        }
        let target = args[0].variety;
        for a in args {
            target.check_same(&a.variety)?;
        }
        if target.kind != self.variety.kind {
            return Err(Error::VarietyMismatch {
                expected: self.variety.with_rank(target.rank)?,
                found: target,
            });
        }
        let mut memo: HashMap<Monomial, Element> = HashMap::new();
        let mut out = Element::zero(target);
        for (m, c) in &self.terms {
            let v = eval_monomial(self.variety.kind, m, args, max_degree, &mut memo)?;
            for (k, x) in v.terms {
                add_term(&mut out.terms, k, x * c);
            }
        }
        Ok(out.truncate(max_degree))
    }

    /// Image of a free Lie element in the free associative algebra on the
    /// same generators (its universal enveloping algebra).
    pub fn to_associative(&self) -> Result<Element> {
        match self.variety.kind {
            VarietyKind::FreeAssociative => Ok(self.clone()),
            VarietyKind::FreeLie => {
                let target = Variety::associative(self.variety.rank);
                let mut out = BTreeMap::new();
                for (m, c) in &self.terms {
                    for (w, k) in lie::assoc_image(m).iter() {
                        add_term(&mut out, w.clone(), c * int(k));
                    }
                }
                Ok(Element::from_map_unchecked(target, out))
            }
            _ => Err(Error::Unsupported(format!(
                "associative image of an element of {}",
                self.variety
            ))),
        }
    }

    /// Lifts a metabelian element to the free Lie algebra, mapping each basis
    /// key to its left-normed bracket.
    pub fn lift_metabelian(&self) -> Result<Element> {
        if self.variety.kind != VarietyKind::MetabelianLie {
            return Err(Error::Unsupported("lift of a non-metabelian element".into()));
        }
        let target = Variety::lie(self.variety.rank);
        let mut out = Element::zero(target);
        for (m, c) in &self.terms {
            let l = m.letters();
            let mut acc = Element::var(target, l[0] as usize);
            for &t in &l[1..] {
                acc = &acc * &Element::var(target, t as usize);
            }
            out = &out + &acc.scale(c);
        }
        Ok(out)
    }

    /// Projection of a free Lie element onto the free metabelian algebra, by
    /// evaluating standard bracketings with the metabelian product.
    pub fn project_metabelian(&self) -> Result<Element> {
        if self.variety.kind != VarietyKind::FreeLie {
            return Err(Error::Unsupported("projection of a non-Lie element".into()));
        }
        let target = Variety::metabelian(self.variety.rank);
        let gens: Vec<Element> = (0..self.variety.rank).map(|i| Element::var(target, i)).collect();
        let mut memo = HashMap::new();
        let mut out = Element::zero(target);
        for (m, c) in &self.terms {
            let v = eval_monomial(VarietyKind::FreeLie, m, &gens, usize::MAX, &mut memo)?;
            out = &out + &v.scale(c);
        }
        Ok(out)
    }

    /// Rebuilds the element through [`Element::from_terms`]; must be the identity.
    pub fn renormalized(&self) -> Result<Element> {
        Element::from_terms(self.variety, self.terms.clone())
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_empty() {
                s.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    s.push_str(&abs.to_string());
                    s.push('*');
                }
                s.push_str(&format_monomial(self.variety.kind, m, names));
            }
        }
        s
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&self.variety.default_names()))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.variety)
    }
}

pub(crate) fn mul_monomials(kind: VarietyKind, a: &Monomial, b: &Monomial, mut emit: impl FnMut(Monomial, Rational)) {
    match kind {
        VarietyKind::Polynomial => emit(a.merge_sorted(b), Rational::one()),
        VarietyKind::FreeAssociative => emit(a.concat(b), Rational::one()),
        VarietyKind::FreeLie => {
            for (m, k) in lie::bracket(a, b).iter() {
                emit(m.clone(), int(k));
            }
        }
        VarietyKind::MetabelianLie => {
            for (m, k) in metabelian::bracket(a, b) {
                emit(m, Rational::from_integer(k.into()));
            }
        }
    }
}

fn eval_monomial(
    kind: VarietyKind,
    m: &Monomial,
    args: &[Element],
    max_degree: usize,
    memo: &mut HashMap<Monomial, Element>,
) -> Result<Element> {
    let target = args[0].variety;
    let l = m.letters();
    if l.is_empty() {
        return Element::one(target);
    }
    if l.len() == 1 {
        return Ok(args[l[0] as usize].truncate(max_degree));
    }
    if let Some(hit) = memo.get(m) {
        return Ok(hit.clone());
    }
    let v = match kind {
        VarietyKind::Polynomial | VarietyKind::FreeAssociative | VarietyKind::MetabelianLie => {
            let mut acc = args[l[0] as usize].truncate(max_degree);
            for &x in &l[1..] {
                acc = acc.mul_truncated(&args[x as usize], max_degree);
            }
            acc
        }
        VarietyKind::FreeLie => {
            let (u, v) = lie::factors(m);
            let eu = eval_monomial(kind, &u, args, max_degree, memo)?;
            let ev = eval_monomial(kind, &v, args, max_degree, memo)?;
            eu.mul_truncated(&ev, max_degree)
        }
    };
    memo.insert(m.clone(), v.clone());
    Ok(v)
}

fn name(names: &[String], l: Letter) -> String {
    names.get(l as usize).cloned().unwrap_or_else(|| format!("x{}", l + 1))
}

/// Runs of equal letters are written as powers.
fn format_word(l: &[Letter], names: &[String]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < l.len() {
        let mut j = i;
        while j < l.len() && l[j] == l[i] {
            j += 1;
        }
        let n = name(names, l[i]);
        if j - i > 1 {
            parts.push(format!("{}^{}", n, j - i));
        } else {
            parts.push(n);
        }
        i = j;
    }
    parts.join("*")
}

fn format_lyndon(w: &Monomial, names: &[String]) -> String {
    if w.degree() == 1 {
        return name(names, w.letters()[0]);
    }
    let (u, v) = lie::factors(w);
    format!("[{},{}]", format_lyndon(&u, names), format_lyndon(&v, names))
}

pub(crate) fn format_monomial(kind: VarietyKind, m: &Monomial, names: &[String]) -> String {
    let l = m.letters();
    match kind {
        VarietyKind::Polynomial | VarietyKind::FreeAssociative => format_word(l, names),
        VarietyKind::FreeLie => format_lyndon(m, names),
        VarietyKind::MetabelianLie => {
            let mut s = name(names, l[0]);
            for &x in &l[1..] {
                s = format!("[{},{}]", s, name(names, x));
            }
            s
        }
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("variety mismatch in add")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.checked_sub(rhs).expect("variety mismatch in sub")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs).expect("variety mismatch in mul")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            variety: self.variety,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}
