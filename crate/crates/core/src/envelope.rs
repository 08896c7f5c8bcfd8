//! The multiplicative universal enveloping algebra `U(A)` and its trace
//! quotient `U / ([U,U] + R)`.
//!
//! Representations, by variety:
//!
//! * `Polynomial`: `U = A`, a commutative polynomial (left key, sorted word);
//! * `FreeAssociative`: `U = A ⊗ A^op`, pairs of words `a ⊗ b` acting as
//!   `m -> a m b`;
//! * `FreeLie`: `U` is the free associative algebra, a word `w1..wk` acting
//!   as `ad(w1) .. ad(wk)`;
//! * `MetabelianLie`: the reduced algebra `U/R = Q[t1..tn]`, where `R` is
//!   generated by the operators of brackets and `t_i` is the image of `L_{y_i}`.
//!
//! The radical `R` is taken to be zero for the first three varieties. That is
//! a modeling assumption, not something computed.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::freealg::{add_term, int, lie_assoc_image, Element, Variety, VarietyKind};
use crate::word::Monomial;
use crate::Rational;

type Key = (Monomial, Monomial);

/// An element of `U(A)` (or of `U/R` for metabelian algebras).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EnvElement {
    variety: Variety,
    terms: BTreeMap<Key, Rational>,
}

/// A class in `U / ([U,U] + R)`, stored in necklace normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TraceClass {
    variety: Variety,
    terms: BTreeMap<Key, Rational>,
}

fn left_key(m: Monomial) -> Key {
    (m, Monomial::empty())
}

impl EnvElement {
    pub fn zero(variety: Variety) -> Self {
        EnvElement {
            variety,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(variety: Variety) -> Self {
        Self::scalar(variety, Rational::one())
    }

    pub fn scalar(variety: Variety, c: Rational) -> Self {
        let mut e = Self::zero(variety);
        add_term(&mut e.terms, left_key(Monomial::empty()), c);
        e
    }

    /// The generator `t_i` of the reduced metabelian envelope, or `L_{x_i}` elsewhere.
    pub fn operator_of_generator(variety: Variety, i: usize) -> Result<Self> {
        Ok(left_mul(&Element::generator(variety, i)?))
    }

    /// Builds from raw keys. Keys are `(word, word)` for associative algebras
    /// and `(word, empty)` otherwise; commutative keys are sorted.
    pub fn from_terms<I>(variety: Variety, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Monomial, Rational)>,
    {
        let mut e = Self::zero(variety);
        for (a, b, c) in terms {
            if a.max_letter().is_some_and(|l| l >= variety.rank())
                || b.max_letter().is_some_and(|l| l >= variety.rank())
            {
                return Err(Error::IndexOutOfRange {
                    index: a.max_letter().max(b.max_letter()).unwrap_or(0),
                    rank: variety.rank(),
                });
            }
            let key = match variety.kind() {
                VarietyKind::FreeAssociative => (a, b),
                VarietyKind::FreeLie => {
                    if !b.is_empty() {
                        return Err(Error::Unsupported("right factor in a Lie envelope".into()));
                    }
                    (a, b)
                }
                VarietyKind::Polynomial | VarietyKind::MetabelianLie => {
                    if !b.is_empty() {
                        return Err(Error::Unsupported("right factor in a commutative envelope".into()));
                    }
                    (a.sorted(), b)
                }
            };
            add_term(&mut e.terms, key, c);
        }
        Ok(e)
    }

    pub(crate) fn from_map_unchecked(variety: Variety, terms: BTreeMap<Key, Rational>) -> Self {
        EnvElement { variety, terms }
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn terms(&self) -> &BTreeMap<Key, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, a: &Monomial, b: &Monomial) -> Rational {
        self.terms
            .get(&(a.clone(), b.clone()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn checked_add(&self, other: &EnvElement) -> Result<EnvElement> {
        self.variety.check_same(&other.variety)?;
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            add_term(&mut terms, k.clone(), c.clone());
        }
        Ok(EnvElement {
            variety: self.variety,
            terms,
        })
    }

    pub fn checked_sub(&self, other: &EnvElement) -> Result<EnvElement> {
        self.checked_add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> EnvElement {
        if c.is_zero() {
            return EnvElement::zero(self.variety);
        }
        EnvElement {
            variety: self.variety,
            terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect(),
        }
    }

    /// Operator composition: `(u v)(m) = u(v(m))`.
    pub fn checked_mul(&self, other: &EnvElement) -> Result<EnvElement> {
        self.variety.check_same(&other.variety)?;
        let mut terms = BTreeMap::new();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                let key = match self.variety.kind() {
                    VarietyKind::Polynomial | VarietyKind::MetabelianLie => (a.merge_sorted(c), Monomial::empty()),
                    VarietyKind::FreeLie => (a.concat(c), Monomial::empty()),
                    VarietyKind::FreeAssociative => (a.concat(c), d.concat(b)),
                };
                add_term(&mut terms, key, x * y);
            }
        }
        Ok(EnvElement {
            variety: self.variety,
            terms,
        })
    }

    pub fn commutator(&self, other: &EnvElement) -> Result<EnvElement> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    /// Applies the operator to an element of `A`.
    pub fn apply(&self, m: &Element) -> Result<Element> {
        env_apply(self, m)
    }

    /// Image under the map of `U` induced by the endomorphism `x_i -> images[i]`.
    pub fn induced(&self, images: &[Element]) -> Result<EnvElement> {
        let v = self.variety;
        if images.len() != v.rank() {
            return Err(Error::ArityMismatch {
                expected: v.rank(),
                found: images.len(),
            });
        }
        for im in images {
            v.check_same(&im.variety())?;
        }
        let mut out = EnvElement::zero(v);
        match v.kind() {
            VarietyKind::Polynomial => {
                let poly = self.left_element();
                out = from_left_element(v, &poly.substitute(images)?);
            }
            VarietyKind::FreeAssociative => {
                for ((a, b), c) in &self.terms {
                    let fa = word_element(v, a).substitute(images)?;
                    let fb = word_element(v, b).substitute(images)?;
                    for (p, x) in fa.terms() {
                        for (q, y) in fb.terms() {
                            add_term(&mut out.terms, (p.clone(), q.clone()), c * x * y);
                        }
                    }
                }
            }
            VarietyKind::FreeLie => {
                let a = Variety::associative(v.rank());
                let assoc: Vec<Element> = images.iter().map(|e| e.to_associative()).collect::<Result<_>>()?;
                for ((w, _), c) in &self.terms {
                    let img = word_element(a, w).substitute(&assoc)?;
                    for (p, x) in img.terms() {
                        add_term(&mut out.terms, left_key(p.clone()), c * x);
                    }
                }
            }
            VarietyKind::MetabelianLie => {
                let t: Vec<Element> = images.iter().map(linear_as_t).collect();
                let poly = self.left_element();
                out = from_left_element(v, &poly.substitute(&t)?);
            }
        }
        Ok(out)
    }

    /// The left keys as an element of the carrier algebra (polynomial for
    /// commutative cases, free associative for Lie). Associative envelopes
    /// have no such carrier; their right factors are ignored here.
    pub(crate) fn left_element(&self) -> Element {
        let carrier = carrier(self.variety);
        let mut terms = BTreeMap::new();
        for ((a, _), c) in &self.terms {
            add_term(&mut terms, a.clone(), c.clone());
        }
        Element::from_map_unchecked(carrier, terms)
    }

    pub fn trace_class(&self) -> TraceClass {
        trace_class(self)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        format_terms(self.variety, &self.terms, names)
    }
}

impl fmt::Display for EnvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&self.variety.default_names()))
    }
}

impl fmt::Debug for EnvElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U[{}]({})", self.variety, self)
    }
}

/// Algebra in which the left keys of an envelope element live.
fn carrier(v: Variety) -> Variety {
    match v.kind() {
        VarietyKind::FreeLie | VarietyKind::FreeAssociative => Variety::associative(v.rank()),
        VarietyKind::Polynomial | VarietyKind::MetabelianLie => Variety::polynomial(v.rank()),
    }
}

fn word_element(carrier: Variety, w: &Monomial) -> Element {
    let mut terms = BTreeMap::new();
    terms.insert(w.clone(), Rational::one());
    Element::from_map_unchecked(carrier, terms)
}

fn from_left_element(v: Variety, e: &Element) -> EnvElement {
    EnvElement {
        variety: v,
        terms: e
            .terms()
            .iter()
            .map(|(m, c)| (left_key(m.clone()), c.clone()))
            .collect(),
    }
}

/// Linear part of a metabelian element, as a linear form in `t1..tn`.
fn linear_as_t(e: &Element) -> Element {
    let p = Variety::polynomial(e.variety().rank());
    let terms = e
        .terms()
        .iter()
        .filter(|(m, _)| m.degree() == 1)
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    Element::from_map_unchecked(p, terms)
}

/// The operator `L_a` of left multiplication by `a`.
pub fn left_mul(a: &Element) -> EnvElement {
    let v = a.variety();
    let mut out = EnvElement::zero(v);
    match v.kind() {
        VarietyKind::Polynomial | VarietyKind::FreeAssociative => {
            for (m, c) in a.terms() {
                add_term(&mut out.terms, left_key(m.clone()), c.clone());
            }
        }
        VarietyKind::FreeLie => {
            for (m, c) in a.terms() {
                for (w, k) in lie_assoc_image(m).iter() {
                    add_term(&mut out.terms, left_key(w.clone()), c * int(k));
                }
            }
        }
        VarietyKind::MetabelianLie => {
            for (m, c) in a.terms() {
                if m.degree() == 1 {
                    add_term(&mut out.terms, left_key(m.clone()), c.clone());
                }
            }
        }
    }
    out
}

/// The operator `R_a` of right multiplication by `a`; `-L_a` in Lie varieties.
pub fn right_mul(a: &Element) -> EnvElement {
    let v = a.variety();
    match v.kind() {
        VarietyKind::Polynomial => left_mul(a),
        VarietyKind::FreeAssociative => {
            let mut out = EnvElement::zero(v);
            for (m, c) in a.terms() {
                add_term(&mut out.terms, (Monomial::empty(), m.clone()), c.clone());
            }
            out
        }
        VarietyKind::FreeLie | VarietyKind::MetabelianLie => left_mul(a).scale(&-Rational::one()),
    }
}

pub fn env_mul(u: &EnvElement, v: &EnvElement) -> Result<EnvElement> {
    u.checked_mul(v)
}

/// Applies `u` to `m`. In the metabelian case `U/R` acts only on the derived
/// algebra, so `m` must have no linear part.
pub fn env_apply(u: &EnvElement, m: &Element) -> Result<Element> {
    let v = u.variety;
    v.check_same(&m.variety())?;
    let mut out = Element::zero(v);
    match v.kind() {
        VarietyKind::Polynomial => {
            return u.left_element().checked_mul(m);
        }
        VarietyKind::FreeAssociative => {
            for ((a, b), c) in &u.terms {
                let term = &(&word_element(v, a) * m) * &word_element(v, b);
                out = &out + &term.scale(c);
            }
        }
        VarietyKind::FreeLie | VarietyKind::MetabelianLie => {
            if v.kind() == VarietyKind::MetabelianLie && m.min_degree().is_some_and(|d| d < 2) {
                return Err(Error::NotInDerivedAlgebra);
            }
            for ((w, _), c) in &u.terms {
                let mut acc = m.clone();
                for &l in w.letters().iter().rev() {
                    acc = &Element::var(v, l as usize) * &acc;
                }
                out = &out + &acc.scale(c);
            }
        }
    }
    Ok(out)
}

pub fn trace_class(u: &EnvElement) -> TraceClass {
    let mut terms = BTreeMap::new();
    for ((a, b), c) in &u.terms {
        let key = match u.variety.kind() {
            VarietyKind::Polynomial | VarietyKind::MetabelianLie => (a.clone(), b.clone()),
            VarietyKind::FreeAssociative | VarietyKind::FreeLie => (a.necklace(), b.necklace()),
        };
        add_term(&mut terms, key, c.clone());
    }
    TraceClass {
        variety: u.variety,
        terms,
    }
}

impl TraceClass {
    pub fn zero(variety: Variety) -> Self {
        TraceClass {
            variety,
            terms: BTreeMap::new(),
        }
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Necklace keys with their coefficients.
    pub fn terms(&self) -> &BTreeMap<Key, Rational> {
        &self.terms
    }

    pub fn checked_add(&self, other: &TraceClass) -> Result<TraceClass> {
        self.variety.check_same(&other.variety)?;
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            add_term(&mut terms, k.clone(), c.clone());
        }
        Ok(TraceClass {
            variety: self.variety,
            terms,
        })
    }

    pub fn checked_sub(&self, other: &TraceClass) -> Result<TraceClass> {
        self.checked_add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> TraceClass {
        if c.is_zero() {
            return TraceClass::zero(self.variety);
        }
        TraceClass {
            variety: self.variety,
            terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect(),
        }
    }

    /// The representative envelope element whose keys are the necklaces themselves.
    pub fn lift(&self) -> EnvElement {
        EnvElement {
            variety: self.variety,
            terms: self.terms.clone(),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        format_terms(self.variety, &self.terms, names)
    }
}

impl fmt::Display for TraceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&self.variety.default_names()))
    }
}

impl fmt::Debug for TraceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tr[{}]({})", self.variety, self)
    }
}

fn format_word(kind: VarietyKind, w: &Monomial, names: &[String]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let carrier_kind = match kind {
        VarietyKind::FreeLie | VarietyKind::FreeAssociative => VarietyKind::FreeAssociative,
        _ => VarietyKind::Polynomial,
    };
    if kind == VarietyKind::MetabelianLie {
        let t: Vec<String> = (1..=names.len().max(w.max_letter().unwrap_or(0) + 1))
            .map(|i| format!("t{i}"))
            .collect();
        return crate::freealg::format_monomial(carrier_kind, w, &t);
    }
    crate::freealg::format_monomial(carrier_kind, w, names)
}

fn format_terms(v: Variety, terms: &BTreeMap<Key, Rational>, names: &[String]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (idx, ((a, b), c)) in terms.iter().enumerate() {
        let neg = c < &Rational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if idx == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let body = if v.kind() == VarietyKind::FreeAssociative {
            format!(
                "{}⊗{}",
                format_word(v.kind(), a, names),
                format_word(v.kind(), b, names)
            )
        } else {
            format_word(v.kind(), a, names)
        };
        if body == "1" {
            s.push_str(&abs.to_string());
        } else {
            if !abs.is_one() {
                s.push_str(&abs.to_string());
                s.push('*');
            }
            s.push_str(&body);
        }
    }
    s
}
