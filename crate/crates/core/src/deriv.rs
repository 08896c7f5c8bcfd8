//! Derivations `D = f_1 ∂_1 + .. + f_n ∂_n` of a free algebra: evaluation,
//! the left-symmetric product, the Lie bracket, the induced derivation of the
//! enveloping algebra, and divergence.
//!
//! A derivation is homogeneous of degree `i` (it lies in `L_i`) when every
//! nonzero coordinate is homogeneous of degree `i + 1`. With this grading the
//! Euler derivation `E = Σ x_j ∂_j` satisfies `[E, D] = i·D` for `D ∈ L_i`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::One;

use crate::envelope::{EnvElement, TraceClass};
use crate::error::{Error, Result};
use crate::fox::{fox_derivative, JacobianMatrix};
use crate::freealg::{add_term, lyndon_factors, Element, Variety, VarietyKind};
use crate::word::Monomial;
use crate::Rational;

/// Divergence values live in the trace quotient.
pub type DivergenceValue = TraceClass;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    variety: Variety,
    coords: Vec<Element>,
}

impl Derivation {
    pub fn new(variety: Variety, coords: Vec<Element>) -> Result<Self> {
        if coords.len() != variety.rank() {
            return Err(Error::ArityMismatch {
                expected: variety.rank(),
                found: coords.len(),
            });
        }
        for c in &coords {
            variety.check_same(&c.variety())?;
        }
        Ok(Derivation { variety, coords })
    }

    pub fn zero(variety: Variety) -> Self {
        Derivation {
            variety,
            coords: vec![Element::zero(variety); variety.rank()],
        }
    }

    /// `f ∂_i`.
    pub fn single(variety: Variety, i: usize, f: Element) -> Result<Self> {
        variety.check_index(i)?;
        variety.check_same(&f.variety())?;
        let mut d = Self::zero(variety);
        d.coords[i] = f;
        Ok(d)
    }

    /// The Euler derivation `Σ x_j ∂_j`.
    pub fn euler(variety: Variety) -> Self {
        Derivation {
            variety,
            coords: (0..variety.rank()).map(|j| Element::var(variety, j)).collect(),
        }
    }

    /// `x_a ∂_b`, spanning `L_0`.
    pub fn linear(variety: Variety, a: usize, b: usize) -> Result<Self> {
        Self::single(variety, b, Element::generator(variety, a)?)
    }

    /// `∂_i`, spanning `L_{-1}`; only in unital varieties.
    pub fn partial(variety: Variety, i: usize) -> Result<Self> {
        Self::single(variety, i, Element::one(variety)?)
    }

    /// The inner derivation `x -> [a, x]` of a Lie algebra.
    pub fn ad(a: &Element) -> Result<Self> {
        let v = a.variety();
        if !v.kind().is_lie() {
            return Err(Error::Unsupported(format!("inner derivation ad(a) in {v}")));
        }
        Ok(Derivation {
            variety: v,
            coords: (0..v.rank()).map(|j| a * &Element::var(v, j)).collect(),
        })
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn coords(&self) -> &[Element] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Element {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Element::is_zero)
    }

    /// `Some(i)` when the derivation is nonzero and lies in `L_i`.
    pub fn degree(&self) -> Option<isize> {
        let mut deg = None;
        for c in self.coords.iter().filter(|c| !c.is_zero()) {
            if !c.is_homogeneous() {
                return None;
            }
            let d = c.degree().unwrap() as isize - 1;
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Graded parts keyed by degree; they sum back to `self`.
    pub fn homogeneous_parts(&self) -> BTreeMap<isize, Derivation> {
        let mut out: BTreeMap<isize, Derivation> = BTreeMap::new();
        for (j, c) in self.coords.iter().enumerate() {
            for (d, part) in c.homogeneous_components() {
                out.entry(d as isize - 1)
                    .or_insert_with(|| Derivation::zero(self.variety))
                    .coords[j] = part;
            }
        }
        out
    }

    pub fn homogeneous_part(&self, i: isize) -> Derivation {
        if i < -1 {
            return Derivation::zero(self.variety);
        }
        Derivation {
            variety: self.variety,
            coords: self
                .coords
                .iter()
                .map(|c| c.homogeneous_component((i + 1) as usize))
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &Derivation) -> Result<Derivation> {
        self.variety.check_same(&other.variety)?;
        Ok(Derivation {
            variety: self.variety,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Derivation) -> Result<Derivation> {
        self.checked_add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Derivation {
        Derivation {
            variety: self.variety,
            coords: self.coords.iter().map(|f| f.scale(c)).collect(),
        }
    }

    /// `D(a)`, the Leibniz extension of `x_i -> f_i`.
    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.variety.check_same(&a.variety())?;
        let v = self.variety;
        let mut out = Element::zero(v);
        match v.kind() {
            VarietyKind::Polynomial | VarietyKind::FreeAssociative => {
                for (m, c) in a.terms() {
                    let l = m.letters();
                    for p in 0..l.len() {
                        let pre = word(v, &l[..p]);
                        let post = word(v, &l[p + 1..]);
                        let t = &(&pre * &self.coords[l[p] as usize]) * &post;
                        out = &out + &t.scale(c);
                    }
                }
            }
            VarietyKind::FreeLie => {
                let mut memo = HashMap::new();
                for (m, c) in a.terms() {
                    out = &out + &self.apply_lyndon(m, &mut memo).scale(c);
                }
            }
            VarietyKind::MetabelianLie => {
                for (m, c) in a.terms() {
                    let l = m.letters();
                    let mut val = Element::var(v, l[0] as usize);
                    let mut dval = self.coords[l[0] as usize].clone();
                    for &z in &l[1..] {
                        let y = Element::var(v, z as usize);
                        dval = &(&dval * &y) + &(&val * &self.coords[z as usize]);
                        val = &val * &y;
                    }
                    out = &out + &dval.scale(c);
                }
            }
        }
        Ok(out)
    }

    fn apply_lyndon(&self, m: &Monomial, memo: &mut HashMap<Monomial, Element>) -> Element {
        if m.degree() == 1 {
            return self.coords[m.letters()[0] as usize].clone();
        }
        if let Some(hit) = memo.get(m) {
            return hit.clone();
        }
        let (u, w) = lyndon_factors(m);
        let eu = Element::from_map_unchecked(self.variety, [(u.clone(), Rational::one())].into());
        let ew = Element::from_map_unchecked(self.variety, [(w.clone(), Rational::one())].into());
        let du = self.apply_lyndon(&u, memo);
        let dw = self.apply_lyndon(&w, memo);
        let r = &(&du * &ew) + &(&eu * &dw);
        memo.insert(m.clone(), r.clone());
        r
    }

    /// `D1 · D2`: the derivation whose coordinates are `D1` applied to those of `D2`.
    pub fn lsym(&self, other: &Derivation) -> Result<Derivation> {
        self.variety.check_same(&other.variety)?;
        Ok(Derivation {
            variety: self.variety,
            coords: other.coords.iter().map(|g| self.apply(g)).collect::<Result<_>>()?,
        })
    }

    /// `[D1, D2] = D1·D2 - D2·D1`.
    pub fn bracket(&self, other: &Derivation) -> Result<Derivation> {
        self.lsym(other)?.checked_sub(&other.lsym(self)?)
    }

    /// The induced derivation `D*` of the enveloping algebra, applied to `u`.
    pub fn star_extend(&self, u: &EnvElement) -> Result<EnvElement> {
        let v = self.variety;
        v.check_same(&u.variety())?;
        let mut out: BTreeMap<(Monomial, Monomial), Rational> = BTreeMap::new();
        match v.kind() {
            VarietyKind::Polynomial => {
                let d = self.apply(&u.left_element())?;
                for (m, c) in d.terms() {
                    add_term(&mut out, (m.clone(), Monomial::empty()), c.clone());
                }
            }
            VarietyKind::FreeAssociative => {
                for ((a, b), c) in u.terms() {
                    let da = self.apply(&word(v, a.letters()))?;
                    for (p, x) in da.terms() {
                        add_term(&mut out, (p.clone(), b.clone()), c * x);
                    }
                    let db = self.apply(&word(v, b.letters()))?;
                    for (p, x) in db.terms() {
                        add_term(&mut out, (a.clone(), p.clone()), c * x);
                    }
                }
            }
            VarietyKind::FreeLie => {
                let a = Variety::associative(v.rank());
                let images = self
                    .coords
                    .iter()
                    .map(|f| f.to_associative())
                    .collect::<Result<Vec<_>>>()?;
                let lifted = Derivation::new(a, images)?;
                let d = lifted.apply(&u.left_element())?;
                for (m, c) in d.terms() {
                    add_term(&mut out, (m.clone(), Monomial::empty()), c.clone());
                }
            }
            VarietyKind::MetabelianLie => {
                let p = Variety::polynomial(v.rank());
                let t = self
                    .coords
                    .iter()
                    .map(|f| {
                        let lin = f.homogeneous_component(1);
                        Element::from_map_unchecked(p, lin.terms().clone())
                    })
                    .collect();
                let d = Derivation::new(p, t)?.apply(&u.left_element())?;
                for (m, c) in d.terms() {
                    add_term(&mut out, (m.clone(), Monomial::empty()), c.clone());
                }
            }
        }
        Ok(EnvElement::from_map_unchecked(v, out))
    }

    /// `D*` on the trace quotient: lift, extend, and renormalize.
    pub fn star_extend_trace(&self, t: &TraceClass) -> Result<TraceClass> {
        Ok(self.star_extend(&t.lift())?.trace_class())
    }

    pub fn jacobian(&self) -> Result<JacobianMatrix> {
        JacobianMatrix::of_tuple(self.variety, &self.coords)
    }

    /// The class of `Σ ∂f_i/∂x_i` in `U / ([U,U] + R)`.
    pub fn divergence(&self) -> Result<DivergenceValue> {
        let mut acc = EnvElement::zero(self.variety);
        for (i, f) in self.coords.iter().enumerate() {
            acc = acc.checked_add(&fox_derivative(f, i)?)?;
        }
        Ok(acc.trace_class())
    }

    /// Conjugate `α D α^{-1}` by the linear automorphism with matrix `g`
    /// (row `k` holds the image of `x_k`).
    pub fn conjugate(&self, g: &crate::linalg::Matrix) -> Result<Derivation> {
        crate::morphism::conjugate_derivation(g, self)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let name = names.get(j).cloned().unwrap_or_else(|| format!("x{}", j + 1));
                format!("({})*d[{}]", c.display_with(names), name)
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&self.variety.default_names()))
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self, self.variety)
    }
}

fn word(v: Variety, l: &[u16]) -> Element {
    Element::from_map_unchecked(v, [(Monomial::new(l.to_vec()), Rational::one())].into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::left_mul;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn poly3() -> (Variety, Element, Element, Element) {
        let v = Variety::polynomial(3);
        (v, Element::var(v, 0), Element::var(v, 1), Element::var(v, 2))
    }

    #[test]
    fn apply_examples() {
        let v = Variety::polynomial(2);
        let (x, y) = (Element::var(v, 0), Element::var(v, 1));
        let d = Derivation::single(v, 0, y.clone()).unwrap();
        assert_eq!(d.apply(&(&x * &x)).unwrap(), (&x * &y).scale(&q(2)));
        assert!(d.apply(&Element::one(v).unwrap()).unwrap().is_zero());

        let a = Variety::associative(2);
        let (x1, x2) = (Element::var(a, 0), Element::var(a, 1));
        let c = x1.commutator(&x2).unwrap();
        let d = Derivation::single(a, 0, &c * &c).unwrap();
        let expected = (&c * &c).commutator(&x2).unwrap();
        assert_eq!(d.apply(&c).unwrap(), expected);
    }

    #[test]
    fn lsym_examples() {
        let v = Variety::polynomial(2);
        let (x, y) = (Element::var(v, 0), Element::var(v, 1));
        let d1 = Derivation::single(v, 0, y.clone()).unwrap();
        let d2 = Derivation::single(v, 1, x).unwrap();
        assert_eq!(d1.lsym(&d2).unwrap(), Derivation::single(v, 1, y.clone()).unwrap());
        let d = Derivation::single(v, 0, &y * &y).unwrap();
        assert!(d.lsym(&d).unwrap().is_zero());
    }

    #[test]
    fn bracket_examples() {
        let (v, _x, y, z) = poly3();
        let d1 = Derivation::single(v, 0, &y * &y).unwrap();
        let d2 = Derivation::single(v, 1, &z * &z).unwrap();
        let b = d1.bracket(&d2).unwrap();
        let expected = Derivation::single(v, 0, (&y * &(&z * &z)).scale(&q(-2))).unwrap();
        assert_eq!(b, expected);
        assert!(d1.bracket(&d1).unwrap().is_zero());
    }

    #[test]
    fn euler_bracket_scales_by_degree() {
        let (v, x, y, z) = poly3();
        let d = Derivation::new(v, vec![&(&y * &z) * &z, &(&x * &x) * &y, Element::zero(v)]).unwrap();
        assert_eq!(d.degree(), Some(2));
        let e = Derivation::euler(v);
        assert_eq!(e.bracket(&d).unwrap(), d.scale(&q(2)));

        let l = Variety::lie(3);
        let g = |i| Element::var(l, i);
        let d = Derivation::single(l, 0, &g(1) * &g(2)).unwrap();
        assert_eq!(Derivation::euler(l).bracket(&d).unwrap(), d);
    }

    #[test]
    fn star_examples() {
        let a = Variety::associative(2);
        let x = |i| Element::var(a, i);
        let d = Derivation::single(a, 0, x(1)).unwrap();
        let u = EnvElement::from_terms(a, [(Monomial::letter(0), Monomial::letter(0), Rational::one())]).unwrap();
        let expected = EnvElement::from_terms(
            a,
            [
                (Monomial::letter(1), Monomial::letter(0), Rational::one()),
                (Monomial::letter(0), Monomial::letter(1), Rational::one()),
            ],
        )
        .unwrap();
        assert_eq!(d.star_extend(&u).unwrap(), expected);

        let l = Variety::lie(2);
        let g = |i| Element::var(l, i);
        let br = &g(0) * &g(1);
        let d = Derivation::single(l, 0, br.clone()).unwrap();
        assert_eq!(d.star_extend(&left_mul(&g(0))).unwrap(), left_mul(&br));
    }

    #[test]
    fn divergence_examples() {
        let (v, x, y, z) = poly3();
        let c = &(&z * &x) - &(&y * &y);
        let nagata = Derivation::new(v, vec![(&y * &c).scale(&q(2)), &z * &c, Element::zero(v)]).unwrap();
        assert!(nagata.divergence().unwrap().is_zero());

        let a = Variety::associative(3);
        let g = |i| Element::var(a, i);
        let c = &(&g(0) * &g(2)) - &(&g(2) * &g(1));
        let anick = Derivation::new(a, vec![&g(2) * &c, &c * &g(2), Element::zero(a)]).unwrap();
        assert!(anick.divergence().unwrap().is_zero());

        let l = Variety::lie(2);
        let h = |i| Element::var(l, i);
        let d = Derivation::single(l, 0, &h(0) * &h(1)).unwrap();
        let div = d.divergence().unwrap();
        assert_eq!(div, left_mul(&h(1)).scale(&q(-1)).trace_class());

        let m = Variety::metabelian(3);
        let y = |i| Element::var(m, i);
        assert!(Derivation::ad(&(&y(0) * &y(1)))
            .unwrap()
            .divergence()
            .unwrap()
            .is_zero());
        let tau = Derivation::single(m, 0, &y(1) * &y(2)).unwrap();
        assert!(tau.divergence().unwrap().is_zero());
    }
}
