//! Fox derivatives and Jacobian matrices over the enveloping algebra.
//!
//! For an element `a`, the universal derivation is `D(a) = Σ ∂a/∂x_i · y_i`
//! with coefficients in `U(A)`. Metabelian values live in `U/R`.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::envelope::EnvElement;
use crate::error::{Error, Result};
use crate::freealg::{add_term, int, lie_fox, Element, Variety, VarietyKind};
use crate::word::Monomial;
use crate::Rational;

/// `∂a/∂x_i`, with `i` zero-based.
pub fn fox_derivative(a: &Element, i: usize) -> Result<EnvElement> {
    let v = a.variety();
    v.check_index(i)?;
    let mut terms: BTreeMap<(Monomial, Monomial), Rational> = BTreeMap::new();
    let e = Monomial::empty;
    for (m, c) in a.terms() {
        let l = m.letters();
        match v.kind() {
            VarietyKind::Polynomial => {
                let k = l.iter().filter(|&&x| x as usize == i).count();
                if k > 0 {
                    let pos = l.iter().position(|&x| x as usize == i).unwrap();
                    let mut rest = l.to_vec();
                    rest.remove(pos);
                    add_term(
                        &mut terms,
                        (Monomial::new(rest), e()),
                        c * Rational::from_integer(k.into()),
                    );
                }
            }
            VarietyKind::FreeAssociative => {
                for (p, &x) in l.iter().enumerate() {
                    if x as usize == i {
                        let key = (Monomial::new(l[..p].to_vec()), Monomial::new(l[p + 1..].to_vec()));
                        add_term(&mut terms, key, c.clone());
                    }
                }
            }
            VarietyKind::FreeLie => {
                for (w, k) in lie_fox(m, i) {
                    add_term(&mut terms, (w, e()), c * int(&k));
                }
            }
            VarietyKind::MetabelianLie => metabelian_fox(l, i, c, &mut terms),
        }
    }
    Ok(EnvElement::from_map_unchecked(v, terms))
}

/// `∂[a,b,T]/∂y_i = (-1)^|T| t^T (t_a δ_bi - t_b δ_ai)`, `∂y_a/∂y_i = δ_ai`.
fn metabelian_fox(l: &[u16], i: usize, c: &Rational, terms: &mut BTreeMap<(Monomial, Monomial), Rational>) {
    if l.len() == 1 {
        if l[0] as usize == i {
            add_term(terms, (Monomial::empty(), Monomial::empty()), c.clone());
        }
        return;
    }
    let (a, b, tail) = (l[0], l[1], &l[2..]);
    let sign = if tail.len() % 2 == 0 { c.clone() } else { -c.clone() };
    let mono = |x: u16| {
        let mut t = tail.to_vec();
        t.push(x);
        (Monomial::new(t).sorted(), Monomial::empty())
    };
    if b as usize == i {
        add_term(terms, mono(a), sign.clone());
    }
    if a as usize == i {
        add_term(terms, mono(b), -sign);
    }
}

/// Matrix over the enveloping algebra; `entries[i][j] = ∂f_i/∂x_j`.
#[derive(Clone, PartialEq, Eq)]
pub struct JacobianMatrix {
    variety: Variety,
    entries: Vec<Vec<EnvElement>>,
}

impl JacobianMatrix {
    pub fn new(variety: Variety, entries: Vec<Vec<EnvElement>>) -> Result<Self> {
        let n = variety.rank();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::ArityMismatch {
                expected: n,
                found: entries.len(),
            });
        }
        for e in entries.iter().flatten() {
            variety.check_same(&e.variety())?;
        }
        Ok(JacobianMatrix { variety, entries })
    }

    pub fn identity(variety: Variety) -> Self {
        Self::scalar(variety, &Rational::one())
    }

    pub fn zero(variety: Variety) -> Self {
        Self::scalar(variety, &Rational::zero())
    }

    fn scalar(variety: Variety, c: &Rational) -> Self {
        let n = variety.rank();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            EnvElement::scalar(variety, c.clone())
                        } else {
                            EnvElement::zero(variety)
                        }
                    })
                    .collect()
            })
            .collect();
        JacobianMatrix { variety, entries }
    }

    /// Jacobian of the coordinate tuple `(f_1, .., f_n)`.
    pub fn of_tuple(variety: Variety, coords: &[Element]) -> Result<Self> {
        if coords.len() != variety.rank() {
            return Err(Error::ArityMismatch {
                expected: variety.rank(),
                found: coords.len(),
            });
        }
        let entries = coords
            .iter()
            .map(|f| {
                variety.check_same(&f.variety())?;
                (0..variety.rank())
                    .map(|j| fox_derivative(f, j))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(JacobianMatrix { variety, entries })
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &EnvElement {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<EnvElement>] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.variety)
    }

    pub fn checked_mul(&self, other: &JacobianMatrix) -> Result<JacobianMatrix> {
        self.variety.check_same(&other.variety)?;
        let n = self.size();
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let mut acc = EnvElement::zero(self.variety);
                for k in 0..n {
                    let a = &self.entries[i][k];
                    let b = &other.entries[k][j];
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.checked_add(&a.checked_mul(b)?)?;
                    }
                }
                row.push(acc);
            }
            entries.push(row);
        }
        Ok(JacobianMatrix {
            variety: self.variety,
            entries,
        })
    }

    pub fn checked_add(&self, other: &JacobianMatrix) -> Result<JacobianMatrix> {
        self.zip(other, |a, b| a.checked_add(b))
    }

    pub fn checked_sub(&self, other: &JacobianMatrix) -> Result<JacobianMatrix> {
        self.zip(other, |a, b| a.checked_sub(b))
    }

    /// `[J1, J2] = J1 J2 - J2 J1`.
    pub fn commutator(&self, other: &JacobianMatrix) -> Result<JacobianMatrix> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    fn zip(
        &self,
        other: &JacobianMatrix,
        f: impl Fn(&EnvElement, &EnvElement) -> Result<EnvElement>,
    ) -> Result<JacobianMatrix> {
        self.variety.check_same(&other.variety)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| f(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(JacobianMatrix {
            variety: self.variety,
            entries,
        })
    }

    /// Applies `f` to every entry.
    pub fn map(&self, f: impl Fn(&EnvElement) -> Result<EnvElement>) -> Result<JacobianMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(JacobianMatrix {
            variety: self.variety,
            entries,
        })
    }

    /// Entrywise image under the map of `U` induced by `x_i -> images[i]`.
    pub fn induced(&self, images: &[Element]) -> Result<JacobianMatrix> {
        self.map(|e| e.induced(images))
    }

    /// Sum of the diagonal entries, in `U`.
    pub fn trace(&self) -> Result<EnvElement> {
        let mut acc = EnvElement::zero(self.variety);
        for (i, row) in self.entries.iter().enumerate() {
            acc = acc.checked_add(&row[i])?;
        }
        Ok(acc)
    }

    pub fn display_with(&self, names: &[String]) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|e| e.display_with(names)).collect())
            .collect()
    }
}

impl fmt::Debug for JacobianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.variety.default_names();
        f.debug_list().entries(self.display_with(&names)).finish()
    }
}
