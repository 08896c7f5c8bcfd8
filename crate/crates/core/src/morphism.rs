//! Endomorphisms and automorphisms of a free algebra.
//!
//! An endomorphism is the tuple of images `(f_1, .., f_n)` of the generators.
//! Composition follows function composition of homomorphisms:
//! `compose(phi, psi)` is `x -> phi(psi(x))`, whose `k`-th image is
//! `psi_k(f_1, .., f_n)`. With this order the Jacobian chain rule reads
//! `J(phi ∘ psi) = phi(J(psi)) · J(phi)`.

use std::fmt;

use num::Zero;
use serde::Serialize;

use crate::deriv::Derivation;
use crate::error::{Error, Result};
use crate::fox::JacobianMatrix;
use crate::freealg::{Element, Variety};
use crate::linalg::Matrix;
use crate::Rational;

/// Truncation bound used when none is given.
pub const DEFAULT_MAX_DEGREE: usize = 12;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    variety: Variety,
    images: Vec<Element>,
    affine: bool,
}

/// Position of an endomorphism in the filtration `IA(1) ⊇ IA(2) ⊇ ..`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum FiltrationLevel {
    /// Constant part nonzero or linear part not the identity.
    NotIa,
    /// In `IA(i)` but not in `IA(i+1)`.
    Ia(usize),
    /// No deviation from the identity up to the given degree.
    TrivialToBound(usize),
}

impl fmt::Display for FiltrationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationLevel::NotIa => f.write_str("not IA"),
            FiltrationLevel::Ia(i) => write!(f, "IA({i})"),
            FiltrationLevel::TrivialToBound(b) => write!(f, "identity through degree {b}"),
        }
    }
}

impl Endomorphism {
    /// An endomorphism without constant terms.
    pub fn new(variety: Variety, images: Vec<Element>) -> Result<Self> {
        let e = Self::build(variety, images, false)?;
        if e.images.iter().any(|f| !f.constant_term().is_zero()) {
            return Err(Error::UnexpectedConstant);
        }
        Ok(e)
    }

    /// An endomorphism whose images may have constant terms; unital varieties only.
    pub fn new_affine(variety: Variety, images: Vec<Element>) -> Result<Self> {
        if !variety.unital() {
            return Err(Error::ConstantInNonUnital(variety));
        }
        Self::build(variety, images, true)
    }

    fn build(variety: Variety, images: Vec<Element>, affine: bool) -> Result<Self> {
        if images.len() != variety.rank() {
            return Err(Error::ArityMismatch {
                expected: variety.rank(),
                found: images.len(),
            });
        }
        for f in &images {
            variety.check_same(&f.variety())?;
        }
        Ok(Endomorphism {
            variety,
            images,
            affine,
        })
    }

    pub fn identity(variety: Variety) -> Self {
        Endomorphism {
            variety,
            images: (0..variety.rank()).map(|i| Element::var(variety, i)).collect(),
            affine: false,
        }
    }

    /// Linear map `x_k -> Σ_j g[k][j] x_j`.
    pub fn linear(variety: Variety, g: &Matrix) -> Result<Self> {
        let n = variety.rank();
        if g.rows() != n || g.cols() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: g.rows(),
            });
        }
        let images = (0..n)
            .map(|k| {
                (0..n).fold(Element::zero(variety), |acc, j| {
                    &acc + &Element::var(variety, j).scale(g.get(k, j))
                })
            })
            .collect();
        Ok(Endomorphism {
            variety,
            images,
            affine: false,
        })
    }

    /// Affine map `x_k -> Σ_j g[k][j] x_j + c_k`; unital varieties only.
    pub fn affine(variety: Variety, g: &Matrix, c: &[Rational]) -> Result<Self> {
        if c.len() != variety.rank() {
            return Err(Error::ArityMismatch {
                expected: variety.rank(),
                found: c.len(),
            });
        }
        let lin = Self::linear(variety, g)?;
        if c.iter().all(Zero::is_zero) {
            return Ok(lin);
        }
        let images = lin
            .images
            .iter()
            .zip(c)
            .map(|(f, ck)| Ok(f + &Element::constant(variety, ck.clone())?))
            .collect::<Result<Vec<_>>>()?;
        Self::new_affine(variety, images)
    }

    /// `(x_1, .., alpha x_i + f, .., x_n)` with `f` free of `x_i`.
    pub fn elementary(variety: Variety, i: usize, alpha: Rational, f: Element) -> Result<Self> {
        variety.check_index(i)?;
        variety.check_same(&f.variety())?;
        if alpha.is_zero() {
            return Err(Error::ZeroScalar);
        }
        if f.involves(i) {
            return Err(Error::GeneratorInvolved(i + 1));
        }
        let mut images: Vec<Element> = (0..variety.rank()).map(|k| Element::var(variety, k)).collect();
        images[i] = &images[i].scale(&alpha) + &f;
        if f.constant_term().is_zero() {
            Self::new(variety, images)
        } else {
            Self::new_affine(variety, images)
        }
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image(&self, k: usize) -> &Element {
        &self.images[k]
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn has_constants(&self) -> bool {
        self.images.iter().any(|f| !f.constant_term().is_zero())
    }

    pub fn is_identity(&self) -> bool {
        *self.images == *Self::identity(self.variety).images
    }

    /// Matrix of the degree-one part; row `k` holds the coefficients of `f_k`.
    pub fn linear_part(&self) -> Matrix {
        Matrix::from_rows(self.images.iter().map(Element::linear_coefficients).collect())
    }

    pub fn constant_part(&self) -> Vec<Rational> {
        self.images.iter().map(Element::constant_term).collect()
    }

    /// Applies the endomorphism to an element.
    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.variety.check_same(&a.variety())?;
        a.substitute(&self.images)
    }

    pub fn truncate(&self, max_degree: usize) -> Endomorphism {
        let images = self.images.iter().map(|f| f.truncate(max_degree)).collect();
        Endomorphism {
            variety: self.variety,
            affine: self.affine,
            images,
        }
    }

    pub fn jacobian(&self) -> Result<JacobianMatrix> {
        JacobianMatrix::of_tuple(self.variety, &self.images)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self.images.iter().map(|f| f.display_with(names)).collect();
        format!("({})", parts.join(", "))
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&self.variety.default_names()))
    }
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self, self.variety)
    }
}

/// `x -> phi(psi(x))`: the `k`-th image is `psi_k` evaluated at `phi`'s images.
pub fn compose(phi: &Endomorphism, psi: &Endomorphism) -> Result<Endomorphism> {
    compose_truncated(phi, psi, usize::MAX)
}

/// [`compose`] with every term above `max_degree` dropped. Exact through
/// `max_degree` even when `phi` has constant terms, since only `phi` is
/// truncated and `psi` is evaluated in full.
pub fn compose_truncated(phi: &Endomorphism, psi: &Endomorphism, max_degree: usize) -> Result<Endomorphism> {
    phi.variety.check_same(&psi.variety)?;
    let images = psi
        .images
        .iter()
        .map(|g| g.substitute_truncated(&phi.images, max_degree))
        .collect::<Result<Vec<_>>>()?;
    let affine = images.iter().any(|f| !f.constant_term().is_zero());
    Ok(Endomorphism {
        variety: phi.variety,
        images,
        affine,
    })
}

/// `psi` with `compose(phi, psi)` and `compose(psi, phi)` equal to the
/// identity modulo terms of degree above `k`. Requires a zero constant part
/// and an invertible linear part.
pub fn truncated_inverse(phi: &Endomorphism, k: usize) -> Result<Endomorphism> {
    if phi.has_constants() {
        return Err(Error::UnexpectedConstant);
    }
    let v = phi.variety;
    let ginv = phi.linear_part().inverse().ok_or(Error::SingularLinearPart)?;
    let inv_lin = Endomorphism::linear(v, &ginv)?;
    let nonlinear: Vec<Element> = phi.images.iter().map(|f| f - &f.homogeneous_component(1)).collect();
    let nonlinear = Endomorphism {
        variety: v,
        images: nonlinear,
        affine: false,
    };
    // solve x = g psi + N(psi) for psi, i.e. psi = ginv (x - N(psi))
    let mut psi = inv_lin.truncate(k);
    for _ in 0..k.max(1) {
        let n_psi = compose_truncated(&psi, &nonlinear, k)?;
        let rhs: Vec<Element> = (0..v.rank()).map(|j| &Element::var(v, j) - n_psi.image(j)).collect();
        let rhs = Endomorphism {
            variety: v,
            images: rhs,
            affine: false,
        };
        let next = compose_truncated(&rhs, &inv_lin, k)?;
        if next == psi {
            break;
        }
        psi = next;
    }
    Ok(psi)
}

/// The least degree `d >= 2` at which some `f_k - x_k` is nonzero, if any.
fn lowest_deviation(phi: &Endomorphism) -> Option<usize> {
    phi.images
        .iter()
        .enumerate()
        .filter_map(|(k, f)| {
            let dev = f - &Element::var(phi.variety, k);
            dev.min_degree()
        })
        .min()
}

fn linear_ia(phi: &Endomorphism) -> bool {
    !phi.has_constants() && phi.linear_part().is_identity()
}

pub fn ia_level(phi: &Endomorphism, max_degree: usize) -> FiltrationLevel {
    if !linear_ia(phi) {
        return FiltrationLevel::NotIa;
    }
    match lowest_deviation(phi) {
        Some(d) if d <= max_degree => FiltrationLevel::Ia(d - 1),
        _ => FiltrationLevel::TrivialToBound(max_degree),
    }
}

/// `T(phi)`: the lowest-degree deviation from the identity, as a homogeneous
/// derivation. `T(id) = 0`.
pub fn tangent(phi: &Endomorphism) -> Result<Derivation> {
    if phi.has_constants() {
        return Err(Error::NotIa("nonzero constant part".into()));
    }
    if !phi.linear_part().is_identity() {
        return Err(Error::NotIa("linear part is not the identity".into()));
    }
    let v = phi.variety;
    let Some(d) = lowest_deviation(phi) else {
        return Ok(Derivation::zero(v));
    };
    let coords = phi.images.iter().map(|f| f.homogeneous_component(d)).collect();
    Derivation::new(v, coords)
}

/// `[phi, psi] = phi^{-1} ∘ psi^{-1} ∘ phi ∘ psi`, exact through degree `k`.
pub fn group_commutator(phi: &Endomorphism, psi: &Endomorphism, k: usize) -> Result<Endomorphism> {
    let phi_inv = truncated_inverse(phi, k)?;
    let psi_inv = truncated_inverse(psi, k)?;
    let a = compose_truncated(&phi_inv, &psi_inv, k)?;
    let b = compose_truncated(&a, phi, k)?;
    compose_truncated(&b, psi, k)
}

/// `alpha ∘ phi ∘ alpha^{-1}` for the linear automorphism `alpha` with matrix `g`.
pub fn conjugate(g: &Matrix, phi: &Endomorphism) -> Result<Endomorphism> {
    let v = phi.variety;
    let ginv = g.inverse().ok_or(Error::SingularLinearPart)?;
    let alpha = Endomorphism::linear(v, g)?;
    let alpha_inv = Endomorphism::linear(v, &ginv)?;
    compose(&compose(&alpha, phi)?, &alpha_inv)
}

/// `alpha D alpha^{-1}`: coordinate `k` is `alpha(Σ_j ginv[k][j] f_j)`.
pub fn conjugate_derivation(g: &Matrix, d: &Derivation) -> Result<Derivation> {
    let v = d.variety();
    let ginv = g.inverse().ok_or(Error::SingularLinearPart)?;
    let alpha = Endomorphism::linear(v, g)?;
    let coords = (0..v.rank())
        .map(|k| {
            let mixed = (0..v.rank()).fold(Element::zero(v), |acc, j| &acc + &d.coord(j).scale(ginv.get(k, j)));
            alpha.apply(&mixed)
        })
        .collect::<Result<Vec<_>>>()?;
    Derivation::new(v, coords)
}

/// `J(phi ∘ psi) = phi(J(psi)) · J(phi)`, checked exactly.
pub fn chain_rule_check(phi: &Endomorphism, psi: &Endomorphism) -> Result<bool> {
    let lhs = compose(phi, psi)?.jacobian()?;
    let rhs = psi.jacobian()?.induced(&phi.images)?.checked_mul(&phi.jacobian()?)?;
    Ok(lhs == rhs)
}

/// How far an automorphism's stored inverse is known to be correct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "degree", rename_all = "kebab-case")]
pub enum Exactness {
    /// Both composites are exactly the identity.
    Exact,
    /// Both composites agree with the identity through this degree only.
    TruncatedTo(usize),
}

/// An endomorphism together with an inverse and a record of how the inverse
/// was obtained. Invertibility is never decided in general.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    map: Endomorphism,
    inverse: Endomorphism,
    exactness: Exactness,
}

impl Automorphism {
    pub fn identity(variety: Variety) -> Self {
        let id = Endomorphism::identity(variety);
        Automorphism {
            map: id.clone(),
            inverse: id,
            exactness: Exactness::Exact,
        }
    }

    pub fn elementary(variety: Variety, i: usize, alpha: Rational, f: Element) -> Result<Self> {
        let map = Endomorphism::elementary(variety, i, alpha.clone(), f.clone())?;
        let ainv = alpha.recip();
        let g = f.scale(&-ainv.clone());
        let inverse = Endomorphism::elementary(variety, i, ainv, g)?;
        Ok(Automorphism {
            map,
            inverse,
            exactness: Exactness::Exact,
        })
    }

    pub fn linear(variety: Variety, g: &Matrix) -> Result<Self> {
        let ginv = g.inverse().ok_or(Error::SingularLinearPart)?;
        Ok(Automorphism {
            map: Endomorphism::linear(variety, g)?,
            inverse: Endomorphism::linear(variety, &ginv)?,
            exactness: Exactness::Exact,
        })
    }

    /// `x -> g x + c`, with inverse `x -> ginv (x - c)`.
    pub fn affine(variety: Variety, g: &Matrix, c: &[Rational]) -> Result<Self> {
        let ginv = g.inverse().ok_or(Error::SingularLinearPart)?;
        let n = variety.rank();
        let shift: Vec<Rational> = (0..n)
            .map(|k| -(0..n).fold(Rational::zero(), |acc, j| acc + ginv.get(k, j) * &c[j]))
            .collect();
        Ok(Automorphism {
            map: Endomorphism::affine(variety, g, c)?,
            inverse: Endomorphism::affine(variety, &ginv, &shift)?,
            exactness: Exactness::Exact,
        })
    }

    /// Pairs `map` with its truncated inverse at `bound`, upgraded to exact
    /// when both composites are the identity without truncation.
    pub fn certify(map: Endomorphism, bound: usize) -> Result<Self> {
        let inverse = truncated_inverse(&map, bound)?;
        let exact = compose(&map, &inverse)?.is_identity() && compose(&inverse, &map)?.is_identity();
        Ok(Automorphism {
            map,
            inverse,
            exactness: if exact {
                Exactness::Exact
            } else {
                Exactness::TruncatedTo(bound)
            },
        })
    }

    /// Pairs `map` with a claimed inverse, checking both composites exactly.
    pub fn with_inverse(map: Endomorphism, inverse: Endomorphism) -> Result<Self> {
        if !compose(&map, &inverse)?.is_identity() || !compose(&inverse, &map)?.is_identity() {
            return Err(Error::Invariant(
                "claimed inverse does not compose to the identity".into(),
            ));
        }
        Ok(Automorphism {
            map,
            inverse,
            exactness: Exactness::Exact,
        })
    }

    pub fn map(&self) -> &Endomorphism {
        &self.map
    }

    pub fn inverse_map(&self) -> &Endomorphism {
        &self.inverse
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            map: self.inverse.clone(),
            inverse: self.map.clone(),
            exactness: self.exactness,
        }
    }

    /// `self ∘ other`, with inverse `other^{-1} ∘ self^{-1}`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        let exactness = match (self.exactness, other.exactness) {
            (Exactness::Exact, Exactness::Exact) => Exactness::Exact,
            (Exactness::TruncatedTo(a), Exactness::TruncatedTo(b)) => Exactness::TruncatedTo(a.min(b)),
            (Exactness::TruncatedTo(a), _) | (_, Exactness::TruncatedTo(a)) => Exactness::TruncatedTo(a),
        };
        Ok(Automorphism {
            map: compose(&self.map, &other.map)?,
            inverse: compose(&other.inverse, &self.inverse)?,
            exactness,
        })
    }
}
