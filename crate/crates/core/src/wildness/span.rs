//! Sampling the tangent spaces `V_j = {T(phi) : phi in H_j \ H_{j+1}}` of a
//! subgroup `H` generated by a list of automorphisms.
//!
//! Each sample is a random word in the generators and their inverses,
//! composed with truncation at degree `i + 1`. Its affine part is then
//! cancelled by composing with the inverse affine map, which stays inside `H`
//! whenever `H` contains the affine (or, without constants, linear) group.
//! Tangents of the resulting IA maps are accumulated degree by degree into
//! exact echelon bases.

use std::collections::BTreeMap;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::deriv::Derivation;
use crate::error::{Error, Result};
use crate::freealg::{Element, Variety, VarietyKind};
use crate::linalg::{Matrix, SparseEchelon};
use crate::morphism::{compose_truncated, conjugate, tangent, Automorphism, Endomorphism};
use crate::word::Monomial;
use crate::Rational;

type Key = (usize, Monomial);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorFamily {
    /// Scalings by 2, transvections `x_i -> x_i + x_j` and swaps.
    Linear,
    /// [`GeneratorFamily::Linear`] plus translations `x_i -> x_i + 1`.
    Affine,
    /// `x_i -> x_i + x_j x_k` (or `+ [x_j, x_k]` in Lie varieties), `j, k != i`.
    ElementaryQuadratic,
}

impl GeneratorFamily {
    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "linear" | "gl" => GeneratorFamily::Linear,
            "affine" => GeneratorFamily::Affine,
            "elementary2" | "quadratic" => GeneratorFamily::ElementaryQuadratic,
            _ => return None,
        })
    }
}

pub fn standard_generators(v: Variety, family: GeneratorFamily) -> Result<Vec<Automorphism>> {
    let n = v.rank();
    let mut out = Vec::new();
    let two = Rational::from_integer(2.into());
    match family {
        GeneratorFamily::Linear | GeneratorFamily::Affine => {
            for i in 0..n {
                out.push(Automorphism::elementary(v, i, two.clone(), Element::zero(v))?);
                for j in 0..n {
                    if i != j {
                        out.push(Automorphism::elementary(v, i, Rational::one(), Element::var(v, j))?);
                    }
                }
                for j in i + 1..n {
                    let mut g = Matrix::identity(n);
                    g.set(i, i, Rational::zero());
                    g.set(j, j, Rational::zero());
                    g.set(i, j, Rational::one());
                    g.set(j, i, Rational::one());
                    out.push(Automorphism::linear(v, &g)?);
                }
            }
            if family == GeneratorFamily::Affine {
                if !v.unital() {
                    return Err(Error::ConstantInNonUnital(v));
                }
                for i in 0..n {
                    out.push(Automorphism::elementary(v, i, Rational::one(), Element::one(v)?)?);
                }
            }
        }
        GeneratorFamily::ElementaryQuadratic => {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if j == i || k == i {
                            continue;
                        }
                        let keep = match v.kind() {
                            VarietyKind::Polynomial => j <= k,
                            VarietyKind::FreeAssociative => true,
                            _ => j < k,
                        };
                        if keep {
                            let f = Element::var(v, j).checked_mul(&Element::var(v, k))?;
                            out.push(Automorphism::elementary(v, i, Rational::one(), f)?);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpanOptions {
    /// Words have length uniform in `1..=max_word_len`.
    pub max_word_len: usize,
    /// How many sampled maps are re-checked under scalar conjugation.
    pub scalar_checks: usize,
}

impl Default for SpanOptions {
    fn default() -> Self {
        SpanOptions {
            max_word_len: 12,
            scalar_checks: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanDiagnostics {
    /// `[x_a ∂_b, v]` stays in the span for every basis vector `v`.
    pub l0_closed: bool,
    /// `[∂_a, v]` lands in the span one degree lower; checked for unital
    /// varieties at degree `>= 2` only.
    pub lm1_closed: Option<bool>,
    /// `[u, v]` for basis vectors of degrees `a + b <= i` lies in the span at `a + b`.
    pub brackets_closed: bool,
    pub brackets_checked: usize,
    /// Tangents of scalar conjugates `(c id) phi (c id)^{-1}` lie in the span.
    pub scalar_conjugates_closed: bool,
    pub scalar_conjugates_checked: usize,
}

#[derive(Clone, Debug)]
pub struct SpanReport {
    pub degree: usize,
    pub rank: usize,
    pub basis: Vec<Derivation>,
    pub samples: usize,
    /// Samples whose normalized map had level exactly `degree`.
    pub hits: usize,
    /// Ranks of the sampled spans at every degree `1..=degree`.
    pub ranks_by_degree: BTreeMap<usize, usize>,
    pub diagnostics: SpanDiagnostics,
}

fn to_vector(d: &Derivation) -> BTreeMap<Key, Rational> {
    let mut out = BTreeMap::new();
    for (j, f) in d.coords().iter().enumerate() {
        for (m, c) in f.terms() {
            out.insert((j, m.clone()), c.clone());
        }
    }
    out
}

fn from_vector(v: Variety, row: &BTreeMap<Key, Rational>) -> Result<Derivation> {
    let mut coords: Vec<BTreeMap<Monomial, Rational>> = vec![BTreeMap::new(); v.rank()];
    for ((j, m), c) in row {
        coords[*j].insert(m.clone(), c.clone());
    }
    Derivation::new(
        v,
        coords
            .into_iter()
            .map(|t| Element::from_terms(v, t))
            .collect::<Result<_>>()?,
    )
}

/// Cancels the affine part: returns `phi ∘ alpha^{-1}` where `alpha` is the
/// degree `<= 1` part of `phi`.
fn normalize(phi: &Endomorphism, bound: usize) -> Result<Option<Endomorphism>> {
    let v = phi.variety();
    let Some(linv) = phi.linear_part().inverse() else {
        return Ok(None);
    };
    let c = phi.constant_part();
    let n = v.rank();
    let shift: Vec<Rational> = (0..n)
        .map(|k| -(0..n).fold(Rational::zero(), |acc, j| acc + linv.get(k, j) * &c[j]))
        .collect();
    let beta = if v.unital() {
        Endomorphism::affine(v, &linv, &shift)?
    } else {
        Endomorphism::linear(v, &linv)?
    };
    Ok(Some(compose_truncated(phi, &beta, bound)?))
}

fn sample(
    gens: &[Automorphism],
    index: usize,
    seed: u64,
    bound: usize,
    opts: &SpanOptions,
) -> Result<Option<Endomorphism>> {
    let v = gens[0].map().variety();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let len = rng.gen_range(1..=opts.max_word_len.max(1));
    let mut acc = Endomorphism::identity(v);
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        let step = if rng.gen_bool(0.5) { g.map() } else { g.inverse_map() };
        acc = compose_truncated(&acc, step, bound)?;
    }
    normalize(&acc, bound)
}

/// Samples `samples` random words and reports the span of the degree-`degree`
/// tangents, with closure diagnostics.
pub fn tangent_span(
    gens: &[Automorphism],
    degree: usize,
    samples: usize,
    seed: u64,
    opts: &SpanOptions,
) -> Result<SpanReport> {
    if degree == 0 {
        return Err(Error::Unsupported("tangent spans start at degree 1".into()));
    }
    let Some(first) = gens.first() else {
        return Err(Error::Unsupported("no generators".into()));
    };
    let v = first.map().variety();
    for g in gens {
        v.check_same(&g.map().variety())?;
    }
    let bound = degree + 1;
    let maps: Vec<Option<Endomorphism>> = (0..samples)
        .into_par_iter()
        .map(|s| sample(gens, s, seed, bound, opts))
        .collect::<Result<_>>()?;

    let mut spans: BTreeMap<usize, SparseEchelon<Key>> = (1..=degree).map(|j| (j, SparseEchelon::new())).collect();
    let mut hits = 0;
    let mut level_maps = Vec::new();
    for eta in maps.into_iter().flatten() {
        let t = tangent(&eta)?;
        let Some(j) = t.degree() else { continue };
        let j = j as usize;
        if j == 0 || j > degree {
            continue;
        }
        if j == degree {
            hits += 1;
            if level_maps.len() < opts.scalar_checks {
                level_maps.push(eta.clone());
            }
        }
        spans.get_mut(&j).unwrap().insert(to_vector(&t));
    }

    let basis_of = |j: usize| -> Result<Vec<Derivation>> { spans[&j].basis().map(|r| from_vector(v, r)).collect() };
    let basis = basis_of(degree)?;

    let mut l0_closed = true;
    for b in &basis {
        for a in 0..v.rank() {
            for c in 0..v.rank() {
                let e = Derivation::linear(v, a, c)?.bracket(b)?;
                l0_closed &= spans[&degree].contains(to_vector(&e));
            }
        }
    }

    let lm1_closed = if v.unital() && degree >= 2 {
        let mut ok = true;
        for b in &basis {
            for a in 0..v.rank() {
                let e = Derivation::partial(v, a)?.bracket(b)?;
                ok &= spans[&(degree - 1)].contains(to_vector(&e));
            }
        }
        Some(ok)
    } else {
        None
    };

    let mut brackets_closed = true;
    let mut brackets_checked = 0;
    for a in 1..=degree {
        for b in a..=degree - a {
            let (ba, bb) = (basis_of(a)?, basis_of(b)?);
            for x in &ba {
                for y in &bb {
                    let e = x.bracket(y)?;
                    brackets_closed &= spans[&(a + b)].contains(to_vector(&e));
                    brackets_checked += 1;
                }
            }
        }
    }

    let mut scalar_conjugates_closed = true;
    let g = Matrix::scalar(v.rank(), Rational::from_integer(2.into()));
    for eta in &level_maps {
        let c = conjugate(&g, eta)?.truncate(bound);
        let t = tangent(&c)?;
        scalar_conjugates_closed &= spans[&degree].contains(to_vector(&t));
    }

    Ok(SpanReport {
        degree,
        rank: basis.len(),
        basis,
        samples,
        hits,
        ranks_by_degree: spans.iter().map(|(j, s)| (*j, s.rank())).collect(),
        diagnostics: SpanDiagnostics {
            l0_closed,
            lm1_closed,
            brackets_closed,
            brackets_checked,
            scalar_conjugates_closed,
            scalar_conjugates_checked: level_maps.len(),
        },
    })
}
