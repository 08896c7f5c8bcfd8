//! Certificates of absolute wildness for automorphisms of relatively free
//! algebras `B = A/I`, and the tools feeding them.
//!
//! The divergence test: if an endomorphism `eps` of the ambient free algebra
//! lies in `IE(i) \ IE(i+1)`, induces an automorphism of `B`, the ideal `I`
//! has no nonzero elements of degree `<= i+1`, and `div(T(eps)) != 0`, then
//! the induced automorphism is absolutely wild. The tool cannot derive facts
//! about `I` in general, so they come from a small registry or from the user,
//! and every certificate records which.

mod polynilpotent;
mod span;

use std::fmt;

use serde::Serialize;

use crate::deriv::{Derivation, DivergenceValue};
use crate::error::{Error, Result};
use crate::freealg::{Element, Variety, VarietyKind};
use crate::morphism::{self, compose_truncated, ia_level, tangent, truncated_inverse, Endomorphism, FiltrationLevel};

pub use polynilpotent::{
    build_polynilpotent_witness, polynilpotent_report, LeadCheck, PolynilpotentReport, PolynilpotentWitness,
    DEFAULT_EXPANSION_LIMIT,
};
pub use span::{standard_generators, tangent_span, GeneratorFamily, SpanDiagnostics, SpanOptions, SpanReport};

/// The identities defining the quotient, with a known least degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IdealTag {
    /// `I = 0`: the free algebra itself.
    Zero,
    /// The second derived ideal `L''` of a free Lie algebra.
    Metabelian,
    /// All brackets of length `class + 1`.
    NilpotentClass { class: usize },
    /// Identities of the algebra of 2x2 matrices, in two variables.
    VarM2,
    /// The polynilpotent variety with the given class sequence.
    Polynilpotent { classes: Vec<usize> },
    /// A user-supplied ideal with an asserted least degree.
    UserAsserted { label: String, min_degree: usize },
}

impl fmt::Display for IdealTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealTag::Zero => f.write_str("zero ideal"),
            IdealTag::Metabelian => f.write_str("metabelian: L''"),
            IdealTag::NilpotentClass { class } => write!(f, "nilpotent of class {class}"),
            IdealTag::VarM2 => f.write_str("Var(M_2(K)) in 2 variables"),
            IdealTag::Polynilpotent { classes } => {
                let c: Vec<String> = classes.iter().map(ToString::to_string).collect();
                write!(f, "polynilpotent ({})", c.join(","))
            }
            IdealTag::UserAsserted { label, .. } => write!(f, "user-asserted: {label}"),
        }
    }
}

/// Why the induced map of the quotient is known to be an automorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    Missing,
    /// Exact two-sided inverse in the ambient algebra.
    ExactInverse,
    /// The quotient is killed above `degree`, and a truncated inverse was
    /// checked on both sides through that degree.
    VerifiedByTruncation {
        degree: usize,
    },
    /// A built-in construction whose induced map is unipotent on each layer
    /// of a nilpotent filtration of the quotient.
    NilpotentQuotientPattern {
        detail: String,
    },
    UserAsserted,
}

impl Evidence {
    pub fn is_present(&self) -> bool {
        !matches!(self, Evidence::Missing)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientContext {
    ambient: Variety,
    ideal: IdealTag,
    min_degree: Option<usize>,
    evidence: Evidence,
}

impl QuotientContext {
    /// Looks the least degree of `I` up in the registry. `None` means `I = 0`.
    pub fn new(ambient: Variety, ideal: IdealTag) -> Result<Self> {
        let min_degree = match &ideal {
            IdealTag::Zero => None,
            IdealTag::Metabelian => {
                require_kind(ambient, VarietyKind::FreeLie, &ideal)?;
                Some(4)
            }
            IdealTag::NilpotentClass { class } => {
                if !ambient.kind().is_lie() {
                    return Err(Error::Unsupported(format!("{ideal} over {ambient}")));
                }
                if *class == 0 {
                    return Err(Error::Unsupported("nilpotency class must be at least 1".into()));
                }
                Some(class + 1)
            }
            IdealTag::VarM2 => {
                require_kind(ambient, VarietyKind::FreeAssociative, &ideal)?;
                if ambient.rank() != 2 {
                    return Err(Error::Unsupported(format!(
                        "{ideal} requires rank 2, got {}",
                        ambient.rank()
                    )));
                }
                Some(5)
            }
            IdealTag::Polynilpotent { classes } => {
                require_kind(ambient, VarietyKind::FreeLie, &ideal)?;
                if classes.is_empty() || classes.contains(&0) {
                    return Err(Error::InvalidPolynilpotent("classes must be positive".into()));
                }
                Some(classes.iter().map(|c| c + 1).product())
            }
            IdealTag::UserAsserted { min_degree, .. } => {
                if *min_degree < 2 {
                    return Err(Error::Unsupported("asserted minimal degree must be at least 2".into()));
                }
                Some(*min_degree)
            }
        };
        let evidence = match ideal {
            IdealTag::UserAsserted { .. } | IdealTag::VarM2 => Evidence::UserAsserted,
            _ => Evidence::Missing,
        };
        Ok(QuotientContext {
            ambient,
            ideal,
            min_degree,
            evidence,
        })
    }

    pub fn with_evidence(mut self, evidence: Evidence) -> Self {
        self.evidence = evidence;
        self
    }

    pub fn ambient(&self) -> Variety {
        self.ambient
    }

    pub fn ideal(&self) -> &IdealTag {
        &self.ideal
    }

    /// Least degree of a nonzero element of `I`; `None` when `I = 0`.
    pub fn min_degree(&self) -> Option<usize> {
        self.min_degree
    }

    pub fn evidence(&self) -> &Evidence {
        &self.evidence
    }

    /// Whether `I` has no nonzero element of degree `<= d`.
    fn clear_through(&self, d: usize) -> bool {
        self.min_degree.is_none_or(|m| m > d)
    }
}

fn require_kind(ambient: Variety, kind: VarietyKind, ideal: &IdealTag) -> Result<()> {
    if ambient.kind() != kind {
        return Err(Error::Unsupported(format!("{ideal} over {ambient}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AbsolutelyWild,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AbsolutelyWild => "AbsolutelyWild",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `div(T(eps))` in the trace quotient.
    Divergence(DivergenceValue),
    /// `T(phi)([x1, x2])` in the free associative algebra of rank two.
    CommutatorImage(Element),
}

impl Witness {
    pub fn is_zero(&self) -> bool {
        match self {
            Witness::Divergence(d) => d.is_zero(),
            Witness::CommutatorImage(e) => e.is_zero(),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        match self {
            Witness::Divergence(d) => d.display_with(names),
            Witness::CommutatorImage(e) => e.display_with(names),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WildnessCertificate {
    pub verdict: Verdict,
    pub level: FiltrationLevel,
    pub tangent: Derivation,
    pub witness: Option<Witness>,
    pub context: QuotientContext,
    pub hypotheses: Vec<HypothesisCheck>,
    pub trace: Vec<String>,
}

fn check(name: &str, passed: bool, detail: String) -> HypothesisCheck {
    HypothesisCheck {
        name: name.into(),
        passed,
        detail,
    }
}

/// Fills in missing evidence where the tool can produce it itself.
fn resolve_evidence(eps: &Endomorphism, ctx: &QuotientContext, trace: &mut Vec<String>) -> Result<Evidence> {
    if ctx.evidence.is_present() {
        return Ok(ctx.evidence.clone());
    }
    match &ctx.ideal {
        IdealTag::NilpotentClass { class } => {
            let inv = truncated_inverse(eps, *class)?;
            let left = compose_truncated(eps, &inv, *class)?;
            let right = compose_truncated(&inv, eps, *class)?;
            let ok = left.is_identity() && right.is_identity();
            trace.push(format!(
                "truncated inverse through degree {class}: composites {}",
                if ok {
                    "are the identity"
                } else {
                    "differ from the identity"
                }
            ));
            Ok(if ok {
                Evidence::VerifiedByTruncation { degree: *class }
            } else {
                Evidence::Missing
            })
        }
        IdealTag::Zero => {
            let cert = morphism::Automorphism::certify(eps.clone(), morphism::DEFAULT_MAX_DEGREE)?;
            let exact = cert.exactness() == morphism::Exactness::Exact;
            trace.push(format!(
                "inverse search to degree {}: {}",
                morphism::DEFAULT_MAX_DEGREE,
                if exact {
                    "exact inverse found"
                } else {
                    "no exact inverse within the bound"
                }
            ));
            Ok(if exact {
                Evidence::ExactInverse
            } else {
                Evidence::Missing
            })
        }
        _ => Ok(Evidence::Missing),
    }
}

fn finish(
    eps: &Endomorphism,
    ctx: &QuotientContext,
    mut trace: Vec<String>,
    witness_fn: impl FnOnce(&Derivation) -> Result<Witness>,
) -> Result<WildnessCertificate> {
    ctx.ambient.check_same(&eps.variety())?;
    let level = ia_level(eps, usize::MAX);
    let i = match level {
        FiltrationLevel::NotIa => return Err(Error::NotIa("linear part is not the identity".into())),
        FiltrationLevel::Ia(i) => i,
        FiltrationLevel::TrivialToBound(_) => {
            trace.push("map is the identity; tangent is zero".into());
            return Ok(WildnessCertificate {
                verdict: Verdict::Inconclusive,
                level,
                tangent: Derivation::zero(eps.variety()),
                witness: None,
                context: ctx.clone(),
                hypotheses: vec![check("witness nonzero", false, "identity map".into())],
                trace,
            });
        }
    };
    trace.push(format!("filtration level {level}"));
    let t = tangent(eps)?;
    let names = eps.variety().default_names();
    trace.push(format!("tangent {}", t.display_with(&names)));
    let witness = witness_fn(&t)?;
    trace.push(format!("witness {}", witness.display_with(&names)));

    let mut hypotheses = vec![check(
        "witness nonzero",
        !witness.is_zero(),
        witness.display_with(&names),
    )];
    hypotheses.push(check(
        "ideal has no elements of degree <= i+1",
        ctx.clear_through(i + 1),
        match ctx.min_degree {
            Some(m) => format!("min degree {m} vs i+1 = {}", i + 1),
            None => "zero ideal".into(),
        },
    ));
    let evidence = resolve_evidence(eps, ctx, &mut trace)?;
    hypotheses.push(check(
        "induced map is an automorphism",
        evidence.is_present(),
        format!("{evidence:?}"),
    ));
    let verdict = if hypotheses.iter().all(|h| h.passed) {
        Verdict::AbsolutelyWild
    } else {
        Verdict::Inconclusive
    };
    let context = ctx.clone().with_evidence(evidence);
    Ok(WildnessCertificate {
        verdict,
        level,
        tangent: t,
        witness: Some(witness),
        context,
        hypotheses,
        trace,
    })
}

/// The divergence test in the ambient free algebra.
pub fn detect_divergence_wild(eps: &Endomorphism, ctx: &QuotientContext) -> Result<WildnessCertificate> {
    let trace = vec![format!("divergence test over {} modulo {}", ctx.ambient, ctx.ideal)];
    finish(eps, ctx, trace, |t| Ok(Witness::Divergence(t.divergence()?)))
}

/// The rank-two associative test: every IA automorphism of the free
/// associative algebra of rank two has `T(phi)([x1,x2]) = 0`.
pub fn detect_rank2_associative(phi: &Endomorphism, ctx: &QuotientContext) -> Result<WildnessCertificate> {
    let v = phi.variety();
    if v.kind() != VarietyKind::FreeAssociative || v.rank() != 2 {
        return Err(Error::Unsupported(format!(
            "commutator test needs the free associative algebra of rank 2, got {v}"
        )));
    }
    let trace = vec![format!("commutator test over {} modulo {}", ctx.ambient, ctx.ideal)];
    finish(phi, ctx, trace, |t| {
        let c = Element::var(v, 0).commutator(&Element::var(v, 1))?;
        Ok(Witness::CommutatorImage(t.apply(&c)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::left_mul;
    use crate::Rational;
    use num::One;

    #[test]
    fn lie_nilpotent_branch() {
        let v = Variety::lie(3);
        let x = |i| Element::var(v, i);
        let eps = Endomorphism::new(v, vec![&x(0) + &(&x(0) * &x(1)), x(1), x(2)]).unwrap();
        let ctx = QuotientContext::new(v, IdealTag::NilpotentClass { class: 3 }).unwrap();
        let cert = detect_divergence_wild(&eps, &ctx).unwrap();
        assert_eq!(cert.verdict, Verdict::AbsolutelyWild);
        let expected = left_mul(&x(1)).scale(&-Rational::one()).trace_class();
        assert_eq!(cert.witness, Some(Witness::Divergence(expected)));
        assert!(matches!(cert.context.evidence(), Evidence::VerifiedByTruncation { .. }));

        // class 1 kills every bracket: the hypothesis on I fails
        let ctx = QuotientContext::new(v, IdealTag::NilpotentClass { class: 1 }).unwrap();
        assert_eq!(
            detect_divergence_wild(&eps, &ctx).unwrap().verdict,
            Verdict::Inconclusive
        );
    }

    #[test]
    fn rank_two_checks() {
        let v = Variety::associative(2);
        let x = |i| Element::var(v, i);
        let c = x(0).commutator(&x(1)).unwrap();
        let beta = Endomorphism::new(v, vec![&x(0) + &(&c * &c), x(1)]).unwrap();
        let ctx = QuotientContext::new(v, IdealTag::VarM2).unwrap();
        let cert = detect_rank2_associative(&beta, &ctx).unwrap();
        assert_eq!(cert.verdict, Verdict::AbsolutelyWild);
        let expected = (&c * &c).commutator(&x(1)).unwrap();
        assert_eq!(cert.witness, Some(Witness::CommutatorImage(expected)));

        let e = Endomorphism::new(v, vec![&x(0) + &(&x(1) * &x(1)), x(1)]).unwrap();
        assert_eq!(
            detect_rank2_associative(&e, &ctx).unwrap().verdict,
            Verdict::Inconclusive
        );
        let id = Endomorphism::identity(v);
        assert_eq!(
            detect_rank2_associative(&id, &ctx).unwrap().verdict,
            Verdict::Inconclusive
        );
        assert!(detect_rank2_associative(&Endomorphism::identity(Variety::associative(3)), &ctx).is_err());
    }

    #[test]
    fn nagata_is_inconclusive() {
        let v = Variety::polynomial(3);
        let g = |i| Element::var(v, i);
        let c = &(&g(2) * &g(0)) - &(&g(1) * &g(1));
        let two = Rational::from_integer(2.into());
        let n = Endomorphism::new(
            v,
            vec![
                &(&g(0) + &(&g(1) * &c).scale(&two)) + &(&g(2) * &(&c * &c)),
                &g(1) + &(&g(2) * &c),
                g(2),
            ],
        )
        .unwrap();
        let ctx = QuotientContext::new(v, IdealTag::Zero).unwrap();
        let cert = detect_divergence_wild(&n, &ctx).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
        assert!(cert.witness.unwrap().is_zero());
    }

    #[test]
    fn registry() {
        let l = Variety::lie(3);
        assert_eq!(
            QuotientContext::new(l, IdealTag::Metabelian).unwrap().min_degree(),
            Some(4)
        );
        let p = QuotientContext::new(l, IdealTag::Polynilpotent { classes: vec![1, 2] }).unwrap();
        assert_eq!(p.min_degree(), Some(6));
        assert!(QuotientContext::new(Variety::associative(3), IdealTag::VarM2).is_err());
        assert!(QuotientContext::new(Variety::polynomial(2), IdealTag::Metabelian).is_err());
    }
}
