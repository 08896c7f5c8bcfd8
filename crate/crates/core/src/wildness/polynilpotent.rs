//! The polynilpotent construction: `u_1 = ad(x1)^{c1}(x2)`,
//! `u_{t+1} = ad(u_t)^{c_{t+1}}([x1, u_t])`, `u = u_{k-1}`, `w = u(x2, x3)`
//! and `psi = (x1 + [[w,x1],x1], x2, .., xn)`.
//!
//! The elements `u_t` grow quickly (degree 47 already for six classes equal
//! to one), so they are kept as bracket trees. Nonvanishing at the expected
//! degree is certified by computing one coefficient of the associative image
//! with a memoized recursion over the tree; full Lyndon expansion is only
//! done below a degree limit.

use std::collections::HashMap;

use num::{BigInt, Zero};
use serde::Serialize;

use super::{detect_divergence_wild, Evidence, IdealTag, QuotientContext, WildnessCertificate};
use crate::error::{Error, Result};
use crate::freealg::{Element, Variety};
use crate::morphism::Endomorphism;
use crate::word::{Letter, Monomial};

/// Largest degree of `u` that is expanded into the Lyndon basis.
pub const DEFAULT_EXPANSION_LIMIT: usize = 12;

#[derive(Clone, Copy)]
enum Node {
    Gen(Letter),
    Bracket(usize, usize),
}

/// Arena of bracket trees with shared subtrees.
struct LieExpr {
    nodes: Vec<Node>,
    degree: Vec<usize>,
}

impl LieExpr {
    fn new() -> Self {
        LieExpr {
            nodes: Vec::new(),
            degree: Vec::new(),
        }
    }

    fn generator(&mut self, l: Letter) -> usize {
        self.nodes.push(Node::Gen(l));
        self.degree.push(1);
        self.nodes.len() - 1
    }

    fn bracket(&mut self, a: usize, b: usize) -> usize {
        self.nodes.push(Node::Bracket(a, b));
        self.degree.push(self.degree[a] + self.degree[b]);
        self.nodes.len() - 1
    }

    /// `ad(a)^k (b)`.
    fn ad_power(&mut self, a: usize, k: usize, b: usize) -> usize {
        (0..k).fold(b, |acc, _| self.bracket(a, acc))
    }

    /// Coefficient of `word` in the associative image of node `n`.
    fn coefficient(&self, n: usize, word: &[Letter]) -> BigInt {
        let mut memo = HashMap::new();
        if word.len() != self.degree[n] {
            return BigInt::zero();
        }
        self.coef_at(n, word, 0, &mut memo)
    }

    fn coef_at(&self, n: usize, word: &[Letter], start: usize, memo: &mut HashMap<(usize, usize), BigInt>) -> BigInt {
        if let Some(hit) = memo.get(&(n, start)) {
            return hit.clone();
        }
        let r = match self.nodes[n] {
            Node::Gen(l) => {
                if word[start] == l {
                    BigInt::from(1)
                } else {
                    BigInt::zero()
                }
            }
            Node::Bracket(a, b) => {
                let (da, db) = (self.degree[a], self.degree[b]);
                let mut acc = BigInt::zero();
                let fa = self.coef_at(a, word, start, memo);
                if !fa.is_zero() {
                    acc += fa * self.coef_at(b, word, start + da, memo);
                }
                let fb = self.coef_at(b, word, start, memo);
                if !fb.is_zero() {
                    acc -= fb * self.coef_at(a, word, start + db, memo);
                }
                acc
            }
        };
        memo.insert((n, start), r.clone());
        r
    }

    /// Full expansion in the free Lie algebra `v`, generators mapped by `letters`.
    fn expand(&self, n: usize, v: Variety, letters: &[usize], memo: &mut HashMap<usize, Element>) -> Element {
        if let Some(hit) = memo.get(&n) {
            return hit.clone();
        }
        let r = match self.nodes[n] {
            Node::Gen(l) => Element::var(v, letters[l as usize]),
            Node::Bracket(a, b) => {
                let ea = self.expand(a, v, letters, memo);
                let eb = self.expand(b, v, letters, memo);
                &ea * &eb
            }
        };
        memo.insert(n, r.clone());
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeadCheck {
    pub t: usize,
    /// Predicted leading word (smallest word under `x1 < x2` index order,
    /// i.e. the leading word for the order `x1 > x2`), one-based letters.
    pub predicted: Vec<usize>,
    /// Its coefficient in the associative image; nonzero certifies the degree.
    pub coefficient: String,
    /// Whether a full expansion confirmed it as the leading word; `None`
    /// when the degree exceeds the expansion limit.
    pub confirmed_by_expansion: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolynilpotentReport {
    pub classes: Vec<usize>,
    /// Degrees of `u_1, .., u_{k-1}` read off the bracket trees.
    pub degrees: Vec<usize>,
    /// Degrees predicted by `deg(u_{t+1}) = deg(u_t)(c_{t+1}+1) + 1`.
    pub recursion_degrees: Vec<usize>,
    pub degrees_match: bool,
    pub lead_checks: Vec<LeadCheck>,
    /// `prod(c_i + 1)`, the least degree of the ideal of identities.
    pub product: usize,
    /// `deg(u) + 2`.
    pub inequality_lhs: usize,
    pub inequality_holds: bool,
}

impl PolynilpotentReport {
    pub fn all_checks_pass(&self) -> bool {
        self.degrees_match
            && self.inequality_holds
            && self
                .lead_checks
                .iter()
                .all(|l| l.coefficient != "0" && l.confirmed_by_expansion != Some(false))
    }
}

fn validate(classes: &[usize]) -> Result<()> {
    if classes.len() < 2 {
        return Err(Error::InvalidPolynilpotent(
            "need at least two classes; a single nilpotent factor uses the quadratic map (x1 + [x1,x2], ..)".into(),
        ));
    }
    if classes.contains(&0) {
        return Err(Error::InvalidPolynilpotent("every class must be at least 1".into()));
    }
    Ok(())
}

struct Built {
    expr: LieExpr,
    us: Vec<usize>,
    report: PolynilpotentReport,
}

fn build(classes: &[usize], expansion_limit: usize) -> Result<Built> {
    validate(classes)?;
    let k = classes.len();
    let mut expr = LieExpr::new();
    let x1 = expr.generator(0);
    let x2 = expr.generator(1);
    let mut us = vec![expr.ad_power(x1, classes[0], x2)];
    for t in 1..k - 1 {
        let prev = us[t - 1];
        let inner = expr.bracket(x1, prev);
        us.push(expr.ad_power(prev, classes[t], inner));
    }

    let degrees: Vec<usize> = us.iter().map(|&u| expr.degree[u]).collect();
    let mut recursion_degrees = vec![classes[0] + 1];
    for t in 1..k - 1 {
        recursion_degrees.push(recursion_degrees[t - 1] * (classes[t] + 1) + 1);
    }

    let mut lead: Vec<Letter> = vec![0; classes[0]];
    lead.push(1);
    let mut lead_checks = Vec::new();
    let lie2 = Variety::lie(2);
    for (t, &u) in us.iter().enumerate() {
        if t > 0 {
            let mut next = vec![0];
            for _ in 0..classes[t] + 1 {
                next.extend_from_slice(&lead);
            }
            lead = next;
        }
        let coefficient = expr.coefficient(u, &lead);
        let confirmed_by_expansion = if expr.degree[u] <= expansion_limit {
            let e = expr.expand(u, lie2, &[0, 1], &mut HashMap::new());
            let a = e.to_associative()?;
            Some(a.terms().keys().next() == Some(&Monomial::new(lead.clone())))
        } else {
            None
        };
        lead_checks.push(LeadCheck {
            t: t + 1,
            predicted: lead.iter().map(|&l| l as usize + 1).collect(),
            coefficient: coefficient.to_string(),
            confirmed_by_expansion,
        });
    }

    let product: usize = classes.iter().map(|c| c + 1).product();
    let inequality_lhs = degrees[k - 2] + 2;
    let report = PolynilpotentReport {
        classes: classes.to_vec(),
        degrees_match: degrees == recursion_degrees,
        degrees,
        recursion_degrees,
        lead_checks,
        product,
        inequality_lhs,
        inequality_holds: inequality_lhs < product,
    };
    Ok(Built { expr, us, report })
}

/// Degree, leading-word and inequality checks without building `psi`.
/// Fails when the degree inequality does not hold.
pub fn polynilpotent_report(classes: &[usize]) -> Result<PolynilpotentReport> {
    let built = build(classes, DEFAULT_EXPANSION_LIMIT)?;
    inequality_or_err(&built.report)?;
    Ok(built.report)
}

fn inequality_or_err(r: &PolynilpotentReport) -> Result<()> {
    if !r.inequality_holds {
        return Err(Error::InvalidPolynilpotent(format!(
            "degree inequality deg(u)+2 < prod(c_i+1) fails: {} < {} is false",
            r.inequality_lhs, r.product
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct PolynilpotentWitness {
    pub report: PolynilpotentReport,
    /// `u` in the free Lie algebra of rank `n`; `None` above the expansion limit.
    pub u: Option<Element>,
    pub w: Option<Element>,
    pub psi: Option<Endomorphism>,
    /// The quotient context of the polynilpotent variety, with the
    /// construction's automorphism evidence attached.
    pub context: QuotientContext,
}

impl PolynilpotentWitness {
    /// Runs the divergence test on `psi`, when it was built.
    pub fn certify(&self) -> Result<Option<WildnessCertificate>> {
        match &self.psi {
            Some(psi) => detect_divergence_wild(psi, &self.context).map(Some),
            None => Ok(None),
        }
    }
}

/// Builds `u`, `w = u(x2, x3)` and `psi` in the free Lie algebra of rank `n`.
pub fn build_polynilpotent_witness(
    classes: &[usize],
    n: usize,
    expansion_limit: usize,
) -> Result<PolynilpotentWitness> {
    if n < 3 {
        return Err(Error::InvalidPolynilpotent(format!("rank must be at least 3, got {n}")));
    }
    let built = build(classes, expansion_limit)?;
    inequality_or_err(&built.report)?;
    let v = Variety::lie(n);
    let context = QuotientContext::new(
        v,
        IdealTag::Polynilpotent {
            classes: classes.to_vec(),
        },
    )?
    .with_evidence(Evidence::NilpotentQuotientPattern {
        detail: "psi fixes x2..xn and moves x1 by an element of J; it is unipotent on every layer J^t/J^(t+1)".into(),
    });
    let u_node = *built.us.last().unwrap();
    let (u, w, psi) = if built.expr.degree[u_node] <= expansion_limit {
        let u = built.expr.expand(u_node, v, &[0, 1], &mut HashMap::new());
        let w = built.expr.expand(u_node, v, &[1, 2], &mut HashMap::new());
        let x1 = Element::var(v, 0);
        let g = &(&w * &x1) * &x1;
        let mut images: Vec<Element> = (0..n).map(|j| Element::var(v, j)).collect();
        images[0] = &images[0] + &g;
        let psi = Endomorphism::new(v, images)?;
        (Some(u), Some(w), Some(psi))
    } else {
        (None, None, None)
    };
    Ok(PolynilpotentWitness {
        report: built.report,
        u,
        w,
        psi,
        context,
    })
}
