//! Evaluation of parsed scripts.

use std::collections::HashMap;

use num::{BigInt, One, Zero};
use serde_json::{json, Value as Json};

use super::parse::{BinOp, Command, Expr, Pos, Rhs, Script, Stmt};
use super::report::{Output, Report};
use super::ScriptError;
use crate::deriv::Derivation;
use crate::error::Error;
use crate::fox::fox_derivative;
use crate::freealg::{Element, Variety};
use crate::linalg::Matrix;
use crate::morphism::{
    chain_rule_check, compose, compose_truncated, conjugate, conjugate_derivation, group_commutator, ia_level, tangent,
    truncated_inverse, Automorphism, Endomorphism, FiltrationLevel, DEFAULT_MAX_DEGREE,
};
use crate::wildness::{
    build_polynilpotent_witness, detect_divergence_wild, detect_rank2_associative, standard_generators, tangent_span,
    Evidence, GeneratorFamily, IdealTag, QuotientContext, SpanOptions, WildnessCertificate, DEFAULT_EXPANSION_LIMIT,
};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Default truncation bound for inverses, commutators and level searches.
    pub max_degree: usize,
    /// Overrides every `--seed` given in the script.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_degree: DEFAULT_MAX_DEGREE,
            seed: None,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Value {
    Scalar(Rational),
    Elem(Element),
    /// `auto` marks maps the user declares invertible.
    Endo {
        map: Endomorphism,
        auto: bool,
    },
    Der(Derivation),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Elem(_) => "element",
            Value::Endo { .. } => "endomorphism",
            Value::Der(_) => "derivation",
        }
    }
}

fn semantic(pos: Pos, message: impl Into<String>) -> ScriptError {
    ScriptError::Semantic {
        pos,
        message: message.into(),
    }
}

struct Env {
    variety: Variety,
    names: Vec<String>,
    bindings: HashMap<String, Value>,
    opts: RunOptions,
}

type R<T> = Result<T, ScriptError>;

/// Attaches a position to library errors.
trait At<T> {
    fn at(self, pos: Pos) -> R<T>;
}

impl<T> At<T> for crate::error::Result<T> {
    fn at(self, pos: Pos) -> R<T> {
        self.map_err(|source| ScriptError::Runtime { pos, source })
    }
}

pub fn run(script: &Script, opts: &RunOptions) -> R<Report> {
    let mut stmts = script.statements.iter();
    let env = match stmts.next() {
        Some(Stmt::Variety { kind, rank, names, pos }) => {
            let variety = Variety::new(*kind, *rank).at(*pos)?;
            let names = match names {
                Some(n) => {
                    if n.len() != *rank {
                        return Err(semantic(*pos, format!("{} names given for rank {rank}", n.len())));
                    }
                    for (i, a) in n.iter().enumerate() {
                        if n[..i].contains(a) {
                            return Err(semantic(*pos, format!("generator '{a}' listed twice")));
                        }
                    }
                    n.clone()
                }
                None => variety.default_names(),
            };
            Env {
                variety,
                names,
                bindings: HashMap::new(),
                opts: *opts,
            }
        }
        Some(other) => {
            return Err(semantic(
                stmt_pos(other),
                "the script must start with a variety declaration",
            ))
        }
        None => return Err(semantic(Pos { line: 1, col: 1 }, "empty script")),
    };
    let mut env = env;
    let mut report = Report::new(env.variety, env.names.clone());
    for stmt in stmts {
        match stmt {
            Stmt::Variety { pos, .. } => return Err(semantic(*pos, "only one variety declaration is allowed")),
            Stmt::Bind { name, rhs, pos } => {
                if env.names.contains(name) {
                    return Err(semantic(*pos, format!("'{name}' is a generator")));
                }
                if env.bindings.contains_key(name) {
                    return Err(semantic(*pos, format!("'{name}' is already defined")));
                }
                if is_reserved(name) {
                    return Err(semantic(*pos, format!("'{name}' is a reserved word")));
                }
                let value = match rhs {
                    Rhs::Expr(e) => env.eval(e)?,
                    Rhs::Command(c) => env.value_command(c)?,
                };
                env.bindings.insert(name.clone(), value);
            }
            Stmt::Command(c) => {
                let out = env.command(c)?;
                report.push(out);
            }
        }
    }
    Ok(report)
}

fn stmt_pos(s: &Stmt) -> Pos {
    match s {
        Stmt::Variety { pos, .. } | Stmt::Bind { pos, .. } => *pos,
        Stmt::Command(c) => c.pos,
    }
}

const CALLS: &[&str] = &[
    "auto", "endo", "der", "ad", "tangent", "euler", "partial", "linear", "inverse",
];

fn is_reserved(name: &str) -> bool {
    CALLS.contains(&name) || name == "let" || name == "variety"
}

fn level_json(level: &FiltrationLevel) -> Json {
    serde_json::to_value(level).expect("serializable")
}

impl Env {
    fn show_elem(&self, e: &Element) -> String {
        e.display_with(&self.names)
    }

    fn show_der(&self, d: &Derivation) -> String {
        d.display_with(&self.names)
    }

    fn show_endo(&self, m: &Endomorphism) -> String {
        m.display_with(&self.names)
    }

    fn show(&self, v: &Value) -> String {
        match v {
            Value::Scalar(c) => c.to_string(),
            Value::Elem(e) => self.show_elem(e),
            Value::Endo { map, .. } => self.show_endo(map),
            Value::Der(d) => self.show_der(d),
        }
    }

    fn value_json(&self, v: &Value) -> Json {
        match v {
            Value::Scalar(c) => json!({"type": "scalar", "value": c.to_string()}),
            Value::Elem(e) => json!({"type": "element", "value": self.show_elem(e)}),
            Value::Endo { map, .. } => self.endo_json(map),
            Value::Der(d) => self.der_json(d),
        }
    }

    fn endo_json(&self, m: &Endomorphism) -> Json {
        let images: Vec<String> = m.images().iter().map(|f| self.show_elem(f)).collect();
        json!({"type": "endomorphism", "images": images})
    }

    fn der_json(&self, d: &Derivation) -> Json {
        let coords: Vec<String> = d.coords().iter().map(|f| self.show_elem(f)).collect();
        json!({"type": "derivation", "coords": coords, "display": self.show_der(d), "degree": d.degree()})
    }

    fn generator_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn to_elem(&self, v: Value, pos: Pos) -> R<Element> {
        match v {
            Value::Elem(e) => Ok(e),
            Value::Scalar(c) => {
                if c.is_zero() {
                    Ok(Element::zero(self.variety))
                } else {
                    Element::constant(self.variety, c).at(pos)
                }
            }
            other => Err(semantic(pos, format!("expected an element, found a {}", other.kind()))),
        }
    }

    fn eval_elem(&self, e: &Expr) -> R<Element> {
        let v = self.eval(e)?;
        self.to_elem(v, e.pos())
    }

    fn eval_endo(&self, e: &Expr) -> R<(Endomorphism, bool)> {
        match self.eval(e)? {
            Value::Endo { map, auto } => Ok((map, auto)),
            other => Err(semantic(
                e.pos(),
                format!("expected an endomorphism, found a {}", other.kind()),
            )),
        }
    }

    fn eval_der(&self, e: &Expr) -> R<Derivation> {
        match self.eval(e)? {
            Value::Der(d) => Ok(d),
            other => Err(semantic(
                e.pos(),
                format!("expected a derivation, found a {}", other.kind()),
            )),
        }
    }

    /// A derivation, or the tangent of an endomorphism.
    fn eval_der_or_tangent(&self, e: &Expr) -> R<Derivation> {
        match self.eval(e)? {
            Value::Der(d) => Ok(d),
            Value::Endo { map, .. } => tangent(&map).at(e.pos()),
            other => Err(semantic(
                e.pos(),
                format!("expected a derivation, found a {}", other.kind()),
            )),
        }
    }

    fn eval_generator(&self, e: &Expr) -> R<usize> {
        match e {
            Expr::Ident(n, _) => self.generator_index(n),
            _ => None,
        }
        .ok_or_else(|| semantic(e.pos(), "expected a generator name"))
    }

    fn eval(&self, e: &Expr) -> R<Value> {
        let v = self.variety;
        Ok(match e {
            Expr::Num(n, _) => Value::Scalar(Rational::from_integer(n.clone())),
            Expr::Ident(name, pos) => {
                if let Some(i) = self.generator_index(name) {
                    Value::Elem(Element::var(v, i))
                } else if let Some(b) = self.bindings.get(name) {
                    b.clone()
                } else {
                    return Err(semantic(*pos, format!("undefined name '{name}'")));
                }
            }
            Expr::Neg(a, pos) => match self.eval(a)? {
                Value::Scalar(c) => Value::Scalar(-c),
                Value::Elem(x) => Value::Elem(-&x),
                Value::Der(d) => Value::Der(d.scale(&-Rational::one())),
                Value::Endo { .. } => return Err(semantic(*pos, "cannot negate an endomorphism")),
            },
            Expr::Bin(op, a, b, pos) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                self.binary(*op, x, y, *pos)?
            }
            Expr::Pow(a, k, pos) => match self.eval(a)? {
                Value::Scalar(c) => Value::Scalar(num::pow::pow(c, *k as usize)),
                Value::Elem(x) => {
                    if !v.unital() {
                        return Err(semantic(*pos, format!("powers are not available in {v}")));
                    }
                    Value::Elem(x.pow(*k).at(*pos)?)
                }
                other => return Err(semantic(*pos, format!("cannot raise a {} to a power", other.kind()))),
            },
            Expr::Bracket(a, b, pos) => match (self.eval(a)?, self.eval(b)?) {
                (Value::Der(x), Value::Der(y)) => Value::Der(x.bracket(&y).at(*pos)?),
                (x, y) => {
                    let x = self.to_elem(x, a.pos())?;
                    let y = self.to_elem(y, b.pos())?;
                    Value::Elem(x.bracket(&y).at(*pos)?)
                }
            },
            Expr::Call(f, args, pos) => self.call(f, args, *pos)?,
        })
    }

    fn binary(&self, op: BinOp, x: Value, y: Value, pos: Pos) -> R<Value> {
        use Value::*;
        Ok(match (op, x, y) {
            (BinOp::Add, Scalar(a), Scalar(b)) => Scalar(a + b),
            (BinOp::Sub, Scalar(a), Scalar(b)) => Scalar(a - b),
            (BinOp::Mul, Scalar(a), Scalar(b)) => Scalar(a * b),
            (BinOp::Div, Scalar(a), Scalar(b)) => {
                if b.is_zero() {
                    return Err(semantic(pos, "division by zero"));
                }
                Scalar(a / b)
            }
            (BinOp::Mul, Scalar(c), Elem(e)) | (BinOp::Mul, Elem(e), Scalar(c)) => Elem(e.scale(&c)),
            (BinOp::Mul, Scalar(c), Der(d)) | (BinOp::Mul, Der(d), Scalar(c)) => Der(d.scale(&c)),
            (BinOp::Div, Elem(_) | Der(_), Scalar(c)) if c.is_zero() => {
                return Err(semantic(pos, "division by zero"));
            }
            (BinOp::Div, Elem(e), Scalar(c)) => Elem(e.scale(&c.recip())),
            (BinOp::Div, Der(d), Scalar(c)) => Der(d.scale(&c.recip())),
            (BinOp::Add, Der(a), Der(b)) => Der(a.checked_add(&b).at(pos)?),
            (BinOp::Sub, Der(a), Der(b)) => Der(a.checked_sub(&b).at(pos)?),
            (BinOp::Mul, Elem(a), Elem(b)) => {
                if self.variety.kind().is_lie() {
                    return Err(semantic(pos, "use [a,b] for products in Lie varieties"));
                }
                Elem(a.checked_mul(&b).at(pos)?)
            }
            (op @ (BinOp::Add | BinOp::Sub), a @ (Scalar(_) | Elem(_)), b @ (Scalar(_) | Elem(_))) => {
                let a = self.to_elem(a, pos)?;
                let b = self.to_elem(b, pos)?;
                Elem(
                    if op == BinOp::Add {
                        a.checked_add(&b)
                    } else {
                        a.checked_sub(&b)
                    }
                    .at(pos)?,
                )
            }
            (op, a, b) => {
                let sym = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                return Err(semantic(
                    pos,
                    format!("cannot apply '{sym}' to operands of kind {} and {}", a.kind(), b.kind()),
                ));
            }
        })
    }

    fn call(&self, f: &str, args: &[Expr], pos: Pos) -> R<Value> {
        let v = self.variety;
        let arity = |n: usize| -> R<()> {
            if args.len() != n {
                return Err(semantic(pos, format!("{f} takes {n} argument(s), got {}", args.len())));
            }
            Ok(())
        };
        Ok(match f {
            "auto" | "endo" => {
                arity(v.rank())?;
                let images = args.iter().map(|a| self.eval_elem(a)).collect::<R<Vec<_>>>()?;
                let map = if images.iter().any(|g| !g.constant_term().is_zero()) {
                    Endomorphism::new_affine(v, images)
                } else {
                    Endomorphism::new(v, images)
                }
                .at(pos)?;
                Value::Endo { map, auto: f == "auto" }
            }
            "der" => {
                arity(v.rank())?;
                let coords = args.iter().map(|a| self.eval_elem(a)).collect::<R<Vec<_>>>()?;
                Value::Der(Derivation::new(v, coords).at(pos)?)
            }
            "ad" => {
                arity(1)?;
                Value::Der(Derivation::ad(&self.eval_elem(&args[0])?).at(pos)?)
            }
            "tangent" => {
                arity(1)?;
                let (map, _) = self.eval_endo(&args[0])?;
                Value::Der(tangent(&map).at(pos)?)
            }
            "euler" => {
                arity(0)?;
                Value::Der(Derivation::euler(v))
            }
            "partial" => {
                arity(1)?;
                Value::Der(Derivation::partial(v, self.eval_generator(&args[0])?).at(pos)?)
            }
            "linear" => {
                arity(2)?;
                let a = self.eval_generator(&args[0])?;
                let b = self.eval_generator(&args[1])?;
                Value::Der(Derivation::linear(v, a, b).at(pos)?)
            }
            "inverse" => {
                arity(1)?;
                let (map, auto) = self.eval_endo(&args[0])?;
                Value::Endo {
                    map: self.inverse_of(&map, self.opts.max_degree, pos)?,
                    auto,
                }
            }
            _ => return Err(semantic(pos, format!("unknown function '{f}'"))),
        })
    }

    fn inverse_of(&self, map: &Endomorphism, k: usize, pos: Pos) -> R<Endomorphism> {
        if map.has_constants() || map.is_affine() {
            let a = self.automorphism(map, pos)?;
            return Ok(a.inverse_map().clone());
        }
        truncated_inverse(map, k).at(pos)
    }

    fn automorphism(&self, map: &Endomorphism, pos: Pos) -> R<Automorphism> {
        if map.is_affine() {
            Automorphism::affine(self.variety, &map.linear_part(), &map.constant_part()).at(pos)
        } else {
            Automorphism::certify(map.clone(), self.opts.max_degree).at(pos)
        }
    }

    fn flag_usize(&self, c: &Command, name: &str) -> R<Option<usize>> {
        let Some(f) = c.flag(name) else { return Ok(None) };
        let raw = f
            .value
            .as_deref()
            .ok_or_else(|| semantic(f.pos, format!("--{name} needs a value")))?;
        raw.parse()
            .map(Some)
            .map_err(|_| semantic(f.pos, format!("--{name} expects a non-negative integer, got '{raw}'")))
    }

    fn flag_str<'c>(&self, c: &'c Command, name: &str) -> R<Option<&'c str>> {
        let Some(f) = c.flag(name) else { return Ok(None) };
        f.value
            .as_deref()
            .map(Some)
            .ok_or_else(|| semantic(f.pos, format!("--{name} needs a value")))
    }

    fn check_flags(&self, c: &Command, allowed: &[&str]) -> R<()> {
        for f in &c.flags {
            if !allowed.contains(&f.name.as_str()) {
                return Err(semantic(f.pos, format!("unknown flag --{} for {}", f.name, c.name)));
            }
        }
        Ok(())
    }

    fn arity(&self, c: &Command, n: usize) -> R<()> {
        if c.args.len() != n {
            return Err(semantic(
                c.pos,
                format!("{} takes {n} argument(s), got {}", c.name, c.args.len()),
            ));
        }
        Ok(())
    }

    /// Commands usable on the right of `:=`.
    fn value_command(&self, c: &Command) -> R<Value> {
        let out = self.command(c)?;
        out.value
            .ok_or_else(|| semantic(c.pos, format!("{} does not produce a value", c.name)))
    }

    fn command(&self, c: &Command) -> R<Output> {
        let pos = c.pos;
        let v = self.variety;
        let mut out = Output::new(&c.name, pos.line);
        match c.name.as_str() {
            "eval" => {
                self.check_flags(c, &[])?;
                self.arity(c, 1)?;
                let val = self.eval(&c.args[0])?;
                out.line(self.show(&val));
                out.set("value", self.value_json(&val));
                out.value = Some(val);
            }
            "tangent" => {
                self.check_flags(c, &[])?;
                self.arity(c, 1)?;
                let (map, _) = self.eval_endo(&c.args[0])?;
                let level = ia_level(&map, usize::MAX);
                if level == FiltrationLevel::NotIa {
                    return Err(ScriptError::Runtime {
                        pos,
                        source: Error::NotIa("linear part is not the identity".into()),
                    });
                }
                let t = tangent(&map).at(pos)?;
                out.line(format!("level {level}"));
                out.line(format!("T = {}", self.show_der(&t)));
                out.set("level", level_json(&level));
                out.set("tangent", self.der_json(&t));
                out.value = Some(Value::Der(t));
            }
            "ia-level" => {
                self.check_flags(c, &["bound"])?;
                self.arity(c, 1)?;
                let (map, _) = self.eval_endo(&c.args[0])?;
                let bound = self.flag_usize(c, "bound")?.unwrap_or(self.opts.max_degree);
                let level = ia_level(&map, bound);
                out.line(level.to_string());
                out.set("level", level_json(&level));
            }
            "jacobian" => {
                self.check_flags(c, &[])?;
                self.arity(c, 1)?;
                let j = match self.eval(&c.args[0])? {
                    Value::Endo { map, .. } => map.jacobian(),
                    Value::Der(d) => d.jacobian(),
                    other => return Err(semantic(c.args[0].pos(), format!("no Jacobian of a {}", other.kind()))),
                }
                .at(pos)?;
                let rows = j.display_with(&self.names);
                for r in &rows {
                    out.line(format!("[{}]", r.join(", ")));
                }
                out.set("matrix", json!(rows));
            }
            "divergence" => {
                self.check_flags(c, &[])?;
                self.arity(c, 1)?;
                let d = self.eval_der_or_tangent(&c.args[0])?;
                let div = d.divergence().at(pos)?;
                let s = div.display_with(&self.names);
                out.line(format!("div = {s}"));
                out.set("divergence", json!(s));
                out.set("zero", json!(div.is_zero()));
            }
            "compose" => {
                self.check_flags(c, &["degree"])?;
                self.arity(c, 2)?;
                let (a, aa) = self.eval_endo(&c.args[0])?;
                let (b, ba) = self.eval_endo(&c.args[1])?;
                let degree = self.flag_usize(c, "degree")?;
                let m = match degree {
                    Some(k) => compose_truncated(&a, &b, k),
                    None => compose(&a, &b),
                }
                .at(pos)?;
                let id = m.is_identity();
                out.line(self.show_endo(&m));
                if id {
                    out.line(match degree {
                        Some(k) => format!("identity through degree {k}"),
                        None => "identity".to_string(),
                    });
                }
                out.set("map", self.endo_json(&m));
                out.set("identity", json!(id));
                out.set("degree", json!(degree));
                out.value = Some(Value::Endo { map: m, auto: aa && ba });
            }
            "invert" => {
                self.check_flags(c, &["degree"])?;
                self.arity(c, 1)?;
                let (map, auto) = self.eval_endo(&c.args[0])?;
                let k = self.flag_usize(c, "degree")?.unwrap_or(self.opts.max_degree);
                let inv = self.inverse_of(&map, k, pos)?;
                let left = compose_truncated(&map, &inv, k).at(pos)?.is_identity();
                let right = compose_truncated(&inv, &map, k).at(pos)?.is_identity();
                let exact = compose(&map, &inv).at(pos)?.is_identity() && compose(&inv, &map).at(pos)?.is_identity();
                if !(left && right) {
                    return Err(ScriptError::Runtime {
                        pos,
                        source: Error::Invariant(format!(
                            "truncated inverse fails to compose to the identity through degree {k}"
                        )),
                    });
                }
                out.line(self.show_endo(&inv));
                out.line(if exact {
                    "exact inverse".to_string()
                } else {
                    format!("inverse through degree {k}")
                });
                out.set("inverse", self.endo_json(&inv));
                out.set("degree", json!(k));
                out.set("identity_through_degree", json!(left && right));
                out.set("exact", json!(exact));
                out.value = Some(Value::Endo { map: inv, auto });
            }
            "commutator" => {
                self.check_flags(c, &["degree"])?;
                self.arity(c, 2)?;
                let (a, _) = self.eval_endo(&c.args[0])?;
                let (b, _) = self.eval_endo(&c.args[1])?;
                let k = self.flag_usize(c, "degree")?.unwrap_or(self.opts.max_degree);
                let m = group_commutator(&a, &b, k).at(pos)?;
                let level = ia_level(&m, k);
                out.line(self.show_endo(&m));
                out.line(format!("level {level}"));
                out.set("map", self.endo_json(&m));
                out.set("degree", json!(k));
                out.set("level", level_json(&level));
                if let FiltrationLevel::Ia(_) = level {
                    let t = tangent(&m).at(pos)?;
                    out.line(format!("T = {}", self.show_der(&t)));
                    out.set("tangent", self.der_json(&t));
                }
                out.value = Some(Value::Endo { map: m, auto: false });
            }
            "conjugate" => {
                self.check_flags(c, &["matrix", "scalar"])?;
                self.arity(c, 1)?;
                let g = self.matrix_flag(c)?;
                let val = match self.eval(&c.args[0])? {
                    Value::Endo { map, auto } => Value::Endo {
                        map: conjugate(&g, &map).at(pos)?,
                        auto,
                    },
                    Value::Der(d) => Value::Der(conjugate_derivation(&g, &d).at(pos)?),
                    other => {
                        return Err(semantic(
                            c.args[0].pos(),
                            format!("cannot conjugate a {}", other.kind()),
                        ))
                    }
                };
                out.line(self.show(&val));
                out.set("value", self.value_json(&val));
                out.value = Some(val);
            }
            "apply" => {
                self.check_flags(c, &[])?;
                self.arity(c, 2)?;
                let x = self.eval_elem(&c.args[1])?;
                let r = match self.eval(&c.args[0])? {
                    Value::Endo { map, .. } => map.apply(&x),
                    Value::Der(d) => d.apply(&x),
                    other => return Err(semantic(c.args[0].pos(), format!("cannot apply a {}", other.kind()))),
                }
                .at(pos)?;
                out.line(self.show_elem(&r));
                out.set("value", json!(self.show_elem(&r)));
                out.value = Some(Value::Elem(r));
            }
            "bracket" | "lsym" => {
                self.check_flags(c, &[])?;
                self.arity(c, 2)?;
                let a = self.eval_der(&c.args[0])?;
                let b = self.eval_der(&c.args[1])?;
                let r = if c.name == "bracket" { a.bracket(&b) } else { a.lsym(&b) }.at(pos)?;
                out.line(self.show_der(&r));
                out.set("derivation", self.der_json(&r));
                out.value = Some(Value::Der(r));
            }
            "fox" => {
                self.check_flags(c, &[])?;
                self.arity(c, 2)?;
                let a = self.eval_elem(&c.args[0])?;
                let i = self.eval_generator(&c.args[1])?;
                let d = fox_derivative(&a, i).at(pos)?;
                let s = d.display_with(&self.names);
                out.line(s.clone());
                out.set("derivative", json!(s));
            }
            "chain-rule" => {
                self.check_flags(c, &[])?;
                self.arity(c, 2)?;
                let (a, _) = self.eval_endo(&c.args[0])?;
                let (b, _) = self.eval_endo(&c.args[1])?;
                if !chain_rule_check(&a, &b).at(pos)? {
                    return Err(ScriptError::Runtime {
                        pos,
                        source: Error::Invariant("chain rule fails".into()),
                    });
                }
                out.line("J(phi∘psi) = phi(J(psi))·J(phi) holds");
                out.set("holds", json!(true));
            }
            "detect-wild" => {
                self.check_flags(c, &["context", "test", "evidence"])?;
                self.arity(c, 1)?;
                let (map, _) = self.eval_endo(&c.args[0])?;
                let ctx_flag = c
                    .flag("context")
                    .ok_or_else(|| semantic(pos, "detect-wild needs --context"))?;
                let tag = self
                    .flag_str(c, "context")?
                    .map(parse_context)
                    .transpose()
                    .map_err(|m| semantic(ctx_flag.pos, m))?
                    .expect("checked above");
                let mut ctx = QuotientContext::new(v, tag).at(pos)?;
                match self.flag_str(c, "evidence")? {
                    None => {}
                    Some("asserted") => ctx = ctx.with_evidence(Evidence::UserAsserted),
                    Some(other) => {
                        return Err(semantic(
                            c.flag("evidence").unwrap().pos,
                            format!("unknown evidence '{other}'"),
                        ))
                    }
                }
                let test = match self.flag_str(c, "test")? {
                    Some(t) => t.to_string(),
                    None if *ctx.ideal() == IdealTag::VarM2 => "commutator".into(),
                    None => "divergence".into(),
                };
                let cert = match test.as_str() {
                    "divergence" => detect_divergence_wild(&map, &ctx),
                    "commutator" => detect_rank2_associative(&map, &ctx),
                    other => return Err(semantic(c.flag("test").unwrap().pos, format!("unknown test '{other}'"))),
                }
                .at(pos)?;
                out.set("test", json!(test));
                self.certificate(&mut out, &cert);
            }
            "build-polynilpotent" => {
                self.check_flags(c, &["c", "rank", "expand"])?;
                self.arity(c, 0)?;
                let cf = c
                    .flag("c")
                    .ok_or_else(|| semantic(pos, "build-polynilpotent needs --c"))?;
                let classes =
                    parse_list(self.flag_str(c, "c")?.unwrap_or_default()).map_err(|m| semantic(cf.pos, m))?;
                let rank = self.flag_usize(c, "rank")?.unwrap_or(3);
                let limit = self.flag_usize(c, "expand")?.unwrap_or(DEFAULT_EXPANSION_LIMIT);
                let wit = build_polynilpotent_witness(&classes, rank, limit).at(pos)?;
                let r = &wit.report;
                let lie_names = Variety::lie(rank).default_names();
                out.line(format!("degrees of u_t: {:?}", r.degrees));
                out.line(format!(
                    "recursion {}; inequality {} < {} {}",
                    if r.degrees_match { "matches" } else { "differs" },
                    r.inequality_lhs,
                    r.product,
                    if r.inequality_holds { "holds" } else { "fails" }
                ));
                for lc in &r.lead_checks {
                    let word: Vec<String> = lc.predicted.iter().map(|i| format!("x{i}")).collect();
                    out.line(format!(
                        "lead of u_{}: {} with coefficient {}{}",
                        lc.t,
                        word.join(""),
                        lc.coefficient,
                        match lc.confirmed_by_expansion {
                            Some(true) => ", confirmed by expansion",
                            Some(false) => ", NOT confirmed by expansion",
                            None => "",
                        }
                    ));
                }
                out.set("report", serde_json::to_value(r).expect("serializable"));
                out.set("u", json!(wit.u.as_ref().map(|u| u.display_with(&lie_names))));
                out.set("w", json!(wit.w.as_ref().map(|w| w.display_with(&lie_names))));
                out.set(
                    "psi",
                    json!(wit.psi.as_ref().map(|p| p
                        .images()
                        .iter()
                        .map(|f| f.display_with(&lie_names))
                        .collect::<Vec<_>>())),
                );
                if let Some(u) = &wit.u {
                    out.line(format!("u = {}", u.display_with(&lie_names)));
                }
                if let Some(p) = &wit.psi {
                    out.line(format!("psi = {}", p.display_with(&lie_names)));
                }
                match wit.certify().at(pos)? {
                    Some(cert) => {
                        let mut sub = Output::new("certificate", pos.line);
                        sub.names = Some(lie_names);
                        self.certificate(&mut sub, &cert);
                        for l in &sub.text {
                            out.line(l.clone());
                        }
                        out.set("certificate", sub.json_object());
                    }
                    None => {
                        out.line(format!("u has degree above {limit}; psi not expanded"));
                        out.set("certificate", Json::Null);
                    }
                }
            }
            "span" => {
                self.check_flags(c, &["gens", "degree", "samples", "seed", "max-word-len"])?;
                self.arity(c, 0)?;
                let gf = c.flag("gens").ok_or_else(|| semantic(pos, "span needs --gens"))?;
                let mut gens = Vec::new();
                for g in self.flag_str(c, "gens")?.unwrap_or_default().split(',').map(str::trim) {
                    if let Some(fam) = GeneratorFamily::from_name(g) {
                        gens.extend(standard_generators(v, fam).at(pos)?);
                    } else if let Some(Value::Endo { map, auto }) = self.bindings.get(g) {
                        if !auto {
                            return Err(semantic(gf.pos, format!("'{g}' was not declared with auto(...)")));
                        }
                        gens.push(self.automorphism(map, pos)?);
                    } else {
                        return Err(semantic(gf.pos, format!("unknown generator set '{g}'")));
                    }
                }
                let degree = self
                    .flag_usize(c, "degree")?
                    .ok_or_else(|| semantic(pos, "span needs --degree"))?;
                let samples = self.flag_usize(c, "samples")?.unwrap_or(200);
                let seed = match self.opts.seed {
                    Some(s) => s,
                    None => self.flag_usize(c, "seed")?.unwrap_or(0) as u64,
                };
                let mut so = SpanOptions::default();
                if let Some(l) = self.flag_usize(c, "max-word-len")? {
                    so.max_word_len = l;
                }
                let r = tangent_span(&gens, degree, samples, seed, &so).at(pos)?;
                let d = &r.diagnostics;
                out.line(format!(
                    "rank {} at degree {} ({} samples, {} at this level)",
                    r.rank, r.degree, r.samples, r.hits
                ));
                out.line(format!("ranks by degree {:?}", r.ranks_by_degree));
                out.line(format!(
                    "closure: L0 {}, L-1 {}, brackets {} ({} checked), scalar conjugates {} ({} checked)",
                    d.l0_closed,
                    d.lm1_closed.map_or("n/a".to_string(), |b| b.to_string()),
                    d.brackets_closed,
                    d.brackets_checked,
                    d.scalar_conjugates_closed,
                    d.scalar_conjugates_checked
                ));
                out.set("rank", json!(r.rank));
                out.set("degree", json!(r.degree));
                out.set("samples", json!(r.samples));
                out.set("hits", json!(r.hits));
                out.set("seed", json!(seed));
                out.set(
                    "ranks_by_degree",
                    json!(r
                        .ranks_by_degree
                        .iter()
                        .map(|(k, v)| (k.to_string(), json!(*v)))
                        .collect::<serde_json::Map<_, _>>()),
                );
                out.set("diagnostics", serde_json::to_value(d).expect("serializable"));
                out.set(
                    "basis",
                    json!(r.basis.iter().map(|b| self.show_der(b)).collect::<Vec<_>>()),
                );
            }
            other => return Err(semantic(pos, format!("unknown command '{other}'"))),
        }
        Ok(out)
    }

    fn certificate(&self, out: &mut Output, cert: &WildnessCertificate) {
        let names = out.names.clone().unwrap_or_else(|| self.names.clone());
        let ctx = &cert.context;
        out.line(format!("verdict {}", cert.verdict));
        out.line(format!("level {}", cert.level));
        out.line(format!("T = {}", cert.tangent.display_with(&names)));
        if let Some(w) = &cert.witness {
            out.line(format!("witness {}", w.display_with(&names)));
        }
        out.line(format!(
            "context {}, min degree {}, evidence {}",
            ctx.ideal(),
            ctx.min_degree().map_or("none".to_string(), |m| m.to_string()),
            evidence_name(ctx.evidence())
        ));
        for h in &cert.hypotheses {
            out.line(format!(
                "[{}] {}: {}",
                if h.passed { "pass" } else { "fail" },
                h.name,
                h.detail
            ));
        }
        out.set("verdict", json!(cert.verdict));
        out.set("level", level_json(&cert.level));
        out.set(
            "tangent",
            json!({
                "coords": cert.tangent.coords().iter().map(|f| f.display_with(&names)).collect::<Vec<_>>(),
                "display": cert.tangent.display_with(&names),
            }),
        );
        out.set("witness", json!(cert.witness.as_ref().map(|w| w.display_with(&names))));
        out.set(
            "context",
            json!({
                "ambient": ctx.ambient().to_string(),
                "ideal": ctx.ideal().to_string(),
                "min_degree": ctx.min_degree(),
                "evidence": ctx.evidence(),
            }),
        );
        out.set(
            "hypotheses",
            serde_json::to_value(&cert.hypotheses).expect("serializable"),
        );
        out.set("trace", json!(cert.trace));
    }

    fn matrix_flag(&self, c: &Command) -> R<Matrix> {
        let n = self.variety.rank();
        if let Some(raw) = self.flag_str(c, "scalar")? {
            let pos = c.flag("scalar").unwrap().pos;
            let s = parse_rational(raw).map_err(|m| semantic(pos, m))?;
            return Ok(Matrix::scalar(n, s));
        }
        let f = c
            .flag("matrix")
            .ok_or_else(|| semantic(c.pos, "conjugate needs --matrix or --scalar"))?;
        let raw = self.flag_str(c, "matrix")?.unwrap_or_default();
        let rows: Vec<Vec<Rational>> = raw
            .split('|')
            .map(|r| {
                r.split(',')
                    .map(|x| parse_rational(x.trim()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()
            .map_err(|m| semantic(f.pos, m))?;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(semantic(
                f.pos,
                format!("--matrix must be {n}x{n}, rows separated by '|'"),
            ));
        }
        Ok(Matrix::from_rows(rows))
    }
}

fn evidence_name(e: &Evidence) -> String {
    match e {
        Evidence::Missing => "missing".into(),
        Evidence::ExactInverse => "exact inverse".into(),
        Evidence::VerifiedByTruncation { degree } => format!("verified by truncation through degree {degree}"),
        Evidence::NilpotentQuotientPattern { .. } => "nilpotent quotient pattern".into(),
        Evidence::UserAsserted => "user-asserted".into(),
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let bad = || format!("'{s}' is not a rational number");
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let r = match body.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Rational::new(a, b)
        }
        None => Rational::from_integer(body.trim().parse().map_err(|_| bad())?),
    };
    Ok(if neg { -r } else { r })
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| format!("'{}' is not a positive integer", x.trim()))
        })
        .collect()
}

/// `zero`, `metabelian`, `nilpotent:C`, `var-m2k`, `polynilpotent:C1,C2,..`, `user:MIN[:LABEL]`.
pub fn parse_context(s: &str) -> Result<IdealTag, String> {
    let (head, rest) = match s.split_once(':') {
        Some((h, r)) => (h.trim(), Some(r.trim())),
        None => (s.trim(), None),
    };
    Ok(match (head, rest) {
        ("zero" | "free", None) => IdealTag::Zero,
        ("metabelian", None) => IdealTag::Metabelian,
        ("nilpotent", Some(c)) => IdealTag::NilpotentClass {
            class: c.parse().map_err(|_| format!("bad nilpotency class '{c}'"))?,
        },
        ("var-m2k" | "var-m2", None) => IdealTag::VarM2,
        ("polynilpotent", Some(c)) => IdealTag::Polynilpotent {
            classes: parse_list(c)?,
        },
        ("user", Some(r)) => {
            let (m, label) = match r.split_once(':') {
                Some((m, l)) => (m.trim(), l.trim().to_string()),
                None => (r, "unnamed".to_string()),
            };
            IdealTag::UserAsserted {
                label,
                min_degree: m.parse().map_err(|_| format!("bad minimal degree '{m}'"))?,
            }
        }
        _ => return Err(format!("unknown context '{s}'")),
    })
}

/// Evaluates one expression in the given variety, with `names` for generators.
pub fn eval_element(src: &str, variety: Variety, names: &[String]) -> Result<Element, ScriptError> {
    let e = super::parse::parse_expr(src).map_err(ScriptError::Syntax)?;
    let env = Env {
        variety,
        names: names.to_vec(),
        bindings: HashMap::new(),
        opts: RunOptions::default(),
    };
    env.eval_elem(&e)
}

/// Parses a tuple as printed by `Endomorphism::display_with`.
pub fn eval_endomorphism(src: &str, variety: Variety, names: &[String]) -> Result<Endomorphism, ScriptError> {
    let e = super::parse::parse_expr(&format!("endo{src}")).map_err(ScriptError::Syntax)?;
    let env = Env {
        variety,
        names: names.to_vec(),
        bindings: HashMap::new(),
        opts: RunOptions::default(),
    };
    env.eval_endo(&e).map(|(m, _)| m)
}
