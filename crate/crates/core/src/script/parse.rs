//! Lexer and parser for tangentia scripts.
//!
//! ```text
//! variety polynomial(3) vars x, y, z;
//! let c = z*x - y^2;
//! nagata := auto(x + 2*y*c + z*c^2, y + z*c, z);
//! ninv := invert nagata --degree 4;
//! divergence tangent(nagata);
//! compose nagata, ninv --degree 4;
//! ```
//!
//! Statements end with `;`. `#` starts a comment running to the end of the line.

use std::fmt;

use num::BigInt;

use crate::freealg::VarietyKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Assign,
    DashDash,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: Pos,
    start: usize,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < bytes.len() {
        let (off, ch) = bytes[i];
        let pos = Pos { line, col };
        let advance = |i: &mut usize, col: &mut usize, n: usize| {
            *i += n;
            *col += n;
        };
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            advance(&mut i, &mut col, 1);
            continue;
        }
        if ch == '#' {
            while i < bytes.len() && bytes[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut j = i;
            while j < bytes.len() && (bytes[j].1.is_ascii_alphanumeric() || bytes[j].1 == '_') {
                j += 1;
            }
            let end = bytes.get(j).map_or(src.len(), |b| b.0);
            out.push(Token {
                tok: Tok::Ident(src[off..end].to_string()),
                pos,
                start: off,
                end,
            });
            let n = j - i;
            advance(&mut i, &mut col, n);
            continue;
        }
        if ch.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].1.is_ascii_digit() {
                j += 1;
            }
            let end = bytes.get(j).map_or(src.len(), |b| b.0);
            let n: BigInt = src[off..end].parse().expect("digits");
            out.push(Token {
                tok: Tok::Int(n),
                pos,
                start: off,
                end,
            });
            let n = j - i;
            advance(&mut i, &mut col, n);
            continue;
        }
        let next = bytes.get(i + 1).map(|b| b.1);
        let (tok, n) = match (ch, next) {
            (':', Some('=')) => (Tok::Assign, 2),
            ('-', Some('-')) => (Tok::DashDash, 2),
            ('+' | '-' | '*' | '/' | '^' | '(' | ')' | '[' | ']' | ',' | ';' | '=' | '|' | ':' | '.', _) => {
                (Tok::Sym(ch), 1)
            }
            _ => {
                return Err(SyntaxError {
                    pos,
                    message: format!("unexpected character '{ch}'"),
                })
            }
        };
        let end = off + ch.len_utf8() * n;
        out.push(Token {
            tok,
            pos,
            start: off,
            end,
        });
        advance(&mut i, &mut col, n);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(BigInt, Pos),
    Ident(String, Pos),
    Neg(Box<Expr>, Pos),
    Bin(BinOp, Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, u32, Pos),
    Bracket(Box<Expr>, Box<Expr>, Pos),
    Call(String, Vec<Expr>, Pos),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Num(_, p)
            | Expr::Ident(_, p)
            | Expr::Neg(_, p)
            | Expr::Bin(_, _, _, p)
            | Expr::Pow(_, _, p)
            | Expr::Bracket(_, _, p)
            | Expr::Call(_, _, p) => *p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    pub name: String,
    /// Raw source text of the value, trimmed; `None` for switches.
    pub value: Option<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub name: String,
    pub args: Vec<Expr>,
    pub flags: Vec<Flag>,
    pub pos: Pos,
}

impl Command {
    pub fn flag(&self, name: &str) -> Option<&Flag> {
        self.flags.iter().find(|f| f.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs {
    Expr(Expr),
    Command(Command),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Variety {
        kind: VarietyKind,
        rank: usize,
        names: Option<Vec<String>>,
        pos: Pos,
    },
    Bind {
        name: String,
        rhs: Rhs,
        pos: Pos,
    },
    Command(Command),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Script {
    pub statements: Vec<Stmt>,
}

/// Commands that produce a value and may appear after `name :=`.
pub const VALUE_COMMANDS: &[&str] = &[
    "compose",
    "invert",
    "commutator",
    "tangent",
    "conjugate",
    "bracket",
    "lsym",
    "apply",
    "eval",
];

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    i: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or_else(
            || {
                let line = self.src.lines().count().max(1);
                let col = self.src.lines().last().map_or(1, |l| l.chars().count() + 1);
                Pos { line, col }
            },
            |t| t.pos,
        )
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.is_sym(c) {
            self.i += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn int(&mut self) -> PResult<BigInt> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.i += 1;
                Ok(n)
            }
            _ => self.err("expected an integer"),
        }
    }

    /// A hyphenated word such as `ia-level` written without spaces.
    fn word(&mut self) -> PResult<String> {
        let mut s = self.ident()?;
        while self.is_sym('-')
            && self.toks[self.i].start == self.toks[self.i - 1].end
            && matches!(self.peek_at(1), Some(Tok::Ident(_)))
            && self.toks[self.i + 1].start == self.toks[self.i].end
        {
            self.i += 1;
            s.push('-');
            s.push_str(&self.ident()?);
        }
        Ok(s)
    }

    fn script(&mut self) -> PResult<Script> {
        let mut statements = Vec::new();
        while self.i < self.toks.len() {
            if self.is_sym(';') {
                self.i += 1;
                continue;
            }
            statements.push(self.statement()?);
        }
        Ok(Script { statements })
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let pos = self.pos();
        let Some(Tok::Ident(first)) = self.peek().cloned() else {
            return self.err("expected a statement");
        };
        if first == "variety" {
            self.i += 1;
            let kname = self.word()?;
            let Some(kind) = VarietyKind::from_keyword(&kname) else {
                return Err(SyntaxError {
                    pos,
                    message: format!("unknown variety '{kname}'"),
                });
            };
            self.expect_sym('(')?;
            let rank_pos = self.pos();
            let rank = self.int()?;
            self.expect_sym(')')?;
            let rank: usize = rank.try_into().map_err(|_| SyntaxError {
                pos: rank_pos,
                message: "rank out of range".into(),
            })?;
            let mut names = None;
            if matches!(self.peek(), Some(Tok::Ident(s)) if s == "vars") {
                self.i += 1;
                let mut v = vec![self.ident()?];
                while self.is_sym(',') {
                    self.i += 1;
                    v.push(self.ident()?);
                }
                names = Some(v);
            }
            self.expect_sym(';')?;
            return Ok(Stmt::Variety { kind, rank, names, pos });
        }
        if first == "let" {
            self.i += 1;
            let name = self.ident()?;
            self.expect_sym('=')?;
            let rhs = self.rhs()?;
            self.expect_sym(';')?;
            return Ok(Stmt::Bind { name, rhs, pos });
        }
        if self.peek_at(1) == Some(&Tok::Assign) {
            let name = self.ident()?;
            self.i += 1;
            let rhs = self.rhs()?;
            self.expect_sym(';')?;
            return Ok(Stmt::Bind { name, rhs, pos });
        }
        let cmd = self.command()?;
        self.expect_sym(';')?;
        Ok(Stmt::Command(cmd))
    }

    fn rhs(&mut self) -> PResult<Rhs> {
        if let Some(Tok::Ident(s)) = self.peek() {
            if VALUE_COMMANDS.contains(&s.as_str()) && self.peek_at(1) != Some(&Tok::Sym('(')) {
                return Ok(Rhs::Command(self.command()?));
            }
        }
        Ok(Rhs::Expr(self.expr()?))
    }

    fn command(&mut self) -> PResult<Command> {
        let pos = self.pos();
        let name = self.word()?;
        let mut args = Vec::new();
        if !self.is_sym(';') && self.peek() != Some(&Tok::DashDash) {
            args.push(self.expr()?);
            while self.is_sym(',') {
                self.i += 1;
                args.push(self.expr()?);
            }
        }
        let mut flags = Vec::new();
        while self.peek() == Some(&Tok::DashDash) {
            let fpos = self.pos();
            let dash_end = self.toks[self.i].end;
            self.i += 1;
            if self.i >= self.toks.len() || self.toks[self.i].start != dash_end {
                return self.err("expected a flag name directly after '--'");
            }
            let fname = self.word()?;
            let start = self.i;
            while self.i < self.toks.len() && !self.is_sym(';') && self.peek() != Some(&Tok::DashDash) {
                self.i += 1;
            }
            let value = if start == self.i {
                None
            } else {
                Some(
                    self.src[self.toks[start].start..self.toks[self.i - 1].end]
                        .trim()
                        .to_string(),
                )
            };
            flags.push(Flag {
                name: fname,
                value,
                pos: fpos,
            });
        }
        Ok(Command { name, args, flags, pos })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.is_sym('+') {
                BinOp::Add
            } else if self.is_sym('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let pos = self.pos();
            self.i += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.is_sym('*') {
                BinOp::Mul
            } else if self.is_sym('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let pos = self.pos();
            self.i += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), pos);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.is_sym('-') {
            let pos = self.pos();
            self.i += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?), pos));
        }
        if self.is_sym('+') {
            self.i += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.atom()?;
        if self.is_sym('^') {
            let pos = self.pos();
            self.i += 1;
            let e = self.int()?;
            let e: u32 = e.try_into().map_err(|_| SyntaxError {
                pos,
                message: "exponent out of range".into(),
            })?;
            return Ok(Expr::Pow(Box::new(base), e, pos));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                Ok(Expr::Num(n, pos))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                if self.is_sym('(') {
                    self.i += 1;
                    let mut args = Vec::new();
                    if !self.is_sym(')') {
                        args.push(self.expr()?);
                        while self.is_sym(',') {
                            self.i += 1;
                            args.push(self.expr()?);
                        }
                    }
                    self.expect_sym(')')?;
                    return Ok(Expr::Call(name, args, pos));
                }
                Ok(Expr::Ident(name, pos))
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Sym('[')) => {
                self.i += 1;
                let a = self.expr()?;
                self.expect_sym(',')?;
                let b = self.expr()?;
                self.expect_sym(']')?;
                Ok(Expr::Bracket(Box::new(a), Box::new(b), pos))
            }
            _ => self.err("expected an expression"),
        }
    }
}

pub fn parse(src: &str) -> Result<Script, SyntaxError> {
    let toks = lex(src)?;
    Parser { src, toks, i: 0 }.script()
}

/// Parses a single expression, e.g. one produced by `Element::display_with`.
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { src, toks, i: 0 };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nagata_script() {
        let s = parse(
            "variety polynomial(3) vars x,y,z; let c = z*x - y^2; nagata := auto(x + 2*y*c + z*c^2, y + z*c, z);",
        )
        .unwrap();
        assert_eq!(s.statements.len(), 3);
        assert!(
            matches!(&s.statements[2], Stmt::Bind { name, rhs: Rhs::Expr(Expr::Call(f, a, _)), .. } if name == "nagata" && f == "auto" && a.len() == 3)
        );
    }

    #[test]
    fn commands_and_flags() {
        let s = parse("variety lie(3);\ndetect-wild eps --context nilpotent:3 --assert-automorphism;\nspan --gens gl, tau --degree 1;").unwrap();
        let Stmt::Command(c) = &s.statements[1] else { panic!() };
        assert_eq!(c.name, "detect-wild");
        assert_eq!(c.flag("context").unwrap().value.as_deref(), Some("nilpotent:3"));
        assert_eq!(c.flag("assert-automorphism").unwrap().value, None);
        assert_eq!(c.pos.line, 2);
        let Stmt::Command(c) = &s.statements[2] else { panic!() };
        assert_eq!(c.flag("gens").unwrap().value.as_deref(), Some("gl, tau"));
        assert!(c.args.is_empty());
    }

    #[test]
    fn value_commands() {
        let s = parse("variety polynomial(2); f := invert g --degree 4; h := tangent(g);").unwrap();
        assert!(matches!(&s.statements[1], Stmt::Bind { rhs: Rhs::Command(c), .. } if c.name == "invert"));
        assert!(matches!(
            &s.statements[2],
            Stmt::Bind {
                rhs: Rhs::Expr(Expr::Call(..)),
                ..
            }
        ));
    }

    #[test]
    fn errors_have_positions() {
        let e = parse("variety lie(2);\nbad := auto(x1 + , x2);").unwrap_err();
        assert_eq!(e.pos.line, 2);
        assert_eq!(e.pos.col, 18);
        assert!(parse("variety lie(2) @").is_err());
        assert!(parse("variety lie(2)").is_err());
    }
}
