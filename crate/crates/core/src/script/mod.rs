//! The tangentia script language.
//!
//! A script declares one variety, binds names to elements, endomorphisms and
//! derivations, and runs commands whose results are collected into a
//! [`Report`]. See `docs/dsl.md` for the grammar and command reference.

mod parse;
mod report;
mod run;

use thiserror::Error as ThisError;

pub use parse::{parse, parse_expr, BinOp, Command, Expr, Flag, Pos, Rhs, Script, Stmt, SyntaxError};
pub use report::{Output, Report, SCHEMA};
pub use run::{eval_element, eval_endomorphism, parse_context, run, RunOptions};

#[derive(Debug, ThisError)]
pub enum ScriptError {
    #[error("{0}")]
    Syntax(SyntaxError),
    #[error("error at {pos}: {message}")]
    Semantic { pos: Pos, message: String },
    #[error("error at {pos}: {source}")]
    Runtime {
        pos: Pos,
        #[source]
        source: crate::Error,
    },
}

impl ScriptError {
    pub fn pos(&self) -> Pos {
        match self {
            ScriptError::Syntax(e) => e.pos,
            ScriptError::Semantic { pos, .. } | ScriptError::Runtime { pos, .. } => *pos,
        }
    }

    /// Invariant violations inside the library, as opposed to mistakes in the script.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            ScriptError::Runtime {
                source: crate::Error::Invariant(_),
                ..
            }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScriptError::Syntax(_) => "syntax",
            ScriptError::Semantic { .. } => "semantic",
            ScriptError::Runtime { .. } if self.is_internal() => "invariant",
            ScriptError::Runtime { .. } => "runtime",
        }
    }
}

impl From<SyntaxError> for ScriptError {
    fn from(e: SyntaxError) -> Self {
        ScriptError::Syntax(e)
    }
}

/// Parses and runs a script.
pub fn run_source(src: &str, opts: &RunOptions) -> Result<Report, ScriptError> {
    run(&parse(src)?, opts)
}
