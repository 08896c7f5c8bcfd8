use thiserror::Error;

use crate::freealg::Variety;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variety mismatch: expected {expected}, found {found}")]
    VarietyMismatch { expected: Variety, found: Variety },

    #[error("arity mismatch: expected {expected} arguments, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("rank must be at least 1")]
    InvalidRank,

    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("constants are not allowed in the non-unital variety {0}")]
    ConstantInNonUnital(Variety),

    #[error("constant part is only allowed for affine maps of unital varieties")]
    UnexpectedConstant,

    #[error("endomorphism is not IA: {0}")]
    NotIa(String),

    #[error("linear part is not invertible")]
    SingularLinearPart,

    #[error("elementary map: image of x{0} may not involve x{0}")]
    GeneratorInvolved(usize),

    #[error("zero scaling factor in elementary map")]
    ZeroScalar,

    #[error("element does not lie in the derived algebra; the reduced enveloping algebra acts only there")]
    NotInDerivedAlgebra,

    #[error("invalid polynilpotent parameters: {0}")]
    InvalidPolynilpotent(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
