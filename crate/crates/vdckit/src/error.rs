//! Error type shared across the toolkit.

use crate::ident::Ident;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VdcError {
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("unsupported arity {requested} (handle supports up to {supported})")]
    UnsupportedArity { requested: usize, supported: usize },
    #[error("unknown loose morphism {0}")]
    UnknownLoose(Ident),
    #[error("unknown object {0}")]
    UnknownObject(Ident),
    #[error("unknown tight morphism {0}")]
    UnknownTight(Ident),
    #[error("unknown cell {0}")]
    UnknownCell(Ident),
    #[error("chain is not composable: {0}")]
    NotComposable(String),
    #[error("size exceeded: {0}")]
    SizeExceeded(String),
    #[error("coherence failure: {0}")]
    CoherenceFailure(String),
    #[error("missing normal structure on {0}")]
    MissingNormalStructure(String),
    #[error("invalid monad: {0}")]
    InvalidMonad(String),
    #[error("incoherent lax functor: {0}")]
    IncoherentLaxFunctor(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid presheaf: {0}")]
    InvalidPresheaf(String),
    #[error("not a discrete fibration: {0}")]
    NotDiscreteFibration(String),
    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, VdcError>;
