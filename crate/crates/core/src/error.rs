use core::fmt;

use crate::prelude::*;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while building or querying a model.
///
/// `Inconsistent` is reserved for situations that indicate a bug (two
/// independent computations disagree); all other variants are caused by the
/// input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A caller broke a documented precondition.
    Contract(String),
    /// A generator or value has the wrong degree.
    Degree {
        context: String,
        expected: i64,
        found: i64,
    },
    /// `d∘d` does not vanish on a generator.
    DifferentialSquare { generator: String, residual: String },
    /// A morphism fails `φ∘d = d∘φ` (or a cap) on the listed generators.
    ChainCondition { generators: Vec<String> },
    /// Generator name lookup failed.
    UnknownGenerator(String),
    /// A minimal Sullivan algebra was required.
    NotMinimal(String),
    /// The KS ordering condition fails for a fiber generator.
    Nilpotence { generator: String },
    /// `D′ - d` is not of the form `θ·x`.
    MalformedTwist(String),
    /// A morphism is not a generator projection.
    NotProjection(String),
    /// A product of two unknown-dependent terms does not vanish.
    Nonlinear(String),
    /// Two independent computations disagree.
    Inconsistent(String),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// True when the error signals an internal bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Inconsistent(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Contract(m) => write!(f, "contract violation: {m}"),
            Error::Degree {
                context,
                expected,
                found,
            } => write!(f, "degree error in {context}: expected {expected}, found {found}"),
            Error::DifferentialSquare {
                generator,
                residual,
            } => write!(f, "d∘d ≠ 0 on {generator}: d(d {generator}) = {residual}"),
            Error::ChainCondition { generators } => {
                write!(f, "chain condition fails on {}", generators.join(", "))
            }
            Error::UnknownGenerator(g) => write!(f, "unknown generator `{g}`"),
            Error::NotMinimal(m) => write!(f, "not a minimal Sullivan algebra: {m}"),
            Error::Nilpotence { generator } => {
                write!(f, "KS ordering violated: D({generator}) involves {generator} or a later fiber generator")
            }
            Error::MalformedTwist(m) => write!(f, "malformed twist: {m}"),
            Error::NotProjection(m) => write!(f, "not a generator projection: {m}"),
            Error::Nonlinear(m) => write!(f, "expression is not affine in its parameters: {m}"),
            Error::Inconsistent(m) => write!(f, "internal inconsistency: {m}"),
        }
    }
}

impl core::error::Error for Error {}
