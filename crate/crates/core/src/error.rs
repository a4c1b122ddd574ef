use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expression order {order} exceeds the cap of {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("cannot lift boundary conditions from order {from} down to order {to}")]
    LiftDown { from: usize, to: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain has Sobolev order {sobolev} below the expression order {order}")]
    SobolevTooLow { sobolev: usize, order: usize },

    #[error("restriction target is not contained in the operator domain")]
    NotSubset,

    #[error("unknown builtin operator `{0}`")]
    UnknownBuiltin(String),

    #[error("hypothesis failed ({rule}): {detail}")]
    Hypothesis { rule: String, detail: String },

    #[error("domain has no matrix representation")]
    NotRectangular,

    #[error("form domain undefined: {0}")]
    FormDomain(String),

    #[error("Galerkin basis incompatible: {0}")]
    BasisIncompatible(String),

    #[error("test function outside the required domain: {0}")]
    Membership(String),

    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unresolved name `{0}`")]
    Unresolved(String),

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
