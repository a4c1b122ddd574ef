//! Exact symbolic reasoning about block operator matrices built from
//! constant-coefficient differential operators on (0,1).

pub mod block;
pub mod boundary;
pub mod commands;
pub mod domain;
pub mod dsl;
pub mod error;
pub mod examples;
pub mod expr;
pub mod gauss;
pub mod linalg;
pub mod numeric;
pub mod report;
pub mod sa;
pub mod scalar_op;
pub mod trace;

pub use block::BlockOperator;
pub use domain::ScalarDomain;
pub use error::{Error, Result};
pub use expr::FormalExpr;
pub use gauss::{GaussianRational, GQ};
pub use linalg::Matrix;
pub use scalar_op::{builtin, relative_bound, RelBound, ScalarOperator};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/scalar-operators.md")]
    mod scalar_operators {}
    #[doc = include_str!("../../../book/src/blocks-and-products.md")]
    mod blocks_and_products {}
    #[doc = include_str!("../../../book/src/block-adjoints.md")]
    mod block_adjoints {}
    #[doc = include_str!("../../../book/src/self-adjointness.md")]
    mod self_adjointness {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/spec-language.md")]
    mod spec_language {}
}
