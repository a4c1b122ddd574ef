//! Line-oriented specification files: operator and block definitions plus a list
//! of commands.
//!
//! ```text
//! # Dirichlet and Neumann Laplacians
//! [operator LD]
//! expr = -D^2
//! bc = f(0) = 0; f(1) = 0
//!
//! [block Lcal]
//! row = LD; LN
//! row = LN; -LD
//!
//! [run]
//! check-adjoint Lcal
//! ```
//!
//! Names resolve to definitions in the file first and then to the builtin catalog
//! (`L`, `L0`, `LD`, `LN`, `M`, `M0`, `Mstar`, `I`, `Zero`).

mod parse;
mod print;

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

pub use parse::parse;
pub use print::print;

use crate::block::{BlockOperator, Side};
use crate::boundary::BCMatrix;
use crate::domain::ScalarDomain;
use crate::error::{Error, Result};
use crate::expr::FormalExpr;
use crate::gauss::GQ;
use crate::linalg::Matrix;
use crate::scalar_op::{builtin, ScalarOperator};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperatorDef {
    pub name: String,
    pub expr: FormalExpr,
    /// Sobolev order of the domain; the expression order when absent.
    pub space: Option<usize>,
    /// Condition rows over the boundary layout of the Sobolev order.
    pub bc: Vec<Vec<GQ>>,
    pub flags: Vec<String>,
}

impl OperatorDef {
    pub fn sobolev(&self) -> usize {
        self.space.unwrap_or_else(|| self.expr.order())
    }

    pub fn operator(&self) -> Result<ScalarOperator> {
        let n = self.sobolev();
        let cols = 2 * n;
        let bc = BCMatrix::new(n, Matrix::from_rows(cols, self.bc.clone()))?;
        Ok(ScalarOperator::new(self.expr.clone(), ScalarDomain::new(n, bc)?)?.named(&self.name))
    }
}

/// `coeff·op`, or the constant `coeff·I` when `op` is absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub coeff: GQ,
    pub op: Option<String>,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coeff;
        match &self.op {
            None => write!(f, "{c}"),
            Some(n) if c.is_one() => write!(f, "{n}"),
            Some(n) if *c == GQ::int(-1) => write!(f, "-{n}"),
            Some(n) if c.re.is_zero() || c.im.is_zero() => write!(f, "{c}*{n}"),
            Some(n) => write!(f, "({c})*{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockDef {
    pub name: String,
    pub rows: Vec<Vec<Entry>>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Adjoint { name: String },
    Closure { name: String },
    Relbound { s: String, t: String },
    Product { a: String, b: String },
    CheckAdjoint { block: String },
    Factorize { block: String, lambda: GQ, side: Side },
    CheckSa { block: String },
    CheckEsa { block: String },
    Verify { block: String },
    Examples,
}

impl Command {
    /// Names the command refers to.
    pub fn names(&self) -> Vec<&str> {
        match self {
            Command::Adjoint { name } | Command::Closure { name } => vec![name],
            Command::Relbound { s, t } => vec![s, t],
            Command::Product { a, b } => vec![a, b],
            Command::CheckAdjoint { block }
            | Command::Factorize { block, .. }
            | Command::CheckSa { block }
            | Command::CheckEsa { block }
            | Command::Verify { block } => vec![block],
            Command::Examples => vec![],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Adjoint { name } => write!(f, "adjoint {name}"),
            Command::Closure { name } => write!(f, "closure {name}"),
            Command::Relbound { s, t } => write!(f, "relbound {s} {t}"),
            Command::Product { a, b } => write!(f, "product {a} {b}"),
            Command::CheckAdjoint { block } => write!(f, "check-adjoint {block}"),
            Command::Factorize { block, lambda, side } => {
                let side = match side {
                    Side::First => 1,
                    Side::Second => 2,
                };
                write!(f, "factorize {block} --lambda {lambda} --side {side}")
            }
            Command::CheckSa { block } => write!(f, "check-sa {block}"),
            Command::CheckEsa { block } => write!(f, "check-esa {block}"),
            Command::Verify { block } => write!(f, "verify {block}"),
            Command::Examples => write!(f, "examples"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpecDocument {
    pub operators: Vec<OperatorDef>,
    pub blocks: Vec<BlockDef>,
    pub commands: Vec<Command>,
}

/// A resolved name.
#[derive(Clone, Debug)]
pub enum Resolved {
    Operator(ScalarOperator),
    Block(BlockOperator),
}

impl SpecDocument {
    pub fn is_empty(&self) -> bool {
        self.operators.is_empty() && self.blocks.is_empty() && self.commands.is_empty()
    }

    pub fn operator(&self, name: &str) -> Result<ScalarOperator> {
        match self.operators.iter().find(|o| o.name == name) {
            Some(def) => def.operator(),
            None => builtin(name).map_err(|_| Error::Unresolved(name.to_string())),
        }
    }

    pub fn entry(&self, e: &Entry) -> Result<ScalarOperator> {
        match &e.op {
            None if e.coeff.is_zero() => Ok(ScalarOperator::zero()),
            None => Ok(ScalarOperator::scalar(e.coeff.clone())),
            Some(n) => {
                let op = self.operator(n)?;
                Ok(if e.coeff.is_one() { op } else { op.scale(&e.coeff).named(e.to_string()) })
            }
        }
    }

    /// A block definition, or a defined operator viewed as a 1×1 block.
    pub fn block(&self, name: &str) -> Result<BlockOperator> {
        match self.blocks.iter().find(|b| b.name == name) {
            Some(def) => {
                let entries = def
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|e| self.entry(e)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(BlockOperator::new(entries)?.named(name))
            }
            None => Ok(BlockOperator::new(vec![vec![self.operator(name)?]])?.named(name)),
        }
    }

    pub fn resolve(&self, name: &str) -> Result<Resolved> {
        if self.blocks.iter().any(|b| b.name == name) {
            self.block(name).map(Resolved::Block)
        } else {
            self.operator(name).map(Resolved::Operator)
        }
    }

    pub fn block_flags(&self, name: &str) -> &[String] {
        self.blocks.iter().find(|b| b.name == name).map(|b| b.flags.as_slice()).unwrap_or(&[])
    }

    /// Operators carrying `flag`, by name.
    pub fn flagged(&self, flag: &str) -> Vec<String> {
        self.operators.iter().filter(|o| o.flags.iter().any(|f| f == flag)).map(|o| o.name.clone()).collect()
    }
}

pub const OPERATOR_FLAGS: [&str; 2] = ["max_accretive", "resolvent_nonempty"];
pub const BLOCK_FLAGS: [&str; 1] = ["core"];
