//! Frobenius–Schur factorization of a 2×2 block around a Schur complement.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::composite::{CompositeOperator, Flag, Flags};
use super::BlockOperator;
use crate::domain::ScalarDomain;
use crate::error::{Error, Result};
use crate::gauss::GQ;
use crate::scalar_op::{describe, ScalarOperator};
use crate::trace::{ProofTrace, Rule};

/// Which diagonal entry is inverted: `First` uses `(D − λ)⁻¹`, `Second` uses `(A − λ)⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurKind {
    Complement,
    LeftFactor,
    Middle,
    RightFactor,
}

/// One piece of a factorization; these are outside the symbolic class because they
/// contain a resolvent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchurPart {
    pub kind: SchurKind,
    pub side: Side,
    pub lambda: GQ,
    pub a: ScalarOperator,
    pub b: ScalarOperator,
    pub c: ScalarOperator,
    pub d: ScalarOperator,
    /// Domain of the Schur complement.
    pub domain: ScalarDomain,
}

/// `x - λ` written so that it reads unambiguously: `x + 2i`, `x - (1+i)`.
pub fn shifted(x: &str, lambda: &GQ) -> String {
    let l = lambda.to_string();
    if !lambda.re.is_zero() && !lambda.im.is_zero() {
        format!("{x} - ({l})")
    } else if let Some(pos) = l.strip_prefix('-') {
        format!("{x} + {pos}")
    } else {
        format!("{x} - {l}")
    }
}

impl fmt::Display for SchurPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c, d) = (describe(&self.a), describe(&self.b), describe(&self.c), describe(&self.d));
        let l = &self.lambda;
        let (al, dl) = (shifted(&a, l), shifted(&d, l));
        match (self.side, self.kind) {
            (Side::First, SchurKind::Complement) => write!(f, "S1({l}) = {} - {b}({dl})^-1 {c}", shifted(&a, l)),
            (Side::First, SchurKind::LeftFactor) => write!(f, "[[I, {b}({dl})^-1], [0, I]]"),
            (Side::First, SchurKind::Middle) => write!(f, "[[S1({l}), 0], [0, {dl}]]"),
            (Side::First, SchurKind::RightFactor) => write!(f, "[[I, 0], [({dl})^-1 {c}, I]]"),
            (Side::Second, SchurKind::Complement) => write!(f, "S2({l}) = {} - {c}({al})^-1 {b}", shifted(&d, l)),
            (Side::Second, SchurKind::LeftFactor) => write!(f, "[[I, 0], [{c}({al})^-1, I]]"),
            (Side::Second, SchurKind::Middle) => write!(f, "[[{al}, 0], [0, S2({l})]]"),
            (Side::Second, SchurKind::RightFactor) => write!(f, "[[I, ({al})^-1 {b}], [0, I]]"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Factorization {
    pub left: CompositeOperator,
    pub middle: CompositeOperator,
    pub right: CompositeOperator,
    pub schur: CompositeOperator,
    pub part: SchurPart,
    pub trace: ProofTrace,
}

fn hypothesis(detail: impl Into<String>) -> Error {
    Error::Hypothesis { rule: "Corollary 2.1".into(), detail: detail.into() }
}

/// `𝒜 − λ` as a product of three factors around a Schur complement.
///
/// `resolvent_declared` records user metadata that `λ` lies in the resolvent set of
/// the inverted entry; otherwise that entry must be self-adjoint and `λ` nonreal.
pub fn frobenius_schur(
    block: &BlockOperator,
    lambda: &GQ,
    side: Side,
    resolvent_declared: bool,
) -> Result<Factorization> {
    if block.size() != 2 {
        return Err(Error::Dimension("Frobenius-Schur factorization needs a 2×2 block".into()));
    }
    let (a, b, c, d) = (block.entry(0, 0), block.entry(0, 1), block.entry(1, 0), block.entry(1, 1));
    let (inv, inv_name, coupled, coupled_name) = match side {
        Side::First => (d, "D", b, "B"),
        Side::Second => (a, "A", c, "C"),
    };
    if !inv.is_closed() {
        return Err(hypothesis(format!("{inv_name} = {} is not closed", describe(inv))));
    }
    let resolvent = if inv.is_self_adjoint() && !lambda.is_real() {
        format!("{inv_name} is self-adjoint and {lambda} is not real")
    } else if resolvent_declared {
        format!("{lambda} ∈ ρ({inv_name}) is declared")
    } else {
        return Err(hypothesis(format!("{lambda} ∈ ρ({inv_name}) is not established")));
    };
    if !inv.dom().is_subset(coupled.dom()) {
        return Err(hypothesis(format!("D({inv_name}) ⊄ D({coupled_name})")));
    }
    let domain = match side {
        Side::First => a.dom().intersect(c.dom()),
        Side::Second => b.dom().intersect(d.dom()),
    };
    let part = |kind| SchurPart {
        kind,
        side,
        lambda: lambda.clone(),
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
        d: d.clone(),
        domain: domain.clone(),
    };
    let bounded_corner = format!(
        "{coupled_name}({inv_name} - λ)^-1 is closed and everywhere defined since D({inv_name}) ⊂ D({coupled_name})"
    );
    let left_flags = Flags {
        bounded_everywhere: Flag::yes(bounded_corner.clone()),
        closed: Flag::yes("bounded and everywhere defined"),
        densely_defined: Flag::yes("everywhere defined"),
        boundedly_invertible: Flag::yes("triangular with identity diagonal and bounded corner"),
        ..Flags::default()
    };
    let right_flags = Flags { densely_defined: Flag::yes("contains the product of dense domains"), ..Flags::default() };
    let left = CompositeOperator::schur(part(SchurKind::LeftFactor), left_flags);
    let right = CompositeOperator::schur(part(SchurKind::RightFactor), right_flags);
    let middle = CompositeOperator::schur(part(SchurKind::Middle), Flags::default());
    let schur = CompositeOperator::schur(part(SchurKind::Complement), Flags::default());
    let mut trace = ProofTrace::new();
    trace.push(
        Rule::FrobeniusSchur,
        vec![block.grid(), format!("λ = {lambda}")],
        format!("{resolvent}; {} on D = {domain}; {bounded_corner}", part(SchurKind::Complement)),
    );
    Ok(Factorization { left, middle, right, schur, part: part(SchurKind::Complement), trace })
}
