//! Proof traces: which rule fired, on what, and what it concluded.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    ScalarCalculus,
    InducedDomain,
    MatrixRepresentation,
    ProductEquality,
    FrobeniusSchur,
    FormalAdjoint,
    AdjointRepresentation,
    BoundedLeftFactor,
    InvertibleRightFactor,
    RelativelyBoundedSum,
    BoundedAdjoint,
    DiagonalAdjoint,
    DoubleAdjoint,
    ShiftAdjoint,
    SymmetryCriterion,
    NecessaryForm,
    BasicAssumptions,
    PermutationRegrouping,
    OrthogonalSum,
    DiagonalDominance,
    SquaredBound,
    MixedBounds,
    ZeroBound,
    SchurCriterion,
    EssentialSchurCriterion,
    FormDomainCore,
    OffDiagonalMixed,
    MaximalAccretive,
    OffDiagonalZero,
    PerturbationClosure,
    ClosedByDoubleAdjoint,
    Numeric,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::ScalarCalculus => "scalar boundary-form calculus",
            Rule::InducedDomain => "induced domain",
            Rule::MatrixRepresentation => "matrix representation criterion",
            Rule::ProductEquality => "formal product equals product",
            Rule::FrobeniusSchur => "Frobenius-Schur factorization",
            Rule::FormalAdjoint => "formal adjoint",
            Rule::AdjointRepresentation => "formal adjoint and matrix representation",
            Rule::BoundedLeftFactor => "(ST)* = T*S*, S bounded everywhere",
            Rule::InvertibleRightFactor => "(ST)* = T*S*, T closed with closed finite-codimension range",
            Rule::RelativelyBoundedSum => "(S+T)* = S*+T*, relative bounds < 1",
            Rule::BoundedAdjoint => "adjoint of a bounded matrix",
            Rule::DiagonalAdjoint => "adjoint of a diagonal block",
            Rule::DoubleAdjoint => "double adjoint of a closed operator",
            Rule::ShiftAdjoint => "adjoint of a scalar shift",
            Rule::SymmetryCriterion => "symmetry criterion",
            Rule::NecessaryForm => "necessary form of a self-adjoint block",
            Rule::BasicAssumptions => "basic assumptions",
            Rule::PermutationRegrouping => "permutation regrouping",
            Rule::OrthogonalSum => "orthogonal sum of self-adjoint operators",
            Rule::DiagonalDominance => "diagonal dominance",
            Rule::SquaredBound => "squared bound",
            Rule::MixedBounds => "mixed relative bounds",
            Rule::ZeroBound => "relative bound zero",
            Rule::SchurCriterion => "Schur complement criterion",
            Rule::EssentialSchurCriterion => "Schur complement criterion, essential version",
            Rule::FormDomainCore => "form domain and core",
            Rule::OffDiagonalMixed => "off-diagonal dominance, C = B = B*",
            Rule::MaximalAccretive => "off-diagonal dominance, maximal accretive B",
            Rule::OffDiagonalZero => "off-diagonal dominance, relative bound zero",
            Rule::PerturbationClosure => "closure of a relatively bounded perturbation",
            Rule::ClosedByDoubleAdjoint => "closed since T** = T",
            Rule::Numeric => "numeric evidence",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            Rule::ScalarCalculus => "Example 2.1, Example 3.1",
            Rule::InducedDomain => "Definition 1.1",
            Rule::MatrixRepresentation => "Lemma 2.1",
            Rule::ProductEquality => "Theorem 2.1",
            Rule::FrobeniusSchur => "Corollary 2.1",
            Rule::FormalAdjoint => "Definition 2.3",
            Rule::AdjointRepresentation => "Theorem 2.2",
            Rule::BoundedLeftFactor => "Lemma A.1",
            Rule::InvertibleRightFactor => "Lemma A.2",
            Rule::RelativelyBoundedSum => "Lemma A.3",
            Rule::BoundedAdjoint => "bounded operators",
            Rule::DiagonalAdjoint => "orthogonal sums",
            Rule::DoubleAdjoint => "T** is the closure of T",
            Rule::ShiftAdjoint => "(T - c)* = T* - conj(c)",
            Rule::SymmetryCriterion => "eq. (3.1)",
            Rule::NecessaryForm => "Proposition 3.1",
            Rule::BasicAssumptions => "Section 3, basic assumptions",
            Rule::PermutationRegrouping => "Example 3.1, Lemma A.2, Lemma A.3",
            Rule::OrthogonalSum => "orthogonal sums",
            Rule::DiagonalDominance => "Proposition 3.2",
            Rule::SquaredBound => "Proposition 3.3",
            Rule::MixedBounds => "Corollary 3.1",
            Rule::ZeroBound => "Corollary 3.2",
            Rule::SchurCriterion => "Theorem 3.1",
            Rule::EssentialSchurCriterion => "Theorem 3.2",
            Rule::FormDomainCore => "Corollary 3.3",
            Rule::OffDiagonalMixed => "Corollary 3.4",
            Rule::MaximalAccretive => "Corollary 3.5",
            Rule::OffDiagonalZero => "Corollary 3.6",
            Rule::PerturbationClosure => "Appendix A, relative boundedness",
            Rule::ClosedByDoubleAdjoint => "T** is the closure of T",
            Rule::Numeric => "numeric verification",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub rule: Rule,
    pub citation: String,
    pub inputs: Vec<String>,
    pub conclusion: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub steps: Vec<Step>,
}

impl ProofTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, rule: Rule, inputs: Vec<String>, conclusion: impl Into<String>) {
        self.steps.push(Step { rule, citation: rule.citation().to_string(), inputs, conclusion: conclusion.into() });
    }

    pub fn extend(&mut self, other: ProofTrace) {
        self.steps.extend(other.steps);
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn cites(&self, citation: &str) -> bool {
        self.steps.iter().any(|s| s.citation.split(", ").any(|c| c == citation))
    }

    pub fn uses(&self, rule: Rule) -> bool {
        self.steps.iter().any(|s| s.rule == rule)
    }
}

impl fmt::Display for ProofTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(f, "{:>3}. [{}] {}", k + 1, s.citation, s.rule.name())?;
            for i in &s.inputs {
                writeln!(f, "       on   {i}")?;
            }
            writeln!(f, "       =>   {}", s.conclusion)?;
        }
        Ok(())
    }
}
