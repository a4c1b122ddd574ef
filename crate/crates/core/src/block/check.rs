//! Whole-block adjoint and product checks used by the command layer.

use serde::Serialize;

use super::composite::{adjoint_rewrite, evaluate, prove_closed, CompositeOperator, Evaluated, Node, Tri};
use super::product_domain::{actual_product_domain, entries_from_projections, ProductDomain, Representation};
use super::BlockOperator;
use crate::error::Result;
use crate::gauss::GQ;
use crate::linalg::Matrix;
use crate::scalar_op::ScalarOperator;
use crate::trace::{ProofTrace, Rule};

/// `A = M·diag(T_1, …, T_n)` with `M` constant and invertible, found when every
/// restricted column is a scalar multiple of one operator.
pub fn column_factorization(b: &BlockOperator) -> Option<(Matrix, BlockOperator)> {
    let n = b.size();
    let comps = b.induced_components();
    let mut m = Matrix::zeros(n, n);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let col: Vec<ScalarOperator> = (0..n).map(|j| b.restricted_entry(j, k)).collect();
        let Some(base) = col.iter().position(|e| !e.is_zero()) else {
            m.set(k, k, GQ::one());
            diag.push(ScalarOperator::zero_on(comps[k].clone()));
            continue;
        };
        let lead = col[base].expr().leading();
        for (j, e) in col.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if e.order() != col[base].order() {
                return None;
            }
            let c = &e.expr().leading() / &lead;
            if col[base].expr().scale(&c) != *e.expr() {
                return None;
            }
            m.set(j, k, c);
        }
        diag.push(col[base].clone().unnamed());
    }
    if m.det().is_zero() || m == Matrix::identity(n) {
        return None;
    }
    Some((m, BlockOperator::diag(diag).ok()?))
}

/// Adjoint of a block in closed form, if one of the rewriting routes applies.
#[derive(Clone, Debug, Serialize)]
pub struct AdjointCheck {
    pub block: String,
    pub formal_adjoint: String,
    pub naive_adjoint: String,
    /// The product the adjoint was computed through, if any.
    pub factorization: Option<String>,
    pub adjoint: Option<String>,
    pub adjoint_domain: Option<String>,
    /// Whether `A×` (the formal adjoint) equals `A*`.
    pub formal_equals_adjoint: Option<bool>,
    /// Whether the naive entrywise adjoint is a proper restriction of the adjoint.
    pub naive_strictly_smaller: Option<bool>,
    pub has_matrix_representation: Option<bool>,
    pub witness: Option<String>,
    pub closed: Tri,
    pub trace: ProofTrace,
    #[serde(skip)]
    pub adjoint_block: Option<BlockOperator>,
}

pub fn check_adjoint(b: &BlockOperator) -> AdjointCheck {
    check_composite_adjoint(&as_composite(b), b)
}

/// Composite form of `b`: a column factorization when one exists, else `b` itself.
pub fn as_composite(b: &BlockOperator) -> CompositeOperator {
    match column_factorization(b) {
        Some((m, d)) => CompositeOperator::product(vec![CompositeOperator::constant(m), CompositeOperator::block(d)]),
        None => CompositeOperator::block(b.clone()),
    }
}

/// Adjoint of `c`, where `c` evaluates to `b` (or is not representable when `b` is
/// only a formal product).
pub fn check_composite_adjoint(c: &CompositeOperator, b: &BlockOperator) -> AdjointCheck {
    let mut trace = ProofTrace::new();
    let formal = b.formal_adjoint();
    let naive = b.naive_adjoint();
    trace.push(Rule::FormalAdjoint, vec![b.grid()], format!("formal adjoint is {}", formal.grid()));
    let r = adjoint_rewrite(c);
    trace.extend(r.trace);
    let factorization = r.rewritten.as_ref().map(|_| c.to_string()).filter(|_| !matches!(c.node, Node::Block(_)));
    let mut out = AdjointCheck {
        block: b.grid(),
        formal_adjoint: formal.grid(),
        naive_adjoint: naive.grid(),
        factorization,
        adjoint: None,
        adjoint_domain: None,
        formal_equals_adjoint: r.formal_adjoint_agrees,
        naive_strictly_smaller: None,
        has_matrix_representation: None,
        witness: None,
        closed: Tri::Unknown,
        trace: ProofTrace::new(),
        adjoint_block: None,
    };
    match &r.adjoint {
        Evaluated::Block(adj) => {
            out.adjoint = Some(adj.grid());
            out.adjoint_domain = Some(adj.induced_domain().to_string());
            out.has_matrix_representation = Some(true);
            let strict = naive.is_restriction_of(adj) && !naive.same_operator(adj);
            out.naive_strictly_smaller = Some(strict);
            if strict {
                trace.push(
                    Rule::AdjointRepresentation,
                    vec![naive.grid()],
                    format!(
                        "naive entrywise adjoint on {} is a proper restriction of the adjoint",
                        naive.induced_domain()
                    ),
                );
            }
            out.adjoint_block = Some(adj.clone());
        }
        Evaluated::Coupled { domain, representation } => {
            out.adjoint_domain = Some(domain.to_string());
            match representation {
                Representation::Coupled { witness } => {
                    out.has_matrix_representation = Some(false);
                    out.witness = Some(witness.to_string());
                }
                Representation::Rectangular { .. } => out.has_matrix_representation = Some(true),
                Representation::Undecided { .. } => {}
            }
        }
        Evaluated::Opaque(why) => {
            out.adjoint_domain = None;
            trace.push(
                Rule::AdjointRepresentation,
                vec![b.grid()],
                format!("adjoint not computed ({why}); formal adjoint is contained in it"),
            );
        }
    }
    let (closed, ctrace) = prove_closed(c);
    out.closed = closed;
    if closed != Tri::Unknown {
        // the first rewrite is already in the trace
        for step in ctrace.steps {
            if !trace.steps.contains(&step) {
                trace.steps.push(step);
            }
        }
    }
    out.trace = trace;
    out
}

/// Formal versus actual product of two blocks.
#[derive(Clone, Debug, Serialize)]
pub struct ProductCheck {
    pub formal: String,
    pub formal_domain: String,
    pub actual_domain: String,
    pub representation: Representation,
    /// `AB = A×B` exactly when the actual domain is a rectangle.
    pub equal: bool,
    /// The formal-product domain lies inside the actual one.
    pub formal_within_actual: bool,
    pub product: Option<String>,
    pub trace: ProofTrace,
    #[serde(skip)]
    pub actual: Option<ProductDomain>,
}

pub fn check_product(a: &BlockOperator, b: &BlockOperator) -> Result<ProductCheck> {
    let formal = a.formal_product(b)?;
    let actual = actual_product_domain(a, b);
    let representation = actual.representation();
    let formal_within_actual = actual.contains_rectangle(&formal.induced_components());
    let mut trace = ProofTrace::new();
    let inputs = vec![a.grid(), b.grid()];
    let (equal, product) = match &representation {
        Representation::Rectangular { components } => {
            let p = entries_from_projections(a, b, components)?;
            let same = p.same_operator(&formal);
            trace.push(
                Rule::ProductEquality,
                inputs,
                format!(
                    "D(AB) = {} is a rectangle, so AB = {}",
                    ProductDomain::rectangular(components.clone()),
                    p.grid()
                ),
            );
            (same, Some(p.grid()))
        }
        Representation::Coupled { witness } => {
            trace.push(
                Rule::MatrixRepresentation,
                inputs,
                format!("D(AB) = {actual} is not a rectangle (witness {witness}), so AB strictly extends the formal product"),
            );
            (false, None)
        }
        Representation::Undecided { reason } => {
            trace.push(Rule::MatrixRepresentation, inputs, format!("representation undecided: {reason}"));
            (false, None)
        }
    };
    Ok(ProductCheck {
        formal: formal.grid(),
        formal_domain: formal.induced_domain().to_string(),
        actual_domain: actual.to_string(),
        representation,
        equal,
        formal_within_actual,
        product,
        trace,
        actual: Some(actual),
    })
}

/// Closure of a block, entrywise for diagonals and as `A**` otherwise. `None`
/// when no rule applies.
pub fn block_closure(b: &BlockOperator) -> Option<BlockOperator> {
    let c = as_composite(b);
    let mut t = ProofTrace::new();
    if let Some(d) = evaluate(&CompositeOperator::closure(c.clone()), &mut t).block() {
        return Some(d.clone());
    }
    let first = adjoint_rewrite(&c).rewritten?;
    let second = adjoint_rewrite(&first).rewritten?;
    evaluate(&second, &mut t).block().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_op::builtin;

    fn b(n: &str) -> ScalarOperator {
        builtin(n).unwrap()
    }

    fn lcal() -> BlockOperator {
        let neg = b("LD").scale(&GQ::int(-1));
        BlockOperator::new(vec![vec![b("LD"), b("LN")], vec![b("LN"), neg]]).unwrap()
    }

    #[test]
    fn factorization_of_lcal() {
        let (m, d) = column_factorization(&lcal()).unwrap();
        assert_eq!(m, Matrix::from_ints(2, &[&[1, 1], &[1, -1]]));
        assert!(d.same_operator(&BlockOperator::diag(vec![b("L0"), b("L0")]).unwrap()));
        assert!(column_factorization(&BlockOperator::diag(vec![b("LD"), b("M")]).unwrap()).is_none());
    }

    #[test]
    fn adjoint_of_lcal() {
        let r = check_adjoint(&lcal());
        let neg_l = b("L").scale(&GQ::int(-1));
        let want = BlockOperator::new(vec![vec![b("L"), b("L")], vec![b("L"), neg_l]]).unwrap();
        assert!(r.adjoint_block.as_ref().unwrap().same_operator(&want));
        assert_eq!(r.formal_equals_adjoint, Some(true));
        assert_eq!(r.naive_strictly_smaller, Some(true));
        assert_eq!(r.closed, Tri::True);
        for cite in ["Theorem 2.1", "Lemma A.1", "Lemma A.2", "Theorem 2.2"] {
            assert!(r.trace.cites(cite), "{cite}");
        }
    }

    #[test]
    fn products() {
        let p = Matrix::from_ints(2, &[&[1, 0], &[1, 0]]);
        let pb = BlockOperator::from_matrix(&p).unwrap();
        let d = BlockOperator::diag(vec![b("M"), b("Zero")]).unwrap();
        let r = check_product(&pb, &d).unwrap();
        assert!(r.equal && r.formal_within_actual);
        // the adjoint order gives a coupled domain
        let da = BlockOperator::diag(vec![b("Mstar"), b("Zero")]).unwrap();
        let ph = BlockOperator::from_matrix(&p.conj_transpose()).unwrap();
        let r = check_product(&da, &ph).unwrap();
        assert!(!r.equal && r.formal_within_actual);
        assert!(matches!(r.representation, Representation::Coupled { .. }));
    }

    #[test]
    fn closure_of_a_diagonal() {
        let d = BlockOperator::diag(vec![b("M0"), b("LD")]).unwrap();
        let c = block_closure(&d).unwrap();
        assert!(c.same_operator(&BlockOperator::diag(vec![b("M"), b("LD")]).unwrap()));
    }
}
