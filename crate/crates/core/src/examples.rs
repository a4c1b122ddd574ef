//! The three worked examples, recomputed from scratch and checked against their
//! stated results.

use crate::block::check::{block_closure, check_adjoint, check_composite_adjoint, AdjointCheck};
use crate::block::composite::{evaluate, CompositeOperator, Tri};
use crate::block::BlockOperator;
use crate::gauss::GQ;
use crate::linalg::Matrix;
use crate::report::{CommandReport, Outcome};
use crate::sa::{check_sa, Options, Status};
use crate::scalar_op::{builtin, ScalarOperator};
use crate::trace::ProofTrace;

/// One expected fact and whether it was reproduced.
#[derive(Clone, Debug)]
pub struct Check {
    pub claim: &'static str,
    pub pass: bool,
    pub found: String,
}

#[derive(Clone, Debug)]
pub struct Golden {
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub trace: ProofTrace,
}

impl Golden {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn check(&mut self, claim: &'static str, pass: bool, found: impl Into<String>) {
        self.checks.push(Check { claim, pass, found: found.into() });
    }

    pub fn report(&self) -> CommandReport {
        let outcome = if self.passed() { Outcome::Proved } else { Outcome::Refuted };
        let n = self.checks.iter().filter(|c| c.pass).count();
        let mut r = CommandReport::new(self.title, outcome, format!("{n}/{} claims reproduced", self.checks.len()));
        for c in &self.checks {
            r.push(format!("[{}] {}", if c.pass { "ok" } else { "FAIL" }, c.claim), &c.found);
        }
        r.with_trace(self.trace.clone())
    }
}

fn op(name: &str) -> ScalarOperator {
    builtin(name).expect("catalog operator")
}

fn grid(rows: Vec<Vec<ScalarOperator>>) -> BlockOperator {
    BlockOperator::new(rows).expect("square block")
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn found(a: &AdjointCheck) -> String {
    a.adjoint.clone().or_else(|| a.adjoint_domain.clone()).unwrap_or_else(|| "not computed".into())
}

/// `𝓛 = [[L_D, L_N], [L_N, −L_D]]`.
pub fn lcal() -> BlockOperator {
    grid(vec![vec![op("LD"), op("LN")], vec![op("LN"), op("LD").scale(&GQ::int(-1))]]).named("Lcal")
}

pub fn lcal_adjoint() -> Golden {
    let mut g = Golden { title: "Neumann-Dirichlet block 𝓛", checks: Vec::new(), trace: ProofTrace::new() };
    let (ld, ln, l0) = (op("LD"), op("LN"), op("L0"));
    let inter = ld.dom().intersect(ln.dom());
    g.check("D(L0) = D(LD) ∩ D(LN)", inter == *l0.dom(), inter.to_string());
    for (name, want) in [("L0", "L"), ("LD", "LD"), ("LN", "LN")] {
        let adj = op(name).adjoint();
        let pass = adj.expr() == op(want).expr() && adj.dom() == op(want).dom();
        let claim = match name {
            "L0" => "L0* = L",
            "LD" => "LD* = LD",
            _ => "LN* = LN",
        };
        g.check(claim, pass, adj.to_string());
    }
    let a = check_adjoint(&lcal());
    let l = op("L");
    let want = grid(vec![vec![l.clone(), l.clone()], vec![l.clone(), l.scale(&GQ::int(-1))]]);
    let adj_ok = a.adjoint_block.as_ref().is_some_and(|b| b.same_operator(&want));
    g.check("𝓛* = [[L, L], [L, -L]]", adj_ok, found(&a));
    g.check("𝓛^× = 𝓛*", a.formal_equals_adjoint == Some(true), a.formal_adjoint.clone());
    g.check("𝓛 closed: yes", a.closed == Tri::True, yes_no(a.closed == Tri::True));
    g.check(
        "naive entrywise adjoint is strictly contained in 𝓛*",
        a.naive_strictly_smaller == Some(true),
        a.naive_adjoint.clone(),
    );
    g.trace = a.trace;
    g
}

pub fn coupled_adjoint() -> Golden {
    let mut g = Golden {
        title: "block whose adjoint has no matrix representation",
        checks: Vec::new(),
        trace: ProofTrace::new(),
    };
    let p = CompositeOperator::constant(Matrix::from_ints(2, &[&[1, 0], &[1, 0]]));
    let d = CompositeOperator::block(BlockOperator::diag(vec![op("M"), op("Zero")]).expect("diagonal"));
    let c = CompositeOperator::product(vec![p, d]);
    let mut t = ProofTrace::new();
    let a = evaluate(&c, &mut t).block().cloned();
    let want = grid(vec![vec![op("M"), op("Zero")], vec![op("M"), op("Zero")]]);
    let a_ok = a.as_ref().is_some_and(|b| b.same_operator(&want));
    g.check(
        "𝒜 = [[A, 0], [A, 0]] on D(A) × X",
        a_ok,
        a.as_ref().map(|b| format!("{b:?}")).unwrap_or_else(|| "not a block".into()),
    );
    let Some(a) = a else {
        g.trace = t;
        return g;
    };
    let r = check_composite_adjoint(&c, &a);
    let dom = r.adjoint_domain.clone().unwrap_or_default();
    g.check("D(𝒜*) = {(x1, x2) : x1 + x2 ∈ D(A*)}", dom == "(L^2) × (L^2) with x1 + x2 ∈ H^1", dom);
    g.check(
        "𝒜* has a matrix representation: no",
        r.has_matrix_representation == Some(false),
        yes_no(r.has_matrix_representation == Some(true)),
    );
    let w = r.witness.clone().unwrap_or_default();
    g.check("witness (x1, -x1) with x1 ∉ D(A*)", w == "(x1, -x1) with x1 ∉ H^1", w);
    g.trace = r.trace;
    g
}

/// The 4×4 block of the last example.
pub fn regrouped_block() -> BlockOperator {
    let (ld, m0, z) = (op("LD"), op("M0"), op("Zero"));
    grid(vec![
        vec![ld.clone(), z.clone(), m0.clone(), z.clone()],
        vec![z.clone(), m0.clone(), z.clone(), ld.clone()],
        vec![m0.clone(), z.clone(), ld.clone(), z.clone()],
        vec![z.clone(), ld.clone(), z, m0],
    ])
    .named("Acal")
}

pub fn regrouped() -> Golden {
    let mut g = Golden { title: "regrouped 4×4 block", checks: Vec::new(), trace: ProofTrace::new() };
    let v = check_sa(&regrouped_block(), &Options::default());
    let cites = v.trace.cites("Example 3.1") && v.trace.cites("Proposition 3.2");
    g.check(
        "𝒜 is self-adjoint via regrouping and diagonal dominance",
        v.status == Status::SelfAdjoint && cites,
        v.status.to_string(),
    );
    let a = BlockOperator::diag(vec![op("LD"), op("M0")]).expect("diagonal");
    let b = BlockOperator::diag(vec![op("M0"), op("LD")]).expect("diagonal");
    let diag = |x: &str, y: &str| BlockOperator::diag(vec![op(x), op(y)]).expect("diagonal");
    for (claim, blk, want) in
        [("closure of A = diag(LD, M)", &a, diag("LD", "M")), ("closure of B = diag(M, LD)", &b, diag("M", "LD"))]
    {
        let c = block_closure(blk);
        let pass = c.as_ref().is_some_and(|c| c.same_operator(&want));
        g.check(claim, pass, c.map(|c| c.grid()).unwrap_or_else(|| "not computed".into()));
    }
    for (name, blk, want) in [("A", &a, diag("LD", "Mstar")), ("B", &b, diag("Mstar", "LD"))] {
        let r = check_adjoint(blk);
        let adj = r.adjoint_block.clone();
        let pass = adj.as_ref().is_some_and(|x| x.same_operator(&want));
        let (c1, c2, c3) = match name {
            "A" => ("A* = diag(LD, M*)", "A closed: no", "A ⊊ A*"),
            _ => ("B* = diag(M*, LD)", "B closed: no", "B ⊊ B*"),
        };
        g.check(c1, pass, found(&r));
        g.check(c2, r.closed == Tri::False, yes_no(r.closed == Tri::True));
        let strict = adj.as_ref().is_some_and(|x| blk.is_restriction_of(x) && !blk.same_operator(x));
        g.check(c3, strict, blk.grid());
    }
    g.trace = v.trace;
    g
}

pub fn all() -> Vec<Golden> {
    vec![lcal_adjoint(), coupled_adjoint(), regrouped()]
}

pub fn report() -> CommandReport {
    let children: Vec<CommandReport> = all().iter().map(Golden::report).collect();
    let ok = children.iter().all(|c| c.outcome == Outcome::Proved);
    let mut r = CommandReport::new(
        "examples",
        if ok { Outcome::Proved } else { Outcome::Refuted },
        if ok { "all worked examples reproduced" } else { "some worked examples not reproduced" },
    );
    r.children = children;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_examples_reproduce() {
        for g in all() {
            for c in &g.checks {
                assert!(c.pass, "{}: {} (found {})", g.title, c.claim, c.found);
            }
        }
    }
}
