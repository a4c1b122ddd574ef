//! Runs parsed commands against the library and builds reports.

use crate::block::check::{block_closure, check_adjoint, check_product, AdjointCheck};
use crate::block::composite::Tri;
use crate::block::product_domain::Representation;
use crate::block::schur::shifted;
use crate::block::{frobenius_schur, Side};
use crate::dsl::{Command, Resolved, SpecDocument};
use crate::error::Result;
use crate::numeric::{estimate_relative_bound, factorization_residual, sa_numeric_evidence, Settings};
use crate::report::{CommandReport, Outcome, Report};
use crate::sa::{check_essential_sa, check_sa, Declarations, Options, Status, Verdict};
use crate::scalar_op::{describe, relative_bound, RelBound, ScalarOperator};
use crate::trace::{ProofTrace, Rule};

/// Runs every command of the document in order. Stops at the first error.
pub fn run_all(doc: &SpecDocument, settings: &Settings) -> Result<Report> {
    let results = doc.commands.iter().map(|c| run(doc, c, settings)).collect::<Result<Vec<_>>>()?;
    Ok(Report::new(settings.clone(), results))
}

/// Name of `op` in the document, or a catalog label.
fn label(doc: &SpecDocument, op: &ScalarOperator) -> String {
    for def in &doc.operators {
        if let Ok(d) = def.operator() {
            if d.expr() == op.expr() && d.dom() == op.dom() {
                return def.name.clone();
            }
        }
    }
    describe(&op.clone().unnamed())
}

fn options(doc: &SpecDocument, block: &str, settings: Option<&Settings>) -> Options {
    Options {
        declared: Declarations {
            max_accretive: doc.flagged("max_accretive").into_iter().collect(),
            resolvent_nonempty: doc.flagged("resolvent_nonempty").into_iter().collect(),
            core: doc.block_flags(block).iter().any(|f| f == "core"),
        },
        numeric: settings.cloned(),
    }
}

fn tri(t: Tri) -> &'static str {
    match t {
        Tri::True => "yes",
        Tri::False => "no",
        Tri::Unknown => "unknown",
    }
}

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "unknown",
    }
}

fn scalar_details(doc: &SpecDocument, r: CommandReport, op: &ScalarOperator) -> CommandReport {
    r.detail("operator", label(doc, op)).detail("expression", op.expr()).detail("domain", op.dom())
}

pub fn run(doc: &SpecDocument, cmd: &Command, settings: &Settings) -> Result<CommandReport> {
    let title = cmd.to_string();
    Ok(match cmd {
        Command::Adjoint { name } => match doc.resolve(name)? {
            Resolved::Operator(op) => {
                let adj = op.adjoint();
                let mut t = ProofTrace::new();
                t.push(Rule::ScalarCalculus, vec![op.to_string()], format!("adjoint is {adj}"));
                let r = CommandReport::new(&title, Outcome::Info, format!("{name}* = {}", label(doc, &adj)));
                scalar_details(doc, r, &adj).with_trace(t)
            }
            Resolved::Block(b) => adjoint_report(&title, &check_adjoint(&b)),
        },
        Command::Closure { name } => match doc.resolve(name)? {
            Resolved::Operator(op) => {
                let c = op.closure();
                let r = CommandReport::new(&title, Outcome::Info, format!("closure of {name} = {}", label(doc, &c)));
                scalar_details(doc, r, &c).detail("closed", if op.is_closed() { "yes" } else { "no" })
            }
            Resolved::Block(b) => match block_closure(&b) {
                Some(c) => CommandReport::new(&title, Outcome::Info, format!("closure = {}", c.grid()))
                    .detail("domain", c.induced_domain())
                    .detail("closed", if c.same_operator(&b) { "yes" } else { "no" }),
                None => CommandReport::new(&title, Outcome::Unknown, "no closure rule applies"),
            },
        },
        Command::Relbound { s, t } => {
            let (so, to) = (doc.operator(s)?, doc.operator(t)?);
            relbound_report(&title, &so, &to, settings)
        }
        Command::Product { a, b } => {
            let (ab, bb) = (doc.block(a)?, doc.block(b)?);
            let p = check_product(&ab, &bb)?;
            let (outcome, verdict) = match &p.representation {
                Representation::Rectangular { .. } if p.equal => (Outcome::Info, "AB = A×B".to_string()),
                Representation::Rectangular { .. } => (Outcome::Info, "D(AB) is a rectangle but AB ≠ A×B".into()),
                Representation::Coupled { .. } => {
                    (Outcome::Info, "AB ≠ A×B: D(AB) has no matrix representation".into())
                }
                Representation::Undecided { .. } => (Outcome::Unknown, "representation undecided".into()),
            };
            let mut r = CommandReport::new(&title, outcome, verdict)
                .detail("formal product", &p.formal)
                .detail("formal domain", &p.formal_domain)
                .detail("actual domain", &p.actual_domain)
                .detail("product equality", if p.equal { "equal" } else { "not equal" })
                .detail("formal within actual", if p.formal_within_actual { "yes" } else { "no" });
            if let Representation::Coupled { witness } = &p.representation {
                r.push("witness", witness);
            }
            if let Some(prod) = &p.product {
                r.push("product", prod);
            }
            r.with_trace(p.trace)
        }
        Command::CheckAdjoint { block } => adjoint_report(&title, &check_adjoint(&doc.block(block)?)),
        Command::Factorize { block, lambda, side } => {
            let b = doc.block(block)?;
            let opts = options(doc, block, None);
            let inverted = match side {
                Side::First => b.entry(1, 1),
                Side::Second => b.entry(0, 0),
            };
            let declared = inverted.name().is_some_and(|n| opts.declared.resolvent_nonempty.contains(n));
            let f = frobenius_schur(&b, lambda, *side, declared)?;
            let check = factorization_residual(&b, lambda, *side, settings)?;
            let ok = check.residual <= settings.tol_resolvent;
            let mut r = CommandReport::new(
                &title,
                if ok { Outcome::Proved } else { Outcome::Refuted },
                format!("{} = {} · {} · {}", shifted(block, lambda), f.left, f.middle, f.right),
            )
            .detail("schur complement", &f.schur)
            .detail("residual tolerance", format!("{:e}", settings.tol_resolvent))
            .with_trace(f.trace);
            r.numeric = serde_json::to_value(&check).ok();
            r.push("numeric model", "Galerkin, domain-blind");
            r
        }
        Command::CheckSa { block } => {
            let b = doc.block(block)?;
            verdict_report(&title, &check_sa(&b, &options(doc, block, Some(settings))), Status::SelfAdjoint)
        }
        Command::CheckEsa { block } => {
            let b = doc.block(block)?;
            let v = check_essential_sa(&b, &options(doc, block, Some(settings)));
            verdict_report(&title, &v, Status::EssentiallySelfAdjoint)
        }
        Command::Verify { block } => {
            let b = doc.block(block)?;
            let ev = sa_numeric_evidence(&b, settings);
            let symbolic = check_sa(&b, &options(doc, block, None));
            let ok = ev.consistent(settings.tol_resolvent);
            let mut r = CommandReport::new(
                &title,
                if ok { Outcome::Proved } else { Outcome::Refuted },
                if ok {
                    "numerically consistent with self-adjointness"
                } else {
                    "numerically inconsistent with self-adjointness"
                },
            )
            .detail("symbolic verdict", symbolic.status)
            .detail("domain blind", "yes: closedness and domain strictness are symbolic-only claims");
            r.numeric = serde_json::to_value(&ev).ok();
            r.with_trace(symbolic.trace)
        }
        Command::Examples => crate::examples::report(),
    })
}

pub fn adjoint_report(title: &str, a: &AdjointCheck) -> CommandReport {
    let (outcome, verdict) = match (&a.adjoint, a.has_matrix_representation) {
        (Some(adj), _) => (Outcome::Proved, format!("adjoint = {adj}")),
        (None, Some(false)) => (Outcome::Proved, "adjoint has no matrix representation".to_string()),
        _ => (Outcome::Unknown, "adjoint not determined; it contains the formal adjoint".to_string()),
    };
    let mut r = CommandReport::new(title, outcome, verdict)
        .detail("block", &a.block)
        .detail("formal adjoint", &a.formal_adjoint)
        .detail("naive adjoint", &a.naive_adjoint);
    if let Some(f) = &a.factorization {
        r.push("factorization", f);
    }
    if let Some(d) = &a.adjoint_domain {
        r.push("adjoint domain", d);
    }
    r.push("formal adjoint = adjoint", opt_bool(a.formal_equals_adjoint));
    r.push("naive strictly smaller", opt_bool(a.naive_strictly_smaller));
    r.push("matrix representation", opt_bool(a.has_matrix_representation));
    if let Some(w) = &a.witness {
        r.push("witness", w);
    }
    r.push("closed", tri(a.closed));
    r.with_trace(a.trace.clone())
}

pub fn verdict_report(title: &str, v: &Verdict, goal: Status) -> CommandReport {
    let outcome = match v.status {
        s if s == goal => Outcome::Proved,
        Status::SelfAdjoint | Status::EssentiallySelfAdjoint => Outcome::Proved,
        Status::NotSelfAdjoint | Status::NotSymmetric => Outcome::Refuted,
        Status::Symmetric | Status::Unknown => Outcome::Unknown,
    };
    let mut r = CommandReport::new(title, outcome, v.status.to_string());
    if let Some(w) = &v.witness {
        r.push("witness", w);
    }
    for a in &v.attempts {
        r.push(format!("tried {}", a.rule), &a.reason);
    }
    r.numeric = v.numeric_evidence.as_ref().and_then(|e| serde_json::to_value(e).ok());
    r.with_trace(v.trace.clone())
}

fn relbound_report(title: &str, s: &ScalarOperator, t: &ScalarOperator, settings: &Settings) -> CommandReport {
    let b = relative_bound(s, t);
    let mut r = CommandReport::new(title, Outcome::Info, format!("relative bound = {b}"));
    match estimate_relative_bound(s, t, settings.galerkin) {
        Ok(est) => {
            let v = est.value();
            let consistent = match &b {
                RelBound::Zero => v < 0.05,
                RelBound::Value { .. } => (v - b.to_f64()).abs() <= 0.1 * b.to_f64().max(1.0),
                RelBound::Infinite => v > 10.0,
                RelBound::Unknown => true,
            };
            r.push("numeric estimate", format!("{v:.6}"));
            r.push("consistent", if consistent { "yes" } else { "no" });
            if !consistent {
                r.outcome = Outcome::Refuted;
            }
            r.numeric = serde_json::to_value(&est).ok();
        }
        Err(e) => r.push("numeric estimate", format!("not available: {e}")),
    }
    r
}
