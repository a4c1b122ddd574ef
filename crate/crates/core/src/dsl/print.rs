use std::fmt::Write;

use super::SpecDocument;
use crate::boundary::format_row;

/// Canonical text of a document; `parse(print(d)) == d`.
pub fn print(doc: &SpecDocument) -> String {
    let mut out = String::new();
    let mut sections = Vec::new();
    for op in &doc.operators {
        let mut s = format!("[operator {}]\nexpr = {}\n", op.name, op.expr);
        if let Some(n) = op.space {
            let _ = writeln!(s, "space = H^{n}");
        }
        if !op.bc.is_empty() {
            let n = op.sobolev();
            let rows: Vec<String> = op.bc.iter().map(|r| format_row(n, r)).collect();
            let _ = writeln!(s, "bc = {}", rows.join("; "));
        }
        if !op.flags.is_empty() {
            let _ = writeln!(s, "flags = {}", op.flags.join(", "));
        }
        sections.push(s);
    }
    for b in &doc.blocks {
        let mut s = format!("[block {}]\nsize = {}\n", b.name, b.rows.len());
        for row in &b.rows {
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(s, "row = {}", cells.join("; "));
        }
        if !b.flags.is_empty() {
            let _ = writeln!(s, "flags = {}", b.flags.join(", "));
        }
        sections.push(s);
    }
    if !doc.commands.is_empty() {
        let mut s = String::from("[run]\n");
        for c in &doc.commands {
            let _ = writeln!(s, "{c}");
        }
        sections.push(s);
    }
    out.push_str(&sections.join("\n"));
    out
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::super::{parse, BlockDef, Command, Entry, OperatorDef};
    use super::*;
    use crate::block::Side;
    use crate::boundary::BCMatrix;
    use crate::domain::ScalarDomain;
    use crate::expr::FormalExpr;
    use crate::gauss::GQ;
    use crate::linalg::Matrix;

    fn gq() -> impl Strategy<Value = GQ> {
        (-4i64..5, 1i64..4, -3i64..4).prop_map(|(a, b, c)| {
            let mut g = GQ::from_frac(a, b);
            g += &GQ::from_ints(0, c);
            g
        })
    }

    fn expr() -> impl Strategy<Value = FormalExpr> {
        prop::collection::vec(gq(), 1..4).prop_map(|cs| FormalExpr::new(cs).unwrap())
    }

    /// Operators whose conditions are valid for the chosen space.
    fn operator(name: String) -> impl Strategy<Value = OperatorDef> {
        (expr(), 0usize..2, prop::collection::vec(prop::collection::vec(-2i64..3, 8), 0..3), any::<bool>())
            .prop_filter_map("invalid domain", move |(e, extra, raw, flag)| {
                let n = e.order() + extra;
                if n == 0 && !raw.is_empty() {
                    return None;
                }
                let rows: Vec<Vec<GQ>> = raw
                    .into_iter()
                    .map(|r| r[..2 * n].iter().map(|&v| GQ::int(v)).collect::<Vec<_>>())
                    .filter(|r| r.iter().any(|v| !v.is_zero()))
                    .collect();
                let bc = BCMatrix::new(n, Matrix::from_rows(2 * n, rows.clone())).ok()?;
                ScalarDomain::new(n, bc).ok()?;
                Some(OperatorDef {
                    name: name.clone(),
                    expr: e,
                    space: (extra > 0).then_some(n),
                    bc: rows,
                    flags: if flag { vec!["resolvent_nonempty".into()] } else { vec![] },
                })
            })
    }

    fn entry() -> impl Strategy<Value = Entry> {
        (gq(), prop::sample::select(vec![None, Some("LD"), Some("M0"), Some("P0"), Some("Mstar")]))
            .prop_map(|(coeff, op)| Entry { coeff, op: op.map(String::from) })
    }

    fn block() -> impl Strategy<Value = BlockDef> {
        (1usize..4).prop_flat_map(|n| {
            (prop::collection::vec(prop::collection::vec(entry(), n), n), any::<bool>()).prop_map(|(rows, core)| {
                BlockDef { name: "B0".into(), rows, flags: if core { vec!["core".into()] } else { vec![] } }
            })
        })
    }

    fn command() -> impl Strategy<Value = Command> {
        (0usize..10, gq(), any::<bool>()).prop_map(|(k, lambda, first)| {
            let b = "B0".to_string();
            match k {
                0 => Command::Adjoint { name: "P0".into() },
                1 => Command::Closure { name: b },
                2 => Command::Relbound { s: "M0".into(), t: "P0".into() },
                3 => Command::Product { a: b.clone(), b },
                4 => Command::CheckAdjoint { block: b },
                5 => Command::Factorize { block: b, lambda, side: if first { Side::First } else { Side::Second } },
                6 => Command::CheckSa { block: b },
                7 => Command::CheckEsa { block: b },
                8 => Command::Verify { block: b },
                _ => Command::Examples,
            }
        })
    }

    proptest! {
        #[test]
        fn round_trip(op in operator("P0".into()), b in block(), cmds in prop::collection::vec(command(), 0..4)) {
            let doc = SpecDocument { operators: vec![op], blocks: vec![b], commands: cmds };
            let text = print(&doc);
            let back = parse(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            prop_assert_eq!(back, doc);
        }
    }

    #[test]
    fn empty_prints_empty() {
        assert_eq!(print(&SpecDocument::default()), "");
    }
}
