use std::collections::BTreeSet;

use super::{BlockDef, Command, Entry, OperatorDef, SpecDocument, BLOCK_FLAGS, OPERATOR_FLAGS};
use crate::block::{Side, MAX_BLOCK};
use crate::boundary::{Endpoint, Layout};
use crate::error::{Error, Result};
use crate::expr::FormalExpr;
use crate::gauss::GQ;
use crate::scalar_op::builtin;

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, col, msg: msg.into() })
}

/// A piece of source text with its 1-based position.
#[derive(Clone, Copy, Debug)]
struct Span<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

impl<'a> Span<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        err(self.line, self.col, msg)
    }

    fn trim(self) -> Span<'a> {
        let lead = self.text.len() - self.text.trim_start().len();
        Span { text: self.text.trim(), line: self.line, col: self.col + char_width(&self.text[..lead]) }
    }

    fn slice(self, from: usize, to: usize) -> Span<'a> {
        Span { text: &self.text[from..to], line: self.line, col: self.col + char_width(&self.text[..from]) }
    }

    /// Pieces between occurrences of `sep`.
    fn split(self, sep: char) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, c) in self.text.char_indices() {
            if c == sep {
                out.push(self.slice(start, i));
                start = i + c.len_utf8();
            }
        }
        out.push(self.slice(start, self.text.len()));
        out
    }
}

fn char_width(s: &str) -> usize {
    s.chars().count()
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Cursor over one span for the expression and condition grammars.
struct Cursor<'a> {
    span: Span<'a>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(span: Span<'a>) -> Self {
        Self { span, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.span.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn col(&self) -> usize {
        self.span.col + char_width(&self.span.text[..self.pos])
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        err(self.span.line, self.col(), msg)
    }

    /// `(a+bi)` or a bare literal made of digits, `/` and `i`. `None` if neither is present.
    fn coefficient(&mut self) -> Result<Option<GQ>> {
        let start = self.col();
        let text = if self.eat('(') {
            let from = self.pos;
            while self.peek().is_some_and(|c| c != ')') {
                self.bump();
            }
            let inner = &self.span.text[from..self.pos];
            if !self.eat(')') {
                return self.err("missing `)`");
            }
            inner
        } else {
            let from = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '/' || c == 'i') {
                self.bump();
            }
            if self.pos == from {
                return Ok(None);
            }
            &self.span.text[from..self.pos]
        };
        match text.parse::<GQ>() {
            Ok(c) => Ok(Some(c)),
            Err(_) => err(self.span.line, start, format!("malformed scalar `{text}`")),
        }
    }

    fn number(&mut self) -> Option<usize> {
        let from = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.span.text[from..self.pos].parse().ok()
    }

    /// Reads terms `±coeff·atom` until the end or `stop`; `atom` returns `None` when
    /// no atom follows the coefficient.
    fn terms<T>(
        &mut self,
        stop: Option<char>,
        mut atom: impl FnMut(&mut Self) -> Result<Option<T>>,
    ) -> Result<Vec<(GQ, Option<T>)>> {
        let mut out = Vec::new();
        self.skip_ws();
        let mut sign = GQ::one();
        if self.eat('-') {
            sign = GQ::int(-1);
        } else {
            self.eat('+');
        }
        loop {
            self.skip_ws();
            let at = self.col();
            let coeff = self.coefficient()?;
            self.skip_ws();
            if coeff.is_some() && self.eat('*') {
                self.skip_ws();
            }
            let a = atom(self)?;
            let c = match (coeff, &a) {
                (None, None) => return err(self.span.line, at, "expected a term"),
                (c, _) => c.unwrap_or_else(GQ::one),
            };
            let mut c = c;
            c *= &sign;
            out.push((c, a));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(s) if Some(s) == stop => break,
                Some('+') => sign = GQ::one(),
                Some('-') => sign = GQ::int(-1),
                Some(other) => return self.err(format!("unexpected `{other}`")),
            }
            self.bump();
        }
        Ok(out)
    }
}

/// `-D^2`, `iD + 1`, `(2+i)D^2 + 3D - 1`.
fn parse_expr(span: Span<'_>) -> Result<FormalExpr> {
    let span = span.trim();
    if span.text.is_empty() {
        return span.err("empty expression");
    }
    let mut cur = Cursor::new(span);
    let terms = cur.terms(None, |c| {
        if !c.eat('D') {
            return Ok(None);
        }
        if c.eat('^') {
            match c.number() {
                Some(k) => Ok(Some(k)),
                None => c.err("expected an exponent after `^`"),
            }
        } else {
            Ok(Some(1))
        }
    })?;
    let mut e = FormalExpr::zero();
    for (c, k) in terms {
        let m = FormalExpr::monomial(c, k.unwrap_or(0)).map_err(|x| Error::Parse {
            line: span.line,
            col: span.col,
            msg: x.to_string(),
        })?;
        e = e.add(&m);
    }
    Ok(e)
}

/// `f(0)`, `f'(1)`, `f''(0)`, `f^(3)(1)`.
fn boundary_atom(c: &mut Cursor<'_>) -> Result<Option<(Endpoint, usize)>> {
    if !c.eat('f') {
        return Ok(None);
    }
    let mut j = 0;
    if c.eat('^') {
        if !c.eat('(') {
            return c.err("expected `(` after `f^`");
        }
        j = match c.number() {
            Some(k) => k,
            None => return c.err("expected a derivative order"),
        };
        if !c.eat(')') {
            return c.err("missing `)`");
        }
    } else {
        while c.eat('\'') {
            j += 1;
        }
    }
    if !c.eat('(') {
        return c.err("expected `(0)` or `(1)`");
    }
    let at = c.col();
    let end = match c.bump() {
        Some('0') => Endpoint::Left,
        Some('1') => Endpoint::Right,
        _ => return err(c.span.line, at, "boundary point must be 0 or 1"),
    };
    if !c.eat(')') {
        return c.err("missing `)`");
    }
    Ok(Some((end, j)))
}

/// One condition `lhs = rhs`, homogeneous, as a row over the order-`n` layout.
fn parse_condition(span: Span<'_>, n: usize) -> Result<Vec<GQ>> {
    let span = span.trim();
    let layout = Layout::new(n);
    let mut row = vec![GQ::zero(); layout.len()];
    let mut cur = Cursor::new(span);
    for side in [GQ::one(), GQ::int(-1)] {
        let stop = if side.is_one() { Some('=') } else { None };
        let terms = cur.terms(stop, boundary_atom)?;
        for (c, atom) in terms {
            match atom {
                None if c.is_zero() => {}
                None => return span.err("boundary conditions must be homogeneous"),
                Some((end, j)) => {
                    if j >= n {
                        return span.err(format!("f^({j}) needs a domain of Sobolev order above {j}, have H^{n}"));
                    }
                    let mut c = c;
                    c *= &side;
                    row[layout.index(end, j)] += &c;
                }
            }
        }
        if side.is_one() && !cur.eat('=') {
            return cur.err("expected `=`");
        }
    }
    if row.iter().all(GQ::is_zero) {
        return span.err("condition is trivially satisfied");
    }
    Ok(row)
}

fn parse_flags(span: Span<'_>, allowed: &[&str]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for piece in span.split(',') {
        let p = piece.trim();
        if p.text.is_empty() {
            continue;
        }
        if !allowed.contains(&p.text) {
            return p.err(format!("unknown flag `{}` (expected one of {})", p.text, allowed.join(", ")));
        }
        out.push(p.text.to_string());
    }
    Ok(out)
}

fn parse_entry(span: Span<'_>) -> Result<Entry> {
    let s = span.trim();
    if s.text.is_empty() {
        return s.err("empty entry");
    }
    if let Ok(coeff) = s.text.parse::<GQ>() {
        return Ok(Entry { coeff, op: None });
    }
    if is_ident(s.text) {
        return Ok(Entry { coeff: GQ::one(), op: Some(s.text.to_string()) });
    }
    if let Some(name) = s.text.strip_prefix('-').map(str::trim) {
        if is_ident(name) {
            return Ok(Entry { coeff: GQ::int(-1), op: Some(name.to_string()) });
        }
    }
    let (coeff_txt, op) = match s.text.rsplit_once('*') {
        Some((c, n)) => {
            let n = n.trim();
            if !is_ident(n) {
                return s.err(format!("expected an operator name after `*`, found `{n}`"));
            }
            (c.trim(), Some(n.to_string()))
        }
        None => (s.text, None),
    };
    let inner = coeff_txt.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(coeff_txt);
    match inner.parse::<GQ>() {
        Ok(coeff) => Ok(Entry { coeff, op }),
        Err(_) => s.err(format!("malformed entry `{}`", s.text)),
    }
}

#[derive(Default)]
struct Names {
    operators: BTreeSet<String>,
    blocks: BTreeSet<String>,
}

impl Names {
    fn operator(&self, n: &str) -> bool {
        self.operators.contains(n) || builtin(n).is_ok()
    }

    fn any(&self, n: &str) -> bool {
        self.operator(n) || self.blocks.contains(n)
    }
}

fn parse_command(span: Span<'_>, names: &Names) -> Result<Command> {
    let s = span.trim();
    let mut toks: Vec<Span<'_>> = Vec::new();
    let mut start = None;
    for (i, c) in s.text.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(b)) => {
                toks.push(s.slice(b, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(b) = start {
        toks.push(s.slice(b, s.text.len()));
    }
    let head = toks[0];
    let args = &toks[1..];
    let want = |k: usize| -> Result<()> {
        if args.len() != k {
            return head.err(format!("`{}` takes {k} argument(s), got {}", head.text, args.len()));
        }
        Ok(())
    };
    let name = |i: usize| -> Result<String> {
        let t = args[i];
        if !names.any(t.text) {
            return t.err(format!("unresolved name `{}`", t.text));
        }
        Ok(t.text.to_string())
    };
    let cmd = match head.text {
        "adjoint" => {
            want(1)?;
            Command::Adjoint { name: name(0)? }
        }
        "closure" => {
            want(1)?;
            Command::Closure { name: name(0)? }
        }
        "relbound" => {
            want(2)?;
            for t in args {
                if !names.operator(t.text) {
                    return t.err(format!("`{}` is not an operator", t.text));
                }
            }
            Command::Relbound { s: name(0)?, t: name(1)? }
        }
        "product" => {
            want(2)?;
            Command::Product { a: name(0)?, b: name(1)? }
        }
        "check-adjoint" => {
            want(1)?;
            Command::CheckAdjoint { block: name(0)? }
        }
        "check-sa" => {
            want(1)?;
            Command::CheckSa { block: name(0)? }
        }
        "check-esa" => {
            want(1)?;
            Command::CheckEsa { block: name(0)? }
        }
        "verify" => {
            want(1)?;
            Command::Verify { block: name(0)? }
        }
        "examples" => {
            want(0)?;
            Command::Examples
        }
        "factorize" => {
            if args.is_empty() {
                return head.err("`factorize` needs a block name");
            }
            let block = name(0)?;
            let (mut lambda, mut side) = (None, None);
            let mut i = 1;
            while i < args.len() {
                let flag = args[i];
                let Some(val) = args.get(i + 1) else {
                    return flag.err(format!("`{}` needs a value", flag.text));
                };
                match flag.text {
                    "--lambda" => match val.text.parse::<GQ>() {
                        Ok(l) => lambda = Some(l),
                        Err(_) => return val.err(format!("malformed scalar `{}`", val.text)),
                    },
                    "--side" => {
                        side = Some(match val.text {
                            "1" => Side::First,
                            "2" => Side::Second,
                            _ => return val.err("side must be 1 or 2"),
                        })
                    }
                    other => return flag.err(format!("unknown option `{other}`")),
                }
                i += 2;
            }
            let Some(lambda) = lambda else {
                return head.err("`factorize` needs --lambda");
            };
            Command::Factorize { block, lambda, side: side.unwrap_or(Side::First) }
        }
        other => return head.err(format!("unknown command `{other}`")),
    };
    Ok(cmd)
}

enum Section<'a> {
    None,
    Operator { name: String, keys: Vec<(Span<'a>, Span<'a>)>, at: Span<'a> },
    Block { name: String, keys: Vec<(Span<'a>, Span<'a>)>, at: Span<'a> },
    Run,
}

fn finish_operator(name: String, keys: &[(Span<'_>, Span<'_>)], at: Span<'_>) -> Result<OperatorDef> {
    let mut expr = None;
    let mut space = None;
    let mut bc_spans = Vec::new();
    let mut flags = Vec::new();
    for (k, v) in keys {
        match k.text {
            "expr" => {
                if expr.is_some() {
                    return k.err("duplicate `expr`");
                }
                expr = Some((parse_expr(*v)?, *v));
            }
            "space" => {
                let t = v.trim();
                let n = t.text.strip_prefix("H^").and_then(|d| d.parse::<usize>().ok());
                match n {
                    Some(n) => space = Some(n),
                    None => return t.err(format!("expected `H^k`, found `{}`", t.text)),
                }
            }
            "bc" => bc_spans.extend(v.split(';').into_iter().filter(|p| !p.text.trim().is_empty())),
            "flags" => flags.extend(parse_flags(*v, &OPERATOR_FLAGS)?),
            other => return k.err(format!("unknown operator key `{other}`")),
        }
    }
    let Some((expr, expr_span)) = expr else {
        return at.err(format!("operator `{name}` has no `expr`"));
    };
    let n = space.unwrap_or_else(|| expr.order());
    if n < expr.order() {
        return expr_span.err(format!("expression order {} exceeds the space H^{n}", expr.order()));
    }
    let bc = bc_spans.into_iter().map(|s| parse_condition(s, n)).collect::<Result<Vec<_>>>()?;
    let def = OperatorDef { name, expr, space, bc, flags };
    def.operator().map_err(|e| Error::Parse { line: at.line, col: at.col, msg: e.to_string() })?;
    Ok(def)
}

fn finish_block(name: String, keys: &[(Span<'_>, Span<'_>)], at: Span<'_>, names: &Names) -> Result<BlockDef> {
    let mut size = None;
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    for (k, v) in keys {
        match k.text {
            "size" => match v.trim().text.parse::<usize>() {
                Ok(n) => size = Some((n, *v)),
                Err(_) => return v.trim().err("size must be a positive integer"),
            },
            "row" => {
                let mut row = Vec::new();
                for piece in v.split(';') {
                    let e = parse_entry(piece)?;
                    if let Some(op) = &e.op {
                        if !names.operator(op) {
                            return piece.trim().err(format!("unresolved name `{op}`"));
                        }
                    }
                    row.push(e);
                }
                rows.push((row, *v));
            }
            "flags" => flags.extend(parse_flags(*v, &BLOCK_FLAGS)?),
            other => return k.err(format!("unknown block key `{other}`")),
        }
    }
    let n = rows.len();
    if n == 0 {
        return at.err(format!("block `{name}` has no rows"));
    }
    if n > MAX_BLOCK {
        return at.err(format!("block size {n} exceeds {MAX_BLOCK}"));
    }
    if let Some((s, span)) = size {
        if s != n {
            return span.trim().err(format!("size {s} but {n} rows"));
        }
    }
    for (row, span) in &rows {
        if row.len() != n {
            return span.trim().err(format!("row has {} entries, expected {n}", row.len()));
        }
    }
    Ok(BlockDef { name, rows: rows.into_iter().map(|(r, _)| r).collect(), flags })
}

/// Parses a specification file. Errors carry 1-based line and column.
pub fn parse(src: &str) -> Result<SpecDocument> {
    let mut doc = SpecDocument::default();
    let mut names = Names::default();
    let mut section = Section::None;
    let mut run_lines: Vec<Span<'_>> = Vec::new();

    let close = |section: Section<'_>, doc: &mut SpecDocument, names: &Names| -> Result<()> {
        match section {
            Section::Operator { name, keys, at } => doc.operators.push(finish_operator(name, &keys, at)?),
            Section::Block { name, keys, at } => doc.blocks.push(finish_block(name, &keys, at, names)?),
            Section::None | Section::Run => {}
        }
        Ok(())
    };

    for (i, raw) in src.lines().enumerate() {
        let text = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = Span { text, line: i + 1, col: 1 }.trim();
        if line.text.is_empty() {
            continue;
        }
        if let Some(inner) = line.text.strip_prefix('[') {
            let Some(inner) = inner.strip_suffix(']') else {
                return line.err("missing `]`");
            };
            let header = line.slice(1, 1 + inner.len()).trim();
            let prev = std::mem::replace(&mut section, Section::None);
            close(prev, &mut doc, &names)?;
            let mut parts = header.text.split_whitespace();
            let kind = parts.next().unwrap_or("");
            let name = parts.next();
            if parts.next().is_some() {
                return header.err("section header takes at most one name");
            }
            section = match (kind, name) {
                ("run", None) => Section::Run,
                ("operator" | "block", Some(n)) => {
                    if !is_ident(n) || n.parse::<GQ>().is_ok() {
                        return header.err(format!("invalid name `{n}`"));
                    }
                    if names.operators.contains(n) || names.blocks.contains(n) {
                        return header.err(format!("`{n}` is defined twice"));
                    }
                    if kind == "operator" {
                        names.operators.insert(n.to_string());
                        Section::Operator { name: n.to_string(), keys: Vec::new(), at: line }
                    } else {
                        names.blocks.insert(n.to_string());
                        Section::Block { name: n.to_string(), keys: Vec::new(), at: line }
                    }
                }
                ("operator" | "block", None) => return header.err(format!("`[{kind}]` needs a name")),
                _ => return header.err(format!("unknown section `[{}]`", header.text)),
            };
            continue;
        }
        match &mut section {
            Section::None => return line.err("expected a section header"),
            Section::Run => run_lines.push(line),
            Section::Operator { keys, .. } | Section::Block { keys, .. } => {
                let Some(eq) = line.text.find('=') else {
                    return line.err("expected `key = value`");
                };
                keys.push((line.slice(0, eq).trim(), line.slice(eq + 1, line.text.len())));
            }
        }
    }
    close(section, &mut doc, &names)?;
    // commands may name blocks defined after the [run] section
    for l in run_lines {
        doc.commands.push(parse_command(l, &names)?);
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> Span<'_> {
        Span { text: s, line: 1, col: 1 }
    }

    #[test]
    fn expressions() {
        for (src, want) in [
            ("-D^2", "-D^2"),
            ("iD", "iD"),
            ("(2+i)D^2 + 3D - 1", "(2+i)D^2 + 3D - 1"),
            ("1/2D + 1/3i", "1/2D + 1/3i"),
            ("D^2 - D^2", "0"),
            ("2*D", "2D"),
        ] {
            assert_eq!(parse_expr(sp(src)).unwrap().to_string(), want, "{src}");
        }
        assert!(matches!(parse_expr(sp("D^5")), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr(sp("-D^2 x")), Err(Error::Parse { col: 6, .. })));
    }

    #[test]
    fn conditions() {
        let row = parse_condition(sp("f''(0)=0"), 3).unwrap();
        assert_eq!(row.iter().filter(|c| !c.is_zero()).count(), 1);
        assert!(row[2].is_one());
        let row = parse_condition(sp("f(0) - 2f'(1) = f^(2)(1)"), 3).unwrap();
        assert_eq!(row[0], GQ::one());
        assert_eq!(row[4], GQ::int(-2));
        assert_eq!(row[5], GQ::int(-1));
        assert!(parse_condition(sp("f(0) = 1"), 1).is_err());
        assert!(parse_condition(sp("f'(0) = 0"), 1).is_err());
        assert!(parse_condition(sp("f(2) = 0"), 1).is_err());
    }

    #[test]
    fn third_order_operator() {
        let doc = parse("[operator T]\nexpr = -D^3\nbc = f''(0)=0\n").unwrap();
        let t = doc.operator("T").unwrap();
        assert_eq!(t.order(), 3);
        assert_eq!(t.dom().bc().count(), 1);
    }

    #[test]
    fn empty_document() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn diagnostics() {
        let cases = [
            ("expr = D", 1, 1),
            ("[operator A]\nexpr = -D^2\nbc = f(0) = 0; f(3) = 0\n", 3, 18),
            ("[block B]\nrow = LD; Nope\nrow = LD; LD\n", 2, 11),
            ("[run]\ncheck-sa Missing\n", 2, 10),
            ("[block B]\nrow = LD; LD\n", 2, 7),
            ("[operator A]\nexpr = -D^2\nflags = shiny\n", 3, 9),
            ("[operator A]\nexpr = iD\n[operator A]\nexpr = iD\n", 3, 2),
        ];
        for (src, line, col) in cases {
            match parse(src) {
                Err(Error::Parse { line: l, col: c, msg }) => assert_eq!((l, c), (line, col), "{src:?}: {msg}"),
                other => panic!("{src:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn entries() {
        let e = parse_entry(sp("(1+i)*LD")).unwrap();
        assert_eq!(e.coeff, "1+i".parse().unwrap());
        assert_eq!(parse_entry(sp("-M0")).unwrap().coeff, GQ::int(-1));
        assert_eq!(parse_entry(sp("1/2i")).unwrap().op, None);
        assert_eq!(parse_entry(sp("2i*Mstar")).unwrap().op.as_deref(), Some("Mstar"));
        assert!(parse_entry(sp("2*")).is_err());
    }
}
