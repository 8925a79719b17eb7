//! Line-based instance and definition files.
//!
//! ```text
//! # sailing
//! clause -w r
//! clause -w -c n
//! rel OneInThree 3 : 001 010 100
//! app OneInThree a b c
//! xor a b = 1
//! eq a c
//! hyp w c
//! man n
//! query c
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{
    AbductionInstance, Atom, DivInstance, FacetInstance, Formula, Relation, RelationKind, Var,
    VarSet, VarTable,
};
use crate::reduce::EfppDefinition;

/// Result of parsing an instance file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Abduction(AbductionInstance),
    Facet(FacetInstance),
    Div(DivInstance),
}

impl Parsed {
    pub fn base(&self) -> &AbductionInstance {
        match self {
            Parsed::Abduction(i) => i,
            Parsed::Facet(f) => &f.base,
            Parsed::Div(d) => &d.base,
        }
    }

    pub fn into_base(self) -> AbductionInstance {
        match self {
            Parsed::Abduction(i) => i,
            Parsed::Facet(f) => f.base,
            Parsed::Div(d) => d.base,
        }
    }
}

#[derive(Debug, Clone)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn is_punct(c: char) -> bool {
    matches!(c, '(' | ')' | ';' | '{' | '}' | ':' | '=' | ',')
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    let col_of = |byte: usize| line[..byte].chars().count() + 1;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() || is_punct(c) {
            if let Some(s) = start.take() {
                tokens.push(Token { text: &line[s..i], column: col_of(s) });
            }
            if is_punct(c) {
                tokens.push(Token { text: &line[i..i + c.len_utf8()], column: col_of(i) });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token { text: &line[s..], column: col_of(s) });
    }
    tokens
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct LineCtx<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    end_column: usize,
}

impl<'a> LineCtx<'a> {
    fn err(&self, idx: usize, msg: impl Into<String>) -> Error {
        let column = self.tokens.get(idx).map_or(self.end_column, |t| t.column);
        Error::parse(self.line, column, msg)
    }

    fn name(&self, idx: usize) -> Result<&'a str> {
        let t = self.tokens.get(idx).ok_or_else(|| self.err(idx, "expected a name"))?;
        if is_name(t.text) {
            Ok(t.text)
        } else {
            Err(self.err(idx, format!("`{}` is not a valid name", t.text)))
        }
    }

    fn names_from(&self, idx: usize) -> Result<Vec<&'a str>> {
        (idx..self.tokens.len()).map(|i| self.name(i)).collect()
    }

    fn expect(&self, idx: usize, text: &str) -> Result<()> {
        match self.tokens.get(idx) {
            Some(t) if t.text == text => Ok(()),
            Some(t) => Err(self.err(idx, format!("expected `{text}`, found `{}`", t.text))),
            None => Err(self.err(idx, format!("expected `{text}`"))),
        }
    }
}

/// Relations declared with `rel`, keyed by name.
#[derive(Default)]
struct RelTable {
    rels: HashMap<String, Arc<Relation>>,
}

impl RelTable {
    fn declare(&mut self, ctx: &LineCtx<'_>) -> Result<()> {
        let name = ctx.name(1)?;
        if self.rels.contains_key(name) {
            return Err(ctx.err(1, format!("relation `{name}` declared twice")));
        }
        let arity_tok = ctx.tokens.get(2).ok_or_else(|| ctx.err(2, "expected an arity"))?;
        let arity: usize = arity_tok
            .text
            .parse()
            .map_err(|_| ctx.err(2, format!("`{}` is not an arity", arity_tok.text)))?;
        if arity > crate::model::MAX_ARITY {
            return Err(ctx.err(2, format!("arity {arity} is too large")));
        }
        ctx.expect(3, ":")?;
        let mut tuples = Vec::new();
        for idx in 4..ctx.tokens.len() {
            let bits = ctx.tokens[idx].text;
            if bits.len() != arity || !bits.chars().all(|c| c == '0' || c == '1') {
                return Err(ctx.err(idx, format!("`{bits}` is not a bitstring of length {arity}")));
            }
            let packed = bits
                .chars()
                .enumerate()
                .fold(0u64, |acc, (i, c)| acc | (((c == '1') as u64) << i));
            tuples.push(packed);
        }
        self.rels
            .insert(name.to_string(), Arc::new(Relation::table(name, arity, tuples)));
        Ok(())
    }
}

/// Parses one atom line (`clause`, `xor`, `eq`, `app`), interning variables
/// through `var`.
fn parse_atom(
    ctx: &LineCtx<'_>,
    rels: &RelTable,
    mut var: impl FnMut(&LineCtx<'_>, usize, &str) -> Result<Var>,
) -> Result<Atom> {
    let head = ctx.tokens[0].text;
    match head {
        "clause" => {
            if ctx.tokens.len() < 2 {
                return Err(ctx.err(1, "clause needs at least one literal"));
            }
            let mut lits = Vec::new();
            for idx in 1..ctx.tokens.len() {
                let text = ctx.tokens[idx].text;
                let (name, sign) = match text.strip_prefix('-') {
                    Some(n) => (n, false),
                    None => (text, true),
                };
                if !is_name(name) {
                    return Err(ctx.err(idx, format!("`{text}` is not a literal")));
                }
                lits.push((var(ctx, idx, name)?, sign));
            }
            Ok(Atom::clause(&lits))
        }
        "xor" => {
            let eq_idx = ctx
                .tokens
                .iter()
                .position(|t| t.text == "=")
                .ok_or_else(|| ctx.err(ctx.tokens.len(), "xor needs `= 0` or `= 1`"))?;
            if eq_idx < 2 {
                return Err(ctx.err(1, "xor needs at least one variable"));
            }
            let parity = match ctx.tokens.get(eq_idx + 1).map(|t| t.text) {
                Some("0") => false,
                Some("1") => true,
                _ => return Err(ctx.err(eq_idx + 1, "parity must be 0 or 1")),
            };
            if ctx.tokens.len() > eq_idx + 2 {
                return Err(ctx.err(eq_idx + 2, "unexpected token after parity"));
            }
            let mut args = Vec::new();
            for idx in 1..eq_idx {
                let n = ctx.name(idx)?;
                args.push(var(ctx, idx, n)?);
            }
            Ok(Atom::xor(args, parity))
        }
        "eq" => {
            if ctx.tokens.len() != 3 {
                return Err(ctx.err(ctx.tokens.len().min(3), "eq takes exactly two variables"));
            }
            let a = var(ctx, 1, ctx.name(1)?)?;
            let b = var(ctx, 2, ctx.name(2)?)?;
            Ok(Atom::equality(a, b))
        }
        "app" => {
            let rname = ctx.name(1)?;
            let rel = rels
                .rels
                .get(rname)
                .ok_or_else(|| ctx.err(1, format!("undeclared relation `{rname}`")))?
                .clone();
            let names = ctx.names_from(2)?;
            if names.len() != rel.arity() {
                return Err(ctx.err(
                    2,
                    format!("`{rname}` has arity {}, got {} arguments", rel.arity(), names.len()),
                ));
            }
            let mut args = Vec::new();
            for (off, n) in names.iter().enumerate() {
                args.push(var(ctx, 2 + off, n)?);
            }
            Ok(Atom::new(rel, args))
        }
        _ => Err(ctx.err(0, format!("unknown directive `{head}`"))),
    }
}

fn lines(text: &str) -> impl Iterator<Item = LineCtx<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let tokens = tokenize(raw);
        (!tokens.is_empty()).then(|| LineCtx {
            line: i + 1,
            end_column: raw.chars().count() + 1,
            tokens,
        })
    })
}

/// Parses an instance file.
pub fn parse_instance(text: &str) -> Result<Parsed> {
    let mut vars = VarTable::new();
    let mut rels = RelTable::default();
    let mut atoms = Vec::new();
    let mut hyp: Vec<(usize, usize, String)> = Vec::new();
    let mut man: Vec<(usize, usize, String)> = Vec::new();
    let mut query: Option<(usize, usize, String)> = None;
    let mut k: Option<usize> = None;
    let mut last_line = 0;

    for ctx in lines(text) {
        last_line = ctx.line;
        match ctx.tokens[0].text {
            "rel" => rels.declare(&ctx)?,
            "clause" | "xor" | "eq" | "app" => {
                atoms.push(parse_atom(&ctx, &rels, |_, _, n| Ok(vars.intern(n)))?);
            }
            head @ ("hyp" | "man") => {
                if ctx.tokens.len() < 2 {
                    return Err(ctx.err(1, format!("`{head}` needs at least one name")));
                }
                let target = if head == "hyp" { &mut hyp } else { &mut man };
                for idx in 1..ctx.tokens.len() {
                    let n = ctx.name(idx)?;
                    target.push((ctx.line, ctx.tokens[idx].column, n.to_string()));
                }
            }
            "query" => {
                if query.is_some() {
                    return Err(ctx.err(0, "duplicate query"));
                }
                if ctx.tokens.len() != 2 {
                    return Err(ctx.err(ctx.tokens.len().min(2), "query takes one name"));
                }
                query = Some((ctx.line, ctx.tokens[1].column, ctx.name(1)?.to_string()));
            }
            "k" => {
                if k.is_some() {
                    return Err(ctx.err(0, "duplicate k"));
                }
                if ctx.tokens.len() != 2 {
                    return Err(ctx.err(ctx.tokens.len().min(2), "k takes one number"));
                }
                let n = ctx.tokens[1]
                    .text
                    .parse()
                    .map_err(|_| ctx.err(1, format!("`{}` is not a number", ctx.tokens[1].text)))?;
                k = Some(n);
            }
            "def" => return Err(ctx.err(0, "definitions belong in a definition file")),
            other => return Err(ctx.err(0, format!("unknown directive `{other}`"))),
        }
    }

    if query.is_some() && k.is_some() {
        return Err(Error::parse(last_line.max(1), 1, "an instance has either a query or a k, not both"));
    }

    let kb = Formula::new(atoms);
    let resolve = |entries: &[(usize, usize, String)], what: &str| -> Result<VarSet> {
        entries
            .iter()
            .map(|(line, col, n)| match vars.get(n) {
                Some(v) if kb.vars.contains(&v) => Ok(v),
                _ => Err(Error::Scope(format!(
                    "{what} `{n}` at {line}:{col} does not occur in the knowledge base"
                ))),
            })
            .collect()
    };
    let hypotheses = resolve(&hyp, "hypothesis")?;
    let manifestations = resolve(&man, "manifestation")?;
    let query = match &query {
        Some((line, col, n)) => match vars.get(n) {
            Some(v) if hypotheses.contains(&v) => Some(v),
            _ => {
                return Err(Error::Scope(format!("query `{n}` at {line}:{col} is not a hypothesis")))
            }
        },
        None => None,
    };
    let base = AbductionInstance::new(vars, kb, hypotheses, manifestations)?;
    Ok(match (query, k) {
        (Some(q), _) => Parsed::Facet(FacetInstance::new(base, q)?),
        (None, Some(k)) => Parsed::Div(DivInstance { base, k }),
        (None, None) => Parsed::Abduction(base),
    })
}

/// Parses a definition file: optional `rel` declarations plus `def` blocks.
///
/// A `def` whose name matches a declared `rel` is checked against that
/// relation; otherwise its target is the projection of the body.
pub fn parse_definitions(text: &str) -> Result<Vec<EfppDefinition>> {
    struct Open {
        line: usize,
        name: String,
        vars: VarTable,
        free: Vec<Var>,
        exist: Vec<Var>,
        atoms: Vec<Atom>,
    }

    let mut rels = RelTable::default();
    let mut pending: Vec<Open> = Vec::new();
    let mut open: Option<Open> = None;
    let mut last_line = 0;

    for ctx in lines(text) {
        last_line = ctx.line;
        let head = ctx.tokens[0].text;
        if let Some(def) = open.as_mut() {
            match head {
                "}" => {
                    if ctx.tokens.len() > 1 {
                        return Err(ctx.err(1, "unexpected token after `}`"));
                    }
                    pending.push(open.take().unwrap());
                }
                "clause" | "xor" | "eq" | "app" => {
                    let local = &def.vars;
                    let atom = parse_atom(&ctx, &rels, |c, idx, n| {
                        local
                            .get(n)
                            .ok_or_else(|| c.err(idx, format!("`{n}` is neither free nor existential")))
                    })?;
                    def.atoms.push(atom);
                }
                _ => return Err(ctx.err(0, format!("unexpected `{head}` inside a definition"))),
            }
            continue;
        }
        match head {
            "rel" => rels.declare(&ctx)?,
            "def" => {
                let name = ctx.name(1)?.to_string();
                ctx.expect(2, "(")?;
                let mut vars = VarTable::new();
                let mut free = Vec::new();
                let mut exist = Vec::new();
                let mut in_exist = false;
                let mut idx = 3;
                loop {
                    let tok = ctx.tokens.get(idx).ok_or_else(|| ctx.err(idx, "unterminated parameter list"))?;
                    match tok.text {
                        ")" => break,
                        ";" if !in_exist => in_exist = true,
                        ";" => return Err(ctx.err(idx, "second `;` in parameter list")),
                        "," => {}
                        _ => {
                            let n = ctx.name(idx)?;
                            if vars.get(n).is_some() {
                                return Err(ctx.err(idx, format!("parameter `{n}` repeated")));
                            }
                            let v = vars.intern(n);
                            if in_exist { exist.push(v) } else { free.push(v) }
                        }
                    }
                    idx += 1;
                }
                if free.is_empty() {
                    return Err(ctx.err(3, "a definition needs at least one free variable"));
                }
                ctx.expect(idx + 1, "{")?;
                if ctx.tokens.len() > idx + 2 {
                    return Err(ctx.err(idx + 2, "definition body starts on the next line"));
                }
                open = Some(Open { line: ctx.line, name, vars, free, exist, atoms: Vec::new() });
            }
            other => return Err(ctx.err(0, format!("unexpected `{other}` in a definition file"))),
        }
    }
    if let Some(def) = open {
        return Err(Error::parse(def.line, 1, format!("definition `{}` is not closed", def.name)));
    }
    let _ = last_line;

    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for def in pending {
        if seen.insert(def.name.clone(), def.line).is_some() {
            return Err(Error::parse(def.line, 1, format!("`{}` defined twice", def.name)));
        }
        let declared = rels.rels.get(&def.name).cloned();
        let body = Formula::new(def.atoms);
        out.push(EfppDefinition::new(def.name, declared, def.vars, def.free, def.exist, body)?);
    }
    Ok(out)
}

fn bitstring(t: u64, arity: usize) -> String {
    (0..arity).map(|i| if (t >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

fn render_atom(out: &mut String, atom: &Atom, rel_name: &str, vars: &VarTable) {
    let name = |v: &Var| vars.name(*v);
    match atom.relation.kind() {
        RelationKind::Clause(signs) => {
            out.push_str("clause");
            for (v, &s) in atom.args.iter().zip(signs) {
                let _ = write!(out, " {}{}", if s { "" } else { "-" }, name(v));
            }
        }
        RelationKind::Unit(s) => {
            let _ = write!(out, "clause {}{}", if *s { "" } else { "-" }, name(&atom.args[0]));
        }
        RelationKind::Xor(p) => {
            out.push_str("xor");
            for v in &atom.args {
                let _ = write!(out, " {}", name(v));
            }
            let _ = write!(out, " = {}", *p as u8);
        }
        RelationKind::Equality => {
            let _ = write!(out, "eq {} {}", name(&atom.args[0]), name(&atom.args[1]));
        }
        RelationKind::Table(_) => {
            out.push_str("app ");
            out.push_str(rel_name);
            for v in &atom.args {
                let _ = write!(out, " {}", name(v));
            }
        }
    }
    out.push('\n');
}

/// Renders an instance in the file grammar.
///
/// Table relations are declared first; two distinct tables sharing a name
/// get numeric suffixes. Xor constraints with no variables cannot be
/// written in the grammar and are rendered as an always-false table when
/// their parity is 1, and omitted otherwise.
pub fn render(parsed: &Parsed) -> String {
    let inst = parsed.base();
    let mut out = String::new();
    let mut names: Vec<(Arc<Relation>, String)> = Vec::new();
    let mut taken: HashMap<String, ()> = HashMap::new();
    let mut name_for = |rel: &Arc<Relation>, out: &mut String| -> String {
        if let Some((_, n)) = names.iter().find(|(r, _)| r == rel) {
            return n.clone();
        }
        let base = if is_name(rel.name()) { rel.name().to_string() } else { "R".to_string() };
        let mut n = base.clone();
        let mut i = 1;
        while taken.contains_key(&n) {
            n = format!("{base}_{i}");
            i += 1;
        }
        taken.insert(n.clone(), ());
        let _ = write!(out, "rel {n} {} :", rel.arity());
        for t in rel.tuples() {
            let _ = write!(out, " {}", bitstring(t, rel.arity()));
        }
        out.push('\n');
        names.push((rel.clone(), n.clone()));
        n
    };

    let mut body = String::new();
    for atom in &inst.kb.atoms {
        let zero_ary_xor = matches!(atom.relation.kind(), RelationKind::Xor(_)) && atom.args.is_empty();
        if zero_ary_xor {
            if atom.relation.contains(0) {
                continue;
            }
            let f = Arc::new(Relation::always_false());
            let n = name_for(&f, &mut out);
            render_atom(&mut body, &Atom::new(f, vec![]), &n, &inst.vars);
            continue;
        }
        let n = if atom.relation.is_table() { name_for(&atom.relation, &mut out) } else { String::new() };
        render_atom(&mut body, atom, &n, &inst.vars);
    }
    out.push_str(&body);
    for (head, set) in [("hyp", &inst.hypotheses), ("man", &inst.manifestations)] {
        if !set.is_empty() {
            out.push_str(head);
            for n in inst.names(set) {
                out.push(' ');
                out.push_str(&n);
            }
            out.push('\n');
        }
    }
    match parsed {
        Parsed::Facet(f) => {
            let _ = writeln!(out, "query {}", inst.name(f.query));
        }
        Parsed::Div(d) => {
            let _ = writeln!(out, "k {}", d.k);
        }
        Parsed::Abduction(_) => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAILING: &str = "\
# sailing example
clause -w r
clause -w -c n
clause -w -s n
hyp w c s r
man n
";

    #[test]
    fn sailing_shape() {
        let p = parse_instance(SAILING).unwrap();
        let inst = p.base();
        assert_eq!(inst.kb.vars.len(), 5);
        assert_eq!(inst.hypotheses.len(), 4);
        assert_eq!(inst.names(&inst.manifestations), vec!["n"]);
        let order: Vec<&str> = inst.vars.names().collect();
        assert_eq!(order, vec!["w", "r", "c", "n", "s"]);
    }

    #[test]
    fn hypothesis_outside_kb_is_a_scope_error() {
        assert!(matches!(parse_instance("hyp a\n"), Err(Error::Scope(_))));
    }

    #[test]
    fn query_must_be_a_hypothesis() {
        let text = "clause -a b\nhyp a\nman b\nquery b\n";
        assert!(matches!(parse_instance(text), Err(Error::Scope(_))));
    }

    #[test]
    fn table_relation() {
        let p = parse_instance("rel OneInThree 3 : 001 010 100\napp OneInThree a b c\n").unwrap();
        let rel = &p.base().kb.atoms[0].relation;
        assert!(rel.is_table());
        assert_eq!(rel.tuple_count(), 3);
        // character i is coordinate i
        assert!(rel.contains(0b001));
        assert!(rel.contains(0b100));
    }

    #[test]
    fn parse_error_positions() {
        match parse_instance("clause a\nxor a b = 2\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 11)),
            other => panic!("{other:?}"),
        }
        match parse_instance("clause a\nfrobnicate a\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("{other:?}"),
        }
        match parse_instance("rel R 2 : 01 1\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 14)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn query_and_k_together_is_rejected() {
        let text = "clause -a b\nhyp a\nman b\nquery a\nk 1\n";
        assert!(matches!(parse_instance(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip() {
        let text = "\
rel OneInThree 3 : 001 010 100
rel F 0 :
clause -w r
app OneInThree a b w
xor a b c = 1
eq c r
clause -a
app F
hyp w a
man r
query a
";
        let p = parse_instance(text).unwrap();
        let again = parse_instance(&render(&p)).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn definitions_parse_and_validate() {
        let defs = "\
def Split(a b c d ; x) {
  clause a b x
  clause c d -x
}
";
        let d = parse_definitions(defs).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].target.arity(), 4);
        assert_eq!(d[0].target.tuple_count(), 15);

        let wrong = "\
rel Imp 2 : 00 01 11
def Imp(a b) {
  clause a b
}
";
        assert!(matches!(parse_definitions(wrong), Err(Error::InvalidDefinition { .. })));
    }

    #[test]
    fn unclosed_definition() {
        assert!(matches!(
            parse_definitions("def R(a) {\nclause a\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
