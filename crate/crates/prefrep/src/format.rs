//! Text formats: a line oriented database format, a query language, and
//! DIMACS style encodings for the generated formulas.
//!
//! A database file holds one statement per line, `#` starts a comment:
//!
//! ```text
//! relation Emp(Name: constant, Salary: rational, Dept: constant)
//! FD Emp: Name -> Salary, Dept;
//! DENIAL [Emp(n, s, d), Emp(n2, s2, d2)] WHERE s > s2 AND NOT (n = n2);
//! Emp('John', 50000, 'IT')
//! Emp('John', 40000, 'IT') > Emp('John', 50000, 'IT')
//! ```
//!
//! Declarations must precede use. Numbers are exact rationals: an optional
//! leading minus, digits, and optionally a fraction (`5/3`) or a decimal
//! part (`2.5`, read exactly as 5/2). In fact lines both `'IT'` and a bare
//! identifier denote constants. Inside constraints and queries bare
//! identifiers are variables and constants must be quoted. A priority line
//! is two facts joined by `>`, read as "left wins over right".
//!
//! Queries use the comparison operators `=`, `!=`, `<`, `<=`, `>`, `>=`
//! between terms, the connectives `NOT`, `AND`, `OR` (binding in that
//! order, tightest first), parentheses, and the quantifiers `EXISTS` and
//! `FORALL`, written `EXISTS x, y . body`. A quantifier binds loosest, so
//! its body extends as far right as possible:
//!
//! ```text
//! EXISTS x, y . Emp('John', x, y) AND x > 60000
//! ```
//!
//! Denial guards follow the same grammar without quantifiers and with the
//! extra formula `TRUE`.
//!
//! The keywords `relation`, `FD`, `DENIAL`, `WHERE`, `AND`, `OR`, `NOT`,
//! `TRUE`, `EXISTS` and `FORALL` are reserved: they cannot name relations
//! or variables. Serializing and reparsing a database yields the same
//! schema, instance, constraints, and priority pairs. Queries round trip
//! as long as every connective in the tree has at least two children and
//! every quantifier binds at least one variable; degenerate nodes are
//! printed as an equivalent normal form (a one child conjunction prints as
//! the child, an empty conjunction as `1 = 1`, an empty disjunction as
//! `1 != 1`).
//!
//! CNF formulas use the DIMACS format: `c` comment lines, one
//! `p cnf <vars> <clauses>` header, then whitespace separated literals
//! with `0` closing each clause. The quantified variant prefixes the
//! header with a line `u <count>` declaring that variables 1 through
//! `count` are universal and the remaining ones existential.

use std::fmt;

use num::{BigInt, BigRational};

use crate::context::RepairContext;
use crate::error::{Error, Result};
use crate::generators::{Cnf, Qbf};
use crate::model::{
    attr, validate_denial, Atom, BuiltinFormula, CmpOp, Constraint, DenialConstraint, Domain,
    Fact, FunctionalDependency, Instance, Query, Schema, Term, Value,
};
use crate::priority::PriorityMode;

const KEYWORDS: [&str; 10] = [
    "relation", "FD", "DENIAL", "WHERE", "AND", "OR", "NOT", "TRUE", "EXISTS", "FORALL",
];

fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn at_line(line: usize, err: Error) -> Error {
    match err {
        Error::Input(message) | Error::Type(message) => perr(line, message),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(BigRational),
    Quoted(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Arrow,
    Op(CmpOp),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Number(r) => write!(f, "{}", Value::Rat(r.clone())),
            Tok::Quoted(s) => write!(f, "'{s}'"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Comma => write!(f, ","),
            Tok::Semi => write!(f, ";"),
            Tok::Colon => write!(f, ":"),
            Tok::Dot => write!(f, "."),
            Tok::Arrow => write!(f, "->"),
            Tok::Op(op) => write!(f, "{op}"),
        }
    }
}

fn lex(text: &str, first_line: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut line = first_line;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            _ if c.is_whitespace() => i += 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '\'' => {
                let start = line;
                i += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(perr(start, "unterminated constant, missing closing '"))
                        }
                        Some('\'') => break,
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                toks.push((Tok::Quoted(s), start));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    s.push(chars[i]);
                    i += 1;
                }
                toks.push((Tok::Ident(s), line));
            }
            _ if c.is_ascii_digit() => {
                let (tok, next) = lex_number(&chars, i, line, false)?;
                toks.push((tok, line));
                i = next;
            }
            '-' => match chars.get(i + 1) {
                Some('>') => {
                    toks.push((Tok::Arrow, line));
                    i += 2;
                }
                Some(d) if d.is_ascii_digit() => {
                    let (tok, next) = lex_number(&chars, i + 1, line, true)?;
                    toks.push((tok, line));
                    i = next;
                }
                _ => return Err(perr(line, "expected a digit or > after -")),
            },
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Op(CmpOp::Ge), line));
                    i += 2;
                } else {
                    toks.push((Tok::Op(CmpOp::Gt), line));
                    i += 1;
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Op(CmpOp::Le), line));
                    i += 2;
                } else {
                    toks.push((Tok::Op(CmpOp::Lt), line));
                    i += 1;
                }
            }
            '!' => {
                if chars.get(i + 1) == Some(&'=') {
                    toks.push((Tok::Op(CmpOp::Ne), line));
                    i += 2;
                } else {
                    return Err(perr(line, "expected = after !"));
                }
            }
            '=' => {
                toks.push((Tok::Op(CmpOp::Eq), line));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, line));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, line));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, line));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, line));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, line));
                i += 1;
            }
            ';' => {
                toks.push((Tok::Semi, line));
                i += 1;
            }
            ':' => {
                toks.push((Tok::Colon, line));
                i += 1;
            }
            '.' => {
                toks.push((Tok::Dot, line));
                i += 1;
            }
            _ => return Err(perr(line, format!("unexpected character {c}"))),
        }
    }
    Ok(toks)
}

fn lex_number(
    chars: &[char],
    start: usize,
    line: usize,
    negative: bool,
) -> Result<(Tok, usize)> {
    let mut i = start;
    let mut digits = String::new();
    while i < chars.len() && chars[i].is_ascii_digit() {
        digits.push(chars[i]);
        i += 1;
    }
    let mut numer: BigInt = digits.parse().expect("digit run parses as an integer");
    let mut denom = BigInt::from(1);
    if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()) {
        i += 1;
        while i < chars.len() && chars[i].is_ascii_digit() {
            numer = numer * 10 + BigInt::from(chars[i].to_digit(10).unwrap());
            denom *= 10;
            i += 1;
        }
    } else if chars.get(i) == Some(&'/') && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()) {
        i += 1;
        let mut den_digits = String::new();
        while i < chars.len() && chars[i].is_ascii_digit() {
            den_digits.push(chars[i]);
            i += 1;
        }
        denom = den_digits.parse().expect("digit run parses as an integer");
        if denom == BigInt::from(0) {
            return Err(perr(line, "fraction has a zero denominator"));
        }
    }
    if negative {
        numer = -numer;
    }
    Ok((Tok::Number(BigRational::new(numer, denom)), i))
}

struct TokStream<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end_line: usize,
}

impl<'a> TokStream<'a> {
    fn new(toks: &'a [(Tok, usize)], end_line: usize) -> TokStream<'a> {
        let end_line = toks.last().map_or(end_line, |(_, l)| *l);
        TokStream { toks, pos: 0, end_line }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_line, |(_, l)| *l)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t);
        self.pos += 1;
        t
    }

    fn err_expected(&self, what: &str) -> Error {
        match self.toks.get(self.pos) {
            Some((t, l)) => perr(*l, format!("expected {what}, found {t}")),
            None => perr(self.end_line, format!("expected {what}, found end of input")),
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_expected(what))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err_expected(what)),
        }
    }

    fn expect_name(&mut self, what: &str) -> Result<String> {
        let line = self.line();
        let s = self.expect_ident(what)?;
        if is_keyword(&s) {
            return Err(perr(line, format!("{s} is a reserved word")));
        }
        Ok(s)
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == word {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == word)
    }

    fn expect_end(&mut self, what: &str) -> Result<()> {
        if self.pos < self.toks.len() {
            Err(self.err_expected(what))
        } else {
            Ok(())
        }
    }
}

/// The four components a database file describes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedDatabase {
    pub schema: Schema,
    pub instance: Instance,
    pub constraints: Vec<Constraint>,
    pub priority_pairs: Vec<(Fact, Fact)>,
}

impl ParsedDatabase {
    /// Builds the repair context the file describes.
    pub fn context(&self, mode: PriorityMode) -> Result<RepairContext> {
        RepairContext::new(
            self.schema.clone(),
            self.instance.clone(),
            self.constraints.clone(),
            &self.priority_pairs,
            mode,
        )
    }
}

/// Parses a database file. Every error carries the offending line.
pub fn parse_database(text: &str) -> Result<ParsedDatabase> {
    let mut schema = Schema::new();
    let mut instance = Instance::new();
    let mut constraints = Vec::new();
    let mut priority_pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = lex(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut ts = TokStream::new(&toks, line);
        if ts.at_keyword("relation") {
            parse_relation_decl(&mut ts, &mut schema)?;
        } else if ts.at_keyword("FD") {
            constraints.push(Constraint::Fd(parse_fd(&mut ts, &schema)?));
        } else if ts.at_keyword("DENIAL") {
            constraints.push(Constraint::Denial(parse_denial(&mut ts, &schema)?));
        } else {
            let first = parse_fact(&mut ts, &schema)?;
            if ts.peek() == Some(&Tok::Op(CmpOp::Gt)) {
                ts.next();
                let second = parse_fact(&mut ts, &schema)?;
                priority_pairs.push((first, second));
            } else {
                instance.insert(first);
            }
        }
        ts.expect_end("end of line")?;
    }
    Ok(ParsedDatabase { schema, instance, constraints, priority_pairs })
}

fn parse_relation_decl(ts: &mut TokStream<'_>, schema: &mut Schema) -> Result<()> {
    let line = ts.line();
    ts.next();
    let name = ts.expect_name("a relation name")?;
    ts.expect(&Tok::LParen, "(")?;
    let mut attrs = Vec::new();
    loop {
        let attr_name = ts.expect_name("an attribute name")?;
        ts.expect(&Tok::Colon, ":")?;
        let domain_line = ts.line();
        let domain = match ts.expect_ident("rational or constant")?.as_str() {
            "rational" => Domain::Rational,
            "constant" => Domain::Constant,
            other => {
                return Err(perr(domain_line, format!("unknown domain {other}, expected rational or constant")))
            }
        };
        attrs.push(attr(attr_name, domain));
        if !ts.eat_keyword_comma() {
            break;
        }
    }
    ts.expect(&Tok::RParen, ") or ,")?;
    schema.add_relation(name, attrs).map_err(|e| at_line(line, e))
}

impl TokStream<'_> {
    fn eat_keyword_comma(&mut self) -> bool {
        if self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

fn parse_fd(ts: &mut TokStream<'_>, schema: &Schema) -> Result<FunctionalDependency> {
    ts.next();
    let rel_line = ts.line();
    let relation = ts.expect_name("a relation name")?;
    if schema.attributes(&relation).is_none() {
        return Err(perr(rel_line, format!("unknown relation {relation}")));
    }
    ts.expect(&Tok::Colon, ":")?;
    let lhs = parse_attr_list(ts, schema, &relation)?;
    ts.expect(&Tok::Arrow, "->")?;
    let rhs = parse_attr_list(ts, schema, &relation)?;
    ts.expect(&Tok::Semi, ";")?;
    Ok(FunctionalDependency::new(relation, lhs, rhs))
}

fn parse_attr_list(ts: &mut TokStream<'_>, schema: &Schema, relation: &str) -> Result<Vec<String>> {
    let mut names = Vec::new();
    loop {
        let line = ts.line();
        let name = ts.expect_name("an attribute name")?;
        if schema.attribute_position(relation, &name).is_none() {
            return Err(perr(line, format!("relation {relation} has no attribute {name}")));
        }
        names.push(name);
        if !ts.eat_keyword_comma() {
            break;
        }
    }
    Ok(names)
}

fn parse_denial(ts: &mut TokStream<'_>, schema: &Schema) -> Result<DenialConstraint> {
    let line = ts.line();
    ts.next();
    ts.expect(&Tok::LBracket, "[")?;
    let mut atoms = Vec::new();
    loop {
        atoms.push(parse_atom(ts)?);
        if !ts.eat_keyword_comma() {
            break;
        }
    }
    ts.expect(&Tok::RBracket, "] or ,")?;
    let guard = if ts.eat_keyword("WHERE") {
        parse_guard_or(ts)?
    } else {
        BuiltinFormula::True
    };
    ts.expect(&Tok::Semi, ";")?;
    let dc = DenialConstraint::new(atoms, guard);
    validate_denial(schema, &dc).map_err(|e| at_line(line, e))?;
    Ok(dc)
}

fn parse_atom(ts: &mut TokStream<'_>) -> Result<Atom> {
    let relation = ts.expect_name("a relation name")?;
    ts.expect(&Tok::LParen, "(")?;
    let mut terms = Vec::new();
    loop {
        terms.push(parse_term(ts)?);
        if !ts.eat_keyword_comma() {
            break;
        }
    }
    ts.expect(&Tok::RParen, ") or ,")?;
    Ok(Atom::new(relation, terms))
}

fn parse_term(ts: &mut TokStream<'_>) -> Result<Term> {
    let line = ts.line();
    match ts.next() {
        Some(Tok::Number(r)) => Ok(Term::Lit(Value::Rat(r.clone()))),
        Some(Tok::Quoted(s)) => Ok(Term::Lit(Value::Const(s.clone()))),
        Some(Tok::Ident(s)) if !is_keyword(s) => Ok(Term::var(s.clone())),
        Some(Tok::Ident(s)) => Err(perr(line, format!("{s} is a reserved word"))),
        Some(t) => Err(perr(line, format!("expected a term, found {t}"))),
        None => Err(perr(line, "expected a term, found end of input")),
    }
}

fn parse_guard_or(ts: &mut TokStream<'_>) -> Result<BuiltinFormula> {
    let mut parts = vec![parse_guard_and(ts)?];
    while ts.eat_keyword("OR") {
        parts.push(parse_guard_and(ts)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BuiltinFormula::Or(parts) })
}

fn parse_guard_and(ts: &mut TokStream<'_>) -> Result<BuiltinFormula> {
    let mut parts = vec![parse_guard_not(ts)?];
    while ts.eat_keyword("AND") {
        parts.push(parse_guard_not(ts)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BuiltinFormula::And(parts) })
}

fn parse_guard_not(ts: &mut TokStream<'_>) -> Result<BuiltinFormula> {
    if ts.eat_keyword("NOT") {
        Ok(BuiltinFormula::Not(Box::new(parse_guard_not(ts)?)))
    } else {
        parse_guard_primary(ts)
    }
}

fn parse_guard_primary(ts: &mut TokStream<'_>) -> Result<BuiltinFormula> {
    if ts.eat_keyword("TRUE") {
        return Ok(BuiltinFormula::True);
    }
    if ts.peek() == Some(&Tok::LParen) {
        ts.next();
        let inner = parse_guard_or(ts)?;
        ts.expect(&Tok::RParen, ")")?;
        return Ok(inner);
    }
    let left = parse_term(ts)?;
    let op = parse_cmp_op(ts)?;
    let right = parse_term(ts)?;
    Ok(BuiltinFormula::Cmp(left, op, right))
}

fn parse_cmp_op(ts: &mut TokStream<'_>) -> Result<CmpOp> {
    match ts.peek() {
        Some(Tok::Op(op)) => {
            let op = *op;
            ts.next();
            Ok(op)
        }
        _ => Err(ts.err_expected("a comparison operator")),
    }
}

fn parse_fact(ts: &mut TokStream<'_>, schema: &Schema) -> Result<Fact> {
    let line = ts.line();
    let relation = ts.expect_name("a relation name")?;
    ts.expect(&Tok::LParen, "(")?;
    let mut args = Vec::new();
    loop {
        let arg_line = ts.line();
        let value = match ts.next() {
            Some(Tok::Number(r)) => Value::Rat(r.clone()),
            Some(Tok::Quoted(s)) => Value::Const(s.clone()),
            Some(Tok::Ident(s)) => Value::Const(s.clone()),
            Some(t) => return Err(perr(arg_line, format!("expected a value, found {t}"))),
            None => return Err(perr(arg_line, "expected a value, found end of input")),
        };
        args.push(value);
        if !ts.eat_keyword_comma() {
            break;
        }
    }
    ts.expect(&Tok::RParen, ") or ,")?;
    let fact = Fact::new(relation, args);
    schema.validate_fact(&fact).map_err(|e| at_line(line, e))?;
    Ok(fact)
}

/// Parses a file of bare fact lines against an existing schema, for
/// candidate repairs and similar fact sets.
pub fn parse_fact_lines(text: &str, schema: &Schema) -> Result<Instance> {
    let mut facts = Instance::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = lex(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut ts = TokStream::new(&toks, line);
        facts.insert(parse_fact(&mut ts, schema)?);
        ts.expect_end("end of line")?;
    }
    Ok(facts)
}

/// Parses a query. The text may span several lines.
pub fn parse_query(text: &str) -> Result<Query> {
    let toks = lex(text, 1)?;
    if toks.is_empty() {
        return Err(perr(1, "empty query"));
    }
    let mut ts = TokStream::new(&toks, 1);
    let query = parse_query_inner(&mut ts)?;
    ts.expect_end("end of query")?;
    Ok(query)
}

fn parse_query_inner(ts: &mut TokStream<'_>) -> Result<Query> {
    for (word, exists) in [("EXISTS", true), ("FORALL", false)] {
        if ts.eat_keyword(word) {
            let mut vars = vec![ts.expect_name("a variable name")?];
            while ts.eat_keyword_comma() {
                vars.push(ts.expect_name("a variable name")?);
            }
            ts.expect(&Tok::Dot, ".")?;
            let body = Box::new(parse_query_inner(ts)?);
            return Ok(if exists { Query::Exists(vars, body) } else { Query::Forall(vars, body) });
        }
    }
    parse_query_or(ts)
}

fn parse_query_or(ts: &mut TokStream<'_>) -> Result<Query> {
    let mut parts = vec![parse_query_and(ts)?];
    while ts.eat_keyword("OR") {
        parts.push(parse_query_and(ts)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Query::Or(parts) })
}

fn parse_query_and(ts: &mut TokStream<'_>) -> Result<Query> {
    let mut parts = vec![parse_query_not(ts)?];
    while ts.eat_keyword("AND") {
        parts.push(parse_query_not(ts)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Query::And(parts) })
}

fn parse_query_not(ts: &mut TokStream<'_>) -> Result<Query> {
    if ts.eat_keyword("NOT") {
        Ok(Query::Not(Box::new(parse_query_not(ts)?)))
    } else {
        parse_query_primary(ts)
    }
}

fn parse_query_primary(ts: &mut TokStream<'_>) -> Result<Query> {
    if ts.peek() == Some(&Tok::LParen) {
        ts.next();
        let inner = parse_query_inner(ts)?;
        ts.expect(&Tok::RParen, ")")?;
        return Ok(inner);
    }
    if matches!(ts.peek(), Some(Tok::Ident(s)) if !is_keyword(s))
        && ts.peek2() == Some(&Tok::LParen)
    {
        return Ok(Query::Atom(parse_atom(ts)?));
    }
    let left = parse_term(ts)?;
    let op = parse_cmp_op(ts)?;
    let right = parse_term(ts)?;
    Ok(Query::Cmp(left, op, right))
}

fn write_value(out: &mut String, value: &Value) {
    match value {
        Value::Rat(_) => out.push_str(&value.to_string()),
        Value::Const(c) => {
            out.push('\'');
            out.push_str(c);
            out.push('\'');
        }
    }
}

fn write_term(out: &mut String, term: &Term) {
    match term {
        Term::Var(v) => out.push_str(v),
        Term::Lit(value) => write_value(out, value),
    }
}

fn write_fact(out: &mut String, fact: &Fact) {
    out.push_str(&fact.relation);
    out.push('(');
    for (i, arg) in fact.args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_value(out, arg);
    }
    out.push(')');
}

fn write_atom(out: &mut String, atom: &Atom) {
    out.push_str(&atom.relation);
    out.push('(');
    for (i, term) in atom.terms.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(out, term);
    }
    out.push(')');
}

fn guard_prec(g: &BuiltinFormula) -> u8 {
    match g {
        BuiltinFormula::Or(_) => 1,
        BuiltinFormula::And(_) => 2,
        BuiltinFormula::Not(_) => 3,
        BuiltinFormula::True | BuiltinFormula::Cmp(..) => 4,
    }
}

fn write_guard(out: &mut String, g: &BuiltinFormula, min: u8) {
    let wrap = guard_prec(g) < min;
    if wrap {
        out.push('(');
    }
    match g {
        BuiltinFormula::True => out.push_str("TRUE"),
        BuiltinFormula::Cmp(a, op, b) => {
            write_term(out, a);
            out.push_str(&format!(" {op} "));
            write_term(out, b);
        }
        BuiltinFormula::Not(inner) => {
            out.push_str("NOT ");
            write_guard(out, inner, 3);
        }
        BuiltinFormula::And(parts) if parts.is_empty() => out.push_str("TRUE"),
        BuiltinFormula::And(parts) => {
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" AND ");
                }
                write_guard(out, part, 3);
            }
        }
        BuiltinFormula::Or(parts) if parts.is_empty() => out.push_str("NOT TRUE"),
        BuiltinFormula::Or(parts) => {
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" OR ");
                }
                write_guard(out, part, 2);
            }
        }
    }
    if wrap {
        out.push(')');
    }
}

fn query_prec(q: &Query) -> u8 {
    match q {
        Query::Exists(..) | Query::Forall(..) => 0,
        Query::Or(_) => 1,
        Query::And(_) => 2,
        Query::Not(_) => 3,
        Query::Atom(_) | Query::Cmp(..) => 4,
    }
}

fn write_query(out: &mut String, q: &Query, min: u8) {
    match q {
        Query::And(parts) if parts.is_empty() => return out.push_str("1 = 1"),
        Query::Or(parts) if parts.is_empty() => return out.push_str("1 != 1"),
        Query::And(parts) | Query::Or(parts) if parts.len() == 1 => {
            return write_query(out, &parts[0], min)
        }
        Query::Exists(vars, body) | Query::Forall(vars, body) if vars.is_empty() => {
            return write_query(out, body, min)
        }
        _ => {}
    }
    let wrap = query_prec(q) < min;
    if wrap {
        out.push('(');
    }
    match q {
        Query::Atom(atom) => write_atom(out, atom),
        Query::Cmp(a, op, b) => {
            write_term(out, a);
            out.push_str(&format!(" {op} "));
            write_term(out, b);
        }
        Query::Not(inner) => {
            out.push_str("NOT ");
            write_query(out, inner, 3);
        }
        Query::And(parts) => {
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" AND ");
                }
                write_query(out, part, 3);
            }
        }
        Query::Or(parts) => {
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" OR ");
                }
                write_query(out, part, 2);
            }
        }
        Query::Exists(vars, body) | Query::Forall(vars, body) => {
            out.push_str(if matches!(q, Query::Exists(..)) { "EXISTS " } else { "FORALL " });
            out.push_str(&vars.join(", "));
            out.push_str(" . ");
            write_query(out, body, 0);
        }
    }
    if wrap {
        out.push(')');
    }
}

/// Prints a query in the grammar [`parse_query`] reads.
pub fn serialize_query(query: &Query) -> String {
    let mut out = String::new();
    write_query(&mut out, query, 0);
    out
}

/// Prints a database file in the grammar [`parse_database`] reads:
/// relations, then constraints, then facts, then priority pairs.
pub fn serialize_database(
    schema: &Schema,
    instance: &Instance,
    constraints: &[Constraint],
    priority_pairs: &[(Fact, Fact)],
) -> String {
    let mut out = String::new();
    for name in schema.relation_names() {
        out.push_str("relation ");
        out.push_str(name);
        out.push('(');
        for (i, a) in schema.attributes(name).expect("listed relation exists").iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{}: {}", a.name, a.domain));
        }
        out.push_str(")\n");
    }
    for constraint in constraints {
        match constraint {
            Constraint::Fd(fd) => {
                out.push_str(&format!(
                    "FD {}: {} -> {};\n",
                    fd.relation,
                    fd.lhs.join(", "),
                    fd.rhs.join(", ")
                ));
            }
            Constraint::Denial(dc) => {
                out.push_str("DENIAL [");
                for (i, atom) in dc.atoms.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_atom(&mut out, atom);
                }
                out.push(']');
                if dc.guard != BuiltinFormula::True {
                    out.push_str(" WHERE ");
                    write_guard(&mut out, &dc.guard, 0);
                }
                out.push_str(";\n");
            }
        }
    }
    for fact in instance {
        write_fact(&mut out, fact);
        out.push('\n');
    }
    for (better, worse) in priority_pairs {
        write_fact(&mut out, better);
        out.push_str(" > ");
        write_fact(&mut out, worse);
        out.push('\n');
    }
    out
}

fn parse_dimacs_lines(lines: &[(usize, &str)]) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = lines.last().map_or(1, |(l, _)| *l);
    for &(line, raw) in lines {
        let text = raw.trim();
        if text.is_empty() || text.starts_with('c') {
            continue;
        }
        last_line = line;
        if text.starts_with('p') {
            if header.is_some() {
                return Err(perr(line, "duplicate p cnf header"));
            }
            let parts: Vec<&str> = text.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", vars, clause_count] => {
                    vars.parse::<usize>().ok().zip(clause_count.parse::<usize>().ok())
                }
                _ => None,
            };
            match parsed {
                Some(pair) => header = Some(pair),
                None => return Err(perr(line, "malformed header, expected p cnf <vars> <clauses>")),
            }
            continue;
        }
        let (num_vars, _) =
            header.ok_or_else(|| perr(line, "clause line before the p cnf header"))?;
        for word in text.split_whitespace() {
            let lit: i64 = word
                .parse()
                .map_err(|_| perr(line, format!("expected a literal, found {word}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(perr(
                        line,
                        format!("literal {lit} is out of range for {num_vars} variables"),
                    ));
                }
                current.push(lit);
            }
        }
    }
    let (num_vars, declared) =
        header.ok_or_else(|| perr(1, "missing p cnf header"))?;
    if !current.is_empty() {
        return Err(perr(last_line, "unterminated clause, missing 0"));
    }
    if clauses.len() != declared {
        return Err(perr(
            last_line,
            format!("header declares {declared} clauses, found {}", clauses.len()),
        ));
    }
    Ok(Cnf { num_vars, clauses })
}

/// Parses a DIMACS CNF file.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    parse_dimacs_lines(&lines)
}

/// Prints a formula in the format [`parse_dimacs`] reads.
pub fn serialize_dimacs(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for clause in &cnf.clauses {
        for lit in clause {
            out.push_str(&format!("{lit} "));
        }
        out.push_str("0\n");
    }
    out
}

/// Parses the quantified variant: a `u <count>` line, then DIMACS CNF.
pub fn parse_qdimacs(text: &str) -> Result<Qbf> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let mut split = None;
    for (idx, &(line, raw)) in lines.iter().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match parts.as_slice() {
            ["u", count] => match count.parse::<usize>() {
                Ok(n) => split = Some((idx, n)),
                Err(_) => return Err(perr(line, format!("expected a count after u, found {count}"))),
            },
            _ => return Err(perr(line, "expected a leading u <count> line")),
        }
        break;
    }
    let (idx, num_universals) =
        split.ok_or_else(|| perr(1, "expected a leading u <count> line"))?;
    let cnf = parse_dimacs_lines(&lines[idx + 1..])?;
    if num_universals > cnf.num_vars {
        return Err(perr(
            lines[idx].0,
            format!(
                "u declares {num_universals} universal variables, only {} variables total",
                cnf.num_vars
            ),
        ));
    }
    Ok(Qbf {
        num_universals,
        num_existentials: cnf.num_vars - num_universals,
        clauses: cnf.clauses,
    })
}

/// Prints a formula in the format [`parse_qdimacs`] reads.
pub fn serialize_qdimacs(qbf: &Qbf) -> String {
    let mut out = format!("u {}\n", qbf.num_universals);
    out.push_str(&serialize_dimacs(&Cnf {
        num_vars: qbf.num_vars(),
        clauses: qbf.clauses.clone(),
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1, example2, fig5};
    use crate::generators::{
        counter_instance, random_cnf, random_ground_cnf_query, random_pieces, random_qbf,
        sat_reduction, RandomProfile,
    };

    fn parse_ok(text: &str) -> ParsedDatabase {
        parse_database(text).expect("database parses")
    }

    fn err_line(result: Result<impl std::fmt::Debug>) -> (usize, String) {
        match result {
            Err(Error::Parse { line, message }) => (line, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn relation_declarations_define_typed_attributes() {
        let db = parse_ok("relation Emp(Name: constant, Salary: rational)");
        let attrs = db.schema.attributes("Emp").unwrap();
        assert_eq!(attrs.len(), 2);
        assert_eq!(attrs[0].name, "Name");
        assert_eq!(attrs[0].domain, Domain::Constant);
        assert_eq!(attrs[1].domain, Domain::Rational);
    }

    #[test]
    fn fact_values_cover_quoted_bare_integer_fraction_and_decimal() {
        let db = parse_ok(
            "relation R(A: constant, B: rational, C: rational, D: rational)\n\
             R('a b', 3, 2/4, 0.25)\n\
             R(bare, -3, -1/2, 12.5)\n",
        );
        let facts: Vec<&Fact> = db.instance.iter().collect();
        assert_eq!(facts.len(), 2);
        let bare = Fact::new(
            "R",
            vec![Value::constant("bare"), Value::int(-3), Value::ratio(-1, 2), Value::ratio(25, 2)],
        );
        let quoted = Fact::new(
            "R",
            vec![Value::constant("a b"), Value::int(3), Value::ratio(1, 2), Value::ratio(1, 4)],
        );
        assert!(db.instance.contains(&bare));
        assert!(db.instance.contains(&quoted));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let db = parse_ok(
            "# header comment\n\
             relation R(A: rational)   # trailing comment\n\
             \n\
             R(1) # a fact\n",
        );
        assert_eq!(db.instance.len(), 1);
    }

    #[test]
    fn hash_inside_a_quoted_constant_is_literal() {
        let db = parse_ok("relation R(A: constant)\nR('#1')\n");
        assert!(db.instance.contains(&Fact::new("R", vec![Value::constant("#1")])));
    }

    #[test]
    fn functional_dependencies_allow_lists_on_both_sides() {
        let db = parse_ok(
            "relation R(A: rational, B: rational, C: rational, D: rational)\n\
             FD R: A, B -> C, D;\n",
        );
        assert_eq!(
            db.constraints,
            vec![Constraint::Fd(FunctionalDependency::new("R", ["A", "B"], ["C", "D"]))]
        );
    }

    #[test]
    fn denial_without_where_gets_the_true_guard() {
        let db = parse_ok(
            "relation R(A: rational)\n\
             relation S(A: rational)\n\
             DENIAL [R(x), S(x)];\n",
        );
        match &db.constraints[0] {
            Constraint::Denial(dc) => {
                assert_eq!(dc.atoms.len(), 2);
                assert_eq!(dc.guard, BuiltinFormula::True);
            }
            other => panic!("expected a denial, got {other:?}"),
        }
    }

    #[test]
    fn guard_connectives_bind_not_then_and_then_or() {
        let db = parse_ok(
            "relation R(A: rational, B: rational, C: rational)\n\
             DENIAL [R(x, y, z)] WHERE x = 1 OR y = 2 AND NOT z = 3;\n",
        );
        let expected = BuiltinFormula::Or(vec![
            BuiltinFormula::Cmp(Term::var("x"), CmpOp::Eq, Term::Lit(Value::int(1))),
            BuiltinFormula::And(vec![
                BuiltinFormula::Cmp(Term::var("y"), CmpOp::Eq, Term::Lit(Value::int(2))),
                BuiltinFormula::Not(Box::new(BuiltinFormula::Cmp(
                    Term::var("z"),
                    CmpOp::Eq,
                    Term::Lit(Value::int(3)),
                ))),
            ]),
        ]);
        match &db.constraints[0] {
            Constraint::Denial(dc) => assert_eq!(dc.guard, expected),
            other => panic!("expected a denial, got {other:?}"),
        }
    }

    #[test]
    fn parenthesized_guards_override_precedence() {
        let db = parse_ok(
            "relation R(A: rational, B: rational)\n\
             DENIAL [R(x, y)] WHERE NOT (x = 1 OR y = 2);\n",
        );
        let expected = BuiltinFormula::Not(Box::new(BuiltinFormula::Or(vec![
            BuiltinFormula::Cmp(Term::var("x"), CmpOp::Eq, Term::Lit(Value::int(1))),
            BuiltinFormula::Cmp(Term::var("y"), CmpOp::Eq, Term::Lit(Value::int(2))),
        ])));
        match &db.constraints[0] {
            Constraint::Denial(dc) => assert_eq!(dc.guard, expected),
            other => panic!("expected a denial, got {other:?}"),
        }
    }

    #[test]
    fn priority_lines_read_left_wins_over_right() {
        let db = parse_ok(
            "relation R(A: rational)\n\
             R(1)\n\
             R(2)\n\
             R(1) > R(2)\n",
        );
        assert_eq!(db.instance.len(), 2);
        assert_eq!(
            db.priority_pairs,
            vec![(Fact::new("R", vec![Value::int(1)]), Fact::new("R", vec![Value::int(2)]))]
        );
    }

    #[test]
    fn errors_carry_the_offending_line_number() {
        let cases: Vec<(&str, usize, &str)> = vec![
            ("relation R(A: rational)\nR(1, 2)\n", 2, "arity"),
            ("relation R(A: rational)\nS(1)\n", 2, "unknown relation"),
            ("R(1)\n", 1, "unknown relation"),
            ("relation R(A: rational)\nrelation R(B: rational)\n", 2, "declared twice"),
            ("relation R(A: rational, A: constant)\n", 1, "repeats attribute"),
            ("relation R(A: rational)\nR('x')\n", 2, "expects a rational"),
            ("relation R(A: rational)\nFD R: A -> B;\n", 2, "no attribute B"),
            ("relation R(A: rational)\nFD S: A -> A;\n", 2, "unknown relation S"),
            ("relation R(A: rational)\nFD R: A -> A\n", 2, "expected ;"),
            ("relation R(A: rational)\n\nR('unterminated\n", 3, "unterminated constant"),
            ("relation R(A: rational)\nR(1) R(2)\n", 2, "expected end of line"),
            ("relation R(A: rational)\nR(1/0)\n", 2, "zero denominator"),
            ("relation R(A: rational)\nDENIAL [R(x), R(x)] WHERE y = 1;\n", 2, "y"),
            ("relation FD(A: rational)\n", 1, "reserved word"),
        ];
        for (text, want_line, want_fragment) in cases {
            let (line, message) = err_line(parse_database(text));
            assert_eq!(line, want_line, "wrong line for {text:?}: {message}");
            assert!(
                message.contains(want_fragment),
                "message {message:?} misses {want_fragment:?} for {text:?}"
            );
        }
    }

    #[test]
    fn fact_lines_parse_against_a_given_schema() {
        let db = parse_ok("relation R(A: rational)\n");
        let facts = parse_fact_lines("# kept\nR(1)\n\nR(2)\n", &db.schema).unwrap();
        assert_eq!(facts.len(), 2);
        let (line, message) = err_line(parse_fact_lines("R(1)\nS(2)\n", &db.schema));
        assert_eq!(line, 2);
        assert!(message.contains("unknown relation"));
        let (line, _) = err_line(parse_fact_lines("R(1) > R(2)\n", &db.schema));
        assert_eq!(line, 1);
    }

    #[test]
    fn spec_shaped_query_parses_with_the_conjunction_inside_the_quantifier() {
        let q = parse_query("EXISTS x, y . Emp('John', x, y) AND x > 60000").unwrap();
        let expected = Query::Exists(
            vec!["x".into(), "y".into()],
            Box::new(Query::And(vec![
                Query::Atom(Atom::new(
                    "Emp",
                    vec![Term::Lit(Value::constant("John")), Term::var("x"), Term::var("y")],
                )),
                Query::Cmp(Term::var("x"), CmpOp::Gt, Term::Lit(Value::int(60000))),
            ])),
        );
        assert_eq!(q, expected);
    }

    #[test]
    fn query_connectives_bind_not_then_and_then_or() {
        let q = parse_query("x = 1 OR y = 2 AND NOT z = 3").unwrap();
        let expected = Query::Or(vec![
            Query::Cmp(Term::var("x"), CmpOp::Eq, Term::Lit(Value::int(1))),
            Query::And(vec![
                Query::Cmp(Term::var("y"), CmpOp::Eq, Term::Lit(Value::int(2))),
                Query::Not(Box::new(Query::Cmp(
                    Term::var("z"),
                    CmpOp::Eq,
                    Term::Lit(Value::int(3)),
                ))),
            ]),
        ]);
        assert_eq!(q, expected);
    }

    #[test]
    fn connective_chains_parse_as_single_nary_nodes() {
        let q = parse_query("R(1) AND R(2) AND R(3)").unwrap();
        match q {
            Query::And(parts) => assert_eq!(parts.len(), 3),
            other => panic!("expected a flat conjunction, got {other:?}"),
        }
    }

    #[test]
    fn quantifier_bodies_extend_right_and_parens_limit_them() {
        let wide = parse_query("FORALL x . R(x) OR S(x)").unwrap();
        match wide {
            Query::Forall(vars, body) => {
                assert_eq!(vars, vec!["x".to_string()]);
                assert!(matches!(*body, Query::Or(_)));
            }
            other => panic!("expected a universal quantifier, got {other:?}"),
        }
        let narrow = parse_query("(FORALL x . R(x)) OR S(1)").unwrap();
        assert!(matches!(narrow, Query::Or(_)));
    }

    #[test]
    fn nested_quantifiers_parse_inside_connectives_with_parens() {
        let q = parse_query("(EXISTS x . R(x)) AND (FORALL y . S(y))").unwrap();
        match q {
            Query::And(parts) => {
                assert!(matches!(parts[0], Query::Exists(..)));
                assert!(matches!(parts[1], Query::Forall(..)));
            }
            other => panic!("expected a conjunction, got {other:?}"),
        }
    }

    #[test]
    fn query_errors_name_the_unexpected_token() {
        let cases = vec![
            ("", "empty query"),
            ("EXISTS . R(1)", "expected a variable name"),
            ("EXISTS x R(1)", "expected ."),
            ("R(1) AND", "end of input"),
            ("R(1", "expected ) or ,"),
            ("x = ", "expected a term"),
            ("NOT", "expected a term"),
            ("x > 1 OR AND y = 2", "AND is a reserved word"),
            ("EXISTS TRUE . R(1)", "reserved word"),
        ];
        for (text, fragment) in cases {
            let (_, message) = err_line(parse_query(text));
            assert!(message.contains(fragment), "message {message:?} misses {fragment:?} for {text:?}");
        }
    }

    #[test]
    fn query_round_trips_preserve_structure() {
        let samples = [
            "EXISTS x, y . Emp('John', x, y) AND x > 60000",
            "FORALL x . NOT R(x) OR (EXISTS y . S(x, y) AND y != x)",
            "NOT NOT R(1)",
            "R(1) AND (R(2) OR R(3)) AND NOT (R(4) AND R(5))",
            "(x = 1 OR y = 2) AND (x = 1 OR z >= 3/2)",
            "R('a', -1, 1/3) OR 2 < x AND x <= 2.5",
            "FORALL x . FORALL y . R(x, y)",
        ];
        for text in samples {
            let once = parse_query(text).unwrap();
            let printed = serialize_query(&once);
            let twice = parse_query(&printed).unwrap();
            assert_eq!(once, twice, "round trip changed {text:?} via {printed:?}");
        }
    }

    #[test]
    fn degenerate_connectives_print_as_equivalent_normal_forms() {
        assert_eq!(serialize_query(&Query::And(vec![])), "1 = 1");
        assert_eq!(serialize_query(&Query::Or(vec![])), "1 != 1");
        let single = Query::And(vec![Query::Cmp(
            Term::Lit(Value::int(1)),
            CmpOp::Eq,
            Term::Lit(Value::int(1)),
        )]);
        assert_eq!(serialize_query(&single), "1 = 1");
        let empty_quant = Query::Exists(vec![], Box::new(single.clone()));
        assert_eq!(serialize_query(&empty_quant), "1 = 1");
    }

    #[test]
    fn fixture_databases_round_trip_through_the_serializer() {
        let fx1 = example1();
        let fx2 = example2();
        let fx5 = fig5();
        let cases: Vec<(Schema, Instance, Vec<Constraint>, Vec<(Fact, Fact)>)> = vec![
            (fx1.schema, fx1.instance, fx1.constraints, example1().priority_pairs()),
            (fx2.schema, fx2.instance, fx2.constraints, example2().priority_pairs()),
            (fx5.schema, fx5.instance, fx5.constraints, fig5().priority_pairs()),
        ];
        for (schema, instance, constraints, pairs) in cases {
            let text = serialize_database(&schema, &instance, &constraints, &pairs);
            let parsed = parse_ok(&text);
            assert_eq!(parsed.schema, schema);
            assert_eq!(parsed.instance, instance);
            assert_eq!(parsed.constraints, constraints);
            assert_eq!(parsed.priority_pairs, pairs);
        }
    }

    #[test]
    fn parsed_databases_build_working_contexts() {
        let fx = example1();
        let text = serialize_database(
            &fx.schema,
            &fx.instance,
            &fx.constraints,
            &fx.priority_pairs(),
        );
        let ctx = parse_ok(&text).context(PriorityMode::Strict).unwrap();
        let repairs = ctx.all_repairs(100).unwrap();
        assert_eq!(repairs.len(), 3);
    }

    #[test]
    fn random_databases_and_queries_round_trip() {
        let profile = RandomProfile {
            max_facts: 10,
            max_relations: 3,
            priority_percent: 60,
            with_denials: true,
        };
        for seed in 0..40 {
            let pieces = random_pieces(seed, &profile).unwrap();
            let text = serialize_database(
                &pieces.schema,
                &pieces.instance,
                &pieces.constraints,
                &pieces.priority_pairs,
            );
            let parsed = parse_ok(&text);
            assert_eq!(parsed.schema, pieces.schema, "seed {seed}");
            assert_eq!(parsed.instance, pieces.instance, "seed {seed}");
            assert_eq!(parsed.constraints, pieces.constraints, "seed {seed}");
            assert_eq!(parsed.priority_pairs, pieces.priority_pairs, "seed {seed}");
            if pieces.instance.is_empty() {
                continue;
            }
            let query = random_ground_cnf_query(seed, &pieces.instance, 3, 3);
            let once = parse_query(&serialize_query(&query)).unwrap();
            let twice = parse_query(&serialize_query(&once)).unwrap();
            assert_eq!(once, twice, "seed {seed}");
        }
    }

    #[test]
    fn counter_instances_round_trip_for_small_sizes() {
        for n in 1..=4 {
            let pieces = counter_instance(n).unwrap().pieces;
            let text = serialize_database(
                &pieces.schema,
                &pieces.instance,
                &pieces.constraints,
                &pieces.priority_pairs,
            );
            let parsed = parse_ok(&text);
            assert_eq!(parsed.instance, pieces.instance, "n = {n}");
            assert_eq!(parsed.priority_pairs, pieces.priority_pairs, "n = {n}");
        }
    }

    #[test]
    fn dimacs_parses_comments_header_and_clauses() {
        let text = "c a comment\np cnf 3 2\n1 -2 0\nc inline\n-1 2 3 0\n";
        let cnf = parse_dimacs(text).unwrap();
        assert_eq!(cnf.num_vars, 3);
        assert_eq!(cnf.clauses, vec![vec![1, -2], vec![-1, 2, 3]]);
    }

    #[test]
    fn dimacs_accepts_clauses_split_across_lines_and_empty_clauses() {
        let cnf = parse_dimacs("p cnf 2 2\n1\n2 0\n0\n").unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, 2], vec![]]);
    }

    #[test]
    fn dimacs_errors_are_line_precise() {
        let cases = vec![
            ("1 2 0\n", 1, "before the p cnf header"),
            ("p cnf 2\n1 0\n", 1, "malformed header"),
            ("p cnf 2 1\np cnf 2 1\n1 0\n", 2, "duplicate"),
            ("p cnf 2 1\n1 x 0\n", 2, "found x"),
            ("p cnf 2 1\n3 0\n", 2, "out of range"),
            ("p cnf 2 1\n1 2\n", 2, "missing 0"),
            ("p cnf 2 2\n1 0\n", 2, "declares 2 clauses, found 1"),
            ("c only comments\n", 1, "missing p cnf header"),
        ];
        for (text, want_line, fragment) in cases {
            let (line, message) = err_line(parse_dimacs(text));
            assert_eq!(line, want_line, "wrong line for {text:?}: {message}");
            assert!(message.contains(fragment), "message {message:?} misses {fragment:?}");
        }
    }

    #[test]
    fn qdimacs_splits_variables_into_universal_and_existential_blocks() {
        let qbf = parse_qdimacs("c q\nu 2\np cnf 5 1\n1 -3 5 0\n").unwrap();
        assert_eq!(qbf.num_universals, 2);
        assert_eq!(qbf.num_existentials, 3);
        assert_eq!(qbf.clauses, vec![vec![1, -3, 5]]);
    }

    #[test]
    fn qdimacs_errors_cover_the_u_line() {
        let (line, message) = err_line(parse_qdimacs("p cnf 2 1\n1 2 0\n"));
        assert_eq!((line, message.contains("u <count>")), (1, true));
        let (line, message) = err_line(parse_qdimacs("u many\np cnf 2 1\n1 2 0\n"));
        assert_eq!((line, message.contains("found many")), (1, true));
        let (line, message) = err_line(parse_qdimacs("u 3\np cnf 2 1\n1 2 0\n"));
        assert_eq!((line, message.contains("only 2 variables")), (1, true));
        let (line, _) = err_line(parse_qdimacs("u 1\np cnf 2 1\n1 2\n"));
        assert_eq!(line, 3);
    }

    #[test]
    fn dimacs_and_qdimacs_round_trip() {
        let cnf = Cnf { num_vars: 4, clauses: vec![vec![1, -2, 3], vec![-4], vec![]] };
        assert_eq!(parse_dimacs(&serialize_dimacs(&cnf)).unwrap(), cnf);
        let qbf = Qbf { num_universals: 2, num_existentials: 2, clauses: vec![vec![1, -3, 4]] };
        assert_eq!(parse_qdimacs(&serialize_qdimacs(&qbf)).unwrap(), qbf);
    }

    #[test]
    fn generated_formulas_and_reduction_pieces_round_trip() {
        for seed in 0..10 {
            let cnf = random_cnf(seed, 4, 4);
            assert_eq!(parse_dimacs(&serialize_dimacs(&cnf)).unwrap(), cnf, "seed {seed}");
            let qbf = random_qbf(seed, 2, 2, 3);
            assert_eq!(parse_qdimacs(&serialize_qdimacs(&qbf)).unwrap(), qbf, "seed {seed}");
        }
        let cnf = Cnf { num_vars: 2, clauses: vec![vec![1, -2], vec![-1, 2]] };
        let reduction = sat_reduction(&cnf).unwrap();
        let pieces = &reduction.pieces;
        let text = serialize_database(
            &pieces.schema,
            &pieces.instance,
            &pieces.constraints,
            &pieces.priority_pairs,
        );
        let parsed = parse_ok(&text);
        assert_eq!(parsed.instance, pieces.instance);
        assert_eq!(parsed.constraints, pieces.constraints);
        assert_eq!(parsed.priority_pairs, pieces.priority_pairs);
        let once = parse_query(&serialize_query(&reduction.query)).unwrap();
        let twice = parse_query(&serialize_query(&once)).unwrap();
        assert_eq!(once, twice);
    }
}
