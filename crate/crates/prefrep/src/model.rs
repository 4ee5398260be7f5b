//! Core data model: values, facts, instances, schemas, constraints and
//! queries.
//!
//! All numeric data is kept as exact arbitrary-precision rationals. Values
//! have a total order (rationals first, then constants lexicographically)
//! which, together with the relation name, gives the global fact order used
//! everywhere determinism matters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::BigRational;
use num::bigint::BigInt;

use crate::error::{Error, Result};

/// A database value: an exact rational or an uninterpreted constant.
///
/// The derived order puts every rational before every constant; rationals
/// compare numerically and constants lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Rat(BigRational),
    Const(String),
}

impl Value {
    /// Integer-valued rational.
    pub fn int(n: i64) -> Value {
        Value::Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// Rational `p/q`. Panics if `q` is zero.
    pub fn ratio(p: i64, q: i64) -> Value {
        Value::Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn constant(s: impl Into<String>) -> Value {
        Value::Const(s.into())
    }

    pub fn domain(&self) -> Domain {
        match self {
            Value::Rat(_) => Domain::Rational,
            Value::Const(_) => Domain::Constant,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Value::Const(s) => write!(f, "{s}"),
        }
    }
}

/// Attribute domains. Cross-domain comparisons are type errors, never a
/// silent false.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Rational,
    Constant,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Rational => write!(f, "rational"),
            Domain::Constant => write!(f, "constant"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub domain: Domain,
}

/// Relation names mapped to their attribute lists. Arities are at least one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schema {
    relations: BTreeMap<String, Vec<Attribute>>,
}

impl Schema {
    pub fn new() -> Schema {
        Schema::default()
    }

    pub fn add_relation(&mut self, name: impl Into<String>, attrs: Vec<Attribute>) -> Result<()> {
        let name = name.into();
        if attrs.is_empty() {
            return Err(Error::Input(format!("relation {name} must have arity at least 1")));
        }
        let mut seen = BTreeSet::new();
        for a in &attrs {
            if !seen.insert(a.name.clone()) {
                return Err(Error::Input(format!(
                    "relation {name} repeats attribute {}",
                    a.name
                )));
            }
        }
        if self.relations.insert(name.clone(), attrs).is_some() {
            return Err(Error::Input(format!("relation {name} declared twice")));
        }
        Ok(())
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(|s| s.as_str())
    }

    pub fn attributes(&self, relation: &str) -> Option<&[Attribute]> {
        self.relations.get(relation).map(|v| v.as_slice())
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.relations.get(relation).map(|v| v.len())
    }

    pub fn attribute_position(&self, relation: &str, attr: &str) -> Option<usize> {
        self.relations
            .get(relation)?
            .iter()
            .position(|a| a.name == attr)
    }

    /// Checks arity and per-position domains of a fact.
    pub fn validate_fact(&self, fact: &Fact) -> Result<()> {
        let attrs = self
            .attributes(&fact.relation)
            .ok_or_else(|| Error::Input(format!("unknown relation {}", fact.relation)))?;
        if attrs.len() != fact.args.len() {
            return Err(Error::Input(format!(
                "fact {fact} has arity {}, relation {} has arity {}",
                fact.args.len(),
                fact.relation,
                attrs.len()
            )));
        }
        for (value, attr) in fact.args.iter().zip(attrs) {
            if value.domain() != attr.domain {
                return Err(Error::Input(format!(
                    "fact {fact}: attribute {} expects a {} value, got {value}",
                    attr.name, attr.domain
                )));
            }
        }
        Ok(())
    }

    pub fn validate_instance(&self, instance: &Instance) -> Result<()> {
        for fact in instance {
            self.validate_fact(fact)?;
        }
        Ok(())
    }
}

/// Convenience constructor for schema attribute lists.
pub fn attr(name: impl Into<String>, domain: Domain) -> Attribute {
    Attribute { name: name.into(), domain }
}

/// A ground tuple of a named relation.
///
/// The derived order (relation name, then argument tuple) is the global fact
/// order: it is total, and used for deterministic iteration and as the
/// default choice order in repair construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub relation: String,
    pub args: Vec<Value>,
}

impl Fact {
    pub fn new(relation: impl Into<String>, args: Vec<Value>) -> Fact {
        Fact { relation: relation.into(), args }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, v) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A database instance is a set of facts; the empty instance is consistent
/// under every constraint set.
pub type Instance = BTreeSet<Fact>;

/// A term in a constraint or query: a variable or a literal value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Lit(Value),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Lit(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn is_order(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge)
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        };
        write!(f, "{s}")
    }
}

/// Compares two values. Equality requires both sides in the same domain and
/// order comparisons require rationals on both sides; anything else is a
/// type error.
pub fn compare_values(a: &Value, b: &Value, op: CmpOp) -> Result<bool> {
    match (a, b) {
        (Value::Rat(x), Value::Rat(y)) => Ok(match op {
            CmpOp::Eq => x == y,
            CmpOp::Ne => x != y,
            CmpOp::Lt => x < y,
            CmpOp::Le => x <= y,
            CmpOp::Gt => x > y,
            CmpOp::Ge => x >= y,
        }),
        (Value::Const(x), Value::Const(y)) => match op {
            CmpOp::Eq => Ok(x == y),
            CmpOp::Ne => Ok(x != y),
            _ => Err(Error::Type(format!(
                "order comparison {x} {op} {y} on constants"
            ))),
        },
        _ => Err(Error::Type(format!(
            "comparison {a} {op} {b} mixes a rational and a constant"
        ))),
    }
}

/// Quantifier-free formula over terms, used as the guard of a denial
/// constraint. `And` of an empty list is true, `Or` of an empty list false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinFormula {
    True,
    Cmp(Term, CmpOp, Term),
    Not(Box<BuiltinFormula>),
    And(Vec<BuiltinFormula>),
    Or(Vec<BuiltinFormula>),
}

impl BuiltinFormula {
    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            BuiltinFormula::True => {}
            BuiltinFormula::Cmp(a, _, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            BuiltinFormula::Not(inner) => inner.variables(out),
            BuiltinFormula::And(fs) | BuiltinFormula::Or(fs) => {
                for f in fs {
                    f.variables(out);
                }
            }
        }
    }

    /// Evaluates under a full assignment of the guard's variables.
    pub fn eval(&self, env: &BTreeMap<String, Value>) -> Result<bool> {
        match self {
            BuiltinFormula::True => Ok(true),
            BuiltinFormula::Cmp(a, op, b) => {
                let va = resolve(a, env)?;
                let vb = resolve(b, env)?;
                compare_values(va, vb, *op)
            }
            BuiltinFormula::Not(inner) => Ok(!inner.eval(env)?),
            BuiltinFormula::And(fs) => {
                for f in fs {
                    if !f.eval(env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            BuiltinFormula::Or(fs) => {
                for f in fs {
                    if f.eval(env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Three-valued evaluation under a partial assignment: `None` when the
    /// truth value still depends on unbound variables. Used to prune
    /// constraint matching early.
    pub fn partial_eval(&self, env: &BTreeMap<String, Value>) -> Result<Option<bool>> {
        match self {
            BuiltinFormula::True => Ok(Some(true)),
            BuiltinFormula::Cmp(a, op, b) => match (try_resolve(a, env), try_resolve(b, env)) {
                (Some(va), Some(vb)) => compare_values(va, vb, *op).map(Some),
                _ => Ok(None),
            },
            BuiltinFormula::Not(inner) => Ok(inner.partial_eval(env)?.map(|b| !b)),
            BuiltinFormula::And(fs) => {
                let mut unknown = false;
                for f in fs {
                    match f.partial_eval(env)? {
                        Some(false) => return Ok(Some(false)),
                        Some(true) => {}
                        None => unknown = true,
                    }
                }
                Ok(if unknown { None } else { Some(true) })
            }
            BuiltinFormula::Or(fs) => {
                let mut unknown = false;
                for f in fs {
                    match f.partial_eval(env)? {
                        Some(true) => return Ok(Some(true)),
                        Some(false) => {}
                        None => unknown = true,
                    }
                }
                Ok(if unknown { None } else { Some(false) })
            }
        }
    }
}

fn resolve<'a>(t: &'a Term, env: &'a BTreeMap<String, Value>) -> Result<&'a Value> {
    match t {
        Term::Lit(v) => Ok(v),
        Term::Var(name) => env
            .get(name)
            .ok_or_else(|| Error::Argument(format!("unbound variable {name}"))),
    }
}

fn try_resolve<'a>(t: &'a Term, env: &'a BTreeMap<String, Value>) -> Option<&'a Value> {
    match t {
        Term::Lit(v) => Some(v),
        Term::Var(name) => env.get(name),
    }
}

/// A relational atom with variable or literal arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(relation: impl Into<String>, terms: Vec<Term>) -> Atom {
        Atom { relation: relation.into(), terms }
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        for t in &self.terms {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// A denial constraint: it forbids any match of all atoms (sharing variables)
/// whose guard evaluates to true. A fact set matching the atoms
/// non-injectively is a legal, smaller conflict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenialConstraint {
    pub atoms: Vec<Atom>,
    pub guard: BuiltinFormula,
}

impl DenialConstraint {
    pub fn new(atoms: Vec<Atom>, guard: BuiltinFormula) -> DenialConstraint {
        DenialConstraint { atoms, guard }
    }
}

/// A functional dependency `relation: lhs -> rhs` over attribute names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalDependency {
    pub relation: String,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

impl FunctionalDependency {
    pub fn new(
        relation: impl Into<String>,
        lhs: impl IntoIterator<Item = impl Into<String>>,
        rhs: impl IntoIterator<Item = impl Into<String>>,
    ) -> FunctionalDependency {
        FunctionalDependency {
            relation: relation.into(),
            lhs: lhs.into_iter().map(Into::into).collect(),
            rhs: rhs.into_iter().map(Into::into).collect(),
        }
    }

    /// A key dependency determines every attribute of its relation.
    pub fn is_key(&self, schema: &Schema) -> bool {
        match schema.attributes(&self.relation) {
            None => false,
            Some(attrs) => attrs
                .iter()
                .all(|a| self.lhs.contains(&a.name) || self.rhs.contains(&a.name)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Fd(FunctionalDependency),
    Denial(DenialConstraint),
}

/// Rewrites a functional dependency as a two-atom denial constraint: both
/// atoms share variables on the determining attributes and the guard demands
/// some determined attribute to differ. When the determined attributes are a
/// subset of the determining ones the guard is unsatisfiable and the
/// constraint can never be violated.
pub fn desugar_fd(schema: &Schema, fd: &FunctionalDependency) -> Result<DenialConstraint> {
    let attrs = schema
        .attributes(&fd.relation)
        .ok_or_else(|| Error::Input(format!("unknown relation {} in dependency", fd.relation)))?;
    if fd.rhs.is_empty() {
        return Err(Error::Input(format!(
            "dependency on {} has an empty determined attribute set",
            fd.relation
        )));
    }
    for side in [&fd.lhs, &fd.rhs] {
        for name in side {
            if schema.attribute_position(&fd.relation, name).is_none() {
                return Err(Error::Input(format!(
                    "dependency on {} names unknown attribute {name}",
                    fd.relation
                )));
            }
        }
    }
    let lhs_pos: BTreeSet<usize> = fd
        .lhs
        .iter()
        .map(|n| schema.attribute_position(&fd.relation, n).unwrap())
        .collect();
    let rhs_pos: BTreeSet<usize> = fd
        .rhs
        .iter()
        .map(|n| schema.attribute_position(&fd.relation, n).unwrap())
        .collect();

    let mut terms1 = Vec::with_capacity(attrs.len());
    let mut terms2 = Vec::with_capacity(attrs.len());
    let mut equalities = Vec::new();
    for i in 0..attrs.len() {
        if lhs_pos.contains(&i) {
            terms1.push(Term::var(format!("x{i}")));
            terms2.push(Term::var(format!("x{i}")));
        } else {
            terms1.push(Term::var(format!("y{i}_1")));
            terms2.push(Term::var(format!("y{i}_2")));
            if rhs_pos.contains(&i) {
                equalities.push(BuiltinFormula::Cmp(
                    Term::var(format!("y{i}_1")),
                    CmpOp::Eq,
                    Term::var(format!("y{i}_2")),
                ));
            }
        }
    }
    let guard = if equalities.is_empty() {
        BuiltinFormula::Not(Box::new(BuiltinFormula::True))
    } else {
        BuiltinFormula::Not(Box::new(BuiltinFormula::And(equalities)))
    };
    Ok(DenialConstraint::new(
        vec![
            Atom::new(fd.relation.clone(), terms1),
            Atom::new(fd.relation.clone(), terms2),
        ],
        guard,
    ))
}

/// Desugars every constraint to a denial constraint, validating along the way.
pub fn desugar_constraints(
    schema: &Schema,
    constraints: &[Constraint],
) -> Result<Vec<DenialConstraint>> {
    constraints
        .iter()
        .map(|c| match c {
            Constraint::Fd(fd) => desugar_fd(schema, fd),
            Constraint::Denial(dc) => {
                validate_denial(schema, dc)?;
                Ok(dc.clone())
            }
        })
        .collect()
}

/// Static checks on a denial constraint: known relations, matching arities,
/// literal domains, every guard variable bound by an atom, and guard
/// comparisons well-typed (same domain, and order comparisons on rationals).
pub fn validate_denial(schema: &Schema, dc: &DenialConstraint) -> Result<()> {
    if dc.atoms.is_empty() {
        return Err(Error::Input("denial constraint with no atoms".to_string()));
    }
    let mut var_domains: BTreeMap<String, Domain> = BTreeMap::new();
    for atom in &dc.atoms {
        let attrs = schema
            .attributes(&atom.relation)
            .ok_or_else(|| Error::Input(format!("unknown relation {} in constraint", atom.relation)))?;
        if attrs.len() != atom.terms.len() {
            return Err(Error::Input(format!(
                "atom {atom} has arity {}, relation {} has arity {}",
                atom.terms.len(),
                atom.relation,
                attrs.len()
            )));
        }
        for (term, attr) in atom.terms.iter().zip(attrs) {
            match term {
                Term::Lit(v) => {
                    if v.domain() != attr.domain {
                        return Err(Error::Type(format!(
                            "literal {v} in atom {atom} does not fit {} attribute {}",
                            attr.domain, attr.name
                        )));
                    }
                }
                Term::Var(name) => {
                    if let Some(prev) = var_domains.insert(name.clone(), attr.domain) {
                        if prev != attr.domain {
                            return Err(Error::Type(format!(
                                "variable {name} is used at both rational and constant positions"
                            )));
                        }
                    }
                }
            }
        }
    }
    let mut guard_vars = BTreeSet::new();
    dc.guard.variables(&mut guard_vars);
    for v in &guard_vars {
        if !var_domains.contains_key(v) {
            return Err(Error::Input(format!(
                "guard variable {v} is not bound by any atom"
            )));
        }
    }
    check_guard_types(&dc.guard, &var_domains)
}

fn term_domain(t: &Term, var_domains: &BTreeMap<String, Domain>) -> Option<Domain> {
    match t {
        Term::Lit(v) => Some(v.domain()),
        Term::Var(name) => var_domains.get(name).copied(),
    }
}

fn check_guard_types(g: &BuiltinFormula, var_domains: &BTreeMap<String, Domain>) -> Result<()> {
    match g {
        BuiltinFormula::True => Ok(()),
        BuiltinFormula::Cmp(a, op, b) => {
            let da = term_domain(a, var_domains);
            let db = term_domain(b, var_domains);
            match (da, db) {
                (Some(da), Some(db)) => {
                    if da != db {
                        return Err(Error::Type(format!(
                            "comparison {a} {op} {b} mixes domains {da} and {db}"
                        )));
                    }
                    if op.is_order() && da != Domain::Rational {
                        return Err(Error::Type(format!(
                            "order comparison {a} {op} {b} on constants"
                        )));
                    }
                    Ok(())
                }
                _ => Ok(()),
            }
        }
        BuiltinFormula::Not(inner) => check_guard_types(inner, var_domains),
        BuiltinFormula::And(fs) | BuiltinFormula::Or(fs) => {
            fs.iter().try_for_each(|f| check_guard_types(f, var_domains))
        }
    }
}

/// First-order query over the schema, evaluated under active-domain
/// semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Atom(Atom),
    Cmp(Term, CmpOp, Term),
    Not(Box<Query>),
    And(Vec<Query>),
    Or(Vec<Query>),
    Exists(Vec<String>, Box<Query>),
    Forall(Vec<String>, Box<Query>),
}

impl Query {
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out, &mut BTreeSet::new());
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>, bound: &mut BTreeSet<String>) {
        match self {
            Query::Atom(atom) => {
                for t in &atom.terms {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Query::Cmp(a, _, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Query::Not(inner) => inner.collect_free(out, bound),
            Query::And(qs) | Query::Or(qs) => {
                for q in qs {
                    q.collect_free(out, bound);
                }
            }
            Query::Exists(vars, inner) | Query::Forall(vars, inner) => {
                let fresh: Vec<&String> = vars.iter().filter(|v| bound.insert((*v).clone())).collect();
                inner.collect_free(out, bound);
                for v in fresh {
                    bound.remove(v);
                }
            }
        }
    }

    fn literal_values(&self, out: &mut BTreeSet<Value>) {
        match self {
            Query::Atom(atom) => {
                for t in &atom.terms {
                    if let Term::Lit(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Query::Cmp(a, _, b) => {
                for t in [a, b] {
                    if let Term::Lit(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Query::Not(inner) => inner.literal_values(out),
            Query::And(qs) | Query::Or(qs) => {
                for q in qs {
                    q.literal_values(out);
                }
            }
            Query::Exists(_, inner) | Query::Forall(_, inner) => inner.literal_values(out),
        }
    }
}

/// Checks that a query is closed and structurally valid for the schema.
pub fn validate_query(schema: &Schema, query: &Query) -> Result<()> {
    let free = query.free_variables();
    if !free.is_empty() {
        let names: Vec<String> = free.into_iter().collect();
        return Err(Error::Input(format!(
            "query is not closed, free variables: {}",
            names.join(", ")
        )));
    }
    validate_query_atoms(schema, query)
}

fn validate_query_atoms(schema: &Schema, query: &Query) -> Result<()> {
    match query {
        Query::Atom(atom) => {
            let attrs = schema
                .attributes(&atom.relation)
                .ok_or_else(|| Error::Input(format!("unknown relation {} in query", atom.relation)))?;
            if attrs.len() != atom.terms.len() {
                return Err(Error::Input(format!(
                    "query atom {atom} has arity {}, relation {} has arity {}",
                    atom.terms.len(),
                    atom.relation,
                    attrs.len()
                )));
            }
            for (term, attr) in atom.terms.iter().zip(attrs) {
                if let Term::Lit(v) = term {
                    if v.domain() != attr.domain {
                        return Err(Error::Type(format!(
                            "literal {v} in query atom {atom} does not fit {} attribute {}",
                            attr.domain, attr.name
                        )));
                    }
                }
            }
            Ok(())
        }
        Query::Cmp(..) => Ok(()),
        Query::Not(inner) => validate_query_atoms(schema, inner),
        Query::And(qs) | Query::Or(qs) => qs.iter().try_for_each(|q| validate_query_atoms(schema, q)),
        Query::Exists(_, inner) | Query::Forall(_, inner) => validate_query_atoms(schema, inner),
    }
}

/// Evaluates a closed query on an instance. Quantifiers range over the
/// active domain: every value in the instance plus every literal in the
/// query. Conjunction and disjunction evaluate left to right and
/// short-circuit, so a comparison guarded by an atom is only typed when the
/// atom holds.
pub fn eval_query(instance: &Instance, query: &Query) -> Result<bool> {
    let free = query.free_variables();
    if !free.is_empty() {
        let names: Vec<String> = free.into_iter().collect();
        return Err(Error::Argument(format!(
            "cannot evaluate a query with free variables: {}",
            names.join(", ")
        )));
    }
    let mut domain: BTreeSet<Value> = BTreeSet::new();
    for fact in instance {
        domain.extend(fact.args.iter().cloned());
    }
    query.literal_values(&mut domain);
    let domain: Vec<Value> = domain.into_iter().collect();
    eval_rec(instance, query, &domain, &mut BTreeMap::new())
}

fn eval_rec(
    instance: &Instance,
    query: &Query,
    domain: &[Value],
    env: &mut BTreeMap<String, Value>,
) -> Result<bool> {
    match query {
        Query::Atom(atom) => {
            let mut args = Vec::with_capacity(atom.terms.len());
            for t in &atom.terms {
                args.push(resolve(t, env)?.clone());
            }
            Ok(instance.contains(&Fact::new(atom.relation.clone(), args)))
        }
        Query::Cmp(a, op, b) => {
            let va = resolve(a, env)?.clone();
            let vb = resolve(b, env)?.clone();
            compare_values(&va, &vb, *op)
        }
        Query::Not(inner) => Ok(!eval_rec(instance, inner, domain, env)?),
        Query::And(qs) => {
            for q in qs {
                if !eval_rec(instance, q, domain, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Query::Or(qs) => {
            for q in qs {
                if eval_rec(instance, q, domain, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Query::Exists(vars, inner) => quantify(instance, vars, inner, domain, env, true),
        Query::Forall(vars, inner) => quantify(instance, vars, inner, domain, env, false),
    }
}

fn quantify(
    instance: &Instance,
    vars: &[String],
    inner: &Query,
    domain: &[Value],
    env: &mut BTreeMap<String, Value>,
    existential: bool,
) -> Result<bool> {
    match vars.split_first() {
        None => eval_rec(instance, inner, domain, env),
        Some((v, rest)) => {
            let shadowed = env.get(v).cloned();
            for value in domain {
                env.insert(v.clone(), value.clone());
                let hit = quantify(instance, rest, inner, domain, env, existential)?;
                if hit == existential {
                    restore(env, v, shadowed);
                    return Ok(existential);
                }
            }
            restore(env, v, shadowed);
            Ok(!existential)
        }
    }
}

fn restore(env: &mut BTreeMap<String, Value>, var: &str, shadowed: Option<Value>) {
    match shadowed {
        Some(old) => {
            env.insert(var.to_string(), old);
        }
        None => {
            env.remove(var);
        }
    }
}
