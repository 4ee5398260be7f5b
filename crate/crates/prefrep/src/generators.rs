//! Instance generators: the binary counter chain, reductions from
//! propositional satisfiability and from 2-round quantified satisfiability,
//! and a seeded random generator for differential testing.

use std::collections::BTreeMap;

use num::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::context::RepairContext;
use crate::error::{Error, Result};
use crate::model::{
    attr, Atom, BuiltinFormula, CmpOp, Constraint, DenialConstraint, Domain, Fact,
    FunctionalDependency, Instance, Query, Schema, Term, Value,
};
use crate::priority::PriorityMode;

/// Everything a generator produces: the inputs for a repair context plus a
/// role map naming each generated fact.
#[derive(Clone, Debug)]
pub struct GeneratedPieces {
    pub schema: Schema,
    pub instance: Instance,
    pub constraints: Vec<Constraint>,
    pub priority_pairs: Vec<(Fact, Fact)>,
    pub roles: BTreeMap<String, Fact>,
}

impl GeneratedPieces {
    pub fn context(&self, mode: PriorityMode) -> Result<RepairContext> {
        RepairContext::new(
            self.schema.clone(),
            self.instance.clone(),
            self.constraints.clone(),
            &self.priority_pairs,
            mode,
        )
    }

    pub fn fact(&self, role: &str) -> &Fact {
        &self.roles[role]
    }
}

/// A propositional formula in conjunctive normal form. Literals are
/// DIMACS-style: variable indices start at 1, negative means negated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn validate(&self) -> Result<()> {
        for clause in &self.clauses {
            for lit in clause {
                let var = lit.unsigned_abs() as usize;
                if *lit == 0 || var > self.num_vars {
                    return Err(Error::Input(format!(
                        "literal {lit} is out of range for {} variables",
                        self.num_vars
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A quantified boolean formula of the shape "for all the first block,
/// exists the second block, CNF", where every clause has exactly three
/// distinct literals. Variables 1 to `num_universals` are universal, the
/// next `num_existentials` existential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf {
    pub num_universals: usize,
    pub num_existentials: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Qbf {
    pub fn num_vars(&self) -> usize {
        self.num_universals + self.num_existentials
    }

    pub fn is_universal(&self, var: usize) -> bool {
        var >= 1 && var <= self.num_universals
    }

    pub fn validate(&self) -> Result<()> {
        for clause in &self.clauses {
            if clause.len() != 3 {
                return Err(Error::Input(format!(
                    "clause {clause:?} must have exactly 3 literals"
                )));
            }
            let mut seen = std::collections::BTreeSet::new();
            for lit in clause {
                let var = lit.unsigned_abs() as usize;
                if *lit == 0 || var > self.num_vars() {
                    return Err(Error::Input(format!(
                        "literal {lit} is out of range for {} variables",
                        self.num_vars()
                    )));
                }
                if !seen.insert(*lit) {
                    return Err(Error::Input(format!(
                        "clause {clause:?} repeats literal {lit}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn r2(a: i64, b: i64) -> Fact {
    Fact::new("R", vec![Value::int(a), Value::int(b)])
}

/// The binary counter: `3n - 1` facts over one binary relation. `chain` is
/// a descending sequence of `2^n + 2^(n-1) - 1` distinct repairs in the
/// global improvement order, from the unique optimum (all value bits set)
/// downwards, each member dominating the next. For three or more positions
/// the instance also has repairs outside the chain (two carry markers with
/// no set bit between them), all of them dominated.
#[derive(Clone, Debug)]
pub struct CounterInstance {
    pub pieces: GeneratedPieces,
    pub chain: Vec<Instance>,
}

/// Position `i` holding bit value 0 or 1, or the carry marker 2.
fn counter_fact(i: usize, tag: i64) -> Fact {
    r2(i as i64, tag)
}

pub fn counter_instance(n: usize) -> Result<CounterInstance> {
    if n == 0 {
        return Err(Error::Argument("the counter needs at least one position".to_string()));
    }
    let mut schema = Schema::new();
    schema.add_relation("R", vec![attr("A", Domain::Rational), attr("B", Domain::Rational)])?;

    let mut instance = Instance::new();
    let mut roles = BTreeMap::new();
    for i in 0..n {
        for (tag, label) in [(0, "zero"), (1, "one")] {
            let f = counter_fact(i, tag);
            roles.insert(format!("{label}_{i}"), f.clone());
            instance.insert(f);
        }
    }
    for i in 0..n.saturating_sub(1) {
        let f = counter_fact(i, 2);
        roles.insert(format!("carry_{i}"), f.clone());
        instance.insert(f);
    }

    let mut constraints = vec![Constraint::Fd(FunctionalDependency::new("R", ["A"], ["B"]))];
    // a carry at position i forbids a set bit at any lower position
    constraints.push(Constraint::Denial(DenialConstraint::new(
        vec![
            Atom::new("R", vec![Term::var("i"), Term::Lit(Value::int(2))]),
            Atom::new("R", vec![Term::var("j"), Term::Lit(Value::int(1))]),
        ],
        BuiltinFormula::Cmp(Term::var("i"), CmpOp::Gt, Term::var("j")),
    )));
    // a set bit at position i forbids a carry right below it
    for i in 1..n {
        constraints.push(Constraint::Denial(DenialConstraint::new(
            vec![
                Atom::new(
                    "R",
                    vec![Term::Lit(Value::int(i as i64)), Term::Lit(Value::int(1))],
                ),
                Atom::new(
                    "R",
                    vec![Term::Lit(Value::int(i as i64 - 1)), Term::Lit(Value::int(2))],
                ),
            ],
            BuiltinFormula::True,
        )));
    }

    let mut priority_pairs = Vec::new();
    for i in 0..n {
        priority_pairs.push((counter_fact(i, 1), counter_fact(i, 0)));
    }
    for i in 1..n {
        priority_pairs.push((counter_fact(i, 1), counter_fact(i - 1, 2)));
    }
    for i in 0..n.saturating_sub(1) {
        for j in 0..=i {
            priority_pairs.push((counter_fact(i, 2), counter_fact(j, 1)));
        }
    }

    let chain = counter_chain(n);
    Ok(CounterInstance {
        pieces: GeneratedPieces {
            schema,
            instance,
            constraints,
            priority_pairs,
            roles,
        },
        chain,
    })
}

/// The repair holding the binary digits of `v`.
fn counter_value_repair(n: usize, v: u64) -> Instance {
    (0..n)
        .map(|i| counter_fact(i, ((v >> i) & 1) as i64))
        .collect()
}

/// The carry repair below an odd value `v`: the trailing set bits flatten to
/// zeros, a carry marker sits just under the lowest unset position, and the
/// digits above it are those of `v`.
fn counter_carry_repair(n: usize, v: u64) -> Instance {
    let j = (0..n).find(|i| (v >> i) & 1 == 0).expect("an unset bit below the top");
    let mut out = Instance::new();
    for i in 0..j.saturating_sub(1) {
        out.insert(counter_fact(i, 0));
    }
    if j >= 1 {
        out.insert(counter_fact(j - 1, 2));
    }
    for i in j..n {
        out.insert(counter_fact(i, ((v >> i) & 1) as i64));
    }
    out
}

fn counter_chain(n: usize) -> Vec<Instance> {
    let top = (1u64 << n) - 1;
    let mut chain = Vec::new();
    for v in (0..=top).rev() {
        chain.push(counter_value_repair(n, v));
        if v >= 2 && (v - 1) % 2 == 1 {
            chain.push(counter_carry_repair(n, v - 1));
        }
    }
    chain
}

fn r4(a: i64, b: i64, c: i64, d: i64) -> Fact {
    Fact::new("R", vec![Value::int(a), Value::int(b), Value::int(c), Value::int(d)])
}

/// The satisfiability reduction: a context and a query such that TRUE is a
/// preferred consistent answer (in any of the three families) exactly when
/// the formula is unsatisfiable.
#[derive(Clone, Debug)]
pub struct SatReduction {
    pub pieces: GeneratedPieces,
    pub query: Query,
}

pub fn sat_reduction(cnf: &Cnf) -> Result<SatReduction> {
    cnf.validate()?;
    let n = cnf.num_vars as i64;
    let mut schema = Schema::new();
    schema.add_relation(
        "R",
        vec![
            attr("A1", Domain::Rational),
            attr("B1", Domain::Rational),
            attr("A2", Domain::Rational),
            attr("B2", Domain::Rational),
        ],
    )?;
    let constraints = vec![
        Constraint::Fd(FunctionalDependency::new("R", ["A1"], ["B1"])),
        Constraint::Fd(FunctionalDependency::new("R", ["A2"], ["B2"])),
    ];

    let mut instance = Instance::new();
    let mut roles = BTreeMap::new();
    let mut priority_pairs = Vec::new();

    let pos = |i: i64| r4(i, 1, i, 1);
    let neg = |i: i64| r4(i, -1, -i, 1);
    for i in 1..=n {
        roles.insert(format!("w_{i}"), pos(i));
        roles.insert(format!("nw_{i}"), neg(i));
        instance.insert(pos(i));
        instance.insert(neg(i));
    }
    let blocker = r4(0, 0, 0, 0);
    roles.insert("b".to_string(), blocker.clone());
    instance.insert(blocker.clone());

    for (j, clause) in cnf.clauses.iter().enumerate() {
        let j1 = j as i64 + 1;
        let dj = r4(n + j1, -1, 0, 1);
        roles.insert(format!("d_{j1}"), dj.clone());
        instance.insert(dj.clone());
        priority_pairs.push((dj.clone(), blocker.clone()));
        for lit in clause {
            let i = lit.abs();
            // the clause-literal fact clashes with the witness fact of the
            // opposite sign and yields to the matching witness
            let (fact, role, over) = if *lit > 0 {
                (r4(n + j1, 1, -i, 0), format!("v_{i}_{j1}"), neg(i))
            } else {
                (r4(n + j1, 1, i, 0), format!("nv_{i}_{j1}"), pos(i))
            };
            roles.insert(role, fact.clone());
            instance.insert(fact.clone());
            priority_pairs.push((over, fact.clone()));
            priority_pairs.push((fact, dj.clone()));
        }
    }

    let query = Query::Not(Box::new(Query::Atom(Atom::new(
        "R",
        blocker.args.iter().cloned().map(Term::Lit).collect(),
    ))));
    Ok(SatReduction {
        pieces: GeneratedPieces {
            schema,
            instance,
            constraints,
            priority_pairs,
            roles,
        },
        query,
    })
}

fn r8(args: [i64; 8]) -> Fact {
    Fact::new("R", args.iter().map(|v| Value::int(*v)).collect())
}

/// The quantified satisfiability reduction: TRUE is a globally preferred
/// consistent answer to the atomic query exactly when the formula is valid.
#[derive(Clone, Debug)]
pub struct QbfReduction {
    pub pieces: GeneratedPieces,
    pub query: Query,
}

const SLOT_ORDERS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Orders the literals of each clause so that no two clause facts carry the
/// same existential variable in one slot with opposite signs. Such a pair of
/// facts would clash, and the falsified clauses of a universal valuation
/// would then be torn across several repairs, each easier to improve than
/// their union. Universal-slot clashes are harmless: two clause facts that
/// disagree on a universal slot are never falsified together.
fn arrange_clause_slots(qbf: &Qbf) -> Option<Vec<[i64; 3]>> {
    let mut arranged = Vec::with_capacity(qbf.clauses.len());
    if fill_slots(qbf, &mut arranged) {
        Some(arranged)
    } else {
        None
    }
}

fn fill_slots(qbf: &Qbf, arranged: &mut Vec<[i64; 3]>) -> bool {
    let Some(clause) = qbf.clauses.get(arranged.len()) else {
        return true;
    };
    for order in SLOT_ORDERS {
        let candidate = [clause[order[0]], clause[order[1]], clause[order[2]]];
        let clashes = arranged.iter().any(|earlier: &[i64; 3]| {
            earlier.iter().zip(candidate.iter()).any(|(a, b)| {
                a.unsigned_abs() == b.unsigned_abs()
                    && a.signum() != b.signum()
                    && !qbf.is_universal(a.unsigned_abs() as usize)
            })
        });
        if clashes {
            continue;
        }
        arranged.push(candidate);
        if fill_slots(qbf, arranged) {
            return true;
        }
        arranged.pop();
    }
    false
}

pub fn qbf_reduction(qbf: &Qbf) -> Result<QbfReduction> {
    qbf.validate()?;
    let arranged = arrange_clause_slots(qbf).ok_or_else(|| {
        Error::UnsupportedShape(
            "no ordering of the clause literals keeps the clause facts pairwise consistent"
                .to_string(),
        )
    })?;
    let mut schema = Schema::new();
    let mut attrs = Vec::new();
    for k in 1..=4 {
        attrs.push(attr(format!("A{k}"), Domain::Rational));
        attrs.push(attr(format!("B{k}"), Domain::Rational));
    }
    schema.add_relation("R", attrs)?;
    let constraints = (1..=4)
        .map(|k| {
            Constraint::Fd(FunctionalDependency::new(
                "R",
                [format!("A{k}")],
                [format!("B{k}")],
            ))
        })
        .collect();

    let mut instance = Instance::new();
    let mut roles = BTreeMap::new();
    let mut priority_pairs = Vec::new();

    // the group flag: universal variables and clause facts carry 1, the
    // existential side carries 0
    let group = |var: usize| if qbf.is_universal(var) { 1 } else { 0 };
    let pos = |var: usize| {
        let i = var as i64;
        r8([0, group(var), i, 1, i, 1, i, 1])
    };
    let neg = |var: usize| {
        let i = var as i64;
        r8([0, group(var), i, -1, i, -1, i, -1])
    };
    for var in 1..=qbf.num_vars() {
        roles.insert(format!("v_{var}"), pos(var));
        roles.insert(format!("nv_{var}"), neg(var));
        instance.insert(pos(var));
        instance.insert(neg(var));
    }
    let p_exists = r8([0; 8]);
    let p_forall = r8([0, 1, 0, 0, 0, 0, 0, 0]);
    roles.insert("p_exists".to_string(), p_exists.clone());
    roles.insert("p_forall".to_string(), p_forall.clone());
    instance.insert(p_exists.clone());
    instance.insert(p_forall.clone());

    for (k, clause) in arranged.iter().enumerate() {
        let k1 = k + 1;
        let mut args = [0i64; 8];
        args[1] = 1;
        for (slot, lit) in clause.iter().enumerate() {
            let var = lit.unsigned_abs() as usize;
            let sign = lit.signum();
            args[2 + 2 * slot] = var as i64;
            // a universal slot carries the flipped sign, so the clause fact
            // clashes with the literal's own witness and survives exactly
            // when the valuation falsifies the literal; an existential slot
            // keeps the sign, which leaves clauses distinct while the group
            // flag already makes the fact clash with every existential fact
            args[3 + 2 * slot] = if qbf.is_universal(var) { -sign } else { sign };
        }
        let dk = r8(args);
        roles.insert(format!("d_{k1}"), dk.clone());
        instance.insert(dk.clone());
        for lit in clause {
            let var = lit.unsigned_abs() as usize;
            let witness = if *lit > 0 { pos(var) } else { neg(var) };
            priority_pairs.push((witness, dk.clone()));
        }
    }
    for var in 1..=qbf.num_universals {
        priority_pairs.push((p_exists.clone(), pos(var)));
        priority_pairs.push((p_exists.clone(), neg(var)));
    }
    priority_pairs.push((p_exists.clone(), p_forall.clone()));

    let query = Query::Atom(Atom::new(
        "R",
        p_exists.args.iter().cloned().map(Term::Lit).collect(),
    ));
    Ok(QbfReduction {
        pieces: GeneratedPieces {
            schema,
            instance,
            constraints,
            priority_pairs,
            roles,
        },
        query,
    })
}

/// Shape knobs for the random generator. Percentages are integers out of a
/// hundred.
#[derive(Clone, Copy, Debug)]
pub struct RandomProfile {
    pub max_facts: usize,
    pub max_relations: usize,
    /// Chance that a conflicting pair of facts gets ordered.
    pub priority_percent: u32,
    /// Include hand-shaped denial constraints next to the dependencies.
    pub with_denials: bool,
}

impl Default for RandomProfile {
    fn default() -> RandomProfile {
        RandomProfile {
            max_facts: 10,
            max_relations: 2,
            priority_percent: 60,
            with_denials: true,
        }
    }
}

/// A seeded random schema, instance, constraint set and acyclic priority.
/// The same seed and profile always produce the same pieces.
pub fn random_pieces(seed: u64, profile: &RandomProfile) -> Result<GeneratedPieces> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut schema = Schema::new();
    let relation_count = rng.gen_range(1..=profile.max_relations.max(1));
    let mut relation_arities = Vec::new();
    for r in 0..relation_count {
        let arity = rng.gen_range(2..=3);
        let mut attrs = Vec::new();
        for a in 0..arity {
            // keep the first two columns numeric so dependencies and order
            // guards always have material to work with
            let domain = if a >= 2 && rng.gen_range(0..100) < 40 {
                Domain::Constant
            } else {
                Domain::Rational
            };
            attrs.push(attr(format!("C{a}"), domain));
        }
        schema.add_relation(format!("R{r}"), attrs)?;
        relation_arities.push(arity);
    }

    let mut instance = Instance::new();
    let fact_count = rng.gen_range(3..=profile.max_facts.max(3));
    let consts = ["a", "b", "c"];
    for _ in 0..fact_count {
        let r = rng.gen_range(0..relation_count);
        let attrs = schema.attributes(&format!("R{r}")).unwrap().to_vec();
        let args = attrs
            .iter()
            .map(|at| match at.domain {
                Domain::Rational => Value::int(rng.gen_range(0..4)),
                Domain::Constant => Value::constant(consts[rng.gen_range(0..consts.len())]),
            })
            .collect();
        instance.insert(Fact::new(format!("R{r}"), args));
    }

    let mut constraints = Vec::new();
    for r in 0..relation_count {
        let name = format!("R{r}");
        constraints.push(Constraint::Fd(FunctionalDependency::new(
            name.clone(),
            ["C0"],
            ["C1"],
        )));
        if profile.with_denials && rng.gen_range(0..100) < 50 {
            // forbid large values in the second column
            let bound = rng.gen_range(1..4);
            constraints.push(Constraint::Denial(DenialConstraint::new(
                vec![Atom::new(
                    name.clone(),
                    (0..relation_arities[r])
                        .map(|a| Term::var(format!("x{a}")))
                        .collect(),
                )],
                BuiltinFormula::Cmp(Term::var("x1"), CmpOp::Gt, Term::Lit(Value::int(bound))),
            )));
        }
        if profile.with_denials && rng.gen_range(0..100) < 40 {
            // no two facts may order their first columns strictly across a gap
            constraints.push(Constraint::Denial(DenialConstraint::new(
                vec![
                    Atom::new(
                        name.clone(),
                        (0..relation_arities[r])
                            .map(|a| Term::var(format!("x{a}")))
                            .collect(),
                    ),
                    Atom::new(
                        name.clone(),
                        (0..relation_arities[r])
                            .map(|a| Term::var(format!("y{a}")))
                            .collect(),
                    ),
                ],
                BuiltinFormula::And(vec![
                    BuiltinFormula::Cmp(Term::var("x0"), CmpOp::Gt, Term::var("y0")),
                    BuiltinFormula::Cmp(Term::var("x1"), CmpOp::Eq, Term::var("y1")),
                ]),
            )));
        }
    }

    let denials = crate::model::desugar_constraints(&schema, &constraints)?;
    let hg = crate::conflict::ConflictHypergraph::build(&instance, &denials)?;
    let mut pairs: Vec<(Fact, Fact)> = hg.conflicting_pairs().into_iter().collect();
    let mut priority_pairs: Vec<(Fact, Fact)> = Vec::new();
    // visit conflicting pairs in a shuffled order, orienting a random subset
    // and skipping any orientation that would close a cycle
    for k in (1..pairs.len()).rev() {
        pairs.swap(k, rng.gen_range(0..=k));
    }
    for (a, b) in pairs {
        if rng.gen_range(0..100) >= profile.priority_percent {
            continue;
        }
        let (better, worse) = if rng.gen_range(0..2) == 0 { (a, b) } else { (b, a) };
        let merged: Vec<(Fact, Fact)> = priority_pairs
            .iter()
            .cloned()
            .chain([(better, worse)])
            .collect();
        if crate::priority::validate_priority(&merged, &hg, PriorityMode::Strict).is_ok() {
            priority_pairs = merged;
        }
    }

    Ok(GeneratedPieces {
        schema,
        instance,
        constraints,
        priority_pairs,
        roles: BTreeMap::new(),
    })
}

/// A seeded random quantifier-free CNF query over the instance: a
/// conjunction of disjunctions of randomly signed ground atoms. Most atoms
/// name instance facts; some name nearby facts absent from the instance.
pub fn random_ground_cnf_query(
    seed: u64,
    instance: &Instance,
    max_conjuncts: usize,
    max_literals: usize,
) -> Query {
    assert!(!instance.is_empty(), "need facts to build query atoms");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let facts: Vec<&Fact> = instance.iter().collect();
    let mut conjuncts = Vec::new();
    for _ in 0..rng.gen_range(1..=max_conjuncts.max(1)) {
        let mut literals = Vec::new();
        for _ in 0..rng.gen_range(1..=max_literals.max(1)) {
            let mut fact = facts[rng.gen_range(0..facts.len())].clone();
            if rng.gen_range(0..100) < 20 {
                let bumped = match &fact.args[0] {
                    Value::Rat(r) => Value::Rat(r + BigRational::from_integer(1000.into())),
                    Value::Const(c) => Value::constant(format!("{c}_absent")),
                };
                fact.args[0] = bumped;
            }
            let atom = Query::Atom(Atom::new(
                &fact.relation,
                fact.args.into_iter().map(Term::Lit).collect(),
            ));
            if rng.gen_range(0..2) == 0 {
                literals.push(atom);
            } else {
                literals.push(Query::Not(Box::new(atom)));
            }
        }
        conjuncts.push(Query::Or(literals));
    }
    Query::And(conjuncts)
}

/// A seeded random CNF within the given bounds. Clauses draw one to three
/// distinct variables, each randomly signed.
pub fn random_cnf(seed: u64, max_vars: usize, max_clauses: usize) -> Cnf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_vars = rng.gen_range(1..=max_vars.max(1));
    let num_clauses = rng.gen_range(1..=max_clauses.max(1));
    let mut clauses = Vec::new();
    for _ in 0..num_clauses {
        let len = rng.gen_range(1..=3.min(num_vars));
        let mut vars: Vec<usize> = (1..=num_vars).collect();
        for k in (1..vars.len()).rev() {
            vars.swap(k, rng.gen_range(0..=k));
        }
        let clause = vars[..len]
            .iter()
            .map(|v| {
                let sign = if rng.gen_range(0..2) == 0 { 1 } else { -1 };
                *v as i64 * sign
            })
            .collect();
        clauses.push(clause);
    }
    Cnf { num_vars, clauses }
}

/// A seeded random QBF whose clause shape fits the reduction: exactly three
/// distinct literals per clause, over at least three variables. The bounds
/// must allow three variables in total.
pub fn random_qbf(seed: u64, max_universals: usize, max_existentials: usize, max_clauses: usize) -> Qbf {
    assert!(max_universals + max_existentials >= 3, "need room for three variables");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut num_universals;
    let mut num_existentials;
    loop {
        num_universals = rng.gen_range(0..=max_universals);
        num_existentials = rng.gen_range(0..=max_existentials);
        if num_universals + num_existentials >= 3 {
            break;
        }
    }
    let num_vars = num_universals + num_existentials;
    let num_clauses = rng.gen_range(1..=max_clauses.max(1));
    let mut clauses = Vec::new();
    for _ in 0..num_clauses {
        let mut vars: Vec<usize> = (1..=num_vars).collect();
        for k in (1..vars.len()).rev() {
            vars.swap(k, rng.gen_range(0..=k));
        }
        let clause = vars[..3]
            .iter()
            .map(|v| {
                let sign = if rng.gen_range(0..2) == 0 { 1 } else { -1 };
                *v as i64 * sign
            })
            .collect();
        clauses.push(clause);
    }
    Qbf {
        num_universals,
        num_existentials,
        clauses,
    }
}
