//! Brute-force reference implementations, deliberately independent of the
//! main engine: dependency violations straight from their definition,
//! denial matches by cartesian product, repairs by subset scan, preferred
//! families by the literal definitions over raw pair lists, and exhaustive
//! solvers for the propositional and quantified formulas. Everything here
//! trades speed for obviousness and is meant for small inputs.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::generators::{Cnf, Qbf};
use crate::model::{
    BuiltinFormula, CmpOp, Constraint, DenialConstraint, Fact, FunctionalDependency, Instance,
    Schema, Term, Value,
};

const SUBSET_SCAN_LIMIT: usize = 20;

/// Every conflict of the instance, by definition: a pair violating some
/// dependency, or the fact set of a denial match whose guard holds.
pub fn naive_conflicts(
    schema: &Schema,
    instance: &Instance,
    constraints: &[Constraint],
) -> Result<BTreeSet<BTreeSet<Fact>>> {
    let facts: Vec<&Fact> = instance.iter().collect();
    let mut out = BTreeSet::new();
    for constraint in constraints {
        match constraint {
            Constraint::Fd(fd) => {
                for a in &facts {
                    for b in &facts {
                        if a < b && fd_violated(schema, fd, a, b)? {
                            out.insert([(*a).clone(), (*b).clone()].into_iter().collect());
                        }
                    }
                }
            }
            Constraint::Denial(dc) => {
                let mut tuple = vec![0usize; dc.atoms.len()];
                loop {
                    if let Some(conflict) = denial_match(dc, &facts, &tuple)? {
                        out.insert(conflict);
                    }
                    if !advance(&mut tuple, facts.len()) {
                        break;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn fd_violated(schema: &Schema, fd: &FunctionalDependency, a: &Fact, b: &Fact) -> Result<bool> {
    if a.relation != fd.relation || b.relation != fd.relation {
        return Ok(false);
    }
    let position = |name: &String| {
        schema
            .attribute_position(&fd.relation, name)
            .ok_or_else(|| {
                Error::Input(format!("dependency on {} names unknown attribute {name}", fd.relation))
            })
    };
    for name in &fd.lhs {
        if a.args[position(name)?] != b.args[position(name)?] {
            return Ok(false);
        }
    }
    for name in &fd.rhs {
        if a.args[position(name)?] != b.args[position(name)?] {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Tries one tuple of fact indices against the atoms of a denial constraint
/// and returns the matched fact set when the bindings agree and the guard
/// holds. Repeating a fact across atoms is allowed.
fn denial_match(
    dc: &DenialConstraint,
    facts: &[&Fact],
    tuple: &[usize],
) -> Result<Option<BTreeSet<Fact>>> {
    if facts.is_empty() {
        return Ok(None);
    }
    let mut env: BTreeMap<String, Value> = BTreeMap::new();
    for (atom, idx) in dc.atoms.iter().zip(tuple) {
        let fact = facts[*idx];
        if fact.relation != atom.relation || fact.args.len() != atom.terms.len() {
            return Ok(None);
        }
        for (term, value) in atom.terms.iter().zip(&fact.args) {
            match term {
                Term::Lit(v) => {
                    if v != value {
                        return Ok(None);
                    }
                }
                Term::Var(name) => match env.get(name) {
                    Some(bound) if bound != value => return Ok(None),
                    Some(_) => {}
                    None => {
                        env.insert(name.clone(), value.clone());
                    }
                },
            }
        }
    }
    if oracle_guard(&dc.guard, &env)? {
        Ok(Some(tuple.iter().map(|i| facts[*i].clone()).collect()))
    } else {
        Ok(None)
    }
}

fn advance(tuple: &mut [usize], base: usize) -> bool {
    for slot in tuple.iter_mut() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

fn oracle_guard(g: &BuiltinFormula, env: &BTreeMap<String, Value>) -> Result<bool> {
    match g {
        BuiltinFormula::True => Ok(true),
        BuiltinFormula::Cmp(a, op, b) => {
            let left = oracle_term(a, env)?;
            let right = oracle_term(b, env)?;
            oracle_compare(left, right, *op)
        }
        BuiltinFormula::Not(inner) => Ok(!oracle_guard(inner, env)?),
        BuiltinFormula::And(fs) => {
            for f in fs {
                if !oracle_guard(f, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        BuiltinFormula::Or(fs) => {
            for f in fs {
                if oracle_guard(f, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

fn oracle_term<'a>(t: &'a Term, env: &'a BTreeMap<String, Value>) -> Result<&'a Value> {
    match t {
        Term::Lit(v) => Ok(v),
        Term::Var(name) => env
            .get(name)
            .ok_or_else(|| Error::Argument(format!("unbound variable {name}"))),
    }
}

fn oracle_compare(a: &Value, b: &Value, op: CmpOp) -> Result<bool> {
    use std::cmp::Ordering;
    let ordering = match (a, b) {
        (Value::Rat(x), Value::Rat(y)) => x.cmp(y),
        (Value::Const(x), Value::Const(y)) => match op {
            CmpOp::Eq => return Ok(x == y),
            CmpOp::Ne => return Ok(x != y),
            _ => return Err(Error::Type(format!("order comparison {a} and {b} on constants"))),
        },
        _ => {
            return Err(Error::Type(format!(
                "comparison of {a} and {b} mixes a rational and a constant"
            )))
        }
    };
    Ok(match op {
        CmpOp::Eq => ordering == Ordering::Equal,
        CmpOp::Ne => ordering != Ordering::Equal,
        CmpOp::Lt => ordering == Ordering::Less,
        CmpOp::Le => ordering != Ordering::Greater,
        CmpOp::Gt => ordering == Ordering::Greater,
        CmpOp::Ge => ordering != Ordering::Less,
    })
}

pub fn naive_is_consistent(
    schema: &Schema,
    instance: &Instance,
    constraints: &[Constraint],
) -> Result<bool> {
    Ok(naive_conflicts(schema, instance, constraints)?.is_empty())
}

/// Every repair, by subset scan: consistent subsets to which no outside
/// fact can be added consistently.
pub fn naive_repairs(
    schema: &Schema,
    instance: &Instance,
    constraints: &[Constraint],
) -> Result<Vec<Instance>> {
    let facts: Vec<Fact> = instance.iter().cloned().collect();
    if facts.len() > SUBSET_SCAN_LIMIT {
        return Err(Error::Argument(format!(
            "the subset scan handles at most {SUBSET_SCAN_LIMIT} facts"
        )));
    }
    let mut out = Vec::new();
    for mask in 0u64..(1 << facts.len()) {
        let subset: Instance = facts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, f)| f.clone())
            .collect();
        if !naive_is_consistent(schema, &subset, constraints)? {
            continue;
        }
        let mut maximal = true;
        for fact in &facts {
            if subset.contains(fact) {
                continue;
            }
            let mut extended = subset.clone();
            extended.insert(fact.clone());
            if naive_is_consistent(schema, &extended, constraints)? {
                maximal = false;
                break;
            }
        }
        if maximal {
            out.push(subset);
        }
    }
    Ok(out)
}

fn raw_prefers(pairs: &[(Fact, Fact)], a: &Fact, b: &Fact) -> bool {
    pairs.iter().any(|(x, y)| x == a && y == b)
}

/// Which trade condition the improvement search demands between the removed
/// set X and the added set Y.
#[derive(Clone, Copy)]
enum StarKind {
    /// Every removed fact is beaten by some added fact.
    Global,
    /// Some added fact beats every removed fact.
    Pareto,
}

/// The literal improvement search over one instance, with facts, conflicts,
/// and subsets encoded as bitmasks so the full double subset scan stays
/// affordable.
struct PrimalScan {
    facts: Vec<Fact>,
    edge_masks: Vec<u64>,
}

impl PrimalScan {
    fn new(
        schema: &Schema,
        instance: &Instance,
        constraints: &[Constraint],
    ) -> Result<PrimalScan> {
        let facts: Vec<Fact> = instance.iter().cloned().collect();
        if facts.len() > SUBSET_SCAN_LIMIT {
            return Err(Error::Argument(format!(
                "the improvement scan handles at most {SUBSET_SCAN_LIMIT} facts"
            )));
        }
        let edge_masks = naive_conflicts(schema, instance, constraints)?
            .iter()
            .map(|edge| mask_of(edge, &facts))
            .collect();
        Ok(PrimalScan { facts, edge_masks })
    }

    fn consistent(&self, mask: u64) -> bool {
        self.edge_masks.iter().all(|edge| edge & mask != *edge)
    }

    /// Keeps the repairs with no improving trade: no nonempty X inside and
    /// Y outside satisfying the trade condition with (repair ∖ X) ∪ Y
    /// consistent.
    fn optimal(
        &self,
        pairs: &[(Fact, Fact)],
        repairs: &[Instance],
        kind: StarKind,
    ) -> Vec<Instance> {
        let n = self.facts.len();
        let mut beats = vec![0u64; n];
        let mut beaten_by = vec![0u64; n];
        for (winner, loser) in pairs {
            let (Ok(w), Ok(l)) =
                (self.facts.binary_search(winner), self.facts.binary_search(loser))
            else {
                continue;
            };
            beats[l] |= 1 << w;
            beaten_by[w] |= 1 << l;
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        repairs
            .iter()
            .filter(|repair| {
                let rmask = mask_of(repair, &self.facts);
                !self.improvable(rmask, full & !rmask, &beats, &beaten_by, kind)
            })
            .cloned()
            .collect()
    }

    fn improvable(
        &self,
        rmask: u64,
        omask: u64,
        beats: &[u64],
        beaten_by: &[u64],
        kind: StarKind,
    ) -> bool {
        let mut x = rmask;
        while x != 0 {
            let mut y = omask;
            loop {
                let star = match kind {
                    StarKind::Global => {
                        bits(x).all(|i| beats[i] & y != 0)
                    }
                    StarKind::Pareto => {
                        bits(y).any(|j| beaten_by[j] & x == x)
                    }
                };
                if star && self.consistent((rmask & !x) | y) {
                    return true;
                }
                if y == 0 {
                    break;
                }
                y = (y - 1) & omask;
            }
            x = (x - 1) & rmask;
        }
        false
    }
}

fn mask_of(facts: &Instance, order: &[Fact]) -> u64 {
    facts
        .iter()
        .map(|f| 1u64 << order.binary_search(f).expect("fact belongs to the instance"))
        .fold(0, |acc, bit| acc | bit)
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1 << i) != 0)
}

/// The globally optimal repairs, straight from the definition.
pub fn grep_oracle(
    schema: &Schema,
    instance: &Instance,
    constraints: &[Constraint],
    pairs: &[(Fact, Fact)],
) -> Result<Vec<Instance>> {
    let repairs = naive_repairs(schema, instance, constraints)?;
    let scan = PrimalScan::new(schema, instance, constraints)?;
    Ok(scan.optimal(pairs, &repairs, StarKind::Global))
}

/// The Pareto optimal repairs, straight from the definition.
pub fn prep_oracle(
    schema: &Schema,
    instance: &Instance,
    constraints: &[Constraint],
    pairs: &[(Fact, Fact)],
) -> Result<Vec<Instance>> {
    let repairs = naive_repairs(schema, instance, constraints)?;
    let scan = PrimalScan::new(schema, instance, constraints)?;
    Ok(scan.optimal(pairs, &repairs, StarKind::Pareto))
}

/// The common optimal repairs: globally optimal under some acyclic total
/// extension of the priority, by trying every orientation of the unordered
/// conflicting pairs.
pub fn crep_oracle(
    schema: &Schema,
    instance: &Instance,
    constraints: &[Constraint],
    pairs: &[(Fact, Fact)],
) -> Result<Vec<Instance>> {
    let conflicts = naive_conflicts(schema, instance, constraints)?;
    let mut conflicting: BTreeSet<(Fact, Fact)> = BTreeSet::new();
    for edge in &conflicts {
        let members: Vec<&Fact> = edge.iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                conflicting.insert(((*a).clone(), (*b).clone()));
            }
        }
    }
    let unordered: Vec<(Fact, Fact)> = conflicting
        .into_iter()
        .filter(|(a, b)| !raw_prefers(pairs, a, b) && !raw_prefers(pairs, b, a))
        .collect();
    if unordered.len() > SUBSET_SCAN_LIMIT {
        return Err(Error::Argument(format!(
            "the extension scan handles at most {SUBSET_SCAN_LIMIT} unordered pairs"
        )));
    }
    let repairs = naive_repairs(schema, instance, constraints)?;
    let scan = PrimalScan::new(schema, instance, constraints)?;
    let mut out: BTreeSet<Instance> = BTreeSet::new();
    for mask in 0u64..(1 << unordered.len()) {
        let mut extension: Vec<(Fact, Fact)> = pairs.to_vec();
        for (k, (a, b)) in unordered.iter().enumerate() {
            if mask & (1 << k) != 0 {
                extension.push((a.clone(), b.clone()));
            } else {
                extension.push((b.clone(), a.clone()));
            }
        }
        if !pairs_acyclic(&extension) {
            continue;
        }
        out.extend(scan.optimal(&extension, &repairs, StarKind::Global));
        if out.len() == repairs.len() {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

/// Acyclicity by repeatedly removing facts nothing points at.
fn pairs_acyclic(pairs: &[(Fact, Fact)]) -> bool {
    let mut incoming: BTreeMap<&Fact, usize> = BTreeMap::new();
    let mut outgoing: BTreeMap<&Fact, Vec<&Fact>> = BTreeMap::new();
    for (better, worse) in pairs {
        incoming.entry(better).or_insert(0);
        *incoming.entry(worse).or_insert(0) += 1;
        outgoing.entry(better).or_default().push(worse);
    }
    let mut queue: Vec<&Fact> = incoming
        .iter()
        .filter(|(_, n)| **n == 0)
        .map(|(f, _)| *f)
        .collect();
    let mut removed = 0;
    while let Some(f) = queue.pop() {
        removed += 1;
        if let Some(ws) = outgoing.get(f) {
            for w in ws.clone() {
                let n = incoming.get_mut(w).unwrap();
                *n -= 1;
                if *n == 0 {
                    queue.push(w);
                }
            }
        }
    }
    removed == incoming.len()
}

/// Exhaustive satisfiability by truth table.
pub fn sat_brute_force(cnf: &Cnf) -> bool {
    for assignment in 0u64..(1 << cnf.num_vars) {
        if cnf
            .clauses
            .iter()
            .all(|clause| clause_holds(clause, assignment))
        {
            return true;
        }
    }
    false
}

fn clause_holds(clause: &[i64], assignment: u64) -> bool {
    clause.iter().any(|lit| {
        let var = lit.unsigned_abs() as usize;
        let set = assignment & (1 << (var - 1)) != 0;
        set == (*lit > 0)
    })
}

/// Exhaustive evaluation of "for all the first block, exists the second
/// block, CNF" by recursion over the prefix.
pub fn qbf_brute_force(qbf: &Qbf) -> bool {
    qbf_rec(qbf, 1, 0)
}

fn qbf_rec(qbf: &Qbf, var: usize, assignment: u64) -> bool {
    if var > qbf.num_vars() {
        return qbf.clauses.iter().all(|c| clause_holds(c, assignment));
    }
    let with_false = assignment;
    let with_true = assignment | (1 << (var - 1));
    if qbf.is_universal(var) {
        qbf_rec(qbf, var + 1, with_false) && qbf_rec(qbf, var + 1, with_true)
    } else {
        qbf_rec(qbf, var + 1, with_false) || qbf_rec(qbf, var + 1, with_true)
    }
}
