//! Conflict detection: substitution matching of denial constraints against
//! an instance, the conflict hypergraph, and consistency and repair checks.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Atom, DenialConstraint, Fact, Instance, Term, Value};

/// A set of facts that jointly violate a denial constraint under some
/// substitution. Non-injective matches yield smaller sets and are kept.
pub type Conflict = BTreeSet<Fact>;

/// Finds every conflict of the instance with respect to the (desugared)
/// denial constraints, deduplicated as fact sets.
pub fn find_conflicts(
    instance: &Instance,
    constraints: &[DenialConstraint],
) -> Result<BTreeSet<Conflict>> {
    let by_relation = index_by_relation(instance);
    let mut out = BTreeSet::new();
    for dc in constraints {
        let mut env = BTreeMap::new();
        let mut used = Vec::new();
        match_atoms(dc, 0, &by_relation, &mut env, &mut used, &mut |conflict| {
            out.insert(conflict);
            true
        })?;
    }
    Ok(out)
}

/// True iff the instance violates none of the constraints. The empty
/// instance is consistent with every constraint set.
pub fn is_consistent(instance: &Instance, constraints: &[DenialConstraint]) -> Result<bool> {
    let by_relation = index_by_relation(instance);
    for dc in constraints {
        let mut env = BTreeMap::new();
        let mut used = Vec::new();
        let mut found = false;
        match_atoms(dc, 0, &by_relation, &mut env, &mut used, &mut |_| {
            found = true;
            false
        })?;
        if found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff adding `fact` to the consistent set `base` creates a conflict,
/// that is, some constraint match uses `fact` at least once. Checking only
/// matches through the new fact is sound because denial violations are
/// hereditary.
pub fn adds_conflict(
    base: &Instance,
    fact: &Fact,
    constraints: &[DenialConstraint],
) -> Result<bool> {
    let mut extended = base.clone();
    extended.insert(fact.clone());
    let by_relation = index_by_relation(&extended);
    for dc in constraints {
        let mut env = BTreeMap::new();
        let mut used = Vec::new();
        let mut found = false;
        match_atoms(dc, 0, &by_relation, &mut env, &mut used, &mut |conflict| {
            if conflict.contains(fact) {
                found = true;
                false
            } else {
                true
            }
        })?;
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

/// True iff `candidate` is a maximal consistent subset of `instance`.
/// A candidate that is not a subset simply yields false.
pub fn is_repair(
    candidate: &Instance,
    instance: &Instance,
    constraints: &[DenialConstraint],
) -> Result<bool> {
    if !candidate.is_subset(instance) {
        return Ok(false);
    }
    if !is_consistent(candidate, constraints)? {
        return Ok(false);
    }
    for fact in instance.difference(candidate) {
        if !adds_conflict(candidate, fact, constraints)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The conflict hypergraph: nodes are the instance facts, hyperedges are the
/// conflicts. Repairs are exactly its maximal independent sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictHypergraph {
    nodes: Instance,
    edges: BTreeSet<Conflict>,
}

impl ConflictHypergraph {
    pub fn build(instance: &Instance, constraints: &[DenialConstraint]) -> Result<ConflictHypergraph> {
        Ok(ConflictHypergraph {
            nodes: instance.clone(),
            edges: find_conflicts(instance, constraints)?,
        })
    }

    pub fn nodes(&self) -> &Instance {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Conflict> {
        &self.edges
    }

    /// All facts sharing a hyperedge with `v`, excluding `v` itself.
    pub fn neighbors(&self, v: &Fact) -> Result<BTreeSet<Fact>> {
        if !self.nodes.contains(v) {
            return Err(Error::Argument(format!("fact {v} is not a node of the hypergraph")));
        }
        let mut out = BTreeSet::new();
        for edge in &self.edges {
            if edge.contains(v) {
                out.extend(edge.iter().filter(|f| *f != v).cloned());
            }
        }
        Ok(out)
    }

    pub fn are_neighbors(&self, a: &Fact, b: &Fact) -> bool {
        a != b && self.edges.iter().any(|e| e.contains(a) && e.contains(b))
    }

    /// Every unordered pair of distinct facts sharing a conflict, as
    /// (smaller, larger) in the global fact order.
    pub fn conflicting_pairs(&self) -> BTreeSet<(Fact, Fact)> {
        let mut out = BTreeSet::new();
        for edge in &self.edges {
            let facts: Vec<&Fact> = edge.iter().collect();
            for (i, a) in facts.iter().enumerate() {
                for b in &facts[i + 1..] {
                    out.insert(((*a).clone(), (*b).clone()));
                }
            }
        }
        out
    }

    /// True iff adding `fact` to `within` closes some hyperedge, where
    /// `within` is an independent set of this hypergraph.
    pub fn blocks(&self, within: &Instance, fact: &Fact) -> bool {
        self.edges
            .iter()
            .any(|e| e.contains(fact) && e.iter().all(|f| f == fact || within.contains(f)))
    }

    /// True iff no hyperedge lies entirely inside `s`. For subsets of the
    /// host instance this coincides with consistency.
    pub fn consistent_subset(&self, s: &Instance) -> bool {
        !self.edges.iter().any(|e| e.iter().all(|f| s.contains(f)))
    }
}

fn index_by_relation(instance: &Instance) -> BTreeMap<&str, Vec<&Fact>> {
    let mut map: BTreeMap<&str, Vec<&Fact>> = BTreeMap::new();
    for fact in instance {
        map.entry(fact.relation.as_str()).or_default().push(fact);
    }
    map
}

/// Depth-first substitution search over the constraint's atoms. The guard is
/// evaluated three-valued after every binding, so branches that already
/// falsify it are pruned. The sink decides whether to keep searching.
fn match_atoms(
    dc: &DenialConstraint,
    idx: usize,
    by_relation: &BTreeMap<&str, Vec<&Fact>>,
    env: &mut BTreeMap<String, Value>,
    used: &mut Vec<Fact>,
    sink: &mut dyn FnMut(Conflict) -> bool,
) -> Result<bool> {
    if idx == dc.atoms.len() {
        if dc.guard.eval(env)? {
            let conflict: Conflict = used.iter().cloned().collect();
            return Ok(sink(conflict));
        }
        return Ok(true);
    }
    let atom = &dc.atoms[idx];
    let Some(candidates) = by_relation.get(atom.relation.as_str()) else {
        return Ok(true);
    };
    for fact in candidates {
        if let Some(bound) = try_bind(atom, fact, env) {
            let viable = !matches!(dc.guard.partial_eval(env)?, Some(false));
            let mut keep_going = true;
            if viable {
                used.push((*fact).clone());
                keep_going = match_atoms(dc, idx + 1, by_relation, env, used, sink)?;
                used.pop();
            }
            for name in bound {
                env.remove(&name);
            }
            if !keep_going {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Unifies an atom pattern with a fact under the current bindings. Returns
/// the variables newly bound by this match, or None if it fails.
fn try_bind(atom: &Atom, fact: &Fact, env: &mut BTreeMap<String, Value>) -> Option<Vec<String>> {
    if atom.terms.len() != fact.args.len() {
        return None;
    }
    let mut bound = Vec::new();
    for (term, value) in atom.terms.iter().zip(&fact.args) {
        let ok = match term {
            Term::Lit(v) => v == value,
            Term::Var(name) => match env.get(name) {
                Some(existing) => existing == value,
                None => {
                    env.insert(name.clone(), value.clone());
                    bound.push(name.clone());
                    true
                }
            },
        };
        if !ok {
            for name in bound {
                env.remove(&name);
            }
            return None;
        }
    }
    Some(bound)
}
