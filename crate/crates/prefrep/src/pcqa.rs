//! Preferred consistent query answering. The generic evaluator enumerates
//! the preferred repairs and evaluates the query on each. The cluster-based
//! evaluator answers quantifier-free CNF queries in polynomial time when
//! every relation carries at most one functional dependency and nothing
//! else, by reducing each clause to a handful of per-cluster conditions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::context::RepairContext;
use crate::error::{Error, Result};
use crate::families::{preferred_repairs, Family};
use crate::model::{
    eval_query, validate_query, Atom, Constraint, Fact, FunctionalDependency, Instance, Query,
    Schema, Term,
};
use crate::priority::{Priority, PriorityMode};
use crate::repair::DEFAULT_REPAIR_CAP;

/// Upper bound on the clause count of the negated query used to decide
/// FALSE; above it the cluster-based path falls back to enumeration.
const DUAL_CLAUSE_LIMIT: usize = 64;

/// Three-valued answer: TRUE when the query holds in every preferred
/// repair, FALSE when it fails in every preferred repair, UNDETERMINED
/// otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcqaVerdict {
    True,
    False,
    Undetermined,
}

impl fmt::Display for PcqaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PcqaVerdict::True => "TRUE",
            PcqaVerdict::False => "FALSE",
            PcqaVerdict::Undetermined => "UNDETERMINED",
        };
        write!(f, "{name}")
    }
}

#[derive(Clone, Debug)]
pub struct PcqaReport {
    pub verdict: PcqaVerdict,
    /// A preferred repair satisfying the query, when one was found.
    pub satisfying: Option<Instance>,
    /// A preferred repair falsifying the query, when one was found.
    pub falsifying: Option<Instance>,
    /// Set when the cluster-based path had to fall back to enumeration.
    pub fell_back: bool,
}

/// Answers a closed query by evaluating it on every preferred repair of
/// the requested family.
pub fn pcqa_generic(
    ctx: &RepairContext,
    family: Family,
    query: &Query,
    cap: usize,
) -> Result<PcqaReport> {
    validate_query(&ctx.schema, query)?;
    let mut satisfying = None;
    let mut falsifying = None;
    for repair in preferred_repairs(ctx, family, cap)? {
        if eval_query(&repair, query)? {
            satisfying.get_or_insert(repair);
        } else {
            falsifying.get_or_insert(repair);
        }
    }
    let verdict = match (&satisfying, &falsifying) {
        (_, None) => PcqaVerdict::True,
        (None, _) => PcqaVerdict::False,
        _ => PcqaVerdict::Undetermined,
    };
    Ok(PcqaReport {
        verdict,
        satisfying,
        falsifying,
        fell_back: false,
    })
}

/// Cluster decomposition of one relation's facts under its functional
/// dependency: facts grouped by their left-hand-side projection and,
/// within each such group, by the combined projection on both sides.
#[derive(Clone, Debug)]
pub struct ClusterIndex {
    x_of: BTreeMap<Fact, usize>,
    xy_of: BTreeMap<Fact, usize>,
    x_members: Vec<Instance>,
    xy_members: Vec<Instance>,
    xy_of_x: Vec<Vec<usize>>,
}

impl ClusterIndex {
    pub fn x_cluster(&self, fact: &Fact) -> Option<usize> {
        self.x_of.get(fact).copied()
    }

    pub fn xy_cluster(&self, fact: &Fact) -> Option<usize> {
        self.xy_of.get(fact).copied()
    }

    pub fn x_cluster_count(&self) -> usize {
        self.x_members.len()
    }

    pub fn xy_cluster_count(&self) -> usize {
        self.xy_members.len()
    }

    pub fn x_members(&self, x: usize) -> &Instance {
        &self.x_members[x]
    }

    pub fn xy_members(&self, xy: usize) -> &Instance {
        &self.xy_members[xy]
    }

    /// Identifiers of the inner clusters making up one outer cluster.
    pub fn xy_clusters_of(&self, x: usize) -> &[usize] {
        &self.xy_of_x[x]
    }
}

pub fn build_cluster_index(
    schema: &Schema,
    instance: &Instance,
    fd: &FunctionalDependency,
) -> Result<ClusterIndex> {
    let position = |name: &String| {
        schema.attribute_position(&fd.relation, name).ok_or_else(|| {
            Error::Input(format!(
                "dependency on {} names unknown attribute {name}",
                fd.relation
            ))
        })
    };
    let mut lhs_positions = Vec::new();
    for name in &fd.lhs {
        lhs_positions.push(position(name)?);
    }
    let mut both_positions = lhs_positions.clone();
    for name in &fd.rhs {
        both_positions.push(position(name)?);
    }
    both_positions.sort_unstable();
    both_positions.dedup();

    let project = |fact: &Fact, positions: &[usize]| -> Vec<crate::model::Value> {
        positions.iter().map(|p| fact.args[*p].clone()).collect()
    };
    let mut by_x: BTreeMap<Vec<crate::model::Value>, Instance> = BTreeMap::new();
    for fact in instance {
        if fact.relation == fd.relation {
            by_x
                .entry(project(fact, &lhs_positions))
                .or_default()
                .insert(fact.clone());
        }
    }
    let mut index = ClusterIndex {
        x_of: BTreeMap::new(),
        xy_of: BTreeMap::new(),
        x_members: Vec::new(),
        xy_members: Vec::new(),
        xy_of_x: Vec::new(),
    };
    for (_, members) in by_x {
        let x = index.x_members.len();
        let mut by_xy: BTreeMap<Vec<crate::model::Value>, Instance> = BTreeMap::new();
        for fact in &members {
            by_xy
                .entry(project(fact, &both_positions))
                .or_default()
                .insert(fact.clone());
        }
        let mut ids = Vec::new();
        for (_, inner) in by_xy {
            let xy = index.xy_members.len();
            for fact in &inner {
                index.x_of.insert(fact.clone(), x);
                index.xy_of.insert(fact.clone(), xy);
            }
            index.xy_members.push(inner);
            ids.push(xy);
        }
        index.x_members.push(members);
        index.xy_of_x.push(ids);
    }
    Ok(index)
}

/// A query clause reduced to the facts under its positive and negative
/// literals.
#[derive(Clone, Debug, Default)]
struct Clause {
    positive: Vec<Fact>,
    negative: Vec<Fact>,
}

impl Clause {
    fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }
}

fn query_as_cnf(query: &Query) -> Result<Vec<Clause>> {
    let mut clauses = Vec::new();
    collect_conjuncts(query, &mut clauses)?;
    Ok(clauses)
}

fn collect_conjuncts(query: &Query, out: &mut Vec<Clause>) -> Result<()> {
    if let Query::And(parts) = query {
        for part in parts {
            collect_conjuncts(part, out)?;
        }
        Ok(())
    } else {
        let mut clause = Clause::default();
        collect_disjuncts(query, &mut clause)?;
        out.push(clause);
        Ok(())
    }
}

fn collect_disjuncts(query: &Query, clause: &mut Clause) -> Result<()> {
    match query {
        Query::Or(parts) => {
            for part in parts {
                collect_disjuncts(part, clause)?;
            }
            Ok(())
        }
        Query::Atom(atom) => {
            clause.positive.push(ground_fact(atom)?);
            Ok(())
        }
        Query::Not(inner) => match inner.as_ref() {
            Query::Atom(atom) => {
                clause.negative.push(ground_fact(atom)?);
                Ok(())
            }
            _ => Err(Error::UnsupportedShape(
                "clause negation must apply directly to a ground atom, use the generic evaluator"
                    .to_string(),
            )),
        },
        _ => Err(Error::UnsupportedShape(
            "the query is not a conjunction of clauses over ground atoms, use the generic \
             evaluator"
                .to_string(),
        )),
    }
}

fn ground_fact(atom: &Atom) -> Result<Fact> {
    let mut args = Vec::new();
    for term in &atom.terms {
        match term {
            Term::Lit(value) => args.push(value.clone()),
            Term::Var(name) => {
                return Err(Error::UnsupportedShape(format!(
                    "clause atoms must be ground, found variable {name}"
                )))
            }
        }
    }
    Ok(Fact::new(&atom.relation, args))
}

/// Per-relation cluster index with the quality of every inner cluster,
/// one flag per preferred-repair family.
struct RelationClusters {
    index: ClusterIndex,
    winnow_hit: Vec<bool>,
    unbeaten: Vec<bool>,
    undefeated: Vec<bool>,
}

impl RelationClusters {
    fn build(
        schema: &Schema,
        instance: &Instance,
        fd: &FunctionalDependency,
        priority: &Priority,
    ) -> Result<RelationClusters> {
        let index = build_cluster_index(schema, instance, fd)?;
        let count = index.xy_cluster_count();
        let mut clusters = RelationClusters {
            index,
            winnow_hit: vec![false; count],
            unbeaten: vec![true; count],
            undefeated: vec![true; count],
        };
        for x in 0..clusters.index.x_cluster_count() {
            let winnow = priority.winnow(clusters.index.x_members(x));
            for &xy in clusters.index.xy_clusters_of(x) {
                let members = clusters.index.xy_members(xy);
                clusters.winnow_hit[xy] = members.iter().any(|f| winnow.contains(f));
                for &other in clusters.index.xy_clusters_of(x) {
                    if other == xy {
                        continue;
                    }
                    let rivals = clusters.index.xy_members(other);
                    let beats = members
                        .iter()
                        .all(|x| rivals.iter().any(|y| priority.prefers(y, x)));
                    let defeats = rivals
                        .iter()
                        .any(|y| members.iter().all(|x| priority.prefers(y, x)));
                    if beats {
                        clusters.unbeaten[xy] = false;
                    }
                    if defeats {
                        clusters.undefeated[xy] = false;
                    }
                }
            }
        }
        Ok(clusters)
    }

    /// Whether a repair selecting this inner cluster can still belong to
    /// the family: common optimal repairs pick clusters hitting the winnow
    /// of their outer cluster, globally optimal repairs pick clusters no
    /// rival beats fact-by-fact, Pareto optimal repairs pick clusters no
    /// single rival fact defeats outright.
    fn good(&self, family: Family, xy: usize) -> bool {
        match family {
            Family::Common => self.winnow_hit[xy],
            Family::Global => self.unbeaten[xy],
            Family::Pareto => self.undefeated[xy],
        }
    }
}

fn single_fd_map(constraints: &[Constraint]) -> Result<BTreeMap<String, FunctionalDependency>> {
    let mut map = BTreeMap::new();
    for constraint in constraints {
        match constraint {
            Constraint::Fd(fd) => {
                if map.insert(fd.relation.clone(), fd.clone()).is_some() {
                    return Err(Error::UnsupportedShape(format!(
                        "relation {} has more than one functional dependency, use the generic \
                         evaluator",
                        fd.relation
                    )));
                }
            }
            Constraint::Denial(_) => {
                return Err(Error::UnsupportedShape(
                    "denial constraints are outside the cluster-based evaluator, use the \
                     generic evaluator"
                        .to_string(),
                ))
            }
        }
    }
    Ok(map)
}

/// Decides whether some preferred repair of the family violates the
/// clause, i.e. contains every fact under a negative literal and none of
/// the facts under a positive literal.
fn violating_repair_exists(
    clause: &Clause,
    instance: &Instance,
    fds: &BTreeMap<String, FunctionalDependency>,
    clusters: &BTreeMap<String, RelationClusters>,
    family: Family,
) -> bool {
    let mut required: BTreeSet<Fact> = BTreeSet::new();
    for fact in &clause.negative {
        if !instance.contains(fact) {
            return false;
        }
        if fds.contains_key(&fact.relation) {
            required.insert(fact.clone());
        }
    }
    let mut forbidden: BTreeSet<Fact> = BTreeSet::new();
    for fact in &clause.positive {
        if !instance.contains(fact) {
            continue;
        }
        if !fds.contains_key(&fact.relation) {
            return false;
        }
        forbidden.insert(fact.clone());
    }

    let lookup = |fact: &Fact| {
        let relation = &clusters[&fact.relation];
        let x = relation
            .index
            .x_cluster(fact)
            .expect("clause facts were checked to be present");
        let xy = relation
            .index
            .xy_cluster(fact)
            .expect("clause facts were checked to be present");
        (fact.relation.clone(), x, xy)
    };

    let required_spots: Vec<(String, usize, usize)> = required.iter().map(&lookup).collect();
    let forbidden_spots: Vec<(String, usize, usize)> = forbidden.iter().map(&lookup).collect();

    for (i, a) in required_spots.iter().enumerate() {
        for b in &required_spots[i + 1..] {
            if a.0 == b.0 && a.1 == b.1 && a.2 != b.2 {
                return false;
            }
        }
    }

    let required_clusters: BTreeSet<(String, usize, usize)> =
        required_spots.iter().cloned().collect();
    let forbidden_clusters: BTreeSet<(String, usize, usize)> =
        forbidden_spots.iter().cloned().collect();
    if !required_clusters.is_disjoint(&forbidden_clusters) {
        return false;
    }

    for (relation, _, xy) in &required_clusters {
        if !clusters[relation].good(family, *xy) {
            return false;
        }
    }

    let required_x: BTreeSet<(String, usize)> = required_clusters
        .iter()
        .map(|(r, x, _)| (r.clone(), *x))
        .collect();
    let mut forbidden_by_x: BTreeMap<(String, usize), BTreeSet<usize>> = BTreeMap::new();
    for (relation, x, xy) in &forbidden_clusters {
        forbidden_by_x
            .entry((relation.clone(), *x))
            .or_default()
            .insert(*xy);
    }
    for ((relation, x), excluded) in forbidden_by_x {
        if required_x.contains(&(relation.clone(), x)) {
            continue;
        }
        let relation_clusters = &clusters[&relation];
        let viable = relation_clusters
            .index
            .xy_clusters_of(x)
            .iter()
            .any(|xy| !excluded.contains(xy) && relation_clusters.good(family, *xy));
        if !viable {
            return false;
        }
    }
    true
}

fn certain(
    clauses: &[Clause],
    instance: &Instance,
    fds: &BTreeMap<String, FunctionalDependency>,
    clusters: &BTreeMap<String, RelationClusters>,
    family: Family,
) -> bool {
    clauses
        .iter()
        .all(|clause| !violating_repair_exists(clause, instance, fds, clusters, family))
}

/// The clauses of the negated query, obtained by picking one literal from
/// every clause and flipping it. Returns nothing when the product exceeds
/// the size limit.
fn negated_cnf(clauses: &[Clause]) -> Option<Vec<Clause>> {
    let mut size: usize = 1;
    for clause in clauses {
        size = size.checked_mul(clause.len())?;
        if size > DUAL_CLAUSE_LIMIT {
            return None;
        }
    }
    let mut out = Vec::new();
    let mut picks = vec![0usize; clauses.len()];
    loop {
        let mut dual = Clause::default();
        for (clause, &pick) in clauses.iter().zip(&picks) {
            if pick < clause.positive.len() {
                dual.negative.push(clause.positive[pick].clone());
            } else {
                dual.positive.push(clause.negative[pick - clause.positive.len()].clone());
            }
        }
        out.push(dual);
        let mut advanced = false;
        for (slot, clause) in picks.iter_mut().zip(clauses) {
            *slot += 1;
            if *slot < clause.len() {
                advanced = true;
                break;
            }
            *slot = 0;
        }
        if !advanced {
            break;
        }
    }
    Some(out)
}

/// Answers a quantifier-free CNF query over ground atoms in polynomial
/// time when every relation carries at most one functional dependency and
/// no other constraints. TRUE is decided clause by clause; FALSE by the
/// same procedure on the negated query, falling back to enumeration when
/// the negation grows past the size limit.
pub fn pcqa_single_fd(
    schema: &Schema,
    instance: &Instance,
    constraints: &[Constraint],
    priority: &Priority,
    query: &Query,
    family: Family,
) -> Result<PcqaReport> {
    schema.validate_instance(instance)?;
    validate_query(schema, query)?;
    let fds = single_fd_map(constraints)?;
    let clauses = query_as_cnf(query)?;
    let mut clusters = BTreeMap::new();
    for (relation, fd) in &fds {
        clusters.insert(
            relation.clone(),
            RelationClusters::build(schema, instance, fd, priority)?,
        );
    }
    if certain(&clauses, instance, &fds, &clusters, family) {
        return Ok(PcqaReport {
            verdict: PcqaVerdict::True,
            satisfying: None,
            falsifying: None,
            fell_back: false,
        });
    }
    match negated_cnf(&clauses) {
        Some(dual) => {
            let verdict = if certain(&dual, instance, &fds, &clusters, family) {
                PcqaVerdict::False
            } else {
                PcqaVerdict::Undetermined
            };
            Ok(PcqaReport {
                verdict,
                satisfying: None,
                falsifying: None,
                fell_back: false,
            })
        }
        None => {
            let pairs: Vec<(Fact, Fact)> = priority
                .pairs()
                .map(|(a, b)| (a.clone(), b.clone()))
                .collect();
            let ctx = RepairContext::new(
                schema.clone(),
                instance.clone(),
                constraints.to_vec(),
                &pairs,
                PriorityMode::Strict,
            )?;
            let mut report = pcqa_generic(&ctx, family, query, DEFAULT_REPAIR_CAP)?;
            report.fell_back = true;
            Ok(report)
        }
    }
}
