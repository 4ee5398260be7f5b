//! Acyclic priority relations between conflicting facts: validation, the
//! winnow operator, totality, and enumeration of total extensions.

use std::collections::{BTreeMap, BTreeSet};

use crate::conflict::ConflictHypergraph;
use crate::error::{Error, Result};
use crate::model::{Fact, Instance};

/// A binary priority relation, stored as (better, worse) pairs. Instances
/// built through [`validate_priority`] are acyclic and relate only facts
/// that share a conflict.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Priority {
    better_than: BTreeMap<Fact, BTreeSet<Fact>>,
    pair_count: usize,
}

impl Priority {
    pub fn empty() -> Priority {
        Priority::default()
    }

    /// True iff `a` is directly preferred to `b`.
    pub fn prefers(&self, a: &Fact, b: &Fact) -> bool {
        self.better_than.get(a).is_some_and(|ws| ws.contains(b))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Fact, &Fact)> {
        self.better_than
            .iter()
            .flat_map(|(a, ws)| ws.iter().map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.pair_count
    }

    pub fn is_empty(&self) -> bool {
        self.pair_count == 0
    }

    /// The winnow of a fact set: its members not dominated by another member.
    /// Acyclicity makes the result nonempty whenever the input is.
    pub fn winnow(&self, s: &Instance) -> Instance {
        s.iter()
            .filter(|x| !s.iter().any(|y| self.prefers(y, x)))
            .cloned()
            .collect()
    }

    /// True iff every two distinct facts sharing a conflict are ordered one
    /// way or the other.
    pub fn is_total(&self, hg: &ConflictHypergraph) -> bool {
        hg.conflicting_pairs()
            .iter()
            .all(|(a, b)| self.prefers(a, b) || self.prefers(b, a))
    }

    /// The conflicting pairs not yet ordered either way.
    pub fn unordered_pairs(&self, hg: &ConflictHypergraph) -> Vec<(Fact, Fact)> {
        hg.conflicting_pairs()
            .into_iter()
            .filter(|(a, b)| !self.prefers(a, b) && !self.prefers(b, a))
            .collect()
    }

    /// Enumerates every acyclic total extension, in a deterministic order.
    /// Each extension orients all unordered conflicting pairs; orientations
    /// that close a cycle are pruned as soon as they appear. At least one
    /// extension always exists. The search is exponential in the number of
    /// unordered pairs and intended for small inputs.
    pub fn total_extensions(&self, hg: &ConflictHypergraph) -> Vec<Priority> {
        let pending = self.unordered_pairs(hg);
        let mut out = Vec::new();
        let mut current = self.clone();
        extend_rec(&mut current, &pending, 0, &mut out);
        out
    }

    fn insert(&mut self, better: Fact, worse: Fact) -> bool {
        let fresh = self.better_than.entry(better).or_default().insert(worse);
        if fresh {
            self.pair_count += 1;
        }
        fresh
    }

    fn remove(&mut self, better: &Fact, worse: &Fact) {
        if let Some(ws) = self.better_than.get_mut(better) {
            if ws.remove(worse) {
                self.pair_count -= 1;
            }
            if ws.is_empty() {
                self.better_than.remove(better);
            }
        }
    }

    /// True iff `to` is reachable from `from` along priority edges.
    fn reaches(&self, from: &Fact, to: &Fact) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(f) = stack.pop() {
            if f == to {
                return true;
            }
            if !seen.insert(f.clone()) {
                continue;
            }
            if let Some(ws) = self.better_than.get(f) {
                stack.extend(ws.iter());
            }
        }
        false
    }

    /// Finds some directed cycle, if any, as the list of its facts in order.
    fn find_cycle(&self) -> Option<Vec<Fact>> {
        let mut done: BTreeSet<&Fact> = BTreeSet::new();
        for start in self.better_than.keys() {
            if done.contains(start) {
                continue;
            }
            let mut path: Vec<&Fact> = Vec::new();
            let mut on_path: BTreeSet<&Fact> = BTreeSet::new();
            if let Some(cycle) = self.dfs_cycle(start, &mut path, &mut on_path, &mut done) {
                return Some(cycle);
            }
        }
        None
    }

    fn dfs_cycle<'a>(
        &'a self,
        node: &'a Fact,
        path: &mut Vec<&'a Fact>,
        on_path: &mut BTreeSet<&'a Fact>,
        done: &mut BTreeSet<&'a Fact>,
    ) -> Option<Vec<Fact>> {
        if on_path.contains(node) {
            let start = path.iter().position(|f| *f == node).unwrap();
            return Some(path[start..].iter().map(|f| (*f).clone()).collect());
        }
        if done.contains(node) {
            return None;
        }
        path.push(node);
        on_path.insert(node);
        if let Some(ws) = self.better_than.get(node) {
            for next in ws {
                if let Some(cycle) = self.dfs_cycle(next, path, on_path, done) {
                    return Some(cycle);
                }
            }
        }
        path.pop();
        on_path.remove(node);
        done.insert(node);
        None
    }
}

fn extend_rec(
    current: &mut Priority,
    pending: &[(Fact, Fact)],
    idx: usize,
    out: &mut Vec<Priority>,
) {
    if idx == pending.len() {
        out.push(current.clone());
        return;
    }
    let (a, b) = &pending[idx];
    for (better, worse) in [(a, b), (b, a)] {
        if !current.reaches(worse, better) {
            current.insert(better.clone(), worse.clone());
            extend_rec(current, pending, idx + 1, out);
            current.remove(better, worse);
        }
    }
}

/// How [`validate_priority`] treats pairs of facts that share no conflict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PriorityMode {
    /// Any pair of non-conflicting facts is an error.
    Strict,
    /// Pairs of non-conflicting facts are dropped and reported.
    Lenient,
}

/// The outcome of priority validation: the accepted relation plus the pairs
/// dropped in lenient mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedPriority {
    pub priority: Priority,
    pub dropped: Vec<(Fact, Fact)>,
}

/// Builds a priority relation from raw pairs against a conflict hypergraph.
/// Facts outside the hypergraph are always an argument error; pairs whose
/// facts never conflict (including self pairs) are an error in strict mode
/// and dropped in lenient mode; any directed cycle is an error in both
/// modes. Duplicate pairs collapse silently.
pub fn validate_priority(
    pairs: &[(Fact, Fact)],
    hg: &ConflictHypergraph,
    mode: PriorityMode,
) -> Result<ValidatedPriority> {
    let mut priority = Priority::empty();
    let mut dropped = Vec::new();
    for (better, worse) in pairs {
        for fact in [better, worse] {
            if !hg.nodes().contains(fact) {
                return Err(Error::Argument(format!(
                    "priority pair ({better}, {worse}) mentions {fact}, which is not in the instance"
                )));
            }
        }
        if !hg.are_neighbors(better, worse) {
            match mode {
                PriorityMode::Strict => {
                    return Err(Error::NonNeighborPair(format!(
                        "({better}, {worse}) relates facts that share no conflict"
                    )));
                }
                PriorityMode::Lenient => {
                    dropped.push((better.clone(), worse.clone()));
                    continue;
                }
            }
        }
        priority.insert(better.clone(), worse.clone());
    }
    if let Some(cycle) = priority.find_cycle() {
        return Err(Error::PriorityCycle(cycle));
    }
    Ok(ValidatedPriority { priority, dropped })
}
