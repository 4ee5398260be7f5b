//! Repairs: maximal consistent subsets of an instance. Enumeration over the
//! conflict hypergraph and greedy construction from a choice sequence.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conflict::{adds_conflict, ConflictHypergraph};
use crate::error::{Error, Result};
use crate::model::{DenialConstraint, Fact, Instance};

/// Default bound on how many repairs [`all_repairs`] may produce.
pub const DEFAULT_REPAIR_CAP: usize = 100_000;

/// Builds the repair a choice sequence induces: walk the facts in the given
/// order and keep each one unless it conflicts with what is already kept.
/// The sequence must be a permutation of the instance. Every repair arises
/// from some permutation, and every permutation yields a repair.
pub fn construct_repair(
    instance: &Instance,
    constraints: &[DenialConstraint],
    choices: &[Fact],
) -> Result<Instance> {
    let as_set: Instance = choices.iter().cloned().collect();
    if choices.len() != instance.len() || as_set != *instance {
        return Err(Error::Argument(
            "choice sequence is not a permutation of the instance".to_string(),
        ));
    }
    let mut kept = Instance::new();
    for fact in choices {
        if !adds_conflict(&kept, fact, constraints)? {
            kept.insert(fact.clone());
        }
    }
    Ok(kept)
}

/// Enumerates every repair, in the global fact order of their sorted
/// contents. Fails with an enumeration limit once more than `cap` repairs
/// exist. The search is exponential in the number of conflicting facts.
pub fn all_repairs(hg: &ConflictHypergraph, cap: usize) -> Result<Vec<Instance>> {
    let facts: Vec<Fact> = hg.nodes().iter().cloned().collect();
    let conflicting: Vec<bool> = facts
        .iter()
        .map(|f| hg.edges().iter().any(|e| e.contains(f)))
        .collect();
    let mut kept = Instance::new();
    let mut excluded: Vec<&Fact> = Vec::new();
    let mut out = std::collections::BTreeSet::new();
    enumerate(hg, &facts, &conflicting, 0, &mut kept, &mut excluded, &mut out, cap)?;
    Ok(out.into_iter().collect())
}

#[allow(clippy::too_many_arguments)]
fn enumerate<'a>(
    hg: &ConflictHypergraph,
    facts: &'a [Fact],
    conflicting: &[bool],
    idx: usize,
    kept: &mut Instance,
    excluded: &mut Vec<&'a Fact>,
    out: &mut std::collections::BTreeSet<Instance>,
    cap: usize,
) -> Result<()> {
    if idx == facts.len() {
        if excluded.iter().all(|f| hg.blocks(kept, f)) {
            out.insert(kept.clone());
            if out.len() > cap {
                return Err(Error::EnumerationLimit { cap });
            }
        }
        return Ok(());
    }
    let fact = &facts[idx];
    if !hg.blocks(kept, fact) {
        kept.insert(fact.clone());
        enumerate(hg, facts, conflicting, idx + 1, kept, excluded, out, cap)?;
        kept.remove(fact);
        // a fact in no conflict at all belongs to every repair
        if !conflicting[idx] {
            return Ok(());
        }
    }
    excluded.push(fact);
    enumerate(hg, facts, conflicting, idx + 1, kept, excluded, out, cap)?;
    excluded.pop();
    Ok(())
}

/// A deterministic pseudorandom permutation of the instance, for seeded
/// repair construction.
pub fn seeded_order(instance: &Instance, seed: u64) -> Vec<Fact> {
    let mut order: Vec<Fact> = instance.iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order
}
