//! The three families of preferred repairs: globally optimal, Pareto
//! optimal, and common optimal, with dominance tests, membership tests, and
//! constructive algorithms for each family.

use crate::context::RepairContext;
use crate::error::{Error, Result};
use crate::model::{Fact, Instance};
use crate::priority::Priority;
use crate::repair::{all_repairs, seeded_order};

/// Which notion of optimality to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    Global,
    Pareto,
    Common,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Global, Family::Pareto, Family::Common];

    pub fn name(self) -> &'static str {
        match self {
            Family::Global => "global",
            Family::Pareto => "pareto",
            Family::Common => "common",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Global improvement: every fact of `b` missing from `a` is beaten by some
/// fact of `a` missing from `b`. Comparing a set with itself is an error.
pub fn dominates_g(a: &Instance, b: &Instance, p: &Priority) -> Result<bool> {
    if a == b {
        return Err(Error::Argument("dominance compares two distinct sets".to_string()));
    }
    Ok(b.difference(a)
        .all(|x| a.difference(b).any(|y| p.prefers(y, x))))
}

/// Pareto improvement: some fact of `a` missing from `b` beats every fact of
/// `b` missing from `a`. Comparing a set with itself is an error.
pub fn dominates_p(a: &Instance, b: &Instance, p: &Priority) -> Result<bool> {
    if a == b {
        return Err(Error::Argument("dominance compares two distinct sets".to_string()));
    }
    Ok(a.difference(b)
        .any(|y| b.difference(a).all(|x| p.prefers(y, x))))
}

/// True iff no repair in `all` globally improves on `r`.
pub fn is_globally_optimal(r: &Instance, all: &[Instance], p: &Priority) -> bool {
    all.iter()
        .filter(|other| *other != r)
        .all(|other| !dominates_g(other, r, p).unwrap_or(false))
}

/// True iff no repair Pareto-improves on the repair `r`. Uses the
/// single-fact criterion: `r` can be Pareto-improved iff some fact `y`
/// outside it beats a member of every conflict inside `r` plus `y`, so no
/// enumeration of repairs is needed.
pub fn is_pareto_optimal(r: &Instance, ctx: &RepairContext) -> bool {
    let improving = ctx.instance.difference(r).any(|y| {
        let mut extended = r.clone();
        extended.insert(y.clone());
        ctx.hypergraph
            .edges()
            .iter()
            .filter(|e| e.iter().all(|f| extended.contains(f)))
            .all(|e| e.iter().any(|x| ctx.priority.prefers(y, x)))
    });
    !improving
}

/// True iff some total acyclic extension of the priority makes `r` the
/// result of every greedy run, that is, `r` is common optimal. Peels the
/// instance: a run ending in `r` may pick a fact outside `r` only once the
/// kept facts block it, and may keep only undominated members of `r`. Both
/// kinds of pick are safe to take as soon as they are available, because
/// the kept set only grows and shrinking the remainder never dominates a
/// fact that was undominated, so the peel needs no backtracking: `r` is
/// common optimal iff the peel drains the instance.
pub fn is_common_optimal(r: &Instance, ctx: &RepairContext) -> bool {
    let mut remaining = ctx.instance.clone();
    let mut kept = Instance::new();
    while !remaining.is_empty() {
        let winnow = ctx.priority.winnow(&remaining);
        let pick = winnow
            .iter()
            .find(|f| !r.contains(*f) && ctx.hypergraph.blocks(&kept, f))
            .or_else(|| winnow.iter().find(|f| r.contains(*f)))
            .cloned();
        match pick {
            Some(fact) => {
                if r.contains(&fact) {
                    kept.insert(fact.clone());
                }
                remaining.remove(&fact);
            }
            None => return false,
        }
    }
    true
}

/// Family membership for a repair. The globally optimal test enumerates all
/// repairs, bounded by `cap`.
pub fn is_preferred(r: &Instance, ctx: &RepairContext, family: Family, cap: usize) -> Result<bool> {
    match family {
        Family::Global => {
            let all = all_repairs(&ctx.hypergraph, cap)?;
            Ok(is_globally_optimal(r, &all, &ctx.priority))
        }
        Family::Pareto => Ok(is_pareto_optimal(r, ctx)),
        Family::Common => Ok(is_common_optimal(r, ctx)),
    }
}

/// All repairs of the family, sorted. Enumerates every repair first,
/// bounded by `cap`.
pub fn preferred_repairs(ctx: &RepairContext, family: Family, cap: usize) -> Result<Vec<Instance>> {
    let all = all_repairs(&ctx.hypergraph, cap)?;
    let mut out = Vec::new();
    for r in &all {
        let keep = match family {
            Family::Global => is_globally_optimal(r, &all, &ctx.priority),
            Family::Pareto => is_pareto_optimal(r, ctx),
            Family::Common => is_common_optimal(r, ctx),
        };
        if keep {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// How many improvement candidates the globally optimal search will try
/// before falling back to full enumeration.
const GLOBAL_IMPROVEMENT_BUDGET: usize = 100_000;

/// Builds a globally optimal repair. Starts from the repair induced by a
/// seeded order, then repeatedly replaces the facts beaten by some
/// consistent outside set and re-extends, which strictly ascends in the
/// global improvement order and therefore terminates. If the candidate scan
/// would grow past its budget the search falls back to climbing over the
/// enumerated repairs, bounded by `cap`.
pub fn build_global_repair(ctx: &RepairContext, seed: u64, cap: usize) -> Result<Instance> {
    let mut current = greedy(ctx, &seeded_order(&ctx.instance, seed));
    loop {
        match find_global_improvement(ctx, &current) {
            ImprovementScan::Found(next) => current = next,
            ImprovementScan::None => return Ok(current),
            ImprovementScan::BudgetExhausted => return climb(ctx, current, cap),
        }
    }
}

enum ImprovementScan {
    Found(Instance),
    None,
    BudgetExhausted,
}

/// Scans nonempty subsets `y` of the facts outside `current`, in ascending
/// size. For each consistent `y`, removing exactly the facts `y` beats is
/// the most permissive replacement: if even that set is inconsistent, every
/// smaller removal is too. Any hit is extended back to a repair that
/// globally improves on `current`.
fn find_global_improvement(ctx: &RepairContext, current: &Instance) -> ImprovementScan {
    let outside: Vec<Fact> = ctx.instance.difference(current).cloned().collect();
    let mut budget = GLOBAL_IMPROVEMENT_BUDGET;
    for size in 1..=outside.len() {
        let mut pick: Vec<usize> = Vec::with_capacity(size);
        match scan_subsets(ctx, current, &outside, size, 0, &mut pick, &mut budget) {
            ImprovementScan::None => continue,
            other => return other,
        }
    }
    ImprovementScan::None
}

fn scan_subsets(
    ctx: &RepairContext,
    current: &Instance,
    outside: &[Fact],
    size: usize,
    from: usize,
    pick: &mut Vec<usize>,
    budget: &mut usize,
) -> ImprovementScan {
    if pick.len() == size {
        if *budget == 0 {
            return ImprovementScan::BudgetExhausted;
        }
        *budget -= 1;
        let y: Instance = pick.iter().map(|i| outside[*i].clone()).collect();
        if !ctx.hypergraph.consistent_subset(&y) {
            return ImprovementScan::None;
        }
        let beaten: Instance = current
            .iter()
            .filter(|x| y.iter().any(|f| ctx.priority.prefers(f, x)))
            .cloned()
            .collect();
        if beaten.is_empty() {
            return ImprovementScan::None;
        }
        let mut core: Instance = current.difference(&beaten).cloned().collect();
        core.extend(y.iter().cloned());
        if !ctx.hypergraph.consistent_subset(&core) {
            return ImprovementScan::None;
        }
        let mut order: Vec<Fact> = core.iter().cloned().collect();
        order.extend(ctx.instance.difference(&core).cloned());
        return ImprovementScan::Found(greedy(ctx, &order));
    }
    for i in from..outside.len() {
        pick.push(i);
        let result = scan_subsets(ctx, current, outside, size, i + 1, pick, budget);
        pick.pop();
        match result {
            ImprovementScan::None => {}
            other => return other,
        }
    }
    ImprovementScan::None
}

/// Repeatedly replaces the current repair by any enumerated repair that
/// globally improves on it; cycles are impossible, so this stops at a
/// globally optimal repair.
fn climb(ctx: &RepairContext, mut current: Instance, cap: usize) -> Result<Instance> {
    let all = all_repairs(&ctx.hypergraph, cap)?;
    'outer: loop {
        for r in &all {
            if *r != current && dominates_g(r, &current, &ctx.priority)? {
                current = r.clone();
                continue 'outer;
            }
        }
        return Ok(current);
    }
}

/// Builds a Pareto optimal repair: the seeded greedy repair if it already is
/// one, otherwise a common optimal repair, which is always Pareto optimal.
pub fn build_pareto_repair(ctx: &RepairContext, seed: u64) -> Result<Instance> {
    let candidate = greedy(ctx, &seeded_order(&ctx.instance, seed));
    if is_pareto_optimal(&candidate, ctx) {
        return Ok(candidate);
    }
    build_common_repair(ctx, None, seed)
}

/// Builds a common optimal repair by the winnow-guided greedy: every step
/// picks a currently undominated fact, keeps it unless blocked, and removes
/// it from consideration. With `choices` the caller fixes the sequence,
/// which must pick a winnow member at every step and drain the instance;
/// otherwise a seeded order breaks ties.
pub fn build_common_repair(
    ctx: &RepairContext,
    choices: Option<&[Fact]>,
    seed: u64,
) -> Result<Instance> {
    let mut remaining = ctx.instance.clone();
    let mut kept = Instance::new();
    match choices {
        Some(seq) => {
            if seq.len() != remaining.len() {
                return Err(Error::Argument(format!(
                    "choice sequence has {} entries for {} facts",
                    seq.len(),
                    remaining.len()
                )));
            }
            for (step, fact) in seq.iter().enumerate() {
                let winnow = ctx.priority.winnow(&remaining);
                if !winnow.contains(fact) {
                    return Err(Error::Argument(format!(
                        "step {}: {fact} is not an undominated remaining fact",
                        step + 1
                    )));
                }
                if !ctx.hypergraph.blocks(&kept, fact) {
                    kept.insert(fact.clone());
                }
                remaining.remove(fact);
            }
        }
        None => {
            let order = seeded_order(&ctx.instance, seed);
            while !remaining.is_empty() {
                let winnow = ctx.priority.winnow(&remaining);
                let fact = order
                    .iter()
                    .find(|f| winnow.contains(*f))
                    .expect("winnow of a nonempty set is nonempty")
                    .clone();
                if !ctx.hypergraph.blocks(&kept, &fact) {
                    kept.insert(fact.clone());
                }
                remaining.remove(&fact);
            }
        }
    }
    Ok(kept)
}

/// The repair induced by walking `order` and keeping every fact the kept
/// ones do not block.
fn greedy(ctx: &RepairContext, order: &[Fact]) -> Instance {
    let mut kept = Instance::new();
    for fact in order {
        if !ctx.hypergraph.blocks(&kept, fact) {
            kept.insert(fact.clone());
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::fixtures::{example1, example2, fact_set, fig5, mgr};
    use crate::priority::PriorityMode;
    use crate::repair::DEFAULT_REPAIR_CAP;

    fn ctx2() -> RepairContext {
        let fx = example2();
        RepairContext::new(
            fx.schema.clone(),
            fx.instance.clone(),
            fx.constraints.clone(),
            &fx.priority_pairs(),
            PriorityMode::Strict,
        )
        .unwrap()
    }

    fn ctx1() -> RepairContext {
        let fx = example1();
        RepairContext::new(
            fx.schema.clone(),
            fx.instance.clone(),
            fx.constraints.clone(),
            &fx.priority_pairs(),
            PriorityMode::Strict,
        )
        .unwrap()
    }

    fn ctx5() -> RepairContext {
        let fx = fig5();
        RepairContext::new(
            fx.schema.clone(),
            fx.instance.clone(),
            fx.constraints.clone(),
            &fx.priority_pairs(),
            PriorityMode::Strict,
        )
        .unwrap()
    }

    #[test]
    fn dominance_on_the_manager_repairs() {
        let fx = example2();
        let ctx = ctx2();
        let [i1, i2, i3, _] = fx.repairs();
        assert!(dominates_g(&i1, &i2, &ctx.priority).unwrap());
        assert!(!dominates_g(&i2, &i1, &ctx.priority).unwrap());
        assert!(dominates_g(&i1, &i3, &ctx.priority).unwrap());
        assert!(!dominates_p(&i1, &i2, &ctx.priority).unwrap());
        assert!(!dominates_p(&i1, &i3, &ctx.priority).unwrap());
        assert!(dominates_p(&i2, &i3, &ctx.priority).unwrap());
    }

    #[test]
    fn dominance_rejects_self_comparison() {
        let fx = example2();
        let ctx = ctx2();
        let r = fx.repairs()[0].clone();
        assert!(matches!(dominates_g(&r, &r, &ctx.priority), Err(Error::Argument(_))));
        assert!(matches!(dominates_p(&r, &r, &ctx.priority), Err(Error::Argument(_))));
    }

    #[test]
    fn dominance_on_raw_sets_handles_empty_differences() {
        let ctx = ctx2();
        let big = fact_set(&[mgr("Bob", 70, "R&D"), mgr("Mary", 50, "PR")]);
        let small = fact_set(&[mgr("Bob", 70, "R&D")]);
        // nothing in the smaller set is missing from the bigger one
        assert!(dominates_g(&big, &small, &ctx.priority).unwrap());
        assert!(dominates_p(&big, &small, &ctx.priority).unwrap());
        assert!(!dominates_p(&small, &big, &ctx.priority).unwrap());
    }

    #[test]
    fn pareto_improvement_implies_global_improvement() {
        let fx = example2();
        let ctx = ctx2();
        let repairs = fx.repairs();
        for a in &repairs {
            for b in &repairs {
                if a == b {
                    continue;
                }
                if dominates_p(a, b, &ctx.priority).unwrap() {
                    assert!(dominates_g(a, b, &ctx.priority).unwrap());
                }
            }
        }
    }

    #[test]
    fn the_manager_database_family_landscape() {
        let fx = example2();
        let ctx = ctx2();
        let [i1, i2, i3, i4] = fx.repairs();
        assert_eq!(
            preferred_repairs(&ctx, Family::Global, DEFAULT_REPAIR_CAP).unwrap(),
            vec![i1.clone()]
        );
        let pareto = preferred_repairs(&ctx, Family::Pareto, DEFAULT_REPAIR_CAP).unwrap();
        assert_eq!(
            pareto.iter().cloned().collect::<BTreeSet<_>>(),
            [i1.clone(), i2.clone()].into_iter().collect()
        );
        assert_eq!(
            preferred_repairs(&ctx, Family::Common, DEFAULT_REPAIR_CAP).unwrap(),
            vec![i1.clone()]
        );
        assert!(!is_pareto_optimal(&i3, &ctx));
        assert!(!is_pareto_optimal(&i4, &ctx));
    }

    #[test]
    fn the_company_database_family_landscape() {
        let fx = example1();
        let ctx = ctx1();
        let [i1, i2, i3] = fx.repairs();
        let global = preferred_repairs(&ctx, Family::Global, DEFAULT_REPAIR_CAP).unwrap();
        let expected: BTreeSet<Instance> = [i2.clone(), i3.clone()].into_iter().collect();
        assert_eq!(global.into_iter().collect::<BTreeSet<_>>(), expected);
        assert!(!is_pareto_optimal(&i1, &ctx));
        let pareto = preferred_repairs(&ctx, Family::Pareto, DEFAULT_REPAIR_CAP).unwrap();
        assert_eq!(pareto.into_iter().collect::<BTreeSet<_>>(), expected);
        let common = preferred_repairs(&ctx, Family::Common, DEFAULT_REPAIR_CAP).unwrap();
        assert_eq!(common.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn the_two_dependency_database_separates_common_from_global() {
        let fx = fig5();
        let ctx = ctx5();
        let [r1, r2, r34] = fx.repairs();
        let global = preferred_repairs(&ctx, Family::Global, DEFAULT_REPAIR_CAP).unwrap();
        assert_eq!(global.len(), 3);
        let pareto = preferred_repairs(&ctx, Family::Pareto, DEFAULT_REPAIR_CAP).unwrap();
        assert_eq!(pareto.len(), 3);
        let common = preferred_repairs(&ctx, Family::Common, DEFAULT_REPAIR_CAP).unwrap();
        assert_eq!(
            common.into_iter().collect::<BTreeSet<_>>(),
            [r1.clone(), r2.clone()].into_iter().collect()
        );
        assert!(!is_common_optimal(&r34, &ctx));
        assert!(is_common_optimal(&r1, &ctx));
        assert!(is_common_optimal(&r2, &ctx));
    }

    #[test]
    fn common_optimality_needs_backtracking_over_discarded_facts() {
        use crate::model::{attr, Atom, BuiltinFormula, Domain, Schema, Term, Value};
        // conflicts {a, c} and {a, b}, priority a over b; the repair {b, c}
        // is reached only by discarding a after c was kept
        let mut schema = Schema::new();
        schema.add_relation("R", vec![attr("A", Domain::Rational)]).unwrap();
        let r = |i: i64| Fact::new("R", vec![Value::int(i)]);
        let (a, b, c) = (r(1), r(2), r(3));
        let edge = |x: &Fact, y: &Fact| {
            crate::model::Constraint::Denial(crate::model::DenialConstraint::new(
                vec![
                    Atom::new("R", vec![Term::Lit(x.args[0].clone())]),
                    Atom::new("R", vec![Term::Lit(y.args[0].clone())]),
                ],
                BuiltinFormula::True,
            ))
        };
        let instance: Instance = [a.clone(), b.clone(), c.clone()].into_iter().collect();
        let ctx = RepairContext::new(
            schema,
            instance,
            vec![edge(&a, &c), edge(&a, &b)],
            &[(a.clone(), b.clone())],
            PriorityMode::Strict,
        )
        .unwrap();
        let bc = fact_set(&[b.clone(), c.clone()]);
        assert!(ctx.is_repair(&bc).unwrap());
        assert!(is_common_optimal(&bc, &ctx));
        assert!(is_common_optimal(&fact_set(&[a.clone()]), &ctx));
    }

    #[test]
    fn build_common_follows_explicit_choices_and_validates_them() {
        let fx = example2();
        let ctx = ctx2();
        let choices = vec![
            mgr("Bob", 70, "R&D"),
            mgr("Mary", 50, "PR"),
            mgr("Ken", 60, "IT"),
            mgr("Bob", 60, "AD"),
            mgr("Mary", 40, "IT"),
            mgr("Ken", 50, "PR"),
        ];
        assert_eq!(
            build_common_repair(&ctx, Some(&choices), 0).unwrap(),
            fx.repairs()[0]
        );
        // the dominated fact cannot be the first pick
        let bad = vec![
            mgr("Bob", 60, "AD"),
            mgr("Bob", 70, "R&D"),
            mgr("Mary", 50, "PR"),
            mgr("Ken", 60, "IT"),
            mgr("Mary", 40, "IT"),
            mgr("Ken", 50, "PR"),
        ];
        let err = build_common_repair(&ctx, Some(&bad), 0).unwrap_err();
        match err {
            Error::Argument(msg) => assert!(msg.contains("step 1"), "got: {msg}"),
            other => panic!("expected an argument error, got {other}"),
        }
        let short = choices[..3].to_vec();
        assert!(matches!(
            build_common_repair(&ctx, Some(&short), 0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn build_common_first_choice_determines_the_two_dependency_result() {
        let fx = fig5();
        let ctx = ctx5();
        let choices = vec![fx.t(1), fx.t(2), fx.t(3), fx.t(4)];
        assert_eq!(build_common_repair(&ctx, Some(&choices), 0).unwrap(), fx.repairs()[0]);
        let choices = vec![fx.t(2), fx.t(1), fx.t(3), fx.t(4)];
        assert_eq!(build_common_repair(&ctx, Some(&choices), 0).unwrap(), fx.repairs()[1]);
    }

    #[test]
    fn seeded_builders_land_in_their_families() {
        let ctx = ctx2();
        let all = ctx.all_repairs(DEFAULT_REPAIR_CAP).unwrap();
        for seed in 0..24 {
            let g = build_global_repair(&ctx, seed, DEFAULT_REPAIR_CAP).unwrap();
            assert!(is_globally_optimal(&g, &all, &ctx.priority));
            let p = build_pareto_repair(&ctx, seed).unwrap();
            assert!(is_pareto_optimal(&p, &ctx));
            let c = build_common_repair(&ctx, None, seed).unwrap();
            assert!(is_common_optimal(&c, &ctx));
        }
        let ctx = ctx5();
        let all = ctx.all_repairs(DEFAULT_REPAIR_CAP).unwrap();
        for seed in 0..12 {
            let g = build_global_repair(&ctx, seed, DEFAULT_REPAIR_CAP).unwrap();
            assert!(is_globally_optimal(&g, &all, &ctx.priority));
            let c = build_common_repair(&ctx, None, seed).unwrap();
            assert!(is_common_optimal(&c, &ctx));
        }
    }

    #[test]
    fn global_builder_climbs_out_of_dominated_repairs() {
        let fx = example1();
        let ctx = ctx1();
        let grep: BTreeSet<Instance> = [fx.repairs()[1].clone(), fx.repairs()[2].clone()]
            .into_iter()
            .collect();
        for seed in 0..24 {
            let g = build_global_repair(&ctx, seed, DEFAULT_REPAIR_CAP).unwrap();
            assert!(grep.contains(&g), "seed {seed} produced {g:?}");
        }
    }

    #[test]
    fn empty_priority_makes_every_repair_preferred() {
        let fx = example2();
        let ctx = RepairContext::new(
            fx.schema,
            fx.instance,
            fx.constraints,
            &[],
            PriorityMode::Strict,
        )
        .unwrap();
        let all = ctx.all_repairs(DEFAULT_REPAIR_CAP).unwrap();
        for family in Family::ALL {
            let fam = preferred_repairs(&ctx, family, DEFAULT_REPAIR_CAP).unwrap();
            assert_eq!(fam, all, "family {family}");
        }
    }

    #[test]
    fn consistent_instances_have_themselves_as_the_only_preferred_repair() {
        let fx = example2();
        let repair = fx.repairs()[0].clone();
        let ctx = RepairContext::new(
            fx.schema,
            repair.clone(),
            fx.constraints,
            &[],
            PriorityMode::Strict,
        )
        .unwrap();
        for family in Family::ALL {
            assert_eq!(
                preferred_repairs(&ctx, family, DEFAULT_REPAIR_CAP).unwrap(),
                vec![repair.clone()]
            );
        }
    }

    #[test]
    fn disjoint_conflicts_with_an_orientation_collapse_the_families() {
        use crate::model::{attr, Atom, BuiltinFormula, Domain, Schema, Term, Value};
        // conflicts {R(1),R(2)} and {R(3),R(4)}, priority R(1) over R(2):
        // every total extension is acyclic, so all families coincide
        let mut schema = Schema::new();
        schema.add_relation("R", vec![attr("A", Domain::Rational)]).unwrap();
        let r = |i: i64| Fact::new("R", vec![Value::int(i)]);
        let edge = |x: i64, y: i64| {
            crate::model::Constraint::Denial(crate::model::DenialConstraint::new(
                vec![
                    Atom::new("R", vec![Term::Lit(Value::int(x))]),
                    Atom::new("R", vec![Term::Lit(Value::int(y))]),
                ],
                BuiltinFormula::True,
            ))
        };
        let instance: Instance = (1..=4).map(r).collect();
        let ctx = RepairContext::new(
            schema,
            instance,
            vec![edge(1, 2), edge(3, 4)],
            &[(r(1), r(2))],
            PriorityMode::Strict,
        )
        .unwrap();
        let expected: BTreeSet<Instance> = [
            fact_set(&[r(1), r(3)]),
            fact_set(&[r(1), r(4)]),
        ]
        .into_iter()
        .collect();
        for family in Family::ALL {
            let fam = preferred_repairs(&ctx, family, DEFAULT_REPAIR_CAP).unwrap();
            assert_eq!(fam.into_iter().collect::<BTreeSet<_>>(), expected, "family {family}");
        }
    }

    #[test]
    fn a_single_key_dependency_collapses_the_families() {
        let fx = example1();
        let key_only = vec![fx.constraints[0].clone()];
        let instance = fx.instance.clone();
        let pairs = vec![(fx.emp(80), fx.emp(50))];
        let expected: BTreeSet<Instance> = [
            fact_set(&[fx.emp(80), fx.mary()]),
            fact_set(&[fx.emp(40), fx.mary()]),
        ]
        .into_iter()
        .collect();
        let ctx = RepairContext::new(fx.schema, instance, key_only, &pairs, PriorityMode::Strict)
            .unwrap();
        let global = preferred_repairs(&ctx, Family::Global, DEFAULT_REPAIR_CAP).unwrap();
        for family in [Family::Pareto, Family::Common] {
            assert_eq!(
                preferred_repairs(&ctx, family, DEFAULT_REPAIR_CAP).unwrap(),
                global,
                "family {family}"
            );
        }
        assert_eq!(global.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn family_membership_checks_match_the_enumerated_families() {
        let ctx = ctx5();
        let all = ctx.all_repairs(DEFAULT_REPAIR_CAP).unwrap();
        for family in Family::ALL {
            let fam: BTreeSet<Instance> = preferred_repairs(&ctx, family, DEFAULT_REPAIR_CAP)
                .unwrap()
                .into_iter()
                .collect();
            for r in &all {
                assert_eq!(
                    is_preferred(r, &ctx, family, DEFAULT_REPAIR_CAP).unwrap(),
                    fam.contains(r)
                );
            }
        }
    }
}
