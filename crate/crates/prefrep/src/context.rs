//! A validated bundle of schema, instance, constraints, conflict hypergraph
//! and priority relation, ready for repair computations.

use crate::conflict::ConflictHypergraph;
use crate::error::Result;
use crate::model::{desugar_constraints, Constraint, DenialConstraint, Fact, Instance, Schema};
use crate::priority::{validate_priority, Priority, PriorityMode};
use crate::repair;

#[derive(Clone, Debug)]
pub struct RepairContext {
    pub schema: Schema,
    pub instance: Instance,
    pub constraints: Vec<Constraint>,
    pub denials: Vec<DenialConstraint>,
    pub hypergraph: ConflictHypergraph,
    pub priority: Priority,
    /// Priority pairs dropped during lenient validation.
    pub dropped_pairs: Vec<(Fact, Fact)>,
}

impl RepairContext {
    /// Validates all inputs and precomputes the conflict hypergraph.
    pub fn new(
        schema: Schema,
        instance: Instance,
        constraints: Vec<Constraint>,
        priority_pairs: &[(Fact, Fact)],
        mode: PriorityMode,
    ) -> Result<RepairContext> {
        schema.validate_instance(&instance)?;
        let denials = desugar_constraints(&schema, &constraints)?;
        let hypergraph = ConflictHypergraph::build(&instance, &denials)?;
        let validated = validate_priority(priority_pairs, &hypergraph, mode)?;
        Ok(RepairContext {
            schema,
            instance,
            constraints,
            denials,
            hypergraph,
            priority: validated.priority,
            dropped_pairs: validated.dropped,
        })
    }

    /// The same context under a different priority relation.
    pub fn with_priority_pairs(
        &self,
        priority_pairs: &[(Fact, Fact)],
        mode: PriorityMode,
    ) -> Result<RepairContext> {
        let validated = validate_priority(priority_pairs, &self.hypergraph, mode)?;
        Ok(RepairContext {
            priority: validated.priority,
            dropped_pairs: validated.dropped,
            ..self.clone()
        })
    }

    pub fn all_repairs(&self, cap: usize) -> Result<Vec<Instance>> {
        repair::all_repairs(&self.hypergraph, cap)
    }

    pub fn is_repair(&self, candidate: &Instance) -> Result<bool> {
        crate::conflict::is_repair(candidate, &self.instance, &self.denials)
    }
}
