//! Hand-built schemas, instances, and constraint sets reused across the
//! unit tests. Salaries are written in thousands for brevity.

use std::collections::BTreeSet;

use crate::model::{
    attr, Atom, BuiltinFormula, CmpOp, Constraint, Domain, Fact, FunctionalDependency, Instance,
    Schema, Term, Value,
};

pub fn fact_set(facts: &[Fact]) -> BTreeSet<Fact> {
    facts.iter().cloned().collect()
}

pub fn emp(name: &str, thousands: i64, dept: &str) -> Fact {
    Fact::new(
        "Emp",
        vec![
            Value::constant(name),
            Value::int(thousands * 1000),
            Value::constant(dept),
        ],
    )
}

pub fn mgr(name: &str, thousands: i64, dept: &str) -> Fact {
    Fact::new(
        "Mgr",
        vec![
            Value::constant(name),
            Value::int(thousands * 1000),
            Value::constant(dept),
        ],
    )
}

/// A company database with one key dependency on employees and a denial
/// constraint forbidding an employee to out-earn a manager in the same
/// department. Four facts, four conflicts, three repairs.
pub struct Fixture1 {
    pub schema: Schema,
    pub instance: Instance,
    pub constraints: Vec<Constraint>,
}

impl Fixture1 {
    pub fn emp(&self, thousands: i64) -> Fact {
        emp("John", thousands, "IT")
    }

    pub fn mary(&self) -> Fact {
        mgr("Mary", 70, "IT")
    }

    /// The single priority pair: the manager fact over the top salary fact.
    pub fn priority_pairs(&self) -> Vec<(Fact, Fact)> {
        vec![(self.mary(), self.emp(80))]
    }

    pub fn repairs(&self) -> [Instance; 3] {
        [
            fact_set(&[self.emp(80)]),
            fact_set(&[self.emp(50), self.mary()]),
            fact_set(&[self.emp(40), self.mary()]),
        ]
    }
}

pub fn example1() -> Fixture1 {
    let mut schema = Schema::new();
    schema
        .add_relation(
            "Emp",
            vec![
                attr("Name", Domain::Constant),
                attr("Salary", Domain::Rational),
                attr("Dept", Domain::Constant),
            ],
        )
        .unwrap();
    schema
        .add_relation(
            "Mgr",
            vec![
                attr("Name", Domain::Constant),
                attr("Salary", Domain::Rational),
                attr("Dept", Domain::Constant),
            ],
        )
        .unwrap();
    let instance: Instance = [
        emp("John", 40, "IT"),
        emp("John", 50, "IT"),
        emp("John", 80, "IT"),
        mgr("Mary", 70, "IT"),
    ]
    .into_iter()
    .collect();
    let key = FunctionalDependency::new(
        "Emp",
        ["Name"],
        ["Name", "Salary", "Dept"],
    );
    let overpaid = crate::model::DenialConstraint::new(
        vec![
            Atom::new("Emp", vec![Term::var("x"), Term::var("y"), Term::var("z")]),
            Atom::new("Mgr", vec![Term::var("x2"), Term::var("y2"), Term::var("z")]),
        ],
        BuiltinFormula::Cmp(Term::var("y"), CmpOp::Gt, Term::var("y2")),
    );
    let constraints = vec![Constraint::Fd(key), Constraint::Denial(overpaid)];
    Fixture1 {
        schema,
        instance,
        constraints,
    }
}

/// A manager relation with two functional dependencies, Name -> Salary, Dept
/// and Dept -> Name, Salary. Six facts, five conflicts, four repairs.
pub struct Fixture2 {
    pub schema: Schema,
    pub instance: Instance,
    pub constraints: Vec<Constraint>,
}

impl Fixture2 {
    /// The priority pairs: each of Bob's, Mary's, and Ken's better-paid or
    /// later fact over the respective alternative.
    pub fn priority_pairs(&self) -> Vec<(Fact, Fact)> {
        vec![
            (mgr("Bob", 70, "R&D"), mgr("Bob", 60, "AD")),
            (mgr("Mary", 50, "PR"), mgr("Mary", 40, "IT")),
            (mgr("Ken", 60, "IT"), mgr("Ken", 50, "PR")),
        ]
    }

    pub fn repairs(&self) -> [Instance; 4] {
        [
            fact_set(&[mgr("Bob", 70, "R&D"), mgr("Mary", 50, "PR"), mgr("Ken", 60, "IT")]),
            fact_set(&[mgr("Bob", 70, "R&D"), mgr("Mary", 40, "IT"), mgr("Ken", 50, "PR")]),
            fact_set(&[mgr("Bob", 60, "AD"), mgr("Mary", 40, "IT"), mgr("Ken", 50, "PR")]),
            fact_set(&[mgr("Bob", 60, "AD"), mgr("Mary", 50, "PR"), mgr("Ken", 60, "IT")]),
        ]
    }
}

pub fn example2() -> Fixture2 {
    let mut schema = Schema::new();
    schema
        .add_relation(
            "Mgr",
            vec![
                attr("Name", Domain::Constant),
                attr("Salary", Domain::Rational),
                attr("Dept", Domain::Constant),
            ],
        )
        .unwrap();
    let instance: Instance = [
        mgr("Bob", 70, "R&D"),
        mgr("Mary", 40, "IT"),
        mgr("Ken", 60, "IT"),
        mgr("Bob", 60, "AD"),
        mgr("Mary", 50, "PR"),
        mgr("Ken", 50, "PR"),
    ]
    .into_iter()
    .collect();
    let constraints = vec![
        Constraint::Fd(FunctionalDependency::new("Mgr", ["Name"], ["Salary", "Dept"])),
        Constraint::Fd(FunctionalDependency::new("Mgr", ["Dept"], ["Name", "Salary"])),
    ];
    Fixture2 {
        schema,
        instance,
        constraints,
    }
}

/// A four-column relation with two functional dependencies, A -> B and
/// C -> D. Four facts, five binary conflicts, three repairs, all of them
/// globally optimal but only two common optimal.
pub struct Fixture5 {
    pub schema: Schema,
    pub instance: Instance,
    pub constraints: Vec<Constraint>,
}

impl Fixture5 {
    pub fn t(&self, i: usize) -> Fact {
        let rows = [[1, 1, 1, 1], [1, 2, 1, 2], [1, 3, 0, 0], [0, 0, 1, 3]];
        let row = rows[i - 1];
        Fact::new("R", row.iter().map(|v| Value::int(*v)).collect())
    }

    pub fn priority_pairs(&self) -> Vec<(Fact, Fact)> {
        vec![(self.t(1), self.t(3)), (self.t(2), self.t(4))]
    }

    pub fn repairs(&self) -> [Instance; 3] {
        [
            fact_set(&[self.t(1)]),
            fact_set(&[self.t(2)]),
            fact_set(&[self.t(3), self.t(4)]),
        ]
    }
}

pub fn fig5() -> Fixture5 {
    let mut schema = Schema::new();
    schema
        .add_relation(
            "R",
            vec![
                attr("A", Domain::Rational),
                attr("B", Domain::Rational),
                attr("C", Domain::Rational),
                attr("D", Domain::Rational),
            ],
        )
        .unwrap();
    let constraints = vec![
        Constraint::Fd(FunctionalDependency::new("R", ["A"], ["B"])),
        Constraint::Fd(FunctionalDependency::new("R", ["C"], ["D"])),
    ];
    let fx = Fixture5 {
        schema,
        instance: Instance::new(),
        constraints,
    };
    let instance: Instance = (1..=4).map(|i| fx.t(i)).collect();
    Fixture5 { instance, ..fx }
}
