//! Command line front end over the prefrep library: parses the text
//! formats, runs the requested computation, renders a JSON or text report.
//!
//! Exit codes: 0 when the command ran (verdicts like FALSE live in the
//! payload), 2 for input errors, 3 when the repair enumeration cap was hit.
//! Every JSON payload carries `"version": 1` and prints facts as display
//! strings.

use std::fs;
use std::io::{self, Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use prefrep::conflict::is_consistent;
use prefrep::context::RepairContext;
use prefrep::error::Error;
use prefrep::families::{is_preferred, preferred_repairs, Family};
use prefrep::format::{
    parse_database, parse_dimacs, parse_fact_lines, parse_qdimacs, parse_query,
    serialize_database, serialize_query,
};
use prefrep::generators::{
    counter_instance, qbf_reduction, random_pieces, sat_reduction, GeneratedPieces, RandomProfile,
};
use prefrep::model::{Instance, Query};
use prefrep::pcqa::{pcqa_generic, pcqa_single_fd, PcqaReport};
use prefrep::priority::PriorityMode;
use prefrep::repair::DEFAULT_REPAIR_CAP;
use prefrep::Result;

#[derive(Parser)]
#[command(
    name = "prefrep",
    version,
    about = "Preferred repairs and preferred consistent query answers for prioritized inconsistent databases"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PriorityModeArg {
    Strict,
    Lenient,
}

impl From<PriorityModeArg> for PriorityMode {
    fn from(arg: PriorityModeArg) -> PriorityMode {
        match arg {
            PriorityModeArg::Strict => PriorityMode::Strict,
            PriorityModeArg::Lenient => PriorityMode::Lenient,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    All,
    G,
    P,
    C,
}

impl FamilyArg {
    fn families(self) -> Vec<Family> {
        match self {
            FamilyArg::All => Family::ALL.to_vec(),
            FamilyArg::G => vec![Family::Global],
            FamilyArg::P => vec![Family::Pareto],
            FamilyArg::C => vec![Family::Common],
        }
    }
}

#[derive(Args)]
pub struct DbArgs {
    /// Database file, `-` for stdin.
    pub database: String,
    /// Whether invalid priority pairs abort or are dropped.
    #[arg(long, value_enum, default_value_t = PriorityModeArg::Strict)]
    pub priority_mode: PriorityModeArg,
    /// Cap on enumerated repairs.
    #[arg(long, default_value_t = DEFAULT_REPAIR_CAP)]
    pub max_repairs: usize,
}

#[derive(Subcommand)]
pub enum Command {
    /// List the conflicts of the instance.
    Conflicts(DbArgs),
    /// Enumerate all repairs.
    Repairs(DbArgs),
    /// Test whether a fact set is a repair and whether it is preferred.
    Check {
        #[command(flatten)]
        db: DbArgs,
        /// Family to check against.
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// File of fact lines, `-` for stdin.
        #[arg(long)]
        candidate: String,
    },
    /// Enumerate the preferred repairs of a family.
    Preferred {
        #[command(flatten)]
        db: DbArgs,
        /// Family to enumerate.
        #[arg(long, value_enum)]
        family: FamilyArg,
    },
    /// Decide the preferred consistent answer to a closed query.
    Answer {
        #[command(flatten)]
        db: DbArgs,
        /// Family whose preferred repairs the answer ranges over.
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Query text.
        #[arg(long)]
        query: Option<String>,
        /// File holding the query, `-` for stdin.
        #[arg(long)]
        query_file: Option<String>,
        /// Use the single-dependency cluster algorithm.
        #[arg(long)]
        tractable: bool,
        /// Reject queries that are not ground CNF.
        #[arg(long)]
        cnf: bool,
    },
    /// Generate instances and reductions.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand)]
pub enum GenCommand {
    /// The chain instance whose repairs form a long improvement chain.
    Counter {
        /// Number of counter positions.
        #[arg(long)]
        n: usize,
    },
    /// Reduce a DIMACS CNF file to a database and query.
    Sat {
        /// DIMACS file, `-` for stdin.
        input: String,
    },
    /// Reduce a quantified formula file to a database and query.
    Qbf {
        /// QDIMACS-style file, `-` for stdin.
        input: String,
    },
    /// A seeded random database.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        max_facts: usize,
        #[arg(long, default_value_t = 2)]
        max_relations: usize,
        /// Percentage of conflicting pairs to order.
        #[arg(long, default_value_t = 50)]
        priority_percent: u32,
        /// Mix denial constraints in with the dependencies.
        #[arg(long)]
        with_denials: bool,
    },
}

/// Runs a parsed command line, writes the report, returns the exit code.
pub fn run(cli: Cli, out: &mut impl Write) -> i32 {
    match execute(cli) {
        Ok(report) => {
            let _ = out.write_all(report.as_bytes());
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::EnumerationLimit { .. } => 3,
                _ => 2,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<String> {
    let format = cli.format;
    match cli.command {
        Command::Conflicts(db) => {
            let ctx = load_context(&db)?;
            let conflicts: Vec<Vec<String>> =
                ctx.hypergraph.edges().iter().map(|c| fact_strings(c)).collect();
            let payload = json!({
                "version": 1,
                "command": "conflicts",
                "conflicts": conflicts,
                "dropped_pairs": pair_strings(&ctx.dropped_pairs),
            });
            let mut text = format!("conflicts: {}\n", conflicts.len());
            for conflict in &conflicts {
                text.push_str(&conflict.join(" | "));
                text.push('\n');
            }
            push_dropped(&mut text, &ctx);
            Ok(render(format, payload, text))
        }
        Command::Repairs(db) => {
            let ctx = load_context(&db)?;
            let repairs = ctx.all_repairs(db.max_repairs)?;
            let listed: Vec<Vec<String>> = repairs.iter().map(fact_strings).collect();
            let payload = json!({
                "version": 1,
                "command": "repairs",
                "repairs": listed,
                "dropped_pairs": pair_strings(&ctx.dropped_pairs),
            });
            let mut text = format!("repairs: {}\n", listed.len());
            for (i, repair) in listed.iter().enumerate() {
                text.push_str(&format!("{}: {}\n", i + 1, repair.join(" | ")));
            }
            push_dropped(&mut text, &ctx);
            Ok(render(format, payload, text))
        }
        Command::Check { db, family, candidate } => {
            let ctx = load_context(&db)?;
            let candidate = parse_fact_lines(&read_input(&candidate)?, &ctx.schema)?;
            let is_repair = ctx.is_repair(&candidate)?;
            let reason = if is_repair {
                None
            } else if !candidate.is_subset(&ctx.instance) {
                Some("not a subset of the instance")
            } else if !is_consistent(&candidate, &ctx.denials)? {
                Some("not consistent")
            } else {
                Some("not maximal")
            };
            let mut verdicts = serde_json::Map::new();
            let mut text = format!("candidate: {}\n", fact_strings(&candidate).join(" | "));
            text.push_str(&format!("is repair: {is_repair}\n"));
            if let Some(reason) = reason {
                text.push_str(&format!("reason: {reason}\n"));
            }
            for fam in family.families() {
                let preferred =
                    is_repair && is_preferred(&candidate, &ctx, fam, db.max_repairs)?;
                verdicts.insert(fam.name().to_string(), Json::Bool(preferred));
                text.push_str(&format!(
                    "{}: {}\n",
                    fam.name(),
                    if preferred { "preferred" } else { "not preferred" }
                ));
            }
            let payload = json!({
                "version": 1,
                "command": "check",
                "candidate": fact_strings(&candidate),
                "is_repair": is_repair,
                "reason": reason,
                "families": verdicts,
            });
            Ok(render(format, payload, text))
        }
        Command::Preferred { db, family } => {
            let ctx = load_context(&db)?;
            let mut sections = serde_json::Map::new();
            let mut text = String::new();
            for fam in family.families() {
                let repairs = preferred_repairs(&ctx, fam, db.max_repairs)?;
                let listed: Vec<Vec<String>> = repairs.iter().map(fact_strings).collect();
                text.push_str(&format!("{}: {} preferred\n", fam.name(), listed.len()));
                for (i, repair) in listed.iter().enumerate() {
                    text.push_str(&format!("{}: {}\n", i + 1, repair.join(" | ")));
                }
                sections.insert(fam.name().to_string(), json!(listed));
            }
            push_dropped(&mut text, &ctx);
            let payload = json!({
                "version": 1,
                "command": "preferred",
                "families": sections,
                "dropped_pairs": pair_strings(&ctx.dropped_pairs),
            });
            Ok(render(format, payload, text))
        }
        Command::Answer { db, family, query, query_file, tractable, cnf } => {
            let ctx = load_context(&db)?;
            let text_of_query = match (query, query_file) {
                (Some(q), None) => q,
                (None, Some(path)) => read_input(&path)?,
                _ => {
                    return Err(Error::Argument(
                        "provide exactly one of --query and --query-file".into(),
                    ))
                }
            };
            let parsed = parse_query(&text_of_query)?;
            if cnf && !is_ground_cnf(&parsed) {
                return Err(Error::UnsupportedShape(
                    "query is not ground CNF: expected a conjunction of disjunctions of possibly negated ground atoms".into(),
                ));
            }
            let printed = serialize_query(&parsed);
            let mut sections = serde_json::Map::new();
            let mut text = format!("query: {printed}\n");
            text.push_str(&format!(
                "path: {}\n",
                if tractable { "tractable" } else { "generic" }
            ));
            for fam in family.families() {
                let report = if tractable {
                    pcqa_single_fd(
                        &ctx.schema,
                        &ctx.instance,
                        &ctx.constraints,
                        &ctx.priority,
                        &parsed,
                        fam,
                    )?
                } else {
                    pcqa_generic(&ctx, fam, &parsed, db.max_repairs)?
                };
                push_answer_text(&mut text, fam, &report);
                sections.insert(fam.name().to_string(), answer_json(&report));
            }
            let payload = json!({
                "version": 1,
                "command": "answer",
                "query": printed,
                "path": if tractable { "tractable" } else { "generic" },
                "families": sections,
            });
            Ok(render(format, payload, text))
        }
        Command::Gen(what) => gen(format, what),
    }
}

fn gen(format: OutputFormat, what: GenCommand) -> Result<String> {
    match what {
        GenCommand::Counter { n } => {
            let counter = counter_instance(n)?;
            let database = database_text(&counter.pieces);
            let payload = json!({
                "version": 1,
                "command": "gen",
                "kind": "counter",
                "n": n,
                "chain_length": counter.chain.len(),
                "database": database,
            });
            let text = format!(
                "# counter instance n = {n}\n# chain length: {}\n{database}",
                counter.chain.len()
            );
            Ok(render(format, payload, text))
        }
        GenCommand::Sat { input } => {
            let cnf = parse_dimacs(&read_input(&input)?)?;
            let reduction = sat_reduction(&cnf)?;
            let database = database_text(&reduction.pieces);
            let query = serialize_query(&reduction.query);
            let payload = json!({
                "version": 1,
                "command": "gen",
                "kind": "sat",
                "num_vars": cnf.num_vars,
                "num_clauses": cnf.clauses.len(),
                "database": database,
                "query": query,
            });
            let text = format!(
                "# reduction of p cnf {} {}\n# query: {query}\n{database}",
                cnf.num_vars,
                cnf.clauses.len()
            );
            Ok(render(format, payload, text))
        }
        GenCommand::Qbf { input } => {
            let qbf = parse_qdimacs(&read_input(&input)?)?;
            let reduction = qbf_reduction(&qbf)?;
            let database = database_text(&reduction.pieces);
            let query = serialize_query(&reduction.query);
            let payload = json!({
                "version": 1,
                "command": "gen",
                "kind": "qbf",
                "num_universals": qbf.num_universals,
                "num_existentials": qbf.num_existentials,
                "num_clauses": qbf.clauses.len(),
                "database": database,
                "query": query,
            });
            let text = format!(
                "# reduction of u {} over {} variables\n# query: {query}\n{database}",
                qbf.num_universals,
                qbf.num_vars()
            );
            Ok(render(format, payload, text))
        }
        GenCommand::Random { seed, max_facts, max_relations, priority_percent, with_denials } => {
            let profile = RandomProfile {
                max_facts,
                max_relations,
                priority_percent,
                with_denials,
            };
            let pieces = random_pieces(seed, &profile)?;
            let database = database_text(&pieces);
            let payload = json!({
                "version": 1,
                "command": "gen",
                "kind": "random",
                "seed": seed,
                "database": database,
            });
            let text = format!("# seed = {seed}\n{database}");
            Ok(render(format, payload, text))
        }
    }
}

fn load_context(db: &DbArgs) -> Result<RepairContext> {
    parse_database(&read_input(&db.database)?)?.context(db.priority_mode.into())
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Input(format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {path}: {e}")))
    }
}

fn render(format: OutputFormat, payload: Json, text: String) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&payload).expect("payload serializes");
            s.push('\n');
            s
        }
        OutputFormat::Text => text,
    }
}

fn fact_strings(facts: &Instance) -> Vec<String> {
    facts.iter().map(|f| f.to_string()).collect()
}

fn pair_strings(pairs: &[(prefrep::model::Fact, prefrep::model::Fact)]) -> Vec<[String; 2]> {
    pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect()
}

fn push_dropped(text: &mut String, ctx: &RepairContext) {
    if !ctx.dropped_pairs.is_empty() {
        text.push_str(&format!("dropped pairs: {}\n", ctx.dropped_pairs.len()));
    }
}

fn push_answer_text(text: &mut String, family: Family, report: &PcqaReport) {
    text.push_str(&format!("{}: {}\n", family.name(), report.verdict));
    if let Some(witness) = &report.satisfying {
        text.push_str(&format!("satisfying: {}\n", fact_strings(witness).join(" | ")));
    }
    if let Some(witness) = &report.falsifying {
        text.push_str(&format!("falsifying: {}\n", fact_strings(witness).join(" | ")));
    }
    if report.fell_back {
        text.push_str(&format!("{} fell back to the generic evaluator\n", family.name()));
    }
}

fn answer_json(report: &PcqaReport) -> Json {
    json!({
        "verdict": report.verdict.to_string(),
        "satisfying": report.satisfying.as_ref().map(fact_strings),
        "falsifying": report.falsifying.as_ref().map(fact_strings),
        "fell_back": report.fell_back,
    })
}

fn database_text(pieces: &GeneratedPieces) -> String {
    serialize_database(
        &pieces.schema,
        &pieces.instance,
        &pieces.constraints,
        &pieces.priority_pairs,
    )
}

fn is_ground_cnf(query: &Query) -> bool {
    fn literal(q: &Query) -> bool {
        match q {
            Query::Atom(_) => true,
            Query::Not(inner) => matches!(**inner, Query::Atom(_)),
            _ => false,
        }
    }
    fn clause(q: &Query) -> bool {
        match q {
            Query::Or(parts) => parts.iter().all(literal),
            other => literal(other),
        }
    }
    let shape = match query {
        Query::And(parts) => parts.iter().all(clause),
        other => clause(other),
    };
    shape && query.free_variables().is_empty()
}
