use crate::model::Fact;

/// Errors reported by the library.
///
/// `Parse` and `Input` describe malformed user data, `Argument` describes a
/// bad call (for example a choice sequence that is not a permutation), and
/// `EnumerationLimit` is a resource cap, distinct from an empty result.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("type error: {0}")]
    Type(String),

    #[error("priority relation is cyclic: {}", render_cycle(.0))]
    PriorityCycle(Vec<Fact>),

    #[error("priority pair relates non-neighboring facts: {0}")]
    NonNeighborPair(String),

    #[error("more than {cap} repairs; raise the cap to enumerate this instance")]
    EnumerationLimit { cap: usize },

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn render_cycle(cycle: &[Fact]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|f| f.to_string()).collect();
    if let Some(first) = parts.first().cloned() {
        parts.push(first);
    }
    parts.join(" > ")
}
