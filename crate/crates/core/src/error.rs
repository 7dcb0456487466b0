use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid atom name `{0}`: expected [a-z][A-Za-z0-9_]*")]
    InvalidAtom(String),

    /// Some atom used by an operand is not a member of the alphabet in scope.
    #[error("atoms {} are not in the alphabet", format_atoms(.missing))]
    AlphabetCoverage { missing: Vec<String> },

    #[error("alphabet has {size} atoms, exhaustive sweep is capped at {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("alphabet has {size} atoms, the exhaustive oracle supports at most {max}")]
    OracleBound { size: usize, max: usize },

    #[error("search budget of {budget} steps exhausted before a decision")]
    SearchBudget { budget: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

fn format_atoms(atoms: &[String]) -> String {
    format!("{{{}}}", atoms.join(", "))
}
