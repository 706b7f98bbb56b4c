use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Consistent,
    Inconsistent,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Consistent => "consistent",
            Outcome::Inconsistent => "inconsistent",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Dense event indices; present iff consistent.
    pub witness: Option<Vec<usize>>,
    /// Distinct search nodes visited (0 for solvers that do not search).
    pub explored: u64,
    /// Clauses handed to the 2SAT engine, when one was used.
    pub clauses: Option<usize>,
    pub reason: Option<String>,
}

impl Verdict {
    pub fn consistent(witness: Vec<usize>, explored: u64) -> Self {
        Verdict {
            outcome: Outcome::Consistent,
            witness: Some(witness),
            explored,
            clauses: None,
            reason: None,
        }
    }

    pub fn inconsistent(reason: Option<String>, explored: u64) -> Self {
        Verdict {
            outcome: Outcome::Inconsistent,
            witness: None,
            explored,
            clauses: None,
            reason,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.outcome == Outcome::Consistent
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("event {0} has no value; value-based checking needs values on every event")]
    MissingValue(u64),
    #[error("instance has no reads-from relation")]
    MissingRf,
    #[error("solver not applicable: {0}")]
    Refused(String),
    #[error("instance has {n} events, above the oracle bound of {bound}")]
    TooLarge { n: usize, bound: usize },
}
