use thiserror::Error;

/// Syntactic fragment a polynomial algorithm or engine requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    Implication,
    Horn,
    DualHorn,
    TwoSat,
    Affine,
    Affine2,
    EssentiallyNegative,
    EssentiallyPositive,
}

impl std::fmt::Display for Fragment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Fragment::Implication => "IMP",
            Fragment::Horn => "HORN",
            Fragment::DualHorn => "DUALHORN",
            Fragment::TwoSat => "TWOSAT",
            Fragment::Affine => "XOR",
            Fragment::Affine2 => "AFFINE2",
            Fragment::EssentiallyNegative => "EN",
            Fragment::EssentiallyPositive => "EP",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("scope error: {0}")]
    Scope(String),

    #[error("assignment is undefined on variable #{0}")]
    PartialAssignment(u32),

    #[error("formula is not in the {fragment} fragment: {reason}")]
    WrongFragment { fragment: Fragment, reason: String },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("candidate set is not a subset of the hypotheses")]
    NotSubsetOfH,

    #[error("parity constraints are contradictory")]
    UnsatStructure,

    #[error("no definition for relation `{0}`")]
    MissingDefinition(String),

    #[error("invalid definition for `{name}`: {reason}")]
    InvalidDefinition { name: String, reason: String },

    #[error("language cannot express equality")]
    NoEquality,

    #[error("knowledge base core is not 1-valid: {0}")]
    NotOneValid(String),

    #[error("knowledge base has no negative unit clause")]
    NoNegUnit,

    #[error("not a positive 2-CNF formula: {0}")]
    NotPos2Cnf(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn wrong_fragment(fragment: Fragment, reason: impl Into<String>) -> Self {
        Error::WrongFragment {
            fragment,
            reason: reason.into(),
        }
    }
}
