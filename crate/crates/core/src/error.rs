use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used by front ends to map errors onto exit codes and
/// HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input data or an utterance the parser cannot accept.
    Input,
    /// An implicit term could not be turned into something concrete.
    Resolution,
    /// Anything else.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("csv error: {0}")]
    Csv(String),
    #[error("duplicate column name '{name}' (collides with '{existing}' after normalization)")]
    DuplicateColumn { name: String, existing: String },
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("attribute '{attribute}' is {actual}, expected {expected}")]
    AttributeKind {
        attribute: String,
        expected: &'static str,
        actual: &'static str,
    },
    #[error("attribute '{0}' has no non-missing values")]
    NoValues(String),
    #[error("formula has {inputs} inputs but {weights} weights")]
    WeightMismatch { inputs: usize, weights: usize },
    #[error("threshold for '{0}' cannot be resolved without column statistics")]
    UnresolvableThreshold(String),
    #[error("percentile {0} is outside [0, 100]")]
    PercentileRange(f64),
    #[error("invalid metadata: {0}")]
    Metadata(String),

    #[error("not a comparison: {}", diagnostics.join("; "))]
    NotAComparison { diagnostics: Vec<String> },
    #[error("comparison uses different attributes for its values ('{first}' vs '{second}')")]
    CrossAttribute { first: String, second: String },
    #[error("unsupported comparison arity: {0}")]
    UnsupportedArity(String),
    #[error("no attribute to compare on in '{0}'")]
    MissingAttribute(String),
    #[error("'{phrase}' is ambiguous: {}", candidates.join(", "))]
    Ambiguous {
        phrase: String,
        candidates: Vec<String>,
    },

    #[error("cannot resolve '{phrase}': {reason}")]
    Unresolvable { phrase: String, reason: String },
    #[error("resolution failed for {}", phrases.iter().map(|p| format!("'{p}'")).collect::<Vec<_>>().join(", "))]
    Plan {
        phrases: Vec<String>,
        #[source]
        first: Box<Error>,
    },
    #[error("no rows left for '{reference}' after applying {predicate}")]
    EmptyResult { reference: String, predicate: String },
    #[error("plan does not match the parsed comparison: {0}")]
    PlanMismatch(String),
    #[error("interpretation index {index} out of range for '{reference}' ({available} available)")]
    InterpretationIndex {
        reference: String,
        index: usize,
        available: usize,
    },
    #[error("unknown reference '{0}'")]
    UnknownReference(String),

    #[error("invalid lexicon: {0}")]
    Lexicon(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            EmptyInput
            | MalformedRow { .. }
            | Csv(_)
            | DuplicateColumn { .. }
            | UnknownAttribute(_)
            | AttributeKind { .. }
            | NoValues(_)
            | WeightMismatch { .. }
            | PercentileRange(_)
            | Metadata(_)
            | NotAComparison { .. }
            | CrossAttribute { .. }
            | UnsupportedArity(_)
            | MissingAttribute(_)
            | Ambiguous { .. }
            | InterpretationIndex { .. }
            | UnknownReference(_) => ErrorClass::Input,
            UnresolvableThreshold(_)
            | Unresolvable { .. }
            | Plan { .. }
            | EmptyResult { .. }
            | PlanMismatch(_) => ErrorClass::Resolution,
            Lexicon(_) | Json(_) | Io(_) => ErrorClass::Internal,
        }
    }

    /// Short machine-readable code for error envelopes.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            EmptyInput => "empty_input",
            MalformedRow { .. } => "malformed_row",
            Csv(_) => "csv",
            DuplicateColumn { .. } => "duplicate_column",
            UnknownAttribute(_) => "unknown_attribute",
            AttributeKind { .. } => "attribute_kind",
            NoValues(_) => "no_values",
            WeightMismatch { .. } => "weight_mismatch",
            UnresolvableThreshold(_) => "unresolvable_threshold",
            PercentileRange(_) => "percentile_range",
            Metadata(_) => "metadata",
            NotAComparison { .. } => "not_a_comparison",
            CrossAttribute { .. } => "cross_attribute",
            UnsupportedArity(_) => "unsupported_arity",
            MissingAttribute(_) => "missing_attribute",
            Ambiguous { .. } => "ambiguous",
            Unresolvable { .. } => "unresolvable",
            Plan { .. } => "plan",
            EmptyResult { .. } => "empty_result",
            PlanMismatch(_) => "plan_mismatch",
            InterpretationIndex { .. } => "interpretation_index",
            UnknownReference(_) => "unknown_reference",
            Lexicon(_) => "lexicon",
            Json(_) => "json",
            Io(_) => "io",
        }
    }
}
