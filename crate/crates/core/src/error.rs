//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Everything that can go wrong across the tokenizer, the distance
/// measures, the clustering pipeline, and the generator.
#[derive(Debug, Error)]
pub enum Error {
    /// A text exceeded the configured per-text token cap.
    #[error("text '{id}' has {actual} tokens, exceeding the cap of {cap}")]
    TokenCapExceeded {
        id: String,
        actual: usize,
        cap: usize,
    },

    /// A distance was requested on an empty text.
    #[error("text '{id}' is empty; distance is undefined on empty texts")]
    EmptyText { id: String },

    /// Discount factors live in the half-open interval [0, 1).
    #[error("discount factor must satisfy 0 <= lambda < 1, got {value}")]
    InvalidDiscount { value: f64 },

    /// Index pair outside the position-match table.
    #[error("index pair ({i}, {j}) out of range for {rows} x {cols} texts")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },

    /// Materializing the full table is refused above the cap.
    #[error("refusing to materialize a {rows} x {cols} position-match table (cap {cap} x {cap})")]
    TableTooLarge {
        rows: usize,
        cols: usize,
        cap: usize,
    },

    /// Cost matrices must be square.
    #[error("cost matrix must be square: {entries} entries do not fill {n} x {n}")]
    NotSquare { entries: usize, n: usize },

    /// Cost matrices must hold finite, non-negative entries.
    #[error("cost at ({i}, {j}) must be finite and non-negative, got {value}")]
    InvalidCost { i: usize, j: usize, value: f64 },

    /// Exhaustive assignment search is factorial; refuse large inputs.
    #[error("exhaustive assignment search supports n <= {max}, got {n}")]
    ExhaustiveSearchTooLarge { n: usize, max: usize },

    /// The assignment-based distance is only defined for equal lengths.
    #[error("assignment distance requires equal text lengths, got {len_a} and {len_b}")]
    UnequalLengths { len_a: usize, len_b: usize },

    /// Corpus texts must carry distinct ids.
    #[error("duplicate text id '{label}'")]
    DuplicateLabel { label: String },

    /// Pairwise matrices and clustering need at least two texts.
    #[error("need at least {min} texts, got {n}")]
    TooFewTexts { n: usize, min: usize },

    /// A distance-matrix CSV violated the format contract. Row and column
    /// are 1-based file coordinates (the header line is row 1).
    #[error("matrix format error at row {row}, column {col}: {reason}")]
    MatrixFormat {
        row: usize,
        col: usize,
        reason: String,
    },

    /// Flat cuts must request between 1 and leaf-count clusters.
    #[error("cannot cut a {leaves}-leaf dendrogram into {k} clusters")]
    InvalidCut { k: usize, leaves: usize },

    /// A serialized dendrogram could not be parsed.
    #[error("dendrogram format error: {0}")]
    DendrogramFormat(String),

    /// The generator needs at least one 4-gram of training material.
    #[error("training corpus has {tokens} tokens, need at least {min}")]
    CorpusTooShort { tokens: usize, min: usize },

    /// Generated texts start from a 3-token window.
    #[error("generation length must be at least {min}, got {len}")]
    GenerationTooShort { len: usize, min: usize },

    /// Input bytes were not valid in the declared encoding.
    #[error("input is not valid text: {0}")]
    Encoding(String),

    /// Unexpected failure in supporting machinery (serialization sinks,
    /// worker pools).
    #[error("{0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
