//! Global, discounting-based inter-textual distances.
//!
//! This crate measures how much two texts look alike as *sequences*, not just
//! as bags of words. A geometric discount factor `lambda` controls how much
//! long shared phrases count relative to isolated shared words: at
//! `lambda = 0` the flagship measure collapses to the classical 1-gram
//! frequency distance, and as `lambda` approaches 1 ever longer shared
//! phrases dominate.
//!
//! On top of the pairwise measures sit corpus tools: a whitespace-splitting
//! tokenizer with aggressive cleanup, parallel pairwise distance matrices,
//! agglomerative clustering with average or Ward linkage plus Newick/JSON
//! dendrograms, and an order-3 Markov generator for synthesizing test
//! corpora.

pub mod assignment;
pub mod cluster;
pub mod dendrogram;
pub mod distance;
pub mod error;
pub mod generate;
pub mod matrix;
pub mod onegram;
pub mod phrase;
pub mod text;

pub use assignment::{brute_force_assignment, solve_assignment, CostMatrix, Permutation};
pub use cluster::{agglomerate, cut, Linkage};
pub use dendrogram::{parse_json, parse_newick, serialize_dendrogram, Dendrogram, TreeFormat};
pub use distance::{
    assignment_distance, assignment_distance_zero_exact, directed_distance, symmetric_distance,
    symmetric_distance_sweep, GlobalDistance, Measure,
};
pub use error::{Error, Result};
pub use generate::{Generated, MarkovModel, Seed};
pub use matrix::{
    pairwise_matrix, pairwise_matrix_sweep, pairwise_matrix_with_jobs, DistanceMatrix,
};
pub use onegram::{onegram_distance, onegram_distance_exact};
pub use phrase::{
    delta, position_match, row_minima, Discount, PositionMatchTable, DEFAULT_TABLE_CAP,
};
pub use text::{
    concat, decode, frequency, read_text_file, tokenize, Encoding, FrequencyTable, Text, Token,
    TokenizeOptions, DEFAULT_TOKEN_CAP,
};
