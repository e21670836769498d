//! Zero-one matrix patterns: ordered containment, exact extremal numbers,
//! and a constructive embedding procedure for heavy matrices.
//!
//! A matrix `M` contains a pattern `A` when `A` can be obtained from `M` by
//! deleting rows and columns and turning some 1s into 0s. `ex(n, A)` is the
//! largest weight of an `n x n` matrix that does not contain `A`.

mod bits;
pub mod containment;
pub mod convert;
pub mod error;
pub mod extremal;
pub mod matrix;
pub mod pattern;
pub mod pipeline;

pub use containment::{contains, find_embedding, oracle_contains};
pub use convert::{containment_transfer_check, graph_to_matrix, matrix_to_graph, OrderedBipartiteGraph};
pub use error::{Error, Result};
pub use extremal::{ex_exact, ex_lower_random, monotone_checks, ExtremalCertificate, ProofMode};
pub use matrix::Matrix01;
pub use pattern::{Embedding, Pattern};
pub use pipeline::{embed_column_t_partite, embed_via_pipeline, pad_pattern, EmbedPath, PipelineOutcome};
