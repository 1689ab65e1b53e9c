//! Dataset construction, baselines, and evaluation for log-statement
//! generation over Java source corpora.
//!
//! The pipeline has four stages, also exposed through the `loglab` CLI:
//!
//! 1. `mine` — walk cloned repository trees, keep projects whose Maven
//!    POM declares a Log4j dependency, and stream all extracted methods
//!    to a JSONL sink.
//! 2. `build` — apply the token-count and dedup filters and produce the
//!    three task datasets (P1 denoising, P2 position, FT full
//!    statement) plus the deterministic 80/10/10 split.
//! 3. `predict` — non-neural baseline predictors over FT inputs.
//! 4. `evaluate` — score any prediction file along the level, position
//!    and message axes and aggregate the report tables.

pub mod baseline;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod jsonl;
pub mod lexer;
pub mod logstmt;
pub mod method;
pub mod miner;

pub use error::{Error, Result};
