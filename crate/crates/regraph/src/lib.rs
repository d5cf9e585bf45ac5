//! Graph-augmented sentence-level relation extraction.
//!
//! The pipeline ingests CrossRE-style annotated sentences, attaches an
//! LLM-generated support paragraph to each one, builds a word/entity
//! graph over the resulting mini-document, refines node embeddings with
//! GCN message passing, pools each entity's mentions with a small
//! attention head, fuses base and graph entity embeddings, and scores
//! entity pairs against the 17 relation labels. An evaluation harness
//! trains encoder x fusion x domain grids and renders the macro-F1
//! comparison table.
//!
//! Stages are plain functions over immutable data; per-document work
//! runs in parallel when the `parallel` feature (default) is enabled.

pub mod augment;
pub mod classify;
pub mod corpus;
pub mod encode;
pub mod eval;
pub mod gnn;
pub mod graph;
pub mod model;
pub mod par;
pub mod text;
pub mod util;

pub use corpus::{Document, Domain, Label, Split};
