//! Graph neural network stage: GCN message passing over the word graph,
//! attention pooling of each entity's mention nodes, and the fusion
//! rules combining base and graph entity embeddings.

mod fuse;
mod gat;
mod gcn;

pub use fuse::{fuse, fuse_backward, FusionMethod};
pub use gat::{gat_aggregate, GatOutput, GatParams};
pub use gcn::{gcn_layer, gcn_layer_normalized, Activation, GcnLayerParams};

use ndarray::Array1;

#[derive(Debug, thiserror::Error)]
pub enum GnnError {
    #[error("dimension mismatch: {context} expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("entity has no mention nodes to aggregate")]
    EmptyMentionSet,
}

/// Per-entity embedding bundle: the pooled encoder embedding over the
/// original span (`base`), the attention-pooled graph embedding over
/// all mention nodes (`graph`, absent when the GNN stage is bypassed),
/// and the fused vector the classifier consumes.
#[derive(Debug, Clone)]
pub struct EntityEmbeddingSet {
    pub entity_id: usize,
    pub base: Array1<f64>,
    pub graph: Option<Array1<f64>>,
    pub fused: Array1<f64>,
}
