//! Attention pooling of an entity's mention nodes.
//!
//! Single-head additive attention over the mention set: each mention row
//! m_j gets a score a . tanh(W_att m_j); the softmax of the scores
//! weights a shared linear value transform V m_j. Weights are
//! nonnegative and sum to one, so the output lives in the convex hull
//! of the transformed mentions.

use super::GnnError;
use ndarray::{Array1, Array2, ArrayView2};

#[derive(Debug, Clone)]
pub struct GatParams {
    /// (d_att x d) score transform.
    pub attn: Array2<f64>,
    /// (d_att) scoring vector.
    pub attn_vec: Array1<f64>,
    /// (d x d) shared value transform.
    pub value: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct GatOutput {
    pub vector: Array1<f64>,
    /// Softmax attention weights, one per mention row.
    pub weights: Vec<f64>,
}

/// Aggregate one entity's mention rows (k x d) into a single vector.
pub fn gat_aggregate(mentions: ArrayView2<f64>, params: &GatParams) -> Result<GatOutput, GnnError> {
    let k = mentions.nrows();
    if k == 0 {
        return Err(GnnError::EmptyMentionSet);
    }
    let d = params.value.ncols();
    if mentions.ncols() != d {
        return Err(GnnError::DimensionMismatch {
            context: "gat mention cols vs value dim",
            expected: d,
            got: mentions.ncols(),
        });
    }
    if params.attn.ncols() != d || params.attn.nrows() != params.attn_vec.len() {
        return Err(GnnError::DimensionMismatch {
            context: "gat attention params",
            expected: d,
            got: params.attn.ncols(),
        });
    }

    let scores: Vec<f64> = (0..k)
        .map(|j| {
            let u = params.attn.dot(&mentions.row(j));
            params.attn_vec.dot(&u.mapv(f64::tanh))
        })
        .collect();
    let weights = softmax(&scores);

    let mut vector = Array1::zeros(params.value.nrows());
    for (j, w) in weights.iter().enumerate() {
        vector = vector + params.value.dot(&mentions.row(j)) * *w;
    }
    Ok(GatOutput { vector, weights })
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
