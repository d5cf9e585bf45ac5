//! Graph-convolution layer: neighbor sum scaled by symmetric degree
//! normalization, linear transform, pointwise nonlinearity.
//!
//! For node v the update is sigma( sum_{u in N(v)} (1/c_vu) W h_u )
//! with v in its own neighborhood (the graph carries self-loops) and
//! c_vu = sqrt(deg(v) * deg(u)), degrees counted with self-loops. In
//! matrix form that is sigma(S H W) where S is the normalized
//! adjacency, which is what the dense oracle in the tests checks.

use super::GnnError;
use crate::graph::DocumentGraph;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    #[default]
    Relu,
    Tanh,
}

impl Activation {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative evaluated at the pre-activation value.
    pub fn derivative(&self, pre: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = pre.tanh();
                1.0 - t * t
            }
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(Activation::Identity),
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            other => Err(format!("unknown activation '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GcnLayerParams {
    /// (d_in x d_out)
    pub weight: Array2<f64>,
    pub activation: Activation,
}

/// One GCN layer over a document graph.
pub fn gcn_layer(
    features: &Array2<f64>,
    graph: &DocumentGraph,
    params: &GcnLayerParams,
) -> Result<Array2<f64>, GnnError> {
    if features.nrows() != graph.node_count() {
        return Err(GnnError::DimensionMismatch {
            context: "gcn features rows vs node count",
            expected: graph.node_count(),
            got: features.nrows(),
        });
    }
    gcn_layer_normalized(features, &graph.normalized_adjacency(), params)
}

/// Same layer with the normalized adjacency precomputed; the training
/// loop reuses one matrix across layers and the backward pass.
pub fn gcn_layer_normalized(
    features: &Array2<f64>,
    normalized_adjacency: &Array2<f64>,
    params: &GcnLayerParams,
) -> Result<Array2<f64>, GnnError> {
    if features.ncols() != params.weight.nrows() {
        return Err(GnnError::DimensionMismatch {
            context: "gcn features cols vs weight rows",
            expected: params.weight.nrows(),
            got: features.ncols(),
        });
    }
    let pre = normalized_adjacency.dot(&features.dot(&params.weight));
    Ok(pre.mapv(|x| params.activation.apply(x)))
}
