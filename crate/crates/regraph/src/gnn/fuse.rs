//! Fusion rules combining an entity's base encoder embedding with its
//! graph-refined embedding. The five variants mirror the ablation rows:
//! `none` is the baseline passthrough, the rest are parameter-free
//! elementwise combinations.

use super::GnnError;
use ndarray::Array1;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FusionMethod {
    #[default]
    None,
    Mean,
    Max,
    Tanh,
    Times,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 5] = [
        FusionMethod::None,
        FusionMethod::Mean,
        FusionMethod::Max,
        FusionMethod::Tanh,
        FusionMethod::Times,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FusionMethod::None => "none",
            FusionMethod::Mean => "mean",
            FusionMethod::Max => "max",
            FusionMethod::Tanh => "tanh",
            FusionMethod::Times => "times",
        }
    }

    /// True when the GNN stage can be skipped entirely.
    pub fn bypasses_gnn(&self) -> bool {
        matches!(self, FusionMethod::None)
    }
}

impl std::fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FusionMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(FusionMethod::None),
            "mean" => Ok(FusionMethod::Mean),
            "max" => Ok(FusionMethod::Max),
            "tanh" => Ok(FusionMethod::Tanh),
            "times" => Ok(FusionMethod::Times),
            other => Err(format!("unknown fusion method '{other}'")),
        }
    }
}

/// Combine base and graph embeddings elementwise.
pub fn fuse(
    base: &Array1<f64>,
    graph: &Array1<f64>,
    method: FusionMethod,
) -> Result<Array1<f64>, GnnError> {
    if base.len() != graph.len() {
        return Err(GnnError::DimensionMismatch {
            context: "fuse vector lengths",
            expected: base.len(),
            got: graph.len(),
        });
    }
    Ok(match method {
        FusionMethod::None => base.clone(),
        FusionMethod::Mean => (base + graph) / 2.0,
        FusionMethod::Max => ndarray::Zip::from(base)
            .and(graph)
            .map_collect(|b, g| b.max(*g)),
        FusionMethod::Tanh => (base + graph).mapv(f64::tanh),
        FusionMethod::Times => base * graph,
    })
}

/// Backward pass of [`fuse`]: split the gradient on the fused vector
/// into gradients on the two inputs. Ties under `max` route to the base
/// side (a subgradient choice).
pub fn fuse_backward(
    base: &Array1<f64>,
    graph: &Array1<f64>,
    method: FusionMethod,
    d_fused: &Array1<f64>,
) -> (Array1<f64>, Array1<f64>) {
    let d = base.len();
    let mut d_base = Array1::zeros(d);
    let mut d_graph = Array1::zeros(d);
    for k in 0..d {
        match method {
            FusionMethod::None => {
                d_base[k] = d_fused[k];
            }
            FusionMethod::Mean => {
                d_base[k] = d_fused[k] / 2.0;
                d_graph[k] = d_fused[k] / 2.0;
            }
            FusionMethod::Max => {
                if base[k] >= graph[k] {
                    d_base[k] = d_fused[k];
                } else {
                    d_graph[k] = d_fused[k];
                }
            }
            FusionMethod::Tanh => {
                let t = (base[k] + graph[k]).tanh();
                let g = d_fused[k] * (1.0 - t * t);
                d_base[k] = g;
                d_graph[k] = g;
            }
            FusionMethod::Times => {
                d_base[k] = d_fused[k] * graph[k];
                d_graph[k] = d_fused[k] * base[k];
            }
        }
    }
    (d_base, d_graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;

    #[test]
    fn mean_is_idempotent_on_equal_inputs() {
        let x = arr1(&[0.5, -2.0, 3.25]);
        assert_eq!(fuse(&x, &x, FusionMethod::Mean).unwrap(), x);
    }

    #[test]
    fn times_absorbs_zero() {
        let x = arr1(&[1.0, -4.0, 9.0]);
        let zero = arr1(&[0.0, 0.0, 0.0]);
        assert_eq!(fuse(&x, &zero, FusionMethod::Times).unwrap(), zero);
    }

    #[test]
    fn max_is_elementwise() {
        let out = fuse(&arr1(&[1.0, -2.0]), &arr1(&[0.0, 3.0]), FusionMethod::Max).unwrap();
        assert_eq!(out, arr1(&[1.0, 3.0]));
    }

    #[test]
    fn none_ignores_graph_side() {
        let base = arr1(&[1.0, 2.0]);
        let graph = arr1(&[-9.0, 9.0]);
        assert_eq!(fuse(&base, &graph, FusionMethod::None).unwrap(), base);
        // and is therefore asymmetric
        assert_ne!(
            fuse(&base, &graph, FusionMethod::None).unwrap(),
            fuse(&graph, &base, FusionMethod::None).unwrap()
        );
    }

    #[test]
    fn tanh_is_tanh_of_sum() {
        let out = fuse(&arr1(&[0.5]), &arr1(&[0.25]), FusionMethod::Tanh).unwrap();
        assert!((out[0] - 0.75f64.tanh()).abs() < 1e-12);
    }

    #[test]
    fn commutative_methods_commute() {
        let a = arr1(&[0.3, -1.2, 2.0]);
        let b = arr1(&[-0.7, 0.9, 2.0]);
        for method in [FusionMethod::Mean, FusionMethod::Max, FusionMethod::Times, FusionMethod::Tanh] {
            assert_eq!(
                fuse(&a, &b, method).unwrap(),
                fuse(&b, &a, method).unwrap(),
                "{method}"
            );
        }
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(matches!(
            fuse(&arr1(&[1.0]), &arr1(&[1.0, 2.0]), FusionMethod::Mean),
            Err(GnnError::DimensionMismatch { .. })
        ));
    }
}
