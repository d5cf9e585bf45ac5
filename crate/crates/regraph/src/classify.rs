//! Entity-pair scoring and multi-label decoding.
//!
//! A pair's feature is `[head ; tail ; head ⊙ tail]`; a single linear
//! map produces one logit per relation label, read through sigmoids as
//! independent per-label probabilities. The decoder collects labels
//! above threshold and falls back to RELATED-TO when nothing clears it,
//! which is the only way RELATED-TO ever enters a prediction — keeping
//! it exclusive by construction.

use crate::corpus::Label;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("dimension mismatch: {context} expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Linear pair scorer: weight is (17 x 3d), bias is (17).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairScorerParams {
    pub weight: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl PairScorerParams {
    pub fn zeros(dim: usize) -> Self {
        PairScorerParams {
            weight: vec![vec![0.0; 3 * dim]; Label::COUNT],
            bias: vec![0.0; Label::COUNT],
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.weight.first().map_or(0, |row| row.len())
    }
}

/// Scores for one directed entity pair.
#[derive(Debug, Clone)]
pub struct PairScore {
    pub head: usize,
    pub tail: usize,
    pub logits: Array1<f64>,
    pub probabilities: Array1<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Pair feature `[head ; tail ; head ⊙ tail]`.
pub fn pair_feature(head: &Array1<f64>, tail: &Array1<f64>) -> Array1<f64> {
    let d = head.len();
    let mut feature = Array1::zeros(3 * d);
    for k in 0..d {
        feature[k] = head[k];
        feature[d + k] = tail[k];
        feature[2 * d + k] = head[k] * tail[k];
    }
    feature
}

/// Score one directed pair of fused entity embeddings.
pub fn score_pair(
    head_id: usize,
    tail_id: usize,
    head: &Array1<f64>,
    tail: &Array1<f64>,
    params: &PairScorerParams,
) -> Result<PairScore, ClassifyError> {
    if head.len() != tail.len() {
        return Err(ClassifyError::DimensionMismatch {
            context: "head vs tail embedding",
            expected: head.len(),
            got: tail.len(),
        });
    }
    let feature = pair_feature(head, tail);
    if feature.len() != params.feature_dim() {
        return Err(ClassifyError::DimensionMismatch {
            context: "pair feature vs scorer weight",
            expected: params.feature_dim(),
            got: feature.len(),
        });
    }
    let mut logits = Array1::zeros(Label::COUNT);
    for (label_idx, row) in params.weight.iter().enumerate() {
        let mut z = params.bias[label_idx];
        for (k, w) in row.iter().enumerate() {
            z += w * feature[k];
        }
        logits[label_idx] = z;
    }
    let probabilities = logits.mapv(sigmoid);
    Ok(PairScore {
        head: head_id,
        tail: tail_id,
        logits,
        probabilities,
    })
}

/// Probability cutoff for accepting a label.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecodePolicy {
    pub threshold: f64,
}

impl Default for DecodePolicy {
    fn default() -> Self {
        DecodePolicy { threshold: 0.5 }
    }
}

/// Labels with probability above threshold, RELATED-TO excluded from
/// the sweep; when the set comes out empty, RELATED-TO alone.
pub fn decode_labels(score: &PairScore, policy: &DecodePolicy) -> Vec<Label> {
    let mut out: Vec<Label> = Label::ALL
        .iter()
        .filter(|l| **l != Label::RelatedTo)
        .filter(|l| score.probabilities[l.index()] > policy.threshold)
        .copied()
        .collect();
    if out.is_empty() {
        out.push(Label::RelatedTo);
    }
    out
}

/// Single-label variant matching the original benchmark baseline:
/// argmax over all 17 logits.
pub fn decode_argmax(score: &PairScore) -> Label {
    let mut best = 0usize;
    for k in 1..Label::COUNT {
        if score.logits[k] > score.logits[best] {
            best = k;
        }
    }
    Label::ALL[best]
}

/// Indicator vector of a gold label set.
pub fn label_indicator(gold: &[Label]) -> Array1<f64> {
    let mut y = Array1::zeros(Label::COUNT);
    for l in gold {
        y[l.index()] = 1.0;
    }
    y
}

/// Sum of per-label binary cross-entropies, computed from logits for
/// numerical stability: max(z,0) - z*y + ln(1 + exp(-|z|)).
pub fn pair_loss(score: &PairScore, gold: &[Label]) -> f64 {
    let y = label_indicator(gold);
    let mut loss = 0.0;
    for k in 0..Label::COUNT {
        let z = score.logits[k];
        loss += z.max(0.0) - z * y[k] + (-z.abs()).exp().ln_1p();
    }
    loss
}

/// Gradient of [`pair_loss`] with respect to the logits: p - y.
pub fn pair_loss_grad(score: &PairScore, gold: &[Label]) -> Array1<f64> {
    &score.probabilities - &label_indicator(gold)
}

/// Analytic gradients of the loss for one pair with respect to the
/// scorer parameters and the two input embeddings.
pub struct PairGrads {
    pub d_weight: Array2<f64>,
    pub d_bias: Array1<f64>,
    pub d_head: Array1<f64>,
    pub d_tail: Array1<f64>,
}

/// Backward pass through the scorer given dL/dlogits.
pub fn score_pair_backward(
    head: &Array1<f64>,
    tail: &Array1<f64>,
    params: &PairScorerParams,
    d_logits: &Array1<f64>,
) -> PairGrads {
    let d = head.len();
    let feature = pair_feature(head, tail);
    let mut d_weight = Array2::zeros((Label::COUNT, 3 * d));
    let mut d_feature: Array1<f64> = Array1::zeros(3 * d);
    for label_idx in 0..Label::COUNT {
        let g = d_logits[label_idx];
        for k in 0..3 * d {
            d_weight[(label_idx, k)] += g * feature[k];
            d_feature[k] += g * params.weight[label_idx][k];
        }
    }
    let mut d_head = Array1::zeros(d);
    let mut d_tail = Array1::zeros(d);
    for k in 0..d {
        d_head[k] = d_feature[k] + d_feature[2 * d + k] * tail[k];
        d_tail[k] = d_feature[d + k] + d_feature[2 * d + k] * head[k];
    }
    PairGrads {
        d_weight,
        d_bias: d_logits.clone(),
        d_head,
        d_tail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(rng: &mut ChaCha8Rng, dim: usize) -> PairScorerParams {
        PairScorerParams {
            weight: (0..Label::COUNT)
                .map(|_| (0..3 * dim).map(|_| rng.gen_range(-0.5..0.5)).collect())
                .collect(),
            bias: (0..Label::COUNT).map(|_| rng.gen_range(-0.5..0.5)).collect(),
        }
    }

    #[test]
    fn zero_params_give_half_probabilities() {
        let params = PairScorerParams::zeros(4);
        let h = arr1(&[1.0, -2.0, 3.0, 0.5]);
        let t = arr1(&[0.0, 1.0, -1.0, 2.0]);
        let score = score_pair(0, 1, &h, &t, &params).unwrap();
        assert!(score.logits.iter().all(|z| *z == 0.0));
        assert!(score.probabilities.iter().all(|p| (*p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn swapping_head_and_tail_changes_logits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = random_params(&mut rng, 4);
        let h = arr1(&[0.3, -0.8, 1.2, 0.1]);
        let t = arr1(&[-0.5, 0.7, 0.2, -1.1]);
        let fwd = score_pair(0, 1, &h, &t, &params).unwrap();
        let rev = score_pair(1, 0, &t, &h, &params).unwrap();
        assert_ne!(fwd.logits, rev.logits, "direction-sensitive features");
    }

    #[test]
    fn identical_vectors_square_in_hadamard_slot() {
        let h = arr1(&[2.0, -3.0]);
        let feature = pair_feature(&h, &h);
        assert_eq!(feature[4], 4.0);
        assert_eq!(feature[5], 9.0);
    }

    #[test]
    fn low_probabilities_decode_to_related_to() {
        let params = PairScorerParams::zeros(2);
        let mut score = score_pair(0, 1, &arr1(&[0.0, 0.0]), &arr1(&[0.0, 0.0]), &params).unwrap();
        score.probabilities.fill(0.1);
        assert_eq!(
            decode_labels(&score, &DecodePolicy::default()),
            vec![Label::RelatedTo]
        );
    }

    #[test]
    fn single_confident_label_decodes_alone() {
        let params = PairScorerParams::zeros(2);
        let mut score = score_pair(0, 1, &arr1(&[0.0, 0.0]), &arr1(&[0.0, 0.0]), &params).unwrap();
        score.probabilities.fill(0.1);
        score.probabilities[Label::Role.index()] = 0.9;
        assert_eq!(
            decode_labels(&score, &DecodePolicy::default()),
            vec![Label::Role]
        );
    }

    #[test]
    fn multiple_labels_decode_together() {
        let params = PairScorerParams::zeros(2);
        let mut score = score_pair(0, 1, &arr1(&[0.0, 0.0]), &arr1(&[0.0, 0.0]), &params).unwrap();
        score.probabilities.fill(0.1);
        score.probabilities[Label::Role.index()] = 0.8;
        score.probabilities[Label::Usage.index()] = 0.7;
        let decoded = decode_labels(&score, &DecodePolicy::default());
        assert_eq!(decoded.len(), 2);
        assert!(decoded.contains(&Label::Role));
        assert!(decoded.contains(&Label::Usage));
    }

    #[test]
    fn related_to_probability_is_ignored_by_decoder() {
        let params = PairScorerParams::zeros(2);
        let mut score = score_pair(0, 1, &arr1(&[0.0, 0.0]), &arr1(&[0.0, 0.0]), &params).unwrap();
        score.probabilities.fill(0.1);
        score.probabilities[Label::RelatedTo.index()] = 0.99;
        score.probabilities[Label::Topic.index()] = 0.8;
        assert_eq!(
            decode_labels(&score, &DecodePolicy::default()),
            vec![Label::Topic]
        );
    }

    #[test]
    fn perfect_probabilities_drive_loss_to_zero() {
        let params = PairScorerParams::zeros(2);
        let mut score = score_pair(0, 1, &arr1(&[0.0, 0.0]), &arr1(&[0.0, 0.0]), &params).unwrap();
        score.logits.fill(-60.0);
        score.logits[Label::Usage.index()] = 60.0;
        score.probabilities = score.logits.mapv(|z| 1.0 / (1.0 + (-z).exp()));
        let loss = pair_loss(&score, &[Label::Usage]);
        assert!(loss < 1e-12, "loss {loss}");
    }

    #[test]
    fn uniform_half_probabilities_cost_seventeen_ln_two() {
        let params = PairScorerParams::zeros(2);
        let score = score_pair(0, 1, &arr1(&[0.0, 0.0]), &arr1(&[0.0, 0.0]), &params).unwrap();
        let loss = pair_loss(&score, &[Label::Role]);
        let expect = 17.0 * (2.0f64).ln();
        assert!((loss - expect).abs() < 1e-12);
    }

    #[test]
    fn loss_decreases_as_gold_probability_rises() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params = random_params(&mut rng, 3);
        let h = arr1(&[0.2, -0.4, 0.9]);
        let t = arr1(&[-0.3, 0.8, 0.1]);
        let mut score = score_pair(0, 1, &h, &t, &params).unwrap();
        let gold = [Label::Topic];
        let mut last = pair_loss(&score, &gold);
        for step in 1..=5 {
            score.logits[Label::Topic.index()] += 0.5;
            score.probabilities = score.logits.mapv(|z| 1.0 / (1.0 + (-z).exp()));
            let loss = pair_loss(&score, &gold);
            assert!(loss < last, "step {step}: {loss} !< {last}");
            last = loss;
        }
    }
}
