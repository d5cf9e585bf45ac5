//! Contextual per-word embeddings aligned to graph nodes.
//!
//! Two encoder families sit behind [`AnyEncoder`]:
//!
//! * [`HashedEncoder`] — a deterministic offline featurizer. Subword
//!   pieces hash into a trainable embedding table and each position is
//!   mixed with its neighbors, so identical words in different contexts
//!   get different vectors. This is the encoder the test suites and the
//!   offline pipeline run on, and the one that supports fine-tuning.
//! * [`ExternalEncoder`] — frozen per-mini-document embeddings exported
//!   by a transformer (`bert-base-cased`, `roberta-base`,
//!   `deberta-v3-base`) into a local model directory. See the README
//!   for the export layout.
//!
//! Sequence delimiter tokens occupy the first and last embedding rows
//! and are excluded from word alignment.

mod subword;

pub use subword::{SubwordTokenizer, CLS, DEFAULT_PIECE_LEN, SEP};

use crate::graph::DocumentGraph;
use crate::util::fnv1a;
use ndarray::{Array1, Array2};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Supported model identifiers: `hashed-<dim>` plus the transformer
/// names resolved through a local model directory.
pub const SUPPORTED_MODELS: &[&str] = &[
    "hashed-32",
    "hashed-64",
    "hashed-128",
    "hashed-256",
    "bert-base-cased",
    "roberta-base",
    "deberta-v3-base",
];

pub const DEFAULT_MAX_LENGTH: usize = 256;

/// How the subword rows of one word collapse into its node feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PoolingRule {
    #[default]
    Mean,
    First,
    Max,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub model_name: String,
    pub max_length: usize,
    pub alignment: PoolingRule,
    pub finetune: bool,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            model_name: "hashed-64".to_string(),
            max_length: DEFAULT_MAX_LENGTH,
            alignment: PoolingRule::Mean,
            finetune: true,
        }
    }
}

impl EncoderConfig {
    pub fn named(model_name: &str) -> Self {
        EncoderConfig {
            model_name: model_name.to_string(),
            ..EncoderConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), EncodeError> {
        if !SUPPORTED_MODELS.contains(&self.model_name.as_str()) {
            return Err(EncodeError::UnsupportedModel {
                model: self.model_name.clone(),
            });
        }
        if self.max_length == 0 {
            return Err(EncodeError::InvalidConfig {
                reason: "max_length must be positive".into(),
            });
        }
        Ok(())
    }

    pub fn is_hashed(&self) -> bool {
        self.model_name.starts_with("hashed-")
    }

    pub fn hashed_dim(&self) -> Option<usize> {
        self.model_name.strip_prefix("hashed-")?.parse().ok()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EncodeError {
    #[error("unsupported model '{model}'")]
    UnsupportedModel { model: String },
    #[error("invalid encoder config: {reason}")]
    InvalidConfig { reason: String },
    #[error("the annotated sentence alone needs {needed} subword slots but max_length is {max_length}")]
    TruncationOverflow { needed: usize, max_length: usize },
    #[error("node {node} has no subword alignment ({ranges} word ranges present)")]
    MissingAlignment { node: usize, ranges: usize },
    #[error("model '{model}' not found under {dir}: {reason}")]
    ModelUnavailable {
        model: String,
        dir: PathBuf,
        reason: String,
    },
    #[error("no exported embedding for mini-document {key} (model {model})")]
    MissingEmbedding { model: String, key: String },
    #[error("embedding file {path}: {reason}")]
    BadEmbeddingFile { path: PathBuf, reason: String },
}

/// Per-subword embeddings plus the word-occurrence offset map.
#[derive(Debug, Clone)]
pub struct SubwordEmbedding {
    pub hidden_dim: usize,
    /// One row per subword, delimiters included (first and last row).
    pub vectors: Array2<f64>,
    /// Subword range `[start, end)` per word occurrence, in mini-document
    /// order (sentence-major, word-minor) — matching graph node order.
    pub word_ranges: Vec<(usize, usize)>,
    /// Backprop trace for the hashed encoder: bucket ids per subword row
    /// as `[self, prev, next]` (`usize::MAX` marks no neighbor).
    pub trace: Option<Vec<[usize; 3]>>,
}

/// Node-feature matrix aligned to a [`DocumentGraph`].
#[derive(Debug, Clone)]
pub struct NodeEmbeddingMatrix {
    pub hidden_dim: usize,
    pub matrix: Array2<f64>,
}

// ---------------------------------------------------------------------
// truncation

/// Drop support sentences whole, last first, until the subword budget
/// (including the two delimiter slots) fits `max_length`. The annotated
/// sentence is never dropped; if it alone exceeds the budget the
/// document cannot be encoded.
pub fn truncate_minidoc(
    sentences: &[Vec<String>],
    tokenizer: &SubwordTokenizer,
    max_length: usize,
) -> Result<Vec<Vec<String>>, EncodeError> {
    let budget = max_length.saturating_sub(2);
    let first = tokenizer.sentence_piece_count(&sentences[0]);
    if first > budget {
        return Err(EncodeError::TruncationOverflow {
            needed: first + 2,
            max_length,
        });
    }
    let mut keep = sentences.len();
    let mut total: usize = sentences
        .iter()
        .map(|s| tokenizer.sentence_piece_count(s))
        .sum();
    while total > budget && keep > 1 {
        keep -= 1;
        total -= tokenizer.sentence_piece_count(&sentences[keep]);
    }
    Ok(sentences[..keep].to_vec())
}

// ---------------------------------------------------------------------
// hashed encoder

/// Deterministic trainable featurizer: subword pieces hash into an
/// embedding table (FNV-1a modulo the bucket count) and each position
/// mixes in half of each neighbor, giving context-sensitive vectors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HashedEncoder {
    pub dim: usize,
    pub buckets: usize,
    /// (buckets x dim), trainable when fine-tuning is on.
    pub table: Vec<f64>,
}

pub const DEFAULT_BUCKETS: usize = 1 << 15;
const NEIGHBOR_WEIGHT: f64 = 0.5;

impl HashedEncoder {
    pub fn new(dim: usize, buckets: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_e11c);
        let bound = (3.0f64).sqrt() / (dim as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound);
        let table = (0..buckets * dim).map(|_| dist.sample(&mut rng)).collect();
        HashedEncoder {
            dim,
            buckets,
            table,
        }
    }

    pub fn bucket(&self, piece: &str) -> usize {
        (fnv1a(piece) % self.buckets as u64) as usize
    }

    fn row(&self, bucket: usize) -> &[f64] {
        &self.table[bucket * self.dim..(bucket + 1) * self.dim]
    }

    pub fn row_mut(&mut self, bucket: usize) -> &mut [f64] {
        &mut self.table[bucket * self.dim..(bucket + 1) * self.dim]
    }

    fn encode(
        &self,
        sentences: &[Vec<String>],
        tokenizer: &SubwordTokenizer,
    ) -> SubwordEmbedding {
        let mut pieces: Vec<String> = vec![CLS.to_string()];
        let mut word_ranges = Vec::new();
        for sentence in sentences {
            for word in sentence {
                let start = pieces.len();
                pieces.extend(tokenizer.pieces(word));
                word_ranges.push((start, pieces.len()));
            }
        }
        pieces.push(SEP.to_string());

        let buckets: Vec<usize> = pieces.iter().map(|p| self.bucket(p)).collect();
        let m = pieces.len();
        let mut vectors = Array2::zeros((m, self.dim));
        let mut trace = Vec::with_capacity(m);
        for i in 0..m {
            let prev = if i > 0 { buckets[i - 1] } else { usize::MAX };
            let next = if i + 1 < m { buckets[i + 1] } else { usize::MAX };
            trace.push([buckets[i], prev, next]);
            let mut row = vectors.row_mut(i);
            for (k, value) in self.row(buckets[i]).iter().enumerate() {
                row[k] += value;
            }
            for neighbor in [prev, next] {
                if neighbor != usize::MAX {
                    for (k, value) in self.row(neighbor).iter().enumerate() {
                        row[k] += NEIGHBOR_WEIGHT * value;
                    }
                }
            }
        }
        SubwordEmbedding {
            hidden_dim: self.dim,
            vectors,
            word_ranges,
            trace: Some(trace),
        }
    }
}

// ---------------------------------------------------------------------
// external (precomputed transformer) encoder

/// Frozen embeddings exported by a real transformer into
/// `<models_dir>/<model_name>/`. The directory carries a
/// `manifest.json` with the hidden size; each mini-document resolves to
/// `<sha256 of its sentences>.json` holding subword vectors and word
/// offsets (see README for the exact layout).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalEncoder {
    pub model: String,
    pub dir: PathBuf,
    pub hidden_dim: usize,
}

#[derive(Deserialize)]
struct ExternalManifest {
    hidden_dim: usize,
}

#[derive(Deserialize)]
struct ExternalRecord {
    vectors: Vec<Vec<f64>>,
    word_ranges: Vec<(usize, usize)>,
}

impl ExternalEncoder {
    pub fn resolve(models_dir: &Path, model: &str) -> Result<Self, EncodeError> {
        let dir = models_dir.join(model);
        let manifest_path = dir.join("manifest.json");
        let content =
            std::fs::read_to_string(&manifest_path).map_err(|e| EncodeError::ModelUnavailable {
                model: model.to_string(),
                dir: models_dir.to_path_buf(),
                reason: format!("{}: {e}", manifest_path.display()),
            })?;
        let manifest: ExternalManifest =
            serde_json::from_str(&content).map_err(|e| EncodeError::ModelUnavailable {
                model: model.to_string(),
                dir: models_dir.to_path_buf(),
                reason: format!("bad manifest: {e}"),
            })?;
        Ok(ExternalEncoder {
            model: model.to_string(),
            dir,
            hidden_dim: manifest.hidden_dim,
        })
    }

    /// Content key of a mini-document: sentences joined by newlines,
    /// words joined by spaces.
    pub fn minidoc_key(sentences: &[Vec<String>]) -> String {
        let text = sentences
            .iter()
            .map(|s| s.join(" "))
            .collect::<Vec<_>>()
            .join("\n");
        crate::util::sha256_hex(&text)
    }

    fn encode(&self, sentences: &[Vec<String>]) -> Result<SubwordEmbedding, EncodeError> {
        let key = Self::minidoc_key(sentences);
        let path = self.dir.join(format!("{key}.json"));
        let content = std::fs::read_to_string(&path).map_err(|_| EncodeError::MissingEmbedding {
            model: self.model.clone(),
            key: key.clone(),
        })?;
        let record: ExternalRecord =
            serde_json::from_str(&content).map_err(|e| EncodeError::BadEmbeddingFile {
                path: path.clone(),
                reason: e.to_string(),
            })?;
        let rows = record.vectors.len();
        let word_count: usize = sentences.iter().map(|s| s.len()).sum();
        if record.word_ranges.len() != word_count {
            return Err(EncodeError::BadEmbeddingFile {
                path,
                reason: format!(
                    "{} word ranges for {} words",
                    record.word_ranges.len(),
                    word_count
                ),
            });
        }
        let mut vectors = Array2::zeros((rows, self.hidden_dim));
        for (i, row) in record.vectors.iter().enumerate() {
            if row.len() != self.hidden_dim {
                return Err(EncodeError::BadEmbeddingFile {
                    path,
                    reason: format!("row {i} has {} dims, expected {}", row.len(), self.hidden_dim),
                });
            }
            for (j, v) in row.iter().enumerate() {
                vectors[(i, j)] = *v;
            }
        }
        Ok(SubwordEmbedding {
            hidden_dim: self.hidden_dim,
            vectors,
            word_ranges: record.word_ranges,
            trace: None,
        })
    }
}

// ---------------------------------------------------------------------
// encoder dispatch

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum AnyEncoder {
    Hashed(HashedEncoder),
    External(ExternalEncoder),
}

impl AnyEncoder {
    /// Build the encoder an [`EncoderConfig`] names. Hashed encoders are
    /// seeded; transformer names resolve against `models_dir`.
    pub fn from_config(
        cfg: &EncoderConfig,
        models_dir: &Path,
        seed: u64,
    ) -> Result<Self, EncodeError> {
        cfg.validate()?;
        if let Some(dim) = cfg.hashed_dim() {
            Ok(AnyEncoder::Hashed(HashedEncoder::new(
                dim,
                DEFAULT_BUCKETS,
                seed,
            )))
        } else {
            if cfg.finetune {
                return Err(EncodeError::InvalidConfig {
                    reason: format!(
                        "model '{}' resolves to frozen exported embeddings; set finetune = false",
                        cfg.model_name
                    ),
                });
            }
            Ok(AnyEncoder::External(ExternalEncoder::resolve(
                models_dir,
                &cfg.model_name,
            )?))
        }
    }

    pub fn hidden_dim(&self) -> usize {
        match self {
            AnyEncoder::Hashed(e) => e.dim,
            AnyEncoder::External(e) => e.hidden_dim,
        }
    }

    pub fn is_trainable(&self) -> bool {
        matches!(self, AnyEncoder::Hashed(_))
    }
}

/// Embed a (possibly already truncated) mini-document: one vector per
/// subword plus the word-occurrence offset map.
pub fn embed_minidoc(
    sentences: &[Vec<String>],
    encoder: &AnyEncoder,
    tokenizer: &SubwordTokenizer,
    max_length: usize,
) -> Result<SubwordEmbedding, EncodeError> {
    match encoder {
        AnyEncoder::Hashed(e) => {
            let total: usize = sentences
                .iter()
                .map(|s| tokenizer.sentence_piece_count(s))
                .sum::<usize>()
                + 2;
            if total > max_length {
                return Err(EncodeError::TruncationOverflow {
                    needed: total,
                    max_length,
                });
            }
            Ok(e.encode(sentences, tokenizer))
        }
        AnyEncoder::External(e) => e.encode(sentences),
    }
}

/// Pool each node's subword rows into its feature row. Node order and
/// word-occurrence order coincide by construction; a graph node beyond
/// the offset map is a missing alignment.
pub fn align_to_nodes(
    subword: &SubwordEmbedding,
    graph: &DocumentGraph,
    pooling: PoolingRule,
) -> Result<NodeEmbeddingMatrix, EncodeError> {
    let n = graph.node_count();
    let d = subword.hidden_dim;
    let mut matrix = Array2::zeros((n, d));
    for node in 0..n {
        let &(start, end) =
            subword
                .word_ranges
                .get(node)
                .ok_or(EncodeError::MissingAlignment {
                    node,
                    ranges: subword.word_ranges.len(),
                })?;
        let mut row: Array1<f64> = Array1::zeros(d);
        match pooling {
            PoolingRule::Mean => {
                for s in start..end {
                    row += &subword.vectors.row(s);
                }
                row /= (end - start) as f64;
            }
            PoolingRule::First => {
                row.assign(&subword.vectors.row(start));
            }
            PoolingRule::Max => {
                row.fill(f64::NEG_INFINITY);
                for s in start..end {
                    for k in 0..d {
                        row[k] = row[k].max(subword.vectors[(s, k)]);
                    }
                }
            }
        }
        matrix.row_mut(node).assign(&row);
    }
    Ok(NodeEmbeddingMatrix {
        hidden_dim: d,
        matrix,
    })
}
