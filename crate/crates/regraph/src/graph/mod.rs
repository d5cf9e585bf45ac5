//! Word/entity graph over the mini-document (original sentence plus
//! support paragraph).
//!
//! One node per word occurrence, no deduplication. Edges follow two
//! rules: all nodes of one sentence form a clique, and all mention
//! nodes of one entity form a clique (which also makes each entity a
//! single connected component). Every node carries a self-loop so a
//! message-passing layer always sees the node's own feature.

use crate::corpus::{Document, EntitySpan};
use ndarray::Array2;
use std::collections::{BTreeMap, BTreeSet};

/// One word occurrence in the mini-document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRef {
    pub node_index: usize,
    pub word: String,
    /// Sentence of the mini-document (0 = the annotated sentence).
    pub sentence_index: usize,
    /// Position within that sentence.
    pub word_index: usize,
    /// Lowest entity id this occurrence belongs to, if any. The full
    /// (possibly overlapping) membership lives in `entity_components`.
    pub entity_id: Option<usize>,
}

/// A mention occurrence: an entity's surface form matched at one
/// position of one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MentionSpan {
    pub sentence_index: usize,
    pub word_start: usize,
    pub word_end: usize, // inclusive
}

#[derive(Debug, Clone)]
pub struct DocumentGraph {
    pub nodes: Vec<NodeRef>,
    /// Symmetric 0/1 matrix with ones on the diagonal.
    adjacency: Array2<u8>,
    /// entity id -> node indices of all its mention words.
    pub entity_components: BTreeMap<usize, BTreeSet<usize>>,
}

impl DocumentGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[(u, v)] != 0
    }

    /// Degree counted with the self-loop.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency.row(v).iter().map(|&x| x as usize).sum()
    }

    pub fn adjacency(&self) -> &Array2<u8> {
        &self.adjacency
    }

    /// Undirected edge count excluding self-loops.
    pub fn edge_count(&self) -> usize {
        let n = self.node_count();
        let mut count = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                count += self.adjacency[(u, v)] as usize;
            }
        }
        count
    }

    /// Symmetrically normalized adjacency `D^{-1/2} A D^{-1/2}` with the
    /// self-loops already part of `A`.
    pub fn normalized_adjacency(&self) -> Array2<f64> {
        let n = self.node_count();
        let inv_sqrt_deg: Vec<f64> = (0..n).map(|v| 1.0 / (self.degree(v) as f64).sqrt()).collect();
        let mut out = Array2::zeros((n, n));
        for u in 0..n {
            for v in 0..n {
                if self.adjacency[(u, v)] != 0 {
                    out[(u, v)] = inv_sqrt_deg[u] * inv_sqrt_deg[v];
                }
            }
        }
        out
    }

    /// Build directly from an undirected edge list; self-loops are added
    /// on every node. Used by tests and synthetic-graph tooling.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = Array2::zeros((n, n));
        for v in 0..n {
            adjacency[(v, v)] = 1;
        }
        for &(u, v) in edges {
            adjacency[(u, v)] = 1;
            adjacency[(v, u)] = 1;
        }
        let nodes = (0..n)
            .map(|i| NodeRef {
                node_index: i,
                word: format!("w{i}"),
                sentence_index: 0,
                word_index: i,
                entity_id: None,
            })
            .collect();
        DocumentGraph {
            nodes,
            adjacency,
            entity_components: BTreeMap::new(),
        }
    }

    /// Debug dump: node table followed by the undirected edge list.
    pub fn render_dump(&self) -> String {
        let mut out = String::from("# nodes\tindex\tword\tsentence\tword_idx\tentity\n");
        for node in &self.nodes {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                node.node_index,
                node.word,
                node.sentence_index,
                node.word_index,
                node.entity_id.map_or("-".to_string(), |e| e.to_string())
            ));
        }
        out.push_str("# edges\n");
        let n = self.node_count();
        for u in 0..n {
            for v in (u + 1)..n {
                if self.adjacency[(u, v)] != 0 {
                    out.push_str(&format!("{u}\t{v}\n"));
                }
            }
        }
        out
    }
}

/// Sentence list of the mini-document: the annotated sentence first,
/// then the tokenized support sentences. Blank support is absent.
pub fn assemble_minidoc(doc: &Document) -> Vec<Vec<String>> {
    let mut sentences = vec![doc.tokens.clone()];
    if let Some(support) = &doc.support {
        for sentence in support.sentences() {
            let tokens = crate::text::tokenize(&sentence);
            if !tokens.is_empty() {
                sentences.push(tokens);
            }
        }
    }
    sentences
}

/// Every occurrence of the entity's surface form across the
/// mini-document: case-insensitive exact match on the token sequence.
/// The original annotated span is always among the results.
pub fn find_mentions(
    entity: &EntitySpan,
    original_tokens: &[String],
    sentences: &[Vec<String>],
) -> Vec<MentionSpan> {
    let surface: Vec<String> = entity
        .surface(original_tokens)
        .iter()
        .map(|t| t.to_lowercase())
        .collect();
    let width = surface.len();
    let mut out = BTreeSet::new();
    out.insert(MentionSpan {
        sentence_index: 0,
        word_start: entity.start,
        word_end: entity.end,
    });
    for (sentence_index, sentence) in sentences.iter().enumerate() {
        if sentence.len() < width {
            continue;
        }
        for start in 0..=(sentence.len() - width) {
            let matches = (0..width).all(|k| sentence[start + k].to_lowercase() == surface[k]);
            if matches {
                out.insert(MentionSpan {
                    sentence_index,
                    word_start: start,
                    word_end: start + width - 1,
                });
            }
        }
    }
    out.into_iter().collect()
}

/// Build the graph over an already-assembled mini-document. Node order
/// is sentence-major, word-minor, so construction is deterministic.
pub fn build_graph_from(doc: &Document, sentences: &[Vec<String>]) -> DocumentGraph {
    let n: usize = sentences.iter().map(|s| s.len()).sum();
    let mut nodes = Vec::with_capacity(n);
    let mut sentence_offsets = Vec::with_capacity(sentences.len());
    let mut next = 0usize;
    for (sentence_index, sentence) in sentences.iter().enumerate() {
        sentence_offsets.push(next);
        for (word_index, word) in sentence.iter().enumerate() {
            nodes.push(NodeRef {
                node_index: next,
                word: word.clone(),
                sentence_index,
                word_index,
                entity_id: None,
            });
            next += 1;
        }
    }

    let mut adjacency = Array2::zeros((n, n));
    for v in 0..n {
        adjacency[(v, v)] = 1;
    }
    // sentence cliques
    for (s, sentence) in sentences.iter().enumerate() {
        let base = sentence_offsets[s];
        for i in 0..sentence.len() {
            for j in (i + 1)..sentence.len() {
                adjacency[(base + i, base + j)] = 1;
                adjacency[(base + j, base + i)] = 1;
            }
        }
    }

    // entity mention cliques
    let mut entity_components: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for entity in &doc.entities {
        let mut component = BTreeSet::new();
        for mention in find_mentions(entity, &doc.tokens, sentences) {
            let base = sentence_offsets[mention.sentence_index];
            for w in mention.word_start..=mention.word_end {
                let idx = base + w;
                component.insert(idx);
                if nodes[idx].entity_id.is_none() {
                    nodes[idx].entity_id = Some(entity.entity_id);
                }
            }
        }
        let members: Vec<usize> = component.iter().copied().collect();
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[(i + 1)..] {
                adjacency[(u, v)] = 1;
                adjacency[(v, u)] = 1;
            }
        }
        entity_components.insert(entity.entity_id, component);
    }

    DocumentGraph {
        nodes,
        adjacency,
        entity_components,
    }
}

/// Assemble the mini-document and build its graph in one step.
pub fn build_graph(doc: &Document) -> DocumentGraph {
    let sentences = assemble_minidoc(doc);
    build_graph_from(doc, &sentences)
}
