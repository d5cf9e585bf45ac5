//! Corpus data model: domains, relation labels, annotated documents, and
//! the canonical newline-delimited JSON format shared by every pipeline
//! stage.
//!
//! The canonical record is self-describing:
//!
//! ```json
//! {"id":"news-train-1","domain":"news","split":"train",
//!  "tokens":["EU","rejects","..."],
//!  "entities":[[0,0,"organisation"],[2,3,"misc"]],
//!  "relations":[[0,1,["opposite"],"rejects",false,false]],
//!  "support":{"text":"...","source":"mock"}}
//! ```
//!
//! Entities are `[start, end, type]` triples with inclusive token
//! indices; the entity id is the position in the list. Relations are
//! `[head_id, tail_id, labels, explanation, syntax_ambiguity, uncertain]`.

mod crossre;
mod stats;
mod validate;

pub use crossre::{parse_crossre_line, read_crossre_file, split_file_name};
pub use stats::{corpus_stats, stats_table, stats_tsv, DomainStats};
pub use validate::{domain_entity_types, validate_corpus, validate_document, Violation};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The 17 CrossRE relation labels. `RELATED-TO` is the exclusive
/// fallback: it is only assigned when no other label fits, and never
/// together with another label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Label {
    PartOf,
    Physical,
    Usage,
    Role,
    Social,
    GeneralAffiliation,
    Compare,
    Temporal,
    Artifact,
    Origin,
    Topic,
    Opposite,
    CauseEffect,
    WinDefeat,
    TypeOf,
    Named,
    RelatedTo,
}

impl Label {
    pub const COUNT: usize = 17;

    pub const ALL: [Label; Label::COUNT] = [
        Label::PartOf,
        Label::Physical,
        Label::Usage,
        Label::Role,
        Label::Social,
        Label::GeneralAffiliation,
        Label::Compare,
        Label::Temporal,
        Label::Artifact,
        Label::Origin,
        Label::Topic,
        Label::Opposite,
        Label::CauseEffect,
        Label::WinDefeat,
        Label::TypeOf,
        Label::Named,
        Label::RelatedTo,
    ];

    /// Canonical wire name, matching the released data files.
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::PartOf => "part-of",
            Label::Physical => "physical",
            Label::Usage => "usage",
            Label::Role => "role",
            Label::Social => "social",
            Label::GeneralAffiliation => "general-affiliation",
            Label::Compare => "compare",
            Label::Temporal => "temporal",
            Label::Artifact => "artifact",
            Label::Origin => "origin",
            Label::Topic => "topic",
            Label::Opposite => "opposite",
            Label::CauseEffect => "cause-effect",
            Label::WinDefeat => "win-defeat",
            Label::TypeOf => "type-of",
            Label::Named => "named",
            Label::RelatedTo => "related-to",
        }
    }

    /// Stable position in [`Label::ALL`], used to index score vectors.
    pub fn index(&self) -> usize {
        Label::ALL.iter().position(|l| l == self).unwrap()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Label::ALL
            .iter()
            .find(|l| l.as_str() == lower)
            .copied()
            .ok_or_else(|| ParseError::UnknownLabel { label: s.to_string() })
    }
}

impl TryFrom<String> for Label {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Label> for String {
    fn from(l: Label) -> String {
        l.as_str().to_string()
    }
}

/// The six CrossRE text domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Domain {
    News,
    Politics,
    Science,
    Music,
    Literature,
    Ai,
}

impl Domain {
    pub const ALL: [Domain; 6] = [
        Domain::News,
        Domain::Politics,
        Domain::Science,
        Domain::Music,
        Domain::Literature,
        Domain::Ai,
    ];

    /// File-name prefix used by the released data (`ai-train.json`, ...).
    pub fn as_str(&self) -> &'static str {
        match self {
            Domain::News => "news",
            Domain::Politics => "politics",
            Domain::Science => "science",
            Domain::Music => "music",
            Domain::Literature => "literature",
            Domain::Ai => "ai",
        }
    }

    /// Human-readable column header.
    pub fn display_name(&self) -> &'static str {
        match self {
            Domain::News => "News",
            Domain::Politics => "Politics",
            Domain::Science => "Science",
            Domain::Music => "Music",
            Domain::Literature => "Literature",
            Domain::Ai => "AI",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "news" => Ok(Domain::News),
            "politics" => Ok(Domain::Politics),
            "science" | "natural science" | "natural-science" | "natural sciences" => {
                Ok(Domain::Science)
            }
            "music" => Ok(Domain::Music),
            "literature" => Ok(Domain::Literature),
            "ai" | "artificial intelligence" => Ok(Domain::Ai),
            _ => Err(ParseError::UnknownDomain { name: s.to_string() }),
        }
    }
}

impl TryFrom<String> for Domain {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Domain> for String {
    fn from(d: Domain) -> String {
        d.as_str().to_string()
    }
}

/// Standard three-way split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            _ => Err(ParseError::UnknownSplit { name: s.to_string() }),
        }
    }
}

/// An annotated entity: inclusive token span plus a domain-specific type.
/// `entity_id` is the ordinal within the document's entity list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub entity_type: String,
    pub entity_id: usize,
}

impl EntitySpan {
    /// Number of tokens covered (spans are inclusive).
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false // an inclusive span always covers at least one token
    }

    /// Surface tokens of this span within `tokens`.
    pub fn surface<'a>(&self, tokens: &'a [String]) -> &'a [String] {
        &tokens[self.start..=self.end]
    }
}

/// A directed entity pair with its label set and annotation metadata.
///
/// `labels` is a set kept in first-annotation order; multi-label pairs
/// from the released data are folded into a single instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    pub head: usize,
    pub tail: usize,
    pub labels: Vec<Label>,
    pub explanation: Option<String>,
    pub syntax_ambiguity: bool,
    pub uncertain: bool,
}

impl RelationInstance {
    /// True when the RELATED-TO exclusivity rule holds.
    pub fn exclusivity_ok(&self) -> bool {
        !self.labels.contains(&Label::RelatedTo) || self.labels.len() == 1
    }
}

/// Where a support paragraph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportSource {
    Generated,
    Cached,
    Mock,
}

/// An LLM-generated context paragraph attached to a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportDocument {
    pub text: String,
    pub source: SupportSource,
}

impl SupportDocument {
    /// Byte-offset sentence spans of `text` under the pipeline segmenter.
    pub fn sentence_spans(&self) -> Vec<(usize, usize)> {
        crate::text::segment_sentences(&self.text)
    }

    pub fn sentences(&self) -> Vec<String> {
        crate::text::split_sentences(&self.text)
    }
}

/// One annotated sentence with its entities, relations, and optional
/// support paragraph.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub domain: Domain,
    pub split: Split,
    pub tokens: Vec<String>,
    pub entities: Vec<EntitySpan>,
    pub relations: Vec<RelationInstance>,
    pub support: Option<SupportDocument>,
}

impl Document {
    /// The original sentence as space-joined tokens.
    pub fn sentence_text(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn entity(&self, id: usize) -> Option<&EntitySpan> {
        self.entities.get(id)
    }
}

/// Errors raised while decoding a record into a [`Document`].
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown relation label '{label}'")]
    UnknownLabel { label: String },
    #[error("unknown domain '{name}'")]
    UnknownDomain { name: String },
    #[error("unknown split '{name}'")]
    UnknownSplit { name: String },
    #[error("{id}: entity {entity_id} span [{start},{end}] out of range for {token_count} tokens")]
    SpanOutOfRange {
        id: String,
        entity_id: usize,
        start: usize,
        end: usize,
        token_count: usize,
    },
    #[error("{id}: relation {relation_idx} references missing entity {entity}")]
    DanglingEntityRef {
        id: String,
        relation_idx: usize,
        entity: String,
    },
    #[error("{id}: relation {relation_idx} has an empty label set")]
    EmptyLabels { id: String, relation_idx: usize },
    #[error("{id}: empty token list")]
    EmptyTokens { id: String },
}

// ---------------------------------------------------------------------
// canonical wire format

#[derive(Serialize, Deserialize)]
struct CanonicalRecord {
    id: String,
    domain: Domain,
    split: Split,
    tokens: Vec<String>,
    entities: Vec<(usize, usize, String)>,
    relations: Vec<CanonicalRelation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<SupportDocument>,
}

type CanonicalRelation = (usize, usize, Vec<Label>, Option<String>, bool, bool);

/// Decode one canonical JSONL line, enforcing the structural invariants
/// (span bounds, entity references, nonempty labels and tokens).
pub fn parse_document(line: &str) -> Result<Document, ParseError> {
    let rec: CanonicalRecord = serde_json::from_str(line)?;
    let entities: Vec<EntitySpan> = rec
        .entities
        .into_iter()
        .enumerate()
        .map(|(i, (start, end, entity_type))| EntitySpan {
            start,
            end,
            entity_type,
            entity_id: i,
        })
        .collect();
    let relations = rec
        .relations
        .into_iter()
        .map(
            |(head, tail, labels, explanation, syntax_ambiguity, uncertain)| RelationInstance {
                head,
                tail,
                labels,
                explanation,
                syntax_ambiguity,
                uncertain,
            },
        )
        .collect();
    let doc = Document {
        id: rec.id,
        domain: rec.domain,
        split: rec.split,
        tokens: rec.tokens,
        entities,
        relations,
        support: rec.support,
    };
    check_structure(&doc)?;
    Ok(doc)
}

/// Encode a document as one canonical JSON line (no trailing newline).
pub fn serialize_document(doc: &Document) -> String {
    let rec = CanonicalRecord {
        id: doc.id.clone(),
        domain: doc.domain,
        split: doc.split,
        tokens: doc.tokens.clone(),
        entities: doc
            .entities
            .iter()
            .map(|e| (e.start, e.end, e.entity_type.clone()))
            .collect(),
        relations: doc
            .relations
            .iter()
            .map(|r| {
                (
                    r.head,
                    r.tail,
                    r.labels.clone(),
                    r.explanation.clone(),
                    r.syntax_ambiguity,
                    r.uncertain,
                )
            })
            .collect(),
        support: doc.support.clone(),
    };
    serde_json::to_string(&rec).expect("canonical record serializes")
}

pub(crate) fn check_structure(doc: &Document) -> Result<(), ParseError> {
    if doc.tokens.is_empty() {
        return Err(ParseError::EmptyTokens { id: doc.id.clone() });
    }
    for e in &doc.entities {
        if e.start > e.end || e.end >= doc.tokens.len() {
            return Err(ParseError::SpanOutOfRange {
                id: doc.id.clone(),
                entity_id: e.entity_id,
                start: e.start,
                end: e.end,
                token_count: doc.tokens.len(),
            });
        }
    }
    for (i, r) in doc.relations.iter().enumerate() {
        for ent in [r.head, r.tail] {
            if ent >= doc.entities.len() {
                return Err(ParseError::DanglingEntityRef {
                    id: doc.id.clone(),
                    relation_idx: i,
                    entity: format!("id {ent} of {}", doc.entities.len()),
                });
            }
        }
        if r.labels.is_empty() {
            return Err(ParseError::EmptyLabels {
                id: doc.id.clone(),
                relation_idx: i,
            });
        }
    }
    Ok(())
}

/// Read a whole canonical corpus file (one record per line).
pub fn read_corpus(path: &std::path::Path) -> Result<Vec<Document>, CorpusIoError> {
    let content = std::fs::read_to_string(path).map_err(|source| CorpusIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let lines: Vec<&str> = content.lines().filter(|l| !l.trim().is_empty()).collect();
    let parsed = crate::par::map(&lines, |line| parse_document(line));
    parsed
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|source| CorpusIoError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

/// Write documents as canonical JSONL via a temp file + atomic rename.
pub fn write_corpus(path: &std::path::Path, docs: &[Document]) -> Result<(), CorpusIoError> {
    let mut body = String::new();
    for doc in docs {
        body.push_str(&serialize_document(doc));
        body.push('\n');
    }
    crate::util::atomic_write(path, body.as_bytes()).map_err(|source| CorpusIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusIoError {
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Parse {
        path: std::path::PathBuf,
        line: usize,
        source: ParseError,
    },
}
