//! Ingest adapter for the released CrossRE JSON files.
//!
//! Upstream records look like:
//!
//! ```json
//! {"doc_key": "news-train-1",
//!  "sentence": ["EU", "rejects", "..."],
//!  "ner": [[0, 0, "organisation"], [2, 3, "misc"]],
//!  "relations": [[0, 0, 2, 3, "opposite", "rejects", false, false]]}
//! ```
//!
//! Relations reference entities by their token spans, one entry per
//! label. The two trailing booleans are, in order, the annotator
//! uncertainty flag and the syntax-ambiguity flag (the upstream reader
//! unpacks them as `ns, sa`). Entries for the same directed span pair
//! are folded into a single multi-label [`RelationInstance`]; the
//! explanation is taken from the first entry that carries one and the
//! boolean flags are OR-ed.

use super::{check_structure, Document, Domain, EntitySpan, ParseError, RelationInstance, Split};
use serde::Deserialize;
use std::collections::HashMap;
use std::path::Path;

#[derive(Deserialize)]
struct UpstreamRecord {
    doc_key: String,
    sentence: Vec<String>,
    ner: Vec<(usize, usize, String)>,
    relations: Vec<UpstreamRelation>,
}

// (head_start, head_end, tail_start, tail_end, label, explanation, uncertain, syntax_ambiguity)
type UpstreamRelation = (usize, usize, usize, usize, String, String, bool, bool);

/// Parse one upstream line into the canonical model.
pub fn parse_crossre_line(line: &str, domain: Domain, split: Split) -> Result<Document, ParseError> {
    let rec: UpstreamRecord = serde_json::from_str(line)?;
    let id = rec.doc_key.clone();

    let entities: Vec<EntitySpan> = rec
        .ner
        .iter()
        .enumerate()
        .map(|(i, (start, end, entity_type))| EntitySpan {
            start: *start,
            end: *end,
            entity_type: entity_type.clone(),
            entity_id: i,
        })
        .collect();

    let span_to_id: HashMap<(usize, usize), usize> = entities
        .iter()
        .map(|e| ((e.start, e.end), e.entity_id))
        .collect();

    // group per directed span pair, preserving first-seen order
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut grouped: HashMap<(usize, usize), RelationInstance> = HashMap::new();
    for (idx, (hs, he, ts, te, label, explanation, uncertain, syntax_ambiguity)) in
        rec.relations.iter().enumerate()
    {
        let head = *span_to_id.get(&(*hs, *he)).ok_or_else(|| {
            ParseError::DanglingEntityRef {
                id: id.clone(),
                relation_idx: idx,
                entity: format!("span [{hs},{he}]"),
            }
        })?;
        let tail = *span_to_id.get(&(*ts, *te)).ok_or_else(|| {
            ParseError::DanglingEntityRef {
                id: id.clone(),
                relation_idx: idx,
                entity: format!("span [{ts},{te}]"),
            }
        })?;
        let label = label.parse::<super::Label>()?;

        let entry = grouped.entry((head, tail)).or_insert_with(|| {
            order.push((head, tail));
            RelationInstance {
                head,
                tail,
                labels: Vec::new(),
                explanation: None,
                syntax_ambiguity: false,
                uncertain: false,
            }
        });
        if !entry.labels.contains(&label) {
            entry.labels.push(label);
        }
        if entry.explanation.is_none() && !explanation.is_empty() {
            entry.explanation = Some(explanation.clone());
        }
        entry.syntax_ambiguity |= *syntax_ambiguity;
        entry.uncertain |= *uncertain;
    }
    let relations = order
        .into_iter()
        .map(|key| grouped.remove(&key).unwrap())
        .collect();

    let doc = Document {
        id,
        domain,
        split,
        tokens: rec.sentence,
        entities,
        relations,
        support: None,
    };
    check_structure(&doc)?;
    Ok(doc)
}

/// Read a full upstream split file (`news-train.json` and friends).
pub fn read_crossre_file(
    path: &Path,
    domain: Domain,
    split: Split,
) -> Result<Vec<Document>, super::CorpusIoError> {
    let content = std::fs::read_to_string(path).map_err(|source| super::CorpusIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let lines: Vec<&str> = content.lines().filter(|l| !l.trim().is_empty()).collect();
    let parsed = crate::par::map(&lines, |line| parse_crossre_line(line, domain, split));
    parsed
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|source| super::CorpusIoError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })
        })
        .collect()
}

/// Infer `(domain, split)` from an upstream file name like
/// `science-dev.json`.
pub fn split_file_name(name: &str) -> Option<(Domain, Split)> {
    let stem = name.strip_suffix(".json")?;
    let (domain, split) = stem.rsplit_once('-')?;
    Some((domain.parse().ok()?, split.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;

    const NEWS_LINE: &str = r#"{"doc_key": "news-train-1", "sentence": ["EU", "rejects", "German", "call", "to", "boycott", "British", "lamb", "."], "ner": [[0, 0, "organisation"], [2, 3, "misc"], [6, 7, "misc"]], "relations": [[0, 0, 2, 3, "opposite", "rejects", false, false], [2, 3, 6, 7, "opposite", "calls_for_boycot_of", false, false]]}"#;

    #[test]
    fn parses_real_news_record() {
        let doc = parse_crossre_line(NEWS_LINE, Domain::News, Split::Train).unwrap();
        assert_eq!(doc.id, "news-train-1");
        assert_eq!(doc.tokens.len(), 9);
        assert_eq!(doc.entities.len(), 3);
        assert_eq!(doc.relations.len(), 2);
        assert_eq!(doc.relations[0].head, 0);
        assert_eq!(doc.relations[0].tail, 1);
        assert_eq!(doc.relations[0].explanation.as_deref(), Some("rejects"));
    }

    #[test]
    fn groups_multi_label_pairs() {
        let line = r#"{"doc_key": "x", "sentence": ["a", "b", "c"], "ner": [[0, 0, "person"], [2, 2, "person"]], "relations": [[0, 0, 2, 2, "named", "", false, false], [0, 0, 2, 2, "origin", "why", true, false], [2, 2, 0, 0, "social", "", false, true]]}"#;
        let doc = parse_crossre_line(line, Domain::Ai, Split::Dev).unwrap();
        assert_eq!(doc.relations.len(), 2, "two directed pairs");
        let first = &doc.relations[0];
        assert_eq!(first.labels, vec![Label::Named, Label::Origin]);
        assert_eq!(first.explanation.as_deref(), Some("why"));
        assert!(first.uncertain, "flag OR-ed from second entry");
        assert!(!first.syntax_ambiguity);
        assert!(doc.relations[1].syntax_ambiguity);
    }

    #[test]
    fn duplicate_entries_fold_away() {
        let line = r#"{"doc_key": "x", "sentence": ["a", "b"], "ner": [[0, 0, "person"], [1, 1, "person"]], "relations": [[0, 0, 1, 1, "role", "", false, false], [0, 0, 1, 1, "role", "", false, false]]}"#;
        let doc = parse_crossre_line(line, Domain::News, Split::Train).unwrap();
        assert_eq!(doc.relations.len(), 1);
        assert_eq!(doc.relations[0].labels, vec![Label::Role]);
    }

    #[test]
    fn relation_span_not_in_ner_is_dangling() {
        let line = r#"{"doc_key": "x", "sentence": ["a", "b"], "ner": [[0, 0, "person"]], "relations": [[0, 0, 1, 1, "role", "", false, false]]}"#;
        assert!(matches!(
            parse_crossre_line(line, Domain::News, Split::Train),
            Err(ParseError::DanglingEntityRef { .. })
        ));
    }

    #[test]
    fn file_name_inference() {
        assert_eq!(
            split_file_name("science-dev.json"),
            Some((Domain::Science, Split::Dev))
        );
        assert_eq!(split_file_name("notes.txt"), None);
    }
}
