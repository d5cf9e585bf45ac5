//! Corpus validation: invariant checks reported as data, not errors.

use super::{Document, Domain};
use std::fmt;

/// Entity types observed per domain in the released data. The released
/// files are the authority here; note the British spelling of
/// "organisation" and that a few types bleed across domains.
pub fn domain_entity_types(domain: Domain) -> &'static [&'static str] {
    match domain {
        Domain::News => &["country", "location", "misc", "organisation", "person"],
        Domain::Politics => &[
            "album",
            "book",
            "country",
            "election",
            "event",
            "location",
            "misc",
            "musicalartist",
            "musicalinstrument",
            "organisation",
            "person",
            "politicalparty",
            "politician",
            "song",
            "university",
        ],
        Domain::Science => &[
            "academicjournal",
            "astronomicalobject",
            "award",
            "book",
            "chemicalcompound",
            "chemicalelement",
            "country",
            "discipline",
            "enzyme",
            "event",
            "location",
            "misc",
            "organisation",
            "person",
            "protein",
            "scientist",
            "theory",
            "university",
        ],
        Domain::Music => &[
            "album",
            "award",
            "band",
            "country",
            "event",
            "location",
            "magazine",
            "misc",
            "musicalartist",
            "musicalinstrument",
            "musicgenre",
            "organisation",
            "person",
            "song",
        ],
        Domain::Literature => &[
            "album",
            "award",
            "band",
            "book",
            "country",
            "event",
            "literarygenre",
            "location",
            "magazine",
            "misc",
            "musicgenre",
            "organisation",
            "person",
            "poem",
            "programlang",
            "scientist",
            "song",
            "university",
            "writer",
        ],
        Domain::Ai => &[
            "academicjournal",
            "algorithm",
            "conference",
            "country",
            "event",
            "field",
            "location",
            "metrics",
            "misc",
            "organisation",
            "person",
            "product",
            "programlang",
            "researcher",
            "task",
            "university",
        ],
    }
}

/// One invariant violation found in a parsed document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyTokens {
        doc: String,
    },
    SpanOutOfRange {
        doc: String,
        entity_id: usize,
        start: usize,
        end: usize,
        token_count: usize,
    },
    EntityType {
        doc: String,
        entity_id: usize,
        entity_type: String,
        domain: Domain,
    },
    DanglingEntityRef {
        doc: String,
        relation_idx: usize,
        entity: usize,
    },
    EmptyLabels {
        doc: String,
        relation_idx: usize,
    },
    Exclusivity {
        doc: String,
        relation_idx: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyTokens { doc } => write!(f, "{doc}: empty token list"),
            Violation::SpanOutOfRange {
                doc,
                entity_id,
                start,
                end,
                token_count,
            } => write!(
                f,
                "{doc}: entity {entity_id} span [{start},{end}] out of range for {token_count} tokens"
            ),
            Violation::EntityType {
                doc,
                entity_id,
                entity_type,
                domain,
            } => write!(
                f,
                "{doc}: entity {entity_id} type '{entity_type}' not valid in domain {domain}"
            ),
            Violation::DanglingEntityRef {
                doc,
                relation_idx,
                entity,
            } => write!(f, "{doc}: relation {relation_idx} references missing entity {entity}"),
            Violation::EmptyLabels { doc, relation_idx } => {
                write!(f, "{doc}: relation {relation_idx} has no labels")
            }
            Violation::Exclusivity { doc, relation_idx } => write!(
                f,
                "{doc}: relation {relation_idx} combines related-to with other labels"
            ),
        }
    }
}

/// Check every invariant on one document.
pub fn validate_document(doc: &Document) -> Vec<Violation> {
    let mut out = Vec::new();
    if doc.tokens.is_empty() {
        out.push(Violation::EmptyTokens { doc: doc.id.clone() });
    }
    let allowed = domain_entity_types(doc.domain);
    for e in &doc.entities {
        if e.start > e.end || e.end >= doc.tokens.len() {
            out.push(Violation::SpanOutOfRange {
                doc: doc.id.clone(),
                entity_id: e.entity_id,
                start: e.start,
                end: e.end,
                token_count: doc.tokens.len(),
            });
        }
        if !allowed.contains(&e.entity_type.as_str()) {
            out.push(Violation::EntityType {
                doc: doc.id.clone(),
                entity_id: e.entity_id,
                entity_type: e.entity_type.clone(),
                domain: doc.domain,
            });
        }
    }
    for (i, r) in doc.relations.iter().enumerate() {
        for ent in [r.head, r.tail] {
            if ent >= doc.entities.len() {
                out.push(Violation::DanglingEntityRef {
                    doc: doc.id.clone(),
                    relation_idx: i,
                    entity: ent,
                });
            }
        }
        if r.labels.is_empty() {
            out.push(Violation::EmptyLabels {
                doc: doc.id.clone(),
                relation_idx: i,
            });
        }
        if !r.exclusivity_ok() {
            out.push(Violation::Exclusivity {
                doc: doc.id.clone(),
                relation_idx: i,
            });
        }
    }
    out
}

/// Validate a whole corpus; empty result means every invariant holds.
pub fn validate_corpus(documents: &[Document]) -> Vec<Violation> {
    crate::par::map(documents, validate_document)
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{fixtures, EntitySpan, Label, RelationInstance};

    #[test]
    fn valid_corpus_has_no_violations() {
        let docs = vec![fixtures::miller_document()];
        assert!(validate_corpus(&docs).is_empty());
    }

    #[test]
    fn exclusivity_violation_reported() {
        let mut doc = fixtures::miller_document();
        doc.relations[0].labels = vec![Label::RelatedTo, Label::Usage];
        let violations = validate_corpus(std::slice::from_ref(&doc));
        assert_eq!(violations.len(), 1);
        assert!(matches!(violations[0], Violation::Exclusivity { relation_idx: 0, .. }));
    }

    #[test]
    fn related_to_alone_is_fine() {
        let mut doc = fixtures::miller_document();
        doc.relations[0].labels = vec![Label::RelatedTo];
        assert!(validate_corpus(std::slice::from_ref(&doc)).is_empty());
    }

    #[test]
    fn entity_type_checked_against_domain_table() {
        let mut doc = fixtures::tiny_document("news-x", &["a", "dragon"]);
        doc.entities.push(EntitySpan {
            start: 1,
            end: 1,
            entity_type: "dragon".into(),
            entity_id: 0,
        });
        let violations = validate_corpus(std::slice::from_ref(&doc));
        assert_eq!(violations.len(), 1);
        assert!(matches!(
            &violations[0],
            Violation::EntityType { entity_type, .. } if entity_type == "dragon"
        ));
    }

    #[test]
    fn dangling_and_empty_labels_reported() {
        let mut doc = fixtures::tiny_document("news-y", &["a", "b"]);
        doc.relations.push(RelationInstance {
            head: 9,
            tail: 0,
            labels: vec![],
            explanation: None,
            syntax_ambiguity: false,
            uncertain: false,
        });
        let violations = validate_document(&doc);
        assert_eq!(violations.len(), 3); // head dangling, tail dangling, empty labels
    }
}
