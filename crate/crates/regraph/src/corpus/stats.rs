//! Per-domain corpus statistics matching the published dataset table.
//!
//! The "relations" column counts distinct annotated entity pairs: a
//! pair carrying several labels counts once. `label_instances` keeps
//! the raw (pair, label) count alongside, since the two differ on the
//! released data (e.g. news has 871 pairs but 885 label instances).

use super::{Document, Domain, Split};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DomainStats {
    pub train_sentences: usize,
    pub dev_sentences: usize,
    pub test_sentences: usize,
    /// Distinct annotated entity pairs over all splits.
    pub relation_pairs: usize,
    /// Total (pair, label) assignments over all splits.
    pub label_instances: usize,
}

impl DomainStats {
    pub fn sentences(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train_sentences,
            Split::Dev => self.dev_sentences,
            Split::Test => self.test_sentences,
        }
    }
}

/// Aggregate counts per domain. Order-invariant over `documents`.
pub fn corpus_stats(documents: &[Document]) -> BTreeMap<Domain, DomainStats> {
    let mut out: BTreeMap<Domain, DomainStats> = BTreeMap::new();
    for doc in documents {
        let entry = out.entry(doc.domain).or_default();
        match doc.split {
            Split::Train => entry.train_sentences += 1,
            Split::Dev => entry.dev_sentences += 1,
            Split::Test => entry.test_sentences += 1,
        }
        entry.relation_pairs += doc.relations.len();
        entry.label_instances += doc.relations.iter().map(|r| r.labels.len()).sum::<usize>();
    }
    out
}

/// Aligned plain-text table with the dataset-statistics columns.
pub fn stats_table(stats: &BTreeMap<Domain, DomainStats>) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>6} {:>6} {:>6} {:>10}\n",
        "Domain", "Train", "Dev", "Test", "Relations"
    ));
    for (domain, s) in stats {
        out.push_str(&format!(
            "{:<12} {:>6} {:>6} {:>6} {:>10}\n",
            domain.display_name(),
            s.train_sentences,
            s.dev_sentences,
            s.test_sentences,
            s.relation_pairs
        ));
    }
    out
}

/// Tab-separated variant of the same table.
pub fn stats_tsv(stats: &BTreeMap<Domain, DomainStats>) -> String {
    let mut out = String::from("domain\ttrain\tdev\ttest\trelations\tlabel_instances\n");
    for (domain, s) in stats {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            domain.as_str(),
            s.train_sentences,
            s.dev_sentences,
            s.test_sentences,
            s.relation_pairs,
            s.label_instances
        ));
    }
    out
}
