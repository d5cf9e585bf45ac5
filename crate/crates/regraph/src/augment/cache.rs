//! Content-addressed on-disk cache for generated paragraphs.
//!
//! One JSON file per key under the cache directory; the key is the
//! SHA-256 of the full prompt plus the prompt version, so changing
//! either the sentence or the template invalidates naturally. Entries
//! are re-validated on read and corrupt ones surface as
//! [`AugmentError::CacheCorrupt`] so callers can regenerate.

use super::{validate_support, AugmentError};
use crate::corpus::{SupportDocument, SupportSource};
use crate::util::{atomic_write, sha256_hex};
use std::path::PathBuf;

/// Derive the cache key for a prompt.
pub fn cache_key(prompt: &str, prompt_version: &str) -> String {
    sha256_hex(&format!("{prompt_version}\u{1f}{prompt}"))
}

pub struct SupportCache {
    dir: PathBuf,
}

impl SupportCache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(SupportCache { dir })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Look up a key; `sentence` is needed to re-check the containment
    /// invariant of the stored paragraph.
    pub fn get(&self, key: &str, sentence: &str) -> Result<Option<SupportDocument>, AugmentError> {
        let path = self.path(key);
        let content = match std::fs::read_to_string(&path) {
            Ok(c) => c,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let stored: SupportDocument =
            serde_json::from_str(&content).map_err(|e| AugmentError::CacheCorrupt {
                key: key.to_string(),
                reason: e.to_string(),
            })?;
        validate_support(&stored.text, sentence).map_err(|reason| AugmentError::CacheCorrupt {
            key: key.to_string(),
            reason: reason.to_string(),
        })?;
        Ok(Some(SupportDocument {
            text: stored.text,
            source: SupportSource::Cached,
        }))
    }

    pub fn put(&self, key: &str, support: &SupportDocument) -> Result<(), AugmentError> {
        let body = serde_json::to_string(support).expect("support serializes");
        atomic_write(&self.path(key), body.as_bytes())?;
        Ok(())
    }

    /// Drop an entry (used after detecting corruption).
    pub fn evict(&self, key: &str) -> Result<(), AugmentError> {
        match std::fs::remove_file(self.path(key)) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
            Err(e) => Err(e.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{augment_corpus, build_prompt, MockClient, ScriptedClient, SupportPolicy, PROMPT_VERSION};
    use crate::corpus::fixtures;

    #[test]
    fn distinct_versions_give_distinct_keys() {
        let prompt = build_prompt("same sentence").unwrap();
        assert_ne!(cache_key(&prompt, "v1"), cache_key(&prompt, "v2"));
    }

    #[test]
    fn second_run_makes_zero_client_calls() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SupportCache::new(dir.path()).unwrap();
        let docs = vec![
            fixtures::miller_document(),
            fixtures::tiny_document("t", &["The", "ban", "stands", "."]),
        ];
        let client = MockClient;
        let policy = SupportPolicy::default();

        let (first, calls1) = augment_corpus(&docs, &client, &policy, Some(&cache)).unwrap();
        assert_eq!(calls1, 2);
        let (second, calls2) = augment_corpus(&docs, &client, &policy, Some(&cache)).unwrap();
        assert_eq!(calls2, 0, "all cache hits");
        // same text, but sources reflect the cache on the second pass
        for (a, b) in first.iter().zip(&second) {
            assert_eq!(
                a.support.as_ref().unwrap().text,
                b.support.as_ref().unwrap().text
            );
        }
    }

    #[test]
    fn partial_cache_only_fills_the_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SupportCache::new(dir.path()).unwrap();
        let doc_a = fixtures::tiny_document("a", &["First", "sentence", "here", "."]);
        let doc_b = fixtures::tiny_document("b", &["Second", "sentence", "here", "."]);
        let client = MockClient;
        let policy = SupportPolicy::default();

        let (_, calls) = augment_corpus(
            std::slice::from_ref(&doc_a),
            &client,
            &policy,
            Some(&cache),
        )
        .unwrap();
        assert_eq!(calls, 1);
        let (_, calls) = augment_corpus(&[doc_a, doc_b], &client, &policy, Some(&cache)).unwrap();
        assert_eq!(calls, 1, "only the uncached document hits the client");
    }

    #[test]
    fn corrupt_entry_triggers_regeneration() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SupportCache::new(dir.path()).unwrap();
        let doc = fixtures::tiny_document("t", &["The", "ban", "stands", "."]);
        let sentence = doc.sentence_text();
        let prompt = build_prompt(&sentence).unwrap();
        let key = cache_key(&prompt, PROMPT_VERSION);

        std::fs::write(cache.path(&key), "{not valid json").unwrap();
        assert!(matches!(
            cache.get(&key, &sentence),
            Err(AugmentError::CacheCorrupt { .. })
        ));

        let client = MockClient;
        let (docs, calls) = augment_corpus(
            std::slice::from_ref(&doc),
            &client,
            &SupportPolicy::default(),
            Some(&cache),
        )
        .unwrap();
        assert_eq!(calls, 1, "regenerated after eviction");
        assert!(docs[0].support.is_some());
        assert!(cache.get(&key, &sentence).unwrap().is_some(), "cache refilled");
    }

    #[test]
    fn stored_entry_failing_invariants_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SupportCache::new(dir.path()).unwrap();
        let stored = SupportDocument {
            text: "Only one sentence.".to_string(),
            source: SupportSource::Generated,
        };
        cache.put("deadbeef", &stored).unwrap();
        assert!(matches!(
            cache.get("deadbeef", "whatever sentence"),
            Err(AugmentError::CacheCorrupt { .. })
        ));
    }

    #[test]
    fn fallback_results_are_not_cached() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SupportCache::new(dir.path()).unwrap();
        let doc = fixtures::tiny_document("t", &["The", "ban", "stands", "."]);
        let client = ScriptedClient::always(Ok("Bad.".to_string()));
        let (docs, calls) =
            augment_corpus(std::slice::from_ref(&doc), &client, &SupportPolicy::default(), Some(&cache))
                .unwrap();
        assert_eq!(calls, 1);
        assert_eq!(docs[0].support.as_ref().unwrap().text, doc.sentence_text());
        let prompt = build_prompt(&doc.sentence_text()).unwrap();
        let key = cache_key(&prompt, PROMPT_VERSION);
        assert!(cache.get(&key, &doc.sentence_text()).unwrap().is_none());
    }
}
