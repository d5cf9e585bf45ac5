//! Support-paragraph generation: prompt construction, client abstraction,
//! validation, retries, and an on-disk response cache.
//!
//! Each annotated sentence gets a short context paragraph from a chat
//! model. A paragraph is accepted when it segments into 4-6 sentences
//! and contains the original sentence (up to whitespace and quote
//! normalization). Invalid responses are retried; after the retry
//! budget the pipeline falls back to the original sentence alone so a
//! run never stalls on a flaky generator.

mod cache;
mod client;
mod prompt;

pub use cache::SupportCache;
pub use client::{FixtureClient, GenerationClient, MockClient, ScriptedClient};
#[cfg(feature = "online")]
pub use client::online::OnlineClient;
pub use prompt::{build_prompt, PROMPT_VERSION};

use crate::corpus::{Document, SupportDocument, SupportSource};
use crate::text;

/// Retry and fallback behaviour for [`generate_support`].
#[derive(Debug, Clone)]
pub struct SupportPolicy {
    /// Attempts before giving up on the client (first try included).
    pub retries: usize,
    /// Fall back to the original sentence instead of erroring out.
    pub fallback_to_sentence: bool,
    /// Upper bound on concurrent in-flight client calls.
    pub concurrency: usize,
}

impl Default for SupportPolicy {
    fn default() -> Self {
        SupportPolicy {
            retries: 3,
            fallback_to_sentence: true,
            concurrency: 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error("empty sentence")]
    EmptySentence,
    #[error("client failed after {attempts} attempts: {last}")]
    ClientUnavailable { attempts: usize, last: String },
    #[error("cache entry {key} is corrupt: {reason}")]
    CacheCorrupt { key: String, reason: String },
    #[error("cache I/O: {0}")]
    CacheIo(#[from] std::io::Error),
}

/// Why a candidate paragraph was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportInvalid {
    SentenceCount(usize),
    MissingOriginal,
}

impl std::fmt::Display for SupportInvalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SupportInvalid::SentenceCount(n) => write!(f, "{n} sentences, need 4-6"),
            SupportInvalid::MissingOriginal => write!(f, "original sentence missing"),
        }
    }
}

/// Check the two paragraph invariants against the original sentence.
pub fn validate_support(paragraph: &str, sentence: &str) -> Result<(), SupportInvalid> {
    let count = text::segment_sentences(paragraph).len();
    if !(4..=6).contains(&count) {
        return Err(SupportInvalid::SentenceCount(count));
    }
    if !text::normalize_loose(paragraph).contains(&text::normalize_loose(sentence)) {
        return Err(SupportInvalid::MissingOriginal);
    }
    Ok(())
}

/// Generate a validated support paragraph for one document.
///
/// The document itself is not touched; callers attach the result with
/// [`attach_support`].
pub fn generate_support(
    doc: &Document,
    client: &dyn GenerationClient,
    policy: &SupportPolicy,
) -> Result<SupportDocument, AugmentError> {
    let sentence = doc.sentence_text();
    let prompt = build_prompt(&sentence)?;

    let mut last = String::from("no attempts made");
    for _ in 0..policy.retries.max(1) {
        match client.complete(&prompt) {
            Ok(paragraph) => match validate_support(&paragraph, &sentence) {
                Ok(()) => {
                    return Ok(SupportDocument {
                        text: paragraph,
                        source: client.source(),
                    })
                }
                Err(reason) => last = format!("invalid paragraph: {reason}"),
            },
            Err(e) => last = e,
        }
    }
    if policy.fallback_to_sentence {
        Ok(SupportDocument {
            text: sentence,
            source: SupportSource::Mock,
        })
    } else {
        Err(AugmentError::ClientUnavailable {
            attempts: policy.retries.max(1),
            last,
        })
    }
}

/// Return a copy of `doc` with the support paragraph attached; every
/// other field is untouched.
pub fn attach_support(doc: &Document, support: SupportDocument) -> Document {
    let mut out = doc.clone();
    out.support = Some(support);
    out
}

/// Augment a corpus, consulting the cache before the client. Client
/// calls run with at most `policy.concurrency` in flight; cache writes
/// are atomic. Returns the augmented documents in input order along
/// with the number of client calls actually made.
pub fn augment_corpus(
    docs: &[Document],
    client: &(dyn GenerationClient + Sync),
    policy: &SupportPolicy,
    cache: Option<&SupportCache>,
) -> Result<(Vec<Document>, usize), AugmentError> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    let client_calls = AtomicUsize::new(0);

    let mut out = Vec::with_capacity(docs.len());
    for chunk in docs.chunks(policy.concurrency.max(1)) {
        let results: Vec<Result<Document, AugmentError>> = crate::par::map(chunk, |doc| {
            let sentence = doc.sentence_text();
            let prompt = build_prompt(&sentence)?;
            if let Some(cache) = cache {
                let key = cache::cache_key(&prompt, PROMPT_VERSION);
                match cache.get(&key, &sentence) {
                    Ok(Some(hit)) => return Ok(attach_support(doc, hit)),
                    Ok(None) => {}
                    Err(AugmentError::CacheCorrupt { .. }) => {
                        // fall through and regenerate below
                        cache.evict(&key)?;
                    }
                    Err(e) => return Err(e),
                }
                client_calls.fetch_add(1, Ordering::Relaxed);
                let support = generate_support(doc, client, policy)?;
                if validate_support(&support.text, &sentence).is_ok() {
                    cache.put(&key, &support)?;
                }
                Ok(attach_support(doc, support))
            } else {
                client_calls.fetch_add(1, Ordering::Relaxed);
                let support = generate_support(doc, client, policy)?;
                Ok(attach_support(doc, support))
            }
        });
        for r in results {
            out.push(r?);
        }
    }
    Ok((out, client_calls.into_inner()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures;

    #[test]
    fn mock_client_produces_valid_support() {
        let doc = fixtures::miller_document();
        let client = MockClient::default();
        let support = generate_support(&doc, &client, &SupportPolicy::default()).unwrap();
        assert_eq!(support.source, SupportSource::Mock);
        let n = support.sentence_spans().len();
        assert!((4..=6).contains(&n), "{n} sentences");
        assert!(text::normalize_loose(&support.text)
            .contains(&text::normalize_loose(&doc.sentence_text())));
    }

    #[test]
    fn retries_then_succeeds() {
        let doc = fixtures::tiny_document("t", &["The", "ban", "stands", "."]);
        let sentence = doc.sentence_text();
        let good = format!(
            "{sentence} Officials confirmed the decision. Markets reacted quickly. Analysts expect appeals. Nothing changed overnight."
        );
        let client = ScriptedClient::new(vec![
            Ok("Too short. Really.".to_string()),
            Ok("Still too short. Yes.".to_string()),
            Ok(good.clone()),
        ]);
        let support = generate_support(&doc, &client, &SupportPolicy::default()).unwrap();
        assert_eq!(support.text, good);
        assert_eq!(client.calls(), 3);
    }

    #[test]
    fn fallback_returns_original_sentence() {
        let doc = fixtures::tiny_document("t", &["The", "ban", "stands", "."]);
        let client = ScriptedClient::always(Ok("Nope.".to_string()));
        let support = generate_support(&doc, &client, &SupportPolicy::default()).unwrap();
        assert_eq!(support.text, doc.sentence_text());
        assert_eq!(support.source, SupportSource::Mock);
    }

    #[test]
    fn fallback_disabled_surfaces_error() {
        let doc = fixtures::tiny_document("t", &["The", "ban", "stands", "."]);
        let client = ScriptedClient::always(Err("timeout".to_string()));
        let policy = SupportPolicy {
            fallback_to_sentence: false,
            ..SupportPolicy::default()
        };
        match generate_support(&doc, &client, &policy) {
            Err(AugmentError::ClientUnavailable { attempts: 3, last }) => {
                assert!(last.contains("timeout"))
            }
            other => panic!("expected ClientUnavailable, got {other:?}"),
        }
    }

    #[test]
    fn attach_support_leaves_other_fields_alone() {
        let doc = fixtures::miller_document();
        let support = SupportDocument {
            text: "x".into(),
            source: SupportSource::Mock,
        };
        let augmented = attach_support(&doc, support);
        assert_eq!(augmented.tokens, doc.tokens);
        assert_eq!(augmented.entities, doc.entities);
        assert_eq!(augmented.relations, doc.relations);
        assert!(augmented.support.is_some());
    }

    #[test]
    fn augment_is_deterministic_offline() {
        let docs = vec![
            fixtures::miller_document(),
            fixtures::tiny_document("t2", &["EU", "rejects", "the", "call", "."]),
        ];
        let client = MockClient::default();
        let policy = SupportPolicy::default();
        let (a, _) = augment_corpus(&docs, &client, &policy, None).unwrap();
        let (b, _) = augment_corpus(&docs, &client, &policy, None).unwrap();
        assert_eq!(a, b);
    }
}
