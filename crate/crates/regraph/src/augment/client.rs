//! Generation clients: the trait, deterministic offline implementations,
//! and (behind the `online` feature) an OpenAI-compatible HTTP client.

use crate::corpus::SupportSource;
use crate::text;
use crate::util::{fnv1a, sha256_hex};
use std::collections::HashMap;
use std::sync::Mutex;

/// A chat-completion backend. `complete` returns the raw paragraph for
/// a prompt; errors are plain strings so retry logic stays uniform
/// across backends.
pub trait GenerationClient {
    fn complete(&self, prompt: &str) -> Result<String, String>;

    /// How documents produced by this client are tagged.
    fn source(&self) -> SupportSource {
        SupportSource::Generated
    }
}

/// Deterministic offline client. Synthesizes a 4-6 sentence paragraph
/// embedding the original sentence; identical prompts always produce
/// identical paragraphs, which keeps offline runs byte-reproducible.
#[derive(Debug, Default, Clone)]
pub struct MockClient;

const FILLERS: &[&str] = &[
    "The passage appears within a longer report covering the subject in more depth.",
    "Surrounding material provides additional background on the people and events involved.",
    "Commentators at the time discussed the wider implications of these developments.",
    "Related accounts describe how the situation evolved over the following period.",
    "Observers noted that the circumstances drew considerable public attention.",
    "Further details about the participants appear elsewhere in the same account.",
    "The broader context helps explain why the matter was considered significant.",
    "Contemporary records place these events within a larger ongoing story.",
];

impl MockClient {
    fn synthesize(sentence: &str) -> String {
        let h = fnv1a(sentence);
        // how many segments the sentence itself contributes
        let own = text::segment_sentences(sentence).len().max(1);
        let target = 4 + (h % 3) as usize; // 4..=6
        let fillers = target.saturating_sub(own);
        let position = if fillers == 0 { 0 } else { (h >> 8) as usize % (fillers + 1) };

        let mut parts: Vec<String> = Vec::with_capacity(fillers + 1);
        for i in 0..fillers {
            parts.push(FILLERS[(h as usize + i * 3) % FILLERS.len()].to_string());
        }
        let mut own_text = sentence.trim().to_string();
        if !own_text.ends_with(['.', '!', '?']) {
            own_text.push('.');
        }
        parts.insert(position.min(parts.len()), own_text);
        parts.join(" ")
    }
}

impl GenerationClient for MockClient {
    fn complete(&self, prompt: &str) -> Result<String, String> {
        let sentence = extract_sentence(prompt);
        Ok(Self::synthesize(sentence))
    }

    fn source(&self) -> SupportSource {
        SupportSource::Mock
    }
}

/// Recover the sentence from the filled template.
fn extract_sentence(prompt: &str) -> &str {
    let after = prompt
        .strip_prefix("Generate some context for the given sentence: ")
        .unwrap_or(prompt);
    after
        .strip_suffix(" while including the sentence in the paragraph generated. Keep the paragraph around 4 sentences.")
        .unwrap_or(after)
}

/// Offline client backed by a fixtures file: a JSON object mapping the
/// SHA-256 of each sentence to its canned paragraph.
pub struct FixtureClient {
    paragraphs: HashMap<String, String>,
}

impl FixtureClient {
    pub fn from_file(path: &std::path::Path) -> Result<Self, String> {
        let content = std::fs::read_to_string(path).map_err(|e| format!("{path:?}: {e}"))?;
        let paragraphs: HashMap<String, String> =
            serde_json::from_str(&content).map_err(|e| format!("{path:?}: {e}"))?;
        Ok(FixtureClient { paragraphs })
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (String, String)>) -> Self {
        FixtureClient {
            paragraphs: entries
                .into_iter()
                .map(|(sentence, paragraph)| (sha256_hex(&sentence), paragraph))
                .collect(),
        }
    }
}

impl GenerationClient for FixtureClient {
    fn complete(&self, prompt: &str) -> Result<String, String> {
        let key = sha256_hex(extract_sentence(prompt));
        self.paragraphs
            .get(&key)
            .cloned()
            .ok_or_else(|| format!("no fixture for sentence hash {key}"))
    }

    fn source(&self) -> SupportSource {
        SupportSource::Mock
    }
}

/// Test client that replays a scripted sequence of responses; once the
/// script is exhausted the last response repeats.
pub struct ScriptedClient {
    responses: Vec<Result<String, String>>,
    cursor: Mutex<usize>,
}

impl ScriptedClient {
    pub fn new(responses: Vec<Result<String, String>>) -> Self {
        assert!(!responses.is_empty());
        ScriptedClient {
            responses,
            cursor: Mutex::new(0),
        }
    }

    pub fn always(response: Result<String, String>) -> Self {
        Self::new(vec![response])
    }

    /// Number of completions requested so far.
    pub fn calls(&self) -> usize {
        *self.cursor.lock().unwrap()
    }
}

impl GenerationClient for ScriptedClient {
    fn complete(&self, _prompt: &str) -> Result<String, String> {
        let mut cursor = self.cursor.lock().unwrap();
        let idx = (*cursor).min(self.responses.len() - 1);
        *cursor += 1;
        self.responses[idx].clone()
    }

    fn source(&self) -> SupportSource {
        SupportSource::Mock
    }
}

#[cfg(feature = "online")]
pub mod online {
    //! OpenAI-compatible chat client. The credential comes from the
    //! `REGRAPH_API_KEY` environment variable.

    use super::GenerationClient;
    use serde::Deserialize;

    pub struct OnlineClient {
        base_url: String,
        model: String,
        temperature: f64,
        api_key: String,
        http: reqwest::blocking::Client,
    }

    #[derive(Deserialize)]
    struct ChatResponse {
        choices: Vec<Choice>,
    }

    #[derive(Deserialize)]
    struct Choice {
        message: Message,
    }

    #[derive(Deserialize)]
    struct Message {
        content: String,
    }

    impl OnlineClient {
        pub fn new(base_url: &str, model: &str, temperature: f64) -> Result<Self, String> {
            let api_key = std::env::var("REGRAPH_API_KEY")
                .map_err(|_| "REGRAPH_API_KEY not set".to_string())?;
            Ok(OnlineClient {
                base_url: base_url.trim_end_matches('/').to_string(),
                model: model.to_string(),
                temperature,
                api_key,
                http: reqwest::blocking::Client::new(),
            })
        }
    }

    impl GenerationClient for OnlineClient {
        fn complete(&self, prompt: &str) -> Result<String, String> {
            let body = serde_json::json!({
                "model": self.model,
                "temperature": self.temperature,
                "messages": [{"role": "user", "content": prompt}],
            });
            let response = self
                .http
                .post(format!("{}/chat/completions", self.base_url))
                .bearer_auth(&self.api_key)
                .json(&body)
                .send()
                .map_err(|e| e.to_string())?
                .error_for_status()
                .map_err(|e| e.to_string())?;
            let parsed: ChatResponse = response.json().map_err(|e| e.to_string())?;
            parsed
                .choices
                .first()
                .map(|c| c.message.content.clone())
                .ok_or_else(|| "empty choices in chat response".to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::build_prompt;

    #[test]
    fn mock_is_deterministic() {
        let prompt = build_prompt("The ban stands .").unwrap();
        let client = MockClient;
        assert_eq!(client.complete(&prompt), client.complete(&prompt));
    }

    #[test]
    fn mock_embeds_sentence_and_counts() {
        for sentence in ["The ban stands .", "EU rejects German call to boycott British lamb ."] {
            let paragraph = MockClient::synthesize(sentence);
            let n = text::segment_sentences(&paragraph).len();
            assert!((4..=6).contains(&n), "{sentence:?} -> {n} sentences");
            assert!(text::normalize_loose(&paragraph).contains(&text::normalize_loose(sentence)));
        }
    }

    #[test]
    fn fixture_client_misses_loudly() {
        let client = FixtureClient::from_entries(vec![(
            "known sentence".to_string(),
            "A paragraph.".to_string(),
        )]);
        let prompt = build_prompt("unknown sentence").unwrap();
        assert!(client.complete(&prompt).is_err());
        let prompt = build_prompt("known sentence").unwrap();
        assert_eq!(client.complete(&prompt).unwrap(), "A paragraph.");
    }

    #[test]
    fn scripted_client_replays_and_repeats() {
        let client = ScriptedClient::new(vec![Ok("a".into()), Ok("b".into())]);
        assert_eq!(client.complete("x").unwrap(), "a");
        assert_eq!(client.complete("x").unwrap(), "b");
        assert_eq!(client.complete("x").unwrap(), "b");
        assert_eq!(client.calls(), 3);
    }
}
