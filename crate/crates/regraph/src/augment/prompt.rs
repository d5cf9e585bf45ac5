//! Prompt construction for support-paragraph generation.

use super::AugmentError;

/// Bump when the template changes so cached responses are not reused
/// across incompatible prompts.
pub const PROMPT_VERSION: &str = "v1";

const PREFIX: &str = "Generate some context for the given sentence: ";
const SUFFIX: &str =
    " while including the sentence in the paragraph generated. Keep the paragraph around 4 sentences.";

/// Fill the generation template with the sentence, verbatim. Braces or
/// any other characters in the sentence are preserved as-is.
pub fn build_prompt(sentence: &str) -> Result<String, AugmentError> {
    if sentence.trim().is_empty() {
        return Err(AugmentError::EmptySentence);
    }
    Ok(format!("{PREFIX}{sentence}{SUFFIX}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_shape() {
        let p = build_prompt("For many years starting from 1986, Miller directed it.").unwrap();
        assert!(p.starts_with(
            "Generate some context for the given sentence: For many years starting from 1986"
        ));
        assert!(p.ends_with("Keep the paragraph around 4 sentences."));
    }

    #[test]
    fn empty_sentence_rejected() {
        assert!(matches!(build_prompt(""), Err(AugmentError::EmptySentence)));
        assert!(matches!(build_prompt("   "), Err(AugmentError::EmptySentence)));
    }

    #[test]
    fn braces_pass_through_verbatim() {
        let p = build_prompt("tokens like {this} survive").unwrap();
        assert!(p.contains("{this}"));
    }
}
