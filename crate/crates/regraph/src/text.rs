//! Shared text utilities: tokenization, sentence segmentation, and the
//! loose normalization used when checking that a generated paragraph
//! contains the original sentence.

/// Characters detached from word boundaries during tokenization.
const DETACH: &[char] = &[
    '.', ',', '!', '?', ';', ':', '(', ')', '[', ']', '{', '}', '"', '\'', '«', '»', '…', '“',
    '”', '‘', '’',
];

/// Words that commonly precede a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "Mr", "Mrs", "Ms", "Dr", "Prof", "St", "No", "Inc", "Ltd", "Co", "Jr", "Sr", "vs", "etc",
    "e.g", "i.e", "cf", "al", "ca", "approx", "Vol", "Fig", "Eq",
];

/// Whitespace split followed by punctuation detachment.
///
/// Leading and trailing punctuation become their own tokens; internal
/// punctuation (hyphens, apostrophes-in-word, "U.S"-style periods) is
/// kept attached so tokens stay close to the source corpus convention.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        detach_punct(chunk, &mut out);
    }
    out
}

fn detach_punct(chunk: &str, out: &mut Vec<String>) {
    let mut core = chunk;
    let mut leading = Vec::new();
    let mut trailing = Vec::new();

    loop {
        let mut chars = core.chars();
        match chars.next() {
            Some(c) if DETACH.contains(&c) && core.chars().count() > 1 => {
                leading.push(c.to_string());
                core = chars.as_str();
            }
            _ => break,
        }
    }
    loop {
        let mut chars = core.chars();
        match chars.next_back() {
            Some(c) if DETACH.contains(&c) && core.chars().count() > 1 => {
                trailing.push(c.to_string());
                core = chars.as_str();
            }
            _ => break,
        }
    }

    out.extend(leading);
    if !core.is_empty() {
        out.push(core.to_string());
    }
    out.extend(trailing.into_iter().rev());
}

/// Sentence segmentation returning byte-offset spans `(start, end)` into
/// `text`, end exclusive, trimmed of surrounding whitespace.
///
/// A boundary is a run of `.`/`!`/`?` followed by whitespace and an
/// uppercase letter (optionally behind an opening quote or bracket),
/// unless the word before the period is a known abbreviation.
pub fn segment_sentences(text: &str) -> Vec<(usize, usize)> {
    let bytes = text.as_bytes();
    let mut spans = Vec::new();
    let mut start = 0usize;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0usize;

    while i < chars.len() {
        let (_, c) = chars[i];
        if c == '.' || c == '!' || c == '?' {
            // consume the whole terminator run
            let mut j = i;
            while j + 1 < chars.len() && matches!(chars[j + 1].1, '.' | '!' | '?') {
                j += 1;
            }
            let terminator_end = if j + 1 < chars.len() {
                chars[j + 1].0
            } else {
                text.len()
            };

            let abbreviated = c == '.' && is_abbreviation(text, chars[i].0);
            if !abbreviated && boundary_follows(&chars, j) {
                push_trimmed(text, bytes, start, terminator_end, &mut spans);
                start = terminator_end;
            } else if j + 1 >= chars.len() {
                // terminator at end of text closes the last sentence
            }
            i = j + 1;
            continue;
        }
        i += 1;
    }
    push_trimmed(text, bytes, start, text.len(), &mut spans);
    spans
}

/// Convenience: the segmented sentences as owned strings.
pub fn split_sentences(text: &str) -> Vec<String> {
    segment_sentences(text)
        .into_iter()
        .map(|(s, e)| text[s..e].to_string())
        .collect()
}

fn boundary_follows(chars: &[(usize, char)], terminator_idx: usize) -> bool {
    let mut k = terminator_idx + 1;
    if k >= chars.len() {
        return false; // end of text; handled by the final span push
    }
    if !chars[k].1.is_whitespace() {
        return false;
    }
    while k < chars.len() && chars[k].1.is_whitespace() {
        k += 1;
    }
    // allow an opening quote/bracket before the capital
    while k < chars.len() && matches!(chars[k].1, '"' | '\'' | '“' | '‘' | '(' | '[' | '«') {
        k += 1;
    }
    k < chars.len() && chars[k].1.is_uppercase()
}

fn is_abbreviation(text: &str, period_pos: usize) -> bool {
    let before = &text[..period_pos];
    let word = before
        .rsplit(|c: char| c.is_whitespace())
        .next()
        .unwrap_or("");
    let word = word.trim_matches(|c: char| DETACH.contains(&c) && c != '.');
    if word.is_empty() {
        return false;
    }
    // single letters ("J. R. R. Tolkien") read as initials
    if word.chars().count() == 1 && word.chars().next().is_some_and(|c| c.is_uppercase()) {
        return true;
    }
    ABBREVIATIONS.iter().any(|a| *a == word)
}

fn push_trimmed(
    text: &str,
    _bytes: &[u8],
    start: usize,
    end: usize,
    spans: &mut Vec<(usize, usize)>,
) {
    let slice = &text[start..end];
    let trimmed = slice.trim();
    if trimmed.is_empty() {
        return;
    }
    let lead = slice.len() - slice.trim_start().len();
    let s = start + lead;
    spans.push((s, s + trimmed.len()));
}

/// Loose normalization: unify quote characters, collapse whitespace runs,
/// and strip the space that token-joined text leaves before punctuation.
/// Used for substring containment checks against generated paragraphs.
pub fn normalize_loose(text: &str) -> String {
    let mut mapped = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '“' | '”' | '«' | '»' => mapped.push('"'),
            '‘' | '’' => mapped.push('\''),
            '–' | '—' => mapped.push('-'),
            c if c.is_whitespace() => mapped.push(' '),
            c => mapped.push(c),
        }
    }
    let collapsed = mapped.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut out = String::with_capacity(collapsed.len());
    let chars: Vec<char> = collapsed.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if c == ' ' {
            if let Some(&next) = chars.get(i + 1) {
                if matches!(next, '.' | ',' | '!' | '?' | ';' | ':' | ')' | ']' | '%') {
                    continue;
                }
            }
            if i > 0 && matches!(chars[i - 1], '(' | '[') {
                continue;
            }
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_detaches_punctuation() {
        assert_eq!(
            tokenize("EU rejects German call, firmly."),
            vec!["EU", "rejects", "German", "call", ",", "firmly", "."]
        );
    }

    #[test]
    fn tokenize_keeps_internal_hyphens() {
        assert_eq!(
            tokenize("a computer-readable (electronic) reference"),
            vec!["a", "computer-readable", "(", "electronic", ")", "reference"]
        );
    }

    #[test]
    fn tokenize_lone_punct() {
        assert_eq!(tokenize(". . ."), vec![".", ".", "."]);
        assert_eq!(tokenize(""), Vec::<String>::new());
    }

    #[test]
    fn segments_basic_paragraph() {
        let text = "WordNet is a lexical database. It was created at Princeton. Many tools use it!";
        assert_eq!(
            split_sentences(text),
            vec![
                "WordNet is a lexical database.",
                "It was created at Princeton.",
                "Many tools use it!",
            ]
        );
    }

    #[test]
    fn abbreviation_guard_holds() {
        let text = "Dr. Miller led the project. It began in 1986.";
        assert_eq!(split_sentences(text).len(), 2);
        let text = "Tools such as parsers, e.g. TreeTagger, were common. Few remain.";
        assert_eq!(split_sentences(text).len(), 2);
    }

    #[test]
    fn segments_token_joined_text() {
        // tokens joined with spaces leave a space before the period
        let text = "EU rejects German call . The ban stands .";
        assert_eq!(split_sentences(text).len(), 2);
    }

    #[test]
    fn single_sentence_without_terminator() {
        assert_eq!(split_sentences("no terminator here"), vec!["no terminator here"]);
    }

    #[test]
    fn normalize_loose_handles_reflow() {
        let original = "EU rejects German call to boycott British lamb .";
        let generated = "Reports said that  EU rejects German call to boycott British lamb. Markets reacted.";
        assert!(normalize_loose(generated).contains(&normalize_loose(original)));
    }

    #[test]
    fn normalize_loose_quotes() {
        assert_eq!(normalize_loose("“quoted” text"), "\"quoted\" text");
    }
}
