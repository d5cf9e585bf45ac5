//! Deterministic subword splitter.
//!
//! Words longer than the piece budget split into fixed-width chunks
//! with a `##` continuation marker, WordPiece-style. No vocabulary is
//! involved, so the split is a pure function of the surface string —
//! enough to exercise subword-to-word pooling and length budgeting.

/// Maximum characters per piece before a word is chunked.
pub const DEFAULT_PIECE_LEN: usize = 7;

pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";

#[derive(Debug, Clone, Copy)]
pub struct SubwordTokenizer {
    pub piece_len: usize,
}

impl Default for SubwordTokenizer {
    fn default() -> Self {
        SubwordTokenizer {
            piece_len: DEFAULT_PIECE_LEN,
        }
    }
}

impl SubwordTokenizer {
    /// Pieces for one word; always at least one.
    pub fn pieces(&self, word: &str) -> Vec<String> {
        let chars: Vec<char> = word.chars().collect();
        if chars.len() <= self.piece_len {
            return vec![word.to_string()];
        }
        let mut out = Vec::with_capacity(chars.len() / self.piece_len + 1);
        for (i, chunk) in chars.chunks(self.piece_len).enumerate() {
            let piece: String = chunk.iter().collect();
            if i == 0 {
                out.push(piece);
            } else {
                out.push(format!("##{piece}"));
            }
        }
        out
    }

    pub fn piece_count(&self, word: &str) -> usize {
        let len = word.chars().count();
        if len == 0 {
            1
        } else {
            len.div_ceil(self.piece_len)
        }
    }

    /// Subword count of a whole sentence, specials excluded.
    pub fn sentence_piece_count(&self, sentence: &[String]) -> usize {
        sentence.iter().map(|w| self.piece_count(w)).sum()
    }
}
