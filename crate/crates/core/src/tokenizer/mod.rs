//! Normalisation, tokenisation and sentence splitting for Arabic-script
//! Central Kurdish text. All offsets are codepoint offsets into
//! [`NormalizedText::text`].

use serde::{Deserialize, Serialize};
use std::fmt;
use unicode_normalization::char::is_combining_mark;

mod normalize;

pub use normalize::{normalize_bytes, normalize_text, NormalizedText, LETTER_FOLDING};

/// Characters that form punctuation tokens. Each one is its own token.
pub const PUNCTUATION: &[char] = &[
    '.', ',', ';', ':', '!', '?', '"', '\'', '(', ')', '[', ']', '{', '}', '-', '–', '—', '…',
    '«', '»', '‹', '›', '“', '”', '‘', '’', '،', '؛', '؟', '۔', '٫', '٬',
];

/// Sentence terminators; they end a sentence only when followed by
/// whitespace or the end of the text.
pub const SENTENCE_TERMINATORS: &[char] = &['۔', '.', '؟', '!', '؛'];

/// The Kurdish conjunction "and", always a token of its own.
pub const CONJUNCTION: &str = "و";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Punctuation,
    Number,
    Symbol,
}

impl TokenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Word => "word",
            TokenKind::Punctuation => "punctuation",
            TokenKind::Number => "number",
            TokenKind::Symbol => "symbol",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub index: usize,
    pub kind: TokenKind,
}

impl Token {
    /// Build a free-standing token, e.g. for analysing a single word.
    pub fn word(surface: &str) -> Token {
        let kind = classify_surface(surface);
        Token {
            surface: surface.to_string(),
            start: 0,
            end: surface.chars().count(),
            index: 0,
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub start: usize,
    pub end: usize,
    pub tokens: Vec<Token>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Space,
    Digit,
    Punct,
    Letter,
    Joiner,
    Other,
}

fn is_joiner(c: char) -> bool {
    matches!(
        c,
        '\u{200C}' | '\u{200D}' | '\u{200E}' | '\u{200F}' | '\u{061C}'
            | '\u{202A}'..='\u{202E}' | '\u{2066}'..='\u{2069}'
    )
}

fn classify(c: char) -> CharClass {
    if c.is_whitespace() {
        CharClass::Space
    } else if c.is_numeric() {
        CharClass::Digit
    } else if PUNCTUATION.contains(&c) {
        CharClass::Punct
    } else if c.is_alphabetic() || is_combining_mark(c) {
        CharClass::Letter
    } else if is_joiner(c) {
        CharClass::Joiner
    } else {
        CharClass::Other
    }
}

fn classify_surface(surface: &str) -> TokenKind {
    let classes: Vec<_> = surface.chars().map(classify).collect();
    if classes.is_empty() {
        TokenKind::Symbol
    } else if classes.iter().all(|c| *c == CharClass::Digit) {
        TokenKind::Number
    } else if classes.iter().any(|c| *c == CharClass::Letter) {
        TokenKind::Word
    } else if classes.iter().all(|c| *c == CharClass::Punct) {
        TokenKind::Punctuation
    } else {
        TokenKind::Symbol
    }
}

/// Split normalized text into tokens.
///
/// Whitespace separates; every punctuation character is a token of its own;
/// digit runs become number tokens; letters (with combining marks, ZWNJ and
/// bidi controls) form words; anything else groups into symbol tokens.
/// Indices number the tokens of the whole text.
pub fn tokenize(nt: &NormalizedText) -> Vec<Token> {
    let chars = nt.chars();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let class = classify(chars[i]);
        let start = i;
        i += 1;
        let kind = match class {
            CharClass::Space => continue,
            CharClass::Punct => TokenKind::Punctuation,
            CharClass::Digit => {
                while i < chars.len() && classify(chars[i]) == CharClass::Digit {
                    i += 1;
                }
                TokenKind::Number
            }
            CharClass::Letter | CharClass::Joiner => {
                let mut has_letter = class == CharClass::Letter;
                while i < chars.len() {
                    match classify(chars[i]) {
                        CharClass::Letter => has_letter = true,
                        CharClass::Joiner => {}
                        _ => break,
                    }
                    i += 1;
                }
                if has_letter {
                    TokenKind::Word
                } else {
                    TokenKind::Symbol
                }
            }
            CharClass::Other => {
                while i < chars.len() && classify(chars[i]) == CharClass::Other {
                    i += 1;
                }
                TokenKind::Symbol
            }
        };
        tokens.push(Token {
            surface: chars[start..i].iter().collect(),
            start,
            end: i,
            index: tokens.len(),
            kind,
        });
    }
    tokens
}

/// Sentence boundaries as `[start, end)` codepoint ranges, without tokens.
///
/// A sentence starts at the first non-whitespace character and ends after a
/// terminator followed by whitespace or end of text; trailing content
/// without a terminator forms a final sentence.
pub fn sentence_boundaries(nt: &NormalizedText) -> Vec<(usize, usize)> {
    let chars = nt.chars();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut last_content = 0;
    for (i, &c) in chars.iter().enumerate() {
        if c.is_whitespace() {
            continue;
        }
        let s = *start.get_or_insert(i);
        last_content = i + 1;
        let followed_by_break = chars.get(i + 1).map_or(true, |n| n.is_whitespace());
        if SENTENCE_TERMINATORS.contains(&c) && followed_by_break {
            spans.push((s, i + 1));
            start = None;
        }
    }
    if let Some(s) = start {
        spans.push((s, last_content));
    }
    spans
}

/// Split into sentences and tokenize; token indices restart in each sentence.
pub fn split_sentences(nt: &NormalizedText) -> Vec<SentenceSpan> {
    let mut tokens = tokenize(nt).into_iter().peekable();
    sentence_boundaries(nt)
        .into_iter()
        .map(|(start, end)| {
            let mut sentence = SentenceSpan {
                start,
                end,
                tokens: Vec::new(),
            };
            while let Some(t) = tokens.next_if(|t| t.start < end) {
                sentence.tokens.push(Token {
                    index: sentence.tokens.len(),
                    ..t
                });
            }
            sentence
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<(String, TokenKind)> {
        tokenize(&normalize_text(text))
            .into_iter()
            .map(|t| (t.surface, t.kind))
            .collect()
    }

    #[test]
    fn conjunction_phrase() {
        let toks = surfaces("جل و بەرگ");
        assert_eq!(
            toks,
            vec![
                ("جل".to_string(), TokenKind::Word),
                ("و".to_string(), TokenKind::Word),
                ("بەرگ".to_string(), TokenKind::Word),
            ]
        );
    }

    #[test]
    fn eastern_arabic_digits() {
        assert_eq!(surfaces("١٢٣"), vec![("١٢٣".to_string(), TokenKind::Number)]);
        assert_eq!(surfaces("12"), vec![("12".to_string(), TokenKind::Number)]);
    }

    #[test]
    fn peels_punctuation() {
        let toks = surfaces("«نان»،");
        let kinds: Vec<_> = toks.iter().map(|(_, k)| *k).collect();
        assert_eq!(toks[1].0, "نان");
        assert_eq!(
            kinds,
            vec![
                TokenKind::Punctuation,
                TokenKind::Word,
                TokenKind::Punctuation,
                TokenKind::Punctuation
            ]
        );
    }

    #[test]
    fn zwnj_stays_inside_word() {
        let toks = surfaces("هەڵ\u{200C}گرتن");
        assert_eq!(toks.len(), 1);
        assert_eq!(toks[0].1, TokenKind::Word);
    }

    #[test]
    fn symbols() {
        assert_eq!(surfaces("+=")[0].1, TokenKind::Symbol);
        assert_eq!(surfaces("\u{200F}")[0].1, TokenKind::Symbol);
    }

    #[test]
    fn offsets_match_slices() {
        let nt = normalize_text("ئەمە «نانە». ١٢ جل و بەرگ!");
        for t in tokenize(&nt) {
            assert_eq!(nt.slice(t.start, t.end), t.surface);
        }
    }

    #[test]
    fn sentences() {
        assert!(split_sentences(&normalize_text("")).is_empty());
        assert!(split_sentences(&normalize_text("   ")).is_empty());

        let nt = normalize_text("یەک. دوو؟ سێ");
        let s = split_sentences(&nt);
        assert_eq!(s.len(), 3);
        assert_eq!(nt.slice(s[0].start, s[0].end), "یەک.");
        assert_eq!(s[2].tokens[0].surface, "سێ");
        assert_eq!(s[1].tokens[0].index, 0);

        let s = split_sentences(&normalize_text("یەک. دوو؟"));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn terminator_inside_number_does_not_split() {
        let s = split_sentences(&normalize_text("1.5 و 2"));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        let s = split_sentences(&normalize_text("جل و بەرگ"));
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].tokens.len(), 3);
    }
}
