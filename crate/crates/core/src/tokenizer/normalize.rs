use serde::{Deserialize, Serialize};
use unicode_normalization::char::{canonical_combining_class, decompose_compatible};
use unicode_normalization::UnicodeNormalization;

const ZWSP: char = '\u{200B}';
const BOM: char = '\u{FEFF}';

/// Arabic letters folded to their Kurdish counterparts.
pub const LETTER_FOLDING: [(char, char); 3] = [
    ('\u{064A}', '\u{06CC}'), // Arabic yeh -> Farsi yeh
    ('\u{0649}', '\u{06CC}'), // alef maksura -> Farsi yeh
    ('\u{0643}', '\u{06A9}'), // Arabic kaf -> keheh
];

/// Text in canonical form together with a map back to the raw input.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NormalizedText {
    pub text: String,
    /// `char_map[i]` is the codepoint index in the raw input that produced
    /// normalized codepoint `i`.
    pub char_map: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl NormalizedText {
    /// Length in codepoints.
    pub fn char_len(&self) -> usize {
        self.char_map.len()
    }

    /// Codepoint slice `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> String {
        self.text.chars().skip(start).take(end.saturating_sub(start)).collect()
    }

    pub fn chars(&self) -> Vec<char> {
        self.text.chars().collect()
    }
}

fn is_presentation_form(c: char) -> bool {
    matches!(c, '\u{FB50}'..='\u{FDFF}' | '\u{FE70}'..='\u{FEFE}')
}

fn fold_letter(c: char) -> char {
    LETTER_FOLDING
        .iter()
        .find(|(from, _)| *from == c)
        .map_or(c, |&(_, to)| to)
}

/// Normalize raw text: strip zero-width spaces and byte-order marks, expand
/// Arabic presentation forms, compose to NFC, fold Arabic yeh/kaf to the
/// Kurdish letters and collapse each whitespace run into one separator (a
/// newline if the run contained one, a space otherwise). ZWNJ is kept.
pub fn normalize_text(raw: &str) -> NormalizedText {
    let mut stage: Vec<(char, usize)> = Vec::with_capacity(raw.len());
    for (i, c) in raw.chars().enumerate() {
        match c {
            ZWSP | BOM => {}
            c if is_presentation_form(c) => decompose_compatible(c, |d| stage.push((d, i))),
            c => stage.push((c, i)),
        }
    }

    let composed = compose(&stage);

    let mut text = String::with_capacity(raw.len());
    let mut char_map = Vec::with_capacity(composed.len());
    let mut iter = composed.into_iter().peekable();
    while let Some((c, orig)) = iter.next() {
        if c.is_whitespace() {
            let mut newline = c == '\n';
            while let Some(&(next, _)) = iter.peek() {
                if !next.is_whitespace() {
                    break;
                }
                newline |= next == '\n';
                iter.next();
            }
            text.push(if newline { '\n' } else { ' ' });
        } else {
            text.push(fold_letter(c));
        }
        char_map.push(orig);
    }

    NormalizedText {
        text,
        char_map,
        warnings: Vec::new(),
    }
}

/// Like [`normalize_text`] but from bytes; invalid UTF-8 sequences become
/// U+FFFD and are reported in `warnings`.
pub fn normalize_bytes(raw: &[u8]) -> NormalizedText {
    match std::str::from_utf8(raw) {
        Ok(s) => normalize_text(s),
        Err(_) => {
            let lossy = String::from_utf8_lossy(raw);
            let mut nt = normalize_text(&lossy);
            let mut rest = raw;
            let mut offset = 0;
            while let Err(e) = std::str::from_utf8(rest) {
                let bad = e.valid_up_to();
                nt.warnings.push(format!(
                    "invalid UTF-8 at byte {} replaced with U+FFFD",
                    offset + bad
                ));
                let skip = bad + e.error_len().unwrap_or(rest.len() - bad).max(1);
                offset += skip;
                rest = &rest[skip.min(rest.len())..];
            }
            nt
        }
    }
}

/// NFC composition that keeps track of source offsets.
///
/// The input is cut into chunks at starters that do not interact with the
/// preceding chunk; each chunk is composed independently. When composition
/// changes a chunk, all its output characters map to the chunk's first
/// source offset, which keeps the map monotone.
fn compose(stage: &[(char, usize)]) -> Vec<(char, usize)> {
    let mut out = Vec::with_capacity(stage.len());
    let mut chunk: Vec<(char, usize)> = Vec::new();

    for &(c, i) in stage {
        if !chunk.is_empty() && canonical_combining_class(c) == 0 && independent(&chunk, c) {
            flush(&mut chunk, &mut out);
        }
        chunk.push((c, i));
    }
    flush(&mut chunk, &mut out);
    out
}

fn independent(chunk: &[(char, usize)], c: char) -> bool {
    if c.is_ascii() && chunk.iter().all(|(x, _)| x.is_ascii()) {
        return true;
    }
    let head: String = chunk.iter().map(|(x, _)| *x).collect();
    let mut joined = head.clone();
    joined.push(c);
    let together: String = joined.nfc().collect();
    let mut apart: String = head.nfc().collect();
    apart.extend(std::iter::once(c).nfc());
    together == apart
}

fn flush(chunk: &mut Vec<(char, usize)>, out: &mut Vec<(char, usize)>) {
    if chunk.is_empty() {
        return;
    }
    let composed: Vec<char> = chunk.iter().map(|(c, _)| *c).nfc().collect();
    if composed.len() == chunk.len() && composed.iter().zip(chunk.iter()).all(|(a, (b, _))| a == b)
    {
        out.append(chunk);
    } else {
        let first = chunk[0].1;
        out.extend(composed.into_iter().map(|c| (c, first)));
        chunk.clear();
    }
}
