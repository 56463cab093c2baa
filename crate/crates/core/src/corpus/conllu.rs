//! CoNLL-U writer, reader and structural validator.
//!
//! Export layout per sentence: `# sent_id`, `# text`, then ten tab-separated
//! columns per token. LEMMA is the core morph of a lexicon-backed analysis,
//! UPOS the UD label of the current tag, XPOS the canonical tag itself,
//! MISC `Prov=human|machine`. FEATS, HEAD, DEPREL and DEPS are `_`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphology::Morphology;
use crate::tagset::{TagRegistry, UdMode, UD_UPOS_LABELS, UNK};
use crate::tokenizer::{normalize_text, TokenKind};

use super::{Annotation, Document, Provenance};

/// Render a document with its current annotations.
pub fn write_document(
    doc: &Document,
    current: &BTreeMap<(usize, usize), Annotation>,
    mode: UdMode,
    morphology: Option<&Morphology>,
    registry: &TagRegistry,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# newdoc id = {}", doc.id);
    for (si, sentence) in doc.sentences.iter().enumerate() {
        let text = doc
            .normalized
            .slice(sentence.start, sentence.end)
            .replace(['\n', '\r'], " ");
        let _ = writeln!(out, "# sent_id = {}-{}", doc.id, si + 1);
        let _ = writeln!(out, "# text = {text}");
        for token in &sentence.tokens {
            let lemma = match (morphology, token.kind) {
                (Some(m), TokenKind::Word) => m
                    .segment(token, 1)
                    .into_iter()
                    .next()
                    .filter(|s| s.is_lexical())
                    .map(|s| s.core().surface.clone()),
                _ => None,
            };
            let ann = current.get(&(si, token.index));
            let (upos, xpos, misc) = match ann {
                Some(a) => (
                    registry.ud_upos_for(&a.tag, mode).unwrap_or("X"),
                    a.tag.as_str(),
                    format!("Prov={}", a.provenance),
                ),
                None => ("_", "_", "_".to_string()),
            };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t_\t_\t_\t_\t{}",
                token.index + 1,
                token.surface,
                lemma.as_deref().unwrap_or("_"),
                upos,
                xpos,
                misc
            );
        }
        out.push('\n');
    }
    out
}

/// What to do with an XPOS value that is not a known tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownTagPolicy {
    #[default]
    Reject,
    ImportAsUnk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedToken {
    pub form: String,
    pub tag: Option<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSentence {
    pub sent_id: Option<String>,
    pub text: Option<String>,
    pub tokens: Vec<ParsedToken>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedDocument {
    pub doc_id: Option<String>,
    pub sentences: Vec<ParsedSentence>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse CoNLL-U text. XPOS drives the tag (aliases resolved); a file with
/// UPOS but no XPOS gets the `UNK` placeholder; multiword-token ranges and
/// empty nodes are skipped.
pub fn parse(
    input: &[u8],
    registry: &TagRegistry,
    policy: UnknownTagPolicy,
) -> Result<ParsedDocument> {
    let text = std::str::from_utf8(input).map_err(|e| {
        let line = input[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count() + 1;
        parse_err(line, "input is not valid UTF-8")
    })?;
    if text.trim().is_empty() {
        return Err(parse_err(1, "empty input"));
    }

    let mut doc = ParsedDocument::default();
    let mut current: Option<ParsedSentence> = None;
    let mut expected_id = 1usize;

    for (i, raw_line) in text.split('\n').enumerate() {
        let lineno = i + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.trim().is_empty() {
            if let Some(s) = current.take() {
                if s.tokens.is_empty() {
                    return Err(parse_err(lineno, "sentence without tokens"));
                }
                doc.sentences.push(s);
            }
            expected_id = 1;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some((key, value)) = comment.split_once('=') {
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "newdoc id" => doc.doc_id = Some(value.to_string()),
                    "sent_id" => {
                        current.get_or_insert_with(empty_sentence).sent_id =
                            Some(value.to_string())
                    }
                    "text" => {
                        current.get_or_insert_with(empty_sentence).text = Some(value.to_string())
                    }
                    _ => {}
                }
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(parse_err(lineno, format!("expected 10 columns, found {}", cols.len())));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let n: usize = id
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid ID `{id}`")))?;
        if n != expected_id {
            return Err(parse_err(lineno, format!("expected ID {expected_id}, found {n}")));
        }
        expected_id += 1;
        let form = cols[1];
        if form.is_empty() || form.chars().any(char::is_whitespace) {
            return Err(parse_err(lineno, "FORM is empty or contains whitespace"));
        }

        let (upos, xpos) = (cols[3], cols[4]);
        let tag = if xpos != "_" {
            match registry.resolve_alias(xpos) {
                Ok(t) => Some(t.to_string()),
                Err(e) => match policy {
                    UnknownTagPolicy::Reject => return Err(e),
                    UnknownTagPolicy::ImportAsUnk => Some(UNK.to_string()),
                },
            }
        } else if upos != "_" {
            Some(UNK.to_string())
        } else {
            None
        };
        let provenance = cols[9]
            .split('|')
            .find_map(|kv| kv.strip_prefix("Prov="))
            .map(|p| match p {
                "human" => Ok(Provenance::Human),
                "machine" => Ok(Provenance::Machine),
                other => Err(parse_err(lineno, format!("unknown provenance `{other}`"))),
            })
            .transpose()?
            .unwrap_or(Provenance::Machine);

        current
            .get_or_insert_with(empty_sentence)
            .tokens
            .push(ParsedToken {
                form: normalize_text(form).text,
                tag,
                provenance,
            });
    }
    if let Some(s) = current.take() {
        if s.tokens.is_empty() {
            return Err(parse_err(text.lines().count(), "sentence without tokens"));
        }
        doc.sentences.push(s);
    }
    Ok(doc)
}

fn empty_sentence() -> ParsedSentence {
    ParsedSentence {
        sent_id: None,
        text: None,
        tokens: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub line: usize,
    pub message: String,
}

/// Structural checks: ten columns, consecutive IDs from 1, non-empty FORM,
/// blank line after every sentence, trailing newline, and UPOS from the UD
/// inventory (plus `GRD` in paper mode) or `_`. XPOS must be `_` or a tag.
pub fn validate(input: &[u8], mode: UdMode, registry: &TagRegistry) -> Vec<Issue> {
    let mut issues = Vec::new();
    let issue = |issues: &mut Vec<Issue>, line: usize, m: String| {
        issues.push(Issue { line, message: m })
    };
    let text = match std::str::from_utf8(input) {
        Ok(t) => t,
        Err(_) => {
            issue(&mut issues, 1, "input is not valid UTF-8".into());
            return issues;
        }
    };
    if text.is_empty() {
        issue(&mut issues, 1, "empty input".into());
        return issues;
    }
    if !text.ends_with('\n') {
        issue(&mut issues, text.lines().count(), "missing trailing newline".into());
    }
    if text.contains('\r') {
        issue(&mut issues, 1, "CR line endings are not allowed".into());
    }

    let lines: Vec<&str> = text.lines().collect();
    let mut expected = 1usize;
    let mut in_sentence = false;
    let mut tokens_in_sentence = 0usize;
    for (i, line) in lines.iter().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            if in_sentence && tokens_in_sentence == 0 {
                issue(&mut issues, lineno, "sentence without tokens".into());
            }
            in_sentence = false;
            tokens_in_sentence = 0;
            expected = 1;
            continue;
        }
        if line.starts_with('#') {
            in_sentence = true;
            continue;
        }
        in_sentence = true;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            issue(&mut issues, lineno, format!("expected 10 columns, found {}", cols.len()));
            continue;
        }
        if cols.iter().any(|c| c.is_empty()) {
            issue(&mut issues, lineno, "empty field".into());
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        match cols[0].parse::<usize>() {
            Ok(n) if n == expected => expected += 1,
            Ok(n) => {
                issue(&mut issues, lineno, format!("expected ID {expected}, found {n}"));
                expected = n + 1;
            }
            Err(_) => issue(&mut issues, lineno, format!("invalid ID `{}`", cols[0])),
        }
        tokens_in_sentence += 1;
        if cols[1].chars().any(char::is_whitespace) {
            issue(&mut issues, lineno, "FORM contains whitespace".into());
        }
        let upos = cols[3];
        let upos_ok = upos == "_"
            || UD_UPOS_LABELS.contains(&upos)
            || (mode == UdMode::PaperLiteral && upos == "GRD");
        if !upos_ok {
            issue(&mut issues, lineno, format!("UPOS `{upos}` not allowed in {mode} mode"));
        }
        if cols[4] != "_" && registry.resolve_alias(cols[4]).is_err() {
            issue(&mut issues, lineno, format!("unknown XPOS `{}`", cols[4]));
        }
    }
    if in_sentence {
        issue(&mut issues, lines.len(), "last sentence not followed by a blank line".into());
    }
    issues
}
