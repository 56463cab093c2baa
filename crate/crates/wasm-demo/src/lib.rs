//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns plain strings; results are JSON so the page
//! needs no generated type glue beyond `wasm-bindgen`'s string passing.

use std::sync::OnceLock;

use ckl_pos::morphology::Segmentation;
use ckl_pos::suggestion::{transitions, Context, ScoredTag, Suggester};
use ckl_pos::tokenizer::{normalize_text, split_sentences, Token};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn suggester() -> &'static Suggester {
    static SUGGESTER: OnceLock<Suggester> = OnceLock::new();
    SUGGESTER.get_or_init(Suggester::seed)
}

#[derive(Serialize)]
struct TokenOut<'a> {
    sentence: usize,
    #[serde(flatten)]
    token: &'a Token,
    transition: bool,
    top: Option<&'a str>,
}

#[derive(Serialize)]
struct TokenizeOut<'a> {
    normalized: &'a str,
    warnings: &'a [String],
    tokens: Vec<TokenOut<'a>>,
}

/// Normalize and tokenize `text`; each token carries its best tag.
#[wasm_bindgen]
pub fn tokenize(text: &str) -> String {
    let nt = normalize_text(text);
    let sentences = split_sentences(&nt);
    let s = suggester();
    let tops: Vec<Vec<ScoredTag>> = sentences
        .iter()
        .map(|sent| {
            s.auto_annotate(sent)
                .into_iter()
                .map(|(_, tag)| tag)
                .collect()
        })
        .collect();
    let mut tokens = Vec::new();
    for (si, sent) in sentences.iter().enumerate() {
        let joins = transitions(&sent.tokens);
        for (ti, token) in sent.tokens.iter().enumerate() {
            tokens.push(TokenOut {
                sentence: si,
                token,
                transition: joins.contains(&ti),
                top: tops[si].get(ti).map(|t| t.tag.as_str()),
            });
        }
    }
    serde_json::to_string(&TokenizeOut {
        normalized: &nt.text,
        warnings: &nt.warnings,
        tokens,
    })
    .expect("tokens serialize")
}

#[derive(Serialize)]
struct SegmentOut {
    display: String,
    #[serde(flatten)]
    segmentation: Segmentation,
}

/// Up to `max` ranked analyses of one word.
#[wasm_bindgen]
pub fn segment(word: &str, max: usize) -> String {
    let word = normalize_text(word.trim()).text;
    let out: Vec<SegmentOut> = suggester()
        .morphology
        .segment_surface(&word, max)
        .into_iter()
        .map(|s| SegmentOut {
            display: s.to_string(),
            segmentation: s,
        })
        .collect();
    serde_json::to_string(&out).expect("segmentations serialize")
}

/// Ranked tag suggestions for `word` between optional neighbours (pass an
/// empty string for none).
#[wasm_bindgen]
pub fn suggest(word: &str, left: &str, right: &str) -> String {
    let s = suggester();
    let token_of = |w: &str| {
        let w = normalize_text(w.trim()).text;
        (!w.is_empty()).then(|| Token::word(&w))
    };
    let Some(token) = token_of(word) else {
        return "[]".to_string();
    };
    let (left, right) = (token_of(left), token_of(right));
    let ranked = s.suggest(&token, Context::new(left.as_ref(), right.as_ref()));
    let out: Vec<serde_json::Value> = ranked
        .into_iter()
        .map(|t| {
            let desc = s.registry.lookup(&t.tag, false).ok();
            serde_json::json!({
                "tag": t.tag,
                "score": t.score,
                "rule": t.rule_id,
                "explanation": t.explanation,
                "english": desc.map(|d| d.english_name.as_str()),
                "category": desc.map(|d| d.category.name()),
            })
        })
        .collect();
    serde_json::to_string(&out).expect("suggestions serialize")
}
