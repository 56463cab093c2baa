#![allow(dead_code)]

use std::collections::BTreeSet;

use ckl_pos::morphology::{AffixTable, LexiconEntry, MorphRole, RootLexicon};
use ckl_pos::TagRegistry;
use rand::seq::SliceRandom;
use rand::Rng;

pub const TABLE_I: &str = include_str!("../fixtures/table_i.tsv");
pub const TABLE_II: &str = include_str!("../fixtures/table_ii.tsv");

/// Rows of the frozen Table I fixture: (index, category, english, abbrev).
pub fn table_i_rows() -> Vec<(u8, String, String, String)> {
    TABLE_I
        .lines()
        .map(|line| {
            let f: Vec<&str> = line.split('\t').collect();
            (
                f[0].parse().unwrap(),
                f[1].to_string(),
                f[2].to_string(),
                f[3].to_string(),
            )
        })
        .collect()
}

/// Rows of the frozen Table II fixture: (UD label, abbreviations).
pub fn table_ii_rows() -> Vec<(String, Vec<String>)> {
    TABLE_II
        .lines()
        .map(|line| {
            let (ud, tags) = line.split_once('\t').unwrap();
            (
                ud.to_string(),
                tags.split(',').map(str::to_string).collect(),
            )
        })
        .collect()
}

pub type Key = Vec<(String, MorphRole)>;

/// Every analysis of `surface` found by trying all splits into at most six
/// contiguous pieces and every role assignment of the pieces.
pub fn brute_force_segmentations(
    surface: &str,
    lexicon: &RootLexicon,
    affixes: &AffixTable,
) -> BTreeSet<Key> {
    let chars: Vec<char> = surface.chars().collect();
    let mut out = BTreeSet::new();
    let mut pieces = Vec::new();
    splits(&chars, 0, &mut pieces, &mut |pieces: &[String]| {
        for core in 0..pieces.len() {
            let (pre, rest) = pieces.split_at(core);
            let suf = &rest[1..];
            if pre.len() > 2 || suf.len() > 3 {
                continue;
            }
            let Some(entry) = lexicon.get(&rest[0]) else {
                continue;
            };
            let core_role = if entry.bound {
                MorphRole::Root
            } else {
                MorphRole::Stem
            };
            for pre_roles in role_choices(pre, affixes, true) {
                for suf_roles in role_choices(suf, affixes, false) {
                    let cp: Vec<&String> = pre
                        .iter()
                        .zip(&pre_roles)
                        .filter(|(_, r)| **r == MorphRole::CompoundAffixPrefixPart)
                        .map(|(p, _)| p)
                        .collect();
                    let cs: Vec<&String> = suf
                        .iter()
                        .zip(&suf_roles)
                        .filter(|(_, r)| **r == MorphRole::CompoundAffixSuffixPart)
                        .map(|(p, _)| p)
                        .collect();
                    let ok = match (cp.as_slice(), cs.as_slice()) {
                        ([], []) => true,
                        ([p], [s]) => affixes
                            .compound_pairs
                            .iter()
                            .any(|c| &c.prefix == *p && &c.suffix == *s),
                        _ => false,
                    };
                    if !ok {
                        continue;
                    }
                    let mut key: Key = pre.iter().cloned().zip(pre_roles.iter().copied()).collect();
                    key.push((rest[0].clone(), core_role));
                    key.extend(suf.iter().cloned().zip(suf_roles.iter().copied()));
                    out.insert(key);
                }
            }
        }
    });
    if out.is_empty() {
        out.insert(vec![(surface.to_string(), MorphRole::Stem)]);
    }
    out
}

fn splits(chars: &[char], pos: usize, pieces: &mut Vec<String>, f: &mut dyn FnMut(&[String])) {
    if pos == chars.len() {
        if !pieces.is_empty() {
            f(pieces);
        }
        return;
    }
    if pieces.len() == 6 {
        return;
    }
    for end in pos + 1..=chars.len() {
        pieces.push(chars[pos..end].iter().collect());
        splits(chars, end, pieces, f);
        pieces.pop();
    }
}

fn role_choices(pieces: &[String], affixes: &AffixTable, prefix: bool) -> Vec<Vec<MorphRole>> {
    let mut acc: Vec<Vec<MorphRole>> = vec![Vec::new()];
    for p in pieces {
        let mut roles = Vec::new();
        let (plain, compound, plain_role, compound_role) = if prefix {
            (
                affixes.prefixes.iter().any(|a| &a.surface == p),
                affixes.compound_pairs.iter().any(|c| &c.prefix == p),
                MorphRole::Prefix,
                MorphRole::CompoundAffixPrefixPart,
            )
        } else {
            (
                affixes.suffixes.iter().any(|a| &a.surface == p),
                affixes.compound_pairs.iter().any(|c| &c.suffix == p),
                MorphRole::Suffix,
                MorphRole::CompoundAffixSuffixPart,
            )
        };
        if plain {
            roles.push(plain_role);
        }
        if compound {
            roles.push(compound_role);
        }
        acc = acc
            .into_iter()
            .flat_map(|prev| {
                roles.iter().map(move |r| {
                    let mut next = prev.clone();
                    next.push(*r);
                    next
                })
            })
            .collect();
    }
    acc
}

/// Letters that occur in the seed affixes, so random roots collide with them.
pub const LETTERS: &[char] = &[
    'ا', 'ب', 'ت', 'د', 'ر', 'ک', 'گ', 'ن', 'و', 'ە', 'ی', 'ێ', 'ه', 'ڵ', 'ز',
];

pub fn random_word<R: Rng>(rng: &mut R, min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| *LETTERS.choose(rng).unwrap()).collect()
}

/// A lexicon of `n` distinct random roots with random weights and boundness.
pub fn synthetic_lexicon<R: Rng>(rng: &mut R, n: usize) -> RootLexicon {
    let mut lex = RootLexicon::default();
    while lex.len() < n {
        let root = random_word(rng, 1, 4);
        if lex.get(&root).is_some() {
            continue;
        }
        lex.insert(
            &root,
            LexiconEntry {
                bound: rng.gen_bool(0.3),
                tags: vec!["N-S".to_string()],
                weight: rng.gen_range(1..=5) as f64,
            },
        );
    }
    lex
}

/// A token assembled from affixes and a lexicon root, or plain noise.
pub fn random_token<R: Rng>(rng: &mut R, lexicon: &RootLexicon, affixes: &AffixTable) -> String {
    let roots: Vec<&str> = lexicon.iter().map(|(k, _)| k).collect();
    let mut s = String::new();
    if rng.gen_bool(0.2) {
        s = random_word(rng, 1, 12);
    } else {
        let compound = affixes.compound_pairs.choose(rng).filter(|_| rng.gen_bool(0.25));
        for _ in 0..rng.gen_range(0..=2) {
            s.push_str(&affixes.prefixes.choose(rng).unwrap().surface);
        }
        if let Some(c) = compound {
            s.push_str(&c.prefix);
        }
        s.push_str(roots.choose(rng).unwrap());
        if let Some(c) = compound {
            s.push_str(&c.suffix);
        }
        for _ in 0..rng.gen_range(0..=3) {
            s.push_str(&affixes.suffixes.choose(rng).unwrap().surface);
        }
    }
    let truncated: String = s.chars().take(12).collect();
    if truncated.is_empty() {
        "ن".to_string()
    } else {
        truncated
    }
}

pub fn registry() -> &'static TagRegistry {
    TagRegistry::shared()
}

/// Characters the tokenizer fuzzers draw from.
pub const FUZZ_POOL: &[char] = &[
    'ن', 'ا', 'ە', 'ک', 'ی', 'ێ', 'ۆ', 'ڵ', 'ڕ', 'ھ', 'ه', 'ي', 'ى', 'ك', 'و', 'ئ',
    '\u{0654}', '\u{064B}', '\u{0670}', '\u{0301}', '\u{FED9}', '\u{FEF5}', '\u{FDFA}',
    '\u{200C}', '\u{200D}', '\u{200E}', '\u{200F}', '\u{202B}', '\u{202C}', '\u{2066}',
    '\u{200B}', '\u{FEFF}', '٠', '١', '٢', '۳', '۴', '0', '7', '9', '.', '،', '؛', '؟',
    '!', '۔', '«', '»', '(', ')', '"', '-', ':', ' ', ' ', '\t', '\n', '\r', '\u{00A0}',
    '\u{3000}', 'a', 'Z', 'é', '€', '😀', '\u{0000}', '\u{FFFD}',
];

pub fn fuzz_text<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let n = rng.gen_range(0..=max_len);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.05) {
                rng.gen::<char>()
            } else {
                *FUZZ_POOL.choose(rng).unwrap()
            }
        })
        .collect()
}

/// Offset soundness, reconstruction and idempotence for one input.
pub fn check_tokenization(raw: &str) -> Result<(), String> {
    use ckl_pos::tokenizer::{normalize_text, split_sentences, tokenize};

    let nt = normalize_text(raw);
    let chars = nt.chars();
    let raw_len = raw.chars().count();
    if nt.char_map.len() != chars.len() {
        return Err("char_map length differs from text length".into());
    }
    if nt.char_map.windows(2).any(|w| w[0] > w[1]) {
        return Err("char_map is not monotone".into());
    }
    if nt.char_map.iter().any(|&i| i >= raw_len) {
        return Err("char_map points past the raw input".into());
    }

    let tokens = tokenize(&nt);
    let mut rebuilt = String::new();
    let mut cursor = 0;
    for (i, t) in tokens.iter().enumerate() {
        if t.index != i || t.start >= t.end || t.start < cursor || t.end > chars.len() {
            return Err(format!("bad span for token {i}: {}..{}", t.start, t.end));
        }
        let gap: String = chars[cursor..t.start].iter().collect();
        if !gap.chars().all(char::is_whitespace) {
            return Err(format!("non-whitespace `{gap:?}` dropped before token {i}"));
        }
        let slice: String = chars[t.start..t.end].iter().collect();
        if slice != t.surface {
            return Err(format!("token {i} surface {:?} != slice {slice:?}", t.surface));
        }
        rebuilt.push_str(&gap);
        rebuilt.push_str(&t.surface);
        cursor = t.end;
    }
    let tail: String = chars[cursor..].iter().collect();
    if !tail.chars().all(char::is_whitespace) {
        return Err("non-whitespace tail dropped".into());
    }
    rebuilt.push_str(&tail);
    if rebuilt != nt.text {
        return Err("reconstruction differs".into());
    }

    let from_sentences: Vec<(usize, usize, String)> = split_sentences(&nt)
        .into_iter()
        .flat_map(|s| s.tokens)
        .map(|t| (t.start, t.end, t.surface))
        .collect();
    let flat: Vec<(usize, usize, String)> = tokens
        .into_iter()
        .map(|t| (t.start, t.end, t.surface))
        .collect();
    if from_sentences != flat {
        return Err("sentence split loses or reorders tokens".into());
    }

    if normalize_text(&nt.text).text != nt.text {
        return Err("normalization is not idempotent".into());
    }
    Ok(())
}

/// Totality, closure and UNK placement for the suggestions of one token.
pub fn check_suggestions(
    surface: &str,
    suggester: &ckl_pos::suggestion::Suggester,
) -> Result<(), String> {
    use ckl_pos::suggestion::Context;
    use ckl_pos::tokenizer::Token;

    let token = Token::word(surface);
    let first = suggester.suggest(&token, Context::default());
    if first.is_empty() {
        return Err("no suggestions".into());
    }
    if first.last().unwrap().tag != "UNK" {
        return Err(format!("last suggestion is {}", first.last().unwrap().tag));
    }
    for s in &first {
        if !suggester.registry.contains(&s.tag) {
            return Err(format!("tag {} outside the registry", s.tag));
        }
        if !(s.score > 0.0 && s.score <= 1.0) {
            return Err(format!("score {} out of range", s.score));
        }
    }
    let again = suggester.suggest(&token, Context::default());
    let bits = |v: &[ckl_pos::suggestion::ScoredTag]| -> Vec<(String, u64, String)> {
        v.iter()
            .map(|s| (s.tag.clone(), s.score.to_bits(), s.rule_id.clone()))
            .collect()
    };
    if bits(&first) != bits(&again) {
        return Err("repeated run differs".into());
    }
    Ok(())
}
