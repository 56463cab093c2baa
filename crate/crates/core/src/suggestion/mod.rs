//! Deterministic tag suggestion.
//!
//! Every rule whose conditions hold emits one or more `(tag, score)` pairs.
//! Duplicate tags keep their highest score, `UNK` is appended when absent,
//! and the list is ordered by score, then abbreviation. Scores are never
//! combined across rules.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::morphology::{MorphRole, Morphology, RootLexicon, Segmentation};
use crate::tagset::{TagRegistry, UNK};
use crate::tokenizer::{SentenceSpan, Token, TokenKind, CONJUNCTION};

mod rules;

pub use rules::{
    load_rules, Condition, Emit, Rule, RuleSet, Side, DEFAULT_FALLBACK_SCORE,
};

/// Rule id reported for the `UNK` fallback.
pub const FALLBACK_RULE: &str = "fallback-unk";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTag {
    pub tag: String,
    pub score: f64,
    pub rule_id: String,
    pub explanation: String,
}

/// Neighbouring tokens of the token being tagged.
#[derive(Debug, Clone, Copy, Default)]
pub struct Context<'a> {
    pub left: Option<&'a Token>,
    pub right: Option<&'a Token>,
}

impl<'a> Context<'a> {
    pub fn new(left: Option<&'a Token>, right: Option<&'a Token>) -> Self {
        Context { left, right }
    }

    /// Context of `tokens[i]` within its sentence.
    pub fn within(tokens: &'a [Token], i: usize) -> Self {
        Context {
            left: i.checked_sub(1).and_then(|j| tokens.get(j)),
            right: tokens.get(i + 1),
        }
    }

    fn side(&self, side: Side) -> Option<&'a Token> {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }
}

fn best_lexical(segmentations: &[Segmentation]) -> Option<&Segmentation> {
    segmentations.iter().find(|s| s.is_lexical())
}

fn holds(
    cond: &Condition,
    token: &Token,
    ctx: &Context<'_>,
    segmentations: &[Segmentation],
    lexicon: &RootLexicon,
) -> bool {
    let surface = token.surface.as_str();
    let len = surface.chars().count();
    match cond {
        Condition::Suffix(s) => surface.ends_with(s.as_str()) && len > s.chars().count(),
        Condition::Prefix(s) => surface.starts_with(s.as_str()) && len > s.chars().count(),
        Condition::Surface(s) => surface == s,
        Condition::Kind(k) => token.kind == *k,
        Condition::NeighborSurface(side, s) => ctx.side(*side).is_some_and(|t| t.surface == *s),
        Condition::NeighborKind(side, k) => ctx.side(*side).is_some_and(|t| t.kind == *k),
        Condition::LexiconTagIn(tags) => lexicon
            .get(surface)
            .is_some_and(|e| e.tags.iter().any(|t| tags.contains(t))),
        Condition::MorphSuffix(s) => best_lexical(segmentations)
            .and_then(|seg| seg.morphs.last())
            .is_some_and(|m| m.role == MorphRole::Suffix && m.surface == *s),
        Condition::MorphPrefix(s) => best_lexical(segmentations)
            .and_then(|seg| seg.morphs.first())
            .is_some_and(|m| m.role == MorphRole::Prefix && m.surface == *s),
        Condition::MinLength(n) => len >= *n,
    }
}

fn affix_hints<'a>(seg: &Segmentation, morphology: Option<&'a Morphology>) -> Vec<&'a str> {
    let Some(m) = morphology else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let compound_prefix = seg
        .morphs
        .iter()
        .find(|x| x.role == MorphRole::CompoundAffixPrefixPart);
    let compound_suffix = seg
        .morphs
        .iter()
        .find(|x| x.role == MorphRole::CompoundAffixSuffixPart);
    if let (Some(p), Some(s)) = (compound_prefix, compound_suffix) {
        for pair in &m.affixes.compound_pairs {
            if pair.prefix == p.surface && pair.suffix == s.surface {
                out.extend(pair.tag_hints.iter().map(String::as_str));
            }
        }
    }
    for morph in &seg.morphs {
        let table = match morph.role {
            MorphRole::Prefix => &m.affixes.prefixes,
            MorphRole::Suffix => &m.affixes.suffixes,
            _ => continue,
        };
        for affix in table.iter().filter(|a| a.surface == morph.surface) {
            out.extend(affix.tag_hints.iter().map(String::as_str));
        }
    }
    out
}

fn rank(a: &ScoredTag, b: &ScoredTag) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.tag.cmp(&b.tag))
}

/// Evaluate all rules against a token.
///
/// `morphology` supplies the affix tables used by `@affix-hints` emits; the
/// lexicon alone drives `@lexicon` emits and lexicon conditions.
pub fn suggest_tags(
    token: &Token,
    context: Context<'_>,
    segmentations: &[Segmentation],
    lexicon: &RootLexicon,
    morphology: Option<&Morphology>,
    rules: &RuleSet,
    registry: &TagRegistry,
) -> Vec<ScoredTag> {
    let mut merged: Vec<ScoredTag> = Vec::new();
    let mut position: HashMap<String, usize> = HashMap::new();
    let mut offer = |tag: &str, score: f64, rule: &Rule| {
        let Ok(canonical) = registry.resolve_alias(tag) else {
            return;
        };
        let score = score.clamp(0.0, 1.0);
        match position.get(canonical) {
            Some(&i) if merged[i].score >= score => {}
            Some(&i) => {
                merged[i].score = score;
                merged[i].rule_id = rule.id.clone();
                merged[i].explanation = rule.explanation.clone();
            }
            None => {
                position.insert(canonical.to_string(), merged.len());
                merged.push(ScoredTag {
                    tag: canonical.to_string(),
                    score,
                    rule_id: rule.id.clone(),
                    explanation: rule.explanation.clone(),
                });
            }
        }
    };

    for rule in &rules.rules {
        if !rule
            .conditions
            .iter()
            .all(|c| holds(c, token, &context, segmentations, lexicon))
        {
            continue;
        }
        for emit in &rule.emits {
            match emit {
                Emit::Tag { tag, score } => offer(tag, *score, rule),
                Emit::Lexicon { score } => {
                    if let Some(entry) = lexicon.get(&token.surface) {
                        for tag in &entry.tags {
                            offer(tag, *score, rule);
                        }
                    }
                }
                Emit::AffixHints { score } => {
                    if let Some(seg) = best_lexical(segmentations) {
                        for tag in affix_hints(seg, morphology) {
                            offer(tag, *score, rule);
                        }
                    }
                }
            }
        }
    }

    if !position.contains_key(UNK) {
        merged.push(ScoredTag {
            tag: UNK.to_string(),
            score: rules.fallback_score.clamp(0.0, 1.0),
            rule_id: FALLBACK_RULE.to_string(),
            explanation: "no tag of the inventory fits".to_string(),
        });
    }
    merged.sort_by(rank);
    merged
}

/// Indices of conjunction tokens standing between two words; these link
/// the words around them into one phrase.
pub fn transitions(tokens: &[Token]) -> Vec<usize> {
    (1..tokens.len().saturating_sub(1))
        .filter(|&i| {
            tokens[i].surface == CONJUNCTION
                && tokens[i - 1].kind == TokenKind::Word
                && tokens[i + 1].kind == TokenKind::Word
        })
        .collect()
}

/// Rules, morphology and registry bundled for repeated use.
#[derive(Debug, Clone)]
pub struct Suggester {
    pub rules: RuleSet,
    pub morphology: Morphology,
    pub registry: &'static TagRegistry,
    /// How many segmentations the rules see per token.
    pub max_segmentations: usize,
}

impl Suggester {
    pub fn new(rules: RuleSet, morphology: Morphology) -> Self {
        Suggester {
            rules,
            morphology,
            registry: TagRegistry::shared(),
            max_segmentations: 8,
        }
    }

    /// Default rules with the seed lexicon and affix table.
    pub fn seed() -> Self {
        Suggester::new(RuleSet::default(), Morphology::seed())
    }

    pub fn segment(&self, token: &Token) -> Vec<Segmentation> {
        if token.kind == TokenKind::Word {
            self.morphology.segment(token, self.max_segmentations)
        } else {
            Vec::new()
        }
    }

    pub fn suggest(&self, token: &Token, context: Context<'_>) -> Vec<ScoredTag> {
        let segs = self.segment(token);
        suggest_tags(
            token,
            context,
            &segs,
            &self.morphology.lexicon,
            Some(&self.morphology),
            &self.rules,
            self.registry,
        )
    }

    /// Top suggestion for every token of the sentence.
    pub fn auto_annotate(&self, sentence: &SentenceSpan) -> Vec<(usize, ScoredTag)> {
        sentence
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut ranked = self.suggest(t, Context::within(&sentence.tokens, i));
                (t.index, ranked.swap_remove(0))
            })
            .collect()
    }
}
