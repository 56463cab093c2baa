use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tagset::TagRegistry;
use crate::tokenizer::{normalize_text, TokenKind};

const DEFAULT_RULES: &str = include_str!("../../data/default.rules");

/// Score of the `UNK` fallback before any scaling.
pub const DEFAULT_FALLBACK_SCORE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One predicate of a rule pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Condition {
    /// Surface ends with the string and is longer than it.
    Suffix(String),
    /// Surface starts with the string and is longer than it.
    Prefix(String),
    Surface(String),
    Kind(TokenKind),
    NeighborSurface(Side, String),
    NeighborKind(Side, TokenKind),
    /// The token's own lexicon entry carries one of these tags.
    LexiconTagIn(Vec<String>),
    /// Outermost suffix of the best lexicon-backed analysis.
    MorphSuffix(String),
    /// Outermost prefix of the best lexicon-backed analysis.
    MorphPrefix(String),
    /// At least this many codepoints.
    MinLength(usize),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &Side| match s {
            Side::Left => "left",
            Side::Right => "right",
        };
        match self {
            Condition::Suffix(s) => write!(f, "suffix={s}"),
            Condition::Prefix(s) => write!(f, "prefix={s}"),
            Condition::Surface(s) => write!(f, "surface={s}"),
            Condition::Kind(k) => write!(f, "kind={k}"),
            Condition::NeighborSurface(d, s) => write!(f, "{}.surface={s}", side(d)),
            Condition::NeighborKind(d, k) => write!(f, "{}.kind={k}", side(d)),
            Condition::LexiconTagIn(tags) => write!(f, "lexicon-tag∈{{{}}}", tags.join(",")),
            Condition::MorphSuffix(s) => write!(f, "morph-suffix={s}"),
            Condition::MorphPrefix(s) => write!(f, "morph-prefix={s}"),
            Condition::MinLength(n) => write!(f, "min-length={n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Emit {
    Tag { tag: String, score: f64 },
    /// Every tag of the token's lexicon entry.
    Lexicon { score: f64 },
    /// Tag hints of the affixes in the best lexicon-backed analysis.
    AffixHints { score: f64 },
}

impl Emit {
    pub fn score(&self) -> f64 {
        match self {
            Emit::Tag { score, .. } | Emit::Lexicon { score } | Emit::AffixHints { score } => *score,
        }
    }

    fn scale(&mut self, factor: f64) {
        match self {
            Emit::Tag { score, .. } | Emit::Lexicon { score } | Emit::AffixHints { score } => {
                *score *= factor
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule {
    pub id: String,
    pub conditions: Vec<Condition>,
    pub emits: Vec<Emit>,
    pub explanation: String,
}

/// Ordered rules plus the score given to the `UNK` fallback.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub fallback_score: f64,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet {
            rules: load_rules(DEFAULT_RULES, "default.rules", TagRegistry::shared())
                .expect("default rules are valid"),
            fallback_score: DEFAULT_FALLBACK_SCORE,
        }
    }
}

impl RuleSet {
    pub fn empty() -> Self {
        RuleSet {
            rules: Vec::new(),
            fallback_score: DEFAULT_FALLBACK_SCORE,
        }
    }

    /// Append user rules; ids must stay unique.
    pub fn extend(&mut self, extra: Vec<Rule>) -> Result<()> {
        let mut ids: HashSet<String> = self.rules.iter().map(|r| r.id.clone()).collect();
        for rule in &extra {
            if !ids.insert(rule.id.clone()) {
                return Err(Error::DuplicateRule(rule.id.clone()));
            }
        }
        self.rules.extend(extra);
        Ok(())
    }

    /// Every base score, including the fallback, multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> RuleSet {
        let mut out = self.clone();
        for rule in &mut out.rules {
            for e in &mut rule.emits {
                e.scale(factor);
            }
        }
        out.fallback_score *= factor;
        out
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

fn parse_kind(s: &str) -> Option<TokenKind> {
    Some(match s {
        "word" => TokenKind::Word,
        "number" => TokenKind::Number,
        "punctuation" => TokenKind::Punctuation,
        "symbol" => TokenKind::Symbol,
        _ => return None,
    })
}

fn parse_condition(raw: &str, registry: &TagRegistry) -> std::result::Result<Condition, String> {
    let raw = raw.trim();
    if let Some(rest) = raw
        .strip_prefix("lexicon-tag∈")
        .or_else(|| raw.strip_prefix("lexicon-tag-in="))
    {
        let list = rest.trim().trim_start_matches('{').trim_end_matches('}');
        let tags = list
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                registry
                    .resolve_alias(t)
                    .map(str::to_string)
                    .map_err(|_| format!("unknown tag `{t}`"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if tags.is_empty() {
            return Err("empty lexicon-tag set".into());
        }
        return Ok(Condition::LexiconTagIn(tags));
    }
    let (key, value) = raw
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{raw}`"))?;
    let value = value.trim();
    let text = || -> std::result::Result<String, String> {
        let v = normalize_text(value).text;
        if v.is_empty() {
            Err(format!("empty value for `{key}`"))
        } else {
            Ok(v)
        }
    };
    let kind = || parse_kind(value).ok_or_else(|| format!("unknown token kind `{value}`"));
    Ok(match key.trim() {
        "suffix" => Condition::Suffix(text()?),
        "prefix" => Condition::Prefix(text()?),
        "surface" => Condition::Surface(text()?),
        "kind" => Condition::Kind(kind()?),
        "left.surface" => Condition::NeighborSurface(Side::Left, text()?),
        "right.surface" => Condition::NeighborSurface(Side::Right, text()?),
        "left.kind" => Condition::NeighborKind(Side::Left, kind()?),
        "right.kind" => Condition::NeighborKind(Side::Right, kind()?),
        "morph-suffix" => Condition::MorphSuffix(text()?),
        "morph-prefix" => Condition::MorphPrefix(text()?),
        "min-length" => Condition::MinLength(
            value
                .parse()
                .map_err(|_| format!("invalid length `{value}`"))?,
        ),
        other => return Err(format!("unknown predicate `{other}`")),
    })
}

fn parse_score(raw: &str) -> std::result::Result<f64, String> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|s| *s > 0.0 && *s <= 1.0)
        .ok_or_else(|| format!("score `{raw}` not in (0, 1]"))
}

/// Parse a rule file. One rule per line, tab-separated:
/// `id`, conditions joined by `;` (or `*`), comma-separated `TAG:score`
/// emits (`@lexicon:s` and `@affix-hints:s` are special), optional
/// explanation. `#` starts a comment line.
pub fn load_rules(text: &str, source: &str, registry: &TagRegistry) -> Result<Vec<Rule>> {
    let mut rules = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(Error::load(source, lineno, "expected 3 or 4 tab-separated columns"));
        }
        let id = cols[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::load(source, lineno, "empty rule id"));
        }
        if !ids.insert(id.clone()) {
            return Err(Error::DuplicateRule(id));
        }

        let conditions = if cols[1].trim() == "*" {
            Vec::new()
        } else {
            cols[1]
                .split(';')
                .filter(|c| !c.trim().is_empty())
                .map(|c| parse_condition(c, registry))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|m| match m.strip_prefix("unknown tag `") {
                    Some(t) => Error::UnknownTag(t.trim_end_matches('`').to_string()),
                    None => Error::load(source, lineno, m),
                })?
        };

        let mut emits = Vec::new();
        for item in cols[2].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (tag, score) = item
                .rsplit_once(':')
                .ok_or_else(|| Error::load(source, lineno, format!("expected TAG:score, got `{item}`")))?;
            let score = parse_score(score).map_err(|m| Error::load(source, lineno, m))?;
            emits.push(match tag.trim() {
                "@lexicon" => Emit::Lexicon { score },
                "@affix-hints" => Emit::AffixHints { score },
                t => Emit::Tag {
                    tag: registry.resolve_alias(t)?.to_string(),
                    score,
                },
            });
        }
        if emits.is_empty() {
            return Err(Error::load(source, lineno, "rule emits nothing"));
        }

        let explanation = cols
            .get(3)
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| {
                let conds: Vec<String> = conditions.iter().map(|c| c.to_string()).collect();
                format!("matched {}", conds.join(" and "))
            });
        rules.push(Rule {
            id,
            conditions,
            emits,
            explanation,
        });
    }
    Ok(rules)
}
