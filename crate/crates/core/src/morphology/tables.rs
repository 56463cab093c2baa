use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tagset::TagRegistry;
use crate::tokenizer::normalize_text;

const SEED_AFFIXES: &str = include_str!("../../data/seed.affixes.tsv");
const SEED_LEXICON: &str = include_str!("../../data/seed.lexicon.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affix {
    pub surface: String,
    pub tag_hints: Vec<String>,
}

/// A prefix and a suffix that only occur together around a core.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompoundAffix {
    pub prefix: String,
    pub suffix: String,
    pub tag_hints: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffixTable {
    pub prefixes: Vec<Affix>,
    pub suffixes: Vec<Affix>,
    pub compound_pairs: Vec<CompoundAffix>,
}

impl AffixTable {
    /// The table shipped with the crate.
    pub fn seed() -> Self {
        load_affix_table(SEED_AFFIXES, "seed.affixes.tsv", TagRegistry::shared())
            .expect("seed affix table is valid")
    }

    pub fn has_prefix(&self, surface: &str) -> bool {
        self.prefixes.iter().any(|a| a.surface == surface)
    }

    pub fn has_suffix(&self, surface: &str) -> bool {
        self.suffixes.iter().any(|a| a.surface == surface)
    }

    pub fn has_compound_prefix(&self, surface: &str) -> bool {
        self.compound_pairs.iter().any(|c| c.prefix == surface)
    }

    pub fn has_compound_suffix(&self, surface: &str) -> bool {
        self.compound_pairs.iter().any(|c| c.suffix == surface)
    }

    pub fn has_pair(&self, prefix: &str, suffix: &str) -> bool {
        self.compound_pairs
            .iter()
            .any(|c| c.prefix == prefix && c.suffix == suffix)
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty() && self.suffixes.is_empty() && self.compound_pairs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    /// Bound roots segment as `Root`, free stems as `Stem`.
    pub bound: bool,
    pub tags: Vec<String>,
    pub weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RootLexicon {
    entries: BTreeMap<String, LexiconEntry>,
    max_weight: f64,
}

impl RootLexicon {
    pub fn seed() -> Self {
        load_lexicon(SEED_LEXICON, "seed.lexicon.tsv", TagRegistry::shared())
            .expect("seed lexicon is valid")
    }

    pub fn get(&self, surface: &str) -> Option<&LexiconEntry> {
        self.entries.get(surface)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LexiconEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Weight scaled into `(0, 1]` by the largest weight in the lexicon.
    pub fn relative_weight(&self, surface: &str) -> Option<f64> {
        self.get(surface).map(|e| e.weight / self.max_weight)
    }

    /// Add an entry; tags must already be canonical.
    pub fn insert(&mut self, surface: &str, entry: LexiconEntry) {
        self.max_weight = self.max_weight.max(entry.weight);
        self.entries.insert(surface.to_string(), entry);
    }
}

fn normalized_surface(raw: &str, source: &str, line: usize) -> Result<String> {
    let s = normalize_text(raw.trim()).text;
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(Error::load(source, line, format!("invalid surface `{raw}`")));
    }
    Ok(s)
}

fn parse_tags(raw: &str, registry: &TagRegistry) -> Result<Vec<String>> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty() && *t != "_")
        .map(|t| registry.resolve_alias(t).map(str::to_string))
        .collect()
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').collect()))
        }
    })
}

/// Parse an affix table:
/// `kind(prefix|suffix|compound) TAB surface [TAB pair-surface] TAB hints`.
pub fn load_affix_table(text: &str, source: &str, registry: &TagRegistry) -> Result<AffixTable> {
    let mut table = AffixTable::default();
    for (line, cols) in records(text) {
        match cols[0].trim() {
            kind @ ("prefix" | "suffix") => {
                if !(2..=3).contains(&cols.len()) {
                    return Err(Error::load(source, line, "expected 2 or 3 columns"));
                }
                let affix = Affix {
                    surface: normalized_surface(cols[1], source, line)?,
                    tag_hints: parse_tags(cols.get(2).unwrap_or(&""), registry)?,
                };
                let list = if kind == "prefix" {
                    &mut table.prefixes
                } else {
                    &mut table.suffixes
                };
                if list.iter().any(|a| a.surface == affix.surface) {
                    return Err(Error::load(source, line, format!("duplicate {kind}")));
                }
                list.push(affix);
            }
            "compound" => {
                if !(3..=4).contains(&cols.len()) {
                    return Err(Error::load(source, line, "expected 3 or 4 columns"));
                }
                let pair = CompoundAffix {
                    prefix: normalized_surface(cols[1], source, line)?,
                    suffix: normalized_surface(cols[2], source, line)?,
                    tag_hints: parse_tags(cols.get(3).unwrap_or(&""), registry)?,
                };
                if table.has_pair(&pair.prefix, &pair.suffix) {
                    return Err(Error::load(source, line, "duplicate compound pair"));
                }
                table.compound_pairs.push(pair);
            }
            other => {
                return Err(Error::load(source, line, format!("unknown affix kind `{other}`")));
            }
        }
    }
    Ok(table)
}

/// Parse a root lexicon: `surface TAB bound|free TAB tags [TAB weight]`.
pub fn load_lexicon(text: &str, source: &str, registry: &TagRegistry) -> Result<RootLexicon> {
    let mut lexicon = RootLexicon::default();
    for (line, cols) in records(text) {
        if !(3..=4).contains(&cols.len()) {
            return Err(Error::load(source, line, "expected 3 or 4 columns"));
        }
        let surface = normalized_surface(cols[0], source, line)?;
        let bound = match cols[1].trim() {
            "bound" => true,
            "free" => false,
            other => {
                return Err(Error::load(source, line, format!("expected bound|free, got `{other}`")))
            }
        };
        let tags = parse_tags(cols[2], registry)?;
        let weight = match cols.get(3).map(|w| w.trim()) {
            None | Some("") => 1.0,
            Some(w) => w
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite() && *w > 0.0)
                .ok_or_else(|| Error::load(source, line, format!("invalid weight `{w}`")))?,
        };
        if lexicon.get(&surface).is_some() {
            return Err(Error::load(source, line, format!("duplicate entry `{surface}`")));
        }
        lexicon.insert(&surface, LexiconEntry { bound, tags, weight });
    }
    Ok(lexicon)
}
