//! Concatenative word segmentation: `prefix* core suffix*`, where the core
//! is a lexicon root (bound) or stem (free) and affixes come from an
//! [`AffixTable`]. Compound affixes are matched jointly.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tokenizer::Token;

mod tables;

pub use tables::{
    load_affix_table, load_lexicon, Affix, AffixTable, CompoundAffix, LexiconEntry, RootLexicon,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MorphRole {
    Root,
    Prefix,
    Suffix,
    CompoundAffixPrefixPart,
    CompoundAffixSuffixPart,
    Transition,
    Stem,
}

impl MorphRole {
    pub fn is_core(self) -> bool {
        matches!(self, MorphRole::Root | MorphRole::Stem)
    }
}

impl fmt::Display for MorphRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Morph {
    pub surface: String,
    pub role: MorphRole,
}

impl Morph {
    pub fn new(surface: &str, role: MorphRole) -> Self {
        Morph {
            surface: surface.to_string(),
            role,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub morphs: Vec<Morph>,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Segmentation {
    /// The root or stem morph.
    pub fn core(&self) -> &Morph {
        self.morphs
            .iter()
            .find(|m| m.role.is_core())
            .expect("segmentation has a core morph")
    }

    pub fn surface(&self) -> String {
        self.morphs.iter().map(|m| m.surface.as_str()).collect()
    }

    pub fn prefixes(&self) -> impl Iterator<Item = &Morph> {
        self.morphs.iter().take_while(|m| !m.role.is_core())
    }

    pub fn suffixes(&self) -> impl Iterator<Item = &Morph> {
        self.morphs.iter().skip_while(|m| !m.role.is_core()).skip(1)
    }

    /// Affix count used for ranking; a compound pair counts once.
    pub fn affix_units(&self) -> usize {
        let plain = self
            .morphs
            .iter()
            .filter(|m| matches!(m.role, MorphRole::Prefix | MorphRole::Suffix))
            .count();
        let compound = self
            .morphs
            .iter()
            .filter(|m| m.role == MorphRole::CompoundAffixPrefixPart)
            .count();
        plain + compound
    }

    /// Whether the analysis is backed by the lexicon (the trivial fallback
    /// scores 0).
    pub fn is_lexical(&self) -> bool {
        self.score > 0.0
    }

    /// The key used for equality of analyses, ignoring score.
    pub fn key(&self) -> Vec<(String, MorphRole)> {
        self.morphs
            .iter()
            .map(|m| (m.surface.clone(), m.role))
            .collect()
    }

    fn ranking(a: &Segmentation, b: &Segmentation) -> Ordering {
        b.score
            .total_cmp(&a.score)
            .then(a.morphs.len().cmp(&b.morphs.len()))
            .then_with(|| {
                let sa: Vec<&str> = a.morphs.iter().map(|m| m.surface.as_str()).collect();
                let sb: Vec<&str> = b.morphs.iter().map(|m| m.surface.as_str()).collect();
                sa.cmp(&sb)
            })
            .then_with(|| a.morphs.cmp(&b.morphs))
    }
}

impl fmt::Display for Segmentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.morphs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}:{}", m.role, m.surface)?;
        }
        write!(f, " ({:.3})", self.score)
    }
}

/// Ranking weights and affix stacking limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentConfig {
    pub lexicon_weight: f64,
    pub shape_weight: f64,
    pub max_prefixes: usize,
    pub max_suffixes: usize,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            lexicon_weight: 0.7,
            shape_weight: 0.3,
            max_prefixes: 2,
            max_suffixes: 3,
        }
    }
}

/// Lexicon, affixes and ranking configuration bundled together.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Morphology {
    pub lexicon: RootLexicon,
    pub affixes: AffixTable,
    pub config: SegmentConfig,
}

#[derive(Debug, Clone, Copy)]
enum AffixSlot<'a> {
    Plain(&'a str),
    Compound(&'a str),
}

impl Morphology {
    pub fn new(lexicon: RootLexicon, affixes: AffixTable) -> Self {
        Morphology {
            lexicon,
            affixes,
            config: SegmentConfig::default(),
        }
    }

    pub fn seed() -> Self {
        Morphology::new(RootLexicon::seed(), AffixTable::seed())
    }

    fn analyzer(&self) -> Analyzer<'_> {
        Analyzer {
            lexicon: &self.lexicon,
            affixes: &self.affixes,
            config: self.config,
        }
    }

    /// Ranked analyses of a surface string; never empty.
    pub fn segment_surface(&self, surface: &str, max_results: usize) -> Vec<Segmentation> {
        self.analyzer().segment_surface(surface, max_results)
    }

    pub fn segment(&self, token: &Token, max_results: usize) -> Vec<Segmentation> {
        self.segment_surface(&token.surface, max_results)
    }

    /// Core morph of the best analysis.
    pub fn root_of(&self, token: &Token) -> Morph {
        self.segment(token, 1)[0].core().clone()
    }
}

struct Analyzer<'a> {
    lexicon: &'a RootLexicon,
    affixes: &'a AffixTable,
    config: SegmentConfig,
}

impl<'a> Analyzer<'a> {
    fn score(&self, core: &str, affix_units: usize) -> f64 {
        let lex = self.lexicon.relative_weight(core).unwrap_or(0.0);
        let shape = 1.0 / (1.0 + affix_units as f64);
        let total = self.config.lexicon_weight + self.config.shape_weight;
        if total <= 0.0 {
            return 0.0;
        }
        ((self.config.lexicon_weight * lex + self.config.shape_weight * shape) / total)
            .clamp(0.0, 1.0)
    }

    fn segment_surface(&self, surface: &str, max_results: usize) -> Vec<Segmentation> {
        let chars: Vec<char> = surface.chars().collect();
        let mut prefix_paths = Vec::new();
        self.prefix_paths(&chars, 0, &mut Vec::new(), &mut prefix_paths);
        let mut suffix_paths = Vec::new();
        self.suffix_paths(&chars, chars.len(), &mut Vec::new(), &mut suffix_paths);

        let mut seen = BTreeSet::new();
        let mut results = Vec::new();
        for (prefixes, core_start) in &prefix_paths {
            for (suffixes, core_end) in &suffix_paths {
                if core_start >= core_end {
                    continue;
                }
                let compound_pre: Vec<&str> = prefixes
                    .iter()
                    .filter_map(|s| match s {
                        AffixSlot::Compound(x) => Some(*x),
                        _ => None,
                    })
                    .collect();
                let compound_suf: Vec<&str> = suffixes
                    .iter()
                    .filter_map(|s| match s {
                        AffixSlot::Compound(x) => Some(*x),
                        _ => None,
                    })
                    .collect();
                match (compound_pre.as_slice(), compound_suf.as_slice()) {
                    ([], []) => {}
                    ([p], [s]) if self.affixes.has_pair(p, s) => {}
                    _ => continue,
                }
                let core: String = chars[*core_start..*core_end].iter().collect();
                let Some(entry) = self.lexicon.get(&core) else {
                    continue;
                };

                let mut morphs = Vec::with_capacity(prefixes.len() + suffixes.len() + 1);
                morphs.extend(prefixes.iter().map(|s| match s {
                    AffixSlot::Plain(x) => Morph::new(x, MorphRole::Prefix),
                    AffixSlot::Compound(x) => Morph::new(x, MorphRole::CompoundAffixPrefixPart),
                }));
                let core_role = if entry.bound {
                    MorphRole::Root
                } else {
                    MorphRole::Stem
                };
                morphs.push(Morph::new(&core, core_role));
                // suffix paths are collected outside-in
                morphs.extend(suffixes.iter().rev().map(|s| match s {
                    AffixSlot::Plain(x) => Morph::new(x, MorphRole::Suffix),
                    AffixSlot::Compound(x) => Morph::new(x, MorphRole::CompoundAffixSuffixPart),
                }));

                let mut seg = Segmentation {
                    morphs,
                    score: 0.0,
                    warnings: Vec::new(),
                };
                if !seen.insert(seg.key()) {
                    continue;
                }
                let has_compound = !compound_pre.is_empty();
                let has_plain = seg
                    .morphs
                    .iter()
                    .any(|m| matches!(m.role, MorphRole::Prefix | MorphRole::Suffix));
                if has_compound && has_plain {
                    seg.warnings
                        .push("plain affix combined with a compound affix".to_string());
                }
                seg.score = self.score(&core, seg.affix_units());
                results.push(seg);
            }
        }

        if results.is_empty() {
            results.push(Segmentation {
                morphs: vec![Morph::new(surface, MorphRole::Stem)],
                score: 0.0,
                warnings: Vec::new(),
            });
        }
        results.sort_by(Segmentation::ranking);
        results.truncate(max_results.max(1));
        results
    }

    fn prefix_paths(
        &self,
        chars: &[char],
        pos: usize,
        current: &mut Vec<AffixSlot<'a>>,
        out: &mut Vec<(Vec<AffixSlot<'a>>, usize)>,
    ) {
        out.push((current.clone(), pos));
        if current.len() >= self.config.max_prefixes {
            return;
        }
        let has_compound = current.iter().any(|s| matches!(s, AffixSlot::Compound(_)));
        let candidates = self
            .affixes
            .prefixes
            .iter()
            .map(|a| AffixSlot::Plain(a.surface.as_str()))
            .chain(
                self.affixes
                    .compound_pairs
                    .iter()
                    .filter(|_| !has_compound)
                    .map(|c| AffixSlot::Compound(c.prefix.as_str())),
            );
        let mut tried = BTreeSet::new();
        for slot in candidates {
            let (surface, compound) = match slot {
                AffixSlot::Plain(s) => (s, false),
                AffixSlot::Compound(s) => (s, true),
            };
            if !tried.insert((surface, compound)) {
                continue;
            }
            let len = surface.chars().count();
            if matches_at(chars, pos, surface) {
                current.push(slot);
                self.prefix_paths(chars, pos + len, current, out);
                current.pop();
            }
        }
    }

    fn suffix_paths(
        &self,
        chars: &[char],
        end: usize,
        current: &mut Vec<AffixSlot<'a>>,
        out: &mut Vec<(Vec<AffixSlot<'a>>, usize)>,
    ) {
        out.push((current.clone(), end));
        if current.len() >= self.config.max_suffixes {
            return;
        }
        let has_compound = current.iter().any(|s| matches!(s, AffixSlot::Compound(_)));
        let candidates = self
            .affixes
            .suffixes
            .iter()
            .map(|a| AffixSlot::Plain(a.surface.as_str()))
            .chain(
                self.affixes
                    .compound_pairs
                    .iter()
                    .filter(|_| !has_compound)
                    .map(|c| AffixSlot::Compound(c.suffix.as_str())),
            );
        let mut tried = BTreeSet::new();
        for slot in candidates {
            let (surface, compound) = match slot {
                AffixSlot::Plain(s) => (s, false),
                AffixSlot::Compound(s) => (s, true),
            };
            if !tried.insert((surface, compound)) {
                continue;
            }
            let len = surface.chars().count();
            if len <= end && matches_at(chars, end - len, surface) {
                current.push(slot);
                self.suffix_paths(chars, end - len, current, out);
                current.pop();
            }
        }
    }
}

fn matches_at(chars: &[char], pos: usize, needle: &str) -> bool {
    let mut i = pos;
    for c in needle.chars() {
        if chars.get(i) != Some(&c) {
            return false;
        }
        i += 1;
    }
    true
}

/// Ranked analyses of a word token with the default ranking configuration.
pub fn segment_token(
    token: &Token,
    lexicon: &RootLexicon,
    affixes: &AffixTable,
    max_results: usize,
) -> Vec<Segmentation> {
    Analyzer {
        lexicon,
        affixes,
        config: SegmentConfig::default(),
    }
    .segment_surface(&token.surface, max_results)
}

/// Core morph of the best analysis of `token`.
pub fn root_of(token: &Token, lexicon: &RootLexicon, affixes: &AffixTable) -> Morph {
    segment_token(token, lexicon, affixes, 1)[0].core().clone()
}

/// Checks the structural invariants of a segmentation against its token.
pub fn check_segmentation(seg: &Segmentation, surface: &str) -> Result<(), String> {
    if seg.surface() != surface {
        return Err(format!("morphs concatenate to `{}`", seg.surface()));
    }
    if seg.morphs.iter().any(|m| m.surface.is_empty()) {
        return Err("empty morph".into());
    }
    let cores: Vec<usize> = seg
        .morphs
        .iter()
        .enumerate()
        .filter(|(_, m)| m.role.is_core())
        .map(|(i, _)| i)
        .collect();
    let [core] = cores.as_slice() else {
        return Err(format!("{} core morphs", cores.len()));
    };
    for (i, m) in seg.morphs.iter().enumerate() {
        let ok = match m.role {
            MorphRole::Prefix | MorphRole::CompoundAffixPrefixPart => i < *core,
            MorphRole::Suffix | MorphRole::CompoundAffixSuffixPart => i > *core,
            MorphRole::Root | MorphRole::Stem => true,
            MorphRole::Transition => false,
        };
        if !ok {
            return Err(format!("{} morph at position {i}", m.role));
        }
    }
    let pre = seg
        .morphs
        .iter()
        .filter(|m| m.role == MorphRole::CompoundAffixPrefixPart)
        .count();
    let suf = seg
        .morphs
        .iter()
        .filter(|m| m.role == MorphRole::CompoundAffixSuffixPart)
        .count();
    if pre != suf {
        return Err("unpaired compound affix part".into());
    }
    if !(0.0..=1.0).contains(&seg.score) {
        return Err(format!("score {} out of range", seg.score));
    }
    Ok(())
}
