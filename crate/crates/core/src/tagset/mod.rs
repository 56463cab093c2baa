//! The closed Central Kurdish tag inventory.
//!
//! 97 tags in eight categories, plus the `UNK` fallback. Canonical
//! abbreviations are upper-case; lookups are case-insensitive and may go
//! through the alias table, which reconciles the alternative spellings used
//! by the UD mapping table with the canonical inventory.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod tree;

pub use tree::{CategoryNode, CategoryTree, TagLeaf, TREE_ROOT};

const EMBEDDED_TABLE: &str = include_str!("table.tsv");

/// Abbreviation of the fallback tag.
pub const UNK: &str = "UNK";

/// The 17 labels of the Universal Dependencies UPOS inventory.
pub const UD_UPOS_LABELS: [&str; 17] = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN",
    "PUNCT", "SCONJ", "SYM", "VERB", "X",
];

/// Variant spellings (left) and the canonical abbreviation they stand for.
const ALIASES: [(&str, &str); 6] = [
    ("ADJ-S", "ADJ-SIMPLE"),
    ("V-COMP", "V-COMPOUND"),
    ("V-PST", "V-PAST"),
    ("V-NPST", "V-NONPAST"),
    ("V-NEG", "V-NEG2"),
    ("V-INCOMP", "V-INCOMPLETE"),
];

const EXPECTED_CARDINALITIES: [(TagCategory, usize); 9] = [
    (TagCategory::Noun, 17),
    (TagCategory::Pronoun, 13),
    (TagCategory::Particle, 11),
    (TagCategory::Adjective, 16),
    (TagCategory::Adverb, 12),
    (TagCategory::Numeral, 6),
    (TagCategory::Verb, 14),
    (TagCategory::Gerund, 8),
    (TagCategory::Unknown, 1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TagCategory {
    Noun,
    Pronoun,
    Particle,
    Adjective,
    Adverb,
    Numeral,
    Verb,
    Gerund,
    Unknown,
}

impl TagCategory {
    /// All categories in inventory order, `Unknown` last.
    pub const ALL: [TagCategory; 9] = [
        TagCategory::Noun,
        TagCategory::Pronoun,
        TagCategory::Particle,
        TagCategory::Adjective,
        TagCategory::Adverb,
        TagCategory::Numeral,
        TagCategory::Verb,
        TagCategory::Gerund,
        TagCategory::Unknown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TagCategory::Noun => "Noun",
            TagCategory::Pronoun => "Pronoun",
            TagCategory::Particle => "Particle",
            TagCategory::Adjective => "Adjective",
            TagCategory::Adverb => "Adverb",
            TagCategory::Numeral => "Numeral",
            TagCategory::Verb => "Verb",
            TagCategory::Gerund => "Gerund",
            TagCategory::Unknown => "Unknown",
        }
    }

    pub fn kurdish_name(self) -> &'static str {
        match self {
            TagCategory::Noun => "ناو",
            TagCategory::Pronoun => "جیناو",
            TagCategory::Particle => "نامراز",
            TagCategory::Adjective => "ناو ملناو",
            TagCategory::Adverb => "ناو ملکار",
            TagCategory::Numeral => "ژماره",
            TagCategory::Verb => "کار",
            TagCategory::Gerund => "چاوگ",
            TagCategory::Unknown => "UNKNOWN",
        }
    }

    /// Coarse label of the category in the UD mapping table.
    pub fn ud_upos(self) -> UdUpos {
        match self {
            TagCategory::Noun => UdUpos::Noun,
            TagCategory::Pronoun => UdUpos::Pron,
            TagCategory::Particle => UdUpos::Part,
            TagCategory::Adjective => UdUpos::Adj,
            TagCategory::Adverb => UdUpos::Adv,
            TagCategory::Numeral => UdUpos::Num,
            TagCategory::Verb => UdUpos::Verb,
            TagCategory::Gerund => UdUpos::Grd,
            TagCategory::Unknown => UdUpos::X,
        }
    }
}

impl fmt::Display for TagCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TagCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        TagCategory::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .or_else(|| {
                // the source table spells the particle category both ways
                s.eq_ignore_ascii_case("Particles").then_some(TagCategory::Particle)
            })
            .ok_or_else(|| Error::Config(format!("unknown category `{s}`")))
    }
}

/// Coarse labels as written in the UD mapping table. `Grd` is not part of
/// the official UPOS inventory; see [`UdMode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum UdUpos {
    Noun,
    Pron,
    Adj,
    Adv,
    Num,
    Verb,
    Part,
    Grd,
    X,
}

impl UdUpos {
    pub fn label(self, mode: UdMode) -> &'static str {
        match (self, mode) {
            (UdUpos::Noun, _) => "NOUN",
            (UdUpos::Pron, _) => "PRON",
            (UdUpos::Adj, _) => "ADJ",
            (UdUpos::Adv, _) => "ADV",
            (UdUpos::Num, _) => "NUM",
            (UdUpos::Verb, _) => "VERB",
            (UdUpos::Part, _) => "PART",
            (UdUpos::Grd, UdMode::PaperLiteral) => "GRD",
            (UdUpos::Grd, UdMode::StrictUd) => "VERB",
            (UdUpos::X, _) => "X",
        }
    }
}

/// How the coarse UD label is rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UdMode {
    /// Labels exactly as in the mapping table, including `GRD`.
    PaperLiteral,
    /// Only official UPOS labels; gerunds become `VERB`.
    #[default]
    StrictUd,
}

impl FromStr for UdMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" | "paper-literal" => Ok(UdMode::PaperLiteral),
            "strict" | "strict-ud" => Ok(UdMode::StrictUd),
            other => Err(format!("unknown UD mode `{other}` (expected paper or strict)")),
        }
    }
}

impl fmt::Display for UdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UdMode::PaperLiteral => "paper",
            UdMode::StrictUd => "strict",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagDescriptor {
    pub abbrev: String,
    pub english_name: String,
    pub kurdish_name: String,
    pub category: TagCategory,
    pub ud_upos: UdUpos,
    /// Row number in the inventory, 1-97; 0 for `UNK`.
    pub table_index: u8,
    /// The Kurdish name is reproduced from a degraded source and awaits
    /// native-speaker verification.
    pub needs_review: bool,
}

/// Immutable registry of all 98 tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagRegistry {
    tags: Vec<TagDescriptor>,
    by_abbrev: HashMap<String, usize>,
    aliases: BTreeMap<String, String>,
    tree: CategoryTree,
}

/// Build the registry from the embedded table.
///
/// Panics if the embedded table is malformed; it ships with the crate, so a
/// failure here is a packaging defect. Use [`TagRegistry::from_table`] for a
/// fallible variant.
pub fn load_registry() -> TagRegistry {
    TagRegistry::from_table(EMBEDDED_TABLE).expect("embedded tagset table is valid")
}

impl TagRegistry {
    /// A process-wide registry, built on first use.
    pub fn shared() -> &'static TagRegistry {
        static REGISTRY: OnceLock<TagRegistry> = OnceLock::new();
        REGISTRY.get_or_init(load_registry)
    }

    /// Parse a tab-separated table with columns
    /// `index, category, english, abbrev, kurdish, needs_review(y|n)`.
    pub fn from_table(data: &str) -> Result<Self> {
        let mut tags = Vec::with_capacity(98);
        for (lineno, line) in data.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 6 {
                return Err(Error::Config(format!(
                    "line {}: expected 6 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let table_index: u8 = cols[0]
                .trim()
                .parse()
                .ok()
                .filter(|i| (1..=97).contains(i))
                .ok_or_else(|| Error::Config(format!("line {}: bad index", lineno + 1)))?;
            let category: TagCategory = cols[1].parse()?;
            let abbrev = cols[3].trim().to_ascii_uppercase();
            if !is_well_formed_abbrev(&abbrev) {
                return Err(Error::Config(format!("malformed abbreviation `{abbrev}`")));
            }
            tags.push(TagDescriptor {
                abbrev,
                english_name: cols[2].trim().to_string(),
                kurdish_name: cols[4].trim().to_string(),
                category,
                ud_upos: category.ud_upos(),
                table_index,
                needs_review: cols[5].trim() == "y",
            });
        }
        tags.sort_by_key(|t| t.table_index);
        for (i, t) in tags.iter().enumerate() {
            if usize::from(t.table_index) != i + 1 {
                return Err(Error::Config(format!(
                    "table indices are not exactly 1..=97 (problem near {})",
                    t.abbrev
                )));
            }
        }
        tags.push(TagDescriptor {
            abbrev: UNK.to_string(),
            english_name: "Unknown".to_string(),
            kurdish_name: TagCategory::Unknown.kurdish_name().to_string(),
            category: TagCategory::Unknown,
            ud_upos: UdUpos::X,
            table_index: 0,
            needs_review: false,
        });

        let mut by_abbrev = HashMap::with_capacity(tags.len());
        for (i, t) in tags.iter().enumerate() {
            if by_abbrev.insert(t.abbrev.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate abbreviation `{}`", t.abbrev)));
            }
        }
        for (category, expected) in EXPECTED_CARDINALITIES {
            let found = tags.iter().filter(|t| t.category == category).count();
            if found != expected {
                return Err(Error::Config(format!(
                    "category {category} has {found} tags, expected {expected}"
                )));
            }
        }

        let mut aliases = BTreeMap::new();
        for (variant, canonical) in ALIASES {
            if by_abbrev.contains_key(variant) {
                return Err(Error::Config(format!("alias `{variant}` shadows a canonical tag")));
            }
            if !by_abbrev.contains_key(canonical) {
                return Err(Error::Config(format!("alias target `{canonical}` missing")));
            }
            aliases.insert(variant.to_string(), canonical.to_string());
        }

        let tree = CategoryTree::build(&tags);
        Ok(TagRegistry {
            tags,
            by_abbrev,
            aliases,
            tree,
        })
    }

    /// All tags in inventory order, `UNK` last.
    pub fn tags(&self) -> &[TagDescriptor] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn aliases(&self) -> &BTreeMap<String, String> {
        &self.aliases
    }

    /// Look a tag up by abbreviation (case-insensitive). With
    /// `resolve_aliases`, variant spellings are accepted too.
    pub fn lookup(&self, abbrev: &str, resolve_aliases: bool) -> Result<&TagDescriptor> {
        let key = abbrev.trim().to_ascii_uppercase();
        if let Some(&i) = self.by_abbrev.get(&key) {
            return Ok(&self.tags[i]);
        }
        if resolve_aliases {
            if let Some(canonical) = self.aliases.get(&key) {
                return Ok(&self.tags[self.by_abbrev[canonical]]);
            }
        }
        Err(Error::UnknownTag(abbrev.to_string()))
    }

    /// Canonical abbreviation for a canonical or variant spelling.
    pub fn resolve_alias(&self, abbrev: &str) -> Result<&str> {
        self.lookup(abbrev, true).map(|t| t.abbrev.as_str())
    }

    pub fn contains(&self, abbrev: &str) -> bool {
        self.lookup(abbrev, true).is_ok()
    }

    pub fn tags_in_category(&self, category: TagCategory) -> Vec<&TagDescriptor> {
        self.tags.iter().filter(|t| t.category == category).collect()
    }

    pub fn ud_upos_for(&self, abbrev: &str, mode: UdMode) -> Result<&'static str> {
        self.lookup(abbrev, true).map(|t| t.ud_upos.label(mode))
    }

    pub fn category_tree(&self) -> &CategoryTree {
        &self.tree
    }

    /// Write the reference table used for documentation: a header line and
    /// one tab-separated record per tag.
    pub fn write_reference_table<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "table_index\tabbrev\tenglish_name\tkurdish_name\tcategory\tud_paper\tud_strict"
        )?;
        for t in &self.tags {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.table_index,
                t.abbrev,
                t.english_name,
                t.kurdish_name,
                t.category,
                t.ud_upos.label(UdMode::PaperLiteral),
                t.ud_upos.label(UdMode::StrictUd)
            )?;
        }
        Ok(())
    }
}

fn is_well_formed_abbrev(s: &str) -> bool {
    !s.is_empty()
        && s.split('-').all(|part| {
            !part.is_empty()
                && part
                    .chars()
                    .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
        })
}
