use serde::{Deserialize, Serialize};

use super::{TagCategory, TagDescriptor, UdMode, UdUpos};

pub const TREE_ROOT: &str = "CKL-POS";

/// Two-level hierarchy: root, one node per category, tags as leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryTree {
    pub root: String,
    pub children: Vec<CategoryNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryNode {
    pub category: TagCategory,
    pub kurdish_name: String,
    pub ud_upos: UdUpos,
    pub leaves: Vec<TagLeaf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagLeaf {
    pub abbrev: String,
    pub english_name: String,
    pub kurdish_name: String,
    pub table_index: u8,
}

impl CategoryTree {
    pub(super) fn build(tags: &[TagDescriptor]) -> Self {
        let children = TagCategory::ALL
            .into_iter()
            .map(|category| CategoryNode {
                category,
                kurdish_name: category.kurdish_name().to_string(),
                ud_upos: category.ud_upos(),
                leaves: tags
                    .iter()
                    .filter(|t| t.category == category)
                    .map(|t| TagLeaf {
                        abbrev: t.abbrev.clone(),
                        english_name: t.english_name.clone(),
                        kurdish_name: t.kurdish_name.clone(),
                        table_index: t.table_index,
                    })
                    .collect(),
            })
            .collect();
        CategoryTree {
            root: TREE_ROOT.to_string(),
            children,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.children.iter().map(|c| c.leaves.len()).sum()
    }

    /// Depth of every leaf below the root. The hierarchy is fixed at two
    /// levels, so this is always 2 for a non-empty tree.
    pub fn leaf_depths(&self) -> impl Iterator<Item = usize> + '_ {
        self.children
            .iter()
            .flat_map(|c| c.leaves.iter().map(|_| 2))
    }

    pub fn node(&self, category: TagCategory) -> Option<&CategoryNode> {
        self.children.iter().find(|c| c.category == category)
    }

    /// Indented plain-text rendering, used by `tagset tree`.
    pub fn render(&self, mode: UdMode) -> String {
        let mut out = format!("{}\n", self.root);
        for node in &self.children {
            out.push_str(&format!(
                "  {} ({}) [{}] {}\n",
                node.category,
                node.kurdish_name,
                node.ud_upos.label(mode),
                node.leaves.len()
            ));
            for leaf in &node.leaves {
                out.push_str(&format!(
                    "    {:<13} {} | {}\n",
                    leaf.abbrev, leaf.english_name, leaf.kurdish_name
                ));
            }
        }
        out
    }
}
