//! Document and annotation storage.
//!
//! A corpus is a directory holding `corpus.idx` (one JSON record per
//! document) and `docs/<id>.jsonl`. Each document file starts with the
//! document record; annotation records are appended after it, so the file
//! is the full annotation history and the last record per token is the
//! current one.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphology::Morphology;
use crate::suggestion::Suggester;
use crate::tagset::{TagCategory, TagRegistry, UdMode};
use crate::tokenizer::{
    normalize_text, sentence_boundaries, split_sentences, NormalizedText, SentenceSpan, Token,
    TokenKind,
};

pub mod conllu;

pub use conllu::{Issue, UnknownTagPolicy};

const INDEX_FILE: &str = "corpus.idx";
const DOCS_DIR: &str = "docs";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub raw_text: String,
    pub normalized: NormalizedText,
    pub sentences: Vec<SentenceSpan>,
    pub created_at: DateTime<Utc>,
}

impl Document {
    /// Normalize, split and tokenize `raw` into a new document with a fresh id.
    pub fn from_text(raw: &str, title: &str) -> Document {
        let normalized = normalize_text(raw);
        let sentences = split_sentences(&normalized);
        Document {
            id: fresh_id(),
            title: title.to_string(),
            raw_text: raw.to_string(),
            normalized,
            sentences,
            created_at: Utc::now(),
        }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    pub fn token(&self, sentence: usize, token: usize) -> Option<&Token> {
        self.sentences.get(sentence)?.tokens.get(token)
    }
}

fn fresh_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()[..12].to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Human,
    Machine,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Human => "human",
            Provenance::Machine => "machine",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "human" => Ok(Provenance::Human),
            "machine" => Ok(Provenance::Machine),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub doc_id: String,
    pub sentence_index: usize,
    pub token_index: usize,
    pub tag: String,
    pub provenance: Provenance,
    pub annotator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    pub timestamp: DateTime<Utc>,
}

/// An annotation as submitted; the store canonicalizes the tag and stamps it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewAnnotation {
    pub doc_id: String,
    pub sentence_index: usize,
    pub token_index: usize,
    pub tag: String,
    pub provenance: Provenance,
    pub annotator: String,
    #[serde(default)]
    pub score: Option<f64>,
}

/// Current annotations plus the full write history of one document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationState {
    pub current: BTreeMap<(usize, usize), Annotation>,
    pub history: Vec<Annotation>,
}

impl AnnotationState {
    fn apply(&mut self, ann: Annotation) {
        self.current
            .insert((ann.sentence_index, ann.token_index), ann.clone());
        self.history.push(ann);
    }

    /// Superseded values for one token, oldest first.
    pub fn history_for(&self, sentence: usize, token: usize) -> Vec<&Annotation> {
        let mut all: Vec<&Annotation> = self
            .history
            .iter()
            .filter(|a| a.sentence_index == sentence && a.token_index == token)
            .collect();
        all.pop();
        all
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub id: String,
    pub title: String,
    pub file: String,
    pub sentences: usize,
    pub tokens: usize,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagDistribution {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
    pub categories: BTreeMap<TagCategory, u64>,
}

impl TagDistribution {
    pub fn from_annotations<'a>(
        annotations: impl IntoIterator<Item = &'a Annotation>,
        registry: &TagRegistry,
    ) -> Self {
        let mut dist = TagDistribution::default();
        for c in TagCategory::ALL {
            dist.categories.insert(c, 0);
        }
        for a in annotations {
            let Ok(tag) = registry.lookup(&a.tag, true) else {
                continue;
            };
            *dist.counts.entry(tag.abbrev.clone()).or_default() += 1;
            *dist.categories.entry(tag.category).or_default() += 1;
            dist.total += 1;
        }
        dist
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record {
    Document(Document),
    Annotation(Annotation),
}

struct DocSlot {
    doc: Arc<Document>,
    state: Mutex<AnnotationState>,
}

/// A corpus directory. Writes to one document are serialized; different
/// documents are independent.
pub struct Corpus {
    dir: PathBuf,
    registry: &'static TagRegistry,
    index: RwLock<Vec<IndexEntry>>,
    docs: RwLock<HashMap<String, Arc<DocSlot>>>,
}

impl fmt::Debug for Corpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Corpus").field("dir", &self.dir).finish()
    }
}

impl Corpus {
    /// Open (creating if needed) a corpus directory.
    pub fn open(dir: impl AsRef<Path>) -> Result<Corpus> {
        let dir = dir.as_ref().to_path_buf();
        let docs = dir.join(DOCS_DIR);
        fs::create_dir_all(&docs).map_err(|e| Error::storage(&docs, e))?;
        let index_path = dir.join(INDEX_FILE);
        let mut index = Vec::new();
        if index_path.exists() {
            let file = File::open(&index_path).map_err(|e| Error::storage(&index_path, e))?;
            for line in BufReader::new(file).lines() {
                let line = line.map_err(|e| Error::storage(&index_path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: IndexEntry =
                    serde_json::from_str(&line).map_err(|e| Error::CorruptRecord {
                        path: index_path.clone(),
                        message: e.to_string(),
                    })?;
                index.push(entry);
            }
        }
        Ok(Corpus {
            dir,
            registry: TagRegistry::shared(),
            index: RwLock::new(index),
            docs: RwLock::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn registry(&self) -> &'static TagRegistry {
        self.registry
    }

    pub fn list(&self) -> Vec<IndexEntry> {
        self.index.read().expect("index lock").clone()
    }

    fn doc_path(&self, id: &str) -> PathBuf {
        self.dir.join(DOCS_DIR).join(format!("{id}.jsonl"))
    }

    fn write_index(&self, index: &[IndexEntry]) -> Result<()> {
        let path = self.dir.join(INDEX_FILE);
        let tmp = self.dir.join(format!("{INDEX_FILE}.tmp"));
        let mut buf = String::new();
        for e in index {
            buf.push_str(&serde_json::to_string(e).expect("index entry serializes"));
            buf.push('\n');
        }
        fs::write(&tmp, buf).map_err(|e| Error::storage(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::storage(&path, e))
    }

    fn store_new(&self, mut doc: Document, annotations: Vec<NewAnnotation>) -> Result<Document> {
        let mut index = self.index.write().expect("index lock");
        while index.iter().any(|e| e.id == doc.id) {
            doc.id = fresh_id();
        }
        let path = self.doc_path(&doc.id);
        let mut state = AnnotationState::default();
        let mut buf = serde_json::to_string(&Record::Document(doc.clone()))
            .expect("document serializes");
        buf.push('\n');
        for new in annotations {
            let ann = self.check(&doc, NewAnnotation {
                doc_id: doc.id.clone(),
                ..new
            })?;
            buf.push_str(
                &serde_json::to_string(&Record::Annotation(ann.clone()))
                    .expect("annotation serializes"),
            );
            buf.push('\n');
            state.apply(ann);
        }
        fs::write(&path, buf).map_err(|e| Error::storage(&path, e))?;

        index.push(IndexEntry {
            id: doc.id.clone(),
            title: doc.title.clone(),
            file: format!("{DOCS_DIR}/{}.jsonl", doc.id),
            sentences: doc.sentences.len(),
            tokens: doc.token_count(),
            created_at: doc.created_at,
        });
        self.write_index(&index)?;
        drop(index);

        let slot = Arc::new(DocSlot {
            doc: Arc::new(doc.clone()),
            state: Mutex::new(state),
        });
        self.docs
            .write()
            .expect("docs lock")
            .insert(doc.id.clone(), slot);
        Ok(doc)
    }

    pub fn create_document(&self, raw: &str, title: &str) -> Result<Document> {
        self.store_new(Document::from_text(raw, title), Vec::new())
    }

    fn slot(&self, id: &str) -> Result<Arc<DocSlot>> {
        if let Some(slot) = self.docs.read().expect("docs lock").get(id) {
            return Ok(slot.clone());
        }
        if !self.index.read().expect("index lock").iter().any(|e| e.id == id) {
            return Err(Error::DocumentNotFound(id.to_string()));
        }
        let path = self.doc_path(id);
        let file = File::open(&path).map_err(|e| Error::storage(&path, e))?;
        let mut doc = None;
        let mut state = AnnotationState::default();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::storage(&path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |message: String| Error::CorruptRecord {
                path: path.clone(),
                message: format!("line {}: {message}", i + 1),
            };
            match serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))? {
                Record::Document(d) if doc.is_none() => doc = Some(d),
                Record::Document(_) => return Err(corrupt("second document record".into())),
                Record::Annotation(a) => state.apply(a),
            }
        }
        let doc = doc.ok_or_else(|| Error::CorruptRecord {
            path: path.clone(),
            message: "missing document record".into(),
        })?;
        let slot = Arc::new(DocSlot {
            doc: Arc::new(doc),
            state: Mutex::new(state),
        });
        Ok(self
            .docs
            .write()
            .expect("docs lock")
            .entry(id.to_string())
            .or_insert(slot)
            .clone())
    }

    pub fn document(&self, id: &str) -> Result<Arc<Document>> {
        Ok(self.slot(id)?.doc.clone())
    }

    pub fn annotations(&self, id: &str) -> Result<AnnotationState> {
        let slot = self.slot(id)?;
        let state = slot.state.lock().expect("document lock");
        Ok(state.clone())
    }

    fn check(&self, doc: &Document, new: NewAnnotation) -> Result<Annotation> {
        let tag = self.registry.resolve_alias(&new.tag)?.to_string();
        if doc.token(new.sentence_index, new.token_index).is_none() {
            return Err(Error::Address {
                doc: doc.id.clone(),
                sentence: new.sentence_index,
                token: new.token_index,
            });
        }
        Ok(Annotation {
            doc_id: doc.id.clone(),
            sentence_index: new.sentence_index,
            token_index: new.token_index,
            tag,
            provenance: new.provenance,
            annotator: new.annotator,
            score: new.score,
            timestamp: Utc::now(),
        })
    }

    /// Validate and append annotations to one document under its write lock.
    pub fn record_annotations(&self, doc_id: &str, batch: Vec<NewAnnotation>) -> Result<Vec<Annotation>> {
        let slot = self.slot(doc_id)?;
        let anns = batch
            .into_iter()
            .map(|n| self.check(&slot.doc, n))
            .collect::<Result<Vec<_>>>()?;
        let mut buf = String::new();
        for a in &anns {
            buf.push_str(&serde_json::to_string(&Record::Annotation(a.clone())).expect("serializes"));
            buf.push('\n');
        }
        let mut state = slot.state.lock().expect("document lock");
        let path = self.doc_path(doc_id);
        let mut file = OpenOptions::new()
            .append(true)
            .open(&path)
            .map_err(|e| Error::storage(&path, e))?;
        file.write_all(buf.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| Error::storage(&path, e))?;
        for a in &anns {
            state.apply(a.clone());
        }
        Ok(anns)
    }

    pub fn record_annotation(&self, new: NewAnnotation) -> Result<Annotation> {
        let doc_id = new.doc_id.clone();
        Ok(self.record_annotations(&doc_id, vec![new])?.remove(0))
    }

    /// Tag every token with its top suggestion, provenance `machine`.
    pub fn auto_annotate(
        &self,
        doc_id: &str,
        suggester: &Suggester,
        annotator: &str,
    ) -> Result<Vec<Annotation>> {
        let doc = self.document(doc_id)?;
        let batch = doc
            .sentences
            .iter()
            .enumerate()
            .flat_map(|(si, s)| {
                suggester
                    .auto_annotate(s)
                    .into_iter()
                    .map(move |(ti, tag)| NewAnnotation {
                        doc_id: doc_id.to_string(),
                        sentence_index: si,
                        token_index: ti,
                        tag: tag.tag,
                        provenance: Provenance::Machine,
                        annotator: annotator.to_string(),
                        score: Some(tag.score),
                    })
            })
            .collect();
        self.record_annotations(doc_id, batch)
    }

    pub fn export_conllu(
        &self,
        doc_id: &str,
        mode: UdMode,
        morphology: Option<&Morphology>,
    ) -> Result<Vec<u8>> {
        let slot = self.slot(doc_id)?;
        let state = slot.state.lock().expect("document lock");
        Ok(
            conllu::write_document(&slot.doc, &state.current, mode, morphology, self.registry)
                .into_bytes(),
        )
    }

    pub fn import_conllu(&self, input: &[u8], policy: UnknownTagPolicy) -> Result<Document> {
        let (doc, anns) = document_from_conllu(input, policy, self.registry)?;
        self.store_new(doc, anns)
    }

    /// Current-annotation counts over all documents.
    pub fn stats(&self) -> Result<TagDistribution> {
        let mut all = Vec::new();
        for entry in self.list() {
            let state = self.annotations(&entry.id)?;
            all.extend(state.current.into_values());
        }
        Ok(TagDistribution::from_annotations(&all, self.registry))
    }
}

/// Reconstruct a document and its annotations from CoNLL-U without storing
/// it. Sentence text comes from `# text` when the token forms can be found
/// in it, otherwise from the forms joined by spaces; sentences are joined
/// by newlines.
pub fn document_from_conllu(
    input: &[u8],
    policy: UnknownTagPolicy,
    registry: &TagRegistry,
) -> Result<(Document, Vec<NewAnnotation>)> {
    let parsed = conllu::parse(input, registry, policy)?;
    let mut text = String::new();
    let mut offset = 0usize;
    let mut sentences = Vec::new();
    let mut annotations = Vec::new();

    for (si, ps) in parsed.sentences.iter().enumerate() {
        if si > 0 {
            text.push('\n');
            offset += 1;
        }
        let forms: Vec<&str> = ps.tokens.iter().map(|t| t.form.as_str()).collect();
        let candidate = ps
            .text
            .as_deref()
            .map(|t| normalize_text(t).text.replace('\n', " "))
            .filter(|t| locate(t, &forms).is_some())
            .unwrap_or_else(|| forms.join(" "));
        let spans = locate(&candidate, &forms).expect("joined forms are locatable");
        let mut tokens = Vec::with_capacity(forms.len());
        for (ti, ((start, end), pt)) in spans.iter().zip(&ps.tokens).enumerate() {
            tokens.push(Token {
                surface: pt.form.clone(),
                start: offset + start,
                end: offset + end,
                index: ti,
                kind: token_kind(&pt.form),
            });
            if let Some(tag) = &pt.tag {
                annotations.push(NewAnnotation {
                    doc_id: String::new(),
                    sentence_index: si,
                    token_index: ti,
                    tag: tag.clone(),
                    provenance: pt.provenance,
                    annotator: "import".to_string(),
                    score: None,
                });
            }
        }
        sentences.push(SentenceSpan {
            start: tokens.first().map_or(offset, |t| t.start),
            end: tokens.last().map_or(offset, |t| t.end),
            tokens,
        });
        offset += candidate.chars().count();
        text.push_str(&candidate);
    }

    let n = text.chars().count();
    let doc = Document {
        id: fresh_id(),
        title: parsed.doc_id.unwrap_or_else(|| "imported".to_string()),
        raw_text: text.clone(),
        normalized: NormalizedText {
            text,
            char_map: (0..n).collect(),
            warnings: Vec::new(),
        },
        sentences,
        created_at: Utc::now(),
    };
    Ok((doc, annotations))
}

fn token_kind(form: &str) -> TokenKind {
    let nt = normalize_text(form);
    match crate::tokenizer::tokenize(&nt).as_slice() {
        [single] => single.kind,
        _ => Token::word(form).kind,
    }
}

/// Codepoint spans of `forms` found in order in `text`, separated only by
/// whitespace.
fn locate(text: &str, forms: &[&str]) -> Option<Vec<(usize, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut spans = Vec::with_capacity(forms.len());
    for form in forms {
        while pos < chars.len() && chars[pos].is_whitespace() {
            pos += 1;
        }
        let fc: Vec<char> = form.chars().collect();
        if chars.get(pos..pos + fc.len())? != fc.as_slice() {
            return None;
        }
        spans.push((pos, pos + fc.len()));
        pos += fc.len();
    }
    chars[pos..].iter().all(|c| c.is_whitespace()).then_some(spans)
}

// Sentence boundaries of a stored document must still agree with a fresh
// split of its text; used by tests and `validate`.
#[doc(hidden)]
pub fn boundaries_consistent(doc: &Document) -> bool {
    let fresh = sentence_boundaries(&doc.normalized);
    fresh.len() == doc.sentences.len()
        && fresh
            .iter()
            .zip(&doc.sentences)
            .all(|(&(s, e), span)| s == span.start && e == span.end)
}
