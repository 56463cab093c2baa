//! End-to-end acceptance checks. Each criterion prints one line:
//!
//! ```text
//! [PASS] registry-exactness (3 ms): ...
//! ```
//!
//! Run with `cargo test -p ckl-pos --test acceptance -- --nocapture`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use ckl_pos::corpus::{conllu, Corpus, NewAnnotation, Provenance, UnknownTagPolicy};
use ckl_pos::morphology::{segment_token, AffixTable, MorphRole, Morphology};
use ckl_pos::suggestion::{transitions, Context, Suggester};
use ckl_pos::tagset::{TagCategory, UD_UPOS_LABELS};
use ckl_pos::tokenizer::{normalize_text, tokenize, Token};
use ckl_pos::UdMode;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

struct Outcome {
    name: &'static str,
    limit: Option<Duration>,
    elapsed: Duration,
    failures: Vec<String>,
    summary: String,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.failures.is_empty() && self.limit.map_or(true, |l| self.elapsed < l)
    }
}

fn run(
    name: &'static str,
    limit: Option<Duration>,
    check: impl FnOnce(&mut Vec<String>) -> String,
) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let summary = check(&mut failures);
    Outcome {
        name,
        limit,
        elapsed: start.elapsed(),
        failures,
        summary,
    }
}

fn registry_exactness(fail: &mut Vec<String>) -> String {
    let reg = registry();
    let rows = table_i_rows();
    if reg.len() != 98 {
        fail.push(format!("registry has {} tags", reg.len()));
    }
    let expected = [
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
    for (cat, n) in expected {
        let got = reg.tags_in_category(cat).len();
        if got != n {
            fail.push(format!("{cat}: {got} tags, expected {n}"));
        }
    }
    for (index, category, english, abbrev) in &rows {
        let canonical = abbrev.to_uppercase();
        let category = if category == "Particles" { "Particle" } else { category.as_str() };
        match reg.lookup(&canonical, false) {
            Ok(t) => {
                if t.table_index != *index
                    || t.english_name != *english
                    || t.category.name() != category
                    || t.abbrev != canonical
                {
                    fail.push(format!("row {index} ({abbrev}) differs: {t:?}"));
                }
            }
            Err(e) => fail.push(format!("row {index}: {e}")),
        }
    }
    let unk = reg.lookup("UNK", false).map(|t| t.category);
    if unk.ok() != Some(TagCategory::Unknown) {
        fail.push("UNK missing".into());
    }
    format!("{} rows compared, {} tags", rows.len(), reg.len())
}

fn ud_mapping(fail: &mut Vec<String>) -> String {
    let reg = registry();
    let mut by_category = BTreeMap::new();
    for (ud, tags) in table_ii_rows() {
        for tag in tags {
            if let Ok(t) = reg.lookup(&tag, true) {
                by_category.insert(t.category, ud.clone());
            }
        }
    }
    for t in reg.tags() {
        let paper = reg.ud_upos_for(&t.abbrev, UdMode::PaperLiteral).unwrap();
        match by_category.get(&t.category) {
            Some(ud) if ud == paper => {}
            other => fail.push(format!("{}: paper {paper}, Table II {other:?}", t.abbrev)),
        }
        let strict = reg.ud_upos_for(&t.abbrev, UdMode::StrictUd).unwrap();
        if !UD_UPOS_LABELS.contains(&strict) {
            fail.push(format!("{}: strict label {strict} is not UD", t.abbrev));
        }
    }
    format!("{} tags in both modes", reg.len())
}

fn morphology_examples(fail: &mut Vec<String>) -> String {
    use MorphRole::*;
    let m = Morphology::seed();
    let cases: [(&str, &[(&str, MorphRole)]); 5] = [
        ("بکوژ", &[("ب", Prefix), ("کوژ", Root)]),
        ("بەهێز", &[("بە", Prefix), ("هێز", Root)]),
        ("ئاسنگەر", &[("ئاسن", Root), ("گەر", Suffix)]),
        (
            "هەڵگرتنەوە",
            &[
                ("هەڵ", CompoundAffixPrefixPart),
                ("گرتن", Root),
                ("ەوە", CompoundAffixSuffixPart),
            ],
        ),
        ("نانەکە", &[("نان", Stem), ("ەکە", Suffix)]),
    ];
    for (word, expected) in cases {
        let expected: Key = expected.iter().map(|(s, r)| (s.to_string(), *r)).collect();
        let top = m.segment(&Token::word(word), 1)[0].key();
        if top != expected {
            fail.push(format!("{word}: {top:?}"));
        }
    }

    // transition word between two stems
    let tokens = tokenize(&normalize_text("جل و بەرگ"));
    let surfaces: Vec<&str> = tokens.iter().map(|t| t.surface.as_str()).collect();
    if surfaces != ["جل", "و", "بەرگ"] || transitions(&tokens) != [1] {
        fail.push(format!("جل و بەرگ: {surfaces:?}"));
    }
    for i in [0, 2] {
        let top = m.segment(&tokens[i], 1)[0].key();
        if top != vec![(tokens[i].surface.clone(), Stem)] {
            fail.push(format!("{}: {top:?}", tokens[i].surface));
        }
    }
    let s = Suggester::seed();
    let conj = &s.suggest(&tokens[1], Context::within(&tokens, 1))[0];
    if conj.tag != "PART-CONJ" {
        fail.push(format!("و suggested as {}", conj.tag));
    }
    "6 examples".into()
}

fn segmentation_oracle(fail: &mut Vec<String>) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e9);
    let lexicon = synthetic_lexicon(&mut rng, 50);
    let affixes = AffixTable::seed();
    let mut analyses = 0;
    for _ in 0..1000 {
        let word = random_token(&mut rng, &lexicon, &affixes);
        let got: BTreeSet<Key> = segment_token(&Token::word(&word), &lexicon, &affixes, usize::MAX)
            .iter()
            .map(|s| s.key())
            .collect();
        let want = brute_force_segmentations(&word, &lexicon, &affixes);
        analyses += want.len();
        if got != want {
            fail.push(format!("{word}: got {got:?}, oracle {want:?}"));
        }
    }
    format!("1000 tokens, {analyses} analyses")
}

fn tokenizer_fuzz(fail: &mut Vec<String>) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(0x70c);
    for _ in 0..10_000 {
        let raw = fuzz_text(&mut rng, 40);
        if let Err(e) = check_tokenization(&raw) {
            fail.push(format!("{raw:?}: {e}"));
        }
    }
    "10000 inputs".into()
}

fn suggestion_totality(fail: &mut Vec<String>) -> String {
    let s = Suggester::seed();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a6);
    let lexicon = s.morphology.lexicon.clone();
    let affixes = s.morphology.affixes.clone();
    for i in 0..2_000 {
        let word = match i % 3 {
            0 => random_token(&mut rng, &lexicon, &affixes),
            1 => random_word(&mut rng, 1, 10),
            _ => {
                let t = fuzz_text(&mut rng, 8);
                if t.is_empty() { "x".to_string() } else { t }
            }
        };
        if let Err(e) = check_suggestions(&word, &s) {
            fail.push(format!("{word:?}: {e}"));
        }
    }
    for (word, tag) in [
        ("خویندن", "GRD-D"),
        ("چون", "GRD-W"),
        ("کریین", "GRD-Y"),
        ("هاتن", "GRD-T"),
        ("شکان", "GRD-A"),
    ] {
        let top = &s.suggest(&Token::word(word), Context::default())[0];
        if top.tag != tag {
            fail.push(format!("{word}: top {} ({})", top.tag, top.rule_id));
        }
    }
    "2000 tokens, 5 gerunds".into()
}

fn random_document_text<R: Rng>(rng: &mut R, words: &[String]) -> String {
    let mut text = String::new();
    for s in 0..rng.gen_range(1..=4) {
        if s > 0 {
            text.push_str(if rng.gen_bool(0.3) { "\n" } else { " " });
        }
        for w in 0..rng.gen_range(1..=8) {
            if w > 0 {
                text.push(' ');
            }
            match rng.gen_range(0..10) {
                0 => text.push_str(&rng.gen_range(1..2000).to_string()),
                1 => text.push('،'),
                2 => text.push_str("و"),
                _ => text.push_str(words.choose(rng).unwrap()),
            }
        }
        if rng.gen_bool(0.85) {
            text.push(*['.', '؟', '!', '۔'].choose(rng).unwrap());
        }
    }
    text
}

fn conllu_round_trip(fail: &mut Vec<String>) -> String {
    let reg = registry();
    let dir = tempfile::tempdir().unwrap();
    let corpus = Corpus::open(dir.path()).unwrap();
    let m = Morphology::seed();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc011);
    let mut words: Vec<String> = m.lexicon.iter().map(|(k, _)| k.to_string()).collect();
    words.extend(["نانەکە", "بەهێز", "خویندن", "هەڵگرتنەوە", "می\u{200C}وان"].map(String::from));
    let tags: Vec<&str> = reg.tags().iter().map(|t| t.abbrev.as_str()).collect();
    let mut annotated = 0;

    for _ in 0..200 {
        let doc = corpus
            .create_document(&random_document_text(&mut rng, &words), "fuzz")
            .unwrap();
        let mut batch = Vec::new();
        for (si, s) in doc.sentences.iter().enumerate() {
            for ti in 0..s.tokens.len() {
                if rng.gen_bool(0.8) {
                    batch.push(NewAnnotation {
                        doc_id: doc.id.clone(),
                        sentence_index: si,
                        token_index: ti,
                        tag: tags.choose(&mut rng).unwrap().to_string(),
                        provenance: if rng.gen_bool(0.5) {
                            Provenance::Human
                        } else {
                            Provenance::Machine
                        },
                        annotator: "fuzz".into(),
                        score: None,
                    });
                }
            }
        }
        annotated += batch.len();
        corpus.record_annotations(&doc.id, batch).unwrap();

        let exported = corpus.export_conllu(&doc.id, UdMode::StrictUd, Some(&m)).unwrap();
        let issues = conllu::validate(&exported, UdMode::StrictUd, reg);
        if !issues.is_empty() {
            fail.push(format!("{}: {issues:?}", doc.id));
            continue;
        }
        let imported = match corpus.import_conllu(&exported, UnknownTagPolicy::Reject) {
            Ok(d) => d,
            Err(e) => {
                fail.push(format!("{}: import failed: {e}", doc.id));
                continue;
            }
        };

        let shape = |d: &ckl_pos::corpus::Document| -> Vec<Vec<String>> {
            d.sentences
                .iter()
                .map(|s| s.tokens.iter().map(|t| t.surface.clone()).collect())
                .collect()
        };
        if shape(&doc) != shape(&imported) {
            fail.push(format!("{}: surfaces or boundaries differ", doc.id));
        }
        let current = |id: &str| -> Vec<((usize, usize), String, Provenance)> {
            corpus
                .annotations(id)
                .unwrap()
                .current
                .into_iter()
                .map(|(k, a)| (k, a.tag, a.provenance))
                .collect()
        };
        if current(&doc.id) != current(&imported.id) {
            fail.push(format!("{}: annotations differ", doc.id));
        }
        let again = corpus
            .export_conllu(&imported.id, UdMode::StrictUd, Some(&m))
            .unwrap();
        let strip = |b: &[u8]| -> Vec<String> {
            String::from_utf8_lossy(b)
                .lines()
                .filter(|l| !l.starts_with("# newdoc") && !l.starts_with("# sent_id"))
                .map(str::to_string)
                .collect()
        };
        if strip(&exported) != strip(&again) {
            fail.push(format!("{}: second export differs", doc.id));
        }
    }
    format!("200 documents, {annotated} annotations")
}

fn alias_reconciliation(fail: &mut Vec<String>) -> String {
    let reg = registry();
    let mut variants = 0;
    for (_, tags) in table_ii_rows() {
        for tag in tags {
            variants += 1;
            match reg.resolve_alias(&tag) {
                Ok(c) => {
                    if reg.lookup(c, false).is_err() {
                        fail.push(format!("{tag} -> {c} is not canonical"));
                    }
                }
                Err(e) => fail.push(format!("{tag}: {e}")),
            }
        }
    }
    for (alias, canonical) in reg.aliases() {
        let once = reg.resolve_alias(alias).unwrap();
        let twice = reg.resolve_alias(once).unwrap();
        if once != canonical || once != twice {
            fail.push(format!("{alias}: {once} then {twice}"));
        }
    }
    for t in reg.tags() {
        if reg.resolve_alias(&t.abbrev).ok() != Some(t.abbrev.as_str()) {
            fail.push(format!("{} does not resolve to itself", t.abbrev));
        }
    }
    format!("{variants} Table II entries, {} aliases", reg.aliases().len())
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let outcomes = [
        run("registry-exactness", Some(s(1)), registry_exactness),
        run("ud-mapping", Some(s(1)), ud_mapping),
        run("morphology-examples", Some(s(1)), morphology_examples),
        run("segmentation-oracle", Some(s(30)), segmentation_oracle),
        run("tokenizer-lossless", Some(s(60)), tokenizer_fuzz),
        run("suggestion-totality", Some(s(30)), suggestion_totality),
        run("conllu-round-trip", Some(s(30)), conllu_round_trip),
        run("alias-reconciliation", None, alias_reconciliation),
    ];
    for o in &outcomes {
        println!(
            "[{}] {} ({} ms): {}",
            if o.passed() { "PASS" } else { "FAIL" },
            o.name,
            o.elapsed.as_millis(),
            o.summary
        );
        for f in o.failures.iter().take(5) {
            println!("    {f}");
        }
        if o.failures.len() > 5 {
            println!("    ... {} more", o.failures.len() - 5);
        }
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.name).collect();
    assert!(failed.is_empty(), "failed: {failed:?}");
}
