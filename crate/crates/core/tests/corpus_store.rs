use std::sync::Arc;
use std::thread;

use ckl_pos::corpus::{Corpus, NewAnnotation, Provenance, UnknownTagPolicy};
use ckl_pos::UdMode;

fn ann(doc: &str, s: usize, t: usize, tag: &str, who: &str) -> NewAnnotation {
    NewAnnotation {
        doc_id: doc.into(),
        sentence_index: s,
        token_index: t,
        tag: tag.into(),
        provenance: Provenance::Human,
        annotator: who.into(),
        score: None,
    }
}

#[test]
fn concurrent_writers_lose_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Arc::new(Corpus::open(dir.path()).unwrap());
    let a = corpus.create_document("جل و بەرگ. نان", "a").unwrap();
    let b = corpus.create_document("کچ و کوڕ", "b").unwrap();

    let handles: Vec<_> = (0..8)
        .map(|w| {
            let corpus = corpus.clone();
            let (a, b) = (a.id.clone(), b.id.clone());
            thread::spawn(move || {
                for i in 0..50 {
                    let who = format!("w{w}");
                    corpus.record_annotation(ann(&a, 0, i % 3, "N-S", &who)).unwrap();
                    corpus.record_annotation(ann(&b, 0, i % 3, "N-F", &who)).unwrap();
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }

    assert_eq!(corpus.annotations(&a.id).unwrap().history.len(), 400);
    drop(corpus);
    let reopened = Corpus::open(dir.path()).unwrap();
    for id in [&a.id, &b.id] {
        let state = reopened.annotations(id).unwrap();
        assert_eq!(state.history.len(), 400);
        assert_eq!(state.current.len(), 3);
    }
    assert_eq!(reopened.stats().unwrap().total, 6);
}

#[test]
fn corrupt_document_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Corpus::open(dir.path()).unwrap();
    let doc = corpus.create_document("نان", "a").unwrap();
    drop(corpus);
    let path = dir.path().join("docs").join(format!("{}.jsonl", doc.id));
    let mut body = std::fs::read_to_string(&path).unwrap();
    body.push_str("{not json\n");
    std::fs::write(&path, body).unwrap();
    let corpus = Corpus::open(dir.path()).unwrap();
    let err = corpus.annotations(&doc.id).unwrap_err();
    assert_eq!(err.code(), "StorageError");
}

#[test]
fn import_policy_for_foreign_tags() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Corpus::open(dir.path()).unwrap();
    let input = "1\tنان\t_\tNOUN\tFOO\t_\t_\t_\t_\t_\n\n";
    assert!(corpus
        .import_conllu(input.as_bytes(), UnknownTagPolicy::Reject)
        .is_err());
    let doc = corpus
        .import_conllu(input.as_bytes(), UnknownTagPolicy::ImportAsUnk)
        .unwrap();
    let state = corpus.annotations(&doc.id).unwrap();
    assert_eq!(state.current[&(0, 0)].tag, "UNK");
    assert_eq!(state.current[&(0, 0)].provenance, Provenance::Machine);
    let out = corpus.export_conllu(&doc.id, UdMode::PaperLiteral, None).unwrap();
    assert!(String::from_utf8(out).unwrap().contains("\tX\tUNK\t"));
}
