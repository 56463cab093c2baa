//! Command-line front end and HTTP service for `ckl-pos`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use ckl_pos::corpus::{conllu, Corpus, NewAnnotation, Provenance, UnknownTagPolicy};
use ckl_pos::suggestion::{Context, Suggester};
use ckl_pos::tagset::TagCategory;
use ckl_pos::tokenizer::{normalize_bytes, tokenize, Token};
use ckl_pos::{Error, TagRegistry, UdMode};
use clap::{Args, Parser, Subcommand};

pub mod config;
pub mod server;

use config::{load_resources, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "ckl-pos", version, about = "Central Kurdish part-of-speech annotation toolkit")]
struct Cli {
    /// Corpus directory.
    #[arg(long, global = true, env = "CKL_POS_CORPUS", default_value = "corpus")]
    corpus: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ResourceArgs {
    /// Root lexicon file replacing the seed lexicon.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Affix table replacing the seed table.
    #[arg(long, global = true)]
    affixes: Option<PathBuf>,
    /// Extra suggestion rules appended to the defaults.
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect the tag inventory.
    Tagset {
        #[command(subcommand)]
        action: TagsetAction,
    },
    /// Print one token per line: index, start, end, kind, surface.
    Tokenize {
        /// Input file, or `-` for standard input.
        input: PathBuf,
    },
    /// Ranked morphological analyses of a word.
    Segment {
        #[arg(long)]
        token: String,
        #[arg(long, default_value_t = 5)]
        max: usize,
    },
    /// Ranked tag suggestions for a word.
    Suggest {
        #[arg(long)]
        token: String,
        #[arg(long)]
        left: Option<String>,
        #[arg(long)]
        right: Option<String>,
    },
    /// Add a document to the corpus.
    Add {
        /// Input file, or `-` for standard input.
        input: PathBuf,
        #[arg(long, default_value = "")]
        title: String,
    },
    /// List corpus documents.
    List,
    /// Annotate a document: every token with `--auto`, or one token.
    Annotate {
        doc_id: String,
        #[arg(long, conflicts_with_all = ["sent", "tok", "tag"])]
        auto: bool,
        #[arg(long, requires_all = ["tok", "tag"])]
        sent: Option<usize>,
        #[arg(long)]
        tok: Option<usize>,
        #[arg(long)]
        tag: Option<String>,
        #[arg(long, default_value = "cli")]
        annotator: String,
    },
    /// Import a CoNLL-U file as a new document.
    Import {
        input: PathBuf,
        /// Store unresolvable XPOS values as UNK instead of failing.
        #[arg(long)]
        unknown_as_unk: bool,
    },
    /// Write a document as CoNLL-U to standard output.
    Export {
        doc_id: String,
        #[arg(long, default_value = "strict")]
        mode: UdMode,
    },
    /// Tag distribution over current annotations.
    Stats {
        #[arg(long)]
        json: bool,
    },
    /// Check a CoNLL-U file against the export format.
    Validate {
        input: PathBuf,
        #[arg(long, default_value = "strict")]
        mode: UdMode,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum TagsetAction {
    /// One line per tag.
    List,
    /// Details of one tag; aliases are accepted.
    Show { tag: String },
    /// The category tree.
    Tree {
        #[arg(long, default_value = "paper")]
        mode: UdMode,
    },
    /// Reference table as TSV.
    Export,
}

/// A failure classified by exit code.
#[derive(Debug)]
enum Failure {
    User(String),
    Internal(String),
    /// The reader of standard output went away.
    Closed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Storage { .. } | Error::CorruptRecord { .. } => Failure::Internal(e.to_string()),
            e => Failure::User(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Internal(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

/// Run the CLI and return the process exit code: 0 on success, 1 on user
/// error, 2 on internal error.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli, out, err).and_then(|_| out.flush().map_err(Failure::from)) {
        Ok(()) | Err(Failure::Closed) => 0,
        Err(Failure::User(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            2
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| Failure::User(format!("{}: {e}", path.display())))
    }
}

fn suggester(args: &ResourceArgs) -> Result<Suggester, Failure> {
    Ok(load_resources(
        args.lexicon.as_deref(),
        args.affixes.as_deref(),
        args.rules.as_deref(),
    )?)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let registry = TagRegistry::shared();
    match cli.command {
        Command::Tagset { action } => tagset(action, registry, out),
        Command::Tokenize { input } => {
            let nt = normalize_bytes(&read_input(&input)?);
            for w in &nt.warnings {
                writeln!(err, "warning: {w}")?;
            }
            for t in tokenize(&nt) {
                writeln!(out, "{}\t{}\t{}\t{}\t{}", t.index, t.start, t.end, t.kind.as_str(), t.surface)?;
            }
            Ok(())
        }
        Command::Segment { token, max } => {
            let s = suggester(&cli.resources)?;
            for (rank, seg) in s.morphology.segment(&Token::word(&token), max).iter().enumerate() {
                writeln!(out, "{}\t{seg}", rank + 1)?;
                for w in &seg.warnings {
                    writeln!(err, "warning: {w}")?;
                }
            }
            Ok(())
        }
        Command::Suggest { token, left, right } => {
            let s = suggester(&cli.resources)?;
            let left = left.map(|l| Token::word(&l));
            let right = right.map(|r| Token::word(&r));
            let ctx = Context::new(left.as_ref(), right.as_ref());
            for (rank, t) in s.suggest(&Token::word(&token), ctx).iter().enumerate() {
                writeln!(out, "{}\t{}\t{:.3}\t{}\t{}", rank + 1, t.tag, t.score, t.rule_id, t.explanation)?;
            }
            Ok(())
        }
        Command::Add { input, title } => {
            let bytes = read_input(&input)?;
            let text = String::from_utf8(bytes)
                .map_err(|e| Failure::User(format!("{}: {e}", input.display())))?;
            let doc = Corpus::open(&cli.corpus)?.create_document(&text, &title)?;
            writeln!(out, "{}\t{}\t{}", doc.id, doc.sentences.len(), doc.token_count())?;
            Ok(())
        }
        Command::List => {
            for e in Corpus::open(&cli.corpus)?.list() {
                writeln!(out, "{}\t{}\t{}\t{}", e.id, e.sentences, e.tokens, e.title)?;
            }
            Ok(())
        }
        Command::Annotate {
            doc_id,
            auto,
            sent,
            tok,
            tag,
            annotator,
        } => {
            let corpus = Corpus::open(&cli.corpus)?;
            if auto {
                let anns = corpus.auto_annotate(&doc_id, &suggester(&cli.resources)?, &annotator)?;
                writeln!(out, "{} tokens annotated", anns.len())?;
                return Ok(());
            }
            let (Some(sent), Some(tok), Some(tag)) = (sent, tok, tag) else {
                return Err(Failure::User("give --auto or --sent, --tok and --tag".into()));
            };
            let a = corpus.record_annotation(NewAnnotation {
                doc_id,
                sentence_index: sent,
                token_index: tok,
                tag,
                provenance: Provenance::Human,
                annotator,
                score: None,
            })?;
            writeln!(out, "{}\t{}\t{}\t{}", a.sentence_index, a.token_index, a.tag, a.provenance)?;
            Ok(())
        }
        Command::Import {
            input,
            unknown_as_unk,
        } => {
            let policy = if unknown_as_unk {
                UnknownTagPolicy::ImportAsUnk
            } else {
                UnknownTagPolicy::Reject
            };
            let doc = Corpus::open(&cli.corpus)?.import_conllu(&read_input(&input)?, policy)?;
            writeln!(out, "{}\t{}\t{}", doc.id, doc.sentences.len(), doc.token_count())?;
            Ok(())
        }
        Command::Export { doc_id, mode } => {
            let corpus = Corpus::open(&cli.corpus)?;
            let s = suggester(&cli.resources)?;
            out.write_all(&corpus.export_conllu(&doc_id, mode, Some(&s.morphology))?)?;
            Ok(())
        }
        Command::Stats { json } => {
            let dist = Corpus::open(&cli.corpus)?.stats()?;
            if json {
                serde_json::to_writer_pretty(&mut *out, &dist)
                    .map_err(|e| Failure::Internal(e.to_string()))?;
                writeln!(out)?;
                return Ok(());
            }
            writeln!(out, "total\t{}", dist.total)?;
            for c in TagCategory::ALL {
                writeln!(out, "{}\t{}", c.name(), dist.categories.get(&c).copied().unwrap_or(0))?;
                for t in registry.tags_in_category(c) {
                    if let Some(n) = dist.counts.get(&t.abbrev) {
                        writeln!(out, "  {}\t{n}", t.abbrev)?;
                    }
                }
            }
            Ok(())
        }
        Command::Validate { input, mode } => {
            let issues = conllu::validate(&read_input(&input)?, mode, registry);
            for i in &issues {
                writeln!(out, "line {}: {}", i.line, i.message)?;
            }
            if issues.is_empty() {
                Ok(())
            } else {
                Err(Failure::User(format!("{} problem(s) found", issues.len())))
            }
        }
        Command::Serve { config } => {
            let config = match config {
                Some(path) => ServiceConfig::from_file(&path)?,
                None => ServiceConfig {
                    corpus_dir: cli.corpus,
                    lexicon: cli.resources.lexicon,
                    affixes: cli.resources.affixes,
                    rules: cli.resources.rules,
                    ..ServiceConfig::default()
                },
            };
            config.validate()?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(config))
                .map_err(|e| Failure::Internal(e.to_string()))
        }
    }
}

fn tagset(action: TagsetAction, registry: &TagRegistry, out: &mut dyn Write) -> CliResult {
    match action {
        TagsetAction::List => {
            for t in registry.tags() {
                writeln!(out, "{}\t{}\t{}", t.abbrev, t.category, t.english_name)?;
            }
        }
        TagsetAction::Show { tag } => {
            let t = registry.lookup(&tag, true)?;
            writeln!(out, "abbrev\t{}", t.abbrev)?;
            writeln!(out, "english\t{}", t.english_name)?;
            writeln!(out, "kurdish\t{}", t.kurdish_name)?;
            writeln!(out, "category\t{}", t.category)?;
            writeln!(out, "ud\t{}", t.ud_upos.label(UdMode::PaperLiteral))?;
            writeln!(out, "ud_strict\t{}", t.ud_upos.label(UdMode::StrictUd))?;
            writeln!(out, "table_index\t{}", t.table_index)?;
            if t.needs_review {
                writeln!(out, "note\tKurdish name awaits review")?;
            }
        }
        TagsetAction::Tree { mode } => out.write_all(registry.category_tree().render(mode).as_bytes())?,
        TagsetAction::Export => registry.write_reference_table(&mut *out)?,
    }
    Ok(())
}
