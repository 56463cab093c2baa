use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use ckl_pos::morphology::{load_affix_table, load_lexicon, AffixTable, Morphology, RootLexicon, SegmentConfig};
use ckl_pos::suggestion::{load_rules, RuleSet, Suggester};
use ckl_pos::{Error, TagRegistry, UdMode};
use serde::Deserialize;

/// Service settings read from a TOML file. Relative paths are resolved
/// against the directory holding the file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen: String,
    #[serde(default = "default_corpus")]
    pub corpus_dir: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub affixes: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    #[serde(default = "default_mode")]
    pub ud_mode: String,
    pub static_dir: Option<PathBuf>,
    #[serde(default)]
    pub segmentation: Option<SegmentConfig>,
}

fn default_listen() -> String {
    "127.0.0.1:8080".to_string()
}

fn default_corpus() -> PathBuf {
    PathBuf::from("corpus")
}

fn default_mode() -> String {
    "strict".to_string()
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: default_listen(),
            corpus_dir: default_corpus(),
            lexicon: None,
            affixes: None,
            rules: None,
            ud_mode: default_mode(),
            static_dir: None,
            segmentation: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_file(path: &Path) -> Result<ServiceConfig, Error> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config: ServiceConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.corpus_dir = base.join(&config.corpus_dir);
        for p in [&mut config.lexicon, &mut config.affixes, &mut config.rules, &mut config.static_dir]
            .into_iter()
            .flatten()
        {
            *p = base.join(&*p);
        }
        Ok(config)
    }

    pub fn listen_addr(&self) -> Result<SocketAddr, Error> {
        self.listen
            .parse()
            .map_err(|e| Error::Config(format!("listen address `{}`: {e}", self.listen)))
    }

    pub fn mode(&self) -> Result<UdMode, Error> {
        self.ud_mode.parse().map_err(Error::Config)
    }

    /// Check addresses and paths before anything is started.
    pub fn validate(&self) -> Result<(), Error> {
        self.listen_addr()?;
        self.mode()?;
        for p in [&self.lexicon, &self.affixes, &self.rules].into_iter().flatten() {
            fs::File::open(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
        }
        if let Some(dir) = &self.static_dir {
            if !dir.is_dir() {
                return Err(Error::Config(format!("static dir {} not found", dir.display())));
            }
        }
        Ok(())
    }

    pub fn resources(&self) -> Result<Suggester, Error> {
        let mut suggester = load_resources(
            self.lexicon.as_deref(),
            self.affixes.as_deref(),
            self.rules.as_deref(),
        )?;
        if let Some(seg) = self.segmentation {
            suggester.morphology.config = seg;
        }
        Ok(suggester)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Seed morphology and default rules, with optional replacement lexicon and
/// affix files and extra rules appended to the defaults.
pub fn load_resources(
    lexicon: Option<&Path>,
    affixes: Option<&Path>,
    rules: Option<&Path>,
) -> Result<Suggester, Error> {
    let registry = TagRegistry::shared();
    let name = |p: &Path| p.display().to_string();
    let lexicon = match lexicon {
        Some(p) => load_lexicon(&read(p)?, &name(p), registry)?,
        None => RootLexicon::seed(),
    };
    let affixes = match affixes {
        Some(p) => load_affix_table(&read(p)?, &name(p), registry)?,
        None => AffixTable::seed(),
    };
    let mut ruleset = RuleSet::default();
    if let Some(p) = rules {
        ruleset.extend(load_rules(&read(p)?, &name(p), registry)?)?;
    }
    Ok(Suggester::new(ruleset, Morphology::new(lexicon, affixes)))
}
