//! Project configuration and access to the data directory.
//!
//! A data directory holds `<prep>.senses.tsv`, `<prep>.tags.tsv`, the
//! category lexicon `categories.tsv` and the gloss table `definitions.tsv`.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::net::{SocketAddr, ToSocketAddrs};
use std::path::{Path, PathBuf};

use prepwb_core::disambig::{oracle_from_lexicon, LexiconOracle};
use prepwb_core::inventory::{load_inventory, save_inventory};
use prepwb_core::network::{read_definitions, DefinitionRef};
use prepwb_core::tagging::{read_tags, write_tags};
use prepwb_core::{Inventory, PrepositionList, TagSet, TsvError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8470";
pub const LEXICON_FILE: &str = "categories.tsv";
pub const DEFINITIONS_FILE: &str = "definitions.tsv";
pub const PREPOSITIONS_FILE: &str = "prepositions.txt";
const SENSES_SUFFIX: &str = ".senses.tsv";
const TAGS_SUFFIX: &str = ".tags.tsv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub corpus_root: PathBuf,
    pub data_dir: PathBuf,
    #[serde(default = "default_listen")]
    pub listen_address: String,
    pub preposition_list_file: PathBuf,
}

fn default_listen() -> String {
    DEFAULT_LISTEN.to_string()
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{what} {} does not exist", path.display())]
    Missing { what: &'static str, path: PathBuf },
    #[error("listen address {0:?} is not a host:port pair")]
    Listen(String),
}

impl ProjectConfig {
    /// Reads a TOML project file. Relative paths are taken relative to the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let src = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&src, base).map_err(|message| ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn from_toml(src: &str, base: &Path) -> Result<Self, String> {
        let mut cfg: ProjectConfig = toml::from_str(src).map_err(|e| e.message().to_string())?;
        for p in [&mut cfg.corpus_root, &mut cfg.data_dir, &mut cfg.preposition_list_file] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<SocketAddr, ConfigError> {
        for (what, path, dir) in [
            ("corpus root", &self.corpus_root, true),
            ("data directory", &self.data_dir, true),
            ("preposition list", &self.preposition_list_file, false),
        ] {
            let ok = if dir { path.is_dir() } else { path.is_file() };
            if !ok {
                return Err(ConfigError::Missing {
                    what,
                    path: path.clone(),
                });
            }
        }
        self.listen_address
            .to_socket_addrs()
            .ok()
            .and_then(|mut a| a.next())
            .ok_or_else(|| ConfigError::Listen(self.listen_address.clone()))
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Table { path: PathBuf, source: TsvError },
    #[error("no sense inventory for {0:?}")]
    UnknownPreposition(String),
}

/// Typed access to the files of a data directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn senses_path(&self, prep: &str) -> PathBuf {
        self.root.join(format!("{prep}{SENSES_SUFFIX}"))
    }

    pub fn tags_path(&self, prep: &str) -> PathBuf {
        self.root.join(format!("{prep}{TAGS_SUFFIX}"))
    }

    /// Prepositions with a sense inventory, sorted.
    pub fn prepositions(&self) -> Result<Vec<String>, DataError> {
        let entries = fs::read_dir(&self.root).map_err(|source| DataError::Io {
            path: self.root.clone(),
            source,
        })?;
        let mut out: Vec<String> = entries
            .filter_map(Result::ok)
            .filter_map(|e| e.file_name().to_str()?.strip_suffix(SENSES_SUFFIX).map(str::to_string))
            .filter(|p| !p.is_empty())
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn inventory(&self, prep: &str) -> Result<Inventory, DataError> {
        let path = self.senses_path(prep);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(DataError::UnknownPreposition(prep.into())),
            Err(source) => return Err(DataError::Io { path, source }),
        };
        load_inventory(BufReader::new(file), prep).map_err(|source| DataError::Table { path, source })
    }

    /// The tag set for `prep`; empty when no tag file exists yet.
    pub fn tags(&self, prep: &str) -> Result<TagSet, DataError> {
        let path = self.tags_path(prep);
        match File::open(&path) {
            Ok(f) => read_tags(BufReader::new(f), prep).map_err(|source| DataError::Table { path, source }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(TagSet::new(prep)),
            Err(source) => Err(DataError::Io { path, source }),
        }
    }

    pub fn lexicon(&self, path: Option<&Path>) -> Result<LexiconOracle, DataError> {
        let path = path.map_or_else(|| self.root.join(LEXICON_FILE), Path::to_path_buf);
        let file = File::open(&path).map_err(|source| DataError::Io {
            path: path.clone(),
            source,
        })?;
        oracle_from_lexicon(BufReader::new(file)).map_err(|source| DataError::Table { path, source })
    }

    /// The lexicon if present, else an empty one.
    pub fn lexicon_or_empty(&self) -> Result<LexiconOracle, DataError> {
        if self.root.join(LEXICON_FILE).exists() {
            self.lexicon(None)
        } else {
            Ok(LexiconOracle::new())
        }
    }

    pub fn definitions(&self, path: Option<&Path>) -> Result<Vec<DefinitionRef>, DataError> {
        let path = path.map_or_else(|| self.root.join(DEFINITIONS_FILE), Path::to_path_buf);
        let file = File::open(&path).map_err(|source| DataError::Io {
            path: path.clone(),
            source,
        })?;
        read_definitions(BufReader::new(file)).map_err(|source| DataError::Table { path, source })
    }

    pub fn save_inventory(&self, inv: &Inventory) -> Result<(), DataError> {
        let mut buf = Vec::new();
        save_inventory(inv, &mut buf).expect("writing to memory");
        write_atomic(&self.senses_path(inv.preposition()), &buf)
    }

    pub fn save_tags(&self, tags: &TagSet) -> Result<(), DataError> {
        let mut buf = Vec::new();
        write_tags(tags, &mut buf).expect("writing to memory");
        write_atomic(&self.tags_path(&tags.preposition), &buf)
    }
}

pub fn load_preposition_list(path: &Path) -> Result<PrepositionList, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    PrepositionList::from_reader(BufReader::new(file)).map_err(|source| DataError::Table {
        path: path.to_path_buf(),
        source,
    })
}

/// Replaces `path` with `bytes` through a synced temporary file and a
/// rename, then syncs the directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataError> {
    let io_err = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("data");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        #[cfg(unix)]
        File::open(dir)?.sync_all()?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err)
}
