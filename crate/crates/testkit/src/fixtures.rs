//! Paths to and loaders for the bundled fixture project.

use std::fs::{self, File};
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use prepwb_core::corpus::{load_corpus, Corpus};
use prepwb_core::disambig::{oracle_from_lexicon, AttachmentKind, DisambiguationContext, LexiconOracle};
use prepwb_core::inventory::{load_inventory, Inventory, SenseKey};
use prepwb_core::preps::PrepositionList;
use prepwb_core::tagging::{read_tags, TagSet};

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn corpus_dir(name: &str) -> PathBuf {
    root().join("corpus").join(name)
}

pub fn data(file: &str) -> PathBuf {
    root().join("data").join(file)
}

fn open(file: &str) -> BufReader<File> {
    BufReader::new(File::open(data(file)).unwrap_or_else(|e| panic!("{file}: {e}")))
}

pub fn corpus(name: &str) -> Corpus {
    load_corpus(corpus_dir(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn inventory(prep: &str) -> Inventory {
    load_inventory(open(&format!("{prep}.senses.tsv")), prep).unwrap()
}

pub fn tags(prep: &str) -> TagSet {
    read_tags(open(&format!("{prep}.tags.tsv")), prep).unwrap()
}

pub fn lexicon() -> LexiconOracle {
    oracle_from_lexicon(open("categories.tsv")).unwrap()
}

pub fn prepositions() -> PrepositionList {
    PrepositionList::from_reader(open("prepositions.txt")).unwrap()
}

/// The hand-labeled disambiguation items with their expected top sense.
pub fn gold() -> Vec<(DisambiguationContext, SenseKey)> {
    let src = fs::read_to_string(data("through.gold.tsv")).unwrap();
    src.lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            let ctx = DisambiguationContext {
                preposition: c[0].into(),
                complement_head: c[1].parse().unwrap(),
                attachment_head: c[2].parse().unwrap(),
                attachment_kind: c[3].parse::<AttachmentKind>().unwrap(),
            };
            (ctx, c[4].parse().unwrap())
        })
        .collect()
}

/// Raw (category, lemma, pos) rows of the bundled lexicon.
pub fn lexicon_rows() -> Vec<(String, String, String)> {
    let src = fs::read_to_string(data("categories.tsv")).unwrap();
    src.lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            (c[0].to_string(), c[1].to_string(), c[2].to_string())
        })
        .collect()
}

/// Recursively copies `src` into `dst`, creating directories as needed.
pub fn copy_tree(src: &Path, dst: &Path) -> io::Result<()> {
    fs::create_dir_all(dst)?;
    for entry in fs::read_dir(src)? {
        let entry = entry?;
        let to = dst.join(entry.file_name());
        if entry.file_type()?.is_dir() {
            copy_tree(&entry.path(), &to)?;
        } else {
            fs::copy(entry.path(), to)?;
        }
    }
    Ok(())
}

/// Copies the whole fixture project into `dst`; returns the project file.
pub fn copy_project(dst: &Path) -> PathBuf {
    copy_tree(&root(), dst).expect("copy fixture project");
    dst.join("project.toml")
}
