//! Reading and writing lexical-unit XML files.
//!
//! ```xml
//! <lexunit name="arrest.v" frame="Arrest">
//!   <subcorpus name="V-730-s20-ppby">
//!     <sentence id="875350">
//!       <text>...</text>
//!       <label layer="FE" name="Authorities" start="43" end="62"/>
//!       <label layer="GF" name="Comp" start="43" end="62"/>
//!       <label layer="PT" name="PP" start="43" end="62"/>
//!     </sentence>
//!   </subcorpus>
//! </lexunit>
//! ```
//!
//! Offsets are 0-based character offsets with exclusive ends. An FE label
//! may carry `itype="DNI|INI|CNI"` instead of offsets to record a null
//! instantiation.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use quick_xml::escape::{escape, partial_escape};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use rayon::prelude::*;
use thiserror::Error;
use walkdir::WalkDir;

use super::{
    is_valid_subcorpus_name, split_lexical_unit, AnnotatedSentence, Corpus, FeSpan, Layer,
    LayerLabel, LexicalUnit, NullInstantiation, NullKind, Subcorpus,
};

/// A schema violation in one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileError {
    pub path: PathBuf,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.path.display(), self.line, self.message)
    }
}

impl std::error::Error for FileError {}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{} malformed lexical-unit file(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<FileError>),
}

/// Result of scanning a corpus directory: the well-formed lexical units plus
/// one error per rejected file.
#[derive(Debug)]
pub struct LoadReport {
    pub corpus: Corpus,
    pub errors: Vec<FileError>,
    pub files_scanned: usize,
}

/// Loads every `*.xml` file under `root` (recursively); any malformed file
/// makes the whole load fail with the full list of per-file errors.
pub fn load_corpus(root: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let report = load_corpus_report(root)?;
    if report.errors.is_empty() {
        Ok(report.corpus)
    } else {
        Err(CorpusError::Invalid(report.errors))
    }
}

pub fn load_corpus_report(root: impl AsRef<Path>) -> Result<LoadReport, CorpusError> {
    let root = root.as_ref();
    let io_err = |path: &Path, source: io::Error| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    if !root.is_dir() {
        return Err(io_err(
            root,
            io::Error::new(io::ErrorKind::NotFound, "corpus root is not a directory"),
        ));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            io_err(&path, e.into())
        })?;
        let is_xml = entry.path().extension().is_some_and(|e| e == "xml");
        if entry.file_type().is_file() && is_xml {
            files.push(entry.into_path());
        }
    }

    let parsed: Vec<Result<LexicalUnit, FileError>> = files
        .par_iter()
        .map(|path| {
            let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
            Ok(match String::from_utf8(bytes) {
                Ok(src) => read_lexical_unit(&src, path),
                Err(_) => Err(FileError {
                    path: path.clone(),
                    line: 1,
                    message: "file is not valid UTF-8".into(),
                }),
            })
        })
        .collect::<Result<_, CorpusError>>()?;

    let mut seen: HashMap<(String, String), PathBuf> = HashMap::new();
    let mut units = Vec::new();
    let mut errors = Vec::new();
    for (path, result) in files.iter().zip(parsed) {
        match result {
            Ok(lu) => {
                let key = (lu.name.clone(), lu.frame.clone());
                if let Some(first) = seen.get(&key) {
                    errors.push(FileError {
                        path: path.clone(),
                        line: 1,
                        message: format!(
                            "duplicate lexical unit {} in frame {} (first defined in {})",
                            key.0,
                            key.1,
                            first.display()
                        ),
                    });
                } else {
                    seen.insert(key, path.clone());
                    units.push(lu);
                }
            }
            Err(e) => errors.push(e),
        }
    }
    Ok(LoadReport {
        corpus: Corpus::new(units, root),
        errors,
        files_scanned: files.len(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Ctx {
    Top,
    LexUnit,
    Subcorpus,
    Sentence,
    Text,
    Label,
    Done,
}

struct SentenceDraft {
    id: u64,
    line: usize,
    text: Option<String>,
    spans: Vec<FeSpan>,
    labels: Vec<LayerLabel>,
    nulls: Vec<NullInstantiation>,
}

struct Parser<'a> {
    src: &'a str,
    path: &'a Path,
}

impl Parser<'_> {
    fn line_at(&self, pos: u64) -> usize {
        let pos = (pos as usize).min(self.src.len());
        self.src.as_bytes()[..pos].iter().filter(|b| **b == b'\n').count() + 1
    }

    fn err(&self, pos: u64, message: impl Into<String>) -> FileError {
        FileError {
            path: self.path.to_path_buf(),
            line: self.line_at(pos),
            message: message.into(),
        }
    }

    fn attrs(&self, e: &BytesStart<'_>, pos: u64) -> Result<HashMap<String, String>, FileError> {
        let mut map = HashMap::new();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| self.err(pos, format!("bad attribute: {err}")))?;
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = attr
                .unescape_value()
                .map_err(|err| self.err(pos, format!("bad attribute value: {err}")))?
                .into_owned();
            map.insert(key, value);
        }
        Ok(map)
    }
}

fn required<'m>(
    p: &Parser<'_>,
    attrs: &'m HashMap<String, String>,
    element: &str,
    key: &str,
    pos: u64,
) -> Result<&'m str, FileError> {
    match attrs.get(key) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(p.err(pos, format!("<{element}> requires a non-empty {key:?} attribute"))),
    }
}

fn offset(p: &Parser<'_>, attrs: &HashMap<String, String>, key: &str, pos: u64) -> Result<usize, FileError> {
    let raw = required(p, attrs, "label", key, pos)?;
    raw.parse()
        .map_err(|_| p.err(pos, format!("label {key}={raw:?} is not a character offset")))
}

/// Parses one lexical-unit document. `path` is only used in error reports.
pub fn read_lexical_unit(src: &str, path: &Path) -> Result<LexicalUnit, FileError> {
    let p = Parser { src, path };
    let mut reader = Reader::from_str(src);
    let mut ctx = Ctx::Top;
    let mut lu: Option<LexicalUnit> = None;
    let mut subcorpus: Option<Subcorpus> = None;
    let mut sentence: Option<SentenceDraft> = None;

    loop {
        let pos = reader.buffer_position();
        let event = reader
            .read_event()
            .map_err(|e| p.err(reader.error_position(), format!("malformed XML: {e}")))?;
        match event {
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
            Event::Text(t) => {
                let text = t
                    .unescape()
                    .map_err(|e| p.err(pos, format!("bad character data: {e}")))?;
                if ctx == Ctx::Text {
                    let draft = sentence.as_mut().expect("text inside sentence");
                    draft.text.get_or_insert_with(String::new).push_str(&text);
                } else if !text.trim().is_empty() {
                    return Err(p.err(pos, "unexpected character data"));
                }
            }
            Event::CData(c) => {
                if ctx != Ctx::Text {
                    return Err(p.err(pos, "unexpected CDATA section"));
                }
                let text = std::str::from_utf8(&c)
                    .map_err(|_| p.err(pos, "CDATA is not valid UTF-8"))?
                    .to_string();
                let draft = sentence.as_mut().expect("text inside sentence");
                draft.text.get_or_insert_with(String::new).push_str(&text);
            }
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                let attrs = p.attrs(e, pos)?;
                match (ctx, name.as_str()) {
                    (Ctx::Top, "lexunit") => {
                        let lu_name = required(&p, &attrs, "lexunit", "name", pos)?;
                        if split_lexical_unit(lu_name).is_none() {
                            return Err(p.err(
                                pos,
                                format!("lexical unit name {lu_name:?} is not <lemma>.<v|n|a|adv|prep>"),
                            ));
                        }
                        let frame = required(&p, &attrs, "lexunit", "frame", pos)?;
                        lu = Some(LexicalUnit {
                            name: lu_name.to_string(),
                            frame: frame.to_string(),
                            subcorpora: Vec::new(),
                        });
                        ctx = if empty { Ctx::Done } else { Ctx::LexUnit };
                    }
                    (Ctx::LexUnit, "subcorpus") => {
                        let sc_name = required(&p, &attrs, "subcorpus", "name", pos)?;
                        if !is_valid_subcorpus_name(sc_name) {
                            return Err(p.err(pos, format!("invalid subcorpus name {sc_name:?}")));
                        }
                        let sc = Subcorpus {
                            name: sc_name.to_string(),
                            sentences: Vec::new(),
                        };
                        if empty {
                            lu.as_mut().expect("inside lexunit").subcorpora.push(sc);
                        } else {
                            subcorpus = Some(sc);
                            ctx = Ctx::Subcorpus;
                        }
                    }
                    (Ctx::Subcorpus, "sentence") => {
                        let raw = required(&p, &attrs, "sentence", "id", pos)?;
                        let id = raw
                            .parse()
                            .map_err(|_| p.err(pos, format!("sentence id {raw:?} is not an integer")))?;
                        if empty {
                            return Err(p.err(pos, "sentence without <text>"));
                        }
                        sentence = Some(SentenceDraft {
                            id,
                            line: p.line_at(pos),
                            text: None,
                            spans: Vec::new(),
                            labels: Vec::new(),
                            nulls: Vec::new(),
                        });
                        ctx = Ctx::Sentence;
                    }
                    (Ctx::Sentence, "text") => {
                        let draft = sentence.as_mut().expect("inside sentence");
                        if draft.text.is_some() {
                            return Err(p.err(pos, "sentence has more than one <text>"));
                        }
                        if empty {
                            draft.text = Some(String::new());
                        } else {
                            ctx = Ctx::Text;
                        }
                    }
                    (Ctx::Sentence, "label") => {
                        let draft = sentence.as_mut().expect("inside sentence");
                        read_label(&p, &attrs, pos, draft)?;
                        if !empty {
                            ctx = Ctx::Label;
                        }
                    }
                    (_, other) => {
                        return Err(p.err(pos, format!("unexpected element <{other}>")));
                    }
                }
            }
            Event::End(_) => {
                ctx = match ctx {
                    Ctx::Text => {
                        let draft = sentence.as_mut().expect("inside sentence");
                        draft.text.get_or_insert_with(String::new);
                        Ctx::Sentence
                    }
                    Ctx::Label => Ctx::Sentence,
                    Ctx::Sentence => {
                        let draft = sentence.take().expect("inside sentence");
                        let Some(text) = draft.text else {
                            return Err(FileError {
                                path: path.to_path_buf(),
                                line: draft.line,
                                message: "sentence without <text>".into(),
                            });
                        };
                        let built = AnnotatedSentence::new(draft.id, text, draft.spans, draft.labels, draft.nulls)
                            .map_err(|e| FileError {
                                path: path.to_path_buf(),
                                line: draft.line,
                                message: format!("sentence {}: {e}", draft.id),
                            })?;
                        subcorpus.as_mut().expect("inside subcorpus").sentences.push(built);
                        Ctx::Subcorpus
                    }
                    Ctx::Subcorpus => {
                        let sc = subcorpus.take().expect("inside subcorpus");
                        lu.as_mut().expect("inside lexunit").subcorpora.push(sc);
                        Ctx::LexUnit
                    }
                    Ctx::LexUnit => Ctx::Done,
                    Ctx::Top | Ctx::Done => return Err(p.err(pos, "unbalanced end tag")),
                };
            }
        }
    }
    match (ctx, lu) {
        (Ctx::Done, Some(lu)) => Ok(lu),
        (Ctx::Top, _) => Err(p.err(0, "no <lexunit> element")),
        _ => Err(p.err(src.len() as u64, "unexpected end of file")),
    }
}

fn read_label(
    p: &Parser<'_>,
    attrs: &HashMap<String, String>,
    pos: u64,
    draft: &mut SentenceDraft,
) -> Result<(), FileError> {
    let layer = required(p, attrs, "label", "layer", pos)?;
    let name = required(p, attrs, "label", "name", pos)?.to_string();
    match (layer, attrs.get("itype")) {
        ("FE", Some(itype)) => {
            if attrs.contains_key("start") || attrs.contains_key("end") {
                return Err(p.err(pos, "null-instantiated FE label must not carry offsets"));
            }
            let kind = NullKind::parse(itype)
                .ok_or_else(|| p.err(pos, format!("unknown itype {itype:?}")))?;
            draft.nulls.push(NullInstantiation {
                frame_element: name,
                kind,
            });
        }
        ("FE", None) => {
            let start = offset(p, attrs, "start", pos)?;
            let end = offset(p, attrs, "end", pos)?;
            draft.spans.push(FeSpan {
                frame_element: name,
                start,
                end,
            });
        }
        ("GF" | "PT", Some(_)) => return Err(p.err(pos, "itype is only allowed on FE labels")),
        ("GF" | "PT", None) => {
            let start = offset(p, attrs, "start", pos)?;
            let end = offset(p, attrs, "end", pos)?;
            draft.labels.push(LayerLabel {
                layer: if layer == "GF" { Layer::Gf } else { Layer::Pt },
                label: name,
                start,
                end,
            });
        }
        (other, _) => return Err(p.err(pos, format!("unknown layer {other:?}"))),
    }
    Ok(())
}

/// Serializes a lexical unit in the format [`read_lexical_unit`] accepts.
pub fn write_lexical_unit<W: Write>(lu: &LexicalUnit, mut out: W) -> io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<lexunit name="{}" frame="{}">"#,
        escape(&lu.name),
        escape(&lu.frame)
    )?;
    for sc in &lu.subcorpora {
        writeln!(out, r#"  <subcorpus name="{}">"#, escape(&sc.name))?;
        for s in &sc.sentences {
            writeln!(out, r#"    <sentence id="{}">"#, s.id())?;
            writeln!(out, "      <text>{}</text>", partial_escape(s.text()))?;
            for span in s.fe_spans() {
                writeln!(
                    out,
                    r#"      <label layer="FE" name="{}" start="{}" end="{}"/>"#,
                    escape(&span.frame_element),
                    span.start,
                    span.end
                )?;
            }
            for null in s.null_instantiations() {
                writeln!(
                    out,
                    r#"      <label layer="FE" name="{}" itype="{}"/>"#,
                    escape(&null.frame_element),
                    null.kind.as_str()
                )?;
            }
            for layer in [Layer::Gf, Layer::Pt] {
                for label in s.layer_labels().iter().filter(|l| l.layer == layer) {
                    writeln!(
                        out,
                        r#"      <label layer="{}" name="{}" start="{}" end="{}"/>"#,
                        layer.as_str(),
                        escape(&label.label),
                        label.start,
                        label.end
                    )?;
                }
            }
            writeln!(out, "    </sentence>")?;
        }
        writeln!(out, "  </subcorpus>")?;
    }
    writeln!(out, "</lexunit>")
}

/// Writes one file per lexical unit into `dir` (created if missing).
pub fn write_corpus(corpus: &Corpus, dir: impl AsRef<Path>) -> io::Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let sanitize = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
            .collect()
    };
    let mut written = Vec::with_capacity(corpus.lexical_units.len());
    for (i, lu) in corpus.lexical_units.iter().enumerate() {
        let mut path = dir.join(format!("{}.{}.xml", sanitize(&lu.name), sanitize(&lu.frame)));
        if written.contains(&path) {
            path = dir.join(format!("{}.{}.{i}.xml", sanitize(&lu.name), sanitize(&lu.frame)));
        }
        let mut buf = Vec::new();
        write_lexical_unit(lu, &mut buf)?;
        fs::write(&path, buf)?;
        written.push(path);
    }
    Ok(written)
}
