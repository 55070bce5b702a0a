//! FrameNet-style corpus model.
//!
//! A corpus is a directory of lexical-unit XML files. Each lexical unit holds
//! named subcorpora of annotated sentences; annotation comes as frame-element
//! spans plus grammatical-function (GF) and phrase-type (PT) layer labels.

mod xml;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::text::{char_len, char_slice};

pub use xml::{
    load_corpus, load_corpus_report, read_lexical_unit, write_corpus, write_lexical_unit,
    CorpusError, FileError, LoadReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corpus {
    /// Sorted by (name, frame); each pair occurs once.
    pub lexical_units: Vec<LexicalUnit>,
    pub source_root: PathBuf,
}

impl Corpus {
    pub fn new(mut lexical_units: Vec<LexicalUnit>, source_root: impl Into<PathBuf>) -> Self {
        lexical_units.sort_by(|a, b| (&a.name, &a.frame).cmp(&(&b.name, &b.frame)));
        Corpus {
            lexical_units,
            source_root: source_root.into(),
        }
    }

    pub fn sentence_count(&self) -> usize {
        self.lexical_units
            .iter()
            .flat_map(|lu| &lu.subcorpora)
            .map(|sc| sc.sentences.len())
            .sum()
    }

    /// Every (lexical unit, subcorpus, sentence) triple.
    pub fn sentences(&self) -> impl Iterator<Item = (&LexicalUnit, &Subcorpus, &AnnotatedSentence)> {
        self.lexical_units.iter().flat_map(|lu| {
            lu.subcorpora
                .iter()
                .flat_map(move |sc| sc.sentences.iter().map(move |s| (lu, sc, s)))
        })
    }

    pub fn find_sentence(&self, id: u64) -> Option<(&LexicalUnit, &Subcorpus, &AnnotatedSentence)> {
        self.sentences().find(|(_, _, s)| s.id() == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartOfSpeech {
    V,
    N,
    A,
    Adv,
    Prep,
}

impl PartOfSpeech {
    pub fn as_str(self) -> &'static str {
        match self {
            PartOfSpeech::V => "v",
            PartOfSpeech::N => "n",
            PartOfSpeech::A => "a",
            PartOfSpeech::Adv => "adv",
            PartOfSpeech::Prep => "prep",
        }
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartOfSpeech {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "v" => PartOfSpeech::V,
            "n" => PartOfSpeech::N,
            "a" => PartOfSpeech::A,
            "adv" => PartOfSpeech::Adv,
            "prep" => PartOfSpeech::Prep,
            other => return Err(format!("unknown part of speech {other:?}")),
        })
    }
}

/// Splits a `lemma.pos` name at its last dot.
pub fn split_lexical_unit(name: &str) -> Option<(&str, PartOfSpeech)> {
    let (lemma, pos) = name.rsplit_once('.')?;
    if lemma.is_empty() {
        return None;
    }
    Some((lemma, pos.parse().ok()?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexicalUnit {
    /// `<lemma>.<pos>`, e.g. "arrest.v".
    pub name: String,
    pub frame: String,
    pub subcorpora: Vec<Subcorpus>,
}

impl LexicalUnit {
    pub fn lemma(&self) -> Option<&str> {
        split_lexical_unit(&self.name).map(|(l, _)| l)
    }

    pub fn pos(&self) -> Option<PartOfSpeech> {
        split_lexical_unit(&self.name).map(|(_, p)| p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subcorpus {
    pub name: String,
    pub sentences: Vec<AnnotatedSentence>,
}

impl Subcorpus {
    pub fn descriptor(&self) -> SubcorpusDescriptor {
        parse_subcorpus_name(&self.name)
    }
}

/// Subcorpus names are hyphen-separated tokens of ASCII letters and digits.
pub fn is_valid_subcorpus_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .split('-')
            .all(|t| !t.is_empty() && t.chars().all(|c| c.is_ascii_alphanumeric()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubcorpusDescriptor {
    pub raw_name: String,
    pub target_preposition: Option<String>,
    /// Index of the pp-token among all tokens, when present.
    pub target_position: Option<usize>,
    pub other_tokens: Vec<String>,
}

impl SubcorpusDescriptor {
    /// Reassembles the original name from its parts.
    pub fn to_name(&self) -> String {
        let mut tokens = self.other_tokens.clone();
        if let (Some(prep), Some(pos)) = (&self.target_preposition, self.target_position) {
            tokens.insert(pos, format!("pp{prep}"));
        }
        tokens.join("-")
    }
}

/// Decodes a subcorpus name such as "V-570-s20-np-ppby".
///
/// The last token of the form `pp<letters>` names the target preposition; the
/// remaining tokens are kept uninterpreted.
pub fn parse_subcorpus_name(name: &str) -> SubcorpusDescriptor {
    let tokens: Vec<&str> = name.split('-').collect();
    let target = tokens.iter().rposition(|t| {
        t.strip_prefix("pp")
            .is_some_and(|tail| !tail.is_empty() && tail.chars().all(|c| c.is_ascii_lowercase()))
    });
    SubcorpusDescriptor {
        raw_name: name.to_string(),
        target_preposition: target.map(|i| tokens[i][2..].to_string()),
        target_position: target,
        other_tokens: tokens
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != target)
            .map(|(_, t)| t.to_string())
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FeSpan {
    pub frame_element: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Layer {
    #[serde(rename = "GF")]
    Gf,
    #[serde(rename = "PT")]
    Pt,
}

impl Layer {
    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Gf => "GF",
            Layer::Pt => "PT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LayerLabel {
    pub layer: Layer,
    pub label: String,
    pub start: usize,
    pub end: usize,
}

/// Kinds of null instantiation recorded for an unexpressed frame element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NullKind {
    #[serde(rename = "DNI")]
    Definite,
    #[serde(rename = "INI")]
    Indefinite,
    #[serde(rename = "CNI")]
    Constructional,
}

impl NullKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NullKind::Definite => "DNI",
            NullKind::Indefinite => "INI",
            NullKind::Constructional => "CNI",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "DNI" => Some(NullKind::Definite),
            "INI" => Some(NullKind::Indefinite),
            "CNI" => Some(NullKind::Constructional),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NullInstantiation {
    pub frame_element: String,
    pub kind: NullKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SentenceError {
    #[error("span {start}..{end} out of bounds for text of length {len}")]
    OutOfBounds { start: usize, end: usize, len: usize },
    #[error("empty frame element name")]
    EmptyFrameElement,
    #[error("two frame-element spans start at offset {0}")]
    DuplicateStart(usize),
}

/// A sentence with its frame-element spans (sorted by start, at most one per
/// start offset) and GF/PT layer labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotatedSentence {
    id: u64,
    text: String,
    fe_spans: Vec<FeSpan>,
    layer_labels: Vec<LayerLabel>,
    null_instantiations: Vec<NullInstantiation>,
}

impl AnnotatedSentence {
    pub fn new(
        id: u64,
        text: impl Into<String>,
        mut fe_spans: Vec<FeSpan>,
        mut layer_labels: Vec<LayerLabel>,
        null_instantiations: Vec<NullInstantiation>,
    ) -> Result<Self, SentenceError> {
        let text = text.into();
        let len = char_len(&text);
        let in_bounds = |start: usize, end: usize| {
            if start < end && end <= len {
                Ok(())
            } else {
                Err(SentenceError::OutOfBounds { start, end, len })
            }
        };
        for span in &fe_spans {
            in_bounds(span.start, span.end)?;
            if span.frame_element.is_empty() {
                return Err(SentenceError::EmptyFrameElement);
            }
        }
        for label in &layer_labels {
            in_bounds(label.start, label.end)?;
        }
        if null_instantiations.iter().any(|n| n.frame_element.is_empty()) {
            return Err(SentenceError::EmptyFrameElement);
        }
        fe_spans.sort_by_key(|s| s.start);
        layer_labels.sort_by(|a, b| (a.layer, a.start, a.end).cmp(&(b.layer, b.start, b.end)));
        if let Some(w) = fe_spans.windows(2).find(|w| w[0].start == w[1].start) {
            return Err(SentenceError::DuplicateStart(w[0].start));
        }
        Ok(AnnotatedSentence {
            id,
            text,
            fe_spans,
            layer_labels,
            null_instantiations,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn fe_spans(&self) -> &[FeSpan] {
        &self.fe_spans
    }

    pub fn layer_labels(&self) -> &[LayerLabel] {
        &self.layer_labels
    }

    pub fn null_instantiations(&self) -> &[NullInstantiation] {
        &self.null_instantiations
    }

    /// Text covered by a character range.
    pub fn slice(&self, start: usize, end: usize) -> &str {
        char_slice(&self.text, start, end)
    }

    /// The frame-element span starting exactly at `offset`.
    pub fn frame_element_at(&self, offset: usize) -> Option<&FeSpan> {
        self.fe_spans
            .binary_search_by_key(&offset, |s| s.start)
            .ok()
            .map(|i| &self.fe_spans[i])
    }

    /// The label on `layer` that is co-extensive with `start..end`.
    pub fn label(&self, layer: Layer, start: usize, end: usize) -> Option<&LayerLabel> {
        self.layer_labels
            .iter()
            .find(|l| l.layer == layer && l.start == start && l.end == end)
    }
}

/// Free-function form of [`AnnotatedSentence::frame_element_at`].
pub fn frame_element_at(sentence: &AnnotatedSentence, offset: usize) -> Option<&FeSpan> {
    sentence.frame_element_at(offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(fe: &str, start: usize, end: usize) -> FeSpan {
        FeSpan {
            frame_element: fe.into(),
            start,
            end,
        }
    }

    #[test]
    fn subcorpus_name_with_pp_token() {
        let d = parse_subcorpus_name("V-730-s20-ppby");
        assert_eq!(d.target_preposition.as_deref(), Some("by"));
        assert_eq!(d.other_tokens, vec!["V", "730", "s20"]);

        let d = parse_subcorpus_name("V-570-s20-np-ppby");
        assert_eq!(d.target_preposition.as_deref(), Some("by"));
        assert_eq!(d.other_tokens, vec!["V", "570", "s20", "np"]);
        assert_eq!(d.to_name(), "V-570-s20-np-ppby");
    }

    #[test]
    fn subcorpus_name_without_pp_token() {
        let d = parse_subcorpus_name("V-730-s20");
        assert_eq!(d.target_preposition, None);
        assert_eq!(d.other_tokens.len(), 3);
        // "pp" alone and "ppBy" do not name a preposition
        assert_eq!(parse_subcorpus_name("V-pp-ppBy").target_preposition, None);
    }

    #[test]
    fn last_pp_token_wins() {
        let d = parse_subcorpus_name("V-ppin-2-ppto-np");
        assert_eq!(d.target_preposition.as_deref(), Some("to"));
        assert_eq!(d.other_tokens, vec!["V", "ppin", "2", "np"]);
        assert_eq!(d.to_name(), "V-ppin-2-ppto-np");
    }

    #[test]
    fn subcorpus_name_validity() {
        assert!(is_valid_subcorpus_name("V-730-s20-ppby"));
        assert!(!is_valid_subcorpus_name(""));
        assert!(!is_valid_subcorpus_name("V--1"));
        assert!(!is_valid_subcorpus_name("V_1"));
    }

    #[test]
    fn frame_element_lookup() {
        let text = "Three days later the two men were arrested by the local police outside the station.";
        let s = AnnotatedSentence::new(
            875350,
            text,
            vec![span("Authorities", 43, 62), span("Suspect", 17, 28)],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(s.frame_element_at(43).unwrap().frame_element, "Authorities");
        assert_eq!(s.slice(43, 62), "by the local police");
        assert!(s.frame_element_at(44).is_none());
        assert!(frame_element_at(&s, 0).is_none());
    }

    #[test]
    fn sentence_invariants() {
        let bad = AnnotatedSentence::new(1, "abc", vec![span("X", 2, 9)], vec![], vec![]);
        assert!(matches!(bad, Err(SentenceError::OutOfBounds { .. })));
        let empty = AnnotatedSentence::new(1, "abc", vec![span("X", 1, 1)], vec![], vec![]);
        assert!(empty.is_err());
        let dup = AnnotatedSentence::new(1, "abcdef", vec![span("X", 1, 3), span("Y", 1, 5)], vec![], vec![]);
        assert_eq!(dup, Err(SentenceError::DuplicateStart(1)));
        let unnamed = AnnotatedSentence::new(1, "abc", vec![span("", 0, 1)], vec![], vec![]);
        assert_eq!(unnamed, Err(SentenceError::EmptyFrameElement));
    }

    #[test]
    fn lexical_unit_names() {
        assert_eq!(split_lexical_unit("arrest.v"), Some(("arrest", PartOfSpeech::V)));
        assert_eq!(split_lexical_unit("all.over.prep"), Some(("all.over", PartOfSpeech::Prep)));
        assert_eq!(split_lexical_unit("arrest"), None);
        assert_eq!(split_lexical_unit("arrest.x"), None);
        assert_eq!(split_lexical_unit(".v"), None);
    }
}
