//! Aggregations over tagged instances and the annotated corpus.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{split_lexical_unit, Corpus, Layer, PartOfSpeech};
use crate::instances::InstanceRecord;
use crate::inventory::{Inventory, SenseKey};
use crate::preps::PrepositionList;
use crate::tagging::TagSet;
use crate::text::words;
use crate::tsv::{self, escape, unescape, TsvError};

pub const EXPANSION_HEADER: &str = "Frame\tFrameElement\tLexicalUnit\tGF\tPT\tPreposition";

/// Placeholder for a GF or PT label missing from an FE span.
pub const MISSING_LABEL: &str = "-";

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("tags refer to unknown instances: {}", .0.join(", "))]
    DanglingIds(Vec<String>),
    #[error("lexical unit {0:?} has no part-of-speech suffix")]
    NoPartOfSpeech(String),
}

/// A `Frame:FrameElement` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FramePair {
    pub frame: String,
    pub frame_element: String,
}

impl FramePair {
    pub fn new(frame: impl Into<String>, frame_element: impl Into<String>) -> Self {
        FramePair {
            frame: frame.into(),
            frame_element: frame_element.into(),
        }
    }
}

impl fmt::Display for FramePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.frame, self.frame_element)
    }
}

impl FromStr for FramePair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((frame, fe)) if !frame.is_empty() && !fe.is_empty() => Ok(FramePair::new(frame, fe)),
            _ => Err(format!("expected Frame:FrameElement, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairBySense {
    pub sense: SenseKey,
    pub pairs: Vec<FramePair>,
}

fn tagged_records<'r>(
    tags: &TagSet,
    records: &'r [InstanceRecord],
) -> Result<Vec<(&'r InstanceRecord, Vec<SenseKey>)>, AnalysisError> {
    let by_id: HashMap<String, &InstanceRecord> = records
        .iter()
        .filter(|r| r.is_taggable())
        .map(|r| (r.instance_id(), r))
        .collect();
    let dangling = tags.dangling_ids(records);
    if !dangling.is_empty() {
        return Err(AnalysisError::DanglingIds(dangling));
    }
    Ok(tags
        .iter()
        .map(|t| (by_id[&t.instance_id], t.sense_keys.clone()))
        .collect())
}

/// The distinct frame/FE pairs of the instances tagged with each sense.
pub fn pairs_by_sense(tags: &TagSet, records: &[InstanceRecord]) -> Result<Vec<PairBySense>, AnalysisError> {
    let mut by_sense: BTreeMap<SenseKey, BTreeSet<FramePair>> = BTreeMap::new();
    for (record, senses) in tagged_records(tags, records)? {
        for sense in senses {
            by_sense
                .entry(sense)
                .or_default()
                .insert(FramePair::new(&record.frame, record.frame_element()));
        }
    }
    Ok(by_sense
        .into_iter()
        .map(|(sense, pairs)| PairBySense {
            sense,
            pairs: pairs.into_iter().collect(),
        })
        .collect())
}

/// For one sense, the lexical units behind each of its frame/FE pairs.
pub fn lexical_units_by_pair(
    tags: &TagSet,
    records: &[InstanceRecord],
    sense: &SenseKey,
) -> Result<BTreeMap<FramePair, Vec<String>>, AnalysisError> {
    let mut map: BTreeMap<FramePair, BTreeSet<String>> = BTreeMap::new();
    for (record, senses) in tagged_records(tags, records)? {
        if senses.contains(sense) {
            map.entry(FramePair::new(&record.frame, record.frame_element()))
                .or_default()
                .insert(record.lexical_unit.clone());
        }
    }
    Ok(map.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect())
}

/// One distinct way a frame element is realized.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RealizationTuple {
    pub frame: String,
    pub frame_element: String,
    pub lexical_unit: String,
    /// GF label, or the null-instantiation kind (DNI, INI, CNI).
    pub grammatical_function: String,
    /// Absent for null instantiations.
    pub phrase_type: Option<String>,
    /// Present exactly when the phrase type is PP.
    pub preposition: Option<String>,
}

impl RealizationTuple {
    pub fn pair(&self) -> FramePair {
        FramePair::new(&self.frame, &self.frame_element)
    }
}

/// An FE span that could not be fully described.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ExpansionDiagnostic {
    pub lexical_unit: String,
    pub sentence_id: u64,
    pub start: usize,
    pub end: usize,
    pub problem: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Expansion {
    pub tuples: Vec<RealizationTuple>,
    pub diagnostics: Vec<ExpansionDiagnostic>,
}

/// Finds the preposition heading a PP span: the longest known (possibly
/// multiword) preposition at its start, else its first word.
pub fn span_preposition(span_text: &str, preps: &PrepositionList) -> Option<String> {
    let ws = words(span_text);
    if let Some((entry, _)) = preps.longest_prefix(&ws) {
        return Some(entry.to_string());
    }
    ws.into_iter().next()
}

/// Every distinct realization of the seed frame/FE pairs in the corpus,
/// sorted. Null instantiations of a seed FE yield a tuple with the kind as
/// grammatical function and no phrase type.
pub fn expand_realizations(corpus: &Corpus, seeds: &BTreeSet<FramePair>, preps: &PrepositionList) -> Expansion {
    if seeds.is_empty() {
        return Expansion::default();
    }
    let seed_frames: BTreeSet<&str> = seeds.iter().map(|p| p.frame.as_str()).collect();
    let is_seed = |frame: &str, fe: &str| seeds.contains(&FramePair::new(frame, fe));

    let parts: Vec<(BTreeSet<RealizationTuple>, Vec<ExpansionDiagnostic>)> = corpus
        .lexical_units
        .par_iter()
        .filter(|lu| seed_frames.contains(lu.frame.as_str()))
        .map(|lu| {
            let mut tuples = BTreeSet::new();
            let mut diags = Vec::new();
            for s in lu.subcorpora.iter().flat_map(|sc| &sc.sentences) {
                for span in s.fe_spans().iter().filter(|sp| is_seed(&lu.frame, &sp.frame_element)) {
                    let mut label = |layer: Layer| match s.label(layer, span.start, span.end) {
                        Some(l) => l.label.clone(),
                        None => {
                            diags.push(ExpansionDiagnostic {
                                lexical_unit: lu.name.clone(),
                                sentence_id: s.id(),
                                start: span.start,
                                end: span.end,
                                problem: format!("no {} label", layer.as_str()),
                            });
                            MISSING_LABEL.to_string()
                        }
                    };
                    let gf = label(Layer::Gf);
                    let pt = label(Layer::Pt);
                    let preposition = if pt == "PP" {
                        Some(span_preposition(s.slice(span.start, span.end), preps).unwrap_or_else(|| {
                            diags.push(ExpansionDiagnostic {
                                lexical_unit: lu.name.clone(),
                                sentence_id: s.id(),
                                start: span.start,
                                end: span.end,
                                problem: "PP span has no words".into(),
                            });
                            MISSING_LABEL.to_string()
                        }))
                    } else {
                        None
                    };
                    tuples.insert(RealizationTuple {
                        frame: lu.frame.clone(),
                        frame_element: span.frame_element.clone(),
                        lexical_unit: lu.name.clone(),
                        grammatical_function: gf,
                        phrase_type: Some(pt),
                        preposition,
                    });
                }
                for null in s
                    .null_instantiations()
                    .iter()
                    .filter(|n| is_seed(&lu.frame, &n.frame_element))
                {
                    tuples.insert(RealizationTuple {
                        frame: lu.frame.clone(),
                        frame_element: null.frame_element.clone(),
                        lexical_unit: lu.name.clone(),
                        grammatical_function: null.kind.as_str().to_string(),
                        phrase_type: None,
                        preposition: None,
                    });
                }
            }
            (tuples, diags)
        })
        .collect();

    let mut tuples = BTreeSet::new();
    let mut diagnostics = Vec::new();
    for (t, d) in parts {
        tuples.extend(t);
        diagnostics.extend(d);
    }
    diagnostics.sort();
    Expansion {
        tuples: tuples.into_iter().collect(),
        diagnostics,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Substitute {
    pub preposition: String,
    /// Number of distinct tuples using the preposition.
    pub support: usize,
}

/// Other prepositions realizing any of `pairs`, most frequent first, ties
/// alphabetical. `study_prep` itself is left out.
pub fn substitutable_prepositions(tuples: &[RealizationTuple], pairs: &[FramePair], study_prep: &str) -> Vec<Substitute> {
    let wanted: BTreeSet<&FramePair> = pairs.iter().collect();
    let unique: BTreeSet<&RealizationTuple> = tuples.iter().collect();
    let mut support: BTreeMap<&str, usize> = BTreeMap::new();
    for t in unique {
        if let Some(p) = &t.preposition {
            if p != study_prep && p != MISSING_LABEL && wanted.contains(&t.pair()) {
                *support.entry(p).or_insert(0) += 1;
            }
        }
    }
    let mut out: Vec<Substitute> = support
        .into_iter()
        .map(|(p, n)| Substitute {
            preposition: p.to_string(),
            support: n,
        })
        .collect();
    out.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.preposition.cmp(&b.preposition)));
    out
}

/// A (GF, PT) realization variant, or a null instantiation, per part of
/// speech of the lexical unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AlternationPattern {
    pub lexical_unit_pos: PartOfSpeech,
    pub grammatical_function: String,
    pub phrase_type: Option<String>,
    pub support: usize,
}

impl AlternationPattern {
    pub fn label(&self) -> String {
        match &self.phrase_type {
            Some(pt) => format!("{} {}", self.grammatical_function, pt),
            None => self.grammatical_function.clone(),
        }
    }
}

/// Distinct realization patterns grouped by part of speech, with the number
/// of distinct tuples showing each.
pub fn alternation_patterns(tuples: &[RealizationTuple]) -> Result<Vec<AlternationPattern>, AnalysisError> {
    let unique: BTreeSet<&RealizationTuple> = tuples.iter().collect();
    let mut counts: BTreeMap<(PartOfSpeech, &str, Option<&str>), usize> = BTreeMap::new();
    for t in unique {
        let (_, pos) = split_lexical_unit(&t.lexical_unit)
            .ok_or_else(|| AnalysisError::NoPartOfSpeech(t.lexical_unit.clone()))?;
        *counts
            .entry((pos, &t.grammatical_function, t.phrase_type.as_deref()))
            .or_insert(0) += 1;
    }
    Ok(counts
        .into_iter()
        .map(|((pos, gf, pt), support)| AlternationPattern {
            lexical_unit_pos: pos,
            grammatical_function: gf.to_string(),
            phrase_type: pt.map(str::to_string),
            support,
        })
        .collect())
}

pub fn write_expansion<W: Write>(tuples: &[RealizationTuple], mut sink: W) -> io::Result<()> {
    let mut out = String::from(EXPANSION_HEADER);
    out.push('\n');
    for t in tuples {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            escape(&t.frame),
            escape(&t.frame_element),
            escape(&t.lexical_unit),
            escape(&t.grammatical_function),
            escape(t.phrase_type.as_deref().unwrap_or("")),
            escape(t.preposition.as_deref().unwrap_or(""))
        ));
    }
    sink.write_all(out.as_bytes())
}

pub fn read_expansion<R: BufRead>(source: R) -> Result<Vec<RealizationTuple>, TsvError> {
    let lines = tsv::read_lines(source)?;
    let (comments, rows) = tsv::split_table(lines, EXPANSION_HEADER)?;
    if let Some((_, _, line)) = comments.first() {
        return Err(TsvError::row(*line, "expansion files take no comment lines"));
    }
    rows.iter()
        .map(|line| {
            let n = line.number;
            let c = line.cells(6)?;
            let cell = |i: usize| unescape(c[i], n);
            let optional = |i: usize| cell(i).map(|v| (!v.is_empty()).then_some(v));
            let t = RealizationTuple {
                frame: cell(0)?,
                frame_element: cell(1)?,
                lexical_unit: cell(2)?,
                grammatical_function: cell(3)?,
                phrase_type: optional(4)?,
                preposition: optional(5)?,
            };
            if t.frame.is_empty() || t.frame_element.is_empty() || t.lexical_unit.is_empty() || t.grammatical_function.is_empty() {
                return Err(TsvError::row(n, "empty required cell"));
            }
            if t.preposition.is_some() != (t.phrase_type.as_deref() == Some("PP")) {
                return Err(TsvError::row(n, "Preposition must be given exactly when PT is PP"));
            }
            Ok(t)
        })
        .collect()
}

/// `Sense\tRelationName\tPairs`, pairs joined with "; ".
pub fn write_pairs_by_sense<W: Write>(rows: &[PairBySense], inventory: Option<&Inventory>, mut sink: W) -> io::Result<()> {
    let mut out = String::from("Sense\tRelationName\tPairs\n");
    for row in rows {
        let relation = inventory
            .and_then(|inv| inv.get(&row.sense))
            .map_or("", |s| s.fields.relation_name.as_str());
        let pairs: Vec<String> = row.pairs.iter().map(FramePair::to_string).collect();
        out.push_str(&format!("{}\t{}\t{}\n", row.sense, relation, escape(&pairs.join("; "))));
    }
    sink.write_all(out.as_bytes())
}

/// `Pair\tLexicalUnits`, units separated by single spaces.
pub fn write_units_by_pair<W: Write>(map: &BTreeMap<FramePair, Vec<String>>, mut sink: W) -> io::Result<()> {
    let mut out = String::from("Pair\tLexicalUnits\n");
    for (pair, units) in map {
        out.push_str(&format!("{}\t{}\n", escape(&pair.to_string()), escape(&units.join(" "))));
    }
    sink.write_all(out.as_bytes())
}

pub fn write_substitutes<W: Write>(subs: &[Substitute], mut sink: W) -> io::Result<()> {
    let mut out = String::from("Preposition\tSupport\n");
    for s in subs {
        out.push_str(&format!("{}\t{}\n", escape(&s.preposition), s.support));
    }
    sink.write_all(out.as_bytes())
}

pub fn write_patterns<W: Write>(patterns: &[AlternationPattern], mut sink: W) -> io::Result<()> {
    let mut out = String::from("POS\tGF\tPT\tSupport\n");
    for p in patterns {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            p.lexical_unit_pos,
            escape(&p.grammatical_function),
            escape(p.phrase_type.as_deref().unwrap_or("")),
            p.support
        ));
    }
    sink.write_all(out.as_bytes())
}
