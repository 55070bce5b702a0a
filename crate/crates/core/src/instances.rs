//! Per-preposition instance files.

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::corpus::Corpus;
use crate::text::whole_word_occurrences;
use crate::tsv::{self, escape, unescape, TsvError};

/// FrameElement cell written for a matching subcorpus with no instances.
pub const NO_INSTANCES: &str = "No instances";

pub const INSTANCE_HEADER: &str = "Frame\tFrameElement\tLexicalUnit\tSubcorpus\tIdentifier-Position";

/// A preposition occurrence that starts a frame-element span.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub frame_element: String,
    pub sentence_id: u64,
    pub prep_start: usize,
}

/// One line of an instance file. `occurrence` is `None` for the
/// "No instances" row of a subcorpus that yielded nothing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstanceRecord {
    pub frame: String,
    pub lexical_unit: String,
    pub subcorpus: String,
    pub occurrence: Option<Occurrence>,
}

impl InstanceRecord {
    pub fn frame_element(&self) -> &str {
        self.occurrence
            .as_ref()
            .map_or(NO_INSTANCES, |o| o.frame_element.as_str())
    }

    pub fn sentence_id(&self) -> Option<u64> {
        self.occurrence.as_ref().map(|o| o.sentence_id)
    }

    pub fn prep_start(&self) -> Option<usize> {
        self.occurrence.as_ref().map(|o| o.prep_start)
    }

    pub fn is_taggable(&self) -> bool {
        self.occurrence.is_some()
    }

    /// `<sentence_id>-<prep_start>`, or `<lexical_unit>/<subcorpus>#none`.
    pub fn instance_id(&self) -> String {
        match &self.occurrence {
            Some(o) => format!("{}-{}", o.sentence_id, o.prep_start),
            None => format!("{}/{}#none", self.lexical_unit, self.subcorpus),
        }
    }

    fn sort_key(&self) -> (&str, &str, &str, &str, Option<u64>, Option<usize>) {
        (
            &self.frame,
            self.frame_element(),
            &self.lexical_unit,
            &self.subcorpus,
            self.sentence_id(),
            self.prep_start(),
        )
    }
}

impl Ord for InstanceRecord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for InstanceRecord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for InstanceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let position = match &self.occurrence {
            Some(o) => format!("{}-{}", o.sentence_id, o.prep_start),
            None => String::new(),
        };
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            escape(&self.frame),
            escape(self.frame_element()),
            escape(&self.lexical_unit),
            escape(&self.subcorpus),
            position
        )
    }
}

impl Serialize for InstanceRecord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("InstanceRecord", 7)?;
        s.serialize_field("instance_id", &self.instance_id())?;
        s.serialize_field("frame", &self.frame)?;
        s.serialize_field("frame_element", self.frame_element())?;
        s.serialize_field("lexical_unit", &self.lexical_unit)?;
        s.serialize_field("subcorpus", &self.subcorpus)?;
        s.serialize_field("sentence_id", &self.sentence_id())?;
        s.serialize_field("prep_start", &self.prep_start())?;
        s.end()
    }
}

/// Collects every occurrence of `prep` that starts a frame-element span in a
/// subcorpus targeting `prep`, plus one "No instances" row for each such
/// subcorpus that produced nothing. The result is sorted.
pub fn extract_instances(corpus: &Corpus, prep: &str) -> Vec<InstanceRecord> {
    let mut records: Vec<InstanceRecord> = corpus
        .lexical_units
        .par_iter()
        .flat_map_iter(|lu| {
            let mut out = Vec::new();
            for sc in &lu.subcorpora {
                if sc.descriptor().target_preposition.as_deref() != Some(prep) {
                    continue;
                }
                let before = out.len();
                for sentence in &sc.sentences {
                    for start in whole_word_occurrences(sentence.text(), prep) {
                        if let Some(span) = sentence.frame_element_at(start) {
                            out.push(InstanceRecord {
                                frame: lu.frame.clone(),
                                lexical_unit: lu.name.clone(),
                                subcorpus: sc.name.clone(),
                                occurrence: Some(Occurrence {
                                    frame_element: span.frame_element.clone(),
                                    sentence_id: sentence.id(),
                                    prep_start: start,
                                }),
                            });
                        }
                    }
                }
                if out.len() == before {
                    out.push(InstanceRecord {
                        frame: lu.frame.clone(),
                        lexical_unit: lu.name.clone(),
                        subcorpus: sc.name.clone(),
                        occurrence: None,
                    });
                }
            }
            out
        })
        .collect();
    records.sort();
    records
}

/// Writes the header and one line per record; returns the bytes written.
pub fn write_instance_file<W: Write>(records: &[InstanceRecord], mut sink: W) -> io::Result<usize> {
    let mut buf = String::with_capacity(64 * (records.len() + 1));
    buf.push_str(INSTANCE_HEADER);
    buf.push('\n');
    for r in records {
        buf.push_str(&r.to_string());
        buf.push('\n');
    }
    sink.write_all(buf.as_bytes())?;
    Ok(buf.len())
}

pub fn read_instance_file<R: BufRead>(source: R) -> Result<Vec<InstanceRecord>, TsvError> {
    let lines = tsv::read_lines(source)?;
    let (comments, rows) = tsv::split_table(lines, INSTANCE_HEADER)?;
    if let Some((_, _, line)) = comments.first() {
        return Err(TsvError::row(*line, "instance files take no comment lines"));
    }
    rows.iter()
        .map(|line| {
            let cells = line.cells(5)?;
            let n = line.number;
            let frame = unescape(cells[0], n)?;
            let frame_element = unescape(cells[1], n)?;
            let lexical_unit = unescape(cells[2], n)?;
            let subcorpus = unescape(cells[3], n)?;
            if frame.is_empty() || lexical_unit.is_empty() || subcorpus.is_empty() {
                return Err(TsvError::row(n, "empty frame, lexical unit or subcorpus"));
            }
            let occurrence = if cells[4].is_empty() {
                if frame_element != NO_INSTANCES {
                    return Err(TsvError::row(n, "missing Identifier-Position"));
                }
                None
            } else {
                let (sid, start) = cells[4]
                    .split_once('-')
                    .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                    .ok_or_else(|| {
                        TsvError::row(n, format!("bad Identifier-Position {:?}", cells[4]))
                    })?;
                if frame_element.is_empty() {
                    return Err(TsvError::row(n, "empty frame element"));
                }
                Some(Occurrence {
                    frame_element,
                    sentence_id: sid,
                    prep_start: start,
                })
            };
            Ok(InstanceRecord {
                frame,
                lexical_unit,
                subcorpus,
                occurrence,
            })
        })
        .collect()
}
