//! Brute-force reference implementations. Each one recomputes a result the
//! slow, obvious way so library output can be compared against it.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use prepwb_core::analysis::{FramePair, RealizationTuple};
use prepwb_core::corpus::{AnnotatedSentence, Corpus, FeSpan, Layer};
use prepwb_core::instances::{InstanceRecord, Occurrence};
use prepwb_core::inventory::{Inventory, SenseKey};
use prepwb_core::tagging::TagSet;
use regex::Regex;

/// Counts `*.xml` files below `dir` with a plain recursive read_dir walk.
pub fn count_xml_files(dir: &Path) -> usize {
    let mut n = 0;
    for entry in fs::read_dir(dir).expect("readable directory") {
        let path = entry.expect("readable entry").path();
        if path.is_dir() {
            n += count_xml_files(&path);
        } else if path.extension().and_then(|e| e.to_str()) == Some("xml") {
            n += 1;
        }
    }
    n
}

/// Linear scan for the span starting at `offset`.
pub fn span_at(sentence: &AnnotatedSentence, offset: usize) -> Option<&FeSpan> {
    let mut found = None;
    for span in sentence.fe_spans() {
        if span.start == offset {
            assert!(found.is_none(), "two spans start at {offset}");
            found = Some(span);
        }
    }
    found
}

fn lower_chars(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_lowercase().collect()).collect()
}

/// Every char offset where `word` occurs, compared one lowercased character
/// at a time, with letter boundaries checked on both sides.
fn occurrences(text: &str, word: &str) -> Vec<usize> {
    let hay = lower_chars(text);
    let raw: Vec<char> = text.chars().collect();
    let needle = lower_chars(word);
    let mut out = Vec::new();
    for i in 0..hay.len() {
        if i + needle.len() > hay.len() {
            break;
        }
        let matches = (0..needle.len()).all(|k| hay[i + k] == needle[k]);
        let left_ok = i == 0 || !raw[i - 1].is_alphabetic();
        let right_ok = i + needle.len() == raw.len() || !raw[i + needle.len()].is_alphabetic();
        if matches && left_ok && right_ok {
            out.push(i);
        }
    }
    out
}

fn pp_target(subcorpus: &str) -> Option<String> {
    let re = Regex::new(r"^pp([a-z]+)$").unwrap();
    subcorpus
        .split('-')
        .filter_map(|t| re.captures(t).map(|c| c[1].to_string()))
        .last()
}

/// Instance extraction by exhaustive scan, returned as a sorted multiset.
pub fn extract(corpus: &Corpus, prep: &str) -> Vec<InstanceRecord> {
    let mut out = Vec::new();
    for lu in &corpus.lexical_units {
        for sc in &lu.subcorpora {
            if pp_target(&sc.name).as_deref() != Some(prep) {
                continue;
            }
            let mut found = 0;
            for s in &sc.sentences {
                for start in occurrences(s.text(), prep) {
                    if let Some(span) = span_at(s, start) {
                        found += 1;
                        out.push(InstanceRecord {
                            frame: lu.frame.clone(),
                            lexical_unit: lu.name.clone(),
                            subcorpus: sc.name.clone(),
                            occurrence: Some(Occurrence {
                                frame_element: span.frame_element.clone(),
                                sentence_id: s.id(),
                                prep_start: start,
                            }),
                        });
                    }
                }
            }
            if found == 0 {
                out.push(InstanceRecord {
                    frame: lu.frame.clone(),
                    lexical_unit: lu.name.clone(),
                    subcorpus: sc.name.clone(),
                    occurrence: None,
                });
            }
        }
    }
    out.sort_by_key(|r| {
        (
            r.frame.clone(),
            r.frame_element().to_string(),
            r.lexical_unit.clone(),
            r.subcorpus.clone(),
            r.sentence_id(),
            r.prep_start(),
        )
    });
    out
}

fn record_for<'r>(records: &'r [InstanceRecord], id: &str) -> &'r InstanceRecord {
    records
        .iter()
        .find(|r| r.occurrence.is_some() && r.instance_id() == id)
        .expect("tag refers to a record")
}

/// Sense to sorted unique pairs, by nested loops over tags and records.
pub fn pairs_by_sense(tags: &TagSet, records: &[InstanceRecord]) -> BTreeMap<SenseKey, Vec<FramePair>> {
    let mut out: BTreeMap<SenseKey, Vec<FramePair>> = BTreeMap::new();
    for tag in tags.iter() {
        let r = record_for(records, &tag.instance_id);
        for key in &tag.sense_keys {
            let pair = FramePair::new(&r.frame, r.frame_element());
            let list = out.entry(*key).or_default();
            if !list.contains(&pair) {
                list.push(pair);
            }
        }
    }
    for list in out.values_mut() {
        list.sort();
    }
    out
}

pub fn units_by_pair(tags: &TagSet, records: &[InstanceRecord], sense: &SenseKey) -> BTreeMap<FramePair, Vec<String>> {
    let mut out: BTreeMap<FramePair, Vec<String>> = BTreeMap::new();
    for tag in tags.iter().filter(|t| t.sense_keys.contains(sense)) {
        let r = record_for(records, &tag.instance_id);
        let list = out.entry(FramePair::new(&r.frame, r.frame_element())).or_default();
        if !list.contains(&r.lexical_unit) {
            list.push(r.lexical_unit.clone());
        }
    }
    for list in out.values_mut() {
        list.sort();
    }
    out
}

/// (tagged, total, per-sense counts) recounted record by record.
pub fn progress(tags: &TagSet, records: &[InstanceRecord]) -> (usize, usize, BTreeMap<SenseKey, usize>) {
    let mut seen = Vec::new();
    let (mut tagged, mut total) = (0, 0);
    let mut per = BTreeMap::new();
    for r in records.iter().filter(|r| r.occurrence.is_some()) {
        let id = r.instance_id();
        if seen.contains(&id) {
            continue;
        }
        seen.push(id.clone());
        total += 1;
        if let Some(t) = tags.get(&id) {
            tagged += 1;
            for k in &t.sense_keys {
                *per.entry(*k).or_insert(0) += 1;
            }
        }
    }
    (tagged, total, per)
}

/// Longest list entry whose words start `words`, compared against every
/// entry in turn.
fn leading_preposition(words: &[String], preps: &[String]) -> Option<String> {
    let mut best: Option<&String> = None;
    for p in preps {
        let pw: Vec<&str> = p.split(' ').collect();
        let fits = pw.len() <= words.len() && pw.iter().zip(words).all(|(a, b)| *a == b);
        if fits && best.is_none_or(|b| b.split(' ').count() < pw.len()) {
            best = Some(p);
        }
    }
    best.cloned().or_else(|| words.first().cloned())
}

fn split_words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Realization tuples by scanning every span of every sentence.
pub fn expand(corpus: &Corpus, seeds: &BTreeSet<FramePair>, preps: &[String]) -> BTreeSet<RealizationTuple> {
    let mut out = BTreeSet::new();
    for (lu, _, s) in corpus.sentences() {
        for span in s.fe_spans() {
            if !seeds.iter().any(|p| p.frame == lu.frame && p.frame_element == span.frame_element) {
                continue;
            }
            let find = |layer: Layer| {
                s.layer_labels()
                    .iter()
                    .find(|l| l.layer == layer && l.start == span.start && l.end == span.end)
                    .map_or("-".to_string(), |l| l.label.clone())
            };
            let pt = find(Layer::Pt);
            let text: String = s.text().chars().skip(span.start).take(span.end - span.start).collect();
            let preposition = (pt == "PP").then(|| leading_preposition(&split_words(&text), preps).unwrap_or("-".into()));
            out.insert(RealizationTuple {
                frame: lu.frame.clone(),
                frame_element: span.frame_element.clone(),
                lexical_unit: lu.name.clone(),
                grammatical_function: find(Layer::Gf),
                phrase_type: Some(pt),
                preposition,
            });
        }
        for n in s.null_instantiations() {
            if seeds.iter().any(|p| p.frame == lu.frame && p.frame_element == n.frame_element) {
                out.insert(RealizationTuple {
                    frame: lu.frame.clone(),
                    frame_element: n.frame_element.clone(),
                    lexical_unit: lu.name.clone(),
                    grammatical_function: n.kind.as_str().to_string(),
                    phrase_type: None,
                    preposition: None,
                });
            }
        }
    }
    out
}

/// (pos, GF, PT) to number of distinct tuples.
pub fn patterns(tuples: &[RealizationTuple]) -> BTreeMap<(String, String, Option<String>), usize> {
    let unique: BTreeSet<&RealizationTuple> = tuples.iter().collect();
    let mut out = BTreeMap::new();
    for t in unique {
        let pos = t.lexical_unit.rsplit('.').next().unwrap().to_string();
        *out.entry((pos, t.grammatical_function.clone(), t.phrase_type.clone()))
            .or_insert(0) += 1;
    }
    out
}

/// Membership by scanning raw lexicon rows.
pub fn lexicon_member(rows: &[(String, String, String)], lemma: &str, pos: &str, category: &str) -> bool {
    rows.iter().any(|(c, l, p)| c == category && l == lemma && p == pos)
}

/// Core dictionary key by regex: drop the letter inside the parentheses.
pub fn core_key(rendered: &str) -> String {
    let re = Regex::new(r"^\d+ \((\d+)[a-z]?\)$").unwrap();
    let caps = re.captures(rendered).expect("rendered sense key");
    format!("({})", &caps[1])
}

/// Every sense key in the inventory, rendered.
pub fn rendered_keys(inv: &Inventory) -> Vec<String> {
    inv.senses().iter().map(|s| s.key.to_string()).collect()
}
