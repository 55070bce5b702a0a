//! Random generators.

use std::collections::BTreeSet;

use prepwb_core::analysis::{FramePair, RealizationTuple};
use prepwb_core::corpus::{
    AnnotatedSentence, Corpus, FeSpan, Layer, LayerLabel, LexicalUnit, NullInstantiation, NullKind, Subcorpus,
};
use prepwb_core::instances::{InstanceRecord, Occurrence};
use prepwb_core::inventory::{Inventory, OdeKey, Properties, QuirkCode, SenseFields, SenseKey};
use prepwb_core::tagging::TagSet;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const PREPS: [&str; 5] = ["by", "through", "in", "into", "out"];
pub const FRAMES: [&str; 5] = ["Arriving", "Arrest", "Motion", "Cure", "Roadways"];
pub const FRAME_ELEMENTS: [&str; 5] = ["Path", "Authorities", "Goal", "Treatment", "Mode_of_transportation"];
const LEMMAS: [&str; 8] = ["arrest", "come", "move", "treat", "road", "heal", "curative", "pass"];
const POS: [&str; 3] = ["v", "n", "a"];
const FILLER: [&str; 16] = [
    "the", "Zoë", "café", "nearby", "bypass", "thorough", "standby", "police", "Montréal", "tunnel", "walked",
    "of", "car", "way", "by-law", "inside",
];
const GFS: [&str; 5] = ["Comp", "Ext", "Obj", "Dep", "Head"];
const PTS: [&str; 5] = ["PP", "NP", "PPing", "AVP", "N"];

/// Generator tuning.
#[derive(Debug, Clone, Copy)]
pub struct CorpusShape {
    pub lexical_units: usize,
    pub subcorpora_per_unit: usize,
    pub sentences_per_subcorpus: usize,
}

impl Default for CorpusShape {
    fn default() -> Self {
        CorpusShape {
            lexical_units: 6,
            subcorpora_per_unit: 3,
            sentences_per_subcorpus: 6,
        }
    }
}

fn subcorpus_name<R: Rng>(rng: &mut R) -> String {
    let mut tokens = vec![
        ["V", "N", "A"].choose(rng).unwrap().to_string(),
        rng.random_range(100..999).to_string(),
        "s20".to_string(),
    ];
    if rng.random_bool(0.3) {
        tokens.push("np".into());
    }
    if rng.random_bool(0.85) {
        tokens.push(format!("pp{}", PREPS.choose(rng).unwrap()));
    }
    if rng.random_bool(0.1) {
        tokens.insert(1, format!("pp{}", PREPS.choose(rng).unwrap()));
    }
    tokens.join("-")
}

fn case_variant<R: Rng>(rng: &mut R, word: &str) -> String {
    match rng.random_range(0..6) {
        0 => word.to_uppercase(),
        1 => {
            let mut cs = word.chars();
            cs.next().map(|c| c.to_uppercase().chain(cs).collect()).unwrap_or_default()
        }
        _ => word.to_string(),
    }
}

/// A sentence built from filler words and prepositions, with frame-element
/// spans at random word starts (more often at prepositions) and GF/PT
/// labels that are sometimes missing.
pub fn random_sentence<R: Rng>(rng: &mut R, id: u64) -> AnnotatedSentence {
    let n = rng.random_range(3..14);
    let mut text = String::new();
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    let mut is_prep = Vec::new();
    let mut len = 0;
    for i in 0..n {
        if i > 0 {
            let sep = [" ", " ", " ", ", ", " (", "·"].choose(rng).unwrap();
            text.push_str(sep);
            len += sep.chars().count();
        }
        let prep = rng.random_bool(0.35);
        let word = if prep {
            let p = *PREPS.choose(rng).unwrap();
            case_variant(rng, p)
        } else {
            FILLER.choose(rng).unwrap().to_string()
        };
        starts.push(len);
        len += word.chars().count();
        ends.push(len);
        is_prep.push(prep);
        text.push_str(&word);
    }
    if rng.random_bool(0.5) {
        text.push('.');
    }

    let mut spans = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let p = if is_prep[i] { 0.6 } else { 0.15 };
        if !rng.random_bool(p) {
            continue;
        }
        let last = rng.random_range(i..n);
        let (start, end) = (starts[i], ends[last]);
        spans.push(FeSpan {
            frame_element: FRAME_ELEMENTS.choose(rng).unwrap().to_string(),
            start,
            end,
        });
        if rng.random_bool(0.9) {
            labels.push(LayerLabel {
                layer: Layer::Gf,
                label: GFS.choose(rng).unwrap().to_string(),
                start,
                end,
            });
        }
        if rng.random_bool(0.9) {
            let pt = if is_prep[i] && rng.random_bool(0.8) {
                "PP"
            } else {
                PTS.choose(rng).unwrap()
            };
            labels.push(LayerLabel {
                layer: Layer::Pt,
                label: pt.to_string(),
                start,
                end,
            });
        }
    }
    let nulls = if rng.random_bool(0.1) {
        vec![NullInstantiation {
            frame_element: FRAME_ELEMENTS.choose(rng).unwrap().to_string(),
            kind: [NullKind::Definite, NullKind::Indefinite, NullKind::Constructional]
                .choose(rng)
                .copied()
                .unwrap(),
        }]
    } else {
        Vec::new()
    };
    AnnotatedSentence::new(id, text, spans, labels, nulls).expect("generated sentence is valid")
}

/// A corpus with unique (name, frame) pairs and globally unique sentence ids.
pub fn random_corpus<R: Rng>(rng: &mut R, shape: CorpusShape) -> Corpus {
    let mut next_id = rng.random_range(1..1_000_000u64);
    let mut seen = BTreeSet::new();
    let mut units = Vec::new();
    while units.len() < shape.lexical_units {
        let name = format!("{}.{}", LEMMAS.choose(rng).unwrap(), POS.choose(rng).unwrap());
        let frame = FRAMES.choose(rng).unwrap().to_string();
        if !seen.insert((name.clone(), frame.clone())) {
            if seen.len() >= LEMMAS.len() * POS.len() * FRAMES.len() {
                break;
            }
            continue;
        }
        let subcorpora = (0..shape.subcorpora_per_unit)
            .map(|_| Subcorpus {
                name: subcorpus_name(rng),
                sentences: (0..shape.sentences_per_subcorpus)
                    .map(|_| {
                        next_id += rng.random_range(1..5);
                        random_sentence(rng, next_id)
                    })
                    .collect(),
            })
            .collect();
        units.push(LexicalUnit {
            name,
            frame,
            subcorpora,
        });
    }
    Corpus::new(units, "generated")
}

/// Non-empty text drawn from an alphabet that exercises TSV escaping.
pub fn random_text<R: Rng>(rng: &mut R, max: usize) -> String {
    const ALPHABET: [&str; 14] = ["a", "Z", "_", " ", "\t", "\\", "é", "\n", ":", ";", ",", "\\t", "ß", "\r"];
    let n = rng.random_range(1..=max);
    (0..n).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

pub fn random_records<R: Rng>(rng: &mut R, n: usize) -> Vec<InstanceRecord> {
    let mut records: Vec<InstanceRecord> = (0..n)
        .map(|_| InstanceRecord {
            frame: random_text(rng, 8),
            lexical_unit: random_text(rng, 8),
            subcorpus: random_text(rng, 8),
            occurrence: rng.random_bool(0.8).then(|| Occurrence {
                frame_element: if rng.random_bool(0.05) {
                    "No instances".to_string()
                } else {
                    random_text(rng, 8)
                },
                sentence_id: rng.random(),
                prep_start: rng.random_range(0..100_000),
            }),
        })
        .collect();
    records.sort();
    records
}

fn random_fields<R: Rng>(rng: &mut R) -> SenseFields {
    let mut codes: Vec<QuirkCode> = QuirkCode::ALL.iter().copied().filter(|_| rng.random_bool(0.3)).collect();
    if codes.is_empty() {
        codes.push(*QuirkCode::ALL.choose(rng).unwrap());
    }
    if rng.random_bool(0.5) {
        codes.reverse();
    }
    let cats = |rng: &mut R, kind: bool| {
        let mut v: Vec<String> = ["openings", "motion_verbs", "time_periods", "x9"]
            .iter()
            .filter(|_| rng.random_bool(0.3))
            .map(|s| s.to_string())
            .collect();
        if kind && rng.random_bool(0.2) {
            v.push(format!("kind:{}", ["verb", "noun", "adjective", "copula"].choose(rng).unwrap()));
        }
        v
    };
    SenseFields {
        relation_name: ["ThingTransited", "Agent", "Duration", "Means2"].choose(rng).unwrap().to_string(),
        quirk_syntax: codes,
        quirk_paragraphs: (0..rng.random_range(0..3))
            .map(|_| format!("9.{}", rng.random_range(1..60)))
            .collect(),
        complement_properties: Properties {
            text: random_text(rng, 12),
            categories: cats(rng, false),
        },
        attachment_properties: Properties {
            text: if rng.random_bool(0.2) { String::new() } else { random_text(rng, 12) },
            categories: cats(rng, true),
        },
        similar_prepositions: ["into", "at the hands of", "among", "on top of"]
            .iter()
            .filter(|_| rng.random_bool(0.3))
            .map(|s| s.to_string())
            .collect(),
    }
}

/// An inventory grown through the public editing operations.
pub fn random_inventory<R: Rng>(rng: &mut R, prep: &str, senses: usize) -> Inventory {
    let mut inv = Inventory::new(prep);
    if rng.random_bool(0.5) {
        inv.notes = random_text(rng, 20);
    }
    if rng.random_bool(0.5) {
        inv.summary = random_text(rng, 20);
    }
    for _ in 0..senses {
        let cores: Vec<OdeKey> = inv.senses().iter().map(|s| s.key.ode).filter(OdeKey::is_core).collect();
        if !cores.is_empty() && rng.random_bool(0.4) {
            let parent = *cores.choose(rng).unwrap();
            let _ = inv.add_subsense(&parent, random_fields(rng));
        } else {
            inv.add_sense(random_fields(rng)).unwrap();
        }
    }
    inv
}

/// Tags a random subset of `ids` with one to three senses each.
pub fn random_tagset<R: Rng>(rng: &mut R, inv: &Inventory, ids: &[String]) -> TagSet {
    let mut tags = TagSet::new(inv.preposition());
    let keys: Vec<SenseKey> = inv.senses().iter().map(|s| s.key).collect();
    if keys.is_empty() {
        return tags;
    }
    for id in ids {
        if !rng.random_bool(0.7) {
            continue;
        }
        let k = rng.random_range(1..=3.min(keys.len()));
        let chosen: Vec<SenseKey> = keys.choose_multiple(rng, k).copied().collect();
        let note = rng.random_bool(0.2).then(|| random_text(rng, 10));
        let tagger = if rng.random_bool(0.5) { "lexicographer".to_string() } else { random_text(rng, 6) };
        tags.assign(std::slice::from_ref(id), &chosen, inv, &tagger, note.as_deref())
            .unwrap();
    }
    tags
}

pub fn random_tuples<R: Rng>(rng: &mut R, n: usize) -> Vec<RealizationTuple> {
    let mut set = BTreeSet::new();
    for _ in 0..n {
        let null = rng.random_bool(0.1);
        let pt = if null {
            None
        } else if rng.random_bool(0.5) {
            Some("PP".to_string())
        } else {
            Some(random_text(rng, 5))
        };
        let preposition = (pt.as_deref() == Some("PP")).then(|| random_text(rng, 6));
        set.insert(RealizationTuple {
            frame: random_text(rng, 6),
            frame_element: random_text(rng, 6),
            lexical_unit: format!("{}.{}", LEMMAS.choose(rng).unwrap(), POS.choose(rng).unwrap()),
            grammatical_function: if null { "DNI".into() } else { random_text(rng, 4) },
            phrase_type: pt,
            preposition,
        });
    }
    set.into_iter().collect()
}

/// A random non-empty subset of all frame/FE combinations the corpus
/// generator uses.
pub fn random_seeds<R: Rng>(rng: &mut R) -> BTreeSet<FramePair> {
    let mut seeds = BTreeSet::new();
    while seeds.is_empty() {
        for f in FRAMES {
            for fe in FRAME_ELEMENTS {
                if rng.random_bool(0.2) {
                    seeds.insert(FramePair::new(f, fe));
                }
            }
        }
    }
    seeds
}
