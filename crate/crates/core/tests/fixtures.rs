use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;

use prepwb_core::analysis::{
    alternation_patterns, expand_realizations, lexical_units_by_pair, pairs_by_sense, substitutable_prepositions,
    FramePair,
};
use prepwb_core::corpus::{frame_element_at, load_corpus_report, parse_subcorpus_name, PartOfSpeech};
use prepwb_core::disambig::{compile_rules, disambiguate, AttachmentKind};
use prepwb_core::instances::{extract_instances, read_instance_file, write_instance_file};
use prepwb_core::inventory::{core_of, focus_sense_count, OdeKey, SenseKey, TOTAL_PREPOSITIONS, TOTAL_SENSES};
use prepwb_core::network::{build_digraph, hierarchy, read_definitions};
use prepwb_core::tagging::{group_instances, progress};
use prepwb_testkit::tables::{self, pairs, BY_INSTANCE_FILE};
use prepwb_testkit::{fixtures, oracle};

fn key(s: &str) -> SenseKey {
    s.parse().unwrap()
}

#[test]
fn by_sample_corpus_loads() {
    let corpus = fixtures::corpus("by_sample");
    let units: Vec<(&str, &str)> = corpus
        .lexical_units
        .iter()
        .map(|lu| (lu.name.as_str(), lu.frame.as_str()))
        .collect();
    assert_eq!(
        units,
        [("apprehend.v", "Arrest"), ("arrest.v", "Arrest"), ("originate.v", "Achieving_first")]
    );
    assert_eq!(corpus.lexical_units.len(), oracle::count_xml_files(&fixtures::corpus_dir("by_sample")));
    let (_, _, s) = corpus.find_sentence(875350).unwrap();
    assert_eq!(frame_element_at(s, 43).unwrap().frame_element, "Authorities");
    assert!(frame_element_at(s, 42).is_none());
}

#[test]
fn by_sample_subcorpus_names() {
    let d = parse_subcorpus_name("V-570-s20-np-ppby");
    assert_eq!(d.target_preposition.as_deref(), Some("by"));
    assert_eq!(d.other_tokens, ["V", "570", "s20", "np"]);
    assert_eq!(parse_subcorpus_name("V-730-s20-ppby").target_preposition.as_deref(), Some("by"));
}

#[test]
fn by_sample_instance_file_is_exact() {
    let corpus = fixtures::corpus("by_sample");
    let records = extract_instances(&corpus, "by");
    assert_eq!(records.len(), 5);
    let mut buf = Vec::new();
    write_instance_file(&records, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf.clone()).unwrap(), BY_INSTANCE_FILE);
    assert_eq!(read_instance_file(BY_INSTANCE_FILE.as_bytes()).unwrap(), records);
    assert_eq!(records, oracle::extract(&corpus, "by"));
    assert!(extract_instances(&corpus, "zzz").is_empty());

    let groups = group_instances(&records);
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].members.len(), 3);
}

#[test]
fn all_fixture_corpora_load_cleanly() {
    for name in ["by_sample", "realization", "treatment", "through"] {
        let report = load_corpus_report(fixtures::corpus_dir(name)).unwrap();
        assert!(report.errors.is_empty(), "{name}: {:?}", report.errors);
        assert_eq!(report.corpus.lexical_units.len(), oracle::count_xml_files(&fixtures::corpus_dir(name)));
    }
}

#[test]
fn through_extraction_matches_oracle_and_tags() {
    let corpus = fixtures::corpus("through");
    let records = extract_instances(&corpus, "through");
    assert_eq!(records, oracle::extract(&corpus, "through"));
    let tags = fixtures::tags("through");
    assert!(tags.dangling_ids(&records).is_empty());
    let p = progress(&tags, &records);
    let (tagged, total, per) = oracle::progress(&tags, &records);
    assert_eq!((p.tagged, p.total, p.per_sense), (tagged, total, per));
    assert!(p.tagged < p.total);
    assert_eq!(p.tagged, tags.len());
}

#[test]
fn through_inventory_layout() {
    let inv = fixtures::inventory("through");
    assert_eq!(inv.len(), 13);
    let s1 = inv.resolve("1 (1)").unwrap();
    assert_eq!(s1.fields.relation_name, "ThingTransited");
    let codes: Vec<&str> = s1.fields.quirk_syntax.iter().map(|c| c.as_str()).collect();
    assert_eq!(codes, ["2a", "3a"]);
    assert_eq!(s1.fields.quirk_paragraphs, ["9.25", "9.28"]);
    let s4 = inv.resolve("4 (1c)").unwrap();
    assert_eq!(s4.fields.relation_name, "ThingPenetrated");
    assert!(s4.fields.quirk_paragraphs.is_empty());
    let names: Vec<&str> = inv.senses()[..5].iter().map(|s| s.fields.relation_name.as_str()).collect();
    assert_eq!(
        names,
        ["ThingTransited", "ThingBored", "ThingTransited", "ThingPenetrated", "ChannelTransited"]
    );
}

#[test]
fn bundled_inventories_round_trip_byte_identically() {
    for prep in ["through", "by"] {
        let raw = std::fs::read_to_string(fixtures::data(&format!("{prep}.senses.tsv"))).unwrap();
        let inv = fixtures::inventory(prep);
        let mut buf = Vec::new();
        prepwb_core::inventory::save_inventory(&inv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), raw, "{prep}");
    }
}

#[test]
fn sense_counts_match_focus_metadata() {
    for prep in ["through", "by"] {
        assert_eq!(Some(fixtures::inventory(prep).len()), focus_sense_count(prep), "{prep}");
    }
    assert_eq!((TOTAL_SENSES, TOTAL_PREPOSITIONS), (847, 373));
}

#[test]
fn subsense_keying_from_through_layout() {
    let mut inv = fixtures::inventory("through");
    let before = inv.senses().to_vec();
    let fields = inv.resolve("2 (1a)").unwrap().fields.clone();
    let new = inv.add_subsense(&OdeKey::core(1), fields.clone()).unwrap();
    assert_eq!(new.ode.to_string(), "(1e)");
    assert_eq!(new.to_string(), "14 (1e)");
    assert_eq!(&inv.senses()[..13], &before[..]);
    assert_eq!(core_of(&key("2 (1a)")).to_string(), "(1)");
    assert_eq!(core_of(&key("1 (1)")).to_string(), "(1)");

    let three = inv.resolve("(3)").unwrap().key.ode;
    let k = inv.add_subsense(&three, fields.clone()).unwrap();
    assert_eq!(k.ode.to_string(), "(3b)");
    assert!(inv.add_subsense(&OdeKey::core(9), fields).is_err());

    for inv in [fixtures::inventory("through"), fixtures::inventory("by")] {
        for (rendered, s) in oracle::rendered_keys(&inv).iter().zip(inv.senses()) {
            assert_eq!(core_of(&s.key).to_string(), oracle::core_key(rendered));
        }
    }
}

#[test]
fn through_pairs_by_sense() {
    let corpus = fixtures::corpus("through");
    let records = extract_instances(&corpus, "through");
    let tags = fixtures::tags("through");
    let rows = pairs_by_sense(&tags, &records).unwrap();
    let by: BTreeMap<SenseKey, Vec<FramePair>> = rows.into_iter().map(|r| (r.sense, r.pairs)).collect();
    assert_eq!(by, oracle::pairs_by_sense(&tags, &records));

    let mut sense1 = pairs(tables::PAIRS_1);
    sense1.sort();
    assert_eq!(by[&key("1 (1)")], sense1);
    assert_eq!(by[&key("2 (1a)")], pairs(tables::PAIRS_2_1A));
    assert_eq!(by[&key("3 (1b)")], pairs(tables::PAIRS_3_1B));
}

#[test]
fn through_units_by_pair() {
    let records = extract_instances(&fixtures::corpus("through"), "through");
    let tags = fixtures::tags("through");
    let sense = key("3 (1b)");
    let map = lexical_units_by_pair(&tags, &records, &sense).unwrap();
    assert_eq!(map, oracle::units_by_pair(&tags, &records, &sense));
    let expected: BTreeMap<FramePair, Vec<String>> = tables::UNITS_3_1B
    .into_iter()
    .map(|(p, lus)| (p.parse().unwrap(), lus.split(' ').map(String::from).collect()))
    .collect();
    assert_eq!(map, expected);
    assert!(lexical_units_by_pair(&tags, &records, &key("9 (3a)")).unwrap().is_empty());
}

#[test]
fn arriving_realization_expansion() {
    let corpus = fixtures::corpus("realization");
    let seeds = BTreeSet::from([
        FramePair::new("Arriving", "Mode_of_transportation"),
        FramePair::new("Arriving", "Path"),
    ]);
    let preps = fixtures::prepositions();
    let exp = expand_realizations(&corpus, &seeds, &preps);
    assert_eq!(exp.tuples, tables::arriving_tuples());
    assert!(exp.diagnostics.is_empty());
    let list: Vec<String> = preps.iter().map(String::from).collect();
    assert_eq!(exp.tuples, oracle::expand(&corpus, &seeds, &list).into_iter().collect::<Vec<_>>());

    let none = BTreeSet::from([FramePair::new("Arriving", "Nothing")]);
    assert!(expand_realizations(&corpus, &none, &preps).tuples.is_empty());

    let path = [FramePair::new("Arriving", "Path")];
    let subs: BTreeSet<String> = substitutable_prepositions(&exp.tuples, &path, "by")
        .into_iter()
        .map(|s| s.preposition)
        .collect();
    let expected: BTreeSet<String> = ["on", "through", "via", "round", "at", "past", "towards", "across"]
        .into_iter()
        .map(String::from)
        .collect();
    assert_eq!(subs, expected);
    let mode = [FramePair::new("Arriving", "Mode_of_transportation")];
    let subs = substitutable_prepositions(&exp.tuples, &mode, "by");
    assert_eq!(subs.len(), 1);
    assert_eq!(subs[0].preposition, "in");
}

#[test]
fn treatment_alternations_by_part_of_speech() {
    let corpus = fixtures::corpus("treatment");
    let seeds = BTreeSet::from([FramePair::new("Cure", "Treatment")]);
    let exp = expand_realizations(&corpus, &seeds, &fixtures::prepositions());
    let patterns = alternation_patterns(&exp.tuples).unwrap();
    let verbs: BTreeSet<String> = patterns
        .iter()
        .filter(|p| p.lexical_unit_pos == PartOfSpeech::V && p.phrase_type.as_deref() != Some("PP"))
        .map(|p| p.label())
        .collect();
    let expected: BTreeSet<String> = ["Comp PPing", "Ext NP", "DNI", "Comp AVP"].into_iter().map(String::from).collect();
    assert_eq!(verbs, expected);
    for p in &patterns {
        let k = (p.lexical_unit_pos.to_string(), p.grammatical_function.clone(), p.phrase_type.clone());
        assert_eq!(oracle::patterns(&exp.tuples)[&k], p.support);
    }
    let pp: BTreeSet<String> = substitutable_prepositions(&exp.tuples, &[seeds.first().unwrap().clone()], "through")
        .into_iter()
        .map(|s| s.preposition)
        .collect();
    let expected: BTreeSet<String> = ["by", "with", "without", "for"].into_iter().map(String::from).collect();
    assert_eq!(pp, expected);
}

#[test]
fn substitutes_cover_lexicographer_lists() {
    let corpus = fixtures::corpus("through");
    let records = extract_instances(&corpus, "through");
    let tags = fixtures::tags("through");
    let inv = fixtures::inventory("through");
    let rows = pairs_by_sense(&tags, &records).unwrap();
    let preps = fixtures::prepositions();
    for (sense, table) in [("2 (1a)", tables::SUBST_2_1A), ("3 (1b)", tables::SUBST_3_1B)] {
        let row = rows.iter().find(|r| r.sense == key(sense)).unwrap();
        let seeds: BTreeSet<FramePair> = row.pairs.iter().cloned().collect();
        let exp = expand_realizations(&corpus, &seeds, &preps);
        let found: BTreeSet<String> = substitutable_prepositions(&exp.tuples, &row.pairs, "through")
            .into_iter()
            .map(|s| s.preposition)
            .collect();
        for p in &inv.get(&key(sense)).unwrap().fields.similar_prepositions {
            assert!(found.contains(p), "{sense}: {p} missing from {found:?}");
        }
        let published: BTreeSet<&str> = table.split("; ").collect();
        for p in &found {
            assert!(published.contains(p.as_str()), "{sense}: {p} not in the published list");
        }
    }
}

#[test]
fn disambiguation_gold_set() {
    let inv = fixtures::inventory("through");
    let lexicon = fixtures::lexicon();
    let rules = compile_rules(&inv, &lexicon);
    assert!(rules.warnings.is_empty(), "{:?}", rules.warnings);
    assert_eq!(rules.rules[0].attachment_categories, ["motion_verbs"]);
    let gold = fixtures::gold();
    assert_eq!(gold.len(), 30);
    for (ctx, expected) in &gold {
        let ranked = disambiguate(&rules, &lexicon, ctx).unwrap();
        assert_eq!(ranked[0].sense, *expected, "{ctx:?}");
        assert!(ranked[0].full_match, "{ctx:?}");
    }
}

#[test]
fn by_inventory_compiles() {
    let inv = fixtures::inventory("by");
    let rules = compile_rules(&inv, &fixtures::lexicon());
    assert_eq!(rules.rules.len(), 22);
    assert!(rules.warnings.is_empty(), "{:?}", rules.warnings);
    assert!(rules.rules.iter().all(|r| !r.catch_all));
    assert_eq!(rules.rules[17].required_attachment_kind, Some(AttachmentKind::Noun));
}

#[test]
fn digraph_edge_counts() {
    let defs = read_definitions(BufReader::new(File::open(fixtures::data("definitions.tsv")).unwrap())).unwrap();
    let graph = build_digraph(&defs, &fixtures::prepositions());
    assert_eq!(graph.nodes.len(), defs.len());
    let degrees = graph.in_degrees();
    assert_eq!(degrees["by"], 18);
    assert_eq!(degrees["through"], 6);
    assert!(!degrees.contains_key("near"));
    assert!(graph.edges.len() <= graph.nodes.len());
    let oracle_by = defs
        .iter()
        .filter(|d| {
            let g = d.gloss.trim_end_matches(|c: char| !c.is_alphanumeric() && c != ')');
            let g = g.rsplit_once(" (").map_or(g, |(head, _)| if g.ends_with(')') { head } else { g });
            g.ends_with(" by")
        })
        .count();
    assert_eq!(oracle_by, 18);
}

#[test]
fn through_hierarchy() {
    let inv = fixtures::inventory("through");
    let trees = hierarchy(&inv).unwrap();
    let first: Vec<String> = trees[0].children.iter().map(|k| k.ode.to_string()).collect();
    assert_eq!(trees[0].core.ode.to_string(), "(1)");
    assert_eq!(first, ["(1a)", "(1b)", "(1c)", "(1d)"]);
    let total: usize = trees.iter().map(|t| 1 + t.children.len()).sum();
    assert_eq!(total, inv.len());
}
