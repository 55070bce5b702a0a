use std::collections::{BTreeMap, BTreeSet};

use prepwb_core::analysis::{
    alternation_patterns, expand_realizations, lexical_units_by_pair, pairs_by_sense, read_expansion,
    write_expansion, FramePair,
};
use prepwb_core::corpus::{frame_element_at, load_corpus, write_corpus, PartOfSpeech};
use prepwb_core::disambig::{compile_rules, disambiguate, AttachmentKind, DisambiguationContext, LexiconOracle};
use prepwb_core::instances::{extract_instances, read_instance_file, write_instance_file, InstanceRecord};
use prepwb_core::inventory::{core_of, load_inventory, save_inventory, OdeKey, SenseKey};
use prepwb_core::network::hierarchy;
use prepwb_core::tagging::{group_instances, progress, read_tags, write_tags};
use prepwb_core::tsv::{escape, unescape};
use prepwb_core::PrepositionList;
use prepwb_testkit::gen::{self, CorpusShape, PREPS};
use prepwb_testkit::{fixtures, oracle};
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn prep_list() -> (PrepositionList, Vec<String>) {
    let mut all: Vec<String> = PREPS.iter().map(|p| p.to_string()).collect();
    all.push("out of".into());
    (PrepositionList::new(all.iter()), all)
}

fn taggable_ids(records: &[InstanceRecord]) -> Vec<String> {
    let ids: BTreeSet<String> = records.iter().filter(|r| r.is_taggable()).map(|r| r.instance_id()).collect();
    ids.into_iter().collect()
}

#[test]
fn extraction_matches_exhaustive_scan() {
    let mut r = rng(1);
    for _ in 0..120 {
        let corpus = gen::random_corpus(&mut r, CorpusShape::default());
        assert!(corpus.sentence_count() >= 100);
        for prep in PREPS {
            let got = extract_instances(&corpus, prep);
            assert_eq!(got, oracle::extract(&corpus, prep));
            assert!(got.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn extraction_for_unknown_preposition_is_empty() {
    let mut r = rng(2);
    let corpus = gen::random_corpus(&mut r, CorpusShape::default());
    assert!(extract_instances(&corpus, "nowhere").is_empty());
}

#[test]
fn frame_element_lookup_matches_linear_scan() {
    let mut r = rng(3);
    for id in 0..3000 {
        let s = gen::random_sentence(&mut r, id);
        let len = s.text().chars().count();
        for offset in 0..=len + 1 {
            assert_eq!(frame_element_at(&s, offset), oracle::span_at(&s, offset));
        }
    }
}

#[test]
fn expansion_matches_oracle() {
    let mut r = rng(4);
    let (list, raw) = prep_list();
    let shape = CorpusShape {
        lexical_units: 8,
        subcorpora_per_unit: 2,
        sentences_per_subcorpus: 3,
    };
    for _ in 0..1000 {
        let corpus = gen::random_corpus(&mut r, shape);
        let seeds = gen::random_seeds(&mut r);
        let exp = expand_realizations(&corpus, &seeds, &list);
        let unique: BTreeSet<_> = exp.tuples.iter().collect();
        assert_eq!(unique.len(), exp.tuples.len());
        for t in &exp.tuples {
            assert_eq!(t.preposition.is_some(), t.phrase_type.as_deref() == Some("PP"));
            assert!(seeds.contains(&t.pair()));
        }
        assert_eq!(exp.tuples, oracle::expand(&corpus, &seeds, &raw).into_iter().collect::<Vec<_>>());
        let missing = exp
            .tuples
            .iter()
            .any(|t| t.grammatical_function == "-" || t.phrase_type.as_deref() == Some("-"));
        if missing {
            assert!(!exp.diagnostics.is_empty());
        }
    }
}

#[test]
fn patterns_match_oracle() {
    let mut r = rng(5);
    for _ in 0..300 {
        let n = r.random_range(0..60);
        let tuples = gen::random_tuples(&mut r, n);
        let got: BTreeMap<_, _> = alternation_patterns(&tuples)
            .unwrap()
            .into_iter()
            .map(|p| ((p.lexical_unit_pos.to_string(), p.grammatical_function, p.phrase_type), p.support))
            .collect();
        assert_eq!(got, oracle::patterns(&tuples));
    }
}

#[test]
fn aggregations_match_oracles() {
    let mut r = rng(6);
    for _ in 0..150 {
        let corpus = gen::random_corpus(&mut r, CorpusShape::default());
        let prep = *PREPS.choose(&mut r).unwrap();
        let records = extract_instances(&corpus, prep);
        let n = r.random_range(1..15);
        let inv = gen::random_inventory(&mut r, prep, n);
        let tags = gen::random_tagset(&mut r, &inv, &taggable_ids(&records));

        let rows = pairs_by_sense(&tags, &records).unwrap();
        let got: BTreeMap<SenseKey, Vec<FramePair>> = rows.into_iter().map(|row| (row.sense, row.pairs)).collect();
        assert_eq!(got, oracle::pairs_by_sense(&tags, &records));

        for s in inv.senses() {
            assert_eq!(
                lexical_units_by_pair(&tags, &records, &s.key).unwrap(),
                oracle::units_by_pair(&tags, &records, &s.key)
            );
        }

        let p = progress(&tags, &records);
        assert_eq!((p.tagged, p.total, p.per_sense.clone()), oracle::progress(&tags, &records));
        assert!(p.tagged <= p.total);
    }
}

#[test]
fn tagging_progress_is_monotone_and_assign_is_idempotent() {
    let mut r = rng(7);
    for _ in 0..60 {
        let corpus = gen::random_corpus(&mut r, CorpusShape::default());
        let records = extract_instances(&corpus, "by");
        let ids = taggable_ids(&records);
        if ids.is_empty() {
            continue;
        }
        let inv = gen::random_inventory(&mut r, "by", 6);
        let keys: Vec<SenseKey> = inv.senses().iter().map(|s| s.key).collect();
        let mut tags = prepwb_core::TagSet::new("by");
        let mut last = 0;
        let mut order = ids.clone();
        order.shuffle(&mut r);
        for id in &order {
            let k = *keys.choose(&mut r).unwrap();
            let batch = std::slice::from_ref(id);
            tags.assign(batch, &[k], &inv, "t", None).unwrap();
            let version = tags.version;
            let snapshot = tags.clone();
            let again = tags.assign(batch, &[k], &inv, "t", None).unwrap();
            assert_eq!((again.created, again.overwritten, again.unchanged), (0, 0, 1));
            assert_eq!(tags, snapshot);
            assert_eq!(tags.version, version);
            let now = progress(&tags, &records).tagged;
            assert!(now >= last);
            last = now;
        }
        assert_eq!(last, ids.len());
    }
}

#[test]
fn groups_partition_taggable_instances() {
    let mut r = rng(8);
    for _ in 0..100 {
        let corpus = gen::random_corpus(&mut r, CorpusShape::default());
        let records = extract_instances(&corpus, PREPS.choose(&mut r).unwrap());
        let groups = group_instances(&records);
        let mut members: Vec<String> = groups.iter().flat_map(|g| g.members.clone()).collect();
        let total = members.len();
        members.sort();
        members.dedup();
        assert_eq!(members.len(), total);
        assert_eq!(members, taggable_ids(&records));
        for g in &groups {
            for id in &g.members {
                let rec = records.iter().find(|x| x.is_taggable() && &x.instance_id() == id).unwrap();
                assert_eq!(
                    (&rec.frame, rec.frame_element(), &rec.lexical_unit),
                    (&g.frame, g.frame_element.as_str(), &g.lexical_unit)
                );
            }
        }
    }
}

#[test]
fn instance_files_round_trip() {
    let mut r = rng(9);
    for _ in 0..300 {
        let n = r.random_range(0..40);
        let records = gen::random_records(&mut r, n);
        let mut buf = Vec::new();
        assert_eq!(write_instance_file(&records, &mut buf).unwrap(), buf.len());
        assert_eq!(read_instance_file(buf.as_slice()).unwrap(), records);
    }
}

#[test]
fn inventories_round_trip() {
    let mut r = rng(10);
    for _ in 0..300 {
        let n = r.random_range(0..25);
        let inv = gen::random_inventory(&mut r, "through", n);
        let mut buf = Vec::new();
        save_inventory(&inv, &mut buf).unwrap();
        let back = load_inventory(buf.as_slice(), "through").unwrap();
        assert_eq!(back, inv);
        let mut again = Vec::new();
        save_inventory(&back, &mut again).unwrap();
        assert_eq!(again, buf);
    }
}

#[test]
fn tag_files_round_trip() {
    let mut r = rng(11);
    for _ in 0..300 {
        let inv = gen::random_inventory(&mut r, "by", 8);
        let ids: Vec<String> = (0..r.random_range(0..30)).map(|i| format!("{}-{}", 1000 + i, i * 3)).collect();
        let mut tags = gen::random_tagset(&mut r, &inv, &ids);
        tags.version = r.random_range(0..4);
        let mut buf = Vec::new();
        write_tags(&tags, &mut buf).unwrap();
        assert_eq!(read_tags(buf.as_slice(), "by").unwrap(), tags);
    }
}

#[test]
fn expansion_files_round_trip() {
    let mut r = rng(12);
    for _ in 0..300 {
        let n = r.random_range(0..40);
        let tuples = gen::random_tuples(&mut r, n);
        let mut buf = Vec::new();
        write_expansion(&tuples, &mut buf).unwrap();
        assert_eq!(read_expansion(buf.as_slice()).unwrap(), tuples);
    }
}

#[test]
fn corpus_xml_round_trips() {
    let mut r = rng(13);
    for _ in 0..30 {
        let corpus = gen::random_corpus(&mut r, CorpusShape::default());
        let dir = tempfile::tempdir().unwrap();
        let written = write_corpus(&corpus, dir.path()).unwrap();
        assert_eq!(written.len(), corpus.lexical_units.len());
        assert_eq!(oracle::count_xml_files(dir.path()), written.len());
        let back = load_corpus(dir.path()).unwrap();
        assert_eq!(back.lexical_units, corpus.lexical_units);
    }
}

#[test]
fn core_of_matches_regex() {
    let mut r = rng(14);
    for _ in 0..300 {
        let n = r.random_range(1..30);
        let inv = gen::random_inventory(&mut r, "x", n);
        for (rendered, s) in oracle::rendered_keys(&inv).iter().zip(inv.senses()) {
            assert_eq!(core_of(&s.key).to_string(), oracle::core_key(rendered));
            assert_eq!(rendered.parse::<SenseKey>().unwrap(), s.key);
        }
    }
}

#[test]
fn hierarchy_partitions_inventory() {
    let mut r = rng(15);
    for _ in 0..300 {
        let n = r.random_range(0..30);
        let inv = gen::random_inventory(&mut r, "x", n);
        let trees = hierarchy(&inv).unwrap();
        let mut seen: Vec<SenseKey> = Vec::new();
        for t in &trees {
            assert!(t.core.ode.is_core());
            seen.push(t.core);
            for c in &t.children {
                assert_eq!(core_of(c), t.core.ode);
                assert!(!c.ode.is_core());
                seen.push(*c);
            }
        }
        seen.sort();
        let mut all: Vec<SenseKey> = inv.senses().iter().map(|s| s.key).collect();
        all.sort();
        assert_eq!(seen, all);
    }
}

#[test]
fn subsense_letters_follow_the_maximum() {
    let mut r = rng(16);
    for _ in 0..100 {
        let mut inv = gen::random_inventory(&mut r, "x", 10);
        let cores: Vec<OdeKey> = inv.senses().iter().map(|s| s.key.ode).filter(OdeKey::is_core).collect();
        let parent = *cores.choose(&mut r).unwrap();
        let max = inv
            .senses()
            .iter()
            .filter(|s| s.key.ode.number == parent.number)
            .filter_map(|s| s.key.ode.letter)
            .max();
        let fields = inv.senses()[0].fields.clone();
        let before = inv.senses().to_vec();
        let key = inv.add_subsense(&parent, fields).unwrap();
        let expected = max.map_or('a', |c| (c as u8 + 1) as char);
        assert_eq!(key.ode.letter, Some(expected));
        assert_eq!(key.ordinal as usize, before.len() + 1);
        assert_eq!(&inv.senses()[..before.len()], &before[..]);
    }
}

#[test]
fn lexicon_membership_matches_scan() {
    let rows = fixtures::lexicon_rows();
    let lexicon = fixtures::lexicon();
    let mut lemmas: BTreeSet<&str> = rows.iter().map(|r| r.1.as_str()).collect();
    lemmas.insert("unknownword");
    let cats: BTreeSet<&str> = rows.iter().map(|r| r.0.as_str()).chain(["nocat"]).collect();
    use prepwb_core::disambig::CategoryOracle;
    for lemma in &lemmas {
        for (pos, tag) in [(PartOfSpeech::V, "v"), (PartOfSpeech::N, "n"), (PartOfSpeech::A, "a")] {
            for cat in &cats {
                assert_eq!(lexicon.member(lemma, pos, cat), oracle::lexicon_member(&rows, lemma, tag, cat));
            }
        }
    }
}

#[test]
fn disambiguation_is_deterministic_under_lexicon_order() {
    let mut rows = fixtures::lexicon_rows();
    let inv = fixtures::inventory("through");
    let contexts: Vec<DisambiguationContext> = fixtures::gold().into_iter().map(|(c, _)| c).collect();
    let base = fixtures::lexicon();
    let base_rules = compile_rules(&inv, &base);
    let expected: Vec<_> = contexts.iter().map(|c| disambiguate(&base_rules, &base, c).unwrap()).collect();
    let mut r = rng(17);
    for _ in 0..10 {
        rows.shuffle(&mut r);
        let mut lex = LexiconOracle::new();
        for (c, l, p) in &rows {
            lex.add(c, l, p.parse().unwrap());
        }
        let rules = compile_rules(&inv, &lex);
        for (ctx, want) in contexts.iter().zip(&expected) {
            assert_eq!(&disambiguate(&rules, &lex, ctx).unwrap(), want);
        }
    }
}

#[test]
fn ranking_is_never_empty() {
    let mut r = rng(18);
    let lexicon = fixtures::lexicon();
    let heads = ["tunnel.n", "walk.v", "week.n", "storm.n", "x.a", "bullet.n"];
    for _ in 0..300 {
        let n = r.random_range(1..15);
        let inv = gen::random_inventory(&mut r, "through", n);
        let rules = compile_rules(&inv, &lexicon);
        let ctx = DisambiguationContext {
            preposition: "through".into(),
            complement_head: heads.choose(&mut r).unwrap().parse().unwrap(),
            attachment_head: heads.choose(&mut r).unwrap().parse().unwrap(),
            attachment_kind: *[AttachmentKind::Verb, AttachmentKind::Noun, AttachmentKind::Copula]
                .choose(&mut r)
                .unwrap(),
        };
        let ranked = disambiguate(&rules, &lexicon, &ctx).unwrap();
        assert_eq!(ranked.len(), inv.len());
        let tiers: Vec<u8> = ranked
            .iter()
            .map(|x| {
                let rule = rules.rules.iter().find(|rr| rr.sense == x.sense).unwrap();
                match (rule.catch_all, x.full_match) {
                    (false, true) => 0,
                    (true, _) => 1,
                    _ => 2,
                }
            })
            .collect();
        assert!(tiers.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #[test]
    fn tsv_escape_round_trips(s in "[a-z\\\\\t\n\r é]{0,40}") {
        let e = escape(&s);
        prop_assert!(!e.contains('\t') && !e.contains('\n') && !e.contains('\r'));
        prop_assert_eq!(unescape(&e, 1).unwrap(), s);
    }

    #[test]
    fn sense_keys_round_trip(ordinal in 1u32..500, number in 1u32..40, letter in proptest::option::of(proptest::char::range('a', 'z'))) {
        let key = SenseKey::new(ordinal, OdeKey { number, letter });
        prop_assert_eq!(key.to_string().parse::<SenseKey>().unwrap(), key);
        prop_assert_eq!(core_of(&key), OdeKey::core(number));
    }

    #[test]
    fn frame_pairs_round_trip(f in "[A-Z][a-z_]{0,10}", fe in "[A-Z][a-z_ ]{0,10}") {
        let p = FramePair::new(f, fe);
        prop_assert_eq!(p.to_string().parse::<FramePair>().unwrap(), p);
    }
}
