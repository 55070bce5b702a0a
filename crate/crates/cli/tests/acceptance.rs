use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use prepwb_core::analysis::{
    expand_realizations, lexical_units_by_pair, pairs_by_sense, read_expansion, write_expansion, FramePair,
};
use prepwb_core::disambig::{compile_rules, disambiguate, LexiconOracle};
use prepwb_core::instances::{extract_instances, read_instance_file, write_instance_file};
use prepwb_core::inventory::{core_of, load_inventory, save_inventory, OdeKey, SenseKey};
use prepwb_core::network::{build_digraph, read_definitions};
use prepwb_core::tagging::{read_tags, write_tags};
use prepwb_core::PrepositionList;
use prepwb_testkit::gen::{self, CorpusShape, PREPS};
use prepwb_testkit::server::Server;
use prepwb_testkit::tables::{self, pairs};
use prepwb_testkit::{fixtures, oracle};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn bin() -> &'static Path {
    Path::new(env!("CARGO_BIN_EXE_prepwb"))
}

fn key(s: &str) -> SenseKey {
    s.parse().unwrap()
}

fn by_instance_file() -> Check {
    let started = Instant::now();
    let out = Command::new(bin())
        .args(["extract", "--prep", "by", "--corpus"])
        .arg(fixtures::corpus_dir("by_sample"))
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure!(out.status.success(), "exit {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    ensure!(out.stdout == tables::BY_INSTANCE_FILE.as_bytes(), "output differs:\n{}", String::from_utf8_lossy(&out.stdout));
    ensure!(tables::BY_INSTANCE_FILE.lines().count() == 6, "expected header plus five rows");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(())
}

fn extraction_oracle() -> Check {
    let started = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(101);
    for i in 0..100 {
        let corpus = gen::random_corpus(&mut r, CorpusShape::default());
        ensure!(corpus.sentence_count() >= 100, "corpus {i} has {} sentences", corpus.sentence_count());
        for prep in PREPS {
            let mut got = extract_instances(&corpus, prep);
            let mut want = oracle::extract(&corpus, prep);
            got.sort();
            want.sort();
            ensure!(got == want, "corpus {i}, {prep}: records differ");
        }
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(())
}

fn through_pairs() -> Check {
    let records = extract_instances(&fixtures::corpus("through"), "through");
    let rows = pairs_by_sense(&fixtures::tags("through"), &records).map_err(|e| e.to_string())?;
    let by: BTreeMap<SenseKey, Vec<FramePair>> = rows.into_iter().map(|r| (r.sense, r.pairs)).collect();
    let a = by.get(&key("2 (1a)")).cloned().unwrap_or_default();
    let b = by.get(&key("3 (1b)")).cloned().unwrap_or_default();
    ensure!(a.len() == 4 && a == pairs(tables::PAIRS_2_1A), "2 (1a): {a:?}");
    ensure!(b.len() == 6 && b == pairs(tables::PAIRS_3_1B), "3 (1b): {b:?}");
    Ok(())
}

fn roadways_units() -> Check {
    let records = extract_instances(&fixtures::corpus("through"), "through");
    let map = lexical_units_by_pair(&fixtures::tags("through"), &records, &key("3 (1b)")).map_err(|e| e.to_string())?;
    let roadways = map.get(&FramePair::new("Roadways", "Path")).cloned().unwrap_or_default();
    let expected: Vec<String> = tables::UNITS_3_1B
        .iter()
        .find(|(p, _)| *p == "Roadways:Path")
        .map(|(_, lus)| lus.split(' ').map(String::from).collect())
        .unwrap_or_default();
    ensure!(roadways.len() == 10, "{} units: {roadways:?}", roadways.len());
    ensure!(roadways == expected, "{roadways:?}");
    Ok(())
}

fn arriving_tuples() -> Check {
    let seeds = BTreeSet::from([
        FramePair::new("Arriving", "Mode_of_transportation"),
        FramePair::new("Arriving", "Path"),
    ]);
    let exp = expand_realizations(&fixtures::corpus("realization"), &seeds, &fixtures::prepositions());
    ensure!(exp.tuples.len() == 23, "{} tuples", exp.tuples.len());
    ensure!(exp.tuples == tables::arriving_tuples(), "tuples differ from the published table");
    let non_pp: BTreeSet<(&str, &str)> = exp
        .tuples
        .iter()
        .filter(|t| t.preposition.is_none())
        .map(|t| (t.grammatical_function.as_str(), t.phrase_type.as_deref().unwrap_or("")))
        .collect();
    ensure!(non_pp == BTreeSet::from([("Comp", "PPing"), ("Obj", "NP")]), "non-PP rows {non_pp:?}");
    Ok(())
}

fn expansion_properties() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(102);
    let raw: Vec<String> = PREPS.iter().map(|p| p.to_string()).collect();
    let list = PrepositionList::new(raw.iter());
    let shape = CorpusShape {
        lexical_units: 8,
        subcorpora_per_unit: 2,
        sentences_per_subcorpus: 3,
    };
    let mut tuples = 0;
    for i in 0..1000 {
        let corpus = gen::random_corpus(&mut r, shape);
        let seeds = gen::random_seeds(&mut r);
        let exp = expand_realizations(&corpus, &seeds, &list);
        let unique: BTreeSet<_> = exp.tuples.iter().collect();
        ensure!(unique.len() == exp.tuples.len(), "expansion {i}: duplicate tuples");
        for t in &exp.tuples {
            let pp = t.phrase_type.as_deref() == Some("PP");
            ensure!(t.preposition.is_some() == pp, "expansion {i}: coupling broken in {t:?}");
        }
        tuples += exp.tuples.len();
    }
    ensure!(tuples > 0, "no tuples generated");
    Ok(())
}

fn round_trips() -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..200 {
        let n = r.random_range(0..40);
        let records = gen::random_records(&mut r, n);
        let mut buf = Vec::new();
        write_instance_file(&records, &mut buf).map_err(|e| e.to_string())?;
        ensure!(read_instance_file(buf.as_slice()).map_err(|e| e.to_string())? == records, "instance file");

        let senses = r.random_range(0..20);
        let inv = gen::random_inventory(&mut r, "through", senses);
        let mut buf = Vec::new();
        save_inventory(&inv, &mut buf).map_err(|e| e.to_string())?;
        ensure!(load_inventory(buf.as_slice(), "through").map_err(|e| e.to_string())? == inv, "senses file");

        let ids: Vec<String> = (0..r.random_range(0..30)).map(|i| format!("{}-{}", 500 + i, i)).collect();
        let mut tags = gen::random_tagset(&mut r, &inv, &ids);
        tags.version = r.random_range(0..5);
        let mut buf = Vec::new();
        write_tags(&tags, &mut buf).map_err(|e| e.to_string())?;
        ensure!(read_tags(buf.as_slice(), "through").map_err(|e| e.to_string())? == tags, "tags file");

        let n = r.random_range(0..40);
        let tuples = gen::random_tuples(&mut r, n);
        let mut buf = Vec::new();
        write_expansion(&tuples, &mut buf).map_err(|e| e.to_string())?;
        ensure!(read_expansion(buf.as_slice()).map_err(|e| e.to_string())? == tuples, "expansion file");
    }
    Ok(())
}

fn gold_set() -> Check {
    let inv = fixtures::inventory("through");
    let gold = fixtures::gold();
    ensure!(gold.len() == 30, "{} gold items", gold.len());
    let base = fixtures::lexicon();
    let rules = compile_rules(&inv, &base);
    let first: Vec<_> = gold
        .iter()
        .map(|(ctx, _)| disambiguate(&rules, &base, ctx).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let correct = gold.iter().zip(&first).filter(|((_, want), got)| got[0].sense == *want).count();
    ensure!(correct == 30, "{correct}/30 correct");
    for run in 0..10 {
        let rules = compile_rules(&inv, &base);
        for ((ctx, _), want) in gold.iter().zip(&first) {
            ensure!(&disambiguate(&rules, &base, ctx).unwrap() == want, "run {run} differs");
        }
    }
    let mut rows = fixtures::lexicon_rows();
    let mut r = ChaCha8Rng::seed_from_u64(104);
    for perm in 0..10 {
        rows.shuffle(&mut r);
        let mut lex = LexiconOracle::new();
        for (c, l, p) in &rows {
            lex.add(c, l, p.parse().map_err(|e| format!("{e:?}"))?);
        }
        let rules = compile_rules(&inv, &lex);
        for ((ctx, _), want) in gold.iter().zip(&first) {
            ensure!(&disambiguate(&rules, &lex, ctx).unwrap() == want, "permutation {perm} differs");
        }
    }
    Ok(())
}

fn subsense_keying() -> Check {
    let mut inv = fixtures::inventory("through");
    let fields = inv.senses()[0].fields.clone();
    let added = inv.add_subsense(&OdeKey::core(1), fields).map_err(|e| e.to_string())?;
    ensure!(added.ode.to_string() == "(1e)", "got {added}");
    let core = core_of(&key("2 (1a)"));
    ensure!(core.to_string() == "(1)", "core_of gave {core}");
    Ok(())
}

fn digraph() -> Check {
    let file = std::fs::File::open(fixtures::data("definitions.tsv")).map_err(|e| e.to_string())?;
    let defs = read_definitions(std::io::BufReader::new(file)).map_err(|e| e.to_string())?;
    let graph = build_digraph(&defs, &fixtures::prepositions());
    let degrees = graph.in_degrees();
    let (by, through) = (degrees.get("by").copied(), degrees.get("through").copied());
    ensure!(by == Some(18) && through == Some(6), "by={by:?} through={through:?}");
    Ok(())
}

fn durability() -> Check {
    let client = reqwest::blocking::Client::new();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let project = fixtures::copy_project(dir.path());
    let corpus = prepwb_core::load_corpus(fixtures::root().join("corpus")).map_err(|e| e.to_string())?;
    let tags = fixtures::tags("through");
    let mut ids: Vec<String> = extract_instances(&corpus, "through")
        .iter()
        .filter(|r| r.is_taggable())
        .map(|r| r.instance_id())
        .filter(|id| tags.get(id).is_none())
        .collect();
    ids.dedup();
    let senses = ["(1)", "(1a)", "(1b)", "(1c)", "(1d)"];
    for trial in 0..5 {
        let id = &ids[trial % ids.len()];
        let server = Server::start(bin(), &project)?;
        let url = server.url("/api/prepositions/through/tags");
        let current: Value = client.get(&url).send().and_then(|r| r.json()).map_err(|e| e.to_string())?;
        let version = current["version"].as_u64().ok_or("no version")?;
        let resp = client
            .post(&url)
            .json(&json!({"version": version, "ids": [id], "sense_keys": [senses[trial]]}))
            .send()
            .map_err(|e| e.to_string())?;
        ensure!(resp.status().is_success(), "trial {trial}: POST returned {}", resp.status());
        server.kill();

        let server = Server::start(bin(), &project)?;
        let after: Value = client
            .get(server.url("/api/prepositions/through/tags"))
            .send()
            .and_then(|r| r.json())
            .map_err(|e| e.to_string())?;
        let tag = after["tags"]
            .as_array()
            .and_then(|ts| ts.iter().find(|t| t["instance_id"] == id.as_str()))
            .ok_or_else(|| format!("trial {trial}: tag for {id} lost"))?;
        let expected = fixtures::inventory("through").resolve(senses[trial]).unwrap().key.to_string();
        ensure!(tag["sense_keys"] == json!([expected]), "trial {trial}: {tag}");
        ensure!(after["version"] == version + 1, "trial {trial}: version {}", after["version"]);
        server.kill();
    }
    Ok(())
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Check); 11] = [
        ("by_instance_file_exact", by_instance_file),
        ("extraction_equals_exhaustive_oracle", extraction_oracle),
        ("through_pairs_by_sense", through_pairs),
        ("through_roadways_units", roadways_units),
        ("arriving_realization_tuples", arriving_tuples),
        ("expansion_uniqueness_and_coupling", expansion_properties),
        ("persisted_formats_round_trip", round_trips),
        ("disambiguation_gold_and_determinism", gold_set),
        ("subsense_keying", subsense_keying),
        ("digraph_edge_counts", digraph),
        ("service_durability_after_kill", durability),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in checks {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let ms = started.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("PASS {name} ({ms} ms)"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name} ({ms} ms): {e}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
