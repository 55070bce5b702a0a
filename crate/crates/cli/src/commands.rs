use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use prepwb_core::analysis::{
    alternation_patterns, expand_realizations, lexical_units_by_pair, pairs_by_sense, substitutable_prepositions,
    write_expansion, write_pairs_by_sense, write_patterns, write_substitutes, write_units_by_pair, FramePair,
};
use prepwb_core::corpus::load_corpus_report;
use prepwb_core::disambig::{compile_rules, disambiguate, write_ranking, AttachmentKind, DisambiguationContext};
use prepwb_core::instances::write_instance_file;
use prepwb_core::inventory::{save_inventory, SenseFields};
use prepwb_core::network::{build_digraph, hierarchy, write_dot, write_edges, write_hierarchy};
use prepwb_core::tagging::{group_instances, progress, write_groups, write_progress};
use prepwb_core::{extract_instances, Corpus, InstanceRecord, PrepositionList};
use thiserror::Error;

use crate::args::{AnalyzeCommand, Cli, Command, GraphFormat, NetworkCommand, Seeds, SensesCommand, TagCommand};
use crate::ops::{resolve_senses, sense_pairs, unknown_ids};
use crate::project::{
    load_preposition_list, ConfigError, DataDir, DataError, ProjectConfig, DEFAULT_LISTEN, PREPOSITIONS_FILE,
};
use crate::service;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 1 on usage errors, 2 on data errors.
pub fn run_command<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "prepwb: {e}");
            e.exit_code()
        }
    }
}

/// Paths after merging the project file with command-line overrides.
struct Context {
    corpus: Option<PathBuf>,
    data_dir: Option<PathBuf>,
    prepositions: Option<PathBuf>,
    listen: Option<String>,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, CliError> {
        let project = cli.project.as_ref().map(ProjectConfig::load).transpose()?;
        Ok(Context {
            corpus: cli.corpus.clone().or_else(|| project.as_ref().map(|p| p.corpus_root.clone())),
            data_dir: cli.data_dir.clone().or_else(|| project.as_ref().map(|p| p.data_dir.clone())),
            prepositions: cli
                .prepositions
                .clone()
                .or_else(|| project.as_ref().map(|p| p.preposition_list_file.clone())),
            listen: project.map(|p| p.listen_address),
        })
    }

    fn corpus_root(&self) -> Result<&Path, CliError> {
        self.corpus
            .as_deref()
            .ok_or_else(|| CliError::Usage("no corpus: pass --corpus or --project".into()))
    }

    fn corpus(&self, err: &mut dyn Write) -> Result<Corpus, CliError> {
        let root = self.corpus_root()?;
        let report = load_corpus_report(root).map_err(data_err)?;
        if !report.errors.is_empty() {
            for e in &report.errors {
                writeln!(err, "{e}")?;
            }
            return Err(CliError::Data(format!("{} malformed corpus file(s)", report.errors.len())));
        }
        Ok(report.corpus)
    }

    fn data(&self) -> Result<DataDir, CliError> {
        self.data_dir
            .as_ref()
            .map(DataDir::new)
            .ok_or_else(|| CliError::Usage("no data directory: pass --data-dir or --project".into()))
    }

    fn preposition_list_path(&self) -> Result<PathBuf, CliError> {
        if let Some(p) = &self.prepositions {
            return Ok(p.clone());
        }
        Ok(self.data()?.root().join(PREPOSITIONS_FILE))
    }

    fn preposition_list(&self) -> Result<PrepositionList, CliError> {
        Ok(load_preposition_list(&self.preposition_list_path()?)?)
    }

    fn records(&self, prep: &str, err: &mut dyn Write) -> Result<Vec<InstanceRecord>, CliError> {
        Ok(extract_instances(&self.corpus(err)?, prep))
    }
}

fn emit(out: &mut dyn Write, f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    out.write_all(&buf)?;
    Ok(())
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Context::new(&cli)?;
    match cli.command {
        Command::IngestCheck => ingest_check(&ctx, out, err),
        Command::Extract { prep, out: path } => {
            let records = ctx.records(&prep, err)?;
            match path {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_instance_file(&records, &mut buf)?;
                    fs::write(&path, buf).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                    writeln!(err, "wrote {} records to {}", records.len(), path.display())?;
                    Ok(())
                }
                None => emit(out, |b| write_instance_file(&records, b).map(drop)),
            }
        }
        Command::Senses(cmd) => senses(&ctx, cmd, out),
        Command::Tag(cmd) => tag(&ctx, cmd, out, err),
        Command::Analyze(cmd) => analyze(&ctx, cmd, out, err),
        Command::Disambiguate {
            prep,
            complement,
            attachment,
            kind,
            lexicon,
        } => {
            let data = ctx.data()?;
            let inv = data.inventory(&prep)?;
            let oracle = data.lexicon(lexicon.as_deref())?;
            let context = DisambiguationContext {
                preposition: prep,
                complement_head: complement.parse().map_err(|e| CliError::Usage(format!("--complement: {e}")))?,
                attachment_head: attachment.parse().map_err(|e| CliError::Usage(format!("--attachment: {e}")))?,
                attachment_kind: kind
                    .parse::<AttachmentKind>()
                    .map_err(|e| CliError::Usage(format!("--kind: {e}")))?,
            };
            let rules = compile_rules(&inv, &oracle);
            for w in &rules.warnings {
                writeln!(err, "warning: {w}")?;
            }
            let ranking = disambiguate(&rules, &oracle, &context).map_err(data_err)?;
            emit(out, |b| write_ranking(&ranking, b))
        }
        Command::Network(cmd) => network(&ctx, cmd, out),
        Command::Serve { listen } => {
            let config = ProjectConfig {
                corpus_root: ctx.corpus_root()?.to_path_buf(),
                data_dir: ctx.data()?.root().to_path_buf(),
                listen_address: listen.or(ctx.listen.clone()).unwrap_or_else(|| DEFAULT_LISTEN.into()),
                preposition_list_file: ctx.preposition_list_path()?,
            };
            service::run(&config, out).map_err(data_err)
        }
    }
}

fn ingest_check(ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let report = load_corpus_report(ctx.corpus_root()?).map_err(data_err)?;
    for e in &report.errors {
        writeln!(err, "{e}")?;
    }
    writeln!(out, "files\t{}", report.files_scanned)?;
    writeln!(out, "lexical_units\t{}", report.corpus.lexical_units.len())?;
    writeln!(out, "sentences\t{}", report.corpus.sentence_count())?;
    writeln!(out, "errors\t{}", report.errors.len())?;
    if report.errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Data(format!("{} malformed corpus file(s)", report.errors.len())))
    }
}

fn parse_fields(raw: &str) -> Result<SenseFields, CliError> {
    let text = match raw.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::Data(format!("{path}: {e}")))?,
        None => raw.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("--fields: {e}")))
}

fn senses(ctx: &Context, cmd: SensesCommand, out: &mut dyn Write) -> Result<(), CliError> {
    let data = ctx.data()?;
    match cmd {
        SensesCommand::List { prep } => {
            let inv = data.inventory(&prep)?;
            emit(out, |b| save_inventory(&inv, b))
        }
        SensesCommand::AddSubsense { prep, parent, fields } => {
            let mut inv = data.inventory(&prep)?;
            let fields = parse_fields(&fields)?;
            let parent = inv
                .resolve(&parent)
                .map(|s| s.key)
                .ok_or_else(|| CliError::Data(format!("no sense {parent:?} for {prep}")))?;
            let key = inv.add_subsense(&parent.ode, fields).map_err(data_err)?;
            data.save_inventory(&inv)?;
            writeln!(out, "{key}")?;
            Ok(())
        }
        SensesCommand::Add { prep, fields } => {
            let mut inv = data.inventory(&prep)?;
            let key = inv.add_sense(parse_fields(&fields)?).map_err(data_err)?;
            data.save_inventory(&inv)?;
            writeln!(out, "{key}")?;
            Ok(())
        }
    }
}

fn tag(ctx: &Context, cmd: TagCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let data = ctx.data()?;
    match cmd {
        TagCommand::Assign {
            prep,
            ids,
            senses,
            tagger,
            note,
        } => {
            let inv = data.inventory(&prep)?;
            let mut tags = data.tags(&prep)?;
            let keys = resolve_senses(&inv, &senses).map_err(|r| CliError::Data(format!("no sense {r:?} for {prep}")))?;
            let missing = unknown_ids(&ctx.records(&prep, err)?, &ids);
            if !missing.is_empty() {
                return Err(CliError::Data(format!("unknown instance ids: {}", missing.join(", "))));
            }
            let outcome = tags
                .assign(&ids, &keys, &inv, &tagger, note.as_deref())
                .map_err(data_err)?;
            if outcome.created + outcome.overwritten > 0 {
                data.save_tags(&tags)?;
            }
            writeln!(
                out,
                "created\t{}\noverwritten\t{}\nunchanged\t{}\nversion\t{}",
                outcome.created, outcome.overwritten, outcome.unchanged, tags.version
            )?;
            Ok(())
        }
        TagCommand::Remove { prep, ids } => {
            data.inventory(&prep)?;
            let mut tags = data.tags(&prep)?;
            let removed = ids.iter().collect::<BTreeSet<_>>().into_iter().filter(|id| tags.remove(id)).count();
            if removed > 0 {
                data.save_tags(&tags)?;
            }
            writeln!(out, "removed\t{removed}\nversion\t{}", tags.version)?;
            Ok(())
        }
        TagCommand::Progress { prep } => {
            data.inventory(&prep)?;
            let tags = data.tags(&prep)?;
            let p = progress(&tags, &ctx.records(&prep, err)?);
            emit(out, |b| write_progress(&p, b))
        }
        TagCommand::Groups { prep } => {
            let groups = group_instances(&ctx.records(&prep, err)?);
            emit(out, |b| write_groups(&groups, b))
        }
    }
}

fn parse_pairs(raw: &[String]) -> Result<Vec<FramePair>, CliError> {
    raw.iter()
        .map(|p| p.parse().map_err(|e| CliError::Usage(format!("--pair {p:?}: {e}"))))
        .collect()
}

/// The seed pairs named by `--pair`, or those tagged with `--sense`.
fn seed_pairs(ctx: &Context, seeds: &Seeds, corpus: &Corpus) -> Result<Vec<FramePair>, CliError> {
    if !seeds.pairs.is_empty() {
        return parse_pairs(&seeds.pairs);
    }
    let (Some(prep), Some(sense)) = (&seeds.prep, &seeds.sense) else {
        return Err(CliError::Usage("pass --prep with --sense, or one or more --pair".into()));
    };
    let data = ctx.data()?;
    let inv = data.inventory(prep)?;
    let key = resolve_senses(&inv, std::slice::from_ref(sense))
        .map_err(|r| CliError::Data(format!("no sense {r:?} for {prep}")))?[0];
    let records = extract_instances(corpus, prep);
    sense_pairs(&data.tags(prep)?, &records, &key).map_err(data_err)
}

fn analyze(ctx: &Context, cmd: AnalyzeCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        AnalyzeCommand::Pairs { prep } => {
            let data = ctx.data()?;
            let inv = data.inventory(&prep)?;
            let rows = pairs_by_sense(&data.tags(&prep)?, &ctx.records(&prep, err)?).map_err(data_err)?;
            emit(out, |b| write_pairs_by_sense(&rows, Some(&inv), b))
        }
        AnalyzeCommand::Units { prep, sense } => {
            let data = ctx.data()?;
            let inv = data.inventory(&prep)?;
            let key = resolve_senses(&inv, &[sense]).map_err(|r| CliError::Data(format!("no sense {r:?} for {prep}")))?[0];
            let map = lexical_units_by_pair(&data.tags(&prep)?, &ctx.records(&prep, err)?, &key).map_err(data_err)?;
            emit(out, |b| write_units_by_pair(&map, b))
        }
        AnalyzeCommand::Expand(seeds) | AnalyzeCommand::Subst(seeds) | AnalyzeCommand::Patterns(seeds)
            if seeds.pairs.is_empty() && seeds.sense.is_none() =>
        {
            Err(CliError::Usage("pass --prep with --sense, or one or more --pair".into()))
        }
        AnalyzeCommand::Subst(Seeds { prep: None, .. }) => Err(CliError::Usage("subst needs --prep".into())),
        AnalyzeCommand::Expand(seeds) => {
            let (exp, _) = expansion(ctx, &seeds, err)?;
            emit(out, |b| write_expansion(&exp, b))
        }
        AnalyzeCommand::Subst(seeds) => {
            let (exp, pairs) = expansion(ctx, &seeds, err)?;
            let study = seeds.prep.as_deref().unwrap_or_default();
            let subs = substitutable_prepositions(&exp, &pairs, study);
            emit(out, |b| write_substitutes(&subs, b))
        }
        AnalyzeCommand::Patterns(seeds) => {
            let (exp, _) = expansion(ctx, &seeds, err)?;
            let patterns = alternation_patterns(&exp).map_err(data_err)?;
            emit(out, |b| write_patterns(&patterns, b))
        }
    }
}

type Tuples = Vec<prepwb_core::analysis::RealizationTuple>;

fn expansion(ctx: &Context, seeds: &Seeds, err: &mut dyn Write) -> Result<(Tuples, Vec<FramePair>), CliError> {
    let corpus = ctx.corpus(err)?;
    let pairs = seed_pairs(ctx, seeds, &corpus)?;
    let preps = ctx.preposition_list()?;
    let set: BTreeSet<FramePair> = pairs.iter().cloned().collect();
    let exp = expand_realizations(&corpus, &set, &preps);
    for d in &exp.diagnostics {
        writeln!(
            err,
            "warning: {} sentence {} [{}, {}): {}",
            d.lexical_unit, d.sentence_id, d.start, d.end, d.problem
        )?;
    }
    Ok((exp.tuples, pairs))
}

fn network(ctx: &Context, cmd: NetworkCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        NetworkCommand::Digraph { definitions, format } => {
            let defs = match &definitions {
                Some(path) => DataDir::new(".").definitions(Some(path))?,
                None => ctx.data()?.definitions(None)?,
            };
            let graph = build_digraph(&defs, &ctx.preposition_list()?);
            match format {
                GraphFormat::Dot => emit(out, |b| write_dot(&graph, b)),
                GraphFormat::Tsv => emit(out, |b| write_edges(&graph, b)),
            }
        }
        NetworkCommand::Tree { prep } => {
            let inv = ctx.data()?.inventory(&prep)?;
            let trees = hierarchy(&inv).map_err(data_err)?;
            emit(out, |b| write_hierarchy(&trees, b))
        }
    }
}
