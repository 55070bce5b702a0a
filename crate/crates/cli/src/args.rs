//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "prepwb",
    version,
    about = "Preposition sense workbench: extract instances, manage sense inventories, tag, analyze, disambiguate",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Project file (TOML) supplying corpus, data and preposition-list paths.
    #[arg(long, global = true, env = "PREPWB_PROJECT", value_name = "FILE")]
    pub project: Option<PathBuf>,
    /// Corpus root directory; overrides the project file.
    #[arg(long, global = true, value_name = "DIR")]
    pub corpus: Option<PathBuf>,
    /// Data directory with inventories, tags and lexicons; overrides the project file.
    #[arg(long, global = true, env = "PREPWB_DATA_DIR", value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// Preposition list, one entry per line; overrides the project file.
    #[arg(long, global = true, value_name = "FILE")]
    pub prepositions: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load the corpus and report malformed files.
    IngestCheck,
    /// Write the instance file for one preposition.
    Extract {
        #[arg(long)]
        prep: String,
        /// Output file; standard output when absent.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Show or edit a sense inventory.
    #[command(subcommand, arg_required_else_help = true)]
    Senses(SensesCommand),
    /// Assign senses to instances and report progress.
    #[command(subcommand, arg_required_else_help = true)]
    Tag(TagCommand),
    /// Semantic role analyses over tagged instances.
    #[command(subcommand, arg_required_else_help = true)]
    Analyze(AnalyzeCommand),
    /// Rank the senses of a preposition for a pre-analyzed context.
    Disambiguate {
        #[arg(long)]
        prep: String,
        /// Complement head as lemma.pos, e.g. tunnel.n
        #[arg(long)]
        complement: String,
        /// Attachment head as lemma.pos, e.g. move.v
        #[arg(long)]
        attachment: String,
        #[arg(long)]
        kind: String,
        /// Category lexicon; defaults to categories.tsv in the data directory.
        #[arg(long, value_name = "FILE")]
        lexicon: Option<PathBuf>,
    },
    /// Definition digraph and sense hierarchy.
    #[command(subcommand, arg_required_else_help = true)]
    Network(NetworkCommand),
    /// Run the HTTP service.
    Serve {
        /// host:port; overrides the project file.
        #[arg(long, value_name = "ADDR")]
        listen: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SensesCommand {
    /// Print the inventory as TSV.
    List {
        #[arg(long)]
        prep: String,
    },
    /// Append a lettered subsense under a core sense.
    AddSubsense {
        #[arg(long)]
        prep: String,
        /// Core sense, e.g. "(1)" or "1 (1)".
        #[arg(long)]
        parent: String,
        /// Sense fields as JSON, or @FILE to read them from a file.
        #[arg(long, value_name = "JSON")]
        fields: String,
    },
    /// Append a new core sense.
    Add {
        #[arg(long)]
        prep: String,
        #[arg(long, value_name = "JSON")]
        fields: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum TagCommand {
    /// Tag instances with one or more senses.
    Assign {
        #[arg(long)]
        prep: String,
        /// Instance id (sentence-offset); repeatable.
        #[arg(long = "id", required = true, value_name = "ID")]
        ids: Vec<String>,
        /// Sense key or reference; repeatable.
        #[arg(long = "sense", required = true, value_name = "SENSE")]
        senses: Vec<String>,
        #[arg(long, default_value = "lexicographer")]
        tagger: String,
        #[arg(long)]
        note: Option<String>,
    },
    /// Remove tags.
    Remove {
        #[arg(long)]
        prep: String,
        #[arg(long = "id", required = true, value_name = "ID")]
        ids: Vec<String>,
    },
    /// Tagged and total instance counts with per-sense counts.
    Progress {
        #[arg(long)]
        prep: String,
    },
    /// Instances grouped by frame, frame element and lexical unit.
    Groups {
        #[arg(long)]
        prep: String,
    },
}

/// Seed selection for realization analyses: the pairs of a tagged sense,
/// or explicit pairs.
#[derive(Debug, Args)]
pub struct Seeds {
    #[arg(long)]
    pub prep: Option<String>,
    #[arg(long, requires = "prep", conflicts_with = "pairs")]
    pub sense: Option<String>,
    /// Frame:FrameElement; repeatable.
    #[arg(long = "pair", value_name = "FRAME:FE")]
    pub pairs: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Frame/frame element pairs per sense.
    Pairs {
        #[arg(long)]
        prep: String,
    },
    /// Lexical units per pair for one sense.
    Units {
        #[arg(long)]
        prep: String,
        #[arg(long)]
        sense: String,
    },
    /// All realizations of the seed pairs in the corpus.
    Expand(Seeds),
    /// Other prepositions realizing the seed pairs.
    Subst(Seeds),
    /// Alternation patterns of the seed pairs by part of speech.
    Patterns(Seeds),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum NetworkCommand {
    /// Gloss digraph from the definitions table.
    Digraph {
        /// Defaults to definitions.tsv in the data directory.
        #[arg(long, value_name = "FILE")]
        definitions: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "tsv")]
        format: GraphFormat,
    },
    /// Core senses with their subsenses.
    Tree {
        #[arg(long)]
        prep: String,
    },
}
