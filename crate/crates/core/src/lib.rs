//! Core library of the preposition sense workbench.
//!
//! The pipeline runs from a FrameNet-style corpus of lexical-unit files to a
//! tagged gold-standard of preposition instances and the analyses built on top
//! of it:
//!
//! - [`corpus`]: lexical units, subcorpora and annotated sentences, loaded from XML.
//! - [`instances`]: per-preposition instance files extracted from the corpus.
//! - [`inventory`]: preposition sense inventories with core senses and lettered subsenses.
//! - [`tagging`]: sense assignments for instances, grouping and progress.
//! - [`analysis`]: Frame:FE pairs per sense, realization expansion, substitutable
//!   prepositions and alternation patterns.
//! - [`disambig`]: rule-based sense selection against a lexical category oracle.
//! - [`network`]: the definition digraph and the core/subsense hierarchy.

pub mod analysis;
pub mod corpus;
pub mod disambig;
pub mod instances;
pub mod inventory;
pub mod network;
pub mod preps;
pub mod tagging;
pub mod text;
pub mod tsv;

pub use corpus::{load_corpus, parse_subcorpus_name, Corpus, LexicalUnit, PartOfSpeech};
pub use instances::{extract_instances, InstanceRecord};
pub use inventory::{Inventory, OdeKey, SenseKey, SenseRecord};
pub use preps::PrepositionList;
pub use tagging::TagSet;
pub use tsv::TsvError;
