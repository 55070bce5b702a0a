//! Rule-based sense selection.
//!
//! Each sense compiles to a rule with up to three constraint slots: complement
//! categories, attachment categories, and the kind of word the phrase
//! attaches to. Slots are conjunctive; categories within a slot are
//! disjunctive. Category membership comes from a [`CategoryOracle`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::{split_lexical_unit, PartOfSpeech};
use crate::inventory::{Inventory, SenseKey};
use crate::tsv::{self, TsvError};

pub const LEXICON_HEADER: &str = "CategoryId\tLemma\tPos";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttachmentKind {
    Verb,
    Noun,
    Adjective,
    Copula,
}

impl AttachmentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttachmentKind::Verb => "verb",
            AttachmentKind::Noun => "noun",
            AttachmentKind::Adjective => "adjective",
            AttachmentKind::Copula => "copula",
        }
    }
}

impl fmt::Display for AttachmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown attachment kind {0:?} (expected verb, noun, adjective or copula)")]
pub struct UnknownKind(pub String);

impl FromStr for AttachmentKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "verb" => Ok(AttachmentKind::Verb),
            "noun" => Ok(AttachmentKind::Noun),
            "adjective" => Ok(AttachmentKind::Adjective),
            "copula" => Ok(AttachmentKind::Copula),
            other => Err(UnknownKind(other.to_string())),
        }
    }
}

/// Lexical category membership.
pub trait CategoryOracle: Send + Sync {
    fn member(&self, lemma: &str, pos: PartOfSpeech, category: &str) -> bool;
    fn known(&self, category: &str) -> bool;
}

/// Category membership read from a `CategoryId\tLemma\tPos` table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexiconOracle {
    members: HashSet<(String, String, PartOfSpeech)>,
    sizes: BTreeMap<String, usize>,
}

impl LexiconOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, category: &str, lemma: &str, pos: PartOfSpeech) {
        if self.members.insert((category.to_string(), lemma.to_string(), pos)) {
            *self.sizes.entry(category.to_string()).or_insert(0) += 1;
        }
    }

    /// Category ids with their member counts.
    pub fn categories(&self) -> &BTreeMap<String, usize> {
        &self.sizes
    }
}

impl CategoryOracle for LexiconOracle {
    fn member(&self, lemma: &str, pos: PartOfSpeech, category: &str) -> bool {
        self.members
            .contains(&(category.to_string(), lemma.to_string(), pos))
    }

    fn known(&self, category: &str) -> bool {
        self.sizes.contains_key(category)
    }
}

fn content_pos(raw: &str) -> Option<PartOfSpeech> {
    match raw.parse() {
        Ok(p @ (PartOfSpeech::V | PartOfSpeech::N | PartOfSpeech::A)) => Some(p),
        _ => None,
    }
}

/// Reads a category lexicon. The header line is optional.
pub fn oracle_from_lexicon<R: BufRead>(source: R) -> Result<LexiconOracle, TsvError> {
    let lines = tsv::read_lines(source)?;
    let mut oracle = LexiconOracle::new();
    for line in lines {
        if line.text.trim().is_empty() || line.text.starts_with('#') {
            continue;
        }
        if line.number == 1 && line.text == LEXICON_HEADER {
            continue;
        }
        let c = line.cells(3)?;
        let n = line.number;
        if c[0].is_empty() || !c[0].chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
            return Err(TsvError::row(n, format!("bad category id {:?}", c[0])));
        }
        if c[1].is_empty() {
            return Err(TsvError::row(n, "empty lemma"));
        }
        let pos = content_pos(c[2]).ok_or_else(|| TsvError::row(n, format!("pos must be v, n or a, got {:?}", c[2])))?;
        oracle.add(c[0], c[1], pos);
    }
    Ok(oracle)
}

/// A lemma with its part of speech, written `tunnel.n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Head {
    pub lemma: String,
    pub pos: PartOfSpeech,
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.lemma, self.pos)
    }
}

impl FromStr for Head {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match split_lexical_unit(s) {
            Some((lemma, pos)) if content_pos(pos.as_str()).is_some() => Ok(Head {
                lemma: lemma.to_string(),
                pos,
            }),
            _ => Err(format!("expected <lemma>.<v|n|a>, got {s:?}")),
        }
    }
}

impl Serialize for Head {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Head {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A pre-analyzed preposition occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisambiguationContext {
    pub preposition: String,
    pub complement_head: Head,
    pub attachment_head: Head,
    pub attachment_kind: AttachmentKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SenseRule {
    pub sense: SenseKey,
    pub complement_categories: Vec<String>,
    pub attachment_categories: Vec<String>,
    pub required_attachment_kind: Option<AttachmentKind>,
    /// No constraints at all: matches anything with score 0.
    pub catch_all: bool,
}

impl SenseRule {
    fn slot_count(&self) -> usize {
        usize::from(!self.complement_categories.is_empty())
            + usize::from(!self.attachment_categories.is_empty())
            + usize::from(self.required_attachment_kind.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleSet {
    pub preposition: String,
    pub rules: Vec<SenseRule>,
    /// Category ids the oracle does not know, one message each.
    pub warnings: Vec<String>,
}

/// One rule per sense, in inventory order. `kind:<k>` attachment entries
/// become the required attachment kind.
pub fn compile_rules(inventory: &Inventory, oracle: &dyn CategoryOracle) -> RuleSet {
    let mut warnings = Vec::new();
    let rules = inventory
        .senses()
        .iter()
        .map(|s| {
            let mut kind = None;
            let mut attachment = Vec::new();
            for cat in &s.fields.attachment_properties.categories {
                match cat.strip_prefix("kind:") {
                    Some(k) => kind = k.parse().ok(),
                    None => attachment.push(cat.clone()),
                }
            }
            let complement = s.fields.complement_properties.categories.clone();
            for cat in complement.iter().chain(&attachment) {
                if !oracle.known(cat) {
                    warnings.push(format!("sense {}: category {cat:?} is unknown to the lexicon", s.key));
                }
            }
            let catch_all = complement.is_empty() && attachment.is_empty() && kind.is_none();
            SenseRule {
                sense: s.key,
                complement_categories: complement,
                attachment_categories: attachment,
                required_attachment_kind: kind,
                catch_all,
            }
        })
        .collect();
    RuleSet {
        preposition: inventory.preposition().to_string(),
        rules,
        warnings,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedSense {
    pub sense: SenseKey,
    pub score: usize,
    /// Every constraint slot of the rule is satisfied.
    pub full_match: bool,
    /// Satisfied constraints as `complement:<cat>`, `attachment:<cat>`, `kind:<k>`.
    pub matched_constraints: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DisambigError {
    #[error("unknown preposition {0:?}")]
    UnknownPreposition(String),
    #[error("rules are for {rules:?} but the context is for {context:?}")]
    PrepositionMismatch { rules: String, context: String },
}

/// Ranks every sense for `ctx`: fully matching rules by score (ties in
/// inventory order), then catch-all rules, then the remaining rules by how
/// many of their slots hold.
pub fn disambiguate(
    rules: &RuleSet,
    oracle: &dyn CategoryOracle,
    ctx: &DisambiguationContext,
) -> Result<Vec<RankedSense>, DisambigError> {
    if rules.rules.is_empty() {
        return Err(DisambigError::UnknownPreposition(ctx.preposition.clone()));
    }
    if rules.preposition != ctx.preposition {
        return Err(DisambigError::PrepositionMismatch {
            rules: rules.preposition.clone(),
            context: ctx.preposition.clone(),
        });
    }
    let mut scored: Vec<(u8, usize, usize, RankedSense)> = rules
        .rules
        .iter()
        .enumerate()
        .map(|(order, rule)| {
            let mut matched = Vec::new();
            let mut satisfied = 0;
            let head_slot = |cats: &[String], head: &Head, tag: &str, matched: &mut Vec<String>| {
                let hits: Vec<String> = cats
                    .iter()
                    .filter(|c| oracle.member(&head.lemma, head.pos, c))
                    .map(|c| format!("{tag}:{c}"))
                    .collect();
                let ok = !hits.is_empty();
                matched.extend(hits);
                ok
            };
            if !rule.complement_categories.is_empty()
                && head_slot(&rule.complement_categories, &ctx.complement_head, "complement", &mut matched)
            {
                satisfied += 1;
            }
            if !rule.attachment_categories.is_empty()
                && head_slot(&rule.attachment_categories, &ctx.attachment_head, "attachment", &mut matched)
            {
                satisfied += 1;
            }
            if rule.required_attachment_kind == Some(ctx.attachment_kind) {
                satisfied += 1;
                matched.push(format!("kind:{}", ctx.attachment_kind));
            }
            let full = satisfied == rule.slot_count();
            let tier = match (rule.catch_all, full) {
                (false, true) => 0,
                (true, _) => 1,
                (false, false) => 2,
            };
            (
                tier,
                satisfied,
                order,
                RankedSense {
                    sense: rule.sense,
                    score: satisfied,
                    full_match: full,
                    matched_constraints: matched,
                },
            )
        })
        .collect();
    scored.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    Ok(scored.into_iter().map(|(_, _, _, r)| r).collect())
}

pub const RANKING_HEADER: &str = "Rank\tSense\tScore\tFullMatch\tMatched";

pub fn write_ranking<W: Write>(ranking: &[RankedSense], mut sink: W) -> io::Result<()> {
    let mut out = String::from(RANKING_HEADER);
    out.push('\n');
    for (i, r) in ranking.iter().enumerate() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            i + 1,
            r.sense,
            r.score,
            if r.full_match { "yes" } else { "no" },
            r.matched_constraints.join(", ")
        ));
    }
    sink.write_all(out.as_bytes())
}
