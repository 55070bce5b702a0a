//! Preposition sense inventories.
//!
//! A sense is keyed by an ordinal plus its dictionary key, rendered
//! `2 (1a)`. Core senses have a bare number; subsenses add one lowercase
//! letter. Ordinals are only ever appended, so existing tags stay valid.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::disambig::AttachmentKind;
use crate::tsv::{self, escape, join_list, split_list, unescape, TsvError};

pub const SENSES_HEADER: &str = "Sense\tRelationName\tQuirkSyntax\tQuirkParagraphs\tComplementProperties\tAttachmentProperties\tSimilarPreps\tComplementCats\tAttachmentCats\tOrigin";

/// Sense counts of the twenty most polysemous prepositions.
pub const FOCUS_SENSE_COUNTS: [(&str, usize); 20] = [
    ("about", 6),
    ("above", 9),
    ("after", 11),
    ("against", 10),
    ("around", 6),
    ("at", 12),
    ("by", 22),
    ("for", 14),
    ("from", 14),
    ("in", 11),
    ("into", 9),
    ("of", 18),
    ("on", 23),
    ("over", 16),
    ("through", 13),
    ("to", 17),
    ("towards", 6),
    ("under", 16),
    ("with", 16),
    ("within", 6),
];

/// Size of the full dictionary inventory.
pub const TOTAL_SENSES: usize = 847;
pub const TOTAL_PREPOSITIONS: usize = 373;

pub fn focus_sense_count(prep: &str) -> Option<usize> {
    FOCUS_SENSE_COUNTS
        .iter()
        .find(|(p, _)| *p == prep)
        .map(|(_, n)| *n)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid sense key {0:?}")]
pub struct KeyParseError(pub String);

/// Dictionary key such as `(1)` or `(1a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OdeKey {
    pub number: u32,
    pub letter: Option<char>,
}

impl OdeKey {
    pub fn core(number: u32) -> Self {
        OdeKey { number, letter: None }
    }

    pub fn is_core(&self) -> bool {
        self.letter.is_none()
    }

    pub fn to_core(self) -> Self {
        OdeKey::core(self.number)
    }

    /// Parses the body without parentheses, e.g. `1a`.
    fn parse_body(body: &str) -> Option<Self> {
        let (digits, letter) = match body.chars().last() {
            Some(c) if c.is_ascii_lowercase() => (&body[..body.len() - 1], Some(c)),
            _ => (body, None),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let number = digits.parse().ok().filter(|n| *n > 0)?;
        Some(OdeKey { number, letter })
    }
}

impl fmt::Display for OdeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.letter {
            Some(l) => write!(f, "({}{l})", self.number),
            None => write!(f, "({})", self.number),
        }
    }
}

impl FromStr for OdeKey {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .and_then(OdeKey::parse_body)
            .ok_or_else(|| KeyParseError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenseKey {
    pub ordinal: u32,
    pub ode: OdeKey,
}

impl SenseKey {
    pub fn new(ordinal: u32, ode: OdeKey) -> Self {
        SenseKey { ordinal, ode }
    }
}

/// The dictionary key of the core sense `key` belongs to.
pub fn core_of(key: &SenseKey) -> OdeKey {
    key.ode.to_core()
}

impl fmt::Display for SenseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.ordinal, self.ode)
    }
}

impl FromStr for SenseKey {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || KeyParseError(s.to_string());
        let (ordinal, ode) = s.split_once(' ').ok_or_else(err)?;
        if ordinal.is_empty() || !ordinal.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let ordinal = ordinal.parse().ok().filter(|n| *n > 0).ok_or_else(err)?;
        Ok(SenseKey {
            ordinal,
            ode: ode.parse().map_err(|_| err())?,
        })
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let raw = String::deserialize(d)?;
                raw.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(OdeKey);
string_serde!(SenseKey);
string_serde!(QuirkCode);

/// Syntactic-function codes: noun postmodifier (1), adverbial adjunct (2a),
/// subjunct (2b), disjunct (2c), conjunct (2d), verb complement (3a),
/// adjective complement (3b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuirkCode {
    Postmodifier,
    Adjunct,
    Subjunct,
    Disjunct,
    Conjunct,
    VerbComplement,
    AdjectiveComplement,
}

impl QuirkCode {
    pub const ALL: [QuirkCode; 7] = [
        QuirkCode::Postmodifier,
        QuirkCode::Adjunct,
        QuirkCode::Subjunct,
        QuirkCode::Disjunct,
        QuirkCode::Conjunct,
        QuirkCode::VerbComplement,
        QuirkCode::AdjectiveComplement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuirkCode::Postmodifier => "1",
            QuirkCode::Adjunct => "2a",
            QuirkCode::Subjunct => "2b",
            QuirkCode::Disjunct => "2c",
            QuirkCode::Conjunct => "2d",
            QuirkCode::VerbComplement => "3a",
            QuirkCode::AdjectiveComplement => "3b",
        }
    }
}

impl fmt::Display for QuirkCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuirkCode {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QuirkCode::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| KeyParseError(s.to_string()))
    }
}

/// Lexicographer's description plus machine-readable category ids.
///
/// Attachment categories may include `kind:<verb|noun|adjective|copula>`,
/// which constrains the kind of word the phrase attaches to.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Properties {
    pub text: String,
    #[serde(default)]
    pub categories: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SenseOrigin {
    Imported,
    SubsenseAdded,
    NewSenseAdded,
}

impl SenseOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            SenseOrigin::Imported => "imported",
            SenseOrigin::SubsenseAdded => "subsense_added",
            SenseOrigin::NewSenseAdded => "new_sense_added",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            SenseOrigin::Imported,
            SenseOrigin::SubsenseAdded,
            SenseOrigin::NewSenseAdded,
        ]
        .into_iter()
        .find(|o| o.as_str() == s)
    }
}

/// Everything about a sense except its key and origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenseFields {
    pub relation_name: String,
    pub quirk_syntax: Vec<QuirkCode>,
    #[serde(default)]
    pub quirk_paragraphs: Vec<String>,
    #[serde(default)]
    pub complement_properties: Properties,
    #[serde(default)]
    pub attachment_properties: Properties,
    #[serde(default)]
    pub similar_prepositions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SenseRecord {
    pub preposition: String,
    pub key: SenseKey,
    #[serde(flatten)]
    pub fields: SenseFields,
    pub origin: SenseOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InventoryError {
    #[error("no sense {0} in the inventory")]
    UnknownSense(String),
    #[error("sense {0} is a subsense; subsenses can only be added under a core sense")]
    NotCore(OdeKey),
    #[error("no subsense letters left after {0}")]
    LettersExhausted(OdeKey),
    #[error("{0}")]
    InvalidFields(String),
}

fn validate_fields(f: &SenseFields) -> Result<(), String> {
    let mut chars = f.relation_name.chars();
    let camel = chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric());
    if !camel {
        return Err(format!("relation name {:?} is not CamelCase", f.relation_name));
    }
    if f.quirk_syntax.is_empty() {
        return Err("at least one syntactic-function code is required".into());
    }
    if f.quirk_syntax.iter().collect::<HashSet<_>>().len() != f.quirk_syntax.len() {
        return Err("repeated syntactic-function code".into());
    }
    for p in &f.quirk_paragraphs {
        let ok = !p.is_empty()
            && p.split('.').all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit()));
        if !ok {
            return Err(format!("bad paragraph reference {p:?}"));
        }
    }
    for prep in &f.similar_prepositions {
        if prep.is_empty() || prep.trim() != prep || !prep.chars().all(|c| c.is_alphabetic() || c == ' ') {
            return Err(format!("bad similar preposition {prep:?}"));
        }
    }
    for (cats, attachment) in [
        (&f.complement_properties.categories, false),
        (&f.attachment_properties.categories, true),
    ] {
        for cat in cats {
            if let Some(kind) = cat.strip_prefix("kind:") {
                if !attachment {
                    return Err(format!("{cat:?} is only valid as an attachment category"));
                }
                kind.parse::<AttachmentKind>().map_err(|e| e.to_string())?;
            } else if cat.is_empty()
                || !cat.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(format!("bad category id {cat:?}"));
            }
        }
    }
    Ok(())
}

/// The ordered senses of one preposition plus the lexicographer's notes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inventory {
    preposition: String,
    senses: Vec<SenseRecord>,
    pub notes: String,
    pub summary: String,
}

impl Inventory {
    pub fn new(preposition: impl Into<String>) -> Self {
        Inventory {
            preposition: preposition.into(),
            senses: Vec::new(),
            notes: String::new(),
            summary: String::new(),
        }
    }

    pub fn preposition(&self) -> &str {
        &self.preposition
    }

    pub fn senses(&self) -> &[SenseRecord] {
        &self.senses
    }

    pub fn len(&self) -> usize {
        self.senses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senses.is_empty()
    }

    pub fn get(&self, key: &SenseKey) -> Option<&SenseRecord> {
        self.senses.iter().find(|s| s.key == *key)
    }

    pub fn by_ode(&self, ode: &OdeKey) -> Option<&SenseRecord> {
        self.senses.iter().find(|s| s.key.ode == *ode)
    }

    /// Looks a sense up by full key (`2 (1a)`), dictionary key (`(1a)` or
    /// `1a`) or bare ordinal (`2`).
    pub fn resolve(&self, reference: &str) -> Option<&SenseRecord> {
        let r = reference.trim();
        if let Ok(key) = r.parse::<SenseKey>() {
            return self.get(&key);
        }
        if let Ok(ode) = r.parse::<OdeKey>() {
            return self.by_ode(&ode);
        }
        if !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()) {
            let ordinal: u32 = r.parse().ok()?;
            return self.senses.iter().find(|s| s.key.ordinal == ordinal);
        }
        OdeKey::parse_body(r).and_then(|ode| self.by_ode(&ode))
    }

    /// Full key of the core sense `key` belongs to, if that core is present.
    pub fn core_of(&self, key: &SenseKey) -> Option<SenseKey> {
        self.by_ode(&core_of(key)).map(|s| s.key)
    }

    /// Appends a record after checking key uniqueness and ordinal order.
    pub fn push(&mut self, record: SenseRecord) -> Result<(), InventoryError> {
        validate_fields(&record.fields).map_err(InventoryError::InvalidFields)?;
        if let Some(last) = self.senses.last() {
            if record.key.ordinal <= last.key.ordinal {
                return Err(InventoryError::InvalidFields(format!(
                    "ordinal {} does not follow {}",
                    record.key.ordinal, last.key.ordinal
                )));
            }
        }
        if self.by_ode(&record.key.ode).is_some() {
            return Err(InventoryError::InvalidFields(format!(
                "dictionary key {} already present",
                record.key.ode
            )));
        }
        self.senses.push(record);
        Ok(())
    }

    fn next_ordinal(&self) -> u32 {
        self.senses.last().map_or(1, |s| s.key.ordinal + 1)
    }

    /// Adds a subsense under the core sense `parent`, lettered one past the
    /// highest existing letter of that core.
    pub fn add_subsense(&mut self, parent: &OdeKey, fields: SenseFields) -> Result<SenseKey, InventoryError> {
        if !parent.is_core() {
            return Err(InventoryError::NotCore(*parent));
        }
        if self.by_ode(parent).is_none() {
            return Err(InventoryError::UnknownSense(parent.to_string()));
        }
        let highest = self
            .senses
            .iter()
            .filter(|s| s.key.ode.number == parent.number)
            .filter_map(|s| s.key.ode.letter)
            .max();
        let letter = match highest {
            None => 'a',
            Some('z') => return Err(InventoryError::LettersExhausted(*parent)),
            Some(l) => (l as u8 + 1) as char,
        };
        let key = SenseKey::new(
            self.next_ordinal(),
            OdeKey {
                number: parent.number,
                letter: Some(letter),
            },
        );
        self.push(SenseRecord {
            preposition: self.preposition.clone(),
            key,
            fields,
            origin: SenseOrigin::SubsenseAdded,
        })?;
        Ok(key)
    }

    /// Adds a new core sense numbered one past the highest existing number.
    pub fn add_sense(&mut self, fields: SenseFields) -> Result<SenseKey, InventoryError> {
        let number = self.senses.iter().map(|s| s.key.ode.number).max().unwrap_or(0) + 1;
        let key = SenseKey::new(self.next_ordinal(), OdeKey::core(number));
        self.push(SenseRecord {
            preposition: self.preposition.clone(),
            key,
            fields,
            origin: SenseOrigin::NewSenseAdded,
        })?;
        Ok(key)
    }
}

/// Reads a `<prep>.senses.tsv` table. Optional leading `# notes: ...` and
/// `# summary: ...` lines carry the lexicographer's free text.
pub fn load_inventory<R: BufRead>(source: R, preposition: &str) -> Result<Inventory, TsvError> {
    let lines = tsv::read_lines(source)?;
    let (comments, rows) = tsv::split_table(lines, SENSES_HEADER)?;
    let mut inv = Inventory::new(preposition);
    for (key, value, line) in comments {
        match key.as_str() {
            "notes" => inv.notes = unescape(&value, line)?,
            "summary" => inv.summary = unescape(&value, line)?,
            other => return Err(TsvError::row(line, format!("unknown comment key {other:?}"))),
        }
    }
    for line in &rows {
        let n = line.number;
        let c = line.cells(10)?;
        let key: SenseKey = c[0].parse().map_err(|e: KeyParseError| TsvError::row(n, e.to_string()))?;
        let quirk_syntax = split_list(c[2])
            .iter()
            .map(|code| {
                code.parse()
                    .map_err(|_| TsvError::row(n, format!("unknown syntactic-function code {code:?}")))
            })
            .collect::<Result<Vec<QuirkCode>, _>>()?;
        let quirk_paragraphs = match c[3] {
            "None" => Vec::new(),
            "" => return Err(TsvError::row(n, "empty QuirkParagraphs (write None)")),
            cell => split_list(cell),
        };
        let fields = SenseFields {
            relation_name: c[1].to_string(),
            quirk_syntax,
            quirk_paragraphs,
            complement_properties: Properties {
                text: unescape(c[4], n)?,
                categories: split_list(c[7]),
            },
            attachment_properties: Properties {
                text: unescape(c[5], n)?,
                categories: split_list(c[8]),
            },
            similar_prepositions: split_list(c[6]),
        };
        let origin = SenseOrigin::parse(c[9])
            .ok_or_else(|| TsvError::row(n, format!("unknown origin {:?}", c[9])))?;
        inv.push(SenseRecord {
            preposition: preposition.to_string(),
            key,
            fields,
            origin,
        })
        .map_err(|e| TsvError::row(n, e.to_string()))?;
    }
    Ok(inv)
}

pub fn save_inventory<W: Write>(inv: &Inventory, mut sink: W) -> io::Result<()> {
    let mut out = String::new();
    if !inv.notes.is_empty() {
        out.push_str(&format!("# notes: {}\n", escape(&inv.notes)));
    }
    if !inv.summary.is_empty() {
        out.push_str(&format!("# summary: {}\n", escape(&inv.summary)));
    }
    out.push_str(SENSES_HEADER);
    out.push('\n');
    for s in &inv.senses {
        let f = &s.fields;
        let codes: Vec<&str> = f.quirk_syntax.iter().map(|c| c.as_str()).collect();
        let paragraphs = if f.quirk_paragraphs.is_empty() {
            "None".to_string()
        } else {
            join_list(&f.quirk_paragraphs)
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            s.key,
            f.relation_name,
            join_list(&codes),
            paragraphs,
            escape(&f.complement_properties.text),
            escape(&f.attachment_properties.text),
            join_list(&f.similar_prepositions),
            join_list(&f.complement_properties.categories),
            join_list(&f.attachment_properties.categories),
            s.origin.as_str()
        ));
    }
    sink.write_all(out.as_bytes())
}
