//! Sense tags on instances, grouping for bulk tagging, and progress.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{self, BufRead, Write};

use serde::Serialize;
use thiserror::Error;

use crate::instances::InstanceRecord;
use crate::inventory::{Inventory, SenseKey};
use crate::tsv::{self, escape, unescape, TsvError};

pub const TAGS_HEADER: &str = "InstanceId\tSenseKeys\tTagger\tNote";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedInstance {
    pub instance_id: String,
    /// Sorted and duplicate-free; co-assigned senses are unranked.
    pub sense_keys: Vec<SenseKey>,
    pub tagger: String,
    pub note: Option<String>,
}

/// All tags for one preposition. `version` increases by one on every
/// mutation that changes content.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TagSet {
    pub preposition: String,
    pub version: u64,
    tags: BTreeMap<String, TaggedInstance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("no sense keys given")]
    EmptySenses,
    #[error("no instance ids given")]
    EmptyIds,
    #[error("sense {0} is not in the inventory for {1:?}")]
    UnknownSense(SenseKey, String),
    #[error("tagger name must be non-empty")]
    EmptyTagger,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AssignOutcome {
    pub created: usize,
    pub overwritten: usize,
    pub unchanged: usize,
}

impl TagSet {
    pub fn new(preposition: impl Into<String>) -> Self {
        TagSet {
            preposition: preposition.into(),
            version: 0,
            tags: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn get(&self, instance_id: &str) -> Option<&TaggedInstance> {
        self.tags.get(instance_id)
    }

    /// Tags in instance-id order.
    pub fn iter(&self) -> impl Iterator<Item = &TaggedInstance> {
        self.tags.values()
    }

    /// Tags every id with `senses`, replacing earlier tags. Repeating the
    /// same call changes nothing, including the version.
    pub fn assign(
        &mut self,
        ids: &[String],
        senses: &[SenseKey],
        inventory: &Inventory,
        tagger: &str,
        note: Option<&str>,
    ) -> Result<AssignOutcome, TagError> {
        if senses.is_empty() {
            return Err(TagError::EmptySenses);
        }
        if ids.is_empty() {
            return Err(TagError::EmptyIds);
        }
        if tagger.is_empty() {
            return Err(TagError::EmptyTagger);
        }
        if let Some(missing) = senses.iter().find(|k| inventory.get(k).is_none()) {
            return Err(TagError::UnknownSense(*missing, inventory.preposition().to_string()));
        }
        let keys: Vec<SenseKey> = senses.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let note = note.filter(|n| !n.is_empty()).map(str::to_string);
        let mut outcome = AssignOutcome::default();
        for id in ids.iter().collect::<BTreeSet<_>>() {
            let tag = TaggedInstance {
                instance_id: id.clone(),
                sense_keys: keys.clone(),
                tagger: tagger.to_string(),
                note: note.clone(),
            };
            match self.tags.insert(id.clone(), tag.clone()) {
                None => outcome.created += 1,
                Some(old) if old == tag => outcome.unchanged += 1,
                Some(_) => outcome.overwritten += 1,
            }
        }
        if outcome.created + outcome.overwritten > 0 {
            self.version += 1;
        }
        Ok(outcome)
    }

    /// Removes the tag for `instance_id`; returns whether one existed.
    pub fn remove(&mut self, instance_id: &str) -> bool {
        let removed = self.tags.remove(instance_id).is_some();
        if removed {
            self.version += 1;
        }
        removed
    }

    /// Tagged ids that match no record.
    pub fn dangling_ids(&self, records: &[InstanceRecord]) -> Vec<String> {
        let known: HashSet<String> = records
            .iter()
            .filter(|r| r.is_taggable())
            .map(InstanceRecord::instance_id)
            .collect();
        self.tags.keys().filter(|id| !known.contains(*id)).cloned().collect()
    }
}

/// Instances sharing frame, frame element and lexical unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceGroup {
    pub frame: String,
    pub frame_element: String,
    pub lexical_unit: String,
    pub members: Vec<String>,
}

/// Partitions taggable records by (frame, frame element, lexical unit).
/// "No instances" rows are skipped.
pub fn group_instances(records: &[InstanceRecord]) -> Vec<InstanceGroup> {
    let mut groups: BTreeMap<(&str, &str, &str), Vec<String>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_taggable()) {
        groups
            .entry((&r.frame, r.frame_element(), &r.lexical_unit))
            .or_default()
            .push(r.instance_id());
    }
    groups
        .into_iter()
        .map(|((frame, fe, lu), mut members)| {
            members.sort();
            members.dedup();
            InstanceGroup {
                frame: frame.to_string(),
                frame_element: fe.to_string(),
                lexical_unit: lu.to_string(),
                members,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub tagged: usize,
    pub total: usize,
    pub per_sense: BTreeMap<SenseKey, usize>,
}

/// Counts taggable records and how many of them carry a tag; `per_sense`
/// counts each sense of a multi-sense tag once.
pub fn progress(tagset: &TagSet, records: &[InstanceRecord]) -> Progress {
    let ids: BTreeSet<String> = records
        .iter()
        .filter(|r| r.is_taggable())
        .map(InstanceRecord::instance_id)
        .collect();
    let mut per_sense = BTreeMap::new();
    let mut tagged = 0;
    for id in &ids {
        if let Some(tag) = tagset.get(id) {
            tagged += 1;
            for key in &tag.sense_keys {
                *per_sense.entry(*key).or_insert(0) += 1;
            }
        }
    }
    Progress {
        tagged,
        total: ids.len(),
        per_sense,
    }
}

/// `Tagged` and `Total` rows, then one `Sense\tInstances` row per sense.
pub fn write_progress<W: Write>(progress: &Progress, mut sink: W) -> io::Result<()> {
    let mut out = format!("Tagged\t{}\nTotal\t{}\nSense\tInstances\n", progress.tagged, progress.total);
    for (key, n) in &progress.per_sense {
        out.push_str(&format!("{key}\t{n}\n"));
    }
    sink.write_all(out.as_bytes())
}

pub fn write_groups<W: Write>(groups: &[InstanceGroup], mut sink: W) -> io::Result<()> {
    let mut out = String::from("Frame\tFrameElement\tLexicalUnit\tInstances\n");
    for g in groups {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            escape(&g.frame),
            escape(&g.frame_element),
            escape(&g.lexical_unit),
            g.members.join(", ")
        ));
    }
    sink.write_all(out.as_bytes())
}

pub fn write_tags<W: Write>(tagset: &TagSet, mut sink: W) -> io::Result<()> {
    let mut out = String::new();
    if tagset.version > 0 {
        out.push_str(&format!("# version={}\n", tagset.version));
    }
    out.push_str(TAGS_HEADER);
    out.push('\n');
    for tag in tagset.iter() {
        let keys: Vec<String> = tag.sense_keys.iter().map(SenseKey::to_string).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            escape(&tag.instance_id),
            keys.join(";"),
            escape(&tag.tagger),
            escape(tag.note.as_deref().unwrap_or(""))
        ));
    }
    sink.write_all(out.as_bytes())
}

pub fn read_tags<R: BufRead>(source: R, preposition: &str) -> Result<TagSet, TsvError> {
    let lines = tsv::read_lines(source)?;
    let (comments, rows) = tsv::split_table(lines, TAGS_HEADER)?;
    let mut set = TagSet::new(preposition);
    for (key, value, line) in comments {
        match key.as_str() {
            "version" => {
                set.version = value
                    .trim()
                    .parse()
                    .map_err(|_| TsvError::row(line, format!("bad version {value:?}")))?;
            }
            other => return Err(TsvError::row(line, format!("unknown comment key {other:?}"))),
        }
    }
    for line in &rows {
        let n = line.number;
        let c = line.cells(4)?;
        let instance_id = unescape(c[0], n)?;
        if instance_id.is_empty() {
            return Err(TsvError::row(n, "empty instance id"));
        }
        let mut keys = Vec::new();
        for raw in c[1].split(';') {
            let key: SenseKey = raw
                .trim()
                .parse()
                .map_err(|_| TsvError::row(n, format!("bad sense key {raw:?}")))?;
            if keys.contains(&key) {
                return Err(TsvError::row(n, format!("sense {key} listed twice")));
            }
            keys.push(key);
        }
        keys.sort();
        let tagger = unescape(c[2], n)?;
        if tagger.is_empty() {
            return Err(TsvError::row(n, "empty tagger"));
        }
        let note = unescape(c[3], n)?;
        let tag = TaggedInstance {
            instance_id: instance_id.clone(),
            sense_keys: keys,
            tagger,
            note: (!note.is_empty()).then_some(note),
        };
        if set.tags.insert(instance_id.clone(), tag).is_some() {
            return Err(TsvError::row(n, format!("instance {instance_id} tagged twice")));
        }
    }
    Ok(set)
}
