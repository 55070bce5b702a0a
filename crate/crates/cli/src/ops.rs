//! Small compositions of library calls shared by the CLI and the service.

use std::collections::BTreeSet;

use prepwb_core::analysis::{pairs_by_sense, AnalysisError, FramePair};
use prepwb_core::{InstanceRecord, Inventory, SenseKey, TagSet};

/// Resolves sense references ("2 (1a)", "(1a)", "1a", "2") in order;
/// the first unresolvable reference is returned as the error.
pub fn resolve_senses(inv: &Inventory, refs: &[String]) -> Result<Vec<SenseKey>, String> {
    refs.iter()
        .map(|r| inv.resolve(r).map(|s| s.key).ok_or_else(|| r.clone()))
        .collect()
}

/// The frame/frame element pairs tagged with `sense`.
pub fn sense_pairs(tags: &TagSet, records: &[InstanceRecord], sense: &SenseKey) -> Result<Vec<FramePair>, AnalysisError> {
    Ok(pairs_by_sense(tags, records)?
        .into_iter()
        .find(|row| row.sense == *sense)
        .map(|row| row.pairs)
        .unwrap_or_default())
}

/// Ids in `ids` that name no taggable record.
pub fn unknown_ids(records: &[InstanceRecord], ids: &[String]) -> Vec<String> {
    let known: BTreeSet<String> = records
        .iter()
        .filter(|r| r.is_taggable())
        .map(InstanceRecord::instance_id)
        .collect();
    let mut missing: Vec<String> = ids.iter().filter(|id| !known.contains(*id)).cloned().collect();
    missing.sort();
    missing.dedup();
    missing
}
