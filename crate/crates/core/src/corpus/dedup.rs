//! First-seen deduplication on the canonical reactant/product pair.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::record::ReactionRecord;

/// Sorted canonical reactant SMILES (reagents included) and sorted
/// canonical product SMILES.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DedupKey {
    pub reactants: Vec<String>,
    pub products: Vec<String>,
}

impl DedupKey {
    pub fn of(rec: &ReactionRecord) -> DedupKey {
        DedupKey {
            reactants: rec.reactants.canonical_list(),
            products: rec.products.canonical_list(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplaceRule {
    /// The kept record had no class code; the newcomer has one.
    Tag,
    /// Both equally tagged; the newcomer is from an earlier year.
    EarlierYear,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub kept: String,
    pub displaced: String,
    pub rule: ReplaceRule,
}

#[derive(Clone, Debug, Default)]
pub struct DedupOutcome {
    pub records: Vec<ReactionRecord>,
    pub replacements: Vec<Replacement>,
    /// Ids of records dropped as duplicates, in input order.
    pub dropped: Vec<String>,
}

/// Whether `newcomer` displaces `kept` under the tag-then-year rule.
pub fn displaces(kept: &ReactionRecord, newcomer: &ReactionRecord) -> Option<ReplaceRule> {
    match (kept.class_code.is_some(), newcomer.class_code.is_some()) {
        (false, true) => Some(ReplaceRule::Tag),
        (a, b) if a == b && newcomer.year < kept.year => Some(ReplaceRule::EarlierYear),
        _ => None,
    }
}

/// One record per key, computed with precomputed keys. The output keeps
/// each group at the position of its first appearance.
pub fn deduplicate_keyed(records: Vec<ReactionRecord>, keys: &[DedupKey]) -> DedupOutcome {
    assert_eq!(records.len(), keys.len());
    let mut slot_of: BTreeMap<&DedupKey, usize> = BTreeMap::new();
    let mut out = DedupOutcome::default();
    for (rec, key) in records.into_iter().zip(keys) {
        match slot_of.get(key) {
            None => {
                slot_of.insert(key, out.records.len());
                out.records.push(rec);
            }
            Some(&slot) => {
                let kept = &out.records[slot];
                match displaces(kept, &rec) {
                    Some(rule) => {
                        log::debug!("{} replaces {} ({:?})", rec.id, kept.id, rule);
                        out.replacements.push(Replacement {
                            kept: rec.id.clone(),
                            displaced: kept.id.clone(),
                            rule,
                        });
                        out.dropped.push(kept.id.clone());
                        out.records[slot] = rec;
                    }
                    None => out.dropped.push(rec.id),
                }
            }
        }
    }
    out
}

pub fn deduplicate(records: Vec<ReactionRecord>) -> DedupOutcome {
    let keys: Vec<DedupKey> = records.iter().map(DedupKey::of).collect();
    deduplicate_keyed(records, &keys)
}
