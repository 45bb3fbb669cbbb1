//! Corpus cleaning: standardize, filter, deduplicate, in that order.

mod dedup;
mod filter;
mod reagents;
mod record;
mod stats;

use alloc::string::String;
use alloc::vec::Vec;

pub use dedup::{deduplicate, deduplicate_keyed, displaces, DedupKey, DedupOutcome, ReplaceRule, Replacement};
pub use filter::{filter, firing_criteria, Criterion, RejectReason, Verdict, MAX_REACTION_TOKENS};
pub use reagents::{
    classify_molecules, environment_overlap, environment_set, classify_reagents, ReagentPartition, DEFAULT_REAGENT_THRESHOLD,
};
pub use record::{split_reaction, standardize, ClassCode, InvalidClassCode, RawRecord, ReactionRecord, Side, SkipReason};
pub use stats::{corpus_stats, CorpusStats};

/// Pipeline stage at which a record left the corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Standardize,
    Filter,
    Dedup,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Standardize => "standardize",
            Stage::Filter => "filter",
            Stage::Dedup => "dedup",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Removal {
    pub record_id: String,
    pub stage: Stage,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StageCounts {
    pub input: usize,
    pub skipped: usize,
    pub rejected: usize,
    pub duplicates: usize,
    pub kept: usize,
}

#[derive(Debug, Default)]
pub struct CleanOutcome {
    pub records: Vec<ReactionRecord>,
    pub removals: Vec<Removal>,
    pub replacements: Vec<Replacement>,
    pub counts: StageCounts,
}

/// Result of the per-record (parallelizable) part of cleaning.
pub enum Screened {
    Kept(ReactionRecord, DedupKey),
    Skipped(SkipReason),
    Rejected(RejectReason),
}

/// Standardize and filter one record; computes the dedup key for kept ones.
pub fn screen(raw: &RawRecord) -> Screened {
    match standardize(raw) {
        Err(e) => Screened::Skipped(e),
        Ok(rec) => match filter(&rec) {
            Verdict::Reject(r) => Screened::Rejected(r),
            Verdict::Keep => {
                let key = DedupKey::of(&rec);
                Screened::Kept(rec, key)
            }
        },
    }
}

/// Sequential dedup over screened records in input order.
pub fn finish_clean(ids: &[&str], screened: Vec<Screened>) -> CleanOutcome {
    let mut out = CleanOutcome::default();
    out.counts.input = screened.len();
    let mut kept = Vec::new();
    let mut keys = Vec::new();
    for (id, s) in ids.iter().zip(screened) {
        match s {
            Screened::Kept(r, k) => {
                kept.push(r);
                keys.push(k);
            }
            Screened::Skipped(e) => {
                out.counts.skipped += 1;
                out.removals.push(Removal {
                    record_id: String::from(*id),
                    stage: Stage::Standardize,
                    reason: alloc::format!("{e}"),
                });
            }
            Screened::Rejected(r) => {
                out.counts.rejected += 1;
                out.removals.push(Removal {
                    record_id: String::from(*id),
                    stage: Stage::Filter,
                    reason: alloc::format!("{r}"),
                });
            }
        }
    }
    let d = deduplicate_keyed(kept, &keys);
    out.counts.duplicates = d.dropped.len();
    out.counts.kept = d.records.len();
    for id in d.dropped {
        let reason = match d.replacements.iter().find(|r| r.displaced == id) {
            Some(r) => alloc::format!("duplicate, displaced by {}", r.kept),
            None => String::from("duplicate"),
        };
        out.removals.push(Removal { record_id: id, stage: Stage::Dedup, reason });
    }
    out.records = d.records;
    out.replacements = d.replacements;
    out
}

/// Standardize, filter and deduplicate in that order.
pub fn clean(raws: &[RawRecord]) -> CleanOutcome {
    let ids: Vec<&str> = raws.iter().map(|r| r.id.as_str()).collect();
    let screened = raws.iter().map(screen).collect();
    finish_clean(&ids, screened)
}
