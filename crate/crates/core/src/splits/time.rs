//! Per-year held-out test sets and one training set per cutoff year.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{
    divide, group_by, insufficient, stream, trim, ClassCodeSet, Role, SplitError, SplitManifest, SplitParams,
    SplitRecord,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainSize {
    /// Every cutoff trains on the number available at the earliest cutoff.
    Controlled,
    /// Every available reaction.
    All,
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeParams {
    pub cutoffs: Vec<i32>,
    pub start_year: i32,
    pub per_year_test: usize,
    pub val: usize,
    pub train: TrainSize,
}

impl Default for TimeParams {
    fn default() -> Self {
        TimeParams {
            cutoffs: vec![1996, 2000, 2004, 2008, 2012, 2016, 2020],
            start_year: 1976,
            per_year_test: 3000,
            val: 2000,
            train: TrainSize::Controlled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeSplit {
    /// Roles `test_<year>` for every year from the start year on.
    pub test: SplitManifest,
    /// One train/val manifest per cutoff, in ascending cutoff order.
    pub cutoffs: Vec<SplitManifest>,
}

const TAG_YEAR_DOCS: u64 = 20;
const TAG_YEAR_TRIM: u64 = 21;
const TAG_CUTOFF_TRAIN: u64 = 22;

/// Carve the per-year test sets first (whole documents, then trimmed),
/// then build each cutoff's train/val independently from what remains.
/// Documents touched by any test set never reach a training set.
pub fn split_time(records: &[SplitRecord], params: &TimeParams, seed: u64) -> Result<TimeSplit, SplitError> {
    if records.is_empty() {
        return Err(insufficient("corpus", 1, 0));
    }
    let mut cutoffs = params.cutoffs.clone();
    cutoffs.sort_unstable();
    cutoffs.dedup();
    if cutoffs.is_empty() {
        return Err(SplitError::InvalidParameter(String::from("no cutoff years")));
    }
    let min_year = records.iter().map(|r| r.year).min().unwrap_or(0);
    let max_year = records.iter().map(|r| r.year).max().unwrap_or(0);
    for &c in &cutoffs {
        if c < params.start_year || c < min_year || c > max_year {
            return Err(SplitError::InvalidParameter(format!(
                "cutoff {c} outside {}..={max_year}",
                params.start_year.max(min_year)
            )));
        }
    }

    // Test sets, one year at a time.
    let mut test_role: Vec<Option<Role>> = vec![None; records.len()];
    let mut test_docs: BTreeSet<&str> = BTreeSet::new();
    for year in params.start_year..=max_year {
        let in_year: Vec<usize> = (0..records.len()).filter(|&i| records[i].year == year).collect();
        let mut groups = group_by(in_year.iter().map(|&i| records[i].doc.as_str()));
        for g in &mut groups {
            for k in g.1.iter_mut() {
                *k = in_year[*k];
            }
        }
        groups.shuffle(&mut stream(seed, &[TAG_YEAR_DOCS, year as u64]));
        let mut pool = Vec::new();
        for (doc, members) in &groups {
            if pool.len() >= params.per_year_test {
                break;
            }
            pool.extend_from_slice(members);
            test_docs.insert(*doc);
        }
        if pool.len() < params.per_year_test {
            return Err(insufficient(format!("test_{year}"), params.per_year_test, pool.len()));
        }
        for i in trim(&pool, params.per_year_test, &mut stream(seed, &[TAG_YEAR_TRIM, year as u64])) {
            test_role[i] = Some(Role::TestYear(year));
        }
    }
    let test = SplitManifest::from_roles(
        String::from("time-test"),
        seed,
        SplitParams::TimeTest { start_year: params.start_year, per_year_test: params.per_year_test },
        records,
        &test_role,
    );

    let available = |cutoff: i32| -> Vec<usize> {
        (0..records.len())
            .filter(|&i| records[i].year <= cutoff && !test_docs.contains(records[i].doc.as_str()))
            .collect()
    };
    let earliest = available(cutoffs[0]).len();
    if earliest < params.val {
        return Err(insufficient(format!("cutoff_{}", cutoffs[0]), params.val, earliest));
    }
    let controlled = earliest - params.val;

    let mut manifests = Vec::with_capacity(cutoffs.len());
    for &cutoff in &cutoffs {
        let pool = available(cutoff);
        let train_n = match params.train {
            TrainSize::Controlled => controlled,
            TrainSize::All => pool.len().saturating_sub(params.val),
            TrainSize::Fixed(n) => n,
        };
        if pool.len() < train_n + params.val {
            return Err(insufficient(format!("cutoff_{cutoff}"), train_n + params.val, pool.len()));
        }
        let parts = divide(&pool, &[params.val, train_n], &mut stream(seed, &[TAG_CUTOFF_TRAIN, cutoff as u64]));
        let mut roles = vec![None; records.len()];
        for &i in &parts[0] {
            roles[i] = Some(Role::Val);
        }
        for &i in &parts[1] {
            roles[i] = Some(Role::Train);
        }
        manifests.push(SplitManifest::from_roles(
            format!("time-{cutoff}"),
            seed,
            SplitParams::TimeTrain {
                cutoff,
                start_year: params.start_year,
                per_year_test: params.per_year_test,
                val: params.val,
                train: Some(train_n),
                size_controlled: params.train == TrainSize::Controlled,
            },
            records,
            &roles,
        ));
    }
    Ok(TimeSplit { test, cutoffs: manifests })
}

/// Records whose class matches `codes`, minus anything assigned to train
/// or val in `exclude`. Returned as corpus indices.
pub fn extract_class_testset(records: &[SplitRecord], codes: &ClassCodeSet, exclude: &[&SplitManifest]) -> Vec<usize> {
    let mut barred: BTreeSet<&str> = BTreeSet::new();
    for m in exclude {
        barred.extend(m.assignments.iter().filter(|a| a.1.is_training()).map(|a| a.0.as_str()));
    }
    (0..records.len())
        .filter(|&i| codes.matches_opt(records[i].class_code.as_ref()) && !barred.contains(records[i].id.as_str()))
        .collect()
}

/// [`extract_class_testset`] as a manifest with every record in
/// `ood_test`.
pub fn class_test_manifest(
    name: String,
    records: &[SplitRecord],
    codes: &ClassCodeSet,
    exclude: &[&SplitManifest],
) -> SplitManifest {
    let mut roles = vec![None; records.len()];
    for i in extract_class_testset(records, codes, exclude) {
        roles[i] = Some(Role::OodTest);
    }
    let params = SplitParams::ClassTest {
        codes: codes.clone(),
        excluded: exclude.iter().map(|m| m.name.clone()).collect(),
    };
    SplitManifest::from_roles(name, 0, params, records, &roles)
}
