//! Hold out whole reaction classes.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{
    divide, fill, group_by, insufficient, stream, trim, ClassCodeSet, Role, SplitError, SplitManifest, SplitParams,
    SplitRecord,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReactionTypePreset {
    #[default]
    Base,
    GrignardEster,
    Heck,
    ChloroSuzuki,
    TriflyloxySuzuki,
    AllSuzuki,
}

impl ReactionTypePreset {
    pub const ALL: [ReactionTypePreset; 6] = [
        ReactionTypePreset::Base,
        ReactionTypePreset::GrignardEster,
        ReactionTypePreset::Heck,
        ReactionTypePreset::ChloroSuzuki,
        ReactionTypePreset::TriflyloxySuzuki,
        ReactionTypePreset::AllSuzuki,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReactionTypePreset::Base => "base",
            ReactionTypePreset::GrignardEster => "grignard_ester",
            ReactionTypePreset::Heck => "heck",
            ReactionTypePreset::ChloroSuzuki => "chloro_suzuki",
            ReactionTypePreset::TriflyloxySuzuki => "triflyloxy_suzuki",
            ReactionTypePreset::AllSuzuki => "all_suzuki",
        }
    }

    pub fn codes(self) -> ClassCodeSet {
        let codes: &[&str] = match self {
            ReactionTypePreset::Base => &[],
            ReactionTypePreset::GrignardEster => &["3.7.14", "3.7.15", "3.7.17", "3.7.19"],
            ReactionTypePreset::Heck => &["3.2"],
            ReactionTypePreset::ChloroSuzuki => &["3.1.2", "3.1.6"],
            ReactionTypePreset::TriflyloxySuzuki => &["3.1.4", "3.1.8"],
            ReactionTypePreset::AllSuzuki => &["3.1"],
        };
        ClassCodeSet::parse(codes.iter().copied()).unwrap_or_default()
    }
}

impl fmt::Display for ReactionTypePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReactionTypePreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.replace('-', "_");
        ReactionTypePreset::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| alloc::format!("unknown preset {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionTypeParams {
    pub name: String,
    pub held_out: ClassCodeSet,
    pub train: usize,
    pub val: usize,
    pub id_test: usize,
    pub ood_train_inject: usize,
    pub ood_test_cap: usize,
}

impl ReactionTypeParams {
    pub fn preset(p: ReactionTypePreset) -> Self {
        ReactionTypeParams {
            name: String::from(p.name()),
            held_out: p.codes(),
            train: 1_000_000,
            val: 10_000,
            id_test: 10_000,
            ood_train_inject: 1000,
            ood_test_cap: 10_000,
        }
    }
}

const TAG_ID_DOCS: u64 = 30;
const TAG_ID_TRIM: u64 = 31;
const TAG_ID_DIVIDE: u64 = 32;
const TAG_OOD_DOCS: u64 = 33;
const TAG_INJECT_TRIM: u64 = 34;
const TAG_OOD_TRIM: u64 = 35;

/// Uncategorized reactions are dropped. Documents containing any held-out
/// reaction are OOD documents: their held-out reactions feed the inject
/// and test pools and their other reactions are left unassigned. ID
/// documents fill the ID pool whole, which is trimmed and divided.
pub fn split_reaction_type(
    records: &[SplitRecord],
    params: &ReactionTypeParams,
    seed: u64,
) -> Result<SplitManifest, SplitError> {
    let usable: Vec<usize> = (0..records.len())
        .filter(|&i| records[i].class_code.as_ref().is_some_and(|c| !c.is_uncategorized()))
        .collect();
    let held = |i: usize| params.held_out.matches_opt(records[i].class_code.as_ref());
    let mut groups = group_by(usable.iter().map(|&i| records[i].doc.as_str()));
    for g in &mut groups {
        for k in g.1.iter_mut() {
            *k = usable[*k];
        }
    }
    let ood_docs: BTreeSet<&str> = groups
        .iter()
        .filter(|(_, m)| m.iter().any(|&i| held(i)))
        .map(|(d, _)| *d)
        .collect();

    let mut id_groups: Vec<&[usize]> = groups
        .iter()
        .filter(|(d, _)| !ood_docs.contains(d))
        .map(|(_, m)| m.as_slice())
        .collect();
    id_groups.shuffle(&mut stream(seed, &[TAG_ID_DOCS]));
    let id_target = params.train + params.val + params.id_test;
    let mut id_pool = Vec::new();
    fill(id_groups.iter().copied(), id_target, &mut id_pool);
    if id_pool.len() < id_target {
        return Err(insufficient("id", id_target, id_pool.len()));
    }
    let id_pool = trim(&id_pool, id_target, &mut stream(seed, &[TAG_ID_TRIM]));
    let parts = divide(&id_pool, &[params.train, params.val, params.id_test], &mut stream(seed, &[TAG_ID_DIVIDE]));

    let mut roles = vec![None; records.len()];
    for (part, role) in parts.iter().zip([Role::Train, Role::Val, Role::IdTest]) {
        for &i in part {
            roles[i] = Some(role);
        }
    }

    if !params.held_out.is_empty() {
        let held_groups: Vec<Vec<usize>> = groups
            .iter()
            .filter(|(d, _)| ood_docs.contains(d))
            .map(|(_, m)| m.iter().copied().filter(|&i| held(i)).collect())
            .collect();
        let mut order: Vec<&[usize]> = held_groups.iter().map(Vec::as_slice).collect();
        order.shuffle(&mut stream(seed, &[TAG_OOD_DOCS]));
        let mut inject = Vec::new();
        let used = fill(order.iter().copied(), params.ood_train_inject, &mut inject);
        if inject.len() < params.ood_train_inject {
            return Err(insufficient("ood_train_inject", params.ood_train_inject, inject.len()));
        }
        let test: Vec<usize> = order[used..].iter().flat_map(|g| g.iter().copied()).collect();
        for i in trim(&inject, params.ood_train_inject, &mut stream(seed, &[TAG_INJECT_TRIM])) {
            roles[i] = Some(Role::OodTrainInject);
        }
        for i in trim(&test, params.ood_test_cap, &mut stream(seed, &[TAG_OOD_TRIM])) {
            roles[i] = Some(Role::OodTest);
        }
    }

    Ok(SplitManifest::from_roles(
        alloc::format!("reaction-type-{}", params.name),
        seed,
        SplitParams::ReactionType(params.clone()),
        records,
        &roles,
    ))
}
