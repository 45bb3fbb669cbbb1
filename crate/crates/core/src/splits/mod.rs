//! Reproducible split manifests over a cleaned corpus.
//!
//! Every family draws from a ChaCha8 stream derived from the manifest seed
//! and a per-purpose tag, so results depend only on (corpus order, seed,
//! parameters).

mod author_doc;
pub mod check;
mod random;
mod reaction_type;
mod time;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chem::hash_words;
use crate::corpus::{ClassCode, InvalidClassCode, ReactionRecord};

pub use author_doc::{split_author_document, AuthorDocumentParams};
pub use random::{split_random, RandomParams};
pub use reaction_type::{split_reaction_type, ReactionTypeParams, ReactionTypePreset};
pub use time::{class_test_manifest, extract_class_testset, split_time, TimeParams, TimeSplit, TrainSize};

/// The metadata splitting needs; no chemistry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub id: String,
    pub doc: String,
    pub authors: Vec<String>,
    pub year: i32,
    pub class_code: Option<ClassCode>,
}

impl From<&ReactionRecord> for SplitRecord {
    fn from(r: &ReactionRecord) -> Self {
        SplitRecord {
            id: r.id.clone(),
            doc: r.doc.clone(),
            authors: r.authors.clone(),
            year: r.year,
            class_code: r.class_code.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Role {
    Train,
    Val,
    IdTest,
    OodDocTest,
    OodAuthorTest,
    OodTrainInject,
    OodTest,
    /// Held-out test set of one publication year.
    TestYear(i32),
}

impl Role {
    /// Roles a model may be fit or tuned on.
    pub fn is_training(self) -> bool {
        matches!(self, Role::Train | Role::Val)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Train => f.write_str("train"),
            Role::Val => f.write_str("val"),
            Role::IdTest => f.write_str("id_test"),
            Role::OodDocTest => f.write_str("ood_doc_test"),
            Role::OodAuthorTest => f.write_str("ood_author_test"),
            Role::OodTrainInject => f.write_str("ood_train_inject"),
            Role::OodTest => f.write_str("ood_test"),
            Role::TestYear(y) => write!(f, "test_{y}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownRole(pub String);

impl fmt::Display for UnknownRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown role {:?}", self.0)
    }
}

impl core::error::Error for UnknownRole {}

impl FromStr for Role {
    type Err = UnknownRole;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "train" => Role::Train,
            "val" => Role::Val,
            "id_test" => Role::IdTest,
            "ood_doc_test" => Role::OodDocTest,
            "ood_author_test" => Role::OodAuthorTest,
            "ood_train_inject" => Role::OodTrainInject,
            "ood_test" => Role::OodTest,
            _ => s
                .strip_prefix("test_")
                .and_then(|y| y.parse().ok())
                .map(Role::TestYear)
                .ok_or_else(|| UnknownRole(s.to_string()))?,
        })
    }
}

impl TryFrom<String> for Role {
    type Error = UnknownRole;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Role> for String {
    fn from(r: Role) -> String {
        r.to_string()
    }
}

/// Dotted class-code prefixes; a code matches when any prefix matches.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCodeSet(pub Vec<ClassCode>);

impl ClassCodeSet {
    pub fn parse<'a>(codes: impl IntoIterator<Item = &'a str>) -> Result<Self, InvalidClassCode> {
        codes.into_iter().map(ClassCode::parse).collect::<Result<_, _>>().map(ClassCodeSet)
    }

    pub fn matches(&self, code: &ClassCode) -> bool {
        self.0.iter().any(|p| code.has_prefix(p))
    }

    pub fn matches_opt(&self, code: Option<&ClassCode>) -> bool {
        code.is_some_and(|c| self.matches(c))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parameters recorded in a manifest header.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SplitParams {
    Random(RandomParams),
    AuthorDocument(AuthorDocumentParams),
    TimeTest {
        start_year: i32,
        per_year_test: usize,
    },
    TimeTrain {
        cutoff: i32,
        start_year: i32,
        per_year_test: usize,
        val: usize,
        train: Option<usize>,
        size_controlled: bool,
    },
    ReactionType(ReactionTypeParams),
    /// Records of the given classes outside the training roles of the
    /// named manifests.
    ClassTest {
        codes: ClassCodeSet,
        excluded: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub name: String,
    pub seed: u64,
    pub params: SplitParams,
    /// In corpus order.
    pub assignments: Vec<(String, Role)>,
}

impl SplitManifest {
    pub fn role_counts(&self) -> BTreeMap<Role, usize> {
        let mut m = BTreeMap::new();
        for (_, r) in &self.assignments {
            *m.entry(*r).or_default() += 1;
        }
        m
    }

    pub fn count(&self, role: Role) -> usize {
        self.assignments.iter().filter(|a| a.1 == role).count()
    }

    pub fn ids(&self, role: Role) -> impl Iterator<Item = &str> {
        self.assignments.iter().filter(move |a| a.1 == role).map(|a| a.0.as_str())
    }

    pub fn role_map(&self) -> BTreeMap<&str, Role> {
        self.assignments.iter().map(|(id, r)| (id.as_str(), *r)).collect()
    }

    fn from_roles(name: String, seed: u64, params: SplitParams, records: &[SplitRecord], roles: &[Option<Role>]) -> Self {
        let assignments = records
            .iter()
            .zip(roles)
            .filter_map(|(rec, r)| r.map(|r| (rec.id.clone(), r)))
            .collect();
        SplitManifest { name, seed, params, assignments }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitError {
    /// A pool could not reach its target size.
    InsufficientData { pool: String, needed: usize, available: usize },
    InvalidParameter(String),
}

impl fmt::Display for SplitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitError::InsufficientData { pool, needed, available } => {
                write!(f, "insufficient data for {pool}: need {needed}, have {available}")
            }
            SplitError::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
        }
    }
}

impl core::error::Error for SplitError {}

fn insufficient(pool: impl Into<String>, needed: usize, available: usize) -> SplitError {
    SplitError::InsufficientData { pool: pool.into(), needed, available }
}

/// Independent random stream for one purpose within a manifest.
pub(crate) fn stream(seed: u64, tag: &[u64]) -> ChaCha8Rng {
    let mut words = Vec::with_capacity(tag.len() + 1);
    words.push(seed);
    words.extend_from_slice(tag);
    ChaCha8Rng::seed_from_u64(hash_words(&words))
}

/// Distinct keys in first-appearance order, each with its member indices.
pub(crate) fn group_by<'a>(keys: impl Iterator<Item = &'a str>) -> Vec<(&'a str, Vec<usize>)> {
    let mut slot: BTreeMap<&str, usize> = BTreeMap::new();
    let mut groups: Vec<(&str, Vec<usize>)> = Vec::new();
    for (i, k) in keys.enumerate() {
        let s = *slot.entry(k).or_insert_with(|| {
            groups.push((k, Vec::new()));
            groups.len() - 1
        });
        groups[s].1.push(i);
    }
    groups
}

/// Uniformly keep `target` of `pool`; result in ascending index order.
pub(crate) fn trim(pool: &[usize], target: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut v = pool.to_vec();
    v.sort_unstable();
    if v.len() > target {
        v.shuffle(rng);
        v.truncate(target);
        v.sort_unstable();
    }
    v
}

/// Shuffle `pool` and cut it into consecutive parts of the given sizes.
pub(crate) fn divide(pool: &[usize], sizes: &[usize], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut v = pool.to_vec();
    v.sort_unstable();
    v.shuffle(rng);
    let mut out = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for &n in sizes {
        let end = (at + n).min(v.len());
        let mut part = v[at..end].to_vec();
        part.sort_unstable();
        out.push(part);
        at = end;
    }
    out
}

/// Append whole groups, in order, while the pool is below `target`.
/// Returns the number of groups consumed.
pub(crate) fn fill<'g>(groups: impl Iterator<Item = &'g [usize]>, target: usize, pool: &mut Vec<usize>) -> usize {
    let mut used = 0;
    for g in groups {
        if pool.len() >= target {
            break;
        }
        pool.extend_from_slice(g);
        used += 1;
    }
    used
}
