//! Top-k scoring of ranked product predictions, the two-step
//! re-prediction analysis, Grignard addition labels and a retrieval
//! baseline predictor.

mod baseline;
mod two_step;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chem::MoleculeSet;

pub use baseline::{BaselineError, BaselineIndex, ReagentVocabulary, DEFAULT_VOCAB_SHARE};
pub use two_step::{classify_grignard_addition, two_step_predict, GrignardAddition, Predictor};

pub const DEFAULT_BEAM_WIDTH: usize = 5;
pub const DEFAULT_KS: [usize; 3] = [1, 3, 5];

/// Ranked product-set strings per record id; rank `i + 1` is entry `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSet(pub BTreeMap<String, Vec<String>>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PredictionError {
    ZeroRank { id: String },
    DuplicateRank { id: String, rank: usize },
    /// Ranks for `id` skip `missing`.
    Gap { id: String, missing: usize },
}

impl fmt::Display for PredictionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictionError::ZeroRank { id } => write!(f, "{id}: ranks start at 1"),
            PredictionError::DuplicateRank { id, rank } => write!(f, "{id}: rank {rank} given twice"),
            PredictionError::Gap { id, missing } => write!(f, "{id}: rank {missing} missing"),
        }
    }
}

impl core::error::Error for PredictionError {}

impl PredictionSet {
    /// Build from `(id, rank, smiles)` rows in any order.
    pub fn from_rows<I, S>(rows: I) -> Result<Self, PredictionError>
    where
        I: IntoIterator<Item = (S, usize, String)>,
        S: Into<String>,
    {
        let mut by_id: BTreeMap<String, BTreeMap<usize, String>> = BTreeMap::new();
        for (id, rank, smiles) in rows {
            let id = id.into();
            if rank == 0 {
                return Err(PredictionError::ZeroRank { id });
            }
            let slot = by_id.entry(id.clone()).or_default();
            if slot.insert(rank, smiles).is_some() {
                return Err(PredictionError::DuplicateRank { id, rank });
            }
        }
        let mut out = BTreeMap::new();
        for (id, ranks) in by_id {
            if let Some(missing) = (1..=ranks.len()).find(|r| !ranks.contains_key(r)) {
                return Err(PredictionError::Gap { id, missing });
            }
            out.insert(id, ranks.into_values().collect());
        }
        Ok(PredictionSet(out))
    }

    pub fn insert(&mut self, id: impl Into<String>, ranked: Vec<String>) {
        self.0.insert(id.into(), ranked);
    }

    pub fn get(&self, id: &str) -> Option<&[String]> {
        self.0.get(id).map(Vec::as_slice)
    }

    /// `(id, rank, smiles)` rows sorted by id then rank.
    pub fn rows(&self) -> impl Iterator<Item = (&str, usize, &str)> {
        self.0
            .iter()
            .flat_map(|(id, v)| v.iter().enumerate().map(move |(i, s)| (id.as_str(), i + 1, s.as_str())))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Sorted canonical product SMILES.
    #[default]
    Exact,
    /// As exact, after removing stereo marks on both sides.
    StereoAgnostic,
    /// Multiset of per-molecule formulas.
    RegioAgnostic,
}

impl EvalMode {
    pub const ALL: [EvalMode; 3] = [EvalMode::Exact, EvalMode::StereoAgnostic, EvalMode::RegioAgnostic];

    pub fn name(self) -> &'static str {
        match self {
            EvalMode::Exact => "exact",
            EvalMode::StereoAgnostic => "stereo_agnostic",
            EvalMode::RegioAgnostic => "regio_agnostic",
        }
    }

    /// Comparison key of a product set under this mode.
    pub fn key(self, products: &MoleculeSet) -> Vec<String> {
        match self {
            EvalMode::Exact => products.canonical_list(),
            EvalMode::StereoAgnostic => products.strip_stereo().canonical_list(),
            EvalMode::RegioAgnostic => products.formula_multiset(),
        }
    }

    /// Key of a predicted string; `None` when it does not parse.
    pub fn key_str(self, smiles: &str) -> Option<Vec<String>> {
        MoleculeSet::parse(smiles).ok().map(|m| self.key(&m))
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EvalMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| alloc::format!("unknown mode {s:?} (exact, stereo_agnostic, regio_agnostic)"))
    }
}

/// First rank (1-based, within `beam_width`) whose prediction matches the
/// truth. Unparseable predictions never match.
pub fn hit_rank(ranked: &[String], truth: &MoleculeSet, mode: EvalMode, beam_width: usize) -> Option<usize> {
    let want = mode.key(truth);
    ranked
        .iter()
        .take(beam_width)
        .position(|p| mode.key_str(p).as_ref() == Some(&want))
        .map(|i| i + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopK {
    pub k: usize,
    pub hits: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub beam_width: usize,
    pub topk: Vec<TopK>,
    /// In truth order.
    pub hit_ranks: Vec<(String, Option<usize>)>,
}

impl EvalReport {
    /// Aggregate per-record hit ranks; `ks` is sorted and deduplicated.
    pub fn from_hit_ranks(mode: EvalMode, beam_width: usize, ks: &[usize], hit_ranks: Vec<(String, Option<usize>)>) -> Self {
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        ks.dedup();
        let total = hit_ranks.len();
        let topk = ks
            .into_iter()
            .map(|k| {
                let hits = hit_ranks.iter().filter(|(_, r)| r.is_some_and(|r| r <= k)).count();
                let accuracy = if total == 0 { 0.0 } else { hits as f64 / total as f64 };
                TopK { k, hits, total, accuracy }
            })
            .collect();
        EvalReport { mode, beam_width, topk, hit_ranks }
    }

    pub fn accuracy(&self, k: usize) -> Option<f64> {
        self.topk.iter().find(|t| t.k == k).map(|t| t.accuracy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingPrediction(pub Vec<String>);

impl fmt::Display for MissingPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no predictions for {} record(s): {}", self.0.len(), self.0.join(", "))
    }
}

impl core::error::Error for MissingPrediction {}

/// Ids in `truth` without an entry in `preds`, in truth order.
pub fn missing_ids<'a>(preds: &PredictionSet, truth: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    truth.into_iter().filter(|id| !preds.0.contains_key(*id)).map(ToString::to_string).collect()
}

pub fn score_topk<'a>(
    preds: &PredictionSet,
    truth: &[(&'a str, &'a MoleculeSet)],
    ks: &[usize],
    mode: EvalMode,
    beam_width: usize,
) -> Result<EvalReport, MissingPrediction> {
    let missing = missing_ids(preds, truth.iter().map(|t| t.0));
    if !missing.is_empty() {
        return Err(MissingPrediction(missing));
    }
    let ranks = truth
        .iter()
        .map(|(id, products)| (id.to_string(), hit_rank(&preds.0[*id], products, mode, beam_width)))
        .collect();
    Ok(EvalReport::from_hit_ranks(mode, beam_width, ks, ranks))
}

/// Hit ranks for every mode at once, reusing each prediction parse.
pub fn hit_ranks_all_modes(ranked: &[String], truth: &MoleculeSet, beam_width: usize) -> [Option<usize>; 3] {
    let parsed: Vec<Option<MoleculeSet>> = ranked.iter().take(beam_width).map(|p| MoleculeSet::parse(p).ok()).collect();
    let mut out = [None; 3];
    for (slot, mode) in out.iter_mut().zip(EvalMode::ALL) {
        let want = mode.key(truth);
        *slot = parsed
            .iter()
            .position(|p| p.as_ref().is_some_and(|m| mode.key(m) == want))
            .map(|i| i + 1);
    }
    out
}
