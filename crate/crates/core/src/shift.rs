//! Train/test distribution shift as mean cosine distance to the nearest
//! training reactions, in reactant-fingerprint and reaction-difference
//! space.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::chem::{FingerprintVector, MoleculeSet};
use crate::corpus::{classify_reagents, ReactionRecord};

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_BINS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FingerprintConfig {
    pub radius: u32,
    pub width: u32,
    /// Reagent bucket-overlap threshold.
    pub reagent_threshold: f64,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        FingerprintConfig {
            radius: crate::chem::DEFAULT_RADIUS,
            width: crate::chem::DEFAULT_WIDTH,
            reagent_threshold: crate::corpus::DEFAULT_REAGENT_THRESHOLD,
        }
    }
}

/// `fingerprint(products) - fingerprint(contributing)`.
pub fn reaction_fingerprint(contributing: &MoleculeSet, products: &MoleculeSet, radius: u32, width: u32) -> FingerprintVector {
    products.fingerprint(radius, width).sub(&contributing.fingerprint(radius, width))
}

/// One record in both spaces, reagents removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Featurized {
    pub reactant: FingerprintVector,
    pub reaction: FingerprintVector,
}

/// Reactants that contribute to the products. When the reagent rules
/// leave nothing (every reactant reappears among the products, as in
/// `A>>A`), all reactants count.
pub fn contributing_reactants(rec: &ReactionRecord, reagent_threshold: f64) -> MoleculeSet {
    let part = classify_reagents(rec, reagent_threshold);
    if part.contributing.is_empty() {
        rec.reactants.clone()
    } else {
        part.contributing_set(&rec.reactants)
    }
}

pub fn featurize(rec: &ReactionRecord, cfg: &FingerprintConfig) -> Featurized {
    let contributing = contributing_reactants(rec, cfg.reagent_threshold);
    Featurized {
        reactant: contributing.fingerprint(cfg.radius, cfg.width),
        reaction: reaction_fingerprint(&contributing, &rec.products, cfg.radius, cfg.width),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Vectors with cached squared norms for repeated exact queries.
#[derive(Clone, Debug, Default)]
pub struct VectorIndex {
    vectors: Vec<FingerprintVector>,
    norms: Vec<i128>,
}

impl VectorIndex {
    pub fn new(vectors: Vec<FingerprintVector>) -> Self {
        let norms = vectors.iter().map(FingerprintVector::norm_squared).collect();
        VectorIndex { vectors, norms }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[FingerprintVector] {
        &self.vectors
    }

    /// The `k` nearest vectors by cosine distance, ties by index.
    pub fn nearest(&self, q: &FingerprintVector, k: usize) -> Vec<Neighbor> {
        let qn = q.norm_squared();
        let mut all: Vec<Neighbor> = self
            .vectors
            .iter()
            .zip(&self.norms)
            .enumerate()
            .map(|(index, (v, &vn))| Neighbor {
                index,
                distance: crate::chem::cosine_distance_with_norms(q, qn, v, vn),
            })
            .collect();
        let by = |a: &Neighbor, b: &Neighbor| a.distance.total_cmp(&b.distance).then(a.index.cmp(&b.index));
        let k = k.min(all.len());
        if k == 0 {
            return Vec::new();
        }
        if k < all.len() {
            all.select_nth_unstable_by(k - 1, by);
            all.truncate(k);
        }
        all.sort_by(by);
        all
    }
}

/// Training side of a shift analysis.
#[derive(Clone, Debug, Default)]
pub struct ShiftIndex {
    pub reactant: VectorIndex,
    pub reaction: VectorIndex,
}

impl ShiftIndex {
    pub fn new(train: &[Featurized]) -> Self {
        ShiftIndex {
            reactant: VectorIndex::new(train.iter().map(|f| f.reactant.clone()).collect()),
            reaction: VectorIndex::new(train.iter().map(|f| f.reaction.clone()).collect()),
        }
    }

    pub fn query(&self, f: &Featurized, k: usize) -> ShiftRow {
        let reactant = self.reactant.nearest(&f.reactant, k);
        let reaction = self.reaction.nearest(&f.reaction, k);
        ShiftRow {
            reactant_mean: mean(&reactant),
            reaction_mean: mean(&reaction),
            reactant_neighbors: reactant.iter().map(|n| n.index).collect(),
            reaction_neighbors: reaction.iter().map(|n| n.index).collect(),
        }
    }
}

fn mean(ns: &[Neighbor]) -> f64 {
    if ns.is_empty() {
        return f64::NAN;
    }
    ns.iter().map(|n| n.distance).sum::<f64>() / ns.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftRow {
    pub reactant_mean: f64,
    pub reaction_mean: f64,
    /// Training indices, nearest first.
    pub reactant_neighbors: Vec<usize>,
    pub reaction_neighbors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftError {
    InsufficientData { needed: usize, available: usize },
}

impl fmt::Display for ShiftError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftError::InsufficientData { needed, available } => {
                write!(f, "need at least {needed} training reactions, have {available}")
            }
        }
    }
}

impl core::error::Error for ShiftError {}

/// Exact k-NN shift for every test record, in test order.
pub fn knn_shift(test: &[Featurized], train: &[Featurized], k: usize) -> Result<Vec<ShiftRow>, ShiftError> {
    if train.len() < k || k == 0 {
        return Err(ShiftError::InsufficientData { needed: k.max(1), available: train.len() });
    }
    let index = ShiftIndex::new(train);
    Ok(test.iter().map(|f| index.query(f, k)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSummary {
    pub count: usize,
    pub median: f64,
    pub lo: f64,
    pub hi: f64,
    pub bins: Vec<usize>,
}

/// Median (mean of the middle pair for even counts) and a histogram of
/// `bins` equal bins over `[lo, hi]`, the last bin closed.
pub fn summarize(values: &[f64], lo: f64, hi: f64, bins: usize) -> SpaceSummary {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0,
    };
    let mut counts = vec![0usize; bins];
    if bins > 0 {
        for &v in values {
            let t = (v - lo) / (hi - lo) * bins as f64;
            let b = if t.is_nan() || t < 0.0 { 0 } else { (t as usize).min(bins - 1) };
            counts[b] += 1;
        }
    }
    SpaceSummary { count: n, median, lo, hi, bins: counts }
}

/// Plot-ready result of one shift analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceReport {
    pub split: String,
    pub k: usize,
    pub ids: Vec<String>,
    pub rows: Vec<ShiftRow>,
    pub reactant: SpaceSummary,
    pub reaction: SpaceSummary,
}

impl DistanceReport {
    pub fn new(split: String, k: usize, ids: Vec<String>, rows: Vec<ShiftRow>, bins: usize) -> Self {
        let r: Vec<f64> = rows.iter().map(|x| x.reactant_mean).collect();
        let x: Vec<f64> = rows.iter().map(|x| x.reaction_mean).collect();
        DistanceReport {
            split,
            k,
            ids,
            reactant: summarize(&r, 0.0, 1.0, bins),
            reaction: summarize(&x, 0.0, 2.0, bins),
            rows,
        }
    }
}
