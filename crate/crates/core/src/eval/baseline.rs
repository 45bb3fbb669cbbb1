//! Nearest-neighbor retrieval stand-in for a trained reaction predictor.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::chem::{canonical_smiles, FingerprintVector, MoleculeSet};
use crate::corpus::{classify_reagents, ReactionRecord};
use crate::shift::{FingerprintConfig, Neighbor, VectorIndex};

use super::Predictor;

/// A molecule enters the vocabulary when more than this share of its
/// training occurrences classify as reagent.
pub const DEFAULT_VOCAB_SHARE: f64 = 0.5;

/// Canonical SMILES treated as reagents when products are unknown.
///
/// Query reactants have no products to test against, so the per-record
/// rule cannot run; instead molecules that the training records mostly
/// mark as reagents are dropped, on both sides alike.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReagentVocabulary(pub BTreeSet<String>);

impl ReagentVocabulary {
    pub fn learn(train: &[ReactionRecord], reagent_threshold: f64, share: f64) -> Self {
        let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for rec in train {
            let part = classify_reagents(rec, reagent_threshold);
            let mols = rec.reactants.molecules();
            for &i in &part.reagents {
                let t = tally.entry(canonical_smiles(&mols[i])).or_default();
                t.0 += 1;
                t.1 += 1;
            }
            for &i in &part.contributing {
                tally.entry(canonical_smiles(&mols[i])).or_default().1 += 1;
            }
        }
        ReagentVocabulary(
            tally
                .into_iter()
                .filter(|(_, (r, n))| *r as f64 > share * *n as f64)
                .map(|(s, _)| s)
                .collect(),
        )
    }

    /// `reactants` minus vocabulary molecules; all of them if none remain.
    pub fn strip(&self, reactants: &MoleculeSet) -> MoleculeSet {
        let kept: MoleculeSet = reactants
            .molecules()
            .iter()
            .filter(|m| !self.0.contains(&canonical_smiles(m)))
            .cloned()
            .collect();
        if kept.is_empty() {
            reactants.clone()
        } else {
            kept
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaselineError {
    EmptyIndex,
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("baseline index needs at least one training reaction")
    }
}

impl core::error::Error for BaselineError {}

#[derive(Clone, Debug)]
pub struct BaselineIndex {
    cfg: FingerprintConfig,
    vocab: ReagentVocabulary,
    index: VectorIndex,
    products: Vec<String>,
}

impl BaselineIndex {
    pub fn build(train: &[ReactionRecord], cfg: &FingerprintConfig) -> Result<Self, BaselineError> {
        Self::build_with_share(train, cfg, DEFAULT_VOCAB_SHARE)
    }

    pub fn build_with_share(train: &[ReactionRecord], cfg: &FingerprintConfig, share: f64) -> Result<Self, BaselineError> {
        if train.is_empty() {
            return Err(BaselineError::EmptyIndex);
        }
        let vocab = ReagentVocabulary::learn(train, cfg.reagent_threshold, share);
        let vectors = train
            .iter()
            .map(|r| vocab.strip(&r.reactants).fingerprint(cfg.radius, cfg.width))
            .collect();
        Ok(BaselineIndex {
            cfg: *cfg,
            vocab,
            index: VectorIndex::new(vectors),
            products: train.iter().map(|r| r.products.canonical()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn vocabulary(&self) -> &ReagentVocabulary {
        &self.vocab
    }

    pub fn query_vector(&self, reactants: &MoleculeSet) -> FingerprintVector {
        self.vocab.strip(reactants).fingerprint(self.cfg.radius, self.cfg.width)
    }

    /// Nearest training reactions, ascending distance, ties by train order.
    pub fn neighbors(&self, reactants: &MoleculeSet, width: usize) -> Vec<Neighbor> {
        self.index.nearest(&self.query_vector(reactants), width)
    }

    /// Product sets of the `width` nearest training reactions; duplicates
    /// are kept in place.
    pub fn predict(&self, reactants: &MoleculeSet, width: usize) -> Vec<String> {
        self.neighbors(reactants, width)
            .into_iter()
            .map(|n| self.products[n.index].clone())
            .collect()
    }
}

impl Predictor for BaselineIndex {
    fn predict(&self, reactants: &MoleculeSet, width: usize) -> Vec<String> {
        BaselineIndex::predict(self, reactants, width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{standardize, RawRecord};
    use alloc::format;
    use alloc::vec;

    fn rec(i: usize, rxn: &str) -> ReactionRecord {
        standardize(&RawRecord {
            id: format!("r{i}"),
            rxn: rxn.into(),
            doc: "d".into(),
            authors: vec![],
            year: 2000,
            class: None,
        })
        .unwrap()
    }

    fn train() -> Vec<ReactionRecord> {
        [
            "CCCCO.ClC(Cl)Cl>>CCCC=O",
            "CCCCN.CC(=O)Cl.ClC(Cl)Cl>>CCCCNC(C)=O",
            "Brc1ccccc1.OB(O)c1ccccc1>>c1ccc(-c2ccccc2)cc1",
            "CCCCO.ClC(Cl)Cl>>CCCC=O",
        ]
        .iter()
        .enumerate()
        .map(|(i, s)| rec(i, s))
        .collect()
    }

    #[test]
    fn exact_query_ranks_its_products_first() {
        let t = train();
        let idx = BaselineIndex::build(&t, &FingerprintConfig::default()).unwrap();
        assert!(idx.vocabulary().0.contains(&crate::chem::canonicalize("ClC(Cl)Cl").unwrap()));
        let q = MoleculeSet::parse("CCCCN.CC(=O)Cl").unwrap();
        let n = idx.neighbors(&q, 5);
        assert_eq!(n[0].index, 1);
        assert_eq!(n[0].distance, 0.0);
        assert_eq!(idx.predict(&q, 5)[0], t[1].products.canonical());
        // Truncated to the training size; duplicate products kept.
        let p = idx.predict(&MoleculeSet::parse("CCCCO").unwrap(), 10);
        assert_eq!(p.len(), 4);
        assert_eq!(p[0], p[1]);
        assert_eq!(idx.neighbors(&MoleculeSet::parse("CCCCO").unwrap(), 2).iter().map(|n| n.index).collect::<Vec<_>>(), vec![0, 3]);
    }

    #[test]
    fn query_order_does_not_matter() {
        let idx = BaselineIndex::build(&train(), &FingerprintConfig::default()).unwrap();
        let a = idx.predict(&MoleculeSet::parse("OB(O)c1ccccc1.Brc1ccccc1.ClC(Cl)Cl").unwrap(), 3);
        let b = idx.predict(&MoleculeSet::parse("ClC(Cl)Cl.Brc1ccccc1.OB(O)c1ccccc1").unwrap(), 3);
        assert_eq!(a, b);
    }

    #[test]
    fn empty_train() {
        assert_eq!(BaselineIndex::build(&[], &FingerprintConfig::default()).unwrap_err(), BaselineError::EmptyIndex);
    }

}
