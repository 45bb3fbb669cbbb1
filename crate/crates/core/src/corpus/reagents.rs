//! Contributing-reactant vs reagent partition without atom maps.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::chem::{canonical_smiles, environment_ids, Molecule, MoleculeSet};

use super::record::ReactionRecord;

/// Default minimum share of a molecule's radius-1 environments that must also
/// occur in the products for it to count as contributing.
pub const DEFAULT_REAGENT_THRESHOLD: f64 = 0.2;

const OVERLAP_RADIUS: u32 = 1;

/// Indices into `reactants.molecules()`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReagentPartition {
    pub contributing: Vec<usize>,
    pub reagents: Vec<usize>,
}

impl ReagentPartition {
    pub fn contributing_set(&self, reactants: &MoleculeSet) -> MoleculeSet {
        self.contributing.iter().map(|&i| reactants.molecules()[i].clone()).collect()
    }

    pub fn reagent_set(&self, reactants: &MoleculeSet) -> MoleculeSet {
        self.reagents.iter().map(|&i| reactants.molecules()[i].clone()).collect()
    }
}

/// Distinct radius-0 and radius-1 environment identifiers of `mols`.
/// Identifiers are the unfolded 64-bit hashes, so a monatomic ion cannot
/// pick up overlap through a bucket collision.
pub fn environment_set<'a>(mols: impl IntoIterator<Item = &'a Molecule>) -> BTreeSet<u64> {
    mols.into_iter()
        .flat_map(|m| environment_ids(m, OVERLAP_RADIUS).into_iter().flatten())
        .collect()
}

/// Fraction of the molecule's distinct radius-1 environments present in
/// `product_envs`; 0 for a molecule with no atoms.
pub fn environment_overlap(mol: &Molecule, product_envs: &BTreeSet<u64>) -> f64 {
    let own = environment_set([mol]);
    if own.is_empty() {
        return 0.0;
    }
    own.intersection(product_envs).count() as f64 / own.len() as f64
}

/// A reactant-side molecule is a reagent when it also appears verbatim
/// among the products, or when less than `threshold` of its radius-1
/// environments occur in the products.
pub fn classify_molecules(reactants: &MoleculeSet, products: &MoleculeSet, threshold: f64) -> ReagentPartition {
    let product_canon: BTreeSet<_> = products.molecules().iter().map(canonical_smiles).collect();
    let product_envs = environment_set(products.molecules());
    let mut out = ReagentPartition::default();
    for (i, m) in reactants.molecules().iter().enumerate() {
        let verbatim = product_canon.contains(&canonical_smiles(m));
        if verbatim || environment_overlap(m, &product_envs) < threshold {
            out.reagents.push(i);
        } else {
            out.contributing.push(i);
        }
    }
    out
}

pub fn classify_reagents(rec: &ReactionRecord, threshold: f64) -> ReagentPartition {
    classify_molecules(&rec.reactants, &rec.products, threshold)
}
