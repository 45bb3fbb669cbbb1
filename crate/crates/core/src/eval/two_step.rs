use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chem::{canonical_smiles, MoleculeSet};

/// Ranked product-set predictor over a reactant set.
pub trait Predictor {
    fn predict(&self, reactants: &MoleculeSet, width: usize) -> Vec<String>;
}

impl<F> Predictor for F
where
    F: Fn(&MoleculeSet, usize) -> Vec<String>,
{
    fn predict(&self, reactants: &MoleculeSet, width: usize) -> Vec<String> {
        self(reactants, width)
    }
}

/// Predict, then predict again with the top-1 products added to the
/// original reactants. The second input is the multiset union of the two
/// (each molecule at its larger multiplicity), so a predictor that echoes
/// its input reaches the same ranking in both rounds.
///
/// An empty or unparseable first round yields an empty ranking.
pub fn two_step_predict<P: Predictor + ?Sized>(predictor: &P, reactants: &MoleculeSet, width: usize) -> Vec<String> {
    let first = predictor.predict(reactants, width);
    let Some(top) = first.first() else {
        return Vec::new();
    };
    let Ok(top) = MoleculeSet::parse(top) else {
        return Vec::new();
    };
    if top.is_empty() {
        return Vec::new();
    }
    let mut have: BTreeMap<String, usize> = BTreeMap::new();
    for m in top.molecules() {
        *have.entry(canonical_smiles(m)).or_default() += 1;
    }
    let mut second = top.molecules().to_vec();
    for m in reactants.molecules() {
        match have.get_mut(&canonical_smiles(m)) {
            Some(n) if *n > 0 => *n -= 1,
            _ => second.push(m.clone()),
        }
    }
    predictor.predict(&MoleculeSet::new(second), width)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrignardAddition {
    Single,
    Double,
}

/// Double when the products carry more alcohol groups than the reactants.
pub fn classify_grignard_addition(reactants: &MoleculeSet, products: &MoleculeSet) -> GrignardAddition {
    if products.count_alcohols() > reactants.count_alcohols() {
        GrignardAddition::Double
    } else {
        GrignardAddition::Single
    }
}
