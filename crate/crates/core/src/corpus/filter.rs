//! The six rejection criteria applied after standardization.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::chem::{element::CARBON, reaction_token_count, MoleculeSet};

use super::record::ReactionRecord;

/// Reactions longer than this many tokens are rejected.
pub const MAX_REACTION_TOKENS: usize = 800;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    /// Fewer than 5 heavy atoms over all reactants.
    FewReactantAtoms = 1,
    /// No carbon among the reactants.
    NoCarbon = 2,
    /// No reactant molecule has two or more bonds.
    NoPolyatomicReactant = 3,
    /// Both sides are equal after neutralization.
    Protonation = 4,
    /// Every new product has fewer than 2 heavy atoms.
    TrivialProducts = 5,
    /// More than [`MAX_REACTION_TOKENS`] tokens.
    TooLong = 6,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::FewReactantAtoms,
        Criterion::NoCarbon,
        Criterion::NoPolyatomicReactant,
        Criterion::Protonation,
        Criterion::TrivialProducts,
        Criterion::TooLong,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Criterion> {
        Criterion::ALL.get(usize::from(id).checked_sub(1)?).copied()
    }

    pub fn message(self) -> &'static str {
        match self {
            Criterion::FewReactantAtoms => "reactants have fewer than 5 heavy atoms",
            Criterion::NoCarbon => "reactants contain no carbon",
            Criterion::NoPolyatomicReactant => "no reactant has at least two bonds",
            Criterion::Protonation => "sides equal after neutralization",
            Criterion::TrivialProducts => "all new products have fewer than 2 heavy atoms",
            Criterion::TooLong => "more than 800 tokens",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RejectReason {
    pub criterion: Criterion,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "criterion {}: {}", self.criterion.id(), self.criterion.message())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    Reject(RejectReason),
}

fn fires(c: Criterion, reactants: &MoleculeSet, products: &MoleculeSet, canon_r: &[String]) -> bool {
    match c {
        Criterion::FewReactantAtoms => reactants.heavy_atom_count() < 5,
        Criterion::NoCarbon => !reactants
            .molecules()
            .iter()
            .any(|m| m.atoms().iter().any(|a| a.atomic_number == CARBON)),
        Criterion::NoPolyatomicReactant => reactants.molecules().iter().all(|m| m.bond_count() < 2),
        Criterion::Protonation => reactants.neutralize().canonical_list() == products.neutralize().canonical_list(),
        Criterion::TrivialProducts => products
            .molecules()
            .iter()
            .filter(|m| canon_r.binary_search(&crate::chem::canonical_smiles(m)).is_err())
            .all(|m| m.heavy_atom_count() < 2),
        Criterion::TooLong => {
            let (r, p) = (reactants.canonical(), products.canonical());
            reaction_token_count(&r, &p).map_or(true, |n| n > MAX_REACTION_TOKENS)
        }
    }
}

/// Every criterion that rejects `rec`, in criterion order.
pub fn firing_criteria(rec: &ReactionRecord) -> Vec<Criterion> {
    let canon_r = rec.reactants.canonical_list();
    Criterion::ALL
        .into_iter()
        .filter(|&c| fires(c, &rec.reactants, &rec.products, &canon_r))
        .collect()
}

/// Keep, or reject with the first criterion that fires.
pub fn filter(rec: &ReactionRecord) -> Verdict {
    let canon_r = rec.reactants.canonical_list();
    match Criterion::ALL
        .into_iter()
        .find(|&c| fires(c, &rec.reactants, &rec.products, &canon_r))
    {
        Some(criterion) => Verdict::Reject(RejectReason { criterion }),
        None => Verdict::Keep,
    }
}
