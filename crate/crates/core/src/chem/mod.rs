//! SMILES tokenization, parsing, canonical serialization and the molecular
//! descriptors the pipeline needs.
//!
//! Aromaticity is taken as written (lowercase atoms, `:` bonds); there is
//! no perception or kekulization, so a Kekulé and an aromatic writing of
//! the same ring canonicalize differently.

mod canon;
pub mod element;
mod fingerprint;
mod formula;
mod molecule;
mod parse;
mod pattern;
mod stereo;
mod token;
mod write;

use alloc::string::String;
use alloc::vec::Vec;

pub use canon::{canonical_ranks, canonical_smiles, STEREO_LEAF_BUDGET};
pub(crate) use fingerprint::cosine_distance_with_norms;
pub use fingerprint::{
    cosine_distance, environment_ids, hash_words, molecule_fingerprint, morgan_fingerprint, FingerprintVector,
    DEFAULT_RADIUS, DEFAULT_WIDTH,
};
pub use formula::Formula;
pub use molecule::{Atom, Bond, BondDir, BondOrder, Chirality, Molecule};
pub use parse::{parse_smiles, strip_extensions, SmilesError};
pub use pattern::{count_alcohols, neutralize, neutralize_all};
pub use stereo::{double_bond_stereo, DoubleBondStereo};
pub use token::{reaction_token_count, ring_label, tokenize_smiles, Token, TokenKind, TokenizeError};
pub use write::write_smiles;

/// Clear all tetrahedral and double-bond stereo marks.
pub fn strip_stereo(mol: &Molecule) -> Molecule {
    mol.strip_stereo()
}

/// Canonical form of a (possibly multi-component) SMILES string: each
/// component canonicalized, sorted, joined with `.`.
pub fn canonicalize(s: &str) -> Result<String, SmilesError> {
    Ok(MoleculeSet::parse(s)?.canonical())
}

/// Unordered collection of molecules; identity is the multiset of
/// canonical SMILES.
#[derive(Clone, Debug, Default)]
pub struct MoleculeSet {
    molecules: Vec<Molecule>,
}

impl MoleculeSet {
    pub fn new(molecules: Vec<Molecule>) -> Self {
        MoleculeSet { molecules }
    }

    pub fn parse(s: &str) -> Result<Self, SmilesError> {
        if s.trim().is_empty() {
            return Ok(MoleculeSet::default());
        }
        parse_smiles(s).map(MoleculeSet::new)
    }

    /// Parse several SMILES strings (each possibly dotted) into one set.
    pub fn parse_all<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Self, SmilesError> {
        let mut molecules = Vec::new();
        for s in items {
            molecules.extend(MoleculeSet::parse(s)?.molecules);
        }
        Ok(MoleculeSet { molecules })
    }

    pub fn molecules(&self) -> &[Molecule] {
        &self.molecules
    }

    pub fn len(&self) -> usize {
        self.molecules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.molecules.is_empty()
    }

    /// Sorted canonical SMILES of the members.
    pub fn canonical_list(&self) -> Vec<String> {
        let mut v: Vec<String> = self.molecules.iter().map(canonical_smiles).collect();
        v.sort();
        v
    }

    pub fn canonical(&self) -> String {
        self.canonical_list().join(".")
    }

    pub fn clear_atom_maps(&mut self) {
        for m in &mut self.molecules {
            m.clear_atom_maps();
        }
    }

    pub fn strip_stereo(&self) -> MoleculeSet {
        MoleculeSet::new(self.molecules.iter().map(strip_stereo).collect())
    }

    pub fn neutralize(&self) -> MoleculeSet {
        MoleculeSet::new(neutralize_all(&self.molecules))
    }

    pub fn formula(&self) -> Formula {
        Formula::of_all(&self.molecules)
    }

    /// Sorted per-molecule formulas (Hill strings).
    pub fn formula_multiset(&self) -> Vec<String> {
        let mut v: Vec<String> = self.molecules.iter().map(|m| Formula::of(m).hill()).collect();
        v.sort();
        v
    }

    pub fn fingerprint(&self, radius: u32, width: u32) -> FingerprintVector {
        morgan_fingerprint(&self.molecules, radius, width)
    }

    pub fn count_alcohols(&self) -> usize {
        self.molecules.iter().map(count_alcohols).sum()
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.molecules.iter().map(Molecule::heavy_atom_count).sum()
    }
}

impl FromIterator<Molecule> for MoleculeSet {
    fn from_iter<T: IntoIterator<Item = Molecule>>(iter: T) -> Self {
        MoleculeSet::new(iter.into_iter().collect())
    }
}
