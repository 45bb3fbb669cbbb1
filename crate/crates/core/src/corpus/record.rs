use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::chem::{strip_extensions, MoleculeSet, SmilesError};

/// Hierarchical dotted reaction-class code such as `3.1.2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ClassCode(String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidClassCode(pub String);

impl fmt::Display for InvalidClassCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid class code {:?}: expected 1-3 dot-separated integers", self.0)
    }
}

impl core::error::Error for InvalidClassCode {}

impl ClassCode {
    pub fn parse(s: &str) -> Result<Self, InvalidClassCode> {
        let levels: Vec<&str> = s.split('.').collect();
        let ok = (1..=3).contains(&levels.len())
            && levels.iter().all(|l| !l.is_empty() && l.bytes().all(|b| b.is_ascii_digit()));
        if ok {
            Ok(ClassCode(s.to_string()))
        } else {
            Err(InvalidClassCode(s.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn levels(&self) -> impl Iterator<Item = &str> {
        self.0.split('.')
    }

    /// Dotted-prefix match: `3.1` matches `3.1` and `3.1.2` but not `3.10`.
    pub fn has_prefix(&self, prefix: &ClassCode) -> bool {
        let mut mine = self.levels();
        prefix.levels().all(|p| mine.next() == Some(p))
    }

    /// The "uncategorized" code `0.0` (or any code whose levels are all zero).
    pub fn is_uncategorized(&self) -> bool {
        self.levels().all(|l| l.bytes().all(|b| b == b'0'))
    }
}

impl TryFrom<String> for ClassCode {
    type Error = InvalidClassCode;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        ClassCode::parse(&s)
    }
}

impl From<ClassCode> for String {
    fn from(c: ClassCode) -> String {
        c.0
    }
}

impl fmt::Display for ClassCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A record as read from disk, before any chemistry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    /// `reactants>reagents>products`; the reagent segment may be empty.
    pub rxn: String,
    pub doc: String,
    pub authors: Vec<String>,
    pub year: i32,
    pub class: Option<ClassCode>,
}

/// A standardized reaction. `reactants` already contains the reagents;
/// `reagents` keeps the originally recorded reagent molecules.
#[derive(Clone, Debug)]
pub struct ReactionRecord {
    pub id: String,
    pub reactants: MoleculeSet,
    pub reagents: MoleculeSet,
    pub products: MoleculeSet,
    pub doc: String,
    pub authors: Vec<String>,
    pub year: i32,
    pub class_code: Option<ClassCode>,
}

impl ReactionRecord {
    pub fn reactant_smiles(&self) -> String {
        self.reactants.canonical()
    }

    pub fn product_smiles(&self) -> String {
        self.products.canonical()
    }

    /// `reactants>>products` in canonical form.
    pub fn reaction_smiles(&self) -> String {
        let mut s = self.reactant_smiles();
        s.push_str(">>");
        s.push_str(&self.product_smiles());
        s
    }

    /// Canonical `reactants>reagents>products` with the original reagents
    /// in the middle segment; standardizing the result gives this record
    /// back.
    pub fn to_raw(&self) -> RawRecord {
        let own = self.reactants.len() - self.reagents.len();
        let reactants = MoleculeSet::new(self.reactants.molecules()[..own].to_vec());
        RawRecord {
            id: self.id.clone(),
            rxn: alloc::format!("{}>{}>{}", reactants.canonical(), self.reagents.canonical(), self.products.canonical()),
            doc: self.doc.clone(),
            authors: self.authors.clone(),
            year: self.year,
            class: self.class_code.clone(),
        }
    }
}

/// Why a raw record could not be standardized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SkipReason {
    /// The reaction string does not have two or three `>`-separated parts.
    Malformed,
    Smiles { side: Side, error: SmilesError },
    /// No reactant or no product molecule.
    EmptySide(Side),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Reactants,
    Reagents,
    Products,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Reactants => "reactants",
            Side::Reagents => "reagents",
            Side::Products => "products",
        })
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::Malformed => f.write_str("malformed reaction string"),
            SkipReason::Smiles { side, error } => write!(f, "unparseable {side}: {error}"),
            SkipReason::EmptySide(side) => write!(f, "no {side}"),
        }
    }
}

/// Split `reactants>reagents>products` (or `reactants>>products`).
pub fn split_reaction(rxn: &str) -> Option<(&str, &str, &str)> {
    let rxn = strip_extensions(rxn);
    let mut parts = rxn.split('>');
    let r = parts.next()?;
    let a = parts.next()?;
    let p = parts.next()?;
    if parts.next().is_some() {
        return None;
    }
    Some((r, a, p))
}

/// Strip extensions and atom maps, parse every molecule and merge the
/// reagents into the reactants. Stereo marks are kept.
pub fn standardize(raw: &RawRecord) -> Result<ReactionRecord, SkipReason> {
    let (r, a, p) = split_reaction(&raw.rxn).ok_or(SkipReason::Malformed)?;
    let parse = |s: &str, side: Side| {
        let mut set = MoleculeSet::parse(s).map_err(|error| SkipReason::Smiles { side, error })?;
        set.clear_atom_maps();
        Ok::<_, SkipReason>(set)
    };
    let reactants = parse(r, Side::Reactants)?;
    let reagents = parse(a, Side::Reagents)?;
    let products = parse(p, Side::Products)?;
    if reactants.is_empty() && reagents.is_empty() {
        return Err(SkipReason::EmptySide(Side::Reactants));
    }
    if products.is_empty() {
        return Err(SkipReason::EmptySide(Side::Products));
    }
    let mut merged: Vec<_> = reactants.molecules().to_vec();
    merged.extend(reagents.molecules().iter().cloned());
    Ok(ReactionRecord {
        id: raw.id.clone(),
        reactants: MoleculeSet::new(merged),
        reagents,
        products,
        doc: raw.doc.clone(),
        authors: raw.authors.clone(),
        year: raw.year,
        class_code: raw.class.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn raw_round_trip() {
        let rec = standardize(&raw("[CH3:1][C:2](=O)O.OCC>ClCCl.O>CC(=O)OCC")).unwrap();
        let back = rec.to_raw();
        assert_eq!(back.rxn, alloc::format!("{}>{}>{}", crate::chem::canonicalize("CC(=O)O.OCC").unwrap(), crate::chem::canonicalize("ClCCl.O").unwrap(), crate::chem::canonicalize("CC(=O)OCC").unwrap()));
        let again = standardize(&back).unwrap();
        assert_eq!(again.reactant_smiles(), rec.reactant_smiles());
        assert_eq!(again.reagents.canonical(), rec.reagents.canonical());
        assert_eq!(again.to_raw(), back);
    }

    fn raw(rxn: &str) -> RawRecord {
        RawRecord {
            id: "r1".into(),
            rxn: rxn.into(),
            doc: "d1".into(),
            authors: vec!["a".into()],
            year: 2001,
            class: None,
        }
    }

    #[test]
    fn class_codes() {
        assert!(ClassCode::parse("3.1.2").is_ok());
        assert!(ClassCode::parse("3").is_ok());
        assert!(ClassCode::parse("1.2.3.4").is_err());
        assert!(ClassCode::parse("3..1").is_err());
        assert!(ClassCode::parse("3.a").is_err());
        let c = |s| ClassCode::parse(s).unwrap();
        assert!(c("3.1.2").has_prefix(&c("3.1")));
        assert!(c("3.1").has_prefix(&c("3.1")));
        assert!(!c("3.10").has_prefix(&c("3.1")));
        assert!(!c("1.30.1").has_prefix(&c("1.3")));
        assert!(!c("3").has_prefix(&c("3.1")));
        assert!(c("0.0").is_uncategorized());
        assert!(!c("3.0").is_uncategorized());
    }

    #[test]
    fn maps_removed_and_canonical() {
        let r = standardize(&raw("[CH3:1][OH:2]>>[CH2:1]=[O:2]")).unwrap();
        assert_eq!(r.reactant_smiles(), "CO");
        assert_eq!(r.product_smiles(), "C=O");
    }

    #[test]
    fn reagents_merged_and_remembered() {
        let r = standardize(&raw("CC(=O)OC>O>CC(=O)O.CO")).unwrap();
        assert_eq!(r.reactants.canonical(), crate::chem::canonicalize("O.COC(C)=O").unwrap());
        assert_eq!(r.reagents.canonical(), "O");
    }

    #[test]
    fn stereo_kept() {
        let r = standardize(&raw("C/C=C/C>>C[C@H](O)CC")).unwrap();
        assert!(r.reactant_smiles().contains('/'));
        assert!(r.product_smiles().contains('@'));
    }

    #[test]
    fn skips() {
        assert!(matches!(
            standardize(&raw("C1CC>>CC")),
            Err(SkipReason::Smiles { side: Side::Reactants, .. })
        ));
        assert_eq!(standardize(&raw("CCO")).unwrap_err(), SkipReason::Malformed);
        assert_eq!(standardize(&raw("CCO>>")).unwrap_err(), SkipReason::EmptySide(Side::Products));
        assert!(standardize(&raw("CCO>>CC=O |f:0.1|")).is_ok());
    }
}
