//! Molecular formulas in Hill order.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use super::element::{self, CARBON, HYDROGEN};
use super::molecule::Molecule;

/// Element counts including every hydrogen (graph atoms, bracket and
/// implicit counts). Wildcard atoms are not counted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Formula(BTreeMap<u8, u32>);

impl Formula {
    pub fn of(mol: &Molecule) -> Formula {
        let mut f = Formula::default();
        f.add_molecule(mol);
        f
    }

    pub fn of_all<'a>(mols: impl IntoIterator<Item = &'a Molecule>) -> Formula {
        let mut f = Formula::default();
        for m in mols {
            f.add_molecule(m);
        }
        f
    }

    fn add_molecule(&mut self, mol: &Molecule) {
        for a in mol.atoms() {
            if a.atomic_number != 0 {
                *self.0.entry(a.atomic_number).or_default() += 1;
            }
            if a.hydrogens > 0 {
                *self.0.entry(HYDROGEN).or_default() += a.hydrogens as u32;
            }
        }
    }

    pub fn count(&self, atomic_number: u8) -> u32 {
        self.0.get(&atomic_number).copied().unwrap_or(0)
    }

    /// `(symbol, count)` pairs.
    pub fn counts(&self) -> impl Iterator<Item = (&'static str, u32)> + '_ {
        self.0.iter().map(|(&z, &c)| (element::symbol(z), c))
    }

    /// Hill notation: C then H when carbon is present, everything else
    /// alphabetical.
    pub fn hill(&self) -> String {
        let mut parts: alloc::vec::Vec<(&str, u32)> = self.counts().collect();
        let has_carbon = self.count(CARBON) > 0;
        parts.sort_by_key(|&(s, _)| match (has_carbon, s) {
            (true, "C") => (0, s),
            (true, "H") => (1, s),
            _ => (2, s),
        });
        let mut out = String::new();
        for (s, c) in parts {
            out.push_str(s);
            if c > 1 {
                use fmt::Write;
                let _ = write!(out, "{c}");
            }
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hill())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    fn formula(s: &str) -> Formula {
        Formula::of_all(&parse_smiles(s).unwrap())
    }

    #[test]
    fn examples() {
        let f = formula("CCO");
        assert_eq!((f.count(6), f.count(1), f.count(8)), (2, 6, 1));
        assert_eq!(f.hill(), "C2H6O");
        assert_eq!(formula("C=CCC"), formula("CC=CC"));
        assert_eq!(formula("C=CCC").hill(), "C4H8");
        assert_ne!(formula("CC=O"), formula("CCO"));
        assert_eq!(formula("[H][H]").hill(), "H2");
        assert_eq!(formula("[NH4+].[Cl-]").hill(), "ClH4N");
        assert_eq!(formula("c1ccccc1").hill(), "C6H6");
    }
}
