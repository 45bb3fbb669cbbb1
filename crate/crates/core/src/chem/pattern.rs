//! Fixed structural rules: charge neutralization and alcohol counting.

use alloc::vec::Vec;

use super::element::{CARBON, NITROGEN, OXYGEN, SULFUR};
use super::molecule::{BondOrder, Molecule};

/// Neutralize common (de)protonation states: anionic O, S and N gain a
/// hydrogen; protonated nitrogen (`[NH+]` through `[NH4+]`) loses one.
/// Every other atom is left untouched.
pub fn neutralize(mol: &Molecule) -> Molecule {
    let mut out = mol.clone();
    for a in out.atoms_mut() {
        let changed = match (a.atomic_number, a.charge) {
            (OXYGEN | SULFUR | NITROGEN, -1) => {
                a.hydrogens += 1;
                true
            }
            (NITROGEN, 1) if a.hydrogens > 0 => {
                a.hydrogens -= 1;
                true
            }
            _ => false,
        };
        if changed {
            a.charge = 0;
            a.chirality = None;
        }
    }
    out
}

pub fn neutralize_all(mols: &[Molecule]) -> Vec<Molecule> {
    mols.iter().map(neutralize).collect()
}

/// Oxygens with one heavy neighbor, at least one hydrogen and a single
/// bond to carbon. Carboxylic acid OH groups match as well.
pub fn count_alcohols(mol: &Molecule) -> usize {
    (0..mol.atom_count())
        .filter(|&i| {
            let a = &mol.atoms()[i];
            a.atomic_number == OXYGEN
                && mol.heavy_degree(i) == 1
                && mol.total_hydrogens(i) >= 1
                && mol.neighbors(i).iter().any(|&(j, b)| {
                    mol.atoms()[j].atomic_number == CARBON && mol.bonds()[b].order == BondOrder::Single
                })
        })
        .count()
}
