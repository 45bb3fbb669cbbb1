//! Canonical atom ranking by iterative refinement with tie breaking.
//!
//! Initial classes come from a per-atom invariant; classes are refined by
//! the sorted multiset of `(neighbor class, bond order)` until stable.
//! Remaining ties are broken by promoting one member of the lowest tied
//! class and refining again. For stereo-free graphs any member of a tied
//! class yields the same string, so only the first is followed. With
//! stereo present every member is tried and the smallest output string
//! wins, bounded by [`STEREO_LEAF_BUDGET`].

use alloc::string::String;
use alloc::vec::Vec;

use super::molecule::Molecule;
use super::write::write_smiles;

/// Leaves explored per molecule when stereo forces an exhaustive search.
pub const STEREO_LEAF_BUDGET: usize = 512;

type Invariant = (u8, bool, u8, i8, u8, bool, u16);

fn initial_invariant(mol: &Molecule, i: usize) -> Invariant {
    let a = &mol.atoms()[i];
    (
        a.atomic_number,
        a.aromatic,
        mol.heavy_degree(i) as u8,
        a.charge,
        mol.total_hydrogens(i) as u8,
        mol.in_ring(i),
        a.isotope,
    )
}

/// Dense ranks: equal keys share a rank, ranks are `0..classes`.
fn dense_ranks<K: Ord>(keys: &[K]) -> (Vec<u32>, usize) {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = alloc::vec![0u32; keys.len()];
    let mut class = 0u32;
    for w in 0..idx.len() {
        if w > 0 && keys[idx[w]] != keys[idx[w - 1]] {
            class += 1;
        }
        ranks[idx[w]] = class;
    }
    let classes = if keys.is_empty() { 0 } else { class as usize + 1 };
    (ranks, classes)
}

fn refine(mol: &Molecule, ranks: &mut Vec<u32>) {
    let mut classes = count_classes(ranks);
    let n = ranks.len();
    while classes < n {
        let keys: Vec<(u32, Vec<(u32, u8)>)> = (0..n)
            .map(|i| {
                let mut nb: Vec<(u32, u8)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(j, b)| (ranks[j], mol.bonds()[b].order.code()))
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let (next, next_classes) = dense_ranks(&keys);
        *ranks = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
}

fn count_classes(ranks: &[u32]) -> usize {
    ranks.iter().max().map_or(0, |&m| m as usize + 1)
}

/// Members of the lowest-ranked class with more than one atom, by index.
fn first_tie(ranks: &[u32]) -> Option<Vec<usize>> {
    let mut counts = alloc::vec![0usize; ranks.len()];
    for &r in ranks {
        counts[r as usize] += 1;
    }
    let class = counts.iter().position(|&c| c > 1)? as u32;
    Some((0..ranks.len()).filter(|&i| ranks[i] == class).collect())
}

fn promote(ranks: &[u32], chosen: usize) -> Vec<u32> {
    let keys: Vec<(u32, bool)> = ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, r == ranks[chosen] && i != chosen))
        .collect();
    dense_ranks(&keys).0
}

fn refined_initial(mol: &Molecule) -> Vec<u32> {
    let inv: Vec<Invariant> = (0..mol.atom_count()).map(|i| initial_invariant(mol, i)).collect();
    let mut ranks = dense_ranks(&inv).0;
    refine(mol, &mut ranks);
    ranks
}

/// Canonical ranks following the first-member tie-break path. Ranks are
/// a permutation of `0..n`.
pub fn canonical_ranks(mol: &Molecule) -> Vec<u32> {
    let mut ranks = refined_initial(mol);
    while let Some(tied) = first_tie(&ranks) {
        ranks = promote(&ranks, tied[0]);
        refine(mol, &mut ranks);
    }
    ranks
}

/// Canonical SMILES of one connected molecule.
pub fn canonical_smiles(mol: &Molecule) -> String {
    if mol.atom_count() == 0 {
        return String::new();
    }
    let ranks = refined_initial(mol);
    if !mol.has_stereo() {
        let mut ranks = ranks;
        while let Some(tied) = first_tie(&ranks) {
            ranks = promote(&ranks, tied[0]);
            refine(mol, &mut ranks);
        }
        return write_smiles(mol, &ranks);
    }
    let mut budget = STEREO_LEAF_BUDGET;
    let mut best: Option<String> = None;
    search(mol, ranks, &mut budget, &mut best);
    best.unwrap_or_default()
}

fn search(mol: &Molecule, ranks: Vec<u32>, budget: &mut usize, best: &mut Option<String>) {
    let Some(tied) = first_tie(&ranks) else {
        *budget = budget.saturating_sub(1);
        let s = write_smiles(mol, &ranks);
        if best.as_ref().is_none_or(|b| s < *b) {
            *best = Some(s);
        }
        return;
    };
    for (k, &atom) in tied.iter().enumerate() {
        if k > 0 && *budget == 0 {
            break;
        }
        let mut next = promote(&ranks, atom);
        refine(mol, &mut next);
        search(mol, next, budget, best);
    }
}
