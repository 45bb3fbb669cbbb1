//! Stereo bookkeeping shared by the parser and the writer.
//!
//! Tetrahedral parity is stored against a reference neighbor order, so it
//! survives any re-writing. Double-bond configuration is carried by the
//! directional marks on adjacent single bonds; the writer re-solves those
//! marks for its own traversal.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::molecule::{BondDir, BondOrder, Molecule};

/// Placeholder for an implicit hydrogen in a neighbor ordering.
pub(crate) const IMPLICIT_H: usize = usize::MAX;

/// Reference neighbor order for tetrahedral parity: implicit H first,
/// then neighbors by ascending atom index.
pub(crate) fn reference_order(mol: &Molecule, atom: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(4);
    if mol.atoms()[atom].hydrogens == 1 {
        order.push(IMPLICIT_H);
    }
    order.extend(mol.neighbors(atom).iter().map(|&(n, _)| n));
    order
}

/// Whether `written` is an odd permutation of `reference`.
pub(crate) fn is_odd_permutation(written: &[usize], reference: &[usize]) -> bool {
    let positions: Vec<usize> = written
        .iter()
        .map(|w| reference.iter().position(|r| r == w).unwrap_or(0))
        .collect();
    let mut inversions = 0;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i] > positions[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Whether an atom can carry a tetrahedral mark.
pub(crate) fn can_be_tetrahedral(mol: &Molecule, atom: usize) -> bool {
    let h = mol.atoms()[atom].hydrogens as usize;
    let total = mol.neighbors(atom).len() + h;
    h <= 1 && (3..=4).contains(&total)
}

/// Configuration of one stereo double bond, relative to one reference
/// neighbor on each end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoubleBondStereo {
    pub bond: usize,
    pub left: usize,
    pub right: usize,
    pub left_ref: usize,
    pub right_ref: usize,
    /// References on opposite sides.
    pub trans: bool,
}

fn single_neighbors(mol: &Molecule, atom: usize, exclude_bond: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    mol.neighbors(atom)
        .iter()
        .copied()
        .filter(move |&(_, b)| b != exclude_bond && mol.bonds()[b].order == BondOrder::Single)
}

/// `true` when neighbor `n` sits above `end` (mark read `end -> n` is `/`).
fn side_of(mol: &Molecule, end: usize, bond: usize) -> Option<bool> {
    match mol.bonds()[bond].dir_from(end) {
        BondDir::Up => Some(true),
        BondDir::Down => Some(false),
        BondDir::None => None,
    }
}

/// Double bonds whose configuration is fixed by marks on both ends.
pub fn double_bond_stereo(mol: &Molecule) -> Vec<DoubleBondStereo> {
    let mut out = Vec::new();
    for (i, b) in mol.bonds().iter().enumerate() {
        if b.order != BondOrder::Double {
            continue;
        }
        let marked = |end: usize| {
            single_neighbors(mol, end, i).find_map(|(n, nb)| side_of(mol, end, nb).map(|s| (n, s)))
        };
        if let (Some((x, sx)), Some((y, sy))) = (marked(b.begin), marked(b.end)) {
            out.push(DoubleBondStereo {
                bond: i,
                left: b.begin,
                right: b.end,
                left_ref: x,
                right_ref: y,
                trans: sx != sy,
            });
        }
    }
    out
}

/// Remove directional marks that do not take part in a stereo double bond.
pub(crate) fn prune_orphan_marks(mol: &mut Molecule) {
    let stereo = double_bond_stereo(mol);
    let mut keep = vec![false; mol.bond_count()];
    for s in &stereo {
        for end in [s.left, s.right] {
            for (_, b) in single_neighbors(mol, end, s.bond) {
                keep[b] = true;
            }
        }
    }
    for (i, b) in mol.bonds_mut().iter_mut().enumerate() {
        if !keep[i] {
            b.dir = BondDir::None;
        }
    }
}

/// Solve directional marks (in each bond's `begin -> end` orientation) that
/// reproduce `stereo`, marking every single bond adjacent to a stereo
/// double bond. `written_from[b]` is the atom the writer emits bond `b`
/// from and `emit_rank[b]` its emission position; each independent group
/// of marks starts with a `/` as written. Returns `None` on a conflict.
pub(crate) fn assign_marks(
    mol: &Molecule,
    stereo: &[DoubleBondStereo],
    written_from: &[usize],
    emit_rank: &[usize],
) -> Option<Vec<BondDir>> {
    let nb = mol.bond_count();
    let mut edges: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nb];
    let mut involved = vec![false; nb];
    let link = |a: usize, b: usize, parity: bool, edges: &mut Vec<Vec<(usize, bool)>>| {
        edges[a].push((b, parity));
        edges[b].push((a, parity));
    };
    for s in stereo {
        let flip = |end: usize, bond: usize| mol.bonds()[bond].begin != end;
        let left: Vec<(usize, usize)> = single_neighbors(mol, s.left, s.bond).collect();
        let right: Vec<(usize, usize)> = single_neighbors(mol, s.right, s.bond).collect();
        let (Some(&(a0, ab0)), Some(&(b0, bb0))) = (left.first(), right.first()) else {
            continue;
        };
        for &(_, b) in left.iter().chain(right.iter()) {
            involved[b] = true;
        }
        // side(n) = m XOR flip(end, bond); neighbors on the same end sit on
        // opposite sides.
        for &(_, ab) in &left[1..] {
            let p = true ^ flip(s.left, ab) ^ flip(s.left, ab0);
            link(ab, ab0, p, &mut edges);
        }
        for &(_, bb) in &right[1..] {
            let p = true ^ flip(s.right, bb) ^ flip(s.right, bb0);
            link(bb, bb0, p, &mut edges);
        }
        let cross = s.trans
            ^ (a0 != s.left_ref)
            ^ (b0 != s.right_ref)
            ^ flip(s.left, ab0)
            ^ flip(s.right, bb0);
        link(ab0, bb0, cross, &mut edges);
    }

    let mut order: Vec<usize> = (0..nb).filter(|&b| involved[b]).collect();
    order.sort_by_key(|&b| emit_rank[b]);
    let mut value: Vec<Option<bool>> = vec![None; nb];
    for &root in &order {
        if value[root].is_some() {
            continue;
        }
        // `true` is Up in begin -> end; root reads `/` as written.
        value[root] = Some(written_from[root] == mol.bonds()[root].begin);
        let mut queue = VecDeque::from([root]);
        while let Some(b) = queue.pop_front() {
            let vb = value[b].unwrap_or(false);
            for &(c, parity) in &edges[b] {
                let want = vb ^ parity;
                match value[c] {
                    None => {
                        value[c] = Some(want);
                        queue.push_back(c);
                    }
                    Some(v) if v != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(
        value
            .into_iter()
            .map(|v| match v {
                Some(true) => BondDir::Up,
                Some(false) => BondDir::Down,
                None => BondDir::None,
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_parity() {
        assert!(!is_odd_permutation(&[0, 1, 2, 3], &[0, 1, 2, 3]));
        assert!(is_odd_permutation(&[1, 0, 2, 3], &[0, 1, 2, 3]));
        assert!(!is_odd_permutation(&[1, 2, 0, 3], &[0, 1, 2, 3]));
        assert!(is_odd_permutation(&[IMPLICIT_H, 2, 1], &[IMPLICIT_H, 1, 2]));
    }
}
