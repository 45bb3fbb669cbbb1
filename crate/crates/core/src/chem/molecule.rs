use alloc::vec;
use alloc::vec::Vec;

use super::element;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Small integer code used in invariants and hashes.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

/// Directional mark of a single bond, read in the bond's `begin -> end`
/// orientation (`Up` is `/`, `Down` is `\`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BondDir {
    #[default]
    None,
    Up,
    Down,
}

impl BondDir {
    pub fn flipped(self) -> BondDir {
        match self {
            BondDir::Up => BondDir::Down,
            BondDir::Down => BondDir::Up,
            BondDir::None => BondDir::None,
        }
    }
}

/// Tetrahedral parity relative to the atom's reference neighbor order:
/// an implicit hydrogen first (if any), then neighbor atoms by ascending
/// index. `CounterClockwise` corresponds to `@` written in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chirality {
    CounterClockwise,
    Clockwise,
}

impl Chirality {
    pub fn inverted(self) -> Chirality {
        match self {
            Chirality::CounterClockwise => Chirality::Clockwise,
            Chirality::Clockwise => Chirality::CounterClockwise,
        }
    }

    /// Apply a permutation parity: odd permutations invert.
    pub fn permuted(self, odd: bool) -> Chirality {
        if odd {
            self.inverted()
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub atomic_number: u8,
    pub aromatic: bool,
    pub charge: i8,
    /// Attached hydrogens not present as atoms (implicit or bracket `H<n>`).
    pub hydrogens: u8,
    pub isotope: u16,
    pub chirality: Option<Chirality>,
    /// Reaction atom-map number, 0 when absent. Never written out.
    pub map: u32,
}

impl Atom {
    pub fn new(atomic_number: u8) -> Atom {
        Atom {
            atomic_number,
            aromatic: false,
            charge: 0,
            hydrogens: 0,
            isotope: 0,
            chirality: None,
            map: 0,
        }
    }

    pub fn is_heavy(&self) -> bool {
        self.atomic_number != element::HYDROGEN
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
    pub dir: BondDir,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if atom == self.begin {
            self.end
        } else {
            self.begin
        }
    }

    /// Mark as read walking from `from` to the other atom.
    pub fn dir_from(&self, from: usize) -> BondDir {
        if from == self.begin {
            self.dir
        } else {
            self.dir.flipped()
        }
    }
}

/// A connected molecular graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: `(neighbor, bond index)` sorted by neighbor.
    adjacency: Vec<Vec<(usize, usize)>>,
    ring_bond: Vec<bool>,
}

impl Molecule {
    /// Build from parts. Callers guarantee bond endpoints are in range and
    /// that no two bonds join the same pair.
    pub fn from_parts(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Molecule {
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, b) in bonds.iter().enumerate() {
            adjacency[b.begin].push((b.end, i));
            adjacency[b.end].push((b.begin, i));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let ring_bond = ring_bonds(atoms.len(), &bonds, &adjacency);
        Molecule { atoms, bonds, adjacency, ring_bond }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|(n, _)| *n == b).map(|&(_, bond)| bond)
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_heavy()).count()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn heavy_degree(&self, atom: usize) -> usize {
        self.adjacency[atom].iter().filter(|(n, _)| self.atoms[*n].is_heavy()).count()
    }

    /// Hydrogens attached to `atom`, counting both hydrogen atoms in the
    /// graph and the `hydrogens` field.
    pub fn total_hydrogens(&self, atom: usize) -> usize {
        let explicit = self.adjacency[atom]
            .iter()
            .filter(|(n, _)| !self.atoms[*n].is_heavy())
            .count();
        explicit + self.atoms[atom].hydrogens as usize
    }

    pub fn is_ring_bond(&self, bond: usize) -> bool {
        self.ring_bond[bond]
    }

    pub fn in_ring(&self, atom: usize) -> bool {
        self.adjacency[atom].iter().any(|&(_, b)| self.ring_bond[b])
    }

    pub fn has_stereo(&self) -> bool {
        self.atoms.iter().any(|a| a.chirality.is_some())
            || self.bonds.iter().any(|b| b.dir != BondDir::None)
    }

    /// Sum of bond valences, aromatic bonds counting one each.
    pub fn bond_valence(&self, atom: usize) -> u8 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.valence())
            .sum()
    }

    /// Hydrogen count implied by the organic-subset valence rules, or
    /// `None` when the element has no default valence. Aromatic atoms
    /// with aromatic bonds add one shared increment.
    pub fn implied_hydrogens(&self, atom: usize) -> Option<u8> {
        let a = &self.atoms[atom];
        let valences = element::default_valences(a.atomic_number)?;
        let mut used = self.bond_valence(atom);
        if a.aromatic
            && self.adjacency[atom]
                .iter()
                .any(|&(_, b)| self.bonds[b].order == BondOrder::Aromatic)
        {
            used += 1;
        }
        Some(valences.iter().find(|&&v| v >= used).map_or(0, |&v| v - used))
    }

    pub(crate) fn atoms_mut(&mut self) -> &mut [Atom] {
        &mut self.atoms
    }

    pub(crate) fn bonds_mut(&mut self) -> &mut [Bond] {
        &mut self.bonds
    }

    /// Drop every chirality and directional mark.
    pub fn strip_stereo(&self) -> Molecule {
        let mut m = self.clone();
        for a in &mut m.atoms {
            a.chirality = None;
        }
        for b in &mut m.bonds {
            b.dir = BondDir::None;
        }
        m
    }

    pub fn clear_atom_maps(&mut self) {
        for a in &mut self.atoms {
            a.map = 0;
        }
    }

    /// Split a possibly disconnected graph into connected molecules,
    /// preserving relative atom order inside each component.
    pub fn into_components(self) -> Vec<Molecule> {
        let n = self.atoms.len();
        let mut component = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            component[start] = count;
            while let Some(a) = stack.pop() {
                for &(nb, _) in &self.adjacency[a] {
                    if component[nb] == usize::MAX {
                        component[nb] = count;
                        stack.push(nb);
                    }
                }
            }
            count += 1;
        }
        if count <= 1 {
            return vec![self];
        }
        let mut new_index = vec![0; n];
        let mut atoms: Vec<Vec<Atom>> = vec![Vec::new(); count];
        for (i, atom) in self.atoms.into_iter().enumerate() {
            new_index[i] = atoms[component[i]].len();
            atoms[component[i]].push(atom);
        }
        let mut bonds: Vec<Vec<Bond>> = vec![Vec::new(); count];
        for b in self.bonds {
            let c = component[b.begin];
            bonds[c].push(Bond { begin: new_index[b.begin], end: new_index[b.end], ..b });
        }
        atoms
            .into_iter()
            .zip(bonds)
            .map(|(a, b)| Molecule::from_parts(a, b))
            .collect()
    }
}

/// A bond is a ring bond iff it is not a bridge.
fn ring_bonds(n: usize, bonds: &[Bond], adjacency: &[Vec<(usize, usize)>]) -> Vec<bool> {
    let mut ring = vec![true; bonds.len()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (atom, bond used to reach it, next adjacency position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(top) = stack.last_mut() {
            let (u, via, pos) = *top;
            if pos < adjacency[u].len() {
                top.2 += 1;
                let (w, b) = adjacency[u][pos];
                if b == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, b, 0));
                } else {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        ring[via] = false;
                    }
                }
            }
        }
    }
    ring
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize, closed: bool) -> Molecule {
        let atoms = (0..n).map(|_| Atom::new(6)).collect();
        let mut bonds: Vec<Bond> = (1..n)
            .map(|i| Bond { begin: i - 1, end: i, order: BondOrder::Single, dir: BondDir::None })
            .collect();
        if closed {
            bonds.push(Bond { begin: n - 1, end: 0, order: BondOrder::Single, dir: BondDir::None });
        }
        Molecule::from_parts(atoms, bonds)
    }

    #[test]
    fn ring_detection() {
        let ring = chain(6, true);
        assert!((0..6).all(|b| ring.is_ring_bond(b)));
        let open = chain(6, false);
        assert!((0..5).all(|b| !open.is_ring_bond(b)));
    }

    #[test]
    fn components_keep_order() {
        let mut atoms: Vec<Atom> = (0..4).map(|_| Atom::new(6)).collect();
        atoms[2].atomic_number = 8;
        let bonds = alloc::vec![
            Bond { begin: 0, end: 3, order: BondOrder::Single, dir: BondDir::None },
        ];
        let parts = Molecule::from_parts(atoms, bonds).into_components();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0].atom_count(), 2);
        assert_eq!(parts[1].atoms()[0].atomic_number, 6);
        assert_eq!(parts[2].atoms()[0].atomic_number, 8);
    }
}
