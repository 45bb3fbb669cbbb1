//! SMILES serialization for a given total atom order.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use super::element;
use super::molecule::{BondDir, BondOrder, Chirality, Molecule};
use super::stereo::{self, IMPLICIT_H};

struct Traversal {
    pos: Vec<usize>,
    /// Child atoms of each atom in visit order.
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    /// Ring bonds per atom as `(partner, bond)`, both ends listed.
    ring_events: Vec<Vec<(usize, usize)>>,
    root: usize,
}

/// DFS frame: atom, its neighbors sorted by rank, next neighbor to try.
type Frame = (usize, Vec<(usize, usize)>, usize);

fn traverse(mol: &Molecule, rank: &[u32]) -> Traversal {
    let n = mol.atom_count();
    let root = (0..n).min_by_key(|&i| rank[i]).unwrap_or(0);
    let mut t = Traversal {
        pos: vec![usize::MAX; n],
        children: vec![Vec::new(); n],
        parent: vec![None; n],
        ring_events: vec![Vec::new(); n],
        root,
    };
    let sorted_neighbors = |u: usize| {
        let mut v: Vec<(usize, usize)> = mol.neighbors(u).to_vec();
        v.sort_by_key(|&(w, _)| rank[w]);
        v
    };
    let mut seen_bond = vec![false; mol.bond_count()];
    let mut counter = 0;
    t.pos[root] = counter;
    counter += 1;
    let mut stack: Vec<Frame> = vec![(root, sorted_neighbors(root), 0)];
    while let Some(top) = stack.last_mut() {
        let (u, ref nbrs, k) = *top;
        if k == nbrs.len() {
            stack.pop();
            continue;
        }
        let (w, b) = nbrs[k];
        top.2 += 1;
        if seen_bond[b] {
            continue;
        }
        seen_bond[b] = true;
        if t.pos[w] == usize::MAX {
            t.pos[w] = counter;
            counter += 1;
            t.parent[w] = Some(u);
            t.children[u].push(w);
            stack.push((w, sorted_neighbors(w), 0));
        } else {
            t.ring_events[u].push((w, b));
            t.ring_events[w].push((u, b));
        }
    }
    for events in t.ring_events.iter_mut() {
        events.sort_by_key(|&(w, _)| t.pos[w]);
    }
    t
}

/// Write SMILES visiting atoms by ascending `rank` (a permutation of
/// `0..n`): DFS from the lowest rank, neighbors in rank order, ring digits
/// allocated lowest-free at the opening atom. Tetrahedral marks and bond
/// directions are re-derived for this traversal.
pub fn write_smiles(mol: &Molecule, rank: &[u32]) -> String {
    if mol.atom_count() == 0 {
        return String::new();
    }
    let t = traverse(mol, rank);

    // Emission orientation and position of every bond.
    let nb = mol.bond_count();
    let mut written_from = vec![0usize; nb];
    let mut emit_rank = vec![0usize; nb];
    for (b, bond) in mol.bonds().iter().enumerate() {
        let (a, c) = (bond.begin, bond.end);
        let from = if t.pos[a] < t.pos[c] { a } else { c };
        written_from[b] = from;
        emit_rank[b] = t.pos[bond.other(from)];
    }
    let db_stereo = stereo::double_bond_stereo(mol);
    let marks = match stereo::assign_marks(mol, &db_stereo, &written_from, &emit_rank) {
        Some(m) => m,
        None => {
            log::warn!("conflicting double-bond marks, writing without cis/trans");
            vec![BondDir::None; nb]
        }
    };

    let mut w = Writer { mol, t: &t, marks, out: String::new(), digits: Vec::new(), open: vec![None; nb] };
    w.emit_from(t.root);
    w.out
}

struct Writer<'a> {
    mol: &'a Molecule,
    t: &'a Traversal,
    marks: Vec<BondDir>,
    out: String,
    /// Ring digits currently in use.
    digits: Vec<bool>,
    /// Digit assigned to each open ring bond.
    open: Vec<Option<usize>>,
}

enum Step {
    Atom(usize),
    Open,
    Close,
}

impl Writer<'_> {
    fn emit_from(&mut self, root: usize) {
        let mut stack = vec![Step::Atom(root)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Open => self.out.push('('),
                Step::Close => self.out.push(')'),
                Step::Atom(u) => {
                    if let Some(p) = self.t.parent[u] {
                        let b = self.mol.bond_between(p, u).unwrap_or(0);
                        self.bond_symbol(b, p);
                    }
                    self.atom(u);
                    // All but the last child are written as branches.
                    let children = &self.t.children[u];
                    for (k, &c) in children.iter().enumerate().rev() {
                        if k + 1 == children.len() {
                            stack.push(Step::Atom(c));
                        } else {
                            stack.push(Step::Close);
                            stack.push(Step::Atom(c));
                            stack.push(Step::Open);
                        }
                    }
                }
            }
        }
    }

    fn bond_symbol(&mut self, b: usize, from: usize) {
        let bond = &self.mol.bonds()[b];
        let to = bond.other(from);
        let mark = if self.marks[b] == BondDir::None {
            BondDir::None
        } else if from == bond.begin {
            self.marks[b]
        } else {
            self.marks[b].flipped()
        };
        let both_aromatic = self.mol.atoms()[from].aromatic && self.mol.atoms()[to].aromatic;
        let s = match (mark, bond.order) {
            (BondDir::Up, _) => "/",
            (BondDir::Down, _) => "\\",
            (_, BondOrder::Single) if both_aromatic => "-",
            (_, BondOrder::Single) => "",
            (_, BondOrder::Double) => "=",
            (_, BondOrder::Triple) => "#",
            (_, BondOrder::Aromatic) if both_aromatic => "",
            (_, BondOrder::Aromatic) => ":",
        };
        self.out.push_str(s);
    }

    fn atom(&mut self, u: usize) {
        let mol = self.mol;
        let t = self.t;

        // Written neighbor order for parity: parent, H, ring events, children.
        let mut order: Vec<usize> = Vec::with_capacity(4);
        if let Some(p) = t.parent[u] {
            order.push(p);
        }
        if mol.atoms()[u].hydrogens == 1 {
            order.push(IMPLICIT_H);
        }
        order.extend(t.ring_events[u].iter().map(|&(w, _)| w));
        order.extend(t.children[u].iter().copied());

        self.atom_text(u, &order);

        let mut to_free = Vec::new();
        for &(w, b) in &t.ring_events[u] {
            if t.pos[w] < t.pos[u] {
                let d = self.open[b].take().unwrap_or(0);
                push_ring_digit(&mut self.out, d);
                to_free.push(d);
            } else {
                let d = match self.digits.iter().position(|used| !used) {
                    Some(d) => d,
                    None => {
                        self.digits.push(false);
                        self.digits.len() - 1
                    }
                };
                self.digits[d] = true;
                self.open[b] = Some(d);
                self.bond_symbol(b, u);
                push_ring_digit(&mut self.out, d);
            }
        }
        for d in to_free {
            self.digits[d] = false;
        }
    }

    fn atom_text(&mut self, u: usize, order: &[usize]) {
        let mol = self.mol;
        let a = &mol.atoms()[u];
        let chirality = a.chirality.map(|c| {
            let reference = stereo::reference_order(mol, u);
            c.permuted(stereo::is_odd_permutation(order, &reference))
        });
        let sym = element::symbol(a.atomic_number);
        let bare = chirality.is_none()
            && a.charge == 0
            && a.isotope == 0
            && (element::in_organic_subset(a.atomic_number, a.aromatic) || (a.atomic_number == 0 && a.hydrogens == 0))
            && (a.atomic_number == 0 || mol.implied_hydrogens(u) == Some(a.hydrogens));
        let out = &mut self.out;
        if bare {
            push_symbol(out, sym, a.aromatic);
            return;
        }
        out.push('[');
        if a.isotope > 0 {
            let _ = write!(out, "{}", a.isotope);
        }
        push_symbol(out, sym, a.aromatic);
        match chirality {
            Some(Chirality::CounterClockwise) => out.push('@'),
            Some(Chirality::Clockwise) => out.push_str("@@"),
            None => {}
        }
        match a.hydrogens {
            0 => {}
            1 => out.push('H'),
            h => {
                let _ = write!(out, "H{h}");
            }
        }
        match a.charge {
            0 => {}
            1 => out.push('+'),
            -1 => out.push('-'),
            c if c > 0 => {
                let _ = write!(out, "+{c}");
            }
            c => {
                let _ = write!(out, "-{}", -(c as i32));
            }
        }
        out.push(']');
    }
}

fn push_symbol(out: &mut String, sym: &str, aromatic: bool) {
    if aromatic {
        out.extend(sym.chars().map(|c| c.to_ascii_lowercase()));
    } else {
        out.push_str(sym);
    }
}

fn push_ring_digit(out: &mut String, d: usize) {
    let label = d + 1;
    if label < 10 {
        let _ = write!(out, "{label}");
    } else if label < 100 {
        let _ = write!(out, "%{label}");
    } else {
        let _ = write!(out, "%({label})");
    }
}
