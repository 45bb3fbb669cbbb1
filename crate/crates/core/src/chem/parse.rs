//! SMILES to molecular graph.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use super::element;
use super::molecule::{Atom, Bond, BondDir, BondOrder, Chirality, Molecule};
use super::stereo::{self, IMPLICIT_H};
use super::token::{ring_label, tokenize_smiles, TokenKind, TokenizeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmilesError {
    Tokenize(TokenizeError),
    InvalidBracketAtom(usize),
    UnsupportedBond(usize),
    DanglingBond(usize),
    UnbalancedBranch(usize),
    UnmatchedRingClosure(usize),
    ValenceError { atom: usize },
}

impl fmt::Display for SmilesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmilesError::Tokenize(e) => write!(f, "{e}"),
            SmilesError::InvalidBracketAtom(p) => write!(f, "invalid bracket atom at position {p}"),
            SmilesError::UnsupportedBond(p) => write!(f, "unsupported bond symbol at position {p}"),
            SmilesError::DanglingBond(p) => write!(f, "bond without a following atom at position {p}"),
            SmilesError::UnbalancedBranch(p) => write!(f, "unbalanced branch at position {p}"),
            SmilesError::UnmatchedRingClosure(p) => write!(f, "unmatched ring closure at position {p}"),
            SmilesError::ValenceError { atom } => write!(f, "valence exceeded on atom {atom}"),
        }
    }
}

impl core::error::Error for SmilesError {}

impl From<TokenizeError> for SmilesError {
    fn from(e: TokenizeError) -> Self {
        SmilesError::Tokenize(e)
    }
}

/// Drop a trailing ChemAxon extension block (` |...|`).
pub fn strip_extensions(s: &str) -> &str {
    let s = s.trim();
    match s.find(|c: char| c.is_ascii_whitespace()) {
        Some(i) => &s[..i],
        None => s,
    }
}

#[derive(Clone, Copy)]
struct BondSpec {
    order: Option<BondOrder>,
    dir: BondDir,
    pos: usize,
}

struct RingOpen {
    atom: usize,
    bond: Option<BondSpec>,
    /// Index of the placeholder in the opener's written neighbor list.
    slot: usize,
}

struct Builder {
    atoms: Vec<Atom>,
    bracket: Vec<bool>,
    bonds: Vec<Bond>,
    /// Neighbors in written order, used to resolve `@`/`@@`.
    written: Vec<Vec<usize>>,
    /// `Some(true)` for `@@` as written.
    marks: Vec<Option<bool>>,
}

impl Builder {
    fn has_bond(&self, a: usize, b: usize) -> bool {
        self.bonds
            .iter()
            .any(|x| (x.begin == a && x.end == b) || (x.begin == b && x.end == a))
    }

    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }
}

/// Parse a SMILES string into its connected molecules.
pub fn parse_smiles(input: &str) -> Result<Vec<Molecule>, SmilesError> {
    let s = strip_extensions(input);
    let tokens = tokenize_smiles(s)?;
    let mut b = Builder {
        atoms: Vec::new(),
        bracket: Vec::new(),
        bonds: Vec::new(),
        written: Vec::new(),
        marks: Vec::new(),
    };
    let mut prev: Option<usize> = None;
    let mut pending: Option<BondSpec> = None;
    let mut branches: Vec<(Option<usize>, usize)> = Vec::new();
    let mut rings: BTreeMap<u32, RingOpen> = BTreeMap::new();

    for tok in &tokens {
        match tok.kind {
            TokenKind::Atom => {
                let (atom, bracket, mark) = if tok.text.starts_with('[') {
                    parse_bracket(tok.text).ok_or(SmilesError::InvalidBracketAtom(tok.start))?
                } else {
                    (organic_atom(tok.text), false, None)
                };
                let idx = b.atoms.len();
                let explicit_h = atom.hydrogens;
                b.atoms.push(atom);
                b.bracket.push(bracket);
                b.marks.push(mark);
                b.written.push(Vec::new());
                if let Some(p) = prev {
                    let spec = pending.take();
                    let order = match spec.and_then(|s| s.order) {
                        Some(o) => o,
                        None => b.default_order(p, idx),
                    };
                    let dir = spec.map_or(BondDir::None, |s| s.dir);
                    b.bonds.push(Bond { begin: p, end: idx, order, dir });
                    b.written[idx].push(p);
                    b.written[p].push(idx);
                } else if let Some(spec) = pending {
                    return Err(SmilesError::DanglingBond(spec.pos));
                }
                if explicit_h == 1 {
                    b.written[idx].push(IMPLICIT_H);
                }
                prev = Some(idx);
            }
            TokenKind::Bond => {
                if pending.is_some() || prev.is_none() {
                    return Err(SmilesError::DanglingBond(tok.start));
                }
                pending = Some(bond_spec(tok.text, tok.start)?);
            }
            TokenKind::BranchOpen => {
                if prev.is_none() || pending.is_some() {
                    return Err(SmilesError::UnbalancedBranch(tok.start));
                }
                branches.push((prev, tok.start));
            }
            TokenKind::BranchClose => {
                if pending.is_some() {
                    return Err(SmilesError::DanglingBond(tok.start));
                }
                prev = branches.pop().ok_or(SmilesError::UnbalancedBranch(tok.start))?.0;
            }
            TokenKind::Dot => {
                if let Some(spec) = pending {
                    return Err(SmilesError::DanglingBond(spec.pos));
                }
                if !branches.is_empty() {
                    return Err(SmilesError::UnbalancedBranch(tok.start));
                }
                prev = None;
            }
            TokenKind::RingClosure => {
                let current = prev.ok_or(SmilesError::UnmatchedRingClosure(tok.start))?;
                let label = ring_label(tok.text).ok_or(SmilesError::UnmatchedRingClosure(tok.start))?;
                let spec = pending.take();
                match rings.remove(&label) {
                    None => {
                        let slot = b.written[current].len();
                        b.written[current].push(IMPLICIT_H - 1);
                        rings.insert(label, RingOpen { atom: current, bond: spec, slot });
                    }
                    Some(open) => {
                        if open.atom == current || b.has_bond(open.atom, current) {
                            return Err(SmilesError::UnmatchedRingClosure(tok.start));
                        }
                        let order = match (open.bond.and_then(|s| s.order), spec.and_then(|s| s.order)) {
                            (Some(o), _) | (None, Some(o)) => o,
                            (None, None) => b.default_order(open.atom, current),
                        };
                        let dir = match (open.bond.map(|s| s.dir), spec.map(|s| s.dir)) {
                            (Some(d), _) if d != BondDir::None => d,
                            (_, Some(d)) => d.flipped(),
                            _ => BondDir::None,
                        };
                        b.bonds.push(Bond { begin: open.atom, end: current, order, dir });
                        b.written[open.atom][open.slot] = current;
                        b.written[current].push(open.atom);
                    }
                }
            }
        }
    }
    if let Some(spec) = pending {
        return Err(SmilesError::DanglingBond(spec.pos));
    }
    if let Some(&(_, pos)) = branches.last() {
        return Err(SmilesError::UnbalancedBranch(pos));
    }
    if rings.values().next().is_some() {
        let pos = tokens
            .iter()
            .rev()
            .find(|t| t.kind == TokenKind::RingClosure)
            .map_or(0, |t| t.start);
        return Err(SmilesError::UnmatchedRingClosure(pos));
    }
    finish(b)
}

fn finish(b: Builder) -> Result<Vec<Molecule>, SmilesError> {
    let Builder { atoms, bracket, bonds, written, marks } = b;
    let mut mol = Molecule::from_parts(atoms, bonds);
    for i in 0..mol.atom_count() {
        let atom = &mol.atoms()[i];
        let Some(valences) = element::default_valences(atom.atomic_number) else {
            continue;
        };
        let max = *valences.last().unwrap_or(&0);
        if atom.charge == 0 && mol.bond_valence(i) + atom.hydrogens > max {
            return Err(SmilesError::ValenceError { atom: i });
        }
        if !bracket[i] {
            let h = mol.implied_hydrogens(i).unwrap_or(0);
            mol.atoms_mut()[i].hydrogens = h;
        }
    }
    for (i, mark) in marks.iter().enumerate() {
        let Some(clockwise) = *mark else { continue };
        if !stereo::can_be_tetrahedral(&mol, i) || written[i].len() != mol.neighbors(i).len() + mol.atoms()[i].hydrogens as usize {
            log::warn!("dropping tetrahedral mark on atom {i}: needs 3 or 4 neighbors");
            continue;
        }
        let written_chirality = if clockwise { Chirality::Clockwise } else { Chirality::CounterClockwise };
        let reference = stereo::reference_order(&mol, i);
        let odd = stereo::is_odd_permutation(&written[i], &reference);
        mol.atoms_mut()[i].chirality = Some(written_chirality.permuted(odd));
    }
    stereo::prune_orphan_marks(&mut mol);
    Ok(mol.into_components())
}

fn organic_atom(text: &str) -> Atom {
    let aromatic = text.chars().next().is_some_and(|c| c.is_ascii_lowercase());
    let z = if aromatic {
        element::aromatic_bracket_symbol(text).unwrap_or(0)
    } else {
        element::atomic_number(text).unwrap_or(0)
    };
    let mut atom = Atom::new(z);
    atom.aromatic = aromatic;
    atom
}

fn bond_spec(text: &str, pos: usize) -> Result<BondSpec, SmilesError> {
    let (order, dir) = match text {
        "-" => (Some(BondOrder::Single), BondDir::None),
        "=" => (Some(BondOrder::Double), BondDir::None),
        "#" => (Some(BondOrder::Triple), BondDir::None),
        ":" => (Some(BondOrder::Aromatic), BondDir::None),
        "/" => (Some(BondOrder::Single), BondDir::Up),
        "\\" => (Some(BondOrder::Single), BondDir::Down),
        _ => return Err(SmilesError::UnsupportedBond(pos)),
    };
    Ok(BondSpec { order, dir, pos })
}

/// Parse `[...]`; returns the atom, a bracket flag and the written
/// tetrahedral mark (`Some(true)` for `@@`).
fn parse_bracket(text: &str) -> Option<(Atom, bool, Option<bool>)> {
    let inner = text.strip_prefix('[')?.strip_suffix(']')?;
    let bytes = inner.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        (*i > start).then(|| inner[start..*i].parse::<u32>().ok()).flatten()
    };

    let isotope = digits(&mut i).unwrap_or(0);
    let (z, aromatic) = bracket_symbol(inner, &mut i)?;
    let mut atom = Atom::new(z);
    atom.aromatic = aromatic;
    atom.isotope = u16::try_from(isotope).ok()?;

    let mut mark = None;
    if bytes.get(i) == Some(&b'@') {
        i += 1;
        if bytes.get(i) == Some(&b'@') {
            i += 1;
            mark = Some(true);
        } else if inner[i..].starts_with("TH1") {
            i += 3;
            mark = Some(false);
        } else if inner[i..].starts_with("TH2") {
            i += 3;
            mark = Some(true);
        } else if ["SP", "TB", "OH"].iter().any(|c| inner[i..].starts_with(c)) {
            // @SP, @TB, @OH: not representable, dropped.
            i += 2;
            digits(&mut i);
            log::warn!("dropping non-tetrahedral chirality class in {text}");
        } else {
            mark = Some(false);
        }
    }
    if bytes.get(i) == Some(&b'H') {
        i += 1;
        atom.hydrogens = u8::try_from(digits(&mut i).unwrap_or(1)).ok()?;
    }
    if let Some(&sign) = bytes.get(i).filter(|b| **b == b'+' || **b == b'-') {
        let unit: i32 = if sign == b'+' { 1 } else { -1 };
        i += 1;
        let mut magnitude = 1;
        if let Some(n) = digits(&mut i) {
            magnitude = n as i32;
        } else {
            while bytes.get(i) == Some(&sign) {
                magnitude += 1;
                i += 1;
            }
        }
        atom.charge = i8::try_from(unit * magnitude).ok()?;
    }
    if bytes.get(i) == Some(&b':') {
        i += 1;
        atom.map = digits(&mut i)?;
    }
    (i == bytes.len()).then_some((atom, true, mark))
}

fn bracket_symbol(inner: &str, i: &mut usize) -> Option<(u8, bool)> {
    let rest = &inner[*i..];
    if rest.starts_with('*') {
        *i += 1;
        return Some((0, false));
    }
    for len in [2, 1] {
        if let Some(sym) = rest.get(..len) {
            if let Some(z) = element::aromatic_bracket_symbol(sym) {
                *i += len;
                return Some((z, true));
            }
        }
    }
    let first = rest.chars().next().filter(char::is_ascii_uppercase)?;
    if let Some(two) = rest.get(..2) {
        if two.as_bytes()[1].is_ascii_lowercase() {
            if let Some(z) = element::atomic_number(two) {
                *i += 2;
                return Some((z, false));
            }
        }
    }
    let z = element::atomic_number(first.encode_utf8(&mut [0; 4]))?;
    *i += 1;
    Some((z, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(s: &str) -> Molecule {
        let mut v = parse_smiles(s).unwrap();
        assert_eq!(v.len(), 1, "{s}");
        v.pop().unwrap()
    }

    #[test]
    fn ethanol() {
        let m = one("CCO");
        assert_eq!(m.atom_count(), 3);
        assert_eq!(m.bond_count(), 2);
        let h: Vec<u8> = m.atoms().iter().map(|a| a.hydrogens).collect();
        assert_eq!(h, [3, 2, 1]);
    }

    #[test]
    fn ammonium() {
        let m = one("[NH4+]");
        assert_eq!(m.atom_count(), 1);
        assert_eq!(m.atoms()[0].charge, 1);
        assert_eq!(m.atoms()[0].hydrogens, 4);
    }

    #[test]
    fn dot_components() {
        let v = parse_smiles("C1CC1.O").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!((v[0].atom_count(), v[0].bond_count()), (3, 3));
        assert_eq!((v[1].atom_count(), v[1].atoms()[0].hydrogens), (1, 2));
    }

    #[test]
    fn aromatic_hydrogens() {
        let benzene = one("c1ccccc1");
        assert!(benzene.atoms().iter().all(|a| a.hydrogens == 1 && a.aromatic));
        assert!(benzene.bonds().iter().all(|b| b.order == BondOrder::Aromatic));
        let pyridine = one("c1ccncc1");
        assert_eq!(pyridine.atoms()[3].hydrogens, 0);
        let toluene = one("Cc1ccccc1");
        assert_eq!(toluene.atoms()[1].hydrogens, 0);
        let biphenyl = one("c1ccccc1-c1ccccc1");
        assert_eq!(biphenyl.bonds()[6].order, BondOrder::Single);
    }

    #[test]
    fn hypervalent_defaults() {
        let nitro = one("CN(=O)=O");
        assert_eq!(nitro.atoms()[1].hydrogens, 0);
        let sulfone = one("CS(=O)(=O)C");
        assert_eq!(sulfone.atoms()[1].hydrogens, 0);
    }

    #[test]
    fn bracket_fields() {
        let m = one("[13CH3:7]O");
        let a = &m.atoms()[0];
        assert_eq!((a.isotope, a.hydrogens, a.map), (13, 3, 7));
        assert_eq!(one("[Fe+3]").atoms()[0].charge, 3);
        assert_eq!(one("[O--]").atoms()[0].charge, -2);
        assert_eq!(one("[nH]1cccc1").atoms()[0].hydrogens, 1);
        assert_eq!(one("[Cl-]").atoms()[0].atomic_number, 17);
        assert_eq!(one("[Sc]").atoms()[0].atomic_number, 21);
        assert_eq!(one("[se]1cccc1").atoms()[0].atomic_number, 34);
    }

    #[test]
    fn chemaxon_extension_removed() {
        let v = parse_smiles("CC(=O)O |f:0.1|").unwrap();
        assert_eq!(v[0].atom_count(), 4);
    }

    #[test]
    fn ring_closures() {
        let m = one("C%10CC%10");
        assert_eq!(m.bond_count(), 3);
        let m = one("C=1CC1");
        assert_eq!(m.bonds()[2].order, BondOrder::Double);
        assert!(parse_smiles("C12CC12").is_err());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_smiles("C1CC"), Err(SmilesError::UnmatchedRingClosure(_))));
        assert!(matches!(parse_smiles("CC(C"), Err(SmilesError::UnbalancedBranch(_))));
        assert!(matches!(parse_smiles("CC)C"), Err(SmilesError::UnbalancedBranch(_))));
        assert!(matches!(parse_smiles("C(C)(C)(C)(C)C"), Err(SmilesError::ValenceError { .. })));
        assert!(matches!(parse_smiles("CC="), Err(SmilesError::DanglingBond(_))));
        assert!(matches!(parse_smiles("C[Xx]"), Err(SmilesError::InvalidBracketAtom(1))));
        assert!(matches!(parse_smiles("C$C"), Err(SmilesError::UnsupportedBond(1))));
        assert!(matches!(parse_smiles("C?"), Err(SmilesError::Tokenize(_))));
    }

    #[test]
    fn tetrahedral_normalized() {
        // Reference order for atom 1 is [H, 0, 2, 3]; written is [0, H, 2, 3].
        let m = one("C[C@H](O)CC");
        assert_eq!(m.atoms()[1].chirality, Some(Chirality::Clockwise));
        let m = one("[C@@H](C)(O)CC");
        assert_eq!(m.atoms()[0].chirality, Some(Chirality::Clockwise));
        let m = one("N[C@@H](C)C(=O)O");
        assert_eq!(m.atoms()[1].chirality, Some(Chirality::CounterClockwise));
        // Two neighbors only: dropped.
        let m = one("[C@H2]CO");
        assert_eq!(m.atoms()[0].chirality, None);
    }

    #[test]
    fn orphan_marks_pruned() {
        let m = one("C/C=C/C");
        assert_eq!(stereo::double_bond_stereo(&m).len(), 1);
        assert!(m.bonds().iter().filter(|b| b.dir != BondDir::None).count() == 2);
        let m = one("C/CC");
        assert!(m.bonds().iter().all(|b| b.dir == BondDir::None));
        let m = one("C/C=C");
        assert!(m.bonds().iter().all(|b| b.dir == BondDir::None));
    }
}
