//! Folded count Morgan (ECFP-style) fingerprints as sparse signed vectors.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::molecule::Molecule;

pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_WIDTH: u32 = 2048;

const MIX_SEED: u64 = 0x5851_f42d_4c95_7f2d;

/// SplitMix64 finalizer.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a word sequence: `h <- splitmix(h ^ w)` from a
/// fixed seed, then mixed with the length.
pub fn hash_words(words: &[u64]) -> u64 {
    let h = words.iter().fold(MIX_SEED, |h, &w| splitmix(h ^ w));
    splitmix(h ^ words.len() as u64)
}

/// Fixed-width vector of signed counts, stored sparsely (sorted buckets,
/// zero counts omitted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintVector {
    width: u32,
    entries: Vec<(u32, i64)>,
}

impl FingerprintVector {
    pub fn zeros(width: u32) -> Self {
        FingerprintVector { width, entries: Vec::new() }
    }

    /// Build from unsorted `(bucket, count)` pairs; duplicates are summed.
    pub fn from_counts(width: u32, mut pairs: Vec<(u32, i64)>) -> Self {
        pairs.sort_unstable_by_key(|p| p.0);
        let mut entries: Vec<(u32, i64)> = Vec::with_capacity(pairs.len());
        for (b, c) in pairs {
            assert!(b < width, "bucket {b} out of range for width {width}");
            match entries.last_mut() {
                Some(last) if last.0 == b => last.1 += c,
                _ => entries.push((b, c)),
            }
        }
        entries.retain(|e| e.1 != 0);
        FingerprintVector { width, entries }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn entries(&self) -> &[(u32, i64)] {
        &self.entries
    }

    pub fn get(&self, bucket: u32) -> i64 {
        self.entries
            .binary_search_by_key(&bucket, |e| e.0)
            .map_or(0, |i| self.entries[i].1)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<i64> {
        let mut v = alloc::vec![0; self.width as usize];
        for &(b, c) in &self.entries {
            v[b as usize] = c;
        }
        v
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!(self.width, other.width, "fingerprint widths differ");
        let mut pairs = self.entries.clone();
        pairs.extend(other.entries.iter().map(|&(b, c)| (b, sign * c)));
        FingerprintVector::from_counts(self.width, pairs)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    pub fn scale(&self, k: i64) -> Self {
        let pairs = self.entries.iter().map(|&(b, c)| (b, c * k)).collect();
        FingerprintVector::from_counts(self.width, pairs)
    }

    pub fn dot(&self, other: &Self) -> i128 {
        let (mut i, mut j, mut acc) = (0, 0, 0i128);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    acc += a[i].1 as i128 * b[j].1 as i128;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> i128 {
        self.entries.iter().map(|&(_, c)| c as i128 * c as i128).sum()
    }

    pub fn nonzero_buckets(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.iter().map(|e| e.0)
    }
}

/// `1 - u.v / (|u||v|)`, defined as 1 when either vector is zero. Lies in
/// `[0, 1]` for non-negative vectors and `[0, 2]` in general.
pub fn cosine_distance(u: &FingerprintVector, v: &FingerprintVector) -> f64 {
    cosine_distance_with_norms(u, u.norm_squared(), v, v.norm_squared())
}

pub(crate) fn cosine_distance_with_norms(u: &FingerprintVector, nu: i128, v: &FingerprintVector, nv: i128) -> f64 {
    if nu == 0 || nv == 0 {
        return 1.0;
    }
    let denom = libm::sqrt(nu as f64 * nv as f64);
    let d = 1.0 - u.dot(v) as f64 / denom;
    d.clamp(0.0, 2.0)
}

type AtomInvariant = [u64; 7];

fn atom_invariant(mol: &Molecule, i: usize) -> AtomInvariant {
    let a = &mol.atoms()[i];
    [
        a.atomic_number as u64,
        mol.heavy_degree(i) as u64,
        mol.total_hydrogens(i) as u64,
        a.charge as i64 as u64,
        a.isotope as u64,
        mol.in_ring(i) as u64,
        a.aromatic as u64,
    ]
}

/// Environment identifiers per atom for radii `0..=radius`; entry
/// `[r][atom]` is the identifier of the radius-`r` environment.
pub fn environment_ids(mol: &Molecule, radius: u32) -> Vec<Vec<u64>> {
    let n = mol.atom_count();
    let mut layers: Vec<Vec<u64>> = Vec::with_capacity(radius as usize + 1);
    layers.push((0..n).map(|i| hash_words(&atom_invariant(mol, i))).collect());
    for r in 1..=radius {
        let prev = &layers[r as usize - 1];
        let next = (0..n)
            .map(|i| {
                let mut nb: Vec<(u64, u64)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(j, b)| (mol.bonds()[b].order.code() as u64, prev[j]))
                    .collect();
                nb.sort_unstable();
                let mut words = Vec::with_capacity(2 + 2 * nb.len());
                words.push(r as u64);
                words.push(prev[i]);
                for (o, id) in nb {
                    words.push(o);
                    words.push(id);
                }
                hash_words(&words)
            })
            .collect();
        layers.push(next);
    }
    layers
}

/// Count fingerprint of one molecule: every atom contributes one count per
/// radius, in bucket `id mod width`.
pub fn molecule_fingerprint(mol: &Molecule, radius: u32, width: u32) -> FingerprintVector {
    let pairs = environment_ids(mol, radius)
        .into_iter()
        .flatten()
        .map(|id| ((id % width as u64) as u32, 1))
        .collect();
    FingerprintVector::from_counts(width, pairs)
}

pub fn morgan_fingerprint<'a, I>(mols: I, radius: u32, width: u32) -> FingerprintVector
where
    I: IntoIterator<Item = &'a Molecule>,
{
    let mut pairs = Vec::new();
    for m in mols {
        pairs.extend(molecule_fingerprint(m, radius, width).entries);
    }
    FingerprintVector::from_counts(width, pairs)
}
