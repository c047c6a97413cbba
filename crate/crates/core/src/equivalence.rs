//! Affine classification of digit sets.
//!
//! The plain gap multiset is only invariant under translations: scaling by
//! `a` changes the gaps (modulo 5, `{0,1,2}` has gaps `{1,1,3}` while its
//! image `{0,1,3}` has `{1,2,2}`). The [`Fingerprint`] used to refute
//! equivalence is therefore minimized over all scalings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::zp::{affine_image, canonical_digits, normalize_digit_set, Prime};
use crate::{CapError, Result};

/// Sorted circular gaps of `digits`, including the wrap to `p`.
pub fn difference_multiset(p: Prime, digits: &[u32]) -> Vec<u32> {
    let mut gaps = circular_gaps(p, digits);
    gaps.sort_unstable();
    gaps
}

fn circular_gaps(p: Prime, digits: &[u32]) -> Vec<u32> {
    let mut d: Vec<u32> = digits.iter().map(|&x| x % p.get()).collect();
    d.sort_unstable();
    d.dedup();
    if d.is_empty() {
        return Vec::new();
    }
    let mut gaps: Vec<u32> = d.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(p.get() - d[d.len() - 1] + d[0]);
    gaps
}

/// Smallest rotation of a cyclic sequence.
fn min_rotation(seq: &[u32]) -> Vec<u32> {
    (0..seq.len().max(1)).map(|r| seq[r..].iter().chain(&seq[..r]).copied().collect::<Vec<u32>>()).min().unwrap_or_default()
}

/// Affine-invariant summary of a digit set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    /// Lexicographically least sorted gap multiset over all scalings.
    pub gaps: Vec<u32>,
    /// Lexicographically least cyclic gap order over all scalings and
    /// rotations. Scaling by `-1` covers reflections.
    pub cyclic: Vec<u32>,
}

pub fn fingerprint(p: Prime, digits: &[u32]) -> Fingerprint {
    let mut gaps: Option<Vec<u32>> = None;
    let mut cyclic: Option<Vec<u32>> = None;
    for a in 1..p.get() {
        let image = affine_image(p, digits, a, 0);
        let g = circular_gaps(p, &image);
        let mut sorted = g.clone();
        sorted.sort_unstable();
        let rot = min_rotation(&g);
        if gaps.as_ref().is_none_or(|best| sorted < *best) {
            gaps = Some(sorted);
        }
        if cyclic.as_ref().is_none_or(|best| rot < *best) {
            cyclic = Some(rot);
        }
    }
    Fingerprint { gaps: gaps.unwrap_or_default(), cyclic: cyclic.unwrap_or_default() }
}

/// `f(x) = a·x + b` over `Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: u32,
    pub b: u32,
}

impl AffineMap {
    pub fn apply(&self, p: Prime, x: u32) -> u32 {
        p.add(p.mul(self.a, x), self.b)
    }

    /// `self ∘ other`.
    pub fn compose(&self, p: Prime, other: &AffineMap) -> AffineMap {
        AffineMap { a: p.mul(self.a, other.a), b: self.apply(p, other.b) }
    }
}

/// First map in `(a, b)` order with `a·D1 + b = D2`.
pub fn affine_equivalent(p: Prime, d1: &[u32], d2: &[u32]) -> Result<Option<AffineMap>> {
    let d1 = canonical_digits(p, d1)?;
    let d2 = canonical_digits(p, d2)?;
    if d1.len() != d2.len() {
        return Err(CapError::SizeMismatch(d1.len(), d2.len()));
    }
    for a in 1..p.get() {
        for b in 0..p.get() {
            if affine_image(p, &d1, a, b) == d2 {
                return Ok(Some(AffineMap { a, b }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitSetClass {
    pub id: usize,
    /// The normalized form of the first member.
    pub representative: Vec<u32>,
    pub fingerprint: Fingerprint,
    /// Members with a map from the first member onto each.
    pub members: Vec<ClassMember>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMember {
    pub digits: Vec<u32>,
    pub map: AffineMap,
}

/// Groups sets into affine orbits. Fingerprints only ever separate sets;
/// every merge is backed by an explicit map. Classes appear in order of
/// first occurrence.
pub fn classify(p: Prime, sets: &[Vec<u32>]) -> Result<Vec<DigitSetClass>> {
    let canon: Vec<Vec<u32>> = sets.iter().map(|d| canonical_digits(p, d)).collect::<Result<_>>()?;
    let prints: Vec<Fingerprint> = canon.par_iter().map(|d| fingerprint(p, d)).collect();
    let mut classes: Vec<DigitSetClass> = Vec::new();
    for (d, fp) in canon.into_iter().zip(prints) {
        let found = classes.par_iter().enumerate().find_map_first(|(k, class)| {
            if class.fingerprint != fp {
                return None;
            }
            let first = &class.members[0].digits;
            affine_equivalent(p, first, &d).ok().flatten().map(|m| (k, m))
        });
        match found {
            Some((k, map)) => classes[k].members.push(ClassMember { digits: d, map }),
            None => classes.push(DigitSetClass {
                id: classes.len(),
                representative: normalize_digit_set(p, &d),
                fingerprint: fp,
                members: vec![ClassMember { digits: d, map: AffineMap { a: 1, b: 0 } }],
            }),
        }
    }
    Ok(classes)
}

/// Pairs of class ids whose fingerprints agree although no affine map
/// joins them.
pub fn fingerprint_collisions(classes: &[DigitSetClass]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if a.fingerprint == b.fingerprint {
                out.push((a.id, b.id));
            }
        }
    }
    out
}
