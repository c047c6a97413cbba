//! Arithmetic modulo a small prime, digit-set pairs and line equations.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{CapError, Result};

/// Trial division; the moduli handled here stay in the hundreds.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An odd prime modulus `p >= 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(CapError::NotPrime(p));
        }
        if p < 5 {
            return Err(CapError::ModulusTooSmall(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.0 as u64 - (b % self.0) as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        let a = a % self.0;
        assert!(a != 0, "zero has no inverse modulo {}", self.0);
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        self.reduce(t0)
    }

    pub fn is_square(self, a: u32) -> bool {
        let a = a % self.0;
        a == 0 || (1..self.0).any(|x| self.mul(x, x) == a)
    }
}

impl TryFrom<u32> for Prime {
    type Error = CapError;

    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sorts and validates a digit list: every entry a residue, no repeats.
pub fn canonical_digits(p: Prime, digits: &[u32]) -> Result<Vec<u32>> {
    let mut seen = BTreeSet::new();
    for &d in digits {
        if d >= p.get() {
            return Err(CapError::DigitOutOfRange { digit: d, p: p.get() });
        }
        if !seen.insert(d) {
            return Err(CapError::DuplicateDigit(d));
        }
    }
    Ok(seen.into_iter().collect())
}

/// A digit set `D` together with its fixed-frequency digits `D' ⊆ D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct DigitSetPair {
    p: Prime,
    digits: Vec<u32>,
    fixed: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    p: u32,
    digits: Vec<u32>,
    fixed: Vec<u32>,
}

impl TryFrom<RawPair> for DigitSetPair {
    type Error = CapError;

    fn try_from(raw: RawPair) -> Result<Self> {
        DigitSetPair::new(Prime::new(raw.p)?, &raw.digits, &raw.fixed)
    }
}

impl From<DigitSetPair> for RawPair {
    fn from(pair: DigitSetPair) -> Self {
        RawPair { p: pair.p.get(), digits: pair.digits, fixed: pair.fixed }
    }
}

impl DigitSetPair {
    /// Builds a pair; inputs may be in any order and are stored ascending.
    pub fn new(p: Prime, digits: &[u32], fixed: &[u32]) -> Result<Self> {
        let digits = canonical_digits(p, digits)?;
        if digits.len() < 2 {
            return Err(CapError::TooFewDigits { min: 2, got: digits.len() });
        }
        let fixed = canonical_digits(p, fixed)?;
        if let Some(&d) = fixed.iter().find(|d| digits.binary_search(d).is_err()) {
            return Err(CapError::FixedNotInDigits(d));
        }
        Ok(DigitSetPair { p, digits, fixed })
    }

    /// The pair `(D, D)`: every digit has a fixed frequency.
    pub fn all_fixed(p: Prime, digits: &[u32]) -> Result<Self> {
        Self::new(p, digits, digits)
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn fixed(&self) -> &[u32] {
        &self.fixed
    }

    pub fn contains(&self, d: u32) -> bool {
        self.digits.binary_search(&d).is_ok()
    }

    pub fn is_fixed(&self, d: u32) -> bool {
        self.fixed.binary_search(&d).is_ok()
    }

    /// Same digit set with a different fixed subset.
    pub fn with_fixed(&self, fixed: &[u32]) -> Result<Self> {
        Self::new(self.p, &self.digits, fixed)
    }
}

impl fmt::Display for DigitSetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} D={{{}}} D'={{{}}}", self.p, join(&self.digits), join(&self.fixed))
    }
}

pub(crate) fn join(values: &[u32]) -> String {
    values.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// The equation `x + b·y + c·z = 0` with `b + c = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawEquation", into = "RawEquation")]
pub struct LineEquation {
    p: Prime,
    b: u32,
    c: u32,
}

#[derive(Serialize, Deserialize)]
struct RawEquation {
    p: u32,
    b: u32,
    c: u32,
}

impl TryFrom<RawEquation> for LineEquation {
    type Error = CapError;

    fn try_from(raw: RawEquation) -> Result<Self> {
        let eq = LineEquation::new(Prime::new(raw.p)?, raw.b)?;
        if eq.c != raw.c {
            return Err(CapError::Parse(format!("c = {} does not match b = {}", raw.c, raw.b)));
        }
        Ok(eq)
    }
}

impl From<LineEquation> for RawEquation {
    fn from(eq: LineEquation) -> Self {
        RawEquation { p: eq.p.get(), b: eq.b, c: eq.c }
    }
}

impl LineEquation {
    /// `b = 0` and `b = p - 1` only express that the three points are
    /// distinct and are rejected.
    pub fn new(p: Prime, b: u32) -> Result<Self> {
        if b == 0 || b >= p.get() - 1 {
            return Err(CapError::DegenerateEquation { b, p: p.get() });
        }
        let c = p.neg(b + 1);
        Ok(LineEquation { p, b, c })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    /// Whether `(x, y, z)` solves the equation.
    #[inline]
    pub fn holds(&self, x: u32, y: u32, z: u32) -> bool {
        let p = self.p.get() as u64;
        (x as u64 + self.b as u64 * y as u64 + self.c as u64 * z as u64).is_multiple_of(p)
    }

    /// The `z` completing `(x, y, ·)` to a solution.
    #[inline]
    pub fn solve_z(&self, x: u32, y: u32) -> u32 {
        let p = self.p;
        p.mul(p.neg(p.add(x, p.mul(self.b, y))), p.inv(self.c))
    }

    /// Reading solutions backwards: `(x,y,z)` solves `b` iff `(z,y,x)`
    /// solves `c⁻¹·b`.
    pub fn mirrored(&self) -> LineEquation {
        let b = self.p.mul(self.p.inv(self.c), self.b);
        LineEquation::new(self.p, b).expect("mirror image of a valid equation is valid")
    }

    /// Swapping the last two coordinates: `(x,y,z)` solves `b` iff
    /// `(x,z,y)` solves `c`.
    pub fn swapped(&self) -> LineEquation {
        LineEquation::new(self.p, self.c).expect("c of a valid equation is a valid b")
    }

    /// The equation in the `x + k·z = (k+1)·y` form used in proofs.
    pub fn display_form(&self) -> String {
        let k = self.c;
        match k {
            1 => "x + z = 2y".to_string(),
            _ => format!("x + {}z = {}y", k, k as u64 + 1),
        }
    }
}

impl fmt::Display for LineEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (b = {})", self.display_form(), self.b)
    }
}

/// One orbit of `b` values under mirroring and swapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationClass {
    pub representative: LineEquation,
    /// All `b` values in the class, ascending.
    pub members: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationClassPartition {
    pub p: Prime,
    pub classes: Vec<EquationClass>,
}

impl EquationClassPartition {
    pub fn representatives(&self) -> impl Iterator<Item = LineEquation> + '_ {
        self.classes.iter().map(|c| c.representative)
    }

    pub fn class_of(&self, b: u32) -> Option<&EquationClass> {
        self.classes.iter().find(|c| c.members.binary_search(&b).is_ok())
    }
}

/// Partitions `{1, …, p-2}` into orbits of the two symmetries. Classes are
/// ordered by their smallest member, which is also the representative.
pub fn equation_classes(p: Prime) -> EquationClassPartition {
    let max_b = p.get() - 2;
    let mut seen = vec![false; p.get() as usize];
    let mut classes = Vec::new();
    for start in 1..=max_b {
        if seen[start as usize] {
            continue;
        }
        let mut members = Vec::new();
        let mut stack = vec![start];
        seen[start as usize] = true;
        while let Some(b) = stack.pop() {
            members.push(b);
            let eq = LineEquation::new(p, b).expect("b in range");
            for next in [eq.mirrored().b(), eq.swapped().b()] {
                if !seen[next as usize] {
                    seen[next as usize] = true;
                    stack.push(next);
                }
            }
        }
        members.sort_unstable();
        let representative = LineEquation::new(p, members[0]).expect("b in range");
        classes.push(EquationClass { representative, members });
    }
    EquationClassPartition { p, classes }
}

/// Image of a digit set under `x ↦ a·x + b`, sorted.
pub fn affine_image(p: Prime, digits: &[u32], a: u32, b: u32) -> Vec<u32> {
    let mut image: Vec<u32> = digits.iter().map(|&d| p.add(p.mul(a, d), b)).collect();
    image.sort_unstable();
    image
}

/// Lexicographically least affine image of `digits`. For two or more
/// digits the result starts with `0, 1`.
pub fn normalize_digit_set(p: Prime, digits: &[u32]) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    let mut reduced: Vec<u32> = digits.iter().map(|d| d % p.get()).collect();
    reduced.sort_unstable();
    reduced.dedup();
    if reduced.len() < 2 {
        return reduced.iter().map(|_| 0).collect();
    }
    // The least image contains 0 and 1, so it maps some ordered pair (u, v)
    // of digits to (0, 1): a = (v - u)⁻¹, b = -a·u.
    for &u in &reduced {
        for &v in &reduced {
            if u == v {
                continue;
            }
            let a = p.inv(p.sub(v, u));
            let b = p.neg(p.mul(a, u));
            let image = affine_image(p, &reduced, a, b);
            if best.as_ref().is_none_or(|cur| image < *cur) {
                best = Some(image);
            }
        }
    }
    best.expect("at least one ordered pair")
}
