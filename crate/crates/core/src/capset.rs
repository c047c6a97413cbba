//! Cap construction from a digit-set pair, brute-force cap verification,
//! exact and asymptotic sizes, and the classical comparison bounds.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::json::biguint_string;
use crate::progressions::enumerate_progressions;
use crate::zp::{is_prime, DigitSetPair, LineEquation};
use crate::{CapError, Result};

/// Default ceiling on the number of points `build_cap` will materialize.
pub const ENUMERATION_LIMIT: u64 = 20_000_000;

/// A finite set of points in `Z_p^n`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    modulus: u32,
    dim: usize,
    coords: Vec<u32>,
}

impl PointSet {
    pub fn new(modulus: u32, dim: usize, coords: Vec<u32>) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(CapError::NotPrime(modulus));
        }
        if dim == 0 && !coords.is_empty() || dim > 0 && !coords.len().is_multiple_of(dim) {
            return Err(CapError::DimensionMismatch(format!("{} coordinates for dimension {dim}", coords.len())));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= modulus) {
            return Err(CapError::DigitOutOfRange { digit: c, p: modulus });
        }
        Ok(PointSet { modulus, dim, coords })
    }

    pub fn from_points(modulus: u32, dim: usize, points: &[Vec<u32>]) -> Result<Self> {
        if let Some(pt) = points.iter().find(|pt| pt.len() != dim) {
            return Err(CapError::DimensionMismatch(format!("point of length {} in dimension {dim}", pt.len())));
        }
        Self::new(modulus, dim, points.concat())
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> &[u32] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// One point per line, coordinates space-separated, lexicographic order.
    pub fn to_text(&self) -> String {
        let mut pts: Vec<&[u32]> = self.points().collect();
        pts.sort_unstable();
        pts.dedup();
        let mut out = String::new();
        for pt in pts {
            let line: Vec<String> = pt.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Inverse of [`PointSet::to_text`]; blank lines and `#` comments are
    /// skipped and the dimension is taken from the first point.
    pub fn from_text(modulus: u32, text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let pt = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u32>().map_err(|_| CapError::Parse(format!("line {}: bad coordinate {s:?}", lineno + 1))))
                .collect::<Result<Vec<u32>>>()?;
            points.push(pt);
        }
        let dim = points.first().map_or(0, Vec::len);
        Self::from_points(modulus, dim, &points)
    }
}

/// The point set `S(D, D', n)`.
#[derive(Debug, Clone)]
pub struct CapPointSet {
    pub pair: DigitSetPair,
    pub n: usize,
    pub points: PointSet,
}

fn check_divisible(pair: &DigitSetPair, n: usize) -> Result<usize> {
    let size = pair.digits().len();
    if n == 0 || !n.is_multiple_of(size) {
        return Err(CapError::Divisibility { n, size });
    }
    Ok(n / size)
}

/// Enumerates `S(D, D', n)` in lexicographic order.
pub fn build_cap(pair: &DigitSetPair, n: usize, limit: u64) -> Result<CapPointSet> {
    let per_digit = check_divisible(pair, n)?;
    let count = size_estimate(pair, n)?.exact_count;
    if count > BigUint::from(limit) {
        return Err(CapError::EnumerationTooLarge { count: count.to_string(), limit });
    }
    let digits = pair.digits();
    let fixed: Vec<bool> = digits.iter().map(|&d| pair.is_fixed(d)).collect();
    let mut quota: Vec<usize> = fixed.iter().map(|&f| if f { per_digit } else { 0 }).collect();
    let mut fixed_left = per_digit * pair.fixed().len();
    let mut current = vec![0u32; n];
    let mut coords = Vec::with_capacity(count.to_usize().unwrap_or(0) * n);

    #[allow(clippy::too_many_arguments)]
    fn fill(
        pos: usize,
        n: usize,
        digits: &[u32],
        fixed: &[bool],
        quota: &mut [usize],
        fixed_left: &mut usize,
        current: &mut [u32],
        out: &mut Vec<u32>,
    ) {
        if pos == n {
            out.extend_from_slice(current);
            return;
        }
        let slots_after = n - pos - 1;
        for (k, &d) in digits.iter().enumerate() {
            if fixed[k] {
                if quota[k] == 0 {
                    continue;
                }
                quota[k] -= 1;
                *fixed_left -= 1;
                current[pos] = d;
                fill(pos + 1, n, digits, fixed, quota, fixed_left, current, out);
                quota[k] += 1;
                *fixed_left += 1;
            } else if slots_after >= *fixed_left {
                current[pos] = d;
                fill(pos + 1, n, digits, fixed, quota, fixed_left, current, out);
            }
        }
    }

    fill(0, n, digits, &fixed, &mut quota, &mut fixed_left, &mut current, &mut coords);
    let points = PointSet::new(pair.p().get(), n, coords)?;
    Ok(CapPointSet { pair: pair.clone(), n, points })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CapCheck {
    Ok,
    /// Three distinct collinear points of the set.
    Violation {
        points: [Vec<u32>; 3],
    },
}

impl CapCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, CapCheck::Ok)
    }
}

/// 16 lanes of 8 bits; usable while `n <= 16` and `p < 128`.
struct Lanes {
    p: u32,
    p_lanes: u128,
    offset: u128,
    high: u128,
}

impl Lanes {
    fn new(p: u32, dim: usize) -> Self {
        let mut p_lanes = 0u128;
        let mut offset = 0u128;
        let mut high = 0u128;
        for i in 0..16 {
            if i < dim {
                p_lanes |= (p as u128) << (8 * i);
            }
            offset |= ((128 - p) as u128) << (8 * i);
            high |= 0x80u128 << (8 * i);
        }
        Lanes { p, p_lanes, offset, high }
    }

    fn pack(pt: &[u32]) -> u128 {
        pt.iter().enumerate().fold(0u128, |acc, (i, &c)| acc | (c as u128) << (8 * i))
    }

    fn unpack(v: u128, dim: usize) -> Vec<u32> {
        (0..dim).map(|i| ((v >> (8 * i)) & 0xff) as u32).collect()
    }

    /// Lane-wise `(a + b) mod p` for reduced inputs.
    #[inline(always)]
    fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        let wrap = ((s + self.offset) & self.high) >> 7;
        s - wrap * self.p as u128
    }

    #[inline(always)]
    fn sub(&self, a: u128, b: u128) -> u128 {
        self.add(a, self.p_lanes - b)
    }
}

/// Scans, for every pair of distinct points, the remaining `p - 2` points
/// of the line through them and reports the first one found in the set.
pub fn verify_cap(points: &PointSet) -> CapCheck {
    let p = points.modulus();
    let dim = points.dim();
    if points.len() < 3 {
        return CapCheck::Ok;
    }
    if dim <= 16 && p < 128 {
        verify_packed(points)
    } else {
        verify_generic(points)
    }
}

fn verify_packed(points: &PointSet) -> CapCheck {
    let p = points.modulus();
    let dim = points.dim();
    let lanes = Lanes::new(p, dim);
    let mut packed: Vec<u128> = points.points().map(Lanes::pack).collect();
    packed.sort_unstable();
    packed.dedup();
    let index: FxHashSet<u128> = packed.iter().copied().collect();
    let hit = (0..packed.len()).into_par_iter().find_map_first(|i| {
        let x = packed[i];
        for &y in &packed[i + 1..] {
            let d = lanes.sub(y, x);
            let mut z = y;
            for _ in 2..p {
                z = lanes.add(z, d);
                if index.contains(&z) {
                    return Some([x, y, z]);
                }
            }
        }
        None
    });
    match hit {
        None => CapCheck::Ok,
        Some(t) => CapCheck::Violation { points: t.map(|v| Lanes::unpack(v, dim)) },
    }
}

fn verify_generic(points: &PointSet) -> CapCheck {
    let p = points.modulus() as u64;
    let mut pts: Vec<&[u32]> = points.points().collect();
    pts.sort_unstable();
    pts.dedup();
    let index: FxHashSet<&[u32]> = pts.iter().copied().collect();
    let hit = (0..pts.len()).into_par_iter().find_map_first(|i| {
        let x = pts[i];
        let mut z = vec![0u32; x.len()];
        for &y in &pts[i + 1..] {
            let d: Vec<u64> = x.iter().zip(y).map(|(&a, &b)| (b as u64 + p - a as u64) % p).collect();
            z.copy_from_slice(y);
            for _ in 2..p {
                for (zc, dc) in z.iter_mut().zip(&d) {
                    *zc = ((*zc as u64 + dc) % p) as u32;
                }
                if index.contains(z.as_slice()) {
                    return Some([x.to_vec(), y.to_vec(), z.clone()]);
                }
            }
        }
        None
    });
    match hit {
        None => CapCheck::Ok,
        Some(points) => CapCheck::Violation { points },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeEstimate {
    pub digits: usize,
    pub fixed: usize,
    pub n: usize,
    #[serde(with = "biguint_string")]
    pub exact_count: BigUint,
    pub delta: usize,
    pub c_const: f64,
}

impl SizeEstimate {
    /// `|S|·n^{δ/2} / |D|^n`, which tends to `c`.
    pub fn asymptotic_ratio(&self) -> f64 {
        let n = self.n as f64;
        let log = ln_big(&self.exact_count) + self.delta as f64 / 2.0 * n.ln() - n * (self.digits as f64).ln();
        log.exp()
    }
}

/// Natural log of a positive big integer, valid far beyond `f64` range.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `∏_{ℓ<|D'|} C(n - ℓn/|D|, n/|D|) · (|D| - |D'|)^{n - |D'|n/|D|}` with
/// `0⁰ = 1`, plus `δ = min(|D'|, |D| - 1)` and
/// `c = (1 - δ/|D|)^{-1/2} · (|D|/2π)^{δ/2}`.
pub fn size_estimate(pair: &DigitSetPair, n: usize) -> Result<SizeEstimate> {
    let per_digit = check_divisible(pair, n)?;
    let size = pair.digits().len();
    let fixed = pair.fixed().len();
    let mut count = BigUint::one();
    for l in 0..fixed {
        count *= num_integer::binomial(BigUint::from(n - l * per_digit), BigUint::from(per_digit));
    }
    let free_positions = n - fixed * per_digit;
    let free_digits = size - fixed;
    if free_positions > 0 {
        count *= num_traits::pow(BigUint::from(free_digits), free_positions);
    }
    let delta = fixed.min(size - 1);
    let k = size as f64;
    let c_const = (1.0 - delta as f64 / k).powf(-0.5) * (k / (2.0 * std::f64::consts::PI)).powf(delta as f64 / 2.0);
    if count.is_zero() {
        unreachable!("free positions exist only when free digits do");
    }
    Ok(SizeEstimate { digits: size, fixed, n, exact_count: count, delta, c_const })
}

/// Three collinear points of `S(D, D', n)` built from a nonzero `χ` in the
/// cone of equation `eq`: coordinate `i` of the triple runs through the
/// progressions with multiplicity `χ_v`, and constant columns `(e, e, e)`
/// top up the digit frequencies. Returns `n` and the three points.
pub fn violation_from_witness(pair: &DigitSetPair, eq: LineEquation, witness: &[u64]) -> Result<(usize, [Vec<u32>; 3])> {
    let table = enumerate_progressions(pair, eq);
    if witness.len() != table.len() {
        return Err(CapError::DimensionMismatch(format!("{} weights for {} progressions", witness.len(), table.len())));
    }
    if witness.iter().all(|&w| w == 0) {
        return Err(CapError::Precondition("witness is zero".into()));
    }
    let mut rows: [Vec<u32>; 3] = Default::default();
    for (v, &w) in table.rows.iter().zip(witness) {
        for _ in 0..w {
            for (r, row) in rows.iter_mut().enumerate() {
                row.push(v.0[r]);
            }
        }
    }
    let m = rows[0].len();
    let count = |row: &[u32], d: u32| row.iter().filter(|&&e| e == d).count();
    let mut freq = Vec::new();
    for &d in pair.fixed() {
        let f = count(&rows[0], d);
        if count(&rows[1], d) != f || count(&rows[2], d) != f {
            return Err(CapError::Precondition(format!("witness does not balance digit {d}")));
        }
        freq.push((d, f));
    }
    let size = pair.digits().len();
    let fixed_total: usize = freq.iter().map(|(_, f)| f).sum();
    let free_used = m - fixed_total;
    let free_digit = pair.digits().iter().copied().find(|&d| !pair.is_fixed(d));
    let mut k = freq.iter().map(|&(_, f)| f).max().unwrap_or(0).max(1);
    if free_digit.is_some() {
        let free_slots = size - pair.fixed().len();
        k = k.max(free_used.div_ceil(free_slots));
    }
    let n = k * size;
    for &(d, f) in &freq {
        for _ in f..k {
            rows.iter_mut().for_each(|row| row.push(d));
        }
    }
    if let Some(e) = free_digit {
        while rows[0].len() < n {
            rows.iter_mut().for_each(|row| row.push(e));
        }
    }
    debug_assert_eq!(rows[0].len(), n);
    Ok((n, rows))
}

/// Membership test for `S(D, D', n)`.
pub fn in_construction(pair: &DigitSetPair, point: &[u32]) -> bool {
    let n = point.len();
    let size = pair.digits().len();
    n.is_multiple_of(size)
        && point.iter().all(|&d| pair.contains(d))
        && pair.fixed().iter().all(|&d| point.iter().filter(|&&e| e == d).count() == n / size)
}

fn is_square_mod(a: u64, q: u64) -> bool {
    let a = a % q;
    a == 0 || (1..q).any(|x| x * x % q == a)
}

#[derive(Debug, Clone)]
pub struct BoseCap {
    /// Smallest `a` with `x² + x + a` irreducible over `Z_q`.
    pub a: u32,
    pub points: PointSet,
}

/// The elliptic-quadric cap `{(t² + st + as², s, t)}` of size `q²` in
/// `AG(3, q)`; with `affine = false` the projective version in
/// homogeneous coordinates, including `(1, 0, 0, 0)`.
pub fn bose_cap(q: u32, affine: bool) -> Result<BoseCap> {
    if !is_prime(q) || q == 2 {
        return Err(CapError::NotPrime(q));
    }
    let qq = q as u64;
    // Irreducible iff the discriminant 1 - 4a is a non-square.
    let a = (1..q).find(|&a| !is_square_mod((1 + 4 * qq * qq - 4 * a as u64) % qq, qq)).expect("non-squares exist modulo an odd prime");
    let mut coords = Vec::new();
    for s in 0..qq {
        for t in 0..qq {
            let x = ((t * t + s * t + a as u64 * s * s) % qq) as u32;
            coords.extend_from_slice(&[x, s as u32, t as u32]);
            if !affine {
                coords.push(1);
            }
        }
    }
    if !affine {
        coords.extend_from_slice(&[1, 0, 0, 0]);
    }
    let points = PointSet::new(q, if affine { 3 } else { 4 }, coords)?;
    Ok(BoseCap { a, points })
}

/// `(1/p) · min_{0<t<1} (1 - t^p) / ((1 - t) · t^{(p-1)/3})`, the base of
/// the slice-rank upper bound `(J(p)·p)^n`.
pub fn eg_constant(p: u32) -> f64 {
    let exponent = (p as f64 - 1.0) / 3.0;
    // (1 - t^p)/(1 - t) as a geometric sum: no cancellation near t = 1.
    let f = |t: f64| {
        let mut sum = 0.0;
        let mut pow = 1.0;
        for _ in 0..p {
            sum += pow;
            pow *= t;
        }
        sum / t.powf(exponent)
    };
    const EPS: f64 = 1e-9;
    const GRID: usize = 10_000;
    let step = (1.0 - 2.0 * EPS) / GRID as f64;
    let at = |i: usize| EPS + step * i as f64;
    let best = (0..=GRID).min_by(|&i, &j| f(at(i)).total_cmp(&f(at(j)))).expect("nonempty grid");
    let mut lo = at(best.saturating_sub(1));
    let mut hi = at((best + 1).min(GRID));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 * hi.abs().max(1e-300) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    f(0.5 * (lo + hi)).min(f(at(best))) / p as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTableRow {
    pub p: u32,
    /// `p^{2/3}`, from products of the three-dimensional ovaloid.
    pub bose: f64,
    /// `(p⁴ + p² - 1)^{1/6}`, from the six-dimensional product cap.
    pub edel: f64,
    /// `|D|` of the best admissible digit set.
    pub new_bound: usize,
    /// `log_p |D|`.
    pub mu: f64,
    /// `100·(new/edel - 1)` when the new bound beats the product cap.
    pub improvement_percent: Option<f64>,
}

pub fn bound_table(p: u32, best_digit_set_size: usize) -> BoundTableRow {
    let pf = p as f64;
    let edel = (pf.powi(4) + pf.powi(2) - 1.0).powf(1.0 / 6.0);
    let new = best_digit_set_size as f64;
    BoundTableRow {
        p,
        bose: pf.powf(2.0 / 3.0),
        edel,
        new_bound: best_digit_set_size,
        mu: new.ln() / pf.ln(),
        improvement_percent: (new > edel).then(|| 100.0 * (new / edel - 1.0)),
    }
}
