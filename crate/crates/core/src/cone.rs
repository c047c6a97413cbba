//! Exact triviality test for the cone `{χ >= 0 : Aχ = 0}`.
//!
//! The system is homogeneous, so it has a nonzero nonnegative integer
//! solution iff it has a nonzero nonnegative rational one, iff the
//! polytope `{χ >= 0 : Aχ = 0, Σχ = 1}` is nonempty. Phase one of the
//! simplex method over `Q` (Bland's rule) decides that and yields a
//! certificate either way:
//!
//! * feasible: the basic solution, scaled to coprime integers, is a
//!   nonzero witness `χ` with `Aχ = 0`;
//! * infeasible: the optimal phase-one duals give `y` with `Aᵀy >= 1`
//!   componentwise. Any `χ >= 0` with `Aχ = 0` then has
//!   `Σχ <= yᵀAχ = 0`, so `χ = 0`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::json::{biguint_string, rational_string};
use crate::progressions::{build_constraint_system, enumerate_progressions, ConstraintSystem};
use crate::zp::{equation_classes, DigitSetPair, LineEquation};
use crate::{CapError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConeCertificate {
    /// `Aᵀ·dual >= 1` in every column, scaled so the minimum is exactly 1.
    Trivial {
        #[serde(serialize_with = "rational_string::serialize_vec", deserialize_with = "rational_string::deserialize_vec")]
        dual: Vec<BigRational>,
    },
    /// Nonnegative, nonzero, coprime, and in the kernel of `A`.
    Nontrivial {
        #[serde(serialize_with = "biguint_string::serialize_vec", deserialize_with = "biguint_string::deserialize_vec")]
        witness: Vec<BigUint>,
    },
}

impl ConeCertificate {
    pub fn is_trivial(&self) -> bool {
        matches!(self, ConeCertificate::Trivial { .. })
    }
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

enum PhaseOne {
    Feasible(Vec<BigRational>),
    /// Duals of the `m` balance rows followed by the normalization row.
    Infeasible(Vec<BigRational>),
}

/// Phase-one simplex for `Aχ = 0, 1ᵀχ = 1, χ >= 0` with one artificial per
/// row. Bland's smallest-index rule prevents cycling on these highly
/// degenerate systems.
fn phase_one(a: &[Vec<i64>], n: usize) -> PhaseOne {
    let m = a.len() + 1;
    let width = n + m + 1;
    let rhs = width - 1;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![BigRational::zero(); width];
        for (j, cell) in row.iter_mut().take(n).enumerate() {
            *cell = if i + 1 < m { q(a[i][j]) } else { BigRational::one() };
        }
        row[n + i] = BigRational::one();
        if i + 1 == m {
            row[rhs] = BigRational::one();
        }
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs; the last entry holds minus the objective value.
    let mut cost = vec![BigRational::zero(); width];
    for j in 0..n {
        cost[j] = -tab.iter().map(|r| &r[j]).sum::<BigRational>();
    }
    cost[rhs] = -BigRational::one();

    while let Some(enter) = (0..rhs).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..m {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &tab[i][rhs] / &tab[i][enter];
            let better = match &best {
                None => true,
                Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
            };
            if better {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        let leave = leave.expect("phase one is bounded below");
        pivot(&mut tab, &mut cost, leave, enter);
        basis[leave] = enter;
    }

    if cost[rhs].is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = tab[i][rhs].clone();
            }
        }
        PhaseOne::Feasible(x)
    } else {
        // Artificial k has cost 1 and reduced cost 1 - π_k.
        let pi = (0..m).map(|k| BigRational::one() - &cost[n + k]).collect();
        PhaseOne::Infeasible(pi)
    }
}

fn pivot(tab: &mut [Vec<BigRational>], cost: &mut [BigRational], r: usize, c: usize) {
    let inv = tab[r][c].recip();
    for v in tab[r].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let pivot_row = tab[r].clone();
    let eliminate = |row: &mut [BigRational]| {
        if row[c].is_zero() {
            return;
        }
        let f = row[c].clone();
        for (v, p) in row.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
    };
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    eliminate(cost);
}

fn to_coprime_integers(x: &[BigRational]) -> Vec<BigUint> {
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    ints.into_iter()
        .map(|v| {
            let v = if gcd.is_zero() { v } else { v / &gcd };
            debug_assert!(v.sign() != Sign::Minus);
            v.to_biguint().expect("basic solution is nonnegative")
        })
        .collect()
}

/// `Aᵀy` column by column.
fn dual_products(system: &ConstraintSystem, y: &[BigRational]) -> Vec<BigRational> {
    (0..system.cols()).map(|j| system.column(j).zip(y).filter(|(a, _)| *a != 0).map(|(a, yi)| yi * q(a)).sum()).collect()
}

/// Decides whether the only `χ >= 0` with `Aχ = 0` is zero.
pub fn cone_trivial(system: &ConstraintSystem) -> ConeCertificate {
    let n = system.cols();
    let m = system.rows();
    if n == 0 {
        return ConeCertificate::Trivial { dual: vec![BigRational::zero(); m] };
    }
    match phase_one(&system.matrix, n) {
        PhaseOne::Feasible(x) => ConeCertificate::Nontrivial { witness: to_coprime_integers(&x) },
        PhaseOne::Infeasible(pi) => {
            let t = pi[m].clone();
            debug_assert!(t.is_positive());
            let y: Vec<BigRational> = pi[..m].iter().map(|v| -v / &t).collect();
            let min = dual_products(system, &y).into_iter().min().expect("n > 0");
            debug_assert!(min >= BigRational::one());
            let dual = y.into_iter().map(|v| v / &min).collect();
            ConeCertificate::Trivial { dual }
        }
    }
}

/// Checks a certificate by direct multiplication.
pub fn verify_certificate(system: &ConstraintSystem, cert: &ConeCertificate) -> Result<bool> {
    match cert {
        ConeCertificate::Trivial { dual } => {
            if dual.len() != system.rows() {
                return Err(CapError::DimensionMismatch(format!("dual has {} entries, system has {} rows", dual.len(), system.rows())));
            }
            Ok(dual_products(system, dual).iter().all(|v| *v >= BigRational::one()))
        }
        ConeCertificate::Nontrivial { witness } => {
            if witness.len() != system.cols() {
                return Err(CapError::DimensionMismatch(format!(
                    "witness has {} entries, system has {} columns",
                    witness.len(),
                    system.cols()
                )));
            }
            if witness.iter().all(Zero::is_zero) {
                return Ok(false);
            }
            let chi: Vec<BigInt> = witness.iter().map(|v| BigInt::from(v.clone())).collect();
            Ok(system
                .matrix
                .iter()
                .all(|row| row.iter().zip(&chi).filter(|(a, _)| **a != 0).map(|(a, c)| c * *a).sum::<BigInt>().is_zero()))
        }
    }
}

/// Largest search space `integer_oracle` will walk.
pub const ORACLE_LIMIT: u64 = 100_000_000;

/// Exhaustive search over `{0, …, bound}^columns \ {0}` for `Aχ = 0`.
/// Returns the first hit in odometer order (first coordinate fastest).
pub fn integer_oracle(system: &ConstraintSystem, bound: u32) -> Result<Option<Vec<u64>>> {
    let n = system.cols();
    let base = bound as u64 + 1;
    let mut space: u64 = 1;
    for _ in 0..n {
        space = space.saturating_mul(base);
        if space > ORACLE_LIMIT {
            return Err(CapError::InstanceTooLarge(format!("({base})^{n} exceeds {ORACLE_LIMIT}")));
        }
    }
    let m = system.rows();
    let cols: Vec<Vec<i64>> = (0..n).map(|j| system.column(j).collect()).collect();
    let mut chi = vec![0u64; n];
    let mut acc = vec![0i64; m];
    loop {
        // Increment the odometer, keeping acc = Aχ up to date.
        let mut j = 0;
        loop {
            if j == n {
                return Ok(None);
            }
            if chi[j] < bound as u64 {
                chi[j] += 1;
                for (a, c) in acc.iter_mut().zip(&cols[j]) {
                    *a += c;
                }
                break;
            }
            for (a, c) in acc.iter_mut().zip(&cols[j]) {
                *a -= c * bound as i64;
            }
            chi[j] = 0;
            j += 1;
        }
        if acc.iter().all(|&v| v == 0) {
            return Ok(Some(chi));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentativeCertificate {
    pub equation: LineEquation,
    pub certificate: ConeCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub certificates: Vec<RepresentativeCertificate>,
}

pub fn cone_for(pair: &DigitSetPair, eq: LineEquation) -> ConstraintSystem {
    build_constraint_system(&enumerate_progressions(pair, eq))
}

/// Cone test on every equation-class representative.
pub fn admissible(pair: &DigitSetPair) -> Admissibility {
    let reps: Vec<LineEquation> = equation_classes(pair.p()).representatives().collect();
    let certificates: Vec<RepresentativeCertificate> = reps
        .into_par_iter()
        .map(|equation| RepresentativeCertificate { equation, certificate: cone_trivial(&cone_for(pair, equation)) })
        .collect();
    let admissible = certificates.iter().all(|c| c.certificate.is_trivial());
    Admissibility { admissible, certificates }
}
