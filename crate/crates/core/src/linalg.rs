//! Dense exact linear algebra over `Q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Matrix = Vec<Vec<BigRational>>;

pub fn from_integers(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect()).collect()
}

/// Reduced row echelon form in place. Row count is preserved, zero rows
/// end up at the bottom. Returns the pivot column of each nonzero row.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pivot_row) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot_row);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            let (src, dst) = if i < r {
                let (lo, hi) = m.split_at_mut(r);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[r], &mut hi[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d -= &factor * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut m = m.clone();
    rref(&mut m).len()
}

/// Whether two matrices with the same column count span the same row space.
pub fn same_row_space(a: &Matrix, b: &Matrix) -> bool {
    let mut ra = a.clone();
    let mut rb = b.clone();
    let pa = rref(&mut ra);
    let pb = rref(&mut rb);
    pa == pb && ra[..pa.len()] == rb[..pb.len()]
}

/// Sign pattern of a nonzero row: `Some(true)` if all entries are `>= 0`,
/// `Some(false)` if all are `<= 0`, `None` if mixed or zero.
pub fn single_signed(row: &[BigRational]) -> Option<bool> {
    let pos = row.iter().any(|v| v.is_positive());
    let neg = row.iter().any(|v| v.is_negative());
    match (pos, neg) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => None,
    }
}
