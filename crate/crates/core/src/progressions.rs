//! Weighted progressions `P_b(D)` and the frequency-balance system.
//!
//! For an equation `x + b·y + c·z = 0`, a weighted progression is a
//! solution `(x, y, z) ∈ D³` other than `x = y = z`. Three cap points on a
//! common line induce, coordinate by coordinate, a multiset of weighted
//! progressions; `χ_v` counts how often `v` occurs. Because every fixed
//! digit occurs equally often in each of the three points, `χ` satisfies
//! one balance equation per fixed digit and per position pair `1↔2`,
//! `1↔3`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::zp::{DigitSetPair, LineEquation};

/// A triple `(x, y, z)` of digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightedProgression(pub [u32; 3]);

impl WeightedProgression {
    pub fn new(x: u32, y: u32, z: u32) -> Self {
        WeightedProgression([x, y, z])
    }

    /// Digit at 1-based position `r`.
    #[inline]
    pub fn at(&self, position: usize) -> u32 {
        self.0[position - 1]
    }

    #[inline]
    pub fn contains(&self, d: u32) -> bool {
        self.0.contains(&d)
    }

    pub fn reversed(&self) -> Self {
        let [x, y, z] = self.0;
        WeightedProgression([z, y, x])
    }

    pub fn swapped(&self) -> Self {
        let [x, y, z] = self.0;
        WeightedProgression([x, z, y])
    }
}

impl fmt::Display for WeightedProgression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.0;
        write!(f, "({x}, {y}, {z})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionTable {
    pub equation: LineEquation,
    pub pair: DigitSetPair,
    /// Sorted lexicographically, no duplicates.
    pub rows: Vec<WeightedProgression>,
}

impl ProgressionTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// All nontrivial solutions of `eq` in `D³`, sorted.
pub fn enumerate_progressions(pair: &DigitSetPair, eq: LineEquation) -> ProgressionTable {
    assert_eq!(pair.p(), eq.p(), "pair and equation over different moduli");
    let mut rows = Vec::new();
    for &x in pair.digits() {
        for &y in pair.digits() {
            let z = eq.solve_z(x, y);
            if pair.contains(z) && !(x == y && y == z) {
                rows.push(WeightedProgression([x, y, z]));
            }
        }
    }
    // x-major, y-minor loops already produce lexicographic order since z
    // is determined by (x, y).
    debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
    ProgressionTable { equation: eq, pair: pair.clone(), rows }
}

fn retable(t: &ProgressionTable, equation: LineEquation, f: impl Fn(&WeightedProgression) -> WeightedProgression) -> ProgressionTable {
    let mut rows: Vec<_> = t.rows.iter().map(f).collect();
    rows.sort_unstable();
    ProgressionTable { equation, pair: t.pair.clone(), rows }
}

/// The table of the mirrored equation `c⁻¹·b`, obtained by reading every
/// triple backwards.
pub fn reverse_table(t: &ProgressionTable) -> ProgressionTable {
    retable(t, t.equation.mirrored(), WeightedProgression::reversed)
}

/// The table of the equation `b' = c`, obtained by swapping the last two
/// coordinates.
pub fn swap_table(t: &ProgressionTable) -> ProgressionTable {
    retable(t, t.equation.swapped(), WeightedProgression::swapped)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PositionPair {
    #[serde(rename = "1-2")]
    FirstSecond,
    #[serde(rename = "1-3")]
    FirstThird,
}

impl PositionPair {
    fn other(self) -> usize {
        match self {
            PositionPair::FirstSecond => 2,
            PositionPair::FirstThird => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RowLabel {
    pub positions: PositionPair,
    pub digit: u32,
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos = match self.positions {
            PositionPair::FirstSecond => "1<->2",
            PositionPair::FirstThird => "1<->3",
        };
        write!(f, "{pos} d={}", self.digit)
    }
}

/// The integer matrix `A` with `A·χ = 0` encoding frequency balance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub equation: LineEquation,
    pub row_labels: Vec<RowLabel>,
    pub column_labels: Vec<WeightedProgression>,
    /// Row-major, entries in `{-1, 0, 1}`.
    pub matrix: Vec<Vec<i64>>,
}

impl ConstraintSystem {
    /// A bare system without digit semantics, for tests and generic use.
    pub fn from_rows(equation: LineEquation, matrix: Vec<Vec<i64>>) -> Self {
        let cols = matrix.first().map_or(0, Vec::len);
        assert!(matrix.iter().all(|r| r.len() == cols), "ragged matrix");
        let row_labels = (0..matrix.len()).map(|i| RowLabel { positions: PositionPair::FirstSecond, digit: i as u32 }).collect();
        let column_labels = (0..cols).map(|j| WeightedProgression([j as u32, 0, 0])).collect();
        ConstraintSystem { equation, row_labels, column_labels, matrix }
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.column_labels.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = i64> + '_ {
        self.matrix.iter().map(move |row| row[j])
    }
}

/// Builds `A`: first the `1↔2` rows for each fixed digit ascending, then
/// the `1↔3` rows. A digit sitting at both compared positions cancels.
pub fn build_constraint_system(t: &ProgressionTable) -> ConstraintSystem {
    let mut row_labels = Vec::with_capacity(2 * t.pair.fixed().len());
    for positions in [PositionPair::FirstSecond, PositionPair::FirstThird] {
        for &digit in t.pair.fixed() {
            row_labels.push(RowLabel { positions, digit });
        }
    }
    let matrix = row_labels
        .iter()
        .map(|label| {
            let other = label.positions.other();
            t.rows.iter().map(|v| (v.at(1) == label.digit) as i64 - (v.at(other) == label.digit) as i64).collect()
        })
        .collect();
    ConstraintSystem { equation: t.equation, row_labels, column_labels: t.rows.clone(), matrix }
}
