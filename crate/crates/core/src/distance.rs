//! Global inter-textual distances built on the scaled position-match table.
//!
//! Three measures, all in [0, 1]:
//!
//! * **`d2`** ([`assignment_distance`]) — optimal one-to-one matching of
//!   positions, averaged. Defined only for equal-length texts and cubic in
//!   their length.
//! * **`d3`** ([`directed_distance`]) — every position of `A` matched to its
//!   best position in `B`, averaged. Asymmetric, any lengths, quadratic.
//! * **`d4`** ([`symmetric_distance`]) — the maximum of `d3` in both
//!   directions; the tool's default measure.
//!
//! The `1 - lambda` scaling lives inside the table, so each measure is a
//! plain average over scaled entries. At `lambda = 0` the assignment-based
//! measure coincides exactly with the 1-gram distance, which the exact
//! rational route below makes testable without tolerances.

use num_rational::Ratio;

use crate::assignment::{solve_assignment, CostMatrix};
use crate::error::{Error, Result};
use crate::phrase::{intern_pair, minima_one, Discount, PositionMatchTable, DEFAULT_TABLE_CAP};
use crate::text::Text;

/// Which distance a value was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// `d2`: assignment-based, equal lengths only.
    Assignment,
    /// `d3`: best match per position of the first text; asymmetric.
    Directed,
    /// `d4`: symmetrized best-match distance.
    Symmetric,
    /// `onegram`: the classical 1-gram frequency distance.
    Onegram,
}

impl Measure {
    /// Command-line spelling of the measure.
    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Assignment => "d2",
            Measure::Directed => "d3",
            Measure::Symmetric => "d4",
            Measure::Onegram => "onegram",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "d2" => Ok(Measure::Assignment),
            "d3" => Ok(Measure::Directed),
            "d4" => Ok(Measure::Symmetric),
            "onegram" => Ok(Measure::Onegram),
            other => Err(format!(
                "unknown measure '{other}' (expected d2, d3, d4, or onegram)"
            )),
        }
    }
}

/// A computed distance value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalDistance {
    pub value: f64,
    pub measure: Measure,
    pub lambda: Discount,
}

fn check_non_empty(t: &Text) -> Result<()> {
    if t.is_empty() {
        return Err(Error::EmptyText {
            id: t.id().to_owned(),
        });
    }
    Ok(())
}

/// Assignment-based distance (`d2`): the cheapest one-to-one matching of
/// positions, averaged over the length. Requires equal lengths; the table is
/// materialized, so the default size cap applies.
pub fn assignment_distance(a: &Text, b: &Text, d: Discount) -> Result<GlobalDistance> {
    check_non_empty(a)?;
    check_non_empty(b)?;
    if a.len() != b.len() {
        return Err(Error::UnequalLengths {
            len_a: a.len(),
            len_b: b.len(),
        });
    }
    let table = PositionMatchTable::compute_with_cap(a, b, d, DEFAULT_TABLE_CAP)?;
    let cost = CostMatrix::new(a.len(), table.values().to_vec())?;
    let (phi, _) = solve_assignment(&cost);
    // Re-sum in row order so domination against the row-minima average is
    // exact, not approximate.
    let total: f64 = (0..a.len()).map(|i| table.get(i, phi.apply(i))).sum();
    Ok(GlobalDistance {
        value: total / a.len() as f64,
        measure: Measure::Assignment,
        lambda: d,
    })
}

/// Exact-rational assignment distance at `lambda = 0`, where every table
/// entry is a 0/1 delta and the optimal total is an integer.
pub fn assignment_distance_zero_exact(a: &Text, b: &Text) -> Result<Ratio<u64>> {
    check_non_empty(a)?;
    check_non_empty(b)?;
    if a.len() != b.len() {
        return Err(Error::UnequalLengths {
            len_a: a.len(),
            len_b: b.len(),
        });
    }
    let table = PositionMatchTable::compute_with_cap(a, b, Discount::ZERO, DEFAULT_TABLE_CAP)?;
    let cost = CostMatrix::new(a.len(), table.values().to_vec())?;
    let (phi, _) = solve_assignment(&cost);
    let mismatches: u64 = (0..a.len())
        .filter(|&i| a.tokens()[i] != b.tokens()[phi.apply(i)])
        .count() as u64;
    Ok(Ratio::new(mismatches, a.len() as u64))
}

/// Directed distance (`d3`): mean over positions of `a` of the best scaled
/// match anywhere in `b`. Not symmetric.
pub fn directed_distance(a: &Text, b: &Text, d: Discount) -> Result<GlobalDistance> {
    check_non_empty(a)?;
    check_non_empty(b)?;
    let (xa, xb) = intern_pair(a, b);
    let (row_min, _) = minima_one(&xa, &xb, d.value());
    Ok(GlobalDistance {
        value: mean(&row_min),
        measure: Measure::Directed,
        lambda: d,
    })
}

/// Symmetrized distance (`d4`): the larger of the two directed distances.
/// Both directions come out of a single sweep, since the table seen from
/// `(b, a)` is the transpose of the one seen from `(a, b)`.
pub fn symmetric_distance(a: &Text, b: &Text, d: Discount) -> Result<GlobalDistance> {
    check_non_empty(a)?;
    check_non_empty(b)?;
    let (xa, xb) = intern_pair(a, b);
    let (row_min, col_min) = minima_one(&xa, &xb, d.value());
    Ok(GlobalDistance {
        value: mean(&row_min).max(mean(&col_min)),
        measure: Measure::Symmetric,
        lambda: d,
    })
}

/// Symmetrized distance for several discount factors over one pair,
/// interning the pair once. Returns one value per factor, in order.
pub fn symmetric_distance_sweep(a: &Text, b: &Text, lambdas: &[Discount]) -> Result<Vec<f64>> {
    check_non_empty(a)?;
    check_non_empty(b)?;
    let (xa, xb) = intern_pair(a, b);
    Ok(lambdas
        .iter()
        .map(|d| {
            let (row_min, col_min) = minima_one(&xa, &xb, d.value());
            mean(&row_min).max(mean(&col_min))
        })
        .collect())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
