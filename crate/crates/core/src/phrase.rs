//! Discounted position matching between two texts.
//!
//! The building block is the Kronecker delta of the two token sequences:
//! `delta(i, j)` is 0 when token `i` of `A` equals token `j` of `B` and 1
//! otherwise, with indices past either end counting as mismatches. The
//! *position match* at `(i, j)` discounts deltas along the diagonal,
//!
//! ```text
//! (1 - lambda) * sum_k lambda^k * delta(i+k, j+k)
//! ```
//!
//! so it is 0 for two identical infinite continuations and 1 when nothing
//! matches. All public values carry the `1 - lambda` scaling and lie in
//! [0, 1]. Because the texts are finite, the geometric tail past the shorter
//! remaining suffix is closed-form (`lambda^K` after scaling), never
//! truncated.
//!
//! Every entry of the table obeys the backward recurrence
//!
//! ```text
//! s(i, j) = (1 - lambda) * delta(i, j) + lambda * s(i+1, j+1)
//! ```
//!
//! with boundary value 1 past either end. Cells couple only along diagonals
//! (`j - i` constant), so one backward scan per diagonal evaluates the whole
//! table in `O(N_A * N_B)` time and, when only row or column minima are
//! needed, `O(N_A + N_B)` working memory.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::text::Text;

/// Geometric discounting factor, `0 <= lambda < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discount(f64);

impl Discount {
    pub fn new(lambda: f64) -> Result<Discount> {
        if lambda.is_finite() && (0.0..1.0).contains(&lambda) {
            Ok(Discount(lambda))
        } else {
            Err(Error::InvalidDiscount { value: lambda })
        }
    }

    /// Word-level matching only: no credit for longer shared phrases.
    pub const ZERO: Discount = Discount(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Discount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Kronecker delta of the two sequences: 0 if token `i` of `a` equals token
/// `j` of `b`, 1 otherwise. Indices are 0-based; anything past either end is
/// a mismatch by convention, not an error.
pub fn delta(a: &Text, b: &Text, i: usize, j: usize) -> u8 {
    if i < a.len() && j < b.len() && a.tokens()[i] == b.tokens()[j] {
        0
    } else {
        1
    }
}

fn check_in_range(a: &Text, b: &Text, i: usize, j: usize) -> Result<()> {
    if i >= a.len() || j >= b.len() {
        return Err(Error::IndexOutOfRange {
            i,
            j,
            rows: a.len(),
            cols: b.len(),
        });
    }
    Ok(())
}

/// Scaled position match from index pair `(i, j)`, in [0, 1].
///
/// Evaluated from the tail inward, exactly like the table recurrence, so the
/// two routes agree bit for bit.
pub fn position_match(a: &Text, b: &Text, i: usize, j: usize, d: Discount) -> Result<f64> {
    check_in_range(a, b, i, j)?;
    let lambda = d.value();
    let in_range = (a.len() - i).min(b.len() - j);
    let mut acc = 1.0; // closed-form tail: all deltas past the overlap are 1
    for k in (0..in_range).rev() {
        let miss = f64::from(delta(a, b, i + k, j + k));
        acc = (1.0 - lambda) * miss + lambda * acc;
    }
    Ok(acc)
}

/// Token ids shared by one pair of texts, for cheap equality tests in the
/// inner loops.
pub(crate) fn intern_pair(a: &Text, b: &Text) -> (Vec<u32>, Vec<u32>) {
    fn encode<'a>(ids: &mut HashMap<&'a str, u32>, text: &'a Text) -> Vec<u32> {
        text.tokens()
            .iter()
            .map(|t| {
                let next = ids.len() as u32;
                *ids.entry(t.as_str()).or_insert(next)
            })
            .collect()
    }
    let mut ids = HashMap::new();
    let xa = encode(&mut ids, a);
    let xb = encode(&mut ids, b);
    (xa, xb)
}

/// One backward scan per diagonal, folding the scaled match into per-row and
/// per-column minima.
pub(crate) fn minima_one(xa: &[u32], xb: &[u32], lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let (na, nb) = (xa.len(), xb.len());
    let mut row_min = vec![f64::INFINITY; na];
    let mut col_min = vec![f64::INFINITY; nb];
    let scale = 1.0 - lambda;
    for t in 0..na + nb - 1 {
        // Diagonals start along the first column (high row first), then
        // along the first row.
        let (i0, j0) = if t < na {
            (na - 1 - t, 0)
        } else {
            (0, t - na + 1)
        };
        let len = (na - i0).min(nb - j0);
        let sa = &xa[i0..i0 + len];
        let sb = &xb[j0..j0 + len];
        let rm = &mut row_min[i0..i0 + len];
        let cm = &mut col_min[j0..j0 + len];
        let mut acc = 1.0f64;
        for k in (0..len).rev() {
            let miss = if sa[k] != sb[k] { 1.0 } else { 0.0 };
            acc = scale * miss + lambda * acc;
            if acc < rm[k] {
                rm[k] = acc;
            }
            if acc < cm[k] {
                cm[k] = acc;
            }
        }
    }
    (row_min, col_min)
}

/// Per-row minima of the scaled position-match table, without materializing
/// it: `O(N_A * N_B)` time, `O(N_A + N_B)` working memory.
pub fn row_minima(a: &Text, b: &Text, d: Discount) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Err(Error::EmptyText {
            id: a.id().to_owned(),
        });
    }
    if b.is_empty() {
        return Err(Error::EmptyText {
            id: b.id().to_owned(),
        });
    }
    let (xa, xb) = intern_pair(a, b);
    Ok(minima_one(&xa, &xb, d.value()).0)
}

/// Materialization is refused above this many rows or columns unless a cap
/// is passed explicitly.
pub const DEFAULT_TABLE_CAP: usize = 2_000;

/// The full scaled position-match table. Intended for inspection and small
/// inputs; large pairs should go through the streaming minima instead.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionMatchTable {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl PositionMatchTable {
    /// Computes the table with the default size cap.
    pub fn compute(a: &Text, b: &Text, d: Discount) -> Result<PositionMatchTable> {
        Self::compute_with_cap(a, b, d, DEFAULT_TABLE_CAP)
    }

    /// Computes the table, refusing inputs larger than `cap` on either side.
    pub fn compute_with_cap(
        a: &Text,
        b: &Text,
        d: Discount,
        cap: usize,
    ) -> Result<PositionMatchTable> {
        if a.is_empty() {
            return Err(Error::EmptyText {
                id: a.id().to_owned(),
            });
        }
        if b.is_empty() {
            return Err(Error::EmptyText {
                id: b.id().to_owned(),
            });
        }
        let (rows, cols) = (a.len(), b.len());
        if rows > cap || cols > cap {
            return Err(Error::TableTooLarge { rows, cols, cap });
        }
        let (xa, xb) = intern_pair(a, b);
        let lambda = d.value();
        let scale = 1.0 - lambda;
        let mut values = vec![0.0f64; rows * cols];
        for t in 0..rows + cols - 1 {
            let (i0, j0) = if t < rows {
                (rows - 1 - t, 0)
            } else {
                (0, t - rows + 1)
            };
            let len = (rows - i0).min(cols - j0);
            let mut acc = 1.0f64;
            for k in (0..len).rev() {
                let (i, j) = (i0 + k, j0 + k);
                let miss = if xa[i] != xb[j] { 1.0 } else { 0.0 };
                acc = scale * miss + lambda * acc;
                values[i * cols + j] = acc;
            }
        }
        Ok(PositionMatchTable { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Scaled match at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "table index out of range");
        self.values[i * self.cols + j]
    }

    /// Row-major view of all entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Minimum of each row.
    pub fn row_minima(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.values[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }
}
