//! Exact minimum-cost assignment on a square cost matrix.
//!
//! The solver is the shortest-augmenting-path formulation with dual
//! potentials, `O(n^3)` overall: one Dijkstra-style phase per row, each
//! phase `O(n^2)`. Only the optimal total is contractual; which optimal
//! permutation is returned among ties is not.

use crate::error::{Error, Result};

/// Square matrix of finite, non-negative costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    values: Vec<f64>,
}

impl CostMatrix {
    /// Validates squareness and entry domain. `values` is row-major and
    /// must hold exactly `n * n` entries.
    pub fn new(n: usize, values: Vec<f64>) -> Result<CostMatrix> {
        if values.len() != n * n {
            return Err(Error::NotSquare {
                entries: values.len(),
                n,
            });
        }
        for (idx, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidCost {
                    i: idx / n,
                    j: idx % n,
                    value: v,
                });
            }
        }
        Ok(CostMatrix { n, values })
    }

    /// Builds from square nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<CostMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                entries: rows.iter().map(Vec::len).sum(),
                n,
            });
        }
        Self::new(n, rows.concat())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// A bijection on `0..n`, mapping row index to column index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Accepts `mapping` if every column appears exactly once.
    pub fn new(mapping: Vec<usize>) -> Option<Permutation> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &j in &mapping {
            if j >= n || seen[j] {
                return None;
            }
            seen[j] = true;
        }
        Some(Permutation(mapping))
    }

    /// Column assigned to `row`.
    pub fn apply(&self, row: usize) -> usize {
        self.0[row]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Total cost of `phi` on `c`, summed in row order.
fn total_cost(c: &CostMatrix, phi: &Permutation) -> f64 {
    (0..c.size()).map(|i| c.get(i, phi.apply(i))).sum()
}

/// Finds a minimum-cost perfect matching and its total.
pub fn solve_assignment(c: &CostMatrix) -> (Permutation, f64) {
    let n = c.size();
    if n == 0 {
        return (Permutation(Vec::new()), 0.0);
    }
    // Dual potentials for rows and columns; index n is a sentinel column
    // through which each augmenting search is rooted.
    let mut row_potential = vec![0.0f64; n + 1];
    let mut col_potential = vec![0.0f64; n + 1];
    // matched_row[j] = row currently assigned to column j, or n if free.
    let mut matched_row = vec![n; n + 1];
    let mut previous_col = vec![0usize; n + 1];

    for row in 0..n {
        matched_row[n] = row;
        let mut j0 = n;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut visited = vec![false; n + 1];
        // Grow an alternating tree until a free column is reached.
        loop {
            visited[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = n;
            for j in 0..n {
                if visited[j] {
                    continue;
                }
                let reduced = c.get(i0, j) - row_potential[i0] - col_potential[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    previous_col[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if visited[j] {
                    row_potential[matched_row[j]] += delta;
                    col_potential[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == n {
                break;
            }
        }
        // Augment along the recorded path.
        while j0 != n {
            let j1 = previous_col[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
        }
    }

    let mut mapping = vec![0usize; n];
    for j in 0..n {
        mapping[matched_row[j]] = j;
    }
    let phi = Permutation::new(mapping).expect("solver produces a bijection");
    let total = total_cost(c, &phi);
    (phi, total)
}

/// Largest size accepted by [`brute_force_assignment`].
pub const BRUTE_FORCE_MAX: usize = 8;

/// Exhaustive search over all `n!` permutations; the test oracle for the
/// solver. Refuses `n > 8`.
pub fn brute_force_assignment(c: &CostMatrix) -> Result<(Permutation, f64)> {
    let n = c.size();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::ExhaustiveSearchTooLarge {
            n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let mut current: Vec<usize> = (0..n).collect();
    let mut best = current.clone();
    let mut best_total = sum_for(c, &current);
    // Heap's algorithm enumerates the remaining permutations in place.
    let mut stack = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            if i % 2 == 0 {
                current.swap(0, i);
            } else {
                current.swap(stack[i], i);
            }
            let total = sum_for(c, &current);
            if total < best_total {
                best_total = total;
                best.copy_from_slice(&current);
            }
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    let phi = Permutation::new(best).expect("permutation by construction");
    Ok((phi, best_total))
}

fn sum_for(c: &CostMatrix, mapping: &[usize]) -> f64 {
    mapping.iter().enumerate().map(|(i, &j)| c.get(i, j)).sum()
}
