//! Exact dense linear assignment by shortest augmenting paths.
//!
//! Rows are inserted one at a time; each insertion runs a Dijkstra search
//! over reduced costs `c[i][j] - u[i] - v[j]` to find the cheapest
//! augmenting path, then updates the dual potentials so that reduced costs
//! stay nonnegative. This is the Jonker–Volgenant scheme without the
//! column-reduction and auction warm starts; total cost is `O(n^3)`.

use crate::{Error, Result};

/// Row-major square cost matrix.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::SizeMismatch {
                left: data.len(),
                right: n * n,
            });
        }
        if let Some(&bad) = data.iter().find(|c| !c.is_finite()) {
            return Err(Error::OutOfRange {
                name: "cost",
                value: bad,
                range: "finite",
            });
        }
        Ok(CostMatrix { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let data = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        Self::new(n, data)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `sum_i c[i][perm[i]]`, accumulated in row order.
    pub fn cost_of(&self, perm: &[usize]) -> f64 {
        perm.iter().enumerate().map(|(i, &j)| self.get(i, j)).sum()
    }
}

/// An optimal assignment: row `i` is matched to column `col_for_row[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub col_for_row: Vec<usize>,
    pub cost: f64,
}

const NONE: usize = usize::MAX;

/// Solves `min_perm sum_i c[i][perm[i]]`.
pub fn solve(cost: &CostMatrix) -> Assignment {
    let n = cost.size();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut col_for_row = vec![NONE; n];
    let mut row_for_col = vec![NONE; n];

    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NONE; n];
    let mut scanned_col = vec![false; n];
    let mut visited_rows: Vec<usize> = Vec::with_capacity(n);
    let mut frontier: Vec<usize> = Vec::with_capacity(n);

    for start in 0..n {
        dist.fill(f64::INFINITY);
        pred.fill(NONE);
        scanned_col.fill(false);
        visited_rows.clear();
        frontier.clear();
        frontier.extend(0..n);

        let mut row = start;
        let mut base = 0.0;
        let sink;
        loop {
            visited_rows.push(row);
            let ui = u[row];
            let crow = cost.row(row);
            let mut best = f64::INFINITY;
            let mut best_pos = NONE;
            for (pos, &j) in frontier.iter().enumerate() {
                let reduced = base + crow[j] - ui - v[j];
                if reduced < dist[j] {
                    dist[j] = reduced;
                    pred[j] = row;
                }
                // Prefer a free column among equally short candidates.
                if dist[j] < best || (dist[j] == best && row_for_col[j] == NONE) {
                    best = dist[j];
                    best_pos = pos;
                }
            }
            let j = frontier.swap_remove(best_pos);
            scanned_col[j] = true;
            base = best;
            if row_for_col[j] == NONE {
                sink = j;
                break;
            }
            row = row_for_col[j];
        }

        // Dual update keeps reduced costs nonnegative and tight on the path.
        u[start] += base;
        for &i in &visited_rows[1..] {
            u[i] += base - dist[col_for_row[i]];
        }
        for j in 0..n {
            if scanned_col[j] {
                v[j] -= base - dist[j];
            }
        }

        let mut j = sink;
        loop {
            let i = pred[j];
            row_for_col[j] = i;
            let prev = std::mem::replace(&mut col_for_row[i], j);
            if i == start {
                break;
            }
            j = prev;
        }
    }

    let total = cost.cost_of(&col_for_row);
    Assignment {
        col_for_row,
        cost: total,
    }
}
