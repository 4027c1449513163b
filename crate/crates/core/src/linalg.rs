//! Exact sparse Gaussian elimination over Q.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Q;

/// Sparse row: `(column, value)` pairs with strictly increasing columns and
/// no zero values.
pub type SparseRow = Vec<(usize, Q)>;

pub fn sparse_from_map(m: BTreeMap<usize, Q>) -> SparseRow {
    m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// `a - k*b`.
fn axpy(a: &SparseRow, k: &Q, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(k * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - k * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental row echelon form. Each stored row has a distinct leading
/// column; rows are inserted in the order given, reducing by existing
/// pivots from the left.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` by the stored pivots until its leading column is free.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        loop {
            let Some((c, v)) = row.first().cloned() else {
                return row;
            };
            match self.pivots.get(&c) {
                Some(p) => {
                    let k = v / &p[0].1;
                    row = axpy(&row, &k, p);
                }
                None => return row,
            }
        }
    }

    /// Inserts a row; returns `false` if it reduced to zero.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let r = self.reduce(row);
        match r.first() {
            Some((c, _)) => {
                let c = *c;
                self.pivots.insert(c, r);
                true
            }
            None => false,
        }
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = &usize> {
        self.pivots.keys()
    }

    /// Back substitution with free variables set to zero. `ncols` counts
    /// the unknowns; column `ncols` holds the right-hand side. Returns
    /// `None` if some row is `0 = c` with `c != 0`.
    pub fn back_substitute(&self, ncols: usize) -> Option<Vec<Q>> {
        let mut x = vec![Q::zero(); ncols];
        for (&c, row) in self.pivots.iter().rev() {
            if c == ncols {
                return None;
            }
            let mut acc = Q::zero();
            for (j, v) in &row[1..] {
                if *j == ncols {
                    acc += v;
                } else {
                    acc -= v * &x[*j];
                }
            }
            x[c] = acc / &row[0].1;
        }
        Some(x)
    }
}

/// Solves `A x = b` for sparse rows of `A`; free variables are zero.
pub fn solve_sparse(rows: &[SparseRow], rhs: &[Q], ncols: usize) -> Option<Vec<Q>> {
    let mut ech = Echelon::new();
    for (row, b) in rows.iter().zip(rhs) {
        let mut r = row.clone();
        if !b.is_zero() {
            r.push((ncols, b.clone()));
        }
        ech.insert(r);
    }
    ech.back_substitute(ncols)
}

fn dense_to_sparse(row: &[Q]) -> SparseRow {
    row.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| (j, v.clone()))
        .collect()
}

/// Solves a dense system `A x = b`; free variables are zero.
pub fn solve_dense(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let ncols = a.first().map_or(0, Vec::len);
    let rows: Vec<SparseRow> = a.iter().map(|r| dense_to_sparse(r)).collect();
    solve_sparse(&rows, b, ncols)
}

pub fn rank_dense(a: &[Vec<Q>]) -> usize {
    let mut ech = Echelon::new();
    for r in a {
        ech.insert(dense_to_sparse(r));
    }
    ech.rank()
}

/// Basis of the right nullspace of a dense matrix.
pub fn nullspace_dense(a: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut ech = Echelon::new();
    for r in a {
        ech.insert(dense_to_sparse(r));
    }
    let pivots: Vec<usize> = ech.pivot_columns().copied().collect();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        // Fix the free variable to one, others free to zero, and solve.
        let mut x = vec![Q::zero(); ncols];
        x[free] = Q::one();
        for (&c, row) in ech.pivots.iter().rev() {
            let mut acc = Q::zero();
            for (j, v) in &row[1..] {
                acc -= v * &x[*j];
            }
            x[c] = acc / &row[0].1;
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
    }

    #[test]
    fn solves_square_system() {
        let a = m(&[&[1, 2], &[2, 1]]);
        let x = solve_dense(&a, &[q(1), q(1)]).unwrap();
        assert_eq!(x, vec![qr(1, 3), qr(1, 3)]);
    }

    #[test]
    fn detects_inconsistency() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve_dense(&a, &[q(1), q(3)]).is_none());
        assert_eq!(solve_dense(&a, &[q(1), q(2)]).unwrap(), vec![q(1), q(0)]);
    }

    #[test]
    fn nullspace_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank_dense(&a), 1);
        let ns = nullspace_dense(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &a {
                let s: Q = row.iter().zip(&v).map(|(x, y)| x * y).sum();
                assert!(s.is_zero());
            }
        }
    }
}
