//! Exact two-phase simplex with Bland's rule, for small linear programs
//! in equality form.

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let k = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &k * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `obj . x` over the allowed columns, starting from the
    /// current basis. Returns `false` if unbounded.
    fn run(&mut self, obj: &[Q], allowed: usize) -> bool {
        loop {
            // Reduced costs.
            let m = self.rows.len();
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = obj[j].clone();
                for i in 0..m {
                    rc -= &obj[self.basis[i]] * &self.rows[i][j];
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let rhs = self.width - 1;
            let mut best: Option<(Q, usize, usize)> = None;
            for i in 0..m {
                if self.rows[i][c].is_positive() {
                    let ratio = &self.rows[i][rhs] / &self.rows[i][c];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                Some((_, r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Maximizes `c . x` subject to `A x = b`, `x >= 0`.
pub fn maximize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpResult {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<Q> = row
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        r.resize(n, Q::zero());
        for k in 0..m {
            r.push(if k == i { Q::one() } else { Q::zero() });
        }
        r.push(if flip { -bi } else { bi.clone() });
        rows.push(r);
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        width,
    };
    let mut phase1 = vec![Q::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = Q::one();
    }
    t.run(&phase1, n + m);
    let infeas: Q = (0..m)
        .filter(|&i| t.basis[i] >= n)
        .map(|i| t.rows[i][width - 1].clone())
        .sum();
    if !infeas.is_zero() {
        return LpResult::Infeasible;
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.rows[i][j].is_zero() && !t.basis.contains(&j)) {
                t.pivot(i, j);
            }
        }
    }
    // Drop redundant rows still carried by artificials.
    let keep: Vec<usize> = (0..m).filter(|&i| t.basis[i] < n).collect();
    t.rows = keep.iter().map(|&i| t.rows[i].clone()).collect();
    t.basis = keep.iter().map(|&i| t.basis[i]).collect();
    let mut obj: Vec<Q> = c.iter().map(|v| -v).collect();
    obj.resize(n + m, Q::zero());
    if !t.run(&obj, n) {
        return LpResult::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rows[i][width - 1].clone();
        }
    }
    let value = x.iter().zip(c).map(|(a, b)| a * b).sum();
    LpResult::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn small_program() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![
            vec![q(1), q(2), q(1), q(0)],
            vec![q(3), q(1), q(0), q(1)],
        ];
        let r = maximize(&a, &[q(4), q(6)], &[q(1), q(1), q(0), q(0)]);
        match r {
            LpResult::Optimal { x, value } => {
                assert_eq!(value, qr(14, 5));
                assert_eq!(&x[..2], &[qr(8, 5), qr(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![q(1), q(1)]];
        assert_eq!(maximize(&a, &[q(-1)], &[q(1), q(0)]), LpResult::Infeasible);
        let a = vec![vec![q(1), q(-1)]];
        assert_eq!(maximize(&a, &[q(1)], &[q(1), q(0)]), LpResult::Unbounded);
    }
}
