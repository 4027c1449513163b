use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Poly, Ring, VarClass};
use crate::linalg::solve_dense;
use crate::lp::{maximize, LpResult};
use crate::rational::{fmt_q, Q};

/// Positive weights on the base variables and a positive degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    /// One weight per base variable, in ring order.
    pub alpha: Vec<Q>,
    pub d: Q,
}

impl WeightSystem {
    pub fn new(alpha: Vec<Q>, d: Q) -> Option<Self> {
        (alpha.iter().all(Signed::is_positive) && d.is_positive()).then_some(WeightSystem { alpha, d })
    }

    /// Weighted degree of an exponent vector of the ring.
    pub fn weight(&self, ring: &Ring, e: &[u32]) -> Q {
        ring.base_indices()
            .iter()
            .zip(&self.alpha)
            .map(|(&i, a)| a * Q::from_integer(e[i].into()))
            .sum()
    }

    pub fn sum_alpha(&self) -> Q {
        self.alpha.iter().sum()
    }

    /// True if every term of `f` has weighted degree `d`.
    pub fn is_homogeneous(&self, f: &Poly) -> bool {
        !f.is_zero() && f.terms().keys().all(|e| self.weight(f.ring(), e) == self.d)
    }

    /// True if all weights are equal.
    pub fn is_uniform(&self) -> bool {
        self.alpha.windows(2).all(|w| w[0] == w[1])
    }

    /// Scales so that `d = 1`.
    pub fn normalized(&self) -> WeightSystem {
        let k = Q::one() / &self.d;
        WeightSystem {
            alpha: self.alpha.iter().map(|a| a * &k).collect(),
            d: Q::one(),
        }
    }
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.alpha.iter().map(fmt_q).collect();
        write!(f, "alpha=({}), d={}", a.join(","), fmt_q(&self.d))
    }
}

/// Weights making `f` weighted homogeneous of degree 1 in the given
/// coordinates, if any.
///
/// The least-norm solution of the degree equations is returned when it is
/// strictly positive; otherwise a simplex vertex maximizing the smallest
/// weight. Variables not occurring in `f` get weight 1.
pub fn detect_weights(f: &Poly) -> Option<WeightSystem> {
    if f.is_zero() {
        return None;
    }
    let ring = f.ring();
    let base = ring.base_indices();
    if f.support_vars().iter().any(|&i| ring.var(i).class != VarClass::Base) {
        return None;
    }
    let support: Vec<usize> = base
        .iter()
        .copied()
        .filter(|&i| f.terms().keys().any(|e| e[i] > 0))
        .collect();
    if support.is_empty() {
        return None;
    }
    let rows: Vec<Vec<Q>> = f
        .terms()
        .keys()
        .map(|e| support.iter().map(|&i| Q::from_integer(e[i].into())).collect())
        .collect();
    let m = rows.len();
    let k = support.len();
    let ones = vec![Q::one(); m];
    // Gram system (A A^T) y = 1, alpha = A^T y.
    let gram: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let y = solve_dense(&gram, &ones)?;
    let least: Vec<Q> = (0..k)
        .map(|c| (0..m).map(|r| &rows[r][c] * &y[r]).sum())
        .collect();
    // Consistency of A alpha = 1 itself.
    if rows
        .iter()
        .any(|r| r.iter().zip(&least).map(|(a, b)| a * b).sum::<Q>() != Q::one())
    {
        return None;
    }
    let chosen = if least.iter().all(Signed::is_positive) {
        least
    } else {
        // alpha = beta + t*1 with beta >= 0, maximize t.
        let mut a = Vec::with_capacity(m);
        for r in &rows {
            let mut row = r.clone();
            row.push(r.iter().sum());
            a.push(row);
        }
        let mut c = vec![Q::zero(); k];
        c.push(Q::one());
        match maximize(&a, &ones, &c) {
            LpResult::Optimal { x, value } if value.is_positive() => {
                (0..k).map(|i| &x[i] + &value).collect()
            }
            _ => return None,
        }
    };
    let mut alpha = vec![Q::one(); base.len()];
    for (s, w) in support.iter().zip(chosen) {
        let pos = base.iter().position(|b| b == s).expect("support is base");
        alpha[pos] = w;
    }
    WeightSystem::new(alpha, Q::one())
}
