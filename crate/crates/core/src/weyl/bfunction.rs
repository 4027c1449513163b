use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{fmt_q, lcm_denoms, Q};

/// Monic univariate polynomial in `s`, stored by its rational roots with
/// multiplicities and an optional monic residual factor without rational
/// roots (coefficients in increasing degree).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BFunction {
    roots: Vec<(Q, u32)>,
    residual: Option<Vec<Q>>,
}

impl BFunction {
    /// From roots with multiplicities; duplicates are merged.
    pub fn from_roots(roots: impl IntoIterator<Item = (Q, u32)>) -> BFunction {
        let mut merged: Vec<(Q, u32)> = Vec::new();
        for (r, m) in roots {
            if m == 0 {
                continue;
            }
            match merged.iter_mut().find(|(x, _)| *x == r) {
                Some(e) => e.1 += m,
                None => merged.push((r, m)),
            }
        }
        merged.sort_by(|a, b| b.0.cmp(&a.0));
        BFunction {
            roots: merged,
            residual: None,
        }
    }

    /// Each root of the set with multiplicity one.
    pub fn from_root_set(roots: impl IntoIterator<Item = Q>) -> BFunction {
        let mut v: Vec<Q> = roots.into_iter().collect();
        v.sort();
        v.dedup();
        BFunction::from_roots(v.into_iter().map(|r| (r, 1)))
    }

    /// Factors a monic polynomial given by coefficients in increasing
    /// degree, extracting rational roots with multiplicity.
    pub fn from_coeffs(coeffs: &[Q]) -> BFunction {
        let mut c: Vec<Q> = coeffs.to_vec();
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        let mut roots = Vec::new();
        while c.len() > 1 && c[0].is_zero() {
            c.remove(0);
            roots.push((Q::zero(), 1));
        }
        loop {
            if c.len() <= 1 {
                break;
            }
            match find_rational_root(&c) {
                Some(r) => {
                    c = deflate(&c, &r);
                    roots.push((r, 1));
                }
                None => break,
            }
        }
        let mut b = BFunction::from_roots(roots);
        if c.len() > 1 {
            let lead = c.last().expect("nonempty").clone();
            b.residual = Some(c.iter().map(|x| x / &lead).collect());
        }
        b
    }

    pub fn roots(&self) -> &[(Q, u32)] {
        &self.roots
    }

    /// Distinct roots in decreasing order.
    pub fn root_set(&self) -> Vec<Q> {
        self.roots.iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn residual(&self) -> Option<&[Q]> {
        self.residual.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.roots.iter().map(|(_, m)| *m as usize).sum::<usize>()
            + self.residual.as_ref().map_or(0, |r| r.len() - 1)
    }

    /// Coefficients in increasing degree.
    pub fn coeffs(&self) -> Vec<Q> {
        let mut c = self.residual.clone().unwrap_or_else(|| vec![Q::one()]);
        for (r, m) in &self.roots {
            for _ in 0..*m {
                // multiply by (s - r)
                let mut next = vec![Q::zero(); c.len() + 1];
                for (i, a) in c.iter().enumerate() {
                    next[i + 1] += a;
                    next[i] -= a * r;
                }
                c = next;
            }
        }
        c
    }

    pub fn eval(&self, s: &Q) -> Q {
        self.coeffs().iter().rev().fold(Q::zero(), |acc, a| acc * s + a)
    }

    pub fn integral_roots(&self) -> Vec<Q> {
        self.roots.iter().filter(|(r, _)| r.is_integer()).map(|(r, _)| r.clone()).collect()
    }

    /// Smallest integral root, if any rational root is integral.
    pub fn smallest_integral_root(&self) -> Option<Q> {
        self.integral_roots().into_iter().min()
    }

    pub fn multiplicity(&self, r: &Q) -> u32 {
        self.roots.iter().find(|(x, _)| x == r).map_or(0, |(_, m)| *m)
    }

    /// True when the residual factor is absent.
    pub fn fully_factored(&self) -> bool {
        self.residual.is_none()
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
        if d > BigInt::from(1_000_000) {
            break;
        }
    }
    out
}

fn eval(c: &[Q], x: &Q) -> Q {
    c.iter().rev().fold(Q::zero(), |acc, a| acc * x + a)
}

fn find_rational_root(c: &[Q]) -> Option<Q> {
    let l = lcm_denoms(c);
    let ints: Vec<BigInt> = c.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let ints: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
    let a0 = &ints[0];
    let an = ints.last().expect("nonempty");
    let mut candidates: Vec<Q> = Vec::new();
    for p in divisors(a0) {
        for q in divisors(an) {
            let r = Q::new(p.clone(), q.clone());
            candidates.push(-r.clone());
            candidates.push(r);
        }
    }
    candidates.sort_by(|a, b| b.cmp(a));
    candidates.dedup();
    candidates.into_iter().find(|r| eval(c, r).is_zero())
}

fn deflate(c: &[Q], r: &Q) -> Vec<Q> {
    // Synthetic division by (s - r).
    let n = c.len() - 1;
    let mut out = vec![Q::zero(); n];
    let mut carry = Q::zero();
    for i in (0..=n).rev() {
        let v = &c[i] + &carry * r;
        if i > 0 {
            out[i - 1] = v.clone();
        }
        carry = v;
    }
    out
}

fn fmt_factor(r: &Q) -> String {
    if r.is_zero() {
        "s".into()
    } else if r.is_negative() {
        format!("(s+{})", fmt_q(&-r))
    } else {
        format!("(s-{})", fmt_q(r))
    }
}

impl fmt::Display for BFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        for (r, m) in &self.roots {
            f.write_str(&fmt_factor(r))?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        if let Some(res) = &self.residual {
            let mut terms = Vec::new();
            for (i, c) in res.iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                let mono = match i {
                    0 => String::new(),
                    1 => "s".into(),
                    _ => format!("s^{i}"),
                };
                let coeff = if mono.is_empty() {
                    fmt_q(c)
                } else if c.is_one() {
                    String::new()
                } else {
                    format!("{}*", fmt_q(c))
                };
                terms.push(format!("{coeff}{mono}"));
            }
            write!(f, "({})", terms.join(" + "))?;
        }
        Ok(())
    }
}

/// Roots of `b(m f^(p s), s)` from those of `b(m f^s, s)`:
/// `{(r - i)/p : 0 <= i < p}`.
pub fn rescale_roots(roots: &[Q], p: u32) -> Vec<Q> {
    assert!(p >= 1, "rescaling needs p >= 1");
    let pq = Q::from_integer(p.into());
    let mut out: Vec<Q> = Vec::new();
    for r in roots {
        for i in 0..p {
            out.push((r - Q::from_integer(i.into())) / &pq);
        }
    }
    out.sort_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn factor_from_coefficients() {
        // (s+1)^2 (s+1/2) = s^3 + 5/2 s^2 + 2 s + 1/2
        let b = BFunction::from_coeffs(&[qr(1, 2), q(2), qr(5, 2), q(1)]);
        assert_eq!(b.roots(), &[(qr(-1, 2), 1), (q(-1), 2)]);
        assert!(b.fully_factored());
        assert_eq!(b.to_string(), "(s+1/2)(s+1)^2");
        assert_eq!(b.coeffs(), vec![qr(1, 2), q(2), qr(5, 2), q(1)]);
    }

    #[test]
    fn irrational_residual_is_kept() {
        // (s+1)(s^2 - 2)
        let b = BFunction::from_coeffs(&[q(-2), q(-2), q(1), q(1)]);
        assert_eq!(b.roots(), &[(q(-1), 1)]);
        assert_eq!(b.residual(), Some(&[q(-2), q(0), q(1)][..]));
        assert_eq!(b.degree(), 3);
    }

    #[test]
    fn rescaling() {
        assert_eq!(rescale_roots(&[q(-1)], 2), vec![qr(-1, 2), q(-1)]);
        assert_eq!(rescale_roots(&[q(-1), qr(-1, 2)], 1), vec![qr(-1, 2), q(-1)]);
        assert_eq!(
            rescale_roots(&[q(-1), qr(-1, 2)], 2),
            vec![qr(-1, 4), qr(-1, 2), qr(-3, 4), q(-1)]
        );
    }

    #[test]
    fn integral_roots() {
        let b = BFunction::from_root_set([q(-1), qr(-3, 2), q(-2)]);
        assert_eq!(b.smallest_integral_root(), Some(q(-2)));
    }
}
