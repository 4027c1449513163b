//! Sparse multivariate polynomials over Q in a declared ring of typed
//! variables.

mod calculus;
pub mod parse;
mod ring;
mod weights;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

pub use calculus::{jacobian, minor_det, Matrix};
pub use parse::{parse_expr, parse_factors, parse_poly, Expr, ExprKind};
pub use ring::{Ring, VarClass, VarId};
pub use weights::{detect_weights, WeightSystem};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, q, Q};

/// Dense exponent vector, one entry per ring variable.
pub type Exp = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: Arc<Ring>,
    terms: BTreeMap<Exp, Q>,
}

impl Poly {
    pub fn zero(ring: &Arc<Ring>) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: Q) -> Poly {
        let mut p = Poly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(vec![0; ring.nvars()], c);
        }
        p
    }

    pub fn one(ring: &Arc<Ring>) -> Poly {
        Poly::constant(ring, Q::one())
    }

    pub fn int(ring: &Arc<Ring>, n: i64) -> Poly {
        Poly::constant(ring, q(n))
    }

    /// The `i`-th variable of the ring.
    pub fn var(ring: &Arc<Ring>, i: usize) -> Poly {
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Poly::monomial(ring, e, Q::one())
    }

    /// The variable with the given name.
    pub fn named(ring: &Arc<Ring>, name: &str) -> Result<Poly> {
        let i = ring.index_of(name).ok_or_else(|| Error::UnknownVariable {
            name: name.to_string(),
            pos: 0,
        })?;
        Ok(Poly::var(ring, i))
    }

    pub fn monomial(ring: &Arc<Ring>, exp: Exp, c: Q) -> Poly {
        assert_eq!(exp.len(), ring.nvars(), "exponent length mismatch");
        let mut p = Poly::zero(ring);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// Builds a polynomial from terms, merging duplicates and dropping zeros.
    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Exp, Q)>) -> Poly {
        let mut p = Poly::zero(ring);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Exp, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Exp, Q> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }

    /// Coefficient of the exponent vector.
    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.ring.nvars()])
    }

    /// True when the germ at the origin is a unit.
    pub fn is_unit_at_origin(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Total degree; `-1` for zero.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as i64).sum())
            .max()
            .unwrap_or(-1)
    }

    /// Smallest total degree of a term; `-1` for zero.
    pub fn order(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as i64).sum())
            .min()
            .unwrap_or(-1)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Sum of the terms of the given total degree.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Indices of variables occurring in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub fn uses_only(&self, vars: &[usize]) -> bool {
        self.support_vars().iter().all(|i| vars.contains(i))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub(crate) fn add_term(&mut self, e: Exp, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a * c))
                .collect(),
        }
    }

    /// Multiplies by the monomial `c * x^e`.
    pub fn mul_term(&self, e: &[u32], c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(f, a)| (f.iter().zip(e).map(|(x, y)| x + y).collect(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Poly {
        let mut p = Poly::zero(&self.ring);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.add_term(f, c * Q::from_integer(e[i].into()));
            }
        }
        p
    }

    /// Substitutes `value` for variable `i`.
    pub fn subst(&self, i: usize, value: &Poly) -> Poly {
        assert!(Arc::ptr_eq(&self.ring, &value.ring) || self.ring == value.ring);
        let mut by_power: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f[i];
            f[i] = 0;
            by_power
                .entry(k)
                .or_insert_with(|| Poly::zero(&self.ring))
                .add_term(f, c.clone());
        }
        let mut out = Poly::zero(&self.ring);
        let mut power = Poly::one(&self.ring);
        let mut current = 0;
        for (k, part) in by_power {
            while current < k {
                power = &power * value;
                current += 1;
            }
            out = &out + &(&part * &power);
        }
        out
    }

    /// Simultaneous substitution of every variable `j` by `values[j]`,
    /// possibly into another ring.
    pub fn compose(&self, target: &Arc<Ring>, values: &[Poly]) -> Poly {
        assert_eq!(values.len(), self.ring.nvars());
        let mut out = Poly::zero(target);
        let mut cache: Vec<Vec<Poly>> = values.iter().map(|v| vec![Poly::one(target), v.clone()]).collect();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (j, &d) in e.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                while cache[j].len() <= d as usize {
                    let next = &cache[j][cache[j].len() - 1] * &values[j];
                    cache[j].push(next);
                }
                t = &t * &cache[j][d as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Evaluates at rational values for every variable.
    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.ring.nvars());
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &d) in point.iter().zip(e) {
                for _ in 0..d {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-expresses the polynomial in `target`, matching variables by name.
    pub fn embed(&self, target: &Arc<Ring>) -> Result<Poly> {
        let map: Vec<Option<usize>> = self
            .ring
            .vars()
            .iter()
            .map(|v| target.index_of(&v.name))
            .collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut f = vec![0; target.nvars()];
            for (i, &d) in e.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => f[j] = d,
                    None => {
                        return Err(Error::Ring(format!(
                            "variable `{}` missing from target ring",
                            self.ring.var(i).name
                        )))
                    }
                }
            }
            out.add_term(f, c.clone());
        }
        Ok(out)
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero(&self.ring));
        }
        // Division by lex leading terms terminates and is exact iff remainder is 0.
        let (dle, dlc) = d.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.ring);
        while let Some((e, c)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&dle).any(|(a, b)| a < b) {
                return None;
            }
            let m: Exp = e.iter().zip(&dle).map(|(a, b)| a - b).collect();
            let k = c / &dlc;
            rem = &rem - &d.mul_term(&m, &k);
            quot.add_term(m, k);
        }
        Some(quot)
    }

    /// Makes the coefficient of the lex-largest term equal to one.
    pub fn monic(&self) -> Poly {
        match self.terms.iter().next_back() {
            Some((_, c)) => self.scale(&(Q::one() / c)),
            None => self.clone(),
        }
    }

    /// Multiplies by the lcm of denominators and divides by the content,
    /// so coefficients are coprime integers with positive leading sign.
    pub fn primitive(&self) -> Poly {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let l = crate::rational::lcm_denoms(self.terms.values());
        let scaled = self.scale(&Q::from_integer(l));
        let g = scaled
            .terms
            .values()
            .fold(num_bigint::BigInt::zero(), |acc, c| acc.gcd(c.numer()));
        let mut out = scaled.scale(&(Q::one() / Q::from_integer(g)));
        if out.terms.iter().next_back().is_some_and(|(_, c)| c.is_negative()) {
            out = -&out;
        }
        out
    }

    /// Terms sorted for display: total degree descending, then exponent
    /// vector descending.
    pub fn sorted_terms(&self) -> Vec<(&Exp, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        v
    }

    /// Splits into coefficients of powers of variable `i`.
    pub fn coefficients_in(&self, i: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f[i];
            f[i] = 0;
            out.entry(k)
                .or_insert_with(|| Poly::zero(&self.ring))
                .add_term(f, c.clone());
        }
        out
    }
}

pub(crate) fn fmt_monomial(ring: &Ring, e: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &d) in e.iter().enumerate() {
        match d {
            0 => {}
            1 => parts.push(ring.var(i).name.clone()),
            _ => parts.push(format!("{}^{}", ring.var(i).name, d)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let constant = e.iter().all(|&d| d == 0);
            if constant {
                f.write_str(&fmt_q(&a))?;
            } else if a.is_one() {
                f.write_str(&fmt_monomial(&self.ring, e))?;
            } else {
                write!(f, "{}*{}", fmt_q(&a), fmt_monomial(&self.ring, e))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (e, c) in &small.terms {
            big.add_term(e.clone(), c.clone());
        }
        big
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    // exponents add when monomials multiply
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(&self.ring);
        for (e, c) in &self.terms {
            for (f, d) in &rhs.terms {
                let g: Exp = e.iter().zip(f).map(|(a, b)| a + b).collect();
                out.add_term(g, c * d);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Product of a list of polynomials (one for the empty list).
pub fn product(ring: &Arc<Ring>, ps: &[Poly]) -> Poly {
    ps.iter().fold(Poly::one(ring), |acc, p| &acc * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn r3() -> Arc<Ring> {
        Ring::standard(3)
    }

    #[test]
    fn display_is_canonical() {
        let r = r3();
        let p = parse_poly("x2 - 3/2*x1*x3 + x1^2 + 1", &r).unwrap();
        assert_eq!(p.to_string(), "x1^2 - 3/2*x1*x3 + x2 + 1");
        assert_eq!(Poly::zero(&r).to_string(), "0");
        assert_eq!((-&Poly::var(&r, 0)).to_string(), "-x1");
    }

    #[test]
    fn derivative_and_substitution() {
        let r = r3();
        let p = parse_poly("x1^3*x2 + x2^2", &r).unwrap();
        assert_eq!(p.diff(0), parse_poly("3*x1^2*x2", &r).unwrap());
        let x2x3 = parse_poly("x2*x3", &r).unwrap();
        let g = parse_poly("x1^3 + x2^4", &r).unwrap();
        assert_eq!(
            g.subst(0, &x2x3),
            parse_poly("x2^3*x3^3 + x2^4", &r).unwrap()
        );
    }

    #[test]
    fn exact_division() {
        let r = r3();
        let a = parse_poly("x1 - x2*x3", &r).unwrap();
        let b = parse_poly("x1^3 + x2^4", &r).unwrap();
        assert_eq!((&a * &b).div_exact(&a), Some(b.clone()));
        assert_eq!(b.div_exact(&a), None);
    }

    #[test]
    fn primitive_clears_denominators() {
        let r = r3();
        let p = parse_poly("1/2*x1 - 3/4*x2", &r).unwrap();
        assert_eq!(p.primitive(), parse_poly("2*x1 - 3*x2", &r).unwrap());
        assert_eq!(p.scale(&qr(-4, 1)).primitive(), p.primitive());
    }

    #[test]
    fn compose_into_other_ring() {
        let r = Ring::standard(2);
        let t = Ring::base(&["t"]).unwrap();
        let p = parse_poly("x1^2 - x2", &r).unwrap();
        let tt = Poly::var(&t, 0);
        let vals = [tt.clone(), tt.pow(2)];
        assert!(p.compose(&t, &vals).is_zero());
    }
}
