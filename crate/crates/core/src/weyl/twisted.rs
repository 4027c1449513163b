use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::op::WeylOp;
use crate::error::{Error, Result};
use crate::poly::{Exp, Poly, Ring};
use crate::rational::Q;

/// The section `N(x, s) f^s / (f^a * prod g_i^e_i)` of `O[1/fg, s] f^s`.
///
/// When `f` is constant the twist is trivial and no parameter is needed.
#[derive(Clone)]
pub struct TwistedElem {
    ring: Arc<Ring>,
    s: Option<usize>,
    num: Poly,
    f: Poly,
    f_exp: u32,
    bases: Vec<(Poly, u32)>,
}

impl TwistedElem {
    /// `num * f^s / (f^f_exp * prod g^e)`. `s` is the ring position of the
    /// parameter; required when `f` is not constant.
    pub fn new(num: Poly, f: Poly, f_exp: u32, bases: Vec<(Poly, u32)>, s: Option<usize>) -> Result<TwistedElem> {
        if f.is_zero() || bases.iter().any(|(g, _)| g.is_zero()) {
            return Err(Error::Precondition("zero base in twisted element".into()));
        }
        if !f.is_constant() && s.is_none() {
            return Err(Error::Precondition("twisting by a nonconstant germ needs the parameter s".into()));
        }
        let ring = num.ring().clone();
        let mut e = TwistedElem {
            ring,
            s,
            num,
            f,
            f_exp,
            bases,
        };
        e.normalize();
        Ok(e)
    }

    /// `m * f^(s+k)` with `m = 1 / prod g_i^e_i`.
    pub fn power(f: &Poly, k: u32, bases: Vec<(Poly, u32)>, s: usize) -> Result<TwistedElem> {
        TwistedElem::new(f.pow(k), f.clone(), 0, bases, Some(s))
    }

    /// A rational function `num / prod g^e` without twist.
    pub fn rational(num: Poly, bases: Vec<(Poly, u32)>) -> Result<TwistedElem> {
        let one = Poly::one(num.ring());
        TwistedElem::new(num, one, 0, bases, None)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn f_exp(&self) -> u32 {
        self.f_exp
    }

    pub fn bases(&self) -> &[(Poly, u32)] {
        &self.bases
    }

    pub fn s_index(&self) -> Option<usize> {
        self.s
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels factors of the denominator dividing the numerator.
    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.f_exp = 0;
            for b in self.bases.iter_mut() {
                b.1 = 0;
            }
            return;
        }
        if self.f.is_constant() {
            self.f_exp = 0;
        }
        while self.f_exp > 0 {
            match self.num.div_exact(&self.f) {
                Some(q) => {
                    self.num = q;
                    self.f_exp -= 1;
                }
                None => break,
            }
        }
        for k in 0..self.bases.len() {
            while self.bases[k].1 > 0 {
                match self.num.div_exact(&self.bases[k].0) {
                    Some(q) => {
                        self.num = q;
                        self.bases[k].1 -= 1;
                    }
                    None => break,
                }
            }
        }
    }

    fn same_frame(&self, other: &TwistedElem) -> bool {
        self.f == other.f
            && self.s == other.s
            && self.bases.len() == other.bases.len()
            && self.bases.iter().zip(&other.bases).all(|(a, b)| a.0 == b.0)
    }

    /// Derivative by the base variable at ring position `j`.
    pub fn diff(&self, j: usize) -> TwistedElem {
        if self.num.is_zero() {
            return self.clone();
        }
        let ring = &self.ring;
        let active: Vec<usize> = (0..self.bases.len()).filter(|&k| self.bases[k].1 > 0).collect();
        let g_all = active
            .iter()
            .fold(Poly::one(ring), |acc, &k| &acc * &self.bases[k].0);
        let twisted = !self.f.is_constant();
        let mut num = &self.num.diff(j) * &g_all;
        if twisted {
            num = &num * &self.f;
            let s = Poly::var(ring, self.s.expect("parameter checked at construction"));
            let s_minus_a = &s - &Poly::constant(ring, Q::from_integer(self.f_exp.into()));
            num = &num + &(&(&self.num * &s_minus_a) * &(&self.f.diff(j) * &g_all));
        }
        for &k in &active {
            let (g, e) = &self.bases[k];
            let others = active
                .iter()
                .filter(|&&l| l != k)
                .fold(Poly::one(ring), |acc, &l| &acc * &self.bases[l].0);
            let mut t = &(&self.num * &g.diff(j)) * &others;
            t = t.scale(&Q::from_integer((*e).into()));
            if twisted {
                t = &t * &self.f;
            }
            num = &num - &t;
        }
        let mut out = TwistedElem {
            ring: ring.clone(),
            s: self.s,
            num,
            f: self.f.clone(),
            f_exp: if twisted { self.f_exp + 1 } else { 0 },
            bases: self
                .bases
                .iter()
                .map(|(g, e)| (g.clone(), if *e > 0 { e + 1 } else { 0 }))
                .collect(),
        };
        out.normalize();
        out
    }

    pub fn mul_poly(&self, c: &Poly) -> TwistedElem {
        let mut out = self.clone();
        out.num = &self.num * c;
        out.normalize();
        out
    }

    /// Rewrites over the denominator `f^a * prod g^e` with exponents at
    /// least the current ones.
    pub(crate) fn lift_to(&self, a: u32, es: &[u32]) -> Poly {
        let mut num = &self.num * &self.f.pow(a - self.f_exp);
        for ((g, e), &target) in self.bases.iter().zip(es) {
            num = &num * &g.pow(target - e);
        }
        num
    }

    /// Sum of elements in the same frame (same `f` and base list).
    pub fn add(&self, other: &TwistedElem) -> Result<TwistedElem> {
        if !self.same_frame(other) {
            return Err(Error::Precondition("adding twisted elements with different bases".into()));
        }
        let a = self.f_exp.max(other.f_exp);
        let es: Vec<u32> = self.bases.iter().zip(&other.bases).map(|(x, y)| x.1.max(y.1)).collect();
        let num = &self.lift_to(a, &es) + &other.lift_to(a, &es);
        let mut out = TwistedElem {
            ring: self.ring.clone(),
            s: self.s,
            num,
            f: self.f.clone(),
            f_exp: a,
            bases: self.bases.iter().zip(&es).map(|((g, _), &e)| (g.clone(), e)).collect(),
        };
        out.normalize();
        Ok(out)
    }

    pub fn sub(&self, other: &TwistedElem) -> Result<TwistedElem> {
        self.add(&other.mul_poly(&Poly::int(&self.ring, -1)))
    }

    /// Equality by cross-multiplication after exponent alignment.
    pub fn same_value(&self, other: &TwistedElem) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Applies a differential operator.
    pub fn apply(&self, p: &WeylOp) -> Result<TwistedElem> {
        let mut cache: HashMap<Exp, TwistedElem> = HashMap::new();
        let n = self.ring.nvars();
        cache.insert(vec![0; n], self.clone());
        let mut acc = self.mul_poly(&Poly::zero(&self.ring));
        for (b, c) in p.terms() {
            let d = derivative(&mut cache, b);
            acc = acc.add(&d.mul_poly(c))?;
        }
        Ok(acc)
    }

    /// All derivatives `d^b self` with `|b| <= order`, by base variables,
    /// in graded order of `b`.
    pub(crate) fn derivatives(&self, order: u32) -> Vec<(Exp, TwistedElem)> {
        let n = self.ring.nvars();
        let base = self.ring.base_indices();
        let mut cache: HashMap<Exp, TwistedElem> = HashMap::new();
        cache.insert(vec![0; n], self.clone());
        let mut layer = vec![vec![0u32; n]];
        let mut out = vec![(vec![0; n], self.clone())];
        for _ in 0..order {
            let mut next: Vec<Exp> = Vec::new();
            for b in &layer {
                for &i in &base {
                    let mut c = b.clone();
                    c[i] += 1;
                    if !next.contains(&c) {
                        next.push(c);
                    }
                }
            }
            next.sort_by(|a, b| b.cmp(a));
            for b in &next {
                out.push((b.clone(), derivative(&mut cache, b)));
            }
            layer = next;
        }
        out
    }

    /// Exponents of a denominator common to all `elems` (same frame).
    pub(crate) fn common_frame(elems: &[&TwistedElem]) -> (u32, Vec<u32>) {
        let a = elems.iter().map(|e| e.f_exp).max().unwrap_or(0);
        let k = elems.first().map_or(0, |e| e.bases.len());
        let es = (0..k)
            .map(|i| elems.iter().map(|e| e.bases[i].1).max().unwrap_or(0))
            .collect();
        (a, es)
    }

    /// Numerator after substituting `s := value`; the element vanishes at
    /// that value iff this is zero.
    pub fn numerator_at(&self, value: &Q) -> Poly {
        match self.s {
            Some(s) => self.num.subst(s, &Poly::constant(&self.ring, value.clone())),
            None => self.num.clone(),
        }
    }
}

fn derivative(cache: &mut HashMap<Exp, TwistedElem>, b: &Exp) -> TwistedElem {
    if let Some(e) = cache.get(b) {
        return e.clone();
    }
    let i = b.iter().position(|&d| d > 0).expect("nonzero exponent");
    let mut prev = b.clone();
    prev[i] -= 1;
    let d = derivative(cache, &prev).diff(i);
    cache.insert(b.clone(), d.clone());
    d
}

impl fmt::Display for TwistedElem {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut den = Vec::new();
        if self.f_exp > 0 {
            den.push(if self.f_exp == 1 { format!("({})", self.f) } else { format!("({})^{}", self.f, self.f_exp) });
        }
        for (g, e) in &self.bases {
            match e {
                0 => {}
                1 => den.push(format!("({g})")),
                _ => den.push(format!("({g})^{e}")),
            }
        }
        write!(fm, "({})", self.num)?;
        if !self.f.is_constant() {
            let s = self.s.map(|i| self.ring.var(i).name.clone()).unwrap_or_default();
            write!(fm, "*({})^{s}", self.f)?;
        }
        if !den.is_empty() {
            write!(fm, "/({})", den.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TwistedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwistedElem({self})")
    }
}

/// True iff `p` annihilates `e`, optionally after specializing `s`.
pub fn annihilates(p: &WeylOp, e: &TwistedElem, at_s: Option<&Q>) -> Result<bool> {
    let r = e.apply(p)?;
    Ok(match at_s {
        None => r.is_zero(),
        Some(v) => r.numerator_at(v).is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::rational::{q, qr};

    fn ring1() -> (Arc<Ring>, usize) {
        let r = Ring::base(&["x1"]).unwrap().with_params(&["s"]);
        (r, 1)
    }

    #[test]
    fn derivative_of_power() {
        let (r, s) = ring1();
        let x = Poly::var(&r, 0);
        let e = TwistedElem::power(&x, 0, vec![], s).unwrap();
        let d = e.diff(0);
        // s * x^s / x
        assert_eq!(d.numerator(), &Poly::var(&r, s));
        assert_eq!(d.f_exp(), 1);
        assert!(!annihilates(&WeylOp::partial(&r, 0), &e, None).unwrap());
    }

    #[test]
    fn quarter_laplacian_on_square() {
        let (r, s) = ring1();
        let f = parse_poly("x1^2", &r).unwrap();
        let e = TwistedElem::power(&f, 1, vec![], s).unwrap();
        let p = WeylOp::parse("1/4*dx1^2", &r).unwrap();
        let got = e.apply(&p).unwrap();
        let b = parse_poly("(s+1)*(s+1/2)", &r).unwrap();
        let expected = TwistedElem::power(&f, 0, vec![], s).unwrap().mul_poly(&b);
        assert!(got.same_value(&expected).unwrap());
        assert!(annihilates(&(&p - &WeylOp::from_poly(&b)), &e, Some(&q(-1))).is_ok());
        assert!(!e.numerator_at(&qr(-1, 2)).is_zero());
    }

    #[test]
    fn euler_on_normal_crossing() {
        let r = Ring::standard(2);
        let e = TwistedElem::rational(Poly::one(&r), vec![(parse_poly("x1*x2", &r).unwrap(), 1)]).unwrap();
        let p = WeylOp::parse("x1*dx1 + x2*dx2 + 2", &r).unwrap();
        assert!(annihilates(&p, &e, None).unwrap());
    }

    #[test]
    fn cancellation() {
        let r = Ring::standard(1);
        let x = Poly::var(&r, 0);
        let e = TwistedElem::rational(Poly::one(&r), vec![(x.clone(), 1)]).unwrap();
        let one = TwistedElem::rational(Poly::one(&r), vec![(x.clone(), 0)]).unwrap();
        assert!(e.mul_poly(&x).same_value(&one).unwrap());
    }
}
