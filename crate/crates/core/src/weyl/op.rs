use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::parse::{evaluate, parse_expr, Evaluator};
use crate::poly::{Exp, Poly, Ring, VarClass};
use crate::rational::{binomial, Q};

/// Differential operator `sum_b c_b(x, s) d^b`, normal ordered with all
/// coefficients to the left. Derivatives act on base variables only; the
/// exponent vectors run over all ring variables with zeros at parameters.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylOp {
    ring: Arc<Ring>,
    terms: BTreeMap<Exp, Poly>,
}

impl WeylOp {
    pub fn zero(ring: &Arc<Ring>) -> WeylOp {
        WeylOp {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: &Poly) -> WeylOp {
        let mut op = WeylOp::zero(p.ring());
        op.add_term(vec![0; p.ring().nvars()], p.clone());
        op
    }

    pub fn one(ring: &Arc<Ring>) -> WeylOp {
        WeylOp::from_poly(&Poly::one(ring))
    }

    /// `d/dx_i` for the base variable at ring position `i`.
    pub fn partial(ring: &Arc<Ring>, i: usize) -> WeylOp {
        assert_eq!(ring.var(i).class, VarClass::Base, "derivative of a parameter");
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        let mut op = WeylOp::zero(ring);
        op.add_term(e, Poly::one(ring));
        op
    }

    /// `c * d^b`.
    pub fn term(c: &Poly, b: Exp) -> WeylOp {
        let mut op = WeylOp::zero(c.ring());
        op.add_term(b, c.clone());
        op
    }

    /// Vector field `sum a_i d_i` on the base variables listed in `vars`.
    pub fn vector_field(ring: &Arc<Ring>, vars: &[usize], coeffs: &[Poly]) -> WeylOp {
        let mut op = WeylOp::zero(ring);
        for (&i, a) in vars.iter().zip(coeffs) {
            let mut e = vec![0; ring.nvars()];
            e[i] = 1;
            op.add_term(e, a.clone());
        }
        op
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Exp, Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, b: Exp, c: Poly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(b);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Order with respect to the derivatives; `-1` for zero.
    pub fn order(&self) -> i64 {
        self.terms
            .keys()
            .map(|b| b.iter().map(|&d| d as i64).sum())
            .max()
            .unwrap_or(-1)
    }

    /// Principal symbol: the top-order part with `d_i` replaced by the
    /// cotangent dual of `x_i` in `cot` (a ring produced by
    /// `Ring::cotangent`, containing this ring's variables by name).
    pub fn symbol(&self, cot: &Arc<Ring>) -> Result<Poly> {
        let ord = self.order();
        let mut out = Poly::zero(cot);
        for (b, c) in &self.terms {
            if b.iter().map(|&d| d as i64).sum::<i64>() != ord {
                continue;
            }
            let mut e = vec![0; cot.nvars()];
            for (i, &d) in b.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let name = &self.ring.var(i).name;
                let pos = cot
                    .index_of(name)
                    .and_then(|p| cot.dual_of(p))
                    .ok_or_else(|| Error::Ring(format!("no cotangent dual for `{name}`")))?;
                e[pos] = d;
            }
            let mono = Poly::monomial(cot, e, Q::one());
            out = &out + &(&c.embed(cot)? * &mono);
        }
        Ok(out)
    }

    /// Applies the operator to a polynomial.
    pub fn apply_poly(&self, g: &Poly) -> Poly {
        let mut out = Poly::zero(&self.ring);
        for (b, c) in &self.terms {
            let mut d = g.clone();
            for (i, &k) in b.iter().enumerate() {
                for _ in 0..k {
                    d = d.diff(i);
                }
            }
            out = &out + &(c * &d);
        }
        out
    }

    /// Substitutes `value` for the ring variable `i` in every coefficient.
    pub fn subst(&self, i: usize, value: &Poly) -> WeylOp {
        let mut out = WeylOp::zero(&self.ring);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), c.subst(i, value));
        }
        out
    }

    pub fn scale(&self, k: &Q) -> WeylOp {
        let mut out = WeylOp::zero(&self.ring);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), c.scale(k));
        }
        out
    }

    /// Re-expresses the operator in a larger ring, matching names.
    pub fn embed(&self, target: &Arc<Ring>) -> Result<WeylOp> {
        let mut out = WeylOp::zero(target);
        for (b, c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (i, &d) in b.iter().enumerate() {
                if d > 0 {
                    let name = &self.ring.var(i).name;
                    let j = target
                        .index_of(name)
                        .ok_or_else(|| Error::Ring(format!("variable `{name}` missing from target ring")))?;
                    e[j] = d;
                }
            }
            out.add_term(e, c.embed(target)?);
        }
        Ok(out)
    }

    /// Parses an expression where `d<var>` denotes the derivative by a base
    /// variable, e.g. `x1*dx1 + 2`.
    pub fn parse(text: &str, ring: &Arc<Ring>) -> Result<WeylOp> {
        evaluate(&OpEval(ring), &parse_expr(text)?)
    }
}

/// Multiplies the coefficient `c` on the right by `d^b`, i.e. computes
/// `d^b * c` in normal order: `sum_k C(b,k) d^k(c) d^(b-k)`.
fn commute(b: &[u32], c: &Poly) -> Vec<(Exp, Poly)> {
    let mut out = vec![(b.to_vec(), c.clone())];
    for (i, &bi) in b.iter().enumerate() {
        if bi == 0 {
            continue;
        }
        let mut next = Vec::new();
        for (rest, coeff) in out {
            let mut deriv = coeff.clone();
            for k in 0..=bi {
                if deriv.is_zero() {
                    break;
                }
                let mut e = rest.clone();
                e[i] = bi - k;
                let w = Q::from_integer(binomial(bi, k));
                next.push((e, deriv.scale(&w)));
                deriv = deriv.diff(i);
            }
        }
        out = next;
    }
    out
}

impl<'a> Mul<&'a WeylOp> for &'a WeylOp {
    type Output = WeylOp;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &WeylOp) -> WeylOp {
        let mut out = WeylOp::zero(&self.ring);
        for (b, p) in &self.terms {
            for (c, q) in &rhs.terms {
                for (e, coeff) in commute(b, q) {
                    let total: Exp = e.iter().zip(c).map(|(x, y)| x + y).collect();
                    out.add_term(total, p * &coeff);
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a WeylOp> for &'a WeylOp {
    type Output = WeylOp;
    fn add(self, rhs: &WeylOp) -> WeylOp {
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a WeylOp> for &'a WeylOp {
    type Output = WeylOp;
    fn sub(self, rhs: &WeylOp) -> WeylOp {
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.add_term(b.clone(), -c);
        }
        out
    }
}

impl Neg for &WeylOp {
    type Output = WeylOp;
    fn neg(self) -> WeylOp {
        self.scale(&-Q::one())
    }
}

fn fmt_partials(ring: &Ring, b: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &d) in b.iter().enumerate() {
        match d {
            0 => {}
            1 => parts.push(format!("d{}", ring.var(i).name)),
            _ => parts.push(format!("d{}^{}", ring.var(i).name, d)),
        }
    }
    parts.join("*")
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // Highest order first, then by derivative exponents descending.
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (k, (b, c)) in ts.into_iter().enumerate() {
            let negative = c.len() == 1 && c.terms().values().all(num_traits::Signed::is_negative);
            let c = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let partials = fmt_partials(&self.ring, b);
            let coeff = if c.len() == 1 {
                c.to_string()
            } else {
                format!("({c})")
            };
            if partials.is_empty() {
                f.write_str(&coeff)?;
            } else if c.is_one() {
                f.write_str(&partials)?;
            } else {
                write!(f, "{coeff}*{partials}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylOp({self})")
    }
}

struct OpEval<'a>(&'a Arc<Ring>);

impl Evaluator for OpEval<'_> {
    type Value = WeylOp;
    fn num(&self, c: Q) -> WeylOp {
        WeylOp::from_poly(&Poly::constant(self.0, c))
    }
    fn var(&self, name: &str, pos: usize) -> Result<WeylOp> {
        if let Some(i) = self.0.index_of(name) {
            return Ok(WeylOp::from_poly(&Poly::var(self.0, i)));
        }
        if let Some(rest) = name.strip_prefix('d') {
            if let Some(i) = self.0.index_of(rest) {
                if self.0.var(i).class == VarClass::Base {
                    return Ok(WeylOp::partial(self.0, i));
                }
            }
        }
        Err(Error::UnknownVariable {
            name: name.to_string(),
            pos,
        })
    }
    fn add(&self, a: &WeylOp, b: &WeylOp) -> WeylOp {
        a + b
    }
    fn sub(&self, a: &WeylOp, b: &WeylOp) -> WeylOp {
        a - b
    }
    fn mul(&self, a: &WeylOp, b: &WeylOp) -> WeylOp {
        a * b
    }
    fn neg(&self, a: &WeylOp) -> WeylOp {
        -a
    }
    fn as_constant(&self, a: &WeylOp) -> Option<Q> {
        if a.is_zero() {
            return Some(Q::zero());
        }
        if a.terms.len() == 1 {
            let (b, c) = a.terms.iter().next()?;
            if b.iter().all(|&d| d == 0) && c.is_constant() {
                return Some(c.constant_term());
            }
        }
        None
    }
    fn scale(&self, a: &WeylOp, c: &Q) -> WeylOp {
        a.scale(c)
    }
}
