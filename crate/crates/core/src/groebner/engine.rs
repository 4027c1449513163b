//! Buchberger's algorithm for global orders and Mora's tangent cone
//! algorithm for the local order, with optional tracking of cofactors.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};

use super::order::MonomialOrder;
use crate::error::{Error, Result};
use crate::poly::{Exp, Poly, Ring};
use crate::rational::Q;

/// Resource limits for a basis computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Limits {
    /// Maximal number of reduction steps.
    pub max_steps: u64,
    /// Soft deadline, checked between reduction steps.
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: 1_000_000,
            deadline: None,
        }
    }
}

impl Limits {
    pub fn with_steps(max_steps: u64) -> Self {
        Limits {
            max_steps,
            deadline: None,
        }
    }

    pub fn with_timeout(mut self, t: Duration) -> Self {
        self.deadline = Some(Instant::now() + t);
        self
    }
}

pub(crate) struct Budget<'a> {
    steps: u64,
    limits: &'a Limits,
}

impl<'a> Budget<'a> {
    pub(crate) fn new(limits: &'a Limits) -> Self {
        Budget { steps: 0, limits }
    }

    pub(crate) fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.limits.max_steps {
            return Err(Error::StepLimit(self.limits.max_steps));
        }
        if self.steps.is_multiple_of(64) {
            if let Some(d) = self.limits.deadline {
                if Instant::now() > d {
                    return Err(Error::Timeout);
                }
            }
        }
        Ok(())
    }
}

/// Terms sorted by decreasing monomial order.
pub(crate) type Terms = Vec<(Exp, Q)>;

pub(crate) fn to_terms(p: &Poly, o: &MonomialOrder) -> Terms {
    let mut t: Terms = p.terms().iter().map(|(e, c)| (e.clone(), c.clone())).collect();
    t.sort_by(|a, b| o.cmp(&b.0, &a.0));
    t
}

pub(crate) fn from_terms(ring: &Arc<Ring>, t: Terms) -> Poly {
    Poly::from_terms(ring, t)
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn quotient(b: &[u32], a: &[u32]) -> Exp {
    b.iter().zip(a).map(|(y, x)| y - x).collect()
}

fn lcm(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn deg(a: &[u32]) -> u64 {
    a.iter().map(|&d| d as u64).sum()
}

/// `a - c * x^m * b`.
pub(crate) fn sub_scaled(a: &Terms, c: &Q, m: &[u32], b: &Terms, o: &MonomialOrder) -> Terms {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    let shifted = |t: &(Exp, Q)| -> Exp { t.0.iter().zip(m).map(|(x, y)| x + y).collect() };
    let mut bj: Option<Exp> = b.first().map(shifted);
    while i < a.len() || j < b.len() {
        let ord = match (&bj, a.get(i)) {
            (None, _) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(e), Some(ta)) => o.cmp(&ta.0, e),
        };
        match ord {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((bj.take().expect("b term"), -(c * &b[j].1)));
                j += 1;
                bj = b.get(j).map(shifted);
            }
            Ordering::Equal => {
                let v = &a[i].1 - c * &b[j].1;
                if !v.is_zero() {
                    out.push((a[i].0.clone(), v));
                }
                i += 1;
                j += 1;
                bj = b.get(j).map(shifted);
            }
        }
    }
    out
}

fn ecart(t: &Terms) -> u64 {
    let top = t.iter().map(|(e, _)| deg(e)).max().unwrap_or(0);
    top - deg(&t[0].0)
}

/// A basis element with an optional representation
/// `unit * poly = sum rep_i * f_i` in terms of the input generators.
#[derive(Clone, Debug)]
pub(crate) struct Tracked {
    pub p: Terms,
    pub unit: Option<Poly>,
    pub rep: Option<Vec<Poly>>,
}

impl Tracked {
    fn lm(&self) -> &Exp {
        &self.p[0].0
    }

    fn lc(&self) -> &Q {
        &self.p[0].1
    }

    fn make_monic(&mut self) {
        let inv = Q::one() / self.lc();
        if inv.is_one() {
            return;
        }
        for t in self.p.iter_mut() {
            t.1 = &t.1 * &inv;
        }
        if let Some(r) = self.rep.as_mut() {
            for c in r.iter_mut() {
                *c = c.scale(&inv);
            }
        }
    }
}

/// `h - c*x^m*g` on tracked elements. For global computations units stay
/// `None` (meaning one).
fn reduce_step(h: &mut Tracked, c: &Q, m: &[u32], g: &Tracked, o: &MonomialOrder, ring: &Arc<Ring>) {
    h.p = sub_scaled(&h.p, c, m, &g.p, o);
    if let (Some(hr), Some(gr)) = (h.rep.as_mut(), g.rep.as_ref()) {
        let mono = Poly::monomial(ring, m.to_vec(), c.clone());
        match (&h.unit, &g.unit) {
            (None, None) => {
                for (a, b) in hr.iter_mut().zip(gr) {
                    *a = &*a - &(&mono * b);
                }
            }
            _ => {
                let one = Poly::one(ring);
                let wh = h.unit.clone().unwrap_or_else(|| one.clone());
                let wg = g.unit.clone().unwrap_or(one);
                let k = &mono * &wh;
                for (a, b) in hr.iter_mut().zip(gr) {
                    *a = &(&wg * &*a) - &(&k * b);
                }
                h.unit = Some(&wh * &wg);
            }
        }
    }
}

pub(crate) struct Engine<'a> {
    pub ring: Arc<Ring>,
    pub order: MonomialOrder,
    pub budget: Budget<'a>,
    pub track: bool,
}

impl Engine<'_> {
    fn local(&self) -> bool {
        !self.order.is_global()
    }

    /// Full reduction (leading and tail terms) for global orders. Returns
    /// the remainder; quotients are folded into the tracked representation.
    pub(crate) fn reduce_full(&mut self, mut h: Tracked, basis: &[Tracked]) -> Result<Tracked> {
        let mut rest: Terms = Vec::new();
        while let Some((e, c)) = h.p.first().cloned() {
            let div = basis.iter().find(|g| divides(g.lm(), &e));
            match div {
                Some(g) => {
                    self.budget.tick()?;
                    let m = quotient(&e, g.lm());
                    let k = c / g.lc();
                    reduce_step(&mut h, &k, &m, g, &self.order, &self.ring);
                }
                None => {
                    rest.push(h.p.remove(0));
                }
            }
        }
        h.p = rest;
        Ok(h)
    }

    /// Mora's weak normal form: reduces until the leading monomial is not
    /// divisible by any leading monomial of `basis`.
    pub(crate) fn reduce_mora(&mut self, mut h: Tracked, basis: &[Tracked]) -> Result<Tracked> {
        let mut extra: Vec<Tracked> = Vec::new();
        loop {
            if h.p.is_empty() {
                return Ok(h);
            }
            let e = h.lm().clone();
            let mut best: Option<(u64, bool, usize)> = None;
            for (k, g) in basis.iter().enumerate() {
                if divides(g.lm(), &e) {
                    let ec = ecart(&g.p);
                    if best.is_none_or(|(b, _, _)| ec < b) {
                        best = Some((ec, false, k));
                    }
                }
            }
            for (k, g) in extra.iter().enumerate() {
                if divides(g.lm(), &e) {
                    let ec = ecart(&g.p);
                    if best.is_none_or(|(b, _, _)| ec < b) {
                        best = Some((ec, true, k));
                    }
                }
            }
            let Some((ec, from_extra, k)) = best else {
                return Ok(h);
            };
            self.budget.tick()?;
            let g = if from_extra { extra[k].clone() } else { basis[k].clone() };
            if ec > ecart(&h.p) {
                extra.push(h.clone());
            }
            let m = quotient(&e, g.lm());
            let c = h.lc() / g.lc();
            reduce_step(&mut h, &c, &m, &g, &self.order, &self.ring);
        }
    }

    pub(crate) fn reduce(&mut self, h: Tracked, basis: &[Tracked]) -> Result<Tracked> {
        if self.local() {
            self.reduce_mora(h, basis)
        } else {
            self.reduce_full(h, basis)
        }
    }

    fn spoly(&self, a: &Tracked, b: &Tracked) -> Tracked {
        let l = lcm(a.lm(), b.lm());
        let ma = quotient(&l, a.lm());
        let mb = quotient(&l, b.lm());
        // (1/lc_a) x^ma a - (1/lc_b) x^mb b
        let mut h = Tracked {
            p: Vec::new(),
            unit: if self.track && self.local() { Some(Poly::one(&self.ring)) } else { None },
            rep: a.rep.as_ref().map(|r| vec![Poly::zero(&self.ring); r.len()]),
        };
        let ca = -(Q::one() / a.lc());
        reduce_step(&mut h, &ca, &ma, a, &self.order, &self.ring);
        let cb = Q::one() / b.lc();
        reduce_step(&mut h, &cb, &mb, b, &self.order, &self.ring);
        h
    }

    /// Computes a Groebner basis (global) or standard basis (local) of the
    /// given elements. The result is minimal and monic; for global orders
    /// it is reduced.
    pub(crate) fn basis(&mut self, input: Vec<Tracked>) -> Result<Vec<Tracked>> {
        let mut g: Vec<Tracked> = Vec::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut pending: HashSet<(usize, usize)> = HashSet::new();
        for mut t in input {
            if t.p.is_empty() {
                continue;
            }
            let reduced = if self.local() { t } else { self.reduce_full(t, &g)? };
            t = reduced;
            if t.p.is_empty() {
                continue;
            }
            t.make_monic();
            let k = g.len();
            for i in 0..k {
                pairs.push((i, k));
                pending.insert((i, k));
            }
            g.push(t);
        }
        while !pairs.is_empty() {
            // Normal strategy: smallest lcm degree, then smallest lcm in the
            // order, then smallest indices.
            let mut best = 0;
            let mut best_l = lcm(g[pairs[0].0].lm(), g[pairs[0].1].lm());
            for (k, &(i, j)) in pairs.iter().enumerate().skip(1) {
                let l = lcm(g[i].lm(), g[j].lm());
                let better = match deg(&l).cmp(&deg(&best_l)) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => match self.order.cmp(&l, &best_l) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => (i, j) < pairs[best],
                    },
                };
                if better {
                    best = k;
                    best_l = l;
                }
            }
            let (i, j) = pairs.swap_remove(best);
            pending.remove(&(i, j));
            let li = g[i].lm().clone();
            let lj = g[j].lm().clone();
            if !self.local() && li.iter().zip(&lj).all(|(a, b)| *a == 0 || *b == 0) {
                continue;
            }
            let l = lcm(&li, &lj);
            let chain = (0..g.len()).any(|k| {
                k != i
                    && k != j
                    && divides(g[k].lm(), &l)
                    && !pending.contains(&(i.min(k), i.max(k)))
                    && !pending.contains(&(j.min(k), j.max(k)))
            });
            if chain {
                continue;
            }
            self.budget.tick()?;
            let s = self.spoly(&g[i], &g[j]);
            let mut h = self.reduce(s, &g)?;
            if h.p.is_empty() {
                continue;
            }
            h.make_monic();
            let k = g.len();
            for a in 0..k {
                pairs.push((a, k));
                pending.insert((a, k));
            }
            g.push(h);
        }
        self.minimize(g)
    }

    fn minimize(&mut self, g: Vec<Tracked>) -> Result<Vec<Tracked>> {
        let mut keep: Vec<Tracked> = Vec::new();
        for (k, t) in g.iter().enumerate() {
            let redundant = g.iter().enumerate().any(|(j, u)| {
                j != k && divides(u.lm(), t.lm()) && (u.lm() != t.lm() || j < k)
            });
            if !redundant {
                keep.push(t.clone());
            }
        }
        keep.sort_by(|a, b| self.order.cmp(a.lm(), b.lm()));
        if self.local() {
            return Ok(keep);
        }
        let mut out = Vec::with_capacity(keep.len());
        for k in 0..keep.len() {
            let mut t = keep[k].clone();
            let head = t.p.remove(0);
            let others: Vec<Tracked> = keep
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, u)| u.clone())
                .collect();
            // The representation covers head + tail; reducing the tail
            // updates it consistently.
            let tail = Tracked {
                p: std::mem::take(&mut t.p),
                unit: None,
                rep: t.rep.take(),
            };
            let tail = self.reduce_full(tail, &others)?;
            let mut p = vec![head];
            p.extend(tail.p);
            out.push(Tracked {
                p,
                unit: None,
                rep: tail.rep,
            });
        }
        Ok(out)
    }
}

/// Output of a basis computation.
#[derive(Debug, Clone)]
pub struct BasisData {
    pub basis: Vec<Poly>,
    /// `units[k] * basis[k] = sum reps[k][i] * gens[i]`; units are one for
    /// global orders.
    pub reps: Option<Vec<Vec<Poly>>>,
    pub units: Option<Vec<Poly>>,
    pub(crate) terms: Vec<Terms>,
}

pub(crate) fn tracked_input(gens: &[Poly], order: &MonomialOrder, track: bool, ring: &Arc<Ring>) -> Vec<Tracked> {
    let m = gens.len();
    gens.iter()
        .enumerate()
        .map(|(i, f)| Tracked {
            p: to_terms(f, order),
            unit: (track && !order.is_global()).then(|| Poly::one(ring)),
            rep: track.then(|| {
                (0..m)
                    .map(|j| if i == j { Poly::one(ring) } else { Poly::zero(ring) })
                    .collect()
            }),
        })
        .collect()
}

pub fn compute_basis(
    ring: &Arc<Ring>,
    gens: &[Poly],
    order: &MonomialOrder,
    track: bool,
    limits: &Limits,
) -> Result<BasisData> {
    let mut eng = Engine {
        ring: ring.clone(),
        order: order.clone(),
        budget: Budget::new(limits),
        track,
    };
    let g = eng.basis(tracked_input(gens, order, track, ring))?;
    let basis = g.iter().map(|t| from_terms(ring, t.p.clone())).collect();
    let reps = track.then(|| g.iter().map(|t| t.rep.clone().expect("tracked")).collect());
    let units = (track && !order.is_global()).then(|| {
        g.iter()
            .map(|t| t.unit.clone().unwrap_or_else(|| Poly::one(ring)))
            .collect()
    });
    Ok(BasisData {
        basis,
        reps,
        units,
        terms: g.into_iter().map(|t| t.p).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn polys(r: &Arc<Ring>, s: &[&str]) -> Vec<Poly> {
        s.iter().map(|t| parse_poly(t, r).unwrap()).collect()
    }

    #[test]
    fn monic_normalization() {
        let r = Ring::standard(2);
        let b = compute_basis(&r, &polys(&r, &["2*x1", "3*x2^2"]), &MonomialOrder::GrevLex, false, &Limits::default()).unwrap();
        assert_eq!(b.basis, polys(&r, &["x1", "x2^2"]));
    }

    #[test]
    fn duplicates_collapse() {
        let r = Ring::standard(1);
        let b = compute_basis(&r, &polys(&r, &["x1", "x1"]), &MonomialOrder::GrevLex, false, &Limits::default()).unwrap();
        assert_eq!(b.basis, polys(&r, &["x1"]));
    }

    #[test]
    fn tracked_reps_are_exact() {
        let r = Ring::standard(3);
        let gens = polys(&r, &["x1^2 - x2", "x1*x2 - x3", "x2^2 - x1*x3"]);
        let b = compute_basis(&r, &gens, &MonomialOrder::Lex, true, &Limits::default()).unwrap();
        let reps = b.reps.unwrap();
        for (g, rep) in b.basis.iter().zip(&reps) {
            let s = rep.iter().zip(&gens).fold(Poly::zero(&r), |acc, (c, f)| &acc + &(c * f));
            assert_eq!(&s, g);
        }
    }

    #[test]
    fn local_basis_units() {
        let r = Ring::standard(2);
        let gens = polys(&r, &["x1 - x1^2", "x2 + x1*x2"]);
        let b = compute_basis(&r, &gens, &MonomialOrder::NegDegRevLex, true, &Limits::default()).unwrap();
        let reps = b.reps.unwrap();
        let units = b.units.unwrap();
        for ((g, rep), u) in b.basis.iter().zip(&reps).zip(&units) {
            assert!(u.is_unit_at_origin());
            let s = rep.iter().zip(&gens).fold(Poly::zero(&r), |acc, (c, f)| &acc + &(c * f));
            assert_eq!(s, u * g);
        }
        let lms: Vec<Exp> = b.terms.iter().map(|t| t[0].0.clone()).collect();
        assert!(lms.contains(&vec![1, 0]) && lms.contains(&vec![0, 1]));
    }

    #[test]
    fn step_limit_is_reported() {
        let r = Ring::standard(3);
        let gens = polys(&r, &["x1^3 - x2*x3^2 + 1", "x2^3 - x1*x3 + x1", "x3^3 - x1*x2^2 + x2"]);
        let e = compute_basis(&r, &gens, &MonomialOrder::Lex, false, &Limits::with_steps(10));
        assert_eq!(e.err(), Some(Error::StepLimit(10)));
    }
}
