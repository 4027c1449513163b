//! Commutative engine: Groebner and standard bases, membership with
//! certificates, elimination, intersection, dimension, quotient bases and
//! syzygies.

mod engine;
mod ops;
mod order;

use std::sync::{Arc, OnceLock};


pub use engine::{compute_basis, BasisData, Limits};
pub use ops::{
    eliminate, germ_order, ideal_quotient, intersect, is_regular_sequence, is_syzygy, positive_grading, saturate, syzygies, Submodule,
    SyzygyRow,
};
pub use order::MonomialOrder;

use engine::{Budget, Engine, Tracked};
use crate::error::{Error, Result};
use crate::poly::{Exp, Poly, Ring};

/// Certificate `unit * p = sum cofactors_i * gens_i`. For global orders
/// the unit is one; for the local order it is a unit at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub unit: Poly,
    pub cofactors: Vec<Poly>,
}

impl Membership {
    /// Re-expands the certificate.
    pub fn verify(&self, p: &Poly, gens: &[Poly]) -> bool {
        if !self.unit.is_unit_at_origin() || self.cofactors.len() != gens.len() {
            return false;
        }
        let rhs = self
            .cofactors
            .iter()
            .zip(gens)
            .fold(Poly::zero(p.ring()), |acc, (c, g)| &acc + &(c * g));
        &self.unit * p == rhs
    }
}

/// Monomial basis of a quotient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientBasis {
    Finite(Vec<Exp>),
    Infinite,
}

/// An ideal given by generators, with a lazily computed basis for its
/// monomial order. Cached values are computed at most once.
#[derive(Debug)]
pub struct Ideal {
    ring: Arc<Ring>,
    gens: Vec<Poly>,
    order: MonomialOrder,
    limits: Limits,
    basis: OnceLock<Result<BasisData>>,
    tracked: OnceLock<Result<BasisData>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let i = Ideal::new(&self.ring, self.gens.clone(), self.order.clone()).with_limits(self.limits.clone());
        if let Some(b) = self.basis.get() {
            let _ = i.basis.set(b.clone());
        }
        i
    }
}

impl Ideal {
    pub fn new(ring: &Arc<Ring>, gens: Vec<Poly>, order: MonomialOrder) -> Ideal {
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ideal {
            ring: ring.clone(),
            gens,
            order,
            limits: Limits::default(),
            basis: OnceLock::new(),
            tracked: OnceLock::new(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Ideal {
        self.limits = limits;
        self
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// Same generators under another order.
    pub fn reorder(&self, order: MonomialOrder) -> Ideal {
        Ideal::new(&self.ring, self.gens.clone(), order).with_limits(self.limits.clone())
    }

    fn data(&self) -> Result<&BasisData> {
        self.basis
            .get_or_init(|| compute_basis(&self.ring, &self.gens, &self.order, false, &self.limits))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn tracked_data(&self) -> Result<&BasisData> {
        self.tracked
            .get_or_init(|| compute_basis(&self.ring, &self.gens, &self.order, true, &self.limits))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Reduced Groebner basis (global orders) or minimal standard basis
    /// (local order).
    pub fn basis(&self) -> Result<&[Poly]> {
        Ok(&self.data()?.basis)
    }

    pub fn leading_monomials(&self) -> Result<Vec<Exp>> {
        Ok(self.data()?.terms.iter().map(|t| t[0].0.clone()).collect())
    }

    /// Remainder of `p` modulo the basis. For the local order this is a
    /// weak normal form: zero exactly when `p` lies in the ideal of the
    /// local ring.
    pub fn normal_form(&self, p: &Poly) -> Result<Poly> {
        let data = self.data()?;
        let basis: Vec<Tracked> = data
            .terms
            .iter()
            .map(|t| Tracked { p: t.clone(), unit: None, rep: None })
            .collect();
        let mut eng = Engine {
            ring: self.ring.clone(),
            order: self.order.clone(),
            budget: Budget::new(&self.limits),
            track: false,
        };
        let h = Tracked { p: engine::to_terms(p, &self.order), unit: None, rep: None };
        let r = eng.reduce(h, &basis)?;
        Ok(engine::from_terms(&self.ring, r.p))
    }

    pub fn contains(&self, p: &Poly) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    pub fn contains_all(&self, ps: &[Poly]) -> Result<bool> {
        for p in ps {
            if !self.contains(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Membership with an exact certificate in terms of the generators.
    pub fn membership(&self, p: &Poly) -> Result<Option<Membership>> {
        let data = self.tracked_data()?;
        let m = self.gens.len();
        let local = !self.order.is_global();
        let reps = data.reps.as_ref().expect("tracked basis");
        let basis: Vec<Tracked> = data
            .terms
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let mut rep = reps[k].clone();
                rep.push(Poly::zero(&self.ring));
                Tracked {
                    p: t.clone(),
                    unit: data.units.as_ref().map(|u| u[k].clone()),
                    rep: Some(rep),
                }
            })
            .collect();
        let mut rep = vec![Poly::zero(&self.ring); m];
        rep.push(Poly::one(&self.ring));
        let h = Tracked {
            p: engine::to_terms(p, &self.order),
            unit: local.then(|| Poly::one(&self.ring)),
            rep: Some(rep),
        };
        let mut eng = Engine {
            ring: self.ring.clone(),
            order: self.order.clone(),
            budget: Budget::new(&self.limits),
            track: true,
        };
        let r = eng.reduce(h, &basis)?;
        if !r.p.is_empty() {
            return Ok(None);
        }
        // unit_h * 0 = sum rep_i f_i + rep_m p, so rep_m p = -sum rep_i f_i.
        let mut rep = r.rep.expect("tracked");
        let unit = rep.pop().expect("extra slot");
        let cofactors = rep.iter().map(|c| -c).collect();
        let cert = Membership { unit, cofactors };
        if !cert.verify(p, &self.gens) {
            return Err(Error::Precondition("membership certificate failed to verify".into()));
        }
        Ok(Some(cert))
    }

    /// True if the ideal is the whole ring (of the local ring, for the
    /// local order).
    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.leading_monomials()?.iter().any(|e| e.iter().all(|&d| d == 0)))
    }

    /// Krull dimension of the quotient (at the origin for the local
    /// order); `-1` for the unit ideal.
    pub fn krull_dim(&self) -> Result<i64> {
        let lms = self.leading_monomials()?;
        Ok(monomial_dim(&lms, self.ring.nvars()))
    }

    /// Standard monomials of the quotient, up to `cap` of them.
    pub fn quotient_basis(&self, cap: usize) -> Result<QuotientBasis> {
        let lms = self.leading_monomials()?;
        let n = self.ring.nvars();
        if monomial_dim(&lms, n) > 0 {
            return Ok(QuotientBasis::Infinite);
        }
        let mut out: Vec<Exp> = Vec::new();
        let mut frontier: Vec<Exp> = vec![vec![0; n]];
        let mut seen = std::collections::HashSet::new();
        while let Some(e) = frontier.pop() {
            if !seen.insert(e.clone()) {
                continue;
            }
            if lms.iter().any(|l| l.iter().zip(&e).all(|(a, b)| a <= b)) {
                continue;
            }
            out.push(e.clone());
            if out.len() > cap {
                return Err(Error::Unsupported(format!("quotient has more than {cap} monomials")));
            }
            for i in 0..n {
                let mut f = e.clone();
                f[i] += 1;
                frontier.push(f);
            }
        }
        out.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        Ok(QuotientBasis::Finite(out))
    }

    /// `self ⊇ other`.
    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        self.contains_all(other.gens())
    }

    /// Equality by mutual containment.
    pub fn same_as(&self, other: &Ideal) -> Result<bool> {
        Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
    }
}

/// Dimension of `k[x]/(monomials)`: the size of a largest set of variables
/// containing no monomial's support.
pub fn monomial_dim(lms: &[Exp], n: usize) -> i64 {
    if lms.iter().any(|e| e.iter().all(|&d| d == 0)) {
        return -1;
    }
    if lms.is_empty() {
        return n as i64;
    }
    let supports: Vec<u64> = lms
        .iter()
        .map(|e| e.iter().enumerate().filter(|(_, &d)| d > 0).fold(0u64, |m, (i, _)| m | (1 << i)))
        .collect();
    let mut best = 0;
    // Branch over variables: a set S is independent if no support is a
    // subset of S.
    fn rec(i: usize, n: usize, set: u64, size: i64, supports: &[u64], best: &mut i64) {
        if size + (n - i) as i64 <= *best {
            return;
        }
        if i == n {
            *best = size;
            return;
        }
        let with = set | (1 << i);
        if supports.iter().all(|&s| s & !with != 0) {
            rec(i + 1, n, with, size + 1, supports, best);
        }
        rec(i + 1, n, set, size, supports, best);
    }
    rec(0, n, 0, 0, &supports, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn ideal(r: &Arc<Ring>, gens: &[&str], o: MonomialOrder) -> Ideal {
        Ideal::new(r, gens.iter().map(|g| parse_poly(g, r).unwrap()).collect(), o)
    }

    #[test]
    fn membership_examples() {
        let r = Ring::standard(2);
        let i = ideal(&r, &["x1"], MonomialOrder::GrevLex);
        let p = parse_poly("x1^2", &r).unwrap();
        let cert = i.membership(&p).unwrap().unwrap();
        assert!(cert.verify(&p, i.gens()));
        let j = ideal(&r, &["x1^2", "x2"], MonomialOrder::GrevLex);
        assert!(!j.contains(&Poly::var(&r, 0)).unwrap());
        assert!(j.membership(&Poly::var(&r, 0)).unwrap().is_none());
    }

    #[test]
    fn lex_spair() {
        let r = Ring::base(&["x1", "x2", "xi1", "xi2"]).unwrap();
        let i = ideal(&r, &["x2*xi1 - x1*xi2", "xi2"], MonomialOrder::Lex);
        let b = i.basis().unwrap();
        assert!(b.contains(&parse_poly("x2*xi1", &r).unwrap()));
    }

    #[test]
    fn local_membership_uses_units() {
        let r = Ring::standard(1);
        // x1 is in (x1 + x1^2) locally but not globally.
        let g = ideal(&r, &["x1 + x1^2"], MonomialOrder::GrevLex);
        let l = ideal(&r, &["x1 + x1^2"], MonomialOrder::NegDegRevLex);
        let x = Poly::var(&r, 0);
        assert!(!g.contains(&x).unwrap());
        let cert = l.membership(&x).unwrap().unwrap();
        assert!(cert.verify(&x, l.gens()));
        assert!(!cert.unit.is_one());
    }

    #[test]
    fn dimensions() {
        let r = Ring::standard(4);
        assert_eq!(ideal(&r, &["x3", "x4"], MonomialOrder::GrevLex).krull_dim().unwrap(), 2);
        assert_eq!(ideal(&r, &[], MonomialOrder::GrevLex).krull_dim().unwrap(), 4);
        assert_eq!(ideal(&r, &["x1 - 1"], MonomialOrder::NegDegRevLex).krull_dim().unwrap(), -1);
        assert_eq!(ideal(&r, &["x1 - 1"], MonomialOrder::GrevLex).krull_dim().unwrap(), 3);
    }

    #[test]
    fn quotient_bases() {
        let r = Ring::standard(2);
        let q = ideal(&r, &["x1^2", "x2^2"], MonomialOrder::GrevLex).quotient_basis(100).unwrap();
        assert_eq!(q, QuotientBasis::Finite(vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]));
        let r1 = Ring::standard(1);
        let q = ideal(&r1, &["x1"], MonomialOrder::GrevLex).quotient_basis(10).unwrap();
        assert_eq!(q, QuotientBasis::Finite(vec![vec![0]]));
        let q = ideal(&r, &["x1"], MonomialOrder::GrevLex).quotient_basis(10).unwrap();
        assert_eq!(q, QuotientBasis::Infinite);
    }
}
