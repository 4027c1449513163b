use std::sync::Arc;

use num_traits::One;

use super::engine::{compute_basis, to_terms, Budget, Engine, Limits, Tracked};
use super::{Ideal, MonomialOrder};
use crate::error::{Error, Result};
use crate::poly::{Poly, Ring, VarClass, VarId};
use crate::lp::{maximize, LpResult};
use crate::rational::{lcm_denoms, Q};

/// Cofactor vector `(a_1, ..., a_m)` with `sum a_i f_i = 0`.
pub type SyzygyRow = Vec<Poly>;

/// Generators of `I ∩ k[vars not in drop]`, as an ideal of the same ring
/// with the original (global) order.
pub fn eliminate(i: &Ideal, drop: &[usize]) -> Result<Ideal> {
    if !i.order().is_global() {
        return Err(Error::Unsupported("elimination needs a global order".into()));
    }
    let order = if i.order().eliminates(drop) {
        i.order().clone()
    } else {
        MonomialOrder::elim(i.ring().nvars(), drop)
    };
    let data = compute_basis(i.ring(), i.gens(), &order, false, i.limits())?;
    let gens = data
        .basis
        .into_iter()
        .filter(|g| g.support_vars().iter().all(|v| !drop.contains(v)))
        .collect();
    Ok(Ideal::new(i.ring(), gens, i.order().clone()).with_limits(i.limits().clone()))
}

fn with_fresh_param(ring: &Arc<Ring>) -> (Arc<Ring>, usize) {
    let ext = ring.with_params(&["t"]);
    let t = ext.nvars() - 1;
    (ext, t)
}

fn back(ring: &Arc<Ring>, ps: Vec<Poly>) -> Result<Vec<Poly>> {
    ps.iter().map(|p| p.embed(ring)).collect()
}

/// `I ∩ J` by elimination of `t` from `tI + (1-t)J`.
pub fn intersect(i: &Ideal, j: &Ideal) -> Result<Ideal> {
    if i.ring() != j.ring() {
        return Err(Error::Ring("intersection of ideals in different rings".into()));
    }
    if !i.order().is_global() {
        return Err(Error::Unsupported("intersection needs a global order".into()));
    }
    let (ext, t) = with_fresh_param(i.ring());
    let tv = Poly::var(&ext, t);
    let one_minus = &Poly::one(&ext) - &tv;
    let mut gens = Vec::new();
    for f in i.gens() {
        gens.push(&tv * &f.embed(&ext)?);
    }
    for g in j.gens() {
        gens.push(&one_minus * &g.embed(&ext)?);
    }
    let big = Ideal::new(&ext, gens, MonomialOrder::GrevLex).with_limits(i.limits().clone());
    let e = eliminate(&big, &[t])?;
    let gens = back(i.ring(), e.gens().to_vec())?;
    Ok(Ideal::new(i.ring(), gens, i.order().clone()).with_limits(i.limits().clone()))
}

/// `I : f`.
pub fn ideal_quotient(i: &Ideal, f: &Poly) -> Result<Ideal> {
    if f.is_zero() {
        return Ok(Ideal::new(i.ring(), vec![Poly::one(i.ring())], i.order().clone()));
    }
    let principal = Ideal::new(i.ring(), vec![f.clone()], i.order().clone()).with_limits(i.limits().clone());
    let cap = intersect(i, &principal)?;
    let mut gens = Vec::new();
    for g in cap.gens() {
        gens.push(
            g.div_exact(f)
                .ok_or_else(|| Error::Precondition("intersection element not divisible".into()))?,
        );
    }
    Ok(Ideal::new(i.ring(), gens, i.order().clone()).with_limits(i.limits().clone()))
}

/// `I : f^∞`.
pub fn saturate(i: &Ideal, f: &Poly) -> Result<Ideal> {
    let mut cur = i.clone();
    loop {
        let next = ideal_quotient(&cur, f)?;
        if cur.contains_ideal(&next)? {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Generators of the syzygy module of `fs`, by Schreyer's lifting of the
/// S-pair reductions of a tracked Groebner basis.
pub fn syzygies(fs: &[Poly], limits: &Limits) -> Result<Vec<SyzygyRow>> {
    let m = fs.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let ring = fs[0].ring().clone();
    let order = MonomialOrder::GrevLex;
    let data = compute_basis(&ring, fs, &order, true, limits)?;
    let t = data.reps.expect("tracked");
    let k = data.basis.len();
    let zero = Poly::zero(&ring);
    let unit_vec = |j: usize| -> Vec<Poly> {
        (0..k).map(|l| if l == j { Poly::one(&ring) } else { zero.clone() }).collect()
    };
    let g: Vec<Tracked> = data
        .terms
        .iter()
        .enumerate()
        .map(|(j, p)| Tracked { p: p.clone(), unit: None, rep: Some(unit_vec(j)) })
        .collect();
    let mut eng = Engine {
        ring: ring.clone(),
        order: order.clone(),
        budget: Budget::new(limits),
        track: true,
    };
    let lift = |s: &[Poly]| -> Vec<Poly> {
        (0..m)
            .map(|i| {
                s.iter()
                    .zip(&t)
                    .fold(zero.clone(), |acc, (c, row)| &acc + &(c * &row[i]))
            })
            .collect()
    };
    let mut rows: Vec<SyzygyRow> = Vec::new();
    for a in 0..k {
        for b in (a + 1)..k {
            let s = spoly_tracked(&g[a], &g[b], &ring, &order);
            let r = eng.reduce_full(s, &g)?;
            if !r.p.is_empty() {
                return Err(Error::Precondition("S-pair did not reduce to zero".into()));
            }
            push_row(&mut rows, lift(&r.rep.expect("tracked")));
        }
    }
    for (i, f) in fs.iter().enumerate() {
        let h = Tracked {
            p: to_terms(f, &order),
            unit: None,
            rep: Some(vec![zero.clone(); k]),
        };
        let r = eng.reduce_full(h, &g)?;
        if !r.p.is_empty() {
            return Err(Error::Precondition("generator not reduced by its own basis".into()));
        }
        // f_i = sum R_ik g_k, recorded with negative sign by the reduction.
        let neg = r.rep.expect("tracked");
        let lifted = lift(&neg);
        let mut row: Vec<Poly> = lifted;
        row[i] = &row[i] + &Poly::one(&ring);
        push_row(&mut rows, row);
    }
    for row in &rows {
        debug_assert!(is_syzygy(row, fs));
    }
    Ok(rows)
}

fn spoly_tracked(a: &Tracked, b: &Tracked, ring: &Arc<Ring>, order: &MonomialOrder) -> Tracked {
    let la = &a.p[0].0;
    let lb = &b.p[0].0;
    let l: Vec<u32> = la.iter().zip(lb).map(|(x, y)| *x.max(y)).collect();
    let ma: Vec<u32> = l.iter().zip(la).map(|(x, y)| x - y).collect();
    let mb: Vec<u32> = l.iter().zip(lb).map(|(x, y)| x - y).collect();
    let ca = Q::one() / &a.p[0].1;
    let cb = Q::one() / &b.p[0].1;
    let pa = Poly::monomial(ring, ma.clone(), ca.clone());
    let pb = Poly::monomial(ring, mb.clone(), cb.clone());
    let p = super::engine::sub_scaled(
        &super::engine::sub_scaled(&Vec::new(), &-&ca, &ma, &a.p, order),
        &cb,
        &mb,
        &b.p,
        order,
    );
    let rep = a
        .rep
        .as_ref()
        .zip(b.rep.as_ref())
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| &(&pa * x) - &(&pb * y)).collect());
    Tracked { p, unit: None, rep }
}

fn push_row(rows: &mut Vec<SyzygyRow>, row: SyzygyRow) {
    if row.iter().all(Poly::is_zero) {
        return;
    }
    // Normalize the scalar so duplicates are detected.
    let lead = row.iter().find(|p| !p.is_zero()).expect("nonzero");
    let (_, c) = lead.terms().iter().next_back().expect("nonzero");
    let k = Q::one() / c;
    let row: SyzygyRow = row.iter().map(|p| p.scale(&k)).collect();
    if !rows.contains(&row) {
        rows.push(row);
    }
}

pub fn is_syzygy(row: &[Poly], fs: &[Poly]) -> bool {
    let ring = fs[0].ring();
    row.iter()
        .zip(fs)
        .fold(Poly::zero(ring), |acc, (a, f)| &acc + &(a * f))
        .is_zero()
}

/// Submodule of `R^m` given by generator rows, tested for membership by
/// encoding rows as `sum v_i e_i` modulo all products `e_i e_j`.
pub struct Submodule {
    ideal: Ideal,
    ring: Arc<Ring>,
    m: usize,
}

impl Submodule {
    pub fn new(ring: &Arc<Ring>, rows: &[Vec<Poly>], m: usize, limits: &Limits) -> Result<Submodule> {
        let mut extra = Vec::new();
        let mut next = ring
            .vars()
            .iter()
            .filter(|v| v.class == VarClass::Param)
            .map(|v| v.index)
            .max()
            .unwrap_or(0);
        for i in 0..m {
            next += 1;
            let mut name = format!("e{}", i + 1);
            while ring.index_of(&name).is_some() {
                name.push('_');
            }
            extra.push(VarId::new(VarClass::Param, next, name));
        }
        let ext = ring.extend(extra)?;
        let base = ring.nvars();
        let mut gens = Vec::new();
        for row in rows {
            gens.push(encode(&ext, base, row)?);
        }
        for i in 0..m {
            for j in i..m {
                gens.push(&Poly::var(&ext, base + i) * &Poly::var(&ext, base + j));
            }
        }
        Ok(Submodule {
            ideal: Ideal::new(&ext, gens, MonomialOrder::GrevLex).with_limits(limits.clone()),
            ring: ring.clone(),
            m,
        })
    }

    pub fn contains(&self, v: &[Poly]) -> Result<bool> {
        if v.len() != self.m {
            return Err(Error::Index(format!("vector of length {} for rank {}", v.len(), self.m)));
        }
        let p = encode(self.ideal.ring(), self.ring.nvars(), v)?;
        self.ideal.contains(&p)
    }
}

fn encode(ext: &Arc<Ring>, base: usize, row: &[Poly]) -> Result<Poly> {
    let mut acc = Poly::zero(ext);
    for (i, a) in row.iter().enumerate() {
        acc = &acc + &(&a.embed(ext)? * &Poly::var(ext, base + i));
    }
    Ok(acc)
}

/// Positive integer weights on all ring variables for which every
/// polynomial of `fs` is weighted homogeneous, if any exist. Small weights
/// are preferred.
pub fn positive_grading(fs: &[Poly]) -> Option<Vec<u64>> {
    let first = fs.iter().find(|f| !f.is_zero())?;
    let n = first.ring().nvars();
    // w = 1 + v with v >= 0; each pair of terms gives <w, e - e0> = 0.
    let mut a: Vec<Vec<Q>> = Vec::new();
    let mut b: Vec<Q> = Vec::new();
    for f in fs {
        let mut keys = f.terms().keys();
        let Some(e0) = keys.next() else { continue };
        for e in keys {
            let row: Vec<Q> = (0..n).map(|i| Q::from_integer((e[i] as i64 - e0[i] as i64).into())).collect();
            let rhs: Q = -row.iter().sum::<Q>();
            a.push(row);
            b.push(rhs);
        }
    }
    let c = vec![-Q::one(); n];
    let v = match maximize(&a, &b, &c) {
        LpResult::Optimal { x, .. } => x,
        _ => return None,
    };
    let w: Vec<Q> = v.iter().map(|x| x + Q::one()).collect();
    let l = lcm_denoms(&w);
    w.iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer().try_into().ok())
        .collect()
}

/// An order computing dimensions at the origin for the ideal of `fs`: a
/// global weighted order when the generators are weighted homogeneous for
/// positive weights, the local order otherwise.
pub fn germ_order(fs: &[Poly]) -> MonomialOrder {
    match positive_grading(fs) {
        Some(w) => MonomialOrder::Weighted(w),
        None => MonomialOrder::NegDegRevLex,
    }
}

/// True iff the Krull dimension drops by one with each prefix of `fs`,
/// starting from `ambient`. Dimensions are computed for the given order
/// (local order for germs at the origin).
pub fn is_regular_sequence(fs: &[Poly], ambient: i64, order: &MonomialOrder, limits: &Limits) -> Result<bool> {
    let Some(first) = fs.first() else {
        return Ok(true);
    };
    let ring = first.ring().clone();
    for k in 1..=fs.len() {
        let i = Ideal::new(&ring, fs[..k].to_vec(), order.clone()).with_limits(limits.clone());
        if i.krull_dim()? != ambient - k as i64 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn ps(r: &Arc<Ring>, s: &[&str]) -> Vec<Poly> {
        s.iter().map(|t| parse_poly(t, r).unwrap()).collect()
    }

    #[test]
    fn elimination_of_graph() {
        let r = Ring::base(&["t", "x1", "x2"]).unwrap();
        let i = Ideal::new(&r, ps(&r, &["t - x1", "x2 - t^2"]), MonomialOrder::GrevLex);
        let e = eliminate(&i, &[0]).unwrap();
        assert_eq!(e.gens(), ps(&r, &["x1^2 - x2"]).as_slice());
        let same = eliminate(&i, &[]).unwrap();
        assert!(same.same_as(&i).unwrap());
    }

    #[test]
    fn elimination_of_conormal_parameter() {
        let r = Ring::base(&["lambda", "x1", "x2", "xi1", "xi2"]).unwrap();
        let i = Ideal::new(&r, ps(&r, &["xi1 - 2*lambda*x1", "xi2 - 3*lambda*x2^2"]), MonomialOrder::GrevLex);
        let e = eliminate(&i, &[0]).unwrap();
        let expected = Ideal::new(&r, ps(&r, &["3*x2^2*xi1 - 2*x1*xi2"]), MonomialOrder::GrevLex);
        assert!(e.same_as(&expected).unwrap());
    }

    #[test]
    fn gradings() {
        let r = Ring::standard(2);
        assert_eq!(positive_grading(&ps(&r, &["x1^2 + x2^3"])), Some(vec![3, 2]));
        assert_eq!(positive_grading(&ps(&r, &["x1^2 + x2^3", "x1*x2"])), Some(vec![3, 2]));
        assert_eq!(positive_grading(&ps(&r, &["x1 + x1^2"])), None);
        assert_eq!(germ_order(&ps(&r, &["x1 + x1^2"])), MonomialOrder::NegDegRevLex);
    }

    #[test]
    fn intersections() {
        let r = Ring::standard(2);
        let a = Ideal::new(&r, ps(&r, &["x1"]), MonomialOrder::GrevLex);
        let b = Ideal::new(&r, ps(&r, &["x2"]), MonomialOrder::GrevLex);
        let c = intersect(&a, &b).unwrap();
        assert_eq!(c.gens(), ps(&r, &["x1*x2"]).as_slice());
        let d = intersect(&a, &a).unwrap();
        assert_eq!(d.gens(), ps(&r, &["x1"]).as_slice());
    }

    #[test]
    fn quotient_and_saturation() {
        let r = Ring::standard(2);
        let i = Ideal::new(&r, ps(&r, &["x1^2*x2", "x1^3"]), MonomialOrder::GrevLex);
        let q = ideal_quotient(&i, &Poly::var(&r, 0)).unwrap();
        let expected = Ideal::new(&r, ps(&r, &["x1*x2", "x1^2"]), MonomialOrder::GrevLex);
        assert!(q.same_as(&expected).unwrap());
        let s = saturate(&i, &Poly::var(&r, 0)).unwrap();
        assert!(s.is_unit().unwrap());
    }

    #[test]
    fn koszul_syzygy() {
        let r = Ring::standard(2);
        let rows = syzygies(&ps(&r, &["x1", "x2"]), &Limits::default()).unwrap();
        let m = Submodule::new(&r, &rows, 2, &Limits::default()).unwrap();
        assert!(m.contains(&ps(&r, &["x2", "-x1"])).unwrap());
        assert!(!m.contains(&ps(&r, &["1", "0"])).unwrap());
    }

    #[test]
    fn euler_relation_is_a_syzygy() {
        let r = Ring::standard(2);
        let fs = ps(&r, &["2*x1", "3*x2^2", "-(x1^2+x2^3)"]);
        let rows = syzygies(&fs, &Limits::default()).unwrap();
        for row in &rows {
            assert!(is_syzygy(row, &fs));
        }
        let m = Submodule::new(&r, &rows, 3, &Limits::default()).unwrap();
        assert!(m.contains(&ps(&r, &["1/2*x1", "1/3*x2", "1"])).unwrap());
    }

    #[test]
    fn single_generator_has_no_syzygy() {
        let r = Ring::standard(2);
        assert!(syzygies(&ps(&r, &["x1^2+x2"]), &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn regular_sequences() {
        let r = Ring::standard(3);
        let o = MonomialOrder::GrevLex;
        let l = Limits::default();
        assert!(is_regular_sequence(&ps(&r, &["x1", "x2", "x3"]), 3, &o, &l).unwrap());
        assert!(!is_regular_sequence(&ps(&r, &["x1", "x1*x2"]), 3, &o, &l).unwrap());
    }
}
