//! The surfaces `h = (x1 - x2 x3) g(x1, x2)` for a weighted homogeneous
//! reduced plane curve `g`: explicit logarithmic fields, characteristic
//! variety ideals and annihilating operators.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groebner::{Ideal, Limits, MonomialOrder, QuotientBasis};
use crate::logder::LogDeriv;
use crate::poly::{detect_weights, parse_poly, Poly, Ring, WeightSystem};
use crate::rational::Q;
use crate::weyl::WeylOp;

/// `h = l g` with `l = x1 - x2 x3` in the ring of `x1, x2, x3`.
#[derive(Debug, Clone)]
pub struct CurveFamily {
    ring: Arc<Ring>,
    g: Poly,
    l: Poly,
    h: Poly,
    weights: WeightSystem,
}

fn x(ring: &Arc<Ring>, i: usize) -> Poly {
    Poly::var(ring, i)
}

impl CurveFamily {
    /// Builds the family member for `g`, a polynomial in the first two
    /// variables of a ring with exactly three base variables. `g` must be
    /// weighted homogeneous, reduced and of multiplicity at least 3.
    pub fn new(g: &Poly, limits: &Limits) -> Result<CurveFamily> {
        let ring = g.ring().clone();
        if ring.nvars() != 3 || ring.base_indices().len() != 3 {
            return Err(Error::Precondition("the family lives in three base variables".into()));
        }
        if !g.uses_only(&[0, 1]) {
            return Err(Error::Precondition("g must depend on x1 and x2 only".into()));
        }
        if g.order() < 3 {
            return Err(Error::Precondition("g must have multiplicity at least 3".into()));
        }
        let Some(w) = detect_weights(g) else {
            return Err(Error::Precondition("g must be weighted homogeneous".into()));
        };
        if !is_reduced_plane_curve(g, limits)? {
            return Err(Error::Precondition("g must be reduced".into()));
        }
        let l = &x(&ring, 0) - &(&x(&ring, 1) * &x(&ring, 2));
        let h = &l * g;
        // weights of x1, x2 only
        let weights = WeightSystem::new(w.alpha[..2].to_vec(), w.d.clone()).expect("positive weights");
        Ok(CurveFamily {
            ring,
            g: g.clone(),
            l,
            h,
            weights,
        })
    }

    /// Parses `g` in the ring `x1, x2, x3`.
    pub fn parse(g: &str, limits: &Limits) -> Result<CurveFamily> {
        let ring = Ring::standard(3);
        CurveFamily::new(&parse_poly(g, &ring)?, limits)
    }

    /// Recognizes `h = (x1 - x2 x3) g(x1, x2)` in a ring of three base
    /// variables, returning `g` when the division is exact.
    pub fn split(h: &Poly) -> Option<Poly> {
        let ring = h.ring();
        if ring.nvars() != 3 || ring.base_indices().len() != 3 {
            return None;
        }
        let l = &x(ring, 0) - &(&x(ring, 1) * &x(ring, 2));
        let g = h.div_exact(&l)?;
        g.uses_only(&[0, 1]).then_some(g)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }

    pub fn l(&self) -> &Poly {
        &self.l
    }

    pub fn h(&self) -> &Poly {
        &self.h
    }

    /// Weights `(a1, a2)` of `g` with degree `d = 1`.
    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    pub fn is_homogeneous(&self) -> bool {
        self.weights.is_uniform()
    }

    /// Total degree of `g`.
    pub fn degree(&self) -> u32 {
        self.g.total_degree() as u32
    }

    fn gx(&self, i: usize) -> Poly {
        self.g.diff(i)
    }

    /// `p(x3, 1)`: substitutes `x1 := x3`, `x2 := 1`.
    pub fn at_x3_1(&self, p: &Poly) -> Poly {
        p.subst(0, &x(&self.ring, 2)).subst(1, &Poly::one(&self.ring))
    }

    /// `(u, v)` of x3-degree at most 1 with `x3 g_x1 + g_x2 = u x1 - v x2`.
    pub fn hfree_uv(&self) -> Result<(Poly, Poly)> {
        let split = |p: &Poly| -> Result<(Poly, Poly)> {
            let r = &self.ring;
            let mut a = Poly::zero(r);
            let mut b = Poly::zero(r);
            for (e, c) in p.terms() {
                let mut e = e.clone();
                if e[0] > 0 {
                    e[0] -= 1;
                    a = &a + &Poly::monomial(r, e, c.clone());
                } else if e[1] > 0 {
                    e[1] -= 1;
                    b = &b + &Poly::monomial(r, e, c.clone());
                } else {
                    return Err(Error::Precondition("partial derivative of g not in (x1, x2)".into()));
                }
            }
            Ok((a, b))
        };
        let (a1, b1) = split(&self.gx(0))?;
        let (a2, b2) = split(&self.gx(1))?;
        let x3 = x(&self.ring, 2);
        let u = &(&x3 * &a1) + &a2;
        let v = -(&(&x3 * &b1) + &b2);
        Ok((u, v))
    }

    /// The three logarithmic fields
    /// `d1 = a1 x1 d_1 + a2 x2 d_2 + (a1 - a2) x3 d_3`,
    /// `d2 = g_x2 d_1 - g_x1 d_2 + (x3 u - v) d_3`, `d3 = (x1 - x2 x3) d_3`.
    pub fn hfree_fields(&self) -> Result<Vec<LogDeriv>> {
        self.fields_with(&self.weights.alpha[0], &self.weights.alpha[1])
    }

    fn fields_with(&self, a1: &Q, a2: &Q) -> Result<Vec<LogDeriv>> {
        let r = &self.ring;
        let (u, v) = self.hfree_uv()?;
        let x3 = x(r, 2);
        let d1 = vec![
            x(r, 0).scale(a1),
            x(r, 1).scale(a2),
            x3.scale(&(a1 - a2)),
        ];
        let d2 = vec![self.gx(1), -&self.gx(0), &(&x3 * &u) - &v];
        let d3 = vec![Poly::zero(r), Poly::zero(r), self.l.clone()];
        [d1, d2, d3]
            .into_iter()
            .map(|c| LogDeriv::from_field(&self.h, c).ok_or_else(|| Error::Precondition("field is not logarithmic".into())))
            .collect()
    }

    /// Quotients of `g_x1`, `g_x2` by `x1 - x2 x3` (division in `x1`).
    pub fn gtilde(&self) -> (Poly, Poly) {
        let q = |p: &Poly| {
            let rem = p.subst(0, &(&x(&self.ring, 1) * &x(&self.ring, 2)));
            (p - &rem).div_exact(&self.l).expect("remainder removed")
        };
        (q(&self.gx(0)), q(&self.gx(1)))
    }

    fn require_homogeneous(&self) -> Result<u32> {
        if !self.is_homogeneous() {
            return Err(Error::Precondition("g must be homogeneous".into()));
        }
        Ok(self.degree())
    }

    /// Ideals `I1` (conormal of `g`), `I2` (conormal of the restriction to
    /// `x1 = x2 x3`) and the three-generator ideal, in the cotangent ring.
    pub fn characteristic_ideals(&self) -> Result<CharacteristicIdeals> {
        let p = self.require_homogeneous()?;
        let cot = self.ring.cotangent(&[]);
        let e = |q: &Poly| q.embed(&cot).expect("sub-ring");
        let xi = |i: usize| Poly::var(&cot, 3 + i);
        let pq = Q::from_integer(p.into());
        let (g1, g2) = (e(&self.gx(0)), e(&self.gx(1)));
        let g1c = e(&self.at_x3_1(&self.gx(0)));
        let g2c = e(&self.at_x3_1(&self.gx(1)));
        let gc = e(&self.at_x3_1(&self.g));
        let x2 = Poly::var(&cot, 1);
        let l = e(&self.l);
        let ham = &(&g2 * &xi(0)) - &(&g1 * &xi(1));
        let restricted = &(&(&(&x2 * &g2c) * &xi(0)) - &(&(&x2 * &g1c) * &xi(1))) + &(&gc * &xi(2)).scale(&pq);
        let i1 = vec![xi(2), ham.clone()];
        let i2 = vec![l.clone(), restricted.clone()];
        let third = vec![
            &l * &xi(2),
            &ham + &(&(&x2.pow(p - 2) * &gc) * &xi(2)).scale(&pq),
            &restricted * &xi(2),
        ];
        Ok((cot, i1, i2, third))
    }

    /// `S1, S2, S3` annihilating `(1/(x1 - x2 x3)) g^s` for `g` homogeneous
    /// of degree 3, in `ring` (this family's ring extended by parameters).
    pub fn annihilator_ops(&self, ring: &Arc<Ring>) -> Result<Vec<WeylOp>> {
        let p = self.require_homogeneous()?;
        if p != 3 {
            return Err(Error::Precondition("g must be homogeneous of degree 3".into()));
        }
        let parts = self.operator_parts(ring)?;
        Ok(vec![parts.s1, parts.s2, parts.s3])
    }

    fn operator_parts(&self, ring: &Arc<Ring>) -> Result<OperatorParts> {
        let e = |q: &Poly| q.embed(ring);
        let d = |i: usize| WeylOp::partial(ring, ring.index_of(&self.ring.var(i).name).expect("embedded"));
        let c = |q: &Poly| -> Result<WeylOp> { Ok(WeylOp::from_poly(&e(q)?)) };
        let three = Q::from_integer(3.into());
        let (gt1, gt2) = self.gtilde();
        let x3 = x(&self.ring, 2);
        let u = &(&x3 * &gt1) + &gt2;
        let g1c = self.at_x3_1(&self.gx(0));
        let g2c = self.at_x3_1(&self.gx(1));
        let gc = self.at_x3_1(&self.g);
        let x2 = x(&self.ring, 1);
        let s1 = &(&c(&self.l)? * &d(2)) - &c(&x2)?;
        let s2 = &(&(&(&c(&self.gx(1))? * &d(0)) - &(&c(&self.gx(0))? * &d(1))) + &(&c(&(&x2 * &gc).scale(&three))? * &d(2)))
            + &c(&u)?;
        let bracket = &(&(&c(&(&x2 * &g2c))? * &d(0)) - &(&c(&(&x2 * &g1c))? * &d(1))) + &(&c(&gc.scale(&three))? * &d(2));
        let tilde_field = &(&c(&gt2)? * &d(0)) - &(&c(&gt1)? * &d(1));
        let s3 = &(&(&(&bracket * &d(2)) + &tilde_field) + &(&c(&g1c.scale(&three))? * &d(2))) + &c(&u.diff(0))?;
        Ok(OperatorParts {
            s1,
            s2,
            s3,
            bracket,
            tilde_field,
            u,
            g1c,
        })
    }

    /// Both sides of the relation
    /// `B (d_3 T1 - d_1 T3) - (d_2 + x3 d_1)(d_3 T2 - G T3)
    ///     = 2 S3 + d_1 T2 - (G + u_x1) T1`
    /// with `T1 = x1 d_1 + x2 d_2 + 4`, `T2 = S2`, `T3 = S1`,
    /// `G = gt2 d_1 - gt1 d_2` and
    /// `B = x2 g_x2(x3,1) d_1 - x2 g_x1(x3,1) d_2 + 3 g(x3,1) d_3 + 3 g_x1(x3,1)`,
    /// for `g` homogeneous of degree 3. It exhibits `S3` in the left ideal
    /// generated by `T1, T2, T3`. Returns `(lhs, rhs)`.
    pub fn annihilator_relation(&self, ring: &Arc<Ring>) -> Result<(WeylOp, WeylOp)> {
        let (lhs, rhs, _) = self.relation_sides(ring, RelationSigns::EXACT)?;
        Ok((lhs, rhs))
    }

    fn relation_sides(&self, ring: &Arc<Ring>, signs: RelationSigns) -> Result<(WeylOp, WeylOp, WeylOp)> {
        self.annihilator_ops(ring)?;
        let parts = self.operator_parts(ring)?;
        let d = |i: usize| WeylOp::partial(ring, ring.index_of(&self.ring.var(i).name).expect("embedded"));
        let c = |q: &Poly| -> Result<WeylOp> { Ok(WeylOp::from_poly(&q.embed(ring)?)) };
        let k = |v: i64| Q::from_integer(v.into());
        let x1 = x(&self.ring, 0);
        let x2 = x(&self.ring, 1);
        let x3 = x(&self.ring, 2);
        let four = Poly::constant(ring, k(4));
        let t1 = &(&(&c(&x1)? * &d(0)) + &(&c(&x2)? * &d(1))) + &WeylOp::from_poly(&four);
        let t2 = parts.s2.clone();
        let t3 = parts.s1.clone();
        let first = &parts.bracket + &c(&parts.g1c.scale(&k(3)))?;
        let second = &(&d(2) * &t2) + &(&parts.tilde_field * &t3).scale(&k(signs.g_t3));
        let lhs = &(&first * &(&(&d(2) * &t1) - &(&d(0) * &t3)))
            + &(&(&d(1) + &(&c(&x3)? * &d(0))) * &second).scale(&k(signs.second));
        let rhs = &(&parts.s3.scale(&k(signs.s3)) + &(&d(0) * &t2))
            - &(&(&parts.tilde_field + &c(&parts.u.diff(0))?) * &t1);
        Ok((lhs, rhs, parts.s3))
    }
}

/// Cotangent ring with generators of `I1`, `I2` and the three-generator
/// ideal, as returned by [`CurveFamily::characteristic_ideals`].
pub type CharacteristicIdeals = (Arc<Ring>, Vec<Poly>, Vec<Poly>, Vec<Poly>);

/// Signs in the relation between `S3` and `T1, T2, T3`.
#[derive(Debug, Clone, Copy)]
struct RelationSigns {
    g_t3: i64,
    second: i64,
    s3: i64,
}

impl RelationSigns {
    const EXACT: RelationSigns = RelationSigns {
        g_t3: -1,
        second: -1,
        s3: 2,
    };
}

struct OperatorParts {
    s1: WeylOp,
    s2: WeylOp,
    s3: WeylOp,
    bracket: WeylOp,
    tilde_field: WeylOp,
    u: Poly,
    g1c: Poly,
}

/// A plane curve germ `g(x1, x2)` is reduced iff `(g, g_x1, g_x2)` has
/// finite colength at the origin.
pub fn is_reduced_plane_curve(g: &Poly, limits: &Limits) -> Result<bool> {
    let r = g.ring();
    let mut gens = vec![g.clone(), g.diff(0), g.diff(1)];
    gens.retain(|p| !p.is_zero());
    // Only the first two variables are involved; drop the others by
    // adding them to the ideal.
    for i in 2..r.nvars() {
        gens.push(Poly::var(r, i));
    }
    let ideal = Ideal::new(r, gens, MonomialOrder::NegDegRevLex).with_limits(limits.clone());
    Ok(matches!(ideal.quotient_basis(100_000)?, QuotientBasis::Finite(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logder::saito_free_test;
    use crate::weyl::{annihilates, TwistedElem};

    fn fam(g: &str) -> CurveFamily {
        CurveFamily::parse(g, &Limits::default()).unwrap()
    }

    #[test]
    fn fields_are_logarithmic_and_free() {
        for g in ["x1^3 + x2^4", "x1*x2*(x1 + x2)", "x1^3 + x2^3"] {
            let f = fam(g);
            let fields = f.hfree_fields().unwrap();
            assert!(fields.iter().all(|d| d.verify(f.h())));
            let cert = saito_free_test(f.h(), &fields).expect(g);
            assert!(cert.verify(f.h()));
        }
    }

    #[test]
    fn uv_relation() {
        let f = fam("x1^3 + x2^4");
        let (u, v) = f.hfree_uv().unwrap();
        let r = f.ring();
        let lhs = &(&Poly::var(r, 2) * &f.g().diff(0)) + &f.g().diff(1);
        assert_eq!(lhs, &(&u * &Poly::var(r, 0)) - &(&v * &Poly::var(r, 1)));
        assert!(u.degree_in(2) <= 1 && v.degree_in(2) <= 1 && v.degree_in(0) == 0);
    }

    #[test]
    fn gtilde_for_cubic() {
        let f = fam("x1^3 + x2^3");
        let (g1, g2) = f.gtilde();
        assert_eq!(g1, parse_poly("3*x1 + 3*x2*x3", f.ring()).unwrap());
        assert!(g2.is_zero());
    }

    #[test]
    fn split_recognizes_family() {
        let r = Ring::standard(3);
        let h = parse_poly("(x1 - x2*x3)*(x1^3 + x2^4)", &r).unwrap();
        assert_eq!(CurveFamily::split(&h), Some(parse_poly("x1^3 + x2^4", &r).unwrap()));
        assert_eq!(CurveFamily::split(&parse_poly("x1*x2*x3", &r).unwrap()), None);
    }

    #[test]
    fn rejects_non_reduced_or_low_multiplicity() {
        assert!(CurveFamily::parse("x1^2 + x2^3", &Limits::default()).is_err());
        assert!(CurveFamily::parse("x1^2*(x1 + x2)", &Limits::default()).is_err());
    }

    #[test]
    fn relation_for_cubic() {
        let f = fam("x1^3 + x2^3");
        let (lhs, rhs) = f.annihilator_relation(f.ring()).unwrap();
        assert_eq!(lhs, rhs, "lhs - rhs = {}", &lhs - &rhs);
    }

    #[test]
    fn relation_with_all_plus_signs_is_off_by_four_s3() {
        let f = fam("x1^3 + x2^3");
        let plus = RelationSigns {
            g_t3: 1,
            second: 1,
            s3: -2,
        };
        let (lhs, rhs, s3) = f.relation_sides(f.ring(), plus).unwrap();
        assert_ne!(lhs, rhs);
        // Flipping only the S3 coefficient is not enough either.
        let (l2, r2, _) = f
            .relation_sides(f.ring(), RelationSigns { s3: 2, ..plus })
            .unwrap();
        assert_ne!(l2, r2);
        let exact = f.relation_sides(f.ring(), RelationSigns { s3: -2, ..RelationSigns::EXACT }).unwrap();
        assert_eq!(&exact.0 - &exact.1, s3.scale(&Q::from_integer(4.into())));
    }

    #[test]
    fn annihilators_of_cubic() {
        let f = fam("x1^3 + x2^3");
        let rs = f.ring().with_params(&["s"]);
        let s = rs.nvars() - 1;
        let g = f.g().embed(&rs).unwrap();
        let l = f.l().embed(&rs).unwrap();
        let e = TwistedElem::new(Poly::one(&rs), g, 0, vec![(l, 1)], Some(s)).unwrap();
        for op in f.annihilator_ops(&rs).unwrap() {
            assert!(annihilates(&op, &e, None).unwrap(), "{op}");
        }
    }
}

