use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::bfunction::BFunction;
use super::op::WeylOp;
use super::twisted::TwistedElem;
use crate::error::{Error, Result};
use crate::groebner::Limits;
use crate::linalg::{Echelon, SparseRow};
use crate::poly::{Exp, Poly, Ring};
use crate::rational::Q;

/// The section `m = num / prod g_i^e_i` that gets twisted by `f^s`.
#[derive(Debug, Clone)]
pub struct Section {
    pub num: Poly,
    pub bases: Vec<(Poly, u32)>,
}

impl Section {
    pub fn one(ring: &Arc<Ring>) -> Section {
        Section {
            num: Poly::one(ring),
            bases: Vec::new(),
        }
    }

    pub fn inverse_of(g: &Poly) -> Section {
        Section {
            num: Poly::one(g.ring()),
            bases: vec![(g.clone(), 1)],
        }
    }
}

/// Search bounds: operator order, x-degree of the coefficients, degree of b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_order: u32,
    pub max_coeff_deg: u32,
    pub max_b_deg: u32,
}

impl Bounds {
    pub fn new(max_order: u32, max_coeff_deg: u32, max_b_deg: u32) -> Bounds {
        Bounds {
            max_order,
            max_coeff_deg,
            max_b_deg,
        }
    }
}

/// A verified identity `b(s) m f^s = P(s) m f^(s+1)`.
#[derive(Debug, Clone)]
pub struct FunctionalEquation {
    /// Ring of `f` extended by the parameter `s`.
    pub ring: Arc<Ring>,
    pub s: usize,
    pub b: BFunction,
    pub op: WeylOp,
    pub f: Poly,
    pub section: Section,
}

impl FunctionalEquation {
    /// Re-expands both sides and compares exactly.
    pub fn verify(&self) -> Result<bool> {
        let (lhs_elem, rhs_elem) = twisted_pair(&self.f, &self.section, self.s)?;
        let bpoly = b_poly(&self.ring, self.s, &self.b.coeffs());
        let lhs = lhs_elem.mul_poly(&bpoly);
        let rhs = rhs_elem.apply(&self.op)?;
        lhs.same_value(&rhs)
    }
}

fn b_poly(ring: &Arc<Ring>, s: usize, coeffs: &[Q]) -> Poly {
    let sv = Poly::var(ring, s);
    coeffs
        .iter()
        .enumerate()
        .fold(Poly::zero(ring), |acc, (k, c)| &acc + &sv.pow(k as u32).scale(c))
}

/// `(m f^s, m f^(s+1))` in the ring carrying `s`.
fn twisted_pair(f: &Poly, m: &Section, s: usize) -> Result<(TwistedElem, TwistedElem)> {
    let lo = TwistedElem::new(m.num.clone(), f.clone(), 0, m.bases.clone(), Some(s))?;
    let hi = TwistedElem::new(&m.num * f, f.clone(), 0, m.bases.clone(), Some(s))?;
    Ok((lo, hi))
}

fn monomials_up_to(n_base: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; n_base]];
    let mut layer = out.clone();
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &layer {
            for i in 0..n_base {
                let mut c = m.clone();
                c[i] += 1;
                if !next.contains(&c) {
                    next.push(c);
                }
            }
        }
        next.sort_by(|a: &Vec<u32>, b| b.cmp(a));
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Searches for `b(s) m f^s = P(s) m f^(s+1)` with `P` of order at most
/// `max_order`, coefficients of x-degree at most `max_coeff_deg` and
/// s-degree at most the order, and monic `b` of degree at most
/// `max_b_deg`. The returned `b` has the least degree among all solutions
/// within the bounds; among those the smallest order is used. The result
/// is re-verified before being returned.
///
/// `f` and the section live in a ring of base variables; the parameter `s`
/// is appended.
pub fn solve_functional_equation(f: &Poly, m: &Section, bounds: Bounds, limits: &Limits) -> Result<FunctionalEquation> {
    if f.is_zero() {
        return Err(Error::Precondition("f must be nonzero".into()));
    }
    if !f.constant_term().is_zero() {
        return Err(Error::Precondition("f must vanish at the origin".into()));
    }
    let base_ring = f.ring().clone();
    if base_ring.nvars() != base_ring.base_indices().len() {
        return Err(Error::Precondition("f must live in a ring of base variables".into()));
    }
    let ring = base_ring.with_params(&["s"]);
    let s = ring.nvars() - 1;
    let fs = f.embed(&ring)?;
    let section = Section {
        num: m.num.embed(&ring)?,
        bases: m
            .bases
            .iter()
            .map(|(g, e)| Ok((g.embed(&ring)?, *e)))
            .collect::<Result<Vec<_>>>()?,
    };
    let (lo, hi) = twisted_pair(&fs, &section, s)?;
    let derivs = hi.derivatives(bounds.max_order);
    let n_base = base_ring.nvars();
    let alphas = monomials_up_to(n_base, bounds.max_coeff_deg);

    let mut best: Option<(u32, Vec<Q>, WeylOp)> = None;
    for order in 1..=bounds.max_order {
        check_deadline(limits)?;
        let d_cap = match &best {
            Some((d, _, _)) => *d,
            None => bounds.max_b_deg + 1,
        };
        if d_cap == 0 {
            break;
        }
        let layer: Vec<&(Exp, TwistedElem)> = derivs
            .iter()
            .filter(|(b, _)| b.iter().sum::<u32>() <= order)
            .collect();
        let mut elems: Vec<&TwistedElem> = layer.iter().map(|(_, e)| e).collect();
        elems.push(&lo);
        let (a, es) = TwistedElem::common_frame(&elems);
        let lifted: Vec<Poly> = layer.iter().map(|(_, e)| e.lift_to(a, &es)).collect();
        let l0 = lo.lift_to(a, &es);

        // Columns ordered simplest first so that pivots, which receive the
        // nonzero values, fall on low-degree coefficients.
        let mut columns: Vec<(usize, &Vec<u32>, u32)> = Vec::new();
        for alpha in &alphas {
            for i in 0..=order {
                for k in 0..layer.len() {
                    columns.push((k, alpha, i));
                }
            }
        }
        columns.sort_by_key(|&(k, alpha, i)| {
            let da: u32 = alpha.iter().sum();
            let db: u32 = layer[k].0.iter().sum();
            (da, i, db)
        });
        let sv = Poly::var(&ring, s);
        let spow: Vec<Poly> = (0..=order.max(bounds.max_b_deg)).map(|i| sv.pow(i)).collect();
        let mut col_polys: Vec<Poly> = Vec::with_capacity(columns.len());
        for &(k, alpha, i) in &columns {
            let mut e = vec![0u32; ring.nvars()];
            e[..n_base].copy_from_slice(alpha);
            let x = Poly::monomial(&ring, e, Q::one());
            col_polys.push(&(&x * &spow[i as usize]) * &lifted[k]);
        }
        let nc = columns.len();
        for d in 0..d_cap {
            check_deadline(limits)?;
            // unknowns: P-coefficients, then beta_0..beta_{d-1}
            let mut polys: Vec<Poly> = col_polys.clone();
            for k in 0..d {
                polys.push(-(&spow[k as usize] * &l0));
            }
            let rhs = &spow[d as usize] * &l0;
            let ncols = nc + d as usize;
            let Some(x) = solve_columns(&polys, &rhs, ncols) else {
                continue;
            };
            let mut op = WeylOp::zero(&ring);
            for (j, &(k, alpha, i)) in columns.iter().enumerate() {
                if x[j].is_zero() {
                    continue;
                }
                let mut e = vec![0u32; ring.nvars()];
                e[..n_base].copy_from_slice(alpha);
                e[s] = i;
                op.add_term(layer[k].0.clone(), Poly::monomial(&ring, e, x[j].clone()));
            }
            let mut coeffs: Vec<Q> = x[nc..].to_vec();
            coeffs.push(Q::one());
            best = Some((d, coeffs, op));
            break;
        }
    }
    let Some((_, coeffs, op)) = best else {
        return Err(Error::NotFound(format!(
            "no functional equation within bounds (order {}, coefficient degree {}, b degree {})",
            bounds.max_order, bounds.max_coeff_deg, bounds.max_b_deg
        )));
    };
    let eq = FunctionalEquation {
        ring: ring.clone(),
        s,
        b: BFunction::from_coeffs(&coeffs),
        op,
        f: fs,
        section,
    };
    if !eq.verify()? {
        return Err(Error::Precondition("functional equation failed re-verification".into()));
    }
    Ok(eq)
}

fn check_deadline(limits: &Limits) -> Result<()> {
    match limits.deadline {
        Some(t) if std::time::Instant::now() > t => Err(Error::Timeout),
        _ => Ok(()),
    }
}

/// Solves `sum_j x_j polys[j] = rhs` coefficientwise; free unknowns are 0.
fn solve_columns(polys: &[Poly], rhs: &Poly, ncols: usize) -> Option<Vec<Q>> {
    let mut rows: BTreeMap<&Exp, SparseRow> = BTreeMap::new();
    for (j, p) in polys.iter().enumerate() {
        for (e, c) in p.terms() {
            rows.entry(e).or_default().push((j, c.clone()));
        }
    }
    for (e, c) in rhs.terms() {
        rows.entry(e).or_default().push((ncols, c.clone()));
    }
    let mut ech = Echelon::new();
    for (_, row) in rows {
        ech.insert(row);
    }
    ech.back_substitute(ncols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::rational::{q, qr};

    fn solve(f: &str, vars: &[&str], b: Bounds) -> FunctionalEquation {
        let r = Ring::base(vars).unwrap();
        let f = parse_poly(f, &r).unwrap();
        solve_functional_equation(&f, &Section::one(&r), b, &Limits::default()).unwrap()
    }

    #[test]
    fn smooth_germ() {
        let eq = solve("x1", &["x1"], Bounds::new(1, 1, 1));
        assert_eq!(eq.b.roots(), &[(q(-1), 1)]);
        assert_eq!(eq.op.to_string(), "dx1");
    }

    #[test]
    fn cube() {
        let eq = solve("x1^3", &["x1"], Bounds::new(3, 0, 3));
        assert_eq!(eq.b.root_set(), vec![qr(-1, 3), qr(-2, 3), q(-1)]);
        assert_eq!(eq.op.to_string(), "1/27*dx1^3");
    }

    #[test]
    fn sum_of_squares() {
        let eq = solve("x1^2 + x2^2", &["x1", "x2"], Bounds::new(2, 0, 2));
        assert_eq!(eq.b.roots(), &[(q(-1), 2)]);
        assert!(eq.verify().unwrap());
    }

    #[test]
    fn twisted_section() {
        // b((1/x1) x1^s) has root 0 only: d1 x1^(s-1+1) = s x1^(s-1)
        let r = Ring::base(&["x1"]).unwrap();
        let x = Poly::var(&r, 0);
        let eq = solve_functional_equation(&x, &Section::inverse_of(&x), Bounds::new(1, 0, 1), &Limits::default()).unwrap();
        assert_eq!(eq.b.roots(), &[(q(0), 1)]);
    }

    #[test]
    fn not_found_within_bounds() {
        let r = Ring::base(&["x1"]).unwrap();
        let f = parse_poly("x1^3", &r).unwrap();
        let err = solve_functional_equation(&f, &Section::one(&r), Bounds::new(2, 0, 3), &Limits::default());
        assert!(matches!(err, Err(Error::NotFound(_))));
    }
}
