use std::time::Duration;

use dcond_core::bernstein::{bs_monomial, bs_quasihomogeneous, decide_b, BOptions, FactoredGerm};
use dcond_core::conditions::{
    decide_a_inv, decide_free, decide_koszul, decide_l, propagate_implications, verify_generic_arrangement,
    ArrangementSpec, Condition, ConditionLattice,
};
use dcond_core::conormal::{
    arrangement_ann_generators, arrangement_section, condition_w, conormal_ideal,
};
use dcond_core::family::CurveFamily;
use dcond_core::groebner::Limits;
use dcond_core::logder::condition_h;
use dcond_core::verdict::{Decision, TraceStep, Verdict};
use dcond_core::weyl::{annihilates, solve_functional_equation, Bounds, Section, TwistedElem};
use dcond_core::{Error, Result};
use rayon::prelude::*;

use crate::input::{parse_weights, Germ};

/// Resource settings; each check gets a fresh deadline.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_steps: u64,
    pub timeout_secs: f64,
}

impl Budget {
    pub fn limits(&self) -> Limits {
        Limits::with_steps(self.max_steps).with_timeout(Duration::from_secs_f64(self.timeout_secs))
    }
}

/// Conditions accepted by `--conditions`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Lattice(Condition),
    Free,
    Koszul,
}

impl Check {
    pub fn parse(s: &str) -> Option<Check> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FREE" => Some(Check::Free),
            "KOSZUL" => Some(Check::Koszul),
            _ => Condition::from_name(s).map(Check::Lattice),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Check::Lattice(c) => c.name(),
            Check::Free => "free",
            Check::Koszul => "Koszul",
        }
    }

    /// Conditions with a decision procedure of their own.
    fn is_direct(self) -> bool {
        !matches!(
            self,
            Check::Lattice(Condition::G | Condition::M | Condition::AH | Condition::ALog)
        )
    }
}

pub fn parse_checks(list: &str) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in list.split(',').filter(|s| !s.trim().is_empty()) {
        let c = Check::parse(s).ok_or_else(|| Error::Unsupported(format!("unknown condition `{}`", s.trim())))?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn run_direct(check: Check, germ: &Germ, budget: Budget) -> Result<Decision> {
    let limits = budget.limits();
    let h = &germ.h;
    match check {
        Check::Free => decide_free(h, &limits),
        Check::Koszul => decide_koszul(h, &limits),
        Check::Lattice(c) => match c {
            Condition::H => condition_h(h, &limits),
            Condition::B => match decide_b(&germ.factored, &BOptions::default(), &limits) {
                Ok(v) => Ok(v.to_decision()),
                Err(e) => Decision::from_error(e),
            },
            Condition::W => condition_w(h, &limits),
            Condition::L => decide_l(h, &limits),
            Condition::AInv => decide_a_inv(&germ.factored, &limits),
            _ => unreachable!("no direct procedure"),
        },
    }
}

/// Runs the requested checks, filling conditions without a procedure of
/// their own (and undecided ones) from the implication lattice.
pub fn check(germ: &Germ, checks: &[Check], budget: Budget) -> Result<Vec<(Check, Decision)>> {
    let needs_lattice = checks.iter().any(|c| !c.is_direct());
    let mut todo: Vec<Check> = checks.iter().copied().filter(|c| c.is_direct()).collect();
    if needs_lattice {
        for c in [Condition::H, Condition::B, Condition::L, Condition::AInv, Condition::W] {
            if !todo.contains(&Check::Lattice(c)) {
                todo.push(Check::Lattice(c));
            }
        }
    }
    let results: Vec<(Check, Decision)> = todo
        .par_iter()
        .map(|&c| run_direct(c, germ, budget).map(|d| (c, d)))
        .collect::<Result<_>>()?;
    let mut lattice = ConditionLattice::new();
    for (c, d) in &results {
        if let (Check::Lattice(cond), true) = (c, d.verdict.is_decided()) {
            lattice.set(*cond, d.verdict == Verdict::Holds, "computed")?;
        }
    }
    let closed = propagate_implications(&lattice)?;
    let mut out = Vec::new();
    for &c in checks {
        let found = results.iter().find(|(r, _)| *r == c).map(|(_, d)| d.clone());
        let d = match (c, found) {
            (_, Some(d)) if d.verdict.is_decided() => d,
            (Check::Lattice(cond), found) => match closed.get(cond) {
                Some(v) if closed.provenance(cond) != Some("computed") => {
                    let mut d = found.unwrap_or_else(|| Decision::unknown(""));
                    d.verdict = Verdict::from_bool(v);
                    d.trace.push(TraceStep::new(
                        "lattice",
                        "implications between the conditions",
                        closed.provenance(cond).unwrap_or_default().to_string(),
                    ));
                    d
                }
                _ => found.unwrap_or_else(|| Decision::unknown("no procedure and not implied by the computed verdicts")),
            },
            (_, Some(d)) => d,
            (_, None) => unreachable!("direct checks are run"),
        };
        out.push((c, d));
    }
    Ok(out)
}

/// Bounded functional-equation search, cross-checked with the closed
/// formulas when they apply.
pub fn bfun(germ: &Germ, bounds: Bounds, weights: Option<&str>, budget: Budget) -> Result<Decision> {
    let limits = budget.limits();
    let h = &germ.h;
    if let Some(w) = weights {
        parse_weights(w, h)?;
    }
    let closed = closed_form(&germ.factored, &limits)?;
    let eq = match solve_functional_equation(h, &Section::one(&germ.ring), bounds, &limits) {
        Ok(eq) => Some(eq),
        Err(Error::NotFound(_)) => None,
        Err(e) if e.is_resource_limit() => None,
        Err(e) => return Err(e),
    };
    let citation = "b(s) h^s = P(s) h^(s+1), verified by expansion";
    let mut d = match (&eq, &closed) {
        (Some(eq), _) => {
            let smallest = eq.b.smallest_integral_root();
            let exact = closed.as_ref().is_some_and(|(_, b)| *b == eq.b);
            let verdict = if smallest == Some(-dcond_core::Q::from_integer(1.into())) {
                Verdict::Holds
            } else if exact {
                Verdict::Fails
            } else {
                Verdict::Unknown("bounded search: b may be a multiple of the Bernstein-Sato polynomial".into())
            };
            Decision::new(verdict)
                .step("solver", citation, format!("b = {} with P of order {}", eq.b, eq.op.order()))
                .cert("b", &eq.b)
                .cert("P", &eq.op)
        }
        (None, Some((_, b))) => {
            let smallest = b.smallest_integral_root();
            Decision::new(Verdict::from_bool(smallest == Some(-dcond_core::Q::from_integer(1.into()))))
                .step("solver", citation, "no equation within the bounds")
                .cert("b", b)
        }
        (None, None) => Decision::unknown("no functional equation within the bounds"),
    };
    if let Some((rule, b)) = &closed {
        d.push_step(rule, "closed formula", format!("b = {b}"));
        d = d.cert("closed_form", b);
    }
    let roots = eq.as_ref().map(|e| e.b.clone()).or(closed.map(|c| c.1));
    if let Some(b) = roots {
        let r: Vec<String> = b.root_set().iter().map(dcond_core::rational::fmt_q).collect();
        d = d.cert("roots", r.join(", "));
    }
    Ok(d)
}

fn closed_form(g: &FactoredGerm, limits: &Limits) -> Result<Option<(&'static str, dcond_core::weyl::BFunction)>> {
    let g = g.compact();
    let base = g.ring().base_indices();
    let coordinate = g.factors().iter().all(|(f, _)| f.is_monomial() && f.total_degree() == 1);
    if coordinate {
        let mut gamma = vec![0; base.len()];
        for (f, m) in g.factors() {
            let i = f.support_vars()[0];
            gamma[base.iter().position(|&j| j == i).expect("base")] = *m;
        }
        return Ok(Some(("monomial", bs_monomial(&gamma))));
    }
    match bs_quasihomogeneous(&g.product(), limits) {
        Ok(Some(b)) => Ok(Some(("quasi-homogeneous", b))),
        Ok(None) => Ok(None),
        Err(e) if e.is_resource_limit() => Ok(None),
        Err(e) => Err(e),
    }
}

fn annihilation_decision(germ: &Germ, distinguished: usize, limits: &Limits) -> Result<Decision> {
    let gens = arrangement_ann_generators(&germ.factors, distinguished, limits)?;
    let sec = arrangement_section(&germ.factors, distinguished)?;
    let mut d = Decision::new(Verdict::Holds);
    for (i, g) in gens.generators.iter().enumerate() {
        let op = g.op.embed(sec.ring())?;
        if !annihilates(&op, &sec, None)? {
            d.verdict = Verdict::Fails;
        }
        let s: Vec<String> = g.subset.iter().map(|i| (i + 1).to_string()).collect();
        let k: Vec<String> = g.k.iter().map(|i| i.to_string()).collect();
        d = d.cert(format!("op{:02} S={{{}}} K={{{}}}", i + 1, s.join(","), k.join(",")), &g.op);
    }
    d.push_step(
        "ann-check",
        "Delta_K fields of sub-morphisms times the complementary factors annihilate (1/h~) h1^s",
        format!("{} operators applied to the section", gens.generators.len()),
    );
    for v in &gens.violations {
        d.push_step("hypothesis", "generation needs n >= 3 and a generic arrangement", v.clone());
    }
    Ok(d)
}

pub fn arrangement(germ: &Germ, distinguished: usize, weights: Option<&str>, budget: Budget) -> Result<Vec<(String, Decision)>> {
    if germ.factors.len() < 2 {
        return Err(Error::Precondition("pass at least two --factor arguments".into()));
    }
    if distinguished == 0 || distinguished > germ.factors.len() {
        return Err(Error::Index(format!("--distinguished {distinguished} of {}", germ.factors.len())));
    }
    let spec = ArrangementSpec {
        factors: germ.factors.clone(),
    };
    let mut out = Vec::new();
    let generic = verify_generic_arrangement(&spec, &budget.limits())?;
    out.push(("generic".to_string(), generic));
    out.push(("annihilation".to_string(), annihilation_decision(germ, distinguished - 1, &budget.limits())?));
    let mut a = decide_a_inv(&germ.factored, &budget.limits())?;
    if let (Some(w), 2) = (weights, germ.factors.len()) {
        let w = parse_weights(w, &germ.h)?;
        let d = dcond_core::conditions::corpdeux_decision(&germ.factors[0], &germ.factors[1], &w, &budget.limits())?;
        if a.verdict.is_decided() && d.verdict.is_decided() && a.verdict != d.verdict {
            return Err(Error::Contradiction {
                edge: "given weights / detected weights".into(),
                detail: "the weight test disagrees".into(),
            });
        }
        if !a.verdict.is_decided() {
            a = d;
        }
    }
    out.push(("A(1/h)".to_string(), a));
    Ok(out)
}

/// Annihilation certificates: arrangement generators for factored input,
/// the three operators (and their relation) for `(x1 - x2 x3) g` with `g`
/// a homogeneous cubic.
pub fn verify_ann(germ: &Germ, distinguished: usize, budget: Budget) -> Result<Vec<(String, Decision)>> {
    let limits = budget.limits();
    if germ.factors.len() >= 2 {
        if distinguished == 0 || distinguished > germ.factors.len() {
            return Err(Error::Index(format!("--distinguished {distinguished} of {}", germ.factors.len())));
        }
        return Ok(vec![("annihilation".into(), annihilation_decision(germ, distinguished - 1, &limits)?)]);
    }
    let g = CurveFamily::split(&germ.h)
        .ok_or_else(|| Error::Unsupported("expected (x1 - x2*x3)*g(x1,x2) or several --factor arguments".into()))?;
    let fam = CurveFamily::new(&g, &limits)?;
    let ring = fam.ring().with_params(&["s"]);
    let s = ring.nvars() - 1;
    let ops = fam.annihilator_ops(&ring)?;
    let sec = TwistedElem::new(
        dcond_core::Poly::one(&ring),
        fam.g().embed(&ring)?,
        0,
        vec![(fam.l().embed(&ring)?, 1)],
        Some(s),
    )?;
    let mut ann = Decision::new(Verdict::Holds).step(
        "ann-check",
        "the three operators annihilate (1/(x1 - x2 x3)) g^s",
        format!("g = {}", fam.g()),
    );
    for (i, op) in ops.iter().enumerate() {
        if !annihilates(op, &sec, None)? {
            ann.verdict = Verdict::Fails;
        }
        ann = ann.cert(format!("S{}", i + 1), op);
    }
    let (lhs, rhs) = fam.annihilator_relation(&ring)?;
    let rel = Decision::new(Verdict::from_bool(lhs == rhs))
        .step(
            "relation",
            "S3 lies in the left ideal of T1, T2, T3",
            "both sides expanded in normal order",
        )
        .cert("lhs", &lhs)
        .cert("rhs", &rhs);
    Ok(vec![("annihilation".into(), ann), ("relation".into(), rel)])
}

pub fn conormal(germ: &Germ, budget: Budget) -> Result<Vec<(String, Decision)>> {
    let limits = budget.limits();
    let ideal = match conormal_ideal(&germ.h, &limits) {
        Ok(i) => i,
        Err(e) if e.is_resource_limit() => {
            return Ok(vec![("conormal".into(), Decision::unknown(e.to_string()))]);
        }
        Err(e) => return Err(e),
    };
    let basis = match ideal.basis() {
        Ok(b) => b,
        Err(e) => return Ok(vec![("conormal".into(), Decision::from_error(e)?)]),
    };
    let mut d = Decision::new(Verdict::Holds).step(
        "conormal",
        "closure of {(x, lambda dh(x))}, by elimination of lambda",
        format!("{} generators", basis.len()),
    );
    for (i, g) in basis.iter().enumerate() {
        d = d.cert(format!("g{:02}", i + 1), g);
    }
    let w = condition_w(&germ.h, &budget.limits())?;
    Ok(vec![("conormal".into(), d), ("W".into(), w)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::parse_germ;

    fn budget() -> Budget {
        Budget {
            max_steps: 1_000_000,
            timeout_secs: 60.0,
        }
    }

    #[test]
    fn condition_names() {
        let c = parse_checks("H,b,KOSZUL,A_INV,free,A(h)").unwrap();
        assert_eq!(c.len(), 6);
        assert!(parse_checks("Q").is_err());
    }

    #[test]
    fn lattice_fills_m_from_a_inv() {
        let g = parse_germ(None, Some("x1^2+x2^3"), &[]).unwrap();
        let out = check(&g, &[Check::Lattice(Condition::M)], budget()).unwrap();
        assert_eq!(out[0].1.verdict, Verdict::Holds);
        assert_eq!(out[0].1.trace.last().unwrap().rule, "lattice");
    }

    #[test]
    fn bfun_cube() {
        let g = parse_germ(Some("x"), Some("x^3"), &[]).unwrap();
        let d = bfun(&g, Bounds::new(3, 0, 3), None, budget()).unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
        let roots = d.certificate.iter().find(|(k, _)| k == "roots").unwrap();
        assert_eq!(roots.1, "-1/3, -2/3, -1");
    }
}
