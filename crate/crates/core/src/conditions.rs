//! Generic arrangement certificates, decision routes for A(1/h) and the
//! implication lattice between the conditions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::bernstein::{decide_b, milnor_data, BOptions, FactoredGerm};
use crate::conormal::{combinations, generic_arrangement_failures};
use crate::error::{Error, Result};
use crate::family::CurveFamily;
use crate::groebner::{germ_order, Ideal, Limits, QuotientBasis};
use crate::logder::{
    condition_h, condition_l, derlog_generators, find_free_basis, koszul_free_test, saito_free_test, FreenessCertificate,
};
use crate::poly::{detect_weights, jacobian, minor_det, Poly, WeightSystem};
use crate::rational::{fmt_q, Q};
use crate::verdict::{Decision, Verdict};

/// Factors of a candidate generic arrangement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementSpec {
    pub factors: Vec<Poly>,
}

const GENERIC: &str = "generic arrangement: every k-subfamily, k <= min(p, n), is a complete intersection with an isolated singularity";

/// Certifies that the factors form a generic arrangement with isolated
/// singularities. Fails lists the offending subfamilies.
pub fn verify_generic_arrangement(spec: &ArrangementSpec, limits: &Limits) -> Result<Decision> {
    if spec.factors.len() < 2 {
        return Err(Error::Precondition("an arrangement needs at least two factors".into()));
    }
    if let Some(i) = spec.factors.iter().position(|h| !h.constant_term().is_zero()) {
        return Err(Error::Precondition(format!("factor {} does not vanish at the origin", i + 1)));
    }
    let failures = match generic_arrangement_failures(&spec.factors, limits) {
        Ok(f) => f,
        Err(e) => return Decision::from_error(e),
    };
    let n = spec.factors[0].ring().base_indices().len();
    let kmax = spec.factors.len().min(n);
    if failures.is_empty() {
        let checked: usize = (1..=kmax).map(|k| combinations(spec.factors.len(), k).len()).sum();
        return Ok(Decision::new(Verdict::Holds)
            .step("generic", GENERIC, format!("{checked} subfamilies of size 1..{kmax} checked"))
            .cert("subfamilies", checked));
    }
    let mut d = Decision::new(Verdict::Fails).step("generic", GENERIC, failures[0].clone());
    for (i, f) in failures.iter().enumerate() {
        d = d.cert(format!("failure{}", i + 1), f);
    }
    Ok(d)
}

const CORPDEUX: &str = "two weighted homogeneous factors: A(1/h) iff for j = 1 or 2 no element of O/(h_j + K) has weight d_j k - sum(alpha), k >= 2";

fn weighted_degree(h: &Poly, w: &WeightSystem) -> Result<Q> {
    let ring = h.ring();
    let mut degs = h.terms().keys().map(|e| w.weight(ring, e));
    let d = degs.next().ok_or_else(|| Error::Precondition("zero factor".into()))?;
    if degs.any(|x| x != d) {
        return Err(Error::Precondition(format!("{h} is not weighted homogeneous for {w}")));
    }
    Ok(d)
}

/// The weight test over the finite quotients `O / (h_j + K)`, with `K` the
/// maximal minors of the Jacobian matrix of `(h1, h2)`. Fails carries, for
/// each `j`, a monomial whose weight qualifies.
pub fn corpdeux_decision(h1: &Poly, h2: &Poly, w: &WeightSystem, limits: &Limits) -> Result<Decision> {
    let ring = h1.ring();
    let base = ring.base_indices();
    let hs = [h1.clone(), h2.clone()];
    let degs = [weighted_degree(h1, w)?, weighted_degree(h2, w)?];
    let jac = jacobian(&hs, &base);
    let mut minors = Vec::new();
    for cols in combinations(base.len(), 2) {
        minors.push(minor_det(&jac, &[0, 1], &cols)?);
    }
    minors.retain(|m| !m.is_zero());
    let total = w.sum_alpha();
    let mut d = Decision::new(Verdict::Fails);
    let mut witnesses = Vec::new();
    for j in 0..2 {
        let mut gens = vec![hs[j].clone()];
        gens.extend(minors.iter().cloned());
        let ideal = Ideal::new(ring, gens.clone(), germ_order(&gens)).with_limits(limits.clone());
        let basis = match ideal.quotient_basis(20_000) {
            Ok(QuotientBasis::Finite(b)) => b,
            Ok(QuotientBasis::Infinite) => {
                return Ok(Decision::unknown(format!("O/(h{} + K) is infinite dimensional", j + 1)));
            }
            Err(e) => return Decision::from_error(e),
        };
        let hit = basis.iter().find_map(|e| {
            let k = (w.weight(ring, e) + &total) / &degs[j];
            (k.is_integer() && k >= Q::from_integer(2.into())).then(|| (e.clone(), k))
        });
        match hit {
            None => {
                return Ok(Decision::new(Verdict::Holds)
                    .step(
                        "A-corpdeux",
                        CORPDEUX,
                        format!("j = {}: {} basis monomials, none of qualifying weight", j + 1, basis.len()),
                    )
                    .cert("j", j + 1)
                    .cert("quotient_dimension", basis.len()));
            }
            Some((e, k)) => {
                let m = Poly::monomial(ring, e, Q::one());
                witnesses.push(format!("j = {}: {m} has weight {} d_j - sum(alpha)", j + 1, fmt_q(&k)));
                d = d.cert(format!("witness{}", j + 1), &m);
            }
        }
    }
    Ok(d.step("A-corpdeux", CORPDEUX, witnesses.join("; ")))
}

const ISOLATED: &str = "isolated singularity: A(1/h) iff h is weighted homogeneous and -1 is the only integral root of b(h^s, s)";
const ARRANGEMENT: &str = "generic arrangement: A(1/h) iff h is weighted homogeneous and -1 is the only integral root of b(h^s, s)";
const SAITO_QH: &str = "a weighted homogeneous germ lies in its Jacobian ideal in every coordinate system";
const FREEX_I: &str = "(x1 - x2 x3) g with g weighted homogeneous, not homogeneous: A(1/h) fails";
const FREEX_II: &str = "(x1 - x2 x3) g with g homogeneous of degree 3: A(1/h) holds";

/// Decides A(1/h). Routes, in order: the surfaces `(x1 - x2 x3) g`, a
/// certified generic arrangement of at least two factors, an isolated
/// singularity. Anything else is Unknown.
pub fn decide_a_inv(germ: &FactoredGerm, limits: &Limits) -> Result<Decision> {
    let h = germ.product();
    if let Some(d) = curve_family_route(&h, limits)? {
        return Ok(d);
    }
    let mut notes = Vec::new();
    if germ.factors().len() >= 2 && germ.is_reduced() {
        let spec = ArrangementSpec {
            factors: germ.factors().iter().map(|(f, _)| f.clone()).collect(),
        };
        let cert = verify_generic_arrangement(&spec, limits)?;
        if cert.verdict == Verdict::Holds {
            return arrangement_route(germ, &spec, cert, limits);
        }
        notes.push(format!("not a certified generic arrangement ({})", cert.trace[0].detail));
    }
    match milnor_data(&h, None, limits) {
        Ok(Some(m)) => return isolated_route(germ, m.milnor_number, limits),
        Ok(None) => notes.push("singularity not isolated".into()),
        Err(e) => return Decision::from_error(e),
    }
    Ok(Decision::unknown(format!("no decision route: {}", notes.join("; "))))
}

fn curve_family_route(h: &Poly, limits: &Limits) -> Result<Option<Decision>> {
    let Some(g) = CurveFamily::split(h) else {
        return Ok(None);
    };
    let fam = match CurveFamily::new(&g, limits) {
        Ok(f) => f,
        Err(Error::Precondition(_)) => return Ok(None),
        Err(e) if e.is_resource_limit() => return Decision::from_error(e).map(Some),
        Err(e) => return Err(e),
    };
    let d = if !fam.is_homogeneous() {
        Decision::new(Verdict::Fails)
            .step("A-freex-i", FREEX_I, format!("g = {} has weights {}", fam.g(), fam.weights()))
            .cert("g", fam.g())
    } else if fam.degree() == 3 {
        Decision::new(Verdict::Holds)
            .step("A-freex-ii", FREEX_II, format!("g = {} is a homogeneous cubic", fam.g()))
            .cert("g", fam.g())
    } else {
        Decision::unknown(format!("g homogeneous of degree {}: no rule", fam.degree()))
    };
    Ok(Some(d))
}

/// Weighted homogeneity: detected weights, or a certified failure of H,
/// which rules it out in every coordinate system.
fn weights_or_verdict(h: &Poly, route: &'static str, citation: &'static str, limits: &Limits) -> Result<std::result::Result<WeightSystem, Decision>> {
    if let Some(w) = detect_weights(h) {
        return Ok(Ok(w));
    }
    let hd = condition_h(h, limits)?;
    Ok(Err(match hd.verdict {
        Verdict::Fails => Decision::new(Verdict::Fails)
            .step(route, citation, "h is not weighted homogeneous")
            .step("A-saito", SAITO_QH, "h is not in its Jacobian ideal"),
        _ => Decision::unknown("no weights in the given coordinates; a coordinate change may exist"),
    }))
}

fn with_b(germ: &FactoredGerm, route: &'static str, citation: &'static str, detail: String, limits: &Limits) -> Result<Decision> {
    let b = decide_b(germ, &BOptions::default(), limits)?;
    let mut d = b.to_decision();
    d.trace.insert(0, crate::verdict::TraceStep::new(route, citation, detail));
    if let Verdict::Unknown(r) = &b.verdict {
        d.verdict = Verdict::Unknown(format!("B undecided: {r}"));
    }
    Ok(d)
}

fn isolated_route(germ: &FactoredGerm, mu: usize, limits: &Limits) -> Result<Decision> {
    let h = germ.product();
    match weights_or_verdict(&h, "A-isolated", ISOLATED, limits)? {
        Err(d) => Ok(d),
        Ok(w) => with_b(germ, "A-isolated", ISOLATED, format!("Milnor number {mu}, weights {w}"), limits),
    }
}

fn arrangement_route(germ: &FactoredGerm, spec: &ArrangementSpec, cert: Decision, limits: &Limits) -> Result<Decision> {
    let h = germ.product();
    let w = match weights_or_verdict(&h, "A-arrangement", ARRANGEMENT, limits)? {
        Err(mut d) => {
            d.trace.splice(0..0, cert.trace);
            return Ok(d);
        }
        Ok(w) => w,
    };
    let mut d = if spec.factors.len() == 2 {
        corpdeux_decision(&spec.factors[0], &spec.factors[1], &w, limits)?
    } else {
        with_b(germ, "A-arrangement", ARRANGEMENT, format!("{} factors, weights {w}", spec.factors.len()), limits)?
    };
    d.trace.splice(0..0, cert.trace);
    Ok(d)
}

const FREE: &str = "Saito's criterion: n logarithmic fields with determinant a unit times h form a basis";

/// A basis of `Der(-log h)` certified by Saito's criterion: the explicit
/// fields for the surfaces `(x1 - x2 x3) g`, otherwise a bounded search
/// among the syzygy generators.
pub fn free_basis(h: &Poly, limits: &Limits) -> Result<Option<FreenessCertificate>> {
    if let Some(g) = CurveFamily::split(h) {
        if let Ok(fam) = CurveFamily::new(&g, limits) {
            if let Some(c) = saito_free_test(h, &fam.hfree_fields()?) {
                return Ok(Some(c));
            }
        }
    }
    let gens = derlog_generators(h, limits)?;
    Ok(find_free_basis(h, &gens, 2_000))
}

/// Freeness: Holds with a Saito certificate; Unknown when none is found.
pub fn decide_free(h: &Poly, limits: &Limits) -> Result<Decision> {
    match free_basis(h, limits) {
        Ok(Some(c)) => {
            let mut d = Decision::new(Verdict::Holds).step("saito", FREE, format!("det = ({}) * h", c.unit));
            for (i, f) in c.basis.iter().enumerate() {
                d = d.cert(format!("delta{}", i + 1), f.to_op());
            }
            Ok(d.cert("det", &c.det))
        }
        Ok(None) => Ok(Decision::unknown("no Saito basis found among the candidates")),
        Err(e) => Decision::from_error(e),
    }
}

/// Koszul freeness, on a basis from [`free_basis`].
pub fn decide_koszul(h: &Poly, limits: &Limits) -> Result<Decision> {
    match free_basis(h, limits) {
        Ok(Some(c)) => koszul_free_test(h, &c.basis, limits),
        Ok(None) => Ok(Decision::unknown("freeness not certified")),
        Err(e) => Decision::from_error(e),
    }
}

/// Condition L on a Saito basis when one is found, else on the syzygy
/// generators.
pub fn decide_l(h: &Poly, limits: &Limits) -> Result<Decision> {
    match free_basis(h, limits) {
        Ok(Some(c)) => condition_l(h, Some(&c.basis), limits),
        Ok(None) => condition_l(h, None, limits),
        Err(e) => Decision::from_error(e),
    }
}

/// The conditions tracked by the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    H,
    B,
    AH,
    AInv,
    W,
    G,
    L,
    M,
    ALog,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::H,
        Condition::B,
        Condition::AH,
        Condition::AInv,
        Condition::W,
        Condition::G,
        Condition::L,
        Condition::M,
        Condition::ALog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::H => "H",
            Condition::B => "B",
            Condition::AH => "A(h)",
            Condition::AInv => "A(1/h)",
            Condition::W => "W",
            Condition::G => "G",
            Condition::L => "L",
            Condition::M => "M",
            Condition::ALog => "A_log",
        }
    }

    /// Accepts the display names and the ASCII forms `A_H`, `A_INV`,
    /// `ALOG`, case-insensitively.
    pub fn from_name(s: &str) -> Option<Condition> {
        let u = s.trim().to_ascii_uppercase();
        Some(match u.as_str() {
            "H" => Condition::H,
            "B" => Condition::B,
            "A(H)" | "A_H" | "AH" => Condition::AH,
            "A(1/H)" | "A_INV" | "AINV" => Condition::AInv,
            "W" => Condition::W,
            "G" => Condition::G,
            "L" => Condition::L,
            "M" => Condition::M,
            "A_LOG" | "ALOG" => Condition::ALog,
            _ => return None,
        })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `premises => conclusion`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Implication {
    pub premises: &'static [Condition],
    pub conclusion: Condition,
}

impl fmt::Display for Implication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<&str> = self.premises.iter().map(|c| c.name()).collect();
        write!(f, "{} => {}", p.join(" & "), self.conclusion)
    }
}

use Condition as C;

pub const IMPLICATIONS: [Implication; 10] = [
    Implication { premises: &[C::W], conclusion: C::G },
    Implication { premises: &[C::G], conclusion: C::AH },
    Implication { premises: &[C::G], conclusion: C::L },
    Implication { premises: &[C::AH], conclusion: C::M },
    Implication { premises: &[C::L], conclusion: C::M },
    Implication { premises: &[C::AInv], conclusion: C::M },
    Implication { premises: &[C::AInv], conclusion: C::B },
    Implication { premises: &[C::AInv], conclusion: C::ALog },
    Implication { premises: &[C::ALog], conclusion: C::B },
    Implication { premises: &[C::H, C::B, C::AH], conclusion: C::AInv },
];

/// Known verdicts per condition with where each one came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConditionLattice {
    entries: BTreeMap<Condition, (bool, String)>,
}

impl ConditionLattice {
    pub fn new() -> ConditionLattice {
        ConditionLattice::default()
    }

    /// Records a verdict; a conflicting earlier verdict is an error.
    pub fn set(&mut self, c: Condition, holds: bool, provenance: impl Into<String>) -> Result<bool> {
        let provenance = provenance.into();
        match self.entries.get(&c) {
            Some((v, _)) if *v == holds => Ok(false),
            Some((_, p)) => Err(Error::Contradiction {
                edge: provenance,
                detail: format!("{c} is already {} ({p})", if holds { "Fails" } else { "Holds" }),
            }),
            None => {
                self.entries.insert(c, (holds, provenance));
                Ok(true)
            }
        }
    }

    pub fn with(mut self, c: Condition, holds: bool) -> Result<ConditionLattice> {
        self.set(c, holds, "given")?;
        Ok(self)
    }

    pub fn get(&self, c: Condition) -> Option<bool> {
        self.entries.get(&c).map(|(v, _)| *v)
    }

    pub fn provenance(&self, c: Condition) -> Option<&str> {
        self.entries.get(&c).map(|(_, p)| p.as_str())
    }

    pub fn verdict(&self, c: Condition) -> Verdict {
        match self.get(c) {
            Some(b) => Verdict::from_bool(b),
            None => Verdict::Unknown("not determined".into()),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True if every verdict of `self` appears in `other`.
    pub fn is_subset_of(&self, other: &ConditionLattice) -> bool {
        self.entries.iter().all(|(c, (v, _))| other.get(*c) == Some(*v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Condition, bool, &str)> {
        self.entries.iter().map(|(c, (v, p))| (*c, *v, p.as_str()))
    }
}

/// Closure under [`IMPLICATIONS`] and their contrapositives. A verdict
/// forced both ways is reported with the edge that forced it.
pub fn propagate_implications(lattice: &ConditionLattice) -> Result<ConditionLattice> {
    let mut out = lattice.clone();
    loop {
        let mut changed = false;
        for imp in IMPLICATIONS {
            let vals: Vec<Option<bool>> = imp.premises.iter().map(|&c| out.get(c)).collect();
            if vals.iter().all(|v| *v == Some(true)) {
                changed |= out.set(imp.conclusion, true, imp.to_string())?;
            }
            if out.get(imp.conclusion) == Some(false) {
                let open: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] != Some(true)).collect();
                if let [i] = open[..] {
                    changed |= out.set(imp.premises[i], false, format!("contrapositive of {imp}"))?;
                } else if open.is_empty() {
                    unreachable!("conclusion set to true above");
                }
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_dense;
    use crate::poly::{parse_factors, parse_poly, Ring};
    use crate::rational::{q, qr};
    use proptest::prelude::*;

    fn germ(text: &str, vars: &str) -> FactoredGerm {
        let r = Ring::parse_base(vars).unwrap();
        FactoredGerm::new(parse_factors(text, &r).unwrap()).unwrap()
    }

    fn spec(texts: &[&str], vars: &str) -> ArrangementSpec {
        let r = Ring::parse_base(vars).unwrap();
        ArrangementSpec {
            factors: texts.iter().map(|t| parse_poly(t, &r).unwrap()).collect(),
        }
    }

    #[test]
    fn generic_arrangement_certificates() {
        let l = Limits::default();
        let s = spec(
            &["x1^2+x2^3+x3^4", "x1^2+2*x2^3+4*x3^4", "x1^2+3*x2^3+9*x3^4"],
            "x1,x2,x3",
        );
        assert_eq!(verify_generic_arrangement(&s, &l).unwrap().verdict, Verdict::Holds);
        let s = spec(&["x1", "x1*x2"], "x1,x2");
        assert_eq!(verify_generic_arrangement(&s, &l).unwrap().verdict, Verdict::Fails);
        let s = spec(&["x1-x2*x3", "x1*x2^2+x1^2*x2"], "x1,x2,x3");
        let d = verify_generic_arrangement(&s, &l).unwrap();
        assert_eq!(d.verdict, Verdict::Fails);
        assert!(d.certificate.iter().any(|(_, v)| v.starts_with("factors {2}")));
        assert!(verify_generic_arrangement(&spec(&["x1"], "x1"), &l).is_err());
        assert!(verify_generic_arrangement(&spec(&["x1", "1+x2"], "x1,x2"), &l).is_err());
    }

    /// Dimension of the weight-`target` piece of `O / (gens)` by linear
    /// algebra on monomials, for weighted homogeneous generators.
    fn graded_piece(gens: &[Poly], w: &WeightSystem, target: &Q, maxdeg: u32) -> usize {
        let ring = gens[0].ring();
        let n = ring.nvars();
        let mut monos: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..n {
            monos = monos
                .into_iter()
                .flat_map(|m| (0..=maxdeg).map(move |k| [m.clone(), vec![k]].concat()))
                .collect();
        }
        let of_weight = |t: &Q| -> Vec<Vec<u32>> { monos.iter().filter(|e| &w.weight(ring, e) == t).cloned().collect() };
        let cols = of_weight(target);
        let mut rows = Vec::new();
        for g in gens {
            let gw = w.weight(ring, g.terms().keys().next().unwrap());
            for m in of_weight(&(target - &gw)) {
                let p = &Poly::monomial(ring, m, Q::one()) * g;
                rows.push(cols.iter().map(|e| p.coeff(e)).collect::<Vec<Q>>());
            }
        }
        cols.len() - rank_dense(&rows)
    }

    fn minors(h1: &Poly, h2: &Poly) -> Vec<Poly> {
        let base = h1.ring().base_indices();
        let jac = jacobian(&[h1.clone(), h2.clone()], &base);
        combinations(base.len(), 2)
            .iter()
            .map(|c| minor_det(&jac, &[0, 1], c).unwrap())
            .filter(|m| !m.is_zero())
            .collect()
    }

    fn oracle_corpdeux(h1: &Poly, h2: &Poly, w: &WeightSystem, kmax: i64, maxdeg: u32) -> bool {
        let k = minors(h1, h2);
        let total = w.sum_alpha();
        [h1, h2].iter().any(|hj| {
            let dj = w.weight(hj.ring(), hj.terms().keys().next().unwrap());
            let mut gens = vec![(*hj).clone()];
            gens.extend(k.iter().cloned());
            (2..=kmax).all(|k| graded_piece(&gens, w, &(&dj * Q::from_integer(k.into()) - &total), maxdeg) == 0)
        })
    }

    #[test]
    fn corpdeux_matches_graded_oracle() {
        let l = Limits::default();
        let r = Ring::parse_base("x1,x2,x3").unwrap();
        let h1 = parse_poly("x1^2+x2^3+x3^4", &r).unwrap();
        let h2 = parse_poly("x1^2+2*x2^3+3*x3^4", &r).unwrap();
        let w = WeightSystem::new(vec![qr(1, 2), qr(1, 3), qr(1, 4)], q(1)).unwrap();
        let d = corpdeux_decision(&h1, &h2, &w, &l).unwrap();
        let oracle = oracle_corpdeux(&h1, &h2, &w, 4, 8);
        assert_eq!(d.verdict, Verdict::from_bool(oracle));

        let r2 = Ring::parse_base("x1,x2").unwrap();
        let h1 = parse_poly("x1^2+x2^3", &r2).unwrap();
        let h2 = parse_poly("x1^2-x2^3", &r2).unwrap();
        let w = WeightSystem::new(vec![qr(1, 2), qr(1, 3)], q(1)).unwrap();
        let d = corpdeux_decision(&h1, &h2, &w, &l).unwrap();
        assert_eq!(d.verdict, Verdict::from_bool(oracle_corpdeux(&h1, &h2, &w, 4, 12)));
        assert_eq!(d.verdict, Verdict::Holds);
    }

    #[test]
    fn corpdeux_high_degree_is_vacuous() {
        let l = Limits::default();
        let r = Ring::parse_base("x1,x2").unwrap();
        let h1 = parse_poly("x1", &r).unwrap();
        let h2 = parse_poly("x2", &r).unwrap();
        let w = WeightSystem::new(vec![q(1), q(1)], q(1)).unwrap();
        let d = corpdeux_decision(&h1, &h2, &w, &l).unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
    }

    #[test]
    fn a_inv_corpus() {
        let l = Limits::default();
        let d = decide_a_inv(&germ("x1^2+x2^3", "x1,x2"), &l).unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
        assert_eq!(d.trace[0].rule, "A-isolated");
        let d = decide_a_inv(&germ("(x1-x2*x3)*(x1^3+x2^4)", "x1,x2,x3"), &l).unwrap();
        assert_eq!(d.verdict, Verdict::Fails);
        assert_eq!(d.trace[0].rule, "A-freex-i");
        let d = decide_a_inv(&germ("(x1-x2*x3)*(x1^3+x2^3)", "x1,x2,x3"), &l).unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
        assert_eq!(d.trace[0].rule, "A-freex-ii");
    }

    #[test]
    fn a_inv_fails_for_quartic_surface_and_non_weighted_germs() {
        let l = Limits::default();
        let d = decide_a_inv(&germ("x1^2+x2^4+x3^4", "x1,x2,x3"), &l).unwrap();
        assert_eq!(d.verdict, Verdict::Fails);
        let d = decide_a_inv(&germ("x1^4+x2^5+x1^2*x2^3", "x1,x2"), &l).unwrap();
        assert_eq!(d.verdict, Verdict::Fails);
        assert!(d.trace.iter().any(|s| s.rule == "A-saito"));
        let d = decide_a_inv(&germ("x1*x2*(x1+x2)*(x1+x3)", "x1,x2,x3"), &l).unwrap();
        assert!(!d.verdict.is_decided());
    }

    #[test]
    fn pair_route_agrees_with_b() {
        let l = Limits::default();
        let g = germ("(x1^2+x2^3)*(x1^2-x2^3)", "x1,x2");
        let d = decide_a_inv(&g, &l).unwrap();
        assert!(d.trace.iter().any(|s| s.rule == "A-corpdeux"));
        let b = decide_b(&g, &BOptions::default(), &l).unwrap();
        assert!(b.verdict.is_decided());
        assert_eq!(d.verdict, b.verdict);
    }

    fn lat(items: &[(Condition, bool)]) -> ConditionLattice {
        let mut l = ConditionLattice::new();
        for (c, v) in items {
            l.set(*c, *v, "given").unwrap();
        }
        l
    }

    #[test]
    fn lattice_examples() {
        let out = propagate_implications(&lat(&[(C::W, true)])).unwrap();
        for c in [C::G, C::AH, C::L, C::M] {
            assert_eq!(out.get(c), Some(true), "{c}");
        }
        let out = propagate_implications(&lat(&[(C::M, false)])).unwrap();
        for c in [C::L, C::AH, C::G, C::W, C::AInv] {
            assert_eq!(out.get(c), Some(false), "{c}");
        }
        let out = propagate_implications(&lat(&[(C::H, true), (C::B, true), (C::AH, true)])).unwrap();
        assert_eq!(out.get(C::AInv), Some(true));
        let out = propagate_implications(&lat(&[(C::H, true), (C::B, true), (C::AInv, false)])).unwrap();
        assert_eq!(out.get(C::AH), Some(false));
        assert!(out.provenance(C::AH).unwrap().starts_with("contrapositive"));
    }

    #[test]
    fn lattice_contradiction_names_edge() {
        let err = propagate_implications(&lat(&[(C::W, true), (C::M, false)])).unwrap_err();
        match err {
            Error::Contradiction { edge, .. } => assert!(edge.contains("=>")),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn counterexample_corpus_is_consistent() {
        let cases = [
            lat(&[(C::L, false), (C::AH, false), (C::AInv, true)]),
            lat(&[(C::L, true), (C::AH, false), (C::AInv, false)]),
            lat(&[(C::M, false)]),
        ];
        for c in cases {
            let out = propagate_implications(&c).unwrap();
            assert!(c.is_subset_of(&out));
        }
    }

    #[test]
    fn free_and_koszul_on_surfaces() {
        let l = Limits::default();
        let r = Ring::parse_base("x1,x2,x3").unwrap();
        let h = parse_poly("(x1-x2*x3)*(x1^3+x2^4)", &r).unwrap();
        assert_eq!(decide_free(&h, &l).unwrap().verdict, Verdict::Holds);
        assert_eq!(decide_koszul(&h, &l).unwrap().verdict, Verdict::Holds);
        assert_eq!(decide_l(&h, &l).unwrap().verdict, Verdict::Holds);
        let h = parse_poly("(x1-x2*x3)*x1*x2*(x1+x2)", &r).unwrap();
        assert_eq!(decide_koszul(&h, &l).unwrap().verdict, Verdict::Fails);
        let r2 = Ring::parse_base("x1,x2").unwrap();
        let h = parse_poly("x1^2+x2^3", &r2).unwrap();
        assert_eq!(decide_free(&h, &l).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn names_round_trip() {
        for c in Condition::ALL {
            assert_eq!(Condition::from_name(c.name()), Some(c));
        }
        assert_eq!(Condition::from_name("a_inv"), Some(C::AInv));
    }

    fn arb_lattice() -> impl Strategy<Value = ConditionLattice> {
        proptest::collection::vec(proptest::option::of(any::<bool>()), 9).prop_map(|v| {
            let mut l = ConditionLattice::new();
            for (c, x) in Condition::ALL.iter().zip(v) {
                if let Some(b) = x {
                    l.set(*c, b, "given").unwrap();
                }
            }
            l
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn closure_is_idempotent_and_extensive(l in arb_lattice()) {
            if let Ok(once) = propagate_implications(&l) {
                prop_assert!(l.is_subset_of(&once));
                let twice = propagate_implications(&once).unwrap();
                prop_assert_eq!(twice.len(), once.len());
                prop_assert!(once.is_subset_of(&twice));
            }
        }

        #[test]
        fn closure_is_monotone(l in arb_lattice(), drop in proptest::collection::vec(any::<bool>(), 9)) {
            let mut smaller = ConditionLattice::new();
            for ((c, v, _), d) in l.iter().zip(drop) {
                if d {
                    smaller.set(c, v, "given").unwrap();
                }
            }
            if let Ok(big) = propagate_implications(&l) {
                let small = propagate_implications(&smaller).unwrap();
                prop_assert!(small.is_subset_of(&big));
            }
        }
    }
}
