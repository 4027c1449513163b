//! Bernstein-Sato data at desk scale: Milnor algebras, closed formulas for
//! monomials and quasi-homogeneous isolated singularities, restriction to a
//! smooth factor and a rule engine deciding whether `-1` is the smallest
//! integral root of `b(h^s, s)`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::conormal::combinations;
use crate::error::{Error, Result};
use crate::family::{is_reduced_plane_curve, CurveFamily};
use crate::groebner::{germ_order, Ideal, Limits, QuotientBasis};
use crate::linalg::rank_dense;
use crate::poly::{detect_weights, product, Exp, Poly, Ring, WeightSystem};
use crate::rational::{fmt_q, Q};
use crate::verdict::{Decision, TraceStep, Verdict};
use crate::weyl::{BFunction, FunctionalEquation, Section, WeylOp};

const MILNOR_CAP: usize = 20_000;

/// Monomial basis of the Milnor algebra `O / J_f` with weighted degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorData {
    pub basis: Vec<Exp>,
    /// Weighted degree of each basis monomial, when weights are known.
    pub weights: Option<Vec<Q>>,
    pub milnor_number: usize,
}

/// Milnor data of `f` at the origin, or `None` when the singularity is not
/// isolated. Weights come from `w`, or from [`detect_weights`] when `w` is
/// `None`.
pub fn milnor_data(f: &Poly, w: Option<&WeightSystem>, limits: &Limits) -> Result<Option<MilnorData>> {
    let ring = f.ring();
    let jac: Vec<Poly> = ring.base_indices().iter().map(|&i| f.diff(i)).filter(|p| !p.is_zero()).collect();
    let ideal = Ideal::new(ring, jac.clone(), germ_order(&jac)).with_limits(limits.clone());
    let basis = if jac.is_empty() {
        if ring.base_indices().is_empty() {
            vec![vec![0; ring.nvars()]]
        } else {
            return Ok(None);
        }
    } else {
        match ideal.quotient_basis(MILNOR_CAP)? {
            QuotientBasis::Finite(b) => b,
            QuotientBasis::Infinite => return Ok(None),
        }
    };
    let detected;
    let w = match w {
        Some(w) => Some(w),
        None => {
            detected = detect_weights(f);
            detected.as_ref()
        }
    };
    let weights = w.map(|w| basis.iter().map(|e| w.weight(ring, e)).collect());
    Ok(Some(MilnorData {
        milnor_number: basis.len(),
        basis,
        weights,
    }))
}

/// `b(x^gamma, s) = prod_i prod_{k=1}^{gamma_i} (s + k / gamma_i)`.
pub fn bs_monomial(gamma: &[u32]) -> BFunction {
    let mut roots = Vec::new();
    for &g in gamma.iter().filter(|&&g| g > 0) {
        for k in 1..=g {
            roots.push((-Q::new(k.into(), g.into()), 1));
        }
    }
    BFunction::from_roots(roots)
}

/// The verified equation `prod gamma_i^-gamma_i d_i^gamma_i x^(gamma (s+1))
/// = b(s) x^(gamma s)` for the monomial `x^gamma` of `ring`.
pub fn monomial_equation(ring: &Arc<Ring>, gamma: &[u32]) -> Result<FunctionalEquation> {
    let base = ring.base_indices();
    if gamma.len() != base.len() || gamma.iter().all(|&g| g == 0) {
        return Err(Error::Precondition("exponent vector must be nonzero, one entry per variable".into()));
    }
    let ext = ring.with_params(&["s"]);
    let s = ext.nvars() - 1;
    let mut e = vec![0; ext.nvars()];
    let mut b = vec![0; ext.nvars()];
    let mut c = Q::one();
    for (&i, &g) in base.iter().zip(gamma) {
        e[i] = g;
        b[i] = g;
        c /= Q::from_integer(num_bigint::BigInt::from(g).pow(g));
    }
    let f = Poly::monomial(&ext, e, Q::one());
    let op = WeylOp::term(&Poly::constant(&ext, c), b);
    let eq = FunctionalEquation {
        ring: ext.clone(),
        s,
        b: bs_monomial(gamma),
        op,
        f,
        section: Section::one(&ext),
    };
    if !eq.verify()? {
        return Err(Error::Precondition("monomial identity failed to verify".into()));
    }
    Ok(eq)
}

/// The weighted exponents `|alpha| + w(m)` over the Milnor basis, as a
/// sorted set, for a quasi-homogeneous isolated singularity.
pub fn quasihomogeneous_exponents(f: &Poly, limits: &Limits) -> Result<Option<Vec<Q>>> {
    let Some(w) = detect_weights(f) else {
        return Ok(None);
    };
    let w = w.normalized();
    let Some(m) = milnor_data(f, Some(&w), limits)? else {
        return Ok(None);
    };
    let total = w.sum_alpha();
    let mut e: Vec<Q> = m.weights.expect("weights given").iter().map(|x| x + &total).collect();
    e.sort();
    e.dedup();
    Ok(Some(e))
}

/// `b(f^s, s) = (s + 1) prod_{c in E} (s + c)` for a quasi-homogeneous
/// isolated singularity with exponent set `E`; `None` when `f` has no
/// positive weights in the given coordinates or the singularity is not
/// isolated.
pub fn bs_quasihomogeneous(f: &Poly, limits: &Limits) -> Result<Option<BFunction>> {
    let Some(e) = quasihomogeneous_exponents(f, limits)? else {
        return Ok(None);
    };
    let mut roots = vec![(-Q::one(), 1)];
    roots.extend(e.into_iter().map(|c| (-c, 1)));
    Ok(Some(BFunction::from_roots(roots)))
}

/// Position of a variable `x_i` such that `l = c x_i + q` with `c` a
/// nonzero constant and `q` free of `x_i`.
pub fn graph_variable(l: &Poly) -> Option<usize> {
    l.ring().base_indices().into_iter().find(|&i| {
        l.degree_in(i) == 1 && l.coefficients_in(i).get(&1).is_some_and(|c| c.is_constant())
    })
}

/// `h` with `x_i := -q / c` substituted, where `l = c x_i + q` is in graph
/// form, as a polynomial in the remaining variables.
pub fn restrict_at_smooth_factor(h: &Poly, l: &Poly) -> Result<Poly> {
    let i = graph_variable(l).ok_or_else(|| Error::Unsupported(format!("{l} is not in graph form")))?;
    let parts = l.coefficients_in(i);
    let c = parts[&1].constant_term();
    let q = parts.get(&0).cloned().unwrap_or_else(|| Poly::zero(l.ring()));
    let value = q.scale(&(-Q::one() / c));
    let r = h.subst(i, &value);
    r.embed(&h.ring().without(&[i]))
}

/// A germ given as a product of factors with multiplicities. Units
/// (factors not vanishing at the origin) are dropped; factors equal up to
/// a constant are merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredGerm {
    ring: Arc<Ring>,
    factors: Vec<(Poly, u32)>,
}

impl FactoredGerm {
    pub fn new(factors: Vec<(Poly, u32)>) -> Result<FactoredGerm> {
        let ring = factors
            .first()
            .map(|(p, _)| p.ring().clone())
            .ok_or_else(|| Error::Precondition("empty factor list".into()))?;
        let mut out: Vec<(Poly, u32)> = Vec::new();
        for (f, m) in factors {
            if f.is_zero() {
                return Err(Error::Precondition("zero factor".into()));
            }
            if m == 0 || !f.constant_term().is_zero() {
                continue;
            }
            for (g, k) in split_factor(&f) {
                let g = g.primitive();
                match out.iter_mut().find(|(x, _)| *x == g) {
                    Some(e) => e.1 += k * m,
                    None => out.push((g, k * m)),
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Precondition("the germ does not vanish at the origin".into()));
        }
        Ok(FactoredGerm { ring, factors: out })
    }

    /// Factors an expanded `h` as far as cheaply possible: the surface
    /// factor `x1 - x2 x3` of the curve family, coordinate powers and
    /// linear factors of binary forms.
    pub fn from_poly(h: &Poly) -> Result<FactoredGerm> {
        if let Some(g) = CurveFamily::split(h) {
            if !g.constant_term().is_zero() || g.is_constant() {
                return FactoredGerm::new(vec![(h.clone(), 1)]);
            }
            let l = h.div_exact(&g).expect("split divides");
            return FactoredGerm::new(vec![(l, 1), (g, 1)]);
        }
        FactoredGerm::new(vec![(h.clone(), 1)])
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    pub fn product(&self) -> Poly {
        let ps: Vec<Poly> = self.factors.iter().map(|(f, m)| f.pow(*m)).collect();
        product(&self.ring, &ps)
    }

    pub fn is_reduced(&self) -> bool {
        self.factors.iter().all(|(_, m)| *m == 1)
    }

    /// The germ in the ring of the variables it depends on.
    pub fn compact(&self) -> FactoredGerm {
        let mut used: Vec<usize> = self.factors.iter().flat_map(|(f, _)| f.support_vars()).collect();
        used.sort();
        used.dedup();
        let drop: Vec<usize> = (0..self.ring.nvars()).filter(|i| !used.contains(i)).collect();
        if drop.is_empty() {
            return self.clone();
        }
        let ring = self.ring.without(&drop);
        FactoredGerm {
            factors: self
                .factors
                .iter()
                .map(|(f, m)| (f.embed(&ring).expect("support kept"), *m))
                .collect(),
            ring,
        }
    }

    fn select(&self, idx: &[usize]) -> FactoredGerm {
        FactoredGerm {
            ring: self.ring.clone(),
            factors: idx.iter().map(|&i| self.factors[i].clone()).collect(),
        }
    }

    fn without(&self, j: usize) -> FactoredGerm {
        let idx: Vec<usize> = (0..self.factors.len()).filter(|&i| i != j).collect();
        self.select(&idx)
    }
}

impl fmt::Display for FactoredGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, m)| if *m == 1 { format!("({p})") } else { format!("({p})^{m}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Splits off coordinate powers and, for binary forms, rational linear
/// factors. Other factors are returned whole.
pub fn split_factor(f: &Poly) -> Vec<(Poly, u32)> {
    let ring = f.ring().clone();
    let mut out = Vec::new();
    let mut rest = f.clone();
    for i in ring.base_indices() {
        let k = rest.terms().keys().map(|e| e[i]).min().unwrap_or(0);
        if k > 0 {
            out.push((Poly::var(&ring, i), k));
            let mut shift = vec![0; ring.nvars()];
            shift[i] = k;
            rest = Poly::from_terms(
                &ring,
                rest.terms().iter().map(|(e, c)| {
                    let mut e = e.clone();
                    e[i] -= k;
                    (e, c.clone())
                }),
            );
        }
    }
    if rest.is_constant() {
        return out;
    }
    let support = rest.support_vars();
    let d = rest.total_degree();
    let homogeneous = rest.terms().keys().all(|e| e.iter().sum::<u32>() as i64 == d);
    if support.len() == 2 && homogeneous && d >= 2 {
        let (a, b) = (support[0], support[1]);
        let coeffs: Vec<Q> = (0..=d as u32)
            .map(|j| {
                let mut e = vec![0; ring.nvars()];
                e[a] = j;
                e[b] = d as u32 - j;
                rest.coeff(&e)
            })
            .collect();
        let lead = coeffs.last().expect("degree").clone();
        let monic: Vec<Q> = coeffs.iter().map(|c| c / &lead).collect();
        let bf = BFunction::from_coeffs(&monic);
        let xa = Poly::var(&ring, a);
        let xb = Poly::var(&ring, b);
        for (r, m) in bf.roots() {
            out.push((&xa - &xb.scale(r), *m));
        }
        if let Some(res) = bf.residual() {
            let e_deg = res.len() - 1;
            let mut p = Poly::zero(&ring);
            for (j, c) in res.iter().enumerate() {
                p = &p + &(&xa.pow(j as u32) * &xb.pow((e_deg - j) as u32)).scale(c);
            }
            out.push((p, 1));
        }
        return out;
    }
    out.push((rest, 1));
    out
}

/// Rules deciding condition B, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BRule {
    Mono,
    Qh,
    Arr,
    Plane,
    SmoothFactor,
    Power,
    Courbe,
    Origin,
    Many,
}

impl BRule {
    pub const ALL: [BRule; 9] = [
        BRule::Mono,
        BRule::Qh,
        BRule::Arr,
        BRule::Plane,
        BRule::SmoothFactor,
        BRule::Power,
        BRule::Courbe,
        BRule::Origin,
        BRule::Many,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BRule::Mono => "R-mono",
            BRule::Qh => "R-qh",
            BRule::Arr => "R-arr",
            BRule::Plane => "R-plane",
            BRule::SmoothFactor => "R-smooth-factor",
            BRule::Power => "R-power",
            BRule::Courbe => "R-courbe",
            BRule::Origin => "R-origin",
            BRule::Many => "R-many",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            BRule::Mono => "monomials: p^-p d^p (x^p)^(s+1) = (s+1/p)...(s+(p-1)/p)(s+1) (x^p)^s, coordinatewise",
            BRule::Qh => "quasi-homogeneous isolated singularity: b = (s+1) prod (s + |alpha| + weight of a Milnor basis monomial)",
            BRule::Arr => "products of linear forms have -1 as only integral root",
            BRule::Plane => "reduced plane curves have -1 as only integral root",
            BRule::SmoothFactor => {
                "h = l g with l smooth, B(l) and B(g): B(h) is equivalent to B of g restricted to l = 0"
            }
            BRule::Power => "with B(g), B(l g) implies B(l^p g) by rescaling the roots of b(m l^s)",
            BRule::Courbe => "(x1 - x2 x3) g(x1, x2) with g a reduced plane curve has -1 as only integral root",
            BRule::Origin => "n coprime factors defining the origin: B of all (n-1)-subproducts gives B of the product",
            BRule::Many => "at least n+1 coprime factors: B of all n-subproducts gives B of the product",
        }
    }

    pub fn from_id(id: &str) -> Option<BRule> {
        BRule::ALL.into_iter().find(|r| r.id() == id)
    }
}

/// Engine options: disabled rules (for ablation) and recursion depth.
#[derive(Debug, Clone)]
pub struct BOptions {
    pub disabled: Vec<BRule>,
    pub max_depth: usize,
}

impl Default for BOptions {
    fn default() -> Self {
        BOptions {
            disabled: Vec::new(),
            max_depth: 8,
        }
    }
}

/// Verdict on condition B with the roots that decided it, if any.
#[derive(Debug, Clone)]
pub struct BVerdict {
    pub verdict: Verdict,
    pub roots: Option<BFunction>,
    /// Smallest integral root when it is below `-1`.
    pub witness: Option<Q>,
    pub trace: Vec<TraceStep>,
    /// Rules that reached a verdict, in evaluation order.
    pub decisive: Vec<BRule>,
}

impl BVerdict {
    pub fn to_decision(&self) -> Decision {
        let mut d = Decision::new(self.verdict.clone());
        d.trace = self.trace.clone();
        if let Some(r) = &self.roots {
            d = d.cert("b", r);
        }
        if let Some(w) = &self.witness {
            d = d.cert("witness_root", fmt_q(w));
        }
        d
    }
}

enum Outcome {
    Inapplicable(String),
    Blocked(String),
    Decided {
        holds: bool,
        detail: String,
        roots: Option<BFunction>,
        witness: Option<Q>,
        sub: Vec<TraceStep>,
    },
}

fn from_roots(b: BFunction, detail: String) -> Outcome {
    let smallest = b.smallest_integral_root();
    let holds = smallest == Some(-Q::one());
    let witness = if holds { None } else { smallest };
    Outcome::Decided {
        holds,
        detail,
        roots: Some(b),
        witness,
        sub: Vec::new(),
    }
}

fn resource(e: Error) -> Result<Outcome> {
    if e.is_resource_limit() {
        Ok(Outcome::Blocked(e.to_string()))
    } else {
        Err(e)
    }
}

/// Decides condition B for a germ given by factors. At the top level every
/// rule is evaluated: the trace lists all decisive rules, the verdict is
/// taken from the first one, and disagreeing rules raise
/// [`Error::Contradiction`]. Sub-decisions stop at the first decisive rule.
pub fn decide_b(germ: &FactoredGerm, opts: &BOptions, limits: &Limits) -> Result<BVerdict> {
    Engine { opts, limits }.decide(germ, 0)
}

/// [`decide_b`] for an unfactored polynomial, factored by
/// [`FactoredGerm::from_poly`].
pub fn decide_b_poly(h: &Poly, limits: &Limits) -> Result<BVerdict> {
    decide_b(&FactoredGerm::from_poly(h)?, &BOptions::default(), limits)
}

struct Engine<'a> {
    opts: &'a BOptions,
    limits: &'a Limits,
}

impl Engine<'_> {
    fn decide(&self, germ: &FactoredGerm, depth: usize) -> Result<BVerdict> {
        let germ = germ.compact();
        let mut trace = Vec::new();
        let mut first: Option<(BRule, bool, Option<BFunction>, Option<Q>)> = None;
        let mut decisive = Vec::new();
        let mut blocked: Option<String> = None;
        let mut skipped = Vec::new();
        for rule in BRule::ALL {
            if self.opts.disabled.contains(&rule) {
                continue;
            }
            match self.apply(rule, &germ, depth)? {
                Outcome::Inapplicable(why) => skipped.push(format!("{}: {why}", rule.id())),
                Outcome::Blocked(why) => {
                    blocked.get_or_insert(format!("{}: {why}", rule.id()));
                }
                Outcome::Decided {
                    holds,
                    detail,
                    roots,
                    witness,
                    sub,
                } => {
                    let v = if holds { "holds" } else { "fails" };
                    trace.push(TraceStep::new(rule.id(), rule.citation(), format!("{germ}: {detail}; B {v}")));
                    trace.extend(sub);
                    decisive.push(rule);
                    match &first {
                        None => first = Some((rule, holds, roots, witness)),
                        Some((r0, h0, _, _)) if *h0 != holds => {
                            return Err(Error::Contradiction {
                                edge: format!("{} / {}", r0.id(), rule.id()),
                                detail: format!("rules disagree on B for {germ}"),
                            });
                        }
                        Some(_) => {}
                    }
                    if depth > 0 {
                        break;
                    }
                }
            }
        }
        match first {
            Some((_, holds, roots, witness)) => Ok(BVerdict {
                verdict: Verdict::from_bool(holds),
                roots,
                witness,
                trace,
                decisive,
            }),
            None => {
                let reason = blocked.unwrap_or_else(|| format!("no rule applies to {germ}"));
                trace.push(TraceStep::new("none", "no decisive rule", skipped.join("; ")));
                Ok(BVerdict {
                    verdict: Verdict::Unknown(reason),
                    roots: None,
                    witness: None,
                    trace,
                    decisive,
                })
            }
        }
    }

    /// Sub-decision with nested trace lines indented.
    fn sub(&self, germ: &FactoredGerm, depth: usize) -> Result<BVerdict> {
        if depth >= self.opts.max_depth {
            return Ok(BVerdict {
                verdict: Verdict::Unknown("recursion depth exhausted".into()),
                roots: None,
                witness: None,
                trace: Vec::new(),
                decisive: Vec::new(),
            });
        }
        let mut v = self.decide(germ, depth + 1)?;
        for s in v.trace.iter_mut() {
            s.detail = format!("  {}", s.detail);
        }
        Ok(v)
    }

    fn apply(&self, rule: BRule, g: &FactoredGerm, depth: usize) -> Result<Outcome> {
        let r = match rule {
            BRule::Mono => self.mono(g),
            BRule::Qh => self.qh(g),
            BRule::Arr => Ok(self.arr(g)),
            BRule::Plane => self.plane(g),
            BRule::SmoothFactor => self.smooth_factor(g, depth),
            BRule::Power => self.power(g, depth),
            BRule::Courbe => self.courbe(g),
            BRule::Origin => self.origin(g, depth),
            BRule::Many => self.many(g, depth),
        };
        match r {
            Ok(o) => Ok(o),
            Err(e) => resource(e),
        }
    }

    /// Factors with linearly independent nonzero linear parts: after a
    /// coordinate change the germ is a monomial.
    fn mono(&self, g: &FactoredGerm) -> Result<Outcome> {
        let base = g.ring().base_indices();
        let mut rows = Vec::new();
        for (f, _) in g.factors() {
            let lin = f.homogeneous_part(1);
            if lin.is_zero() {
                return Ok(Outcome::Inapplicable(format!("{f} is singular")));
            }
            rows.push(
                base.iter()
                    .map(|&i| {
                        let mut e = vec![0; g.ring().nvars()];
                        e[i] = 1;
                        lin.coeff(&e)
                    })
                    .collect::<Vec<Q>>(),
            );
        }
        if rank_dense(&rows) < rows.len() {
            return Ok(Outcome::Inapplicable("linear parts are dependent".into()));
        }
        let gamma: Vec<u32> = g.factors().iter().map(|(_, m)| *m).collect();
        let b = bs_monomial(&gamma);
        let mut detail = format!("monomial type {gamma:?}, b = {b}");
        if g.factors().iter().all(|(f, _)| f.is_monomial() && f.total_degree() == 1) {
            let mut exps = vec![0; base.len()];
            for (f, m) in g.factors() {
                let i = f.support_vars()[0];
                exps[base.iter().position(|&j| j == i).expect("base")] = *m;
            }
            let eq = monomial_equation(g.ring(), &exps)?;
            detail.push_str(&format!(", P = {}", eq.op));
        }
        Ok(from_roots(b, detail))
    }

    fn qh(&self, g: &FactoredGerm) -> Result<Outcome> {
        let h = g.product();
        if detect_weights(&h).is_none() {
            return Ok(Outcome::Inapplicable("no positive weights".into()));
        }
        match bs_quasihomogeneous(&h, self.limits)? {
            None => Ok(Outcome::Inapplicable("singularity not isolated".into())),
            Some(b) => Ok(from_roots(b.clone(), format!("b = {b}"))),
        }
    }

    fn arr(&self, g: &FactoredGerm) -> Outcome {
        let linear = g
            .factors()
            .iter()
            .all(|(f, _)| f.total_degree() == 1 && f.constant_term().is_zero());
        if !linear {
            return Outcome::Inapplicable("not a product of linear forms".into());
        }
        Outcome::Decided {
            holds: true,
            detail: format!("{} linear forms", g.factors().len()),
            roots: None,
            witness: None,
            sub: Vec::new(),
        }
    }

    fn plane(&self, g: &FactoredGerm) -> Result<Outcome> {
        if g.ring().base_indices().len() != 2 {
            return Ok(Outcome::Inapplicable("not a plane curve".into()));
        }
        if !g.is_reduced() || !is_reduced_plane_curve(&g.product(), self.limits)? {
            return Ok(Outcome::Inapplicable("not reduced".into()));
        }
        Ok(Outcome::Decided {
            holds: true,
            detail: "reduced plane curve".into(),
            roots: None,
            witness: None,
            sub: Vec::new(),
        })
    }

    fn smooth_factor(&self, g: &FactoredGerm, depth: usize) -> Result<Outcome> {
        if g.factors().len() < 2 {
            return Ok(Outcome::Inapplicable("a single factor".into()));
        }
        let mut blocked = None;
        for (j, (l, m)) in g.factors().iter().enumerate() {
            if *m != 1 || graph_variable(l).is_none() {
                continue;
            }
            let rest = g.without(j);
            let restricted: Vec<(Poly, u32)> = rest
                .factors()
                .iter()
                .map(|(f, k)| Ok((restrict_at_smooth_factor(f, l)?, *k)))
                .collect::<Result<_>>()?;
            if restricted.iter().any(|(f, _)| f.is_zero()) {
                continue;
            }
            let rv = self.sub(&rest, depth)?;
            if rv.verdict != Verdict::Holds {
                blocked.get_or_insert(format!("B({rest}) is {}", rv.verdict.label()));
                continue;
            }
            let restricted = FactoredGerm::new(restricted)?;
            let sv = self.sub(&restricted, depth)?;
            let holds = match sv.verdict {
                Verdict::Holds => true,
                Verdict::Fails => false,
                Verdict::Unknown(_) => {
                    blocked.get_or_insert(format!("B({restricted}) undecided"));
                    continue;
                }
            };
            let mut sub = rv.trace;
            sub.extend(sv.trace);
            let roots = sv.roots.as_ref().map(|b| format!(", restricted b = {b}")).unwrap_or_default();
            return Ok(Outcome::Decided {
                holds,
                detail: format!("smooth factor {l}, restriction {restricted}{roots}"),
                roots: None,
                witness: sv.witness,
                sub,
            });
        }
        Ok(match blocked {
            Some(b) => Outcome::Blocked(b),
            None => Outcome::Inapplicable("no smooth factor in graph form".into()),
        })
    }

    fn power(&self, g: &FactoredGerm, depth: usize) -> Result<Outcome> {
        let mut blocked = None;
        for (j, (l, m)) in g.factors().iter().enumerate() {
            if *m < 2 || graph_variable(l).is_none() || g.factors().len() < 2 {
                continue;
            }
            let rest = g.without(j);
            let rv = self.sub(&rest, depth)?;
            if rv.verdict != Verdict::Holds {
                blocked.get_or_insert(format!("B({rest}) is {}", rv.verdict.label()));
                continue;
            }
            let mut reduced = g.clone();
            reduced.factors[j].1 = 1;
            let pv = self.sub(&reduced, depth)?;
            if pv.verdict != Verdict::Holds {
                blocked.get_or_insert(format!("B({reduced}) is {}", pv.verdict.label()));
                continue;
            }
            let mut sub = rv.trace;
            sub.extend(pv.trace);
            return Ok(Outcome::Decided {
                holds: true,
                detail: format!("power {m} of {l} reduced to the first power"),
                roots: None,
                witness: None,
                sub,
            });
        }
        Ok(match blocked {
            Some(b) => Outcome::Blocked(b),
            None => Outcome::Inapplicable("no repeated smooth factor".into()),
        })
    }

    fn courbe(&self, g: &FactoredGerm) -> Result<Outcome> {
        let ring = g.ring();
        let base = ring.base_indices();
        if base.len() != 3 {
            return Ok(Outcome::Inapplicable("needs three variables".into()));
        }
        let (x1, x2, x3) = (
            Poly::var(ring, base[0]),
            Poly::var(ring, base[1]),
            Poly::var(ring, base[2]),
        );
        let l = (&x1 - &(&x2 * &x3)).primitive();
        let Some(j) = g.factors().iter().position(|(f, m)| *f == l && *m == 1) else {
            return Ok(Outcome::Inapplicable("no factor x1 - x2 x3".into()));
        };
        let rest = g.without(j);
        let curve = rest.product();
        if curve.is_constant() || !curve.uses_only(&base[..2]) {
            return Ok(Outcome::Inapplicable("cofactor is not a plane curve in x1, x2".into()));
        }
        if !is_reduced_plane_curve(&curve, self.limits)? {
            return Ok(Outcome::Inapplicable("plane curve not reduced".into()));
        }
        Ok(Outcome::Decided {
            holds: true,
            detail: format!("reduced plane curve {curve}"),
            roots: None,
            witness: None,
            sub: Vec::new(),
        })
    }

    fn pairwise_coprime(&self, g: &FactoredGerm) -> Result<Option<String>> {
        let n = g.ring().base_indices().len() as i64;
        for c in combinations(g.factors().len(), 2) {
            let fs = [g.factors()[c[0]].0.clone(), g.factors()[c[1]].0.clone()];
            let i = Ideal::new(g.ring(), fs.to_vec(), germ_order(&fs)).with_limits(self.limits.clone());
            if i.krull_dim()? != n - 2 {
                return Ok(Some(format!("factors {} and {} share a component", c[0] + 1, c[1] + 1)));
            }
        }
        Ok(None)
    }

    fn subproducts(&self, g: &FactoredGerm, k: usize, depth: usize) -> Result<std::result::Result<Vec<TraceStep>, String>> {
        let mut sub = Vec::new();
        for c in combinations(g.factors().len(), k) {
            let s = g.select(&c);
            let v = self.sub(&s, depth)?;
            if v.verdict != Verdict::Holds {
                return Ok(Err(format!("B({s}) is {}", v.verdict.label())));
            }
            sub.extend(v.trace);
        }
        Ok(Ok(sub))
    }

    fn origin(&self, g: &FactoredGerm, depth: usize) -> Result<Outcome> {
        let n = g.ring().base_indices().len();
        let p = g.factors().len();
        if p != n || n < 2 {
            return Ok(Outcome::Inapplicable(format!("{p} factors in {n} variables")));
        }
        if let Some(why) = self.pairwise_coprime(g)? {
            return Ok(Outcome::Inapplicable(why));
        }
        let fs: Vec<Poly> = g.factors().iter().map(|(f, m)| f.pow(*m)).collect();
        let i = Ideal::new(g.ring(), fs.clone(), germ_order(&fs)).with_limits(self.limits.clone());
        if i.krull_dim()? != 0 {
            return Ok(Outcome::Inapplicable("factors do not cut out the origin".into()));
        }
        match self.subproducts(g, n - 1, depth)? {
            Err(why) => Ok(Outcome::Blocked(why)),
            Ok(sub) => Ok(Outcome::Decided {
                holds: true,
                detail: format!("{n} factors cut out the origin; all {}-subproducts satisfy B", n - 1),
                roots: None,
                witness: None,
                sub,
            }),
        }
    }

    fn many(&self, g: &FactoredGerm, depth: usize) -> Result<Outcome> {
        let n = g.ring().base_indices().len();
        let p = g.factors().len();
        if p < n + 1 {
            return Ok(Outcome::Inapplicable(format!("{p} factors in {n} variables")));
        }
        if let Some(why) = self.pairwise_coprime(g)? {
            return Ok(Outcome::Inapplicable(why));
        }
        match self.subproducts(g, n, depth)? {
            Err(why) => Ok(Outcome::Blocked(why)),
            Ok(sub) => Ok(Outcome::Decided {
                holds: true,
                detail: format!("all {n}-subproducts satisfy B"),
                roots: None,
                witness: None,
                sub,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_factors, parse_poly};
    use crate::rational::{q, qr};
    use crate::weyl::{rescale_roots, solve_functional_equation, Bounds};

    fn germ(text: &str, vars: &str) -> FactoredGerm {
        let r = Ring::parse_base(vars).unwrap();
        FactoredGerm::new(parse_factors(text, &r).unwrap()).unwrap()
    }

    fn run(text: &str, vars: &str) -> BVerdict {
        decide_b(&germ(text, vars), &BOptions::default(), &Limits::default()).unwrap()
    }

    #[test]
    fn milnor_examples() {
        let l = Limits::default();
        let r = Ring::parse_base("x1,x2").unwrap();
        let m = milnor_data(&parse_poly("x1^2+x2^3", &r).unwrap(), None, &l).unwrap().unwrap();
        assert_eq!(m.milnor_number, 2);
        let mut w = m.weights.unwrap();
        w.sort();
        assert_eq!(w, vec![q(0), qr(1, 3)]);
        let m = milnor_data(&parse_poly("x1*x2", &r).unwrap(), None, &l).unwrap().unwrap();
        assert_eq!(m.milnor_number, 1);
        let r3 = Ring::parse_base("x2,x3").unwrap();
        let m = milnor_data(&parse_poly("x2^4+x3^4", &r3).unwrap(), None, &l).unwrap().unwrap();
        assert_eq!(m.milnor_number, 9);
        for (e, wt) in m.basis.iter().zip(m.weights.unwrap()) {
            assert_eq!(wt, Q::new(((e[0] + e[1]) as i64).into(), 4.into()));
        }
        let r3 = Ring::parse_base("x1,x2,x3").unwrap();
        assert!(milnor_data(&parse_poly("x1^2+x2^2", &r3).unwrap(), None, &l).unwrap().is_none());
    }

    #[test]
    fn monomial_formula_and_certificate() {
        let b = bs_monomial(&[3]);
        assert_eq!(b.root_set(), vec![qr(-1, 3), qr(-2, 3), q(-1)]);
        assert_eq!(bs_monomial(&[1, 1]).to_string(), "(s+1)^2");
        let r = Ring::parse_base("x1,x2").unwrap();
        let eq = monomial_equation(&r, &[2, 1]).unwrap();
        assert!(eq.verify().unwrap());
        assert_eq!(eq.b.to_string(), "(s+1/2)(s+1)^2");
    }

    #[test]
    fn monomial_matches_solver() {
        let l = Limits::default();
        let r = Ring::parse_base("x1,x2").unwrap();
        let f = parse_poly("x1^2*x2", &r).unwrap();
        let eq = solve_functional_equation(&f, &Section::one(&r), Bounds::new(3, 0, 3), &l).unwrap();
        assert_eq!(eq.b, bs_monomial(&[2, 1]));
    }

    #[test]
    fn quasihomogeneous_examples() {
        let l = Limits::default();
        let r = Ring::parse_base("x1,x2").unwrap();
        let b = bs_quasihomogeneous(&parse_poly("x1^2+x2^3", &r).unwrap(), &l).unwrap().unwrap();
        assert_eq!(b.to_string(), "(s+5/6)(s+1)(s+7/6)");
        let b = bs_quasihomogeneous(&parse_poly("x1^2+x2^2", &r).unwrap(), &l).unwrap().unwrap();
        assert_eq!(b.to_string(), "(s+1)^2");
        let r2 = Ring::parse_base("x2,x3").unwrap();
        let b = bs_quasihomogeneous(&parse_poly("x2^4+x3^4", &r2).unwrap(), &l).unwrap().unwrap();
        let mut roots = b.root_set();
        roots.sort();
        assert_eq!(roots, vec![qr(-3, 2), qr(-5, 4), q(-1), qr(-3, 4), qr(-1, 2)]);
        assert!(bs_quasihomogeneous(&parse_poly("x1^3+x2^4+x1*x2^3", &r).unwrap(), &l).unwrap().is_none());
    }

    #[test]
    fn quasihomogeneous_agrees_with_solver_on_cusp() {
        let l = Limits::default();
        let r = Ring::parse_base("x1,x2").unwrap();
        let f = parse_poly("x1^2+x2^3", &r).unwrap();
        let eq = solve_functional_equation(&f, &Section::one(&r), Bounds::new(3, 2, 3), &l).unwrap();
        let b = bs_quasihomogeneous(&f, &l).unwrap().unwrap();
        assert_eq!(eq.b, b);
    }

    #[test]
    fn restriction_examples() {
        let r = Ring::parse_base("x1,x2,x3,x4,x5").unwrap();
        let h = parse_poly("x1+x2*x3+x4*x5", &r).unwrap();
        let out = restrict_at_smooth_factor(&h, &parse_poly("x1", &r).unwrap()).unwrap();
        assert_eq!(out.to_string(), "x2*x3 + x4*x5");
        let r3 = Ring::parse_base("x1,x2,x3").unwrap();
        let g = parse_poly("x1^3+x2^4", &r3).unwrap();
        let out = restrict_at_smooth_factor(&g, &parse_poly("x1-x2*x3", &r3).unwrap()).unwrap();
        let r23 = Ring::parse_base("x2,x3").unwrap();
        assert_eq!(out.embed(&r23).unwrap(), parse_poly("x2^3*x3^3+x2^4", &r23).unwrap());
        assert!(restrict_at_smooth_factor(&g, &parse_poly("x1^2-x2", &r3).unwrap()).is_ok());
        assert!(restrict_at_smooth_factor(&g, &parse_poly("x1*x2-x3^2", &r3).unwrap()).is_err());
    }

    #[test]
    fn rescaling_matches_square() {
        let roots = rescale_roots(&[q(-1)], 2);
        assert_eq!(roots, bs_monomial(&[2]).root_set());
    }

    #[test]
    fn factor_splitting() {
        let g = germ("x1^2*x2 + x1*x2^2", "x1,x2");
        assert_eq!(g.factors().len(), 3);
        let g = germ("x1^2 - x2^2", "x1,x2");
        assert_eq!(g.factors().len(), 2);
        let g = germ("(1+x1)*x2", "x1,x2");
        assert_eq!(g.factors().len(), 1);
        let g = germ("x1*x2*(x1+x2)*x1", "x1,x2");
        assert_eq!(g.factors().iter().map(|(_, m)| *m).max(), Some(2));
    }

    #[test]
    fn arrangement_holds() {
        let v = run("x1*x2*(x1+x2)", "x1,x2");
        assert_eq!(v.verdict, Verdict::Holds);
        assert!(v.decisive.contains(&BRule::Arr));
    }

    #[test]
    fn curve_family_holds() {
        let v = run("(x1-x2*x3)*(x1^3+x2^4)", "x1,x2,x3");
        assert_eq!(v.verdict, Verdict::Holds);
        assert!(v.decisive.contains(&BRule::Courbe));
        let r = Ring::parse_base("x1,x2,x3").unwrap();
        let expanded = parse_poly("(x1-x2*x3)*(x1^3+x2^4)", &r).unwrap();
        assert_eq!(FactoredGerm::from_poly(&expanded).unwrap().factors().len(), 2);
        let v = decide_b_poly(&expanded, &Limits::default()).unwrap();
        assert!(v.decisive.contains(&BRule::Courbe));
    }

    #[test]
    fn quartic_surface_fails() {
        let v = run("x1^2+x2^4+x3^4", "x1,x2,x3");
        assert_eq!(v.verdict, Verdict::Fails);
        assert_eq!(v.witness, Some(q(-2)));
        assert_eq!(v.decisive[0], BRule::Qh);
    }

    #[test]
    fn smooth_restriction_to_quadric_fails() {
        let v = run("x1*(x1+x2*x3+x4*x5)", "x1,x2,x3,x4,x5");
        assert_eq!(v.verdict, Verdict::Fails);
        assert!(v.decisive.contains(&BRule::SmoothFactor));
        assert!(v
            .trace
            .iter()
            .any(|s| s.rule == "R-qh" && s.detail.contains("(s+1)(s+2)")));
    }

    #[test]
    fn smooth_and_monomial_germs() {
        assert_eq!(run("x1", "x1,x2").verdict, Verdict::Holds);
        assert_eq!(run("x1^3*x2", "x1,x2").verdict, Verdict::Holds);
        assert_eq!(run("(x1+x2^2)*x2", "x1,x2").decisive[0], BRule::Mono);
    }

    #[test]
    fn power_of_smooth_factor() {
        let v = run("(x1-x2*x3)^2*(x1^3+x2^4)", "x1,x2,x3");
        assert_eq!(v.verdict, Verdict::Holds);
        assert!(v.decisive.contains(&BRule::Power));
    }

    #[test]
    fn origin_and_many_rules() {
        let v = run("(x1^2+x2^3)*(x1^3+x2^2)", "x1,x2");
        assert_eq!(v.verdict, Verdict::Holds);
        assert!(v.decisive.contains(&BRule::Origin));
        let v = run("x1*x2*(x1+x2)*(x1^2+x2^3)", "x1,x2");
        assert!(v.decisive.contains(&BRule::Many));
    }

    #[test]
    fn ablation_only_loses_verdicts() {
        let corpus = [
            ("x1*x2*(x1+x2)", "x1,x2"),
            ("(x1-x2*x3)*(x1^3+x2^4)", "x1,x2,x3"),
            ("x1^2+x2^4+x3^4", "x1,x2,x3"),
            ("x1*(x1+x2*x3+x4*x5)", "x1,x2,x3,x4,x5"),
            ("(x1^2+x2^3)*(x1^3+x2^2)", "x1,x2"),
        ];
        let l = Limits::default();
        for (text, vars) in corpus {
            let g = germ(text, vars);
            let full = decide_b(&g, &BOptions::default(), &l).unwrap();
            for rule in BRule::ALL {
                let opts = BOptions {
                    disabled: vec![rule],
                    ..BOptions::default()
                };
                let v = decide_b(&g, &opts, &l).unwrap();
                assert!(!v.verdict.is_decided() || v.verdict == full.verdict, "{text} without {}", rule.id());
            }
        }
    }

    #[test]
    fn everything_disabled_is_unknown() {
        let g = germ("x1", "x1");
        let opts = BOptions {
            disabled: BRule::ALL.to_vec(),
            ..BOptions::default()
        };
        let v = decide_b(&g, &opts, &Limits::default()).unwrap();
        assert!(!v.verdict.is_decided());
    }
}
