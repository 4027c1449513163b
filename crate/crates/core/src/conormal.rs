//! Conormal geometry: relative conormal varieties by elimination, the
//! linear-type test (condition W), minor vector fields `Delta_K`, the
//! annihilator generators of a generic arrangement and Sebastiani-Thom
//! transport of conormal equations.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::groebner::{eliminate, germ_order, intersect, syzygies, Ideal, Limits, MonomialOrder};
use crate::logder::{cotangent_ring, LogDeriv};
use crate::poly::{detect_weights, jacobian, minor_det, product, Poly, Ring, VarId};
use crate::verdict::{Decision, Verdict};
use crate::weyl::{TwistedElem, WeylOp};

/// Increasing `k`-subsets of `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn base_count(p: &Poly) -> usize {
    p.ring().base_indices().len()
}

/// Closure of `{(x, xi) : x in X, xi = sum mu_j d h_j(x) + lambda d h1(x)}`
/// where `X = V(xs)`, as an ideal of `cot` (a cotangent ring over the ring
/// of the inputs). With `xs` empty this is the conormal `W_{h1}`.
pub fn relative_conormal(h1: &Poly, xs: &[Poly], cot: &Arc<Ring>, limits: &Limits) -> Result<Ideal> {
    let mut names: Vec<String> = (1..=xs.len()).map(|j| format!("mu{j}")).collect();
    names.push("lambda".into());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let ext = cot.with_params(&refs);
    let first = cot.nvars();
    let params: Vec<Poly> = (first..ext.nvars()).map(|i| Poly::var(&ext, i)).collect();
    let h1 = h1.embed(&ext)?;
    let xs: Vec<Poly> = xs.iter().map(|x| x.embed(&ext)).collect::<Result<_>>()?;
    let mut gens = xs.clone();
    for i in cot.base_indices() {
        let dual = cot
            .dual_of(i)
            .ok_or_else(|| Error::Ring(format!("no cotangent dual for `{}`", cot.var(i).name)))?;
        let mut g = &Poly::var(&ext, dual) - &(&params[xs.len()] * &h1.diff(i));
        for (mu, x) in params.iter().zip(&xs) {
            g = &g - &(mu * &x.diff(i));
        }
        gens.push(g);
    }
    let big = Ideal::new(&ext, gens, MonomialOrder::GrevLex).with_limits(limits.clone());
    let drop: Vec<usize> = (first..ext.nvars()).collect();
    let e = eliminate(&big, &drop)?;
    let gens = e.gens().iter().map(|g| g.embed(cot)).collect::<Result<_>>()?;
    Ok(Ideal::new(cot, gens, MonomialOrder::GrevLex).with_limits(limits.clone()))
}

/// Ideal of the conormal `W_f`, the closure of `{(x, lambda df(x))}`, in
/// the cotangent ring of `f`.
pub fn conormal_ideal(f: &Poly, limits: &Limits) -> Result<Ideal> {
    conormal_ideal_in(f, &cotangent_ring(f), limits)
}

/// [`conormal_ideal`] in a given cotangent ring over the ring of `f`.
pub fn conormal_ideal_in(f: &Poly, cot: &Arc<Ring>, limits: &Limits) -> Result<Ideal> {
    if f.is_constant() {
        return Err(Error::Precondition("conormal of a constant".into()));
    }
    relative_conormal(f, &[], cot, limits)
}

/// The linear forms `sum a_i xi_i` for generators `(a_i)` of the syzygies
/// of the gradient of `f`.
pub fn syzygy_linear_forms(f: &Poly, cot: &Arc<Ring>, limits: &Limits) -> Result<Vec<Poly>> {
    let base = f.ring().base_indices();
    let grad: Vec<Poly> = base.iter().map(|&i| f.diff(i)).collect();
    let rows = syzygies(&grad, limits)?;
    let mut out = Vec::new();
    for row in rows {
        let mut acc = Poly::zero(cot);
        for (&i, a) in base.iter().zip(&row) {
            let xi = Poly::var(cot, cot.dual_of(i).expect("cotangent ring"));
            acc = &acc + &(&a.embed(cot)? * &xi);
        }
        if !acc.is_zero() {
            out.push(acc);
        }
    }
    Ok(out)
}

const COND_W: &str = "condition W: the conormal variety is cut out by equations linear in xi";

/// Condition W: every generator of the conormal ideal lies in the ideal of
/// syzygy linear forms, at the origin.
pub fn condition_w(f: &Poly, limits: &Limits) -> Result<Decision> {
    match condition_w_inner(f, limits) {
        Ok(d) => Ok(d),
        Err(e) => Decision::from_error(e),
    }
}

fn condition_w_inner(f: &Poly, limits: &Limits) -> Result<Decision> {
    let cot = cotangent_ring(f);
    let w = conormal_ideal_in(f, &cot, limits)?;
    let conormal: Vec<Poly> = w.basis()?.to_vec();
    let lin = syzygy_linear_forms(f, &cot, limits)?;
    let mut all = lin.clone();
    all.extend(conormal.iter().cloned());
    let order = germ_order(&all);
    let l = Ideal::new(&cot, lin.clone(), order.clone()).with_limits(limits.clone());
    let mut d = Decision::new(Verdict::Holds);
    for g in &conormal {
        if !l.contains(g)? {
            return Ok(Decision::new(Verdict::Fails)
                .step("W-linear", COND_W, "a conormal equation is not generated by linear ones")
                .cert("witness", g)
                .cert("linear_forms", lin.len()));
        }
    }
    let local = if order.is_global() { "graded" } else { "local" };
    d.push_step(
        "W-linear",
        COND_W,
        format!("all {} conormal equations lie in the ideal of {} syzygy forms ({local} check)", conormal.len(), lin.len()),
    );
    for (k, g) in conormal.iter().enumerate() {
        d = d.cert(format!("conormal{}", k + 1), g);
    }
    Ok(d)
}

/// The vector field `sum_i (-1)^i m_{K(i)} d_{k_i}` for a morphism of `r`
/// components and a tuple `K` of `r + 1` distinct 1-based base variable
/// indices. `m_{K(i)}` is the minor on the columns of `K` without `k_i`,
/// taken in the order of `K`. The field kills every component.
pub fn build_delta_k(morphism: &[Poly], k: &[usize]) -> Result<LogDeriv> {
    let first = morphism
        .first()
        .ok_or_else(|| Error::Precondition("empty morphism".into()))?;
    let ring = first.ring().clone();
    let base = ring.base_indices();
    let (n, r) = (base.len(), morphism.len());
    if r >= n {
        return Err(Error::Precondition(format!("morphism with {r} components in {n} variables")));
    }
    if k.len() != r + 1 {
        return Err(Error::Index(format!("K has {} entries, expected {}", k.len(), r + 1)));
    }
    for (a, &ka) in k.iter().enumerate() {
        if ka == 0 || ka > n {
            return Err(Error::Index(format!("K entry {ka} outside 1..{n}")));
        }
        if k[..a].contains(&ka) {
            return Err(Error::Index(format!("K entry {ka} repeated")));
        }
    }
    let jac = jacobian(morphism, &base);
    let rows: Vec<usize> = (0..r).collect();
    let mut coeffs = vec![Poly::zero(&ring); n];
    for i in 0..=r {
        let cols: Vec<usize> = k.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &c)| c - 1).collect();
        let m = if r == 0 { Poly::one(&ring) } else { minor_det(&jac, &rows, &cols)? };
        // (-1)^i with i counted from 1
        let term = if i % 2 == 0 { -&m } else { m };
        coeffs[k[i] - 1] = &coeffs[k[i] - 1] + &term;
    }
    Ok(LogDeriv {
        coeffs,
        cofactor: Poly::zero(&ring),
    })
}

/// Checks that every factor has an isolated singularity and that every
/// `k`-subfamily, `2 <= k <= min(p, n)`, is a complete intersection with an
/// isolated singularity at the origin. Returns the failures found; empty
/// means the arrangement is certified generic.
pub fn generic_arrangement_failures(factors: &[Poly], limits: &Limits) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let Some(first) = factors.first() else {
        return Ok(vec!["no factors".into()]);
    };
    let n = base_count(first);
    for (i, h) in factors.iter().enumerate() {
        if !h.constant_term().is_zero() {
            out.push(format!("factor {} does not vanish at the origin", i + 1));
        }
    }
    if !out.is_empty() {
        return Ok(out);
    }
    for k in 1..=factors.len().min(n) {
        for sub in combinations(factors.len(), k) {
            let fs: Vec<Poly> = sub.iter().map(|&i| factors[i].clone()).collect();
            let label: Vec<String> = sub.iter().map(|i| (i + 1).to_string()).collect();
            match icis_failure(&fs, limits)? {
                None => {}
                Some(why) => out.push(format!("factors {{{}}}: {why}", label.join(","))),
            }
        }
    }
    Ok(out)
}

/// `None` if `fs` defines a complete intersection of codimension `|fs|`
/// with at most an isolated singularity at the origin.
pub fn icis_failure(fs: &[Poly], limits: &Limits) -> Result<Option<String>> {
    let ring = fs[0].ring().clone();
    let base = ring.base_indices();
    let n = base.len() as i64;
    let k = fs.len();
    let ci = Ideal::new(&ring, fs.to_vec(), germ_order(fs)).with_limits(limits.clone());
    let dim = ci.krull_dim()?;
    if dim != n - k as i64 {
        return Ok(Some(format!("dimension {dim} instead of {}", n - k as i64)));
    }
    let jac = jacobian(fs, &base);
    let rows: Vec<usize> = (0..k).collect();
    let mut gens = fs.to_vec();
    for cols in combinations(base.len(), k) {
        gens.push(minor_det(&jac, &rows, &cols)?);
    }
    gens.retain(|g| !g.is_zero());
    let sing = Ideal::new(&ring, gens.clone(), germ_order(&gens)).with_limits(limits.clone());
    let sdim = sing.krull_dim()?;
    if sdim > 0 {
        return Ok(Some(format!("singular locus of dimension {sdim}")));
    }
    Ok(None)
}

/// One operator `Delta_K^{h_S} * prod_{i not in S} h_i`.
#[derive(Debug, Clone)]
pub struct AnnGenerator {
    /// 0-based factor indices `S`, the distinguished one first.
    pub subset: Vec<usize>,
    /// 1-based variable tuple.
    pub k: Vec<usize>,
    pub field: LogDeriv,
    pub op: WeylOp,
}

/// Output of [`arrangement_ann_generators`].
#[derive(Debug, Clone)]
pub struct ArrangementGenerators {
    pub distinguished: usize,
    pub generators: Vec<AnnGenerator>,
    /// Hypotheses of the generation statement that were found to fail.
    /// When nonempty, the operators still annihilate but need not generate.
    pub violations: Vec<String>,
}

fn complement_product(factors: &[Poly], subset: &[usize]) -> Poly {
    let others: Vec<Poly> = (0..factors.len())
        .filter(|i| !subset.contains(i))
        .map(|i| factors[i].clone())
        .collect();
    product(factors[0].ring(), &others)
}

/// Subsets containing the distinguished factor with `1 <= r <= min(n-1, p)`
/// elements, the distinguished factor first and the rest increasing.
fn distinguished_subsets(p: usize, n: usize, dist: usize) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..p).filter(|&i| i != dist).collect();
    let mut out = Vec::new();
    for r in 1..=p.min(n - 1) {
        for c in combinations(others.len(), r - 1) {
            let mut s = vec![dist];
            s.extend(c.iter().map(|&j| others[j]));
            out.push(s);
        }
    }
    out
}

/// The operators `Delta_K^{h_{i_1},...,h_{i_r}} prod_{i not in S} h_i` with
/// `i_1` the distinguished factor, `1 <= r <= min(n-1, p)` and `K`
/// increasing. They annihilate `(1/h~) h_1^s` with `h~` the product of the
/// other factors. Hypotheses (`n >= 3`, generic arrangement) are checked
/// and failures reported.
pub fn arrangement_ann_generators(factors: &[Poly], distinguished: usize, limits: &Limits) -> Result<ArrangementGenerators> {
    let p = factors.len();
    if distinguished >= p {
        return Err(Error::Index(format!("distinguished factor {distinguished} of {p}")));
    }
    let n = base_count(&factors[0]);
    if n < 2 {
        return Err(Error::Precondition("at least two variables needed".into()));
    }
    let mut violations = Vec::new();
    if n < 3 {
        violations.push(format!("n = {n} < 3"));
    }
    if p < 2 {
        violations.push("fewer than two factors".into());
    }
    violations.extend(generic_arrangement_failures(factors, limits)?);
    let mut generators = Vec::new();
    for subset in distinguished_subsets(p, n, distinguished) {
        let morphism: Vec<Poly> = subset.iter().map(|&i| factors[i].clone()).collect();
        let rest = complement_product(factors, &subset);
        for kt in combinations(n, subset.len() + 1) {
            let k: Vec<usize> = kt.iter().map(|&j| j + 1).collect();
            let field = build_delta_k(&morphism, &k)?;
            let op = &field.to_op() * &WeylOp::from_poly(&rest);
            generators.push(AnnGenerator {
                subset: subset.clone(),
                k,
                field,
                op,
            });
        }
    }
    Ok(ArrangementGenerators {
        distinguished,
        generators,
        violations,
    })
}

/// The section `(1/h~) h_1^s` in the factors' ring extended by `s`.
pub fn arrangement_section(factors: &[Poly], distinguished: usize) -> Result<TwistedElem> {
    let ring = factors[0].ring().with_params(&["s"]);
    let s = ring.nvars() - 1;
    let h1 = factors[distinguished].embed(&ring)?;
    let bases = (0..factors.len())
        .filter(|&i| i != distinguished)
        .map(|i| Ok((factors[i].embed(&ring)?, 1)))
        .collect::<Result<Vec<_>>>()?;
    TwistedElem::new(Poly::one(&ring), h1, 0, bases, Some(s))
}

/// Logarithmic fields of `h = prod h_i`: the Euler field of the product
/// (when weights exist) and `[prod_{i not in S} h_i] Delta_K^{h_S}`.
pub fn arrangement_derlog_generators(factors: &[Poly], distinguished: usize) -> Result<Vec<LogDeriv>> {
    let ring = factors[0].ring().clone();
    let h = product(&ring, factors);
    let n = base_count(&h);
    let mut out = Vec::new();
    if let Some(w) = detect_weights(&h) {
        let w = w.normalized();
        let coeffs: Vec<Poly> = ring
            .base_indices()
            .iter()
            .zip(&w.alpha)
            .map(|(&i, a)| Poly::var(&ring, i).scale(a))
            .collect();
        out.push(LogDeriv::from_field(&h, coeffs).expect("Euler field"));
    }
    for subset in distinguished_subsets(factors.len(), n, distinguished) {
        let morphism: Vec<Poly> = subset.iter().map(|&i| factors[i].clone()).collect();
        let rest = complement_product(factors, &subset);
        for kt in combinations(n, subset.len() + 1) {
            let k: Vec<usize> = kt.iter().map(|&j| j + 1).collect();
            let d = build_delta_k(&morphism, &k)?;
            let coeffs = d.coeffs.iter().map(|c| c * &rest).collect();
            out.push(LogDeriv::from_field(&h, coeffs).expect("Delta_K fields preserve every factor"));
        }
    }
    Ok(out)
}

/// Components of the characteristic variety of `(1/h~) h_1^s`: `W_{h1}`
/// and `W_{h1|X_I}` for nonempty sets `I` of other factors with
/// `|I| <= n - 1`, each as an ideal of the cotangent ring with its `I`.
pub fn charvariety_components(
    factors: &[Poly],
    distinguished: usize,
    limits: &Limits,
) -> Result<Vec<(Vec<usize>, Ideal)>> {
    let p = factors.len();
    if distinguished >= p {
        return Err(Error::Index(format!("distinguished factor {distinguished} of {p}")));
    }
    let h1 = &factors[distinguished];
    let cot = cotangent_ring(h1);
    let n = base_count(h1);
    let others: Vec<usize> = (0..p).filter(|&i| i != distinguished).collect();
    let mut out = vec![(Vec::new(), relative_conormal(h1, &[], &cot, limits)?)];
    for r in 1..=others.len().min(n - 1) {
        for c in combinations(others.len(), r) {
            let subset: Vec<usize> = c.iter().map(|&j| others[j]).collect();
            let xs: Vec<Poly> = subset.iter().map(|&i| factors[i].clone()).collect();
            out.push((subset, relative_conormal(h1, &xs, &cot, limits)?));
        }
    }
    Ok(out)
}

/// Ideal of the characteristic variety of `(1/h~) h_1^s`: the intersection
/// of the ideals of [`charvariety_components`].
pub fn arrangement_charvariety_ideal(factors: &[Poly], distinguished: usize, limits: &Limits) -> Result<Ideal> {
    let comps = charvariety_components(factors, distinguished, limits)?;
    let mut it = comps.into_iter().map(|(_, i)| i);
    let mut acc = it.next().expect("W_h1 is always present");
    for c in it {
        acc = intersect(&acc, &c)?;
    }
    Ok(acc)
}

/// Equations of `W_{h1|X}` for `X = V(xs)` from minors: the `xs` and the
/// symbols of `Delta_K^{h1, xs}` for increasing `K` of length `|xs| + 2`
/// (none when `|xs| + 1 >= n`). They vanish on the component.
pub fn minor_equations(h1: &Poly, xs: &[Poly], cot: &Arc<Ring>) -> Result<Vec<Poly>> {
    let n = base_count(h1);
    let mut out: Vec<Poly> = xs.iter().map(|x| x.embed(cot)).collect::<Result<_>>()?;
    let mut morphism = vec![h1.clone()];
    morphism.extend(xs.iter().cloned());
    if morphism.len() < n {
        for kt in combinations(n, morphism.len() + 1) {
            let k: Vec<usize> = kt.iter().map(|&j| j + 1).collect();
            let s = build_delta_k(&morphism, &k)?.symbol(cot)?;
            if !s.is_zero() {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// The conormal equations of a Sebastiani-Thom sum `g(x) + f(z)`.
#[derive(Debug, Clone)]
pub struct SumConormal {
    /// Base variables of `g` then of `f`, then `xi` duals of the first
    /// block and `eta` duals of the second.
    pub cot: Arc<Ring>,
    /// `g + f` in `cot`.
    pub sum: Poly,
    pub ideal: Ideal,
}

/// Generators `f_zi eta_j - f_zj eta_i`, `g_xk eta_i - f_zi xi_k` and the
/// `upsilons` (equations of `W_g` in the cotangent ring of `g`).
pub fn sebastiani_thom_generators(upsilons: &[Poly], g: &Poly, f: &Poly, limits: &Limits) -> Result<SumConormal> {
    let gr = g.ring();
    let fr = f.ring();
    let mut vars: Vec<VarId> = gr.base_indices().iter().map(|&i| gr.var(i).clone()).collect();
    let nx = vars.len();
    for (j, &i) in fr.base_indices().iter().enumerate() {
        let v = fr.var(i);
        vars.push(VarId::new(v.class, (nx + j + 1) as u32, v.name.clone()));
    }
    let base = Ring::new(vars)?;
    let z_block: Vec<usize> = (nx..base.nvars()).collect();
    let cot = base.cotangent(&z_block);

    let fz: Vec<Poly> = fr.base_indices().iter().map(|&i| f.diff(i)).collect();
    let jf = Ideal::new(fr, fz.clone(), germ_order(&fz)).with_limits(limits.clone());
    if jf.krull_dim()? > 0 {
        return Err(Error::Precondition("f must have an isolated singularity".into()));
    }
    let wg = conormal_ideal(g, limits)?;
    for u in upsilons {
        if !wg.contains(u)? {
            return Err(Error::Precondition(format!("{u} does not vanish on the conormal of g")));
        }
    }

    let ge = g.embed(&cot)?;
    let fe = f.embed(&cot)?;
    let dual = |i: usize| Poly::var(&cot, cot.dual_of(i).expect("cotangent ring"));
    let mut gens = Vec::new();
    for a in 0..z_block.len() {
        for b in a + 1..z_block.len() {
            let (za, zb) = (z_block[a], z_block[b]);
            gens.push(&(&fe.diff(za) * &dual(zb)) - &(&fe.diff(zb) * &dual(za)));
        }
    }
    for xk in 0..nx {
        for &zi in &z_block {
            gens.push(&(&ge.diff(xk) * &dual(zi)) - &(&fe.diff(zi) * &dual(xk)));
        }
    }
    for u in upsilons {
        gens.push(u.embed(&cot)?);
    }
    gens.retain(|p| !p.is_zero());
    let sum = &ge + &fe;
    let ideal = Ideal::new(&cot, gens, MonomialOrder::GrevLex).with_limits(limits.clone());
    Ok(SumConormal { cot, sum, ideal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::rational::{q, Q};

    fn ring(names: &[&str]) -> Arc<Ring> {
        Ring::base(names).unwrap()
    }

    fn p(s: &str, r: &Arc<Ring>) -> Poly {
        parse_poly(s, r).unwrap()
    }

    /// Substitutes `xi := lambda * grad f` at a rational point and checks
    /// that every generator vanishes.
    fn vanishes_on_parametrization(gens: &[Poly], f: &Poly, cot: &Arc<Ring>, point: &[Q], lambda: &Q) -> bool {
        let base = f.ring().base_indices();
        let mut vals = vec![q(0); cot.nvars()];
        for (&i, x) in base.iter().zip(point) {
            vals[i] = x.clone();
        }
        for &i in &base {
            vals[cot.dual_of(i).unwrap()] = lambda * f.diff(i).eval(point);
        }
        gens.iter().all(|g| g.eval(&vals) == q(0))
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn conormal_of_smooth_germ() {
        let r = ring(&["x1", "x2", "x3"]);
        let w = conormal_ideal(&p("x1", &r), &Limits::default()).unwrap();
        let cot = w.ring().clone();
        let expected = Ideal::new(&cot, vec![p("xi2", &cot), p("xi3", &cot)], MonomialOrder::GrevLex);
        assert!(w.same_as(&expected).unwrap());
    }

    #[test]
    fn conormal_of_cusp() {
        let r = ring(&["x1", "x2"]);
        let f = p("x1^2+x2^3", &r);
        let w = conormal_ideal(&f, &Limits::default()).unwrap();
        let cot = w.ring().clone();
        let expected = Ideal::new(&cot, vec![p("3*x2^2*xi1 - 2*x1*xi2", &cot)], MonomialOrder::GrevLex);
        assert!(w.same_as(&expected).unwrap());
        let pts = [[q(1), q(2)], [q(-3), q(5)], [q(7), q(-1)]];
        for pt in &pts {
            assert!(vanishes_on_parametrization(w.gens(), &f, &cot, pt, &q(3)));
        }
        assert_eq!(w.krull_dim().unwrap(), 3);
    }

    #[test]
    fn conormal_of_normal_crossing() {
        let r = ring(&["x1", "x2"]);
        let f = p("x1*x2", &r);
        let w = conormal_ideal(&f, &Limits::default()).unwrap();
        let cot = w.ring().clone();
        let expected = Ideal::new(&cot, vec![p("x1*xi1 - x2*xi2", &cot)], MonomialOrder::GrevLex);
        assert!(w.same_as(&expected).unwrap());
        assert!(vanishes_on_parametrization(w.gens(), &f, &cot, &[q(2), q(-5)], &q(-4)));
    }

    #[test]
    fn condition_w_examples() {
        let l = Limits::default();
        let r = ring(&["x1", "x2"]);
        for f in ["x1^2+x2^3", "x1*x2"] {
            let d = condition_w(&p(f, &r), &l).unwrap();
            assert_eq!(d.verdict, Verdict::Holds, "{f}");
        }
        let r3 = ring(&["x1", "x2", "z"]);
        let d = condition_w(&p("x1^3+x2^3+z^2", &r3), &l).unwrap();
        assert_eq!(d.verdict, Verdict::Holds);
    }

    #[test]
    fn delta_for_one_function() {
        let r = ring(&["x1", "x2", "x3"]);
        let f = p("x1^2+x2^3+x3^4", &r);
        let d = build_delta_k(std::slice::from_ref(&f), &[1, 2]).unwrap();
        assert_eq!(d.coeffs[0], -&f.diff(1));
        assert_eq!(d.coeffs[1], f.diff(0));
        assert!(d.coeffs[2].is_zero());
        let cot = cotangent_ring(&f);
        let sym = d.symbol(&cot).unwrap();
        let paper_form = p("3*x2^2*xi1 - 2*x1*xi2", &cot);
        assert!(sym == paper_form || sym == -&paper_form);
    }

    #[test]
    fn delta_for_coordinate_pair() {
        let r = ring(&["x1", "x2", "x3"]);
        let d = build_delta_k(&[p("x1", &r), p("x2", &r)], &[1, 2, 3]).unwrap();
        assert!(d.coeffs[0].is_zero() && d.coeffs[1].is_zero());
        assert!(d.coeffs[2] == Poly::one(&r) || d.coeffs[2] == -&Poly::one(&r));
    }

    #[test]
    fn delta_kills_components_for_any_order() {
        let r = ring(&["x1", "x2", "x3", "x4"]);
        let m = [p("x1^2+x2*x3", &r), p("x3^3-x4*x1", &r)];
        for k in [[1, 2, 3], [3, 1, 4], [4, 3, 2]] {
            let d = build_delta_k(&m, &k).unwrap();
            for h in &m {
                assert!(d.apply(h).is_zero());
            }
        }
        assert!(build_delta_k(&m, &[1, 1, 2]).is_err());
        assert!(build_delta_k(&m, &[1, 2]).is_err());
        assert!(build_delta_k(&m, &[1, 2, 5]).is_err());
    }

    #[test]
    fn generic_pair_generators_annihilate() {
        let l = Limits::default();
        let r = ring(&["x1", "x2", "x3"]);
        let fs = [p("x1^2+x2^3+x3^4", &r), p("x1^2+2*x2^3+3*x3^4", &r)];
        let a = arrangement_ann_generators(&fs, 0, &l).unwrap();
        assert!(a.violations.is_empty(), "{:?}", a.violations);
        // r = 1: C(3,2) tuples; r = 2: C(3,3) tuples
        assert_eq!(a.generators.len(), 3 + 1);
        let sec = arrangement_section(&fs, 0).unwrap();
        for g in &a.generators {
            let op = g.op.embed(sec.ring()).unwrap();
            assert!(sec.apply(&op).unwrap().is_zero(), "{:?}", g.k);
        }
    }

    #[test]
    fn generator_count_is_binomial() {
        let l = Limits::default();
        let r = ring(&["x1", "x2", "x3", "x4"]);
        let fs = [p("x1", &r), p("x2", &r), p("x3", &r)];
        let a = arrangement_ann_generators(&fs, 1, &l).unwrap();
        // r = 1: C(4,2); r = 2: 2 * C(4,3); r = 3: 1 * C(4,4)
        assert_eq!(a.generators.len(), 6 + 8 + 1);
        assert!(a.generators.iter().all(|g| g.subset[0] == 1));
    }

    #[test]
    fn derlog_fields_are_logarithmic() {
        let r = ring(&["x1", "x2", "x3"]);
        let fs = [p("x1^2+x2^2+x3^2", &r), p("x1^2+2*x2^2+3*x3^2", &r)];
        let h = product(&r, &fs);
        let fields = arrangement_derlog_generators(&fs, 0).unwrap();
        assert!(fields.iter().all(|d| d.verify(&h)));
        assert_eq!(fields[0].cofactor, Poly::one(&r));
    }

    #[test]
    fn non_generic_inputs_are_flagged() {
        let l = Limits::default();
        let r = ring(&["x1", "x2", "x3"]);
        let fs = [p("x1^3+x2^3", &r), p("x1-x2*x3", &r)];
        let a = arrangement_ann_generators(&fs, 0, &l).unwrap();
        assert!(!a.violations.is_empty());
        let shared = [p("x1", &r), p("x1*x2+x1", &r)];
        assert!(!generic_arrangement_failures(&shared, &l).unwrap().is_empty());
    }

    #[test]
    fn smooth_distinguished_alone_gives_conormal() {
        let l = Limits::default();
        let r = ring(&["x1", "x2", "x3"]);
        let h1 = p("x1-x2*x3", &r);
        let i = arrangement_charvariety_ideal(std::slice::from_ref(&h1), 0, &l).unwrap();
        assert!(i.same_as(&conormal_ideal(&h1, &l).unwrap()).unwrap());
    }

    #[test]
    fn curve_family_components() {
        let l = Limits::default();
        let r = ring(&["x1", "x2", "x3"]);
        let g = p("x1^3+x2^3", &r);
        let lf = p("x1-x2*x3", &r);
        let fs = [lf.clone(), g.clone()];
        let comps = charvariety_components(&fs, 1, &l).unwrap();
        assert_eq!(comps.len(), 2);
        let cot = comps[0].1.ring().clone();
        // minor equations vanish on the relative conormal
        let eqs = minor_equations(&g, std::slice::from_ref(&lf), &cot).unwrap();
        assert!(comps[1].1.contains_all(&eqs).unwrap());
        // points xi = mu dl + lambda dg over l = 0 satisfy every equation
        let i = arrangement_charvariety_ideal(&fs, 1, &l).unwrap();
        let (x2, x3, mu, lam) = (q(2), q(-3), q(5), q(7));
        let x1 = &x2 * &x3;
        let pt = [x1, x2, x3];
        let mut vals: Vec<Q> = pt.to_vec();
        for k in 0..3 {
            vals.push(&mu * lf.diff(k).eval(&pt) + &lam * g.diff(k).eval(&pt));
        }
        assert!(i.gens().iter().all(|e| e.eval(&vals) == q(0)));
    }

    #[test]
    fn sebastiani_thom_cubic_plus_square() {
        let l = Limits::default();
        let gr = ring(&["x1", "x2"]);
        let fr = ring(&["z"]);
        let g = p("x1^3+x2^3", &gr);
        let f = p("z^2", &fr);
        let gcot = cotangent_ring(&g);
        let ups = [p("x2^2*xi1 - x1^2*xi2", &gcot)];
        let st = sebastiani_thom_generators(&ups, &g, &f, &l).unwrap();
        let w = conormal_ideal_in(&st.sum, &st.cot, &l).unwrap();
        assert!(st.ideal.same_as(&w).unwrap());
        // every emitted generator vanishes on xi = lambda grad g, eta = lambda grad f
        let pt = [q(2), q(-1), q(3)];
        let sum = &st.sum;
        let mut at = pt.to_vec();
        at.extend([q(0), q(0), q(0)]);
        let mut vals = pt.to_vec();
        for i in 0..3 {
            vals.push(q(5) * sum.diff(i).eval(&at));
        }
        assert!(st.ideal.gens().iter().all(|e| e.eval(&vals) == q(0)));
    }

    #[test]
    fn sebastiani_thom_rejects_non_isolated_f() {
        let l = Limits::default();
        let g = p("x1^2", &ring(&["x1"]));
        let f = p("z1^2*z2", &ring(&["z1", "z2"]));
        assert!(sebastiani_thom_generators(&[], &g, &f, &l).is_err());
    }
}
