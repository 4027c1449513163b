use std::sync::Arc;

use dcond_core::bernstein::FactoredGerm;
use dcond_core::poly::{parse_expr, parse_factors, parse_poly, product};
use dcond_core::rational::{parse_q, Q};
use dcond_core::{Error, Poly, Result, Ring, WeightSystem};

/// A parsed germ: its ring, the factors as given, and the product.
#[derive(Debug, Clone)]
pub struct Germ {
    pub ring: Arc<Ring>,
    pub h: Poly,
    /// Explicit `--factor` inputs, in order.
    pub factors: Vec<Poly>,
    pub factored: FactoredGerm,
    pub vars: Vec<String>,
}

/// Sorts names like `x2 < x10` by letter prefix, then numeric suffix.
fn natural_key(s: &str) -> (String, u64, String) {
    let split = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (head, tail) = s.split_at(split);
    (head.to_string(), tail.parse().unwrap_or(0), s.to_string())
}

/// Variables named in the inputs, sorted naturally.
pub fn infer_vars(texts: &[&str]) -> Result<Vec<String>> {
    let mut names: Vec<String> = Vec::new();
    for t in texts {
        for v in parse_expr(t)?.variables() {
            if !names.contains(&v) {
                names.push(v);
            }
        }
    }
    if names.is_empty() {
        return Err(Error::Ring("no variables in the input; pass --vars".into()));
    }
    names.sort_by_key(|s| natural_key(s));
    Ok(names)
}

pub fn parse_germ(vars: Option<&str>, poly: Option<&str>, factors: &[String]) -> Result<Germ> {
    let texts: Vec<&str> = match (poly, factors.is_empty()) {
        (Some(p), true) => vec![p],
        (None, false) => factors.iter().map(String::as_str).collect(),
        (Some(_), false) => return Err(Error::Unsupported("give either --poly or --factor, not both".into())),
        (None, true) => return Err(Error::Unsupported("an input polynomial is required (--poly or --factor)".into())),
    };
    let vars = match vars {
        Some(v) => v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => infer_vars(&texts)?,
    };
    let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    let ring = Ring::base(&refs)?;
    let (h, explicit, pairs) = match poly {
        Some(p) => {
            let h = parse_poly(p, &ring)?;
            (h, Vec::new(), parse_factors(p, &ring)?)
        }
        None => {
            let fs: Vec<Poly> = factors.iter().map(|f| parse_poly(f, &ring)).collect::<Result<_>>()?;
            let pairs = fs.iter().map(|f| (f.clone(), 1)).collect();
            (product(&ring, &fs), fs, pairs)
        }
    };
    if h.is_zero() {
        return Err(Error::Precondition("the polynomial is zero".into()));
    }
    let factored = FactoredGerm::new(pairs)?;
    Ok(Germ {
        ring,
        h,
        factors: explicit,
        factored,
        vars,
    })
}

/// `a1,a2,...` as weights of the base variables; the degree is read off
/// `h`, which must be weighted homogeneous for them.
pub fn parse_weights(text: &str, h: &Poly) -> Result<WeightSystem> {
    let alpha: Vec<Q> = text
        .split(',')
        .map(|s| parse_q(s.trim()).ok_or_else(|| Error::Syntax { pos: 0, msg: format!("bad weight `{s}`") }))
        .collect::<Result<_>>()?;
    let ring = h.ring();
    if alpha.len() != ring.base_indices().len() {
        return Err(Error::Precondition(format!(
            "{} weights for {} variables",
            alpha.len(),
            ring.base_indices().len()
        )));
    }
    let probe = WeightSystem::new(alpha.clone(), Q::from_integer(1.into()))
        .ok_or_else(|| Error::Precondition("weights must be positive".into()))?;
    let d = probe.weight(ring, h.terms().keys().next().expect("nonzero"));
    let w = WeightSystem::new(alpha, d).ok_or_else(|| Error::Precondition("h has weighted degree 0".into()))?;
    if !w.is_homogeneous(h) {
        return Err(Error::Precondition(format!("h is not weighted homogeneous for {w}")));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vars_inferred_in_natural_order() {
        assert_eq!(infer_vars(&["x10 + x2*x1"]).unwrap(), vec!["x1", "x2", "x10"]);
        assert!(infer_vars(&["3"]).is_err());
    }

    #[test]
    fn germ_from_factors() {
        let g = parse_germ(Some("x1,x2"), None, &["x1".into(), "x1+x2".into()]).unwrap();
        assert_eq!(g.factors.len(), 2);
        assert_eq!(g.h.to_string(), parse_poly("x1^2+x1*x2", &g.ring).unwrap().to_string());
        assert!(parse_germ(None, Some("x1"), &["x1".into()]).is_err());
        assert!(parse_germ(None, Some("1+x1"), &[]).is_err());
    }

    #[test]
    fn weights_checked_against_h() {
        let g = parse_germ(None, Some("x1^2+x2^3"), &[]).unwrap();
        let w = parse_weights("3,2", &g.h).unwrap();
        assert_eq!(w.d, Q::from_integer(6.into()));
        assert!(parse_weights("1,1", &g.h).is_err());
        assert!(parse_weights("1", &g.h).is_err());
    }
}
