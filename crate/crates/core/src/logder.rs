//! Logarithmic derivations, Saito's criterion, Koszul freeness and the
//! conditions L and H.

use std::sync::Arc;

use crate::error::Result;
use crate::groebner::{germ_order, is_regular_sequence, syzygies, Ideal, Limits, MonomialOrder};
use crate::poly::{jacobian, minor_det, Poly, Ring};
use crate::verdict::{Decision, Verdict};
use crate::weyl::WeylOp;

/// A vector field `sum a_i d_i` on the base variables with `v(h) = c h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogDeriv {
    pub coeffs: Vec<Poly>,
    pub cofactor: Poly,
}

impl LogDeriv {
    /// The field with the given coefficients if it is logarithmic along `h`.
    pub fn from_field(h: &Poly, coeffs: Vec<Poly>) -> Option<LogDeriv> {
        let v = apply_field(&coeffs, h);
        let cofactor = if v.is_zero() { Poly::zero(h.ring()) } else { v.div_exact(h)? };
        Some(LogDeriv { coeffs, cofactor })
    }

    /// Applies the field as a derivation.
    pub fn apply(&self, p: &Poly) -> Poly {
        apply_field(&self.coeffs, p)
    }

    /// Checks `v(h) = c h` exactly.
    pub fn verify(&self, h: &Poly) -> bool {
        self.apply(h) == &self.cofactor * h
    }

    pub fn to_op(&self) -> WeylOp {
        let ring = self.coeffs[0].ring();
        WeylOp::vector_field(ring, &ring.base_indices(), &self.coeffs)
    }

    /// Principal symbol `sum a_i xi_i` in the cotangent ring.
    pub fn symbol(&self, cot: &Arc<Ring>) -> Result<Poly> {
        self.to_op().symbol(cot)
    }

    /// `self - k * other`, coefficientwise.
    pub fn sub_scaled(&self, k: &Poly, other: &LogDeriv) -> LogDeriv {
        LogDeriv {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - &(k * b)).collect(),
            cofactor: &self.cofactor - &(k * &other.cofactor),
        }
    }
}

fn apply_field(coeffs: &[Poly], p: &Poly) -> Poly {
    let ring = p.ring();
    ring.base_indices()
        .iter()
        .zip(coeffs)
        .fold(Poly::zero(ring), |acc, (&i, a)| &acc + &(a * &p.diff(i)))
}

/// Generators of `Der(-log h)`: the syzygies of `(h_x1, ..., h_xn, -h)`.
pub fn derlog_generators(h: &Poly, limits: &Limits) -> Result<Vec<LogDeriv>> {
    let ring = h.ring();
    let base = ring.base_indices();
    let mut fs: Vec<Poly> = base.iter().map(|&i| h.diff(i)).collect();
    fs.push(-h);
    let rows = syzygies(&fs, limits)?;
    let n = base.len();
    Ok(rows
        .into_iter()
        .map(|row| LogDeriv {
            coeffs: row[..n].to_vec(),
            cofactor: row[n].clone(),
        })
        .collect())
}

/// Saito's criterion: `det(a_ij) = u h` with `u(0) != 0`.
#[derive(Debug, Clone)]
pub struct FreenessCertificate {
    pub basis: Vec<LogDeriv>,
    pub det: Poly,
    pub unit: Poly,
}

impl FreenessCertificate {
    pub fn verify(&self, h: &Poly) -> bool {
        self.basis.iter().all(|d| d.verify(h))
            && coefficient_det(&self.basis).is_ok_and(|d| d == self.det)
            && self.det == &self.unit * h
            && self.unit.is_unit_at_origin()
    }
}

fn coefficient_det(basis: &[LogDeriv]) -> Result<Poly> {
    let m: Vec<Vec<Poly>> = basis.iter().map(|d| d.coeffs.clone()).collect();
    let idx: Vec<usize> = (0..basis.len()).collect();
    minor_det(&m, &idx, &idx)
}

/// Certificate of freeness if the candidates satisfy Saito's criterion.
pub fn saito_free_test(h: &Poly, candidates: &[LogDeriv]) -> Option<FreenessCertificate> {
    let n = h.ring().base_indices().len();
    if candidates.len() != n || !candidates.iter().all(|d| d.verify(h)) {
        return None;
    }
    let det = coefficient_det(candidates).ok()?;
    let unit = det.div_exact(h)?;
    unit.is_unit_at_origin().then(|| FreenessCertificate {
        basis: candidates.to_vec(),
        det,
        unit,
    })
}

/// Searches `n`-subsets of `gens` in index order for a Saito basis,
/// trying at most `budget` subsets.
pub fn find_free_basis(h: &Poly, gens: &[LogDeriv], budget: usize) -> Option<FreenessCertificate> {
    let n = h.ring().base_indices().len();
    if gens.len() < n {
        return None;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tried = 0;
    loop {
        tried += 1;
        if tried > budget {
            return None;
        }
        let cand: Vec<LogDeriv> = idx.iter().map(|&i| gens[i].clone()).collect();
        if let Some(c) = saito_free_test(h, &cand) {
            return Some(c);
        }
        // next combination
        let mut k = n;
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            if idx[k] < gens.len() - n + k {
                break;
            }
            if k == 0 {
                return None;
            }
        }
        idx[k] += 1;
        for j in k + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Cotangent ring of the ring of `h`.
pub fn cotangent_ring(h: &Poly) -> Arc<Ring> {
    h.ring().cotangent(&[])
}

fn symbols(fields: &[LogDeriv], cot: &Arc<Ring>) -> Result<Vec<Poly>> {
    let all: Vec<Poly> = fields.iter().map(|d| d.symbol(cot)).collect::<Result<_>>()?;
    Ok(all.into_iter().filter(|p| !p.is_zero()).collect())
}

const SAITO: &str = "Saito's criterion: n logarithmic fields with determinant a unit times h form a basis";
const KOSZUL: &str = "Koszul-free: the principal symbols of a basis form a regular sequence";

/// Koszul freeness: the symbols of a free basis form a regular sequence in
/// the cotangent ring (dimension drop at the origin).
pub fn koszul_free_test(h: &Poly, basis: &[LogDeriv], limits: &Limits) -> Result<Decision> {
    let Some(cert) = saito_free_test(h, basis) else {
        return Ok(Decision::unknown("basis does not satisfy Saito's criterion"));
    };
    let cot = cotangent_ring(h);
    let syms: Vec<Poly> = basis.iter().map(|d| d.symbol(&cot)).collect::<Result<_>>()?;
    let order = germ_order(&syms);
    let regular = match is_regular_sequence(&syms, cot.nvars() as i64, &order, limits) {
        Ok(r) => r,
        Err(e) => return Decision::from_error(e),
    };
    let mut d = Decision::new(Verdict::from_bool(regular))
        .step("saito", SAITO, format!("det = ({}) * h", cert.unit))
        .step(
            "koszul",
            KOSZUL,
            if regular { "symbols form a regular sequence" } else { "symbols do not form a regular sequence" },
        );
    for (i, s) in syms.iter().enumerate() {
        d = d.cert(format!("symbol{}", i + 1), s);
    }
    Ok(d.cert("det", &cert.det))
}

const COND_L: &str = "condition L: the logarithmic characteristic variety has dimension n";

/// Condition L: the ideal of symbols of `Der(-log h)` has dimension `n` at
/// the origin. Uses `basis` when given, otherwise the syzygy generators.
/// Purity of the dimension is not certified.
pub fn condition_l(h: &Poly, basis: Option<&[LogDeriv]>, limits: &Limits) -> Result<Decision> {
    let n = h.ring().base_indices().len() as i64;
    let gens = match basis {
        Some(b) => b.to_vec(),
        None => match derlog_generators(h, limits) {
            Ok(g) => g,
            Err(e) => return Decision::from_error(e),
        },
    };
    let cot = cotangent_ring(h);
    let syms = symbols(&gens, &cot)?;
    let ideal = Ideal::new(&cot, syms, MonomialOrder::NegDegRevLex).with_limits(limits.clone());
    let ideal = ideal.reorder(germ_order(ideal.gens()));
    let dim = match ideal.krull_dim() {
        Ok(d) => d,
        Err(e) => return Decision::from_error(e),
    };
    let mut d = Decision::new(Verdict::from_bool(dim == n))
        .step("L-dim", COND_L, format!("dimension of the symbol ideal at the origin is {dim}, n = {n}"))
        .cert("dimension", dim);
    if dim == n {
        d.push_step("L-purity", COND_L, "top dimension certified; purity unchecked");
    }
    Ok(d)
}

const COND_H: &str = "condition H: h belongs to the ideal of its partial derivatives";

/// Condition H: `h` lies in its Jacobian ideal in the local ring.
pub fn condition_h(h: &Poly, limits: &Limits) -> Result<Decision> {
    let ring = h.ring();
    let jac: Vec<Poly> = jacobian(std::slice::from_ref(h), &ring.base_indices())[0].clone();
    let nonzero: Vec<Poly> = jac.iter().filter(|p| !p.is_zero()).cloned().collect();
    if let Some(w) = crate::poly::detect_weights(h) {
        let cof: Vec<String> = ring
            .base_indices()
            .iter()
            .zip(&w.alpha)
            .map(|(&i, a)| format!("{}*{}", crate::rational::fmt_q(a), ring.var(i).name))
            .collect();
        return Ok(Decision::new(Verdict::Holds)
            .step("H-euler", COND_H, format!("weighted homogeneous ({w}); Euler identity"))
            .cert("cofactors", cof.join(", ")));
    }
    let ideal = Ideal::new(ring, nonzero, MonomialOrder::NegDegRevLex).with_limits(limits.clone());
    match ideal.membership(h) {
        Ok(Some(m)) => {
            let cof: Vec<String> = m.cofactors.iter().map(|c| c.to_string()).collect();
            Ok(Decision::new(Verdict::Holds)
                .step("H-member", COND_H, "local membership certificate u*h = sum c_i h_i")
                .cert("unit", &m.unit)
                .cert("cofactors", cof.join(", ")))
        }
        Ok(None) => Ok(Decision::new(Verdict::Fails).step(
            "H-member",
            COND_H,
            "nonzero local normal form with respect to the Jacobian ideal",
        )),
        Err(e) => Decision::from_error(e),
    }
}
