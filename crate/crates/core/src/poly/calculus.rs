use super::Poly;
use crate::error::{Error, Result};

/// Row-major matrix of polynomials.
pub type Matrix = Vec<Vec<Poly>>;

/// Entry `(i, j)` is the derivative of `morphism[i]` by variable `vars[j]`.
pub fn jacobian(morphism: &[Poly], vars: &[usize]) -> Matrix {
    morphism
        .iter()
        .map(|h| vars.iter().map(|&j| h.diff(j)).collect())
        .collect()
}

/// Determinant of the submatrix on `rows` x `cols`, taken in the given
/// order, by cofactor expansion along the first selected row.
pub fn minor_det(m: &Matrix, rows: &[usize], cols: &[usize]) -> Result<Poly> {
    if rows.len() != cols.len() {
        return Err(Error::Index(format!(
            "{} rows and {} columns selected",
            rows.len(),
            cols.len()
        )));
    }
    for &r in rows {
        let row = m
            .get(r)
            .ok_or_else(|| Error::Index(format!("row {r} of {}", m.len())))?;
        if let Some(&c) = cols.iter().find(|&&c| c >= row.len()) {
            return Err(Error::Index(format!("column {c} of {}", row.len())));
        }
    }
    let ring = match m.first().and_then(|r| r.first()) {
        Some(p) => p.ring().clone(),
        None => {
            return if rows.is_empty() {
                Err(Error::Index("empty matrix has no ring context".into()))
            } else {
                Err(Error::Index("empty matrix".into()))
            }
        }
    };
    Ok(det_rec(m, rows, cols, &Poly::one(&ring)))
}

fn det_rec(m: &Matrix, rows: &[usize], cols: &[usize], one: &Poly) -> Poly {
    match rows.len() {
        0 => one.clone(),
        1 => m[rows[0]][cols[0]].clone(),
        _ => {
            let mut acc = Poly::zero(one.ring());
            for (k, &c) in cols.iter().enumerate() {
                let entry = &m[rows[0]][c];
                if entry.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &c)| c).collect();
                let sub = det_rec(m, &rows[1..], &rest, one);
                let t = entry * &sub;
                acc = if k % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, Ring};

    #[test]
    fn diagonal_jacobian() {
        let r = Ring::standard(2);
        let h = [parse_poly("x1^2", &r).unwrap(), parse_poly("x2^3", &r).unwrap()];
        let j = jacobian(&h, &[0, 1]);
        assert_eq!(j[0][0], parse_poly("2*x1", &r).unwrap());
        assert!(j[0][1].is_zero() && j[1][0].is_zero());
        assert_eq!(j[1][1], parse_poly("3*x2^2", &r).unwrap());
    }

    #[test]
    fn graph_factor_jacobian() {
        let r = Ring::standard(3);
        let h = [parse_poly("x1 - x2*x3", &r).unwrap()];
        let j = jacobian(&h, &[0, 1, 2]);
        let row: Vec<String> = j[0].iter().map(|p| p.to_string()).collect();
        assert_eq!(row, ["1", "-x3", "-x2"]);
    }

    #[test]
    fn minors() {
        let r = Ring::standard(3);
        let h = [
            parse_poly("x1^2+x2^3+x3^4", &r).unwrap(),
            parse_poly("x1^2+2*x2^3+3*x3^4", &r).unwrap(),
        ];
        let j = jacobian(&h, &[0, 1, 2]);
        assert_eq!(
            minor_det(&j, &[0, 1], &[0, 1]).unwrap(),
            parse_poly("6*x1*x2^2", &r).unwrap()
        );
        assert!(minor_det(&j, &[0, 0], &[0, 1]).unwrap().is_zero());
        assert!(minor_det(&j, &[0, 1], &[0, 5]).is_err());
        assert!(minor_det(&j, &[0], &[0, 1]).is_err());
        let one = Poly::one(&r);
        let zero = Poly::zero(&r);
        let id = vec![vec![one.clone(), zero.clone()], vec![zero, one.clone()]];
        assert_eq!(minor_det(&id, &[0, 1], &[0, 1]).unwrap(), one);
    }

    #[test]
    fn constant_morphism_has_zero_jacobian() {
        let r = Ring::standard(2);
        let j = jacobian(&[Poly::int(&r, 5)], &[0, 1]);
        assert!(j[0].iter().all(Poly::is_zero));
    }
}
