use std::cmp::Ordering;

/// Monomial orders on dense exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic, `x1 > x2 > ...`.
    GrevLex,
    /// Lexicographic, `x1 > x2 > ...`.
    Lex,
    /// Elimination order for the flagged variables: compare total degree
    /// in the flagged block first, then grevlex on everything.
    Elim(Vec<bool>),
    /// Weighted degree (positive integer weights), ties by grevlex.
    Weighted(Vec<u64>),
    /// Local negative degree order: lower total degree is larger, ties by
    /// reverse lexicographic comparison. Not a well-order; used with Mora
    /// normal forms for computations in the local ring at the origin.
    NegDegRevLex,
}

fn revlex(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().zip(b).rev() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

fn deg(a: &[u32]) -> u64 {
    a.iter().map(|&d| d as u64).sum()
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::GrevLex => deg(a).cmp(&deg(b)).then_with(|| revlex(a, b)),
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::Elim(mask) => {
                let da: u64 = a.iter().zip(mask).filter(|(_, &m)| m).map(|(&d, _)| d as u64).sum();
                let db: u64 = b.iter().zip(mask).filter(|(_, &m)| m).map(|(&d, _)| d as u64).sum();
                da.cmp(&db)
                    .then_with(|| deg(a).cmp(&deg(b)))
                    .then_with(|| revlex(a, b))
            }
            MonomialOrder::Weighted(w) => {
                let wa: u64 = a.iter().zip(w).map(|(&d, &w)| d as u64 * w).sum();
                let wb: u64 = b.iter().zip(w).map(|(&d, &w)| d as u64 * w).sum();
                wa.cmp(&wb).then_with(|| deg(a).cmp(&deg(b))).then_with(|| revlex(a, b))
            }
            MonomialOrder::NegDegRevLex => deg(b).cmp(&deg(a)).then_with(|| revlex(a, b)),
        }
    }

    pub fn is_global(&self) -> bool {
        !matches!(self, MonomialOrder::NegDegRevLex)
    }

    /// Elimination order for the variables at `drop` in a ring of `n`.
    pub fn elim(n: usize, drop: &[usize]) -> MonomialOrder {
        let mut mask = vec![false; n];
        for &i in drop {
            mask[i] = true;
        }
        MonomialOrder::Elim(mask)
    }

    /// True if the order eliminates the variables at `drop`.
    pub fn eliminates(&self, drop: &[usize]) -> bool {
        match self {
            MonomialOrder::Lex => {
                let max = drop.iter().copied().max();
                match max {
                    None => true,
                    // Lex eliminates an initial segment.
                    Some(m) => (0..=m).all(|i| drop.contains(&i)),
                }
            }
            MonomialOrder::Elim(mask) => drop.iter().all(|&i| mask[i]) && mask.iter().filter(|&&m| m).count() == drop.len(),
            _ => drop.is_empty(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_basics() {
        let o = MonomialOrder::GrevLex;
        assert_eq!(o.cmp(&[2, 0, 0], &[1, 1, 0]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 0, 1], &[0, 2, 0]), Ordering::Less);
        assert_eq!(o.cmp(&[0, 0, 3], &[1, 0, 0]), Ordering::Greater);
    }

    #[test]
    fn local_prefers_low_degree() {
        let o = MonomialOrder::NegDegRevLex;
        assert_eq!(o.cmp(&[1, 0], &[2, 0]), Ordering::Greater);
        assert_eq!(o.cmp(&[0, 0], &[0, 1]), Ordering::Greater);
        assert_eq!(o.cmp(&[1, 0], &[0, 1]), Ordering::Greater);
    }

    #[test]
    fn elimination_block_dominates() {
        let o = MonomialOrder::elim(3, &[2]);
        assert_eq!(o.cmp(&[0, 0, 1], &[5, 5, 0]), Ordering::Greater);
        assert!(o.eliminates(&[2]));
        assert!(!o.eliminates(&[1]));
    }
}
