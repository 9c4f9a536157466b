use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

/// Exponent vector `(mu_1, ..., mu_n)` of a monomial `x^mu`.
///
/// Ordered graded-lexicographically: lower total degree first, then the
/// vector with the larger leading exponent first (`x1^2 < x1 x2 < x2^2`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn unit(dim: usize, k: usize) -> Self {
        let mut e = vec![0; dim];
        e[k] = 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` if some entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Componentwise `self <= other`.
    pub fn le_componentwise(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn permuted(&self, perm: &[usize]) -> MultiIndex {
        let mut out = vec![0; self.dim()];
        for (k, &e) in self.0.iter().enumerate() {
            out[perm[k]] = e;
        }
        MultiIndex(out)
    }

    /// `mu! = mu_1! ... mu_n!`
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            for k in 2..=e {
                acc *= k;
            }
        }
        acc
    }

    /// All exponent vectors of total degree `deg` in `dim` variables, in
    /// graded-lex order.
    pub fn of_degree(dim: usize, deg: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let dim = cur.len();
            if k + 1 == dim {
                cur[k] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[k] = e;
                rec(k + 1, left - e, cur, out);
            }
        }
        if dim == 0 {
            if deg == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(0, deg, &mut cur, &mut out);
        out
    }

    /// All exponent vectors with `lo <= degree <= hi`.
    pub fn up_to_degree(dim: usize, lo: u32, hi: u32) -> Vec<MultiIndex> {
        (lo..=hi).flat_map(|d| Self::of_degree(dim, d)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let v = MultiIndex::of_degree(2, 2);
        assert_eq!(
            v,
            vec![MultiIndex::new(vec![2, 0]), MultiIndex::new(vec![1, 1]), MultiIndex::new(vec![0, 2])]
        );
        let mut all = MultiIndex::up_to_degree(3, 0, 3);
        let copy = all.clone();
        all.sort();
        assert_eq!(all, copy);
        assert_eq!(all.len(), 20);
    }

    #[test]
    fn factorial_and_sub() {
        let m = MultiIndex::new(vec![3, 0, 2]);
        assert_eq!(m.factorial(), BigInt::from(12));
        assert_eq!(m.checked_sub(&MultiIndex::new(vec![1, 0, 2])), Some(MultiIndex::new(vec![2, 0, 0])));
        assert_eq!(m.checked_sub(&MultiIndex::new(vec![0, 1, 0])), None);
    }

    #[test]
    fn zero_dimensional() {
        assert_eq!(MultiIndex::of_degree(0, 0).len(), 1);
        assert!(MultiIndex::of_degree(0, 1).is_empty());
    }
}
