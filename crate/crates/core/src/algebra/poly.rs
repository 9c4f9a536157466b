use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{GaussianRational, MultiIndex};

/// Sparse polynomial in `dim` variables with Gaussian-rational coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, GaussianRational>,
}

impl ScalarPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussianRational::one())
    }

    pub fn var(dim: usize, k: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, k), GaussianRational::one())
    }

    pub fn monomial(exp: MultiIndex, c: GaussianRational) -> Self {
        let mut p = Self::zero(exp.dim());
        p.add_term(exp, c);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, GaussianRational)>,
    {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `c x^exp`, dropping the entry if the sum cancels.
    pub fn add_term(&mut self, exp: MultiIndex, c: GaussianRational) {
        assert_eq!(exp.dim(), self.dim, "monomial dimension mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &MultiIndex) -> GaussianRational {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_max(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn degree_min(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).min()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    pub fn homogeneous_part(&self, deg: u32) -> Self {
        self.filter_terms(|m| m.degree() == deg)
    }

    pub fn truncate(&self, max_deg: u32) -> Self {
        self.filter_terms(|m| m.degree() <= max_deg)
    }

    fn filter_terms(&self, keep: impl Fn(&MultiIndex) -> bool) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&GaussianRational) -> GaussianRational) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(GaussianRational::conj)
    }

    /// Product, dropping every term of degree above `max_deg` if given.
    pub fn mul_truncated(&self, other: &ScalarPoly, max_deg: Option<u32>) -> ScalarPoly {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
        let mut out = ScalarPoly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(n) = max_deg {
                    if ma.degree() + mb.degree() > n {
                        continue;
                    }
                }
                out.add_term(ma.add(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow_truncated(&self, e: u32, max_deg: Option<u32>) -> ScalarPoly {
        let mut acc = ScalarPoly::one(self.dim);
        for _ in 0..e {
            acc = acc.mul_truncated(self, max_deg);
        }
        acc
    }

    /// Partial derivative with respect to variable `k`.
    pub fn derivative(&self, k: usize) -> ScalarPoly {
        let mut out = ScalarPoly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.get(k);
            if e == 0 {
                continue;
            }
            let lowered = m.checked_sub(&MultiIndex::unit(self.dim, k)).unwrap();
            out.add_term(lowered, c * &GaussianRational::from_int(e as i64));
        }
        out
    }

    /// `p(q_1(y), ..., q_dim(y))`, optionally truncated at `max_deg`.
    ///
    /// Monomial values are memoised, so each distinct exponent vector costs a
    /// single polynomial multiplication.
    pub fn substitute(&self, values: &[ScalarPoly], max_deg: Option<u32>) -> ScalarPoly {
        let mut cache = MonomialCache::new(values, max_deg);
        self.substitute_with(&mut cache)
    }

    /// Like [`substitute`](Self::substitute) but with an explicit target
    /// dimension, which matters when `values` is empty.
    pub fn substitute_into(&self, target_dim: usize, values: &[ScalarPoly], max_deg: Option<u32>) -> ScalarPoly {
        let mut cache = MonomialCache::new(values, max_deg).with_target_dim(target_dim);
        self.substitute_with(&mut cache)
    }

    pub(crate) fn substitute_with(&self, cache: &mut MonomialCache<'_>) -> ScalarPoly {
        assert_eq!(self.dim, cache.values.len(), "substitution arity mismatch");
        let mut out = ScalarPoly::zero(cache.target_dim);
        for (m, c) in &self.terms {
            let v = cache.get(m);
            for (mm, cc) in v.terms() {
                out.add_term(mm.clone(), cc * c);
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.dim, "evaluation point has wrong length");
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = c.to_complex64();
            for (k, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    v *= point[k].powu(e);
                }
            }
            acc += v;
        }
        acc
    }

    pub fn evaluate_exact(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.dim, "evaluation point has wrong length");
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (k, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    v = &v * &point[k].pow(e);
                }
            }
            acc += &v;
        }
        acc
    }

    /// Exact division by the monomial `x^exp`, if every term is divisible.
    pub fn div_monomial(&self, exp: &MultiIndex) -> Option<ScalarPoly> {
        let mut out = ScalarPoly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.checked_sub(exp)?, c.clone());
        }
        Some(out)
    }

    /// Renders with variable names `{prefix}1, {prefix}2, ...`.
    pub fn display_with(&self, prefix: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                s.push_str(" + ");
            }
            s.push('(');
            s.push_str(&c.to_string());
            s.push(')');
            for (v, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => s.push_str(&format!("*{prefix}{}", v + 1)),
                    _ => s.push_str(&format!("*{prefix}{}^{e}", v + 1)),
                }
            }
        }
        s
    }
}

/// Memoised values of monomials under a substitution `x_k -> q_k`.
pub(crate) struct MonomialCache<'a> {
    values: &'a [ScalarPoly],
    target_dim: usize,
    max_deg: Option<u32>,
    memo: HashMap<MultiIndex, ScalarPoly>,
}

impl<'a> MonomialCache<'a> {
    pub(crate) fn new(values: &'a [ScalarPoly], max_deg: Option<u32>) -> Self {
        let target_dim = values.first().map(ScalarPoly::dim).unwrap_or(0);
        Self { values, target_dim, max_deg, memo: HashMap::new() }.checked()
    }

    pub(crate) fn with_target_dim(mut self, dim: usize) -> Self {
        self.target_dim = dim;
        self.checked()
    }

    fn checked(self) -> Self {
        assert!(
            self.values.iter().all(|v| v.dim() == self.target_dim),
            "substitution values differ in dimension"
        );
        self
    }

    pub(crate) fn get(&mut self, m: &MultiIndex) -> ScalarPoly {
        if let Some(v) = self.memo.get(m) {
            return v.clone();
        }
        let v = match (0..m.dim()).find(|&k| m.get(k) > 0) {
            None => ScalarPoly::one(self.target_dim),
            Some(k) => {
                let lower = m.checked_sub(&MultiIndex::unit(m.dim(), k)).unwrap();
                let base = self.get(&lower);
                base.mul_truncated(&self.values[k], self.max_deg)
            }
        };
        self.memo.insert(m.clone(), v.clone());
        v
    }
}

impl<'b> Add<&'b ScalarPoly> for &ScalarPoly {
    type Output = ScalarPoly;
    fn add(self, rhs: &'b ScalarPoly) -> ScalarPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'b> Sub<&'b ScalarPoly> for &ScalarPoly {
    type Output = ScalarPoly;
    fn sub(self, rhs: &'b ScalarPoly) -> ScalarPoly {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'b> Mul<&'b ScalarPoly> for &ScalarPoly {
    type Output = ScalarPoly;
    fn mul(self, rhs: &'b ScalarPoly) -> ScalarPoly {
        self.mul_truncated(rhs, None)
    }
}

impl Neg for &ScalarPoly {
    type Output = ScalarPoly;
    fn neg(self) -> ScalarPoly {
        self.scale(&-GaussianRational::one())
    }
}

impl fmt::Display for ScalarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

impl fmt::Debug for ScalarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(k: usize) -> ScalarPoly {
        ScalarPoly::var(2, k)
    }

    #[test]
    fn arithmetic_cancels_to_canonical_zero() {
        let p = &x(0) + &x(1);
        let q = &p - &x(1);
        assert_eq!(q, x(0));
        assert!((&q - &x(0)).is_zero());
        let sq = &p * &p;
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.coeff(&MultiIndex::new(vec![1, 1])), GaussianRational::from_int(2));
    }

    #[test]
    fn derivative_and_truncation() {
        let p = ScalarPoly::from_terms(
            2,
            [
                (MultiIndex::new(vec![1, 0]), GaussianRational::one()),
                (MultiIndex::new(vec![3, 0]), GaussianRational::one()),
            ],
        );
        assert_eq!(p.truncate(2), x(0));
        assert_eq!(p.truncate(5), p);
        assert!(ScalarPoly::zero(2).truncate(0).is_zero());
        let d = p.derivative(0);
        assert_eq!(d.coeff(&MultiIndex::new(vec![2, 0])), GaussianRational::from_int(3));
        assert_eq!(d.coeff(&MultiIndex::zero(2)), GaussianRational::one());
    }

    #[test]
    fn substitution() {
        // (x1 x2)(y1 + y2, y2) = y1 y2 + y2^2
        let p = ScalarPoly::monomial(MultiIndex::new(vec![1, 1]), GaussianRational::one());
        let vals = [&x(0) + &x(1), x(1)];
        let r = p.substitute(&vals, None);
        assert_eq!(r, &(&x(0) * &x(1)) + &(&x(1) * &x(1)));
        assert_eq!(p.substitute(&vals, Some(1)), ScalarPoly::zero(2));
    }
}
