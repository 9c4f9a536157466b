use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::MonomialCache;
use super::{AlgebraError, ExactMatrix, GaussianRational, MultiIndex, ScalarPoly};

/// Polynomial vector field `x' = f(x)` in `dim` variables; component `i` is
/// `f^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyVectorField {
    dim: usize,
    components: Vec<ScalarPoly>,
}

impl PolyVectorField {
    pub fn zero(dim: usize) -> Self {
        Self { dim, components: vec![ScalarPoly::zero(dim); dim] }
    }

    pub fn from_components(components: Vec<ScalarPoly>) -> Result<Self, AlgebraError> {
        let dim = components.len();
        if let Some(bad) = components.iter().find(|c| c.dim() != dim) {
            return Err(AlgebraError::DimensionMismatch { left: dim, right: bad.dim() });
        }
        Ok(Self { dim, components })
    }

    /// The linear field `x -> A x`.
    pub fn linear(a: &ExactMatrix) -> Self {
        assert!(a.is_square(), "linear field needs a square matrix");
        let n = a.rows();
        let mut f = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                f.add_term(i, MultiIndex::unit(n, k), a.get(i, k).clone());
            }
        }
        f
    }

    /// The diagonal linear field `x_i' = lambda_i x_i`.
    pub fn diagonal(eigenvalues: &[GaussianRational]) -> Self {
        Self::linear(&ExactMatrix::diagonal(eigenvalues))
    }

    /// Single-term field `c x^exp e_component`.
    pub fn monomial(component: usize, exp: MultiIndex, c: GaussianRational) -> Self {
        let mut f = Self::zero(exp.dim());
        f.add_term(component, exp, c);
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[ScalarPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarPoly {
        &self.components[i]
    }

    pub fn add_term(&mut self, component: usize, exp: MultiIndex, c: GaussianRational) {
        assert_eq!(exp.dim(), self.dim, "exponent vector has wrong length");
        self.components[component].add_term(exp, c);
    }

    /// All terms as `(component, exponent, coefficient)`, component-major and
    /// graded-lex within each component.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &MultiIndex, &GaussianRational)> {
        self.components
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.terms().map(move |(m, c)| (i, m, c)))
    }

    pub fn num_terms(&self) -> usize {
        self.components.iter().map(ScalarPoly::num_terms).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarPoly::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(ScalarPoly::is_real)
    }

    pub fn degree_max(&self) -> Option<u32> {
        self.components.iter().filter_map(ScalarPoly::degree_max).max()
    }

    pub fn degree_min(&self) -> Option<u32> {
        self.components.iter().filter_map(ScalarPoly::degree_min).min()
    }

    pub fn truncate(&self, max_deg: u32) -> Self {
        self.map_components(|p| p.truncate(max_deg))
    }

    pub fn homogeneous_part(&self, deg: u32) -> Self {
        self.map_components(|p| p.homogeneous_part(deg))
    }

    /// Terms of degree `>= lo`.
    pub fn tail(&self, lo: u32) -> Self {
        let mut out = Self::zero(self.dim);
        for (i, m, c) in self.terms() {
            if m.degree() >= lo {
                out.add_term(i, m.clone(), c.clone());
            }
        }
        out
    }

    pub fn map_components(&self, f: impl Fn(&ScalarPoly) -> ScalarPoly) -> Self {
        Self { dim: self.dim, components: self.components.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        self.map_components(|p| p.scale(c))
    }

    pub fn conj(&self) -> Self {
        self.map_components(ScalarPoly::conj)
    }

    /// Coefficient matrix of the degree-one part.
    pub fn linear_part(&self) -> ExactMatrix {
        let n = self.dim;
        let mut a = ExactMatrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                a.set(i, k, self.components[i].coeff(&MultiIndex::unit(n, k)));
            }
        }
        a
    }

    /// `(g . grad) p = sum_k g^k d_k p`
    pub fn directional_derivative(&self, p: &ScalarPoly, max_deg: Option<u32>) -> ScalarPoly {
        assert_eq!(self.dim, p.dim(), "dimension mismatch");
        let mut out = ScalarPoly::zero(self.dim);
        for k in 0..self.dim {
            if self.components[k].is_zero() {
                continue;
            }
            let dp = p.derivative(k);
            if dp.is_zero() {
                continue;
            }
            out = &out + &self.components[k].mul_truncated(&dp, max_deg);
        }
        out
    }

    /// `(g . grad) self`, applied componentwise.
    pub fn derivative_along(&self, g: &PolyVectorField, max_deg: Option<u32>) -> Self {
        self.map_components(|p| g.directional_derivative(p, max_deg))
    }

    /// Lie-Poisson bracket `{f, g}^i = (f . grad) g^i - (g . grad) f^i`.
    pub fn lie_poisson(f: &PolyVectorField, g: &PolyVectorField) -> Result<PolyVectorField, AlgebraError> {
        if f.dim != g.dim {
            return Err(AlgebraError::DimensionMismatch { left: f.dim, right: g.dim });
        }
        Ok(&g.derivative_along(f, None) - &f.derivative_along(g, None))
    }

    /// Bargman product `sum conj(u_{mu,i}) v_{mu,i} mu!`.
    pub fn bargman_inner(u: &PolyVectorField, v: &PolyVectorField) -> Result<GaussianRational, AlgebraError> {
        if u.dim != v.dim {
            return Err(AlgebraError::DimensionMismatch { left: u.dim, right: v.dim });
        }
        let mut acc = GaussianRational::zero();
        for (i, m, c) in u.terms() {
            let d = v.components[i].coeff(m);
            if d.is_zero() {
                continue;
            }
            let w = GaussianRational::real(BigRational::from_integer(m.factorial()));
            acc += &(&(&c.conj() * &d) * &w);
        }
        Ok(acc)
    }

    /// `self(values(y))` componentwise, truncated at `max_deg`.
    pub fn substitute(&self, values: &[ScalarPoly], max_deg: Option<u32>) -> Self {
        let target = values.first().map(ScalarPoly::dim).unwrap_or(self.dim);
        let mut cache = MonomialCache::new(values, max_deg).with_target_dim(target);
        let components: Vec<ScalarPoly> =
            self.components.iter().map(|p| p.substitute_with(&mut cache)).collect();
        Self { dim: target, components }
    }

    /// `M f(x)`.
    pub fn apply_matrix(&self, m: &ExactMatrix) -> Self {
        assert_eq!(m.cols(), self.dim, "matrix does not act on this field");
        let mut components = Vec::with_capacity(m.rows());
        for r in 0..m.rows() {
            let mut acc = ScalarPoly::zero(self.dim);
            for k in 0..self.dim {
                let a = m.get(r, k);
                if !a.is_zero() {
                    acc = &acc + &self.components[k].scale(a);
                }
            }
            components.push(acc);
        }
        Self { dim: self.dim, components }
    }

    /// Field in new coordinates `z` with `x = q z` and `z = p x`:
    /// returns `p f(q z)`.
    pub fn linear_change(&self, p: &ExactMatrix, q: &ExactMatrix) -> Self {
        let values = PolyVectorField::linear(q).components;
        self.substitute(&values, None).apply_matrix(p)
    }

    /// The pushforward `g(y) = (I + Dh(y))^{-1} f(y + h(y))` under
    /// `x = y + h(y)`, truncated at total degree `n`.
    pub fn compose_shift(&self, h: &PolyVectorField, n: u32) -> Result<PolyVectorField, AlgebraError> {
        if self.dim != h.dim {
            return Err(AlgebraError::DimensionMismatch { left: self.dim, right: h.dim });
        }
        if let Some(d) = h.degree_min() {
            if d < 2 {
                return Err(AlgebraError::NotNearIdentity { degree: d });
            }
        }
        if h.is_zero() {
            return Ok(self.truncate(n));
        }
        let shifted = Self::identity_plus(h);
        let big_f = self.substitute(&shifted, Some(n));
        // Solve (I + Dh) g = F as g = F - Dh g; each pass fixes one more degree.
        let mut g = big_f.clone();
        for _ in 0..=n {
            let next = &big_f - &g.jacobian_action_of(h, n);
            if next == g {
                break;
            }
            g = next;
        }
        Ok(g)
    }

    /// `(Dh) self`, i.e. component `i` is `sum_k d_k h^i self^k`.
    fn jacobian_action_of(&self, h: &PolyVectorField, n: u32) -> PolyVectorField {
        h.derivative_along(self, Some(n))
    }

    fn identity_plus(h: &PolyVectorField) -> Vec<ScalarPoly> {
        (0..h.dim).map(|k| &ScalarPoly::var(h.dim, k) + &h.components[k]).collect()
    }

    /// `k` with `y = x + k(x)` inverting `x = y + h(y)` to degree `n`.
    pub fn inverse_shift(h: &PolyVectorField, n: u32) -> Result<PolyVectorField, AlgebraError> {
        if let Some(d) = h.degree_min() {
            if d < 2 {
                return Err(AlgebraError::NotNearIdentity { degree: d });
            }
        }
        let mut k = h.truncate(n).scale(&-GaussianRational::from_int(1));
        for _ in 0..n {
            let next = h.substitute(&Self::identity_plus(&k), Some(n)).scale(&-GaussianRational::from_int(1));
            if next == k {
                break;
            }
            k = next;
        }
        Ok(k)
    }

    /// `self(y + h(y))` truncated at `n`, without the Jacobian correction.
    pub fn compose_map(&self, h: &PolyVectorField, n: u32) -> PolyVectorField {
        self.substitute(&Self::identity_plus(h), Some(n))
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|p| p.evaluate(point)).collect()
    }

    pub fn evaluate_exact(&self, point: &[GaussianRational]) -> Vec<GaussianRational> {
        self.components.iter().map(|p| p.evaluate_exact(point)).collect()
    }

    /// Jacobian as a matrix of polynomials, `J[i][k] = d_k f^i`.
    pub fn jacobian(&self) -> Vec<Vec<ScalarPoly>> {
        self.components
            .iter()
            .map(|p| (0..self.dim).map(|k| p.derivative(k)).collect())
            .collect()
    }

    /// Rename variables: exponent and component `k` move to `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> PolyVectorField {
        let mut out = Self::zero(self.dim);
        for (i, m, c) in self.terms() {
            out.add_term(perm[i], m.permuted(perm), c.clone());
        }
        out
    }

    /// Squared Bargman norm as an exact non-negative integer-weighted sum.
    pub fn bargman_norm_sqr(&self) -> GaussianRational {
        Self::bargman_inner(self, self).expect("same field")
    }

    pub fn display_with(&self, prefix: &str) -> String {
        let mut s = String::new();
        for (i, p) in self.components.iter().enumerate() {
            s.push_str(&format!("{prefix}{}' = {}\n", i + 1, p.display_with(prefix)));
        }
        s
    }
}

impl<'b> Add<&'b PolyVectorField> for &PolyVectorField {
    type Output = PolyVectorField;
    fn add(self, rhs: &'b PolyVectorField) -> PolyVectorField {
        assert_eq!(self.dim, rhs.dim, "field dimension mismatch");
        PolyVectorField {
            dim: self.dim,
            components: self.components.iter().zip(&rhs.components).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'b> Sub<&'b PolyVectorField> for &PolyVectorField {
    type Output = PolyVectorField;
    fn sub(self, rhs: &'b PolyVectorField) -> PolyVectorField {
        assert_eq!(self.dim, rhs.dim, "field dimension mismatch");
        PolyVectorField {
            dim: self.dim,
            components: self.components.iter().zip(&rhs.components).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &PolyVectorField {
    type Output = PolyVectorField;
    fn neg(self) -> PolyVectorField {
        self.map_components(|p| -p)
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

impl fmt::Debug for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn bracket_one_dimensional() {
        let f = PolyVectorField::monomial(0, mi(&[2]), q(1));
        let g = PolyVectorField::monomial(0, mi(&[3]), q(1));
        let b = PolyVectorField::lie_poisson(&f, &g).unwrap();
        assert_eq!(b, PolyVectorField::monomial(0, mi(&[4]), q(1)));
    }

    #[test]
    fn bracket_with_resonant_term_vanishes() {
        let a = PolyVectorField::diagonal(&[q(1), q(2)]);
        let g = PolyVectorField::monomial(1, mi(&[2, 0]), q(1));
        assert!(PolyVectorField::lie_poisson(&a, &g).unwrap().is_zero());
        assert!(PolyVectorField::lie_poisson(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let err = PolyVectorField::lie_poisson(&PolyVectorField::zero(2), &PolyVectorField::zero(3)).unwrap_err();
        assert_eq!(err, AlgebraError::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn bargman_examples() {
        let u = PolyVectorField::monomial(0, mi(&[2, 0]), q(1));
        assert_eq!(PolyVectorField::bargman_inner(&u, &u).unwrap(), q(2));
        let a = PolyVectorField::monomial(0, mi(&[1, 0]), q(1));
        let b = PolyVectorField::monomial(0, mi(&[0, 1]), q(1));
        assert!(PolyVectorField::bargman_inner(&a, &b).unwrap().is_zero());
        let u = PolyVectorField::monomial(1, mi(&[1, 1]), GaussianRational::complex(3, 1, 1, 1));
        let v = PolyVectorField::monomial(1, mi(&[1, 1]), q(1));
        assert_eq!(PolyVectorField::bargman_inner(&u, &v).unwrap(), GaussianRational::complex(3, 1, -1, 1));
    }

    #[test]
    fn compose_shift_rejects_linear_generator() {
        let f = PolyVectorField::diagonal(&[q(1), q(2)]);
        let h = PolyVectorField::monomial(0, mi(&[1, 0]), q(1));
        assert_eq!(f.compose_shift(&h, 3).unwrap_err(), AlgebraError::NotNearIdentity { degree: 1 });
        assert_eq!(f.compose_shift(&PolyVectorField::zero(2), 3).unwrap(), f);
    }

    #[test]
    fn compose_shift_by_hand() {
        // x' = x + x^2 under x = y + y^2 gives y' = F(y) / (1 + 2y) with
        // F = y + 2y^2 + 2y^3 + y^4 and 1/(1+2y) = 1 - 2y + 4y^2 - 8y^3.
        let a = GaussianRational::from_int(1);
        let mut f = PolyVectorField::zero(1);
        f.add_term(0, mi(&[1]), q(1));
        f.add_term(0, mi(&[2]), q(1));
        let h = PolyVectorField::monomial(0, mi(&[2]), a);
        let g = f.compose_shift(&h, 4).unwrap();
        let mut want = PolyVectorField::zero(1);
        want.add_term(0, mi(&[1]), q(1));
        want.add_term(0, mi(&[3]), q(2));
        want.add_term(0, mi(&[4]), q(-3));
        assert_eq!(g, want);
    }

    #[test]
    fn inverse_shift_round_trip() {
        let mut f = PolyVectorField::diagonal(&[q(1), q(3)]);
        f.add_term(1, mi(&[1, 1]), q(2));
        f.add_term(0, mi(&[0, 3]), GaussianRational::ratio(1, 2));
        let mut h = PolyVectorField::monomial(0, mi(&[1, 1]), q(1));
        h.add_term(1, mi(&[2, 0]), GaussianRational::ratio(-1, 3));
        let n = 5;
        let g = f.compose_shift(&h, n).unwrap();
        let k = PolyVectorField::inverse_shift(&h, n).unwrap();
        assert_eq!(g.compose_shift(&k, n).unwrap(), f.truncate(n));
    }

    #[test]
    fn linear_change_round_trip() {
        let p = ExactMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let q_ = p.inverse().unwrap();
        let mut f = PolyVectorField::diagonal(&[q(1), q(2)]);
        f.add_term(0, mi(&[2, 1]), q(5));
        let there = f.linear_change(&p, &q_);
        assert_eq!(there.linear_change(&q_, &p), f);
    }

    #[test]
    fn evaluate_plumbing() {
        let mut f = PolyVectorField::zero(2);
        f.add_term(0, mi(&[2, 0]), q(1));
        f.add_term(1, mi(&[0, 1]), q(1));
        let v = f.evaluate(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)]);
        assert_eq!(v, vec![Complex64::new(4.0, 0.0), Complex64::new(3.0, 0.0)]);
        let third = PolyVectorField::monomial(0, mi(&[1, 0]), GaussianRational::ratio(1, 3));
        let v = third.evaluate(&[Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!((v[0].re - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn truncate_examples() {
        let mut f = PolyVectorField::zero(1);
        f.add_term(0, mi(&[1]), q(1));
        f.add_term(0, mi(&[3]), q(1));
        assert_eq!(f.truncate(2), PolyVectorField::monomial(0, mi(&[1]), q(1)));
        assert_eq!(f.truncate(3), f);
        assert!(PolyVectorField::zero(2).truncate(0).is_zero());
    }
}
