//! Linear symmetries: equivariance, joint centralizers, finite groups,
//! group averaging, Molien counts and the gradient property.

use std::collections::BTreeSet;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{ExactMatrix, GaussianRational, MultiIndex, PolyVectorField, ScalarPoly};
use crate::normalform::{normalize_projected, NormalFormError, NormalFormResult};
use crate::resonance::Spectrum;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymmetryError {
    #[error("group element {index} is not a square matrix of size {dim}")]
    BadShape { index: usize, dim: usize },
    #[error("group element {index} is not invertible")]
    Singular { index: usize },
    #[error("element set is not closed under multiplication")]
    NotClosed,
    #[error("element set does not contain the identity")]
    NoIdentity,
    #[error("generated group exceeds {limit} elements")]
    TooLarge { limit: usize },
    #[error("group element {index} does not commute with the linear part")]
    NotCommuting { index: usize },
    #[error("field is not equivariant under group element {index}")]
    NotEquivariant { index: usize },
    #[error("group has no invariant bilinear form usable as a metric")]
    NoInvariantMetric,
    #[error("series coefficient {value} at degree {degree} is not a non-negative integer")]
    NonIntegral { degree: u32, value: Box<GaussianRational> },
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
}

/// `{B x, f}` and whether it vanishes.
pub fn equivariance_check(f: &PolyVectorField, b: &ExactMatrix) -> (bool, PolyVectorField) {
    let residual = PolyVectorField::lie_poisson(&PolyVectorField::linear(b), f).expect("dimension mismatch");
    (residual.is_zero(), residual)
}

/// Basis of `{M : [M, A_k] = 0 for all k}`, one matrix per free entry of the
/// echelon form (entries taken row-major).
pub fn joint_centralizer(mats: &[ExactMatrix]) -> Vec<ExactMatrix> {
    let Some(first) = mats.first() else {
        return Vec::new();
    };
    let n = first.rows();
    let nn = n * n;
    let mut rows: Vec<Vec<GaussianRational>> = Vec::new();
    for a in mats {
        assert!(a.is_square() && a.rows() == n, "centralizer inputs must share a square shape");
        // Entry (r, c) of M A - A M as a linear form in vec(M).
        for r in 0..n {
            for c in 0..n {
                let mut row = vec![GaussianRational::zero(); nn];
                for k in 0..n {
                    row[r * n + k] += a.get(k, c);
                    row[k * n + c] -= a.get(r, k);
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..nn)
            .map(|k| {
                let mut v = vec![GaussianRational::zero(); nn];
                v[k] = GaussianRational::one();
                v
            })
            .collect()
    } else {
        ExactMatrix::from_rows(rows).expect("uniform rows").nullspace()
    };
    basis
        .into_iter()
        .map(|v| ExactMatrix::from_rows(v.chunks(n).map(<[_]>::to_vec).collect()).expect("square"))
        .collect()
}

/// A finite matrix group, stored as its full element list with the identity
/// first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    dim: usize,
    elements: Vec<ExactMatrix>,
}

pub const MAX_GROUP_ORDER: usize = 4096;

impl FiniteGroup {
    /// Checks closure and the identity; removes duplicates.
    pub fn new(elements: Vec<ExactMatrix>) -> Result<Self, SymmetryError> {
        let dim = elements.first().map(ExactMatrix::rows).unwrap_or(0);
        check_shapes(&elements, dim)?;
        let mut uniq: Vec<ExactMatrix> = Vec::new();
        for e in elements {
            if !uniq.contains(&e) {
                uniq.push(e);
            }
        }
        let id = ExactMatrix::identity(dim);
        let Some(pos) = uniq.iter().position(|e| *e == id) else {
            return Err(SymmetryError::NoIdentity);
        };
        uniq.swap(0, pos);
        for a in &uniq {
            for b in &uniq {
                if !uniq.contains(&(a * b)) {
                    return Err(SymmetryError::NotClosed);
                }
            }
        }
        Ok(Self { dim, elements: uniq })
    }

    /// Closure of a generating set.
    pub fn generate(dim: usize, generators: &[ExactMatrix]) -> Result<Self, SymmetryError> {
        check_shapes(generators, dim)?;
        let mut elements = vec![ExactMatrix::identity(dim)];
        let mut k = 0;
        while k < elements.len() {
            for g in generators {
                let p = &elements[k] * g;
                if !elements.contains(&p) {
                    if elements.len() >= MAX_GROUP_ORDER {
                        return Err(SymmetryError::TooLarge { limit: MAX_GROUP_ORDER });
                    }
                    elements.push(p);
                }
            }
            k += 1;
        }
        Ok(Self { dim, elements })
    }

    pub fn trivial(dim: usize) -> Self {
        Self { dim, elements: vec![ExactMatrix::identity(dim)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ExactMatrix] {
        &self.elements
    }

    fn weight(&self) -> GaussianRational {
        GaussianRational::ratio(1, self.order() as i64)
    }

    /// Change of coordinates `z = p x`, `x = q z`: elements become `p g q`.
    pub fn conjugated(&self, p: &ExactMatrix, q: &ExactMatrix) -> Self {
        Self { dim: self.dim, elements: self.elements.iter().map(|g| &(p * g) * q).collect() }
    }

    /// Group average `(1/|G|) sum g^{-1} f(g x)`.
    pub fn reynolds_field(&self, f: &PolyVectorField) -> PolyVectorField {
        let mut acc = PolyVectorField::zero(f.dim());
        for g in &self.elements {
            let inv = g.inverse().expect("group elements are invertible");
            acc = &acc + &act_field(f, g).apply_matrix(&inv);
        }
        acc.scale(&self.weight())
    }

    /// Group average `(1/|G|) sum p(g x)`.
    pub fn reynolds_scalar(&self, p: &ScalarPoly) -> ScalarPoly {
        let mut acc = ScalarPoly::zero(p.dim());
        for g in &self.elements {
            acc = &acc + &act_scalar(p, g);
        }
        acc.scale(&self.weight())
    }

    /// First element `g` (by index) with `f(g x) != g f(x)`.
    pub fn equivariance_failure(&self, f: &PolyVectorField) -> Option<usize> {
        self.elements.iter().position(|g| act_field(f, g) != f.apply_matrix(g))
    }

    pub fn is_equivariant(&self, f: &PolyVectorField) -> bool {
        self.equivariance_failure(f).is_none()
    }

    pub fn is_invariant(&self, p: &ScalarPoly) -> bool {
        self.elements.iter().all(|g| act_scalar(p, g) == *p)
    }
}

fn check_shapes(elements: &[ExactMatrix], dim: usize) -> Result<(), SymmetryError> {
    for (index, e) in elements.iter().enumerate() {
        if !e.is_square() || e.rows() != dim {
            return Err(SymmetryError::BadShape { index, dim });
        }
        if e.determinant().is_zero() {
            return Err(SymmetryError::Singular { index });
        }
    }
    Ok(())
}

/// `f(g x)`
fn act_field(f: &PolyVectorField, g: &ExactMatrix) -> PolyVectorField {
    f.substitute(PolyVectorField::linear(g).components(), None)
}

/// `p(g x)`
fn act_scalar(p: &ScalarPoly, g: &ExactMatrix) -> ScalarPoly {
    p.substitute(PolyVectorField::linear(g).components(), None)
}

/// As `normalize`, with every generator replaced by its group average.
pub fn normalize_equivariant(
    f: &PolyVectorField,
    s: &Spectrum,
    group: &FiniteGroup,
    order: u32,
) -> Result<NormalFormResult, SymmetryError> {
    let a_s = ExactMatrix::diagonal(s.eigenvalues());
    if let Some(index) = group.elements.iter().position(|g| !g.commutes_with(&a_s)) {
        return Err(SymmetryError::NotCommuting { index });
    }
    if let Some(index) = group.equivariance_failure(f) {
        return Err(SymmetryError::NotEquivariant { index });
    }
    Ok(normalize_projected(f, s, order, |h| group.reynolds_field(h))?)
}

/// Molien counts: `c0[n]` invariants and `c1[n]` equivariant fields of
/// degree `n`, and `s = c1[1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolienTable {
    pub c0: Vec<u64>,
    pub c1: Vec<u64>,
    pub s: u64,
}

/// Coefficients `0..=n` of `1 / p(z)` for `p(0) = 1`.
fn series_inverse(p: &[GaussianRational], n: usize) -> Vec<GaussianRational> {
    let mut out = vec![GaussianRational::zero(); n + 1];
    out[0] = GaussianRational::one();
    for k in 1..=n {
        let mut acc = GaussianRational::zero();
        for j in 1..=k.min(p.len() - 1) {
            acc += &(&p[j] * &out[k - j]);
        }
        out[k] = -acc;
    }
    out
}

fn to_count(v: &GaussianRational, degree: u32) -> Result<u64, SymmetryError> {
    let bad = || SymmetryError::NonIntegral { degree, value: Box::new(v.clone()) };
    if !v.is_real() || !v.re().is_integer() || v.re().is_negative() {
        return Err(bad());
    }
    v.re().to_integer().to_u64().ok_or_else(bad)
}

pub fn molien_coefficients(group: &FiniteGroup, max_degree: u32) -> Result<MolienTable, SymmetryError> {
    let n = max_degree as usize;
    let mut c0 = vec![GaussianRational::zero(); n + 1];
    let mut c1 = vec![GaussianRational::zero(); n + 1];
    for g in &group.elements {
        let series = series_inverse(&g.det_one_minus_z(), n);
        let chi = g.trace().conj();
        for k in 0..=n {
            c0[k] += &series[k];
            c1[k] += &(&series[k] * &chi);
        }
    }
    let w = group.weight();
    let c0 = c0.iter().enumerate().map(|(k, v)| to_count(&(v * &w), k as u32)).collect::<Result<Vec<_>, _>>()?;
    let c1 = c1.iter().enumerate().map(|(k, v)| to_count(&(v * &w), k as u32)).collect::<Result<Vec<_>, _>>()?;
    let s = c1.get(1).copied().unwrap_or(0);
    Ok(MolienTable { c0, c1, s })
}

/// Rank of the averaging projector on scalar monomials of degree `n`.
pub fn invariant_dimension(group: &FiniteGroup, n: u32) -> usize {
    let images: Vec<ScalarPoly> = MultiIndex::of_degree(group.dim, n)
        .into_iter()
        .map(|m| group.reynolds_scalar(&ScalarPoly::monomial(m, GaussianRational::one())))
        .collect();
    span_rank_scalar(&images, &MultiIndex::of_degree(group.dim, n))
}

/// Rank of the averaging projector on vector monomials of degree `n`.
pub fn covariant_dimension(group: &FiniteGroup, n: u32) -> usize {
    let monos = MultiIndex::of_degree(group.dim, n);
    let mut images = Vec::new();
    for i in 0..group.dim {
        for m in &monos {
            let f = PolyVectorField::monomial(i, m.clone(), GaussianRational::one());
            images.push(group.reynolds_field(&f));
        }
    }
    span_rank_fields(&images, n)
}

fn scalar_row(p: &ScalarPoly, monos: &[MultiIndex]) -> Vec<GaussianRational> {
    monos.iter().map(|m| p.coeff(m)).collect()
}

fn span_rank_scalar(ps: &[ScalarPoly], monos: &[MultiIndex]) -> usize {
    if ps.is_empty() || monos.is_empty() {
        return 0;
    }
    ExactMatrix::from_rows(ps.iter().map(|p| scalar_row(p, monos)).collect()).unwrap().rank()
}

fn field_row(f: &PolyVectorField, monos: &[MultiIndex]) -> Vec<GaussianRational> {
    (0..f.dim()).flat_map(|i| monos.iter().map(move |m| f.component(i).coeff(m))).collect()
}

fn span_rank_fields(fs: &[PolyVectorField], n: u32) -> usize {
    let Some(first) = fs.first() else {
        return 0;
    };
    let monos = MultiIndex::of_degree(first.dim(), n);
    if monos.is_empty() {
        return 0;
    }
    ExactMatrix::from_rows(fs.iter().map(|f| field_row(f, &monos)).collect()).unwrap().rank()
}

/// A basis of the invariant polynomials of degree `n`, as averaged
/// monomials with dependent ones dropped in graded-lex order.
pub fn invariant_basis_of_degree(group: &FiniteGroup, n: u32) -> Vec<ScalarPoly> {
    let monos = MultiIndex::of_degree(group.dim, n);
    let candidates: Vec<ScalarPoly> = monos
        .iter()
        .map(|m| group.reynolds_scalar(&ScalarPoly::monomial(m.clone(), GaussianRational::one())))
        .collect();
    prune_dependent(candidates)
}

/// Keeps each polynomial that is independent of those kept before it.
pub fn prune_dependent(candidates: Vec<ScalarPoly>) -> Vec<ScalarPoly> {
    let monos: Vec<MultiIndex> = candidates
        .iter()
        .flat_map(|p| p.terms().map(|(m, _)| m.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut kept: Vec<ScalarPoly> = Vec::new();
    let mut rank = 0;
    for p in candidates {
        if p.is_zero() {
            continue;
        }
        let mut trial = kept.clone();
        trial.push(p.clone());
        let r = span_rank_scalar(&trial, &monos);
        if r > rank {
            rank = r;
            kept = trial;
        }
    }
    kept
}

/// One row of the gradient-property report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientDegree {
    pub degree: u32,
    pub c1: u64,
    pub s: u64,
    pub c0_next: u64,
    /// `c1 == s * c0_next`.
    pub counting_holds: bool,
    /// Dimension of the span of `K Q^{-1} grad Phi`.
    pub span_rank: usize,
    pub rank_holds: bool,
}

/// `Q = sum g^T g`, invariant in the sense `g^T Q g = Q`; the gradient of an
/// invariant taken with respect to `Q` is equivariant.
pub fn invariant_metric(group: &FiniteGroup) -> Result<ExactMatrix, SymmetryError> {
    let mut q = ExactMatrix::zeros(group.dim, group.dim);
    for g in &group.elements {
        q = &q + &(&g.transpose() * g);
    }
    if q.inverse().is_none() {
        return Err(SymmetryError::NoInvariantMetric);
    }
    Ok(q)
}

pub fn gradient_property_check(
    group: &FiniteGroup,
    max_degree: u32,
    k_basis: &[ExactMatrix],
) -> Result<Vec<GradientDegree>, SymmetryError> {
    let table = molien_coefficients(group, max_degree + 1)?;
    let q_inv = invariant_metric(group)?.inverse().expect("checked invertible");
    let n = group.dim;
    let mut out = Vec::new();
    for d in 1..=max_degree {
        let phis = invariant_basis_of_degree(group, d + 1);
        let mut fields = Vec::new();
        for phi in &phis {
            let grad = PolyVectorField::from_components((0..n).map(|k| phi.derivative(k)).collect())
                .expect("dimension");
            let metric_grad = grad.apply_matrix(&q_inv);
            for k in k_basis {
                fields.push(metric_grad.apply_matrix(k));
            }
        }
        let span_rank = span_rank_fields(&fields, d);
        let c1 = table.c1[d as usize];
        let c0_next = table.c0[d as usize + 1];
        out.push(GradientDegree {
            degree: d,
            c1,
            s: table.s,
            c0_next,
            counting_holds: c1 == table.s * c0_next,
            span_rank,
            rank_holds: span_rank as u64 == c1,
        });
    }
    Ok(out)
}

/// Averaged invariant monomials `x^sigma` (`sigma . lambda = 0`,
/// `1 <= |sigma| <= max_degree`) with linear dependencies pruned.
pub fn symmetric_invariants(
    group: &FiniteGroup,
    s: &Spectrum,
    max_degree: u32,
) -> Result<Vec<ScalarPoly>, SymmetryError> {
    let a_s = ExactMatrix::diagonal(s.eigenvalues());
    if let Some(index) = group.elements.iter().position(|g| !g.commutes_with(&a_s)) {
        return Err(SymmetryError::NotCommuting { index });
    }
    let mut candidates = Vec::new();
    for d in 1..=max_degree {
        for sig in MultiIndex::of_degree(s.dim(), d) {
            if s.dot(&sig).is_zero() {
                candidates.push(group.reynolds_scalar(&ScalarPoly::monomial(sig, GaussianRational::one())));
            }
        }
    }
    Ok(prune_dependent(candidates))
}

/// The rational companion matrix of `z^2 + z + 1`, a rotation of order 3 in
/// a non-orthogonal basis of the plane.
pub fn z3_generator() -> ExactMatrix {
    ExactMatrix::from_i64(&[&[0, -1], &[1, -1]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot() -> ExactMatrix {
        ExactMatrix::from_i64(&[&[0, -1], &[1, 0]])
    }

    #[test]
    fn centralizer_examples() {
        let d = ExactMatrix::diagonal(&[GaussianRational::from_int(1), GaussianRational::from_int(2)]);
        let c = joint_centralizer(&[d]);
        assert_eq!(c, vec![ExactMatrix::from_i64(&[&[1, 0], &[0, 0]]), ExactMatrix::from_i64(&[&[0, 0], &[0, 1]])]);
        let c = joint_centralizer(&[rot()]);
        assert_eq!(c.len(), 2);
        assert!(c.contains(&rot()) && c.contains(&ExactMatrix::identity(2)));
    }

    #[test]
    fn group_validation() {
        assert_eq!(FiniteGroup::new(vec![rot()]).unwrap_err(), SymmetryError::NoIdentity);
        assert_eq!(FiniteGroup::new(vec![ExactMatrix::identity(2), rot()]).unwrap_err(), SymmetryError::NotClosed);
        let g = FiniteGroup::generate(2, &[rot()]).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(FiniteGroup::generate(2, &[z3_generator()]).unwrap().order(), 3);
    }

    #[test]
    fn reynolds_is_idempotent() {
        let g = FiniteGroup::generate(2, &[z3_generator()]).unwrap();
        let mut f = PolyVectorField::zero(2);
        f.add_term(0, MultiIndex::new(vec![2, 0]), GaussianRational::from_int(1));
        f.add_term(1, MultiIndex::new(vec![1, 1]), GaussianRational::ratio(1, 2));
        let once = g.reynolds_field(&f);
        assert_eq!(g.reynolds_field(&once), once);
        assert!(g.is_equivariant(&once));
    }

    #[test]
    fn equivariance_examples() {
        let a = ExactMatrix::diagonal(&[GaussianRational::from_int(1), GaussianRational::from_int(2)]);
        let f = PolyVectorField::monomial(0, MultiIndex::new(vec![0, 2]), GaussianRational::from_int(1));
        let (ok, res) = equivariance_check(&f, &a);
        assert!(!ok);
        assert_eq!(res, f.scale(&GaussianRational::from_int(3)));
        assert!(equivariance_check(&PolyVectorField::linear(&a), &a).0);
    }

    #[test]
    fn trivial_group_counts() {
        let t = molien_coefficients(&FiniteGroup::trivial(2), 5).unwrap();
        assert_eq!(t.c0, vec![1, 2, 3, 4, 5, 6]);
    }
}
