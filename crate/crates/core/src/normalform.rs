//! Poincare-Dulac normalization degree by degree.
//!
//! Degrees are polynomial degrees: step `d` removes the non-resonant part of
//! the homogeneous terms of degree `d` with a generator `h_d` of degree `d`.

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{AlgebraError, ExactMatrix, GaussianRational, MultiIndex, PolyVectorField, ScalarPoly};
use crate::resonance::Spectrum;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalFormError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("field has dimension {field} but spectrum has {spectrum} eigenvalues")]
    DimensionMismatch { field: usize, spectrum: usize },
    #[error("field has a constant term in component {component}")]
    ConstantTerm { component: usize },
    #[error("linear part is not diagonal; off-diagonal entries at {}", fmt_entries(.entries))]
    NotDiagonal { entries: Vec<(usize, usize)> },
    #[error("linear part has {found} at slot {index} but the spectrum says {expected}")]
    EigenvalueMismatch { index: usize, expected: Box<GaussianRational>, found: Box<GaussianRational> },
    #[error("linear part does not commute with the semisimple part")]
    LinearPartNotCommuting,
    #[error("input is not homogeneous of degree {degree}")]
    NotHomogeneous { degree: u32 },
    #[error("term x^{exponent} in component {} is not resonant", .component + 1)]
    NotResonant { component: usize, exponent: MultiIndex },
    #[error("matrix {index} of the decomposition basis does not commute with A")]
    NotInCentralizer { index: usize },
    #[error("no polynomial decomposition over the given matrices at degree {degree}")]
    NoPolynomialDecomposition { degree: u32 },
    #[error("linear part is not block diagonal; offending entries at {}", fmt_entries(.entries))]
    NotBlockDiagonal { entries: Vec<(usize, usize)> },
    #[error("invalid block ({}, {})", .0 + 1, .1 + 1)]
    InvalidBlock(usize, usize),
    #[error("reality constraint violated by x^{exponent} in component {}", .component + 1)]
    RealityViolated { component: usize, exponent: MultiIndex },
}

fn fmt_entries(entries: &[(usize, usize)]) -> String {
    let v: Vec<String> = entries.iter().map(|(r, c)| format!("({},{})", r + 1, c + 1)).collect();
    v.join(" ")
}

/// `L(h) = (A_s x . grad) h - A_s h`, computed termwise as
/// `(mu . lambda - lambda_i) x^mu e_i`.
pub fn homological_apply(s: &Spectrum, h: &PolyVectorField) -> PolyVectorField {
    let mut out = PolyVectorField::zero(h.dim());
    for (i, m, c) in h.terms() {
        let div = s.divisor(m, i);
        if !div.is_zero() {
            out.add_term(i, m.clone(), c * &div);
        }
    }
    debug_assert_eq!(out, homological_apply_matrix(&ExactMatrix::diagonal(s.eigenvalues()), h));
    out
}

/// Bracket form `{A x, h}` for an arbitrary square `A`.
pub fn homological_apply_matrix(a: &ExactMatrix, h: &PolyVectorField) -> PolyVectorField {
    PolyVectorField::lie_poisson(&PolyVectorField::linear(a), h).expect("matrix and field dimensions agree")
}

/// One degree of the normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologicalStep {
    pub degree: u32,
    pub generator: PolyVectorField,
    /// The part of `f_d` in the range of `L`; equals `L(generator)`.
    pub removed: PolyVectorField,
    /// The resonant remainder.
    pub kept: PolyVectorField,
}

/// Solves `L(h) = f_d - kept` with `kept` resonant and the kernel component
/// of `h` set to zero.
pub fn homological_solve_degree(s: &Spectrum, f_d: &PolyVectorField) -> Result<HomologicalStep, NormalFormError> {
    check_dim(f_d, s)?;
    let Some(degree) = f_d.degree_min() else {
        return Ok(HomologicalStep {
            degree: 0,
            generator: f_d.clone(),
            removed: f_d.clone(),
            kept: f_d.clone(),
        });
    };
    if f_d.degree_max() != Some(degree) || degree < 2 {
        return Err(NormalFormError::NotHomogeneous { degree });
    }
    let n = f_d.dim();
    let mut h = PolyVectorField::zero(n);
    let mut kept = PolyVectorField::zero(n);
    let mut removed = PolyVectorField::zero(n);
    for (i, m, c) in f_d.terms() {
        let div = s.divisor(m, i);
        match div.inv() {
            None => kept.add_term(i, m.clone(), c.clone()),
            Some(inv) => {
                h.add_term(i, m.clone(), c * &inv);
                removed.add_term(i, m.clone(), c.clone());
            }
        }
    }
    Ok(HomologicalStep { degree, generator: h, removed, kept })
}

fn check_dim(f: &PolyVectorField, s: &Spectrum) -> Result<(), NormalFormError> {
    if f.dim() != s.dim() {
        return Err(NormalFormError::DimensionMismatch { field: f.dim(), spectrum: s.dim() });
    }
    Ok(())
}

fn check_no_constant(f: &PolyVectorField) -> Result<(), NormalFormError> {
    for (i, m, _) in f.terms() {
        if m.degree() == 0 {
            return Err(NormalFormError::ConstantTerm { component: i });
        }
    }
    Ok(())
}

/// Checks that the linear part is exactly `diag(lambda)`.
pub fn check_linear_part(f: &PolyVectorField, s: &Spectrum) -> Result<(), NormalFormError> {
    check_dim(f, s)?;
    let a = f.linear_part();
    let off = a.off_diagonal_nonzeros();
    if !off.is_empty() {
        return Err(NormalFormError::NotDiagonal { entries: off });
    }
    for (k, (found, expected)) in a.diag().into_iter().zip(s.eigenvalues()).enumerate() {
        if &found != expected {
            return Err(NormalFormError::EigenvalueMismatch { index: k, expected: Box::new(expected.clone()), found: Box::new(found) });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormResult {
    pub original: PolyVectorField,
    pub spectrum: Spectrum,
    pub order: u32,
    pub steps: Vec<HomologicalStep>,
    pub normal_form: PolyVectorField,
    /// `Psi(y) - y` for the composed change of coordinates `x = Psi(y)`,
    /// degrees `2..=order`.
    pub transform: PolyVectorField,
}

impl NormalFormResult {
    /// Wraps a field that is already in normal form with respect to `s`.
    /// The linear part may be any matrix commuting with `diag(s)`, which lets
    /// detuned systems (linear part off the critical spectrum) be unfolded.
    pub fn already_normal(f: &PolyVectorField, s: &Spectrum, order: u32) -> Result<Self, NormalFormError> {
        check_dim(f, s)?;
        check_no_constant(f)?;
        let a_s = ExactMatrix::diagonal(s.eigenvalues());
        if !f.linear_part().commutes_with(&a_s) {
            return Err(NormalFormError::LinearPartNotCommuting);
        }
        let nf = f.truncate(order);
        if let Some((i, m, _)) = non_resonant_terms(&nf, s).into_iter().next() {
            return Err(NormalFormError::NotResonant { component: i, exponent: m });
        }
        Ok(Self {
            original: nf.clone(),
            spectrum: s.clone(),
            order,
            steps: Vec::new(),
            normal_form: nf,
            transform: PolyVectorField::zero(f.dim()),
        })
    }

    pub fn dim(&self) -> usize {
        self.normal_form.dim()
    }

    /// `x = y + transform(y)`.
    pub fn apply_transform(&self, y: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        let t = self.transform.evaluate(y);
        y.iter().zip(t).map(|(a, b)| a + b).collect()
    }
}

pub fn normalize(f: &PolyVectorField, s: &Spectrum, order: u32) -> Result<NormalFormResult, NormalFormError> {
    normalize_projected(f, s, order, |h| h.clone())
}

/// `normalize` with every generator passed through `project` before use.
/// The projection must commute with `L` (group averaging over a symmetry
/// group commuting with `A_s` does).
pub fn normalize_projected(
    f: &PolyVectorField,
    s: &Spectrum,
    order: u32,
    project: impl Fn(&PolyVectorField) -> PolyVectorField,
) -> Result<NormalFormResult, NormalFormError> {
    check_no_constant(f)?;
    check_linear_part(f, s)?;
    let n = f.dim();
    let mut cur = f.truncate(order);
    let mut transform = PolyVectorField::zero(n);
    let mut steps = Vec::new();
    for d in 2..=order {
        let f_d = cur.homogeneous_part(d);
        let raw = homological_solve_degree(s, &f_d)?;
        let generator = project(&raw.generator);
        let removed = homological_apply(s, &generator);
        let kept = &f_d - &removed;
        if !generator.is_zero() {
            cur = cur.compose_shift(&generator, order)?;
            transform = &generator + &transform.compose_map(&generator, order);
        }
        steps.push(HomologicalStep { degree: d, generator, removed, kept });
    }
    Ok(NormalFormResult {
        original: f.truncate(order),
        spectrum: s.clone(),
        order,
        steps,
        normal_form: cur,
        transform,
    })
}

/// Nonlinear terms of `f` that are not resonant with `s`.
pub fn non_resonant_terms(f: &PolyVectorField, s: &Spectrum) -> Vec<(usize, MultiIndex, GaussianRational)> {
    f.terms()
        .filter(|(i, m, _)| m.degree() >= 2 && !s.is_resonant(m, *i))
        .map(|(i, m, c)| (i, m.clone(), c.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    /// (a) non-resonant nonlinear terms of the normal form.
    pub non_resonant: Vec<(usize, MultiIndex, GaussianRational)>,
    /// (b) `{A_s x, nf - A_s x}` truncated to the order.
    pub bracket_residual: PolyVectorField,
    /// (c) pushforward of the original by the transform, minus the normal form.
    pub conjugacy_residual: PolyVectorField,
}

impl Verification {
    pub fn resonant_ok(&self) -> bool {
        self.non_resonant.is_empty()
    }

    pub fn bracket_ok(&self) -> bool {
        self.bracket_residual.is_zero()
    }

    pub fn conjugacy_ok(&self) -> bool {
        self.conjugacy_residual.is_zero()
    }

    pub fn ok(&self) -> bool {
        self.resonant_ok() && self.bracket_ok() && self.conjugacy_ok()
    }
}

pub fn verify_normal_form(r: &NormalFormResult) -> Result<Verification, NormalFormError> {
    let s = &r.spectrum;
    check_dim(&r.normal_form, s)?;
    let non_resonant = non_resonant_terms(&r.normal_form, s);
    let lin = PolyVectorField::diagonal(s.eigenvalues());
    let tail = &r.normal_form - &lin;
    let bracket_residual = PolyVectorField::lie_poisson(&lin, &tail)?.truncate(r.order);
    let pushed = r.original.compose_shift(&r.transform, r.order)?;
    let conjugacy_residual = &pushed - &r.normal_form.truncate(r.order);
    Ok(Verification { non_resonant, bracket_residual, conjugacy_residual })
}

/// The scalar series `alpha` with `nf = (1 + alpha(x)) A_s x` up to the
/// order, if it exists.
pub fn condition_alpha(r: &NormalFormResult) -> Option<ScalarPoly> {
    let n = r.dim();
    let mut alpha: Option<ScalarPoly> = None;
    for i in 0..n {
        let lam = r.spectrum.get(i);
        let comp = r.normal_form.component(i);
        let Some(inv) = lam.inv() else {
            if !comp.is_zero() {
                return None;
            }
            continue;
        };
        let q = comp.div_monomial(&MultiIndex::unit(n, i))?.scale(&inv);
        let a = &q - &ScalarPoly::one(n);
        match &alpha {
            None => alpha = Some(a),
            Some(prev) if *prev == a => {}
            Some(_) => return None,
        }
    }
    alpha
}

/// Orders a centralizer basis with `A` first, keeping a maximal linearly
/// independent subset of the remaining matrices.
pub fn decomposition_basis(a: &ExactMatrix, centralizer: &[ExactMatrix]) -> Vec<ExactMatrix> {
    let mut out = vec![a.clone()];
    for m in centralizer {
        let mut trial = out.clone();
        trial.push(m.clone());
        if matrices_rank(&trial) == trial.len() {
            out = trial;
        }
    }
    out
}

pub(crate) fn matrices_rank(ms: &[ExactMatrix]) -> usize {
    if ms.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<GaussianRational>> = ms.iter().map(|m| m.entries().to_vec()).collect();
    ExactMatrix::from_rows(rows).expect("same shape").rank()
}

/// Coefficients `mu_j(x)`, each a polynomial in the invariant monomials, with
/// `nf = sum_j mu_j(x) M_j x` up to the order.
pub fn centralizer_decompose(r: &NormalFormResult, basis: &[ExactMatrix]) -> Result<Vec<ScalarPoly>, NormalFormError> {
    let n = r.dim();
    let s = &r.spectrum;
    let a_s = ExactMatrix::diagonal(s.eigenvalues());
    for (k, m) in basis.iter().enumerate() {
        if m.rows() != n || !m.is_square() || !m.commutes_with(&a_s) {
            return Err(NormalFormError::NotInCentralizer { index: k });
        }
    }
    let mut mus = vec![ScalarPoly::zero(n); basis.len()];
    let linear_fields: Vec<PolyVectorField> = basis.iter().map(PolyVectorField::linear).collect();
    for d in 1..=r.order {
        let target = r.normal_form.homogeneous_part(d);
        let invariants: Vec<MultiIndex> =
            MultiIndex::of_degree(n, d - 1).into_iter().filter(|sig| s.dot(sig).is_zero()).collect();
        // Unknown (j, sigma) -> column; rows indexed by (component, exponent).
        let mut cols: Vec<(usize, MultiIndex)> = Vec::new();
        let mut col_fields: Vec<PolyVectorField> = Vec::new();
        for (j, lf) in linear_fields.iter().enumerate() {
            for sig in &invariants {
                cols.push((j, sig.clone()));
                let mono = ScalarPoly::monomial(sig.clone(), GaussianRational::one());
                col_fields.push(lf.map_components(|p| p.mul_truncated(&mono, None)));
            }
        }
        let monos = MultiIndex::of_degree(n, d);
        let row_index = |i: usize, m: &MultiIndex| -> usize {
            i * monos.len() + monos.iter().position(|x| x == m).expect("homogeneous")
        };
        let nrows = n * monos.len();
        let mut mat = ExactMatrix::zeros(nrows, cols.len());
        for (c, fld) in col_fields.iter().enumerate() {
            for (i, m, v) in fld.terms() {
                mat.set(row_index(i, m), c, v.clone());
            }
        }
        let mut rhs = vec![GaussianRational::zero(); nrows];
        for (i, m, v) in target.terms() {
            rhs[row_index(i, m)] = v.clone();
        }
        if rhs.iter().all(Zero::is_zero) {
            continue;
        }
        let x = mat.solve(&rhs).ok_or(NormalFormError::NoPolynomialDecomposition { degree: d })?;
        for ((j, sig), v) in cols.into_iter().zip(x) {
            mus[j].add_term(sig, v);
        }
    }
    Ok(mus)
}

/// Re-expands `sum_j mu_j(x) M_j x`.
pub fn recompose(mus: &[ScalarPoly], basis: &[ExactMatrix]) -> PolyVectorField {
    let n = basis.first().map(ExactMatrix::rows).unwrap_or(0);
    let mut out = PolyVectorField::zero(n);
    for (mu, m) in mus.iter().zip(basis) {
        let lf = PolyVectorField::linear(m);
        out = &out + &lf.map_components(|p| p.mul_truncated(mu, None));
    }
    out
}

/// A real 2x2 block `[[a, -b], [b, a]]` on coordinates `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationBlock {
    pub i: usize,
    pub j: usize,
}

/// `z = forward x`, `x = backward z`. On a block, `z_i = x_i + i x_j` and
/// `z_j = x_i - i x_j`; other coordinates are unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexificationMap {
    pub blocks: Vec<RotationBlock>,
    pub forward: ExactMatrix,
    pub backward: ExactMatrix,
    /// Involution on indices induced by complex conjugation.
    pub conjugation: Vec<usize>,
}

impl ComplexificationMap {
    pub fn identity(n: usize) -> Self {
        Self {
            blocks: Vec::new(),
            forward: ExactMatrix::identity(n),
            backward: ExactMatrix::identity(n),
            conjugation: (0..n).collect(),
        }
    }

    pub fn new(n: usize, blocks: &[RotationBlock]) -> Result<Self, NormalFormError> {
        let mut forward = ExactMatrix::identity(n);
        let mut backward = ExactMatrix::identity(n);
        let mut conjugation: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        let half = GaussianRational::ratio(1, 2);
        let i_unit = GaussianRational::i();
        for b in blocks {
            if b.i >= n || b.j >= n || b.i == b.j || used[b.i] || used[b.j] {
                return Err(NormalFormError::InvalidBlock(b.i, b.j));
            }
            used[b.i] = true;
            used[b.j] = true;
            forward.set(b.i, b.j, i_unit.clone());
            forward.set(b.j, b.i, GaussianRational::one());
            forward.set(b.j, b.j, -&i_unit);
            backward.set(b.i, b.i, half.clone());
            backward.set(b.i, b.j, half.clone());
            backward.set(b.j, b.i, -(&i_unit * &half));
            backward.set(b.j, b.j, &i_unit * &half);
            conjugation.swap(b.i, b.j);
        }
        debug_assert_eq!(&backward * &forward, ExactMatrix::identity(n));
        Ok(Self { blocks: blocks.to_vec(), forward, backward, conjugation })
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Spectrum of a block-diagonal real linear part, checked.
pub fn block_spectrum(a: &ExactMatrix, blocks: &[RotationBlock]) -> Result<Vec<GaussianRational>, NormalFormError> {
    let n = a.rows();
    let mut expected_zero = Vec::new();
    let mut partner = vec![None; n];
    for b in blocks {
        if b.i >= n || b.j >= n || b.i == b.j {
            return Err(NormalFormError::InvalidBlock(b.i, b.j));
        }
        partner[b.i] = Some(b.j);
        partner[b.j] = Some(b.i);
    }
    for r in 0..n {
        for c in 0..n {
            if r != c && partner[r] != Some(c) && !a.get(r, c).is_zero() {
                expected_zero.push((r, c));
            }
        }
    }
    let mut ev: Vec<GaussianRational> = a.diag();
    for b in blocks {
        let (p, q) = (b.i, b.j);
        let aa = a.get(p, p);
        let bb = a.get(q, p);
        let ok = a.get(q, q) == aa && a.get(p, q) == &-bb;
        if !ok {
            expected_zero.push((p, q));
        }
        let ib = bb * &GaussianRational::i();
        ev[p] = aa + &ib;
        ev[q] = aa - &ib;
    }
    if !expected_zero.is_empty() || !a.is_real() {
        return Err(NormalFormError::NotBlockDiagonal { entries: expected_zero });
    }
    Ok(ev)
}

/// Complex coordinates diagonalizing the declared rotation blocks.
pub fn complexify(
    f: &PolyVectorField,
    blocks: &[RotationBlock],
) -> Result<(PolyVectorField, Spectrum, ComplexificationMap), NormalFormError> {
    let n = f.dim();
    let ev = block_spectrum(&f.linear_part(), blocks)?;
    let map = ComplexificationMap::new(n, blocks)?;
    let g = if map.is_identity() { f.clone() } else { f.linear_change(&map.forward, &map.backward) };
    let s = Spectrum::new(ev).map_err(|_| NormalFormError::NotBlockDiagonal { entries: Vec::new() })?;
    Ok((g, s, map))
}

/// Coefficient of component `c(k)` at `c(mu)` must be the conjugate of the
/// coefficient of component `k` at `mu`.
pub fn check_reality(g: &PolyVectorField, conjugation: &[usize]) -> Result<(), NormalFormError> {
    for (k, m, c) in g.terms() {
        let partner = g.component(conjugation[k]).coeff(&m.permuted(conjugation));
        if partner != c.conj() {
            return Err(NormalFormError::RealityViolated { component: k, exponent: m.clone() });
        }
    }
    Ok(())
}

/// Real normal form and real transform from a complexified result.
pub fn realify(
    r: &NormalFormResult,
    map: &ComplexificationMap,
) -> Result<(PolyVectorField, PolyVectorField), NormalFormError> {
    realify_field(&r.normal_form, map).and_then(|nf| Ok((nf, realify_field(&r.transform, map)?)))
}

/// `backward g(forward x)` after checking the reality constraint.
pub fn realify_field(g: &PolyVectorField, map: &ComplexificationMap) -> Result<PolyVectorField, NormalFormError> {
    check_reality(g, &map.conjugation)?;
    if map.is_identity() {
        return Ok(g.clone());
    }
    let out = g.linear_change(&map.backward, &map.forward);
    if let Some((i, m, _)) = out.terms().find(|(_, _, c)| !c.is_real()) {
        return Err(NormalFormError::RealityViolated { component: i, exponent: m.clone() });
    }
    Ok(out)
}

impl fmt::Display for NormalFormResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.normal_form)
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
    fn homological_examples() {
        let s = Spectrum::parse(&["1", "2"]);
        let h = PolyVectorField::monomial(1, mi(&[2, 0]), q(1));
        assert!(homological_apply(&s, &h).is_zero());
        let h = PolyVectorField::monomial(0, mi(&[0, 2]), q(1));
        assert_eq!(homological_apply(&s, &h), PolyVectorField::monomial(0, mi(&[0, 2]), q(3)));
        assert!(homological_apply(&s, &PolyVectorField::diagonal(s.eigenvalues())).is_zero());
    }

    #[test]
    fn solve_degree_example() {
        let s = Spectrum::parse(&["1", "2"]);
        let mut f = PolyVectorField::monomial(1, mi(&[2, 0]), q(1));
        f.add_term(0, mi(&[0, 2]), q(1));
        let st = homological_solve_degree(&s, &f).unwrap();
        assert_eq!(st.generator, PolyVectorField::monomial(0, mi(&[0, 2]), GaussianRational::ratio(1, 3)));
        assert_eq!(st.kept, PolyVectorField::monomial(1, mi(&[2, 0]), q(1)));
        assert_eq!(homological_apply(&s, &st.generator), st.removed);
        let mut bad = f.clone();
        bad.add_term(0, mi(&[3, 0]), q(1));
        assert!(matches!(homological_solve_degree(&s, &bad), Err(NormalFormError::NotHomogeneous { .. })));
    }

    #[test]
    fn linear_system_is_fixed() {
        let s = Spectrum::parse(&["1", "2"]);
        let f = PolyVectorField::diagonal(s.eigenvalues());
        let r = normalize(&f, &s, 4).unwrap();
        assert_eq!(r.normal_form, f);
        assert!(r.transform.is_zero());
        assert!(verify_normal_form(&r).unwrap().ok());
        assert_eq!(condition_alpha(&r), Some(ScalarPoly::zero(2)));
    }

    #[test]
    fn intake_errors() {
        let s = Spectrum::parse(&["1", "2"]);
        let mut f = PolyVectorField::diagonal(s.eigenvalues());
        f.add_term(0, mi(&[0, 1]), q(1));
        assert_eq!(normalize(&f, &s, 3).unwrap_err(), NormalFormError::NotDiagonal { entries: vec![(0, 1)] });
        let mut f = PolyVectorField::diagonal(s.eigenvalues());
        f.add_term(1, mi(&[0, 0]), q(1));
        assert_eq!(normalize(&f, &s, 3).unwrap_err(), NormalFormError::ConstantTerm { component: 1 });
        let f = PolyVectorField::diagonal(&[q(1), q(3)]);
        assert!(matches!(normalize(&f, &s, 3), Err(NormalFormError::EigenvalueMismatch { index: 1, .. })));
    }

    #[test]
    fn negative_controls() {
        let s = Spectrum::parse(&["1", "2"]);
        let mut f = PolyVectorField::diagonal(s.eigenvalues());
        f.add_term(0, mi(&[0, 2]), q(1));
        f.add_term(1, mi(&[2, 0]), q(1));
        let mut r = normalize(&f, &s, 3).unwrap();
        assert!(verify_normal_form(&r).unwrap().ok());
        let good = r.clone();
        r.transform = PolyVectorField::zero(2);
        let v = verify_normal_form(&r).unwrap();
        assert!(!v.conjugacy_ok());
        let mut r = good;
        r.normal_form.add_term(0, mi(&[1, 1]), q(1));
        let v = verify_normal_form(&r).unwrap();
        assert_eq!(v.non_resonant, vec![(0, mi(&[1, 1]), q(1))]);
    }

    #[test]
    fn alpha_cases() {
        let s = Spectrum::parse(&["-i", "i"]);
        let rho = ScalarPoly::monomial(mi(&[1, 1]), q(1));
        let lin = PolyVectorField::diagonal(s.eigenvalues());
        let nf = &lin + &lin.map_components(|p| p.mul_truncated(&rho, None));
        let r = NormalFormResult::already_normal(&nf, &s, 3).unwrap();
        assert_eq!(condition_alpha(&r), Some(rho.clone()));
        // An independent radial term x_i * rho breaks proportionality to A_s x.
        let mut nf2 = nf.clone();
        nf2.add_term(0, mi(&[2, 1]), q(1));
        nf2.add_term(1, mi(&[1, 2]), q(1));
        let r2 = NormalFormResult::already_normal(&nf2, &s, 3).unwrap();
        assert_eq!(condition_alpha(&r2), None);
    }

    #[test]
    fn complexify_hopf_block() {
        let j = ExactMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let f = PolyVectorField::linear(&j);
        let blocks = [RotationBlock { i: 0, j: 1 }];
        let (g, s, map) = complexify(&f, &blocks).unwrap();
        assert_eq!(s.eigenvalues(), &[GaussianRational::i(), -GaussianRational::i()]);
        assert_eq!(g, PolyVectorField::diagonal(s.eigenvalues()));
        assert_eq!(realify_field(&g, &map).unwrap(), f);
    }

    #[test]
    fn complexify_rejects_coupling() {
        let a = ExactMatrix::from_i64(&[&[0, -1, 1], &[1, 0, 0], &[0, 0, 2]]);
        let err = complexify(&PolyVectorField::linear(&a), &[RotationBlock { i: 0, j: 1 }]).unwrap_err();
        assert_eq!(err, NormalFormError::NotBlockDiagonal { entries: vec![(0, 2)] });
    }

    #[test]
    fn reality_violation_named() {
        let (g, _, map) = complexify(
            &PolyVectorField::linear(&ExactMatrix::from_i64(&[&[0, -1], &[1, 0]])),
            &[RotationBlock { i: 0, j: 1 }],
        )
        .unwrap();
        let mut bad = g.clone();
        bad.add_term(0, mi(&[2, 1]), q(1));
        assert_eq!(
            realify_field(&bad, &map).unwrap_err(),
            NormalFormError::RealityViolated { component: 0, exponent: mi(&[2, 1]) }
        );
    }
}
