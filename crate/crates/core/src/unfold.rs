//! Unfolding of a normal form into `(x, w, phi)` blocks.
//!
//! `phi_a = x^{sigma_a}` are the monomial invariants and `w_b = x^{nu_b}` the
//! covariant monomials attached to sporadic resonances. The unfolded system
//! reads
//!
//! ```text
//! x'   = F(phi) x + K(phi) w
//! w'   = G(phi) w + Gx(phi) x
//! phi' = h(phi)
//! ```
//!
//! and reproduces the normal form on `w = R(x)`, `phi = I(x)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{ExactMatrix, GaussianRational, MultiIndex, PolyVectorField, ScalarPoly};
use crate::normalform::NormalFormResult;
use crate::resonance::{InvarianceBasis, ResonanceReport, Spectrum};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnfoldError {
    #[error("invariance basis is incomplete")]
    IncompleteBasis,
    #[error("resonance report covers degree {report} but the normal form has order {order}")]
    ReportTooShort { report: u32, order: u32 },
    #[error("report and normal form use different spectra")]
    SpectrumMismatch,
    #[error("term x^{exponent} in component {} has no decomposition over x, w and invariants", .component + 1)]
    NoDecomposition { component: usize, exponent: MultiIndex },
    #[error("monomial x^{0} is not in the invariance monoid")]
    NotInvariant(MultiIndex),
    #[error("orbit space has dimension {0}; supply a candidate fixed point")]
    NeedFixedPoint(usize),
    #[error("candidate point has {got} coordinates, orbit space has {want}")]
    PointDimension { got: usize, want: usize },
    #[error("candidate point is not a zero of the orbit-space field")]
    NotFixed,
    #[error("orbit-space field has non-real coefficients")]
    NonReal,
}

/// Monomial invariants `I_a(x) = x^{sigma_a}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantSet {
    pub exponents: Vec<MultiIndex>,
}

impl InvariantSet {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn poly(&self, a: usize) -> ScalarPoly {
        ScalarPoly::monomial(self.exponents[a].clone(), GaussianRational::one())
    }

    pub fn polys(&self) -> Vec<ScalarPoly> {
        (0..self.len()).map(|a| self.poly(a)).collect()
    }
}

/// Covariant monomials `R_b(x) = x^{nu_b}` with `X_0 R_b = lambda_{i_b} R_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxiliarySet {
    /// `(i_b, nu_b)`
    pub entries: Vec<(usize, MultiIndex)>,
}

impl AuxiliarySet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn poly(&self, b: usize) -> ScalarPoly {
        ScalarPoly::monomial(self.entries[b].1.clone(), GaussianRational::one())
    }

    pub fn polys(&self) -> Vec<ScalarPoly> {
        (0..self.len()).map(|b| self.poly(b)).collect()
    }
}

pub fn build_invariants(basis: &InvarianceBasis) -> InvariantSet {
    InvariantSet { exponents: basis.generators().to_vec() }
}

/// Writes `kappa` (in the invariance monoid) as a sum of generators,
/// repeatedly taking the graded-lex greatest generator below what is left.
/// Returns exponents over the generators.
pub fn factor_invariant(kappa: &MultiIndex, inv: &InvariantSet) -> Option<MultiIndex> {
    let mut left = kappa.clone();
    let mut exps = vec![0u32; inv.len()];
    while left.degree() > 0 {
        let (a, g) = inv
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, g)| g.le_componentwise(&left))
            .max_by(|x, y| x.1.cmp(y.1))?;
        left = left.checked_sub(g).expect("below");
        exps[a] += 1;
    }
    Some(MultiIndex::new(exps))
}

/// Rewrites an invariant polynomial in the `phi` variables.
pub fn rewrite_invariant(p: &ScalarPoly, inv: &InvariantSet) -> Result<ScalarPoly, UnfoldError> {
    let mut out = ScalarPoly::zero(inv.len());
    for (m, c) in p.terms() {
        let e = factor_invariant(m, inv).ok_or_else(|| UnfoldError::NotInvariant(m.clone()))?;
        out.add_term(e, c.clone());
    }
    Ok(out)
}

/// `Phi_a(phi)` with `Phi_a(I(x)) = grad I_a . nf`.
pub fn invariant_evolution(nf: &PolyVectorField, inv: &InvariantSet) -> Result<Vec<ScalarPoly>, UnfoldError> {
    (0..inv.len())
        .map(|a| rewrite_invariant(&nf.directional_derivative(&inv.poly(a), None), inv))
        .collect()
}

type PolyMatrix = Vec<Vec<ScalarPoly>>;

fn poly_matrix(rows: usize, cols: usize, dim: usize) -> PolyMatrix {
    vec![vec![ScalarPoly::zero(dim); cols]; rows]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnfoldedSystem {
    pub spectrum: Spectrum,
    pub invariants: InvariantSet,
    pub auxiliaries: AuxiliarySet,
    /// `n x n`, x-block acting on `x`.
    pub f: PolyMatrix,
    /// `n x m`, x-block acting on `w`.
    pub k: PolyMatrix,
    /// `m x m`, w-block acting on `w`.
    pub g: PolyMatrix,
    /// `m x n`, w-block acting on `x`.
    pub g_x: PolyMatrix,
    /// Orbit-space field, one polynomial in `phi` per invariant.
    pub h: Vec<ScalarPoly>,
    /// Index involution from complex conjugation, when the spectrum has one.
    pub conjugation: Option<Vec<usize>>,
}

impl UnfoldedSystem {
    pub fn n(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn m(&self) -> usize {
        self.auxiliaries.len()
    }

    pub fn r(&self) -> usize {
        self.invariants.len()
    }

    /// The unfolded system as one polynomial field in `(x, w, phi)`.
    pub fn to_field(&self) -> PolyVectorField {
        let (n, m, r) = (self.n(), self.m(), self.r());
        let total = n + m + r;
        let var = |k: usize| ScalarPoly::var(total, k);
        let lift = |p: &ScalarPoly| embed(p, total, n + m);
        let mut comps = Vec::with_capacity(total);
        for i in 0..n {
            let mut acc = ScalarPoly::zero(total);
            for j in 0..n {
                acc = &acc + &lift(&self.f[i][j]).mul_truncated(&var(j), None);
            }
            for b in 0..m {
                acc = &acc + &lift(&self.k[i][b]).mul_truncated(&var(n + b), None);
            }
            comps.push(acc);
        }
        for a in 0..m {
            let mut acc = ScalarPoly::zero(total);
            for b in 0..m {
                acc = &acc + &lift(&self.g[a][b]).mul_truncated(&var(n + b), None);
            }
            for j in 0..n {
                acc = &acc + &lift(&self.g_x[a][j]).mul_truncated(&var(j), None);
            }
            comps.push(acc);
        }
        for a in 0..r {
            comps.push(lift(&self.h[a]));
        }
        PolyVectorField::from_components(comps).expect("uniform dimension")
    }

    /// `(x, R(x), I(x))` for an initial condition.
    pub fn lift_point(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = x.to_vec();
        out.extend(self.auxiliaries.polys().iter().map(|p| p.evaluate(x)));
        out.extend(self.invariants.polys().iter().map(|p| p.evaluate(x)));
        out
    }

    /// Invariant `a` takes only non-negative values on real points: it is
    /// fixed by conjugation and even in every self-conjugate slot.
    pub fn is_square_norm(&self, a: usize) -> bool {
        let Some(c) = &self.conjugation else {
            return false;
        };
        let sig = &self.invariants.exponents[a];
        sig.permuted(c) == *sig && (0..sig.dim()).all(|k| c[k] != k || sig.get(k).is_multiple_of(2))
    }
}

/// `p(phi)` placed on variables `offset..offset + p.dim()` of a `total`
/// dimensional space.
fn embed(p: &ScalarPoly, total: usize, offset: usize) -> ScalarPoly {
    let mut out = ScalarPoly::zero(total);
    for (m, c) in p.terms() {
        let mut e = vec![0u32; total];
        e[offset..offset + m.dim()].copy_from_slice(m.exponents());
        out.add_term(MultiIndex::new(e), c.clone());
    }
    out
}

/// `p(I(x))`
fn pullback(p: &ScalarPoly, inv: &InvariantSet, n: usize) -> ScalarPoly {
    p.substitute_into(n, &inv.polys(), None)
}

fn aux_from_report(report: &ResonanceReport) -> AuxiliarySet {
    let mut seen: Vec<MultiIndex> = Vec::new();
    let mut entries = Vec::new();
    for r in report.sporadic() {
        if !seen.contains(&r.exponent) {
            seen.push(r.exponent.clone());
            entries.push((r.component, r.exponent.clone()));
        }
    }
    AuxiliarySet { entries }
}

pub fn build_unfolding(nf: &NormalFormResult, report: &ResonanceReport) -> Result<UnfoldedSystem, UnfoldError> {
    if report.spectrum != nf.spectrum {
        return Err(UnfoldError::SpectrumMismatch);
    }
    if !report.basis.is_complete() || report.partition.is_none() {
        return Err(UnfoldError::IncompleteBasis);
    }
    if report.max_degree < nf.order {
        return Err(UnfoldError::ReportTooShort { report: report.max_degree, order: nf.order });
    }
    let s = &nf.spectrum;
    let n = s.dim();
    let basis = &report.basis;
    let inv = build_invariants(basis);
    let aux = aux_from_report(report);
    let (m, r) = (aux.len(), inv.len());
    let field = &nf.normal_form;

    let mut f = poly_matrix(n, n, r);
    let mut k = poly_matrix(n, m, r);
    for (i, mu, c) in field.terms() {
        let (slot, rest) = decompose_x(i, mu, s, basis, &aux)
            .ok_or_else(|| UnfoldError::NoDecomposition { component: i, exponent: mu.clone() })?;
        let e = factor_invariant(&rest, &inv).expect("monoid element");
        match slot {
            Slot::X(j) => f[i][j].add_term(e, c.clone()),
            Slot::W(b) => k[i][b].add_term(e, c.clone()),
        }
    }

    let mut g = poly_matrix(m, m, r);
    let mut g_x = poly_matrix(m, n, r);
    for (a, (i_a, _)) in aux.entries.iter().enumerate() {
        let rate = field.directional_derivative(&aux.poly(a), None);
        for (kappa, c) in rate.terms() {
            let (slot, rest) = decompose_w(a, *i_a, kappa, s, basis, &aux).ok_or_else(|| {
                UnfoldError::NoDecomposition { component: n + a, exponent: kappa.clone() }
            })?;
            let e = factor_invariant(&rest, &inv).expect("monoid element");
            match slot {
                Slot::W(b) => g[a][b].add_term(e, c.clone()),
                Slot::X(j) => g_x[a][j].add_term(e, c.clone()),
            }
        }
    }

    let h = invariant_evolution(field, &inv)?;
    Ok(UnfoldedSystem {
        spectrum: s.clone(),
        invariants: inv,
        auxiliaries: aux,
        f,
        k,
        g,
        g_x,
        h,
        conjugation: s.conjugation(),
    })
}

enum Slot {
    X(usize),
    W(usize),
}

/// x-block route for `x^mu e_i`: first `x_i`, then other `x_j` with the same
/// eigenvalue, then a `w` whose eigenvalue matches, each times an invariant.
fn decompose_x(
    i: usize,
    mu: &MultiIndex,
    s: &Spectrum,
    basis: &InvarianceBasis,
    aux: &AuxiliarySet,
) -> Option<(Slot, MultiIndex)> {
    let n = s.dim();
    let mut order: Vec<usize> = vec![i];
    order.extend((0..n).filter(|&j| j != i && s.get(j) == s.get(i)));
    for j in order {
        if let Some(rest) = mu.checked_sub(&MultiIndex::unit(n, j)) {
            if basis.contains(&rest) {
                return Some((Slot::X(j), rest));
            }
        }
    }
    for (b, (i_b, nu)) in aux.entries.iter().enumerate() {
        if s.get(*i_b) != s.get(i) {
            continue;
        }
        if let Some(rest) = mu.checked_sub(nu) {
            if basis.contains(&rest) {
                return Some((Slot::W(b), rest));
            }
        }
    }
    None
}

/// w-block route for a monomial of `grad R_a . nf`: its own `w_a` first,
/// then other `w` with the same eigenvalue, then an `x_j`.
fn decompose_w(
    a: usize,
    i_a: usize,
    kappa: &MultiIndex,
    s: &Spectrum,
    basis: &InvarianceBasis,
    aux: &AuxiliarySet,
) -> Option<(Slot, MultiIndex)> {
    let n = s.dim();
    let lam = s.get(i_a);
    let mut ws: Vec<usize> = vec![a];
    ws.extend((0..aux.len()).filter(|&b| b != a && s.get(aux.entries[b].0) == lam));
    for b in ws {
        if let Some(rest) = kappa.checked_sub(&aux.entries[b].1) {
            if basis.contains(&rest) {
                return Some((Slot::W(b), rest));
            }
        }
    }
    for j in (0..n).filter(|&j| s.get(j) == lam) {
        if let Some(rest) = kappa.checked_sub(&MultiIndex::unit(n, j)) {
            if basis.contains(&rest) {
                return Some((Slot::X(j), rest));
            }
        }
    }
    None
}

/// Nonzero back-substitution residual, located by block and entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub block: Block,
    pub row: usize,
    pub poly: ScalarPoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    X,
    W,
    Phi,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnfoldingCheck {
    pub residuals: Vec<Residual>,
}

impl UnfoldingCheck {
    pub fn ok(&self) -> bool {
        self.residuals.is_empty()
    }
}

/// Substitutes `w = R(x)`, `phi = I(x)` and compares each block with the
/// normal form, `grad R . nf` and `grad I . nf`.
pub fn verify_unfolding(u: &UnfoldedSystem, nf: &PolyVectorField) -> UnfoldingCheck {
    let n = u.n();
    let inv = &u.invariants;
    let rs = u.auxiliaries.polys();
    let xs: Vec<ScalarPoly> = (0..n).map(|k| ScalarPoly::var(n, k)).collect();
    let mut out = UnfoldingCheck::default();
    let mut push = |block, row, p: ScalarPoly| {
        if !p.is_zero() {
            out.residuals.push(Residual { block, row, poly: p });
        }
    };
    for i in 0..n {
        let mut acc = ScalarPoly::zero(n);
        for j in 0..n {
            acc = &acc + &pullback(&u.f[i][j], inv, n).mul_truncated(&xs[j], None);
        }
        for (b, r) in rs.iter().enumerate() {
            acc = &acc + &pullback(&u.k[i][b], inv, n).mul_truncated(r, None);
        }
        push(Block::X, i, &acc - nf.component(i));
    }
    for (a, ra) in rs.iter().enumerate() {
        let mut acc = ScalarPoly::zero(n);
        for (b, rb) in rs.iter().enumerate() {
            acc = &acc + &pullback(&u.g[a][b], inv, n).mul_truncated(rb, None);
        }
        for j in 0..n {
            acc = &acc + &pullback(&u.g_x[a][j], inv, n).mul_truncated(&xs[j], None);
        }
        push(Block::W, a, &acc - &nf.directional_derivative(ra, None));
    }
    for a in 0..u.r() {
        let lhs = pullback(&u.h[a], inv, n);
        push(Block::Phi, a, &lhs - &nf.directional_derivative(&inv.poly(a), None));
    }
    out
}

// ---------------------------------------------------------------------------
// Orbit-space fixed points.

/// Dense univariate polynomial over Q, lowest coefficient first, trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly(Vec<BigRational>);

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Self(c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    /// `(quotient, remainder)`
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.0.clone();
        let dd = d.0.len() - 1;
        if r.len() < d.0.len() {
            return (UPoly::new(Vec::new()), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / d.lead();
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] = &r[k + j] - &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.lead().clone();
        UPoly::new(a.0.iter().map(|c| c / &l).collect())
    }

    fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sturm_chain(&self) -> Vec<UPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let k = chain.len();
            let r = chain[k - 2].div_rem(&chain[k - 1]).1.neg();
            chain.push(r);
        }
        chain.pop();
        chain
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_roots(chain: &[UPoly], a: &BigRational, b: &BigRational) -> usize {
        sign_changes(chain, a) - sign_changes(chain, b)
    }
}

fn sign_changes(chain: &[UPoly], x: &BigRational) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let v = n.abs().to_u64()?;
    if v > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Rational roots (distinct), via the rational root theorem. `None` when the
/// coefficients are too large to enumerate divisors.
pub fn rational_roots(p: &UPoly) -> Option<Vec<BigRational>> {
    if p.is_zero() {
        return Some(Vec::new());
    }
    let lcm = p.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.0.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let mut out = Vec::new();
    let shift = ints.iter().position(|c| !c.is_zero()).unwrap();
    if shift > 0 {
        out.push(BigRational::zero());
    }
    let core = &ints[shift..];
    if core.len() > 1 {
        let ps = divisors(&core[0])?;
        let qs = divisors(core.last().unwrap())?;
        for pp in &ps {
            for qq in &qs {
                for sign in [1, -1] {
                    let cand = BigRational::new(pp * BigInt::from(sign), qq.clone());
                    if !out.contains(&cand) && p.eval(&cand).is_zero() {
                        out.push(cand);
                    }
                }
            }
        }
    }
    out.sort();
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootLocation {
    Exact(BigRational),
    /// Exactly one root in `(lo, hi)`, irrational.
    Interval(BigRational, BigRational),
}

impl RootLocation {
    pub fn approx(&self) -> f64 {
        match self {
            RootLocation::Exact(r) => crate::algebra::ratio_to_f64(r),
            RootLocation::Interval(a, b) => crate::algebra::ratio_to_f64(&((a + b) / BigRational::from_integer(2.into()))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Degenerate,
}

/// `F(phi*)` (and the other blocks) frozen at a fixed point.
#[derive(Debug, Clone, PartialEq)]
pub enum FrozenSystem {
    Exact { f: ExactMatrix, k: ExactMatrix, g: ExactMatrix, g_x: ExactMatrix },
    Approximate { f: Vec<Vec<Complex64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub location: Vec<RootLocation>,
    pub stability: Stability,
    pub frozen: FrozenSystem,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Asymptotics {
    /// Isolated orbit-space fixed points.
    Points(Vec<FixedPoint>),
    /// `h` vanishes identically: every admissible `phi` is fixed.
    Continuum,
    /// No invariants: the normal form is linear with constant coefficients.
    NoOrbitSpace { frozen: FrozenSystem },
}

fn real_upoly(p: &ScalarPoly) -> Result<UPoly, UnfoldError> {
    let deg = p.degree_max().unwrap_or(0) as usize;
    let mut c = vec![BigRational::zero(); deg + 1];
    for (m, v) in p.terms() {
        if !v.is_real() {
            return Err(UnfoldError::NonReal);
        }
        c[m.get(0) as usize] = v.re().clone();
    }
    Ok(UPoly::new(c))
}

fn freeze(u: &UnfoldedSystem, phi: &[GaussianRational]) -> FrozenSystem {
    let eval = |mat: &PolyMatrix, rows: usize, cols: usize| {
        let mut out = ExactMatrix::zeros(rows, cols);
        for (i, row) in mat.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                out.set(i, j, p.evaluate_exact(phi));
            }
        }
        out
    };
    let (n, m) = (u.n(), u.m());
    FrozenSystem::Exact {
        f: eval(&u.f, n, n),
        k: eval(&u.k, n, m),
        g: eval(&u.g, m, m),
        g_x: eval(&u.g_x, m, n),
    }
}

fn freeze_approx(u: &UnfoldedSystem, phi: &[Complex64]) -> FrozenSystem {
    FrozenSystem::Approximate { f: u.f.iter().map(|row| row.iter().map(|p| p.evaluate(phi)).collect()).collect() }
}

const ISOLATION_WIDTH: f64 = 1e-12;

/// Fixed points of the orbit-space field and the frozen linear systems.
/// With more than one invariant a candidate point must be supplied.
pub fn asymptotic_linearization(
    u: &UnfoldedSystem,
    point: Option<&[GaussianRational]>,
) -> Result<Asymptotics, UnfoldError> {
    let r = u.r();
    if r == 0 {
        return Ok(Asymptotics::NoOrbitSpace { frozen: freeze(u, &[]) });
    }
    if let Some(p) = point {
        return fixed_point_at(u, p).map(|fp| Asymptotics::Points(vec![fp]));
    }
    if r > 1 {
        return Err(UnfoldError::NeedFixedPoint(r));
    }
    let h = real_upoly(&u.h[0])?;
    if h.is_zero() {
        return Ok(Asymptotics::Continuum);
    }
    let nonneg = u.is_square_norm(0);
    let dh = h.derivative();
    let mut points = Vec::new();
    let rational = rational_roots(&h).unwrap_or_default();
    for root in &rational {
        if nonneg && root.is_negative() {
            continue;
        }
        let slope = dh.eval(root);
        let stability = stability_from_sign(&slope);
        let phi = [GaussianRational::real(root.clone())];
        points.push(FixedPoint { location: vec![RootLocation::Exact(root.clone())], stability, frozen: freeze(u, &phi) });
    }
    // Remove rational roots, then isolate what is left.
    let mut rest = h.clone();
    for root in &rational {
        let lin = UPoly::new(vec![-root.clone(), BigRational::one()]);
        loop {
            let (q, rem) = rest.div_rem(&lin);
            if !rem.is_zero() {
                break;
            }
            rest = q;
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        let sqf = rest.div_rem(&rest.gcd(&rest.derivative())).0;
        let repeated = h.gcd(&dh);
        let chain = sqf.sturm_chain();
        let bound = cauchy_bound(&sqf);
        let lo = if nonneg { BigRational::zero() } else { -bound.clone() };
        for (a, b) in isolate(&chain, lo, bound) {
            let multiple = repeated.degree().unwrap_or(0) > 0
                && UPoly::count_roots(&repeated.sturm_chain(), &a, &b) > 0;
            let (a, b, stability) = if multiple {
                (a, b, Stability::Degenerate)
            } else {
                certify_slope(&chain, &dh, a, b)
            };
            let loc = RootLocation::Interval(a, b);
            let phi = [Complex64::new(loc.approx(), 0.0)];
            points.push(FixedPoint { location: vec![loc], stability, frozen: freeze_approx(u, &phi) });
        }
    }
    points.sort_by(|x, y| x.location[0].approx().total_cmp(&y.location[0].approx()));
    Ok(Asymptotics::Points(points))
}

fn stability_from_sign(v: &BigRational) -> Stability {
    if v.is_negative() {
        Stability::Stable
    } else if v.is_positive() {
        Stability::Unstable
    } else {
        Stability::Degenerate
    }
}

fn cauchy_bound(p: &UPoly) -> BigRational {
    let lead = p.lead().abs();
    let m = p.0.iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    m + BigRational::one()
}

/// Intervals `(a, b]` that each contain exactly one root of the chain's head.
fn isolate(chain: &[UPoly], lo: BigRational, hi: BigRational) -> Vec<(BigRational, BigRational)> {
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi)];
    let two = BigRational::from_integer(2.into());
    while let Some((a, b)) = stack.pop() {
        match UPoly::count_roots(chain, &a, &b) {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let mid = (&a + &b) / &two;
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    out.sort();
    out
}

/// Shrinks `(a, b]` until `h'` has no root inside, then reads its sign.
fn certify_slope(
    chain: &[UPoly],
    dh: &UPoly,
    mut a: BigRational,
    mut b: BigRational,
) -> (BigRational, BigRational, Stability) {
    let dchain = dh.sturm_chain();
    let two = BigRational::from_integer(2.into());
    loop {
        let narrow = crate::algebra::ratio_to_f64(&(&b - &a)) < ISOLATION_WIDTH;
        if UPoly::count_roots(&dchain, &a, &b) == 0 && !dh.eval(&b).is_zero() && narrow {
            let st = stability_from_sign(&dh.eval(&b));
            return (a, b, st);
        }
        let mid = (&a + &b) / &two;
        if UPoly::count_roots(chain, &a, &mid) == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
}

fn fixed_point_at(u: &UnfoldedSystem, p: &[GaussianRational]) -> Result<FixedPoint, UnfoldError> {
    let r = u.r();
    if p.len() != r {
        return Err(UnfoldError::PointDimension { got: p.len(), want: r });
    }
    if u.h.iter().any(|h| !h.evaluate_exact(p).is_zero()) {
        return Err(UnfoldError::NotFixed);
    }
    let mut jac = ExactMatrix::zeros(r, r);
    for a in 0..r {
        for b in 0..r {
            jac.set(a, b, u.h[a].derivative(b).evaluate_exact(p));
        }
    }
    if !jac.is_real() {
        return Err(UnfoldError::NonReal);
    }
    Ok(FixedPoint {
        location: p.iter().map(|v| RootLocation::Exact(v.re().clone())).collect(),
        stability: routh_hurwitz(&jac),
        frozen: freeze(u, p),
    })
}

/// Stability of `phi' = J phi` from the Routh array of `det(t I - J)`.
pub fn routh_hurwitz(jac: &ExactMatrix) -> Stability {
    // det(I - zJ) reversed gives det(tI - J) up to ordering.
    let c: Vec<BigRational> = jac.det_one_minus_z().iter().map(|v| v.re().clone()).collect();
    // Roots all in the closed left half plane force non-negative coefficients.
    if c.iter().any(Signed::is_negative) {
        return Stability::Unstable;
    }
    if c.last().is_some_and(Zero::is_zero) {
        return Stability::Degenerate;
    }
    // Highest power first: t^r + c1 t^{r-1} + ... + c_r.
    let mut rows: Vec<Vec<BigRational>> = vec![
        c.iter().step_by(2).cloned().collect(),
        c.iter().skip(1).step_by(2).cloned().collect(),
    ];
    let len = rows[0].len();
    for row in &mut rows {
        row.resize(len, BigRational::zero());
    }
    for _ in 2..c.len() {
        let k = rows.len();
        let (top, bot) = (&rows[k - 2], &rows[k - 1]);
        if bot[0].is_zero() {
            return Stability::Degenerate;
        }
        let mut next = vec![BigRational::zero(); len];
        for j in 0..len - 1 {
            next[j] = (&bot[0] * &top[j + 1] - &top[0] * &bot[j + 1]) / &bot[0];
        }
        rows.push(next);
    }
    let first: Vec<&BigRational> = rows.iter().take(c.len()).map(|r| &r[0]).collect();
    if first.iter().any(|v| v.is_zero()) {
        return Stability::Degenerate;
    }
    if first.iter().all(|v| v.is_positive()) {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

/// Groups the x-block entries of `F` by individual invariants, for reports.
pub fn support_of(u: &UnfoldedSystem) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for (i, row) in u.f.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if !p.is_zero() {
                out.insert((i, j), p.num_terms());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::analyze;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sturm_counts_sqrt_two() {
        let p = UPoly::new(vec![rat(-2, 1), rat(0, 1), rat(1, 1)]);
        let chain = p.sturm_chain();
        assert_eq!(UPoly::count_roots(&chain, &rat(-10, 1), &rat(10, 1)), 2);
        assert_eq!(UPoly::count_roots(&chain, &rat(0, 1), &rat(10, 1)), 1);
        assert_eq!(rational_roots(&p).unwrap(), Vec::<BigRational>::new());
    }

    #[test]
    fn rational_roots_found() {
        // 2 t^3 - 3 t^2 + t = t (2t - 1)(t - 1)
        let p = UPoly::new(vec![rat(0, 1), rat(1, 1), rat(-3, 1), rat(2, 1)]);
        assert_eq!(rational_roots(&p).unwrap(), vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
    }

    #[test]
    fn routh_two_by_two() {
        let stable = ExactMatrix::from_i64(&[&[-1, 2], &[-2, -1]]);
        assert_eq!(routh_hurwitz(&stable), Stability::Stable);
        let saddle = ExactMatrix::from_i64(&[&[1, 0], &[0, -1]]);
        assert_eq!(routh_hurwitz(&saddle), Stability::Unstable);
        let center = ExactMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(routh_hurwitz(&center), Stability::Degenerate);
    }

    #[test]
    fn example_one_unfolding() {
        let s = Spectrum::parse(&["1", "2"]);
        let mut nf = PolyVectorField::diagonal(s.eigenvalues());
        let c = GaussianRational::ratio(3, 2);
        nf.add_term(1, MultiIndex::new(vec![2, 0]), c.clone());
        let r = NormalFormResult::already_normal(&nf, &s, 3).unwrap();
        let rep = analyze(&s, 3, 16).unwrap();
        let u = build_unfolding(&r, &rep).unwrap();
        assert_eq!(u.m(), 1);
        assert_eq!(u.r(), 0);
        assert_eq!(u.k[1][0], ScalarPoly::constant(0, c));
        assert_eq!(u.g[0][0], ScalarPoly::constant(0, GaussianRational::from_int(2)));
        assert!(verify_unfolding(&u, &nf).ok());
        let mut bad = u.clone();
        bad.g[0][0] = ScalarPoly::constant(0, GaussianRational::from_int(3));
        let chk = verify_unfolding(&bad, &nf);
        assert_eq!(chk.residuals.len(), 1);
        assert_eq!((chk.residuals[0].block, chk.residuals[0].row), (Block::W, 0));
    }
}
