//! Resonant monomials, invariance relations and sporadic resonances.
//!
//! Component indices are zero-based in the API and one-based in reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{GaussianRational, MultiIndex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResonanceError {
    #[error("spectrum is identically zero")]
    ZeroSpectrum,
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("eigenvalue data too large for integer constraint rows")]
    Overflow,
    #[error("invariance basis incomplete: completion stopped at degree cap {cap}")]
    IncompleteBasis { cap: u32 },
}

/// The eigenvalues `lambda_1 .. lambda_n` of the semisimple linear part.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Spectrum {
    eigenvalues: Vec<GaussianRational>,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<GaussianRational>) -> Result<Self, ResonanceError> {
        if eigenvalues.is_empty() {
            return Err(ResonanceError::EmptySpectrum);
        }
        if eigenvalues.iter().all(Zero::is_zero) {
            return Err(ResonanceError::ZeroSpectrum);
        }
        Ok(Self { eigenvalues })
    }

    /// Parses each entry with the `a/b+c/di` syntax. Panics on bad input; for
    /// tests and fixed tables.
    pub fn parse(entries: &[&str]) -> Self {
        Self::new(entries.iter().map(|s| s.parse().expect("bad eigenvalue")).collect())
            .expect("bad spectrum")
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[GaussianRational] {
        &self.eigenvalues
    }

    pub fn get(&self, i: usize) -> &GaussianRational {
        &self.eigenvalues[i]
    }

    /// `mu . lambda`
    pub fn dot(&self, mu: &MultiIndex) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (k, &e) in mu.exponents().iter().enumerate() {
            if e > 0 {
                acc += &(&self.eigenvalues[k] * &GaussianRational::from_int(e as i64));
            }
        }
        acc
    }

    /// The small divisor `mu . lambda - lambda_i`.
    pub fn divisor(&self, mu: &MultiIndex, i: usize) -> GaussianRational {
        &self.dot(mu) - &self.eigenvalues[i]
    }

    pub fn is_resonant(&self, mu: &MultiIndex, i: usize) -> bool {
        self.divisor(mu, i).is_zero()
    }

    /// An involution `c` with `lambda_{c(k)} = conj(lambda_k)`, pairing
    /// complex eigenvalues in order of appearance, if one exists.
    pub fn conjugation(&self) -> Option<Vec<usize>> {
        let n = self.dim();
        let mut perm = vec![usize::MAX; n];
        for k in 0..n {
            if perm[k] != usize::MAX {
                continue;
            }
            let ev = &self.eigenvalues[k];
            if ev.is_real() {
                perm[k] = k;
                continue;
            }
            let c = ev.conj();
            let j = (k + 1..n).find(|&j| perm[j] == usize::MAX && self.eigenvalues[j] == c)?;
            perm[k] = j;
            perm[j] = k;
        }
        Some(perm)
    }

    /// Integer rows `A` with `sigma . lambda = 0  <=>  A sigma = 0`:
    /// real and imaginary parts with denominators cleared, zero rows dropped.
    pub fn constraint_rows(&self) -> Result<Vec<Vec<i64>>, ResonanceError> {
        let parts: [Vec<BigRational>; 2] = [
            self.eigenvalues.iter().map(|e| e.re().clone()).collect(),
            self.eigenvalues.iter().map(|e| e.im().clone()).collect(),
        ];
        let mut rows = Vec::new();
        for part in parts {
            if part.iter().all(Zero::is_zero) {
                continue;
            }
            let lcm = part.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            let row = part
                .iter()
                .map(|r| (r * BigRational::from_integer(lcm.clone())).to_integer().to_i64())
                .collect::<Option<Vec<i64>>>()
                .ok_or(ResonanceError::Overflow)?;
            rows.push(row);
        }
        Ok(rows)
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.eigenvalues.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A resonant monomial `x^mu e_i` with `mu . lambda = lambda_i`, `|mu| >= 2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Resonance {
    pub exponent: MultiIndex,
    pub component: usize,
}

impl Resonance {
    pub fn new(component: usize, exponent: MultiIndex) -> Self {
        Self { exponent, component }
    }
}

impl fmt::Display for Resonance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.component + 1, self.exponent)
    }
}

impl fmt::Debug for Resonance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All resonances with `2 <= |mu| <= max_degree`, ordered by exponent
/// (graded-lex) and then by component.
pub fn enumerate_resonances(s: &Spectrum, max_degree: u32) -> Vec<Resonance> {
    let n = s.dim();
    let mut out = Vec::new();
    for d in 2..=max_degree {
        for mu in MultiIndex::of_degree(n, d) {
            let dot = s.dot(&mu);
            for i in 0..n {
                if dot == s.eigenvalues[i] {
                    out.push(Resonance::new(i, mu.clone()));
                }
            }
        }
    }
    out
}

pub const DEFAULT_HILBERT_CAP: u32 = 64;

/// Hilbert basis of the monoid `{sigma in N^n : sigma . lambda = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceBasis {
    dim: usize,
    rows: Vec<Vec<i64>>,
    generators: Vec<MultiIndex>,
    complete: bool,
    cap: u32,
}

impl InvarianceBasis {
    pub fn generators(&self) -> &[MultiIndex] {
        &self.generators
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree_cap(&self) -> u32 {
        self.cap
    }

    /// Membership in the (saturated) monoid, zero included. Exact for a
    /// complete basis because the generators span every solution.
    pub fn contains(&self, sigma: &MultiIndex) -> bool {
        self.rows.iter().all(|row| dot_i64(row, sigma) == 0)
    }

    /// Some nonzero monoid element lies componentwise below `mu`.
    pub fn divides_some(&self, mu: &MultiIndex) -> bool {
        self.generators.iter().any(|g| g.le_componentwise(mu))
    }
}

fn dot_i64(row: &[i64], sigma: &MultiIndex) -> i128 {
    row.iter()
        .zip(sigma.exponents())
        .map(|(&a, &e)| a as i128 * e as i128)
        .sum()
}

/// Completion in the style of Contejean and Devie: grow candidates one unit
/// vector at a time, only in directions that decrease the residual `A v`
/// (`(A v) . (A e_j) < 0`), and discard anything dominating a known solution.
pub fn invariance_basis(s: &Spectrum) -> Result<InvarianceBasis, ResonanceError> {
    invariance_basis_with_cap(s, DEFAULT_HILBERT_CAP)
}

pub fn invariance_basis_with_cap(s: &Spectrum, cap: u32) -> Result<InvarianceBasis, ResonanceError> {
    let rows = s.constraint_rows()?;
    let n = s.dim();
    let columns: Vec<Vec<i128>> = (0..n).map(|j| rows.iter().map(|r| r[j] as i128).collect()).collect();
    let residual = |v: &MultiIndex| -> Vec<i128> { rows.iter().map(|r| dot_i64(r, v)).collect() };

    let mut solutions: Vec<MultiIndex> = Vec::new();
    let mut frontier: BTreeSet<MultiIndex> = (0..n).map(|j| MultiIndex::unit(n, j)).collect();
    let mut degree = 1;
    let mut complete = true;
    while !frontier.is_empty() {
        if degree > cap {
            complete = false;
            break;
        }
        let mut next = BTreeSet::new();
        let mut found = Vec::new();
        for v in &frontier {
            let av = residual(v);
            if av.iter().all(|&x| x == 0) {
                found.push(v.clone());
                continue;
            }
            for (j, col) in columns.iter().enumerate() {
                let inner: i128 = av.iter().zip(col).map(|(a, b)| a * b).sum();
                if inner >= 0 {
                    continue;
                }
                let w = v.add(&MultiIndex::unit(n, j));
                if !solutions.iter().chain(found.iter()).any(|s| s.le_componentwise(&w)) {
                    next.insert(w);
                }
            }
        }
        solutions.extend(found);
        // Candidates generated before a same-level solution was recorded.
        next.retain(|w| !solutions.iter().any(|s| s.le_componentwise(w)));
        frontier = next;
        degree += 1;
    }
    solutions.sort();
    Ok(InvarianceBasis { dim: n, rows, generators: solutions, complete, cap })
}

/// Split of a resonance list into sporadic and reducible entries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SporadicPartition {
    pub sporadic: Vec<Resonance>,
    pub reducible: Vec<Resonance>,
}

/// A resonance is sporadic when no nonzero element of the invariance monoid
/// lies below its exponent. Refuses to classify against an incomplete basis.
pub fn classify_sporadic(res: &[Resonance], basis: &InvarianceBasis) -> Result<SporadicPartition, ResonanceError> {
    if !basis.is_complete() {
        return Err(ResonanceError::IncompleteBasis { cap: basis.cap });
    }
    let mut out = SporadicPartition::default();
    for r in res {
        if basis.divides_some(&r.exponent) {
            out.reducible.push(r.clone());
        } else {
            out.sporadic.push(r.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessReport {
    pub ok: bool,
    /// Components carrying more than one sporadic exponent, with the
    /// exponents found.
    pub violations: Vec<(usize, Vec<MultiIndex>)>,
}

/// At most one sporadic exponent per component. Two distinct sporadic
/// exponents can never differ by a monoid element (the larger one would be
/// reducible), so the check is a plain count per component.
pub fn check_sporadic_uniqueness(sporadic: &[Resonance]) -> UniquenessReport {
    let mut by_comp: BTreeMap<usize, Vec<MultiIndex>> = BTreeMap::new();
    for r in sporadic {
        by_comp.entry(r.component).or_default().push(r.exponent.clone());
    }
    let violations: Vec<_> = by_comp.into_iter().filter(|(_, v)| v.len() > 1).collect();
    UniquenessReport { ok: violations.is_empty(), violations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResonanceReport {
    pub spectrum: Spectrum,
    pub max_degree: u32,
    pub resonances: Vec<Resonance>,
    pub basis: InvarianceBasis,
    /// `None` when the basis is incomplete.
    pub partition: Option<SporadicPartition>,
    pub uniqueness: Option<UniquenessReport>,
    pub finitely_resonant: bool,
}

impl ResonanceReport {
    pub fn resonances_of_degree(&self, d: u32) -> impl Iterator<Item = &Resonance> {
        self.resonances.iter().filter(move |r| r.exponent.degree() == d)
    }

    pub fn sporadic(&self) -> &[Resonance] {
        self.partition.as_ref().map(|p| p.sporadic.as_slice()).unwrap_or(&[])
    }
}

pub fn analyze(s: &Spectrum, max_degree: u32, cap: u32) -> Result<ResonanceReport, ResonanceError> {
    let basis = invariance_basis_with_cap(s, cap)?;
    let resonances = enumerate_resonances(s, max_degree);
    let partition = classify_sporadic(&resonances, &basis).ok();
    let uniqueness = partition.as_ref().map(|p| check_sporadic_uniqueness(&p.sporadic));
    let finitely_resonant = basis.is_complete() && basis.is_empty();
    Ok(ResonanceReport {
        spectrum: s.clone(),
        max_degree,
        resonances,
        basis,
        partition,
        uniqueness,
        finitely_resonant,
    })
}

/// Every resonance of a spectrum whose eigenvalue hull stays a distance `d`
/// away from the origin has `|mu| <= max |lambda_i| / d`. Returns that bound,
/// or `None` when the hull touches the origin.
pub fn resonance_degree_bound(s: &Spectrum) -> Option<u32> {
    let pts: Vec<(f64, f64)> = s
        .eigenvalues
        .iter()
        .map(|e| {
            let z = e.to_complex64();
            (z.re, z.im)
        })
        .collect();
    let mut d = f64::INFINITY;
    for a in &pts {
        for b in &pts {
            d = d.min(segment_distance(*a, *b));
        }
    }
    if d <= 1e-12 || !crate::convergence::poincare_criterion(s) {
        return None;
    }
    let rmax = pts.iter().map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max);
    Some((rmax / d * (1.0 + 1e-9)).floor() as u32)
}

fn segment_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (-(a.0 * dx + a.1 * dy) / len2).clamp(0.0, 1.0) };
    (a.0 + t * dx).hypot(a.1 + t * dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn enumerate_examples() {
        let r = enumerate_resonances(&Spectrum::parse(&["1", "2"]), 3);
        assert_eq!(r, vec![Resonance::new(1, mi(&[2, 0]))]);
        let r = enumerate_resonances(&Spectrum::parse(&["1", "3"]), 4);
        assert_eq!(r, vec![Resonance::new(1, mi(&[3, 0]))]);
        let r = enumerate_resonances(&Spectrum::parse(&["-i", "i"]), 3);
        assert_eq!(r, vec![Resonance::new(0, mi(&[2, 1])), Resonance::new(1, mi(&[1, 2]))]);
    }

    #[test]
    fn basis_examples() {
        assert!(invariance_basis(&Spectrum::parse(&["1", "2"])).unwrap().is_empty());
        let b = invariance_basis(&Spectrum::parse(&["-i", "i"])).unwrap();
        assert_eq!(b.generators(), &[mi(&[1, 1])]);
        assert!(b.is_complete());
        let b = invariance_basis(&Spectrum::parse(&["-i", "i", "-i", "i"])).unwrap();
        let got: BTreeSet<_> = b.generators().iter().cloned().collect();
        let want: BTreeSet<_> =
            [mi(&[1, 1, 0, 0]), mi(&[0, 0, 1, 1]), mi(&[1, 0, 0, 1]), mi(&[0, 1, 1, 0])].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn basis_with_nontrivial_weights() {
        // 2 a = 3 b: minimal solutions (3, 2) only, plus the zero eigenvalue.
        let b = invariance_basis(&Spectrum::parse(&["2", "-3", "0"])).unwrap();
        assert_eq!(b.generators(), &[mi(&[0, 0, 1]), mi(&[3, 2, 0])]);
    }

    #[test]
    fn incomplete_basis_is_flagged() {
        let s = Spectrum::parse(&["7", "-5"]);
        let b = invariance_basis_with_cap(&s, 3).unwrap();
        assert!(!b.is_complete());
        assert!(classify_sporadic(&[], &b).is_err());
        assert_eq!(invariance_basis(&s).unwrap().generators(), &[mi(&[5, 7])]);
    }

    #[test]
    fn classification_examples() {
        let s = Spectrum::parse(&["1", "2"]);
        let b = invariance_basis(&s).unwrap();
        let p = classify_sporadic(&enumerate_resonances(&s, 4), &b).unwrap();
        assert_eq!(p.sporadic, vec![Resonance::new(1, mi(&[2, 0]))]);
        let s = Spectrum::parse(&["-i", "i"]);
        let b = invariance_basis(&s).unwrap();
        let p = classify_sporadic(&[Resonance::new(0, mi(&[2, 1]))], &b).unwrap();
        assert!(p.sporadic.is_empty());
        assert_eq!(p.reducible.len(), 1);
        assert_eq!(classify_sporadic(&[], &b).unwrap(), SporadicPartition::default());
    }

    #[test]
    fn uniqueness_flags_one_two_three() {
        let s = Spectrum::parse(&["1", "2", "3"]);
        let b = invariance_basis(&s).unwrap();
        let p = classify_sporadic(&enumerate_resonances(&s, 3), &b).unwrap();
        let u = check_sporadic_uniqueness(&p.sporadic);
        assert!(!u.ok);
        let third = u.violations.iter().find(|(i, _)| *i == 2).unwrap();
        assert!(third.1.contains(&mi(&[1, 1, 0])) && third.1.contains(&mi(&[3, 0, 0])));
        assert!(check_sporadic_uniqueness(&[Resonance::new(1, mi(&[2, 0]))]).ok);
        assert!(check_sporadic_uniqueness(&[]).ok);
    }

    #[test]
    fn conjugation_pairs() {
        assert_eq!(Spectrum::parse(&["-i", "i"]).conjugation(), Some(vec![1, 0]));
        assert_eq!(Spectrum::parse(&["1", "2"]).conjugation(), Some(vec![0, 1]));
        assert_eq!(Spectrum::parse(&["i", "2"]).conjugation(), None);
    }

    #[test]
    fn zero_spectrum_rejected() {
        assert_eq!(Spectrum::new(vec![GaussianRational::zero()]).unwrap_err(), ResonanceError::ZeroSpectrum);
    }
}
