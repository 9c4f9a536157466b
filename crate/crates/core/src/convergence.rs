//! Convergence diagnostics for the normalizing transformation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{ExactMatrix, GaussianRational, MultiIndex, PolyVectorField, ScalarPoly};
use crate::normalform::{centralizer_decompose, condition_alpha, decomposition_basis, NormalFormResult};
use crate::resonance::Spectrum;
use crate::symmetry::joint_centralizer;

/// Signed area `cross(b - a, c - a)`.
fn orient(a: &(BigRational, BigRational), b: &(BigRational, BigRational), c: &(BigRational, BigRational)) -> BigRational {
    (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0)
}

/// True when the convex hull of the eigenvalues (as points of the plane)
/// excludes the origin.
pub fn poincare_criterion(s: &Spectrum) -> bool {
    let pts: Vec<(BigRational, BigRational)> =
        s.eigenvalues().iter().map(|e| (e.re().clone(), e.im().clone())).collect();
    let o = (BigRational::zero(), BigRational::zero());
    if pts.iter().any(|p| p.0.is_zero() && p.1.is_zero()) {
        return false;
    }
    for (k, a) in pts.iter().enumerate() {
        for b in &pts[k + 1..] {
            let cross = &a.0 * &b.1 - &a.1 * &b.0;
            let dot = &a.0 * &b.0 + &a.1 * &b.1;
            if cross.is_zero() && !dot.is_positive() {
                return false;
            }
        }
    }
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            for c in b + 1..pts.len() {
                let (p, q, r) = (&pts[a], &pts[b], &pts[c]);
                if orient(p, q, r).is_zero() {
                    continue;
                }
                let s1 = orient(p, q, &o);
                let s2 = orient(q, r, &o);
                let s3 = orient(r, p, &o);
                let all_nonneg = !s1.is_negative() && !s2.is_negative() && !s3.is_negative();
                let all_nonpos = !s1.is_positive() && !s2.is_positive() && !s3.is_positive();
                if all_nonneg || all_nonpos {
                    return false;
                }
            }
        }
    }
    true
}

/// Data for one `k` of the small-divisor condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaTerm {
    pub k: u32,
    /// `omega_k^2`; `None` when `1 < |q| < 2^k` is empty.
    pub omega_sq: Option<BigRational>,
}

impl OmegaTerm {
    /// `2^{-k} log(1/omega_k)`, in floating point.
    pub fn term(&self) -> f64 {
        match &self.omega_sq {
            None => 0.0,
            Some(w) => 0.0 - 0.5 * crate::algebra::ratio_to_f64(w).ln() / 2f64.powi(self.k as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaReport {
    pub terms: Vec<OmegaTerm>,
    pub partial_sums: Vec<f64>,
    /// Every nonzero `|q . lambda - lambda_j|^2` is at least `1/D^2` for the
    /// common denominator `D` of the spectrum.
    pub lattice_bound_sq: BigRational,
}

pub const OMEGA_COST_WARNING_K: u32 = 6;

pub fn condition_omega_partial(s: &Spectrum, k_max: u32) -> OmegaReport {
    let n = s.dim();
    let denom = s
        .eigenvalues()
        .iter()
        .fold(BigInt::one(), |acc, e| acc.lcm(e.re().denom()).lcm(e.im().denom()));
    let scaled = |r: &BigRational| -> i128 {
        (r * BigRational::from_integer(denom.clone())).to_integer().to_i128().expect("spectrum too large")
    };
    let re: Vec<i128> = s.eigenvalues().iter().map(|e| scaled(e.re())).collect();
    let im: Vec<i128> = s.eigenvalues().iter().map(|e| scaled(e.im())).collect();
    let d2 = BigRational::from_integer(&denom * &denom);

    let mut best: Option<i128> = None;
    let mut terms = Vec::new();
    let mut checked_deg = 1u32;
    for k in 1..=k_max {
        let hi = (1u64 << k.min(62)) - 1;
        let hi = hi.min(u32::MAX as u64) as u32;
        for deg in checked_deg + 1..=hi {
            for q in MultiIndex::of_degree(n, deg) {
                let (mut x, mut y) = (0i128, 0i128);
                for (k2, &e) in q.exponents().iter().enumerate() {
                    x += re[k2] * e as i128;
                    y += im[k2] * e as i128;
                }
                for j in 0..n {
                    let (dx, dy) = (x - re[j], y - im[j]);
                    let v = dx * dx + dy * dy;
                    if v != 0 && best.is_none_or(|b| v < b) {
                        best = Some(v);
                    }
                }
            }
        }
        checked_deg = checked_deg.max(hi);
        terms.push(OmegaTerm {
            k,
            omega_sq: best.map(|b| BigRational::from_integer(BigInt::from(b)) / &d2),
        });
    }
    let mut acc = 0.0;
    let partial_sums = terms
        .iter()
        .map(|t| {
            acc += t.term();
            acc
        })
        .collect();
    OmegaReport { terms, partial_sums, lattice_bound_sq: BigRational::one() / d2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisStatus {
    Established,
    Refuted,
    Undecidable,
    NotApplicable,
}

impl fmt::Display for HypothesisStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HypothesisStatus::Established => "established",
            HypothesisStatus::Refuted => "refuted",
            HypothesisStatus::Undecidable => "undecidable",
            HypothesisStatus::NotApplicable => "not applicable",
        })
    }
}

/// Which convergence result an advisory belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvisoryKind {
    /// Eigenvalue hull excludes the origin.
    PoincareDomain,
    /// Normal form proportional to its linear part, `(1 + alpha) A x`.
    AlphaNormalForm,
    /// Symmetry whose linear part lies in a Poincare domain.
    SymmetryPoincare,
    /// Symmetry with linear part `k A`.
    ProportionalSymmetry,
    /// The only solutions `S` of `{F, S} = 0` are multiples of `F`.
    TrivialCommutant,
}

impl AdvisoryKind {
    pub fn key(&self) -> &'static str {
        match self {
            AdvisoryKind::PoincareDomain => "poincare-domain",
            AdvisoryKind::AlphaNormalForm => "alpha-normal-form",
            AdvisoryKind::SymmetryPoincare => "symmetry-poincare-domain",
            AdvisoryKind::ProportionalSymmetry => "proportional-symmetry",
            AdvisoryKind::TrivialCommutant => "trivial-commutant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Advisory {
    pub kind: AdvisoryKind,
    pub status: HypothesisStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub poincare_domain: bool,
    pub condition_alpha: Option<ScalarPoly>,
    pub omega: OmegaReport,
    pub advisories: Vec<Advisory>,
    /// Poincare domain implies an empty invariance basis.
    pub cross_check_ok: bool,
}

impl ConvergenceReport {
    pub fn advisory(&self, kind: AdvisoryKind) -> Option<&Advisory> {
        self.advisories.iter().find(|a| a.kind == kind)
    }
}

/// Optional symmetry input: the linear part `B` of a symmetry field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryData {
    pub linear_part: ExactMatrix,
}

fn proportional(b: &ExactMatrix, a: &ExactMatrix) -> Option<GaussianRational> {
    let mut ratio: Option<GaussianRational> = None;
    for (x, y) in b.entries().iter().zip(a.entries()) {
        if y.is_zero() {
            if !x.is_zero() {
                return None;
            }
            continue;
        }
        let r = x / y;
        match &ratio {
            None => ratio = Some(r),
            Some(prev) if *prev == r => {}
            Some(_) => return None,
        }
    }
    Some(ratio.unwrap_or_else(GaussianRational::zero))
}

pub fn convergence_report(nf: &NormalFormResult, sym: Option<&SymmetryData>, k_max: u32) -> ConvergenceReport {
    let s = &nf.spectrum;
    let poincare_domain = poincare_criterion(s);
    let alpha = condition_alpha(nf);
    let omega = condition_omega_partial(s, k_max);
    let basis_empty = crate::resonance::invariance_basis(s).map(|b| b.is_complete() && b.is_empty()).unwrap_or(false);
    let mut advisories = Vec::new();

    advisories.push(Advisory {
        kind: AdvisoryKind::PoincareDomain,
        status: if poincare_domain { HypothesisStatus::Established } else { HypothesisStatus::Refuted },
        detail: if poincare_domain {
            "eigenvalue hull excludes 0: convergent normalizing transformation".into()
        } else {
            "eigenvalue hull contains 0".into()
        },
    });
    advisories.push(Advisory {
        kind: AdvisoryKind::AlphaNormalForm,
        status: if alpha.is_some() { HypothesisStatus::Established } else { HypothesisStatus::Refuted },
        detail: match &alpha {
            Some(_) => format!("normal form is (1 + alpha) A x through degree {}", nf.order),
            None => format!("normal form is not (1 + alpha) A x at degree {}", nf.order),
        },
    });

    let a = nf.normal_form.linear_part();
    match sym {
        None => {
            advisories.push(Advisory {
                kind: AdvisoryKind::SymmetryPoincare,
                status: HypothesisStatus::NotApplicable,
                detail: "no symmetry supplied".into(),
            });
            advisories.push(Advisory {
                kind: AdvisoryKind::ProportionalSymmetry,
                status: HypothesisStatus::NotApplicable,
                detail: "no symmetry supplied".into(),
            });
        }
        Some(sd) => {
            let b = &sd.linear_part;
            let (status, detail) = if !b.is_diagonal() {
                (HypothesisStatus::Undecidable, "symmetry linear part is not diagonal in these coordinates".to_string())
            } else {
                match Spectrum::new(b.diag()) {
                    Ok(sb) if poincare_criterion(&sb) => {
                        (HypothesisStatus::Established, format!("spectrum {sb} of B is in a Poincare domain"))
                    }
                    Ok(sb) => (HypothesisStatus::Refuted, format!("spectrum {sb} of B is not in a Poincare domain")),
                    Err(_) => (HypothesisStatus::Refuted, "B = 0".to_string()),
                }
            };
            advisories.push(Advisory { kind: AdvisoryKind::SymmetryPoincare, status, detail });
            let (status, detail) = match proportional(b, &a) {
                Some(k) => (HypothesisStatus::Established, format!("B = ({k}) A")),
                None => (HypothesisStatus::Refuted, "B is not a multiple of A".to_string()),
            };
            advisories.push(Advisory { kind: AdvisoryKind::ProportionalSymmetry, status, detail });
        }
    }
    advisories.push(trivial_commutant(nf));

    ConvergenceReport {
        poincare_domain,
        condition_alpha: alpha,
        omega,
        advisories,
        cross_check_ok: !poincare_domain || basis_empty,
    }
}

/// Solves `{F, S} = 0` for `S = sum_j nu_j(x) M_j x`, `nu_j` invariant with
/// `nu_j(0) = 0`, over all degrees `2..=order`. A one-dimensional solution
/// space spanned by `F` is evidence at the truncation degree; anything else is
/// not decidable from a truncated normal form.
fn trivial_commutant(nf: &NormalFormResult) -> Advisory {
    let kind = AdvisoryKind::TrivialCommutant;
    let n = nf.dim();
    let s = &nf.spectrum;
    let a_s = ExactMatrix::diagonal(s.eigenvalues());
    let basis = decomposition_basis(&a_s, &joint_centralizer(std::slice::from_ref(&a_s)));
    let others = &basis[1..];
    if others.is_empty() {
        return Advisory { kind, status: HypothesisStatus::NotApplicable, detail: "centralizer is spanned by A".into() };
    }
    let mus = match centralizer_decompose(nf, &basis) {
        Ok(m) => m,
        Err(e) => return Advisory { kind, status: HypothesisStatus::Undecidable, detail: e.to_string() },
    };
    let f_hat = crate::normalform::recompose(&mus[1..], others);
    if f_hat.is_zero() {
        return Advisory {
            kind,
            status: HypothesisStatus::NotApplicable,
            detail: "no component outside the A direction".into(),
        };
    }
    let mut cols: Vec<PolyVectorField> = Vec::new();
    for m in others {
        let lf = PolyVectorField::linear(m);
        for d in 1..nf.order {
            for sig in MultiIndex::of_degree(n, d) {
                if s.dot(&sig).is_zero() {
                    let mono = ScalarPoly::monomial(sig, GaussianRational::one());
                    cols.push(lf.map_components(|p| p.mul_truncated(&mono, None)));
                }
            }
        }
    }
    let brackets: Vec<PolyVectorField> = cols
        .iter()
        .map(|c| PolyVectorField::lie_poisson(&f_hat, c).expect("same dimension"))
        .collect();
    let kernel = kernel_of_fields(&brackets);
    let dim = kernel.len();
    let spans_f = dim == 1 && {
        let sol = combine(&cols, &kernel[0]);
        fields_proportional(&sol, &f_hat.tail(2))
    };
    if spans_f {
        Advisory {
            kind,
            status: HypothesisStatus::Established,
            detail: format!("solutions are multiples of F at degree {}", nf.order),
        }
    } else {
        Advisory {
            kind,
            status: HypothesisStatus::Undecidable,
            detail: format!("{dim}-dimensional solution space at degree {}", nf.order),
        }
    }
}

fn kernel_of_fields(fs: &[PolyVectorField]) -> Vec<Vec<GaussianRational>> {
    let mut keys: Vec<(usize, MultiIndex)> =
        fs.iter().flat_map(|f| f.terms().map(|(i, m, _)| (i, m.clone()))).collect();
    keys.sort();
    keys.dedup();
    if keys.is_empty() {
        return (0..fs.len())
            .map(|k| {
                let mut v = vec![GaussianRational::zero(); fs.len()];
                v[k] = GaussianRational::one();
                v
            })
            .collect();
    }
    let mut mat = ExactMatrix::zeros(keys.len(), fs.len());
    for (c, f) in fs.iter().enumerate() {
        for (i, m, v) in f.terms() {
            let r = keys.binary_search(&(i, m.clone())).expect("key present");
            mat.set(r, c, v.clone());
        }
    }
    mat.nullspace()
}

fn combine(cols: &[PolyVectorField], coeffs: &[GaussianRational]) -> PolyVectorField {
    let mut acc = PolyVectorField::zero(cols[0].dim());
    for (c, k) in cols.iter().zip(coeffs) {
        if !k.is_zero() {
            acc = &acc + &c.scale(k);
        }
    }
    acc
}

fn fields_proportional(a: &PolyVectorField, b: &PolyVectorField) -> bool {
    let Some((i, m, c)) = b.terms().next() else {
        return a.is_zero();
    };
    let ka = a.component(i).coeff(m);
    if ka.is_zero() {
        return false;
    }
    let r = &ka / c;
    *a == b.scale(&r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poincare_cases() {
        assert!(poincare_criterion(&Spectrum::parse(&["1", "2"])));
        assert!(!poincare_criterion(&Spectrum::parse(&["-i", "i"])));
        assert!(poincare_criterion(&Spectrum::parse(&["1+1i", "1-1i", "2"])));
        assert!(!poincare_criterion(&Spectrum::parse(&["1", "-1+1i", "-1-1i"])));
        assert!(!poincare_criterion(&Spectrum::parse(&["0", "1"])));
    }

    #[test]
    fn omega_examples() {
        let r = condition_omega_partial(&Spectrum::parse(&["1", "2"]), 3);
        assert_eq!(r.terms[0].omega_sq, None);
        for t in &r.terms[1..] {
            assert_eq!(t.omega_sq, Some(BigRational::one()));
        }
        assert!(r.partial_sums.iter().all(|&x| x == 0.0));
        let r = condition_omega_partial(&Spectrum::parse(&["-i", "i"]), 2);
        assert_eq!(r.terms[1].omega_sq, Some(BigRational::one()));
        let r = condition_omega_partial(&Spectrum::parse(&["1", "1/3"]), 2);
        assert_eq!(r.terms[1].omega_sq, Some(BigRational::new(1.into(), 9.into())));
    }
}
