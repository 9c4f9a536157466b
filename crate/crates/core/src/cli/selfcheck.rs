//! Seeded randomized checks of the exact algebra and the normalizer.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{ExactMatrix, GaussianRational, MultiIndex, PolyVectorField};
use crate::normalform::{homological_apply_matrix, normalize, verify_normal_form};
use crate::resonance::{enumerate_resonances, Resonance, Spectrum};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyTally {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// Case index of the first failure.
    pub first_failure: Option<usize>,
}

impl PropertyTally {
    fn new(name: &'static str) -> Self {
        Self { name, passed: 0, failed: 0, first_failure: None }
    }

    fn record(&mut self, case: usize, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.first_failure.get_or_insert(case);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub properties: Vec<PropertyTally>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(|p| p.failed == 0)
    }
}

const EIGENVALUES: [(i64, i64); 10] = [(1, 0), (2, 0), (3, 0), (-1, 0), (-2, 0), (0, 1), (0, -1), (0, 2), (1, 1), (1, -1)];

pub fn random_coeff(rng: &mut impl Rng) -> GaussianRational {
    let re = GaussianRational::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3));
    if rng.gen_bool(0.3) {
        &re + &(&GaussianRational::ratio(rng.gen_range(-2..=2), rng.gen_range(1..=2)) * &GaussianRational::i())
    } else {
        re
    }
}

/// Sparse field with terms of degree `lo..=hi`.
pub fn random_field(rng: &mut impl Rng, n: usize, lo: u32, hi: u32, terms: usize) -> PolyVectorField {
    let mut f = PolyVectorField::zero(n);
    for _ in 0..terms {
        let d = rng.gen_range(lo..=hi);
        let monos = MultiIndex::of_degree(n, d);
        let m = monos.choose(rng).expect("nonempty").clone();
        f.add_term(rng.gen_range(0..n), m, random_coeff(rng));
    }
    f
}

pub fn random_spectrum(rng: &mut impl Rng, n: usize) -> Spectrum {
    let ev = (0..n)
        .map(|_| {
            let (a, b) = *EIGENVALUES.choose(rng).expect("nonempty");
            GaussianRational::complex(a, 1, b, 1)
        })
        .collect();
    Spectrum::new(ev).expect("nonzero entries")
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ExactMatrix {
    let rows = (0..n).map(|_| (0..n).map(|_| random_coeff(rng)).collect()).collect();
    ExactMatrix::from_rows(rows).expect("square")
}

/// Direct scan of every `x^mu e_i`, `2 <= |mu| <= n`.
pub fn brute_force_resonances(s: &Spectrum, max_degree: u32) -> Vec<Resonance> {
    let mut out = Vec::new();
    for d in 2..=max_degree {
        for m in MultiIndex::of_degree(s.dim(), d) {
            for i in 0..s.dim() {
                let mut acc = -s.get(i);
                for (k, &e) in m.exponents().iter().enumerate() {
                    acc += &(s.get(k) * &GaussianRational::from_int(e as i64));
                }
                if acc == GaussianRational::from_int(0) {
                    out.push(Resonance::new(i, m.clone()));
                }
            }
        }
    }
    out.sort();
    out
}

/// Runs `cases` random instances of every property. Dimension is at most 3
/// and degree at most 4.
pub fn property_suite(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut antisym = PropertyTally::new("lie-poisson antisymmetry");
    let mut jacobi = PropertyTally::new("lie-poisson jacobi identity");
    let mut adjoint = PropertyTally::new("bargman adjointness of L_A and L_A*");
    let mut equiv = PropertyTally::new("normalized tail commutes with A_s x");
    let mut idem = PropertyTally::new("normalize idempotence");
    let mut enumer = PropertyTally::new("resonance enumeration matches brute force");

    for case in 0..cases {
        let n = rng.gen_range(1..=3);
        let f = random_field(&mut rng, n, 1, 4, 3);
        let g = random_field(&mut rng, n, 1, 4, 3);
        let h = random_field(&mut rng, n, 1, 3, 2);
        let fg = PolyVectorField::lie_poisson(&f, &g).expect("dims");
        let gf = PolyVectorField::lie_poisson(&g, &f).expect("dims");
        antisym.record(case, (&fg + &gf).is_zero());
        let br = |a: &PolyVectorField, b: &PolyVectorField| PolyVectorField::lie_poisson(a, b).expect("dims");
        let jac = &(&br(&f, &br(&g, &h)) + &br(&g, &br(&h, &f))) + &br(&h, &br(&f, &g));
        jacobi.record(case, jac.is_zero());

        let a = random_matrix(&mut rng, n);
        let d = rng.gen_range(1..=4);
        let u = random_field(&mut rng, n, d, d, 4);
        let v = random_field(&mut rng, n, d, d, 4);
        let lhs = PolyVectorField::bargman_inner(&homological_apply_matrix(&a, &u), &v).expect("dims");
        let rhs = PolyVectorField::bargman_inner(&u, &homological_apply_matrix(&a.adjoint(), &v)).expect("dims");
        adjoint.record(case, lhs == rhs);

        let s = random_spectrum(&mut rng, n);
        let order = rng.gen_range(2..=4);
        let field = &PolyVectorField::diagonal(s.eigenvalues()) + &random_field(&mut rng, n, 2, order, 4);
        match normalize(&field, &s, order) {
            Ok(r) => {
                let ver = verify_normal_form(&r).expect("dims");
                equiv.record(case, ver.bracket_ok() && ver.ok());
                let again = normalize(&r.normal_form, &s, order).expect("normal form is a valid input");
                idem.record(case, again.normal_form == r.normal_form && again.transform.is_zero());
            }
            Err(_) => {
                equiv.record(case, false);
                idem.record(case, false);
            }
        }
        let deg = rng.gen_range(2..=4);
        enumer.record(case, enumerate_resonances(&s, deg) == brute_force_resonances(&s, deg));
    }
    SuiteReport { seed, cases, properties: vec![antisym, jacobi, adjoint, equiv, idem, enumer] }
}
