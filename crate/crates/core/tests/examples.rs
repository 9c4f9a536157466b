use pdnf_core::algebra::{GaussianRational, MultiIndex, ScalarPoly};
use pdnf_core::cli::{parse_system, prepare, Prepared};
use pdnf_core::resonance::{invariance_basis, Spectrum};
use pdnf_core::symmetry::prune_dependent;

fn load(name: &str) -> Prepared {
    let path = format!("{}/tests/data/{name}.sys", env!("CARGO_MANIFEST_DIR"));
    prepare(&parse_system(&std::fs::read_to_string(path).unwrap()).unwrap(), true).unwrap()
}

/// Minimal nonzero `alpha` with `alpha . lambda = 0`, by scanning every
/// exponent up to `max_degree`.
fn minimal_solutions(s: &Spectrum, max_degree: u32) -> Vec<Vec<u32>> {
    let mut sols: Vec<MultiIndex> = Vec::new();
    for d in 1..=max_degree {
        for m in MultiIndex::of_degree(s.dim(), d) {
            if s.dot(&m) == GaussianRational::from_int(0) && !sols.iter().any(|t| t.le_componentwise(&m)) {
                sols.push(m);
            }
        }
    }
    let mut out: Vec<Vec<u32>> = sols.iter().map(|m| m.exponents().to_vec()).collect();
    out.sort();
    out
}

fn generators(s: &Spectrum) -> Vec<Vec<u32>> {
    let b = invariance_basis(s).unwrap();
    assert!(b.is_complete());
    let mut g: Vec<Vec<u32>> = b.generators().iter().map(|m| m.exponents().to_vec()).collect();
    g.sort();
    g
}

#[test]
fn two_oscillators_one_to_five() {
    let p = load("example2");
    let g = generators(&p.spectrum);
    assert_eq!(g, minimal_solutions(&p.spectrum, 12));
    assert_eq!(g.len(), 4);
    let mut degrees: Vec<u32> = g.iter().map(|e| e.iter().sum()).collect();
    degrees.sort();
    assert_eq!(degrees, vec![2, 2, 6, 6]);
}

#[test]
fn hamiltonian_hopf_basis() {
    let p = load("hamiltonian_hopf");
    let g = generators(&p.spectrum);
    assert_eq!(g, vec![vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
    assert_eq!(g, minimal_solutions(&p.spectrum, 10));
}

#[test]
fn one_to_one_basis_matches_scan() {
    let p = load("example3");
    assert_eq!(generators(&p.spectrum), minimal_solutions(&p.spectrum, 8));
}

fn quad(terms: &[(usize, usize, i64)]) -> ScalarPoly {
    let mut p = ScalarPoly::zero(4);
    for &(a, b, c) in terms {
        let m = &MultiIndex::unit(4, a).add(&MultiIndex::unit(4, b));
        p.add_term(m.clone(), GaussianRational::from_int(c));
    }
    p
}

#[test]
fn exchange_symmetry_on_real_quadratics() {
    let p = load("example4");
    let g = p.group_file.expect("group");
    let rho1 = quad(&[(0, 0, 1), (1, 1, 1)]);
    let rho2 = quad(&[(2, 2, 1), (3, 3, 1)]);
    let rho3 = quad(&[(0, 2, 1), (1, 3, 1)]);
    let rho4 = quad(&[(0, 3, 1), (1, 2, -1)]);
    assert!(g.reynolds_scalar(&rho4).is_zero());
    let averaged: Vec<ScalarPoly> = [&rho1, &rho2, &rho3, &rho4].iter().map(|r| g.reynolds_scalar(r)).collect();
    let expected = vec![&rho1 + &rho2, rho3.clone()];
    assert_eq!(prune_dependent(averaged.clone()).len(), 2);
    assert_eq!(prune_dependent(expected.clone()).len(), 2);
    let mut joint = averaged;
    joint.extend(expected);
    assert_eq!(prune_dependent(joint).len(), 2);
    assert!(g.is_equivariant(&p.field));
}
