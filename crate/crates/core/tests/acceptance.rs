//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pdnf_core::algebra::{ExactMatrix, GaussianRational, MultiIndex, PolyVectorField, ScalarPoly};
use pdnf_core::cli::selfcheck::{property_suite, random_field};
use pdnf_core::cli::{normal_form_of, parse_system, prepare, Prepared};
use pdnf_core::convergence::poincare_criterion;
use pdnf_core::normalform::normalize;
use pdnf_core::numerics::{integrate_complex, orbit_space_demo, phase_velocity, truncation_scaling, ScalingFit};
use pdnf_core::resonance::{analyze, invariance_basis, Spectrum, DEFAULT_HILBERT_CAP};
use pdnf_core::symmetry::{
    covariant_dimension, gradient_property_check, invariant_dimension, joint_centralizer, molien_coefficients,
    z3_generator, FiniteGroup,
};
use pdnf_core::unfold::{asymptotic_linearization, build_unfolding, verify_unfolding, Asymptotics, RootLocation};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn load(name: &str) -> Prepared {
    let path = format!("{}/tests/data/{name}.sys", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    prepare(&parse_system(&text).expect("parse"), true).expect("prepare")
}

fn q(n: i64, d: i64) -> GaussianRational {
    GaussianRational::ratio(n, d)
}

/// Coefficient of `x1^k e2` in the degree-`k` normal form of
/// `diag(1, k) x + f2 + f3 + ...`, from the conjugacy equation: zero for the
/// quadratic step when `k = 3`, giving `[f3 + Df2 . h2]` with
/// `h2 = f2 / (mu . lambda - lambda_i)`.
fn resonant_coefficient_oracle(pert: &PolyVectorField, k: u32) -> GaussianRational {
    let lam = [q(1, 1), GaussianRational::from_int(k as i64)];
    let target = MultiIndex::new(vec![k, 0]);
    let direct = pert.component(1).coeff(&target);
    if k == 2 {
        return direct;
    }
    let f2 = pert.homogeneous_part(2);
    let mut h2 = PolyVectorField::zero(2);
    for (i, m, c) in f2.terms() {
        let div = &(&(&lam[0] * &GaussianRational::from_int(m.get(0) as i64))
            + &(&lam[1] * &GaussianRational::from_int(m.get(1) as i64)))
            - &lam[i];
        h2.add_term(i, m.clone(), c / &div);
    }
    let mut acc = ScalarPoly::zero(2);
    for j in 0..2 {
        acc = &acc + &f2.component(1).derivative(j).mul_truncated(h2.component(j), None);
    }
    &direct + &acc.coeff(&target)
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    let mut degenerate = 0;
    for k in [2u32, 3] {
        let s = Spectrum::new(vec![q(1, 1), GaussianRational::from_int(k as i64)]).unwrap();
        let mut seed = 0u64;
        while cases < 8 * (k as usize - 1) {
            seed += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * k as u64 + seed);
            let mut pert = random_field(&mut rng, 2, 2, k, 8);
            pert.add_term(1, MultiIndex::new(vec![k, 0]), q(1 + seed as i64, 3));
            let f = &PolyVectorField::diagonal(s.eigenvalues()) + &pert;
            let r = normalize(&f, &s, k + 1).map_err(|e| e.to_string())?;
            check(r.normal_form.linear_part() == ExactMatrix::diagonal(s.eigenvalues()), "linear part changed")?;
            let tail = r.normal_form.tail(2);
            let terms: Vec<_> = tail.terms().collect();
            let c = resonant_coefficient_oracle(&pert, k);
            if c == GaussianRational::from_int(0) {
                // non-generic draw: the resonant coefficient cancels
                check(terms.is_empty(), format!("k={k} seed={seed}: oracle gives 0, normal form has {} terms", terms.len()))?;
                degenerate += 1;
                continue;
            }
            check(terms.len() == 1, format!("k={k} seed={seed}: {} nonlinear terms", terms.len()))?;
            let (i, m, got) = terms[0];
            check(
                i == 1 && *m == MultiIndex::new(vec![k, 0]) && *got == c,
                format!("k={k} seed={seed}: got ({},{m}) {got}, expected (2,({k},0)) {c}", i + 1),
            )?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} random perturbations leave only c x1^k in component 2, c equal to the conjugacy oracle \
         ({degenerate} draws with c = 0 agreed and were redrawn)"
    ))
}

fn criterion_2() -> Outcome {
    let s = Spectrum::parse(&["-i", "i", "-i", "i"]);
    let b = invariance_basis(&s).map_err(|e| e.to_string())?;
    let mut got: Vec<Vec<u32>> = b.generators().iter().map(|m| m.exponents().to_vec()).collect();
    got.sort();
    let mut want = vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 0, 0, 1], vec![0, 1, 1, 0]];
    want.sort();
    check(b.is_complete(), "basis incomplete")?;
    check(got == want, format!("generators {got:?}"))?;
    let rep = analyze(&s, 8, DEFAULT_HILBERT_CAP).map_err(|e| e.to_string())?;
    check(rep.partition.as_ref().is_some_and(|p| p.sporadic.is_empty()), "sporadic resonances present")?;
    Ok("four generators, no sporadic resonances through degree 8".into())
}

fn criterion_3() -> Outcome {
    let p = load("example3");
    let a = p.field.linear_part();
    let e = ExactMatrix::from_i64(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, 1, 0, 0]]);
    let alone = joint_centralizer(std::slice::from_ref(&a)).len();
    let joint = joint_centralizer(&[a.clone(), e]).len();
    check(alone == 8, format!("centralizer dimension {alone}"))?;
    check(joint == 4, format!("joint centralizer dimension {joint}"))?;
    Ok(format!("dim C(A) = {alone}, dim C(A, E) = {joint}"))
}

fn criterion_4() -> Outcome {
    let cases = [
        ("example1_k2", 3),
        ("example1_k3", 4),
        ("example2", 4),
        ("example3", 3),
        ("example4", 3),
        ("hopf_critical", 3),
        ("hopf_mu1", 3),
        ("hamiltonian_hopf", 3),
    ];
    let mut names = Vec::new();
    for (name, order) in cases {
        let p = load(name);
        let r = normal_form_of(&p, order).map_err(|e| format!("{name}: {e}"))?;
        let rep = analyze(&p.spectrum, order, DEFAULT_HILBERT_CAP).map_err(|e| e.to_string())?;
        let u = build_unfolding(&r, &rep).map_err(|e| format!("{name}: {e}"))?;
        let chk = verify_unfolding(&u, &r.normal_form);
        check(chk.ok(), format!("{name}: {} nonzero residuals", chk.residuals.len()))?;
        names.push(name);
    }
    Ok(format!("zero residuals on {}", names.join(", ")))
}

fn criterion_5() -> Outcome {
    let p = load("hopf_mu1");
    let r = normal_form_of(&p, 3).map_err(|e| e.to_string())?;
    let rep = analyze(&p.spectrum, 3, DEFAULT_HILBERT_CAP).map_err(|e| e.to_string())?;
    let u = build_unfolding(&r, &rep).map_err(|e| e.to_string())?;
    // z = x + i y from x0 = (0.1, 0)
    let z0 = [Complex64::new(0.1, 0.0), Complex64::new(0.1, 0.0)];
    let demo = orbit_space_demo(&u, &r.normal_form, &u.lift_point(&z0), 20.0, 1e-3).map_err(|e| e.to_string())?;
    let rho: Vec<f64> = demo.phi.states.iter().map(|s| s[0]).collect();
    let rho0 = 0.01f64;
    let mut worst: f64 = 0.0;
    for (t, v) in demo.phi.times.iter().zip(&rho) {
        let exact = rho0 / (rho0 + (1.0 - rho0) * (-2.0 * t).exp());
        worst = worst.max((v - exact).abs());
    }
    let rho_t = *rho.last().unwrap();
    check((rho_t - 1.0).abs() <= 1e-6, format!("rho(20) = {rho_t}"))?;
    check(worst <= 1e-6, format!("rho deviates from closed form by {worst:e}"))?;
    // omega0 + b rho* with omega0 = 1, b = 1/2, rho* = 1
    let expected = 1.0 + 0.5 * 1.0;
    let observed = phase_velocity(&demo.linear, 0, 10.0).ok_or("no phase")?;
    check((observed - expected).abs() <= 1e-4, format!("frequency {observed} vs {expected}"))?;
    let Asymptotics::Points(pts) = asymptotic_linearization(&u, None).map_err(|e| e.to_string())? else {
        return Err("no fixed points".into());
    };
    let one = pts
        .iter()
        .find(|fp| fp.location[0] == RootLocation::Exact(num_rational::BigRational::from_integer(1.into())))
        .ok_or("phi* = 1 not found")?;
    check(one.stability == pdnf_core::unfold::Stability::Stable, "phi* = 1 not stable")?;
    Ok(format!("|rho(20) - 1| = {:.1e}, frequency {observed:.9} vs {expected}", (rho_t - 1.0).abs()))
}

fn criterion_6() -> Outcome {
    let p = load("example1_k2");
    let r = normal_form_of(&p, 3).map_err(|e| e.to_string())?;
    let sc = truncation_scaling(&p.working, &r, &[0.02, 0.04, 0.08, 0.16], 1.0, 1e-3).map_err(|e| e.to_string())?;
    check(sc.excluded.is_empty(), "diverged samples")?;
    match sc.fit {
        ScalingFit::Slope { slope, .. } => {
            check(slope >= 3.5, format!("slope {slope:.4}"))?;
            Ok(format!("slope {slope:.4}"))
        }
        other => Err(format!("no slope: {other:?}")),
    }
}

fn criterion_7() -> Outcome {
    let seed = 20_261_014;
    let rep = property_suite(seed, 200);
    for t in &rep.properties {
        check(t.failed == 0, format!("{} failed {} of 200 (first at case {:?})", t.name, t.failed, t.first_failure))?;
    }
    Ok(format!("{} properties x 200 cases, seed {seed}", rep.properties.len()))
}

fn criterion_8() -> Outcome {
    let cases: [(&[&str], bool); 3] = [(&["1", "2"], true), (&["-i", "i"], false), (&["1+i", "1-i", "2"], true)];
    for (ev, want) in cases {
        let s = Spectrum::parse(ev);
        check(poincare_criterion(&s) == want, format!("{ev:?}"))?;
        if want {
            let b = invariance_basis(&s).map_err(|e| e.to_string())?;
            check(b.is_complete() && b.is_empty(), format!("{ev:?}: invariance basis not empty"))?;
        }
    }
    Ok("(1,2) true, (-i,i) false, (1+i,1-i,2) true; no invariance relations in the Poincare domain".into())
}

fn criterion_9() -> Outcome {
    let minus = FiniteGroup::new(vec![ExactMatrix::identity(2), ExactMatrix::from_i64(&[&[-1, 0], &[0, -1]])])
        .map_err(|e| e.to_string())?;
    let z3 = FiniteGroup::generate(2, &[z3_generator()]).map_err(|e| e.to_string())?;
    for (name, g) in [("{I,-I}", &minus), ("Z3", &z3)] {
        let t = molien_coefficients(g, 6).map_err(|e| e.to_string())?;
        for n in 0..=6u32 {
            let (b0, b1) = (invariant_dimension(g, n) as u64, covariant_dimension(g, n) as u64);
            check(
                t.c0[n as usize] == b0 && t.c1[n as usize] == b1,
                format!("{name} degree {n}: molien ({}, {}), projector ({b0}, {b1})", t.c0[n as usize], t.c1[n as usize]),
            )?;
        }
    }
    let k_basis = joint_centralizer(z3.elements());
    let grad = gradient_property_check(&z3, 2, &k_basis).map_err(|e| e.to_string())?;
    let row = &grad[1];
    let c1 = covariant_dimension(&z3, 2) as u64;
    let s = covariant_dimension(&z3, 1) as u64;
    let c0_3 = invariant_dimension(&z3, 3) as u64;
    check(row.degree == 2 && row.c1 == c1 && row.s == s && row.c0_next == c0_3, format!("{row:?}"))?;
    check(!row.counting_holds && row.c1 != s * c0_3, "counting test should fail at n = 2")?;
    check(row.rank_holds && row.span_rank as u64 == c1, "rank test should hold at n = 2")?;
    Ok(format!("c0, c1 match through n = 6; Z3 n = 2: c1 = {c1} vs s c0(3) = {}, span rank {}", s * c0_3, row.span_rank))
}

fn criterion_10() -> Outcome {
    let p = load("example1_k2");
    let r = normal_form_of(&p, 3).map_err(|e| e.to_string())?;
    let rep = analyze(&p.spectrum, 3, DEFAULT_HILBERT_CAP).map_err(|e| e.to_string())?;
    let u = build_unfolding(&r, &rep).map_err(|e| e.to_string())?;
    let c = r.normal_form.component(1).coeff(&MultiIndex::new(vec![2, 0])).to_complex64().re;
    let (x0, y0) = (0.5f64, -0.3f64);
    let start: Vec<Complex64> = [x0, y0, x0 * x0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let tr = integrate_complex(&u.to_field(), &start, 2.0, 1e-3).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (k, t) in tr.times.iter().enumerate() {
        let z = tr.complex_state(k);
        let x = x0 * t.exp();
        let y = (y0 + c * x0 * x0 * t) * (2.0 * t).exp();
        worst = worst.max((z[0] - x).norm()).max((z[1] - y).norm());
    }
    check(worst <= 1e-6, format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation from closed form {worst:.2e} (c = {c})"))
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 10] = [
        (1, "example 1 normal form", 5, criterion_1),
        (2, "example 3 invariance basis", 5, criterion_2),
        (3, "centralizer dimensions", 5, criterion_3),
        (4, "unfolding residuals", 30, criterion_4),
        (5, "hopf asymptotics", 30, criterion_5),
        (6, "truncation scaling", 60, criterion_6),
        (7, "property suite", 120, criterion_7),
        (8, "poincare criterion", 1, criterion_8),
        (9, "molien versus projectors", 10, criterion_9),
        (10, "example 1 closed form", 10, criterion_10),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let res = match res {
            Ok(_) if took > Duration::from_secs(limit) => Err(format!("took {took:.2?}, limit {limit} s")),
            other => other,
        };
        match res {
            Ok(detail) => println!("PASS criterion {id:>2} {name} [{:.2}s / {limit}s]: {detail}", took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id:>2} {name} [{:.2}s / {limit}s]: {why}", took.as_secs_f64());
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
