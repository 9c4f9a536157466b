//! Floating-point validation: fixed-step RK4, conjugacy error between the
//! original flow and the normal-form flow, truncation scaling fits, and an
//! orbit-space integration of unfolded systems.
//!
//! Complex states are integrated as interleaved `(re, im)` pairs.

use num_complex::Complex64;

use crate::algebra::PolyVectorField;
use crate::normalform::NormalFormResult;
use crate::unfold::UnfoldedSystem;

pub const DEFAULT_BLOWUP: f64 = 1e6;
pub const SCHEME: &str = "rk4";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("step and horizon must be positive (dt = {dt}, T = {t})")]
    BadStep { dt: f64, t: f64 },
    #[error("initial state has {got} entries, field has dimension {want}")]
    StateDimension { got: usize, want: usize },
    #[error("field has non-real coefficients; integrate it as a complex system")]
    NonRealField,
    #[error("initial data off the invariant manifold by {0:e}")]
    Inconsistent(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dt: f64,
    pub scheme: &'static str,
    pub diverged: bool,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    /// Complex view of an interleaved state.
    pub fn complex_state(&self, k: usize) -> Vec<Complex64> {
        unpack(&self.states[k])
    }
}

pub fn pack(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn unpack(v: &[f64]) -> Vec<Complex64> {
    v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A polynomial field with coefficients rounded to `Complex64` once.
#[derive(Debug, Clone)]
pub struct CompiledField {
    dim: usize,
    terms: Vec<(usize, Vec<u32>, Complex64)>,
    real: bool,
}

impl CompiledField {
    pub fn new(f: &PolyVectorField) -> Self {
        let terms = f
            .terms()
            .map(|(i, m, c)| (i, m.exponents().to_vec(), c.to_complex64()))
            .collect::<Vec<_>>();
        Self { dim: f.dim(), terms, real: f.is_real() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, z: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (i, e, c) in &self.terms {
            let mut v = *c;
            for (k, &p) in e.iter().enumerate() {
                if p > 0 {
                    v *= z[k].powu(p);
                }
            }
            out[*i] += v;
        }
    }

    fn eval_real(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, e, c) in &self.terms {
            let mut v = c.re;
            for (k, &p) in e.iter().enumerate() {
                if p > 0 {
                    v *= x[k].powi(p as i32);
                }
            }
            out[*i] += v;
        }
    }
}

/// Fixed-step RK4 for `x' = rhs(t, x)`. The step is shrunk so that an integer
/// number of steps lands on `t_end`. Stops early, flagged, once the state
/// norm exceeds `blowup`.
pub fn rk4<F>(rhs: F, x0: &[f64], t_end: f64, dt: f64, blowup: f64) -> Result<Trajectory, NumericsError>
where
    F: Fn(usize, f64, &[f64], &mut [f64]),
{
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(NumericsError::BadStep { dt, t: t_end });
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        dt: h,
        scheme: SCHEME,
        diverged: false,
    };
    traj.times.push(0.0);
    traj.states.push(x.clone());
    for s in 0..steps {
        let t = s as f64 * h;
        rhs(2 * s, t, &x, &mut k1);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * h * k1[j];
        }
        rhs(2 * s + 1, t + 0.5 * h, &tmp, &mut k2);
        for j in 0..n {
            tmp[j] = x[j] + 0.5 * h * k2[j];
        }
        rhs(2 * s + 1, t + 0.5 * h, &tmp, &mut k3);
        for j in 0..n {
            tmp[j] = x[j] + h * k3[j];
        }
        rhs(2 * s + 2, t + h, &tmp, &mut k4);
        for j in 0..n {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        traj.times.push((s + 1) as f64 * h);
        let bad = !x.iter().all(|v| v.is_finite()) || norm(&x) > blowup;
        traj.states.push(x.clone());
        if bad {
            traj.diverged = true;
            break;
        }
    }
    Ok(traj)
}

/// Integrates a real field.
pub fn integrate(f: &PolyVectorField, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory, NumericsError> {
    let cf = CompiledField::new(f);
    if !cf.real {
        return Err(NumericsError::NonRealField);
    }
    if x0.len() != cf.dim {
        return Err(NumericsError::StateDimension { got: x0.len(), want: cf.dim });
    }
    rk4(|_, _, x, out| cf.eval_real(x, out), x0, t_end, dt, DEFAULT_BLOWUP)
}

/// Integrates a field with complex coefficients on interleaved states.
pub fn integrate_complex(
    f: &PolyVectorField,
    z0: &[Complex64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, NumericsError> {
    let cf = CompiledField::new(f);
    if z0.len() != cf.dim {
        return Err(NumericsError::StateDimension { got: z0.len(), want: cf.dim });
    }
    let n = cf.dim;
    let rhs = move |_: usize, _: f64, x: &[f64], out: &mut [f64]| {
        let z = unpack(x);
        let mut dz = vec![Complex64::new(0.0, 0.0); n];
        cf.eval(&z, &mut dz);
        out.copy_from_slice(&pack(&dz));
    };
    rk4(rhs, &pack(z0), t_end, dt, DEFAULT_BLOWUP)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyError {
    pub max_error: f64,
    pub final_error: f64,
    pub diverged: bool,
}

/// `max_t |Phi(y(t)) - x(t)|` where `y` follows the normal form from `y0`,
/// `x` follows `original` from `Phi(y0)` and `Phi = id + transform`.
pub fn conjugacy_error(
    original: &PolyVectorField,
    r: &NormalFormResult,
    y0: &[Complex64],
    t_end: f64,
    dt: f64,
) -> Result<ConjugacyError, NumericsError> {
    let x0 = r.apply_transform(y0);
    let ys = integrate_complex(&r.normal_form, y0, t_end, dt)?;
    let xs = integrate_complex(original, &x0, t_end, dt)?;
    let diverged = ys.diverged || xs.diverged;
    let len = ys.states.len().min(xs.states.len());
    let tf = CompiledField::new(&r.transform);
    let mut t = vec![Complex64::new(0.0, 0.0); tf.dim()];
    let mut max_error: f64 = 0.0;
    let mut final_error = 0.0;
    for k in 0..len {
        let y = ys.complex_state(k);
        tf.eval(&y, &mut t);
        let mapped: Vec<Complex64> = y.iter().zip(&t).map(|(a, b)| a + b).collect();
        let mapped = pack(&mapped);
        final_error = dist(&mapped, &xs.states[k]);
        max_error = max_error.max(final_error);
    }
    Ok(ConjugacyError { max_error, final_error, diverged })
}

/// Errors at or below this are treated as integrator noise.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ScalingFit {
    Slope { slope: f64, intercept: f64 },
    /// Every error sits at the noise floor.
    Exact,
    /// Fewer than three usable samples.
    NoFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    /// `(eps, max error)` for samples that stayed bounded.
    pub samples: Vec<(f64, f64)>,
    /// Amplitudes whose runs diverged.
    pub excluded: Vec<f64>,
    pub fit: ScalingFit,
}

/// Least-squares slope of `log e` against `log eps`, with `y0 = eps * u` for
/// the normalized all-ones direction `u`. Samples run on separate threads.
pub fn truncation_scaling(
    original: &PolyVectorField,
    r: &NormalFormResult,
    eps_list: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<ScalingReport, NumericsError> {
    let n = r.dim();
    let u = 1.0 / (n as f64).sqrt();
    let results: Vec<Result<ConjugacyError, NumericsError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = eps_list
            .iter()
            .map(|&eps| {
                scope.spawn(move || {
                    let y0 = vec![Complex64::new(eps * u, 0.0); n];
                    conjugacy_error(original, r, &y0, t_end, dt)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut samples = Vec::new();
    let mut excluded = Vec::new();
    for (eps, res) in eps_list.iter().zip(results) {
        let e = res?;
        if e.diverged {
            excluded.push(*eps);
        } else {
            samples.push((*eps, e.max_error));
        }
    }
    let fit = if samples.len() < 3 {
        ScalingFit::NoFit
    } else if samples.iter().all(|&(_, e)| e <= NOISE_FLOOR) {
        ScalingFit::Exact
    } else {
        let pts: Vec<(f64, f64)> = samples.iter().map(|&(a, e)| (a.ln(), e.max(f64::MIN_POSITIVE).ln())).collect();
        let (slope, intercept) = least_squares(&pts);
        ScalingFit::Slope { slope, intercept }
    };
    Ok(ScalingReport { samples, excluded, fit })
}

pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Tolerance on `|w0 - R(x0)|` and `|phi0 - I(x0)|`.
pub const MANIFOLD_TOL: f64 = 1e-9;
/// `|h(phi(T))|` below this counts as converged.
pub const CONVERGED_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDemo {
    /// `phi(t)` sampled on the `(x, w)` grid.
    pub phi: Trajectory,
    /// `(x, w)` from the time-dependent linear blocks.
    pub linear: Trajectory,
    /// The normal form integrated directly in `x`.
    pub direct: Trajectory,
    /// `max |x_linear - x_direct|`.
    pub max_deviation: f64,
    /// `max |w - R(x)|` and `max |phi - I(x)|` along the linear-block run.
    pub manifold_drift: f64,
    /// Final `phi` when the orbit-space field has settled.
    pub phi_limit: Option<Vec<Complex64>>,
    /// `F(phi_limit)`.
    pub frozen_f: Option<Vec<Vec<Complex64>>>,
}

/// Integrates `phi' = h(phi)` at half steps, then `x' = F(phi(t)) x + K w`,
/// `w' = G w + Gx x` at full steps, and compares with the normal form.
pub fn orbit_space_demo(
    u: &UnfoldedSystem,
    nf: &PolyVectorField,
    state0: &[Complex64],
    t_end: f64,
    dt: f64,
) -> Result<OrbitDemo, NumericsError> {
    let (n, m, r) = (u.n(), u.m(), u.r());
    if state0.len() != n + m + r {
        return Err(NumericsError::StateDimension { got: state0.len(), want: n + m + r });
    }
    let x0 = &state0[..n];
    let lifted = u.lift_point(x0);
    let off = dist(&pack(&lifted), &pack(state0));
    if off > MANIFOLD_TOL {
        return Err(NumericsError::Inconsistent(off));
    }
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(NumericsError::BadStep { dt, t: t_end });
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;

    let h_field = PolyVectorField::from_components(u.h.clone()).ok();
    let phi_half = match &h_field {
        Some(hf) if r > 0 => integrate_complex(hf, &state0[n + m..], t_end, h / 2.0)?,
        _ => Trajectory { times: vec![0.0], states: vec![Vec::new()], dt: h / 2.0, scheme: SCHEME, diverged: false },
    };
    let phi_at = |idx: usize| -> Vec<Complex64> {
        if r == 0 {
            Vec::new()
        } else {
            unpack(&phi_half.states[idx.min(phi_half.states.len() - 1)])
        }
    };

    let compile = |mat: &Vec<Vec<crate::algebra::ScalarPoly>>| -> Vec<Vec<Vec<(Vec<u32>, Complex64)>>> {
        mat.iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.terms().map(|(e, c)| (e.exponents().to_vec(), c.to_complex64())).collect())
                    .collect()
            })
            .collect()
    };
    let (cf, ck, cg, cgx) = (compile(&u.f), compile(&u.k), compile(&u.g), compile(&u.g_x));
    let eval_poly = |p: &[(Vec<u32>, Complex64)], phi: &[Complex64]| -> Complex64 {
        p.iter()
            .map(|(e, c)| e.iter().enumerate().fold(*c, |acc, (k, &q)| acc * phi[k].powu(q)))
            .sum()
    };
    let rhs = |idx: usize, _t: f64, s: &[f64], out: &mut [f64]| {
        let phi = phi_at(idx);
        let z = unpack(s);
        let (x, w) = z.split_at(n);
        let mut dz = vec![Complex64::new(0.0, 0.0); n + m];
        for i in 0..n {
            for j in 0..n {
                dz[i] += eval_poly(&cf[i][j], &phi) * x[j];
            }
            for b in 0..m {
                dz[i] += eval_poly(&ck[i][b], &phi) * w[b];
            }
        }
        for a in 0..m {
            for b in 0..m {
                dz[n + a] += eval_poly(&cg[a][b], &phi) * w[b];
            }
            for j in 0..n {
                dz[n + a] += eval_poly(&cgx[a][j], &phi) * x[j];
            }
        }
        out.copy_from_slice(&pack(&dz));
    };
    let linear = rk4(rhs, &pack(&state0[..n + m]), t_end, h, DEFAULT_BLOWUP)?;
    let direct = integrate_complex(nf, x0, t_end, h)?;

    let mut max_deviation: f64 = 0.0;
    let mut manifold_drift: f64 = 0.0;
    let mut phi_states = Vec::with_capacity(linear.states.len());
    for k in 0..linear.states.len() {
        let z = linear.complex_state(k);
        if k < direct.states.len() {
            max_deviation = max_deviation.max(dist(&pack(&z[..n]), &direct.states[k][..]));
        }
        let phi = phi_at(2 * k);
        let mut actual = z.clone();
        actual.extend_from_slice(&phi);
        manifold_drift = manifold_drift.max(dist(&pack(&u.lift_point(&z[..n])), &pack(&actual)));
        phi_states.push(pack(&phi));
    }
    let phi = Trajectory {
        times: linear.times.clone(),
        states: phi_states,
        dt: h,
        scheme: SCHEME,
        diverged: phi_half.diverged,
    };

    let (phi_limit, frozen_f) = match &h_field {
        Some(hf) if r > 0 && !phi.diverged => {
            let last = unpack(phi.last());
            let cfld = CompiledField::new(hf);
            let mut v = vec![Complex64::new(0.0, 0.0); r];
            cfld.eval(&last, &mut v);
            if v.iter().map(|c| c.norm()).fold(0.0, f64::max) < CONVERGED_TOL {
                let fz = cf.iter().map(|row| row.iter().map(|p| eval_poly(p, &last)).collect()).collect();
                (Some(last), Some(fz))
            } else {
                (None, None)
            }
        }
        _ => (None, None),
    };

    Ok(OrbitDemo { phi, linear, direct, max_deviation, manifold_drift, phi_limit, frozen_f })
}

/// Average angular velocity of complex component `comp` over `[t_from, T]`,
/// from the unwrapped argument.
pub fn phase_velocity(traj: &Trajectory, comp: usize, t_from: f64) -> Option<f64> {
    let start = traj.times.iter().position(|&t| t >= t_from)?;
    let mut total = 0.0;
    let mut prev = traj.complex_state(start)[comp];
    for k in start + 1..traj.states.len() {
        let z = traj.complex_state(k)[comp];
        if z.norm() == 0.0 || prev.norm() == 0.0 {
            return None;
        }
        total += (z / prev).arg();
        prev = z;
    }
    let span = traj.final_time() - traj.times[start];
    (span > 0.0).then(|| total / span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ExactMatrix, GaussianRational};

    #[test]
    fn linear_flow_closed_form() {
        let f = PolyVectorField::diagonal(&[GaussianRational::from_int(1), GaussianRational::from_int(2)]);
        let tr = integrate(&f, &[1.0, 1.0], 1.0, 1e-3).unwrap();
        let e = std::f64::consts::E;
        assert!((tr.last()[0] - e).abs() < 1e-8);
        assert!((tr.last()[1] - e * e).abs() < 1e-8);
        assert!(!tr.diverged);
    }

    #[test]
    fn zero_field_is_constant() {
        let tr = integrate(&PolyVectorField::zero(2), &[0.3, -0.2], 1.0, 0.1).unwrap();
        assert!(tr.states.iter().all(|s| s == &vec![0.3, -0.2]));
    }

    #[test]
    fn blowup_is_flagged() {
        let mut f = PolyVectorField::zero(1);
        f.add_term(0, crate::algebra::MultiIndex::new(vec![2]), GaussianRational::from_int(1));
        let tr = integrate(&f, &[1.0], 2.0, 1e-3).unwrap();
        assert!(tr.diverged);
        assert!(tr.final_time() < 1.01);
    }

    #[test]
    fn rotation_phase_velocity() {
        let f = PolyVectorField::linear(&ExactMatrix::diagonal(&[GaussianRational::i()]));
        let tr = integrate_complex(&f, &[Complex64::new(1.0, 0.0)], 5.0, 1e-2).unwrap();
        assert!((phase_velocity(&tr, 0, 1.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn least_squares_line() {
        let (s, c) = least_squares(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
        assert!((s - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12);
    }
}
