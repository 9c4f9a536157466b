//! Text and JSON renderings. Exact numbers are strings in JSON; floating
//! values sit under `float` keys and carry a `(float)` tag in text.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::algebra::{ExactMatrix, GaussianRational, MultiIndex, PolyVectorField, ScalarPoly};
use crate::convergence::ConvergenceReport;
use crate::normalform::{NormalFormError, NormalFormResult, Verification};
use crate::numerics::{OrbitDemo, ScalingFit, ScalingReport};
use crate::resonance::ResonanceReport;
use crate::symmetry::{FiniteGroup, GradientDegree, MolienTable};
use crate::unfold::{Asymptotics, Block, FixedPoint, FrozenSystem, RootLocation, Stability, UnfoldedSystem, UnfoldingCheck};

use super::Prepared;

#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub json: Value,
    /// Every exact check in the report passed.
    pub verified: bool,
}

impl Report {
    pub fn new(text: String, json: Value, verified: bool) -> Self {
        Self { text, json, verified }
    }

    pub(crate) fn prepend_header(&mut self, p: &Prepared) {
        let mut head = format!("dimension: {}\nspectrum: {}\n", p.sys.dim, list(p.spectrum.eigenvalues()));
        if !p.map.is_identity() {
            let blocks: Vec<String> = p.map.blocks.iter().map(|b| format!("({},{})", b.i + 1, b.j + 1)).collect();
            writeln!(head, "complexified blocks: {}", blocks.join(" ")).unwrap();
        }
        if p.detuned {
            head.push_str("linear part: detuned, commutes with diag(spectrum)\n");
        }
        head.push('\n');
        self.text.insert_str(0, &head);
        if let Value::Object(m) = &mut self.json {
            let mut out = Map::new();
            out.insert("dimension".into(), json!(p.sys.dim));
            out.insert("spectrum".into(), super::spectrum_json(&p.spectrum));
            out.insert("detuned".into(), json!(p.detuned));
            out.insert(
                "blocks".into(),
                json!(p.map.blocks.iter().map(|b| [b.i + 1, b.j + 1]).collect::<Vec<_>>()),
            );
            out.extend(std::mem::take(m));
            *m = out;
        }
    }
}

pub fn list(v: &[GaussianRational]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn exps(m: &MultiIndex) -> Value {
    json!(m.exponents())
}

pub fn field_json(f: &PolyVectorField) -> Value {
    Value::Array(
        f.terms()
            .map(|(i, m, c)| json!({ "component": i + 1, "exponent": exps(m), "coeff": c.to_string() }))
            .collect(),
    )
}

pub fn poly_json(p: &ScalarPoly) -> Value {
    Value::Array(p.terms().map(|(m, c)| json!({ "exponent": exps(m), "coeff": c.to_string() })).collect())
}

pub fn matrix_json(m: &ExactMatrix) -> Value {
    Value::Array((0..m.rows()).map(|r| json!(m.row(r).iter().map(ToString::to_string).collect::<Vec<_>>())).collect())
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {l}\n")).collect()
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn analysis(rep: &ResonanceReport, poincare: bool, bound: Option<u32>) -> Report {
    let mut t = String::new();
    writeln!(t, "max degree: {}", rep.max_degree).unwrap();
    writeln!(t, "poincare domain: {}", yes(poincare)).unwrap();
    if let Some(b) = bound {
        writeln!(t, "resonance degree bound: {b}").unwrap();
    }
    let status = if rep.basis.is_complete() { "complete" } else { "incomplete" };
    writeln!(t, "invariance basis ({status}, degree cap {}):", rep.basis.degree_cap()).unwrap();
    if rep.basis.is_empty() {
        t.push_str("  none\n");
    }
    for g in rep.basis.generators() {
        writeln!(t, "  {g}").unwrap();
    }
    t.push_str("resonances:\n");
    if rep.resonances.is_empty() {
        t.push_str("  none\n");
    }
    for d in 2..=rep.max_degree {
        let items: Vec<String> = rep.resonances_of_degree(d).map(ToString::to_string).collect();
        if !items.is_empty() {
            writeln!(t, "  degree {d}: {}", items.join(" ")).unwrap();
        }
    }
    match &rep.partition {
        None => t.push_str("sporadic resonances: unknown (basis incomplete)\n"),
        Some(p) => {
            let items: Vec<String> = p.sporadic.iter().map(ToString::to_string).collect();
            writeln!(t, "sporadic resonances: {}", if items.is_empty() { "none".into() } else { items.join(" ") })
                .unwrap();
        }
    }
    if let Some(u) = &rep.uniqueness {
        if u.ok {
            t.push_str("one sporadic exponent per component: yes\n");
        } else {
            t.push_str("one sporadic exponent per component: no\n");
            for (c, ms) in &u.violations {
                let ms: Vec<String> = ms.iter().map(ToString::to_string).collect();
                writeln!(t, "  component {}: {}", c + 1, ms.join(" ")).unwrap();
            }
        }
    }
    writeln!(t, "finitely resonant: {}", rep.finitely_resonant).unwrap();

    let res = |r: &crate::resonance::Resonance| json!({ "component": r.component + 1, "exponent": exps(&r.exponent) });
    let json = json!({
        "max_degree": rep.max_degree,
        "poincare_domain": poincare,
        "resonance_degree_bound": bound,
        "invariance_basis": {
            "complete": rep.basis.is_complete(),
            "degree_cap": rep.basis.degree_cap(),
            "generators": rep.basis.generators().iter().map(exps).collect::<Vec<_>>(),
        },
        "resonances": rep.resonances.iter().map(res).collect::<Vec<_>>(),
        "sporadic": rep.partition.as_ref().map(|p| p.sporadic.iter().map(res).collect::<Vec<_>>()),
        "sporadic_unique": rep.uniqueness.as_ref().map(|u| u.ok),
        "finitely_resonant": rep.finitely_resonant,
    });
    Report::new(t, json, true)
}

fn transform_text(t: &PolyVectorField) -> String {
    (0..t.dim()).map(|i| format!("T{}(y) = {}\n", i + 1, t.component(i).display_with("y"))).collect()
}

type RealPair = Result<(PolyVectorField, PolyVectorField), NormalFormError>;

pub fn normal_form(r: &NormalFormResult, ver: &Verification, real: Option<&RealPair>) -> Report {
    let mut t = String::new();
    writeln!(t, "order: {}", r.order).unwrap();
    t.push_str("normal form:\n");
    t.push_str(&indent(&r.normal_form.display_with("x")));
    t.push_str("transform x = y + T(y):\n");
    t.push_str(&indent(&transform_text(&r.transform)));
    let mut verified = ver.ok();
    let mut real_json = Value::Null;
    if let Some(real) = real {
        match real {
            Ok((nf, tr)) => {
                t.push_str("normal form, real coordinates:\n");
                t.push_str(&indent(&nf.display_with("x")));
                t.push_str("transform, real coordinates:\n");
                t.push_str(&indent(&transform_text(tr)));
                real_json = json!({ "normal_form": field_json(nf), "transform": field_json(tr) });
            }
            Err(e) => {
                verified = false;
                writeln!(t, "real form: FAILED ({e})").unwrap();
                real_json = json!({ "error": e.to_string() });
            }
        }
    }
    t.push_str("checks:\n");
    writeln!(t, "  only resonant terms: {}", if ver.resonant_ok() { "pass" } else { "FAIL" }).unwrap();
    for (i, m, c) in &ver.non_resonant {
        writeln!(t, "    non-resonant ({},{}) {}", i + 1, m, c).unwrap();
    }
    writeln!(t, "  commutes with semisimple part: {}", if ver.bracket_ok() { "pass" } else { "FAIL" }).unwrap();
    writeln!(t, "  pushforward equals normal form: {}", if ver.conjugacy_ok() { "pass" } else { "FAIL" }).unwrap();
    let json = json!({
        "order": r.order,
        "normal_form": field_json(&r.normal_form),
        "transform": field_json(&r.transform),
        "real": real_json,
        "checks": {
            "resonant": ver.resonant_ok(),
            "bracket": ver.bracket_ok(),
            "conjugacy": ver.conjugacy_ok(),
            "bracket_residual": field_json(&ver.bracket_residual),
            "conjugacy_residual": field_json(&ver.conjugacy_residual),
        },
    });
    Report::new(t, json, verified)
}

fn row_text(lhs: &str, entries: &[(String, &ScalarPoly)]) -> String {
    let parts: Vec<String> = entries
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(v, p)| format!("[{}] {v}", p.display_with("phi")))
        .collect();
    format!("{lhs} = {}\n", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
}

fn matrix_of_polys(m: &[Vec<ScalarPoly>]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(poly_json).collect())).collect())
}

pub fn unfolding_text(u: &UnfoldedSystem) -> String {
    let (n, m) = (u.n(), u.m());
    let mut t = String::new();
    t.push_str("invariants:\n");
    if u.r() == 0 {
        t.push_str("  none\n");
    }
    for a in 0..u.r() {
        writeln!(t, "  phi{} = {}", a + 1, u.invariants.poly(a).display_with("x")).unwrap();
    }
    t.push_str("auxiliary variables:\n");
    if m == 0 {
        t.push_str("  none\n");
    }
    for (b, (i, _)) in u.auxiliaries.entries.iter().enumerate() {
        writeln!(t, "  w{} = {}   (eigenvalue of x{})", b + 1, u.auxiliaries.poly(b).display_with("x"), i + 1).unwrap();
    }
    let xs: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
    let ws: Vec<String> = (1..=m).map(|k| format!("w{k}")).collect();
    t.push_str("x block:\n");
    for i in 0..n {
        let mut e: Vec<(String, &ScalarPoly)> = (0..n).map(|j| (xs[j].clone(), &u.f[i][j])).collect();
        e.extend((0..m).map(|b| (ws[b].clone(), &u.k[i][b])));
        t.push_str(&indent(&row_text(&format!("x{}'", i + 1), &e)));
    }
    if m > 0 {
        t.push_str("w block:\n");
        for a in 0..m {
            let mut e: Vec<(String, &ScalarPoly)> = (0..m).map(|b| (ws[b].clone(), &u.g[a][b])).collect();
            e.extend((0..n).map(|j| (xs[j].clone(), &u.g_x[a][j])));
            t.push_str(&indent(&row_text(&format!("w{}'", a + 1), &e)));
        }
    }
    if u.r() > 0 {
        t.push_str("phi block:\n");
        for a in 0..u.r() {
            writeln!(t, "  phi{}' = {}", a + 1, u.h[a].display_with("phi")).unwrap();
        }
    }
    t
}

pub fn unfolding_json(u: &UnfoldedSystem) -> Value {
    json!({
        "invariants": u.invariants.exponents.iter().map(exps).collect::<Vec<_>>(),
        "auxiliaries": u.auxiliaries.entries.iter()
            .map(|(i, m)| json!({ "component": i + 1, "exponent": exps(m) }))
            .collect::<Vec<_>>(),
        "f": matrix_of_polys(&u.f),
        "k": matrix_of_polys(&u.k),
        "g": matrix_of_polys(&u.g),
        "g_x": matrix_of_polys(&u.g_x),
        "h": u.h.iter().map(poly_json).collect::<Vec<_>>(),
    })
}

fn block_name(b: Block) -> &'static str {
    match b {
        Block::X => "x",
        Block::W => "w",
        Block::Phi => "phi",
    }
}

pub fn unfolding(u: &UnfoldedSystem, chk: &UnfoldingCheck) -> Report {
    let mut t = unfolding_text(u);
    if chk.ok() {
        t.push_str("back-substitution residuals: all zero\n");
    } else {
        t.push_str("back-substitution residuals: NONZERO\n");
        for r in &chk.residuals {
            writeln!(t, "  {} block, row {}: {}", block_name(r.block), r.row + 1, r.poly.display_with("x")).unwrap();
        }
    }
    let residuals: Vec<Value> = chk
        .residuals
        .iter()
        .map(|r| json!({ "block": block_name(r.block), "row": r.row + 1, "poly": poly_json(&r.poly) }))
        .collect();
    let json = json!({ "unfolded": unfolding_json(u), "residuals": residuals, "residuals_zero": chk.ok() });
    Report::new(t, json, chk.ok())
}

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::Degenerate => "degenerate",
    }
}

fn location_text(l: &RootLocation) -> String {
    match l {
        RootLocation::Exact(r) => r.to_string(),
        RootLocation::Interval(a, b) => format!("in ({a}, {b}) ~ {:.12} (float)", l.approx()),
    }
}

fn location_json(l: &RootLocation) -> Value {
    match l {
        RootLocation::Exact(r) => json!({ "exact": r.to_string() }),
        RootLocation::Interval(a, b) => json!({ "interval": [a.to_string(), b.to_string()], "float": l.approx() }),
    }
}

fn frozen_text(f: &FrozenSystem) -> String {
    match f {
        FrozenSystem::Exact { f, .. } => format!("frozen F:\n{}", indent(&f.to_string())),
        FrozenSystem::Approximate { f } => {
            let rows: Vec<String> = f
                .iter()
                .map(|r| r.iter().map(|c| format!("{:.9e}{:+.9e}i", c.re, c.im)).collect::<Vec<_>>().join("  "))
                .collect();
            format!("frozen F (float):\n{}", indent(&rows.join("\n")))
        }
    }
}

fn frozen_json(f: &FrozenSystem) -> Value {
    match f {
        FrozenSystem::Exact { f, k, g, g_x } => json!({
            "f": matrix_json(f), "k": matrix_json(k), "g": matrix_json(g), "g_x": matrix_json(g_x),
        }),
        FrozenSystem::Approximate { f } => json!({
            "float": f.iter().map(|r| r.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    }
}

fn point_text(fp: &FixedPoint) -> String {
    let loc: Vec<String> = fp.location.iter().map(location_text).collect();
    format!("phi* = ({})  {}\n{}", loc.join(", "), stability_name(fp.stability), indent(&frozen_text(&fp.frozen)))
}

pub fn asymptotics(u: &UnfoldedSystem, a: &Asymptotics) -> Report {
    let mut t = unfolding_text(u);
    t.push_str("orbit-space fixed points:\n");
    let json = match a {
        Asymptotics::Continuum => {
            t.push_str("  every point is fixed (orbit-space field vanishes)\n");
            json!({ "kind": "continuum" })
        }
        Asymptotics::NoOrbitSpace { frozen } => {
            t.push_str("  no invariants; the normal form is linear with constant coefficients\n");
            t.push_str(&indent(&frozen_text(frozen)));
            json!({ "kind": "no-orbit-space", "frozen": frozen_json(frozen) })
        }
        Asymptotics::Points(ps) => {
            if ps.is_empty() {
                t.push_str("  none\n");
            }
            for p in ps {
                t.push_str(&indent(&point_text(p)));
            }
            json!({
                "kind": "points",
                "points": ps.iter().map(|p| json!({
                    "location": p.location.iter().map(location_json).collect::<Vec<_>>(),
                    "stability": stability_name(p.stability),
                    "frozen": frozen_json(&p.frozen),
                })).collect::<Vec<_>>(),
            })
        }
    };
    Report::new(t, json!({ "unfolded": unfolding_json(u), "asymptotics": json }), true)
}

pub fn symmetry(
    centralizer_dim: usize,
    joint_dim: Option<usize>,
    equivariant: Option<bool>,
    invariants: Option<&[ScalarPoly]>,
    commuting: &[(bool, PolyVectorField)],
    group: Option<&FiniteGroup>,
) -> Report {
    let mut t = String::new();
    let mut verified = true;
    writeln!(t, "centralizer of the linear part: dimension {centralizer_dim}").unwrap();
    if let (Some(g), Some(j)) = (group, joint_dim) {
        writeln!(t, "group order: {}", g.order()).unwrap();
        writeln!(t, "joint centralizer with the group: dimension {j}").unwrap();
    }
    if let Some(e) = equivariant {
        writeln!(t, "field equivariant under the group: {}", yes(e)).unwrap();
        verified &= e;
    }
    if let Some(inv) = invariants {
        t.push_str("symmetric invariants (working coordinates):\n");
        if inv.is_empty() {
            t.push_str("  none\n");
        }
        for p in inv {
            writeln!(t, "  {}", p.display_with("x")).unwrap();
        }
    }
    for (k, (ok, res)) in commuting.iter().enumerate() {
        writeln!(t, "commuting symmetry {}: {}", k + 1, if *ok { "commutes" } else { "does NOT commute" }).unwrap();
        if !ok {
            t.push_str(&indent(&res.display_with("x")));
        }
        verified &= ok;
    }
    let json = json!({
        "centralizer_dim": centralizer_dim,
        "group_order": group.map(|g| g.order()),
        "joint_centralizer_dim": joint_dim,
        "equivariant": equivariant,
        "symmetric_invariants": invariants.map(|v| v.iter().map(poly_json).collect::<Vec<_>>()),
        "commuting": commuting.iter().map(|(ok, r)| json!({ "commutes": ok, "residual": field_json(r) })).collect::<Vec<_>>(),
    });
    Report::new(t, json, verified)
}

pub fn molien(
    g: &FiniteGroup,
    table: &MolienTable,
    brute: &[(usize, usize)],
    grad: &[GradientDegree],
    order: u32,
) -> Report {
    let mut t = String::new();
    writeln!(t, "group order: {}", g.order()).unwrap();
    t.push_str("degree  c0  c0(projector)  c1  c1(projector)\n");
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 0..=order as usize {
        let (b0, b1) = brute[n];
        let m = table.c0[n] == b0 as u64 && table.c1[n] == b1 as u64;
        ok &= m;
        writeln!(t, "{n:>6}  {:>2}  {:>13}  {:>2}  {:>13}{}", table.c0[n], b0, table.c1[n], b1, if m { "" } else { "  MISMATCH" })
            .unwrap();
        rows.push(json!({ "degree": n, "c0": table.c0[n], "c0_projector": b0, "c1": table.c1[n], "c1_projector": b1 }));
    }
    writeln!(t, "equivariant linear maps s: {}", table.s).unwrap();
    t.push_str("gradient property:\n");
    t.push_str("degree  c1  s*c0(n+1)  counting  span rank  rank test\n");
    for d in grad {
        writeln!(
            t,
            "{:>6}  {:>2}  {:>9}  {:>8}  {:>9}  {:>9}",
            d.degree,
            d.c1,
            d.s * d.c0_next,
            if d.counting_holds { "holds" } else { "fails" },
            d.span_rank,
            if d.rank_holds { "holds" } else { "fails" }
        )
        .unwrap();
    }
    let json = json!({
        "group_order": g.order(),
        "table": rows,
        "s": table.s,
        "gradient": grad.iter().map(|d| json!({
            "degree": d.degree, "c1": d.c1, "s": d.s, "c0_next": d.c0_next,
            "counting_holds": d.counting_holds, "span_rank": d.span_rank, "rank_holds": d.rank_holds,
        })).collect::<Vec<_>>(),
        "molien_matches_projectors": ok,
    });
    Report::new(t, json, ok)
}

pub fn convergence(c: &ConvergenceReport, k_max: u32) -> Report {
    let mut t = String::new();
    writeln!(t, "poincare domain: {}", yes(c.poincare_domain)).unwrap();
    match &c.condition_alpha {
        Some(a) => writeln!(t, "normal form (1 + alpha) A x with alpha = {}", a.display_with("x")).unwrap(),
        None => t.push_str("normal form is not (1 + alpha) A x\n"),
    }
    writeln!(t, "small divisors, k = 1..{k_max}:").unwrap();
    t.push_str("  k  omega_k^2  term (float)  partial sum (float)\n");
    for (term, sum) in c.omega.terms.iter().zip(&c.omega.partial_sums) {
        let w = term.omega_sq.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into());
        writeln!(t, "  {}  {}  {:.6e}  {:.6e}", term.k, w, term.term(), sum).unwrap();
    }
    writeln!(t, "  lattice lower bound on omega^2: {}", c.omega.lattice_bound_sq).unwrap();
    t.push_str("advisories:\n");
    for a in &c.advisories {
        writeln!(t, "  {}: {} ({})", a.kind.key(), a.status, a.detail).unwrap();
    }
    writeln!(t, "poincare domain implies no invariance relations: {}", if c.cross_check_ok { "pass" } else { "FAIL" })
        .unwrap();
    let json = json!({
        "poincare_domain": c.poincare_domain,
        "alpha": c.condition_alpha.as_ref().map(poly_json),
        "omega": c.omega.terms.iter().zip(&c.omega.partial_sums).map(|(term, s)| json!({
            "k": term.k,
            "omega_sq": term.omega_sq.as_ref().map(ToString::to_string),
            "float": { "term": term.term(), "partial_sum": s },
        })).collect::<Vec<_>>(),
        "lattice_bound_sq": c.omega.lattice_bound_sq.to_string(),
        "advisories": c.advisories.iter().map(|a| json!({
            "key": a.kind.key(), "status": a.status.to_string(), "detail": a.detail,
        })).collect::<Vec<_>>(),
        "cross_check": c.cross_check_ok,
    });
    Report::new(t, json, c.cross_check_ok)
}

pub fn simulation(x0: &[f64], t_end: f64, d: &OrbitDemo, freqs: &[Option<f64>]) -> Report {
    let mut t = String::new();
    writeln!(t, "x0 (float): {x0:?}").unwrap();
    writeln!(t, "horizon: {t_end}  step: {} (float)  scheme: {}", d.linear.dt, d.linear.scheme).unwrap();
    writeln!(t, "diverged: {}", d.linear.diverged || d.direct.diverged || d.phi.diverged).unwrap();
    writeln!(t, "max |x_blocks - x_normal_form| (float): {:.6e}", d.max_deviation).unwrap();
    writeln!(t, "max manifold drift (float): {:.6e}", d.manifold_drift).unwrap();
    let last = d.phi.complex_state(d.phi.states.len() - 1);
    for (a, v) in last.iter().enumerate() {
        writeln!(t, "phi{}(T) (float): {:.12}{:+.12}i", a + 1, v.re, v.im).unwrap();
    }
    match &d.phi_limit {
        Some(_) => t.push_str("orbit-space field settled at phi(T)\n"),
        None => t.push_str("orbit-space field not settled by T\n"),
    }
    if let Some(f) = &d.frozen_f {
        t.push_str(&frozen_text(&FrozenSystem::Approximate { f: f.clone() }));
    }
    for (i, w) in freqs.iter().enumerate() {
        if let Some(w) = w {
            writeln!(t, "x{} phase velocity on [T/2, T] (float): {:.9}", i + 1, w).unwrap();
        }
    }
    let json = json!({
        "float": {
            "x0": x0,
            "horizon": t_end,
            "dt": d.linear.dt,
            "max_deviation": d.max_deviation,
            "manifold_drift": d.manifold_drift,
            "phi_final": last.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            "phase_velocity": freqs,
            "frozen_f": d.frozen_f.as_ref().map(|f| f.iter().map(|r| r.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()).collect::<Vec<_>>()),
        },
        "scheme": d.linear.scheme,
        "diverged": d.linear.diverged || d.direct.diverged || d.phi.diverged,
        "settled": d.phi_limit.is_some(),
    });
    Report::new(t, json, true)
}

pub fn scaling(s: &ScalingReport, order: u32, t_end: f64, dt: f64) -> Report {
    let mut t = String::new();
    writeln!(t, "order: {order}  horizon: {t_end}  step: {dt} (float)").unwrap();
    t.push_str("eps  max conjugacy error (float)\n");
    for (e, err) in &s.samples {
        writeln!(t, "{e}  {err:.6e}").unwrap();
    }
    for e in &s.excluded {
        writeln!(t, "{e}  diverged, excluded").unwrap();
    }
    let fit = match &s.fit {
        ScalingFit::Slope { slope, .. } => {
            writeln!(t, "fitted slope (float): {slope:.4}").unwrap();
            json!({ "kind": "slope", "float": { "slope": slope } })
        }
        ScalingFit::Exact => {
            t.push_str("errors at noise floor: exact\n");
            json!({ "kind": "exact" })
        }
        ScalingFit::NoFit => {
            t.push_str("fewer than three usable samples: no fit\n");
            json!({ "kind": "none" })
        }
    };
    let json = json!({
        "order": order,
        "float": { "samples": s.samples, "horizon": t_end, "dt": dt },
        "excluded": s.excluded,
        "fit": fit,
    });
    Report::new(t, json, true)
}
