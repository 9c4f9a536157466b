use std::path::PathBuf;

use proptest::prelude::*;
use serde_json::Value;

use pdnf_core::algebra::{GaussianRational, MultiIndex, PolyVectorField};
use pdnf_core::cli::{parse_system, run, serialize, SystemFile};

const GOLDEN: &[(&str, &str)] = &[
    ("example1_k2", "analyze"),
    ("example1_k2", "normalize"),
    ("example1_k3", "normalize"),
    ("example2", "analyze"),
    ("example3", "analyze"),
    ("example3", "normalize"),
    ("example4", "symmetry"),
    ("example4", "normalize"),
    ("hopf_critical", "normalize"),
    ("hopf_mu1", "unfold"),
    ("hopf_mu1", "asymptotic"),
    ("hamiltonian_hopf", "analyze"),
    ("hamiltonian_hopf", "unfold"),
];

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn pdnf(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pdnf").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn case_output(file: &str, cmd: &str, format: &str) -> String {
    let path = data(&format!("{file}.sys"));
    let (code, out, err) = pdnf(&["--order", "3", "--format", format, cmd, path.to_str().unwrap()]);
    assert_eq!(code, 0, "{file} {cmd} {format}: {err}");
    out
}

/// Set `UPDATE_GOLDEN=1` to rewrite the expected outputs.
#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for &(file, cmd) in GOLDEN {
        for (format, ext) in [("text", "txt"), ("json", "json")] {
            let got = case_output(file, cmd, format);
            let golden = data(&format!("golden/{file}.{cmd}.{ext}"));
            if update {
                std::fs::write(&golden, &got).unwrap();
                continue;
            }
            let want = std::fs::read_to_string(&golden).unwrap_or_else(|e| panic!("{}: {e}", golden.display()));
            assert_eq!(got, want, "{file} {cmd} {format}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    for cmd in ["normalize", "analyze"] {
        let a = case_output("example3", cmd, "json");
        let b = case_output("example3", cmd, "json");
        assert_eq!(a, b);
    }
    let a = pdnf(&["--seed", "7", "--cases", "20", "selfcheck"]);
    let b = pdnf(&["--seed", "7", "--cases", "20", "selfcheck"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
}

#[test]
fn exit_codes() {
    let linear = data("linear.sys");
    let detuned = data("hopf_mu1.sys");
    assert_eq!(pdnf(&["normalize", linear.to_str().unwrap()]).0, 0);
    assert_eq!(pdnf(&["bogus"]).0, 1);
    assert_eq!(pdnf(&["normalize", "/nonexistent/file.sys"]).0, 1);
    let (code, _, err) = pdnf(&["normalize", detuned.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("do not match"), "{err}");
    assert_eq!(pdnf(&["--help"]).0, 0);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pdnf");
    let status = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["normalize", data("linear.sys").to_str().unwrap()]), Some(0));
    assert_eq!(status(&["bogus"]), Some(1));
    assert_eq!(status(&["normalize", data("hopf_mu1.sys").to_str().unwrap()]), Some(1));
}

fn collect_rationals(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) if s.contains('/') => out.push(s.clone()),
        Value::Array(a) => a.iter().for_each(|x| collect_rationals(x, out)),
        Value::Object(m) => m.values().for_each(|x| collect_rationals(x, out)),
        _ => {}
    }
}

#[test]
fn json_rationals_round_trip() {
    let out = case_output("example1_k2", "normalize", "json");
    let v: Value = serde_json::from_str(&out).unwrap();
    let mut found = Vec::new();
    collect_rationals(&v, &mut found);
    assert!(found.len() > 10);
    for s in found {
        let g: GaussianRational = s.parse().unwrap_or_else(|e| panic!("{s}: {e:?}"));
        assert_eq!(g.to_string(), s);
    }
}

#[test]
fn format_is_canonical() {
    let path = data("example4.sys");
    let (code, once, _) = pdnf(&["format", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let sys = parse_system(&once).unwrap();
    assert_eq!(serialize(&sys), once);
}

fn arb_coeff() -> impl Strategy<Value = GaussianRational> {
    (-9i64..=9, 1i64..=6, -4i64..=4, 1i64..=4).prop_map(|(a, b, c, d)| GaussianRational::complex(a, b, c, d))
}

fn arb_system() -> impl Strategy<Value = SystemFile> {
    (1usize..=3).prop_flat_map(|n| {
        let term = (0..n, proptest::collection::vec(0u32..=3, n), arb_coeff());
        let eig = proptest::option::of(proptest::collection::vec(arb_coeff(), n));
        (Just(n), proptest::collection::vec(term, 0..6), eig)
    })
    .prop_map(|(n, terms, eigenvalues)| {
        let mut f = PolyVectorField::zero(n);
        for (i, e, c) in terms {
            let m = MultiIndex::new(e);
            if m.degree() > 0 {
                f.add_term(i, m, c);
            }
        }
        let eigenvalues = eigenvalues.filter(|ev| ev.iter().all(|e| *e != GaussianRational::from_int(0)));
        SystemFile {
            dim: n,
            eigenvalues,
            terms: f,
            blocks: Vec::new(),
            group_elements: Vec::new(),
            group_generators: Vec::new(),
            commuting: Vec::new(),
        }
    })
}

proptest! {
    #[test]
    fn parse_serialize_round_trip(sys in arb_system()) {
        let text = serialize(&sys);
        let back = parse_system(&text).unwrap();
        prop_assert_eq!(&back, &sys);
        prop_assert_eq!(serialize(&back), text);
    }
}
