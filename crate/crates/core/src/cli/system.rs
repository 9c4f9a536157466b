//! Line-oriented system files.
//!
//! ```text
//! # comment
//! dim 2
//! eigenvalue 1 1/1
//! eigenvalue 2 2/1
//! term 2 2 0 1/1
//! block 1 2 rotation 1/1 1/1
//! group generator
//! 0/1 -1/1
//! 1/1 0/1
//! ```
//!
//! Indices are 1-based. A `block i j rotation a b` line adds the real linear
//! block `[[a, -b], [b, a]]` on coordinates `(i, j)` and marks them for
//! complexification. `group element`, `group generator` and `commuting`
//! are followed by `dim` rows of entries. Output of [`serialize`] is
//! canonical: comments and spacing are dropped, terms are merged and sorted.

use std::fmt::Write as _;

use crate::algebra::{ExactMatrix, GaussianRational, MultiIndex, PolyVectorField};
use crate::normalform::RotationBlock;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub block: RotationBlock,
    pub a: GaussianRational,
    pub b: GaussianRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub dim: usize,
    /// Eigenvalues as declared, indexed by coordinate.
    pub eigenvalues: Option<Vec<GaussianRational>>,
    /// Summed `term` lines, excluding block contributions.
    pub terms: PolyVectorField,
    pub blocks: Vec<Block>,
    pub group_elements: Vec<ExactMatrix>,
    pub group_generators: Vec<ExactMatrix>,
    /// Linear parts of commuting symmetry fields.
    pub commuting: Vec<ExactMatrix>,
}

impl SystemFile {
    /// The field: term lines plus declared blocks.
    pub fn field(&self) -> PolyVectorField {
        let mut f = self.terms.clone();
        for b in &self.blocks {
            let (i, j) = (b.block.i, b.block.j);
            let e = |k| MultiIndex::unit(self.dim, k);
            f.add_term(i, e(i), b.a.clone());
            f.add_term(i, e(j), -&b.b);
            f.add_term(j, e(i), b.b.clone());
            f.add_term(j, e(j), b.a.clone());
        }
        f
    }

    pub fn rotation_blocks(&self) -> Vec<RotationBlock> {
        self.blocks.iter().map(|b| b.block.clone()).collect()
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn number(line: usize, tok: &str) -> Result<GaussianRational, ParseError> {
    tok.parse().map_err(|_| err(line, format!("malformed number `{tok}`")))
}

fn index(line: usize, tok: &str, dim: usize, what: &str) -> Result<usize, ParseError> {
    let k: usize = tok.parse().map_err(|_| err(line, format!("malformed {what} `{tok}`")))?;
    if k == 0 || k > dim {
        return Err(err(line, format!("{what} {k} out of range 1..={dim}")));
    }
    Ok(k - 1)
}

enum Pending {
    Element,
    Generator,
    Commuting,
}

pub fn parse_system(text: &str) -> Result<SystemFile, ParseError> {
    let mut dim: Option<usize> = None;
    let mut eig: Vec<Option<GaussianRational>> = Vec::new();
    let mut eig_line = 0;
    let mut terms: Option<PolyVectorField> = None;
    let mut blocks = Vec::new();
    let (mut elements, mut generators, mut commuting) = (Vec::new(), Vec::new(), Vec::new());
    let mut pending: Option<(Pending, usize, Vec<Vec<GaussianRational>>)> = None;

    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if let Some((kind, start, rows)) = &mut pending {
            let n = dim.expect("matrix blocks need dim");
            if toks.len() != n {
                return Err(err(ln, format!("matrix row has {} entries, expected {n}", toks.len())));
            }
            rows.push(toks.iter().map(|t| number(ln, t)).collect::<Result<_, _>>()?);
            if rows.len() == n {
                let m = ExactMatrix::from_rows(std::mem::take(rows)).map_err(|_| err(*start, "ragged matrix"))?;
                match kind {
                    Pending::Element => elements.push(m),
                    Pending::Generator => generators.push(m),
                    Pending::Commuting => commuting.push(m),
                }
                pending = None;
            }
            continue;
        }
        let need_dim = || dim.ok_or_else(|| err(ln, "`dim` must come first"));
        match toks[0] {
            "dim" => {
                if dim.is_some() {
                    return Err(err(ln, "duplicate `dim`"));
                }
                let n: usize = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err(ln, "`dim` takes a positive integer"))?;
                if toks.len() != 2 {
                    return Err(err(ln, "`dim` takes one argument"));
                }
                dim = Some(n);
                eig = vec![None; n];
                terms = Some(PolyVectorField::zero(n));
            }
            "eigenvalue" => {
                let n = need_dim()?;
                if toks.len() != 3 {
                    return Err(err(ln, "expected `eigenvalue <i> <value>`"));
                }
                let i = index(ln, toks[1], n, "eigenvalue index")?;
                if eig[i].is_some() {
                    return Err(err(ln, format!("eigenvalue {} given twice", i + 1)));
                }
                eig[i] = Some(number(ln, toks[2])?);
                eig_line = ln;
            }
            "term" => {
                let n = need_dim()?;
                if toks.len() != n + 3 {
                    return Err(err(ln, format!("expected component, {n} exponents and a coefficient")));
                }
                let comp = index(ln, toks[1], n, "component")?;
                let exps = toks[2..2 + n]
                    .iter()
                    .map(|t| t.parse::<u32>().map_err(|_| err(ln, format!("malformed exponent `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let c = number(ln, toks[n + 2])?;
                if exps.iter().all(|&e| e == 0) {
                    return Err(err(ln, "constant terms are not allowed"));
                }
                terms.as_mut().expect("dim set").add_term(comp, MultiIndex::new(exps), c);
            }
            "block" => {
                let n = need_dim()?;
                if toks.len() != 6 || toks[3] != "rotation" {
                    return Err(err(ln, "expected `block <i> <j> rotation <a> <b>`"));
                }
                let i = index(ln, toks[1], n, "block index")?;
                let j = index(ln, toks[2], n, "block index")?;
                let (a, b) = (number(ln, toks[4])?, number(ln, toks[5])?);
                if !a.is_real() || !b.is_real() {
                    return Err(err(ln, "block entries must be real"));
                }
                let used = |k: usize| blocks.iter().any(|x: &Block| x.block.i == k || x.block.j == k);
                if i == j || used(i) || used(j) {
                    return Err(err(ln, "blocks must use distinct coordinates"));
                }
                blocks.push(Block { block: RotationBlock { i, j }, a, b });
            }
            "group" => {
                need_dim()?;
                let kind = match toks.get(1).copied() {
                    Some("element") if toks.len() == 2 => Pending::Element,
                    Some("generator") if toks.len() == 2 => Pending::Generator,
                    _ => return Err(err(ln, "expected `group element` or `group generator`")),
                };
                pending = Some((kind, ln, Vec::new()));
            }
            "commuting" => {
                need_dim()?;
                if toks.len() != 1 {
                    return Err(err(ln, "`commuting` takes no arguments"));
                }
                pending = Some((Pending::Commuting, ln, Vec::new()));
            }
            other => return Err(err(ln, format!("unknown keyword `{other}`"))),
        }
    }
    if let Some((_, start, _)) = pending {
        return Err(err(start, "matrix block ends early"));
    }
    let dim = dim.ok_or_else(|| err(0, "missing `dim`"))?;
    let eigenvalues = if eig.iter().all(Option::is_none) {
        None
    } else if eig.iter().all(Option::is_some) {
        Some(eig.into_iter().map(Option::unwrap).collect())
    } else {
        return Err(err(eig_line, "eigenvalues must be given for every coordinate or none"));
    };
    Ok(SystemFile {
        dim,
        eigenvalues,
        terms: terms.expect("dim set"),
        blocks,
        group_elements: elements,
        group_generators: generators,
        commuting,
    })
}

fn write_matrix(out: &mut String, header: &str, m: &ExactMatrix) {
    out.push_str(header);
    out.push('\n');
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(ToString::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn serialize(sys: &SystemFile) -> String {
    let mut out = String::new();
    writeln!(out, "dim {}", sys.dim).unwrap();
    if let Some(ev) = &sys.eigenvalues {
        for (i, v) in ev.iter().enumerate() {
            writeln!(out, "eigenvalue {} {}", i + 1, v).unwrap();
        }
    }
    for b in &sys.blocks {
        writeln!(out, "block {} {} rotation {} {}", b.block.i + 1, b.block.j + 1, b.a, b.b).unwrap();
    }
    for (i, m, c) in sys.terms.terms() {
        let exps: Vec<String> = m.exponents().iter().map(ToString::to_string).collect();
        writeln!(out, "term {} {} {}", i + 1, exps.join(" "), c).unwrap();
    }
    for g in &sys.group_generators {
        write_matrix(&mut out, "group generator", g);
    }
    for g in &sys.group_elements {
        write_matrix(&mut out, "group element", g);
    }
    for g in &sys.commuting {
        write_matrix(&mut out, "commuting", g);
    }
    out
}
