//! Line oriented text format for an algebra with named subspaces.
//!
//! ```text
//! # strictly upper triangular entries of the comment are ignored
//! algebra heisenberg3 dim 3
//! basis X1 Y1 Z
//! [X1,Y1] = Z
//! matrix 3 X1=E(1,2)
//! matrix 3 Y1=E(2,3)
//! matrix 3 Z=E(1,3)
//! chart Z = zeta
//! sub v = X1 + Z
//! ```
//!
//! Unlisted brackets are zero.  Bracket lines must name the earlier basis
//! element first; `[A,A]` is rejected.  `matrix` lines attach an elementary
//! matrix presentation (one line per basis element, shared size).  `chart`
//! lines override the quotient chart coordinate derived from a label.  All
//! errors carry the offending line number.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::algebra::{LieAlgebra, MatrixPresentation};
use crate::catalog::{format_combination, CatalogEntry};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{parse_rational, Q};
use crate::subspace::Subspace;

/// Parsed file contents: the algebra plus its named subspaces.
#[derive(Debug, Clone)]
pub struct LieFile {
    pub algebra: LieAlgebra,
    pub subspaces: BTreeMap<String, Subspace>,
}

impl LieFile {
    pub fn new(algebra: LieAlgebra) -> LieFile {
        LieFile { algebra, subspaces: BTreeMap::new() }
    }

    /// File view of a catalog entry, with its pair under the names `v`, `h`
    /// and the distinguished normal subgroup under `n`.
    pub fn from_entry(e: &CatalogEntry) -> LieFile {
        let mut subspaces = BTreeMap::new();
        if let Some(v) = &e.v {
            subspaces.insert("v".to_string(), v.clone());
        }
        if let Some(h) = &e.h {
            subspaces.insert("h".to_string(), h.clone());
        }
        if let Some(n) = &e.normal {
            subspaces.insert("n".to_string(), n.clone());
        }
        LieFile { algebra: e.algebra.clone(), subspaces }
    }

    pub fn subspace(&self, name: &str) -> Result<&Subspace> {
        self.subspaces
            .get(name)
            .ok_or_else(|| Error::UnknownEntry(format!("no subspace named '{name}' in the file")))
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parse `c1*A + c2*B - C` into dense coordinates over `labels`.
fn parse_combination(labels: &[String], s: &str, line: usize) -> Result<Vec<Q>> {
    let mut row = vec![Q::zero(); labels.len()];
    let s = s.trim();
    if s.is_empty() {
        return Err(err(line, "empty linear combination"));
    }
    if s == "0" {
        return Ok(row);
    }
    // split into signed terms; '-' only ever starts a term in this grammar
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    for c in s.chars() {
        match c {
            '+' | '-' => {
                if cur.trim().is_empty() && !terms.is_empty() {
                    return Err(err(line, "two consecutive signs in a combination"));
                }
                if !cur.trim().is_empty() {
                    terms.push((negative, cur.trim().to_string()));
                } else if c == '+' {
                    return Err(err(line, "a combination cannot start with '+'"));
                }
                cur.clear();
                negative = c == '-';
            }
            _ => cur.push(c),
        }
    }
    if cur.trim().is_empty() {
        return Err(err(line, "trailing sign in a combination"));
    }
    terms.push((negative, cur.trim().to_string()));

    for (neg, term) in terms {
        let (coeff, label) = match term.split_once('*') {
            Some((c, l)) => (
                parse_rational(c).map_err(|_| err(line, format!("invalid coefficient '{c}'")))?,
                l.trim(),
            ),
            None => (Q::one(), term.as_str()),
        };
        let idx = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| err(line, format!("unknown basis label '{label}'")))?;
        let signed = if neg { -coeff } else { coeff };
        row[idx] += signed;
    }
    Ok(row)
}

fn parse_elementary(s: &str, size: usize, line: usize) -> Result<(String, usize, usize)> {
    let (label, rhs) = s
        .split_once('=')
        .ok_or_else(|| err(line, "matrix lines look like 'matrix <m> <label>=E(i,j)'"))?;
    let rhs = rhs.trim();
    let inner = rhs
        .strip_prefix("E(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err(line, format!("expected an elementary matrix 'E(i,j)', got '{rhs}'")))?;
    let (i, j) = inner
        .split_once(',')
        .ok_or_else(|| err(line, "elementary matrices need two indices"))?;
    let parse_idx = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| err(line, format!("invalid matrix index '{}'", t.trim())))
    };
    let (i, j) = (parse_idx(i)?, parse_idx(j)?);
    if i == 0 || j == 0 || i > size || j > size {
        return Err(err(line, format!("matrix indices must lie in 1..={size}")));
    }
    if i >= j {
        return Err(err(line, "presentation matrices must be strictly upper triangular"));
    }
    Ok((label.trim().to_string(), i, j))
}

/// Parse the text of a `.lie` file.
pub fn parse_lie(text: &str) -> Result<LieFile> {
    let mut header: Option<(String, usize, usize)> = None;
    let mut labels: Option<Vec<String>> = None;
    let mut brackets: Vec<((usize, usize), Vec<Q>)> = Vec::new();
    let mut bracket_lines: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut matrix: Option<(usize, usize, BTreeMap<usize, (usize, usize)>)> = None;
    let mut charts: Vec<(usize, String)> = Vec::new();
    let mut subs: Vec<(String, Vec<Vec<Q>>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = match content.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (content, ""),
        };

        if header.is_none() {
            if keyword != "algebra" {
                return Err(err(lineno, "the file must start with 'algebra <name> dim <n>'"));
            }
            let mut toks = rest.split_whitespace();
            let name = toks.next().ok_or_else(|| err(lineno, "missing algebra name"))?;
            match (toks.next(), toks.next(), toks.next()) {
                (Some("dim"), Some(n), None) => {
                    let n = n
                        .parse::<usize>()
                        .map_err(|_| err(lineno, format!("invalid dimension '{n}'")))?;
                    header = Some((name.to_string(), n, lineno));
                }
                _ => return Err(err(lineno, "expected 'algebra <name> dim <n>'")),
            }
            continue;
        }
        let dim = header.as_ref().unwrap().1;

        if keyword == "basis" {
            if labels.is_some() {
                return Err(err(lineno, "duplicate basis line"));
            }
            let ls: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if ls.len() != dim {
                return Err(err(
                    lineno,
                    format!("basis lists {} labels but the dimension is {dim}", ls.len()),
                ));
            }
            for (a, l) in ls.iter().enumerate() {
                if ls[..a].contains(l) {
                    return Err(err(lineno, format!("duplicate basis label '{l}'")));
                }
            }
            labels = Some(ls);
            continue;
        }

        let labels = labels
            .as_ref()
            .ok_or_else(|| err(lineno, "the basis line must come before this line"))?;

        if keyword.starts_with('[') {
            let (lhs, rhs) = content
                .split_once('=')
                .ok_or_else(|| err(lineno, "bracket lines look like '[A,B] = <combination>'"))?;
            let inner = lhs
                .trim()
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| err(lineno, "malformed bracket '[A,B]'"))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| err(lineno, "a bracket names two basis elements"))?;
            let (a, b) = (a.trim(), b.trim());
            let pos = |t: &str| {
                labels
                    .iter()
                    .position(|l| l == t)
                    .ok_or_else(|| err(lineno, format!("unknown basis label '{t}'")))
            };
            let (p, r) = (pos(a)?, pos(b)?);
            if p == r {
                return Err(err(lineno, format!("[{a},{a}] is zero by antisymmetry; omit it")));
            }
            if p > r {
                return Err(err(
                    lineno,
                    format!("brackets list the earlier basis element first: write [{b},{a}]"),
                ));
            }
            if bracket_lines.contains_key(&(p, r)) {
                return Err(err(lineno, format!("duplicate bracket [{a},{b}]")));
            }
            let row = parse_combination(labels, rhs, lineno)?;
            bracket_lines.insert((p, r), lineno);
            if row.iter().any(|c| !c.is_zero()) {
                brackets.push(((p, r), row));
            }
            continue;
        }

        match keyword {
            "matrix" => {
                let (size_tok, assign) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err(lineno, "matrix lines look like 'matrix <m> <label>=E(i,j)'"))?;
                let size = size_tok
                    .parse::<usize>()
                    .map_err(|_| err(lineno, format!("invalid matrix size '{size_tok}'")))?;
                let (first_line, known, assignments) =
                    matrix.get_or_insert_with(|| (lineno, size, BTreeMap::new()));
                let _ = first_line;
                if *known != size {
                    return Err(err(
                        lineno,
                        format!("matrix size {size} differs from {known} given earlier"),
                    ));
                }
                let (label, mi, mj) = parse_elementary(&assign.replace(' ', ""), size, lineno)?;
                let idx = labels
                    .iter()
                    .position(|l| *l == label)
                    .ok_or_else(|| err(lineno, format!("unknown basis label '{label}'")))?;
                if assignments.insert(idx, (mi, mj)).is_some() {
                    return Err(err(lineno, format!("duplicate matrix line for '{label}'")));
                }
            }
            "chart" => {
                let (label, name) = rest
                    .split_once('=')
                    .ok_or_else(|| err(lineno, "chart lines look like 'chart <label> = <name>'"))?;
                let label = label.trim();
                let name = name.trim();
                if name.is_empty() {
                    return Err(err(lineno, "empty chart name"));
                }
                let idx = labels
                    .iter()
                    .position(|l| l == label)
                    .ok_or_else(|| err(lineno, format!("unknown basis label '{label}'")))?;
                if charts.iter().any(|(i, _)| *i == idx) {
                    return Err(err(lineno, format!("duplicate chart line for '{label}'")));
                }
                charts.push((idx, name.to_string()));
            }
            "sub" => {
                let (name, combos) = rest
                    .split_once('=')
                    .ok_or_else(|| err(lineno, "sub lines look like 'sub <name> = <combinations>'"))?;
                let name = name.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(err(lineno, "subspace names are single words"));
                }
                if subs.iter().any(|(n, _)| n == name) {
                    return Err(err(lineno, format!("duplicate subspace '{name}'")));
                }
                let mut rows = Vec::new();
                for combo in combos.split(',') {
                    let row = parse_combination(labels, combo, lineno)?;
                    if row.iter().any(|c| !c.is_zero()) {
                        rows.push(row);
                    }
                }
                subs.push((name.to_string(), rows));
            }
            "algebra" => return Err(err(lineno, "duplicate algebra line")),
            other => return Err(err(lineno, format!("unknown keyword '{other}'"))),
        }
    }

    let (name, dim, header_line) =
        header.ok_or_else(|| err(text.lines().count().max(1), "missing algebra line"))?;
    let labels = match labels {
        Some(l) => l,
        None if dim == 0 => Vec::new(),
        None => return Err(err(header_line, "missing basis line")),
    };

    let algebra = LieAlgebra::new(&name, labels.clone(), brackets).map_err(|e| match e {
        Error::Jacobi { i, j, k, .. } => {
            let line = [(i, j), (i, k), (j, k)]
                .iter()
                .filter_map(|p| bracket_lines.get(p))
                .max()
                .copied()
                .unwrap_or(header_line);
            err(line, format!(
                "the Jacobi identity fails for ({}, {}, {})",
                labels[i], labels[j], labels[k]
            ))
        }
        other => err(header_line, other.to_string()),
    })?;

    let algebra = match matrix {
        Some((first_line, size, assignments)) => {
            for (k, l) in labels.iter().enumerate() {
                if !assignments.contains_key(&k) {
                    return Err(err(first_line, format!("no matrix line for basis label '{l}'")));
                }
            }
            let mats = (0..dim)
                .map(|k| {
                    let (i, j) = assignments[&k];
                    let mut m = Matrix::zeros(size, size);
                    m[(i - 1, j - 1)] = Q::one();
                    m
                })
                .collect();
            algebra
                .with_presentation(MatrixPresentation { size, mats })
                .map_err(|e| err(first_line, e.to_string()))?
        }
        None => algebra,
    };
    let algebra = algebra
        .with_chart_names(charts)
        .map_err(|e| err(header_line, e.to_string()))?;

    let mut subspaces = BTreeMap::new();
    for (sname, rows) in subs {
        subspaces.insert(sname, Subspace::from_rows(algebra.id(), dim, rows));
    }
    Ok(LieFile { algebra, subspaces })
}

/// Single unit entry of an upper triangular matrix, if the matrix is of that
/// shape.
fn as_elementary(m: &Matrix) -> Option<(usize, usize)> {
    let mut found = None;
    for i in 0..m.rows {
        for j in 0..m.cols {
            if !m[(i, j)].is_zero() {
                if found.is_some() || !m[(i, j)].is_one() {
                    return None;
                }
                found = Some((i, j));
            }
        }
    }
    found
}

/// Render the canonical text of a file: header, basis, brackets in index
/// order, matrix lines (only for presentations made of elementary
/// matrices), chart overrides, subspaces in name order.
pub fn emit_lie(file: &LieFile) -> String {
    let alg = &file.algebra;
    let dim = alg.dim();
    let mut out = String::new();
    writeln!(out, "algebra {} dim {}", alg.name, dim).unwrap();
    if dim > 0 {
        writeln!(out, "basis {}", alg.labels.join(" ")).unwrap();
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let w = alg.bracket(&alg.basis_vector(i), &alg.basis_vector(j)).unwrap();
            if !w.is_zero() {
                writeln!(
                    out,
                    "[{},{}] = {}",
                    alg.labels[i],
                    alg.labels[j],
                    format_combination(alg, &w.coords)
                )
                .unwrap();
            }
        }
    }
    if let Some(p) = &alg.presentation {
        let cells: Option<Vec<(usize, usize)>> = p.mats.iter().map(as_elementary).collect();
        if let Some(cells) = cells {
            for (k, (i, j)) in cells.into_iter().enumerate() {
                writeln!(out, "matrix {} {}=E({},{})", p.size, alg.labels[k], i + 1, j + 1)
                    .unwrap();
            }
        }
    }
    for i in 0..dim {
        let name = alg.chart_name(i);
        if name != alg.labels[i].to_lowercase() {
            writeln!(out, "chart {} = {}", alg.labels[i], name).unwrap();
        }
    }
    for (name, sp) in &file.subspaces {
        let combos: Vec<String> = sp
            .basis_vectors()
            .iter()
            .map(|v| format_combination(alg, &v.coords))
            .collect();
        let rhs = if combos.is_empty() { "0".to_string() } else { combos.join(", ") };
        writeln!(out, "sub {name} = {rhs}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, entry};
    use crate::group::star_via_presentation;
    use crate::scalar::q;

    #[test]
    fn parses_a_small_file_with_every_line_kind() {
        let text = "\
# three dimensional example
algebra heis dim 3
basis X Y Z   # labels
[X,Y] = Z
matrix 3 X=E(1,2)
matrix 3 Y=E(2,3)
matrix 3 Z=E(1,3)
chart Z = zeta
sub v = X + 2*Y - 1/2*Z
sub trivial = 0
";
        let f = parse_lie(text).unwrap();
        assert_eq!(f.algebra.dim(), 3);
        assert_eq!(f.algebra.chart_name(2), "zeta");
        assert!(f.algebra.presentation.is_some());
        let v = f.subspace("v").unwrap();
        assert_eq!(v.dim(), 1);
        assert!(v.contains(&f.algebra.vector(vec![q(1), q(2), -q(1) / q(2)]).unwrap()));
        assert!(f.subspace("trivial").unwrap().is_zero());
        assert!(f.subspace("w").is_err());

        // the presentation round of the parser feeds the oracle
        let x = f.algebra.basis_vector(0);
        let y = f.algebra.basis_vector(1);
        let by_table = crate::group::star(&f.algebra, &x, &y).unwrap();
        assert_eq!(star_via_presentation(&f.algebra, &x, &y).unwrap(), by_table);
    }

    #[test]
    fn winkelmann_fixture_parses_to_the_catalog_entry() {
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures/winkelmann8.lie"
        ))
        .unwrap();
        let f = parse_lie(&text).unwrap();
        assert_eq!(f.algebra.dim(), 8);
        let brackets = text.lines().filter(|l| l.trim_start().starts_with('[')).count();
        assert_eq!(brackets, 4);
        let e = entry("winkelmann8").unwrap();
        assert_eq!(f.subspace("v").unwrap().basis_rows().count(), 2);
        assert_eq!(
            f.subspace("v").unwrap().basis_vectors()[0].coords,
            e.v.as_ref().unwrap().basis_vectors()[0].coords
        );
    }

    fn same_algebra(a: &LieAlgebra, b: &LieAlgebra) -> bool {
        if a.name != b.name || a.labels != b.labels || a.dim() != b.dim() {
            return false;
        }
        for i in 0..a.dim() {
            if a.chart_name(i) != b.chart_name(i) {
                return false;
            }
            for j in (i + 1)..a.dim() {
                let x = a.bracket(&a.basis_vector(i), &a.basis_vector(j)).unwrap();
                let y = b.bracket(&b.basis_vector(i), &b.basis_vector(j)).unwrap();
                if x.coords != y.coords {
                    return false;
                }
            }
        }
        a.presentation == b.presentation
    }

    #[test]
    fn roundtrip_is_the_identity_on_canonical_text() {
        for e in catalog() {
            let file = LieFile::from_entry(&e);
            let text = emit_lie(&file);
            let parsed = parse_lie(&text).unwrap_or_else(|err| {
                panic!("{}: canonical text does not parse: {err}\n{text}", e.name)
            });
            assert!(same_algebra(&file.algebra, &parsed.algebra), "{} algebra drifts", e.name);
            for (name, sp) in &file.subspaces {
                assert_eq!(
                    parsed.subspace(name).unwrap().basis_rows().collect::<Vec<_>>(),
                    sp.basis_rows().collect::<Vec<_>>(),
                    "{}/{name} drifts",
                    e.name
                );
            }
            assert_eq!(emit_lie(&parsed), text, "{} text drifts", e.name);
        }
    }

    #[test]
    fn fixture_files_match_their_entries_byte_for_byte() {
        for name in ["winkelmann8", "yoshino7", "upper4", "heis5"] {
            let path = format!("{}/fixtures/{name}.lie", env!("CARGO_MANIFEST_DIR"));
            let text = std::fs::read_to_string(&path).unwrap();
            let expected = emit_lie(&LieFile::from_entry(&entry(name).unwrap()));
            assert_eq!(text, expected, "{name} fixture is stale");
            let parsed = parse_lie(&text).unwrap();
            assert!(same_algebra(&parsed.algebra, &entry(name).unwrap().algebra));
        }
    }

    // regenerate the fixture files after a catalog change:
    //   cargo test -p biquotient regenerate_fixtures -- --ignored
    #[test]
    #[ignore]
    fn regenerate_fixtures() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
        std::fs::create_dir_all(dir).unwrap();
        for name in ["winkelmann8", "yoshino7", "upper4", "heis5"] {
            let text = emit_lie(&LieFile::from_entry(&entry(name).unwrap()));
            std::fs::write(format!("{dir}/{name}.lie"), text).unwrap();
        }
    }

    #[test]
    fn rejects_a_bracket_of_an_element_with_itself() {
        let text = "algebra a dim 2\nbasis X1 X2\n[X1,X1] = X2\n";
        match parse_lie(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("antisymmetry"), "{msg}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_out_of_order_brackets() {
        let text = "algebra a dim 3\nbasis X Y Z\n[Y,X] = Z\n";
        match parse_lie(text) {
            Err(Error::Parse { line: 3, msg }) => assert!(msg.contains("[X,Y]"), "{msg}"),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn reports_jacobi_failures_on_the_latest_involved_line() {
        // the cyclic sum over (X1, X2, X3) leaves -X3
        let text = "\
algebra bad dim 3
basis X1 X2 X3
[X1,X2] = X3
[X1,X3] = X1
";
        match parse_lie(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("Jacobi"), "{msg}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn line_numbers_point_at_the_offending_line() {
        let cases = [
            ("algebra a dim 1\nbasis X\nsub v = X + Q\n", 3, "unknown basis label"),
            ("algebra a dim 1\nbasis X\nbogus Y\n", 3, "unknown keyword"),
            ("algebra a dim 2\nbasis X\n", 2, "dimension is 2"),
            ("sub v = X\n", 1, "must start with"),
            ("algebra a dim 2\nbasis X Y\nmatrix 2 X=E(1,2)\n", 3, "no matrix line"),
            ("algebra a dim 1\nbasis X\nmatrix 2 X=E(2,1)\n", 3, "upper triangular"),
            ("algebra a dim 1\nbasis X\nsub v = X -\n", 3, "trailing sign"),
        ];
        for (text, line, needle) in cases {
            match parse_lie(text) {
                Err(Error::Parse { line: l, msg }) => {
                    assert_eq!(l, line, "{text:?}: {msg}");
                    assert!(msg.contains(needle), "{text:?}: {msg}");
                }
                other => panic!("{text:?}: expected a parse error, got {other:?}"),
            }
        }
    }
}
