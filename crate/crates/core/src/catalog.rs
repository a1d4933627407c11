//! Built-in example algebras, distinguished subalgebra pairs, and their
//! recorded results.
//!
//! Each entry carries a golden block: values the test suite recomputes and
//! compares verbatim.  A golden is tagged with how it was obtained, and the
//! tags are printed by the demo reports so a reader can tell a cited value
//! from a regression-frozen one.

use num_traits::{One, Zero};

use crate::action::{induced_action, AffineAction};
use crate::algebra::{LieAlgebra, MatrixPresentation};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::Polynomial;
use crate::scalar::{q, Q};
use crate::subspace::Subspace;

/// How a recorded value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Stated in the published sources on these examples.
    Literature,
    /// Computed by this library and frozen as a regression value.
    Derived,
    /// Immediate from the definitions.
    Trivial,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Provenance::Literature => "literature",
            Provenance::Derived => "derived",
            Provenance::Trivial => "trivial",
        };
        f.write_str(s)
    }
}

/// One recorded value in canonical rendering.
#[derive(Debug, Clone)]
pub struct Golden {
    pub key: &'static str,
    pub value: String,
    pub provenance: Provenance,
}

impl Golden {
    fn new(key: &'static str, value: impl Into<String>, provenance: Provenance) -> Golden {
        Golden { key, value: value.into(), provenance }
    }
}

/// A named example: an algebra, optional distinguished subalgebras, and the
/// golden block.  `v` acts from the left, `h` from the right.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieAlgebra,
    pub v: Option<Subspace>,
    pub h: Option<Subspace>,
    /// Distinguished normal subalgebra used in reduction walkthroughs.
    pub normal: Option<Subspace>,
    pub goldens: Vec<Golden>,
}

impl CatalogEntry {
    pub fn golden(&self, key: &str) -> Option<&str> {
        self.goldens.iter().find(|g| g.key == key).map(|g| g.value.as_str())
    }

    fn plain(algebra: LieAlgebra, goldens: Vec<Golden>) -> CatalogEntry {
        CatalogEntry {
            name: algebra.name.clone(),
            algebra,
            v: None,
            h: None,
            normal: None,
            goldens,
        }
    }
}

fn unit_row(dim: usize, i: usize) -> Vec<Q> {
    let mut row = vec![q(0); dim];
    row[i] = q(1);
    row
}

fn combo_row(dim: usize, terms: &[(usize, i64)]) -> Vec<Q> {
    let mut row = vec![q(0); dim];
    for &(i, c) in terms {
        row[i] = q(c);
    }
    row
}

fn elementary(size: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(size, size);
    m[(i, j)] = q(1);
    m
}

/// The abelian algebra of dimension `n`, with the column presentation
/// `A_i = E(i, n+1)`.
pub fn abelian(n: usize) -> Result<LieAlgebra> {
    if n == 0 {
        return Err(Error::Precondition("abelian algebra needs dimension at least 1".into()));
    }
    let labels = (1..=n).map(|i| format!("A{i}")).collect();
    let alg = LieAlgebra::new(&format!("abelian{n}"), labels, Vec::new())?;
    let mats = (0..n).map(|i| elementary(n + 1, i, n)).collect();
    alg.with_presentation(MatrixPresentation { size: n + 1, mats })
}

/// The Heisenberg algebra of odd dimension `2k + 1`: basis
/// `X_1…X_k, Y_1…Y_k, Z` with `[X_i, Y_i] = Z`.
pub fn heisenberg(dim: usize) -> Result<LieAlgebra> {
    if dim < 3 || dim % 2 == 0 {
        return Err(Error::Precondition(format!(
            "heisenberg algebras have odd dimension at least 3, got {dim}"
        )));
    }
    let k = (dim - 1) / 2;
    let mut labels: Vec<String> = (1..=k).map(|i| format!("X{i}")).collect();
    labels.extend((1..=k).map(|i| format!("Y{i}")));
    labels.push("Z".to_string());
    let brackets = (0..k).map(|i| ((i, k + i), unit_row(dim, 2 * k))).collect();
    let alg = LieAlgebra::new(&format!("heisenberg{dim}"), labels, brackets)?;
    let size = k + 2;
    let mut mats: Vec<Matrix> = (0..k).map(|i| elementary(size, 0, i + 1)).collect();
    mats.extend((0..k).map(|i| elementary(size, i + 1, k + 1)));
    mats.push(elementary(size, 0, k + 1));
    alg.with_presentation(MatrixPresentation { size, mats })
}

/// Strictly upper triangular `n × n` matrices with the elementary-matrix
/// basis `E_{ij}` ordered row by row; the presentation is the basis itself.
pub fn ut(n: usize) -> Result<LieAlgebra> {
    if n < 2 {
        return Err(Error::Precondition("ut(n) needs n at least 2".into()));
    }
    let mut positions = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            positions.push((i, j));
        }
    }
    let dim = positions.len();
    let index = |i: usize, j: usize| positions.iter().position(|&p| p == (i, j)).unwrap();
    let labels = positions.iter().map(|(i, j)| format!("E{i}{j}")).collect();

    // [E_ij, E_kl] = δ_jk E_il − δ_li E_kj
    let mut brackets = Vec::new();
    for (p, &(i, j)) in positions.iter().enumerate() {
        for (r, &(k, l)) in positions.iter().enumerate().skip(p + 1) {
            let mut row = vec![q(0); dim];
            if j == k {
                row[index(i, l)] += q(1);
            }
            if l == i {
                row[index(k, j)] -= q(1);
            }
            if row.iter().any(|c| !c.is_zero()) {
                brackets.push(((p, r), row));
            }
        }
    }
    let alg = LieAlgebra::new(&format!("ut{n}"), labels, brackets)?;
    let mats = positions.iter().map(|&(i, j)| elementary(n, i - 1, j - 1)).collect();
    alg.with_presentation(MatrixPresentation { size: n, mats })
}

fn winkelmann8_entry() -> Result<CatalogEntry> {
    let dim = 8;
    // X1 X2 Y1 Y2 Y3 Y4 Z1 Z2
    let labels = ["X1", "X2", "Y1", "Y2", "Y3", "Y4", "Z1", "Z2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let brackets = vec![
        ((0, 3), unit_row(dim, 4)),                 // [X1, Y2] = Y3
        ((1, 2), combo_row(dim, &[(4, 1), (7, 1)])), // [X2, Y1] = Y3 + Z2
        ((1, 3), unit_row(dim, 5)),                 // [X2, Y2] = Y4
        ((1, 7), unit_row(dim, 6)),                 // [X2, Z2] = Z1
    ];
    let algebra = LieAlgebra::new("winkelmann8", labels, brackets)?;
    let id = algebra.id();
    let v = Subspace::from_rows(
        id,
        dim,
        vec![combo_row(dim, &[(0, 1), (6, 1)]), combo_row(dim, &[(1, 1), (7, 1)])],
    );
    let h = Subspace::from_rows(id, dim, vec![unit_row(dim, 0), unit_row(dim, 1)]);

    let goldens = vec![
        Golden::new("series", "[8, 4, 1, 0]", Provenance::Literature),
        Golden::new("center", "Y3, Y4, Z1", Provenance::Derived),
        Golden::new(
            "star(X2, Y1)",
            "X2 + Y1 + 1/2*Y3 + 1/12*Z1 + 1/2*Z2",
            Provenance::Derived,
        ),
        Golden::new("induced(X1 + Z1)", "y2*d/dy3 + d/dz1", Provenance::Literature),
        Golden::new(
            "induced(X2 + Z2)",
            "y1*d/dy3 + y2*d/dy4 + (y1 + 1)*d/dz2 + z2*d/dz1",
            Provenance::Literature,
        ),
        Golden::new("slice_search(degree <= 6)", "none found", Provenance::Literature),
        Golden::new("properness_witness(ansatz 4)", "none found", Provenance::Literature),
        Golden::new("h_slice", "Y1, Y2, Y3, Y4, Z1, Z2", Provenance::Literature),
        Golden::new("levi_malcev(v, h)", "none at level 0", Provenance::Derived),
    ];
    Ok(CatalogEntry {
        name: "winkelmann8".into(),
        algebra,
        v: Some(v),
        h: Some(h),
        normal: None,
        goldens,
    })
}

fn yoshino7_entry() -> Result<CatalogEntry> {
    let dim = 7;
    // X1 X2 Y1 Y2 Y3 Z1 Z2
    let labels = ["X1", "X2", "Y1", "Y2", "Y3", "Z1", "Z2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let brackets = vec![
        ((0, 2), unit_row(dim, 3)), // [X1, Y1] = Y2
        ((0, 3), unit_row(dim, 4)), // [X1, Y2] = Y3
        ((0, 4), unit_row(dim, 6)), // [X1, Y3] = Z2
        ((1, 2), unit_row(dim, 5)), // [X2, Y1] = Z1
    ];
    // The published chart swaps the two central coordinates relative to the
    // basis labels: the Z1 direction is the chart coordinate z2 and vice
    // versa.
    let algebra = LieAlgebra::new("yoshino7", labels, brackets)?
        .with_chart_names(vec![(5, "z2".into()), (6, "z1".into())])?;
    let id = algebra.id();
    let v = Subspace::from_rows(
        id,
        dim,
        vec![combo_row(dim, &[(0, 1), (5, 1)]), combo_row(dim, &[(1, 1), (6, 1)])],
    );
    let h = Subspace::from_rows(id, dim, vec![unit_row(dim, 0), unit_row(dim, 1)]);

    let goldens = vec![
        Golden::new("series", "[7, 4, 2, 1, 0]", Provenance::Literature),
        Golden::new(
            "induced(X1 + Z1)",
            "y1*d/dy2 + d/dz2 + y2*d/dy3 + y3*d/dz1",
            Provenance::Literature,
        ),
        Golden::new("induced(X2 + Z2)", "y1*d/dz2 + d/dz1", Provenance::Literature),
        Golden::new(
            "quotient_depths(d_x0 = 1)",
            "y1: 1, y2: 3, y3: 5, z1: 7",
            Provenance::Literature,
        ),
        Golden::new("quotient_depth_note", "g^(6) != 0", Provenance::Literature),
        Golden::new(
            "properness_witness(ansatz 4)",
            "t1 = t, t2 = -1/6*w*t^2; y1 = -2*w*t^-1, y2 = w, z2 = 0, y3 = 0, z1 = 0 [w^2 = -3]",
            Provenance::Derived,
        ),
    ];
    Ok(CatalogEntry {
        name: "yoshino7".into(),
        algebra,
        v: Some(v),
        h: Some(h),
        normal: None,
        goldens,
    })
}

fn upper4_entry() -> Result<CatalogEntry> {
    // ut(4) basis order: E12 E13 E14 E23 E24 E34.
    let algebra = ut(4)?.with_chart_names(vec![
        (0, "y1".into()),
        (1, "y3".into()),
        (2, "z".into()),
        (5, "y2".into()),
    ])?;
    let id = algebra.id();
    let dim = algebra.dim();
    let v = Subspace::from_rows(id, dim, vec![combo_row(dim, &[(2, 1), (3, 1)])]);
    let h = Subspace::from_rows(id, dim, vec![unit_row(dim, 3), unit_row(dim, 4)]);
    let normal = Subspace::from_rows(
        id,
        dim,
        vec![unit_row(dim, 1), unit_row(dim, 2), unit_row(dim, 3), unit_row(dim, 4)],
    );

    let goldens = vec![
        Golden::new("series", "[6, 3, 1, 0]", Provenance::Derived),
        Golden::new(
            "induced(E23 + E14)",
            "-y1*d/dy3 + (-y1*y2 + 1)*d/dz",
            Provenance::Literature,
        ),
        Golden::new("slice_function", "-y2*y3 + z", Provenance::Literature),
        Golden::new("normal_closure(v)", "E13, E14, E23, E24", Provenance::Literature),
        Golden::new("family_split", "Y0 = E34 fixing h", Provenance::Derived),
    ];
    Ok(CatalogEntry {
        name: "upper4".into(),
        algebra,
        v: Some(v),
        h: Some(h),
        normal: Some(normal),
        goldens,
    })
}

fn heis5_entry() -> Result<CatalogEntry> {
    // X1 X2 Y1 Y2 Z with [X1, Y1] = [X2, Y2] = Z.
    let algebra = heisenberg(5)?;
    let id = algebra.id();
    let dim = 5;
    let v = Subspace::from_rows(id, dim, vec![combo_row(dim, &[(0, 1), (4, 1)])]);
    let h = Subspace::from_rows(id, dim, vec![unit_row(dim, 1)]);

    let goldens = vec![
        Golden::new("series", "[5, 1, 0]", Provenance::Trivial),
        Golden::new("freeness", "certified by a constant minor", Provenance::Derived),
        Golden::new(
            "induced(X1 + Z)",
            "d/dx1 + (1/2*y1 + 1)*d/dz",
            Provenance::Derived,
        ),
        Golden::new("degree_one_slice", "x1", Provenance::Derived),
    ];
    Ok(CatalogEntry {
        name: "heis5".into(),
        algebra,
        v: Some(v),
        h: Some(h),
        normal: None,
        goldens,
    })
}

/// Representative entries, one per family plus every named example.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        entry("abelian3").unwrap(),
        entry("heisenberg3").unwrap(),
        entry("ut3").unwrap(),
        entry("heis5").unwrap(),
        entry("upper4").unwrap(),
        entry("winkelmann8").unwrap(),
        entry("yoshino7").unwrap(),
    ]
}

/// Names accepted by `entry`; the three families also take any legal
/// dimension suffix.
pub fn catalog_names() -> Vec<&'static str> {
    vec!["abelian<n>", "heisenberg<2k+1>", "ut<n>", "heis5", "upper4", "winkelmann8", "yoshino7"]
}

fn family_entry(name: &str) -> Option<Result<CatalogEntry>> {
    for (prefix, build) in [
        ("abelian", abelian as fn(usize) -> Result<LieAlgebra>),
        ("heisenberg", heisenberg),
        ("ut", ut),
    ] {
        if let Some(rest) = name.strip_prefix(prefix) {
            if let Ok(n) = rest.parse::<usize>() {
                return Some(build(n).map(|alg| {
                    let series: Vec<usize> =
                        alg.central_series().iter().map(|s| s.dim()).collect();
                    let goldens = vec![Golden::new(
                        "series",
                        format!("{series:?}"),
                        Provenance::Trivial,
                    )];
                    CatalogEntry::plain(alg, goldens)
                }));
            }
        }
    }
    None
}

/// Look up a catalog entry by name.
pub fn entry(name: &str) -> Result<CatalogEntry> {
    match name {
        "winkelmann8" => winkelmann8_entry(),
        "yoshino7" => yoshino7_entry(),
        "upper4" => upper4_entry(),
        "heis5" => heis5_entry(),
        _ => family_entry(name).unwrap_or_else(|| Err(Error::UnknownEntry(name.to_string()))),
    }
}

/// Induced quotient action of the whole left factor: one derivation per
/// basis vector of `v`, composed into a single multi-parameter action.
pub fn pair_action(entry: &CatalogEntry) -> Result<AffineAction> {
    let (v, h) = match (&entry.v, &entry.h) {
        (Some(v), Some(h)) => (v, h),
        _ => {
            return Err(Error::Precondition(format!(
                "catalog entry {} has no distinguished pair",
                entry.name
            )))
        }
    };
    let gens: Vec<Derivation> = v
        .basis_vectors()
        .iter()
        .map(|x0| Ok(induced_action(&entry.algebra, h, x0)?.derivation()))
        .collect::<Result<_>>()?;
    let params = (1..=gens.len()).map(|i| format!("t{i}")).collect();
    AffineAction::from_derivations(params, &gens)
}

/// Named polynomial actions used by the properness search examples.
pub fn action_fixture(name: &str) -> Result<AffineAction> {
    match name {
        "translation2" => {
            let n = 4;
            Ok(AffineAction {
                params: vec!["t1".into(), "t2".into()],
                coords: vec!["x1".into(), "x2".into()],
                images: vec![
                    Polynomial::var(n, 2).add(&Polynomial::var(n, 0)),
                    Polynomial::var(n, 3).add(&Polynomial::var(n, 1)),
                ],
            })
        }
        "winkelmann8-action" => pair_action(&entry("winkelmann8")?),
        "yoshino7-action" => pair_action(&entry("yoshino7")?),
        "heis5-action" => pair_action(&entry("heis5")?),
        _ => Err(Error::UnknownEntry(name.to_string())),
    }
}

/// Named derivations used by the depth-bound examples.
pub fn derivation_fixture(name: &str) -> Result<Derivation> {
    match name {
        "yoshino-quotient" => {
            // The second generator's quotient kills its own chart line; the
            // first generator then acts on (y1, y2, y3, z1).
            let n = 4;
            let v = |i| Polynomial::var(n, i);
            let comps = vec![
                Polynomial::zero(n),
                v(0).mul(&v(0)).neg(),
                v(0).mul(&v(1)).neg(),
                Polynomial::one(n).sub(&v(0).mul(&v(2))),
            ];
            Derivation::new(
                vec!["y1".into(), "y2".into(), "y3".into(), "z1".into()],
                comps,
            )
        }
        _ => Err(Error::UnknownEntry(name.to_string())),
    }
}

/// Render a coordinate vector as a signed combination of basis labels.
pub fn format_combination(alg: &LieAlgebra, coords: &[Q]) -> String {
    let mut out = String::new();
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = if c < &q(0) { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if c < &q(0) {
                out.push('-');
            }
        } else if c < &q(0) {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if !mag.is_one() {
            out.push_str(&crate::scalar::fmt_q(&mag));
            out.push('*');
        }
        out.push_str(&alg.labels[i]);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
