//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a map ordered by total degree, then lexicographically,
//! so printing and leading-term queries are canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{fmt_q, parse_rational, Q};

/// Exponent vector; ordered by total degree, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Polynomial::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut p = Polynomial::zero(nvars);
        p.terms.insert(Monomial(exps), Q::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: Vec<(Monomial, Q)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Q> {
        if self.terms.is_empty() {
            return Some(Q::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.degree() == 0 {
                return Some(c.clone());
            }
        }
        None
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Largest term in the degree-then-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "polynomials from different rings");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "polynomials from different rings");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * Q::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars, "evaluation point of wrong length");
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute `images[i]` for variable `i`; the images fix the ring of
    /// the result.
    pub fn compose(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars, "one image per variable required");
        let target = images.first().map_or(0, Polynomial::nvars);
        let mut acc = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    t = t.mul(&img.pow(e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Move the polynomial into a ring with `new_nvars` variables, sending
    /// variable `i` to variable `map[i]`.
    pub fn embed(&self, map: &[usize], new_nvars: usize) -> Polynomial {
        assert_eq!(map.len(), self.nvars);
        let mut out = Polynomial::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; new_nvars];
            for (i, &e) in m.0.iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars, "one name per variable required");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Q::zero();
            let abs = if neg { -c } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !abs.is_one() || m.degree() == 0 {
                factors.push(fmt_q(&abs));
            }
            for (name, &e) in names.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Parse an expression in `+ - * ^ ( )` over rational literals and the given
/// variable names.
pub fn parse_polynomial(src: &str, names: &[String]) -> Result<Polynomial> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, names };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.fail("trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn fail(&self, msg: &str) -> Error {
        Error::Parse { line: 0, msg: format!("{msg} at byte {} of polynomial", self.pos) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let nvars = self.names.len();
        let mut acc = Polynomial::zero(nvars);
        let mut sign = Q::one();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -sign;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&sign));
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = Q::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -Q::one();
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                // juxtaposition like `2y` is not accepted; names and literals
                // must be joined with `*`
                Some(c) if c == b'(' => {
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.fail("expected exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.fail("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Polynomial> {
        let nvars = self.names.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.fail("expected closing parenthesis"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.base()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'/')
                {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let c = parse_rational(lit)?;
                Ok(Polynomial::constant(nvars, c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let idx = self
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| self.fail(&format!("unknown variable {name}")))?;
                Ok(Polynomial::var(nvars, idx))
            }
            _ => Err(self.fail("expected a factor")),
        }
    }
}

/// Matrix with polynomial entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, data: vec![Polynomial::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n, nvars);
        for i in 0..n {
            m[(i, i)] = Polynomial::one(nvars);
        }
        m
    }

    pub fn from_rational(m: &Matrix, nvars: usize) -> Self {
        let data = (0..m.rows * m.cols)
            .map(|k| Polynomial::constant(nvars, m[(k / m.cols, k % m.cols)].clone()))
            .collect();
        PolyMatrix { rows: m.rows, cols: m.cols, data }
    }

    pub fn nvars(&self) -> usize {
        self.data.first().map_or(0, Polynomial::nvars)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Polynomial::is_zero)
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = PolyMatrix::zeros(self.rows, other.cols, self.nvars());
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(self.nvars());
                for k in 0..self.cols {
                    acc = acc.add(&self[(i, k)].mul(&other[(k, j)]));
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Polynomial]) -> Vec<Polynomial> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Polynomial::zero(self.nvars());
                for k in 0..self.cols {
                    acc = acc.add(&self[(i, k)].mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn scale_poly(&self, p: &Polynomial) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e.mul(p)).collect(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self[(i, j)].clone()))
            .collect();
        PolyMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Determinant by cofactor expansion; intended for small matrices.
    pub fn det(&self) -> Polynomial {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Polynomial::one(self.nvars());
        }
        if n == 1 {
            return self[(0, 0)].clone();
        }
        let mut acc = Polynomial::zero(self.nvars());
        for i in 0..n {
            if self[(i, 0)].is_zero() {
                continue;
            }
            let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (1..n).collect();
            let minor = self.submatrix(&rows, &cols).det();
            let signed = if i % 2 == 0 { minor } else { minor.neg() };
            acc = acc.add(&self[(i, 0)].mul(&signed));
        }
        acc
    }

    pub fn eval(&self, point: &[Q]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].eval(point);
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for PolyMatrix {
    type Output = Polynomial;
    fn index(&self, (i, j): (usize, usize)) -> &Polynomial {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Polynomial {
        &mut self.data[i * self.cols + j]
    }
}

/// Solve `a · x = rhs` where `a` is rational and the right hand side has
/// polynomial entries.  Free variables are set to zero; inconsistent systems
/// are reported.
pub fn solve_with_poly_rhs(a: &Matrix, rhs: &[Polynomial]) -> Result<Vec<Polynomial>> {
    assert_eq!(a.rows, rhs.len(), "dimension mismatch");
    let nvars = rhs.first().map_or(0, Polynomial::nvars);
    let mut m = a.clone();
    let mut b: Vec<Polynomial> = rhs.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prow = 0usize;
    for col in 0..m.cols {
        let Some(sel) = (prow..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        for j in 0..m.cols {
            let tmp = m[(sel, j)].clone();
            m[(sel, j)] = m[(prow, j)].clone();
            m[(prow, j)] = tmp;
        }
        b.swap(sel, prow);
        let inv = m[(prow, col)].recip();
        for j in col..m.cols {
            let v = &m[(prow, j)] * &inv;
            m[(prow, j)] = v;
        }
        b[prow] = b[prow].scale(&inv);
        for r in 0..m.rows {
            if r != prow && !m[(r, col)].is_zero() {
                let f = m[(r, col)].clone();
                for j in col..m.cols {
                    let v = &m[(r, j)] - &f * &m[(prow, j)];
                    m[(r, j)] = v;
                }
                b[r] = b[r].sub(&b[prow].scale(&f));
            }
        }
        pivots.push((prow, col));
        prow += 1;
        if prow == m.rows {
            break;
        }
    }
    for r in prow..m.rows {
        if !b[r].is_zero() {
            return Err(Error::Inconsistent("polynomial system has no solution".into()));
        }
    }
    let mut x = vec![Polynomial::zero(nvars); a.cols];
    for (r, c) in pivots {
        x[c] = b[r].clone();
    }
    Ok(x)
}
