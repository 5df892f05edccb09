//! Exact sparse linear algebra over the rationals.
//!
//! Elimination runs on primitive integer rows (denominators cleared, content
//! divided out after every combination), which keeps coefficient growth in
//! check without any division in the inner loop. Pivoting is deterministic:
//! the leading column in the requested column order wins.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::gca::Rational;

pub type SparseVec = BTreeMap<usize, Rational>;

type IntRow = BTreeMap<usize, BigInt>;

/// Row-major sparse rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![SparseVec::new(); rows],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.keys().all(|&c| c < cols)));
        Matrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (&i, v) in col {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i].get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn column(&self, j: usize) -> SparseVec {
        self.data
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.get(&j).map(|v| (i, v.clone())))
            .collect()
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols = vec![SparseVec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (&j, v) in r {
                cols[j].insert(i, v.clone());
            }
        }
        cols
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_rows(self.rows, self.columns())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = SparseVec::new();
            for (&k, a) in r {
                for (&j, b) in &other.data[k] {
                    let e = acc.entry(j).or_insert_with(Rational::zero);
                    *e += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        out
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = Rational::zero();
            for (j, a) in r {
                if let Some(b) = v.get(j) {
                    acc += a * b;
                }
            }
            if !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "dimension mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix::from_rows(self.cols, data)
    }

    /// Sparse triplet text: a header line `% ktforge-sparse rows cols nnz`
    /// followed by one `row col numerator denominator` line per nonzero
    /// entry, 0-based, row-major.
    pub fn to_triplets(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "% ktforge-sparse {} {} {}", self.rows, self.cols, self.nnz());
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                let _ = writeln!(s, "{} {} {} {}", i, j, v.numer(), v.denom());
            }
        }
        s
    }

    pub fn from_triplets(text: &str) -> Option<Matrix> {
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next()?.split_whitespace().collect();
        if header.len() != 5 || header[0] != "%" || header[1] != "ktforge-sparse" {
            return None;
        }
        let rows: usize = header[2].parse().ok()?;
        let cols: usize = header[3].parse().ok()?;
        let nnz: usize = header[4].parse().ok()?;
        let mut m = Matrix::zeros(rows, cols);
        let mut seen = 0;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return None;
            }
            let i: usize = f[0].parse().ok()?;
            let j: usize = f[1].parse().ok()?;
            let n: BigInt = f[2].parse().ok()?;
            let d: BigInt = f[3].parse().ok()?;
            if i >= rows || j >= cols || d.is_zero() {
                return None;
            }
            m.set(i, j, Rational::new(n, d));
            seen += 1;
        }
        (seen == nnz).then_some(m)
    }
}

fn to_int_row(v: &SparseVec, pos: &dyn Fn(usize) -> usize) -> IntRow {
    let mut l = BigInt::one();
    for c in v.values() {
        l = l.lcm(c.denom());
    }
    let mut row = IntRow::new();
    for (&j, c) in v {
        if c.is_zero() {
            continue;
        }
        let scaled = c.numer() * (&l / c.denom());
        row.insert(pos(j), scaled);
    }
    make_primitive(&mut row);
    row
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let flip = row.values().next().is_some_and(|v| v.is_negative());
    if g.is_zero() {
        return;
    }
    if flip {
        g = -g;
    }
    if !g.is_one() {
        for v in row.values_mut() {
            *v = &*v / &g;
        }
    }
}

/// `v <- p*v - a*row` where `p` is the pivot of `row` at `col` and `a = v[col]`.
fn eliminate(v: &mut IntRow, row: &IntRow, col: usize) {
    let a = match v.get(&col) {
        Some(a) => a.clone(),
        None => return,
    };
    let p = &row[&col];
    let g = a.gcd(p);
    let pa = p / &g;
    let aa = &a / &g;
    if !pa.is_one() {
        for x in v.values_mut() {
            *x *= &pa;
        }
    }
    for (&c, r) in row {
        let e = v.entry(c).or_insert_with(BigInt::zero);
        *e -= &aa * r;
        if e.is_zero() {
            v.remove(&c);
        }
    }
    make_primitive(v);
}

/// Row echelon form over primitive integer rows, keyed by pivot position.
#[derive(Debug, Clone, Default)]
struct Echelon {
    pivots: BTreeMap<usize, IntRow>,
}

impl Echelon {
    fn reduce(&self, mut v: IntRow) -> IntRow {
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(&c, _)| c).find(|c| self.pivots.contains_key(c));
            match next {
                Some(c) => {
                    eliminate(&mut v, &self.pivots[&c], c);
                    cursor = c + 1;
                }
                None => return v,
            }
        }
    }

    /// Insert a row, returning its pivot position when it was independent.
    fn insert(&mut self, v: IntRow) -> Option<usize> {
        let r = self.reduce(v);
        let (&lead, _) = r.iter().next()?;
        self.pivots.insert(lead, r);
        Some(lead)
    }

    /// Reduced echelon form as rational rows with unit pivots, ordered by
    /// pivot position.
    fn rref(&self) -> Vec<(usize, BTreeMap<usize, Rational>)> {
        let mut done: BTreeMap<usize, IntRow> = BTreeMap::new();
        for (&c, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            let mut cursor = c + 1;
            loop {
                let next = r.range(cursor..).map(|(&k, _)| k).find(|k| done.contains_key(k));
                match next {
                    Some(k) => {
                        eliminate(&mut r, &done[&k], k);
                        cursor = k + 1;
                    }
                    None => break,
                }
            }
            done.insert(c, r);
        }
        done.into_iter()
            .map(|(c, r)| {
                let p = r[&c].clone();
                let row = r.into_iter().map(|(k, v)| (k, Rational::new(v, p.clone()))).collect();
                (c, row)
            })
            .collect()
    }
}

/// Column order used during elimination: `order[k]` is the original column
/// placed at position `k`.
struct ColumnOrder {
    to_pos: Vec<usize>,
    to_col: Vec<usize>,
}

impl ColumnOrder {
    fn new(cols: usize, order: Option<&[usize]>) -> Self {
        let to_col: Vec<usize> = match order {
            Some(o) => {
                assert_eq!(o.len(), cols, "column order must be a permutation");
                o.to_vec()
            }
            None => (0..cols).collect(),
        };
        let mut to_pos = vec![usize::MAX; cols];
        for (p, &c) in to_col.iter().enumerate() {
            to_pos[c] = p;
        }
        assert!(
            to_pos.iter().all(|&p| p != usize::MAX),
            "column order must be a permutation"
        );
        ColumnOrder { to_pos, to_col }
    }
}

pub fn rank(m: &Matrix) -> usize {
    let ident = |j: usize| j;
    let mut e = Echelon::default();
    let mut r = 0;
    for row in m.rows() {
        if e.insert(to_int_row(row, &ident)).is_some() {
            r += 1;
        }
    }
    r
}

/// Reduced row echelon basis of the row space of `rows` (vectors of length
/// `cols`) with pivots chosen in `order`. Rows are returned with unit pivots,
/// sorted by pivot position, together with the original pivot column.
pub fn rref(cols: usize, rows: &[SparseVec], order: Option<&[usize]>) -> Vec<(usize, SparseVec)> {
    let co = ColumnOrder::new(cols, order);
    let pos = |j: usize| co.to_pos[j];
    let mut e = Echelon::default();
    for r in rows {
        e.insert(to_int_row(r, &pos));
    }
    e.rref()
        .into_iter()
        .map(|(p, row)| {
            let back: SparseVec = row.into_iter().map(|(k, v)| (co.to_col[k], v)).collect();
            (co.to_col[p], back)
        })
        .collect()
}

/// Basis of the null space, one vector per free column (in column order),
/// with that free column set to 1.
pub fn kernel(m: &Matrix) -> Vec<SparseVec> {
    let reduced = rref(m.ncols(), m.rows(), None);
    let pivot_cols: BTreeMap<usize, &SparseVec> = reduced.iter().map(|(c, r)| (*c, r)).collect();
    let mut basis = Vec::new();
    for f in 0..m.ncols() {
        if pivot_cols.contains_key(&f) {
            continue;
        }
        let mut v = SparseVec::new();
        v.insert(f, Rational::one());
        for (&p, row) in &pivot_cols {
            if let Some(c) = row.get(&f) {
                v.insert(p, -c.clone());
            }
        }
        basis.push(v);
    }
    basis
}

/// One solution of `m x = b`, with every free variable set to 0; `None`
/// when the system is inconsistent.
pub fn solve(m: &Matrix, b: &SparseVec) -> Option<SparseVec> {
    let n = m.ncols();
    let mut rows: Vec<SparseVec> = m.rows().to_vec();
    for (i, row) in rows.iter_mut().enumerate() {
        if let Some(v) = b.get(&i) {
            row.insert(n, v.clone());
        }
    }
    for &i in b.keys() {
        assert!(i < m.nrows(), "right-hand side longer than the matrix");
    }
    let reduced = rref(n + 1, &rows, None);
    let mut x = SparseVec::new();
    for (p, row) in reduced {
        if p == n {
            return None;
        }
        if let Some(v) = row.get(&n) {
            x.insert(p, v.clone());
        }
    }
    Some(x)
}

/// A growing subspace, kept in echelon form, answering membership queries.
#[derive(Debug, Clone, Default)]
pub struct IncrementalSpan {
    echelon: Echelon,
}

impl IncrementalSpan {
    pub fn new() -> Self {
        IncrementalSpan::default()
    }

    pub fn dim(&self) -> usize {
        self.echelon.pivots.len()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.echelon.reduce(to_int_row(v, &|j| j)).is_empty()
    }

    /// Add `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.echelon.insert(to_int_row(v, &|j| j)).is_some()
    }
}
