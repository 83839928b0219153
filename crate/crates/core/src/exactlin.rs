//! Exact linear algebra over the rationals.
//!
//! Matrices switch between a dense and a row-sparse layout depending on size.
//! Elimination works on sparse rows bucketed by their leading column, so the
//! cost tracks the number of nonzeros rather than the full shape.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

/// Matrices with both dimensions below this use dense storage.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composition of consecutive maps is nonzero (entry {row},{col})")]
    CompositionNonzero { row: usize, col: usize },
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(-1)^e` as a scalar.
pub fn pm(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_scalar(s: &str) -> Result<Scalar, LinError> {
    let t = s.trim();
    let bad = || LinError::Parse(s.to_string());
    match t.split_once('/') {
        None => t.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

type Row = Vec<(usize, Scalar)>;

#[derive(Clone, Debug)]
enum Store {
    Dense(Vec<Scalar>),
    Sparse(Vec<BTreeMap<usize, Scalar>>),
}

#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    store: Store,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let store = if rows < DENSE_LIMIT && cols < DENSE_LIMIT {
            Store::Dense(vec![Scalar::zero(); rows * cols])
        } else {
            Store::Sparse(vec![BTreeMap::new(); rows])
        };
        Matrix { rows, cols, store }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Result<Self, LinError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rs: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Matrix::from_rows(&rs).expect("ragged integer matrix")
    }

    /// Builds a `rows x columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Result<Self, LinError> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinError::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, v) in c.iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, j, v.clone());
                }
            }
        }
        Ok(m)
    }

    pub fn from_entries(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for (i, j, v) in entries {
            m.add_at(i, j, &v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.store, Store::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        match &self.store {
            Store::Dense(v) => v[i * self.cols + j].clone(),
            Store::Sparse(r) => r[i].get(&j).cloned().unwrap_or_else(Scalar::zero),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        match &mut self.store {
            Store::Dense(v) => v[i * self.cols + j] = x,
            Store::Sparse(r) => {
                if x.is_zero() {
                    r[i].remove(&j);
                } else {
                    r[i].insert(j, x);
                }
            }
        }
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: &Scalar) {
        if x.is_zero() {
            return;
        }
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        match &mut self.store {
            Store::Dense(v) => v[i * self.cols + j] += x,
            Store::Sparse(r) => {
                let e = r[i].entry(j).or_insert_with(Scalar::zero);
                *e += x;
                if e.is_zero() {
                    r[i].remove(&j);
                }
            }
        }
    }

    /// Nonzero entries of row `i`, by increasing column.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, Scalar)> {
        match &self.store {
            Store::Dense(v) => (0..self.cols)
                .filter_map(|j| {
                    let x = &v[i * self.cols + j];
                    (!x.is_zero()).then(|| (j, x.clone()))
                })
                .collect(),
            Store::Sparse(r) => r[i].iter().map(|(j, x)| (*j, x.clone())).collect(),
        }
    }

    /// All nonzero entries in row-major order.
    pub fn entries(&self) -> Vec<(usize, usize, Scalar)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for (j, x) in self.row_entries(i) {
                out.push((i, j, x));
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        match &self.store {
            Store::Dense(v) => v.iter().filter(|x| !x.is_zero()).count(),
            Store::Sparse(r) => r.iter().map(|m| m.len()).sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_entries(self.cols, self.rows, self.entries().into_iter().map(|(i, j, x)| (j, i, x)))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinError> {
        if self.cols != other.rows {
            return Err(LinError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let right: Vec<Row> = (0..other.rows).map(|k| other.row_entries(k)).collect();
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, a) in self.row_entries(i) {
                for (j, b) in &right[k] {
                    *acc.entry(*j).or_insert_with(Scalar::zero) += &a * b;
                }
            }
            for (j, x) in acc {
                if !x.is_zero() {
                    out.set(i, j, x);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinError> {
        if v.len() != self.cols {
            return Err(LinError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row_entries(i)
                    .into_iter()
                    .fold(Scalar::zero(), |acc, (j, x)| acc + x * &v[j])
            })
            .collect())
    }

    fn zip_with(&self, other: &Matrix, sign: i64) -> Result<Matrix, LinError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinError::DimensionMismatch(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (i, j, x) in other.entries() {
            out.add_at(i, j, &(x * int(sign)));
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinError> {
        self.zip_with(other, 1)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinError> {
        self.zip_with(other, -1)
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_entries(self.rows, self.cols, self.entries().into_iter().map(|(i, j, x)| (i, j, x * c)))
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, LinError> {
        if self.rows != other.rows {
            return Err(LinError::DimensionMismatch("hstack row counts differ".into()));
        }
        let shift = self.cols;
        let entries = self
            .entries()
            .into_iter()
            .chain(other.entries().into_iter().map(|(i, j, x)| (i, j + shift, x)));
        Ok(Matrix::from_entries(self.rows, self.cols + other.cols, entries))
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinError> {
        if self.cols != other.cols {
            return Err(LinError::DimensionMismatch("vstack column counts differ".into()));
        }
        let shift = self.rows;
        let entries = self
            .entries()
            .into_iter()
            .chain(other.entries().into_iter().map(|(i, j, x)| (i + shift, j, x)));
        Ok(Matrix::from_entries(self.rows + other.rows, self.cols, entries))
    }

    /// Rows `rs` and columns `cs`, in the given order.
    pub fn submatrix(&self, rs: &[usize], cs: &[usize]) -> Matrix {
        let col_pos: BTreeMap<usize, usize> = cs.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut out = Matrix::zeros(rs.len(), cs.len());
        for (k, &r) in rs.iter().enumerate() {
            for (j, x) in self.row_entries(r) {
                if let Some(&p) = col_pos.get(&j) {
                    out.set(k, p, x);
                }
            }
        }
        out
    }
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries() == other.entries()
    }
}

impl Eq for Matrix {}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|j| format_scalar(&self.get(i, j))).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `row - c * pivot` on sorted sparse rows.
fn axpy(row: &Row, c: &Scalar, pivot: &Row) -> Row {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (0, 0);
    while a < row.len() || b < pivot.len() {
        let ka = row.get(a).map(|e| e.0);
        let kb = pivot.get(b).map(|e| e.0);
        match (ka, kb) {
            (Some(x), Some(y)) if x == y => {
                let v = &row[a].1 - c * &pivot[b].1;
                if !v.is_zero() {
                    out.push((x, v));
                }
                a += 1;
                b += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(row[a].clone());
                a += 1;
            }
            (Some(_), None) => {
                out.push(row[a].clone());
                a += 1;
            }
            _ => {
                out.push((pivot[b].0, -(c * &pivot[b].1)));
                b += 1;
            }
        }
    }
    out
}

fn pivot_key(row: &Row) -> (BigInt, BigInt, usize) {
    let lead = &row[0].1;
    (lead.numer().abs(), lead.denom().clone(), row.len())
}

/// Row echelon data. Row `k` has a leading one in column `pivots[k]`.
/// When built with `reduce`, every pivot column is zero outside its own row.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub cols: usize,
    pub pivots: Vec<usize>,
    rows: Vec<Row>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn row(&self, k: usize) -> &[(usize, Scalar)] {
        &self.rows[k]
    }
}

/// Gaussian elimination. Columns are swept left to right. Among the rows that
/// currently lead in a column, the pivot is the one whose leading entry has the
/// smallest numerator, then the smallest denominator, then the fewest nonzeros.
pub fn echelon(m: &Matrix, reduce: bool) -> Echelon {
    let mut buckets: BTreeMap<usize, Vec<Row>> = BTreeMap::new();
    for i in 0..m.rows() {
        let r = m.row_entries(i);
        if let Some(&(c, _)) = r.first() {
            buckets.entry(c).or_default().push(r);
        }
    }
    let mut pivots = Vec::new();
    let mut rows: Vec<Row> = Vec::new();
    while let Some((col, mut group)) = buckets.pop_first() {
        let best = (0..group.len()).min_by_key(|&k| pivot_key(&group[k])).expect("nonempty bucket");
        let mut p = group.swap_remove(best);
        let inv = p[0].1.recip();
        for e in p.iter_mut() {
            e.1 = &e.1 * &inv;
        }
        for r in group {
            let c = r[0].1.clone();
            let nr = axpy(&r, &c, &p);
            if let Some(&(nc, _)) = nr.first() {
                debug_assert!(nc > col);
                buckets.entry(nc).or_default().push(nr);
            }
        }
        pivots.push(col);
        rows.push(p);
    }
    if reduce {
        for k in (0..rows.len()).rev() {
            let pc = pivots[k];
            let (head, tail) = rows.split_at_mut(k);
            let pk = &tail[0];
            for r in head.iter_mut() {
                if let Ok(pos) = r.binary_search_by_key(&pc, |e| e.0) {
                    let c = r[pos].1.clone();
                    *r = axpy(r, &c, pk);
                }
            }
        }
    }
    Echelon { cols: m.cols(), pivots, rows }
}

pub fn rref(m: &Matrix) -> Echelon {
    echelon(m, true)
}

pub fn rank(m: &Matrix) -> usize {
    echelon(m, false).rank()
}

pub fn pivot_columns(m: &Matrix) -> Vec<usize> {
    echelon(m, false).pivots
}

/// A subspace of `k^ambient` given by a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Vec<Vec<Scalar>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Matrix whose columns are the basis vectors.
    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_columns(self.ambient, &self.basis).expect("basis vectors have ambient length")
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        let m = self.as_matrix();
        solve(&m, v).is_some()
    }
}

pub fn kernel(m: &Matrix) -> Subspace {
    let e = rref(m);
    let n = m.cols();
    let is_pivot: Vec<bool> = {
        let mut f = vec![false; n];
        for &p in &e.pivots {
            f[p] = true;
        }
        f
    };
    let mut basis = Vec::new();
    for free in (0..n).filter(|&j| !is_pivot[j]) {
        let mut v = vec![Scalar::zero(); n];
        v[free] = Scalar::one();
        for (k, &pc) in e.pivots.iter().enumerate() {
            if let Ok(pos) = e.rows[k].binary_search_by_key(&free, |x| x.0) {
                v[pc] = -e.rows[k][pos].1.clone();
            }
        }
        basis.push(v);
    }
    Subspace { ambient: n, basis }
}

/// Column space, spanned by the pivot columns of `m`.
pub fn image(m: &Matrix) -> Subspace {
    let basis = pivot_columns(m).into_iter().map(|j| m.column(j)).collect();
    Subspace { ambient: m.rows(), basis }
}

/// Some `x` with `m x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.rows(), "right-hand side length");
    let n = m.cols();
    let bcol = Matrix::from_columns(m.rows(), &[b.to_vec()]).expect("length checked");
    let aug = m.hstack(&bcol).expect("rows agree");
    let e = rref(&aug);
    if e.pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Scalar::zero(); n];
    for (k, &pc) in e.pivots.iter().enumerate() {
        if let Some((c, v)) = e.rows[k].last() {
            if *c == n {
                x[pc] = v.clone();
            }
        }
    }
    Some(x)
}

/// Solves `m X = B` column by column with a single elimination.
pub fn solve_many(m: &Matrix, rhs: &Matrix) -> Option<Matrix> {
    assert_eq!(rhs.rows(), m.rows(), "right-hand side rows");
    let n = m.cols();
    let aug = m.hstack(rhs).expect("rows agree");
    let e = rref(&aug);
    if e.pivots.iter().any(|&p| p >= n) {
        return None;
    }
    let mut x = Matrix::zeros(n, rhs.cols());
    for (k, &pc) in e.pivots.iter().enumerate() {
        for (c, v) in &e.rows[k] {
            if *c >= n {
                x.set(pc, c - n, v.clone());
            }
        }
    }
    Some(x)
}

/// Cohomology at the middle term of `d_in : C^{-1} -> C^0` and `d_out : C^0 -> C^1`.
#[derive(Clone, Debug)]
pub struct CohomologySlice {
    pub cycles: Subspace,
    pub boundaries: Subspace,
    /// Cocycles whose classes form a basis of the quotient.
    pub representatives: Vec<Vec<Scalar>>,
    /// Columns `[boundaries | representatives]`, kept for coordinate solves.
    frame: Matrix,
}

impl CohomologySlice {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn ambient(&self) -> usize {
        self.cycles.ambient
    }

    /// Coordinates of the class of `v` in the representative basis, or `None`
    /// if `v` is not a cocycle.
    pub fn class_of(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let x = solve(&self.frame, v)?;
        Some(x[self.boundaries.dim()..].to_vec())
    }

    /// Classes of many cocycles at once (columns of `vs`).
    pub fn classes_of(&self, vs: &Matrix) -> Option<Matrix> {
        let x = solve_many(&self.frame, vs)?;
        let b = self.boundaries.dim();
        let rows: Vec<usize> = (b..b + self.dim()).collect();
        let cols: Vec<usize> = (0..vs.cols()).collect();
        Some(x.submatrix(&rows, &cols))
    }
}

pub fn cohomology_at(d_in: &Matrix, d_out: &Matrix) -> Result<CohomologySlice, LinError> {
    cohomology_at_preferring(d_in, d_out, &[])
}

/// Like [`cohomology_at`], but cocycles in `preferred` are tried first when
/// choosing representatives.
pub fn cohomology_at_preferring(
    d_in: &Matrix,
    d_out: &Matrix,
    preferred: &[Vec<Scalar>],
) -> Result<CohomologySlice, LinError> {
    if d_in.rows() != d_out.cols() {
        return Err(LinError::DimensionMismatch(format!(
            "incoming map lands in dimension {}, outgoing map starts from {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if let Some((row, col, _)) = comp.entries().into_iter().next() {
        return Err(LinError::CompositionNonzero { row, col });
    }
    let cycles = kernel(d_out);
    let boundaries = image(d_in);
    let nb = boundaries.dim();
    let mut cols = boundaries.basis.clone();
    for p in preferred {
        if d_out.mul_vec(p)?.iter().any(|x| !x.is_zero()) {
            return Err(LinError::DimensionMismatch("preferred vector is not a cocycle".into()));
        }
        cols.push(p.clone());
    }
    cols.extend(cycles.basis.iter().cloned());
    let joint = Matrix::from_columns(d_in.rows(), &cols)?;
    let representatives: Vec<Vec<Scalar>> = pivot_columns(&joint)
        .into_iter()
        .filter(|&j| j >= nb)
        .map(|j| cols[j].clone())
        .collect();
    let mut frame_cols = boundaries.basis.clone();
    frame_cols.extend(representatives.iter().cloned());
    let frame = Matrix::from_columns(d_in.rows(), &frame_cols)?;
    Ok(CohomologySlice { cycles, boundaries, representatives, frame })
}

/// Rank of the map induced on cohomology by a chain map component
/// `f : C^0 -> D^0`.
pub fn induced_rank(f: &Matrix, source: &CohomologySlice, target: &CohomologySlice) -> Result<usize, LinError> {
    if f.cols() != source.ambient() || f.rows() != target.ambient() {
        return Err(LinError::DimensionMismatch("induced map shape".into()));
    }
    let mut cols = target.boundaries.basis.clone();
    for r in &source.representatives {
        cols.push(f.mul_vec(r)?);
    }
    let joint = Matrix::from_columns(target.ambient(), &cols)?;
    Ok(rank(&joint) - target.boundaries.dim())
}
