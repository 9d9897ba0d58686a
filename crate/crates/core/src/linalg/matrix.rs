use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use super::rat::Rat;
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "Matrix::from_rows",
                    expected: cols,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from its row-major entry vector.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rat>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "Matrix::from_entries",
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rat> {
        self.entries
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Matrix) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Linear combination `sum_k coeffs[k] * mats[k]`; all matrices share a shape.
    pub fn combination(coeffs: &[Rat], mats: &[Matrix], rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for (c, m) in coeffs.iter().zip(mats) {
            if c.is_zero() {
                continue;
            }
            for (o, a) in out.entries.iter_mut().zip(&m.entries) {
                if !a.is_zero() {
                    *o += c * a;
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.cols);
        for i in 0..self.rows {
            ech.push(self.row(i).to_vec());
        }
        ech.rank()
    }

    /// Exact nullspace `{v : self * v = 0}` in canonical form.
    pub fn kernel(&self) -> Subspace {
        let mut ech = Echelon::new(self.cols);
        for i in 0..self.rows {
            ech.push(self.row(i).to_vec());
        }
        ech.kernel()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut ech = Echelon::with_pivot_limit(2 * n, n);
        for i in 0..n {
            let mut row = self.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            ech.push(row);
        }
        if ech.rank() != n {
            return None;
        }
        let rows = ech
            .pivot_rows()
            .iter()
            .map(|(_, row)| row[n..].to_vec())
            .collect();
        Matrix::from_rows(rows).ok()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rat;

    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.entries[i * self.cols + j]
    }
}

/// Reduced row echelon form grown one row at a time.
///
/// Pivots are only taken in columns `< pivot_limit`; columns past the limit
/// carry right-hand sides. A pushed row that vanishes on the pivot region but
/// not on the right-hand side is kept as a residual row and witnesses an
/// inconsistent system.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    pivot_limit: usize,
    /// (pivot column, row) sorted by pivot column; pivot entries are 1 and
    /// every other pivot row is zero in that column.
    rows: Vec<(usize, Vec<Rat>)>,
    residuals: Vec<Vec<Rat>>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Self::with_pivot_limit(width, width)
    }

    pub fn with_pivot_limit(width: usize, pivot_limit: usize) -> Self {
        assert!(pivot_limit <= width);
        Self {
            width,
            pivot_limit,
            rows: Vec::new(),
            residuals: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.pivot_limit
    }

    pub fn pivot_rows(&self) -> &[(usize, Vec<Rat>)] {
        &self.rows
    }

    pub fn residuals(&self) -> &[Vec<Rat>] {
        &self.residuals
    }

    /// Reduces `row` against the current pivots and inserts it if it adds a
    /// new pivot. Returns true when the rank grew.
    pub fn push(&mut self, mut row: Vec<Rat>) -> bool {
        assert_eq!(row.len(), self.width, "Echelon row width mismatch");
        self.reduce(&mut row);
        let pivot = (0..self.pivot_limit).find(|&j| !row[j].is_zero());
        let Some(p) = pivot else {
            if row[self.pivot_limit..].iter().any(|x| !x.is_zero()) {
                self.residuals.push(row);
            }
            return false;
        };
        let inv = Rat::one() / &row[p];
        for x in row.iter_mut().skip(p) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for (_, other) in self.rows.iter_mut() {
            if other[p].is_zero() {
                continue;
            }
            let f = other[p].clone();
            for j in p..self.width {
                if !row[j].is_zero() {
                    let d = &f * &row[j];
                    other[j] -= d;
                }
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, row));
        true
    }

    fn reduce(&self, row: &mut [Rat]) {
        for (p, prow) in &self.rows {
            if row[*p].is_zero() {
                continue;
            }
            let f = row[*p].clone();
            for j in *p..self.width {
                if !prow[j].is_zero() {
                    let d = &f * &prow[j];
                    row[j] -= d;
                }
            }
        }
    }

    /// Nullspace of the pivot region (only meaningful without right-hand sides).
    pub fn kernel(&self) -> Subspace {
        let n = self.pivot_limit;
        let pivots: Vec<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        let mut basis = Vec::new();
        for free in (0..n).filter(|j| !pivots.contains(j)) {
            let mut v = vec![Rat::zero(); n];
            v[free] = Rat::one();
            for (p, prow) in &self.rows {
                if !prow[free].is_zero() {
                    v[*p] = -prow[free].clone();
                }
            }
            basis.push(v);
        }
        Subspace::from_vectors(n, basis).expect("kernel vectors have ambient length")
    }

    /// Whether right-hand-side column `k` (counted from the pivot limit) is
    /// consistent with the pivot rows.
    pub fn is_consistent(&self, k: usize) -> bool {
        let col = self.pivot_limit + k;
        self.residuals.iter().all(|r| r[col].is_zero())
    }

    /// Particular solution with all free variables set to zero for
    /// right-hand-side column `k`, or `None` when inconsistent.
    pub fn particular_solution(&self, k: usize) -> Option<Vec<Rat>> {
        if !self.is_consistent(k) {
            return None;
        }
        let col = self.pivot_limit + k;
        let mut x = vec![Rat::zero(); self.pivot_limit];
        for (p, prow) in &self.rows {
            x[*p] = prow[col].clone();
        }
        Some(x)
    }
}
