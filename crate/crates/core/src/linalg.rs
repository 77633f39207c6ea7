//! Exact dense and sparse matrices over `Scalar`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use thiserror::Error;

use crate::arith::{Field, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is singular")]
    Singular,
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    /// Matrix unit `E_ij`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = Scalar::one();
        m
    }

    pub fn diagonal(entries: Vec<Scalar>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    /// Fails unless all rows have equal length.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(LinalgError::ShapeMismatch {
                left: (r, c),
                right: (1, bad.len()),
            });
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn from_column(v: Vec<Scalar>) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    fn same_shape(&self, rhs: &Self) -> Result<(), LinalgError> {
        if self.shape() == rhs.shape() {
            Ok(())
        } else {
            Err(LinalgError::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            })
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.same_shape(rhs)?;
        Ok(self.zip_with(rhs, Field::plus))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.same_shape(rhs)?;
        Ok(self.zip_with(rhs, Field::minus))
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let idx = i * rhs.cols + j;
                        out.data[idx] = out.data[idx].plus(&a.times(b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Panicking forms for internal use where shapes are known to agree.
    pub fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("matrix shapes agree")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.try_sub(rhs).expect("matrix shapes agree")
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("matrix shapes agree")
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.times(c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Field::negated).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Scalar::zero(), |acc, (a, b)| acc.plus(&a.times(b)))
            })
            .collect()
    }

    /// Commutator `self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// True when some nonzero `c` has `self = c·other`.
    pub fn is_proportional_to(&self, other: &Self) -> bool {
        if self.shape() != other.shape() || self.is_zero() || other.is_zero() {
            return false;
        }
        let k = other
            .data
            .iter()
            .position(|v| !v.is_zero())
            .expect("nonzero");
        let c = self.data[k].divided(&other.data[k]).expect("nonzero pivot");
        !c.is_zero() && *self == other.scale(&c)
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> Result<Scalar, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::ShapeMismatch {
                left: self.shape(),
                right: (self.cols, self.rows),
            });
        }
        let (scale, rows) = prescaled_rows(self);
        let elim = bareiss(rows, self.cols);
        if elim.rank < self.rows {
            return Ok(Scalar::zero());
        }
        let mut det = if self.rows == 0 {
            Scalar::one()
        } else {
            elim.rows[self.rows - 1][self.cols - 1].clone()
        };
        if elim.swaps % 2 == 1 {
            det = det.negated();
        }
        Ok(det.divided(&scale).expect("row scale is nonzero"))
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Singular);
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let pivots = aug.rref_in_place(n);
        if pivots.len() < n {
            return Err(LinalgError::Singular);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let (_, rows) = prescaled_rows(self);
        bareiss(rows, self.cols).rank
    }

    /// Reduced row echelon form restricted to the first `limit` columns.
    /// Returns the pivot columns.
    fn rref_in_place(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inverse().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = self.get(r, j).times(&inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let rv = self.get(r, j);
                    if rv.is_zero() {
                        continue;
                    }
                    let v = self.get(i, j).minus(&factor.times(rv));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of the right null space, one vector per free column, in the
    /// canonical form where each free variable is 1 in its own vector.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        kernel_from_rref(&m, &pivots, self.cols)
    }

    /// Solves `self·v = b`. Returns a particular solution with every free
    /// variable set to zero plus a kernel basis. `None` if inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Solution>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::ShapeMismatch {
                left: self.shape(),
                right: (b.len(), 1),
            });
        }
        let n = self.cols;
        let mut aug = Self::zeros(self.rows, n + 1);
        for i in 0..self.rows {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n, b[i].clone());
        }
        let pivots = aug.rref_in_place(n);
        if (pivots.len()..aug.rows).any(|i| !aug.get(i, n).is_zero()) {
            return Ok(None);
        }
        let mut particular = vec![Scalar::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            particular[c] = aug.get(r, n).clone();
        }
        let kernel = kernel_from_rref(&aug, &pivots, n);
        Ok(Some(Solution { particular, kernel }))
    }

    /// Stacks `blocks` vertically.
    pub fn vstack(blocks: &[Matrix]) -> Result<Self, LinalgError> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(LinalgError::ShapeMismatch {
                    left: (rows, cols),
                    right: b.shape(),
                });
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(Self { rows, cols, data })
    }

    /// Matrix whose columns are `vectors`.
    pub fn from_columns(len: usize, vectors: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(len, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub particular: Vec<Scalar>,
    pub kernel: Vec<Vec<Scalar>>,
}

fn kernel_from_rref(m: &Matrix, pivots: &[usize], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut is_pivot = vec![false; ncols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Scalar::zero(); ncols];
            v[f] = Scalar::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = m.get(r, f).negated();
            }
            v
        })
        .collect()
}

/// Rows ready for fraction-free elimination. When every entry is rational
/// each row is multiplied by the lcm of its denominators so the elimination
/// runs over integers; the returned scale is the product of those factors.
fn prescaled_rows(m: &Matrix) -> (Scalar, Vec<Vec<Scalar>>) {
    let all_rational = m.data.iter().all(|v| v.as_rational().is_some());
    if !all_rational {
        return (Scalar::one(), m.to_rows());
    }
    let mut scale = BigInt::one();
    let rows = (0..m.rows)
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, v| {
                acc.lcm(v.as_rational().expect("rational").denom())
            });
            scale *= &lcm;
            let factor = Rational::from_integer(lcm);
            row.iter()
                .map(|v| Scalar::Rat(v.as_rational().expect("rational") * &factor))
                .collect()
        })
        .collect();
    (Scalar::Rat(Rational::from_integer(scale)), rows)
}

struct Elimination {
    rows: Vec<Vec<Scalar>>,
    rank: usize,
    swaps: usize,
}

/// Fraction-free (Bareiss) row echelon form. Every division is exact, so
/// integer input stays integral throughout.
fn bareiss(mut rows: Vec<Vec<Scalar>>, ncols: usize) -> Elimination {
    let nrows = rows.len();
    let mut prev = Scalar::one();
    let mut r = 0;
    let mut swaps = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            rows.swap(p, r);
            swaps += 1;
        }
        let pivot = rows[r][c].clone();
        let (head, tail) = rows.split_at_mut(r + 1);
        let prow = &head[r];
        for row in tail.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..ncols {
                let v = pivot.times(&row[j]).minus(&lead.times(&prow[j]));
                row[j] = if v.is_zero() {
                    v
                } else {
                    v.divided(&prev).expect("previous pivot is nonzero")
                };
            }
            row[c] = Scalar::zero();
        }
        prev = pivot;
        r += 1;
    }
    Elimination {
        rows,
        rank: r,
        swaps,
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Column-sparse matrix, used for cochain differentials where almost every
/// entry vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<BTreeMap<usize, Scalar>>,
}

impl SparseMatrix {
    pub fn from_columns(rows: usize, columns: Vec<BTreeMap<usize, Scalar>>) -> Self {
        let columns: Vec<BTreeMap<usize, Scalar>> = columns
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Self {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(BTreeMap::len).sum()
    }

    pub fn column(&self, j: usize) -> &BTreeMap<usize, Scalar> {
        &self.columns[j]
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(BTreeMap::is_empty)
    }

    /// Product `self·rhs`, computed column by column.
    pub fn compose(&self, rhs: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (k, b) in col {
                    for (i, a) in &self.columns[*k] {
                        let e = acc.entry(*i).or_insert_with(Scalar::zero);
                        *e = e.plus(&a.times(b));
                    }
                }
                acc
            })
            .collect();
        Ok(SparseMatrix::from_columns(self.rows, columns))
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    /// Rank, eliminating on whichever orientation has fewer rows.
    pub fn rank(&self) -> usize {
        let dense = self.to_dense();
        if self.rows > self.cols {
            dense.transpose().rank()
        } else {
            dense.rank()
        }
    }
}
