//! Exact integer and rational matrix arithmetic.
//!
//! Everything here works over arbitrary-precision integers. Rational
//! quantities use [`BigRational`], which is always kept in lowest terms
//! with a positive denominator.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A rational column (or row) of coordinates.
pub type QVec = Vec<BigRational>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Least common multiple of all denominators in `values` (1 for an empty slice).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows().iter().map(|r| {
            r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        }))
        .finish()
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().cloned().map(Into::into))
            .collect();
        Self::new(r, c, data)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let owned: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(&owned).expect("rectangular literal")
    }

    pub fn diagonal<T: Clone + Into<BigInt>>(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone().into();
        }
        m
    }

    /// Block-diagonal sum of square or rectangular blocks.
    pub fn block_diag(blocks: &[&IntMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.data[(r0 + i) * cols + c0 + j] = b.get(i, j).clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
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

    pub fn mul(&self, other: &IntMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().cloned().map(BigRational::from_integer).collect(),
        }
    }

    /// Inverse of a matrix with determinant ±1.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let inv = self.to_rational().inverse()?;
        inv.to_integer().ok_or(Error::NotIntegral)
    }

    /// `x · self` for a rational row vector `x`.
    pub fn left_apply(&self, x: &[BigRational]) -> QVec {
        (0..self.cols)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .fold(BigRational::zero(), |acc, (i, xi)| acc + xi * self.get(i, j))
            })
            .collect()
    }

    /// `self · x` for a rational column vector `x`.
    pub fn apply(&self, x: &[BigRational]) -> QVec {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + b * a)
            })
            .collect()
    }

    /// Bilinear value `x^T · self · y`.
    pub fn bilinear(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let my = self.apply(y);
        x.iter().zip(&my).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] -= k * row[source]
    fn sub_row_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = k * self.get(source, j);
            self.data[target * self.cols + j] -= delta;
        }
    }

    /// col[target] -= k * col[source]
    fn sub_col_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = k * self.get(i, source);
            self.data[i * self.cols + target] -= delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -x;
        }
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn from_rows(rows: &[QVec]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<QVec> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("rational product".into()));
        }
        let mut data = vec![BigRational::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<RatMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv: Vec<QVec> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&i| !a[i][col].is_zero()).ok_or(Error::DegenerateMatrix)?;
            a.swap(pivot, col);
            inv.swap(pivot, col);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &p;
                inv[col][j] /= &p;
            }
            for i in 0..n {
                if i != col && !a[i][col].is_zero() {
                    let f = a[i][col].clone();
                    for j in 0..n {
                        let da = &f * &a[col][j];
                        a[i][j] -= da;
                        let di = &f * &inv[col][j];
                        inv[i][j] -= di;
                    }
                }
            }
        }
        Self::from_rows(&inv)
    }

    /// Returns the matrix if every entry is an integer.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        if self.data.iter().any(|x| !x.is_integer()) {
            return None;
        }
        Some(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.to_integer()).collect(),
        })
    }
}

/// Smith normal form `u · m · v = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Diagonal entries `d_1 | d_2 | ...`, including trailing zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

/// Smith normal form by repeated gcd pivoting.
///
/// The pivot is always the entry of smallest absolute value in the active
/// submatrix, ties broken by lowest row and then lowest column, so output
/// is a pure function of the input.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = smallest_entry(&a, t) else {
                return SnfResult { u, d: a, v };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = a.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..r {
                let q = a.get(i, t).div_floor(&p);
                a.sub_row_multiple(i, t, &q);
                u.sub_row_multiple(i, t, &q);
                dirty |= !a.get(i, t).is_zero();
            }
            for j in t + 1..c {
                let q = a.get(t, j).div_floor(&p);
                a.sub_col_multiple(j, t, &q);
                v.sub_col_multiple(j, t, &q);
                dirty |= !a.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility chain: fold an offending row into the pivot row
            let offending = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match offending {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    a.sub_row_multiple(t, i, &minus_one);
                    u.sub_row_multiple(t, i, &minus_one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, d: a, v }
}

fn smallest_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Row-style Hermite normal form: nonzero rows of an upper echelon basis of
/// the row lattice, positive pivots, entries above each pivot in `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut p = 0;
    for col in 0..c {
        if p == r {
            break;
        }
        loop {
            let pick = (p..r)
                .filter(|&i| !a.get(i, col).is_zero())
                .min_by(|&x, &y| a.get(x, col).abs().cmp(&a.get(y, col).abs()).then(x.cmp(&y)));
            let Some(i) = pick else { break };
            a.swap_rows(p, i);
            let piv = a.get(p, col).clone();
            let mut done = true;
            for i in p + 1..r {
                let q = a.get(i, col).div_floor(&piv);
                a.sub_row_multiple(i, p, &q);
                done &= a.get(i, col).is_zero();
            }
            if done {
                break;
            }
        }
        if a.get(p, col).is_zero() {
            continue;
        }
        if a.get(p, col).is_negative() {
            a.negate_row(p);
        }
        let piv = a.get(p, col).clone();
        for i in 0..p {
            let q = a.get(i, col).div_floor(&piv);
            a.sub_row_multiple(i, p, &q);
        }
        p += 1;
    }
    let rows: Vec<Vec<BigInt>> = (0..p).map(|i| a.row(i).to_vec()).collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, c);
    }
    IntMatrix::from_rows(&rows).expect("rectangular")
}

/// Basis (as rows) of the left integer kernel `{x : x · m = 0}`.
pub fn left_kernel(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let rows: Vec<Vec<BigInt>> = (rank..m.rows()).map(|i| snf.u.row(i).to_vec()).collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, m.rows());
    }
    IntMatrix::from_rows(&rows).expect("rectangular")
}

/// Counts of positive and negative squares of a nondegenerate symmetric matrix.
///
/// Symmetric elimination over the rationals; when every remaining diagonal
/// entry vanishes, a nonzero off-diagonal pair spans a hyperbolic plane that
/// contributes `(1, 1)` and is split off as a block.
pub fn signature(m: &IntMatrix) -> Result<(usize, usize)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("signature of a non-square matrix".into()));
    }
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if m.det()?.is_zero() {
        return Err(Error::DegenerateMatrix);
    }
    let n = m.rows();
    let mut a: Vec<QVec> = m.to_rational().to_rows();
    let (mut pos, mut neg) = (0, 0);
    let mut k = 0;
    let swap = |a: &mut Vec<QVec>, x: usize, y: usize| {
        a.swap(x, y);
        for row in a.iter_mut() {
            row.swap(x, y);
        }
    };
    while k < n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                swap(&mut a, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                swap(&mut a, k + 1, j);
                let b = a[k][k + 1].clone();
                for i in k + 2..n {
                    for l in k + 2..n {
                        let delta = (&a[i][k] * &a[k + 1][l] + &a[i][k + 1] * &a[k][l]) / &b;
                        a[i][l] -= delta;
                    }
                }
                pos += 1;
                neg += 1;
                k += 2;
                continue;
            } else {
                return Err(Error::DegenerateMatrix);
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for l in k + 1..n {
                let delta = &f * &a[k][l];
                a[i][l] -= delta;
            }
        }
        k += 1;
    }
    Ok((pos, neg))
}

/// The integer span of a set of rational generators, prepared for repeated
/// membership queries through one Smith normal form.
#[derive(Clone, Debug)]
pub struct LatticeSpan {
    dim: usize,
    denom: BigInt,
    v: IntMatrix,
    diag: Vec<BigInt>,
}

impl LatticeSpan {
    pub fn new(generators: &[QVec], dim: usize) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "generator of length {} in dimension {dim}",
                g.len()
            )));
        }
        let denom = common_denominator(generators.iter().flatten());
        let rows: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| g.iter().map(|x| (x * &denom).to_integer()).collect())
            .collect();
        let m = if rows.is_empty() {
            IntMatrix::zeros(0, dim)
        } else {
            IntMatrix::from_rows(&rows)?
        };
        let snf = smith_normal_form(&m);
        let diag = snf.diagonal().into_iter().take_while(|x| !x.is_zero()).collect();
        Ok(Self {
            dim,
            denom,
            v: snf.v,
            diag,
        })
    }

    /// True iff `x` is an integer combination of the generators.
    pub fn contains(&self, x: &[BigRational]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in dimension {}",
                x.len(),
                self.dim
            )));
        }
        let scaled: Vec<BigRational> = x.iter().map(|xi| xi * &self.denom).collect();
        if scaled.iter().any(|s| !s.is_integer()) {
            return Ok(false);
        }
        let w: QVec = scaled;
        let wv = self.v.left_apply(&w);
        for (j, value) in wv.iter().enumerate() {
            let value = value.to_integer();
            match self.diag.get(j) {
                Some(dj) => {
                    if !value.is_multiple_of(dj) {
                        return Ok(false);
                    }
                }
                None => {
                    if !value.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// True iff `v` lies in the integer span of `generators`.
pub fn lattice_membership(v: &[BigRational], generators: &[QVec]) -> Result<bool> {
    LatticeSpan::new(generators, v.len())?.contains(v)
}
