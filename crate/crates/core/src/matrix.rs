//! Dense integer matrices with checked arithmetic, and rational rank.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Ring operations needed by matrix code. Arithmetic returns `None` on overflow.
pub trait Entry: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Floor quotient.
    fn floor_div(&self, o: &Self) -> Option<Self>;
    fn cmp_abs(&self, o: &Self) -> Ordering;
    fn to_bigint(&self) -> BigInt;
}

impl Entry for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn floor_div(&self, o: &Self) -> Option<Self> {
        let q = self.checked_div(*o)?;
        if (self % o != 0) && ((*self < 0) != (*o < 0)) {
            q.checked_sub(1)
        } else {
            Some(q)
        }
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.unsigned_abs().cmp(&o.unsigned_abs())
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Entry for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn floor_div(&self, o: &Self) -> Option<Self> {
        Some(Integer::div_floor(self, o))
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.magnitude().cmp(o.magnitude())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntegerMatrix = Matrix<i64>;
pub type BigMatrix = Matrix<BigInt>;

impl<T: Entry> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Product, `None` on overflow. Panics on a dimension mismatch.
    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        assert_eq!(self.cols, o.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b)?)?;
                    out.set(i, j, v);
                }
            }
        }
        Some(out)
    }

    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "dimension mismatch");
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect::<Option<_>>()?;
        Some(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Matrix-vector product, `None` on overflow.
    pub fn apply(&self, v: &[T]) -> Option<Vec<T>> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(T::zero(), |acc, (a, b)| acc.add(&a.mul(b)?))
            })
            .collect()
    }

    pub fn to_big(&self) -> BigMatrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.to_bigint()).collect() }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += q * row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for j in 0..self.cols {
            let v = self.get(dst, j).add(&q.mul(self.get(src, j))?)?;
            self.set(dst, j, v);
        }
        Some(())
    }

    /// `col[dst] += q * col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        for i in 0..self.rows {
            let v = self.get(i, dst).add(&q.mul(self.get(i, src))?)?;
            self.set(i, dst, v);
        }
        Some(())
    }

    pub fn negate_row(&mut self, i: usize) -> Option<()> {
        for j in 0..self.cols {
            let v = self.get(i, j).neg()?;
            self.set(i, j, v);
        }
        Some(())
    }

    pub fn negate_col(&mut self, j: usize) -> Option<()> {
        for i in 0..self.rows {
            let v = self.get(i, j).neg()?;
            self.set(i, j, v);
        }
        Some(())
    }
}

impl BigMatrix {
    /// Narrows to `i64`, `None` if an entry does not fit.
    pub fn to_i64(&self) -> Option<IntegerMatrix> {
        let data = self.data.iter().map(|x| i64::try_from(x).ok()).collect::<Option<_>>()?;
        Some(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("bigint product cannot overflow")
    }
}

impl<T: Entry> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", r.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for IntegerMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

/// Rank over `Q` by fraction-exact Gaussian elimination.
pub fn rational_rank<T: Entry>(m: &Matrix<T>) -> usize {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| BigRational::from_integer(x.to_bigint())).collect())
        .collect();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(rank, p);
        let prow = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] / &prow[col];
            for (x, p) in row[col..].iter_mut().zip(&prow[col..]) {
                *x -= &f * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the right kernel of a rational matrix given by rows, via reduced row
/// echelon form.
pub fn rational_kernel(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_product_detects_overflow() {
        let a = IntegerMatrix::from_rows(vec![vec![i64::MAX, 1]]);
        let b = IntegerMatrix::from_rows(vec![vec![2], vec![0]]);
        assert!(a.checked_mul(&b).is_none());
        let big = a.to_big().mul(&b.to_big());
        assert_eq!(*big.get(0, 0), BigInt::from(i64::MAX) * 2);
    }

    #[test]
    fn floor_division_rounds_down() {
        assert_eq!((-7i64).floor_div(&2), Some(-4));
        assert_eq!(7i64.floor_div(&-2), Some(-4));
        assert_eq!(6i64.floor_div(&3), Some(2));
        assert_eq!(i64::MIN.floor_div(&-1), None);
    }

    #[test]
    fn rank_examples() {
        let m = IntegerMatrix::from_rows(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rational_rank(&m), 2);
        assert_eq!(rational_rank(&IntegerMatrix::zeros(3, 4)), 0);
        assert_eq!(rational_rank(&IntegerMatrix::identity(5)), 5);
    }
}
