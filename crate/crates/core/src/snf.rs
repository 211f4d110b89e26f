//! Smith normal form with unimodular certificates.
//!
//! The elimination runs on checked `i64` first and restarts on `BigInt` as soon as any
//! intermediate value overflows. Every result is re-verified by multiplication in
//! arbitrary precision before it is returned.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::matrix::{BigMatrix, Entry, IntegerMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Machine,
    Arbitrary,
}

/// `U · A · V = D` with `D` diagonal, `d₁ | d₂ | …`, and `U`, `V` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero diagonal entries of `D`, positive, each dividing the next.
    pub divisors: Vec<BigInt>,
    pub rank: usize,
    pub kernel_rank: usize,
    pub cokernel_free_rank: usize,
    pub arithmetic: Arithmetic,
    pub u: BigMatrix,
    pub u_inv: BigMatrix,
    pub v: BigMatrix,
    pub v_inv: BigMatrix,
}

impl SnfResult {
    /// Divisors different from 1: the torsion of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// The diagonal matrix `D`.
    pub fn diagonal(&self) -> BigMatrix {
        let mut d = BigMatrix::zeros(self.rows, self.cols);
        for (i, x) in self.divisors.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }

    /// Re-checks `U A V = D`, `U U⁻¹ = I`, `V V⁻¹ = I` and the divisor chain.
    pub fn verify(&self, a: &BigMatrix) -> bool {
        let chain = self.divisors.iter().all(|d| *d > <BigInt as Zero>::zero())
            && self.divisors.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        chain
            && self.u.mul(a).mul(&self.v) == self.diagonal()
            && self.u.mul(&self.u_inv) == BigMatrix::identity(self.rows)
            && self.v.mul(&self.v_inv) == BigMatrix::identity(self.cols)
    }
}

/// Integers as JSON numbers when they fit in `i64`, decimal strings otherwise.
pub(crate) fn big_json(x: &BigInt) -> serde_json::Value {
    match i64::try_from(x) {
        Ok(v) => v.into(),
        Err(_) => x.to_string().into(),
    }
}

impl Serialize for SnfResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let divisors: Vec<_> = self.divisors.iter().map(big_json).collect();
        let torsion: Vec<_> = self.torsion().iter().map(big_json).collect();
        let mut st = s.serialize_struct("SnfResult", 8)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("divisors", &divisors)?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("kernel_rank", &self.kernel_rank)?;
        st.serialize_field("cokernel_free_rank", &self.cokernel_free_rank)?;
        st.serialize_field("cokernel_torsion", &torsion)?;
        st.serialize_field("arithmetic", &self.arithmetic)?;
        st.end()
    }
}

struct Work<T> {
    a: Matrix<T>,
    u: Matrix<T>,
    u_inv: Matrix<T>,
    v: Matrix<T>,
    v_inv: Matrix<T>,
}

impl<T: Entry> Work<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    /// `row[dst] += q row[src]`
    fn row_op(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        self.a.add_row_multiple(dst, src, q)?;
        self.u.add_row_multiple(dst, src, q)?;
        self.u_inv.add_col_multiple(src, dst, &q.neg()?)
    }

    /// `col[dst] += q col[src]`
    fn col_op(&mut self, dst: usize, src: usize, q: &T) -> Option<()> {
        self.a.add_col_multiple(dst, src, q)?;
        self.v.add_col_multiple(dst, src, q)?;
        self.v_inv.add_row_multiple(src, dst, &q.neg()?)
    }

    fn smallest(&self, cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
        cells
            .filter(|&(i, j)| !self.a.get(i, j).is_zero())
            .min_by(|&(i, j), &(k, l)| self.a.get(i, j).cmp_abs(self.a.get(k, l)))
    }

    fn run(mut self) -> Option<Self> {
        let (m, n) = (self.a.rows(), self.a.cols());
        for t in 0..m.min(n) {
            let Some((pi, pj)) = self.smallest((t..m).flat_map(|i| (t..n).map(move |j| (i, j)))) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..m {
                    if !self.a.get(i, t).is_zero() {
                        let q = self.a.get(i, t).floor_div(self.a.get(t, t))?;
                        self.row_op(i, t, &q.neg()?)?;
                        dirty |= !self.a.get(i, t).is_zero();
                    }
                }
                for j in t + 1..n {
                    if !self.a.get(t, j).is_zero() {
                        let q = self.a.get(t, j).floor_div(self.a.get(t, t))?;
                        self.col_op(j, t, &q.neg()?)?;
                        dirty |= !self.a.get(t, j).is_zero();
                    }
                }
                if dirty {
                    let cells = (t..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
                    let (pi, pj) = self.smallest(cells).expect("pivot row or column is nonzero");
                    self.swap_rows(t, pi);
                    self.swap_cols(t, pj);
                    continue;
                }
                let p = self.a.get(t, t).clone();
                let mut bad = None;
                'scan: for i in t + 1..m {
                    for j in t + 1..n {
                        let x = self.a.get(i, j);
                        if !x.sub(&x.floor_div(&p)?.mul(&p)?)?.is_zero() {
                            bad = Some(i);
                            break 'scan;
                        }
                    }
                }
                match bad {
                    Some(i) => self.row_op(t, i, &T::one())?,
                    None => break,
                }
            }
            if self.a.get(t, t).is_negative() {
                self.a.negate_row(t)?;
                self.u.negate_row(t)?;
                self.u_inv.negate_col(t)?;
            }
        }
        Some(self)
    }
}

fn attempt<T: Entry>(a: &Matrix<T>) -> Option<Work<T>> {
    Work {
        a: a.clone(),
        u: Matrix::identity(a.rows()),
        u_inv: Matrix::identity(a.rows()),
        v: Matrix::identity(a.cols()),
        v_inv: Matrix::identity(a.cols()),
    }
    .run()
}

fn finish<T: Entry>(w: Work<T>, arithmetic: Arithmetic, original: &BigMatrix) -> SnfResult {
    let (rows, cols) = (w.a.rows(), w.a.cols());
    let divisors: Vec<BigInt> = (0..rows.min(cols))
        .map(|i| w.a.get(i, i).to_bigint())
        .take_while(|d| !Zero::is_zero(d))
        .collect();
    let rank = divisors.len();
    let out = SnfResult {
        rows,
        cols,
        divisors,
        rank,
        kernel_rank: cols - rank,
        cokernel_free_rank: rows - rank,
        arithmetic,
        u: w.u.to_big(),
        u_inv: w.u_inv.to_big(),
        v: w.v.to_big(),
        v_inv: w.v_inv.to_big(),
    };
    assert!(out.verify(original), "Smith normal form certificate failed to verify");
    out
}

/// Smith normal form of an `i64` matrix, escalating to `BigInt` on overflow.
pub fn smith_normal_form(a: &IntegerMatrix) -> SnfResult {
    let big = a.to_big();
    match attempt(a) {
        Some(w) => finish(w, Arithmetic::Machine, &big),
        None => smith_normal_form_big(&big),
    }
}

pub fn smith_normal_form_big(a: &BigMatrix) -> SnfResult {
    let w = attempt(a).expect("bigint elimination cannot overflow");
    finish(w, Arithmetic::Arbitrary, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &SnfResult) -> Vec<i64> {
        v.divisors.iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn textbook_example() {
        let a = IntegerMatrix::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&a);
        assert_eq!(ints(&s), vec![2, 6, 12]);
        assert_eq!(s.arithmetic, Arithmetic::Machine);
    }

    #[test]
    fn zero_matrix() {
        let s = smith_normal_form(&IntegerMatrix::zeros(4, 3));
        assert!(s.divisors.is_empty());
        assert_eq!((s.kernel_rank, s.cokernel_free_rank), (3, 4));
    }

    #[test]
    fn non_square_and_divisibility_repair() {
        let a = IntegerMatrix::from_rows(vec![vec![2, 0], vec![0, 3], vec![0, 0]]);
        let s = smith_normal_form(&a);
        assert_eq!(ints(&s), vec![1, 6]);
        assert_eq!(s.torsion(), vec![BigInt::from(6)]);
        assert_eq!(s.cokernel_free_rank, 1);
    }

    #[test]
    fn overflow_escalates_to_bigint() {
        let a = IntegerMatrix::from_rows(vec![vec![2, 0], vec![0, i64::MAX]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.arithmetic, Arithmetic::Arbitrary);
        assert_eq!(s.divisors, vec![<BigInt as One>::one(), BigInt::from(i64::MAX) * 2]);
    }

    #[test]
    fn serializes_large_divisors_as_strings() {
        let a = IntegerMatrix::from_rows(vec![vec![2, 0], vec![0, i64::MAX]]);
        let json = serde_json::to_value(smith_normal_form(&a)).unwrap();
        assert_eq!(json["divisors"][0], 1);
        assert_eq!(json["divisors"][1], "18446744073709551614");
    }
}
