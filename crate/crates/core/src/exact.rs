//! Dense matrices over exact and floating scalars, plus the integer
//! normal forms (Smith, column Hermite) and the exact positive-definiteness
//! test used to validate levels.
//!
//! Matrices are row-major; the row-major flattening of an `h x g` matrix is
//! the vectorization used by every analysis module.

use std::fmt::Debug;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::Integer;

use crate::error::{Error, Result};

/// Ring element usable as a matrix entry.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Equality up to the scalar's natural tolerance: exact for integers and
    /// rationals, `1e-12` relative for floats.
    fn near(&self, other: &Self) -> bool;
}

/// Ordered scalars with a floor, i.e. the ones group coordinates live in.
pub trait RealScalar: Scalar + PartialOrd {
    fn floor_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn is_integral(&self) -> bool;
    fn from_i64(v: i64) -> Self;
}

const FLOAT_TOL: f64 = 1e-12;

impl Scalar for BigRational {
    fn near(&self, other: &Self) -> bool {
        self == other
    }
}

impl Scalar for BigInt {
    fn near(&self, other: &Self) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    fn near(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= FLOAT_TOL * scale
    }
}

impl Scalar for Complex64 {
    fn near(&self, other: &Self) -> bool {
        let scale = 1f64.max(self.norm()).max(other.norm());
        (self - other).norm() <= FLOAT_TOL * scale
    }
}

impl RealScalar for BigRational {
    fn floor_val(&self) -> Self {
        self.floor()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_integral(&self) -> bool {
        self.is_integer()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

impl RealScalar for f64 {
    fn floor_val(&self) -> Self {
        self.floor()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_integral(&self) -> bool {
        (self - self.round()).abs() <= FLOAT_TOL * 1f64.max(self.abs())
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

/// Shorthand for the rational `num / den`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMat = Mat<BigInt>;
pub type RatMat = Mat<BigRational>;
pub type RealMat = Mat<f64>;
pub type CplxMat = Mat<Complex64>;

impl<T: Clone> Mat<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
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

    /// Row-major entries; this is the vectorization of the matrix.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn submatrix(&self, rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |i, j| self[(i, j)].clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)].near(&self[(j, i)])))
    }

    pub fn near(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.data.iter().zip(&other.data).all(|(a, b)| a.near(b))
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Mat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * rhs[(k, j)].clone();
            }
            acc
        }))
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// `[[a, b], [c, d]]` block matrix.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::DimensionMismatch("incompatible blocks".into()));
        }
        Ok(Mat::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < a.rows, j < a.cols) {
            (true, true) => a[(i, j)].clone(),
            (true, false) => b[(i, j - a.cols)].clone(),
            (false, true) => c[(i - a.rows, j)].clone(),
            (false, false) => d[(i - a.rows, j - a.cols)].clone(),
        }))
    }

    /// `σ(self · ᵗother)`, the Frobenius pairing; `self` and `other` must share a shape.
    pub fn frobenius_dot(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape(), "frobenius_dot shape mismatch");
        self.data.iter().zip(&other.data).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }
}

impl<T: Scalar> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: Self) -> Mat<T> {
        self.checked_add(rhs).expect("matrix addition")
    }
}

impl<T: Scalar> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: Self) -> Mat<T> {
        self.checked_sub(rhs).expect("matrix subtraction")
    }
}

impl<T: Scalar> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: Self) -> Mat<T> {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl<T: Scalar> Neg for &Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Mat<T> {
        self.map(|x| -x.clone())
    }
}

impl IntMat {
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn to_rational(&self) -> RatMat {
        self.map(|x| BigRational::from_integer(x.clone()))
    }

    pub fn to_f64(&self) -> RealMat {
        self.map(|x| x.to_f64().unwrap_or(f64::NAN))
    }

    pub fn to_i64(&self) -> Option<Mat<i64>> {
        let data = self.data.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<_>>>()?;
        Some(Mat { rows: self.rows, cols: self.cols, data })
    }
}

impl RatMat {
    pub fn from_fracs(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect()).collect())
    }

    pub fn to_f64(&self) -> RealMat {
        self.map(RealScalar::to_f64)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Integer matrix if every entry is integral.
    pub fn to_integer(&self) -> Option<IntMat> {
        self.is_integral().then(|| self.map(|x| x.to_integer()))
    }
}

impl RealMat {
    pub fn to_complex(&self) -> CplxMat {
        self.map(|&x| Complex64::new(x, 0.0))
    }
}

impl Mat<i64> {
    pub fn to_f64(&self) -> RealMat {
        self.map(|&x| x as f64)
    }

    pub fn to_big(&self) -> IntMat {
        self.map(|&x| BigInt::from(x))
    }
}

impl Scalar for i64 {
    fn near(&self, other: &Self) -> bool {
        self == other
    }
}

/// `σ(A)`, the trace of a square matrix.
pub fn trace<T: Scalar>(a: &Mat<T>) -> Result<T> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows, cols: a.cols });
    }
    Ok((0..a.rows).fold(T::zero(), |acc, i| acc + a[(i, i)].clone()))
}

/// `B[A] = ᵗA·B·A`.
pub fn bracket<T: Scalar>(b: &Mat<T>, a: &Mat<T>) -> Result<Mat<T>> {
    if !b.is_square() {
        return Err(Error::NotSquare { rows: b.rows, cols: b.cols });
    }
    a.transpose().checked_mul(b)?.checked_mul(a)
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn det_int(a: &IntMat) -> Result<BigInt> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows, cols: a.cols });
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = v / &prev;
            }
        }
        prev = m[(k, k)].clone();
    }
    Ok(sign * m[(n - 1, n - 1)].clone())
}

/// Determinant over the rationals by Gaussian elimination.
pub fn det_rational(a: &RatMat) -> Result<BigRational> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows, cols: a.cols });
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[(i, k)].is_zero()) else {
            return Ok(BigRational::zero());
        };
        if p != k {
            m.swap_rows(k, p);
            det = -det;
        }
        let pivot = m[(k, k)].clone();
        det *= &pivot;
        for i in k + 1..n {
            let f = &m[(i, k)] / &pivot;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = &m[(i, j)] - &f * &m[(k, j)];
                m[(i, j)] = v;
            }
        }
    }
    Ok(det)
}

/// Exact positive-definiteness verdict with the leading principal minors as
/// certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Definiteness {
    pub positive: bool,
    pub minors: Vec<BigRational>,
}

/// Sylvester's criterion on exact rationals.
pub fn is_positive_definite(s: &RatMat) -> Result<Definiteness> {
    if !s.is_square() {
        return Err(Error::NotSquare { rows: s.rows, cols: s.cols });
    }
    if !s.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let minors = (1..=s.rows).map(|k| det_rational(&s.submatrix(k, k))).collect::<Result<Vec<_>>>()?;
    let positive = minors.iter().all(|m| m.is_positive());
    Ok(Definiteness { positive, minors })
}

/// `T = U·D·V` with `U`, `V` unimodular and `D = diag(d₁, …, dₙ)`, `d₁ | d₂ | …`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
}

impl SmithForm {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows).map(|i| self.d[(i, i)].clone()).collect()
    }
}

fn min_pivot(a: &IntMat, k: usize) -> Option<(usize, usize)> {
    let n = a.rows;
    let mut best: Option<(usize, usize)> = None;
    for i in k..n {
        for j in k..n {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smith normal form of a nonsingular square integer matrix.
///
/// Pivoting always takes the entry of least absolute value, first in
/// row-major order, so the transforms are deterministic.
pub fn smith_normal_form(t: &IntMat) -> Result<SmithForm> {
    if det_int(t)?.is_zero() {
        return Err(Error::Singular);
    }
    let n = t.rows;
    let mut a = t.clone();
    // invariant: t == u * a * v
    let mut u = IntMat::identity(n);
    let mut v = IntMat::identity(n);

    for k in 0..n {
        loop {
            let (pi, pj) = min_pivot(&a, k).expect("nonsingular matrix has a pivot");
            a.swap_rows(k, pi);
            u.swap_cols(k, pi);
            a.swap_cols(k, pj);
            v.swap_rows(k, pj);

            let mut clean = true;
            for i in k + 1..n {
                let q = a[(i, k)].div_floor(&a[(k, k)]);
                if !q.is_zero() {
                    for j in 0..n {
                        let s = &a[(i, j)] - &q * &a[(k, j)];
                        a[(i, j)] = s;
                        let s = &u[(j, k)] + &q * &u[(j, i)];
                        u[(j, k)] = s;
                    }
                }
                clean &= a[(i, k)].is_zero();
            }
            for j in k + 1..n {
                let q = a[(k, j)].div_floor(&a[(k, k)]);
                if !q.is_zero() {
                    for i in 0..n {
                        let s = &a[(i, j)] - &q * &a[(i, k)];
                        a[(i, j)] = s;
                        let s = &v[(k, i)] + &q * &v[(j, i)];
                        v[(k, i)] = s;
                    }
                }
                clean &= a[(k, j)].is_zero();
            }
            if !clean {
                continue;
            }

            let pivot = a[(k, k)].clone();
            let bad_row = (k + 1..n).find(|&i| (k + 1..n).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match bad_row {
                Some(i) => {
                    // row_k += row_i
                    for j in 0..n {
                        let s = &a[(k, j)] + &a[(i, j)];
                        a[(k, j)] = s;
                        let s = &u[(j, i)] - &u[(j, k)];
                        u[(j, i)] = s;
                    }
                }
                None => break,
            }
        }
        if a[(k, k)].is_negative() {
            for j in 0..n {
                a[(k, j)] = -a[(k, j)].clone();
                u[(j, k)] = -u[(j, k)].clone();
            }
        }
    }
    Ok(SmithForm { u, d: a, v })
}

/// `H = T·V` with `V` unimodular and `H` lower triangular, positive diagonal,
/// and `0 ≤ H[i][j] < H[i][i]` for `j < i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnHermite {
    pub h: IntMat,
    pub v: IntMat,
}

impl ColumnHermite {
    /// Reduces an integer vector modulo the column lattice `H·Zⁿ`:
    /// returns `(r, q)` with `x = r + H·q` and `0 ≤ rᵢ < Hᵢᵢ`.
    pub fn reduce(&self, x: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
        let n = self.h.rows;
        assert_eq!(x.len(), n, "vector length");
        let mut r = x.to_vec();
        let mut q = vec![BigInt::zero(); n];
        for i in 0..n {
            let qi = r[i].div_floor(&self.h[(i, i)]);
            if !qi.is_zero() {
                for (k, rk) in r.iter_mut().enumerate().skip(i) {
                    *rk -= &qi * &self.h[(k, i)];
                }
            }
            q[i] = qi;
        }
        (r, q)
    }
}

pub fn column_hermite(t: &IntMat) -> Result<ColumnHermite> {
    if det_int(t)?.is_zero() {
        return Err(Error::Singular);
    }
    let n = t.rows;
    let mut a = t.clone();
    let mut v = IntMat::identity(n);
    let col_axpy = |m: &mut IntMat, dst: usize, src: usize, q: &BigInt| {
        for r in 0..m.rows {
            let s = &m[(r, dst)] - q * &m[(r, src)];
            m[(r, dst)] = s;
        }
    };
    for i in 0..n {
        loop {
            let pivot = (i..n)
                .filter(|&j| !a[(i, j)].is_zero())
                .min_by(|&x, &y| a[(i, x)].abs().cmp(&a[(i, y)].abs()).then(x.cmp(&y)))
                .expect("nonsingular matrix has a pivot");
            a.swap_cols(i, pivot);
            v.swap_cols(i, pivot);
            let mut clean = true;
            for j in i + 1..n {
                let q = a[(i, j)].div_floor(&a[(i, i)]);
                if !q.is_zero() {
                    col_axpy(&mut a, j, i, &q);
                    col_axpy(&mut v, j, i, &q);
                }
                clean &= a[(i, j)].is_zero();
            }
            if clean {
                break;
            }
        }
        if a[(i, i)].is_negative() {
            for r in 0..n {
                a[(r, i)] = -a[(r, i)].clone();
                v[(r, i)] = -v[(r, i)].clone();
            }
        }
        for j in 0..i {
            let q = a[(i, j)].div_floor(&a[(i, i)]);
            if !q.is_zero() {
                col_axpy(&mut a, j, i, &q);
                col_axpy(&mut v, j, i, &q);
            }
        }
    }
    Ok(ColumnHermite { h: a, v })
}

/// A positive-definite symmetric half-integral matrix `M`, held as the
/// integer matrix `T = 2M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    t: IntMat,
    m: RatMat,
    certificate: Definiteness,
}

impl Level {
    pub fn new(t: IntMat) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::NotSquare { rows: t.rows, cols: t.cols });
        }
        if !t.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let m = t.to_rational().scale(&rat(1, 2));
        let certificate = is_positive_definite(&m)?;
        if !certificate.positive {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Level { t, m, certificate })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMat::from_i64(rows)?)
    }

    pub fn h(&self) -> usize {
        self.t.rows
    }

    /// `T = 2M`.
    pub fn t(&self) -> &IntMat {
        &self.t
    }

    pub fn m(&self) -> &RatMat {
        &self.m
    }

    pub fn m_f64(&self) -> RealMat {
        self.m.to_f64()
    }

    pub fn t_f64(&self) -> RealMat {
        self.t.to_f64()
    }

    pub fn det_t(&self) -> BigInt {
        det_int(&self.t).expect("square")
    }

    pub fn certificate(&self) -> &Definiteness {
        &self.certificate
    }

    /// True when `M` itself is an integer matrix.
    pub fn is_integral(&self) -> bool {
        self.m.is_integral()
    }

    /// `T` as nested rows of machine integers (for reports and configs).
    pub fn t_rows(&self) -> Vec<Vec<i64>> {
        let t = self.t.to_i64().expect("level entries fit in i64");
        (0..t.rows).map(|i| t.data[i * t.cols..(i + 1) * t.cols].to_vec()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ri(rows: &[&[i64]]) -> IntMat {
        IntMat::from_i64(rows).unwrap()
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace(&RatMat::identity(2)).unwrap(), rat(2, 1));
        assert_eq!(trace(&ri(&[&[1, 2], &[3, 4]])).unwrap(), BigInt::from(5));
        assert!(trace(&RatMat::zeros(3, 3)).unwrap().is_zero());
        assert!(matches!(trace(&RatMat::zeros(2, 3)), Err(Error::NotSquare { rows: 2, cols: 3 })));
    }

    #[test]
    fn bracket_examples() {
        let b = ri(&[&[2, 0], &[0, 2]]);
        assert_eq!(bracket(&b, &IntMat::identity(2)).unwrap(), b);
        assert_eq!(bracket(&b, &ri(&[&[1], &[1]])).unwrap(), ri(&[&[4]]));
        let sym = ri(&[&[1, 3], &[3, -2]]);
        let a = ri(&[&[1, 2, 0], &[5, -1, 7]]);
        assert!(bracket(&sym, &a).unwrap().is_symmetric());
        assert!(bracket(&sym, &ri(&[&[1, 2, 3]])).is_err());
    }

    #[test]
    fn bracket_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let b = Mat::from_fn(3, 3, |_, _| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
            let a1 = Mat::from_fn(3, 2, |_, _| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
            let a2 = Mat::from_fn(2, 4, |_, _| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
            let lhs = bracket(&b, &(&a1 * &a2)).unwrap();
            let rhs = bracket(&bracket(&b, &a1).unwrap(), &a2).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn trace_is_cyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let a = Mat::from_fn(n, n, |_, _| rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)));
            let b = Mat::from_fn(n, n, |_, _| rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)));
            assert_eq!(trace(&(&a * &b)).unwrap(), trace(&(&b * &a)).unwrap());
        }
    }

    #[test]
    fn snf_examples() {
        let snf = smith_normal_form(&IntMat::identity(3)).unwrap();
        assert_eq!(snf.d, IntMat::identity(3));
        let snf = smith_normal_form(&ri(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(snf.d, ri(&[&[1, 0], &[0, 6]]));
        let snf = smith_normal_form(&ri(&[&[3]])).unwrap();
        assert_eq!(snf.d, ri(&[&[3]]));
        assert_eq!(smith_normal_form(&ri(&[&[1, 2], &[2, 4]])), Err(Error::Singular));
    }

    fn check_snf(t: &IntMat) {
        let snf = smith_normal_form(t).unwrap();
        assert_eq!(&(&snf.u * &snf.d) * &snf.v, *t);
        assert_eq!(det_int(&snf.u).unwrap().abs(), BigInt::one());
        assert_eq!(det_int(&snf.v).unwrap().abs(), BigInt::one());
        let d = snf.invariant_factors();
        for w in d.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]), "{d:?}");
        }
        let prod: BigInt = d.iter().product();
        assert_eq!(prod, det_int(t).unwrap().abs());
        for i in 0..t.rows() {
            for j in 0..t.rows() {
                if i != j {
                    assert!(snf.d[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn snf_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut done = 0;
        while done < 200 {
            let n = rng.gen_range(1..=5);
            let t = Mat::from_fn(n, n, |_, _| BigInt::from(rng.gen_range(-6..=6)));
            if det_int(&t).unwrap().is_zero() {
                continue;
            }
            check_snf(&t);
            done += 1;
        }
    }

    #[test]
    fn bareiss_matches_rational_det() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let t = Mat::from_fn(n, n, |_, _| BigInt::from(rng.gen_range(-7..=7)));
            let exact = det_rational(&t.to_rational()).unwrap();
            assert_eq!(BigRational::from_integer(det_int(&t).unwrap()), exact);
        }
    }

    #[test]
    fn hermite_reduces() {
        let t = ri(&[&[4, 2], &[2, 4]]);
        let hnf = column_hermite(&t).unwrap();
        assert_eq!(&t * &hnf.v, hnf.h);
        assert!(hnf.h[(0, 1)].is_zero());
        assert_eq!(det_int(&hnf.v).unwrap().abs(), BigInt::one());
        let x = vec![BigInt::from(17), BigInt::from(-9)];
        let (r, q) = hnf.reduce(&x);
        for i in 0..2 {
            assert!(!r[i].is_negative() && r[i] < hnf.h[(i, i)]);
            let back = &r[i] + (0..2).map(|k| &hnf.h[(i, k)] * &q[k]).sum::<BigInt>();
            assert_eq!(back, x[i]);
        }
    }

    #[test]
    fn positive_definite_examples() {
        let pd = is_positive_definite(&RatMat::identity(2)).unwrap();
        assert!(pd.positive);
        let pd = is_positive_definite(&ri(&[&[1, 2], &[2, 1]]).to_rational()).unwrap();
        assert!(!pd.positive);
        assert_eq!(pd.minors, vec![rat(1, 1), rat(-3, 1)]);
        let pd = is_positive_definite(&ri(&[&[2, 1], &[1, 2]]).to_rational()).unwrap();
        assert!(pd.positive);
        assert_eq!(pd.minors, vec![rat(2, 1), rat(3, 1)]);
        assert_eq!(is_positive_definite(&ri(&[&[1, 2], &[0, 1]]).to_rational()), Err(Error::NotSymmetric));
    }

    #[test]
    fn level_construction() {
        let lvl = Level::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        assert_eq!(lvl.m()[(0, 1)], rat(1, 2));
        assert!(!lvl.is_integral());
        assert_eq!(lvl.det_t(), BigInt::from(3));
        assert!(Level::from_i64(&[&[2]]).unwrap().is_integral());
        assert_eq!(Level::from_i64(&[&[1, 2], &[2, 1]]), Err(Error::NotPositiveDefinite));
        assert_eq!(Level::from_i64(&[&[1, 2], &[0, 1]]), Err(Error::NotSymmetric));
    }
}
