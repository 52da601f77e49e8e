//! Exact linear algebra over the rationals and over odd prime fields.
//!
//! Everything downstream (normal forms, differentials, lifting systems,
//! class identification) goes through the three primitives here:
//! [`ExactMatrix::echelonize`], [`ExactMatrix::kernel_basis`] and
//! [`ExactMatrix::solve`]. The pivot rule is fixed (leftmost nonzero
//! column, topmost nonzero row, pivot scaled to one) so that every result
//! is reproducible bit for bit.
//!
//! The rationals stand in for an arbitrary characteristic-zero field: the
//! structure constants of the algebras handled here are integers, so ranks
//! and dimensions agree with those over any field of characteristic zero.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic 2 is not supported: the cohomology computations assume Char(K) != 2")]
    CharacteristicTwo,
    #[error("characteristic {0} is neither 0 nor an odd prime")]
    NotPrime(u64),
    #[error("characteristic {0} is too large for the modular backend")]
    TooLarge(u64),
}

/// The ground field: the rationals (characteristic 0) or `F_p` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldSpec {
    characteristic: u64,
}

impl FieldSpec {
    pub fn new(characteristic: u64) -> Result<Self, FieldError> {
        match characteristic {
            0 => Ok(Self { characteristic }),
            2 => Err(FieldError::CharacteristicTwo),
            p if p > u32::MAX as u64 => Err(FieldError::TooLarge(p)),
            p if !is_prime(p) => Err(FieldError::NotPrime(p)),
            p => Ok(Self { characteristic: p }),
        }
    }

    pub fn rationals() -> Self {
        Self { characteristic: 0 }
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn is_rational(&self) -> bool {
        self.characteristic == 0
    }

    /// Whether the characteristic divides `m` (never true for the rationals unless `m == 0`).
    pub fn divides(&self, m: i64) -> bool {
        if self.characteristic == 0 {
            m == 0
        } else {
            m.rem_euclid(self.characteristic as i64) == 0
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        if self.characteristic == 0 {
            Scalar::Rational(BigRational::from_integer(BigInt::from(v)))
        } else {
            let p = self.characteristic;
            Scalar::Modular {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            }
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        self.from_i64(num) / self.from_i64(den)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.characteristic == 0 {
            write!(f, "Q")
        } else {
            write!(f, "F_{}", self.characteristic)
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::rationals(),
            Scalar::Modular { modulus, .. } => FieldSpec {
                characteristic: *modulus,
            },
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    /// The integer this scalar equals, if any. Modular values use the
    /// symmetric representative in `(-p/2, p/2]`.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(r) if r.is_integer() => r.to_integer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Modular { value, modulus } => {
                let v = *value as i64;
                let p = *modulus as i64;
                Some(if v > p / 2 { v - p } else { v })
            }
        }
    }

    /// Exact textual form: `p/q` or `p` for rationals, the symmetric
    /// representative for modular values.
    pub fn to_exact_string(&self) -> String {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Modular { .. } => self.to_i64().unwrap().to_string(),
        }
    }

    pub fn is_negative_integer_like(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Modular { .. } => self.to_i64().map(|v| v < 0).unwrap_or(false),
        }
    }

    fn pair_mod(a: &Scalar, b: &Scalar) -> (u64, u64, u64) {
        match (a, b) {
            (
                Scalar::Modular { value: x, modulus: p },
                Scalar::Modular { value: y, modulus: q },
            ) => {
                assert_eq!(p, q, "scalars from different prime fields");
                (*x, *y, *p)
            }
            _ => panic!("mixing rational and modular scalars"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_exact_string())
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => {
                let (x, y, p) = Scalar::pair_mod(self, rhs);
                Scalar::Modular {
                    value: (x + y) % p,
                    modulus: p,
                }
            }
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            _ => {
                let (x, y, p) = Scalar::pair_mod(self, rhs);
                Scalar::Modular {
                    value: (x + p - y) % p,
                    modulus: p,
                }
            }
        }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => {
                let (x, y, p) = Scalar::pair_mod(self, rhs);
                Scalar::Modular {
                    value: x * y % p,
                    modulus: p,
                }
            }
        }
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inverse().expect("division by zero");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

/// Column processing order for elimination. `Natural` is the canonical rule;
/// `Reversed` exists so callers can produce a second, different solution of
/// an underdetermined system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotOrder {
    #[default]
    Natural,
    Reversed,
}

/// Dense matrix over a single field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

#[derive(Clone, Debug)]
pub struct Echelon {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub reduced: ExactMatrix,
}

impl ExactMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_i64_rows(field: FieldSpec, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, field.from_i64(*v));
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(field: FieldSpec, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, j, v.clone());
                }
            }
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: &Scalar) {
        let idx = r * self.cols + c;
        self.data[idx] += v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if !v.is_zero() {
                    t.set(c, r, v.clone());
                }
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|r| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = ExactMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> ExactMatrix {
        let mut out = self.clone();
        for v in &mut out.data {
            if !v.is_zero() {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += b;
            }
        }
        out
    }

    /// Reduced row echelon form with the canonical pivot rule.
    pub fn echelonize(&self) -> Echelon {
        self.echelonize_with(PivotOrder::Natural)
    }

    pub fn echelonize_with(&self, order: PivotOrder) -> Echelon {
        let mut m = self.clone();
        let col_order: Vec<usize> = match order {
            PivotOrder::Natural => (0..self.cols).collect(),
            PivotOrder::Reversed => (0..self.cols).rev().collect(),
        };
        let mut pivots = Vec::new();
        let mut row = 0;
        for &c in &col_order {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            if p != row {
                m.swap_rows(p, row);
            }
            let inv = m.get(row, c).inverse().unwrap();
            if !inv.is_one() {
                for j in 0..m.cols {
                    let v = m.get(row, j);
                    if !v.is_zero() {
                        let nv = v * &inv;
                        m.set(row, j, nv);
                    }
                }
            }
            let pivot_row: Vec<(usize, Scalar)> = m
                .row(row)
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, v.clone()))
                .collect();
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                for (j, v) in &pivot_row {
                    let delta = &f * v;
                    let idx = r * m.cols + j;
                    m.data[idx] -= &delta;
                }
            }
            pivots.push(c);
            row += 1;
        }
        Echelon {
            rank: pivots.len(),
            pivots,
            reduced: m,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Eliminating along the shorter side is cheaper and gives the same rank.
        if self.rows > 2 * self.cols {
            self.transpose().echelonize().rank
        } else {
            self.echelonize().rank
        }
    }

    /// Basis of the right kernel, one vector per free column, in echelon-canonical form.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let ech = self.echelonize();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (r, &p) in ech.pivots.iter().enumerate() {
                let e = ech.reduced.get(r, free);
                if !e.is_zero() {
                    v[p] = -e;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * x = b`; `None` when `b` is not in the column space.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        self.solve_with(b, PivotOrder::Natural)
    }

    pub fn solve_with(&self, b: &[Scalar], order: PivotOrder) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        let mut aug = ExactMatrix::zeros(self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if !v.is_zero() {
                    aug.set(r, c, v.clone());
                }
            }
            aug.set(r, self.cols, b[r].clone());
        }
        // The augmented column must never be chosen as a pivot before the
        // coefficient columns, so eliminate the coefficient part only.
        let ech = aug.echelonize_coefficients(self.cols, order);
        let mut x = vec![self.field.zero(); self.cols];
        for r in 0..self.rows {
            let rhs = ech.reduced.get(r, self.cols);
            match ech.pivots.get(r) {
                Some(&p) => x[p] = rhs.clone(),
                None => {
                    if !rhs.is_zero() {
                        return None;
                    }
                }
            }
        }
        Some(x)
    }

    fn echelonize_coefficients(&self, ncoef: usize, order: PivotOrder) -> Echelon {
        let mut m = self.clone();
        let col_order: Vec<usize> = match order {
            PivotOrder::Natural => (0..ncoef).collect(),
            PivotOrder::Reversed => (0..ncoef).rev().collect(),
        };
        let mut pivots = Vec::new();
        let mut row = 0;
        for &c in &col_order {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            if p != row {
                m.swap_rows(p, row);
            }
            let inv = m.get(row, c).inverse().unwrap();
            for j in 0..m.cols {
                let v = m.get(row, j);
                if !v.is_zero() {
                    let nv = v * &inv;
                    m.set(row, j, nv);
                }
            }
            let pivot_row: Vec<(usize, Scalar)> = m
                .row(row)
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, v.clone()))
                .collect();
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                for (j, v) in &pivot_row {
                    let delta = &f * v;
                    let idx = r * m.cols + j;
                    m.data[idx] -= &delta;
                }
            }
            pivots.push(c);
            row += 1;
        }
        Echelon {
            rank: pivots.len(),
            pivots,
            reduced: m,
        }
    }

    /// Determinant of a square matrix.
    pub fn determinant(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = self.field.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m.get(r, c).is_zero()) else {
                return self.field.zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            let inv = piv.inverse().unwrap();
            for r in (c + 1)..n {
                let f = m.get(r, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let delta = &f * m.get(c, j);
                    if !delta.is_zero() {
                        let idx = r * n + j;
                        m.data[idx] -= &delta;
                    }
                }
            }
        }
        det
    }

    /// Reduces every entry of an integer-valued rational matrix into `F_p`.
    pub fn reduce_mod(&self, target: FieldSpec) -> Option<ExactMatrix> {
        let mut out = ExactMatrix::zeros(target, self.rows, self.cols);
        for (i, v) in self.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let Scalar::Rational(r) = v else {
                return None;
            };
            if !r.is_integer() {
                return None;
            }
            let p = BigInt::from(target.characteristic());
            let red = ((r.numer() % &p) + &p) % &p;
            out.data[i] = target.from_i64(red.to_i64()?);
        }
        Some(out)
    }
}

/// A factorization of `A` that solves `A x = b` for many right-hand sides.
///
/// Built by reducing `[A | I]`; the right block records the row operations,
/// so each solve is one matrix-vector product plus a consistency check.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    cols: usize,
    pivots: Vec<usize>,
    transform: ExactMatrix,
}

impl LinearSolver {
    pub fn new(a: &ExactMatrix, order: PivotOrder) -> Self {
        let (m, k) = (a.rows, a.cols);
        let mut aug = ExactMatrix::zeros(a.field, m, k + m);
        for r in 0..m {
            for c in 0..k {
                let v = a.get(r, c);
                if !v.is_zero() {
                    aug.set(r, c, v.clone());
                }
            }
            aug.set(r, k + r, a.field.one());
        }
        let ech = aug.echelonize_coefficients(k, order);
        let mut transform = ExactMatrix::zeros(a.field, m, m);
        for r in 0..m {
            for c in 0..m {
                let v = ech.reduced.get(r, k + c);
                if !v.is_zero() {
                    transform.set(r, c, v.clone());
                }
            }
        }
        Self {
            cols: k,
            pivots: ech.pivots,
            transform,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        let y = self.transform.mul_vec(b);
        if y[self.pivots.len()..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let field = self.transform.field;
        let mut x = vec![field.zero(); self.cols];
        for (r, &p) in self.pivots.iter().enumerate() {
            x[p] = y[r].clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn rejects_characteristic_two_and_composites() {
        assert_eq!(FieldSpec::new(2), Err(FieldError::CharacteristicTwo));
        assert_eq!(FieldSpec::new(9), Err(FieldError::NotPrime(9)));
        assert!(FieldSpec::new(1).is_err());
        assert!(FieldSpec::new(7).is_ok());
        let msg = FieldError::CharacteristicTwo.to_string();
        assert!(msg.contains("Char(K) != 2"));
    }

    #[test]
    fn identity_and_zero_ranks() {
        assert_eq!(ExactMatrix::identity(q(), 2).echelonize().rank, 2);
        assert_eq!(ExactMatrix::zeros(q(), 3, 4).echelonize().rank, 0);
    }

    #[test]
    fn c_matrix_for_two_vertices_has_rank_one_mod_five() {
        let f5 = FieldSpec::new(5).unwrap();
        let m = ExactMatrix::from_i64_rows(f5, &[vec![-2, 1], vec![1, -3]]);
        assert_eq!(m.echelonize().rank, 1);
        let mq = ExactMatrix::from_i64_rows(q(), &[vec![-2, 1], vec![1, -3]]);
        assert_eq!(mq.rank(), 2);
    }

    #[test]
    fn kernel_examples() {
        assert!(ExactMatrix::identity(q(), 3).kernel_basis().is_empty());
        let k = ExactMatrix::zeros(q(), 2, 2).kernel_basis();
        assert_eq!(k, vec![vec![q().one(), q().zero()], vec![q().zero(), q().one()]]);
        let k = ExactMatrix::from_i64_rows(q(), &[vec![1, 1]]).kernel_basis();
        assert_eq!(k, vec![vec![q().from_i64(-1), q().one()]]);
    }

    #[test]
    fn solve_examples() {
        let b = vec![q().from_i64(3), q().from_i64(-4)];
        assert_eq!(ExactMatrix::identity(q(), 2).solve(&b), Some(b.clone()));
        assert_eq!(ExactMatrix::zeros(q(), 2, 2).solve(&b), None);
        let m = ExactMatrix::from_i64_rows(q(), &[vec![2]]);
        assert_eq!(m.solve(&[q().one()]), Some(vec![q().from_ratio(1, 2)]));
    }

    #[test]
    fn reversed_pivots_give_another_solution() {
        let m = ExactMatrix::from_i64_rows(q(), &[vec![1, 1]]);
        let b = [q().one()];
        let s1 = m.solve_with(&b, PivotOrder::Natural).unwrap();
        let s2 = m.solve_with(&b, PivotOrder::Reversed).unwrap();
        assert_eq!(s1, vec![q().one(), q().zero()]);
        assert_eq!(s2, vec![q().zero(), q().one()]);
    }

    #[test]
    fn modular_arithmetic() {
        let f7 = FieldSpec::new(7).unwrap();
        let a = f7.from_i64(3);
        assert_eq!((&a * &a.inverse().unwrap()), f7.one());
        assert_eq!(f7.from_i64(-1).to_i64(), Some(-1));
        assert_eq!(f7.from_i64(-3).to_exact_string(), "-3");
        assert_eq!(q().from_ratio(-3, 6).to_exact_string(), "-1/2");
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = ExactMatrix::from_i64_rows(q(), &[vec![4, 2], vec![2, 2]]);
        assert_eq!(m.determinant(), q().from_i64(4));
        let m = ExactMatrix::from_i64_rows(q(), &[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]);
        // 0*(0*8-3*-3) - 1*(1*8-3*4) + 2*(1*-3-0*4) = 0 + 4 - 6
        assert_eq!(m.determinant(), q().from_i64(-2));
    }
}
