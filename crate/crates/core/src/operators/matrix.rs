use crate::rate::Rate;
use crate::sectors::Sector;
use faer::Mat;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::ops::Neg;

/// Field of matrix entries: floats, complex floats or exact rationals.
pub trait Scalar: Clone + Debug + Display + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    fn from_rate(r: &Rate) -> Self;
    fn from_i64(v: i64) -> Self;
    /// Modulus as a float.
    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> Complex64;
}

impl Scalar for f64 {
    fn from_rate(r: &Rate) -> Self {
        r.value()
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn from_rate(r: &Rate) -> Self {
        Complex64::new(r.value(), 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_rate(r: &Rate) -> Self {
        r.exact().clone()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// Sparse matrix between two sector spaces. Explicit zeros are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct RateMatrix<T: Scalar> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), T>,
    pub domain: Option<Sector>,
    pub codomain: Option<Sector>,
}

impl<T: Scalar> RateMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: BTreeMap::new(), domain: None, codomain: None }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), T::one());
        }
        m
    }

    pub fn with_sectors(mut self, domain: Option<Sector>, codomain: Option<Sector>) -> Self {
        self.domain = domain;
        self.codomain = codomain;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Add `v` to entry `(r, c)`, dropping it if the sum is zero.
    pub fn add(&mut self, r: usize, c: usize, v: T) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) outside {}x{}", self.rows, self.cols);
        if v.is_zero() {
            return;
        }
        match self.entries.remove(&(r, c)) {
            Some(old) => {
                let s = old + v;
                if !s.is_zero() {
                    self.entries.insert((r, c), s);
                }
            }
            None => {
                self.entries.insert((r, c), v);
            }
        }
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(T::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            m.entries.insert((c, r), v.clone());
        }
        m.domain = self.codomain.clone();
        m.codomain = self.domain.clone();
        m
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> RateMatrix<U> {
        let mut m = RateMatrix::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m.add(r, c, f(v));
        }
        m.domain = self.domain.clone();
        m.codomain = self.codomain.clone();
        m
    }

    /// Sparse product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut by_row: Vec<Vec<(usize, &T)>> = vec![Vec::new(); rhs.rows];
        for (&(r, c), v) in &rhs.entries {
            by_row[r].push((c, v));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (&(r, k), a) in &self.entries {
            for &(c, b) in &by_row[k] {
                out.add(r, c, a.clone() * b.clone());
            }
        }
        out.domain = rhs.domain.clone();
        out.codomain = self.codomain.clone();
        out
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (&(r, c), v) in &rhs.entries {
            out.add(r, c, -v.clone());
        }
        out
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (&(r, c), v) in &rhs.entries {
            out.add(r, c, v.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn column_sums(&self) -> Vec<T> {
        let mut s = vec![T::zero(); self.cols];
        for (&(_, c), v) in &self.entries {
            s[c] = s[c].clone() + v.clone();
        }
        s
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![T::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            y[r] = y[r].clone() + v.clone() * x[c].clone();
        }
        y
    }

    pub fn to_dense_c64(&self) -> Mat<Complex64> {
        let mut m = Mat::<Complex64>::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m[(r, c)] = v.to_c64();
        }
        m
    }

    /// Coordinate-list CSV `row,col,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,value\n");
        for (&(r, c), v) in &self.entries {
            s.push_str(&format!("{r},{c},{v}\n"));
        }
        s
    }
}

impl RateMatrix<f64> {
    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m[(r, c)] = *v;
        }
        m
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// JSON envelope for an exported matrix.
#[derive(Serialize)]
pub struct MatrixEnvelope {
    pub sector: Option<String>,
    pub codomain: Option<String>,
    pub p: String,
    pub q: String,
    pub basis: Vec<String>,
    pub codomain_basis: Vec<String>,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

impl<T: Scalar> RateMatrix<T> {
    pub fn envelope(&self, p: &Rate, q: &Rate, basis: &[String], codomain_basis: &[String]) -> MatrixEnvelope {
        MatrixEnvelope {
            sector: self.domain.as_ref().map(Sector::text),
            codomain: self.codomain.as_ref().map(Sector::text),
            p: p.to_string(),
            q: q.to_string(),
            basis: basis.to_vec(),
            codomain_basis: codomain_basis.to_vec(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries().map(|(r, c, v)| (r, c, v.to_string())).collect(),
        }
    }
}
