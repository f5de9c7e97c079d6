//! Exact arithmetic over prime fields F_p and the dense linear algebra the
//! rest of the crate is built on: row reduction, kernels, solving against a
//! fixed spanning set, and incremental rank tracking.
//!
//! Everything is exact. Matrices are dense and row-major; the spaces that
//! show up here have at most a few thousand coordinates, where dense
//! elimination is both the simplest and the fastest option.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::Error;

/// A validated prime modulus.
///
/// Construction is the only place primality is checked; everything downstream
/// trusts the wrapper. The modulus is capped below 2^31 so that products of
/// two reduced residues never overflow `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Prime, Error> {
        if !(2..1 << 31).contains(&p) {
            return Err(Error::InvalidModulus(p));
        }
        let mut d = 2;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::InvalidModulus(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a != 0 && a < p);
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "modulus must be prime");
    s0.rem_euclid(p as i64) as u64
}

/// A scalar in F_p, stored as its canonical residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl Fp {
    pub fn new(value: i64, p: Prime) -> Fp {
        Fp {
            value: value.rem_euclid(p.0 as i64) as u64,
            p: p.0,
        }
    }

    pub fn from_u64(value: u64, p: Prime) -> Fp {
        Fp {
            value: value % p.0,
            p: p.0,
        }
    }

    pub fn zero(p: Prime) -> Fp {
        Fp { value: 0, p: p.0 }
    }

    pub fn one(p: Prime) -> Fp {
        Fp { value: 1 % p.0, p: p.0 }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Fp, Error> {
        if self.value == 0 {
            return Err(Error::ZeroInverse(self.p));
        }
        Ok(Fp {
            value: inv_mod(self.value, self.p),
            p: self.p,
        })
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp { value: 1 % self.p, p: self.p };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        Fp { value: (self.value + rhs.value) % self.p, p: self.p }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        Fp { value: (self.value + self.p - rhs.value) % self.p, p: self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        Fp { value: self.value * rhs.value % self.p, p: self.p }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { value: (self.p - self.value) % self.p, p: self.p }
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A coordinate vector over F_p. All entries share one modulus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpVector {
    p: u64,
    data: Vec<u64>,
}

impl FpVector {
    pub fn zeros(p: Prime, len: usize) -> FpVector {
        FpVector { p: p.0, data: vec![0; len] }
    }

    pub fn basis(p: Prime, len: usize, i: usize) -> FpVector {
        assert!(i < len);
        let mut v = FpVector::zeros(p, len);
        v.data[i] = 1 % p.0;
        v
    }

    pub fn from_values(p: Prime, values: &[u64]) -> FpVector {
        FpVector {
            p: p.0,
            data: values.iter().map(|&v| v % p.0).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn get(&self, i: usize) -> Fp {
        Fp { value: self.data[i], p: self.p }
    }

    pub fn set(&mut self, i: usize, v: Fp) {
        assert_eq!(self.p, v.p, "mixed moduli");
        self.data[i] = v.value;
    }

    pub fn values(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn add(&self, rhs: &FpVector) -> FpVector {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        assert_eq!(self.len(), rhs.len(), "mixed lengths");
        FpVector {
            p: self.p,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| (a + b) % self.p)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &FpVector) -> FpVector {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        assert_eq!(self.len(), rhs.len(), "mixed lengths");
        FpVector {
            p: self.p,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| (a + self.p - b) % self.p)
                .collect(),
        }
    }

    pub fn scale(&self, c: Fp) -> FpVector {
        assert_eq!(self.p, c.p, "mixed moduli");
        FpVector {
            p: self.p,
            data: self.data.iter().map(|&a| a * c.value % self.p).collect(),
        }
    }

    pub fn neg(&self) -> FpVector {
        FpVector {
            p: self.p,
            data: self.data.iter().map(|&a| (self.p - a) % self.p).collect(),
        }
    }
}

impl Serialize for FpVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.data.len()))?;
        for v in &self.data {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

/// The result of full Gauss-Jordan reduction.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: FpMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// A dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix { p: p.0, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: Prime, n: usize) -> FpMatrix {
        let mut m = FpMatrix::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p.0;
        }
        m
    }

    pub fn from_rows(p: Prime, rows: &[FpVector]) -> FpMatrix {
        let cols = rows.first().map_or(0, FpVector::len);
        let mut m = FpMatrix::zeros(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.modulus(), p.0, "mixed moduli");
            assert_eq!(r.len(), cols, "ragged rows");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r.values());
        }
        m
    }

    pub fn from_columns(p: Prime, columns: &[FpVector]) -> FpMatrix {
        let rows = columns.first().map_or(0, FpVector::len);
        let mut m = FpMatrix::zeros(p, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.modulus(), p.0, "mixed moduli");
            assert_eq!(c.len(), rows, "ragged columns");
            for i in 0..rows {
                m.data[i * columns.len() + j] = c.values()[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn get(&self, r: usize, c: usize) -> Fp {
        assert!(r < self.rows && c < self.cols);
        Fp { value: self.data[r * self.cols + c], p: self.p }
    }

    pub fn set(&mut self, r: usize, c: usize, v: Fp) {
        assert!(r < self.rows && c < self.cols);
        assert_eq!(self.p, v.p, "mixed moduli");
        self.data[r * self.cols + c] = v.value;
    }

    pub fn row(&self, r: usize) -> FpVector {
        FpVector {
            p: self.p,
            data: self.data[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    pub fn column(&self, c: usize) -> FpVector {
        FpVector {
            p: self.p,
            data: (0..self.rows).map(|r| self.data[r * self.cols + c]).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == FpMatrix::identity(Prime(self.p), self.rows)
    }

    pub fn add(&self, rhs: &FpMatrix) -> FpMatrix {
        assert_eq!((self.p, self.rows, self.cols), (rhs.p, rhs.rows, rhs.cols));
        FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| (a + b) % self.p)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &FpMatrix) -> FpMatrix {
        assert_eq!((self.p, self.rows, self.cols), (rhs.p, rhs.rows, rhs.cols));
        FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| (a + self.p - b) % self.p)
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &FpMatrix) -> FpMatrix {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = FpMatrix::zeros(Prime(self.p), self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o = (*o + a * b) % self.p;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &FpVector) -> FpVector {
        assert_eq!(self.p, v.modulus(), "mixed moduli");
        assert_eq!(self.cols, v.len(), "inner dimensions differ");
        let out = (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                let mut acc = 0u64;
                for (&a, &b) in row.iter().zip(v.values()) {
                    acc = (acc + a * b) % self.p;
                }
                acc
            })
            .collect();
        FpVector { p: self.p, data: out }
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        assert_eq!(self.rows, self.cols, "pow needs a square matrix");
        let mut base = self.clone();
        let mut acc = FpMatrix::identity(Prime(self.p), self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Full Gauss-Jordan reduction: returns the reduced row echelon form,
    /// the rank, and the pivot columns in increasing order.
    pub fn rref(&self) -> Rref {
        let (rows, cols, p) = (self.rows, self.cols, self.p);
        let mut m = self.data.clone();
        let mut pivot_cols = Vec::new();
        let mut r = 0usize;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..cols {
                    m.swap(r * cols + k, pr * cols + k);
                }
            }
            let inv = inv_mod(m[r * cols + c], p);
            if inv != 1 {
                for k in c..cols {
                    m[r * cols + k] = m[r * cols + k] * inv % p;
                }
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = m[i * cols + c];
                if f == 0 {
                    continue;
                }
                let neg = p - f;
                let ro = r * cols;
                let io = i * cols;
                for k in c..cols {
                    m[io + k] = (m[io + k] + neg * m[ro + k]) % p;
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        Rref {
            reduced: FpMatrix { p, rows, cols, data: m },
            rank: r,
            pivot_cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// A basis of the right kernel {v : Av = 0}, one vector per free column,
    /// in increasing free-column order.
    pub fn kernel_basis(&self) -> Vec<FpVector> {
        let Rref { reduced, pivot_cols, .. } = self.rref();
        let p = self.p;
        let mut pivot_of_col = vec![None; self.cols];
        for (j, &pc) in pivot_cols.iter().enumerate() {
            pivot_of_col[pc] = Some(j);
        }
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_of_col[f].is_some() {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[f] = 1 % p;
            for (j, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (p - reduced.data[j * self.cols + f]) % p;
            }
            basis.push(FpVector { p, data: v });
        }
        basis
    }

    /// One solution of Ax = b if the system is consistent.
    pub fn solve(&self, rhs: &FpVector) -> Option<FpVector> {
        assert_eq!(self.p, rhs.modulus(), "mixed moduli");
        assert_eq!(self.rows, rhs.len(), "right-hand side length");
        let mut aug = FpMatrix::zeros(Prime(self.p), self.rows, self.cols + 1);
        for i in 0..self.rows {
            aug.data[i * (self.cols + 1)..i * (self.cols + 1) + self.cols]
                .copy_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
            aug.data[i * (self.cols + 1) + self.cols] = rhs.values()[i];
        }
        let Rref { reduced, pivot_cols, .. } = aug.rref();
        if pivot_cols.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u64; self.cols];
        for (j, &pc) in pivot_cols.iter().enumerate() {
            x[pc] = reduced.data[j * (self.cols + 1) + self.cols];
        }
        Some(FpVector { p: self.p, data: x })
    }
}

impl Serialize for FpMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(&self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        seq.end()
    }
}

/// An incrementally built row space in reduced echelon form.
///
/// Cheaper than re-running full elimination when rows arrive one at a time
/// and only the rank (or membership) is needed.
pub struct EchelonBasis {
    p: u64,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(p: Prime, cols: usize) -> EchelonBasis {
        EchelonBasis { p: p.0, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Reduces `row` against the current basis and absorbs it if independent.
    /// Returns true when the rank grew.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        assert_eq!(row.len(), self.cols, "row length");
        let p = self.p;
        let mut work: Vec<u64> = row.iter().map(|&v| v % p).collect();
        for (r, &q) in self.rows.iter().zip(&self.pivots) {
            let f = work[q];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for (w, &v) in work.iter_mut().zip(r) {
                *w = (*w + neg * v) % p;
            }
        }
        let Some(lead) = work.iter().position(|&v| v != 0) else {
            return false;
        };
        let inv = inv_mod(work[lead], p);
        if inv != 1 {
            for w in work.iter_mut() {
                *w = *w * inv % p;
            }
        }
        // keep stored rows mutually reduced so single-pass reduction stays valid
        for r in self.rows.iter_mut() {
            let f = r[lead];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for (v, &w) in r.iter_mut().zip(&work) {
                *v = (*v + neg * w) % p;
            }
        }
        self.rows.push(work);
        self.pivots.push(lead);
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Whether `row` already lies in the span (does not absorb it).
    pub fn contains(&self, row: &[u64]) -> bool {
        assert_eq!(row.len(), self.cols, "row length");
        let p = self.p;
        let mut work: Vec<u64> = row.iter().map(|&v| v % p).collect();
        for (r, &q) in self.rows.iter().zip(&self.pivots) {
            let f = work[q];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for (w, &v) in work.iter_mut().zip(r) {
                *w = (*w + neg * v) % p;
            }
        }
        work.iter().all(|&v| v == 0)
    }
}

/// Repeated coordinate extraction against one fixed spanning set.
///
/// Built once by eliminating the spanning vectors along with an identity
/// block that records the row operations; afterwards `express` costs a
/// single reduction pass per query.
pub struct SpanSolver {
    p: u64,
    ambient: usize,
    basis_len: usize,
    /// reduced spanning rows together with their pivot column and the
    /// combination of original vectors that produced them
    rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
}

impl SpanSolver {
    pub fn new(p: Prime, ambient: usize, basis: &[FpVector]) -> SpanSolver {
        let k = basis.len();
        let cols = ambient + k;
        let mut aug = FpMatrix::zeros(p, k, cols);
        for (i, b) in basis.iter().enumerate() {
            assert_eq!(b.modulus(), p.get(), "mixed moduli");
            assert_eq!(b.len(), ambient, "ambient dimension");
            aug.data[i * cols..i * cols + ambient].copy_from_slice(b.values());
            aug.data[i * cols + ambient + i] = 1 % p.get();
        }
        let Rref { reduced, pivot_cols, .. } = aug.rref();
        let mut rows = Vec::new();
        for (j, &pc) in pivot_cols.iter().enumerate() {
            if pc >= ambient {
                break;
            }
            let left = reduced.data[j * cols..j * cols + ambient].to_vec();
            let right = reduced.data[j * cols + ambient..(j + 1) * cols].to_vec();
            rows.push((pc, left, right));
        }
        SpanSolver { p: p.get(), ambient, basis_len: k, rows }
    }

    pub fn span_dim(&self) -> usize {
        self.rows.len()
    }

    /// Coordinates of `target` in the spanning set, or None when it is not
    /// in the span. With an independent spanning set the answer is unique.
    pub fn express(&self, target: &FpVector) -> Option<FpVector> {
        assert_eq!(target.modulus(), self.p, "mixed moduli");
        assert_eq!(target.len(), self.ambient, "ambient dimension");
        let p = self.p;
        let mut work = target.values().to_vec();
        let mut combo = vec![0u64; self.basis_len];
        for (q, left, right) in &self.rows {
            let f = work[*q];
            if f == 0 {
                continue;
            }
            let neg = p - f;
            for (w, &v) in work.iter_mut().zip(left) {
                *w = (*w + neg * v) % p;
            }
            for (c, &v) in combo.iter_mut().zip(right) {
                *c = (*c + f * v) % p;
            }
        }
        if work.iter().any(|&v| v != 0) {
            return None;
        }
        Some(FpVector { p, data: combo })
    }
}
