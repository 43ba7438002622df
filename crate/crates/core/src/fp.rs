//! Dense matrices over F_2 and F_3.
//!
//! Entries are stored one residue per byte, reduced at write time. Pivoting
//! is deterministic (first nonzero entry scanning rows top to bottom within
//! the current column), so every derived basis is reproducible.

use std::fmt;

use crate::error::{Error, Result};
use crate::prime::Prime;

pub type FpVector = Vec<u8>;

#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    prime: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl FpMatrix {
    pub fn zero(prime: Prime, rows: usize, cols: usize) -> Self {
        FpMatrix { prime, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(prime: Prime, n: usize) -> Self {
        let mut m = Self::zero(prime, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows; every entry is reduced mod p.
    pub fn from_rows(prime: Prime, cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut m = Self::zero(prime, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Contract(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &e) in row.iter().enumerate() {
                m.set(i, j, prime.reduce(e));
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(prime: Prime, rows: usize, columns: &[FpVector]) -> Self {
        let mut m = Self::zero(prime, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            debug_assert_eq!(c.len(), rows);
            for (i, &e) in c.iter().enumerate() {
                m.set(i, j, e);
            }
        }
        m
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v % self.prime.as_u8();
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> FpVector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.prime != other.prime {
            return Err(Error::Contract("prime mismatch in matrix product".into()));
        }
        if self.cols != other.rows {
            return Err(Error::Contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.prime.value();
        let mut out = FpMatrix::zero(self.prime, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u32;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = (out.get(i, j) as u32 + a * other.get(k, j) as u32) % p;
                    out.set(i, j, v as u8);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[u8]) -> Result<FpVector> {
        if v.len() != self.cols {
            return Err(Error::Contract(format!(
                "vector of length {} applied to matrix with {} columns",
                v.len(),
                self.cols
            )));
        }
        let p = self.prime.value();
        Ok((0..self.rows)
            .map(|i| {
                let s: u32 = self.row(i).iter().zip(v).map(|(&a, &b)| a as u32 * b as u32).sum();
                (s % p) as u8
            })
            .collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: u8) {
        let p = self.prime.value();
        for j in 0..self.cols {
            let v = (self.get(r, j) as u32 * c as u32) % p;
            self.set(r, j, v as u8);
        }
    }

    /// row[target] -= c * row[source]
    fn sub_row(&mut self, target: usize, source: usize, c: u8) {
        let p = self.prime.value();
        for j in 0..self.cols {
            let s = self.get(source, j) as u32;
            if s == 0 {
                continue;
            }
            let v = (self.get(target, j) as u32 + (p - c as u32) * s) % p;
            self.set(target, j, v as u8);
        }
    }

    /// Reduced row-echelon form together with the (strictly increasing)
    /// pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m.prime.inverse(m.get(r, c));
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let f = m.get(i, c);
                    if f != 0 {
                        m.sub_row(i, r, f);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{x : M x = 0}`. One vector per free column,
    /// with a 1 in that column and zeros in the other free columns.
    pub fn kernel_basis(&self) -> Vec<FpVector> {
        let (r, pivots) = self.rref();
        let p = self.prime.as_u8();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u8; self.cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                let e = r.get(row, free);
                v[pc] = (p - e) % p;
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `M x = b`. `Ok(None)` signals an inconsistent system.
    pub fn solve(&self, b: &[u8]) -> Result<Option<FpVector>> {
        if b.len() != self.rows {
            return Err(Error::Contract(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = FpMatrix::zero(self.prime, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u8; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols);
        }
        Ok(Some(x))
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix(p={}, {}x{})", self.prime, self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Incrementally maintained row-reduced span, used to test membership and
/// to pick complements deterministically.
#[derive(Clone, Debug)]
pub struct Span {
    prime: Prime,
    dim: usize,
    // each row is normalized with a leading 1 at `pivots[i]`
    rows: Vec<FpVector>,
    pivots: Vec<usize>,
}

impl Span {
    pub fn new(prime: Prime, dim: usize) -> Self {
        Span { prime, dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` against the span; the result is zero iff `v` lies in it.
    pub fn reduce(&self, v: &[u8]) -> FpVector {
        let p = self.prime.value();
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = w[pc] as u32;
            if c != 0 {
                for (x, &r) in w.iter_mut().zip(row) {
                    *x = ((*x as u32 + (p - c) * r as u32) % p) as u8;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let mut w = self.reduce(v);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.prime.inverse(w[pc]) as u32;
        let p = self.prime.value();
        for x in w.iter_mut() {
            *x = ((*x as u32 * inv) % p) as u8;
        }
        // keep existing rows reduced with respect to the new pivot
        for row in self.rows.iter_mut() {
            let c = row[pc] as u32;
            if c != 0 {
                for (x, &r) in row.iter_mut().zip(&w) {
                    *x = ((*x as u32 + (p - c) * r as u32) % p) as u8;
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(pc);
        true
    }
}
