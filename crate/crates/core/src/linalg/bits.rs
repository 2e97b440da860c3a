use crate::error::{Error, Result};
use crate::field::make_field;

use super::Mat;

/// Bit vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        let w = &mut self.words[i / 64];
        if b {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        self.words.iter().zip(&other.words).fold(0, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1
            == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Copy of bits `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }
}

/// Dense GF(2) matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMat {
    cols: usize,
    rows: Vec<BitVec>,
}

impl std::fmt::Debug for BitMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_mat().to_text())
    }
}

#[derive(Clone, Debug)]
pub struct BitRref {
    pub matrix: BitMat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl BitRref {
    /// Residual of `v` after elimination against the pivot rows, and the set
    /// of echelon rows used.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut residual = v.clone();
        let mut used = BitVec::zeros(self.rank);
        for (i, &p) in self.pivots.iter().enumerate() {
            if residual.get(p) {
                residual.xor_assign(&self.matrix.rows[i]);
                used.set(i, true);
            }
        }
        (residual, used)
    }
}

impl BitMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { cols, rows: vec![BitVec::zeros(cols); rows] }
    }

    pub fn empty(cols: usize) -> Self {
        Self::zeros(0, cols)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row of length {} in matrix with {cols} columns",
                r.len()
            )));
        }
        Ok(Self { cols, rows })
    }

    /// Rows given as 0/1 slices; convenient in tests.
    pub fn from_bit_rows(cols: usize, rows: &[&[u8]]) -> Result<Self> {
        Self::from_rows(cols, rows.iter().map(|r| BitVec::from_bits(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut BitVec {
        &mut self.rows[r]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &BitVec> {
        self.rows.iter()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.rows[r].set(c, b)
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!(
                "row of length {} pushed onto matrix with {} columns",
                row.len(),
                self.cols
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn vstack(&self, other: &BitMat) -> Result<BitMat> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("vstack {} vs {} columns", self.cols, other.cols)));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMat { cols: self.cols, rows })
    }

    pub fn select_rows(&self, idx: &[usize]) -> BitMat {
        BitMat { cols: self.cols, rows: idx.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    pub fn select_columns(&self, idx: &[usize]) -> BitMat {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = BitVec::zeros(idx.len());
                for (j, &c) in idx.iter().enumerate() {
                    if r.get(c) {
                        out.set(j, true);
                    }
                }
                out
            })
            .collect();
        BitMat { cols: idx.len(), rows }
    }

    pub fn transpose(&self) -> BitMat {
        let mut out = BitMat::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                out.rows[c].set(r, true);
            }
        }
        out
    }

    /// `self * other` over GF(2).
    pub fn mul(&self, other: &BitMat) -> Result<BitMat> {
        if self.cols != other.rows.len() {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows.len(),
                self.cols,
                other.rows.len(),
                other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVec::zeros(other.cols);
                for k in r.ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(BitMat { cols: other.cols, rows })
    }

    /// `self * other^T`: pairwise row inner products.
    pub fn mul_transpose(&self, other: &BitMat) -> Result<BitMat> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("{} vs {} columns", self.cols, other.cols)));
        }
        let rows = self
            .rows
            .iter()
            .map(|a| {
                let mut out = BitVec::zeros(other.rows.len());
                for (j, b) in other.rows.iter().enumerate() {
                    if a.dot(b) {
                        out.set(j, true);
                    }
                }
                out
            })
            .collect();
        Ok(BitMat { cols: other.rows.len(), rows })
    }

    /// `v * self`: XOR of the rows selected by `v`.
    pub fn combine_rows(&self, v: &BitVec) -> BitVec {
        let mut acc = BitVec::zeros(self.cols);
        for i in v.ones() {
            acc.xor_assign(&self.rows[i]);
        }
        acc
    }

    /// `self * v^T`.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    /// Gauss–Jordan elimination with the leftmost-pivot rule.
    pub fn rref(&self) -> BitRref {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == rows.len() {
                break;
            }
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        BitRref { matrix: BitMat { cols: self.cols, rows }, rank, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn row_basis(&self) -> BitMat {
        let rr = self.rref();
        BitMat { cols: self.cols, rows: rr.matrix.rows[..rr.rank].to_vec() }
    }

    /// Basis of {x : self * x^T = 0}.
    pub fn nullspace(&self) -> BitMat {
        let rr = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rr.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|fc| {
                let mut v = BitVec::zeros(self.cols);
                v.set(fc, true);
                for (pr, &pc) in rr.pivots.iter().enumerate() {
                    if rr.matrix.rows[pr].get(fc) {
                        v.set(pc, true);
                    }
                }
                v
            })
            .collect();
        BitMat { cols: self.cols, rows }
    }

    pub fn in_rowspace(&self, v: &BitVec) -> bool {
        self.rref().reduce(v).0.is_zero()
    }

    /// Row space of `other` is contained in the row space of `self`.
    pub fn spans(&self, other: &BitMat) -> Result<bool> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("{} vs {} columns", self.cols, other.cols)));
        }
        let rr = self.rref();
        Ok(other.rows.iter().all(|r| rr.reduce(r).0.is_zero()))
    }

    pub fn same_row_space(&self, other: &BitMat) -> Result<bool> {
        Ok(self.spans(other)? && other.spans(self)?)
    }

    /// Some x with x * self = v.
    pub fn solve_left(&self, v: &BitVec) -> Option<BitVec> {
        // Track the row operations by augmenting with the identity.
        let n = self.rows.len();
        let aug = BitMat {
            cols: self.cols + n,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut a = BitVec::zeros(self.cols + n);
                    for c in r.ones() {
                        a.set(c, true);
                    }
                    a.set(self.cols + i, true);
                    a
                })
                .collect(),
        };
        let rr = aug.rref();
        let mut residual = v.clone();
        let mut x = BitVec::zeros(n);
        for (i, &p) in rr.pivots.iter().enumerate() {
            if p >= self.cols {
                break;
            }
            if residual.get(p) {
                let row = &rr.matrix.rows[i];
                for c in row.ones() {
                    if c < self.cols {
                        residual.flip(c);
                    } else {
                        x.flip(c - self.cols);
                    }
                }
            }
        }
        residual.is_zero().then_some(x)
    }

    pub fn to_mat(&self) -> Mat {
        let f = make_field(1).expect("GF(2)");
        let mut m = Mat::zeros(f, self.rows.len(), self.cols);
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                m.set(r, c, 1);
            }
        }
        m
    }

    pub fn from_mat(m: &Mat) -> Result<BitMat> {
        if m.field().m() != 1 {
            return Err(Error::InvalidParameter(format!(
                "expected a binary matrix, got entries over {}",
                m.field()
            )));
        }
        let rows = m
            .iter_rows()
            .map(|r| {
                let mut v = BitVec::zeros(m.cols());
                for (c, &x) in r.iter().enumerate() {
                    if x == 1 {
                        v.set(c, true);
                    }
                }
                v
            })
            .collect();
        Ok(BitMat { cols: m.cols(), rows })
    }

    pub fn to_text(&self) -> String {
        self.to_mat().to_text()
    }

    pub fn from_text(text: &str) -> Result<BitMat> {
        Self::from_mat(&Mat::from_text(text)?)
    }
}
