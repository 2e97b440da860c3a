//! Exact linear algebra over GF(2^m) ([`Mat`]) and bit-packed GF(2)
//! ([`BitMat`]).
//!
//! Elimination always picks the leftmost available pivot and the topmost row
//! holding it, so echelon forms, null-space bases and everything derived from
//! them are reproducible bit for bit.

mod bits;
mod mat;

pub use bits::{BitMat, BitRref, BitVec};
pub use mat::{Mat, Rref};

use crate::error::{Error, Result};
use crate::field::FieldBasis;

/// The GF(2) matrix T with `expand_B(x) = T * expand_A(x)` for every x.
pub fn solve_change_of_basis(a: &FieldBasis, b: &FieldBasis) -> Result<BitMat> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch {
            left: a.field().to_string(),
            right: b.field().to_string(),
        });
    }
    let m = a.dim();
    let mut t = BitMat::zeros(m, m);
    for (j, &alpha) in a.elements().iter().enumerate() {
        let col = b.expand(alpha);
        for i in 0..m {
            if (col >> i) & 1 == 1 {
                t.set(i, j, true);
            }
        }
    }
    Ok(t)
}

/// Apply a GF(2) matrix to a coordinate vector packed in a `u32`.
pub fn apply_small(t: &BitMat, v: u32) -> u32 {
    let mut out = 0;
    for i in 0..t.rows() {
        let row = t.row(i).words().first().copied().unwrap_or(0) as u32;
        out |= ((row & v).count_ones() & 1) << i;
    }
    out
}
