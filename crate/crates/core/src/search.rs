//! Minimum-weight search over the GF(2)-span of packed basis vectors.
//!
//! Vectors over GF(2^m) are packed into `u64` words with one lane of
//! `lane_width` bits per symbol (a power of two >= m), so addition is word
//! XOR and Hamming weight is a per-lane nonzero count. The span is walked in
//! Gray-code order, one XOR per step, in fixed index-ordered chunks.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};

pub(crate) const CHUNK: u64 = 1 << 12;

/// Smallest power-of-two lane width holding `m` bits.
pub(crate) fn lane_width(m: u32) -> u32 {
    m.next_power_of_two().max(1)
}

pub(crate) fn words_for(n: usize, width: u32) -> usize {
    (n * width as usize).div_ceil(64)
}

pub(crate) fn pack(symbols: &[u16], width: u32) -> Vec<u64> {
    let per = 64 / width as usize;
    let mut out = vec![0u64; words_for(symbols.len(), width)];
    for (i, &s) in symbols.iter().enumerate() {
        out[i / per] |= (s as u64) << ((i % per) as u32 * width);
    }
    out
}

#[cfg(test)]
pub(crate) fn unpack(words: &[u64], n: usize, width: u32) -> Vec<u16> {
    let per = 64 / width as usize;
    let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    (0..n).map(|i| ((words[i / per] >> ((i % per) as u32 * width)) & mask) as u16).collect()
}

/// Number of nonzero lanes.
pub(crate) fn lane_weight(words: &[u64], width: u32) -> u32 {
    let low = low_bits(width);
    words
        .iter()
        .map(|&w| {
            let mut nz = w;
            let mut s = width / 2;
            while s > 0 {
                nz |= nz >> s;
                s /= 2;
            }
            (nz & low).count_ones()
        })
        .sum()
}

fn low_bits(width: u32) -> u64 {
    let mut m = 0u64;
    let mut i = 0;
    while i < 64 {
        m |= 1 << i;
        i += width;
    }
    m
}

/// A vector of the span together with its position in the Gray walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Witness {
    pub weight: u32,
    /// Gray-code word: bit i set iff basis vector i is in the combination.
    pub combo: u64,
    pub words: Vec<u64>,
}

/// Basis vectors with XOR-additive tags.
pub(crate) struct Span<'a> {
    pub basis: &'a [Vec<u64>],
    pub tags: &'a [u64],
    pub nwords: usize,
}

impl Span<'_> {
    fn combo_vector(&self, combo: u64) -> (Vec<u64>, u64) {
        let mut v = vec![0u64; self.nwords];
        let mut tag = 0;
        for (i, b) in self.basis.iter().enumerate() {
            if (combo >> i) & 1 == 1 {
                xor_into(&mut v, b);
                tag ^= self.tags[i];
            }
        }
        (v, tag)
    }

    /// Minimum of `weight(v)` over nonzero combinations whose tag satisfies
    /// `accept`. Ties go to the earliest combination in Gray order.
    pub fn min_weight<W, P>(&self, exec: Exec, budget: u64, weight: W, accept: P) -> Result<Option<Witness>>
    where
        W: Fn(&[u64]) -> u32 + Sync + Send,
        P: Fn(u64) -> bool + Sync + Send,
    {
        let d = self.basis.len();
        if d >= 63 || (1u64 << d) - 1 > budget {
            return Err(Error::BudgetExceeded(format!(
                "span of GF(2)-dimension {d} exceeds budget {budget}"
            )));
        }
        let total = 1u64 << d;
        let best = exec::map_reduce(
            exec,
            1..total,
            CHUNK,
            |range| {
                let start = range.start;
                let (mut v, mut tag) = self.combo_vector(start ^ (start >> 1));
                let mut best: Option<(u32, u64)> = None;
                for i in range {
                    if i != start {
                        let bit = i.trailing_zeros() as usize;
                        xor_into(&mut v, &self.basis[bit]);
                        tag ^= self.tags[bit];
                    }
                    if accept(tag) {
                        let w = weight(&v);
                        if best.map_or(true, |(bw, _)| w < bw) {
                            best = Some((w, i));
                        }
                    }
                }
                best
            },
            None,
            |a: Option<(u32, u64)>, b| match (a, b) {
                (Some(x), Some(y)) => Some(if y.0 < x.0 { y } else { x }),
                (x, None) => x,
                (None, y) => y,
            },
        );
        Ok(best.map(|(weight, i)| {
            let combo = i ^ (i >> 1);
            let (words, _) = self.combo_vector(combo);
            Witness { weight, combo, words }
        }))
    }
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= b;
    }
}

/// Visit all k-subsets of 0..n in lexicographic order until `f` returns true.
/// Returns the accepting subset, or `None`; `Err` once `budget` subsets have
/// been visited without success.
pub(crate) fn first_subset<F>(n: usize, k: usize, budget: &mut u64, mut f: F) -> Result<Option<Vec<usize>>>
where
    F: FnMut(&[usize]) -> bool,
{
    if k > n {
        return Ok(None);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if *budget == 0 {
            return Err(Error::BudgetExceeded(format!("subset search over {k}-of-{n}")));
        }
        *budget -= 1;
        if f(&idx) {
            return Ok(Some(idx));
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return Ok(None);
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trip() {
        for (m, width) in [(1, 1), (2, 2), (3, 4), (4, 4), (5, 8), (9, 16), (16, 16)] {
            assert_eq!(lane_width(m), width);
            let syms: Vec<u16> = (0..77u32).map(|i| (i.wrapping_mul(2654435761) >> 7) as u16 & ((1u32 << m) - 1) as u16).collect();
            let p = pack(&syms, width);
            assert_eq!(unpack(&p, syms.len(), width), syms);
            let nz = syms.iter().filter(|&&s| s != 0).count() as u32;
            assert_eq!(lane_weight(&p, width), nz);
        }
    }

    #[test]
    fn gray_walk_matches_direct_enumeration() {
        // Binary [6,3] code; brute force over all 7 nonzero combinations.
        let rows: [u64; 3] = [0b000111, 0b011001, 0b101010];
        let basis: Vec<Vec<u64>> = rows.iter().map(|&r| vec![r]).collect();
        let tags = [1u64, 0, 2];
        let span = Span { basis: &basis, tags: &tags, nwords: 1 };
        for exec in [Exec::Sequential, Exec::Parallel] {
            let w = span
                .min_weight(exec, 1 << 10, |v| lane_weight(v, 1), |_| true)
                .unwrap()
                .unwrap();
            let brute = (1u64..8)
                .map(|c| (0..3).filter(|i| (c >> i) & 1 == 1).fold(0, |a, i| a ^ rows[i]).count_ones())
                .min()
                .unwrap();
            assert_eq!(w.weight, brute);
            assert_eq!(lane_weight(&w.words, 1), w.weight);
            // Only combinations involving row 0 or row 2.
            let t = span
                .min_weight(exec, 1 << 10, |v| lane_weight(v, 1), |t| t & 2 != 0)
                .unwrap()
                .unwrap();
            assert_eq!(t.combo & 0b100, 0b100);
        }
        assert!(span.min_weight(Exec::Sequential, 3, |v| lane_weight(v, 1), |_| true).is_err());
    }

    #[test]
    fn subsets_in_order() {
        let mut seen = Vec::new();
        let mut budget = 100;
        let r = first_subset(4, 2, &mut budget, |s| {
            seen.push(s.to_vec());
            false
        })
        .unwrap();
        assert_eq!(r, None);
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut small = 2;
        assert!(first_subset(4, 2, &mut small, |_| false).is_err());
    }
}
