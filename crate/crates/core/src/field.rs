//! Arithmetic in GF(2^m), 1 <= m <= 16.
//!
//! Elements are stored as `u16` in the polynomial basis: bit `i` is the
//! coefficient of `x^i` modulo the field's fixed irreducible polynomial.
//! Matrices and codes hold raw `u16` symbols and go through a [`Field`]
//! handle for arithmetic; [`FieldElem`] is the checked, self-describing
//! wrapper used at API boundaries.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 16;

/// Least irreducible polynomial of each degree with nonzero constant term.
const MODULI: [u32; 17] = [
    0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b,
    0x4021, 0x8003, 0x1002b,
];

/// The pair (m, modulus) identifying a binary extension field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    m: u32,
    modulus: u32,
}

impl FieldSpec {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        1usize << self.m
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gf2m m={} poly={:#x}", self.m, self.modulus)
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { line: 0, msg: format!("{msg}: {s:?}") };
        let mut parts = s.split_whitespace();
        if parts.next() != Some("gf2m") {
            return Err(bad("expected `gf2m`"));
        }
        let m = parts
            .next()
            .and_then(|p| p.strip_prefix("m="))
            .and_then(|p| p.parse::<u32>().ok())
            .ok_or_else(|| bad("expected m=<int>"))?;
        let poly = parts
            .next()
            .and_then(|p| p.strip_prefix("poly=0x"))
            .and_then(|p| u32::from_str_radix(p, 16).ok())
            .ok_or_else(|| bad("expected poly=0x<hex>"))?;
        let field = make_field(m)?;
        if field.spec().modulus != poly {
            return Err(Error::InvalidParameter(format!(
                "modulus {poly:#x} is not the canonical modulus {:#x} for m={m}",
                field.spec().modulus
            )));
        }
        Ok(field.spec())
    }
}

struct Tables {
    spec: FieldSpec,
    exp: Vec<u16>,
    log: Vec<u16>,
    trace_mask: u32,
}

static FIELDS: [OnceLock<Tables>; 17] = [const { OnceLock::new() }; 17];

/// Cheap copyable handle to the arithmetic tables of one field.
#[derive(Clone, Copy)]
pub struct Field {
    tables: &'static Tables,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.tables.spec == other.tables.spec
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.tables.spec)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tables.spec.fmt(f)
    }
}

/// Carry-less multiply followed by reduction; only used to build tables and
/// as an independent reference in tests.
pub(crate) fn mul_reduce(a: u32, b: u32, m: u32, modulus: u32) -> u32 {
    let mut acc: u64 = 0;
    for i in 0..m {
        if (b >> i) & 1 == 1 {
            acc ^= (a as u64) << i;
        }
    }
    for bit in (m..2 * m).rev() {
        if (acc >> bit) & 1 == 1 {
            acc ^= (modulus as u64) << (bit - m);
        }
    }
    acc as u32
}

fn build_tables(m: u32) -> Tables {
    let modulus = MODULI[m as usize];
    let q = 1usize << m;
    let order = q - 1;
    // The polynomial x need not be primitive (it is not for m = 8), so search
    // for the least generator of the multiplicative group.
    let generator = (1..q as u32)
        .find(|&g| {
            let mut acc = 1u32;
            for k in 1..=order {
                acc = mul_reduce(acc, g, m, modulus);
                if acc == 1 {
                    return k == order;
                }
            }
            false
        })
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u16; 2 * order];
    let mut log = vec![0u16; q];
    let mut acc = 1u32;
    for k in 0..order {
        exp[k] = acc as u16;
        exp[k + order] = acc as u16;
        log[acc as usize] = k as u16;
        acc = mul_reduce(acc, generator, m, modulus);
    }
    let mut trace_mask = 0u32;
    for i in 0..m {
        let t = trace_by_powers(1 << i, m, modulus);
        assert!(t <= 1, "trace must land in GF(2)");
        trace_mask |= t << i;
    }
    Tables { spec: FieldSpec { m, modulus }, exp, log, trace_mask }
}

/// Tr(x) = x + x^2 + x^4 + ... + x^(2^(m-1)), evaluated in the field.
pub(crate) fn trace_by_powers(x: u32, m: u32, modulus: u32) -> u32 {
    let mut acc = 0;
    let mut power = x;
    for _ in 0..m {
        acc ^= power;
        power = mul_reduce(power, power, m, modulus);
    }
    acc
}

/// Canonical field of degree `m` with the compiled-in modulus.
pub fn make_field(m: u32) -> Result<Field> {
    if !(1..=MAX_DEGREE).contains(&m) {
        return Err(Error::DegreeOutOfRange(m));
    }
    let tables = FIELDS[m as usize].get_or_init(|| build_tables(m));
    Ok(Field { tables })
}

impl Field {
    pub fn spec(&self) -> FieldSpec {
        self.tables.spec
    }

    pub fn m(&self) -> u32 {
        self.tables.spec.m
    }

    /// Number of elements q = 2^m.
    pub fn order(&self) -> usize {
        1usize << self.m()
    }

    pub fn contains(&self, bits: u32) -> bool {
        (bits as usize) < self.order()
    }

    /// Elements in canonical order (by integer value).
    pub fn elements(&self) -> impl Iterator<Item = u16> {
        (0..self.order() as u32).map(|x| x as u16)
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = self.tables;
        t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
    }

    pub fn inv(&self, a: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let t = self.tables;
        let order = self.order() - 1;
        Ok(t.exp[(order - t.log[a as usize] as usize) % order])
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = self.tables;
        let order = (self.order() - 1) as u64;
        let l = (t.log[a as usize] as u64 * (e % order)) % order;
        t.exp[l as usize]
    }

    /// Absolute trace to GF(2), as a bit.
    #[inline]
    pub fn trace(&self, a: u16) -> u8 {
        ((a as u32 & self.tables.trace_mask).count_ones() & 1) as u8
    }

    /// Bit mask `t` with Tr(x) = parity(x & t) in the polynomial basis.
    pub fn trace_mask(&self) -> u32 {
        self.tables.trace_mask
    }

    pub fn elem(&self, bits: u32) -> Result<FieldElem> {
        FieldElem::new(*self, bits)
    }

    /// Dot product over the field.
    pub fn dot(&self, a: &[u16], b: &[u16]) -> u16 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| acc ^ self.mul(x, y))
    }
}

/// A field element that remembers its field; mixed-field operations fail.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct FieldElem {
    bits: u16,
    field: Field,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}@m={}", self.bits, self.field.m())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.bits)
    }
}

impl FieldElem {
    pub fn new(field: Field, bits: u32) -> Result<Self> {
        if !field.contains(bits) {
            return Err(Error::ElementOutOfRange { bits, m: field.m() });
        }
        Ok(Self { bits: bits as u16, field })
    }

    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self { bits: self.bits ^ other.bits, field: self.field })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self { bits: self.field.mul(self.bits, other.bits), field: self.field })
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(Self { bits: self.field.inv(self.bits)?, field: self.field })
    }

    pub fn pow(&self, e: u64) -> Self {
        Self { bits: self.field.pow(self.bits, e), field: self.field }
    }

    pub fn trace(&self) -> u8 {
        self.field.trace(self.bits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Polynomial,
    SelfDual,
    Other,
}

/// An ordered GF(2)-basis of GF(2^m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldBasis {
    field: Field,
    elements: Vec<u16>,
    kind: BasisKind,
    // Row j is the functional extracting the coefficient of elements[j].
    coords: Vec<u32>,
}

impl FieldBasis {
    pub fn new(field: Field, elements: Vec<u16>, kind: BasisKind) -> Result<Self> {
        let m = field.m() as usize;
        if elements.len() != m {
            return Err(Error::Dimension(format!(
                "basis of GF(2^{m}) needs {m} elements, got {}",
                elements.len()
            )));
        }
        if elements.iter().any(|&e| !field.contains(e as u32)) {
            return Err(Error::InvalidParameter("basis element outside field".into()));
        }
        // Column j of A holds elements[j]; coords = A^{-1} row by row.
        let mut a = vec![0u32; m];
        for (j, &e) in elements.iter().enumerate() {
            for (i, row) in a.iter_mut().enumerate() {
                *row |= ((e as u32 >> i) & 1) << j;
            }
        }
        let coords = invert_small(&a, m).ok_or(Error::DependentBasis)?;
        Ok(Self { field, elements, kind, coords })
    }

    /// {1, x, ..., x^(m-1)}.
    pub fn polynomial(field: Field) -> Self {
        let elements = (0..field.m()).map(|i| 1u16 << i).collect();
        Self::new(field, elements, BasisKind::Polynomial).expect("monomials are independent")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn elements(&self) -> &[u16] {
        &self.elements
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Coordinates of `x`: bit j is the coefficient of `elements()[j]`.
    pub fn expand(&self, x: u16) -> u32 {
        let mut out = 0u32;
        for (j, &row) in self.coords.iter().enumerate() {
            out |= ((row & x as u32).count_ones() & 1) << j;
        }
        out
    }

    /// Inverse of [`expand`](Self::expand).
    pub fn combine(&self, coords: u32) -> Result<u16> {
        if coords >> self.dim() != 0 {
            return Err(Error::Dimension(format!(
                "coordinate vector {coords:#x} longer than basis dimension {}",
                self.dim()
            )));
        }
        Ok(self
            .elements
            .iter()
            .enumerate()
            .filter(|(j, _)| (coords >> j) & 1 == 1)
            .fold(0, |acc, (_, &e)| acc ^ e))
    }

    /// Checked variant of [`expand`](Self::expand) for a tagged element.
    pub fn expand_elem(&self, x: &FieldElem) -> Result<u32> {
        if x.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: x.field().to_string(),
            });
        }
        Ok(self.expand(x.bits()))
    }
}

/// Inverse of a small GF(2) matrix given as `n` row bitmasks.
pub(crate) fn invert_small(rows: &[u32], n: usize) -> Option<Vec<u32>> {
    let mut a = rows.to_vec();
    let mut inv: Vec<u32> = (0..n).map(|i| 1 << i).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| (a[r] >> col) & 1 == 1)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..n {
            if r != col && (a[r] >> col) & 1 == 1 {
                a[r] ^= a[col];
                inv[r] ^= inv[col];
            }
        }
    }
    Some(inv)
}
