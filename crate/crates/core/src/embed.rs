//! Binary embeddings of GF(2^m): self-dual bases and code expansion, the
//! degree-3 multiplication-friendly embedding with r = m^3, and reverse
//! multiplication-friendly embeddings (trivial and found by search).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::LinearCode;
use crate::css::QuditCssCode;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::field::{make_field, BasisKind, Field, FieldBasis};
use crate::linalg::{BitMat, BitVec, Mat};
use crate::qubitize::QubitCssCode;

/// A basis with Tr(alpha_i alpha_j) = delta_ij.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfDualBasis {
    basis: FieldBasis,
}

impl SelfDualBasis {
    pub fn basis(&self) -> &FieldBasis {
        &self.basis
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }

    pub fn m(&self) -> usize {
        self.basis.dim()
    }

    /// Tr(alpha_i alpha_j) for all i, j.
    pub fn gram(&self) -> Vec<Vec<u8>> {
        let f = self.field();
        let e = self.basis.elements();
        e.iter().map(|&a| e.iter().map(|&b| f.trace(f.mul(a, b))).collect()).collect()
    }
}

/// Deterministic orthonormalisation of the polynomial basis under the trace
/// form B(x, y) = Tr(xy), taking the least-index vector with B(v, v) = 1 at
/// each step. When the remainder is alternating, a hyperbolic pair (x, y)
/// and a found vector e become the orthonormal triple e+x, e+y, e+x+y.
pub fn find_self_dual_basis(m: u32) -> Result<SelfDualBasis> {
    let f = make_field(m)?;
    let b = |x: u16, y: u16| f.trace(f.mul(x, y));
    let mut rest: Vec<u16> = (0..m).map(|i| 1u16 << i).collect();
    let mut out: Vec<u16> = Vec::new();
    while !rest.is_empty() {
        if let Some(pos) = rest.iter().position(|&v| b(v, v) == 1) {
            let v = rest.remove(pos);
            for w in rest.iter_mut() {
                if b(*w, v) == 1 {
                    *w ^= v;
                }
            }
            out.push(v);
            continue;
        }
        let x = rest.remove(0);
        let pos = rest
            .iter()
            .position(|&y| b(x, y) == 1)
            .ok_or_else(|| Error::Internal("trace form is degenerate".into()))?;
        let y = rest.remove(pos);
        for w in rest.iter_mut() {
            let (by, bx) = (b(*w, y), b(*w, x));
            if by == 1 {
                *w ^= x;
            }
            if bx == 1 {
                *w ^= y;
            }
        }
        let e = out.pop().ok_or_else(|| Error::Internal("no anisotropic vector found".into()))?;
        out.extend([e ^ x, e ^ y, e ^ x ^ y]);
    }
    let sdb = SelfDualBasis { basis: FieldBasis::new(f, out, BasisKind::SelfDual)? };
    let gram = sdb.gram();
    if (0..m as usize).any(|i| (0..m as usize).any(|j| gram[i][j] != (i == j) as u8)) {
        return Err(Error::Internal(format!("self-dual basis search failed for m={m}")));
    }
    Ok(sdb)
}

/// B(v): concatenated basis coordinates, symbol p occupying bits p*m..p*m+m.
pub fn expand_vec(basis: &FieldBasis, v: &[u16]) -> BitVec {
    let m = basis.dim();
    let mut out = BitVec::zeros(v.len() * m);
    for (p, &x) in v.iter().enumerate() {
        let c = basis.expand(x);
        for j in 0..m {
            if (c >> j) & 1 == 1 {
                out.set(p * m + j, true);
            }
        }
    }
    out
}

/// Rows B(alpha_j r_i), indexed i*m + j.
pub fn expand_rows(basis: &FieldBasis, rows: &Mat) -> BitMat {
    let f = basis.field();
    let mut out = BitMat::empty(rows.cols() * basis.dim());
    for r in rows.iter_rows() {
        for &alpha in basis.elements() {
            let scaled: Vec<u16> = r.iter().map(|&x| f.mul(alpha, x)).collect();
            out.push_row(expand_vec(basis, &scaled)).expect("width matches");
        }
    }
    out
}

/// Binary image of C under the basis expansion: an [nm, km] code over GF(2).
pub fn expand_code(c: &LinearCode, sdb: &SelfDualBasis) -> Result<LinearCode> {
    if sdb.field() != c.field() {
        return Err(Error::FieldMismatch {
            left: c.field().to_string(),
            right: sdb.field().to_string(),
        });
    }
    let rows = expand_rows(sdb.basis(), c.gen());
    LinearCode::new(rows.to_mat(), format!("B({})", c.label()))
}

/// Qubit CSS code on N m qubits; logical qubit (i, j) is position j of block i.
pub fn qubitize_css(q: &QuditCssCode, sdb: &SelfDualBasis) -> Result<QubitCssCode> {
    if sdb.field() != q.field {
        return Err(Error::FieldMismatch {
            left: q.field.to_string(),
            right: sdb.field().to_string(),
        });
    }
    let b = sdb.basis();
    let code = QubitCssCode::new(
        expand_rows(b, &q.h0),
        expand_rows(b, &q.z_stab),
        expand_rows(b, &q.h1),
        expand_rows(b, &q.logical_z()?),
        format!("self-dual expansion of {}", q.source),
    )?;
    Ok(code)
}

/// Outcome of checking a multiplication identity on all or sampled inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum IdentityCheck {
    Pass { checks: u64 },
    Counterexample { inputs: [u64; 3], got: u64, want: u64 },
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        matches!(self, IdentityCheck::Pass { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

fn run_identity<F>(exec: Exec, bits: u32, mode: CheckMode, check: F) -> IdentityCheck
where
    F: Fn([u64; 3]) -> Option<(u64, u64)> + Sync + Send,
{
    let mask = (1u64 << bits) - 1;
    let (total, draw): (u64, Box<dyn Fn(u64) -> [u64; 3] + Sync>) = match mode {
        CheckMode::Exhaustive => (
            1u64 << (3 * bits),
            Box::new(move |i| [i & mask, (i >> bits) & mask, (i >> (2 * bits)) & mask]),
        ),
        CheckMode::Sampled { trials, seed } => (
            trials,
            Box::new(move |i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                [rng.gen::<u64>() & mask, rng.gen::<u64>() & mask, rng.gen::<u64>() & mask]
            }),
        ),
    };
    let found = exec::find_first(exec, 0..total, 1024, |range| {
        range.into_iter().find_map(|i| {
            let inputs = draw(i);
            check(inputs).map(|(got, want)| IdentityCheck::Counterexample { inputs, got, want })
        })
    });
    found.unwrap_or(IdentityCheck::Pass { checks: total })
}

/// Degree-3 multiplication-friendly embedding with r = m^3. Slot
/// (i, j, k) has index i m^2 + j m + k. Permutations act by gather:
/// (pi v)_p = v_{pi[p]}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mfe {
    pub m: usize,
    pub r: usize,
    /// r x m: sigma(x) copies polynomial coordinate x_i to every slot (i, *, *).
    pub sigma: BitMat,
    /// (i, j, k) -> (j, i, k)
    pub pi2: Vec<usize>,
    /// (i, j, k) -> (k, i, j)
    pub pi3: Vec<usize>,
    /// m x r: column (i, j, k) holds the polynomial coordinates of alpha^(i+j+k).
    pub psi: BitMat,
}

pub fn mfe3(m: u32) -> Result<Mfe> {
    let f = make_field(m)?;
    let mu = m as usize;
    let r = mu.pow(3);
    let slot = |i: usize, j: usize, k: usize| i * mu * mu + j * mu + k;
    let mut sigma = BitMat::zeros(r, mu);
    let mut psi = BitMat::zeros(mu, r);
    let mut pi2 = vec![0; r];
    let mut pi3 = vec![0; r];
    for i in 0..mu {
        for j in 0..mu {
            for k in 0..mu {
                let p = slot(i, j, k);
                sigma.set(p, i, true);
                pi2[p] = slot(j, i, k);
                pi3[p] = slot(k, i, j);
                let e = f.mul(f.mul(1 << i, 1 << j), 1 << k);
                for b in 0..mu {
                    if (e >> b) & 1 == 1 {
                        psi.set(b, p, true);
                    }
                }
            }
        }
    }
    Ok(Mfe { m: mu, r, sigma, pi2, pi3, psi })
}

impl Mfe {
    pub fn field(&self) -> Field {
        make_field(self.m as u32).expect("valid degree")
    }

    /// sigma applied to polynomial coordinates.
    pub fn embed(&self, x: u32) -> BitVec {
        let v = BitVec::from_bits(&(0..self.m).map(|i| ((x >> i) & 1) as u8).collect::<Vec<_>>());
        self.sigma.apply(&v)
    }

    pub fn gather(perm: &[usize], v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(perm.len());
        for (p, &src) in perm.iter().enumerate() {
            if v.get(src) {
                out.set(p, true);
            }
        }
        out
    }

    /// psi applied to an r-bit vector, as polynomial coordinates.
    pub fn unembed(&self, u: &BitVec) -> u32 {
        let v = self.psi.apply(u);
        (0..self.m).fold(0, |acc, i| acc | (v.get(i) as u32) << i)
    }

    /// psi(sigma(x) * pi2 sigma(y) * pi3 sigma(z)).
    pub fn multiply(&self, x: u32, y: u32, z: u32) -> u32 {
        let a = self.embed(x);
        let b = Self::gather(&self.pi2, &self.embed(y));
        let c = Self::gather(&self.pi3, &self.embed(z));
        let mut prod = BitVec::zeros(self.r);
        for p in a.ones().filter(|&p| b.get(p) && c.get(p)) {
            prod.set(p, true);
        }
        self.unembed(&prod)
    }
}

/// Checks psi(sigma(x) * pi2 sigma(y) * pi3 sigma(z)) = xyz.
pub fn mfe_verify(mfe: &Mfe, mode: CheckMode) -> IdentityCheck {
    mfe_verify_with(mfe, mode, Exec::default())
}

pub fn mfe_verify_with(mfe: &Mfe, mode: CheckMode, exec: Exec) -> IdentityCheck {
    let f = mfe.field();
    run_identity(exec, mfe.m as u32, mode, |[x, y, z]| {
        let got = mfe.multiply(x as u32, y as u32, z as u32) as u64;
        let want = f.mul(f.mul(x as u16, y as u16), z as u16) as u64;
        (got != want).then_some((got, want))
    })
}

/// Default for [`mfe_verify`]: exhaustive up to m = 3, sampled above.
pub fn default_mfe_mode(m: usize, seed: u64) -> CheckMode {
    if m <= 3 {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled { trials: 100_000, seed }
    }
}

/// Degree-3 RMFE F2^s -> GF(2^m) -> F2^s in polynomial coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rmfe {
    pub s: usize,
    pub m: usize,
    /// m x s: column l holds the coordinates of phi(e_l).
    pub phi: BitMat,
    /// s x m
    pub psi: BitMat,
}

impl Rmfe {
    pub fn field(&self) -> Field {
        make_field(self.m as u32).expect("valid degree")
    }

    pub fn phi_of(&self, x: u32) -> u16 {
        (0..self.s)
            .filter(|l| (x >> l) & 1 == 1)
            .fold(0u16, |acc, l| acc ^ column_bits(&self.phi, l) as u16)
    }

    pub fn psi_of(&self, a: u16) -> u32 {
        (0..self.s).fold(0, |acc, l| {
            let row = self.psi.row(l).words()[0] as u32;
            acc | ((row & a as u32).count_ones() & 1) << l
        })
    }
}

fn column_bits(m: &BitMat, c: usize) -> u32 {
    (0..m.rows()).fold(0, |acc, i| acc | (m.get(i, c) as u32) << i)
}

/// s = 1: phi(1) = 1 and psi reads the coefficient of x^0.
pub fn rmfe_trivial(m: u32) -> Result<Rmfe> {
    make_field(m)?;
    let mu = m as usize;
    let mut phi = BitMat::zeros(mu, 1);
    phi.set(0, 0, true);
    let mut psi = BitMat::zeros(1, mu);
    psi.set(0, 0, true);
    Ok(Rmfe { s: 1, m: mu, phi, psi })
}

/// Checks psi(phi(x) phi(y) phi(z)) = x * y * z on all bit-vector triples.
pub fn rmfe_verify(rmfe: &Rmfe) -> IdentityCheck {
    let f = rmfe.field();
    run_identity(Exec::Sequential, rmfe.s as u32, CheckMode::Exhaustive, |[x, y, z]| {
        let prod = f.mul(f.mul(rmfe.phi_of(x as u32), rmfe.phi_of(y as u32)), rmfe.phi_of(z as u32));
        let got = rmfe.psi_of(prod) as u64;
        let want = x & y & z;
        (got != want).then_some((got, want))
    })
}

/// Solve A x = b over GF(2) for m-bit rows, free variables set to 0.
fn solve_rows(rows: &[(u32, u8)], m: usize) -> Option<u32> {
    let mut sys: Vec<(u32, u8)> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..m {
        let Some(p) = (rank..sys.len()).find(|&r| (sys[r].0 >> col) & 1 == 1) else {
            continue;
        };
        sys.swap(rank, p);
        let pivot = sys[rank];
        for (r, row) in sys.iter_mut().enumerate() {
            if r != rank && (row.0 >> col) & 1 == 1 {
                row.0 ^= pivot.0;
                row.1 ^= pivot.1;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if sys[rank..].iter().any(|&(_, b)| b == 1) {
        return None;
    }
    Some(pivots.iter().enumerate().fold(0, |x, (r, &c)| x | (sys[r].1 as u32) << c))
}

fn rmfe_candidate(f: Field, s: usize, cols: &[u16]) -> Option<Rmfe> {
    let m = f.m() as usize;
    // Injectivity of phi.
    let mut span = vec![0u16];
    for &c in cols {
        if span.contains(&c) {
            return None;
        }
        let ext: Vec<u16> = span.iter().map(|&x| x ^ c).collect();
        span.extend(ext);
    }
    let phi_of = |x: u32| (0..s).filter(|l| (x >> l) & 1 == 1).fold(0u16, |a, l| a ^ cols[l]);
    let mut psi = BitMat::zeros(s, m);
    for l in 0..s {
        let mut rows = Vec::with_capacity(1 << (3 * s));
        for t in 0..1u32 << (3 * s) {
            let mask = (1u32 << s) - 1;
            let (x, y, z) = (t & mask, (t >> s) & mask, (t >> (2 * s)) & mask);
            let prod = f.mul(f.mul(phi_of(x), phi_of(y)), phi_of(z));
            rows.push((prod as u32, ((x & y & z) >> l & 1) as u8));
        }
        let sol = solve_rows(&rows, m)?;
        for b in 0..m {
            psi.set(l, b, (sol >> b) & 1 == 1);
        }
    }
    let mut phi = BitMat::zeros(m, s);
    for (l, &c) in cols.iter().enumerate() {
        for b in 0..m {
            phi.set(b, l, (c >> b) & 1 == 1);
        }
    }
    Some(Rmfe { s, m, phi, psi })
}

/// Search for a degree-3 RMFE with the given (s, m). Candidate phi matrices
/// (tuples of column values) are tried in index order when their number fits
/// the budget, otherwise `budget` seeded random candidates are tried. For each
/// candidate every psi row is solved from all 2^(3s) triples. `Ok(None)`
/// means no candidate examined worked, which is no claim about existence.
pub fn rmfe_search(s: usize, m: u32, seed: u64, budget: u64) -> Result<Option<Rmfe>> {
    rmfe_search_with(s, m, seed, budget, Exec::default())
}

pub fn rmfe_search_with(s: usize, m: u32, seed: u64, budget: u64, exec: Exec) -> Result<Option<Rmfe>> {
    if !(1..=4).contains(&s) || !(1..=12).contains(&m) {
        return Err(Error::InvalidParameter(format!("RMFE search limited to s <= 4, m <= 12; got s={s}, m={m}")));
    }
    let f = make_field(m)?;
    let q = f.order() as u64;
    let total = q.saturating_pow(s as u32);
    let exhaustive = total <= budget;
    let count = if exhaustive { total } else { budget };
    let found = exec::find_first(exec, 0..count, 64, |range| {
        range.into_iter().find_map(|i| {
            let cols: Vec<u16> = if exhaustive {
                (0..s).map(|l| ((i / q.pow(l as u32)) % q) as u16).collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                (0..s).map(|_| (rng.gen::<u64>() % q) as u16).collect()
            };
            rmfe_candidate(f, s, &cols)
        })
    });
    if let Some(r) = &found {
        if !rmfe_verify(r).passed() {
            return Err(Error::Internal("solved RMFE fails its identity".into()));
        }
    }
    Ok(found)
}
