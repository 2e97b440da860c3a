//! Diagonal phase gates (-1)^f(g(x,y,z)) with g a polynomial of total degree
//! at most 3 over GF(2^m) and f an F2-linear functional, and checks that the
//! transversal physical gate acts as the parallel logical gate.
//!
//! All gates here are diagonal and CSS basis states are uniform superpositions
//! over cosets, so the operator identity holds exactly when the physical phase
//! is the same on every coset triple and equals the logical phase.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::css::QuditCssCode;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::field::{Field, FieldBasis};
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    /// Exponents of x, y, z.
    pub e: [u8; 3],
    pub coeff: u16,
}

#[derive(Clone, Debug)]
pub struct PhaseGateSpec {
    field: Field,
    monomials: Vec<Monomial>,
    f_mask: u32,
    basis: FieldBasis,
}

impl PhaseGateSpec {
    pub fn new(field: Field, monomials: Vec<Monomial>, f_mask: u32, basis: FieldBasis) -> Result<Self> {
        if basis.field() != field {
            return Err(Error::FieldMismatch {
                left: field.to_string(),
                right: basis.field().to_string(),
            });
        }
        for mono in &monomials {
            let deg: u32 = mono.e.iter().map(|&e| e as u32).sum();
            if deg > 3 {
                return Err(Error::InvalidParameter(format!(
                    "monomial {:?} has degree {deg} > 3",
                    mono.e
                )));
            }
            if !field.contains(mono.coeff as u32) {
                return Err(Error::ElementOutOfRange { bits: mono.coeff as u32, m: field.m() });
            }
        }
        if f_mask >> field.m() != 0 {
            return Err(Error::InvalidParameter(format!("f mask {f_mask:#x} wider than m")));
        }
        Ok(Self { field, monomials, f_mask, basis })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn f_mask(&self) -> u32 {
        self.f_mask
    }

    pub fn basis(&self) -> &FieldBasis {
        &self.basis
    }

    pub fn with_f_mask(&self, f_mask: u32) -> Result<Self> {
        Self::new(self.field, self.monomials.clone(), f_mask, self.basis.clone())
    }

    pub fn g(&self, x: u16, y: u16, z: u16) -> u16 {
        let f = self.field;
        self.monomials.iter().fold(0, |acc, mono| {
            let t = f.mul(
                f.mul(f.pow(x, mono.e[0] as u64), f.pow(y, mono.e[1] as u64)),
                f.pow(z, mono.e[2] as u64),
            );
            acc ^ f.mul(mono.coeff, t)
        })
    }

    pub fn f(&self, a: u16) -> u8 {
        ((self.basis.expand(a) & self.f_mask).count_ones() & 1) as u8
    }

    pub fn phase(&self, x: u16, y: u16, z: u16) -> u8 {
        self.f(self.g(x, y, z))
    }
}

/// Mask of the absolute trace with respect to `basis`: bit j is Tr(alpha_j).
pub fn trace_mask(basis: &FieldBasis) -> u32 {
    let f = basis.field();
    basis.elements().iter().enumerate().fold(0, |m, (j, &a)| m | (f.trace(a) as u32) << j)
}

/// g = xyz, f = Tr in the polynomial basis.
pub fn ccz_spec(field: Field) -> PhaseGateSpec {
    let basis = FieldBasis::polynomial(field);
    let mask = trace_mask(&basis);
    PhaseGateSpec::new(field, vec![Monomial { e: [1, 1, 1], coeff: 1 }], mask, basis)
        .expect("CCZ spec is well formed")
}

fn sum_phase(spec: &PhaseGateSpec, a: &[u16], b: &[u16], c: &[u16]) -> Result<u8> {
    if a.len() != b.len() || a.len() != c.len() {
        return Err(Error::Dimension(format!(
            "phase on lengths {}, {}, {}",
            a.len(),
            b.len(),
            c.len()
        )));
    }
    Ok(a.iter().zip(b).zip(c).fold(0u8, |acc, ((&x, &y), &z)| acc ^ spec.phase(x, y, z)))
}

/// Sum over qudits of f(g(a_i, b_i, c_i)) mod 2.
pub fn physical_phase(spec: &PhaseGateSpec, a: &[u16], b: &[u16], c: &[u16]) -> Result<u8> {
    sum_phase(spec, a, b, c)
}

/// Sum over logical qudits of f(g(u_a, v_a, w_a)) mod 2.
pub fn logical_phase(spec: &PhaseGateSpec, u: &[u16], v: &[u16], w: &[u16]) -> Result<u8> {
    sum_phase(spec, u, v, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

impl std::str::FromStr for Mode {
    type Err = Error;

    /// `exhaustive` or `sampled:<trials>:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "exhaustive" {
            return Ok(Mode::Exhaustive);
        }
        let bad = || Error::Parse { line: 0, msg: format!("bad mode {s:?}") };
        let rest = s.strip_prefix("sampled:").ok_or_else(bad)?;
        let (t, seed) = rest.split_once(':').ok_or_else(bad)?;
        Ok(Mode::Sampled {
            trials: t.parse().map_err(|_| bad())?,
            seed: seed.parse().map_err(|_| bad())?,
        })
    }
}

/// A logical triple and coset coefficients where the phases differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub u: Vec<u16>,
    pub v: Vec<u16>,
    pub w: Vec<u16>,
    pub cosets: [Vec<u16>; 3],
    pub physical: u8,
    pub logical: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum Verdict {
    Pass { checks: u64 },
    Counterexample { witness: Witness },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

fn digits(mut idx: u64, q: u64, len: usize) -> Vec<u16> {
    (0..len)
        .map(|_| {
            let d = (idx % q) as u16;
            idx /= q;
            d
        })
        .collect()
}

fn check_one(q: &QuditCssCode, spec: &PhaseGateSpec, coeffs: [Vec<u16>; 6]) -> Result<Option<Witness>> {
    let [u, v, w, c1, c2, c3] = coeffs;
    let a = q.codeword(&u, &c1)?;
    let b = q.codeword(&v, &c2)?;
    let c = q.codeword(&w, &c3)?;
    let physical = physical_phase(spec, &a, &b, &c)?;
    let logical = logical_phase(spec, &u, &v, &w)?;
    Ok((physical != logical).then(|| Witness { u, v, w, cosets: [c1, c2, c3], physical, logical }))
}

pub fn verify_transversal(q: &QuditCssCode, spec: &PhaseGateSpec, mode: Mode, budget: u64) -> Result<Verdict> {
    verify_transversal_with(q, spec, mode, budget, Exec::default())
}

/// Compare physical and logical phases on all (or sampled) logical triples
/// and coset representatives. The reported witness is the first failure in
/// index order.
pub fn verify_transversal_with(
    q: &QuditCssCode,
    spec: &PhaseGateSpec,
    mode: Mode,
    budget: u64,
    exec: Exec,
) -> Result<Verdict> {
    if spec.field() != q.field {
        return Err(Error::FieldMismatch {
            left: q.field.to_string(),
            right: spec.field().to_string(),
        });
    }
    let order = q.field.order() as u64;
    let (kl, kc) = (q.k, q.h0.rows());
    let mask = (order - 1) as u16;
    let (total, draw): (u64, Box<dyn Fn(u64) -> [Vec<u16>; 6] + Sync>) = match mode {
        Mode::Exhaustive => {
            let exp = 3 * (kl + kc) as u32;
            let total = order
                .checked_pow(exp)
                .filter(|&t| t <= budget)
                .ok_or_else(|| Error::BudgetExceeded(format!("q^{exp} triples exceed budget {budget}")))?;
            let f = move |idx: u64| {
                let d = digits(idx, order, 3 * (kl + kc));
                let (l, c) = d.split_at(3 * kl);
                [
                    l[..kl].to_vec(),
                    l[kl..2 * kl].to_vec(),
                    l[2 * kl..].to_vec(),
                    c[..kc].to_vec(),
                    c[kc..2 * kc].to_vec(),
                    c[2 * kc..].to_vec(),
                ]
            };
            (total, Box::new(f))
        }
        Mode::Sampled { trials, seed } => {
            let f = move |idx: u64| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(idx);
                let mut take = |len: usize| (0..len).map(|_| rng.gen::<u16>() & mask).collect::<Vec<_>>();
                [take(kl), take(kl), take(kl), take(kc), take(kc), take(kc)]
            };
            (trials, Box::new(f))
        }
    };
    let found = exec::find_first(exec, 0..total, 256, |range| {
        range.into_iter().find_map(|i| check_one(q, spec, draw(i)).transpose())
    });
    match found {
        None => Ok(Verdict::Pass { checks: total }),
        Some(Ok(witness)) => Ok(Verdict::Counterexample { witness }),
        Some(Err(e)) => Err(e),
    }
}

/// Violations of the three star-sum identities on the rows r_a of (H1; H0),
/// where |x| is the field sum of the entries and indices below K are H1 rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleReport {
    /// |r_a * r_b * r_c| = [a = b = c < K]
    pub triples: Vec<[usize; 3]>,
    /// |r_a * r_b| = [a = b < K]
    pub pairs: Vec<[usize; 2]>,
    /// |r_a| = [a < K]
    pub singles: Vec<usize>,
}

impl TripleReport {
    pub fn is_empty(&self) -> bool {
        self.triples.is_empty() && self.pairs.is_empty() && self.singles.is_empty()
    }
}

pub fn check_triple_conditions(h1: &Mat, h0: &Mat) -> Result<TripleReport> {
    let rows = h1.vstack(h0)?;
    let f = rows.field();
    let k = rows.rows();
    let kl = h1.rows();
    let sum = |v: &[u16]| v.iter().fold(0u16, |a, &x| a ^ x);
    let mut report = TripleReport::default();
    for a in 0..k {
        if sum(rows.row(a)) != (a < kl) as u16 {
            report.singles.push(a);
        }
        for b in 0..k {
            let ab: Vec<u16> = rows.row(a).iter().zip(rows.row(b)).map(|(&x, &y)| f.mul(x, y)).collect();
            if sum(&ab) != (a == b && a < kl) as u16 {
                report.pairs.push([a, b]);
            }
            for c in 0..k {
                if f.dot(&ab, rows.row(c)) != (a == b && b == c && a < kl) as u16 {
                    report.triples.push([a, b, c]);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hermitian_code, rs_code};
    use crate::css::build_css;
    use crate::field::{make_field, BasisKind};
    use crate::DEFAULT_BUDGET;

    fn herm71() -> QuditCssCode {
        build_css(&hermitian_code(2, 2).unwrap(), 1, DEFAULT_BUDGET).unwrap()
    }

    fn spec(field: Field, monos: &[([u8; 3], u16)]) -> PhaseGateSpec {
        let basis = FieldBasis::polynomial(field);
        let mask = trace_mask(&basis);
        let monos = monos.iter().map(|&(e, coeff)| Monomial { e, coeff }).collect();
        PhaseGateSpec::new(field, monos, mask, basis).unwrap()
    }

    #[test]
    fn ccz_values() {
        let g2 = make_field(1).unwrap();
        let s = ccz_spec(g2);
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    assert_eq!(s.phase(x, y, z), (x & y & z) as u8);
                }
            }
        }
        let g4 = make_field(2).unwrap();
        let s = ccz_spec(g4);
        assert_eq!(s.phase(2, 2, 2), 0);
        assert_eq!(s.phase(0, 3, 3), 0);
        assert_eq!(physical_phase(&ccz_spec(g2), &[1], &[1], &[1]).unwrap(), 1);
        assert!(physical_phase(&s, &[1], &[1, 1], &[1]).is_err());
    }

    #[test]
    fn spec_validation() {
        let f = make_field(2).unwrap();
        let basis = FieldBasis::polynomial(f);
        assert!(PhaseGateSpec::new(f, vec![Monomial { e: [2, 2, 0], coeff: 1 }], 2, basis.clone()).is_err());
        assert!(PhaseGateSpec::new(f, vec![Monomial { e: [1, 0, 0], coeff: 4 }], 2, basis.clone()).is_err());
        assert!(PhaseGateSpec::new(f, vec![], 4, basis).is_err());
        let sd = FieldBasis::new(f, vec![2, 3], BasisKind::SelfDual).unwrap();
        assert_eq!(trace_mask(&sd), 0b11);
        let s = PhaseGateSpec::new(f, vec![Monomial { e: [1, 0, 0], coeff: 1 }], 0b11, sd).unwrap();
        for a in f.elements() {
            assert_eq!(s.f(a), f.trace(a));
        }
        assert_eq!("sampled:10:3".parse::<Mode>().unwrap(), Mode::Sampled { trials: 10, seed: 3 });
        assert!("sampled:10".parse::<Mode>().is_err());
    }

    #[test]
    fn f_is_linear() {
        for m in [1, 2, 3, 4, 8] {
            let f = make_field(m).unwrap();
            let s = ccz_spec(f);
            for mask in [1u32, (1 << m) - 1, 0b101 & ((1 << m) - 1)] {
                let s = s.with_f_mask(mask).unwrap();
                for a in f.elements() {
                    for b in f.elements().step_by(if m == 8 { 5 } else { 1 }) {
                        assert_eq!(s.f(a ^ b), s.f(a) ^ s.f(b));
                    }
                }
            }
        }
    }

    #[test]
    fn phase_linear_in_mask() {
        let f = make_field(2).unwrap();
        let s = spec(f, &[([1, 1, 1], 1), ([1, 1, 0], 2), ([0, 0, 1], 3)]);
        let a = [1, 2, 3, 0, 2];
        let b = [3, 3, 1, 2, 2];
        let c = [2, 1, 1, 3, 0];
        let p = |mask| physical_phase(&s.with_f_mask(mask).unwrap(), &a, &b, &c).unwrap();
        assert_eq!(p(0b11), p(0b01) ^ p(0b10));
    }

    #[test]
    fn phase_recount() {
        let q = herm71();
        let s = ccz_spec(q.field);
        let f = q.field;
        for u in 0..4u16 {
            for c in 0..4u16 {
                let a = q.codeword(&[u], &[c]).unwrap();
                let b = q.codeword(&[c], &[u]).unwrap();
                let cc = q.codeword(&[u ^ c], &[1]).unwrap();
                let direct = (0..q.n).fold(0u8, |acc, i| {
                    acc ^ f.trace(f.mul(f.mul(a[i], b[i]), cc[i]))
                });
                assert_eq!(physical_phase(&s, &a, &b, &cc).unwrap(), direct);
            }
        }
    }

    #[test]
    fn hermitian_transversal_exhaustive() {
        let q = herm71();
        let f = q.field;
        for s in [
            ccz_spec(f),
            spec(f, &[([2, 1, 0], 1)]),
            spec(f, &[([1, 1, 1], 1), ([1, 1, 0], 3), ([1, 0, 0], 2), ([0, 0, 0], 1)]),
            spec(f, &[([1, 1, 0], 1)]),
            spec(f, &[([0, 2, 0], 2), ([0, 0, 1], 1)]),
        ] {
            for exec in [Exec::Sequential, Exec::Parallel] {
                let v = verify_transversal_with(&q, &s, Mode::Exhaustive, DEFAULT_BUDGET, exec).unwrap();
                assert_eq!(v, Verdict::Pass { checks: 4096 });
            }
        }
        let v = verify_transversal(&q, &ccz_spec(f), Mode::Sampled { trials: 2000, seed: 7 }, 0).unwrap();
        assert!(v.passed());
        assert!(verify_transversal(&q, &ccz_spec(f), Mode::Exhaustive, 4095).is_err());
    }

    #[test]
    fn triple_report_examples() {
        let g4 = make_field(2).unwrap();
        let h1 = Mat::from_rows(g4, 3, &[vec![1, 1, 1]]).unwrap();
        let h0 = Mat::zeros(g4, 0, 3);
        assert!(check_triple_conditions(&h1, &h0).unwrap().is_empty());
        for (c, k) in [
            (hermitian_code(2, 2).unwrap(), 1),
            (hermitian_code(2, 2).unwrap(), 2),
            (rs_code(make_field(4).unwrap(), 5).unwrap(), 2),
            (hermitian_code(4, 24).unwrap(), 4),
        ] {
            let q = build_css(&c, k, 1 << 12).unwrap();
            assert!(check_triple_conditions(&q.h1, &q.h0).unwrap().is_empty());
        }
        // Rows not descended from a code containing all-ones.
        let h1 = Mat::from_rows(g4, 3, &[vec![1, 1, 0]]).unwrap();
        let h0 = Mat::from_rows(g4, 3, &[vec![0, 1, 2]]).unwrap();
        let r = check_triple_conditions(&h1, &h0).unwrap();
        assert!(!r.singles.is_empty());
    }

    #[test]
    fn mutation_is_caught() {
        let q = herm71();
        let mut h0 = q.h0.clone();
        let j = (0..q.n).find(|&j| h0.get(0, j) != 0).unwrap();
        h0.set(0, j, h0.get(0, j) ^ 1);
        let report = check_triple_conditions(&q.h1, &h0).unwrap();
        assert!(!report.triples.is_empty());
        let m = QuditCssCode::from_blocks(q.h1.clone(), h0, "mutant", DEFAULT_BUDGET).unwrap();
        match verify_transversal(&m, &ccz_spec(q.field), Mode::Exhaustive, DEFAULT_BUDGET).unwrap() {
            Verdict::Counterexample { witness } => {
                let a = m.codeword(&witness.u, &witness.cosets[0]).unwrap();
                let b = m.codeword(&witness.v, &witness.cosets[1]).unwrap();
                let c = m.codeword(&witness.w, &witness.cosets[2]).unwrap();
                let s = ccz_spec(q.field);
                assert_eq!(physical_phase(&s, &a, &b, &c).unwrap(), witness.physical);
                assert_ne!(witness.physical, witness.logical);
            }
            v => panic!("mutant passed: {v:?}"),
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            /// Exhaustive verification with a gate carrying cubic, quadratic
            /// and linear terms passes exactly when all identities hold.
            #[test]
            fn verification_matches_identities(
                which in 0usize..3, block in any::<bool>(), col in 0usize..7, delta in 1u16..4
            ) {
                let q = herm71();
                let f = q.field;
                let (mut h1, mut h0) = (q.h1.clone(), q.h0.clone());
                if which > 0 {
                    let m = if block { &mut h1 } else { &mut h0 };
                    m.set(0, col, m.get(0, col) ^ delta);
                }
                let report = check_triple_conditions(&h1, &h0).unwrap();
                let Ok(m) = QuditCssCode::from_blocks(h1, h0, "mutant", DEFAULT_BUDGET) else {
                    return Ok(());
                };
                let s = spec(f, &[([1, 1, 1], 1), ([1, 1, 0], 1), ([1, 0, 0], 1)]);
                let v = verify_transversal(&m, &s, Mode::Exhaustive, DEFAULT_BUDGET).unwrap();
                prop_assert_eq!(v.passed(), report.is_empty());
                let ccz = verify_transversal(&m, &ccz_spec(f), Mode::Exhaustive, DEFAULT_BUDGET).unwrap();
                prop_assert_eq!(ccz.passed(), report.triples.is_empty());
            }
        }
    }
}
