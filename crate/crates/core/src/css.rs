//! Qudit CSS codes from codes with the multiplication property.
//!
//! The generator of C is brought to the block form `[[1_K, H1], [0, H0]]` by
//! reduced row echelon form and a column permutation. Deleting the K identity
//! columns leaves the code CSS(C'', C'^perp) on N = n - K qudits with
//! C'' = rowspan(H1; H0) and C' = rowspan(H0): X-stabilizers are the rows of
//! H0, Z-stabilizers span the dual of C'', and logical X_a is row a of H1.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{self, dual, Distance, LinearCode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::Field;
use crate::linalg::Mat;
use crate::search::{self, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotForm {
    pub h1: Mat,
    pub h0: Mat,
    /// `col_perm[j]` is the original coordinate placed at position j: the
    /// first K entries form the identity block, the rest are kept in order.
    pub col_perm: Vec<usize>,
}

impl PivotForm {
    /// `[[1_K, H1], [0, H0]]` with columns put back in original order.
    pub fn reassemble(&self) -> Mat {
        let f = self.h1.field();
        let k1 = self.h1.rows();
        let n = self.col_perm.len();
        let mut g = Mat::zeros(f, k1 + self.h0.rows(), n);
        for (j, &orig) in self.col_perm.iter().enumerate() {
            for r in 0..g.rows() {
                let v = if j < k1 {
                    (r == j) as u16
                } else if r < k1 {
                    self.h1.get(r, j - k1)
                } else {
                    self.h0.get(r - k1, j - k1)
                };
                g.set(r, orig, v);
            }
        }
        g
    }
}

pub fn pivot_form(c: &LinearCode, k_log: usize) -> Result<PivotForm> {
    if k_log == 0 || k_log > c.k() {
        return Err(Error::InvalidParameter(format!(
            "K must lie in 1..={} for a code of dimension {}",
            c.k(),
            c.k()
        )));
    }
    if !codes::contains_all_ones(c) {
        return Err(Error::Hypothesis {
            identity: "all-ones".into(),
            detail: format!("{} does not contain the all-ones word", c.label()),
        });
    }
    let rr = c.gen().rref();
    let mut col_perm: Vec<usize> = rr.pivots[..k_log].to_vec();
    col_perm.extend((0..c.n()).filter(|j| !rr.pivots[..k_log].contains(j)));
    let kept = &col_perm[k_log..];
    let rows: Vec<usize> = (0..k_log).collect();
    let h1 = rr.matrix.select_rows(&rows).select_columns(kept);
    let rest: Vec<usize> = (k_log..c.k()).collect();
    let h0 = rr.matrix.select_rows(&rest).select_columns(kept);
    Ok(PivotForm { h1, h0, col_perm })
}

#[derive(Clone, Debug)]
pub struct QuditCssCode {
    pub field: Field,
    /// Physical qudits N = n - K.
    pub n: usize,
    /// Logical qudits K.
    pub k: usize,
    pub h1: Mat,
    pub h0: Mat,
    /// Basis of rowspan(H1; H0)^perp.
    pub z_stab: Mat,
    pub col_perm: Vec<usize>,
    /// d(C) - K when the source distance is known.
    pub dx_bound: Option<u32>,
    /// Minimum distance of C'^perp, a lower bound on the Z-distance.
    pub dz: Distance,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssSummary {
    pub field: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub x_stabilizers: usize,
    pub z_stabilizers: usize,
    pub dx_bound: Option<u32>,
    pub dz: Distance,
    pub col_perm: Vec<usize>,
    pub source: String,
}

/// Exact qudit distances: min weight of C'' \ C' (X) and C'^perp \ C''^perp (Z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuditDistances {
    pub dx: Distance,
    pub dz: Distance,
}

impl QuditDistances {
    /// min(dx, dz) when both are exact.
    pub fn d(&self) -> Option<u32> {
        Some(self.dx.exact()?.min(self.dz.exact()?))
    }
}

/// Hypothesis checks and construction of the qudit CSS code.
pub fn build_css(c: &LinearCode, k_log: usize, budget: u64) -> Result<QuditCssCode> {
    let report = codes::mult_property(c, 2)?;
    if !report.holds() {
        let detail = match report.violation {
            Some([a, b, cc]) => format!("generator rows ({a},{b},{cc}) have nonzero triple sum"),
            None => "C*C is not contained in the dual of C".into(),
        };
        return Err(Error::Hypothesis { identity: "mult-property".into(), detail });
    }
    let form = pivot_form(c, k_log)?;
    let d = codes::min_distance(c, budget);
    let mut q = QuditCssCode::from_blocks(form.h1, form.h0, c.label(), budget)?;
    q.col_perm = form.col_perm;
    q.dx_bound = d.exact().map(|d| d.saturating_sub(k_log as u32));
    Ok(q)
}

impl QuditCssCode {
    /// Assemble the code from explicit blocks; rows of (H1; H0) must be
    /// independent. No multiplication-property check is made here.
    pub fn from_blocks(h1: Mat, h0: Mat, source: &str, budget: u64) -> Result<Self> {
        let stacked = h1.vstack(&h0)?;
        if stacked.rank() != stacked.rows() {
            return Err(Error::Dimension("rows of (H1; H0) are dependent".into()));
        }
        let z_stab = stacked.nullspace();
        let cprime = LinearCode::new(h0.clone(), "C'")?;
        let dz = codes::min_distance(&dual(&cprime), budget);
        Ok(Self {
            field: h1.field(),
            n: h1.cols(),
            k: h1.rows(),
            col_perm: (0..h1.cols() + h1.rows()).collect(),
            h1,
            h0,
            z_stab,
            dx_bound: None,
            dz,
            source: source.to_string(),
        })
    }

    /// Generator (H1; H0) of C''.
    pub fn stacked(&self) -> Mat {
        self.h1.vstack(&self.h0).expect("same width")
    }

    pub fn summary(&self) -> CssSummary {
        CssSummary {
            field: self.field.to_string(),
            n: self.n,
            k: self.k,
            x_stabilizers: self.h0.rows(),
            z_stabilizers: self.z_stab.rows(),
            dx_bound: self.dx_bound,
            dz: self.dz,
            col_perm: self.col_perm.clone(),
            source: self.source.clone(),
        }
    }

    /// Codeword u H1 + c H0 for logical u and coset coefficients c.
    pub fn codeword(&self, u: &[u16], coset: &[u16]) -> Result<Vec<u16>> {
        let mut v = self.h1.combine_rows(u)?;
        let h = self.h0.combine_rows(coset)?;
        for (a, b) in v.iter_mut().zip(h) {
            *a ^= b;
        }
        Ok(v)
    }

    /// Number of coset elements, q^(k-K), saturating.
    pub fn coset_size(&self) -> u64 {
        (self.field.order() as u64).saturating_pow(self.h0.rows() as u32)
    }

    /// All of {u H1 + h : h in rowspan(H0)} in coefficient order.
    pub fn basis_state_coset(&self, u: &[u16], budget: u64) -> Result<Vec<Vec<u16>>> {
        let size = self.coset_size();
        if size > budget {
            return Err(Error::BudgetExceeded(format!("coset of size {size} exceeds budget {budget}")));
        }
        let q = self.field.order() as u64;
        (0..size)
            .map(|mut idx| {
                let c: Vec<u16> = (0..self.h0.rows())
                    .map(|_| {
                        let d = (idx % q) as u16;
                        idx /= q;
                        d
                    })
                    .collect();
                self.codeword(u, &c)
            })
            .collect()
    }

    /// Uniformly random element of the coset of u.
    pub fn sample_coset<R: Rng>(&self, u: &[u16], rng: &mut R) -> Result<Vec<u16>> {
        let mask = (self.field.order() - 1) as u16;
        let c: Vec<u16> = (0..self.h0.rows()).map(|_| rng.gen::<u16>() & mask).collect();
        self.codeword(u, &c)
    }

    /// Logical Z representatives z_a with <z_a, h1_b> = delta_ab and
    /// <z_a, h0_c> = 0, one per row.
    pub fn logical_z(&self) -> Result<Mat> {
        let st = self.stacked().transpose();
        let mut out = Mat::zeros(self.field, 0, self.n);
        for a in 0..self.k {
            let mut e = vec![0u16; st.cols()];
            e[a] = 1;
            let z = st
                .solve_left(&e)?
                .ok_or_else(|| Error::Internal("independent rows admit dual vectors".into()))?;
            out.push_row(&z)?;
        }
        Ok(out)
    }

    pub fn exact_distances(&self, budget: u64) -> QuditDistances {
        self.exact_distances_with(budget, Exec::default())
    }

    pub fn exact_distances_with(&self, budget: u64, exec: Exec) -> QuditDistances {
        let f = self.field;
        let m = f.m() as usize;
        let width = search::lane_width(f.m());
        let nwords = search::words_for(self.n, width);
        let weight = |v: &[u64]| search::lane_weight(v, width);

        // X: tag marks any H1 component.
        let (basis, _) = codes::packed_f2_basis(&self.stacked());
        let logical_bits = self.k * m;
        let tags: Vec<u64> = (0..basis.len())
            .map(|i| if i < logical_bits && i < 64 { 1 << i } else { 0 })
            .collect();
        let span = Span { basis: &basis, tags: &tags, nwords };
        let dx = if logical_bits > 64 {
            Distance::Exceeded
        } else {
            to_distance(span.min_weight(exec, budget, weight, |t| t != 0))
        };

        // Z: tag packs the pairings with the rows of H1.
        let cprime_dual = self.h0.nullspace();
        let (basis, _) = codes::packed_f2_basis(&cprime_dual);
        let dz = if logical_bits > 64 {
            Distance::Exceeded
        } else {
            let tags: Vec<u64> = cprime_dual
                .iter_rows()
                .flat_map(|row| {
                    (0..m).map(move |b| {
                        let v: Vec<u16> = row.iter().map(|&x| f.mul(x, 1 << b)).collect();
                        (0..self.k).fold(0u64, |t, a| {
                            t | (f.dot(&v, self.h1.row(a)) as u64) << (a * m)
                        })
                    })
                })
                .collect();
            let span = Span { basis: &basis, tags: &tags, nwords };
            to_distance(span.min_weight(exec, budget, weight, |t| t != 0))
        };
        QuditDistances { dx, dz }
    }
}

fn to_distance(r: Result<Option<search::Witness>>) -> Distance {
    match r {
        Ok(Some(w)) => Distance::Exact(w.weight),
        Ok(None) => Distance::ZeroCode,
        Err(_) => Distance::Exceeded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hermitian_code, rs_code, shorten};
    use crate::field::make_field;
    use crate::DEFAULT_BUDGET;

    fn gf(m: u32) -> Field {
        make_field(m).unwrap()
    }

    /// Enumerate C'' directly and split by membership in C'.
    fn brute_dx(q: &QuditCssCode) -> u32 {
        let f = q.field;
        let order = f.order() as u64;
        let k = q.h1.rows() + q.h0.rows();
        let st = q.stacked();
        (1..order.pow(k as u32))
            .filter_map(|mut idx| {
                let c: Vec<u16> = (0..k)
                    .map(|_| {
                        let d = (idx % order) as u16;
                        idx /= order;
                        d
                    })
                    .collect();
                if c[..q.k].iter().all(|&x| x == 0) {
                    return None;
                }
                Some(st.combine_rows(&c).unwrap().iter().filter(|&&x| x != 0).count() as u32)
            })
            .min()
            .unwrap()
    }

    /// Enumerate all of F_q^N and keep Z logicals.
    fn brute_dz(q: &QuditCssCode) -> u32 {
        let f = q.field;
        let order = f.order() as u64;
        let mut best = u32::MAX;
        for mut idx in 1..order.pow(q.n as u32) {
            let e: Vec<u16> = (0..q.n)
                .map(|_| {
                    let d = (idx % order) as u16;
                    idx /= order;
                    d
                })
                .collect();
            let in_cpd = q.h0.iter_rows().all(|r| f.dot(r, &e) == 0);
            let logical = q.h1.iter_rows().any(|r| f.dot(r, &e) != 0);
            if in_cpd && logical {
                best = best.min(e.iter().filter(|&&x| x != 0).count() as u32);
            }
        }
        best
    }

    #[test]
    fn pivot_form_examples() {
        let rep = rs_code(gf(2), 1).unwrap();
        let p = pivot_form(&rep, 1).unwrap();
        assert_eq!(p.h1.row(0), &[1, 1, 1]);
        assert_eq!(p.h0.rows(), 0);
        assert_eq!(p.col_perm, vec![0, 1, 2, 3]);

        let h = hermitian_code(2, 2).unwrap();
        let p = pivot_form(&h, 1).unwrap();
        assert_eq!((p.h1.rows(), p.h1.cols(), p.h0.rows(), p.h0.cols()), (1, 7, 1, 7));
        assert!(p.reassemble().same_row_space(h.gen()).unwrap());

        let rs = rs_code(gf(4), 5).unwrap();
        let p = pivot_form(&rs, 2).unwrap();
        assert_eq!((p.h1.rows(), p.h1.cols(), p.h0.rows(), p.h0.cols()), (2, 14, 3, 14));
        assert!(p.reassemble().same_row_space(rs.gen()).unwrap());

        assert!(pivot_form(&rs, 6).is_err());
        let even = LinearCode::new(Mat::from_rows(gf(1), 3, &[vec![1, 1, 0]]).unwrap(), "e").unwrap();
        assert!(matches!(pivot_form(&even, 1), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn build_examples() {
        let h = hermitian_code(2, 2).unwrap();
        let q = build_css(&h, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!((q.n, q.k), (7, 1));
        assert_eq!(q.dx_bound, Some(5));
        assert_eq!(q.n + q.k, h.n());
        // Shortening at the identity column recovers C' = rowspan(H0).
        let short = shorten(&h, &q.col_perm[..1]).unwrap();
        assert_eq!(short.k(), 1);
        assert!(short.gen().same_row_space(&q.h0).unwrap());

        let rs = rs_code(gf(4), 5).unwrap();
        let q = build_css(&rs, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!((q.n, q.k, q.dx_bound), (14, 2, Some(10)));

        let rep = rs_code(gf(2), 1).unwrap();
        let q = build_css(&rep, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!((q.n, q.k), (3, 1));
        assert_eq!(q.dz, Distance::Exact(1));

        let bad = rs_code(gf(4), 6).unwrap();
        match build_css(&bad, 1, DEFAULT_BUDGET) {
            Err(Error::Hypothesis { identity, .. }) => assert_eq!(identity, "mult-property"),
            other => panic!("expected hypothesis error, got {other:?}"),
        }
    }

    #[test]
    fn structural_invariants() {
        let cases = [
            (hermitian_code(2, 2).unwrap(), 1),
            (hermitian_code(2, 2).unwrap(), 2),
            (rs_code(gf(4), 5).unwrap(), 2),
            (rs_code(gf(4), 3).unwrap(), 1),
            (rs_code(gf(2), 1).unwrap(), 1),
            (hermitian_code(4, 24).unwrap(), 3),
        ];
        for (c, k) in cases {
            let q = build_css(&c, k, 1 << 16).unwrap();
            assert_eq!(q.h1.rank(), k);
            assert_eq!(q.h0.rank(), c.k() - k);
            assert_eq!(q.stacked().rank(), c.k());
            let f = q.field;
            for x in q.h0.iter_rows() {
                for z in q.z_stab.iter_rows() {
                    assert_eq!(f.dot(x, z), 0);
                }
            }
            let lz = q.logical_z().unwrap();
            for a in 0..k {
                for b in 0..k {
                    assert_eq!(f.dot(lz.row(a), q.h1.row(b)), (a == b) as u16);
                }
                for h in q.h0.iter_rows() {
                    assert_eq!(f.dot(lz.row(a), h), 0);
                }
            }
        }
    }

    #[test]
    fn cosets() {
        let h = hermitian_code(2, 2).unwrap();
        let q = build_css(&h, 1, DEFAULT_BUDGET).unwrap();
        let mut all = Vec::new();
        for u in 0..4u16 {
            let c = q.basis_state_coset(&[u], 16).unwrap();
            assert_eq!(c.len(), 4);
            all.extend(c);
        }
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 16);
        assert!(q.basis_state_coset(&[1], 3).is_err());
        let rep = build_css(&rs_code(gf(2), 1).unwrap(), 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(rep.basis_state_coset(&[0], 1).unwrap(), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn exact_distances_match_brute_force() {
        for (c, k) in [
            (hermitian_code(2, 2).unwrap(), 1),
            (hermitian_code(2, 2).unwrap(), 2),
            (rs_code(gf(2), 1).unwrap(), 1),
            (hermitian_code(2, 1).unwrap(), 1),
        ] {
            let q = build_css(&c, k, DEFAULT_BUDGET).unwrap();
            for exec in [Exec::Sequential, Exec::Parallel] {
                let d = q.exact_distances_with(DEFAULT_BUDGET, exec);
                assert_eq!(d.dx, Distance::Exact(brute_dx(&q)), "{} K={k}", c.label());
                assert_eq!(d.dz, Distance::Exact(brute_dz(&q)), "{} K={k}", c.label());
                if let Some(b) = q.dx_bound {
                    assert!(d.dx.exact().unwrap() >= b);
                }
                // The C'^perp distance lower-bounds the Z distance.
                assert!(d.dz.exact().unwrap() >= q.dz.exact().unwrap());
            }
        }
    }

    #[test]
    fn hermitian_seven_one_distances() {
        let q = build_css(&hermitian_code(2, 2).unwrap(), 1, DEFAULT_BUDGET).unwrap();
        let d = q.exact_distances(DEFAULT_BUDGET);
        assert_eq!(d.dx, Distance::Exact(5));
        assert_eq!(d.dz, Distance::Exact(1));
    }
}
