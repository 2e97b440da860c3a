//! Classical linear codes over GF(2^m).
//!
//! A [`LinearCode`] is a full-row-rank generator matrix plus a label. The two
//! explicit families are full-length Reed–Solomon codes ([`rs_code`]) and
//! one-point Hermitian codes ([`hermitian_code`]); both evaluate in canonical
//! point order, so generator matrices are fixed bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::field::Field;
use crate::linalg::Mat;
use crate::search::{self, Span};

#[derive(Clone, Debug)]
pub struct LinearCode {
    gen: Mat,
    label: String,
}

impl PartialEq for LinearCode {
    /// Equality of row spaces; labels are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.gen.field() == other.gen.field()
            && self.gen.cols() == other.gen.cols()
            && self.gen.same_row_space(&other.gen).unwrap_or(false)
    }
}

impl LinearCode {
    /// Wrap a generator matrix, which must have full row rank.
    pub fn new(gen: Mat, label: impl Into<String>) -> Result<Self> {
        if gen.rank() != gen.rows() {
            return Err(Error::Dimension(format!(
                "generator has {} rows but rank {}",
                gen.rows(),
                gen.rank()
            )));
        }
        Ok(Self { gen, label: label.into() })
    }

    /// Code spanned by the rows of `m`, which may be dependent.
    pub fn from_spanning(m: &Mat, label: impl Into<String>) -> Self {
        Self { gen: m.row_basis(), label: label.into() }
    }

    pub fn field(&self) -> Field {
        self.gen.field()
    }

    pub fn n(&self) -> usize {
        self.gen.cols()
    }

    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    pub fn gen(&self) -> &Mat {
        &self.gen
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn contains(&self, v: &[u16]) -> Result<bool> {
        self.gen.in_rowspace(v)
    }

    /// Every codeword of `self` lies in `other`.
    pub fn is_subcode_of(&self, other: &LinearCode) -> Result<bool> {
        other.gen.spans(&self.gen)
    }

    pub fn encode(&self, coeffs: &[u16]) -> Result<Vec<u16>> {
        self.gen.combine_rows(coeffs)
    }

    /// Matrix-file text with a leading `# label:` comment.
    pub fn to_text(&self) -> String {
        format!("# label: {}\n{}", self.label, self.gen.to_text())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let label = text
            .lines()
            .find_map(|l| l.trim().strip_prefix("# label:"))
            .map(|l| l.trim().to_string())
            .unwrap_or_default();
        Self::new(Mat::from_text(text)?, label)
    }
}

pub fn star(field: Field, x: &[u16], y: &[u16]) -> Result<Vec<u16>> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("star of lengths {} and {}", x.len(), y.len())));
    }
    Ok(x.iter().zip(y).map(|(&a, &b)| field.mul(a, b)).collect())
}

/// Span of all t-fold star products of generator rows.
pub fn star_power_code(c: &LinearCode, t: usize) -> Result<LinearCode> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!("star power needs t >= 2, got {t}")));
    }
    let f = c.field();
    let k = c.k();
    let mut prods = Mat::zeros(f, 0, c.n());
    // Multisets of rows: non-decreasing index tuples.
    let mut idx = vec![0usize; t];
    if k > 0 {
        loop {
            let mut v = c.gen.row(idx[0]).to_vec();
            for &i in &idx[1..] {
                v = star(f, &v, c.gen.row(i))?;
            }
            prods.push_row(&v)?;
            let Some(p) = (0..t).rev().find(|&p| idx[p] + 1 < k) else {
                break;
            };
            idx[p] += 1;
            for q in p + 1..t {
                idx[q] = idx[p];
            }
        }
    }
    Ok(LinearCode::from_spanning(&prods, format!("({})^*{t}", c.label)))
}

pub fn dual(c: &LinearCode) -> LinearCode {
    LinearCode { gen: c.gen.nullspace(), label: format!("dual({})", c.label) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultReport {
    pub t: usize,
    /// C^{*t} is contained in the dual of C.
    pub subset: bool,
    /// Generator-triple criterion; only evaluated for t = 2.
    pub triple: Option<bool>,
    /// First row triple (a <= b <= c) with nonzero sum of g_a * g_b * g_c.
    pub violation: Option<[usize; 3]>,
}

impl MultReport {
    pub fn holds(&self) -> bool {
        self.subset
    }
}

/// First lexicographic row triple a <= b <= c with sum_i g_a,i g_b,i g_c,i != 0.
pub fn triple_violation(c: &LinearCode) -> Option<[usize; 3]> {
    let f = c.field();
    let g = &c.gen;
    let k = c.k();
    for a in 0..k {
        for b in a..k {
            let ab: Vec<u16> = g.row(a).iter().zip(g.row(b)).map(|(&x, &y)| f.mul(x, y)).collect();
            for cc in b..k {
                if f.dot(&ab, g.row(cc)) != 0 {
                    return Some([a, b, cc]);
                }
            }
        }
    }
    None
}

pub fn mult_property(c: &LinearCode, t: usize) -> Result<MultReport> {
    let power = star_power_code(c, t)?;
    let subset = power.is_subcode_of(&dual(c))?;
    let (triple, violation) = if t == 2 {
        let v = triple_violation(c);
        (Some(v.is_none()), v)
    } else {
        (None, None)
    };
    if triple.is_some_and(|tr| tr != subset) {
        return Err(Error::Internal(format!(
            "triple and subset criteria disagree on {}",
            c.label
        )));
    }
    Ok(MultReport { t, subset, triple, violation })
}

pub fn has_mult_property(c: &LinearCode, t: usize) -> Result<bool> {
    Ok(mult_property(c, t)?.holds())
}

pub fn contains_all_ones(c: &LinearCode) -> bool {
    c.gen.in_rowspace(&vec![1; c.n()]).expect("width matches")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distance {
    Exact(u32),
    /// The code has dimension 0 and no nonzero codeword.
    ZeroCode,
    /// Neither enumeration route fit the work budget.
    Exceeded,
}

impl Distance {
    pub fn exact(&self) -> Option<u32> {
        match self {
            Distance::Exact(d) => Some(*d),
            _ => None,
        }
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::ZeroCode => f.write_str("none (zero code)"),
            Distance::Exceeded => f.write_str("exceeded"),
        }
    }
}

/// GF(2)-basis {x^b g_i} of the code, packed for [`search`].
pub(crate) fn packed_f2_basis(gen: &Mat) -> (Vec<Vec<u64>>, u32) {
    let f = gen.field();
    let width = search::lane_width(f.m());
    let mut basis = Vec::with_capacity(gen.rows() * f.m() as usize);
    for row in gen.iter_rows() {
        for b in 0..f.m() {
            let scaled: Vec<u16> = row.iter().map(|&x| f.mul(x, 1 << b)).collect();
            basis.push(search::pack(&scaled, width));
        }
    }
    (basis, width)
}

pub fn min_distance(c: &LinearCode, budget: u64) -> Distance {
    min_distance_with(c, budget, Exec::default())
}

/// Exact minimum distance. Enumerates the q^k - 1 nonzero codewords when that
/// fits the budget; otherwise looks for the smallest linearly dependent set of
/// parity-check columns, charging one unit per subset examined.
pub fn min_distance_with(c: &LinearCode, budget: u64, exec: Exec) -> Distance {
    if c.k() == 0 {
        return Distance::ZeroCode;
    }
    let bits = c.k() as u64 * c.field().m() as u64;
    if bits < 63 && (1u64 << bits) - 1 <= budget {
        let (basis, width) = packed_f2_basis(&c.gen);
        let tags = vec![0; basis.len()];
        let span = Span { basis: &basis, tags: &tags, nwords: search::words_for(c.n(), width) };
        let w = span
            .min_weight(exec, budget, |v| search::lane_weight(v, width), |_| true)
            .expect("budget checked")
            .expect("nonzero code has a nonzero word");
        return Distance::Exact(w.weight);
    }
    let h = c.gen.nullspace();
    let mut left = budget;
    for w in 1..=h.rows() + 1 {
        let found = search::first_subset(c.n(), w, &mut left, |cols| {
            h.select_columns(cols).rank() < w
        });
        match found {
            Ok(Some(_)) => return Distance::Exact(w as u32),
            Ok(None) => continue,
            Err(_) => return Distance::Exceeded,
        }
    }
    unreachable!("any n-k+1 columns of the parity check are dependent")
}

fn check_cols(c: &LinearCode, cols: &[usize]) -> Result<Vec<usize>> {
    let mut drop = vec![false; c.n()];
    for &i in cols {
        if i >= c.n() {
            return Err(Error::Dimension(format!("coordinate {i} out of range for n = {}", c.n())));
        }
        drop[i] = true;
    }
    let keep: Vec<usize> = (0..c.n()).filter(|&i| !drop[i]).collect();
    if keep.is_empty() {
        return Err(Error::InvalidParameter("no coordinates left".into()));
    }
    Ok(keep)
}

/// Delete the coordinates in `cols`.
pub fn puncture(c: &LinearCode, cols: &[usize]) -> Result<LinearCode> {
    let keep = check_cols(c, cols)?;
    Ok(LinearCode::from_spanning(
        &c.gen.select_columns(&keep),
        format!("punct({}, {cols:?})", c.label),
    ))
}

/// Keep the codewords vanishing on `cols`, then delete those coordinates.
pub fn shorten(c: &LinearCode, cols: &[usize]) -> Result<LinearCode> {
    let keep = check_cols(c, cols)?;
    // Coefficient vectors x with (x G) restricted to cols = 0.
    let coeffs = c.gen.select_columns(cols).transpose().nullspace();
    let kept = c.gen.select_columns(&keep);
    let short = coeffs.mul(&kept)?;
    let out = LinearCode::from_spanning(&short, format!("short({}, {cols:?})", c.label));
    let via_dual = dual(&puncture(&dual(c), cols)?);
    if out != via_dual {
        return Err(Error::Internal("shortening disagrees with dual of punctured dual".into()));
    }
    Ok(out)
}

/// Evaluations of 1, a, ..., a^(k-1) at every field element in canonical order.
pub fn rs_code(field: Field, k: usize) -> Result<LinearCode> {
    let q = field.order();
    if !(1..=q).contains(&k) {
        return Err(Error::InvalidParameter(format!("RS dimension {k} outside 1..={q}")));
    }
    let mut g = Mat::zeros(field, k, q);
    for j in 0..k {
        for a in field.elements() {
            g.set(j, a as usize, field.pow(a, j as u64));
        }
    }
    LinearCode::new(g, format!("rs(q={q},k={k})"))
}

/// Largest RS dimension with the multiplication property: 3k <= q + 1.
pub fn rs_max_mult_k(field: Field) -> usize {
    (field.order() + 1) / 3
}

fn hermitian_field(q0: u32) -> Result<Field> {
    match q0 {
        2 => crate::field::make_field(2),
        4 => crate::field::make_field(4),
        _ => Err(Error::InvalidParameter(format!("Hermitian q0 must be 2 or 4, got {q0}"))),
    }
}

pub fn hermitian_genus(q0: u32) -> usize {
    (q0 * (q0 - 1) / 2) as usize
}

/// Affine points of y^q0 + y = x^(q0+1) over GF(q0^2), sorted by (x, y).
pub fn hermitian_points(q0: u32) -> Result<Vec<(u16, u16)>> {
    let f = hermitian_field(q0)?;
    let mut pts = Vec::new();
    for x in f.elements() {
        let rhs = f.pow(x, q0 as u64 + 1);
        for y in f.elements() {
            if f.pow(y, q0 as u64) ^ y == rhs {
                pts.push((x, y));
            }
        }
    }
    Ok(pts)
}

/// Exponents (i, j) of x^i y^j with pole order i q0 + j (q0+1) <= s and
/// j < q0, sorted by (j, i).
pub fn hermitian_monomials(q0: u32, s: usize) -> Vec<(usize, usize)> {
    let q0 = q0 as usize;
    let mut out = Vec::new();
    for j in 0..q0 {
        let mut i = 0;
        while i * q0 + j * (q0 + 1) <= s {
            out.push((i, j));
            i += 1;
        }
    }
    out
}

/// One-point Hermitian code: monomials of pole order <= s evaluated at all
/// affine points.
pub fn hermitian_code(q0: u32, s: usize) -> Result<LinearCode> {
    let f = hermitian_field(q0)?;
    let pts = hermitian_points(q0)?;
    let n = pts.len();
    if s >= n {
        return Err(Error::InvalidParameter(format!("Hermitian degree {s} must be below n = {n}")));
    }
    let mons = hermitian_monomials(q0, s);
    let mut g = Mat::zeros(f, mons.len(), n);
    for (r, &(i, j)) in mons.iter().enumerate() {
        for (p, &(x, y)) in pts.iter().enumerate() {
            g.set(r, p, f.mul(f.pow(x, i as u64), f.pow(y, j as u64)));
        }
    }
    LinearCode::new(g, format!("hermitian(q0={q0},s={s})"))
}

/// Largest s with the multiplication property: 3s <= n + 2g - 2.
pub fn hermitian_max_mult_s(q0: u32) -> usize {
    let n = (q0 as usize).pow(3);
    (n + 2 * hermitian_genus(q0) - 2) / 3
}

/// Riemann–Roch parameter bounds for an evaluation code of a divisor of
/// degree `deg_g` on n rational points of a curve of genus `genus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgParams {
    pub n: usize,
    pub genus: usize,
    pub deg_g: usize,
    pub k_bound: usize,
    pub d_bound: usize,
    pub dual_k: usize,
    pub dual_d_bound: i64,
    /// Bound for the dual of the code shortened on `shortened_k` positions.
    pub shortened_k: usize,
    pub shortened_dual_d_bound: usize,
}

pub fn ag_param_bounds(n: usize, genus: usize, deg_g: usize, shortened_k: usize) -> Result<AgParams> {
    if deg_g >= n {
        return Err(Error::InvalidParameter(format!("divisor degree {deg_g} must be below n = {n}")));
    }
    let k_bound = (deg_g + 1).saturating_sub(genus);
    let dual_d_bound = deg_g as i64 + 2 - 2 * genus as i64;
    Ok(AgParams {
        n,
        genus,
        deg_g,
        k_bound,
        d_bound: n - deg_g,
        dual_k: n - k_bound,
        dual_d_bound,
        shortened_k,
        shortened_dual_d_bound: (dual_d_bound - shortened_k as i64).max(0) as usize,
    })
}
