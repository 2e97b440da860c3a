use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};

/// Dense row-major matrix over GF(2^m).
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Reduced row echelon form `matrix = transform * original`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub transform: Mat,
}

impl Rref {
    /// Eliminate `v` against the pivot rows. Returns the coefficients on the
    /// first `rank` rows of the echelon matrix and the residual.
    pub fn reduce(&self, v: &[u16]) -> (Vec<u16>, Vec<u16>) {
        let f = self.matrix.field;
        let mut residual = v.to_vec();
        let mut coeffs = vec![0u16; self.rank];
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = residual[p];
            if c != 0 {
                coeffs[i] = c;
                for (r, &x) in residual.iter_mut().zip(self.matrix.row(i)) {
                    *r ^= f.mul(c, x);
                }
            }
        }
        (coeffs, residual)
    }
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: Field, cols: usize, rows: &[Vec<u16>]) -> Result<Self> {
        let mut m = Self::zeros(field, 0, cols);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u16 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u16) {
        debug_assert!(self.field.contains(v as u32));
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u16] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u16]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn to_rows(&self) -> Vec<Vec<u16>> {
        self.iter_rows().map(|r| r.to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[u16]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!(
                "row of length {} pushed onto matrix with {} columns",
                row.len(),
                self.cols
            )));
        }
        if let Some(&bad) = row.iter().find(|&&x| !self.field.contains(x as u32)) {
            return Err(Error::ElementOutOfRange { bits: bad as u32, m: self.field.m() });
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    fn check_field(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        Ok(())
    }

    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("vstack {} vs {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.field, 0, self.cols);
        for &r in rows {
            out.data.extend_from_slice(self.row(r));
            out.rows += 1;
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] ^= f.mul(a, other.get(k, c));
                }
            }
        }
        Ok(out)
    }

    /// Linear combination `coeffs * self` of the rows.
    pub fn combine_rows(&self, coeffs: &[u16]) -> Result<Vec<u16>> {
        if coeffs.len() != self.rows {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} rows",
                coeffs.len(),
                self.rows
            )));
        }
        let f = self.field;
        let mut out = vec![0u16; self.cols];
        for (r, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for (o, &x) in out.iter_mut().zip(self.row(r)) {
                    *o ^= f.mul(c, x);
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Deterministic Gauss–Jordan elimination with the leftmost-pivot rule.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut a = self.clone();
        let mut t = Mat::identity(f, self.rows);
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            a.swap_rows(rank, p);
            t.swap_rows(rank, p);
            let inv = f.inv(a.get(rank, col)).expect("pivot is nonzero");
            a.scale_row(rank, inv);
            t.scale_row(rank, inv);
            for r in 0..self.rows {
                if r != rank {
                    let c = a.get(r, col);
                    if c != 0 {
                        a.add_scaled_row(r, rank, c);
                        t.add_scaled_row(r, rank, c);
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        Rref { matrix: a, rank, pivots, transform: t }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, r: usize, s: u16) {
        let f = self.field;
        for x in self.row_mut(r) {
            *x = f.mul(*x, s);
        }
    }

    /// row[dst] += s * row[src]
    fn add_scaled_row(&mut self, dst: usize, src: usize, s: u16) {
        let f = self.field;
        let cols = self.cols;
        for c in 0..cols {
            let v = f.mul(s, self.data[src * cols + c]);
            self.data[dst * cols + c] ^= v;
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis N of {x : self * x^T = 0}, one vector per free column.
    pub fn nullspace(&self) -> Mat {
        let rr = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        let mut out = Mat::zeros(self.field, free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            out.set(i, fc, 1);
            for (pr, &pc) in rr.pivots.iter().enumerate() {
                // x_p = -R[pr][fc]; negation is the identity in characteristic 2.
                out.set(i, pc, rr.matrix.get(pr, fc));
            }
        }
        out
    }

    /// Nonzero rows of the echelon form: a basis of the row space.
    pub fn row_basis(&self) -> Mat {
        let rr = self.rref();
        rr.matrix.select_rows(&(0..rr.rank).collect::<Vec<_>>())
    }

    pub fn in_rowspace(&self, v: &[u16]) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let (_, residual) = self.rref().reduce(v);
        Ok(residual.iter().all(|&x| x == 0))
    }

    /// Some x with x * self = v, if one exists.
    pub fn solve_left(&self, v: &[u16]) -> Result<Option<Vec<u16>>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let rr = self.rref();
        let (coeffs, residual) = rr.reduce(v);
        if residual.iter().any(|&x| x != 0) {
            return Ok(None);
        }
        let mut full = coeffs;
        full.resize(self.rows, 0);
        Ok(Some(rr.transform.combine_rows(&full)?))
    }

    /// Row space of `other` is contained in the row space of `self`.
    pub fn spans(&self, other: &Mat) -> Result<bool> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("{} vs {} columns", self.cols, other.cols)));
        }
        let rr = self.rref();
        Ok(other.iter_rows().all(|r| rr.reduce(r).1.iter().all(|&x| x == 0)))
    }

    pub fn same_row_space(&self, other: &Mat) -> Result<bool> {
        Ok(self.spans(other)? && other.spans(self)?)
    }

    /// `mat <rows> <cols> gf2m m=<m> poly=0x<hex>` followed by one row per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("mat {} {} {}\n", self.rows, self.cols, self.field.spec());
        for row in self.iter_rows() {
            let line: Vec<String> = row.iter().map(|x| format!("{x:x}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parse the text format; lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Mat> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) =
            lines.next().ok_or(Error::Parse { line: 0, msg: "empty matrix text".into() })?;
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut parts = header.splitn(4, ' ');
        if parts.next() != Some("mat") {
            return Err(perr(hline, "expected `mat` header".into()));
        }
        let rows: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| perr(hline, "bad row count".into()))?;
        let cols: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| perr(hline, "bad column count".into()))?;
        let spec: FieldSpec = parts
            .next()
            .ok_or_else(|| perr(hline, "missing field".into()))?
            .parse()
            .map_err(|e: Error| perr(hline, e.to_string()))?;
        let field = crate::field::make_field(spec.m())?;
        let mut m = Mat::zeros(field, 0, cols);
        for (ln, line) in lines.by_ref().take(rows) {
            let row: Vec<u16> = line
                .split_whitespace()
                .map(|t| u16::from_str_radix(t, 16))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| perr(ln, e.to_string()))?;
            m.push_row(&row).map_err(|e| perr(ln, e.to_string()))?;
        }
        if m.rows != rows {
            return Err(perr(hline, format!("expected {rows} rows, found {}", m.rows)));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "trailing data after matrix".into()));
        }
        Ok(m)
    }
}
