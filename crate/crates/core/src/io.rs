//! File formats shared by the library and the CLI.
//!
//! * Matrices and codes use the text format of [`crate::linalg`].
//! * Gate specs are JSON: `{monomials: [{e: [1,1,1], coeff: "0x1"}], f_mask: "0x3", basis: "polynomial"}`.
//! * A CSS directory holds `h1.mat`, `h0.mat` and `css.json`.
//! * A pipeline directory holds `x_stab.mat`, `z_stab.mat`, `logical_x.mat`,
//!   `logical_z.mat`, `embeddings.json` and `schedule.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::css::{CssSummary, QuditCssCode};
use crate::embed::{find_self_dual_basis, Mfe, Rmfe};
use crate::error::{Error, Result};
use crate::field::{BasisKind, Field, FieldBasis};
use crate::linalg::{BitMat, Mat};
use crate::qubitize::{CczSchedule, PipelineResult, QubitCssCode, TripleProvenance};
use crate::transversal::{Monomial, PhaseGateSpec};

pub fn hex(v: u64) -> String {
    format!("{v:#x}")
}

pub fn parse_hex(s: &str) -> Result<u64> {
    let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    u64::from_str_radix(digits, 16).map_err(|_| Error::Parse { line: 0, msg: format!("bad hex value {s:?}") })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialJson {
    pub e: [u8; 3],
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateJson {
    pub monomials: Vec<MonomialJson>,
    pub f_mask: String,
    /// `polynomial` or `selfdual`.
    pub basis: String,
}

pub fn basis_by_name(field: Field, name: &str) -> Result<FieldBasis> {
    match name {
        "polynomial" => Ok(FieldBasis::polynomial(field)),
        "selfdual" => Ok(find_self_dual_basis(field.m())?.basis().clone()),
        other => Err(Error::InvalidParameter(format!("unknown basis {other:?}"))),
    }
}

pub fn gate_from_json(text: &str, field: Field) -> Result<PhaseGateSpec> {
    let g: GateJson = serde_json::from_str(text)?;
    let monomials = g
        .monomials
        .iter()
        .map(|m| {
            let coeff = parse_hex(&m.coeff)?;
            let coeff = u16::try_from(coeff).map_err(|_| Error::ElementOutOfRange { bits: u32::MAX, m: field.m() })?;
            Ok(Monomial { e: m.e, coeff })
        })
        .collect::<Result<Vec<_>>>()?;
    let f_mask = u32::try_from(parse_hex(&g.f_mask)?)
        .map_err(|_| Error::InvalidParameter(format!("f mask {} too wide", g.f_mask)))?;
    PhaseGateSpec::new(field, monomials, f_mask, basis_by_name(field, &g.basis)?)
}

pub fn gate_to_json(spec: &PhaseGateSpec) -> GateJson {
    GateJson {
        monomials: spec
            .monomials()
            .iter()
            .map(|m| MonomialJson { e: m.e, coeff: hex(m.coeff as u64) })
            .collect(),
        f_mask: hex(spec.f_mask() as u64),
        basis: match spec.basis().kind() {
            BasisKind::SelfDual => "selfdual".into(),
            _ => "polynomial".into(),
        },
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_mat(path: &Path) -> Result<Mat> {
    Mat::from_text(&read(path)?)
}

pub fn read_bitmat(path: &Path) -> Result<BitMat> {
    BitMat::from_text(&read(path)?)
}

pub fn write_css_dir(dir: &Path, q: &QuditCssCode) -> Result<()> {
    fs::create_dir_all(dir)?;
    write(&dir.join("h1.mat"), &q.h1.to_text())?;
    write(&dir.join("h0.mat"), &q.h0.to_text())?;
    write(&dir.join("css.json"), &(serde_json::to_string_pretty(&q.summary())? + "\n"))
}

/// Rebuilds the code from `h1.mat` and `h0.mat`; `css.json`, when present,
/// restores the column permutation, source label and dx bound.
pub fn read_css_dir(dir: &Path, budget: u64) -> Result<QuditCssCode> {
    let h1 = read_mat(&dir.join("h1.mat"))?;
    let h0 = read_mat(&dir.join("h0.mat"))?;
    let meta = dir.join("css.json");
    let summary: Option<CssSummary> = if meta.exists() { Some(serde_json::from_str(&read(&meta)?)?) } else { None };
    let source = summary.as_ref().map_or_else(|| dir.display().to_string(), |s| s.source.clone());
    let mut q = QuditCssCode::from_blocks(h1, h0, &source, budget)?;
    if let Some(s) = summary {
        if s.col_perm.len() == q.n + q.k {
            q.col_perm = s.col_perm;
        }
        q.dx_bound = s.dx_bound;
    }
    Ok(q)
}

/// Contents of `schedule.json`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleFile {
    /// Qubit numbering inside each block.
    pub layout: String,
    pub r: usize,
    #[serde(rename = "N3")]
    pub n3: usize,
    #[serde(rename = "K3")]
    pub k3: usize,
    pub mask: Vec<u8>,
    pub triples: Vec<[usize; 3]>,
    pub provenance: Vec<TripleProvenance>,
}

impl ScheduleFile {
    pub fn new(result: &PipelineResult) -> Self {
        Self {
            layout: "qubit = register * r + slot".into(),
            r: result.params.r,
            n3: result.params.n3,
            k3: result.params.k3,
            mask: result.schedule.mask.clone(),
            triples: result.schedule.triples.clone(),
            provenance: result.schedule.provenance.clone(),
        }
    }

    pub fn schedule(&self) -> CczSchedule {
        CczSchedule { triples: self.triples.clone(), provenance: self.provenance.clone(), mask: self.mask.clone() }
    }
}

/// Embedding maps as hex rows (bit i of a row is column i).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingsFile {
    pub self_dual_basis: Vec<String>,
    pub rmfe: RmfeJson,
    pub mfe: MfeJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RmfeJson {
    pub s: usize,
    pub m: usize,
    pub phi: Vec<String>,
    pub psi: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MfeJson {
    pub m: usize,
    pub r: usize,
    pub sigma: Vec<String>,
    pub psi: Vec<String>,
    pub pi2: Vec<usize>,
    pub pi3: Vec<usize>,
}

fn hex_rows(m: &BitMat) -> Vec<String> {
    m.iter_rows()
        .map(|r| {
            let w = r.words();
            // Rows wider than 64 bits are written most significant word first.
            let mut s = String::from("0x");
            let mut started = false;
            for &word in w.iter().rev() {
                if started {
                    s.push_str(&format!("{word:016x}"));
                } else if word != 0 {
                    s.push_str(&format!("{word:x}"));
                    started = true;
                }
            }
            if !started {
                s.push('0');
            }
            s
        })
        .collect()
}

impl EmbeddingsFile {
    pub fn new(sdb: &[u16], rmfe: &Rmfe, mfe: &Mfe) -> Self {
        Self {
            self_dual_basis: sdb.iter().map(|&a| hex(a as u64)).collect(),
            rmfe: RmfeJson { s: rmfe.s, m: rmfe.m, phi: hex_rows(&rmfe.phi), psi: hex_rows(&rmfe.psi) },
            mfe: MfeJson {
                m: mfe.m,
                r: mfe.r,
                sigma: hex_rows(&mfe.sigma),
                psi: hex_rows(&mfe.psi),
                pi2: mfe.pi2.clone(),
                pi3: mfe.pi3.clone(),
            },
        }
    }
}

pub fn write_pipeline_dir(dir: &Path, result: &PipelineResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    let q = &result.q3;
    write(&dir.join("x_stab.mat"), &q.x_stab.to_text())?;
    write(&dir.join("z_stab.mat"), &q.z_stab.to_text())?;
    write(&dir.join("logical_x.mat"), &q.logical_x.to_text())?;
    write(&dir.join("logical_z.mat"), &q.logical_z.to_text())?;
    let emb = EmbeddingsFile::new(result.sdb.basis().elements(), &result.rmfe, &result.mfe);
    write(&dir.join("embeddings.json"), &(serde_json::to_string_pretty(&emb)? + "\n"))?;
    let sched = ScheduleFile::new(result);
    write(&dir.join("schedule.json"), &(serde_json::to_string(&sched)? + "\n"))
}

pub fn read_qubit_code(dir: &Path) -> Result<QubitCssCode> {
    QubitCssCode::new(
        read_bitmat(&dir.join("x_stab.mat"))?,
        read_bitmat(&dir.join("z_stab.mat"))?,
        read_bitmat(&dir.join("logical_x.mat"))?,
        read_bitmat(&dir.join("logical_z.mat"))?,
        dir.display().to_string(),
    )
}

pub fn read_schedule(dir: &Path) -> Result<ScheduleFile> {
    Ok(serde_json::from_str(&read(&dir.join("schedule.json"))?)?)
}
