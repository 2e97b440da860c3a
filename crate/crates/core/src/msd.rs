//! Magic-state distillation: resource estimates and a Monte Carlo of the
//! logical error after one round of transversal CCZ plus decoding.
//!
//! Noise model: i.i.d. X and Z flips at rate p on every qubit of the three
//! code blocks. Each block and each error type is decoded by a minimum-weight
//! coset leader.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::linalg::{BitMat, BitVec};
use crate::qubitize::QubitCssCode;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeFamily {
    pub rate: f64,
    pub delta: f64,
    /// Suppression constant in eps = exp(-c D).
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsdPlan {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "D")]
    pub d: u64,
    pub target_eps: f64,
    pub blocks: u32,
    /// Noisy states consumed per block.
    pub noisy_states: u64,
    pub expected_yield: u64,
    /// Relative distance D/N; the input noise rate must sit well below it.
    pub input_noise_bound: f64,
    /// 3 / rate, the family-level overhead per output state.
    pub overhead: f64,
    /// 3N/K for this instance.
    pub realized_overhead: f64,
}

pub fn estimate(family: CodeFamily, eps: f64) -> Result<MsdPlan> {
    let CodeFamily { rate, delta, c } = family;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} not in (0, 1)")));
    }
    if !(rate > 0.0 && rate <= 1.0) || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("rate = {rate} and delta = {delta} must lie in (0, 1]")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    let n = ((1.0 / eps).ln() / (c * delta)).ceil() as u64;
    let k = (rate * n as f64).floor() as u64;
    let d = (delta * n as f64).floor() as u64;
    if k == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!("N = {n} too small for K and D to be positive")));
    }
    Ok(MsdPlan {
        n,
        k,
        d,
        target_eps: eps,
        blocks: 3,
        noisy_states: n,
        expected_yield: k,
        input_noise_bound: d as f64 / n as f64,
        overhead: 3.0 / rate,
        realized_overhead: 3.0 * n as f64 / k as f64,
    })
}

/// 95% Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (nf, phat) = (n as f64, k as f64 / n as f64);
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (phat + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug)]
enum Strategy {
    /// Breadth-first syndrome table: `via[s]` is the last column on a
    /// shortest path to syndrome s.
    Table { checks: BitMat, cols: Vec<u64>, via: Vec<u32> },
    /// Minimum over e + ker(checks).
    Coset { kernel: Vec<BitVec> },
}

/// Minimum-weight decoder for one error type.
#[derive(Clone, Debug)]
pub struct SectorDecoder {
    n: usize,
    strategy: Strategy,
    /// Logical operators of the opposite type; a residual that pairs
    /// nontrivially with any of them is a logical error.
    logicals: BitMat,
}

/// Largest syndrome table or coset enumeration built by the decoder.
const MAX_LOG_WORK: usize = 24;

impl SectorDecoder {
    pub fn new(checks: &BitMat, logicals: &BitMat, budget: u64) -> Result<Self> {
        let n = checks.cols();
        let checks = checks.row_basis();
        let r = checks.rows();
        let kernel_dim = n - r;
        let affordable = |d: usize| d <= MAX_LOG_WORK && (1u64 << d) <= budget;
        let strategy = if r <= kernel_dim && affordable(r) {
            Self::table(checks)
        } else if affordable(kernel_dim) {
            Strategy::Coset { kernel: checks.nullspace().iter_rows().cloned().collect() }
        } else {
            return Err(Error::BudgetExceeded(format!(
                "decoder needs 2^{} work (syndrome rank {r}, kernel dimension {kernel_dim})",
                r.min(kernel_dim)
            )));
        };
        Ok(Self { n, strategy, logicals: logicals.clone() })
    }

    fn table(checks: BitMat) -> Strategy {
        let (r, n) = (checks.rows(), checks.cols());
        let cols: Vec<u64> = (0..n)
            .map(|j| (0..r).fold(0u64, |a, i| a | (checks.get(i, j) as u64) << i))
            .collect();
        let mut via = vec![u32::MAX; 1 << r];
        let mut frontier = vec![0u64];
        let mut seen = vec![false; 1 << r];
        seen[0] = true;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &s in &frontier {
                for (j, &c) in cols.iter().enumerate() {
                    let t = (s ^ c) as usize;
                    if !seen[t] {
                        seen[t] = true;
                        via[t] = j as u32;
                        next.push(t as u64);
                    }
                }
            }
            frontier = next;
        }
        Strategy::Table { checks, cols, via }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// A minimum-weight error with the same syndrome as `e`.
    pub fn correction(&self, e: &BitVec) -> BitVec {
        match &self.strategy {
            Strategy::Table { checks, cols, via } => {
                let mut s = checks.apply(e).words().first().copied().unwrap_or(0);
                let mut out = BitVec::zeros(self.n);
                while s != 0 {
                    let j = via[s as usize] as usize;
                    out.flip(j);
                    s ^= cols[j];
                }
                out
            }
            Strategy::Coset { kernel } => {
                let mut cur = e.clone();
                let mut best = (cur.weight(), cur.clone());
                for i in 1u64..1 << kernel.len() {
                    cur.xor_assign(&kernel[i.trailing_zeros() as usize]);
                    let w = cur.weight();
                    if w < best.0 {
                        best = (w, cur.clone());
                    }
                }
                best.1
            }
        }
    }

    /// Whether decoding `e` leaves a logical error.
    pub fn fails(&self, e: &BitVec) -> bool {
        let mut residual = self.correction(e);
        residual.xor_assign(e);
        !self.logicals.apply(&residual).is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct Decoder {
    /// Corrects X flips using the Z stabilizers.
    pub x: SectorDecoder,
    /// Corrects Z flips using the X stabilizers.
    pub z: SectorDecoder,
}

impl Decoder {
    pub fn new(code: &QubitCssCode, budget: u64) -> Result<Self> {
        Ok(Self {
            x: SectorDecoder::new(&code.z_stab, &code.logical_z, budget)?,
            z: SectorDecoder::new(&code.x_stab, &code.logical_x, budget)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sectors {
    Both,
    XOnly,
    ZOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub sectors: Sectors,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub sectors: Sectors,
    pub failures: u64,
    pub x_failures: u64,
    pub z_failures: u64,
    pub logical_error_rate: f64,
    pub ci: (f64, f64),
}

pub fn simulate(code: &QubitCssCode, cfg: &SimConfig, budget: u64) -> Result<SimResult> {
    simulate_with(code, cfg, budget, Exec::default())
}

/// Trial t draws from `ChaCha8Rng::seed_from_u64(seed)` on stream t: for each
/// of the three blocks, n uniforms for X flips then n for Z flips. A qubit is
/// flipped when its uniform is below p, so runs at different p with the same
/// seed are coupled.
pub fn simulate_with(code: &QubitCssCode, cfg: &SimConfig, budget: u64, exec: Exec) -> Result<SimResult> {
    if !(0.0..=1.0).contains(&cfg.p) {
        return Err(Error::InvalidParameter(format!("p = {} not in [0, 1]", cfg.p)));
    }
    let dec = Decoder::new(code, budget)?;
    let n = code.n;
    let (do_x, do_z) = match cfg.sectors {
        Sectors::Both => (true, true),
        Sectors::XOnly => (true, false),
        Sectors::ZOnly => (false, true),
    };
    let zero = (0u64, 0u64, 0u64);
    let (failures, x_failures, z_failures) = exec::map_reduce(
        exec,
        0..cfg.trials,
        1024,
        |range| {
            let mut acc = zero;
            for t in range {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(t);
                let (mut fx, mut fz) = (false, false);
                for _ in 0..3 {
                    let mut ex = BitVec::zeros(n);
                    let mut ez = BitVec::zeros(n);
                    for i in 0..n {
                        if rng.gen::<f64>() < cfg.p {
                            ex.set(i, true);
                        }
                    }
                    for i in 0..n {
                        if rng.gen::<f64>() < cfg.p {
                            ez.set(i, true);
                        }
                    }
                    fx |= do_x && !ex.is_zero() && dec.x.fails(&ex);
                    fz |= do_z && !ez.is_zero() && dec.z.fails(&ez);
                }
                acc.0 += (fx || fz) as u64;
                acc.1 += fx as u64;
                acc.2 += fz as u64;
            }
            acc
        },
        zero,
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
    );
    Ok(SimResult {
        p: cfg.p,
        trials: cfg.trials,
        seed: cfg.seed,
        sectors: cfg.sectors,
        failures,
        x_failures,
        z_failures,
        logical_error_rate: if cfg.trials == 0 { 0.0 } else { failures as f64 / cfg.trials as f64 },
        ci: wilson_interval(failures, cfg.trials),
    })
}
