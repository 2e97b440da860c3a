//! `ccz`: command-line front end for the ccz-codes library.
//!
//! Exit codes: 0 all checks pass, 1 a verification produced a counterexample,
//! 2 usage or input error, 3 work budget exceeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ccz_codes::codes::{self, ag_param_bounds, hermitian_genus, Distance, LinearCode};
use ccz_codes::css::build_css;
use ccz_codes::embed::find_self_dual_basis;
use ccz_codes::io;
use ccz_codes::msd::{self, CodeFamily, Sectors, SimConfig};
use ccz_codes::qubitize::{self, RmfeMode};
use ccz_codes::transversal::{self, ccz_spec, Mode};
use ccz_codes::{make_field, Error, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "ccz", version, about = "Quantum CSS codes with transversal CCZ")]
struct Cli {
    /// Print the full JSON report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Leave timings out of the report so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timings: bool,
    /// Work budget for exhaustive enumerations.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Finite field data.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Classical codes.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Qudit CSS codes.
    #[command(subcommand)]
    Css(CssCmd),
    /// Transversal phase gates.
    #[command(subcommand)]
    Transversal(TransversalCmd),
    /// Qudit-to-qubit pipeline.
    #[command(subcommand)]
    Qubitize(QubitizeCmd),
    /// CCZ schedules.
    #[command(subcommand)]
    Schedule(ScheduleCmd),
    /// Distillation estimates and simulation.
    #[command(subcommand)]
    Msd(MsdCmd),
}

#[derive(Subcommand)]
enum FieldCmd {
    Info {
        #[arg(long)]
        m: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Rs,
    Hermitian,
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Build a Reed-Solomon or one-point Hermitian code.
    Build {
        #[arg(long, value_enum)]
        family: Family,
        /// Extension degree (rs).
        #[arg(long)]
        m: Option<u32>,
        /// Dimension (rs).
        #[arg(long)]
        k: Option<usize>,
        /// Curve parameter q0 (hermitian).
        #[arg(long)]
        q0: Option<u32>,
        /// Pole order bound (hermitian).
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the multiplication property.
    Check {
        #[arg(long)]
        code: PathBuf,
        /// Star power t in C^{*t} within the dual.
        #[arg(long, default_value_t = 2)]
        t: usize,
    },
    /// Minimum distance.
    Distance {
        #[arg(long)]
        code: PathBuf,
    },
}

#[derive(Subcommand)]
enum CssCmd {
    Build {
        #[arg(long)]
        code: PathBuf,
        #[arg(long = "K")]
        k_log: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TransversalCmd {
    Verify {
        #[arg(long)]
        css: PathBuf,
        /// `ccz` or a gate JSON file.
        #[arg(long, default_value = "ccz")]
        gate: String,
        /// `exhaustive` or `sampled:<trials>:<seed>`.
        #[arg(long, default_value = "exhaustive")]
        mode: Mode,
    },
}

#[derive(Subcommand)]
enum QubitizeCmd {
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long = "K")]
    k_log: usize,
    /// `trivial` or `search:<s>`.
    #[arg(long, default_value = "trivial")]
    rmfe: RmfeMode,
    /// Seed for RMFE search.
    #[arg(long)]
    seed: Option<u64>,
    /// Schedule check: `exhaustive` or `sampled:<trials>:<seed>`.
    #[arg(long, default_value = "exhaustive")]
    verify: Mode,
    /// Also compute exact distances of the final code.
    #[arg(long)]
    distances: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum ScheduleCmd {
    Export {
        #[arg(long)]
        pipeline: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: ExportFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SectorArg {
    Both,
    X,
    Z,
}

#[derive(Subcommand)]
enum MsdCmd {
    Estimate {
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        eps: f64,
    },
    Simulate {
        #[arg(long)]
        pipeline: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "both")]
        sectors: SectorArg,
    },
}

/// Body of a report before the common fields are attached.
#[derive(Default)]
struct Outcome {
    inputs: Vec<PathBuf>,
    params: Value,
    checks: BTreeMap<String, bool>,
    result: Value,
    seed: Option<u64>,
    /// Raw text printed instead of the summary when `--json` is off.
    text: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn digest(path: &Path) -> Result<String, Error> {
    let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

fn record(c: &LinearCode, d_bound: Option<usize>, budget: u64) -> Result<Value, Error> {
    let mult = codes::mult_property(c, 2)?;
    Ok(json!({
        "label": c.label(),
        "field": c.field().to_string(),
        "n": c.n(),
        "k": c.k(),
        "d": codes::min_distance(c, budget),
        "d_bound": d_bound,
        "mult_property": mult.holds(),
        "all_ones": codes::contains_all_ones(c),
    }))
}

fn read_code(path: &Path) -> Result<LinearCode, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    LinearCode::from_text(&text)
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let budget = cli.budget;
    match &cli.cmd {
        Cmd::Field(FieldCmd::Info { m }) => {
            let f = make_field(*m)?;
            let sdb = find_self_dual_basis(*m)?;
            let gram_ok = sdb.gram().iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &g)| g == (i == j) as u8));
            Ok(Outcome {
                params: json!({ "m": m }),
                checks: [("self_dual_gram".to_string(), gram_ok)].into(),
                result: json!({
                    "m": m,
                    "order": f.order(),
                    "modulus": io::hex(f.spec().modulus() as u64),
                    "trace_mask": io::hex(f.trace_mask() as u64),
                    "self_dual_basis": sdb.basis().elements().iter().map(|&a| io::hex(a as u64)).collect::<Vec<_>>(),
                }),
                ..Default::default()
            })
        }
        Cmd::Code(CodeCmd::Build { family, m, k, q0, s, out }) => {
            let missing = |name: &str| Error::InvalidParameter(format!("--{name} is required for this family"));
            let (c, d_bound, params) = match family {
                Family::Rs => {
                    let (m, k) = (m.ok_or_else(|| missing("m"))?, k.ok_or_else(|| missing("k"))?);
                    let c = codes::rs_code(make_field(m)?, k)?;
                    let n = c.n();
                    (c, Some(n + 1 - k), json!({ "family": "rs", "m": m, "k": k }))
                }
                Family::Hermitian => {
                    let (q0, s) = (q0.ok_or_else(|| missing("q0"))?, s.ok_or_else(|| missing("s"))?);
                    let c = codes::hermitian_code(q0, s)?;
                    let bounds = ag_param_bounds(c.n(), hermitian_genus(q0), s, 0)?;
                    (c, Some(bounds.d_bound), json!({ "family": "hermitian", "q0": q0, "s": s }))
                }
            };
            write_file(out, &c.to_text())?;
            Ok(Outcome { params, result: record(&c, d_bound, budget)?, ..Default::default() })
        }
        Cmd::Code(CodeCmd::Check { code, t }) => {
            let c = read_code(code)?;
            let report = codes::mult_property(&c, *t)?;
            let mut result = record(&c, None, budget)?;
            result["mult_report"] = to_value(&report);
            Ok(Outcome {
                inputs: vec![code.clone()],
                params: json!({ "t": t }),
                checks: [("mult_property".to_string(), report.holds())].into(),
                result,
                ..Default::default()
            })
        }
        Cmd::Code(CodeCmd::Distance { code }) => {
            let c = read_code(code)?;
            let d = codes::min_distance(&c, budget);
            if d == Distance::Exceeded {
                return Err(Error::BudgetExceeded(format!("distance of {} needs more than {budget} steps", c.label())));
            }
            Ok(Outcome {
                inputs: vec![code.clone()],
                result: json!({ "n": c.n(), "k": c.k(), "d": d }),
                ..Default::default()
            })
        }
        Cmd::Css(CssCmd::Build { code, k_log, out }) => {
            let c = read_code(code)?;
            let q = build_css(&c, *k_log, budget)?;
            io::write_css_dir(out, &q)?;
            let report = transversal::check_triple_conditions(&q.h1, &q.h0)?;
            let checks = [
                ("triple_sums".to_string(), report.triples.is_empty()),
                ("pair_sums".to_string(), report.pairs.is_empty()),
                ("row_sums".to_string(), report.singles.is_empty()),
            ]
            .into();
            Ok(Outcome {
                inputs: vec![code.clone()],
                params: json!({ "K": k_log }),
                checks,
                result: json!({
                    "N": q.n,
                    "K": q.k,
                    "dx_bound": q.dx_bound,
                    "dz": q.dz,
                    "checks": report,
                    "summary": q.summary(),
                }),
                ..Default::default()
            })
        }
        Cmd::Transversal(TransversalCmd::Verify { css, gate, mode }) => {
            let q = io::read_css_dir(css, budget)?;
            let mut inputs = vec![css.join("h1.mat"), css.join("h0.mat")];
            let spec = if gate == "ccz" {
                ccz_spec(q.field)
            } else {
                let path = PathBuf::from(gate);
                let text = fs::read_to_string(&path).map_err(|e| Error::Io(format!("{gate}: {e}")))?;
                inputs.push(path);
                io::gate_from_json(&text, q.field)?
            };
            let verdict = transversal::verify_transversal(&q, &spec, *mode, budget)?;
            Ok(Outcome {
                inputs,
                params: json!({ "gate": io::gate_to_json(&spec), "mode": mode }),
                checks: [("transversal".to_string(), verdict.passed())].into(),
                result: to_value(&verdict),
                seed: match mode {
                    Mode::Sampled { seed, .. } => Some(*seed),
                    Mode::Exhaustive => None,
                },
                ..Default::default()
            })
        }
        Cmd::Qubitize(QubitizeCmd::Run(a)) => qubitize_run(a, budget),
        Cmd::Schedule(ScheduleCmd::Export { pipeline, format }) => {
            let s = io::read_schedule(pipeline)?;
            let text = match format {
                ExportFormat::Json => serde_json::to_string(&s)? + "\n",
                ExportFormat::Csv => {
                    let mut t = String::from("a,b,c,register,slot\n");
                    for (tr, pv) in s.triples.iter().zip(&s.provenance) {
                        t.push_str(&format!("{},{},{},{},{}\n", tr[0], tr[1], tr[2], pv.register, pv.slot));
                    }
                    t
                }
            };
            Ok(Outcome {
                inputs: vec![pipeline.join("schedule.json")],
                result: json!({ "N3": s.n3, "K3": s.k3, "r": s.r, "triples": s.triples.len() }),
                text: Some(text),
                ..Default::default()
            })
        }
        Cmd::Msd(MsdCmd::Estimate { rate, delta, c, eps }) => {
            let plan = msd::estimate(CodeFamily { rate: *rate, delta: *delta, c: *c }, *eps)?;
            Ok(Outcome {
                params: json!({ "rate": rate, "delta": delta, "c": c, "eps": eps }),
                result: to_value(&plan),
                ..Default::default()
            })
        }
        Cmd::Msd(MsdCmd::Simulate { pipeline, p, trials, seed, sectors }) => {
            let q = io::read_qubit_code(pipeline)?;
            let sectors = match sectors {
                SectorArg::Both => Sectors::Both,
                SectorArg::X => Sectors::XOnly,
                SectorArg::Z => Sectors::ZOnly,
            };
            let cfg = SimConfig { p: *p, trials: *trials, seed: *seed, sectors };
            let r = msd::simulate(&q, &cfg, budget)?;
            Ok(Outcome {
                inputs: ["x_stab.mat", "z_stab.mat", "logical_x.mat", "logical_z.mat"]
                    .iter()
                    .map(|f| pipeline.join(f))
                    .collect(),
                params: json!({ "N": q.n, "K": q.k }),
                result: to_value(&r),
                seed: Some(*seed),
                ..Default::default()
            })
        }
    }
}

fn qubitize_run(a: &RunArgs, budget: u64) -> Result<Outcome, Error> {
    let c = read_code(&a.code)?;
    let mode = match (&a.rmfe, a.seed) {
        (RmfeMode::Search { s, .. }, Some(seed)) => RmfeMode::Search { s: *s, seed, budget },
        (RmfeMode::Search { .. }, None) => {
            return Err(Error::InvalidParameter("--rmfe search:<s> requires --seed".into()));
        }
        (RmfeMode::Trivial, _) => RmfeMode::Trivial,
    };
    let result = qubitize::run_pipeline(&c, a.k_log, &mode, budget)?;
    io::write_pipeline_dir(&a.out, &result)?;
    let verdict = qubitize::verify_pipeline(&result, a.verify, budget)?;
    let mut out = json!({
        "params": result.params,
        "schedule": { "triples": result.schedule.triples.len(), "mask": result.schedule.mask },
        "pipeline": verdict,
        "lineage": result.q3.lineage,
    });
    if a.distances {
        out["distances"] = to_value(&qubitize::q3_distance(&result, budget));
    }
    let seed = match a.verify {
        Mode::Sampled { seed, .. } => Some(seed),
        Mode::Exhaustive => a.seed,
    };
    Ok(Outcome {
        inputs: vec![a.code.clone()],
        params: json!({
            "K": a.k_log,
            "rmfe": match mode {
                RmfeMode::Trivial => "trivial".to_string(),
                RmfeMode::Search { s, .. } => format!("search:{s}"),
            },
            "verify": a.verify,
        }),
        checks: [("pipeline".to_string(), verdict.passed())].into(),
        result: out,
        seed,
        ..Default::default()
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Hypothesis { .. } => 1,
        Error::BudgetExceeded(_) => 3,
        _ => 2,
    }
}

fn summary(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                summary(x, &key, out);
            }
        }
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let outcome = run(&cli).and_then(|o| {
        let digests = o
            .inputs
            .iter()
            .map(|p| Ok((p.display().to_string(), digest(p)?)))
            .collect::<Result<BTreeMap<_, _>, Error>>()?;
        Ok((o, digests))
    });
    let (mut report, code, text) = match outcome {
        Ok((o, digests)) => {
            let code = if o.checks.values().all(|&b| b) { 0 } else { 1 };
            (
                json!({
                    "command": argv,
                    "inputs": digests,
                    "params": o.params,
                    "checks": o.checks,
                    "result": o.result,
                    "seed": o.seed,
                }),
                code,
                o.text,
            )
        }
        Err(e) => {
            let mut err = json!({ "command": argv, "error": e.to_string() });
            if let Error::Hypothesis { identity, detail } = &e {
                err["witness"] = json!({ "identity": identity, "detail": detail });
            }
            (err, exit_code(&e), None)
        }
    };
    if !cli.no_timings {
        report["timings"] = json!({ "total_ms": started.elapsed().as_secs_f64() * 1e3 });
    }
    let rendered = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    if code == 0 || code == 1 {
        if let Cmd::Qubitize(QubitizeCmd::Run(a)) = &cli.cmd {
            if let Err(e) = write_file(&a.out.join("report.json"), &rendered) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    if cli.json {
        print!("{rendered}");
    } else if let Some(t) = text {
        print!("{t}");
    } else if let Some(e) = report.get("error") {
        eprintln!("error: {}", e.as_str().unwrap_or_default());
        if let Some(w) = report.get("witness") {
            println!("{w}");
        }
    } else if code == 1 {
        println!("{}", report["result"]);
    } else {
        let mut s = String::new();
        summary(&report["checks"], "check", &mut s);
        summary(&report["result"], "", &mut s);
        print!("{s}");
    }
    ExitCode::from(code)
}
