use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ccz_codes::codes::{hermitian_code, min_distance_with, rs_code};
use ccz_codes::css::build_css;
use ccz_codes::msd::{simulate_with, Sectors, SimConfig};
use ccz_codes::qubitize::{run_pipeline, verify_schedule_with, RmfeMode};
use ccz_codes::transversal::{ccz_spec, verify_transversal_with, Mode};
use ccz_codes::{make_field, Exec, DEFAULT_BUDGET};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn distance(c: &mut Criterion) {
    let rs = rs_code(make_field(4).unwrap(), 5).unwrap();
    let mut g = c.benchmark_group("min_distance rs(16,5)");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| min_distance_with(black_box(&rs), DEFAULT_BUDGET, exec))
        });
    }
    g.finish();
}

fn transversal(c: &mut Criterion) {
    let q = build_css(&hermitian_code(2, 2).unwrap(), 1, DEFAULT_BUDGET).unwrap();
    let spec = ccz_spec(q.field);
    let mut g = c.benchmark_group("verify_transversal hermitian");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| verify_transversal_with(black_box(&q), &spec, Mode::Exhaustive, DEFAULT_BUDGET, exec).unwrap())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let rs = rs_code(make_field(4).unwrap(), 5).unwrap();
    let p = run_pipeline(&rs, 2, &RmfeMode::Trivial, 1 << 12).unwrap();
    let mode = Mode::Sampled { trials: 2000, seed: 1 };
    let mut g = c.benchmark_group("verify_schedule rs [[896,2]]");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| verify_schedule_with(black_box(&p.q3), &p.schedule, mode, DEFAULT_BUDGET, exec).unwrap())
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let p = run_pipeline(&hermitian_code(2, 2).unwrap(), 1, &RmfeMode::Trivial, DEFAULT_BUDGET).unwrap();
    let cfg = SimConfig { p: 0.05, trials: 20_000, seed: 1, sectors: Sectors::Both };
    let mut g = c.benchmark_group("msd simulate hermitian");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| simulate_with(black_box(&p.q3), &cfg, DEFAULT_BUDGET, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, distance, transversal, pipeline, monte_carlo);
criterion_main!(benches);
