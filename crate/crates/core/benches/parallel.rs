use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use padic_hecke::arith::{int, rat};
use padic_hecke::cm::{class_number_formula, class_number_forms, is_discriminant};
use padic_hecke::kite::{kite_top, tau_m_closed};
use padic_hecke::orbit::tate_sweep;
use padic_hecke::Exec;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn class_numbers(c: &mut Criterion) {
    let discs: Vec<i64> = (3..=6000i64).map(|n| -n).filter(|&d| is_discriminant(d)).collect();
    let mut g = c.benchmark_group("class_number_sweep");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map(&discs, |&d| class_number_formula(d).unwrap() == class_number_forms(d).unwrap()))
        });
    }
    g.finish();
}

fn kite_grid(c: &mut Criterion) {
    let grid: Vec<(u64, u32, i64)> = [2u64, 3, 5, 7]
        .into_iter()
        .flat_map(|p| (0..=10u32).flat_map(move |m| (1..=40i64).map(move |i| (p, m, i))))
        .collect();
    let mut g = c.benchmark_group("kite_grid");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map(&grid, |&(p, m, i)| tau_m_closed(p, m, &(kite_top(p) * rat(i, 40))).unwrap().len()))
        });
    }
    g.finish();
}

fn tate(c: &mut Criterion) {
    let ns: Vec<u64> = (1..=20_000).collect();
    let one = int(1);
    let mut g = c.benchmark_group("tate_sweep");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(tate_sweep(&one, &one, &ns, exec).unwrap().len()))
        });
    }
    g.finish();
}

criterion_group!(benches, class_numbers, kite_grid, tate);
criterion_main!(benches);
