use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use fokas_bench::gaussian;
use fokas_core::direct::spectral_ab;
use fokas_core::pipeline::{solve_grid, spectral_table};
use fokas_core::rhp::SolverOptions;
use fokas_core::spectral::{ResidueData, RhpFamily};
use fokas_core::{evolve, IntegratorOptions, InitialData, OracleParams, SampledInitial, C64};

fn direct(c: &mut Criterion) {
    let data = SampledInitial::new(&gaussian(0.05, 0.05));
    let opts = IntegratorOptions::default();
    let mut g = c.benchmark_group("spectral_ab");
    for r in [0.5, 2.0, 5.0] {
        let l = C64::new(r, 0.0);
        g.bench_function(format!("real_axis_r{r}"), |b| b.iter(|| spectral_ab(&data, black_box(l), &opts).unwrap()));
    }
    g.finish();
}

fn rhp(c: &mut Criterion) {
    let data = SampledInitial::new(&gaussian(0.05, 0.05));
    let table = spectral_table(Some(&data as &dyn InitialData), None, 3.0, 32, &IntegratorOptions::default()).unwrap();
    let opts = SolverOptions::default();
    let none = ResidueData::default();
    c.bench_function("x_rhp_solve_one_point", |b| {
        b.iter(|| solve_grid(&table, RhpFamily::X, (0.1, 1), (1.0, 1), &none, &opts).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let u0 = gaussian(0.05, 0.05);
    let p = OracleParams {
        x_max: 10.0,
        x_left: 20.0,
        store_every: 100,
        ..OracleParams::default()
    };
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("linearized_1000_steps", |b| b.iter(|| evolve(&u0, 0.1, &p).unwrap()));
    g.finish();
}

criterion_group!(benches, direct, rhp, oracle);
criterion_main!(benches);
