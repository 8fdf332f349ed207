use std::hint::black_box;

use chrono::{Duration, NaiveDate};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mfdfa::{
    evolve_spectra, fluctuation_function, gen_binomial_cascade, gen_gaussian_noise,
    integrate_profile, plan_windows, shuffle_test_series, AnalysisSettings, CascadeSpec, DayLabel,
    Execution, FluctuationOptions, NoiseSpec, ReturnSeries, ShuffleSettings,
};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn fluctuation(c: &mut Criterion) {
    let x = gen_binomial_cascade(&CascadeSpec { multiplier: 0.65, levels: 14, seed: 1 }).unwrap();
    let profile = integrate_profile(&x).unwrap();
    let base = AnalysisSettings::default();
    let scales = base.scale_grid(x.len()).unwrap();
    let qs = base.q_grid().unwrap();
    let mut group = c.benchmark_group("fluctuation_function");
    for (name, execution) in MODES {
        let opts = FluctuationOptions { execution, ..Default::default() };
        group.bench_function(BenchmarkId::new(name, x.len()), |b| {
            b.iter(|| fluctuation_function(black_box(&profile), &scales, &qs, &opts).unwrap())
        });
    }
    group.finish();
}

fn shuffle_test(c: &mut Criterion) {
    let x = gen_binomial_cascade(&CascadeSpec { multiplier: 0.7, levels: 12, seed: 2 }).unwrap();
    let shuffle = ShuffleSettings { repetitions: 8, transposition_factor: 100, seed: 42 };
    let mut group = c.benchmark_group("shuffle_test");
    group.sample_size(10);
    for (name, execution) in MODES {
        let settings = AnalysisSettings { execution, ..Default::default() };
        group.bench_function(BenchmarkId::new(name, shuffle.repetitions), |b| {
            b.iter(|| shuffle_test_series(DayLabel::All, black_box(&x), &settings, &shuffle).unwrap())
        });
    }
    group.finish();
}

fn evolve(c: &mut Criterion) {
    let returns = gen_gaussian_noise(&NoiseSpec { len: 3000, hurst: 0.5, seed: 3 }).unwrap();
    let start = NaiveDate::from_ymd_opt(1960, 1, 4).unwrap();
    let dates = (0..returns.len()).map(|i| start + Duration::weeks(i as i64)).collect();
    let series = ReturnSeries { dates, returns };
    let plan = plan_windows(series.len(), 730, 50).unwrap();
    let mut group = c.benchmark_group("evolve_spectra");
    group.sample_size(10);
    for (name, execution) in MODES {
        let settings = AnalysisSettings { execution, ..Default::default() };
        group.bench_function(BenchmarkId::new(name, plan.count), |b| {
            b.iter(|| evolve_spectra(black_box(&series), &plan, &settings, false).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fluctuation, shuffle_test, evolve);
criterion_main!(benches);
