use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use specbox::exec::Exec;
use specbox::inclusion::{gamma_fin, grid_points, mu_grid, GridSpec, InclusionMethod, IndexFamily, SectionFamily};
use specbox::operator::OperatorSpec;
use specbox::oracle::periodic_spectrum;
use specbox::penalty::eps_tau1;
use specbox::C64;

fn three_periodic() -> OperatorSpec {
    let c = |x: f64| C64::new(x, 0.0);
    OperatorSpec::periodic(&[c(0.0)], &[c(-1.5), c(1.0), c(1.0)], &[c(1.0), c(2.0), c(1.0)]).unwrap()
}

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn bench_mu_grid(c: &mut Criterion) {
    let op = three_periodic();
    let family = IndexFamily::ExplicitK(vec![0, 1, 2]);
    let mut group = c.benchmark_group("mu_grid");
    group.sample_size(10);
    for n in [8usize, 32] {
        let fam = SectionFamily::build(&op, InclusionMethod::Tau1, n, &family).unwrap();
        let points = grid_points(&GridSpec::new(16, op.norm_bound()).unwrap());
        let eps = eps_tau1(n, op.alpha_max, op.gamma_max);
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| mu_grid(&fam, &points, eps, exec))
            });
        }
    }
    group.finish();
}

fn bench_gamma_fin(c: &mut Criterion) {
    let op = three_periodic();
    let family = IndexFamily::ExplicitK(vec![0, 1, 2]);
    let mut group = c.benchmark_group("gamma_fin");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::new(name, 16), |b| {
            b.iter(|| gamma_fin(&op, 16, &family, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_periodic_spectrum(c: &mut Criterion) {
    let op = three_periodic();
    let mut group = c.benchmark_group("periodic_spectrum");
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::new(name, 512), |b| {
            b.iter(|| periodic_spectrum(&op, 512, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mu_grid, bench_gamma_fin, bench_periodic_spectrum);
criterion_main!(benches);
