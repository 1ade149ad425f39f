use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mahlercm::beilinson::{curve_from_k, deninger_path, fundamental_periods, path_integral_omega, Chart, QuadFieldElem};
use mahlercm::cmsearch::{algorithm1_with, SearchOptions};
use mahlercm::lvalues::{f64_form, lvalue2, LOptions};
use mahlercm::mahler::{mahler_jensen, mahler_lattice, LatticeStrategy};
use mahlercm::modular::{eta_numeric, lambda2};
use mahlercm::numerics::integer_relation;
use mahlercm::qseries::{eta_quotient_expansion, EtaQuotient};
use mahlercm::{kexpr, BigComplex};
use mahlercm_bench::sample_points;
use rug::Float;

fn modular(c: &mut Criterion) {
    let mut g = c.benchmark_group("modular");
    for prec in [128u32, 256, 512] {
        let (_, tau) = sample_points(prec).remove(0);
        g.bench_with_input(BenchmarkId::new("eta", prec), &tau, |b, t| b.iter(|| eta_numeric(black_box(t))));
        g.bench_with_input(BenchmarkId::new("lambda2", prec), &tau, |b, t| b.iter(|| lambda2(black_box(t))));
    }
    g.finish();
}

fn series(c: &mut Criterion) {
    let eq = EtaQuotient::new(&[(8, 8), (4, -2), (16, -2)]).unwrap();
    let mut g = c.benchmark_group("qseries");
    for n in [1000usize, 10000] {
        g.bench_with_input(BenchmarkId::new("f64_expansion", n), &n, |b, &n| b.iter(|| eta_quotient_expansion(&eq, n)));
    }
    g.finish();
}

fn mahler(c: &mut Criterion) {
    let mut g = c.benchmark_group("mahler");
    g.sample_size(10);
    let p = 256;
    let k = kexpr::parse("4*sqrt(2)", p).unwrap();
    let eps = Float::with_val(p, 1e-30);
    g.bench_function("jensen_256", |b| b.iter(|| mahler_jensen(black_box(&k), &eps)));
    for (f, tau) in sample_points(p) {
        g.bench_with_input(BenchmarkId::new("lattice_accelerated", f.to_string()), &tau, |b, t| {
            b.iter(|| mahler_lattice(t, &eps, LatticeStrategy::Accelerated))
        });
    }
    let loose = Float::with_val(p, 1e-6);
    let (_, tau) = sample_points(p).remove(1);
    g.bench_function("lattice_direct_1e-6", |b| b.iter(|| mahler_lattice(&tau, &loose, LatticeStrategy::Direct)));
    g.finish();
}

fn lvalues(c: &mut Criterion) {
    let mut g = c.benchmark_group("lvalues");
    g.sample_size(10);
    let form = f64_form();
    for eps in [1e-10, 1e-20] {
        g.bench_with_input(BenchmarkId::new("f64", eps), &eps, |b, &e| {
            b.iter(|| lvalue2(&form, e, &LOptions::auto()))
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("cmsearch");
    g.sample_size(10);
    let opts = SearchOptions { emit_prec: 128, ..Default::default() };
    g.bench_function("algorithm1_128", |b| b.iter(|| algorithm1_with(&opts)));
    let x = BigComplex::from_real(Float::with_val(512, 2).sqrt() + 1u32).with_prec(512);
    g.bench_function("integer_relation_deg4", |b| b.iter(|| integer_relation(&x, 4, 32)));
    g.finish();
}

fn periods(c: &mut Criterion) {
    let mut g = c.benchmark_group("beilinson");
    g.sample_size(10);
    let p = 256;
    let k = kexpr::parse("12+8*sqrt(2)", p).unwrap().re;
    let path = deninger_path(&k, Chart::Plain).unwrap();
    let eps = Float::with_val(p, 1e-30);
    g.bench_function("omega_integral", |b| b.iter(|| path_integral_omega(&path, &eps)));
    // k² = 272 + 192√2
    let k2 = QuadFieldElem::ints(2, 272, 192);
    let curve = curve_from_k(&k2, Chart::Plain).numeric(p);
    g.bench_function("fundamental_periods", |b| b.iter(|| fundamental_periods(black_box(&curve))));
    g.finish();
}

criterion_group!(benches, modular, series, mahler, lvalues, search, periods);
criterion_main!(benches);
