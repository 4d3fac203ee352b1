use criterion::{black_box, criterion_group, criterion_main, Criterion};
use raman_memory::analytics::{crosstalk_exact, CrosstalkSpec};
use raman_memory::dynamics::MemoryDesign;
use raman_memory::ensemble::{dirichlet, integrate_full, oracle_substeps, AtomEnsemble};

fn collective(c: &mut Criterion) {
    let s = MemoryDesign::matched(0.5).build().unwrap();
    let dt = s.default_dt();
    c.bench_function("collective matched run", |b| b.iter(|| s.integrate(black_box(dt)).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let mut d = MemoryDesign::matched(0.5);
    d.targets.gamma = 5.0;
    d.targets.kappa = 5.0;
    d.targets.raman_factor = 10.0;
    d.window = 4.0;
    let s = d.build().unwrap();
    let record_dt = s.default_dt();
    let stride = oracle_substeps(&s.params, record_dt);
    let ens = AtomEnsemble::uniform(64, s.params.length).unwrap();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("64 atoms", |b| {
        b.iter(|| {
            integrate_full(&s.params, &ens, &s.schedule, &s.pulse, &s.scenario, record_dt / stride as f64, stride)
                .unwrap()
        })
    });
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let spec = CrosstalkSpec::reference(1);
    c.bench_function("crosstalk quadrature", |b| b.iter(|| crosstalk_exact(black_box(&spec)).unwrap()));
    c.bench_function("dirichlet", |b| b.iter(|| dirichlet(black_box(512), 1.0, black_box(37.5))));
}

criterion_group!(benches, collective, oracle, closed_forms);
criterion_main!(benches);
