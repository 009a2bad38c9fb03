use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hystwave::exec::Exec;
use hystwave::galerkin::{hysteresis_projection, Discretization};
use hystwave::hysteresis::{PreisachDensity, PreisachEvaluator};
use hystwave::spectral::{Family, ModalCoeffs};

fn pressure(m: usize) -> ModalCoeffs {
    let mut p = ModalCoeffs::zeros(m, Family::Neumann);
    p.set(1, 0, 0.3);
    p.set(1, 1, 0.2);
    p.set(-2, 1, 0.1);
    p
}

fn projection(c: &mut Criterion) {
    let density = PreisachDensity::uniform(1.0, 1.0).unwrap();
    let evaluator = PreisachEvaluator::default();
    let mut group = c.benchmark_group("hysteresis_projection");
    group.sample_size(10);
    for (m, n_t) in [(4, 128), (8, 256)] {
        let disc = Discretization::new(1.0, 1.0, m, n_t, 4 * m + 16).unwrap();
        let p = pressure(m);
        for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, format!("m{m}_nt{n_t}")), &exec, |b, &exec| {
                b.iter(|| hysteresis_projection(black_box(&p), &disc, &density, &evaluator, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, projection);
criterion_main!(benches);
