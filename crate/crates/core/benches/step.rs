use criterion::{criterion_group, criterion_main, Criterion};
use meltsph::bench::scenario;
use meltsph::exec::Execution;
use meltsph::integrator::Simulation;

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    group.sample_size(10);
    for name in ["static_droplet", "melt2d"] {
        let cfg = scenario(name).expect("shipped scenario");
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            // Successive iterations keep advancing the same state.
            let mut sim = Simulation::new(cfg.clone(), exec).expect("scenario initialises");
            group.bench_function(format!("{name}/{label}"), |b| b.iter(|| sim.step().expect("step")));
        }
    }
    group.finish();
}

criterion_group!(benches, step);
criterion_main!(benches);
