use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qtc_core::qcc::{siso_decode, track_error};
use qtc_core::turbo::{run_frame, simulate_frame, turbo_decode};
use qtc_core::{
    CodeRegistry, CodeRole, CodeSpec, DepolarizingChannel, MessageRole, MessageSequence, MessageSubject, TurboSystem,
};

fn specs(steps: usize) -> Vec<(&'static str, CodeSpec)> {
    let reg = CodeRegistry::builtin();
    vec![
        ("opt-inner", CodeSpec::new(reg.get("opt-inner").unwrap().clone(), CodeRole::Inner, steps).unwrap()),
        ("opt-outer", CodeSpec::new(reg.get("opt-outer").unwrap().clone(), CodeRole::Outer, steps).unwrap()),
    ]
}

fn bench_siso(c: &mut Criterion) {
    let ch = DepolarizingChannel::new(0.33).unwrap();
    let mut group = c.benchmark_group("siso_decode");
    for steps in [100, 1000] {
        for (name, spec) in specs(steps) {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let err = ch.sample_error(spec.physical_len(), &mut rng);
            let syn = track_error(&spec, &err).unwrap().syndrome;
            let pp = MessageSequence::new(
                MessageRole::APriori,
                MessageSubject::Physical,
                vec![ch.symbol_priors(); spec.physical_len()],
            );
            let pl = MessageSequence::uniform(spec.logical_len(), MessageRole::APriori, MessageSubject::Logical);
            group.throughput(Throughput::Elements(steps as u64));
            group.bench_with_input(BenchmarkId::new(name, steps), &steps, |b, _| {
                b.iter(|| siso_decode(&spec, &pp, &pl, &syn).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_track(c: &mut Criterion) {
    let ch = DepolarizingChannel::new(0.33).unwrap();
    let (_, spec) = specs(3000).remove(0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let err = ch.sample_error(spec.physical_len(), &mut rng);
    c.bench_function("track_error/3000", |b| b.iter(|| track_error(&spec, &err).unwrap()));
}

fn bench_turbo(c: &mut Criterion) {
    let reg = CodeRegistry::builtin();
    let sys = TurboSystem::from_seeds(
        reg.get("opt-inner").unwrap().clone(),
        reg.get("opt-outer").unwrap().clone(),
        600,
        15,
        3,
    )
    .unwrap();
    let ch = DepolarizingChannel::new(0.33).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let frame = simulate_frame(&sys, &ch, &mut rng).unwrap();
    let mut group = c.benchmark_group("turbo");
    group.sample_size(20);
    group.bench_function("decode/600", |b| b.iter(|| turbo_decode(&sys, &frame.syn1, &frame.syn2, &ch).unwrap()));
    group.bench_function("frame/600", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        b.iter(|| run_frame(&sys, &ch, &mut rng).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_siso, bench_track, bench_turbo);
criterion_main!(benches);
