use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndcomm_core::heqfun::{heq, DEFAULT_PAIR_BUDGET};
use ndcomm_core::protocols::{
    proof_space, run_weak_nd_heq, verify_strong_nondeterminism, verify_weak_nondeterminism,
    QuantumHeq,
};
use ndcomm_core::{HeqParams, InstanceMode, Instances, Proof};
use std::hint::black_box;

fn equal_branch(c: &mut Criterion) {
    let mut g = c.benchmark_group("equal_branch");
    for k in [3u32, 6, 10] {
        let p = HeqParams::new(k, 4).unwrap();
        let (a, b) = (p.input_at(12345), p.input_at(67890));
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |bch, _| {
            bch.iter(|| run_weak_nd_heq(black_box(&a), black_box(&b), &Proof::equal()).unwrap())
        });
    }
    g.finish();
}

fn sweeps(c: &mut Criterion) {
    let p = HeqParams::new(2, 2).unwrap();
    let inst = Instances::new(p, InstanceMode::Exhaustive, DEFAULT_PAIR_BUDGET).unwrap();
    let proofs = proof_space(2);
    c.bench_function("sweep_quantum_2_2", |b| {
        b.iter(|| verify_weak_nondeterminism(&QuantumHeq, heq, &inst, &proofs))
    });
    c.bench_function("sweep_neq_8", |b| {
        b.iter(|| verify_strong_nondeterminism(8, DEFAULT_PAIR_BUDGET).unwrap())
    });
}

criterion_group!(benches, equal_branch, sweeps);
criterion_main!(benches);
