use criterion::{criterion_group, criterion_main, Criterion};
use ndcomm_core::boundslab::{
    all_condition_sets, certify_independence, check_counting_inequalities, max_condition_set,
    min_one_cover, CliqueMode, CoverTarget, FunctionTable, DEFAULT_CLIQUE_BUDGET,
    DEFAULT_COVER_BUDGET, DEFAULT_MONOMIAL_BUDGET,
};
use ndcomm_core::HeqParams;

fn solvers(c: &mut Criterion) {
    let p21 = HeqParams::new(2, 1).unwrap();
    let p22 = HeqParams::new(2, 2).unwrap();
    let f = FunctionTable::heq(p21, DEFAULT_COVER_BUDGET).unwrap();
    c.bench_function("cover_heq_2_1_diagonal", |b| {
        b.iter(|| min_one_cover(&f, CoverTarget::Diagonal).unwrap())
    });
    c.bench_function("clique_exact_2_2", |b| {
        b.iter(|| max_condition_set(p22, CliqueMode::Exact, DEFAULT_CLIQUE_BUDGET).unwrap())
    });
    let sets = all_condition_sets(p21, DEFAULT_CLIQUE_BUDGET, 1 << 16).unwrap();
    c.bench_function("polycheck_2_1_all", |b| {
        b.iter(|| {
            sets.iter()
                .map(|s| {
                    certify_independence(s, DEFAULT_MONOMIAL_BUDGET)
                        .unwrap()
                        .rank
                })
                .sum::<usize>()
        })
    });
}

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("counting");
    g.sample_size(10);
    g.bench_function("sweep_3_8_by_k_12", |b| {
        b.iter(|| check_counting_inequalities(3..=8, 3..=12).unwrap())
    });
    g.finish();
}

criterion_group!(benches, solvers, counting);
criterion_main!(benches);
