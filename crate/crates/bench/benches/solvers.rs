use clockham_bench::yes_bundle;
use clockham_core::{eig_dense, lowest_eigs, ConstructionKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const KINDS: [(ConstructionKind, &str); 3] = [
    (ConstructionKind::Bravyi, "bravyi"),
    (ConstructionKind::Qutrit, "qutrit"),
    (ConstructionKind::ThreeLocal, "threelocal"),
];

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for (kind, name) in KINDS {
        for gates in [1, 2] {
            let bundle = yes_bundle(kind, gates);
            group.bench_with_input(BenchmarkId::new(name, gates), &bundle, |b, bundle| b.iter(|| bundle.assemble()));
        }
    }
    group.finish();
}

fn dense(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig_dense");
    group.sample_size(10);
    for (kind, name) in KINDS {
        let matrix = yes_bundle(kind, 1).assemble().to_dense();
        group.bench_with_input(BenchmarkId::new(name, matrix.nrows()), &matrix, |b, m| b.iter(|| eig_dense(m).unwrap()));
    }
    group.finish();
}

fn lanczos(c: &mut Criterion) {
    let mut group = c.benchmark_group("lowest_eigs");
    group.sample_size(10);
    for (kind, name) in KINDS {
        let op = yes_bundle(kind, 2).assemble();
        group.bench_with_input(BenchmarkId::new(name, op.dim()), &op, |b, op| {
            b.iter(|| lowest_eigs(op, 2, 1e-9, 7).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, assembly, dense, lanczos);
criterion_main!(benches);
