use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sqfree_ghw::cartesian::CartesianSet;
use sqfree_ghw::exec::Execution;
use sqfree_ghw::footprint::footprint_bound;
use sqfree_ghw::ghw::{ghw_exact_subspaces, ghw_exact_support};
use sqfree_ghw::{Field, SearchOptions};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn options(execution: Execution) -> SearchOptions {
    SearchOptions { execution, ..SearchOptions::default() }
}

fn footprint(c: &mut Criterion) {
    let mut group = c.benchmark_group("footprint_bound");
    for (sizes, d, r) in [(vec![3usize; 5], 2, 3), (vec![2, 3, 4, 5, 5, 7], 3, 3)] {
        let label = format!("{sizes:?}/d{d}/r{r}");
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, &label), &sizes, |b, sizes| {
                b.iter(|| footprint_bound(sizes, d, r, true, &options(mode)).unwrap())
            });
        }
    }
    group.finish();
}

fn subspaces(c: &mut Criterion) {
    let mut group = c.benchmark_group("ghw_exact_subspaces");
    group.sample_size(10);
    let field = Field::new(3).unwrap();
    let code = CartesianSet::affine(&field, 4).build_code(2, true).unwrap();
    for r in [2, 3] {
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("F3^4/d2/r{r}")), &r, |b, &r| {
                b.iter(|| ghw_exact_subspaces(code.generator(), r, &options(mode)).unwrap())
            });
        }
    }
    group.finish();
}

fn supports(c: &mut Criterion) {
    let mut group = c.benchmark_group("ghw_exact_support");
    group.sample_size(10);
    let field = Field::new(3).unwrap();
    let torus = CartesianSet::torus(&field, 5).build_code(2, true).unwrap();
    let affine = CartesianSet::affine(&field, 3).build_code(2, false).unwrap();
    for (label, code, r) in [("torus3^5/d2/r3", &torus, 3), ("F3^3/leq2/r4", &affine, 4)] {
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, label), &r, |b, &r| {
                b.iter(|| ghw_exact_support(code.generator(), r, &options(mode)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, footprint, subspaces, supports);
criterion_main!(benches);
