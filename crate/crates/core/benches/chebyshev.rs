use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snsr_core::exec::Exec;
use snsr_core::filter::{cheb_apply_with, ChebyshevFilter};
use snsr_core::graph::*;
use snsr_core::BeliefVector;

/// Ring plus random chords, average degree about `2 + 2 * chords_per_node`.
fn sparse_graph(n: usize, chords_per_node: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    for _ in 0..n * chords_per_node {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            edges.push((i, j, rng.random_range(0.5..1.5)));
        }
    }
    Graph::new(n, edges, WeightSign::Unsigned).unwrap()
}

fn bench_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("cheb_apply");
    let k = 16;
    for &n in &[1 << 12, 1 << 15, 1 << 17] {
        let g = sparse_graph(n, 4, 1);
        let l = build_laplacian(&g, LaplacianKind::Combinatorial).unwrap();
        let lt = scale_laplacian(&l, estimate_lambda_max_default(&l).value).unwrap();
        let f = ChebyshevFilter::new(vec![0.5; k + 1], lt.lambda_max).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = BeliefVector::vertex((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        group.throughput(Throughput::Elements((k * (g.edge_count() + n)) as u64));
        for (name, exec) in [("serial", Exec::Serial), ("parallel", Exec::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| cheb_apply_with(exec, &f, &lt, &x, false).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_apply);
criterion_main!(benches);
