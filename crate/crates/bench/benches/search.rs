use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tricube::decompose::{decompose, DecompositionParams};
use tricube::generate::{random_bipartite, random_triangle_free, target_order, two_cliques_linked};
use tricube::graph::{balanced_biclique_bounds, max_disjoint_red_cliques};
use tricube::hypercube::{bandwidth_order, cube_vertices};
use tricube::oracle::{contains_red_cube, exhaustive_ramsey, Enumeration};
use tricube::snake::{snake_embed, ForbiddenSets, Snake, SnakeMode};
use tricube::solver::{solve, SolverParams};
use tricube::CubeVertex;

fn cliques(c: &mut Criterion) {
    let mut group = c.benchmark_group("red_cliques");
    for n in [6u32, 8] {
        let g = random_bipartite(target_order(n, 0.1), 0.05, 1);
        let m = 1usize << (n - 1);
        group.bench_with_input(BenchmarkId::new("packing", n), &g, |b, g| {
            b.iter(|| max_disjoint_red_cliques(g, &g.full_set(), m))
        });
    }
    group.finish();
}

fn bicliques(c: &mut Criterion) {
    let mut group = c.benchmark_group("biclique");
    for p in [0.1, 0.3] {
        let g = random_bipartite(128, p, 2);
        let left: Vec<usize> = (0..64).collect();
        let right: Vec<usize> = (64..128).collect();
        group.bench_with_input(BenchmarkId::new("budget_4000", p), &g, |b, g| {
            b.iter(|| balanced_biclique_bounds(g, &left, &right, Some(4_000)))
        });
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    group.sample_size(10);
    for n in [7u32, 9] {
        let g = random_triangle_free(target_order(n, 0.1), 0.01, usize::MAX, 3);
        let params = DecompositionParams::desk(n);
        group.bench_with_input(BenchmarkId::new("greedy_p0.01", n), &g, |b, g| {
            b.iter(|| decompose(g, &params).unwrap())
        });
    }
    group.finish();
}

fn snakes(c: &mut Criterion) {
    let n = 10;
    let g = two_cliques_linked(512, 504);
    let snake = Snake::discover(&g, vec![(0..512).collect(), (512..1024).collect()], 504);
    let q: Vec<CubeVertex> = cube_vertices(n).collect();
    c.bench_function("snake_embed_q10", |b| {
        b.iter(|| {
            snake_embed(&g, &snake, &q, &ForbiddenSets::new(), n, SnakeMode::Relaxed).unwrap()
        })
    });
}

fn solving(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for n in [6u32, 8] {
        let params = SolverParams::desk(n);
        let g = random_triangle_free(target_order(n, params.epsilon), 0.5, 1 << (n - 1), 0);
        group.bench_with_input(BenchmarkId::new("sparse_random", n), &g, |b, g| {
            b.iter(|| solve(g, n, &params).unwrap())
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("ramsey_q2_n7_canonical", |b| {
        b.iter(|| exhaustive_ramsey(2, 7, Enumeration::Canonical).unwrap())
    });
    let g = random_triangle_free(24, 0.2, usize::MAX, 4);
    group.bench_function("contains_q3_24", |b| {
        b.iter(|| contains_red_cube(&g, 3).unwrap())
    });
    group.bench_function("bandwidth_order_q16", |b| {
        b.iter(|| bandwidth_order(black_box(cube_vertices(16))))
    });
    group.finish();
}

criterion_group!(
    benches,
    cliques,
    bicliques,
    decomposition,
    snakes,
    solving,
    oracles
);
criterion_main!(benches);
