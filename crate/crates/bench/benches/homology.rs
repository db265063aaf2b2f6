//! Morse-reduced versus brute-force homology on graphs where the girth
//! hypotheses hold, so the reduction actually engages.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use maghom_core::enumerate::random_girth5_graph;
use maghom_core::graph::{families, Graph};
use maghom_core::homology::{compute_homology, ComputeOptions, UseMorse};
use maghom_core::random::trial_rng;

fn options(use_morse: UseMorse, l_max: u32) -> ComputeOptions {
    ComputeOptions {
        l_max,
        use_morse,
        tree_shortcut: false,
        ..Default::default()
    }
}

fn subjects() -> Vec<(&'static str, Graph, u32)> {
    let mut rng = trial_rng(0xBE7C, 0);
    vec![
        ("petersen", families::petersen(), 4),
        ("c9", families::cycle(9), 5),
        ("girth5-rand-n14", random_girth5_graph(14, 3, &mut rng), 4),
    ]
}

fn bench_homology(c: &mut Criterion) {
    let mut group = c.benchmark_group("homology");
    group.sample_size(10);
    for (name, g, l_max) in subjects() {
        group.bench_with_input(BenchmarkId::new("morse", name), &g, |b, g| {
            b.iter(|| black_box(compute_homology(g, &options(UseMorse::On, l_max))))
        });
        group.bench_with_input(BenchmarkId::new("brute", name), &g, |b, g| {
            b.iter(|| black_box(compute_homology(g, &options(UseMorse::Off, l_max))))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_homology);
criterion_main!(benches);
