//! Shared fixtures for the benchmarks.

use hardcore::experiments::{make_triangle_free, sample_gnp, TriangleFreeMode};
use hardcore::Graph;

/// A triangle-free `G(n, d/n)` sample, made triangle-free by edge deletion.
pub fn triangle_free_fixture(n: usize, d: f64, seed: u64) -> Graph {
    let g = sample_gnp(n, d / n as f64, seed).expect("valid probability");
    make_triangle_free(g, TriangleFreeMode::TriangleDeletion, seed, 1, None)
        .expect("deletion always succeeds")
        .graph
}
