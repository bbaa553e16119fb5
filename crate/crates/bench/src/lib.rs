//! Criterion benchmarks for ghp-core; see `benches/`.
