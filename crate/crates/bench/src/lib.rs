//! Criterion benchmarks for the largerho kernels; see `benches/`.
