//! Criterion benchmarks for the analysis kernels live under `benches/`.
