//! Criterion benchmarks for the simulation kernels live in `benches/`.
