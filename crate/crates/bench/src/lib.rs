//! Criterion benchmarks for the normal kernel, grid convolution and the Monte
//! Carlo oracle; see `benches/kernels.rs`.
