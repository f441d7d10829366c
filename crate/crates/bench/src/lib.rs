//! Criterion benchmarks for `lgc-core` live under `benches/`.
