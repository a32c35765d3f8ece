//! Criterion benchmarks for qap-core live under `benches/`.
