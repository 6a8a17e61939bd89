//! Criterion benchmarks for the decoder live in `benches/`.
