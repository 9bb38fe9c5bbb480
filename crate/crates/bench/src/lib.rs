//! Benchmarks for fqcount live in `benches/`.
