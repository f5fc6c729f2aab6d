//! Criterion benchmarks for replicator-core; see `benches/`.
