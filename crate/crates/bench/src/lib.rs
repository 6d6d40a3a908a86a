//! Criterion benchmarks for `sqperm-core`; run `cargo bench -p sqperm-bench`.
