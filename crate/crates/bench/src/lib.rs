//! Criterion benchmarks for the engine, the lab and the tooling live under
//! `benches/`; run them with `cargo bench -p ittm-bench`.
