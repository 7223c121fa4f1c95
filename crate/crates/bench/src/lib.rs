//! Benchmark-only crate; see `benches/solver.rs` for the criterion suite.
