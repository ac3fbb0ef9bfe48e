//! Benchmark-only crate; the measurements live in `benches/parse.rs`.
