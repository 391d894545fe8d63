//! Benchmarks for the search routines; see `benches/search.rs`.
