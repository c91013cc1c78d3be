//! Benchmarks for the mixlap core crate.
