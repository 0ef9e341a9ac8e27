//! Criterion benchmarks for the simulator and the fitting routines; see
//! `benches/`.
