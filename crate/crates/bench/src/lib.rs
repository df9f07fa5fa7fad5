//! Benchmarks for hyperalg; see `benches/`.
