//! Benchmark helpers; the interesting code lives in `benches/`.
