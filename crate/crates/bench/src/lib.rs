//! Criterion benchmarks for table generation, the two classicality checks and
//! tomography. Run with `cargo bench -p wignerlab-bench`.
