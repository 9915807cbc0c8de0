// Benchmarks live in benches/; see that directory.
