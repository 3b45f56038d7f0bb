//! Benchmark-only crate; the targets live under `benches/`.
//!
//! For end-to-end per-level CPU time tables with the accuracy gate, prefer
//! `qmle bench`; these criterion targets isolate the hot kernels instead.
