//! Acceptance gate for `quantum-blobs`; see `tests/acceptance.rs`.
