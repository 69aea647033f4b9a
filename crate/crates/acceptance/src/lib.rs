//! Acceptance suite for `acfield`. The checks live in `tests/acceptance.rs`
//! and run with `cargo test -p acfield-acceptance`.
