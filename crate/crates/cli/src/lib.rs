//! Library surface of the `perikos` CLI: JSON data-transfer types and the
//! job runner. The binary in `main.rs` only parses flags into a
//! [`job::JobSpec`] and prints what [`job::run`] returns, so flag-driven
//! and `--json`-driven invocations share one validation and execution
//! path.

pub mod dto;
pub mod job;
