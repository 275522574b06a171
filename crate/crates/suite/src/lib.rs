//! Shared corpus and reference helpers for the acceptance suite.

#[path = "../../core/tests/common/mod.rs"]
pub mod common;
