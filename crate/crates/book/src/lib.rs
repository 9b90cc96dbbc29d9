//! The chapters of the book in `book/src`, one module each, so that
//! `cargo test` runs every listing as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/matrices.md")]
pub mod matrices {}
#[doc = include_str!("../../../book/src/synthesis.md")]
pub mod synthesis {}
#[doc = include_str!("../../../book/src/spacetime.md")]
pub mod spacetime {}
#[doc = include_str!("../../../book/src/lattice.md")]
pub mod lattice {}
#[doc = include_str!("../../../book/src/reference.md")]
pub mod reference {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
