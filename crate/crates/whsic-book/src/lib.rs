//! Doc-test harness for the guide in `book/`.
//!
//! Each module below carries one chapter of the mdBook as its documentation,
//! so `cargo test` compiles and runs every Rust snippet the book shows —
//! the text and the library cannot drift apart silently. The modules are
//! otherwise empty; this crate exports no API.

#![forbid(unsafe_code)]

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/heisenberg.md")]
pub mod heisenberg {}

#[doc = include_str!("../../../book/src/symmetric-subspace.md")]
pub mod symmetric_subspace {}

#[doc = include_str!("../../../book/src/wh-bases.md")]
pub mod wh_bases {}

#[doc = include_str!("../../../book/src/sic-lift.md")]
pub mod sic_lift {}

#[doc = include_str!("../../../book/src/search.md")]
pub mod search {}

#[doc = include_str!("../../../book/src/fusion-frames.md")]
pub mod fusion_frames {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
