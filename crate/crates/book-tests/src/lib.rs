//! Keeps the guide honest: every chapter is included as a rustdoc page, so
//! `cargo test` compiles and runs the book's code blocks as doctests.
//! mdbook itself cannot test snippets that use dependencies; this shim can.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/decisions.md")]
pub mod decisions {}

#[doc = include_str!("../../../book/src/folding.md")]
pub mod folding {}

#[doc = include_str!("../../../book/src/objectives.md")]
pub mod objectives {}

#[doc = include_str!("../../../book/src/running.md")]
pub mod running {}

#[doc = include_str!("../../../book/src/surrogate.md")]
pub mod surrogate {}

#[doc = include_str!("../../../book/src/benchmarks.md")]
pub mod benchmarks {}
