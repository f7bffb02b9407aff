#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bounds;
pub mod checks;
pub mod counting;
pub mod cutting;
pub mod geometry;
pub mod io;
pub mod partition;
pub mod rational;
pub mod rng;
pub mod shallow;
pub mod sweep;
pub mod tree;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
