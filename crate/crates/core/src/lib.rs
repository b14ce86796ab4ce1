// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensembles;
pub mod error;
pub mod harness;
pub mod lemmas;
pub mod lss;
pub mod seed;
mod serde_complex;
pub mod stieltjes;

pub use error::{Error, Result};
