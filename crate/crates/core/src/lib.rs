// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chains;
pub mod cli;
pub mod decay;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod inequality;
pub mod mollify;
pub mod quadrature;

pub use error::{Error, Result};
