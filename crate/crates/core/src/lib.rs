//! Certified condition numbers of integer problem instances, the a-priori
//! worst-case bounds they are measured against, and two iterative root
//! finders (Graeffe root squaring and unshifted QR) with iteration predictors.

pub mod bounds;
pub mod condition;
pub mod error;
pub mod graeffe;
pub mod harness;
pub mod heights;
pub mod numcore;
pub mod qr;

pub use error::{Error, Result};
