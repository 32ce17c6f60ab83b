//! Lanczos approximation of matrix functions `f(A) b` for real symmetric
//! `A`, with a posteriori and a priori error bounds obtained from contour
//! integrals and from the error of shifted linear systems.

pub mod bounds;
pub mod cli;
pub mod contour;
pub mod error;
pub mod fa;
pub mod function;
pub mod lanczos;
pub mod linalg;
pub mod linsys;
pub mod problems;

pub use error::{Error, Result};
